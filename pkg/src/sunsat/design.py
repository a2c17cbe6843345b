"""Constellation generators: sun-synchronous-plane greedy cover and the
multi-shell Walker-delta baseline, plus the demand-sweep evaluation.

A sun-synchronous plane is a fixed closed curve on the latitude x
local-solar-time grid; covering the demand map is a weighted set-cover
problem solved greedily. The Walker baseline answers the same demand with
time-blind uniform band coverage, one shell per capacity unit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import radiation
from .astro import (
    OrbitSpec,
    nodal_period_s,
    propagate_ground_track,
    sun_synchronous_inclination,
)
from .coverage import FootprintSpec, WalkerConfig, earth_central_angle, min_walker_total
from .demand import DemandGrid, build_demand_grid
from .errors import InvalidInputError, UncoverableDemandError
from .kernels import curve_cover_mask


@dataclass(frozen=True)
class SSPlane:
    """One sun-synchronous orbital plane keyed by its ascending-node local time."""

    ltan_h: float
    altitude_km: float
    inclination_deg: float
    n_sats: int

    def __post_init__(self):
        if not 0.0 <= self.ltan_h < 24.0:
            raise InvalidInputError(f"ltan_h must be in [0, 24), got {self.ltan_h}")
        if self.n_sats < 1:
            raise InvalidInputError(f"n_sats must be >= 1, got {self.n_sats}")

    def satellites(self) -> list[OrbitSpec]:
        # LST of the node at epoch 0 equals raan/15, so raan = 15 * ltan
        return [
            OrbitSpec(
                altitude_km=self.altitude_km,
                inclination_deg=self.inclination_deg,
                raan_deg=15.0 * self.ltan_h,
                phase_deg=360.0 * j / self.n_sats,
            )
            for j in range(self.n_sats)
        ]


@dataclass
class ConstellationDesign:
    """Output of a greedy cover: SS planes or Walker shells plus the audit trail."""

    variant: str  # "ss" | "walker"
    planes: list[SSPlane] = field(default_factory=list)
    shells: list[WalkerConfig] = field(default_factory=list)
    total_sats: int = 0
    audit_log: list[dict] = field(default_factory=list)

    def satellites(self) -> list[OrbitSpec]:
        sats: list[OrbitSpec] = []
        for plane in self.planes:
            sats.extend(plane.satellites())
        for cfg in self.shells:
            spp = cfg.sats_per_plane
            for k in range(cfg.planes_p):
                for m in range(spp):
                    sats.append(
                        OrbitSpec(
                            altitude_km=cfg.altitude_km,
                            inclination_deg=cfg.inclination_deg,
                            raan_deg=360.0 * k / cfg.planes_p,
                            phase_deg=360.0 * m / spp
                            + 360.0 * cfg.phasing_f * k / cfg.total_sats_t,
                        )
                    )
        return sats

    def to_jsonable(self) -> dict:
        out = {
            "variant": self.variant,
            "total_sats": self.total_sats,
            "n_components": len(self.planes) + len(self.shells),
            "audit_log": self.audit_log,
        }
        if self.variant == "ss":
            out["planes"] = [
                {
                    "ltan_h": p.ltan_h,
                    "altitude_km": p.altitude_km,
                    "inclination_deg": p.inclination_deg,
                    "n_sats": p.n_sats,
                }
                for p in self.planes
            ]
        else:
            out["shells"] = [
                {
                    "inclination_deg": s.inclination_deg,
                    "total_sats_t": s.total_sats_t,
                    "planes_p": s.planes_p,
                    "phasing_f": s.phasing_f,
                    "altitude_km": s.altitude_km,
                }
                for s in self.shells
            ]
        return out


def sats_per_ss_plane(altitude_km: float, fp: FootprintSpec) -> int:
    """Minimum equally spaced satellites so consecutive footprints overlap."""
    lam = fp.central_angle_deg(altitude_km)
    return int(math.ceil(180.0 / lam))


# ---------------------------------------------------------------------------
# plane traces on the demand grid
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _base_trace_mask(
    altitude_km: float,
    min_elevation_deg: float,
    lat_step_deg: float,
    lst_step_h: float,
    n_lat: int,
    n_lst: int,
) -> np.ndarray:
    """Cells within the footprint of the plane whose LTAN is the first bin center.

    The demand grid is treated as a sphere with longitude = 15 deg/h * LST;
    shifting LTAN by whole bins rolls this mask along the LST axis exactly.
    """
    inc = sun_synchronous_inclination(altitude_km)
    lam = earth_central_angle(altitude_km, min_elevation_deg)
    ltan0 = lst_step_h / 2.0
    orbit = OrbitSpec(
        altitude_km=altitude_km, inclination_deg=inc, raan_deg=15.0 * ltan0
    )
    period = nodal_period_s(altitude_km, inc)
    track = propagate_ground_track(orbit, period, period / 4096.0, frame="solar")
    cv_lat = np.radians(track.lat_deg)
    cv_lon = np.radians(track.lst_h * 15.0)

    lat_c = np.radians(-90.0 + (np.arange(n_lat) + 0.5) * lat_step_deg)
    lst_c = np.radians(((np.arange(n_lst) + 0.5) * lst_step_h) * 15.0)
    pt_lat = np.repeat(lat_c, n_lst)
    pt_lon = np.tile(lst_c, n_lat)
    h_lam = math.sin(0.5 * math.radians(lam)) ** 2
    mask = curve_cover_mask(pt_lat, pt_lon, cv_lat, cv_lon, h_lam)
    out = mask.reshape(n_lat, n_lst).astype(bool)
    out.setflags(write=False)
    return out


def _trace_masks(demand: DemandGrid, altitude_km: float, fp: FootprintSpec):
    """One boolean mask per candidate LTAN (the demand grid's LST bin centers)."""
    n_lat, n_lst = demand.values.shape
    base = _base_trace_mask(
        altitude_km,
        fp.min_elevation_deg,
        demand.lat_step_deg,
        demand.lst_step_h,
        n_lat,
        n_lst,
    )
    return [np.roll(base, k, axis=1) for k in range(n_lst)]


def ss_plane_trace_cells(
    plane: SSPlane, demand: DemandGrid, fp: FootprintSpec
) -> set[tuple[int, int]]:
    """Demand-grid cells covered by one plane's solar-frame trace."""
    n_lat, n_lst = demand.values.shape
    k = int(round(plane.ltan_h / demand.lst_step_h - 0.5)) % n_lst
    base = _base_trace_mask(
        plane.altitude_km,
        fp.min_elevation_deg,
        demand.lat_step_deg,
        demand.lst_step_h,
        n_lat,
        n_lst,
    )
    mask = np.roll(base, k, axis=1)
    ii, jj = np.nonzero(mask)
    return set(zip(ii.tolist(), jj.tolist()))


# ---------------------------------------------------------------------------
# greedy covers
# ---------------------------------------------------------------------------

def _select_max_cell(residual: np.ndarray, lat_centers: np.ndarray) -> tuple[int, int]:
    """Max-residual cell; ties go to larger |lat|, then smaller LST."""
    peak = residual.max()
    cand = np.argwhere(residual == peak)
    abs_lat = np.abs(lat_centers[cand[:, 0]])
    cand = cand[abs_lat == abs_lat.max()]
    row = cand[np.argmin(cand[:, 1])]
    return int(row[0]), int(row[1])


def _check_reachable(demand: DemandGrid, reach_deg: float):
    lat_c = demand.lat_centers_deg
    bad_rows = np.abs(lat_c) > reach_deg
    if np.any(bad_rows & (demand.values.max(axis=1) > 0)):
        i = int(np.argwhere(bad_rows & (demand.values.max(axis=1) > 0))[0][0])
        j = int(np.argmax(demand.values[i]))
        raise UncoverableDemandError(
            lat_deg=float(lat_c[i]), lst_h=float(demand.lst_centers_h[j])
        )


def greedy_ss_cover(
    demand: DemandGrid, altitude_km: float, fp: FootprintSpec
) -> ConstellationDesign:
    """Cover the demand grid with sun-synchronous planes, greedily.

    Each iteration: (1) pick the max-residual cell (larger |lat| first, then
    smaller LST on ties); (2) among candidate LTANs whose trace crosses that
    cell, add the plane removing the most residual (smaller LTAN on ties) and
    subtract one capacity unit from every cell it covers, clamping at zero;
    (3) stop when the residual is identically zero. Planes may repeat at the
    same LTAN to stack capacity.
    """
    if not np.all(np.isfinite(demand.values)):
        raise InvalidInputError("demand grid must be finite")
    inc = sun_synchronous_inclination(altitude_km)
    lam = fp.central_angle_deg(altitude_km)
    n_per_plane = sats_per_ss_plane(altitude_km, fp)
    reach = (180.0 - inc) + lam
    _check_reachable(demand, reach)

    masks = _trace_masks(demand, altitude_km, fp)
    lat_centers = demand.lat_centers_deg
    lst_centers = demand.lst_centers_h
    residual = demand.values.copy()
    planes: list[SSPlane] = []
    audit: list[dict] = []

    while residual.max() > 0.0:
        i, j = _select_max_cell(residual, lat_centers)
        clipped = np.minimum(residual, 1.0)
        best_k = -1
        best_removed = -1.0
        for k, mask in enumerate(masks):
            if not mask[i, j]:
                continue
            removed = float(clipped[mask].sum())
            if removed > best_removed:
                best_removed = removed
                best_k = k
        if best_k < 0:
            raise UncoverableDemandError(
                lat_deg=float(lat_centers[i]), lst_h=float(lst_centers[j])
            )
        mask = masks[best_k]
        residual[mask] = np.maximum(residual[mask] - 1.0, 0.0)
        plane = SSPlane(
            ltan_h=float(lst_centers[best_k]),
            altitude_km=altitude_km,
            inclination_deg=inc,
            n_sats=n_per_plane,
        )
        planes.append(plane)
        audit.append(
            {
                "iteration": len(audit),
                "cell_lat_deg": float(lat_centers[i]),
                "cell_lst_h": float(lst_centers[j]),
                "cell_index": [i, j],
                "ltan_h": plane.ltan_h,
                "removed": best_removed,
                "residual_total": float(residual.sum()),
            }
        )
    return ConstellationDesign(
        variant="ss",
        planes=planes,
        total_sats=len(planes) * n_per_plane,
        audit_log=audit,
    )


def greedy_walker_cover(
    demand: DemandGrid,
    shell_altitudes_km,
    fp: FootprintSpec,
    inclination_step_deg: float = 5.0,
    min_inclination_deg: float = 30.0,
    max_walker_total: int = 2000,
    lat_step_deg: float = 1.0,
    lon_step_deg: float = 1.0,
    time_step_s: float = 60.0,
) -> ConstellationDesign:
    """Time-blind Walker baseline: one band-covering shell per capacity unit.

    Each iteration picks the max-residual cell, rounds its |lat| up to the
    next inclination step (floor 30 deg), sizes a minimum Walker shell for
    band |lat| <= inclination at the next altitude in the cycle, and
    subtracts one unit from every cell inside the band across all LST bins.
    """
    alts = list(shell_altitudes_km)
    if not alts:
        raise InvalidInputError("shell_altitudes_km must be nonempty")
    if not np.all(np.isfinite(demand.values)):
        raise InvalidInputError("demand grid must be finite")

    lat_centers = demand.lat_centers_deg
    lst_centers = demand.lst_centers_h
    max_lam = max(fp.central_angle_deg(a) for a in alts)
    _check_reachable(demand, 90.0 + max_lam)

    sizing_cache: dict[tuple, WalkerConfig] = {}
    residual = demand.values.copy()
    shells: list[WalkerConfig] = []
    audit: list[dict] = []

    while residual.max() > 0.0:
        i, j = _select_max_cell(residual, lat_centers)
        inc = math.ceil(abs(lat_centers[i]) / inclination_step_deg) * inclination_step_deg
        inc = min(90.0, max(min_inclination_deg, inc))
        alt = alts[len(shells) % len(alts)]
        key = (alt, inc, fp.min_elevation_deg, lat_step_deg, lon_step_deg, time_step_s)
        if key not in sizing_cache:
            sizing_cache[key] = min_walker_total(
                alt,
                inc,
                fp,
                band_limit_deg=inc,
                max_total=max_walker_total,
                lat_step_deg=lat_step_deg,
                lon_step_deg=lon_step_deg,
                time_step_s=time_step_s,
            )
        cfg = sizing_cache[key]
        band_rows = np.abs(lat_centers) <= inc
        removed = float(np.minimum(residual[band_rows, :], 1.0).sum())
        residual[band_rows, :] = np.maximum(residual[band_rows, :] - 1.0, 0.0)
        shells.append(cfg)
        audit.append(
            {
                "iteration": len(audit),
                "cell_lat_deg": float(lat_centers[i]),
                "cell_lst_h": float(lst_centers[j]),
                "cell_index": [i, j],
                "inclination_deg": inc,
                "altitude_km": alt,
                "shell_total": cfg.total_sats_t,
                "removed": removed,
                "residual_total": float(residual.sum()),
            }
        )
    return ConstellationDesign(
        variant="walker",
        shells=shells,
        total_sats=sum(s.total_sats_t for s in shells),
        audit_log=audit,
    )


def replay_audit(demand: DemandGrid, design: ConstellationDesign, fp: FootprintSpec):
    """Re-apply the audit log to the initial grid; returns the final residual."""
    residual = demand.values.copy()
    lat_centers = demand.lat_centers_deg
    if design.variant == "ss":
        masks = None
        for entry, plane in zip(design.audit_log, design.planes):
            if masks is None:
                masks = _trace_masks(demand, plane.altitude_km, fp)
            k = int(round(entry["ltan_h"] / demand.lst_step_h - 0.5)) % len(masks)
            mask = masks[k]
            removed = float(np.minimum(residual[mask], 1.0).sum())
            if not math.isclose(removed, entry["removed"], rel_tol=0, abs_tol=1e-9):
                raise ValueError(
                    f"audit mismatch at iteration {entry['iteration']}: "
                    f"claimed {entry['removed']}, replayed {removed}"
                )
            residual[mask] = np.maximum(residual[mask] - 1.0, 0.0)
    else:
        for entry in design.audit_log:
            band_rows = np.abs(lat_centers) <= entry["inclination_deg"]
            removed = float(np.minimum(residual[band_rows, :], 1.0).sum())
            if not math.isclose(removed, entry["removed"], rel_tol=0, abs_tol=1e-9):
                raise ValueError(
                    f"audit mismatch at iteration {entry['iteration']}: "
                    f"claimed {entry['removed']}, replayed {removed}"
                )
            residual[band_rows, :] = np.maximum(residual[band_rows, :] - 1.0, 0.0)
    return residual


# ---------------------------------------------------------------------------
# demand sweep (satellite counts + median exposure vs bandwidth multiplier)
# ---------------------------------------------------------------------------

SWEEP_CSV_HEADER = [
    "M", "method", "total_sats", "n_planes",
    "median_electron_fluence", "median_proton_fluence",
]


def design_sweep(
    m_values,
    lat_profile,
    diurnal,
    altitude_km: float,
    fp: FootprintSpec,
    radiation_map,
    lat_step_deg: float = 0.5,
    lst_step_h: float = 0.5,
    walker_shell_offsets_km=(-10.0, 10.0),
    exposure_duration_s: float = 86400.0,
    exposure_step_s: float = 60.0,
    n_raan: int = 8,
    jobs: int = 1,
    max_walker_total: int = 2000,
) -> list[dict]:
    """For each bandwidth multiplier: run both covers and their median exposure.

    Individual design failures are recorded in the row and the sweep
    continues. Rows carry both satellite totals and per-species medians.
    """
    m_values = list(m_values)
    if not m_values or any(m <= 0 for m in m_values):
        raise InvalidInputError("m_values must be positive")
    if sorted(m_values) != m_values:
        raise InvalidInputError("m_values must be ascending")
    shell_alts = [altitude_km + off for off in walker_shell_offsets_km]
    rows = []
    for m in m_values:
        demand = build_demand_grid(
            lat_profile, diurnal, m, lat_step_deg=lat_step_deg, lst_step_h=lst_step_h
        )
        for method in ("ss", "walker"):
            row = {
                "M": m,
                "method": method,
                "aggregate_demand": demand.aggregate_demand,
            }
            try:
                if method == "ss":
                    design = greedy_ss_cover(demand, altitude_km, fp)
                    row["n_planes"] = len(design.planes)
                else:
                    design = greedy_walker_cover(
                        demand,
                        shell_alts,
                        fp,
                        max_walker_total=max_walker_total,
                    )
                    row["n_planes"] = len(design.shells)
                medians = radiation.constellation_median_exposure(
                    design,
                    radiation_map,
                    duration_s=exposure_duration_s,
                    step_s=exposure_step_s,
                    n_raan=n_raan,
                    jobs=jobs,
                )
                row["total_sats"] = design.total_sats
                row["median_electron_fluence"] = medians[radiation.Species.ELECTRON]
                row["median_proton_fluence"] = medians[radiation.Species.PROTON]
                row["design"] = design
            except Exception as exc:  # noqa: BLE001 - per-row failure capture
                row["error"] = f"{type(exc).__name__}: {exc}"
            rows.append(row)
    return rows


def sweep_csv_rows(rows: list[dict]):
    out = []
    for row in rows:
        if "error" in row:
            out.append([str(row["M"]), row["method"], "error", "error", "error", "error"])
        else:
            out.append(
                [
                    f"{row['M']:.10g}",
                    row["method"],
                    str(row["total_sats"]),
                    str(row["n_planes"]),
                    f"{row['median_electron_fluence']:.10g}",
                    f"{row['median_proton_fluence']:.10g}",
                ]
            )
    return SWEEP_CSV_HEADER, out
