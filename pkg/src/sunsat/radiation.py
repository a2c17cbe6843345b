"""Trapped-radiation flux maps and along-orbit exposure accounting.

Two map implementations sit behind one lookup interface: a gridded-file map
(bilinear in lat/lon, linear in altitude, no extrapolation) for imported
model exports, and an analytic stand-in built from a South-Atlantic-anomaly
Gaussian plus outer-belt bands in dipole geomagnetic latitude. The synthetic
parameters are artifact defaults chosen for qualitative structure, not
geophysical accuracy.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .astro import OrbitSpec, propagate_ground_track
from .errors import InvalidInputError, MapRangeError, ParseError, ValidationError


class Species(Enum):
    ELECTRON = "electron"
    PROTON = "proton"


@dataclass(frozen=True)
class SyntheticMapParams:
    """Analytic flux-map parameters (artifact defaults, tuned for shape only).

    Flux per species = SAA Gaussian in great-circle distance from the SAA
    center + belt Gaussian in |dipole geomagnetic latitude| around the belt
    center. Altitude dependence is deliberately omitted: the map is a static
    LEO-shell snapshot.
    """

    saa_center_lat_deg: float = -30.0
    saa_center_lon_deg: float = -50.0
    saa_sigma_deg: float = 20.0
    saa_amplitude_electron: float = 150.0
    saa_amplitude_proton: float = 400.0
    belt_center_maglat_deg: float = 62.0
    belt_sigma_deg: float = 5.0
    belt_amplitude_electron: float = 120.0
    belt_amplitude_proton: float = 6.0
    dipole_pole_lat_deg: float = 80.65
    dipole_pole_lon_deg: float = -72.68

    def __post_init__(self):
        for name in (
            "saa_amplitude_electron", "saa_amplitude_proton",
            "belt_amplitude_electron", "belt_amplitude_proton",
        ):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be >= 0")
        if self.saa_sigma_deg <= 0 or self.belt_sigma_deg <= 0:
            raise InvalidInputError("sigmas must be > 0")


def dipole_maglat_deg(lat_deg, lon_deg, params: SyntheticMapParams | None = None):
    """Geomagnetic latitude under a tilted-dipole approximation, degrees."""
    p = params or SyntheticMapParams()
    lat = np.radians(np.asarray(lat_deg, dtype=float))
    lon = np.radians(np.asarray(lon_deg, dtype=float))
    pl = math.radians(p.dipole_pole_lat_deg)
    pn = math.radians(p.dipole_pole_lon_deg)
    s = np.sin(lat) * math.sin(pl) + np.cos(lat) * math.cos(pl) * np.cos(lon - pn)
    return np.degrees(np.arcsin(np.clip(s, -1.0, 1.0)))


class SyntheticMap:
    """Closed-form SAA + outer-belt flux model."""

    def __init__(self, params: SyntheticMapParams | None = None):
        self.params = params or SyntheticMapParams()

    def flux(self, lat_deg, lon_deg, alt_km, species: Species):
        p = self.params
        lat = np.radians(np.asarray(lat_deg, dtype=float))
        lon = np.radians(np.asarray(lon_deg, dtype=float))
        c_lat = math.radians(p.saa_center_lat_deg)
        c_lon = math.radians(p.saa_center_lon_deg)
        h = (
            np.sin(0.5 * (lat - c_lat)) ** 2
            + np.cos(lat) * math.cos(c_lat) * np.sin(0.5 * (lon - c_lon)) ** 2
        )
        d = 2.0 * np.arcsin(np.minimum(1.0, np.sqrt(h)))
        s_saa = math.radians(p.saa_sigma_deg)
        saa = np.exp(-(d**2) / (2.0 * s_saa**2))

        m = np.abs(np.radians(dipole_maglat_deg(lat_deg, lon_deg, p)))
        c_belt = math.radians(p.belt_center_maglat_deg)
        s_belt = math.radians(p.belt_sigma_deg)
        belt = np.exp(-((m - c_belt) ** 2) / (2.0 * s_belt**2))

        if species is Species.ELECTRON:
            return p.saa_amplitude_electron * saa + p.belt_amplitude_electron * belt
        return p.saa_amplitude_proton * saa + p.belt_amplitude_proton * belt

    def describe(self) -> dict:
        return {"kind": "synthetic", **self.params.__dict__}


class GriddedMap:
    """Flux lookup on strictly increasing lat/lon/alt axes.

    Bilinear interpolation in lat/lon, linear in altitude. Altitude queries
    outside the axis raise (no extrapolation); lat/lon queries clamp to the
    edge values.
    """

    def __init__(
        self,
        lat_axis_deg: np.ndarray,
        lon_axis_deg: np.ndarray,
        alt_axis_km: np.ndarray,
        flux_by_species: dict[Species, np.ndarray],
    ):
        self.lat_axis = np.asarray(lat_axis_deg, dtype=float)
        self.lon_axis = np.asarray(lon_axis_deg, dtype=float)
        self.alt_axis = np.asarray(alt_axis_km, dtype=float)
        for name, ax in (
            ("lat", self.lat_axis), ("lon", self.lon_axis), ("alt", self.alt_axis)
        ):
            if ax.size < 1 or (ax.size > 1 and np.any(np.diff(ax) <= 0)):
                raise InvalidInputError(f"{name} axis must be strictly increasing")
        self.flux_arrays = {}
        shape = (self.lat_axis.size, self.lon_axis.size, self.alt_axis.size)
        for sp, arr in flux_by_species.items():
            arr = np.asarray(arr, dtype=float)
            if arr.shape != shape:
                raise InvalidInputError(
                    f"flux array for {sp.value} has shape {arr.shape}, expected {shape}"
                )
            if np.any(arr < 0) or np.any(~np.isfinite(arr)):
                raise ValidationError("flux values must be finite and >= 0")
            self.flux_arrays[sp] = arr

    def flux(self, lat_deg, lon_deg, alt_km, species: Species):
        if species not in self.flux_arrays:
            raise InvalidInputError(f"no flux data for species {species.value}")
        lat = np.atleast_1d(np.asarray(lat_deg, dtype=float))
        lon = np.atleast_1d(np.asarray(lon_deg, dtype=float))
        alt = np.atleast_1d(np.asarray(alt_km, dtype=float))
        lat, lon, alt = np.broadcast_arrays(lat, lon, alt)
        if np.any(alt < self.alt_axis[0] - 1e-9) or np.any(alt > self.alt_axis[-1] + 1e-9):
            raise MapRangeError(
                f"altitude outside map bounds [{self.alt_axis[0]}, {self.alt_axis[-1]}] km"
            )
        arr = self.flux_arrays[species]
        i0, wi = _axis_weights(self.lat_axis, lat)
        j0, wj = _axis_weights(self.lon_axis, lon)
        k0, wk = _axis_weights(self.alt_axis, alt)
        out = np.zeros(lat.shape)
        for di, fi in ((0, 1.0), (1, -1.0)):
            for dj, fj in ((0, 1.0), (1, -1.0)):
                for dk, fk in ((0, 1.0), (1, -1.0)):
                    w = (
                        (1.0 - wi if di == 0 else wi)
                        * (1.0 - wj if dj == 0 else wj)
                        * (1.0 - wk if dk == 0 else wk)
                    )
                    out += w * arr[
                        np.minimum(i0 + di, self.lat_axis.size - 1),
                        np.minimum(j0 + dj, self.lon_axis.size - 1),
                        np.minimum(k0 + dk, self.alt_axis.size - 1),
                    ]
        if np.isscalar(lat_deg) and np.isscalar(lon_deg) and np.isscalar(alt_km):
            return float(out.reshape(-1)[0])
        return out

    def describe(self) -> dict:
        return {
            "kind": "gridded",
            "lat_axis": self.lat_axis.tolist(),
            "lon_axis": self.lon_axis.tolist(),
            "alt_axis": self.alt_axis.tolist(),
            "species": sorted(sp.value for sp in self.flux_arrays),
        }


def _axis_weights(axis: np.ndarray, x: np.ndarray):
    """Lower index and fractional weight for linear interpolation, clamped."""
    if axis.size == 1:
        return np.zeros(x.shape, dtype=int), np.zeros(x.shape)
    xc = np.clip(x, axis[0], axis[-1])
    idx = np.clip(np.searchsorted(axis, xc, side="right") - 1, 0, axis.size - 2)
    w = (xc - axis[idx]) / (axis[idx + 1] - axis[idx])
    return idx, w


def flux_at(radiation_map, lat_deg, lon_deg, alt_km, species: Species):
    """Uniform lookup entry point over any map implementation."""
    return radiation_map.flux(lat_deg, lon_deg, alt_km, species)


# ---------------------------------------------------------------------------
# gridded-map file format: CSV body + JSON axes sidecar
# ---------------------------------------------------------------------------

GRID_CSV_HEADER = ["lat_deg", "lon_deg", "alt_km", "species", "flux"]


def save_gridded_map(gmap: GriddedMap, csv_path, sidecar_path=None):
    sidecar_path = sidecar_path or str(csv_path) + ".json"
    with open(sidecar_path, "w") as f:
        json.dump(gmap.describe(), f, indent=1, sort_keys=True)
    with open(csv_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(GRID_CSV_HEADER)
        for sp, arr in sorted(gmap.flux_arrays.items(), key=lambda kv: kv[0].value):
            for i, lat in enumerate(gmap.lat_axis):
                for j, lon in enumerate(gmap.lon_axis):
                    for k, alt in enumerate(gmap.alt_axis):
                        w.writerow(
                            [repr(lat), repr(lon), repr(alt), sp.value, repr(arr[i, j, k])]
                        )


def load_gridded_map(csv_path, sidecar_path=None) -> GriddedMap:
    """Bit-exact reload of a gridded map (values round-trip through repr)."""
    sidecar_path = sidecar_path or str(csv_path) + ".json"
    with open(sidecar_path) as f:
        meta = json.load(f)
    lat_axis = np.array(meta["lat_axis"], dtype=float)
    lon_axis = np.array(meta["lon_axis"], dtype=float)
    alt_axis = np.array(meta["alt_axis"], dtype=float)
    lat_idx = {v: i for i, v in enumerate(lat_axis)}
    lon_idx = {v: i for i, v in enumerate(lon_axis)}
    alt_idx = {v: i for i, v in enumerate(alt_axis)}
    shape = (lat_axis.size, lon_axis.size, alt_axis.size)
    arrays: dict[Species, np.ndarray] = {}
    with open(csv_path, newline="") as f:
        for line_no, row in enumerate(csv.reader(f), start=1):
            if not row or row[0].startswith("#"):
                continue
            if row == GRID_CSV_HEADER:
                continue
            if len(row) != 5:
                raise ParseError(csv_path, line_no, f"expected 5 columns, got {len(row)}")
            try:
                lat, lon, alt, flux = float(row[0]), float(row[1]), float(row[2]), float(row[4])
                sp = Species(row[3])
            except ValueError as exc:
                raise ParseError(csv_path, line_no, str(exc)) from None
            if sp not in arrays:
                arrays[sp] = np.zeros(shape)
            try:
                arrays[sp][lat_idx[lat], lon_idx[lon], alt_idx[alt]] = flux
            except KeyError:
                raise ParseError(
                    csv_path, line_no, f"coordinate not on declared axes: {row[:3]}"
                ) from None
    if not arrays:
        raise ValidationError(f"{csv_path}: no flux rows found")
    return GriddedMap(lat_axis, lon_axis, alt_axis, arrays)


# ---------------------------------------------------------------------------
# exposure integration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExposureResult:
    """Per-species fluence (flux integrated over the window)."""

    fluence: dict[Species, float]
    window_s: float

    def __add__(self, other: "ExposureResult") -> "ExposureResult":
        merged = {
            sp: self.fluence.get(sp, 0.0) + other.fluence.get(sp, 0.0)
            for sp in set(self.fluence) | set(other.fluence)
        }
        return ExposureResult(fluence=merged, window_s=self.window_s + other.window_s)


def accumulate_exposure(
    orbit: OrbitSpec,
    radiation_map,
    duration_s: float,
    step_s: float = 60.0,
    species: tuple[Species, ...] = (Species.ELECTRON, Species.PROTON),
) -> ExposureResult:
    """Trapezoidal fluence along the earth-frame ground track."""
    if duration_s <= 0 or step_s <= 0:
        raise InvalidInputError("duration_s and step_s must be > 0")
    # shrink the step so samples span [0, duration] exactly
    n = max(1, int(math.ceil(duration_s / step_s)))
    track = propagate_ground_track(orbit, duration_s, duration_s / n, frame="earth")
    fluence = {}
    for sp in species:
        f = np.asarray(
            radiation_map.flux(track.lat_deg, track.lon_deg, orbit.altitude_km, sp),
            dtype=float,
        )
        fluence[sp] = float(np.trapezoid(f, track.time_s - orbit.epoch_s))
    return ExposureResult(fluence=fluence, window_s=float(duration_s))


def raan_averaged_exposure(
    orbit: OrbitSpec,
    radiation_map,
    duration_s: float,
    step_s: float = 60.0,
    n_raan: int = 8,
    species: tuple[Species, ...] = (Species.ELECTRON, Species.PROTON),
) -> ExposureResult:
    """Mean exposure over n_raan node longitudes (removes SAA aliasing)."""
    if n_raan < 1:
        raise InvalidInputError(f"n_raan must be >= 1, got {n_raan}")
    total: dict[Species, float] = {sp: 0.0 for sp in species}
    for k in range(n_raan):
        shifted = OrbitSpec(
            altitude_km=orbit.altitude_km,
            inclination_deg=orbit.inclination_deg,
            raan_deg=orbit.raan_deg + 360.0 * k / n_raan,
            phase_deg=orbit.phase_deg,
            epoch_s=orbit.epoch_s,
        )
        res = accumulate_exposure(shifted, radiation_map, duration_s, step_s, species)
        for sp in species:
            total[sp] += res.fluence[sp]
    return ExposureResult(
        fluence={sp: v / n_raan for sp, v in total.items()}, window_s=duration_s
    )


def exposure_vs_inclination(
    altitude_km: float,
    inclinations_deg,
    radiation_map,
    duration_s: float = 86400.0,
    step_s: float = 60.0,
    n_raan: int = 8,
) -> list[dict]:
    """RAAN-averaged daily exposure per inclination (flat for a uniform map)."""
    inclinations_deg = list(inclinations_deg)
    if not inclinations_deg:
        raise InvalidInputError("inclinations list must be nonempty")
    rows = []
    for inc in inclinations_deg:
        orbit = OrbitSpec(altitude_km=altitude_km, inclination_deg=inc)
        res = raan_averaged_exposure(
            orbit, radiation_map, duration_s, step_s, n_raan=n_raan
        )
        rows.append({"inclination_deg": inc, "exposure": res})
    return rows


def satellite_exposures(
    satellites,
    radiation_map,
    duration_s: float = 86400.0,
    step_s: float = 60.0,
    n_raan: int = 8,
    jobs: int = 1,
) -> list[ExposureResult]:
    """Per-satellite RAAN-averaged exposure, order-preserving (deterministic)."""
    sats = list(satellites)

    def one(orbit):
        return raan_averaged_exposure(orbit, radiation_map, duration_s, step_s, n_raan)

    if jobs <= 1 or len(sats) < 2:
        return [one(s) for s in sats]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, sats))


def constellation_median_exposure(
    design_or_satellites,
    radiation_map,
    duration_s: float = 86400.0,
    step_s: float = 60.0,
    n_raan: int = 8,
    jobs: int = 1,
) -> dict[Species, float]:
    """Median per-satellite fluence per species across a constellation."""
    sats = getattr(design_or_satellites, "satellites", None)
    sats = sats() if callable(sats) else design_or_satellites
    sats = list(sats)
    if not sats:
        raise InvalidInputError("design has no satellites")
    results = satellite_exposures(
        sats, radiation_map, duration_s, step_s, n_raan=n_raan, jobs=jobs
    )
    return {
        sp: float(np.median([r.fluence[sp] for r in results]))
        for sp in (Species.ELECTRON, Species.PROTON)
    }


EXPOSURE_CSV_HEADER = ["sat_id", "species", "fluence"]


def exposure_csv_rows(results: list[ExposureResult]):
    rows = []
    for sat_id, res in enumerate(results):
        for sp in sorted(res.fluence, key=lambda s: s.value):
            rows.append([str(sat_id), sp.value, f"{res.fluence[sp]:.10g}"])
    return EXPOSURE_CSV_HEADER, rows
