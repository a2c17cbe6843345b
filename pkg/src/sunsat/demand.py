"""Sun-fixed spatiotemporal demand model.

Population density gives the spatial axis (max over longitudes per latitude
bin), a normalized diurnal throughput curve gives the temporal axis, and
their product on a latitude x local-solar-time grid is the demand map that
constellation designs must satisfy. Demand is measured in multiples of a
single satellite's capacity.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .astro import local_solar_time
from .errors import InvalidInputError, ParseError, ValidationError


@dataclass
class PopulationGrid:
    """Gridded population density spanning [-90, 90] x [-180, 180)."""

    lat_step_deg: float = 0.5
    lon_step_deg: float = 0.5
    density: np.ndarray | None = None

    def __post_init__(self):
        if self.lat_step_deg <= 0 or self.lon_step_deg <= 0:
            raise InvalidInputError("grid steps must be > 0")
        shape = (self.n_lat, self.n_lon)
        if self.density is None:
            self.density = np.zeros(shape)
        elif self.density.shape != shape:
            raise InvalidInputError(
                f"density shape {self.density.shape} != expected {shape}"
            )
        if np.any(self.density < 0) or np.any(~np.isfinite(self.density)):
            raise ValidationError("densities must be finite and >= 0")

    @property
    def n_lat(self) -> int:
        return int(math.ceil(180.0 / self.lat_step_deg))

    @property
    def n_lon(self) -> int:
        return int(math.ceil(360.0 / self.lon_step_deg))

    @property
    def lat_centers_deg(self) -> np.ndarray:
        return -90.0 + (np.arange(self.n_lat) + 0.5) * self.lat_step_deg

    @property
    def lon_centers_deg(self) -> np.ndarray:
        return -180.0 + (np.arange(self.n_lon) + 0.5) * self.lon_step_deg


@dataclass
class LatitudeProfile:
    """Per-latitude-bin demand weight (max population density over longitudes)."""

    lat_step_deg: float
    values: np.ndarray

    def __post_init__(self):
        expected = int(math.ceil(180.0 / self.lat_step_deg))
        if self.values.shape != (expected,):
            raise InvalidInputError(
                f"expected {expected} latitude bins, got {self.values.shape}"
            )
        if np.any(self.values < 0):
            raise ValidationError("profile values must be >= 0")

    @property
    def lat_centers_deg(self) -> np.ndarray:
        n = self.values.size
        return -90.0 + (np.arange(n) + 0.5) * self.lat_step_deg


@dataclass
class DiurnalProfile:
    """Site-median-normalized throughput by time-of-day bin."""

    bin_h: float
    median: np.ndarray
    p95: np.ndarray

    def __post_init__(self):
        n = int(round(24.0 / self.bin_h))
        if self.median.shape != (n,) or self.p95.shape != (n,):
            raise InvalidInputError(f"expected {n} bins for bin_h={self.bin_h}")
        if np.any(self.median < 0) or np.any(self.p95 < 0):
            raise ValidationError("multipliers must be >= 0")
        if np.any(self.median > self.p95 + 1e-12):
            raise ValidationError("per-bin median must not exceed p95")

    @property
    def bin_centers_h(self) -> np.ndarray:
        n = self.median.size
        return (np.arange(n) + 0.5) * self.bin_h

    def value_at(self, lst_h, stat: str = "median"):
        """Multiplier of the bin containing each local solar time."""
        curve = self.median if stat == "median" else self.p95
        idx = np.minimum(
            (np.mod(np.asarray(lst_h, dtype=float), 24.0) / self.bin_h).astype(int),
            curve.size - 1,
        )
        return curve[idx]


@dataclass
class DemandGrid:
    """Latitude x local-solar-time demand in single-satellite-capacity units."""

    lat_step_deg: float
    lst_step_h: float
    values: np.ndarray
    bandwidth_multiplier: float
    metadata: dict = field(default_factory=dict)

    @property
    def lat_centers_deg(self) -> np.ndarray:
        n = self.values.shape[0]
        return -90.0 + (np.arange(n) + 0.5) * self.lat_step_deg

    @property
    def lst_centers_h(self) -> np.ndarray:
        n = self.values.shape[1]
        return (np.arange(n) + 0.5) * self.lst_step_h

    @property
    def aggregate_demand(self) -> float:
        return float(self.values.sum())


def _open_rows(path):
    with open(path, newline="") as f:
        for line_no, row in enumerate(csv.reader(f), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            yield line_no, [c.strip() for c in row]


def load_population_grid(
    path, lat_step_deg: float = 0.5, lon_step_deg: float = 0.5
) -> PopulationGrid:
    """Read `lat_deg,lon_deg,density` rows (cell centers); missing cells are 0."""
    grid = PopulationGrid(lat_step_deg=lat_step_deg, lon_step_deg=lon_step_deg)
    dens = grid.density
    for line_no, row in _open_rows(path):
        if line_no == 1 and not _is_float(row[0]):
            continue  # header
        if len(row) != 3:
            raise ParseError(path, line_no, f"expected 3 columns, got {len(row)}")
        try:
            lat, lon, d = (float(c) for c in row)
        except ValueError as exc:
            raise ParseError(path, line_no, f"non-numeric field: {exc}") from None
        if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon < 180.0):
            raise ParseError(path, line_no, f"coordinates out of range: {lat}, {lon}")
        if math.isnan(d) or d < 0:
            raise ValidationError(f"{path}:{line_no}: density must be >= 0, got {d}")
        i = min(int((lat + 90.0) / lat_step_deg), grid.n_lat - 1)
        j = min(int((lon + 180.0) / lon_step_deg), grid.n_lon - 1)
        dens[i, j] = d
    return grid


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def latitude_max_profile(grid: PopulationGrid) -> LatitudeProfile:
    """Max density over all longitudes for each latitude bin."""
    return LatitudeProfile(
        lat_step_deg=grid.lat_step_deg, values=grid.density.max(axis=1)
    )


def diurnal_profile_from_series(path, bin_h: float = 0.5) -> DiurnalProfile:
    """Build the time-of-day profile from `site_id,timestamp_s,bytes` rows.

    Each site's throughput is normalized by that site's median (sites with an
    all-zero series are skipped with a warning), then all normalized samples
    are pooled per time-of-day bin; per bin the median and 95th percentile
    are reported. Timestamps are interpreted as local time.
    """
    sites: dict[str, list[tuple[float, float]]] = {}
    for line_no, row in _open_rows(path):
        if line_no == 1 and not _is_float(row[1] if len(row) > 1 else ""):
            continue  # header
        if len(row) != 3:
            raise ParseError(path, line_no, f"expected 3 columns, got {len(row)}")
        site = row[0]
        try:
            ts, value = float(row[1]), float(row[2])
        except ValueError as exc:
            raise ParseError(path, line_no, f"non-numeric field: {exc}") from None
        if math.isnan(value) or value < 0:
            raise ValidationError(f"{path}:{line_no}: bytes must be >= 0, got {value}")
        sites.setdefault(site, []).append((ts, value))
    if not sites:
        raise ValidationError(f"{path}: no samples found")

    n_bins = int(round(24.0 / bin_h))
    pooled: list[list[float]] = [[] for _ in range(n_bins)]
    for site, samples in sorted(sites.items()):
        values = np.array([v for _, v in samples])
        med = float(np.median(values))
        if med == 0.0:
            warnings.warn(f"site {site!r} has zero median throughput; skipped")
            continue
        for ts, v in samples:
            b = int((ts % 86400.0) / 3600.0 / bin_h) % n_bins
            pooled[b].append(v / med)
    if all(not b for b in pooled):
        raise ValidationError(f"{path}: every site had zero median throughput")

    median = np.zeros(n_bins)
    p95 = np.zeros(n_bins)
    for b, vals in enumerate(pooled):
        if vals:
            arr = np.array(vals)
            median[b] = np.median(arr)
            p95[b] = np.percentile(arr, 95)
    return DiurnalProfile(bin_h=bin_h, median=median, p95=p95)


def _coarsen_max(values: np.ndarray, factor: int) -> np.ndarray:
    return values.reshape(-1, factor).max(axis=1)


def build_demand_grid(
    lat_profile: LatitudeProfile,
    diurnal: DiurnalProfile,
    bandwidth_multiplier: float,
    lat_step_deg: float = 0.5,
    lst_step_h: float = 0.5,
    stat: str = "median",
) -> DemandGrid:
    """Separable demand D(lat, t) = M * (P(lat)/max P) * (s(t)/max s).

    The peak cell is exactly M. Profiles at a finer resolution than the
    requested steps are max-pooled down (steps must be integer multiples).
    """
    if bandwidth_multiplier <= 0:
        raise InvalidInputError(
            f"bandwidth_multiplier must be > 0, got {bandwidth_multiplier}"
        )
    lat_vals = lat_profile.values
    if not math.isclose(lat_step_deg, lat_profile.lat_step_deg):
        factor = lat_step_deg / lat_profile.lat_step_deg
        if abs(factor - round(factor)) > 1e-9 or factor < 1:
            raise InvalidInputError(
                f"lat_step_deg {lat_step_deg} must be an integer multiple of the "
                f"profile step {lat_profile.lat_step_deg}"
            )
        lat_vals = _coarsen_max(lat_vals, int(round(factor)))
    curve = diurnal.median if stat == "median" else diurnal.p95
    if not math.isclose(lst_step_h, diurnal.bin_h):
        factor = lst_step_h / diurnal.bin_h
        if abs(factor - round(factor)) > 1e-9 or factor < 1:
            raise InvalidInputError(
                f"lst_step_h {lst_step_h} must be an integer multiple of the "
                f"diurnal bin {diurnal.bin_h}"
            )
        curve = _coarsen_max(curve, int(round(factor)))

    if lat_vals.max() == 0 or curve.max() == 0:
        raise ValidationError("cannot build demand from an all-zero profile")
    values = (
        bandwidth_multiplier
        * (lat_vals / lat_vals.max())[:, None]
        * (curve / curve.max())[None, :]
    )
    return DemandGrid(
        lat_step_deg=lat_step_deg,
        lst_step_h=lst_step_h,
        values=values,
        bandwidth_multiplier=bandwidth_multiplier,
        metadata={"stat": stat},
    )


def demand_snapshot_earth_frame(
    grid: PopulationGrid,
    diurnal: DiurnalProfile,
    utc_hour: float,
    stat: str = "median",
) -> np.ndarray:
    """Earth-frame demand field density(lat,lon) * s(local solar time) at one UTC hour."""
    lst = local_solar_time(grid.lon_centers_deg, utc_hour * 3600.0)
    scale = diurnal.value_at(lst, stat=stat)
    return grid.density * scale[None, :]


DEMAND_CSV_HEADER = ["lat_deg", "lst_h", "demand"]


def demand_grid_csv_rows(grid: DemandGrid):
    rows = []
    lats = grid.lat_centers_deg
    lsts = grid.lst_centers_h
    for i, lat in enumerate(lats):
        for j, lst in enumerate(lsts):
            rows.append([f"{lat:.4f}", f"{lst:.4f}", f"{grid.values[i, j]:.10g}"])
    return DEMAND_CSV_HEADER, rows


def load_demand_grid_csv(
    path, bandwidth_multiplier: float | None = None
) -> DemandGrid:
    """Read a `lat_deg,lst_h,demand` grid written by demand_grid_csv_rows."""
    cells = []
    for line_no, row in _open_rows(path):
        if row[0].startswith("#"):
            continue
        if line_no == 1 or not _is_float(row[0]):
            if [c.lower() for c in row] == DEMAND_CSV_HEADER:
                continue
        if len(row) != 3:
            raise ParseError(path, line_no, f"expected 3 columns, got {len(row)}")
        try:
            cells.append(tuple(float(c) for c in row))
        except ValueError as exc:
            raise ParseError(path, line_no, f"non-numeric field: {exc}") from None
    if not cells:
        raise ValidationError(f"{path}: empty demand grid")
    lats = sorted({c[0] for c in cells})
    lsts = sorted({c[1] for c in cells})
    lat_step = 180.0 / len(lats)
    lst_step = 24.0 / len(lsts)
    values = np.zeros((len(lats), len(lsts)))
    lat_idx = {v: i for i, v in enumerate(lats)}
    lst_idx = {v: i for i, v in enumerate(lsts)}
    for lat, lst, d in cells:
        if d < 0 or math.isnan(d):
            raise ValidationError(f"{path}: demand must be >= 0, got {d}")
        values[lat_idx[lat], lst_idx[lst]] = d
    m = bandwidth_multiplier if bandwidth_multiplier is not None else float(values.max())
    return DemandGrid(
        lat_step_deg=lat_step,
        lst_step_h=lst_step,
        values=values,
        bandwidth_multiplier=m,
    )
