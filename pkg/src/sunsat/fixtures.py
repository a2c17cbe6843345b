"""Synthetic input generators for tests and demos.

All randomness lives here, behind an explicit seed; the rest of the pipeline
is deterministic. The population fixture places equal-peak city clusters so
the latitude max-profile has a clean plateau structure; the traffic fixture
gives every site the same on/off daily shape at a site-specific scale, so
site-median normalization recovers an exact {0, 1} diurnal profile.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .radiation import GriddedMap, Species, SyntheticMap, save_gridded_map

# equal-amplitude city clusters: (lat_deg, lon_deg); the northern block peaks
# at 60.25N so Walker shells for this demand sit at 65 deg inclination
CITY_CENTERS = [
    (60.25, 24.75), (55.75, 12.75), (51.75, -0.25), (48.25, 2.25),
    (43.75, -79.25), (39.75, 116.25), (35.25, 139.25), (30.25, 31.25),
    (24.75, 121.25), (19.25, 72.75), (-23.75, -46.75), (-33.75, 151.25),
]
CITY_PEAK_DENSITY = 1000.0
CITY_SIGMA_DEG = 1.5

ACTIVE_START_H = 7.0   # sites transmit 07:00-22:59 local, silent otherwise
ACTIVE_END_H = 23.0


def make_population_csv(path, lat_step_deg: float = 0.5, lon_step_deg: float = 0.5):
    """Equal-peak Gaussian city clusters on the population grid."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = []
    for clat, clon in CITY_CENTERS:
        # 7-sigma-ish neighborhood, snapped to cell centers
        span = int(np.ceil(5 * CITY_SIGMA_DEG / lat_step_deg))
        for di in range(-span, span + 1):
            for dj in range(-span, span + 1):
                lat = clat + di * lat_step_deg
                lon = clon + dj * lon_step_deg
                if not (-90 < lat < 90) or not (-180 <= lon < 180):
                    continue
                d2 = (lat - clat) ** 2 + (lon - clon) ** 2
                dens = CITY_PEAK_DENSITY * np.exp(-d2 / (2 * CITY_SIGMA_DEG**2))
                if dens >= 0.5:
                    rows.append((lat, lon, dens))
    merged: dict[tuple[float, float], float] = {}
    for lat, lon, dens in rows:
        key = (round(lat, 4), round(lon, 4))
        merged[key] = max(merged.get(key, 0.0), dens)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["lat_deg", "lon_deg", "density"])
        for (lat, lon), dens in sorted(merged.items()):
            w.writerow([f"{lat:.4f}", f"{lon:.4f}", f"{dens:.6f}"])
    return path


def make_series_csv(path, seed: int = 0, n_sites: int = 24, days: int = 4,
                    bin_h: float = 0.5):
    """On/off daily traffic for n_sites at seeded per-site scales."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    scales = 10.0 ** rng.uniform(-1.0, 1.0, size=n_sites)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["site_id", "timestamp_s", "bytes"])
        for s in range(n_sites):
            for day in range(days):
                for b in range(int(round(24.0 / bin_h))):
                    tod = (b + 0.5) * bin_h
                    ts = day * 86400.0 + tod * 3600.0
                    active = ACTIVE_START_H <= tod < ACTIVE_END_H
                    value = scales[s] * 1e6 if active else 0.0
                    w.writerow([f"site{s:03d}", f"{ts:.1f}", f"{value:.3f}"])
    return path


def make_radiation_grid_csv(path, lat_step_deg: float = 10.0,
                            lon_step_deg: float = 15.0):
    """Small gridded flux map sampled from the synthetic model."""
    path = Path(path)
    synth = SyntheticMap()
    lat_axis = np.arange(-85.0, 86.0, lat_step_deg)
    lon_axis = np.arange(-180.0, 180.0, lon_step_deg)
    alt_axis = np.array([400.0, 700.0])
    lat_g, lon_g, alt_g = np.meshgrid(lat_axis, lon_axis, alt_axis, indexing="ij")
    arrays = {
        sp: np.asarray(synth.flux(lat_g, lon_g, alt_g, sp), dtype=float)
        for sp in (Species.ELECTRON, Species.PROTON)
    }
    gmap = GriddedMap(lat_axis, lon_axis, alt_axis, arrays)
    save_gridded_map(gmap, path)
    return path


def make_zero_demand_csv(path, lat_step_deg: float = 0.5, lst_step_h: float = 0.5):
    """All-zero demand grid in the demand CSV schema."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n_lat = int(round(180.0 / lat_step_deg))
    n_lst = int(round(24.0 / lst_step_h))
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["lat_deg", "lst_h", "demand"])
        for i in range(n_lat):
            lat = -90.0 + (i + 0.5) * lat_step_deg
            for j in range(n_lst):
                lst = (j + 0.5) * lst_step_h
                w.writerow([f"{lat:.4f}", f"{lst:.4f}", "0"])
    return path


def generate_all(out_dir, seed: int = 0) -> dict[str, Path]:
    """Write the full fixture set; returns name -> path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return {
        "population": make_population_csv(out / "population.csv"),
        "series": make_series_csv(out / "series.csv", seed=seed),
        "radiation_grid": make_radiation_grid_csv(out / "radiation_grid.csv"),
        "zero_demand": make_zero_demand_csv(out / "demand_zero.csv"),
    }
