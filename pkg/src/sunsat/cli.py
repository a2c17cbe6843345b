"""Command-line entry point exposing every pipeline stage.

Flags override config-file keys; the config file is flat ``key = value``
text with '#' comments. Exit codes: 0 success, 1 validation/computation
failure (single machine-parsable line on stderr), 2 usage errors.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, astro, coverage, demand, design, fixtures, outputs, radiation
from .errors import SunsatError

DEFAULTS = {
    "min_elevation_deg": 25.0,
    "lat_step_deg": 0.5,
    "lst_step_h": 0.5,
    "cov_lat_step_deg": 1.0,
    "cov_lon_step_deg": 1.0,
    "time_step_s": 60.0,
    "track_res_deg": 1.0,
    "altitude_km": 560.0,
    "n_raan": 8,
    "duration_s": 86400.0,
    "exposure_step_s": 60.0,
    "max_walker_total": 2000,
    "seed": 0,
    "jobs": os.cpu_count() or 1,
}


def _load_config(path) -> dict:
    """Flat key = value file; values keep their string form until merged."""
    config = {}
    with open(path) as f:
        for line_no, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SunsatError(f"{path}:{line_no}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            config[key.replace("-", "_")] = value
    return config


def _merged(args, key: str, cast=None):
    """flag > config file > defaults."""
    val = getattr(args, key, None)
    if val is None:
        val = args._config.get(key)
        if val is None:
            val = DEFAULTS.get(key)
        elif cast is not None:
            val = cast(val)
        elif key in DEFAULTS:
            val = type(DEFAULTS[key])(val)
    return val


def _footprint(args) -> coverage.FootprintSpec:
    return coverage.FootprintSpec(min_elevation_deg=_merged(args, "min_elevation_deg"))


def _meta(args, extra: dict | None = None) -> dict:
    merged = {k: _merged(args, k) for k in DEFAULTS}
    merged.update(extra or {})
    return {"config_hash": outputs.config_hash(merged), **(extra or {})}


def _radiation_map(args):
    path = getattr(args, "map_csv", None) or args._config.get("map_csv")
    if path:
        return radiation.load_gridded_map(path)
    return radiation.SyntheticMap()


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--min-elevation-deg", dest="min_elevation_deg", type=float,
                   default=None, help=f"[default {DEFAULTS['min_elevation_deg']}]")
    p.add_argument("--jobs", type=int, default=None,
                   help=f"parallel workers [default {DEFAULTS['jobs']}]")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sunsat",
        description="Constellation sizing against a sun-fixed demand model",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("period", help="Keplerian orbital period")
    p.add_argument("--alt", type=float, required=True, help="altitude in km")
    _add_common(p)

    p = sub.add_parser("ssinc", help="sun-synchronous inclination")
    p.add_argument("--alt", type=float, required=True, help="altitude in km")
    _add_common(p)

    p = sub.add_parser("rgt-survey", help="repeat-ground-track sizing table")
    p.add_argument("--alt-min", type=float, required=True)
    p.add_argument("--alt-max", type=float, required=True)
    p.add_argument("--incl", type=float, required=True)
    p.add_argument("--max-days", type=int, default=3)
    p.add_argument("--out", required=True, help="output CSV path")
    _add_common(p)

    p = sub.add_parser("coverage-min", help="minimum-satellite sizing at one altitude")
    p.add_argument("--alt", type=float, required=True)
    p.add_argument("--incl", type=float, required=True)
    p.add_argument("--p", type=int, help="RGT repeat days (with --q)")
    p.add_argument("--q", type=int, help="RGT orbits per repeat (with --p)")
    _add_common(p)

    p = sub.add_parser("demand-build", help="build the lat x LST demand grid")
    p.add_argument("--population", required=True, help="population CSV")
    p.add_argument("--series", required=True, help="site throughput CSV")
    p.add_argument("--m", type=float, required=True, help="bandwidth multiplier")
    p.add_argument("--stat", choices=("median", "p95"), default="median")
    p.add_argument("--out", required=True, help="output CSV path")
    _add_common(p)

    p = sub.add_parser("demand-snapshot", help="earth-frame demand field at one UTC hour")
    p.add_argument("--population", required=True)
    p.add_argument("--series", required=True)
    p.add_argument("--utc-hour", type=float, required=True)
    p.add_argument("--stat", choices=("median", "p95"), default="median")
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("radiation-sweep", help="daily exposure vs inclination")
    p.add_argument("--alt", type=float, default=None)
    p.add_argument("--inc-min", type=float, default=0.0)
    p.add_argument("--inc-max", type=float, default=180.0)
    p.add_argument("--inc-step", type=float, default=5.0)
    p.add_argument("--map-csv", help="gridded flux map (synthetic model if omitted)")
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("design-ss", help="greedy sun-synchronous-plane cover")
    p.add_argument("--demand", required=True, help="demand grid CSV")
    p.add_argument("--alt", type=float, default=None)
    p.add_argument("--out", required=True, help="design JSON path")
    _add_common(p)

    p = sub.add_parser("design-walker", help="greedy Walker-delta baseline")
    p.add_argument("--demand", required=True)
    p.add_argument("--alt", type=float, default=None)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("sweep", help="satellite count and exposure vs demand multiplier")
    p.add_argument("--population", required=True)
    p.add_argument("--series", required=True)
    p.add_argument("--m-values", default="1,2,4,8,16",
                   help="comma-separated ascending multipliers [default 1,2,4,8,16]")
    p.add_argument("--alt", type=float, default=None)
    p.add_argument("--map-csv")
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("fixtures", help="generate the synthetic input fixtures")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=None, help=f"[default {DEFAULTS['seed']}]")
    _add_common(p)

    return ap


def _cmd_period(args) -> int:
    print(f"{astro.orbital_period(args.alt):.3f}")
    return 0


def _cmd_ssinc(args) -> int:
    print(f"{astro.sun_synchronous_inclination(args.alt):.4f}")
    return 0


def _cmd_rgt_survey(args) -> int:
    fp = _footprint(args)
    rgts = astro.find_rgt_orbits(args.alt_min, args.alt_max, args.incl, args.max_days)
    rows = coverage.survey_table(
        rgts,
        fp,
        max_walker_total=_merged(args, "max_walker_total"),
        lat_step_deg=_merged(args, "cov_lat_step_deg"),
        lon_step_deg=_merged(args, "cov_lon_step_deg"),
        time_step_s=_merged(args, "time_step_s"),
        track_res_deg=_merged(args, "track_res_deg"),
    )
    csv_rows = [
        [
            str(r["p"]), str(r["q"]), f"{r['altitude_km']:.3f}",
            str(r["min_sats_rgt"]), str(r["min_walker_total"]),
            "uniform" if r["uniform_flag"] else "non-uniform",
            f"{r['max_gap_deg']:.4f}",
        ]
        for r in rows
    ]
    meta = _meta(args, {"repeat_condition": "nodal", "inclination_deg": args.incl})
    outputs.write_csv(args.out, coverage.SURVEY_CSV_HEADER, csv_rows, meta)
    print(f"wrote {args.out} ({len(csv_rows)} RGTs)")
    return 0


def _cmd_coverage_min(args) -> int:
    fp = _footprint(args)
    band = min(args.incl, 180.0 - args.incl)
    walker = coverage.min_walker_total(
        args.alt, args.incl, fp,
        band_limit_deg=band,
        max_total=_merged(args, "max_walker_total"),
        lat_step_deg=_merged(args, "cov_lat_step_deg"),
        lon_step_deg=_merged(args, "cov_lon_step_deg"),
        time_step_s=_merged(args, "time_step_s"),
    )
    print(
        f"walker_min total={walker.total_sats_t} planes={walker.planes_p} "
        f"phasing={walker.phasing_f}"
    )
    if args.p is not None and args.q is not None:
        rgt = astro.RgtSolution(
            repeat_days_p=args.p, orbits_q=args.q,
            altitude_km=args.alt, inclination_deg=args.incl,
        )
        n = coverage.min_sats_single_rgt(
            rgt, fp,
            time_step_s=_merged(args, "time_step_s"),
            track_res_deg=_merged(args, "track_res_deg"),
        )
        print(f"rgt_min total={n}")
    return 0


def _demand_inputs(args):
    grid = demand.load_population_grid(args.population)
    profile = demand.latitude_max_profile(grid)
    diurnal = demand.diurnal_profile_from_series(args.series)
    return grid, profile, diurnal


def _cmd_demand_build(args) -> int:
    _, profile, diurnal = _demand_inputs(args)
    dg = demand.build_demand_grid(
        profile, diurnal, args.m,
        lat_step_deg=_merged(args, "lat_step_deg"),
        lst_step_h=_merged(args, "lst_step_h"),
        stat=args.stat,
    )
    header, rows = demand.demand_grid_csv_rows(dg)
    meta = _meta(args, {
        "bandwidth_multiplier": args.m,
        "stat": args.stat,
        "aggregate_demand": f"{dg.aggregate_demand:.10g}",
        "population_sha": outputs.file_sha256(args.population),
        "series_sha": outputs.file_sha256(args.series),
    })
    outputs.write_csv(args.out, header, rows, meta)
    sidecar = {
        "bandwidth_multiplier": args.m,
        "lat_step_deg": dg.lat_step_deg,
        "lst_step_h": dg.lst_step_h,
        "stat": args.stat,
        "aggregate_demand": dg.aggregate_demand,
        "provenance": {
            "population_sha": outputs.file_sha256(args.population),
            "series_sha": outputs.file_sha256(args.series),
        },
    }
    outputs.write_json(str(args.out) + ".json", sidecar, _meta(args))
    print(f"wrote {args.out}")
    return 0


def _cmd_demand_snapshot(args) -> int:
    grid, _, diurnal = _demand_inputs(args)
    field = demand.demand_snapshot_earth_frame(grid, diurnal, args.utc_hour, args.stat)
    rows = []
    lats = grid.lat_centers_deg
    lons = grid.lon_centers_deg
    nz = np.argwhere(field > 0)
    for i, j in nz:
        rows.append([f"{lats[i]:.4f}", f"{lons[j]:.4f}", f"{field[i, j]:.10g}"])
    meta = _meta(args, {"utc_hour": args.utc_hour, "stat": args.stat})
    outputs.write_csv(args.out, ["lat_deg", "lon_deg", "demand"], rows, meta)
    print(f"wrote {args.out} ({len(rows)} nonzero cells)")
    return 0


def _cmd_radiation_sweep(args) -> int:
    alt = args.alt if args.alt is not None else _merged(args, "altitude_km")
    rmap = _radiation_map(args)
    incs = np.arange(args.inc_min, args.inc_max + args.inc_step / 2, args.inc_step)
    rows = radiation.exposure_vs_inclination(
        alt, incs.tolist(), rmap,
        duration_s=_merged(args, "duration_s"),
        step_s=_merged(args, "exposure_step_s"),
        n_raan=_merged(args, "n_raan"),
    )
    csv_rows = [
        [
            f"{r['inclination_deg']:.4f}",
            f"{r['exposure'].fluence[radiation.Species.ELECTRON]:.10g}",
            f"{r['exposure'].fluence[radiation.Species.PROTON]:.10g}",
        ]
        for r in rows
    ]
    meta = _meta(args, {"altitude_km": alt, "map": rmap.describe()["kind"]})
    outputs.write_csv(
        args.out, ["inclination_deg", "electron_fluence", "proton_fluence"],
        csv_rows, meta,
    )
    print(f"wrote {args.out}")
    return 0


def _cmd_design(args, variant: str) -> int:
    alt = args.alt if args.alt is not None else _merged(args, "altitude_km")
    dg = demand.load_demand_grid_csv(args.demand)
    fp = _footprint(args)
    if variant == "ss":
        dsgn = design.greedy_ss_cover(dg, alt, fp)
    else:
        dsgn = design.greedy_walker_cover(
            dg, [alt - 10.0, alt + 10.0], fp,
            max_walker_total=_merged(args, "max_walker_total"),
            lat_step_deg=_merged(args, "cov_lat_step_deg"),
            lon_step_deg=_merged(args, "cov_lon_step_deg"),
            time_step_s=_merged(args, "time_step_s"),
        )
    meta = _meta(args, {
        "altitude_km": alt,
        "demand_sha": outputs.file_sha256(args.demand),
        "repeat_condition": "nodal",
        "baseline": "time-blind uniform band subtraction" if variant == "walker" else "",
    })
    outputs.write_json(args.out, dsgn.to_jsonable(), meta)
    print(f"wrote {args.out} (total_sats={dsgn.total_sats})")
    return 0


def _cmd_sweep(args) -> int:
    _, profile, diurnal = _demand_inputs(args)
    m_values = [float(x) for x in str(args.m_values).split(",") if x.strip()]
    rmap = _radiation_map(args)
    alt = args.alt if args.alt is not None else _merged(args, "altitude_km")
    rows = design.design_sweep(
        m_values, profile, diurnal, alt, _footprint(args), rmap,
        lat_step_deg=_merged(args, "lat_step_deg"),
        lst_step_h=_merged(args, "lst_step_h"),
        exposure_duration_s=_merged(args, "duration_s"),
        exposure_step_s=_merged(args, "exposure_step_s"),
        n_raan=_merged(args, "n_raan"),
        jobs=_merged(args, "jobs"),
        max_walker_total=_merged(args, "max_walker_total"),
    )
    header, csv_rows = design.sweep_csv_rows(rows)
    meta = _meta(args, {
        "altitude_km": alt,
        "aggregate_demand_by_M": {
            f"{r['M']:.10g}": f"{r['aggregate_demand']:.10g}"
            for r in rows if r["method"] == "ss"
        },
        "population_sha": outputs.file_sha256(args.population),
        "series_sha": outputs.file_sha256(args.series),
    })
    outputs.write_csv(args.out, header, csv_rows, meta)
    print(f"wrote {args.out}")
    return 0


def _cmd_fixtures(args) -> int:
    seed = args.seed if args.seed is not None else _merged(args, "seed")
    paths = fixtures.generate_all(args.out_dir, seed=seed)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


_COMMANDS = {
    "period": _cmd_period,
    "ssinc": _cmd_ssinc,
    "rgt-survey": _cmd_rgt_survey,
    "coverage-min": _cmd_coverage_min,
    "demand-build": _cmd_demand_build,
    "demand-snapshot": _cmd_demand_snapshot,
    "radiation-sweep": _cmd_radiation_sweep,
    "design-ss": lambda a: _cmd_design(a, "ss"),
    "design-walker": lambda a: _cmd_design(a, "walker"),
    "sweep": _cmd_sweep,
    "fixtures": _cmd_fixtures,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args._config = _load_config(args.config) if getattr(args, "config", None) else {}
        return _COMMANDS[args.command](args)
    except SunsatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
