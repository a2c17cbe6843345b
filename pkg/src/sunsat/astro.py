"""Circular-orbit mechanics: periods, J2 secular rates, sun-synchronous
inclination, repeat-ground-track enumeration and ground-track propagation.

All orbits are circular (e = 0). The secular model is first-order J2:

    n      = sqrt(mu / a^3)                                   mean motion
    raan'  = -(3/2) J2 (Re/a)^2 n cos(i)                      nodal precession
    u'     = n [1 + (3/4) J2 (Re/a)^2 (6 - 8 sin^2 i)]        argument-of-latitude rate

The nodal (draconic) period is 2*pi/u' and the nodal day 2*pi/(w_E - raan'),
so a ground track repeats after q nodal periods = p nodal days.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd

import numpy as np

from .constants import EARTH
from .errors import InvalidInputError, NoSunSyncSolutionError

EARTH_FRAME = "earth"
SOLAR_FRAME = "solar"

_ALT_BISECT_TOL_KM = 1e-3  # 1 m on the repeat-condition altitude


@dataclass(frozen=True)
class OrbitSpec:
    """One circular orbit: the unit of propagation.

    ``phase_deg`` is the argument of latitude at epoch, ``epoch_s`` counts
    seconds from the reference midnight UTC at Greenwich. Inclinations above
    90 deg are retrograde; their ground tracks drift east to west.
    """

    altitude_km: float
    inclination_deg: float
    raan_deg: float = 0.0
    phase_deg: float = 0.0
    epoch_s: float = 0.0

    def __post_init__(self):
        if self.altitude_km <= 0:
            raise InvalidInputError(f"altitude_km must be > 0, got {self.altitude_km}")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise InvalidInputError(
                f"inclination_deg must be in [0, 180], got {self.inclination_deg}"
            )
        object.__setattr__(self, "raan_deg", self.raan_deg % 360.0)
        object.__setattr__(self, "phase_deg", self.phase_deg % 360.0)

    @property
    def semi_major_axis_km(self) -> float:
        return EARTH.equatorial_radius_km + self.altitude_km


@dataclass(frozen=True)
class RgtSolution:
    """A repeat ground track: q orbits in p nodal days at the tuned altitude."""

    repeat_days_p: int
    orbits_q: int
    altitude_km: float
    inclination_deg: float

    def __post_init__(self):
        if self.repeat_days_p < 1 or self.orbits_q < 1:
            raise InvalidInputError("repeat_days_p and orbits_q must be >= 1")
        if gcd(self.repeat_days_p, self.orbits_q) != 1:
            raise InvalidInputError(
                f"(p={self.repeat_days_p}, q={self.orbits_q}) must be coprime"
            )

    @property
    def repeat_period_s(self) -> float:
        return self.repeat_days_p * nodal_day_s(self.altitude_km, self.inclination_deg)


@dataclass(frozen=True)
class GroundTrack:
    """Sampled subsatellite track, either earth-fixed or sun-fixed.

    ``lon_deg`` is populated in the earth frame (wrapped to [-180, 180)),
    ``lst_h`` in the solar frame (wrapped to [0, 24)); the unused field is None.
    """

    frame: str
    time_s: np.ndarray
    lat_deg: np.ndarray
    alt_km: float
    lon_deg: np.ndarray | None = None
    lst_h: np.ndarray | None = None

    def __len__(self) -> int:
        return self.time_s.size


def orbital_period(altitude_km: float) -> float:
    """Keplerian period 2*pi*sqrt(a^3/mu) in seconds."""
    if altitude_km < 0:
        raise InvalidInputError(f"altitude_km must be >= 0, got {altitude_km}")
    a = EARTH.equatorial_radius_km + altitude_km
    return 2.0 * math.pi * math.sqrt(a**3 / EARTH.gravitational_parameter_km3_s2)


def mean_motion_rad_s(altitude_km: float) -> float:
    a = EARTH.equatorial_radius_km + altitude_km
    return math.sqrt(EARTH.gravitational_parameter_km3_s2 / a**3)


def secular_rates_rad_s(altitude_km: float, inclination_deg: float) -> tuple[float, float]:
    """J2 secular (argument-of-latitude rate, RAAN rate), both rad/s.

    u' carries the combined secular drift of mean anomaly and argument of
    perigee for a circular orbit; raan' is the standard nodal regression.
    """
    if altitude_km <= 0:
        raise InvalidInputError(f"altitude_km must be > 0, got {altitude_km}")
    if not 0.0 <= inclination_deg <= 180.0:
        raise InvalidInputError(
            f"inclination_deg must be in [0, 180], got {inclination_deg}"
        )
    a = EARTH.equatorial_radius_km + altitude_km
    n = mean_motion_rad_s(altitude_km)
    i = math.radians(inclination_deg)
    fac = EARTH.j2 * (EARTH.equatorial_radius_km / a) ** 2
    u_dot = n * (1.0 + 0.75 * fac * (6.0 - 8.0 * math.sin(i) ** 2))
    raan_dot = -1.5 * fac * n * math.cos(i)
    return u_dot, raan_dot


def nodal_precession_rate(altitude_km: float, inclination_deg: float) -> float:
    """Secular J2 RAAN drift in deg/day (negative = westward)."""
    _, raan_dot = secular_rates_rad_s(altitude_km, inclination_deg)
    return math.degrees(raan_dot) * 86400.0


def nodal_period_s(altitude_km: float, inclination_deg: float) -> float:
    """Draconic period: successive ascending-node crossings."""
    u_dot, _ = secular_rates_rad_s(altitude_km, inclination_deg)
    return 2.0 * math.pi / u_dot


def nodal_day_s(altitude_km: float, inclination_deg: float) -> float:
    """Earth rotation period relative to the precessing orbital plane."""
    _, raan_dot = secular_rates_rad_s(altitude_km, inclination_deg)
    return 2.0 * math.pi / (EARTH.earth_rotation_rate_rad_s - raan_dot)


def sun_synchronous_inclination(altitude_km: float) -> float:
    """Inclination whose nodal precession matches the mean sun (deg, in (90, 180)).

    Solves raan' = +360/365.2422 deg/day for cos(i); the precession rate is
    linear in cos(i) so the closed form is exact.

    Raises:
        NoSunSyncSolutionError: required |cos i| > 1 (altitude too high).
    """
    if altitude_km <= 0:
        raise InvalidInputError(f"altitude_km must be > 0, got {altitude_km}")
    a = EARTH.equatorial_radius_km + altitude_km
    n = mean_motion_rad_s(altitude_km)
    target_rad_s = math.radians(EARTH.sun_apparent_rate_deg_day) / 86400.0
    cos_i = -target_rad_s / (
        1.5 * EARTH.j2 * (EARTH.equatorial_radius_km / a) ** 2 * n
    )
    if cos_i < -1.0 or cos_i > 1.0:
        raise NoSunSyncSolutionError(
            f"no sun-synchronous inclination at {altitude_km} km "
            f"(required cos i = {cos_i:.4f})"
        )
    return math.degrees(math.acos(cos_i))


def revs_per_nodal_day(altitude_km: float, inclination_deg: float) -> float:
    """Orbits completed per nodal day: u' / (w_E - raan')."""
    u_dot, raan_dot = secular_rates_rad_s(altitude_km, inclination_deg)
    return u_dot / (EARTH.earth_rotation_rate_rad_s - raan_dot)


def find_rgt_orbits(
    alt_min_km: float,
    alt_max_km: float,
    inclination_deg: float,
    max_repeat_days: int,
) -> list[RgtSolution]:
    """All coprime (p, q) repeat ground tracks in an altitude band.

    For each p <= max_repeat_days, bisects q nodal periods = p nodal days on
    altitude (revs_per_nodal_day is strictly decreasing in altitude) to 1 m.
    Returns solutions sorted by altitude ascending; an empty band gives [].
    """
    if alt_min_km >= alt_max_km:
        raise InvalidInputError(
            f"alt_min_km must be < alt_max_km, got [{alt_min_km}, {alt_max_km}]"
        )
    if alt_min_km <= 0:
        raise InvalidInputError(f"alt_min_km must be > 0, got {alt_min_km}")
    if max_repeat_days < 1:
        raise InvalidInputError(f"max_repeat_days must be >= 1, got {max_repeat_days}")

    ratio_hi = revs_per_nodal_day(alt_min_km, inclination_deg)
    ratio_lo = revs_per_nodal_day(alt_max_km, inclination_deg)

    solutions = []
    for p in range(1, max_repeat_days + 1):
        q_lo = math.ceil(p * ratio_lo)
        q_hi = math.floor(p * ratio_hi)
        for q in range(q_lo, q_hi + 1):
            if q < 1 or gcd(p, q) != 1:
                continue
            alt = _bisect_repeat_altitude(alt_min_km, alt_max_km, inclination_deg, q / p)
            if alt is None:
                continue
            solutions.append(
                RgtSolution(
                    repeat_days_p=p,
                    orbits_q=q,
                    altitude_km=alt,
                    inclination_deg=inclination_deg,
                )
            )
    solutions.sort(key=lambda s: s.altitude_km)
    return solutions


def _bisect_repeat_altitude(
    alt_lo: float, alt_hi: float, inclination_deg: float, q_over_p: float
) -> float | None:
    f_lo = revs_per_nodal_day(alt_lo, inclination_deg) - q_over_p
    f_hi = revs_per_nodal_day(alt_hi, inclination_deg) - q_over_p
    if f_lo < 0.0 or f_hi > 0.0:  # ratio decreasing: root needs f_lo >= 0 >= f_hi
        return None
    while alt_hi - alt_lo > _ALT_BISECT_TOL_KM:
        mid = 0.5 * (alt_lo + alt_hi)
        if revs_per_nodal_day(mid, inclination_deg) - q_over_p > 0.0:
            alt_lo = mid
        else:
            alt_hi = mid
    return 0.5 * (alt_lo + alt_hi)


def local_solar_time(lon_deg, utc_s):
    """Mean local solar time in hours: (utc/3600 mod 24) + lon/15, wrapped.

    Accepts scalars or arrays; longitudes outside [-180, 180) are wrapped.
    """
    return np.mod(np.asarray(utc_s, dtype=float) / 3600.0 + np.asarray(lon_deg, dtype=float) / 15.0, 24.0)


def propagate_ground_track(
    orbit: OrbitSpec,
    duration_s: float,
    step_s: float,
    frame: str = EARTH_FRAME,
) -> GroundTrack:
    """Subsatellite track under circular motion plus linear J2 secular drift.

    The in-plane angle advances at the secular argument-of-latitude rate and
    the node at the nodal precession rate, so propagation closure matches the
    repeat condition used by find_rgt_orbits. Earth frame subtracts earth
    rotation (Greenwich at inertial longitude 0 when utc = 0); solar frame
    reports mean local solar time instead of longitude.

    Samples run t = 0, step, ... up to and including duration when divisible.
    """
    if duration_s <= 0:
        raise InvalidInputError(f"duration_s must be > 0, got {duration_s}")
    if not 0 < step_s <= duration_s:
        raise InvalidInputError(
            f"step_s must satisfy 0 < step_s <= duration_s, got {step_s}"
        )
    if frame not in (EARTH_FRAME, SOLAR_FRAME):
        raise InvalidInputError(f"frame must be 'earth' or 'solar', got {frame!r}")

    n_steps = int(math.floor(duration_s / step_s + 1e-9))
    tau = np.arange(n_steps + 1, dtype=float) * step_s
    lat, lon, t_abs = _track_arrays(orbit, tau)

    if frame == EARTH_FRAME:
        return GroundTrack(
            frame=frame, time_s=t_abs, lat_deg=lat, lon_deg=lon, alt_km=orbit.altitude_km
        )
    lst = local_solar_time(lon, t_abs)
    return GroundTrack(
        frame=frame, time_s=t_abs, lat_deg=lat, lst_h=lst, alt_km=orbit.altitude_km
    )


def _track_arrays(orbit: OrbitSpec, tau: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(lat_deg, lon_deg earth-fixed wrapped to [-180, 180), absolute time_s)."""
    u_dot, raan_dot = secular_rates_rad_s(orbit.altitude_km, orbit.inclination_deg)
    i = math.radians(orbit.inclination_deg)
    t_abs = orbit.epoch_s + tau
    u = math.radians(orbit.phase_deg) + u_dot * tau
    raan = math.radians(orbit.raan_deg) + raan_dot * tau
    lat = np.arcsin(np.clip(np.sin(i) * np.sin(u), -1.0, 1.0))
    lon_inertial = raan + np.arctan2(math.cos(i) * np.sin(u), np.cos(u))
    lon = lon_inertial - EARTH.earth_rotation_rate_rad_s * t_abs
    lon = np.mod(np.degrees(lon) + 180.0, 360.0) - 180.0
    return np.degrees(lat), lon, t_abs


def ground_track_csv_rows(track: GroundTrack):
    """Yield (header, rows) matching the track's frame.

    Earth frame: time_s,lat_deg,lon_deg,alt_km
    Solar frame: time_s,lat_deg,lst_h,alt_km
    """
    if track.frame == EARTH_FRAME:
        header = ["time_s", "lat_deg", "lon_deg", "alt_km"]
        cols = (track.time_s, track.lat_deg, track.lon_deg)
    else:
        header = ["time_s", "lat_deg", "lst_h", "alt_km"]
        cols = (track.time_s, track.lat_deg, track.lst_h)
    rows = [
        [f"{t:.3f}", f"{a:.6f}", f"{b:.6f}", f"{track.alt_km:.3f}"]
        for t, a, b in zip(*cols)
    ]
    return header, rows
