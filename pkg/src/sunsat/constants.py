"""Geodetic and dynamical constants used throughout the package."""
from dataclasses import dataclass


@dataclass(frozen=True)
class EarthConstants:
    """Earth model constants (WGS84 / EGM96 values).

    A single immutable instance (``EARTH``) backs every module so that all
    derived quantities (periods, precession rates, footprints) agree.
    """

    equatorial_radius_km: float = 6378.137
    gravitational_parameter_km3_s2: float = 398600.4418
    j2: float = 1.08262668e-3
    sidereal_day_s: float = 86164.0905
    tropical_year_days: float = 365.2422

    def __post_init__(self):
        for name in (
            "equatorial_radius_km",
            "gravitational_parameter_km3_s2",
            "j2",
            "sidereal_day_s",
            "tropical_year_days",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def earth_rotation_rate_deg_s(self) -> float:
        return 360.0 / self.sidereal_day_s

    @property
    def earth_rotation_rate_rad_s(self) -> float:
        import math

        return 2.0 * math.pi / self.sidereal_day_s

    @property
    def sun_apparent_rate_deg_day(self) -> float:
        """Mean apparent solar RAAN drift matching one revolution per tropical year."""
        return 360.0 / self.tropical_year_days


EARTH = EarthConstants()
