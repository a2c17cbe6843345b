"""Exception types shared across modules."""


class SunsatError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SunsatError, ValueError):
    """An argument violates an operation's precondition."""


class NoSunSyncSolutionError(SunsatError):
    """No inclination yields sun-synchronous precession at this altitude."""


class InfeasibleError(SunsatError):
    """No configuration satisfies the coverage requirement under the search caps."""


class UncoverableDemandError(SunsatError):
    """Demand exists at a latitude no candidate orbit footprint can reach."""

    def __init__(self, lat_deg: float, lst_h: float, message: str | None = None):
        self.lat_deg = lat_deg
        self.lst_h = lst_h
        super().__init__(
            message
            or f"demand cell at lat={lat_deg:+.2f} deg, lst={lst_h:.2f} h is unreachable"
        )


class MapRangeError(SunsatError):
    """Lookup outside the bounds of a gridded flux map (no extrapolation)."""


class ParseError(SunsatError, ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class ValidationError(SunsatError, ValueError):
    """Input file parsed but violates a data invariant."""
