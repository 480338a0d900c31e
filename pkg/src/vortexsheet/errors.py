"""Exception types shared across the package."""


class VortexSheetError(Exception):
    """Base class for all package-specific errors."""


class DegenerateOperator(VortexSheetError):
    """The discrete sheet-strength operator could not be inverted reliably.

    Raised when the dense factorization fails or the estimated condition
    number exceeds 1e12.  For |a_mu| < 1 this should never happen and
    indicates either corrupted input or a genuine anomaly worth reporting.
    """


class RTBreakdown(VortexSheetError):
    """The Rayleigh-Taylor functional lost positivity during a sigma=0 run."""

    def __init__(self, t: float, infimum: float):
        super().__init__(
            f"Rayleigh-Taylor condition violated at t={t:.6g}: inf a_RT = {infimum:.6g}"
        )
        self.t = t
        self.infimum = infimum


class DtUnderflow(VortexSheetError):
    """The adaptive controller pushed the step size below dt_min."""

    def __init__(self, t: float, dt: float, dt_min: float):
        super().__init__(f"step size underflow at t={t:.6g}: dt={dt:.3g} < dt_min={dt_min:.3g}")
        self.t = t
        self.dt = dt
        self.dt_min = dt_min


class NonFinite(VortexSheetError):
    """A computed field contains NaN or infinity."""


class PointTooClose(VortexSheetError):
    """An off-interface sample point lies inside the 2h guard band."""

    def __init__(self, point, distance: float, guard: float):
        super().__init__(
            f"point {point} is {distance:.3g} from the interface; needs >= {guard:.3g} "
            "(use trace_velocity for on-interface values)"
        )
        self.point = point
        self.distance = distance
        self.guard = guard


class PathCrossesInterface(VortexSheetError):
    """A pressure integration path would cross the interface graph."""
