"""Exception types raised across the package."""


class ErgolabError(Exception):
    """Base class for all structured errors."""


class DimensionMismatch(ErgolabError, ValueError):
    pass


class SpaceMismatch(ErgolabError, ValueError):
    pass


class ArityMismatch(ErgolabError, ValueError):
    pass


class PointSetMismatch(ErgolabError, ValueError):
    pass


class UnsupportedSpace(ErgolabError, ValueError):
    pass


class ComplexObservableError(ErgolabError, TypeError):
    """Raised where only real-valued observables are meaningful."""


class ScheduleError(ErgolabError, ValueError):
    pass


class IncompatibleCocycle(ErgolabError, ValueError):
    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"cocycle components are not compatible: residual {residual:.3e} > tol {tol:.1e}"
        )


class HypothesisFailure(ErgolabError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
