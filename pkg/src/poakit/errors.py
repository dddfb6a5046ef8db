"""Exception hierarchy shared across poakit modules."""


class PoaError(Exception):
    """Base class for all poakit errors."""


class DisconnectedGraph(PoaError, ValueError):
    pass


class NonPositiveWeight(PoaError, ValueError):
    pass


class AllZeroMass(PoaError, ValueError):
    pass


class NegativeMass(PoaError, ValueError):
    pass


class LengthMismatch(PoaError, ValueError):
    pass


class SizeMismatch(PoaError, ValueError):
    pass


class NotCentered(PoaError, ValueError):
    def __init__(self, offending_mean: float):
        super().__init__(f"observable is not centered (mean = {offending_mean:.3e})")
        self.offending_mean = offending_mean


class ModeMismatch(PoaError, ValueError):
    pass


class DegenerateVariance(PoaError):
    """No centered observable of non-trivial variance remains."""

    def __init__(self, variance: float, floor: float):
        super().__init__(f"best variance {variance:.3e} below floor {floor:.1e}")
        self.variance = variance
        self.floor = floor


class SolverFailure(PoaError, RuntimeError):
    """LP subproblem reported unbounded/infeasible; should never happen."""


class TooLarge(PoaError, ValueError):
    pass


class NotEnoughObservables(PoaError, ValueError):
    pass


class EmptySample(PoaError, ValueError):
    pass


class ZeroNormObservable(PoaError, ValueError):
    pass


class UncertifiedObservable(PoaError, ValueError):
    pass


class MissingDistance(PoaError, ValueError):
    pass


class NotSurjective(PoaError, ValueError):
    pass


class ParseError(PoaError, ValueError):
    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")
        self.path = path
        self.line = line


class ValidationError(PoaError, ValueError):
    def __init__(self, report):
        super().__init__(f"invalid metric: {report.summary()}")
        self.report = report
