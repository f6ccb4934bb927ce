"""Exception hierarchy shared by all modules."""


class PrueferError(Exception):
    """Base class for every error raised by this package."""


# numeric kernels
class NonHermitian(PrueferError, ValueError):
    pass


class NonUnitary(PrueferError, ValueError):
    pass


class Singular(PrueferError, ValueError):
    pass


class NotPositive(PrueferError, ValueError):
    pass


class Overflow(PrueferError, ArithmeticError):
    pass


# frames and groups
class NotLagrangian(PrueferError, ValueError):
    pass


class SingularDenominator(PrueferError, ArithmeticError):
    pass


class RankLoss(PrueferError, ArithmeticError):
    pass


# phase tracking
class StepTooCoarse(PrueferError):
    """Two consecutive samples are too far apart to match eigenphases.

    ``index`` is the position k such that the step between ``params[k]``
    and ``params[k + 1]`` must be refined.
    """

    def __init__(self, index, jump, max_step):
        self.index = int(index)
        self.jump = float(jump)
        self.max_step = float(max_step)
        super().__init__(
            f"eigenphase jump {jump:.3g} rad exceeds {max_step:.3g} rad "
            f"between samples {index} and {index + 1}"
        )


class RefinementExhausted(PrueferError):
    pass


# continuum problems
class CoefficientSingular(PrueferError, ArithmeticError):
    pass


class AccuracyExhausted(PrueferError, ArithmeticError):
    pass


class NotDirichletRight(PrueferError, ValueError):
    pass


class NegativeCrossingDetected(PrueferError, ArithmeticError):
    pass


# jacobi operators
class SingularEnergy(PrueferError, ValueError):
    def __init__(self, energy, distance):
        self.energy = float(energy)
        self.distance = float(distance)
        super().__init__(
            f"energy {self.energy!r} is at distance {self.distance:.3g} from the spectra of the"
            " leading truncations (Morse count undefined)"
        )


class BranchCut(PrueferError, ValueError):
    pass


# transfer-matrix logarithms
class BranchViolation(PrueferError, ValueError):
    def __init__(self, message, eigenvalue=None):
        self.eigenvalue = eigenvalue
        super().__init__(message)


class AboveCritical(PrueferError, ValueError):
    pass


class BelowCritical(PrueferError, ValueError):
    pass


class Uncovered(PrueferError, ValueError):
    pass


# oracles
class TooLarge(PrueferError, ValueError):
    pass


class UnsupportedBoundary(PrueferError, ValueError):
    pass
