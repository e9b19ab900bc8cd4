"""Exception hierarchy shared by all hslab modules."""


class HslabError(Exception):
    """Base class for every error raised by hslab."""


class DomainError(HslabError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NonConvergence(HslabError, ArithmeticError):
    """An iterative or adaptive procedure did not reach its tolerance."""


class BadBracket(HslabError, ValueError):
    """A root bracket does not enclose a sign change."""


class StepFailure(HslabError, ArithmeticError):
    """The ODE integrator could not continue (step size underflow)."""


class DivergentSeries(HslabError, ArithmeticError):
    """A hypergeometric series failed to converge within the term cap."""


class MatchFailure(HslabError, ArithmeticError):
    """Two branches of a piecewise closed form disagree at the seam."""


class CacheRange(HslabError, ValueError):
    """A tabulated map was queried outside its tabulated span."""


class NoPositiveAlpha(HslabError, ArithmeticError):
    """No positive threshold satisfies the inequality on the grid."""


class SignError(HslabError, ArithmeticError):
    """An iterate that must stay positive changed sign."""


class VarianceBlowup(HslabError, ArithmeticError):
    """Monte Carlo standard error exceeds the admissible fraction."""


class InconclusiveMC(HslabError, ArithmeticError):
    """A Monte Carlo margin is within three standard errors of zero."""


class MarginViolation(HslabError, AssertionError):
    """A certified inequality produced a negative margin.

    The offending case name, margin and witness point are attached so
    the counterexample can be investigated.
    """

    def __init__(self, case, margin, witness):
        super().__init__(f"{case}: min margin {margin!r} at {witness!r}")
        self.case = case
        self.margin = margin
        self.witness = witness
