"""Exception types shared across the package."""


class LevelTooLarge(ValueError):
    """A table or matrix was requested above its level cap."""


class InexactDivision(ArithmeticError):
    """An exact integer division failed; signals an implementation bug."""


class DOutOfRange(ValueError):
    """Relative-entropy argument left the open interval (1/2, 1)."""


class NoConvergence(RuntimeError):
    """Power iteration did not converge within the iteration cap."""


class TruncationEscape(RuntimeError):
    """A trajectory left the truncated coordinate range [1, N]."""

    def __init__(self, source: int, target: int, dim: int):
        self.source = source
        self.target = target
        self.dim = dim
        super().__init__(f"T({source}) = {target} escapes truncation [1, {dim}]")


class Unresolved(RuntimeError):
    """A trajectory hit the iteration cap before resolving to a cycle."""

    def __init__(self, n: int):
        self.n = n
        super().__init__(f"trajectory of {n} is unresolved at the iteration cap")


class OddLengthCycle(ValueError):
    """The minus-eigenvector construction needs an even-length cycle."""


class PoleProximity(ArithmeticError):
    """Evaluation point is too close to a pole of the closed form."""


class CutoffOutOfRange(ValueError):
    """Low-pass cutoff r must satisfy 1 < r < 2**k."""


class InsufficientRange(ValueError):
    """A step function does not carry enough jumps for the operation."""


class RangeExceeded(ValueError):
    """A step function was evaluated outside its represented range."""


class PrefixTooLarge(ValueError):
    """Conjugate prefix does not fit inside one period of the sign block."""


class WordOutOfRange(ValueError):
    """Operator word exponents exceed the truncation level."""


class RankDeficiency(ArithmeticError):
    """Orthogonalization found fewer independent vectors than expected."""
