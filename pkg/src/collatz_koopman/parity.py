"""Parity sequences and the exact iterate formula.

The parity bits are indexed x(n, i) = T^(i-1)(n) mod 2 for i >= 1, the
convention under which the closed form

    T^k(n) = (3^(sum_i x(n,i)) * n  +  sum_i x(n,i) 2^(i-1) 3^(sum_{l>i} x(n,l))) / 2^k

holds with exact division.  One section of the source material starts the
sum at index 0 instead; this module keeps the i >= 1 convention throughout
(see README).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core_map import iterate_T
from .errors import DOutOfRange, InexactDivision, LevelTooLarge

LEVEL_CAP = 20
GENFN_LEVEL_CAP = 14


def parity_bit(n: int, i: int) -> int:
    """x(n, i) = T^(i-1)(n) mod 2."""
    if i < 1:
        raise ValueError("parity index starts at 1")
    return iterate_T(n, i - 1) % 2


def parity_bits(n: int, k: int) -> list[int]:
    """The first k parity bits x(n, 1), ..., x(n, k)."""
    bits = []
    for _ in range(k):
        bits.append(n % 2)
        n = n // 2 if n % 2 == 0 else (3 * n + 1) // 2
    return bits


def ones_count(n: int, k: int) -> int:
    """Number of odd iterates among T^0(n), ..., T^(k-1)(n)."""
    return sum(parity_bits(n, k))


def tk_via_parity(n: int, k: int) -> int:
    """Evaluate T^k(n) through the parity closed form, never by iterating T.

    The inner sum is accumulated with the recursion
    phi_k = 3^x(n,k) * phi_{k-1} + x(n,k) * 2^(k-1), which keeps the cost
    linear in k.  The final division by 2^k is exact by construction; a
    remainder signals an implementation bug.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    bits = parity_bits(n, k)
    d = 0
    phi = 0
    for i, x in enumerate(bits, start=1):
        if x:
            phi = 3 * phi + (1 << (i - 1))
            d += 1
        # even steps leave phi untouched: 3^0 factor
    num = pow(3, d) * n + phi
    q, r = divmod(num, 1 << k)
    if r:
        raise InexactDivision(f"(3^{d} * {n} + {phi}) is not divisible by 2^{k}")
    return q


@dataclass(frozen=True)
class TkDecomposition:
    """T^k(n) split through n = 2^k p + upsilon.

    value = (3^d * n + phi) / 2^k = 3^d * p + T^k(upsilon), where d and phi
    depend only on k and the remainder upsilon (d = phi = 0 when upsilon = 0,
    in which case value = p).
    """

    p: int
    upsilon: int
    d: int
    phi: int
    value: int


def tk_decompose(n: int, k: int) -> TkDecomposition:
    """Decompose T^k(n) by the remainder of n mod 2^k."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < 1:
        raise ValueError("n must be positive")
    p, upsilon = divmod(n, 1 << k)
    if upsilon == 0:
        d, phi = 0, 0
    else:
        bits = parity_bits(upsilon, k)
        d = sum(bits)
        phi = 0
        for i, x in enumerate(bits, start=1):
            if x:
                phi = 3 * phi + (1 << (i - 1))
    num = pow(3, d) * n + phi
    q, r = divmod(num, 1 << k)
    if r:
        raise InexactDivision(f"decomposition of ({n}, {k}) is not exact")
    return TkDecomposition(p=p, upsilon=upsilon, d=d, phi=phi, value=q)


@dataclass(frozen=True)
class ParityTable:
    """The 2^k x k table of parity bits, one packed integer per row.

    Row n is packed with x(n, 1) as the most significant bit, so sorting the
    packed rows is exactly lexicographic row order.
    """

    k: int
    packed: np.ndarray  # int64, shape (2**k,)

    def bit(self, n: int, i: int) -> int:
        """x(n, i) for 1 <= n <= 2^k, 1 <= i <= k."""
        if not (1 <= n <= 1 << self.k and 1 <= i <= self.k):
            raise IndexError(f"(n={n}, i={i}) outside the {1 << self.k} x {self.k} table")
        return int(self.packed[n - 1] >> (self.k - i)) & 1

    def row_bits(self, n: int) -> tuple[int, ...]:
        packed = int(self.packed[n - 1])
        return tuple((packed >> (self.k - i)) & 1 for i in range(1, self.k + 1))

    @property
    def y_k(self) -> np.ndarray:
        """First 2^(k-1) entries of column k (the period-defining half)."""
        half = 1 << (self.k - 1)
        return (self.packed[:half] & 1).astype(np.int64)


def build_Bk(k: int) -> ParityTable:
    """Build the full 2^k x k parity table by vectorized iteration of T.

    Values stay below 2^k * (3/2)^k, well inside int64 for k <= 20.
    """
    if not 1 <= k <= LEVEL_CAP:
        raise LevelTooLarge(f"parity table level must be in [1, {LEVEL_CAP}], got {k}")
    size = 1 << k
    cur = np.arange(1, size + 1, dtype=np.int64)
    packed = np.zeros(size, dtype=np.int64)
    for i in range(1, k + 1):
        bits = cur & 1
        packed |= bits << (k - i)
        cur = np.where(bits == 1, (3 * cur + 1) >> 1, cur >> 1)
    return ParityTable(k=k, packed=packed)


@dataclass(frozen=True)
class GenFnNumerator:
    """Numerator coefficients of sum_n T^k(n) x^n over (1 - x^(2^k))^2.

    coeffs[j] is the coefficient of x^(j+1); the list has length
    2^(k+1) - 1.  Coefficient of x^upsilon is T^k(upsilon) for
    upsilon < 2^k, of x^(2^k) is 1, and of x^(2^k + upsilon) is
    3^d(upsilon, k) - T^k(upsilon), which is strictly positive.
    """

    k: int
    coeffs: tuple[int, ...]


def genfn_numerator(k: int) -> GenFnNumerator:
    if not 1 <= k <= GENFN_LEVEL_CAP:
        raise LevelTooLarge(f"generating-function level must be in [1, {GENFN_LEVEL_CAP}], got {k}")
    period = 1 << k
    low = []
    high = []
    for upsilon in range(1, period):
        bits = parity_bits(upsilon, k)
        d = sum(bits)
        tk = iterate_T(upsilon, k)
        low.append(tk)
        high.append(pow(3, d) - tk)
    coeffs = tuple(low) + (1,) + tuple(high)
    return GenFnNumerator(k=k, coeffs=coeffs)


def genfn_check(k: int, x: float, N: int = 200) -> float:
    """|partial sum of T^k(n) x^n up to N  -  closed rational form|."""
    if abs(x) > 0.9:
        raise ValueError("|x| must be at most 0.9")
    partial = 0.0
    xn = x
    for n in range(1, N + 1):
        partial += iterate_T(n, k) * xn
        xn *= x
    num = genfn_numerator(k)
    numerator = 0.0
    xp = 1.0
    for c in num.coeffs:
        xp *= x
        numerator += c * xp
    closed = numerator / (1.0 - x ** (1 << k)) ** 2 if x != 0.0 else 0.0
    return abs(partial - closed)


def density_fraction(k: int, d: float) -> Fraction:
    """Exact fraction of rows n <= 2^k with at most floor(d*k) ones.

    Computed by direct enumeration over one full period; by the
    permutation property of the parity rows this equals the binomial
    CDF F(floor(d*k); k, 1/2).
    """
    if d >= 1:
        return Fraction(1)
    if d <= 0:
        raise ValueError("d must be positive")
    table = build_Bk(k)
    threshold = math.floor(d * k)
    # popcount per packed row
    counts = np.zeros(len(table.packed), dtype=np.int64)
    rest = table.packed.copy()
    for _ in range(k):
        counts += rest & 1
        rest >>= 1
    hits = int(np.count_nonzero(counts <= threshold))
    return Fraction(hits, 1 << k)


def relative_entropy(a: float, p: float) -> float:
    """D(a || p) = a log(a/p) + (1-a) log((1-a)/(1-p))."""
    if a in (0.0, 1.0):
        raise ValueError("relative entropy endpoint")
    return a * math.log(a / p) + (1 - a) * math.log((1 - a) / (1 - p))


def entropy_bound(k: int, d: float) -> float:
    """Chernoff bound exp(-k D((floor(dk)+1)/k || 1/2)).

    Upper-bounds the tail 1 - density_fraction(k, d).  The shifted
    argument (floor(dk)+1)/k must stay inside (1/2, 1).
    """
    if not 0.5 < d < 1:
        raise DOutOfRange(f"d must be in (1/2, 1), got {d}")
    a = (math.floor(d * k) + 1) / k
    if not 0.5 < a < 1:
        raise DOutOfRange(f"(floor(dk)+1)/k = {a} outside (1/2, 1)")
    return math.exp(-k * relative_entropy(a, 0.5))
