"""Truncated forward/backward Collatz-Koopman operators and preimage counts.

The forward operator at truncation N is the N x N top-left corner of the
adjacency matrix of the forward Collatz graph: entry (m, i) = 1 iff
T(i) = m with i, m <= N.  Sources whose image leaves [1, N] are dropped,
which preserves the small norm witnesses exactly.  The n-step preimage
sets A^n_m are counted by the memoized recursion

    |A^0_m| = 1
    |A^n_m| = |A^(n-1)_(2m)|                      if m = 0, 1 mod 3
    |A^n_m| = |A^(n-1)_(2m)| + |A^(n-1)_((2m-1)/3)|  if m = 2 mod 3

and, for range scans, by a vectorized sweep that carries root indices down
the backward tree.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .core_map import iterate_T, preimages
from .errors import NoConvergence

DEFAULT_SEARCH_BOUND = 100_000
POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000


@dataclass(frozen=True)
class SparseMap:
    """Truncated composition operator stored as per-column targets.

    targets[i-1] = T^power(i) when that stays within [1, dim], else 0.
    Each in-range column has exactly one unit entry; row m collects the
    columns i with T^power(i) = m.
    """

    dim: int
    power: int
    targets: np.ndarray  # int64, shape (dim,), 0 marks an out-of-range image

    @property
    def dim_in(self) -> int:
        return self.dim

    @property
    def dim_out(self) -> int:
        return self.dim

    def entries(self) -> Iterator[tuple[int, int, int]]:
        """Yield (row m, column i, weight 1) for every in-corner entry."""
        for i, m in enumerate(self.targets, start=1):
            if m:
                yield int(m), i, 1


@functools.lru_cache(maxsize=32)
def truncated_forward(N: int, power: int = 1) -> SparseMap:
    """The corner matrix of T^power at truncation N."""
    if N < 4:
        raise ValueError("truncation must be at least 4")
    idx = np.arange(1, N + 1, dtype=np.int64)
    cur = idx.copy()
    for _ in range(power):
        odd = cur & 1
        cur = np.where(odd == 1, (3 * cur + 1) >> 1, cur >> 1)
    targets = np.where(cur <= N, cur, 0)
    return SparseMap(dim=N, power=power, targets=targets)


def forward_apply(x: Sequence, N: int | None = None) -> list:
    """Apply the truncated forward operator: out[m] = sum of x[i] over T(i) = m.

    Coordinates are 1-based: x[0] is coordinate 1.  Exact on int and
    Fraction inputs.
    """
    if N is None:
        N = len(x)
    if len(x) != N:
        raise ValueError("vector length must equal the truncation")
    smap = truncated_forward(N)
    out = [0] * N
    for i, v in enumerate(x, start=1):
        if v == 0:
            continue
        m = int(smap.targets[i - 1])
        if m:
            out[m - 1] = out[m - 1] + v
    return out


def backward_apply(x: Sequence, N: int | None = None) -> list:
    """Apply the transpose corner: out[i] = x[T(i)], zero when T(i) > N."""
    if N is None:
        N = len(x)
    if len(x) != N:
        raise ValueError("vector length must equal the truncation")
    smap = truncated_forward(N)
    out = [0] * N
    for i in range(1, N + 1):
        m = int(smap.targets[i - 1])
        if m:
            out[i - 1] = x[m - 1]
    return out


def backward_l1_norm(N: int) -> int:
    """Exact l1 operator norm of the truncated backward operator.

    Equals the largest in-corner preimage count of a single coordinate,
    attained at m = 2 with preimages {1, 4}.
    """
    smap = truncated_forward(N)
    counts = np.bincount(smap.targets[smap.targets > 0], minlength=N + 1)
    return int(counts.max())


def operator_norm_numeric(n_power: int, N: int,
                          tol: float = POWER_TOL,
                          max_iter: int = POWER_MAX_ITER) -> float:
    """Largest singular value of the truncated n-power forward matrix.

    Power iteration on L L^t seeded with the all-ones vector; the matrix is
    nonnegative so the Perron vector is reachable from a positive seed.
    """
    if n_power < 0:
        raise ValueError("power must be non-negative")
    if n_power == 0:
        return 1.0
    smap = truncated_forward(N, n_power)
    targets = smap.targets
    in_range = targets > 0
    cols = np.nonzero(in_range)[0]
    rows = targets[in_range] - 1

    def gram_apply(x: np.ndarray) -> np.ndarray:
        y = np.zeros(N)
        np.add.at(y, rows, x[cols])          # y = L x
        z = np.zeros(N)
        z[cols] = y[rows]                    # z = L^t y
        return z

    x = np.ones(N)
    x /= np.linalg.norm(x)
    lam_old = 0.0
    for _ in range(max_iter):
        y = gram_apply(x)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        lam = float(x @ y)
        x = y / norm
        if abs(lam - lam_old) < tol:
            return math.sqrt(lam)
        lam_old = lam
    raise NoConvergence(f"power iteration did not settle within {max_iter} steps")


@functools.lru_cache(maxsize=None)
def preimage_count(n: int, m: int) -> int:
    """|A^n_m|, the number of n-step T-preimages of m (memoized)."""
    if n < 0:
        raise ValueError("depth must be non-negative")
    if m < 1:
        raise ValueError("m must be positive")
    if n == 0:
        return 1
    total = preimage_count(n - 1, 2 * m)
    if m % 3 == 2:
        total += preimage_count(n - 1, (2 * m - 1) // 3)
    return total


def enumerate_preimages(n: int, m: int) -> set[int]:
    """Brute-force backward tree of depth n rooted at m (oracle for the memo)."""
    cur = {m}
    for _ in range(n):
        nxt: set[int] = set()
        for w in cur:
            nxt |= preimages(w)
        cur = nxt
    return cur


@dataclass(frozen=True)
class CnEstimate:
    """Certified lower bound for c_n: the max of |A^n_m| over the searched m."""

    n: int
    value: int
    witness_m: int


def _scan_batch(base: int, count: int, n_max: int,
                best: list[tuple[int, int]]) -> None:
    """Propagate one batch of roots down n_max backward levels, updating best."""
    vals = np.arange(base, base + count, dtype=np.int64)
    roots = np.arange(count, dtype=np.int64)
    for n in range(1, n_max + 1):
        mask = vals % 3 == 2
        odd_children = (2 * vals[mask] - 1) // 3
        vals = np.concatenate((2 * vals, odd_children))
        roots = np.concatenate((roots, roots[mask]))
        counts = np.bincount(roots, minlength=count)
        arg = int(np.argmax(counts))
        if int(counts[arg]) > best[n][0]:
            best[n] = (int(counts[arg]), base + arg)


def cn_scan(n_max: int, M: int = DEFAULT_SEARCH_BOUND,
            batch: int = 8192) -> list[CnEstimate]:
    """max over m <= M of |A^n_m| for every n <= n_max, in one batched sweep.

    At depth j each root carries about (4/3)^j live tree nodes; batching
    keeps the arrays inside memory while still yielding exact counts.
    """
    if M < 2:
        raise ValueError("search bound must be at least 2")
    best = [(1, 1)] * (n_max + 1)  # n = 0: every count is 1
    base = 1
    while base <= M:
        count = min(batch, M - base + 1)
        _scan_batch(base, count, n_max, best)
        base += count
    return [CnEstimate(n=n, value=v, witness_m=w) for n, (v, w) in enumerate(best)]


def cn_estimate(n: int, M: int = DEFAULT_SEARCH_BOUND) -> CnEstimate:
    """Certified lower bound for c_n over m <= M plus the guaranteed witness.

    The extra witness m* = T^n(2^n - 1) carries at least n preimages at
    depth n, so the estimate always dominates n.
    """
    if n == 0:
        return CnEstimate(n=0, value=1, witness_m=1)
    scanned = cn_scan(n, M)[n]
    m_star = iterate_T((1 << n) - 1, n)
    c_star = preimage_count(n, m_star)
    if c_star > scanned.value:
        return CnEstimate(n=n, value=c_star, witness_m=m_star)
    return scanned


def lemma51_check(n: int, lambda_max: int) -> bool:
    """Parity and mod-3 pattern of p = 2^n lam + 2^n - 1 along n steps.

    Checks T^k(p) odd for k < n, T^k(p) = 2 mod 3 for 1 <= k <= n, and the
    closed form T^k(p) = 3^k 2^(n-k) (lam + 1) - 1.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    for lam in range(lambda_max + 1):
        p = (1 << n) * lam + (1 << n) - 1
        cur = p
        for k in range(n + 1):
            if cur != pow(3, k) * (1 << (n - k)) * (lam + 1) - 1:
                return False
            if k < n and cur % 2 != 1:
                return False
            if 1 <= k and cur % 3 != 2:
                return False
            if k < n:
                cur = iterate_T(cur, 1)
    return True


def fibonacci(n: int) -> int:
    """Fibonacci with the shifted convention F_0 = 1, F_1 = 2."""
    a, b = 1, 2
    if n == 0:
        return a
    for _ in range(n - 1):
        a, b = b, a + b
    return b


@dataclass(frozen=True)
class SpectralRow:
    n: int
    lower: float
    sandwich: float
    upper: float


def spectral_radius_report(p: float, n_max: int,
                           M: int = DEFAULT_SEARCH_BOUND) -> list[SpectralRow]:
    """Spectral-radius bounds (n^(1/n))^e <= (c_n^(M))^(e/n) <= (F_n^(1/n))^e.

    e = 1 - 1/p; for p = 1 every entry is exactly 1.  The middle column is
    the searched lower-bound witness for c_n, so the ordering is a theorem
    and is asserted per row.
    """
    if n_max > 30:
        raise ValueError("n_max capped at 30")
    e = 1.0 if math.isinf(p) else 1.0 - 1.0 / p
    scans = cn_scan(n_max, M)
    rows = []
    for n in range(1, n_max + 1):
        m_star = iterate_T((1 << n) - 1, n)
        cn = max(scans[n].value, preimage_count(n, m_star))
        lower = (n ** (1.0 / n)) ** e
        sandwich = cn ** (e / n)
        upper = (fibonacci(n) ** (1.0 / n)) ** e
        if not lower <= sandwich * (1 + 1e-12) or not sandwich <= upper * (1 + 1e-12):
            raise ArithmeticError(f"sandwich ordering violated at n={n}")
        rows.append(SpectralRow(n=n, lower=lower, sandwich=sandwich, upper=upper))
    return rows


@dataclass(frozen=True)
class QuadraticLowerResult:
    """Outcome of the quadratic lower-estimate check, with failing depths."""

    ok: bool
    failures: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.ok


def quadratic_lower_check(n_max: int,
                          M: int = DEFAULT_SEARCH_BOUND) -> QuadraticLowerResult:
    """Check c_n^(M) >= (n+1)(n+2)/4 for n <= n_max.

    A failure is reported with its n rather than asserted: the search bound
    M may simply be too small to exhibit the witness.
    """
    if n_max > 20:
        raise ValueError("n_max capped at 20")
    scans = cn_scan(n_max, M)
    failures = []
    for n in range(n_max + 1):
        m_star = iterate_T((1 << n) - 1, n) if n else 1
        cn = max(scans[n].value, preimage_count(n, m_star))
        if 4 * cn < (n + 1) * (n + 2):
            failures.append(n)
    return QuadraticLowerResult(ok=not failures, failures=tuple(failures))
