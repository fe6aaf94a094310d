"""Exact Collatz dynamics.

The accelerated map ``T(n) = n/2`` (n even), ``(3n+1)/2`` (n odd) together
with trajectories, cycle detection, stopping indices and one-step preimages.
Everything here works on plain Python integers, so values may grow past
64 bits without overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_CAP = 100_000


def _check_positive(n: int) -> None:
    if n < 1:
        raise ValueError(f"domain is the positive integers, got {n}")


def collatz_T(n: int) -> int:
    """One step of the accelerated map: n/2 if even, (3n+1)/2 if odd."""
    _check_positive(n)
    return n // 2 if n % 2 == 0 else (3 * n + 1) // 2


def collatz_C(n: int) -> int:
    """One step of the classical map: n/2 if even, 3n+1 if odd."""
    _check_positive(n)
    return n // 2 if n % 2 == 0 else 3 * n + 1


def iterate_T(n: int, k: int) -> int:
    """k-fold iterate of T; k = 0 is the identity."""
    _check_positive(n)
    if k < 0:
        raise ValueError("iteration count must be non-negative")
    for _ in range(k):
        n = n // 2 if n % 2 == 0 else (3 * n + 1) // 2
    return n


@dataclass(frozen=True)
class ReachedTrivialCycle:
    """Trajectory hit the trivial cycle {1, 2}; at_step is the first index in it."""

    at_step: int


@dataclass(frozen=True)
class NontrivialCycle:
    """Trajectory closed a cycle that avoids {1, 2}."""

    members: tuple[int, ...]


@dataclass(frozen=True)
class Exhausted:
    """The step cap elapsed without resolution (reported, never silent)."""

    cap: int


TrajectoryStatus = ReachedTrivialCycle | NontrivialCycle | Exhausted


@dataclass(frozen=True)
class TrajectoryResult:
    steps: tuple[int, ...]
    status: TrajectoryStatus


@dataclass(frozen=True)
class CycleRecord:
    """A finite T-orbit, enumerated starting at its minimum element."""

    members: tuple[int, ...]
    length: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "length", len(self.members))


TRIVIAL_CYCLE = CycleRecord(members=(1, 2))


def trajectory(n: int, cap: int = DEFAULT_CAP) -> TrajectoryResult:
    """Iterate T from n until {1, 2} is hit, a value repeats, or cap steps elapse.

    The returned steps satisfy steps[i+1] = T(steps[i]).  A repeat that
    avoids {1, 2} is reported as NontrivialCycle with the cycle members in
    orbit order starting from the cycle's minimum element.
    """
    _check_positive(n)
    if cap < 1:
        raise ValueError("cap must be at least 1")
    steps = [n]
    seen = {n: 0}
    cur = n
    for step in range(cap):
        if cur in (1, 2):
            return TrajectoryResult(tuple(steps), ReachedTrivialCycle(step))
        cur = collatz_T(cur)
        if cur in seen:
            cycle = steps[seen[cur]:]
            pivot = cycle.index(min(cycle))
            members = tuple(cycle[pivot:] + cycle[:pivot])
            return TrajectoryResult(tuple(steps), NontrivialCycle(members))
        seen[cur] = len(steps)
        steps.append(cur)
    if cur in (1, 2):
        return TrajectoryResult(tuple(steps), ReachedTrivialCycle(cap))
    return TrajectoryResult(tuple(steps), Exhausted(cap))


def stopping_index(n: int, cap: int = DEFAULT_CAP) -> int | None:
    """Least k >= 0 with T^k(n) = 1, or None if cap is exhausted first."""
    _check_positive(n)
    s = 0
    while n != 1:
        if s >= cap:
            return None
        n = n // 2 if n % 2 == 0 else (3 * n + 1) // 2
        s += 1
    return s


def preimages(m: int) -> set[int]:
    """One-step T-preimages: {2m}, plus (2m-1)/3 when m = 2 mod 3."""
    _check_positive(m)
    result = {2 * m}
    if m % 3 == 2:
        result.add((2 * m - 1) // 3)
    return result
