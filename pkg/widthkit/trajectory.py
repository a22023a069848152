"""
B-trajectories: sequences of (L, R, lambda) statistics over a fixed subspace B.

Along a valid trajectory the (L, R) pairs move monotonically, so equal
pairs always sit in one consecutive block. The block sequence (the
signature) is kept by extensions and by compactification, and a
trajectory is compact exactly when every block's lambda-sequence is
typical. Enumeration and counting of U_k(B) work block by block.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from widthkit import config
from widthkit.errors import BudgetExceeded, DimensionMismatch, NotBijective
from widthkit.ffla import LinearMap, Subspace, subspaces_of

logger = logging.getLogger(__name__)

# -------------------- Types --------------------


@dataclass(frozen=True)
class Statistic:
    left: Subspace
    right: Subspace
    lam: int

    @property
    def pair(self) -> tuple[Subspace, Subspace]:
        return self.left, self.right

    def encode(self) -> tuple:
        return self.left.basis, self.right.basis, self.lam

    def to_json(self) -> dict:
        return {"L": self.left.to_json(), "R": self.right.to_json(), "lambda": self.lam}


@dataclass(frozen=True)
class Trajectory:
    space: Subspace
    stats: tuple[Statistic, ...]

    def __len__(self):
        return len(self.stats)

    def __getitem__(self, i):
        return self.stats[i]

    def __iter__(self):
        return iter(self.stats)

    @property
    def lams(self) -> tuple[int, ...]:
        return tuple(s.lam for s in self.stats)

    def encode(self) -> tuple:
        return tuple(s.encode() for s in self.stats)

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self.stats]


@dataclass(frozen=True)
class FullSetValue:
    """A set of compact trajectories over one B, all of width <= k."""

    space: Subspace
    k: int
    members: frozenset[Trajectory]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.sorted_members())

    def __contains__(self, t):
        return t in self.members

    def sorted_members(self) -> list[Trajectory]:
        return sorted(self.members, key=lambda t: (len(t), t.encode()))

    def to_json(self) -> dict:
        return {
            "B": self.space.to_json(),
            "k": self.k,
            "trajectories": [t.to_json() for t in self.sorted_members()],
        }


# -------------------- Basic operations --------------------


def validate(t: Trajectory) -> bool:
    stats = t.stats
    if not stats:
        return False
    b = t.space
    for s in stats:
        if s.lam < 0:
            return False
        if (s.left.field, s.left.n, s.right.field, s.right.n) != (b.field, b.n, b.field, b.n):
            return False
        if not (s.left.is_subspace_of(b) and s.right.is_subspace_of(b)):
            return False
    if stats[0].right != stats[-1].left:
        return False
    for prev, nxt in zip(stats, stats[1:]):
        if not prev.left.is_subspace_of(nxt.left):
            return False
        if not nxt.right.is_subspace_of(prev.right):
            return False
    return True


def width(t: Trajectory) -> int:
    return max(t.lams)


def stat_leq(a: Statistic, b: Statistic) -> bool:
    return a.left == b.left and a.right == b.right and a.lam <= b.lam


def signature(t: Trajectory) -> tuple[tuple[Subspace, Subspace], ...]:
    return tuple(pair for pair, _ in itertools.groupby(s.pair for s in t.stats))


def blocks(t: Trajectory) -> list[tuple[int, ...]]:
    return [tuple(s.lam for s in group) for _, group in itertools.groupby(t.stats, key=lambda s: s.pair)]


# -------------------- Compactification --------------------


def _between(lams: Sequence[int], i: int, j: int) -> bool:
    lo, hi = lams[i], lams[j]
    inner = lams[i + 1: j]
    return all(lo <= v <= hi for v in inner) or all(lo >= v >= hi for v in inner)


def _removable_runs(stats: Sequence[Statistic]) -> Iterator[tuple[int, int]]:
    """Every applicable removal as a half-open index range."""
    lams = [s.lam for s in stats]
    for i in range(1, len(stats)):
        if stats[i - 1] == stats[i]:
            yield i, i + 1
    for i in range(len(stats)):
        for j in range(i + 2, len(stats)):
            if stats[i].pair == stats[j].pair and _between(lams, i, j):
                yield i + 1, j


def _first_removal(stats: Sequence[Statistic]) -> tuple[int, int] | None:
    for i in range(1, len(stats)):
        if stats[i - 1] == stats[i]:
            return i, i + 1
    lams = [s.lam for s in stats]
    for i in range(len(stats)):
        for j in range(len(stats) - 1, i + 1, -1):
            if stats[i].pair == stats[j].pair and _between(lams, i, j):
                return i + 1, j
    return None


def compactify(t: Trajectory) -> Trajectory:
    """Apply both removal rules, leftmost first, until neither applies."""
    stats = list(t.stats)
    while True:
        run = _first_removal(stats)
        if run is None:
            return Trajectory(t.space, tuple(stats))
        del stats[run[0]: run[1]]


def is_compact(t: Trajectory) -> bool:
    return _first_removal(t.stats) is None


def compactification_fixpoints(t: Trajectory) -> set[Trajectory]:
    """Every compact result reachable under any order of rule applications."""
    results: set[Trajectory] = set()
    seen: set[tuple[Statistic, ...]] = set()
    frontier = [t.stats]
    while frontier:
        stats = frontier.pop()
        if stats in seen:
            continue
        seen.add(stats)
        runs = list(_removable_runs(stats))
        if not runs:
            results.add(Trajectory(t.space, stats))
        for lo, hi in runs:
            frontier.append(stats[:lo] + stats[hi:])
    return results


# -------------------- Orders --------------------


def _aligned(n1: int, n2: int, ok) -> bool:
    """Monotone lattice path from (0, 0) to (n1-1, n2-1) through cells where ok(i, j)."""
    if n1 == 0 or n2 == 0:
        return False
    reach = [[False] * n2 for _ in range(n1)]
    for i in range(n1):
        for j in range(n2):
            if not ok(i, j):
                continue
            if i == 0 and j == 0:
                reach[i][j] = True
            else:
                reach[i][j] = (
                    (i > 0 and reach[i - 1][j])
                    or (j > 0 and reach[i][j - 1])
                    or (i > 0 and j > 0 and reach[i - 1][j - 1])
                )
    return reach[-1][-1]


def traj_tle(t1: Trajectory, t2: Trajectory) -> bool:
    """Whether some extensions of t1 and t2 compare pointwise."""
    return _aligned(len(t1), len(t2), lambda i, j: stat_leq(t1[i], t2[j]))


def sequence_tle(s1: Sequence[int], s2: Sequence[int]) -> bool:
    return _aligned(len(s1), len(s2), lambda i, j: s1[i] <= s2[j])


# -------------------- U_k(B) --------------------


def _is_typical_extension(seq: Sequence[int]) -> bool:
    j = len(seq) - 1
    if j >= 1 and seq[j] == seq[j - 1]:
        return False
    return not any(_between(seq, i, j) for i in range(j - 1))


@lru_cache(maxsize=None)
def typical_sequences(k: int) -> tuple[tuple[int, ...], ...]:
    """Every lambda-sequence over 0..k that one compact block can carry."""
    found = []

    def grow(seq: list[int]):
        found.append(tuple(seq))
        for v in range(k + 1):
            seq.append(v)
            if _is_typical_extension(seq):
                grow(seq)
            seq.pop()

    for v in range(k + 1):
        grow([v])
    longest = max(len(s) for s in found)
    assert longest <= 2 * k + 1, f"typical sequence of length {longest} for k={k}"
    return tuple(sorted(found, key=lambda s: (len(s), s)))


@lru_cache(maxsize=256)
def signatures(b: Subspace) -> tuple[tuple[tuple[Subspace, Subspace], ...], ...]:
    """Block sequences allowed over b: L grows, R shrinks, R first = L last."""
    subs = subspaces_of(b)
    inside = {(x, y): subs[x].is_subspace_of(subs[y]) for x in range(len(subs)) for y in range(len(subs))}
    found = []

    def walk(seq: list[tuple[int, int]], r0: int):
        left, right = seq[-1]
        if left == r0:
            found.append(tuple((subs[l], subs[r]) for l, r in seq))
        for nl in range(len(subs)):
            if not (inside[left, nl] and inside[nl, r0]):
                continue
            for nr in range(len(subs)):
                if inside[nr, right] and (nl, nr) != (left, right):
                    seq.append((nl, nr))
                    walk(seq, r0)
                    seq.pop()

    for l0 in range(len(subs)):
        for r0 in range(len(subs)):
            if inside[l0, r0]:
                walk([(l0, r0)], r0)
    return tuple(found)


def compact_with_signature(b: Subspace, sig: Sequence[tuple[Subspace, Subspace]], k: int,
                           choices: Sequence[Iterable[tuple[int, ...]]] | None = None) -> Iterator[Trajectory]:
    """Compact trajectories with the given block sequence, one typical sequence per block."""
    per_block = choices if choices is not None else [typical_sequences(k)] * len(sig)
    for picks in itertools.product(*per_block):
        stats = tuple(
            Statistic(left, right, lam)
            for (left, right), lams in zip(sig, picks)
            for lam in lams
        )
        yield Trajectory(b, stats)


def iter_compact(b: Subspace, k: int) -> Iterator[Trajectory]:
    for sig in signatures(b):
        yield from compact_with_signature(b, sig, k)


def count_compact(b: Subspace, k: int) -> int:
    """|U_k(b)| without materializing it."""
    per_block = len(typical_sequences(k))
    return sum(per_block ** len(sig) for sig in signatures(b))


def enumerate_compact(b: Subspace, k: int, limit: int | None = None) -> FullSetValue:
    """All of U_k(b), materialized.

    Any field, dim b and k are accepted; the only guard is the member count
    against limit (COMPACT_LIMIT by default), taken from count_compact before
    anything is built, so small b and k past the limit raise BudgetExceeded
    just like large ones. Counting still walks signatures(b), whose size grows with
    the number of subspace chains of b, so very large b is slow to reject.
    """
    limit = config.COMPACT_LIMIT if limit is None else limit
    total = count_compact(b, k)
    if total > limit:
        raise BudgetExceeded(f"U_{k} over a {b.dim}-dimensional B", total, limit)
    members = frozenset(iter_compact(b, k))
    logger.debug(f"|U_{k}(B)| = {len(members)} for dim B = {b.dim} over {b.field}")
    return FullSetValue(b, k, members)


def compact_count_bound(theta: int, k: int, q: int) -> int:
    return 2 ** (9 * theta + 2) * q ** (theta * (theta - 1)) * 2 ** (2 * (2 * theta + 1) * k)


# -------------------- Linear images --------------------


def _check_bijective_on(phi: LinearMap, b: Subspace):
    if phi.source_dim != b.n:
        raise DimensionMismatch(f"map expects dimension {phi.source_dim}, B lives in {b.n}")
    if not phi.is_injective_on(b):
        raise NotBijective("map is not injective on B")


def map_trajectory(phi: LinearMap, t: Trajectory) -> Trajectory:
    _check_bijective_on(phi, t.space)
    return Trajectory(
        phi.image(t.space),
        tuple(Statistic(phi.image(s.left), phi.image(s.right), s.lam) for s in t.stats),
    )
