"""
Subspace arrangements, canonical B-trajectories of their layouts, and full sets.
"""

import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from widthkit import config, connfn
from widthkit.checks import Verdict
from widthkit.errors import (
    BudgetExceeded,
    DimensionMismatch,
    FieldMismatch,
    InvalidLayout,
    NotBijective,
    UnknownLabel,
    WidthKitError,
)
from widthkit.ffla import FieldSpec, LinearMap, Subspace, intersect, span
from widthkit.matroid import Configuration
from widthkit.trajectory import (
    FullSetValue,
    Statistic,
    Trajectory,
    blocks,
    compact_with_signature,
    compactify,
    enumerate_compact,
    map_trajectory,
    sequence_tle,
    signature,
    traj_tle,
    typical_sequences,
)

logger = logging.getLogger(__name__)

# -------------------- Arrangements --------------------


@dataclass(frozen=True)
class SubspaceArrangement:
    field: FieldSpec
    dim: int
    labels: tuple[str, ...]
    spaces: tuple[Subspace, ...]
    _sums: dict = dc_field(default_factory=dict, init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if len(self.labels) != len(self.spaces):
            raise WidthKitError(f"{len(self.labels)} labels for {len(self.spaces)} subspaces")
        if len(set(self.labels)) != len(self.labels):
            raise WidthKitError("arrangement labels must be distinct")
        for label, s in zip(self.labels, self.spaces):
            if s.field != self.field:
                raise FieldMismatch(f"member {label} is over {s.field}, arrangement over {self.field}")
            if s.n != self.dim:
                raise DimensionMismatch(f"member {label} lives in dimension {s.n}, not {self.dim}")

    @classmethod
    def empty(cls, field: FieldSpec, dim: int) -> "SubspaceArrangement":
        return cls(field, dim, (), ())

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def mask(self, labels: Iterable[str]) -> int:
        lookup = {l: i for i, l in enumerate(self.labels)}
        labels = list(labels)
        missing = [l for l in labels if l not in lookup]
        if missing:
            raise UnknownLabel(missing)
        return sum(1 << lookup[l] for l in set(labels))

    def sum_of(self, mask: int) -> Subspace:
        cached = self._sums.get(mask)
        if cached is None:
            rows = [row for i, s in enumerate(self.spaces) if mask >> i & 1 for row in s.basis]
            cached = span(self.field, self.dim, rows)
            self._sums[mask] = cached
        return cached

    def span(self) -> Subspace:
        return self.sum_of(self.full_mask)

    def boundary(self, labels: Iterable[str]) -> Subspace:
        m = self.mask(labels)
        return intersect(self.sum_of(m), self.sum_of(self.full_mask & ~m))

    def restrict(self, labels: Iterable[str]) -> "SubspaceArrangement":
        keep = set(labels)
        self.mask(keep)
        pairs = [(l, s) for l, s in zip(self.labels, self.spaces) if l in keep]
        return SubspaceArrangement(self.field, self.dim, tuple(l for l, _ in pairs), tuple(s for _, s in pairs))

    def union(self, other: "SubspaceArrangement") -> "SubspaceArrangement":
        if (self.field, self.dim) != (other.field, other.dim):
            raise DimensionMismatch("arrangements live in different spaces")
        shared = set(self.labels) & set(other.labels)
        if shared:
            raise WidthKitError(f"arrangements share labels {sorted(shared)}")
        return SubspaceArrangement(self.field, self.dim, self.labels + other.labels, self.spaces + other.spaces)

    def image(self, phi: LinearMap) -> "SubspaceArrangement":
        return SubspaceArrangement(self.field, phi.target_dim, self.labels, tuple(phi.image(s) for s in self.spaces))

    def connectivity_function(self) -> connfn.ConnectivityFunction:
        full = self.full_mask
        return connfn.ConnectivityFunction(
            self.labels,
            lambda m: intersect(self.sum_of(m), self.sum_of(full & ~m)).dim,
            name="arrangement",
        )

    def to_json(self) -> dict:
        return {
            "field": [self.field.p, self.field.m],
            "dim": self.dim,
            "members": {l: s.to_json() for l, s in zip(self.labels, self.spaces)},
        }


def from_configuration(a: Configuration) -> SubspaceArrangement:
    """One line (or the zero space, for a zero vector) per labeled vector."""
    return SubspaceArrangement(
        a.field, a.dim, a.labels, tuple(span(a.field, a.dim, [v]) for v in a.vectors)
    )


def path_width(v: SubspaceArrangement, budget: int | None = None) -> tuple[int, connfn.Layout]:
    return connfn.path_width(v.connectivity_function(), budget)


# -------------------- Canonical trajectories --------------------


def _check_space(v: SubspaceArrangement, b: Subspace):
    if b.field != v.field or b.n != v.dim:
        raise DimensionMismatch(f"B lives in {b.field}^{b.n}, arrangement in {v.field}^{v.dim}")


def _statistic(v: SubspaceArrangement, b: Subspace, mask: int) -> Statistic:
    key = ("stat", b, mask)
    cached = v._sums.get(key)
    if cached is None:
        prefix = v.sum_of(mask)
        suffix = v.sum_of(v.full_mask & ~mask)
        left = intersect(prefix, b)
        right = intersect(suffix, b)
        lam = intersect(prefix, suffix).dim - intersect(left, right).dim
        cached = Statistic(left, right, lam)
        v._sums[key] = cached
    return cached


def canonical_trajectory(v: SubspaceArrangement, sigma: Sequence[str], b: Subspace) -> Trajectory:
    _check_space(v, b)
    if sorted(sigma) != sorted(v.labels) or len(set(sigma)) != len(sigma):
        raise InvalidLayout(f"{list(sigma)} is not a layout of {list(v.labels)}")
    masks = [0]
    for label in sigma:
        masks.append(masks[-1] | 1 << v.labels.index(label))
    return Trajectory(b, tuple(_statistic(v, b, m) for m in masks))


def _check_fullset_budget(v: SubspaceArrangement, budget: int | None):
    limit = config.FULLSET_BUDGET if budget is None else budget
    if v.size > limit:
        raise BudgetExceeded("full set layouts", v.size, limit)


def realizable_trajectories(v: SubspaceArrangement, b: Subspace, budget: int | None = None) -> frozenset[Trajectory]:
    """Compactifications of every realizable trajectory, built suffix by suffix over prefix masks."""
    _check_space(v, b)
    _check_fullset_budget(v, budget)
    key = ("realizable", b)
    if key in v._sums:
        return v._sums[key]
    full = v.full_mask
    memo: dict[int, frozenset[tuple[Statistic, ...]]] = {}

    def suffixes(mask: int) -> frozenset[tuple[Statistic, ...]]:
        if mask in memo:
            return memo[mask]
        head = _statistic(v, b, mask)
        if mask == full:
            out = frozenset([(head,)])
        else:
            found = set()
            for i in range(v.size):
                if mask >> i & 1:
                    continue
                for tail in suffixes(mask | 1 << i):
                    found.add(compactify(Trajectory(b, (head,) + tail)).stats)
            out = frozenset(found)
        memo[mask] = out
        return out

    result = frozenset(Trajectory(b, stats) for stats in suffixes(0))
    v._sums[key] = result
    logger.debug(f"{len(result)} realizable compact trajectories over dim B = {b.dim}")
    return result


# -------------------- Full sets --------------------


def full_set(v: SubspaceArrangement, b: Subspace, k: int, budget: int | None = None) -> FullSetValue:
    """Compact B-trajectories of width <= k dominating some realizable trajectory.

    Domination forces equal block sequences and splits block by block,
    so each realizable trajectory contributes a product of per-block
    choices of typical sequences.
    """
    members: set[Trajectory] = set()
    typical = typical_sequences(k)
    for delta in sorted(realizable_trajectories(v, b, budget), key=lambda t: t.encode()):
        choices = [[g for g in typical if sequence_tle(d, g)] for d in blocks(delta)]
        size = math.prod(len(c) for c in choices)
        if size == 0:
            continue
        if size > config.COMPACT_LIMIT:
            raise BudgetExceeded("full set block product", size, config.COMPACT_LIMIT)
        members.update(compact_with_signature(b, signature(delta), k, choices))
    return FullSetValue(b, k, frozenset(members))


def full_set_definitional(v: SubspaceArrangement, b: Subspace, k: int) -> FullSetValue:
    """U_k(B) filtered against the canonical trajectory of every single layout."""
    _check_fullset_budget(v, None)
    f = v.connectivity_function()
    deltas = {canonical_trajectory(v, sigma, b) for sigma in connfn.iter_layouts(f, max_width=v.dim)}
    universe = enumerate_compact(b, k)
    return FullSetValue(b, k, frozenset(g for g in universe.members if any(traj_tle(d, g) for d in deltas)))


def map_full_set(phi: LinearMap, fs: FullSetValue) -> FullSetValue:
    if not phi.is_injective_on(fs.space):
        raise NotBijective("map is not injective on the full set's B")
    return FullSetValue(phi.image(fs.space), fs.k, frozenset(map_trajectory(phi, t) for t in fs.members))


# -------------------- Composition checks --------------------


def check_shrink(v: SubspaceArrangement, v2: SubspaceArrangement, b: Subspace, k: int) -> Verdict:
    """Equal full sets over B force equal full sets over {0}."""
    if not b.is_subspace_of(v.span() + v2.span()):
        return Verdict.INAPPLICABLE
    if full_set(v, b, k) != full_set(v2, b, k):
        return Verdict.VACUOUS
    zero = Subspace.zero(v.field, v.dim)
    return Verdict.of(full_set(v, zero, k) == full_set(v2, zero, k))


def _separated(v1: SubspaceArrangement, v2: SubspaceArrangement, b: Subspace) -> bool:
    return intersect(v1.span() + b, v2.span() + b) == b


def check_merge(v1: SubspaceArrangement, v1p: SubspaceArrangement,
                v2: SubspaceArrangement, v2p: SubspaceArrangement, b: Subspace, k: int) -> Verdict:
    """Matching full sets on both sides of B give matching full sets of the unions."""
    if not (_separated(v1, v2, b) and _separated(v1p, v2p, b)):
        return Verdict.INAPPLICABLE
    if full_set(v1, b, k) != full_set(v1p, b, k) or full_set(v2, b, k) != full_set(v2p, b, k):
        return Verdict.VACUOUS
    return Verdict.of(full_set(v1.union(v2), b, k) == full_set(v1p.union(v2p), b, k))


def check_key(v: SubspaceArrangement, v2: SubspaceArrangement,
              partitions: tuple[Iterable[str], Iterable[str]], phi: LinearMap, k: int) -> Verdict:
    """If phi carries both full sets across the boundaries, path-width <= k agrees on both sides.

    partitions gives the first part of each arrangement; the second part
    is the rest. phi maps v's ambient space and must send the boundary of
    v's first part bijectively onto the boundary of v2's first part.
    """
    first, first2 = set(partitions[0]), set(partitions[1])
    b = v.boundary(first)
    b2 = v2.boundary(first2)
    if phi.source_dim != v.dim or phi.target_dim != v2.dim:
        return Verdict.INAPPLICABLE
    if not phi.is_injective_on(b) or phi.image(b) != b2:
        return Verdict.INAPPLICABLE
    v_1, v_2 = v.restrict(first), v.restrict(set(v.labels) - first)
    w_1, w_2 = v2.restrict(first2), v2.restrict(set(v2.labels) - first2)
    matches = (
        map_full_set(phi, full_set(v_1, b, k)) == full_set(w_1, b2, k)
        and map_full_set(phi, full_set(v_2, b, k)) == full_set(w_2, b2, k)
    )
    if not matches:
        return Verdict.VACUOUS
    return Verdict.of((path_width(v)[0] <= k) == (path_width(v2)[0] <= k))
