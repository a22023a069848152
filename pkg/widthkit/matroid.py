"""
Configurations (labeled vectors) and the vector matroids they represent.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from widthkit import connfn
from widthkit.errors import (
    DimensionMismatch,
    InvalidMinor,
    TheoremViolation,
    UnknownLabel,
    WidthKitError,
)
from widthkit.ffla import (
    FieldSpec,
    LinearMap,
    Matrix,
    Subspace,
    gf2_rank,
    intersect,
    quotient_map,
    rank,
    span,
)

logger = logging.getLogger(__name__)

GF2 = FieldSpec(2)

# -------------------- Types --------------------


@dataclass(frozen=True)
class Configuration:
    field: FieldSpec
    dim: int
    labels: tuple[str, ...]
    vectors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.labels) != len(self.vectors):
            raise WidthKitError(f"{len(self.labels)} labels for {len(self.vectors)} vectors")
        if len(set(self.labels)) != len(self.labels):
            raise WidthKitError("configuration labels must be distinct")
        for label, vec in zip(self.labels, self.vectors):
            if len(vec) != self.dim:
                raise DimensionMismatch(f"vector {label} has length {len(vec)}, expected {self.dim}")
        self.field.check(self.vectors)

    @classmethod
    def from_columns(cls, field: FieldSpec, columns: Matrix | Sequence[Sequence[int]],
                     labels: Sequence[str] | None = None) -> "Configuration":
        """Columns of a (dim x n) matrix become the elements."""
        arr = columns.entries if isinstance(columns, Matrix) else field.check(columns)
        if arr.ndim != 2:
            raise DimensionMismatch("expected a matrix")
        dim, n = arr.shape
        labels = tuple(labels) if labels is not None else tuple(f"e{i}" for i in range(n))
        vectors = tuple(tuple(int(x) for x in arr[:, j]) for j in range(n))
        return cls(field, dim, labels, vectors)

    @classmethod
    def from_vectors(cls, field: FieldSpec, dim: int, items: Iterable[tuple[str, Sequence[int]]]) -> "Configuration":
        items = list(items)
        return cls(field, dim, tuple(l for l, _ in items), tuple(tuple(int(x) for x in v) for _, v in items))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel([label]) from None

    def mask(self, labels: Iterable[str]) -> int:
        lookup = {l: i for i, l in enumerate(self.labels)}
        labels = list(labels)
        missing = [l for l in labels if l not in lookup]
        if missing:
            raise UnknownLabel(missing)
        m = 0
        for l in labels:
            m |= 1 << lookup[l]
        return m

    def labels_of(self, mask: int) -> tuple[str, ...]:
        return tuple(l for i, l in enumerate(self.labels) if mask >> i & 1)

    def vector(self, label: str) -> tuple[int, ...]:
        return self.vectors[self.index(label)]

    def span(self, labels: Iterable[str] | None = None) -> Subspace:
        if labels is None:
            return span(self.field, self.dim, self.vectors)
        return span(self.field, self.dim, [self.vector(l) for l in labels])

    def restrict(self, labels: Iterable[str]) -> "Configuration":
        keep = set(labels)
        unknown = keep - set(self.labels)
        if unknown:
            raise UnknownLabel(sorted(unknown))
        pairs = [(l, v) for l, v in zip(self.labels, self.vectors) if l in keep]
        return Configuration.from_vectors(self.field, self.dim, pairs)

    def image(self, phi: LinearMap) -> "Configuration":
        if phi.source_dim != self.dim:
            raise DimensionMismatch(f"map expects dimension {phi.source_dim}, configuration has {self.dim}")
        if not self.vectors:
            return Configuration(self.field, phi.target_dim, (), ())
        mapped = phi.apply(np.array(self.vectors, dtype=np.int64))
        return Configuration.from_vectors(self.field, phi.target_dim, zip(self.labels, mapped.tolist()))

    def to_matrix(self) -> Matrix:
        arr = np.array(self.vectors, dtype=np.int64).reshape(self.size, self.dim).T
        return Matrix(self.field, arr)


@dataclass(frozen=True)
class MinorSpec:
    contract: frozenset[str] = frozenset()
    delete: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "contract", frozenset(self.contract))
        object.__setattr__(self, "delete", frozenset(self.delete))


@dataclass(frozen=True)
class ConnMinorReport:
    leq: bool
    equality: bool
    predicted_equality: bool


# -------------------- Rank and connectivity --------------------


@lru_cache(maxsize=1 << 16)
def _rank_mask(a: Configuration, mask: int) -> int:
    rows = [v for i, v in enumerate(a.vectors) if mask >> i & 1]
    if not rows:
        return 0
    if a.field == GF2:
        return gf2_rank(int("".join(map(str, v)) or "0", 2) for v in rows)
    return rank(Matrix(a.field, np.array(rows, dtype=np.int64)))


def _connectivity_mask(a: Configuration, mask: int) -> int:
    full = a.full_mask
    return _rank_mask(a, mask) + _rank_mask(a, full & ~mask) - _rank_mask(a, full)


def rank_of(a: Configuration, x: Iterable[str]) -> int:
    return _rank_mask(a, a.mask(x))


def connectivity(a: Configuration, x: Iterable[str]) -> int:
    """lambda_M(X) = r(X) + r(E - X) - r(E)."""
    return _connectivity_mask(a, a.mask(x))


def boundary(a: Configuration, x: Iterable[str]) -> Subspace:
    """<X> & <E - X>; its dimension is connectivity(a, x)."""
    inside = set(x)
    a.mask(inside)
    rest = [l for l in a.labels if l not in inside]
    return intersect(a.span(sorted(inside, key=a.index)), a.span(rest))


def rank_table(a: Configuration) -> tuple[int, ...]:
    return tuple(_rank_mask(a, m) for m in range(a.full_mask + 1))


def connectivity_function(a: Configuration) -> connfn.ConnectivityFunction:
    return connfn.ConnectivityFunction(a.labels, lambda mask: _connectivity_mask(a, mask), name="lambda_M")


def path_width(a: Configuration, budget: int | None = None) -> tuple[int, connfn.Layout]:
    return connfn.path_width(connectivity_function(a), budget)


# -------------------- Minors --------------------


def _check_minor(a: Configuration, spec: MinorSpec):
    a.mask(spec.contract | spec.delete)
    overlap = spec.contract & spec.delete
    if overlap:
        raise InvalidMinor(f"contract and delete sets share {sorted(overlap)}")


def minor(a: Configuration, spec: MinorSpec) -> Configuration:
    """M \\ D / C, contracting through the quotient by <C>."""
    _check_minor(a, spec)
    removed = spec.contract | spec.delete
    kept = [l for l in a.labels if l not in removed]
    c_space = a.span(sorted(spec.contract, key=a.index))
    pi = quotient_map(a.field, a.dim, c_space)
    return a.restrict(kept).image(pi)


def delete(a: Configuration, label: str) -> Configuration:
    return minor(a, MinorSpec(delete=frozenset([label])))


def contract(a: Configuration, label: str) -> Configuration:
    return minor(a, MinorSpec(contract=frozenset([label])))


def is_coindependent(a: Configuration, d: Iterable[str]) -> bool:
    mask = a.mask(d)
    return _rank_mask(a, a.full_mask & ~mask) == _rank_mask(a, a.full_mask)


def connminor_check(a: Configuration, x: Iterable[str], c: Iterable[str], d: Iterable[str]) -> ConnMinorReport:
    """Compare lambda of X in M \\ D / C with lambda_M(X) and with the rank criterion for equality."""
    x, c, d = set(x), set(c), set(d)
    if x & c or x & d or c & d:
        raise InvalidMinor("X, C and D must be pairwise disjoint")
    r = lambda labels: rank_of(a, labels)
    everything = set(a.labels)
    before = connectivity(a, x)
    after = connectivity(minor(a, MinorSpec(frozenset(c), frozenset(d))), x)
    predicted = (
        r(x | c) == r(x) + r(c)
        and r(everything - x) + r(everything - d) == r(everything) + r(everything - (x | d))
    )
    report = ConnMinorReport(leq=after <= before, equality=after == before, predicted_equality=predicted)
    if not report.leq or report.equality != report.predicted_equality:
        raise TheoremViolation(f"minor connectivity check failed on X={sorted(x)}, C={sorted(c)}, D={sorted(d)}: {report}")
    return report


# -------------------- Canonical forms --------------------


def element_invariants(a: Configuration) -> tuple[tuple, ...]:
    """Per element: how many subsets containing it have each (size, rank)."""
    table = rank_table(a)
    out = []
    for i in range(a.size):
        counts = Counter(
            (bin(m).count("1"), table[m]) for m in range(a.full_mask + 1) if m >> i & 1
        )
        out.append(tuple(sorted(counts.items())))
    return tuple(out)


def invariant_key(a: Configuration) -> tuple:
    return (a.size, _rank_mask(a, a.full_mask), tuple(sorted(element_invariants(a))))


def canonical_fingerprint(a: Configuration) -> str:
    """Lexicographically least independence vector over invariant-respecting orders.

    Isomorphic matroids get the same string whatever their field or labels.
    """
    n = a.size
    table = rank_table(a)
    masks = np.arange(1 << n, dtype=np.int64)
    popcount = np.array([bin(m).count("1") for m in range(1 << n)], dtype=np.int64)
    indep = (np.array(table, dtype=np.int64) == popcount).astype(np.uint8)

    inv = element_invariants(a)
    classes = [[i for i in range(n) if inv[i] == key] for key in sorted(set(inv))]
    best = None
    for parts in itertools.product(*(itertools.permutations(c) for c in classes)):
        perm = [e for part in parts for e in part]
        new_of_old = np.zeros_like(masks)
        for j, old in enumerate(perm):
            new_of_old |= ((masks >> old) & 1) << j
        vec = np.empty_like(indep)
        vec[new_of_old] = indep
        key = vec.tobytes()
        if best is None or key < best:
            best = key
    bits = np.packbits(np.frombuffer(best, dtype=np.uint8)).tobytes().hex() if best else ""
    return f"m{n}r{table[-1]}:{bits}"


class CanonicalSet:
    """Isomorphism-class dedupe: cheap invariant buckets, fingerprints only on collision."""

    def __init__(self, key=invariant_key, fingerprint=canonical_fingerprint):
        self._key = key
        self._fingerprint = fingerprint
        self._buckets: dict[tuple, list[list]] = {}

    def add(self, obj) -> bool:
        bucket = self._buckets.setdefault(self._key(obj), [])
        if not bucket:
            bucket.append([obj, None])
            return True
        fp = self._fingerprint(obj)
        for entry in bucket:
            if entry[1] is None:
                entry[1] = self._fingerprint(entry[0])
            if entry[1] == fp:
                return False
        bucket.append([obj, fp])
        return True

    def __iter__(self):
        for bucket in self._buckets.values():
            for obj, _ in bucket:
                yield obj

    def __len__(self):
        return sum(len(b) for b in self._buckets.values())


def binary_matroids(max_size: int, max_rank: int = 4) -> Iterator[Configuration]:
    """One GF(2) configuration per binary matroid with <= max_size elements and rank <= max_rank.

    Binary matroids are uniquely representable, so extending one
    representative of each class by every vector of GF(2)^max_rank reaches
    every class of the next size.
    """
    all_vectors = list(itertools.product((0, 1), repeat=max_rank))
    level = [Configuration(GF2, max_rank, (), ())]
    yield level[0]
    for size in range(1, max_size + 1):
        seen = CanonicalSet()
        for rep in level:
            for vec in all_vectors:
                seen.add(Configuration(GF2, max_rank, rep.labels + (f"e{size - 1}",), rep.vectors + (vec,)))
        level = list(seen)
        logger.info(f"{len(level)} binary matroids on {size} elements (rank <= {max_rank})")
        yield from level
