"""
Exact linear algebra over small finite fields GF(p^m).

Field elements are ints in [0, q); an element's base-p digits are the
coefficients of its polynomial representative (digit i <-> x^i).
Subspaces are kept in reduced row-echelon form so equal subspaces
compare and hash equal.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np
import sympy

from widthkit.errors import DimensionMismatch, FieldMismatch, WidthKitError

logger = logging.getLogger(__name__)

MAX_ORDER = 1 << 16

# -------------------- Fields --------------------


def _is_irreducible(p: int, coeffs: Sequence[int]) -> bool:
    x = sympy.Symbol("x")
    return sympy.Poly(list(coeffs), x, modulus=p).is_irreducible


@lru_cache(maxsize=None)
def default_modulus(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible polynomial of degree m over GF(p)."""
    if m == 1:
        return (1, 0)
    for tail in itertools.product(range(p), repeat=m):
        if tail[-1] == 0:
            continue
        coeffs = (1, *tail)
        if _is_irreducible(p, coeffs):
            return coeffs
    raise WidthKitError(f"no irreducible polynomial of degree {m} over GF({p})")


@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int = 1
    # highest degree first, monic
    modulus: tuple[int, ...] = ()

    def __post_init__(self):
        if not sympy.isprime(self.p):
            raise FieldMismatch(f"characteristic {self.p} is not prime")
        if self.m < 1:
            raise FieldMismatch(f"degree must be positive, got {self.m}")
        if self.p ** self.m > MAX_ORDER:
            raise FieldMismatch(f"GF({self.p}^{self.m}) exceeds order {MAX_ORDER}")
        if not self.modulus:
            object.__setattr__(self, "modulus", default_modulus(self.p, self.m))
            return
        modulus = tuple(int(c) for c in self.modulus)
        object.__setattr__(self, "modulus", modulus)
        if len(modulus) != self.m + 1 or modulus[0] != 1:
            raise FieldMismatch(f"reduction polynomial {modulus} is not monic of degree {self.m}")
        if any(not 0 <= c < self.p for c in modulus):
            raise FieldMismatch(f"reduction polynomial {modulus} has coefficients outside GF({self.p})")
        if not _is_irreducible(self.p, modulus):
            raise FieldMismatch(f"reduction polynomial {modulus} is reducible over GF({self.p})")

    @property
    def q(self) -> int:
        return self.p ** self.m

    def __str__(self):
        return f"GF({self.p})" if self.m == 1 else f"GF({self.p}^{self.m})"

    # -- vectorized arithmetic; every argument may be an int or an int array --

    def add(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        t = _tables(self)
        return ((t.digits[a] + t.digits[b]) % self.p) @ t.weights

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return _tables(self).negation[a]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a * b) % self.p
        t = _tables(self)
        zero = (a == 0) | (b == 0)
        prod = t.exp[t.log[a] + t.log[b]]
        return np.where(zero, 0, prod)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        if self.m == 1:
            return np.asarray(pow_table(self.p))[a]
        t = _tables(self)
        return t.exp[(self.q - 1 - t.log[a]) % (self.q - 1)]

    def check(self, entries) -> np.ndarray:
        arr = np.asarray(entries, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.q):
            raise FieldMismatch(f"entries outside {self}")
        return arr


@lru_cache(maxsize=None)
def pow_table(p: int) -> tuple[int, ...]:
    return (0,) + tuple(pow(a, p - 2, p) for a in range(1, p))


@dataclass(frozen=True)
class _Tables:
    digits: np.ndarray
    weights: np.ndarray
    exp: np.ndarray
    log: np.ndarray
    negation: np.ndarray


def _poly_mulmod(a: list[int], b: list[int], low: list[int], p: int, m: int) -> list[int]:
    prod = [0] * (2 * m - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] = (prod[i + j] + ai * bj) % p
    # x^m = -sum(low[t] x^t)
    for deg in range(2 * m - 2, m - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for t in range(m):
                prod[deg - m + t] = (prod[deg - m + t] - c * low[t]) % p
    return prod[:m]


@lru_cache(maxsize=None)
def _tables(spec: FieldSpec) -> _Tables:
    p, m, q = spec.p, spec.m, spec.q
    weights = p ** np.arange(m, dtype=np.int64)
    digits = (np.arange(q, dtype=np.int64)[:, None] // weights) % p
    low = list(reversed(spec.modulus[1:]))

    def to_int(d):
        return int(sum(c * int(w) for c, w in zip(d, weights)))

    exp = None
    for g in range(1, q):
        g_digits = digits[g].tolist()
        powers = [1]
        cur = digits[1].tolist()
        while True:
            cur = _poly_mulmod(cur, g_digits, low, p, m)
            value = to_int(cur)
            if value == 1:
                break
            powers.append(value)
        if len(powers) == q - 1:
            exp = np.array(powers + powers, dtype=np.int64)
            break
    if exp is None:
        raise WidthKitError(f"{spec} has no primitive element; modulus not irreducible?")

    log = np.zeros(q, dtype=np.int64)
    log[exp[: q - 1]] = np.arange(q - 1)
    negation = ((-digits) % p) @ weights
    logger.debug(f"Built arithmetic tables for {spec}")
    return _Tables(digits=digits, weights=weights, exp=exp, log=log, negation=negation)


# -------------------- Matrices --------------------


def _matmul(field: FieldSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape[1] != y.shape[0]:
        raise DimensionMismatch(f"cannot multiply {x.shape} by {y.shape}")
    acc = np.zeros((x.shape[0], y.shape[1]), dtype=np.int64)
    for t in range(x.shape[1]):
        acc = field.add(acc, field.mul(x[:, t, None], y[None, t, :]))
    return acc


def rref(field: FieldSpec, rows) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row-echelon form without zero rows, and its pivot columns."""
    a = np.array(rows, dtype=np.int64, copy=True)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {a.shape}")
    n_rows, n_cols = a.shape
    pivots = []
    row = 0
    for col in range(n_cols):
        if row == n_rows:
            break
        nz = np.nonzero(a[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            a[[row, piv]] = a[[piv, row]]
        a[row] = field.mul(a[row], field.inv(a[row, col]))
        others = np.nonzero(a[:, col])[0]
        others = others[others != row]
        if others.size:
            factors = a[others, col]
            a[others] = field.sub(a[others], field.mul(factors[:, None], a[row][None, :]))
        pivots.append(col)
        row += 1
    return a[:row], tuple(pivots)


@dataclass(frozen=True, eq=False)
class Matrix:
    field: FieldSpec
    entries: np.ndarray

    @classmethod
    def from_rows(cls, field: FieldSpec, rows, cols: int | None = None) -> "Matrix":
        try:
            arr = field.check(rows)
        except ValueError as e:
            raise DimensionMismatch(f"matrix rows have inconsistent lengths: {e}") from e
        if arr.size == 0 and arr.ndim != 2:
            arr = np.zeros((0, cols or 0), dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionMismatch("matrix must be two-dimensional")
        return cls(field, arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.entries[:, j])

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.entries.shape == other.entries.shape
            and bool(np.array_equal(self.entries, other.entries))
        )

    __hash__ = None


def rank(m: Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m.field, m.entries)[1])


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) of rows packed as int bitmasks."""
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


# -------------------- Subspaces --------------------


@dataclass(frozen=True)
class Subspace:
    field: FieldSpec
    n: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def zero(cls, field: FieldSpec, n: int) -> "Subspace":
        return cls(field, n, ())

    @classmethod
    def full(cls, field: FieldSpec, n: int) -> "Subspace":
        return cls(field, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def standard(cls, field: FieldSpec, n: int, coords: Iterable[int]) -> "Subspace":
        rows = [[int(i == c) for i in range(n)] for c in sorted(set(coords))]
        return span(field, n, rows)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64).reshape(self.dim, self.n)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, v in enumerate(row) if v) for row in self.basis)

    def contains(self, vector) -> bool:
        vec = np.asarray(vector, dtype=np.int64).reshape(1, self.n)
        if not vec.any():
            return True
        # eliminate against the echelon basis
        residue = vec[0].copy()
        for row, piv in zip(self.array, self.pivots):
            if residue[piv]:
                residue = self.field.sub(residue, self.field.mul(residue[piv], row))
        return not residue.any()

    def is_subspace_of(self, other: "Subspace") -> bool:
        _check_compatible(self, other)
        return all(other.contains(row) for row in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def vectors(self) -> np.ndarray:
        """All q^dim elements, one per row."""
        coefs = np.array(list(itertools.product(range(self.field.q), repeat=self.dim)), dtype=np.int64)
        coefs = coefs.reshape(self.field.q ** self.dim, self.dim)
        return _matmul(self.field, coefs, self.array)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        coefs = rng.integers(0, self.field.q, size=(count, self.dim), dtype=np.int64)
        return _matmul(self.field, coefs, self.array)

    def to_json(self) -> list[list[int]]:
        return [list(row) for row in self.basis]


def _check_compatible(u: Subspace, v: Subspace):
    if u.field != v.field:
        raise FieldMismatch(f"{u.field} vs {v.field}")
    if u.n != v.n:
        raise DimensionMismatch(f"ambient dimensions {u.n} and {v.n} differ")


def span(field: FieldSpec, n: int, vectors) -> Subspace:
    rows = [field.check(v).reshape(-1) for v in vectors]
    for v in rows:
        if v.shape[0] != n:
            raise DimensionMismatch(f"vector of length {v.shape[0]} in ambient dimension {n}")
    if not rows:
        return Subspace.zero(field, n)
    reduced, _ = rref(field, np.stack(rows))
    return Subspace(field, n, tuple(tuple(int(x) for x in row) for row in reduced))


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    _check_compatible(u, v)
    return span(u.field, u.n, list(u.basis) + list(v.basis))


def intersect(u: Subspace, v: Subspace) -> Subspace:
    """Zassenhaus: reduce [[U, U], [V, 0]]; rows with zero left half span U & V."""
    _check_compatible(u, v)
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(u.field, u.n)
    top = np.hstack([u.array, u.array])
    bottom = np.hstack([v.array, np.zeros_like(v.array)])
    reduced, _ = rref(u.field, np.vstack([top, bottom]))
    rows = [row[u.n:] for row in reduced if not row[: u.n].any()]
    return span(u.field, u.n, rows)


def subspaces_of(b: Subspace) -> list[Subspace]:
    """Every subspace of b, ordered by dimension then basis."""
    field, d, q = b.field, b.dim, b.field.q
    found = []
    for r in range(d + 1):
        for piv in itertools.combinations(range(d), r):
            free = [(i, j) for i, p in enumerate(piv) for j in range(p + 1, d) if j not in piv]
            for values in itertools.product(range(q), repeat=len(free)):
                coef = np.zeros((r, d), dtype=np.int64)
                for i, p in enumerate(piv):
                    coef[i, p] = 1
                for (i, j), val in zip(free, values):
                    coef[i, j] = val
                rows = _matmul(field, coef, b.array) if r else []
                found.append(span(field, b.n, list(rows)))
    return sorted(found, key=lambda s: (s.dim, s.basis))


# -------------------- Linear maps --------------------


@dataclass(frozen=True)
class LinearMap:
    """x -> M x for a (target x source) matrix M; vectors are rows on the API."""

    field: FieldSpec
    matrix: tuple[tuple[int, ...], ...]
    source_dim: int

    @classmethod
    def from_array(cls, field: FieldSpec, arr, source_dim: int) -> "LinearMap":
        arr = field.check(arr)
        if arr.ndim != 2:
            arr = arr.reshape(-1, source_dim)
        return cls(field, tuple(tuple(int(x) for x in row) for row in arr), source_dim)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "LinearMap":
        return cls(field, Subspace.full(field, n).basis, n)

    @property
    def target_dim(self) -> int:
        return len(self.matrix)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(self.target_dim, self.source_dim)

    def apply(self, vectors) -> np.ndarray:
        vecs = np.asarray(vectors, dtype=np.int64)
        single = vecs.ndim == 1
        vecs = vecs.reshape(1, -1) if single else vecs
        if vecs.shape[1] != self.source_dim:
            raise DimensionMismatch(f"map expects dimension {self.source_dim}, got {vecs.shape[1]}")
        out = _matmul(self.field, vecs, self.array.T)
        return out[0] if single else out

    def image(self, s: Subspace) -> Subspace:
        if s.n != self.source_dim:
            raise DimensionMismatch(f"map expects dimension {self.source_dim}, got {s.n}")
        if s.dim == 0:
            return Subspace.zero(self.field, self.target_dim)
        return span(self.field, self.target_dim, list(self.apply(s.array)))

    def kernel(self) -> Subspace:
        n = self.source_dim
        if self.target_dim == 0:
            return Subspace.full(self.field, n)
        reduced, pivots = rref(self.field, self.array)
        rows = []
        for j in (c for c in range(n) if c not in pivots):
            vec = np.zeros(n, dtype=np.int64)
            vec[j] = 1
            for r, p in enumerate(pivots):
                vec[p] = int(self.field.neg(reduced[r, j]))
            rows.append(vec)
        return span(self.field, n, rows)

    def is_injective_on(self, s: Subspace) -> bool:
        return self.image(s).dim == s.dim

    def compose(self, inner: "LinearMap") -> "LinearMap":
        """self after inner."""
        if inner.target_dim != self.source_dim:
            raise DimensionMismatch("maps do not compose")
        if inner.source_dim == 0 or self.target_dim == 0:
            arr = np.zeros((self.target_dim, inner.source_dim), dtype=np.int64)
        else:
            arr = _matmul(self.field, self.array, inner.array)
        return LinearMap.from_array(self.field, arr, inner.source_dim)


def quotient_map(field: FieldSpec, n: int, c: Subspace) -> LinearMap:
    """A full-rank map GF(q)^n -> GF(q)^(n - dim c) whose kernel is exactly c.

    Row j (one per non-pivot column of c's echelon basis) reads
    x_j - sum_r basis[r][j] * x_pivot(r). For c spanned by standard vectors
    this just drops the coordinates of c.
    """
    if c.n != n:
        raise DimensionMismatch(f"subspace lives in dimension {c.n}, not {n}")
    pivots = c.pivots
    rows = []
    for j in (col for col in range(n) if col not in pivots):
        row = np.zeros(n, dtype=np.int64)
        row[j] = 1
        for r, p in enumerate(pivots):
            row[p] = int(field.neg(c.basis[r][j]))
        rows.append(row)
    if not rows:
        return LinearMap(field, (), n)
    return LinearMap.from_array(field, np.stack(rows), n)
