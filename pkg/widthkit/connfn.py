"""
Connectivity functions, linear layouts and path-width.

A connectivity function is evaluated on bitmasks over its ground set;
values are memoized, so evaluators must be pure.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Hashable, Iterable, Iterator, Sequence

from widthkit import config
from widthkit.errors import (
    BudgetExceeded,
    InvalidLayout,
    InvalidProfile,
    TheoremViolation,
    UnknownLabel,
    WidthKitError,
)

logger = logging.getLogger(__name__)

Layout = tuple[Hashable, ...]

# -------------------- Types --------------------


class ConnectivityFunction:
    def __init__(self, ground: Sequence[Hashable], evaluate: Callable[[int], int], name: str = "f"):
        self.ground = tuple(ground)
        if len(set(self.ground)) != len(self.ground):
            raise WidthKitError(f"ground set of {name} has repeated labels")
        self.name = name
        self._index = {e: i for i, e in enumerate(self.ground)}
        self._evaluate = evaluate
        self._cache: dict[int, int] = {}

    def __repr__(self):
        return f"ConnectivityFunction({self.name}, |E|={self.n})"

    @property
    def n(self) -> int:
        return len(self.ground)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def mask(self, labels: Iterable[Hashable]) -> int:
        m = 0
        missing = []
        for e in labels:
            i = self._index.get(e)
            if i is None:
                missing.append(e)
            else:
                m |= 1 << i
        if missing:
            raise UnknownLabel(missing)
        return m

    def labels(self, mask: int) -> tuple[Hashable, ...]:
        return tuple(e for i, e in enumerate(self.ground) if mask >> i & 1)

    def value(self, mask: int) -> int:
        v = self._cache.get(mask)
        if v is None:
            v = int(self._evaluate(mask))
            self._cache[mask] = v
        return v

    def __call__(self, labels: Iterable[Hashable]) -> int:
        return self.value(self.mask(labels))


@dataclass(frozen=True)
class CutProfile:
    values: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def height(self) -> int:
        return max(self.values) - self.values[0]


@dataclass(frozen=True)
class RepeatedCuts:
    indices: tuple[int, ...]
    value: int


@dataclass(frozen=True)
class AxiomReport:
    normalized: bool
    symmetric: bool
    submodular: bool

    def __bool__(self):
        return self.normalized and self.symmetric and self.submodular


# -------------------- Layouts --------------------


def _layout_indices(f: ConnectivityFunction, sigma: Sequence[Hashable]) -> list[int]:
    try:
        idx = [f._index[e] for e in sigma]
    except KeyError as e:
        raise InvalidLayout(f"layout mentions {e.args[0]!r}, not in the ground set") from e
    if len(idx) != f.n or len(set(idx)) != f.n:
        raise InvalidLayout(f"layout of length {len(idx)} is not a permutation of {f.n} elements")
    return idx


def _prefix_masks(idx: list[int]) -> list[int]:
    masks = [0]
    for i in idx:
        masks.append(masks[-1] | 1 << i)
    return masks


def cut_profile(f: ConnectivityFunction, sigma: Sequence[Hashable]) -> CutProfile:
    masks = _prefix_masks(_layout_indices(f, sigma))
    return CutProfile(tuple(f.value(m) for m in masks))


def width(f: ConnectivityFunction, sigma: Sequence[Hashable]) -> int:
    values = cut_profile(f, sigma).values
    inner = values[1:-1]
    return max(inner) if inner else 0


def _check_budget(what: str, n: int, budget: int | None):
    limit = config.BUDGET_N if budget is None else budget
    if limit >= 0 and n > limit:
        raise BudgetExceeded(what, n, limit)


def path_width(f: ConnectivityFunction, budget: int | None = None) -> tuple[int, Layout]:
    """Minimum width and the lexicographically least layout attaining it.

    Depth-first over layouts in ground-set order, cutting any prefix whose
    running width already reaches the incumbent. A mask whose completions
    all failed under some bound is skipped under any later, smaller bound.
    Pass budget=-1 to lift the size check.
    """
    _check_budget("path_width", f.n, budget)
    n = f.n
    if n == 0:
        return 0, ()
    full = f.full_mask
    best_w = width(f, f.ground)
    best = list(range(n))
    failed: dict[int, int] = {}
    order: list[int] = []

    def dfs(mask: int, running: int):
        nonlocal best_w, best
        if mask == full:
            best_w, best = running, list(order)
            return
        if failed.get(mask, -1) >= best_w:
            return
        bound = best_w
        for i in range(n):
            bit = 1 << i
            if mask & bit:
                continue
            nxt = mask | bit
            cut = 0 if nxt == full else f.value(nxt)
            if max(running, cut) >= best_w:
                continue
            order.append(i)
            dfs(nxt, max(running, cut))
            order.pop()
        if best_w == bound:
            failed[mask] = max(failed.get(mask, -1), bound)

    dfs(0, 0)
    layout = tuple(f.ground[i] for i in best)
    logger.debug(f"path_width({f.name}) = {best_w} via {layout}")
    return best_w, layout


def iter_layouts(f: ConnectivityFunction, max_width: int) -> Iterator[Layout]:
    """Every layout of width <= max_width, in lexicographic order."""
    n = f.n
    if n == 0:
        yield ()
        return
    full = f.full_mask
    dead: set[int] = set()
    order: list[int] = []

    def walk(mask: int) -> Iterator[Layout]:
        if mask == full:
            yield tuple(f.ground[i] for i in order)
            return
        if mask in dead:
            return
        produced = False
        for i in range(n):
            bit = 1 << i
            if mask & bit:
                continue
            nxt = mask | bit
            if nxt != full and f.value(nxt) > max_width:
                continue
            order.append(i)
            for layout in walk(nxt):
                produced = True
                yield layout
            order.pop()
        if not produced:
            dead.add(mask)

    yield from walk(0)


# -------------------- Linked layouts --------------------


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def linkage_defect(f: ConnectivityFunction, sigma: Sequence[Hashable]) -> tuple[int, int] | None:
    """First window (i, j) whose inner minimum beats every prefix cut in it."""
    masks = _prefix_masks(_layout_indices(f, sigma))
    a = [f.value(m) for m in masks]
    n = len(a) - 1
    for i in range(n + 1):
        running = a[i]
        for j in range(i + 1, n + 1):
            running = min(running, a[j])
            if running == 0:
                continue
            window = masks[j] & ~masks[i]
            inner = min(f.value(masks[i] | s) for s in _submasks(window))
            if inner != running:
                return i, j
    return None


def is_linked(f: ConnectivityFunction, sigma: Sequence[Hashable]) -> bool:
    return linkage_defect(f, sigma) is None


def find_linked_optimal(f: ConnectivityFunction, budget: int | None = None) -> Layout:
    """Lexicographically first layout that is both optimal and linked."""
    pw, _ = path_width(f, budget)
    for layout in iter_layouts(f, pw):
        if is_linked(f, layout):
            return layout
    raise TheoremViolation(f"{f.name} has path-width {pw} but no linked layout of that width")


# -------------------- Repeated cuts --------------------


def repeated_cuts_threshold(ell: int, height: int) -> Fraction:
    """Length from which a profile of the given height must repeat a cut ell times."""
    if ell < 4:
        raise InvalidProfile(f"the length threshold needs ell >= 4, got {ell}")
    c = Fraction(2 * (ell - 2), ell - 3)
    return (ell - 1 + c) * (ell - 2) ** height - c


def _admissible(values: Sequence[int]) -> bool:
    base = values[0]
    if values[-1] != base or any(v < base for v in values):
        return False
    return all(abs(x - y) <= 1 for x, y in zip(values, values[1:]))


def find_repeated_cuts(profile: CutProfile | Sequence[int], ell: int) -> RepeatedCuts | None:
    """ell positions of equal value w with nothing below w between them.

    Tries the base level first, then the stretches strictly above it,
    longest first (earliest on ties); every stretch is eventually tried,
    so a witness is returned whenever one exists.
    """
    values = tuple(profile.values if isinstance(profile, CutProfile) else profile)
    if ell < 2:
        raise InvalidProfile(f"need ell >= 2, got {ell}")
    if not values or not _admissible(values):
        raise InvalidProfile("profile must stay at or above its equal endpoints and move by at most 1")

    def search(lo: int, hi: int) -> RepeatedCuts | None:
        base = values[lo]
        at_base = [i for i in range(lo, hi + 1) if values[i] == base]
        if len(at_base) >= ell:
            return RepeatedCuts(tuple(at_base[:ell]), base)
        stretches = [
            (p + 1, q - 1)
            for p, q in zip(at_base, at_base[1:])
            if q - p > 1
        ]
        stretches.sort(key=lambda s: (-(s[1] - s[0]), s[0]))
        for start, end in stretches:
            found = search(start, end)
            if found is not None:
                return found
        return None

    return search(0, len(values) - 1)


def brute_force_repeated_cuts(values: Sequence[int], ell: int) -> bool:
    """Whether any witness exists, by trying all ell-tuples of indices."""
    for idx in combinations(range(len(values)), ell):
        w = values[idx[0]]
        if all(values[i] == w for i in idx) and min(values[idx[0]: idx[-1] + 1]) >= w:
            return True
    return False


# -------------------- Checks --------------------


def check_unit_step(f: ConnectivityFunction) -> bool:
    for mask in range(f.full_mask + 1):
        v = f.value(mask)
        for i in range(f.n):
            if mask >> i & 1 and abs(v - f.value(mask & ~(1 << i))) > 1:
                return False
    return True


def check_axioms(f: ConnectivityFunction) -> AxiomReport:
    full = f.full_mask
    normalized = f.value(0) == 0
    symmetric = all(f.value(m) == f.value(full & ~m) for m in range(full + 1))
    submodular = all(
        f.value(x) + f.value(y) >= f.value(x | y) + f.value(x & y)
        for x in range(full + 1)
        for y in range(x + 1, full + 1)
    )
    return AxiomReport(normalized, symmetric, submodular)
