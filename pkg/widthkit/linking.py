"""
Tutte's linking theorem on configurations, with exact witnesses and the
four strong-linking checks.
"""

import itertools
import logging
from typing import Iterable, Sequence

import numpy as np
from pydantic import BaseModel

from widthkit import config
from widthkit.checks import Verdict
from widthkit.errors import BudgetExceeded, TheoremViolation, WidthKitError
from widthkit.ffla import Subspace
from widthkit.matroid import (
    Configuration,
    MinorSpec,
    boundary,
    connectivity,
    is_coindependent,
    minor,
)

logger = logging.getLogger(__name__)

# -------------------- Records --------------------


class LinkingCertificate(BaseModel):
    k: int
    argmin: list[str]
    contract: list[str]
    delete: list[str]
    checks: dict[str, bool] = {}


class StrongLinkingReport(BaseModel):
    status: Verdict
    checks: dict[str, bool] = {}
    exhaustive: bool = True
    reason: str = ""

    def __bool__(self):
        return self.status is not Verdict.VIOLATED


# -------------------- Helpers --------------------


def _free_labels(a: Configuration, s: set[str], t: set[str]) -> list[str]:
    if s & t:
        raise WidthKitError(f"S and T share {sorted(s & t)}")
    a.mask(s | t)
    return [l for l in a.labels if l not in s and l not in t]


def _subsets_in_order(items: Sequence[str]) -> list[tuple[str, ...]]:
    """All subsets, ordered by their sorted index tuples."""
    subsets = []
    for r in range(len(items) + 1):
        subsets.extend(itertools.combinations(range(len(items)), r))
    subsets.sort()
    return [tuple(items[i] for i in idx) for idx in subsets]


def _check_budget(free: Sequence[str], budget: int | None):
    limit = config.BUDGET_N if budget is None else budget
    if limit >= 0 and len(free) > limit:
        raise BudgetExceeded("linking search", len(free), limit)


# -------------------- Linking --------------------


def min_connectivity(a: Configuration, s: Iterable[str], t: Iterable[str],
                     budget: int | None = None) -> tuple[int, tuple[str, ...]]:
    """min lambda(X) over S <= X <= E - T, with the first minimizer in subset order."""
    s, t = set(s), set(t)
    free = _free_labels(a, s, t)
    _check_budget(free, budget)
    best: tuple[int, tuple[str, ...]] | None = None
    for extra in _subsets_in_order(free):
        x = s | set(extra)
        value = connectivity(a, x)
        if best is None or value < best[0]:
            best = (value, tuple(l for l in a.labels if l in x))
    return best


def linking_minor(a: Configuration, s: Iterable[str], t: Iterable[str],
                  budget: int | None = None) -> MinorSpec:
    """(C, D) with D coindependent and lambda of S in M / C \\ D equal to the minimum."""
    s, t = set(s), set(t)
    k, _ = min_connectivity(a, s, t, budget)
    free = _free_labels(a, s, t)
    for contracted in _subsets_in_order(free):
        c = frozenset(contracted)
        d = frozenset(free) - c
        if not is_coindependent(a, d):
            continue
        n = minor(a, MinorSpec(c, d))
        if connectivity(n, s) == k:
            logger.debug(f"linking minor: C={sorted(c)}, D={sorted(d)}, k={k}")
            return MinorSpec(c, d)
    raise TheoremViolation(f"no linking minor for S={sorted(s)}, T={sorted(t)} reaching {k}")


def linking_certificate(a: Configuration, s: Iterable[str], t: Iterable[str],
                        budget: int | None = None) -> LinkingCertificate:
    s, t = set(s), set(t)
    k, argmin = min_connectivity(a, s, t, budget)
    spec = linking_minor(a, s, t, budget)
    report = strong_linking_check(a, s, t, spec.contract, spec.delete, argmin, argmin)
    return LinkingCertificate(
        k=k,
        argmin=list(argmin),
        contract=[l for l in a.labels if l in spec.contract],
        delete=[l for l in a.labels if l in spec.delete],
        checks=report.checks,
    )


# -------------------- Strong linking checks --------------------


def _elements(space: Subspace, rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    if space.n <= config.SPAN_EXHAUST_DIM:
        return space.vectors(), True
    return space.sample(rng, config.SPAN_SAMPLES), False


def run_strong_linking_checks(a: Configuration, c: set[str], z: set[str], z2: set[str],
                              rng: np.random.Generator | None = None) -> StrongLinkingReport:
    """Checks (i)-(iv) for Z, Z' against <C>, assuming the hypotheses were verified.

    For (i) and (ii) the differences x - y of a subspace range over the
    subspace itself, so each element is tested once.
    """
    rng = rng if rng is not None else np.random.default_rng(config.SEED)
    everything = set(a.labels)
    ordered = lambda labels: [l for l in a.labels if l in labels]
    c_span = a.span(ordered(c))
    exhaustive = True

    def equivalent(space: Subspace, smaller: Subspace) -> bool:
        nonlocal exhaustive
        vectors, full = _elements(space, rng)
        exhaustive &= full
        return all(c_span.contains(w) == smaller.contains(w) for w in vectors)

    check_i = equivalent(a.span(ordered(z)), a.span(ordered(c & z)))
    check_ii = equivalent(a.span(ordered(everything - z)), a.span(ordered(c - z)))

    bz = boundary(a, z)
    vectors, full = _elements(bz, rng)
    exhaustive &= full
    check_iii = all(c_span.contains(w) == (not w.any()) for w in vectors)

    sym = a.span(ordered(c & (z ^ z2)))
    bz2 = boundary(a, z2)
    candidates = bz.vectors()
    xs, full = _elements(bz2, rng)
    exhaustive &= full
    check_iv = True
    for x in xs:
        diffs = [a.field.sub(x, y) for y in candidates]
        hits = [d for d in diffs if c_span.contains(d)]
        if len(hits) != 1 or not sym.contains(hits[0]):
            check_iv = False
            break

    checks = {"i": check_i, "ii": check_ii, "iii": check_iii, "iv": check_iv}
    status = Verdict.of(all(checks.values()))
    if status is Verdict.VIOLATED:
        logger.error(f"strong linking failed for Z={sorted(z)}, Z'={sorted(z2)}: {checks}")
    return StrongLinkingReport(status=status, checks=checks, exhaustive=exhaustive)


def strong_linking_check(a: Configuration, s: Iterable[str], t: Iterable[str],
                         c: Iterable[str], d: Iterable[str], z: Iterable[str], z2: Iterable[str],
                         rng: np.random.Generator | None = None) -> StrongLinkingReport:
    s, t, c, d, z, z2 = (set(x) for x in (s, t, c, d, z, z2))
    everything = set(a.labels)
    a.mask(s | t | c | d | z | z2)

    def inapplicable(reason: str) -> StrongLinkingReport:
        return StrongLinkingReport(status=Verdict.INAPPLICABLE, reason=reason)

    if s & t:
        return inapplicable("S and T intersect")
    if c & d or c | d != everything - (s | t):
        return inapplicable("C and D do not partition E - (S u T)")
    if not is_coindependent(a, d):
        return inapplicable("D is not coindependent")
    k, _ = min_connectivity(a, s, t)
    if connectivity(minor(a, MinorSpec(frozenset(c), frozenset(d))), s) != k:
        return inapplicable("the minor does not reach the minimum connectivity")
    for zz in (z, z2):
        if not (s <= zz and not zz & t):
            return inapplicable("Z must contain S and avoid T")
        if connectivity(a, zz) != k:
            return inapplicable("Z does not attain the minimum connectivity")
    return run_strong_linking_checks(a, c, z, z2, rng)
