"""
Excluded minors / pivot-minors, certificate search, and step-by-step
re-enactments of the finiteness arguments on concrete instances.
"""

import hashlib
import itertools
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel
from tqdm import tqdm

from widthkit import config, connfn
from widthkit.checks import Verdict
from widthkit.errors import BudgetExceeded, WidthKitError
from widthkit.ffla import FieldSpec, Subspace, quotient_map
from widthkit.fullset import check_key, from_configuration, full_set, map_full_set
from widthkit.fullset import path_width as arrangement_path_width
from widthkit.graph import (
    Graph,
    arrangement_of,
    canonical_form,
    cut_rank,
    cut_rank_function,
    enumerate_graphs,
    graph_linking_minor,
    is_pivot_minor,
    linear_rank_width,
    pivot_paths,
    strong_linking_graph_check,
    vertex_labels,
)
from widthkit.linking import linking_minor, min_connectivity, strong_linking_check
from widthkit.matroid import (
    GF2,
    Configuration,
    MinorSpec,
    binary_matroids,
    boundary,
    canonical_fingerprint,
    connectivity_function,
    contract,
    delete,
    invariant_key,
    is_coindependent,
    minor,
    path_width,
)
from widthkit.trajectory import compact_count_bound

logger = logging.getLogger(__name__)

Kind = Literal["matroid", "graph"]

# -------------------- Certificates --------------------


class ChildWitness(BaseModel):
    operation: str
    canonical: str
    width: int
    layout: list[str]


class ObstructionCertificate(BaseModel):
    kind: Kind
    k: int
    canonical: str
    size: int
    encoding: dict
    width: int
    layout: list[str]
    transcript: str
    children: list[ChildWitness]

    @property
    def ident(self) -> str:
        return hashlib.sha256(self.canonical.encode()).hexdigest()[:16]


def encode_configuration(a: Configuration) -> dict:
    return {
        "field": [a.field.p, a.field.m],
        "dim": a.dim,
        "labels": list(a.labels),
        "vectors": [list(v) for v in a.vectors],
    }


def decode_configuration(data: dict) -> Configuration:
    p, m = data["field"]
    return Configuration.from_vectors(FieldSpec(p, m), data["dim"], zip(data["labels"], data["vectors"]))


def encode_graph(g: Graph) -> dict:
    return {"graph6": g.to_graph6(), "n": g.n, "edges": [list(e) for e in g.edges()]}


def decode_graph(data: dict) -> Graph:
    return Graph.from_edges(data["n"], (tuple(e) for e in data["edges"]))


def _transcript(canonical: str, width: int, layout: list[str], children: list[ChildWitness]) -> str:
    payload = {
        "canonical": canonical,
        "width": width,
        "layout": layout,
        "children": [c.model_dump() for c in children],
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def is_excluded_minor_pw(a: Configuration, k: int, budget: int | None = None) -> ObstructionCertificate | None:
    """pw(a) > k while every single deletion and contraction has pw <= k."""
    width, layout = path_width(a, budget)
    if width <= k:
        return None
    children = []
    for label in a.labels:
        for name, op in (("delete", delete), ("contract", contract)):
            child = op(a, label)
            w, lay = path_width(child, budget)
            if w > k:
                return None
            children.append(ChildWitness(
                operation=f"{name} {label}", canonical=canonical_fingerprint(child), width=w, layout=list(lay)
            ))
    canonical = canonical_fingerprint(a)
    return ObstructionCertificate(
        kind="matroid", k=k, canonical=canonical, size=a.size, encoding=encode_configuration(a),
        width=width, layout=list(layout),
        transcript=_transcript(canonical, width, list(layout), children), children=children,
    )


def is_excluded_pivotminor_lrw(g: Graph, k: int, budget: int | None = None) -> ObstructionCertificate | None:
    """lrw(g) > k while deleting any vertex of any pivot-equivalent graph leaves lrw <= k."""
    width, layout = linear_rank_width(g, budget)
    if width <= k:
        return None
    children = []
    seen: set[str] = set()
    for member, path in pivot_paths(g, budget).items():
        for v in range(g.n):
            child = member.delete([v])
            key = canonical_form(child)
            if key in seen:
                continue
            seen.add(key)
            w, lay = linear_rank_width(child, budget)
            if w > k:
                return None
            pivots = ",".join(f"{x}-{y}" for x, y in path) or "none"
            children.append(ChildWitness(
                operation=f"pivots {pivots}; delete {v}", canonical=key, width=w, layout=[str(u) for u in lay]
            ))
    canonical = canonical_form(g)
    lay = [str(v) for v in layout]
    return ObstructionCertificate(
        kind="graph", k=k, canonical=canonical, size=g.n, encoding=encode_graph(g),
        width=width, layout=lay, transcript=_transcript(canonical, width, lay, children), children=children,
    )


def _certify(kind: Kind, candidate, k: int, settings: dict[str, int] | None = None) -> ObstructionCertificate | None:
    if settings is not None:
        config.restore(settings)
    if kind == "graph":
        return is_excluded_pivotminor_lrw(candidate, k)
    return is_excluded_minor_pw(candidate, k)


# -------------------- Search --------------------


def candidates(kind: Kind, max_size: int, field: FieldSpec = GF2, max_rank: int | None = None) -> list:
    if kind == "graph":
        return list(enumerate_graphs(max_size))
    if field != GF2:
        raise WidthKitError(f"matroid search enumerates binary matroids only, not {field}")
    return list(binary_matroids(max_size, max_rank if max_rank is not None else max(max_size, 1)))


def search_obstructions(kind: Kind, k: int, max_size: int, field: FieldSpec = GF2,
                        workers: int | None = None, seed: int | None = None, shuffle: bool = False,
                        max_rank: int | None = None, progress: bool = False) -> list[ObstructionCertificate]:
    """Every obstruction of the kind up to max_size, sorted by (size, canonical form).

    The result does not depend on worker count or on the candidate order.
    """
    pool = candidates(kind, max_size, field, max_rank)
    if shuffle:
        rng = np.random.default_rng(config.SEED if seed is None else seed)
        pool = [pool[i] for i in rng.permutation(len(pool))]
    workers = config.WORKERS if workers is None else workers
    logger.info(f"Checking {len(pool)} {kind} candidates for k={k} with {workers} worker(s)")
    settings = config.snapshot()
    results = Parallel(n_jobs=workers)(
        delayed(_certify)(kind, c, k, settings) for c in tqdm(pool, desc=f"{kind} k={k}", disable=not progress)
    )
    found = {}
    for cert in results:
        if cert is None:
            continue
        held = found.get(cert.canonical)
        if held is None or cert.model_dump_json() < held.model_dump_json():
            found[cert.canonical] = cert
    certs = sorted(found.values(), key=lambda c: (c.size, c.canonical))
    logger.info(f"✅ {len(certs)} obstruction(s) for {kind} width <= {k}")
    return certs


def revalidate(cert: ObstructionCertificate) -> bool:
    """Recompute the certificate from its encoding and compare."""
    if cert.kind == "graph":
        fresh = is_excluded_pivotminor_lrw(decode_graph(cert.encoding), cert.k, budget=-1)
    else:
        fresh = is_excluded_minor_pw(decode_configuration(cert.encoding), cert.k, budget=-1)
    if fresh is None:
        logger.error(f"❌ {cert.ident} is no longer an obstruction")
        return False
    return fresh == cert


def is_matroid_minor(small: Configuration, big: Configuration) -> bool:
    """Whether some M / C \\ D of big is isomorphic to small."""
    drop = big.size - small.size
    if drop < 0:
        return False
    target = invariant_key(small)
    fingerprint = None
    for removed in itertools.combinations(big.labels, drop):
        for r in range(drop + 1):
            for contracted in itertools.combinations(removed, r):
                c = frozenset(contracted)
                n = minor(big, MinorSpec(c, frozenset(removed) - c))
                if invariant_key(n) != target:
                    continue
                if fingerprint is None:
                    fingerprint = canonical_fingerprint(small)
                if canonical_fingerprint(n) == fingerprint:
                    return True
    return False


def check_antichain(certs: Iterable[ObstructionCertificate]) -> bool:
    """No certificate is a proper minor (pivot-minor) of another."""
    certs = list(certs)
    for small, big in itertools.permutations(certs, 2):
        if small.size >= big.size:
            continue
        if small.kind == "graph":
            contained = is_pivot_minor(decode_graph(small.encoding), decode_graph(big.encoding), proper=True)
        else:
            contained = is_matroid_minor(decode_configuration(small.encoding), decode_configuration(big.encoding))
        if contained:
            logger.error(f"❌ {small.canonical} sits inside {big.canonical}")
            return False
    return True


def write_certificate_db(certs: Iterable[ObstructionCertificate], directory: str | Path,
                         manifest: dict | None = None) -> list[Path]:
    """One JSON file per certificate plus summary.tsv, both with stable ordering."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    certs = sorted(certs, key=lambda c: (c.size, c.canonical))
    paths = []
    for cert in certs:
        path = out / f"{cert.ident}.json"
        path.write_text(json.dumps(cert.model_dump(mode="json"), indent=2, sort_keys=True) + "\n")
        paths.append(path)
    rows = ["id\tkind\tk\tsize\twidth\tcanonical"]
    rows += [f"{c.ident}\t{c.kind}\t{c.k}\t{c.size}\t{c.width}\t{c.canonical}" for c in certs]
    (out / "summary.tsv").write_text("\n".join(rows) + "\n")
    if manifest is not None:
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    logger.info(f"Wrote {len(paths)} certificate(s) to {out}")
    return paths


# -------------------- Bounds --------------------

# widest exponent turned into an exact integer
MATERIALIZE_LIMIT = 1 << 24


@dataclass(frozen=True)
class BoundConstants:
    """ell = 2^exponent + 1 for both settings; size thresholds come from repeated_cuts_threshold."""

    k: int
    q: int
    matroid_exponent: int
    graph_exponent: int

    @staticmethod
    def _materialize(exponent: int) -> int | None:
        return 2 ** exponent + 1 if exponent <= MATERIALIZE_LIMIT else None

    @property
    def ell_matroid(self) -> int | None:
        return self._materialize(self.matroid_exponent)

    @property
    def ell_graph(self) -> int | None:
        return self._materialize(self.graph_exponent)

    def size_threshold(self, kind: Kind) -> int | None:
        """Elements (vertices) beyond which a profile of height k + 1 must repeat ell cuts."""
        exponent = self.matroid_exponent if kind == "matroid" else self.graph_exponent
        height = self.k + 1
        if exponent * height > MATERIALIZE_LIMIT:
            return None
        return math.ceil(connfn.repeated_cuts_threshold(2 ** exponent + 1, height))

    def describe(self) -> dict[str, str]:
        def digits(exponent: int) -> int:
            return exponent * 30103 // 100000 + 1

        return {
            "ell_matroid": f"2^{self.matroid_exponent} + 1 ({digits(self.matroid_exponent)} digits)",
            "ell_graph": f"2^{self.graph_exponent} + 1 ({digits(self.graph_exponent)} digits)",
            "matroid_exponent": str(self.matroid_exponent),
            "graph_exponent": str(self.graph_exponent),
        }


def bound_constants(k: int, q: int) -> BoundConstants:
    if k < 0 or q < 2:
        raise WidthKitError(f"need k >= 0 and q >= 2, got k={k}, q={q}")
    matroid_exponent = 2 ** (9 * k + 11) * q ** (k * (k + 1)) * 2 ** (2 * (2 * k + 3) * k)
    graph_exponent = 2 ** (18 * (k + 1) + 2 + (2 * k + 2) * (2 * k + 1) + 2 * (4 * k + 3) * 2 * k)
    return BoundConstants(k, q, matroid_exponent, graph_exponent)


def compact_count_table(k: int, q: int) -> dict[int, int]:
    """Upper bound on |U_k(B)| for every dim B = theta <= k + 1."""
    return {theta: compact_count_bound(theta, k, q) for theta in range(k + 2)}


# -------------------- Re-enactments --------------------


class PipelineStep(BaseModel):
    name: str
    ok: bool
    detail: str = ""


class PipelineReport(BaseModel):
    kind: Kind
    k: int
    ell: int
    status: Literal["completed", "vacuous", "failed"] = "completed"
    layout: list[str] = []
    profile: list[int] = []
    indices: list[int] = []
    theta: int | None = None
    pair: list[int] = []
    removed: list[str] = []
    contract: list[str] = []
    delete: list[str] = []
    width_before: int | None = None
    width_after: int | None = None
    verdict: Verdict | None = None
    steps: list[PipelineStep] = []


class _StepFailed(Exception):
    pass


class _Transcript:
    def __init__(self, report: PipelineReport):
        self.report = report

    def step(self, name: str, ok: bool, detail: str = ""):
        self.report.steps.append(PipelineStep(name=name, ok=bool(ok), detail=detail))
        if not ok:
            logger.error(f"❌ {self.report.kind} pipeline: {name} failed {detail}")
            raise _StepFailed(name)
        logger.debug(f"{self.report.kind} pipeline: {name} {detail}")

    def stop(self, name: str, detail: str):
        self.report.steps.append(PipelineStep(name=name, ok=True, detail=detail))
        self.report.status = "vacuous"
        logger.info(f"{self.report.kind} pipeline stops at {name}: {detail}")


def _first_equal_pair(values: list) -> tuple[int, int] | None:
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] == values[j]:
                return i, j
    return None


def reenact_main_pipeline(a: Configuration, k: int, ell: int = 4,
                          rng: np.random.Generator | None = None) -> PipelineReport:
    """Shrink a configuration along repeated cuts of a linked optimal layout.

    Every intermediate claim is checked; the run stops as vacuous when the
    instance has no ell repeated cuts or no two full sets coincide.
    """
    report = PipelineReport(kind="matroid", k=k, ell=ell)
    log = _Transcript(report)
    ordered = lambda labels: [l for l in a.labels if l in labels]
    try:
        f = connectivity_function(a)
        sigma = connfn.find_linked_optimal(f)
        profile = connfn.cut_profile(f, sigma)
        report.layout = list(sigma)
        report.profile = list(profile.values)
        report.width_before = connfn.width(f, sigma)
        log.step("linked optimal layout", connfn.is_linked(f, sigma), f"width {report.width_before}")

        cuts = connfn.find_repeated_cuts(profile, ell)
        if cuts is None:
            log.stop("repeated cuts", f"no {ell} repeated cuts in {list(profile.values)}")
            return report
        theta = cuts.value
        report.indices, report.theta = list(cuts.indices), theta
        prefix = [set(sigma[:i]) for i in cuts.indices]
        everything = set(a.labels)
        s, t = prefix[0], everything - prefix[-1]

        least, _ = min_connectivity(a, s, t)
        log.step("prefix cuts are minimum cuts", least == theta, f"min = {least}, theta = {theta}")
        spec = linking_minor(a, s, t)
        c, d = spec.contract, spec.delete
        log.step("D is coindependent", is_coindependent(a, d), f"C={ordered(c)}, D={ordered(d)}")

        pi = quotient_map(a.field, a.dim, a.span(ordered(c)))
        bounds = [boundary(a, x) for x in prefix]
        images = [pi.image(b) for b in bounds]
        log.step("pi is injective on every boundary", all(pi.is_injective_on(b) for b in bounds))
        log.step("pi maps every boundary to one B", all(img == images[0] for img in images), f"dim B = {images[0].dim}")
        for x, y in zip(prefix, prefix[1:]):
            rep = strong_linking_check(a, s, t, c, d, x, y, rng)
            log.step(f"strong linking |Z|={len(x)}, |Z'|={len(y)}", rep.status is Verdict.HELD, str(rep.checks))

        arr = from_configuration(a)
        sets = [map_full_set(pi, full_set(arr.restrict(x), b, k)) for x, b in zip(prefix, bounds)]
        pair = _first_equal_pair(sets)
        if pair is None:
            log.stop("matching full sets", f"all {ell} full sets differ")
            return report
        i, j = pair
        report.pair = [i, j]
        window = prefix[j] - prefix[i]
        c2, d2 = c & window, d & window
        report.removed = ordered(window)
        report.contract, report.delete = ordered(c2), ordered(d2)
        log.step("window lies in C u D", window <= c | d)

        phi = quotient_map(a.field, a.dim, a.span(ordered(c2)))
        b2 = phi.image(bounds[i])
        log.step("phi keeps B", b2.dim == theta and phi.image(bounds[j]) == b2, f"dim B' = {b2.dim}")
        left_i = full_set(arr.restrict(prefix[i]), bounds[i], k)
        left_j = full_set(arr.restrict(prefix[j]), bounds[j], k)
        log.step("phi identifies the two full sets", map_full_set(phi, left_i) == map_full_set(phi, left_j))
        outer = everything - prefix[j]
        log.step(
            "phi is injective on both kept sides",
            phi.is_injective_on(a.span(ordered(prefix[i]))) and phi.is_injective_on(a.span(ordered(outer))),
        )

        n = minor(a, MinorSpec(c2, d2))
        v2 = from_configuration(n)
        log.step("B' is the boundary in the minor", v2.boundary(prefix[i]) == b2)
        right = full_set(arr.restrict(outer), bounds[j], k)
        log.step(
            "full sets carry over to the minor",
            full_set(v2.restrict(prefix[i]), b2, k) == map_full_set(phi, left_j)
            and full_set(v2.restrict(outer), b2, k) == map_full_set(phi, right),
        )
        verdict = check_key(arr, v2, (prefix[j], prefix[i]), phi, k)
        report.verdict = verdict
        report.width_after = arrangement_path_width(v2)[0]
        log.step("path-width <= k agrees on both", verdict is Verdict.HELD,
                 f"pw {report.width_before} -> {report.width_after}, verdict {verdict.value}")
    except _StepFailed:
        report.status = "failed"
    except BudgetExceeded:
        raise
    except WidthKitError as e:
        report.steps.append(PipelineStep(name="error", ok=False, detail=str(e)))
        report.status = "failed"
        logger.error(f"❌ matroid pipeline: {e}")
    return report


def reenact_graph_pipeline(g: Graph, k: int, ell: int = 4,
                           rng: np.random.Generator | None = None) -> PipelineReport:
    """Shrink a graph along repeated cuts of a linked optimal vertex order."""
    report = PipelineReport(kind="graph", k=k, ell=ell)
    log = _Transcript(report)
    try:
        n = g.n
        f = cut_rank_function(g)
        sigma = connfn.find_linked_optimal(f)
        report.layout = [str(v) for v in sigma]
        report.width_before = connfn.width(f, sigma)
        perm = [0] * n
        for pos, v in enumerate(sigma):
            perm[v] = pos
        g = g.relabel(perm)
        profile = connfn.cut_profile(cut_rank_function(g), range(n))
        report.profile = list(profile.values)
        log.step("linked optimal order", connfn.is_linked(cut_rank_function(g), range(n)), f"width {report.width_before}")

        cuts = connfn.find_repeated_cuts(profile, ell)
        if cuts is None:
            log.stop("repeated cuts", f"no {ell} repeated cuts in {list(profile.values)}")
            return report
        theta = cuts.value
        report.indices, report.theta = list(cuts.indices), theta
        prefix = [list(range(i)) for i in cuts.indices]
        s, t = prefix[0], list(range(cuts.indices[-1], n))

        link = graph_linking_minor(g, s, t)
        log.step("a pivot-minor on S u T links S to T", link.k == theta, f"{len(link.pivots)} pivot(s)")
        g0 = link.member
        log.step("pivots keep every prefix cut", all(cut_rank(g0, x) == cut_rank(g, x) for x in prefix))

        arr = arrangement_of(g0)
        log.step("arrangement width is twice rank-width",
                 arrangement_path_width(arr)[0] == 2 * linear_rank_width(g0)[0])
        bounds = [arr.boundary(vertex_labels(x)) for x in prefix]
        log.step("boundaries have dimension 2 theta", all(b.dim == 2 * theta for b in bounds))
        middle = range(cuts.indices[0], cuts.indices[-1])
        pi = quotient_map(GF2, n, Subspace.standard(GF2, n, middle))
        images = [pi.image(b) for b in bounds]
        log.step("pi is injective on every boundary", all(pi.is_injective_on(b) for b in bounds))
        log.step("pi maps every boundary to one B", all(img == images[0] for img in images))
        for x, y in zip(prefix, prefix[1:]):
            rep = strong_linking_graph_check(g0, s, t, x, y, rng)
            log.step(f"strong linking |Z|={len(x)}, |Z'|={len(y)}", rep.status is Verdict.HELD, str(rep.checks))

        sets = [map_full_set(pi, full_set(arr.restrict(vertex_labels(x)), b, 2 * k)) for x, b in zip(prefix, bounds)]
        pair = _first_equal_pair(sets)
        if pair is None:
            log.stop("matching full sets", f"all {ell} full sets differ")
            return report
        i, j = pair
        report.pair = [i, j]
        window = list(range(cuts.indices[i], cuts.indices[j]))
        report.removed = [str(sigma[v]) for v in window]

        phi = quotient_map(GF2, n, Subspace.standard(GF2, n, window))
        b2 = phi.image(bounds[i])
        log.step("phi keeps B", b2.dim == 2 * theta and phi.image(bounds[j]) == b2)
        first_i, first_j = vertex_labels(prefix[i]), vertex_labels(prefix[j])
        outer = vertex_labels(range(cuts.indices[j], n))
        left_j = full_set(arr.restrict(first_j), bounds[j], 2 * k)
        log.step("phi identifies the two full sets",
                 map_full_set(phi, full_set(arr.restrict(first_i), bounds[i], 2 * k)) == map_full_set(phi, left_j))
        log.step("phi is injective on both kept sides",
                 phi.is_injective_on(arr.restrict(first_i).span()) and phi.is_injective_on(arr.restrict(outer).span()))

        h = g0.delete(window)
        v2 = arr.restrict(first_i + outer).image(phi)
        log.step("B' is the boundary after deletion", v2.boundary(first_i) == b2)
        right = full_set(arr.restrict(outer), bounds[j], 2 * k)
        log.step(
            "full sets carry over to the smaller graph",
            full_set(v2.restrict(first_i), b2, 2 * k) == map_full_set(phi, left_j)
            and full_set(v2.restrict(outer), b2, 2 * k) == map_full_set(phi, right),
        )
        verdict = check_key(arr, v2, (first_j, first_i), phi, 2 * k)
        report.verdict = verdict
        report.width_after = linear_rank_width(h)[0]
        log.step("image arrangement is the smaller graph's",
                 arrangement_path_width(v2)[0] == 2 * report.width_after)
        log.step("rank-width <= k agrees on both", verdict is Verdict.HELD,
                 f"lrw {report.width_before} -> {report.width_after}, verdict {verdict.value}")
    except _StepFailed:
        report.status = "failed"
    except BudgetExceeded:
        raise
    except WidthKitError as e:
        report.steps.append(PipelineStep(name="error", ok=False, detail=str(e)))
        report.status = "failed"
        logger.error(f"❌ graph pipeline: {e}")
    return report
