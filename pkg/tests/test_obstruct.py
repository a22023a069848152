import pytest

from conftest import path_graph
from widthkit import config
from widthkit.checks import Verdict
from widthkit.errors import BudgetExceeded, InputFormatError, WidthKitError
from widthkit.graph import Graph, is_pivot_minor
from widthkit.matroid import GF2, Configuration, binary_matroids
from widthkit.obstruct import (
    bound_constants,
    check_antichain,
    compact_count_table,
    decode_configuration,
    decode_graph,
    encode_configuration,
    encode_graph,
    is_excluded_minor_pw,
    is_excluded_pivotminor_lrw,
    is_matroid_minor,
    reenact_graph_pipeline,
    reenact_main_pipeline,
    revalidate,
    search_obstructions,
    write_certificate_db,
)

K2 = Graph.from_edges(2, [(0, 1)])
C5 = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])


# -------------------- Single candidates --------------------


def test_free_matroid_is_not_an_obstruction():
    coloops = Configuration.from_columns(GF2, [[1, 0], [0, 1]])
    assert is_excluded_minor_pw(coloops, 0) is None


def test_u24_is_excluded_for_width_one(u24):
    cert = is_excluded_minor_pw(u24, 1)
    assert cert is not None
    assert cert.width == 2
    assert len(cert.children) == 8
    assert all(child.width <= 1 for child in cert.children)
    assert revalidate(cert)


def test_u24_is_not_excluded_for_width_two(u24):
    assert is_excluded_minor_pw(u24, 2) is None


def test_graph_candidates():
    assert is_excluded_pivotminor_lrw(Graph.empty(3), 0) is None
    cert = is_excluded_pivotminor_lrw(K2, 0)
    assert cert is not None
    assert cert.canonical == "g2:1"
    assert all(child.width == 0 for child in cert.children)
    assert is_excluded_pivotminor_lrw(path_graph(3), 0) is None


def test_encodings_survive(u24, p4):
    assert decode_configuration(encode_configuration(u24)) == u24
    assert decode_graph(encode_graph(p4)) == p4


# -------------------- Search --------------------


@pytest.mark.parametrize("max_n", [3, 5])
def test_only_k2_excludes_rank_width_zero(max_n):
    certs = search_obstructions("graph", 0, max_n)
    assert [c.canonical for c in certs] == ["g2:1"]


def test_matroid_search_for_width_zero():
    certs = search_obstructions("matroid", 0, 4)
    assert [c.size for c in certs] == [2]
    assert all(revalidate(c) for c in certs)
    assert check_antichain(certs)


def test_search_ignores_order_and_workers():
    dump = lambda certs: [c.model_dump() for c in certs]
    for kind, max_size in (("matroid", 3), ("graph", 4)):
        plain = search_obstructions(kind, 0, max_size)
        shuffled = search_obstructions(kind, 0, max_size, shuffle=True, seed=3)
        parallel = search_obstructions(kind, 0, max_size, workers=2)
        assert plain
        assert dump(plain) == dump(shuffled) == dump(parallel)


@pytest.mark.parametrize("workers", [1, 2])
def test_search_uses_the_callers_layout_budget(monkeypatch, workers):
    monkeypatch.setattr(config, "BUDGET_N", 1)
    with pytest.raises(BudgetExceeded):
        search_obstructions("matroid", 0, 3, workers=workers)


@pytest.mark.parametrize("workers", [1, 2])
def test_search_uses_the_callers_orbit_budget(monkeypatch, workers):
    monkeypatch.setattr(config, "ORBIT_BUDGET", 2)
    with pytest.raises(BudgetExceeded):
        search_obstructions("graph", 0, 3, workers=workers)


def test_lifted_budget_reaches_the_pivot_orbit(monkeypatch):
    monkeypatch.setattr(config, "ORBIT_BUDGET", 1)
    with pytest.raises(BudgetExceeded):
        is_excluded_pivotminor_lrw(K2, 0)
    cert = is_excluded_pivotminor_lrw(K2, 0, budget=-1)
    assert cert is not None
    assert cert.canonical == "g2:1"
    assert revalidate(cert)


def test_errors_survive_pickling():
    import pickle

    err = pickle.loads(pickle.dumps(BudgetExceeded("path_width", 5, 3)))
    assert (err.what, err.size, err.budget) == ("path_width", 5, 3)
    assert str(err) == "path_width: size 5 exceeds budget 3"
    bad = pickle.loads(pickle.dumps(InputFormatError("not a field element", 2, 3, "m.txt")))
    assert (bad.line, bad.column, bad.source) == (2, 3, "m.txt")
    assert str(bad) == "m.txt:2:3: not a field element"


# -------------------- Width one --------------------


M_K4 = Configuration.from_columns(GF2, [[1, 0, 0, 1, 1, 0], [0, 1, 0, 1, 0, 1], [0, 0, 1, 0, 1, 1]])


@pytest.fixture(scope="module")
def graph_certs_k1():
    return search_obstructions("graph", 1, 7)


@pytest.fixture(scope="module")
def matroid_certs_k1():
    return search_obstructions("matroid", 1, 6)


@pytest.mark.slow
def test_rank_width_one_obstructions(graph_certs_k1):
    certs = graph_certs_k1
    assert certs
    assert all(c.width == 2 and 4 <= c.size <= 7 for c in certs)
    assert [(c.size, c.canonical) for c in certs] == sorted((c.size, c.canonical) for c in certs)
    assert len({c.canonical for c in certs}) == len(certs)
    # C5 has rank-width 2, so it holds at least one of them
    assert any(is_pivot_minor(decode_graph(c.encoding), C5) for c in certs if c.size <= 5)
    assert all(revalidate(c) for c in certs)
    assert check_antichain(certs)


@pytest.mark.slow
def test_rank_width_one_search_is_stable(graph_certs_k1):
    dump = lambda certs: [c.model_dump() for c in certs]
    shuffled = search_obstructions("graph", 1, 7, shuffle=True, seed=11)
    parallel = search_obstructions("graph", 1, 7, workers=2, shuffle=True, seed=12)
    assert dump(graph_certs_k1) == dump(shuffled) == dump(parallel)


@pytest.mark.slow
def test_path_width_one_obstructions(matroid_certs_k1):
    certs = matroid_certs_k1
    assert certs
    assert all(c.width == 2 and 4 <= c.size <= 6 for c in certs)
    assert len({c.canonical for c in certs}) == len(certs)
    # M(K4) has path-width 2, so it holds at least one of them
    assert any(is_matroid_minor(decode_configuration(c.encoding), M_K4) for c in certs)
    assert all(revalidate(c) for c in certs)
    assert check_antichain(certs)


@pytest.mark.slow
def test_path_width_one_search_is_stable(matroid_certs_k1):
    dump = lambda certs: [c.model_dump() for c in certs]
    shuffled = search_obstructions("matroid", 1, 6, shuffle=True, seed=11)
    parallel = search_obstructions("matroid", 1, 6, workers=2, shuffle=True, seed=12)
    assert dump(matroid_certs_k1) == dump(shuffled) == dump(parallel)


def test_matroid_search_is_binary_only():
    from conftest import GF3

    with pytest.raises(WidthKitError):
        search_obstructions("matroid", 0, 3, field=GF3)


def test_matroid_minor_containment(u24):
    parallel_pair = Configuration.from_columns(GF2, [[1, 1]])
    assert is_matroid_minor(parallel_pair, u24)
    assert not is_matroid_minor(u24, parallel_pair)
    for a in binary_matroids(3, 3):
        assert is_matroid_minor(a, a)


def test_certificate_db_is_deterministic(tmp_path):
    certs = search_obstructions("graph", 0, 4)
    first = write_certificate_db(certs, tmp_path / "one", manifest={"seed": 1})
    second = write_certificate_db(list(reversed(certs)), tmp_path / "two", manifest={"seed": 1})
    assert [p.name for p in first] == [p.name for p in second]
    for a, b in zip(first, second):
        assert a.read_text() == b.read_text()
    assert (tmp_path / "one" / "summary.tsv").read_text() == (tmp_path / "two" / "summary.tsv").read_text()


# -------------------- Bounds --------------------


def test_bound_constants_for_k0():
    bc = bound_constants(0, 2)
    assert bc.matroid_exponent == 2048
    assert bc.graph_exponent == 2 ** 22
    assert bc.ell_matroid == 2 ** 2048 + 1
    assert bc.describe()["ell_matroid"] == "2^2048 + 1 (617 digits)"


def test_bounds_too_wide_to_materialize():
    bc = bound_constants(1, 2)
    assert bc.ell_matroid is None
    assert bc.size_threshold("graph") is None


def test_bound_constants_reject_bad_input():
    with pytest.raises(WidthKitError):
        bound_constants(-1, 2)
    with pytest.raises(WidthKitError):
        bound_constants(0, 1)


def test_compact_count_table():
    assert compact_count_table(0, 2) == {0: 4, 1: 2048}


# -------------------- Re-enactments --------------------


def test_main_pipeline_on_parallel_class(parallel6):
    report = reenact_main_pipeline(parallel6, 0, ell=4)
    assert report.status == "completed", report.steps
    assert report.verdict is Verdict.HELD
    assert report.pair == [1, 2]
    assert report.delete == ["e2"]
    assert report.width_before == 1
    assert report.width_after == 1
    assert all(step.ok for step in report.steps)


def test_main_pipeline_without_repeated_cuts(u24):
    report = reenact_main_pipeline(u24, 1, ell=4)
    assert report.status == "vacuous"
    assert report.verdict is None


def test_graph_pipeline_does_not_fail_on_a_path():
    report = reenact_graph_pipeline(path_graph(6), 0, ell=4)
    assert report.status != "failed", report.steps
    assert report.width_before == 1
