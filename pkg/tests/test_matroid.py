import itertools

import pytest

from conftest import GF3, random_configuration
from widthkit.errors import DimensionMismatch, InvalidMinor, UnknownLabel, WidthKitError
from widthkit.matroid import (
    GF2,
    Configuration,
    MinorSpec,
    binary_matroids,
    boundary,
    canonical_fingerprint,
    connectivity,
    connminor_check,
    contract,
    delete,
    is_coindependent,
    minor,
    path_width,
    rank_of,
    rank_table,
)


def test_u24_ranks(u24):
    assert rank_of(u24, []) == 0
    assert rank_of(u24, ["a"]) == 1
    assert all(rank_of(u24, pair) == 2 for pair in itertools.combinations("abcd", 2))
    assert rank_of(u24, "abcd") == 2


def test_u24_connectivity(u24):
    assert connectivity(u24, ["a"]) == 1
    assert connectivity(u24, ["a", "b"]) == 2
    assert connectivity(u24, []) == 0
    assert boundary(u24, ["a", "b"]).dim == 2
    assert boundary(u24, ["a"]).dim == 1


def test_u24_path_width(u24):
    assert path_width(u24)[0] == 2


def test_configuration_validation():
    with pytest.raises(WidthKitError):
        Configuration(GF2, 1, ("x", "x"), ((1,), (1,)))
    with pytest.raises(DimensionMismatch):
        Configuration(GF2, 2, ("x",), ((1,),))
    with pytest.raises(UnknownLabel):
        rank_of(Configuration.from_columns(GF2, [[1]]), ["nope"])


def test_trivial_minor_is_identity(u24):
    assert rank_table(minor(u24, MinorSpec())) == rank_table(u24)


def test_contraction_rank(u24):
    n = contract(u24, "a")
    assert n.labels == ("b", "c", "d")
    for r in range(4):
        for y in itertools.combinations("bcd", r):
            assert rank_of(n, y) == rank_of(u24, set(y) | {"a"}) - rank_of(u24, ["a"])


def test_deletion_is_u23(u24):
    n = delete(u24, "d")
    assert n.labels == ("a", "b", "c")
    for r in range(4):
        for y in itertools.combinations("abc", r):
            assert rank_of(n, y) == min(r, 2)


def test_overlapping_minor_is_rejected(u24):
    with pytest.raises(InvalidMinor):
        minor(u24, MinorSpec(frozenset("a"), frozenset("a")))


def test_coindependence(u24):
    assert is_coindependent(u24, [])
    assert is_coindependent(u24, ["a", "b"])
    assert not is_coindependent(u24, ["a", "b", "c"])


def test_connminor_check_example(u24):
    report = connminor_check(u24, ["a"], ["b"], [])
    assert report.equality and report.predicted_equality and report.leq


def test_connminor_check_on_every_triple(u24):
    labels = u24.labels
    for assignment in itertools.product(range(4), repeat=len(labels)):
        x = [l for l, p in zip(labels, assignment) if p == 1]
        c = [l for l, p in zip(labels, assignment) if p == 2]
        d = [l for l, p in zip(labels, assignment) if p == 3]
        report = connminor_check(u24, x, c, d)
        assert report.equality == report.predicted_equality


def test_connminor_check_on_random_configurations(rng):
    for _ in range(20):
        a = random_configuration(rng, GF3, 3, 5)
        parts = rng.integers(0, 4, size=a.size)
        x, c, d = ([l for l, p in zip(a.labels, parts) if p == k] for k in (1, 2, 3))
        connminor_check(a, x, c, d)


# -------------------- Canonical forms --------------------


def test_fingerprint_ignores_labels_and_field(u24):
    shuffled = Configuration.from_columns(GF3, [[1, 1, 0, 1], [2, 1, 1, 0]], ["w", "x", "y", "z"])
    assert canonical_fingerprint(shuffled) == canonical_fingerprint(u24)
    two_loops = Configuration.from_columns(GF2, [[0, 0]])
    parallel = Configuration.from_columns(GF2, [[1, 1]])
    assert canonical_fingerprint(two_loops) != canonical_fingerprint(parallel)


def test_binary_matroid_counts():
    by_size = {}
    for a in binary_matroids(4, 4):
        by_size[a.size] = by_size.get(a.size, 0) + 1
    # every matroid on <= 3 elements is binary; U_{2,4} is the one non-binary on 4
    assert by_size == {0: 1, 1: 2, 2: 4, 3: 8, 4: 16}
