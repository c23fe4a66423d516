import json
import random
from itertools import combinations

import pytest
from hypothesis import given, settings

from conftest import intersecting_families
from intfam.core import (
    Family,
    FamilyError,
    Params,
    all_ksets,
    binom,
    covering_number,
    covering_number_brute,
    degrees,
    disjoint_pair,
    elements,
    is_intersecting,
    load_family,
    min_missing_degree,
    missing_degree,
    pad,
    random_intersecting,
    random_permutation,
    relabel,
    save_family,
    subset_degree,
    to_mask,
)


def test_binom_conventions():
    assert binom(5, 2) == 10
    assert binom(3, 5) == 0
    assert binom(4, -1) == 0
    assert binom(0, 0) == 1
    with pytest.raises(ValueError):
        binom(-1, 0)


def test_mask_roundtrip():
    for c in combinations(range(1, 8), 3):
        assert elements(to_mask(c)) == c


def test_all_ksets_lexicographic():
    sets = [elements(m) for m in all_ksets(6, 3)]
    assert sets == sorted(sets)
    assert len(sets) == 20


@pytest.mark.parametrize("n,k", [(0, 0), (3, 4), (65, 2)])
def test_params_guard(n, k):
    with pytest.raises(ValueError):
        Params(n, k)


def test_family_validation():
    with pytest.raises(FamilyError, match="duplicate set"):
        Family.from_sets(5, 2, [[1, 2], [2, 1]])
    with pytest.raises(FamilyError, match="size"):
        Family.from_sets(5, 2, [[1, 2, 3]])
    with pytest.raises(FamilyError, match="outside"):
        Family.from_sets(5, 2, [[1, 6]])
    with pytest.raises(FamilyError, match="repeats"):
        Family.from_sets(5, 2, [[1, 1]])


def test_family_is_sorted_and_hashable():
    f = Family.from_sets(5, 2, [[3, 4], [1, 2], [1, 5]])
    assert f.sets() == [(1, 2), (1, 5), (3, 4)]
    g = Family.from_sets(5, 2, [[1, 5], [3, 4], [1, 2]])
    assert f == g and hash(f) == hash(g)
    assert to_mask([3, 4]) in f and to_mask([2, 3]) not in f


def test_json_roundtrip(tmp_path):
    f = Family.from_sets(6, 3, [[1, 2, 3], [1, 4, 5], [2, 4, 6]])
    assert Family.loads(f.dumps()) == f
    path = tmp_path / "f.json"
    save_family(f, path)
    assert load_family(path) == f
    assert json.loads(path.read_text())["sets"][0] == [1, 2, 3]
    with pytest.raises(FamilyError, match="missing field"):
        Family.from_json({"n": 3, "k": 2})


def test_intersection_predicates():
    f = Family.from_sets(6, 3, [[1, 2, 3], [1, 4, 5], [2, 4, 6]])
    assert is_intersecting(f)
    g = Family.from_sets(6, 3, [[1, 2, 3], [4, 5, 6]])
    assert not is_intersecting(g)
    assert disjoint_pair(g) == (to_mask([1, 2, 3]), to_mask([4, 5, 6]))


def test_degrees_small():
    f = Family.from_sets(5, 2, [[1, 2], [1, 3], [2, 3]])
    assert degrees(f) == [0, 2, 2, 2, 0, 0]
    assert missing_degree(f, 1) == 1
    assert min_missing_degree(f) == 1
    assert subset_degree(f, [1, 2]) == 1


def test_pad_uses_smallest_allowed():
    assert pad(to_mask([5]), to_mask([2, 3, 5, 7]), 3) == to_mask([2, 3, 5])
    assert pad(0, to_mask([1]), 2) is None


@settings(max_examples=150, deadline=None)
@given(intersecting_families(max_n=9, max_k=4))
def test_covering_number_matches_brute_force(f):
    assert covering_number(f) == covering_number_brute(f)


@settings(max_examples=60, deadline=None)
@given(intersecting_families())
def test_random_intersecting_is_intersecting(f):
    assert is_intersecting(f)


def test_relabel_invariance_of_statistics():
    rng = random.Random(7)
    base = random_intersecting(9, 4, rng)
    for _ in range(200):
        p = random_permutation(9, rng)
        g = relabel(base, p)
        assert len(g) == len(base)
        assert is_intersecting(g)
        assert sorted(degrees(g)[1:]) == sorted(degrees(base)[1:])
        assert covering_number(g) == covering_number(base)
        assert min_missing_degree(g) == min_missing_degree(base)


def test_relabel_rejects_non_bijection():
    f = Family.from_sets(4, 2, [[1, 2]])
    with pytest.raises(ValueError):
        relabel(f, [1, 1, 2, 3])
    assert relabel(f, {1: 3, 3: 1}).sets() == [(2, 3)]


def test_cross_intersecting():
    from intfam.core import are_cross_intersecting

    assert are_cross_intersecting([], [to_mask([1, 2])])
    assert not are_cross_intersecting([to_mask([1, 2, 3])], [to_mask([4, 5, 6])])
    star = [to_mask(c) for c in combinations(range(1, 7), 3) if 1 in c]
    assert are_cross_intersecting(star[:5], star[5:])
