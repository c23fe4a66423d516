import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intfam.classification import (
    are_isomorphic,
    classify,
    find_isomorphism,
    g2_pair_violations,
    g3_pair_violations,
    g3_triple_violations,
    is_template_subfamily,
    isomorphic_to,
)
from intfam.constructions import TemplateDescriptor, build, member_test
from intfam.core import Family, FamilyError, Params, random_permutation, relabel, to_mask

P94 = Params(9, 4)


@pytest.mark.parametrize(
    "kind,i,verdicts",
    [
        ("Star", None, (True, False, False, False, False)),
        ("HM", None, (False, True, False, False, False)),
        ("J", 2, (False, False, True, False, False)),
        ("G", 2, (False, False, False, True, False)),
        ("G", 3, (False, False, False, False, True)),
        ("J", 3, (False, False, False, False, False)),
        ("K2", None, (False, False, False, False, False)),
    ],
)
def test_template_verdicts(kind, i, verdicts):
    rep = classify(build(kind, P94, i=i))
    assert rep.verdicts() == verdicts


def test_witnesses_rebuild_a_containing_template():
    rng = random.Random(3)
    for kind, i, name in [("HM", None, "HM"), ("J", 2, "J2"), ("G", 2, "G2"), ("G", 3, "G3")]:
        f = relabel(build(kind, P94, i=i), random_permutation(9, rng))
        rep = classify(f)
        desc = rep.descriptor(name)
        assert desc is not None
        assert is_template_subfamily(f, desc)


def test_min_missing_degree_reported():
    assert classify(build("K2", P94)).min_missing_degree == 2
    assert classify(build("J", P94, i=3)).min_missing_degree == 3


def test_non_intersecting_rejected():
    with pytest.raises(FamilyError, match="not intersecting"):
        classify(Family.from_sets(6, 3, [[1, 2, 3], [4, 5, 6]]))


def test_isomorphism_recovers_relabelling():
    rng = random.Random(11)
    base = build("J", P94, i=3)
    for _ in range(10):
        g = relabel(base, random_permutation(9, rng))
        phi = find_isomorphism(base, g)
        assert phi is not None
        assert relabel(base, phi) == g
    assert not are_isomorphic(build("J", P94, i=2), build("G", P94, i=2))
    assert isomorphic_to(build("K2", P94), TemplateDescriptor("J", i=3)) is None


def test_sub_mode():
    f = build("J", P94, i=3)
    small = f.with_masks(list(f)[:20])
    assert find_isomorphism(small, f, mode="sub") is not None
    assert find_isomorphism(f, small, mode="sub") is None


# brute-force references on small ground sets


def _inside(f, desc):
    test = member_test(desc, f.params)
    return all(test(m) for m in f)


def _brute_hm(f):
    n, k = f.n, f.k
    for x in range(1, n + 1):
        for E in combinations([v for v in range(1, n + 1) if v != x], k):
            if _inside(f, TemplateDescriptor("HM", x=x, E=E)):
                return True
    return False


def _brute_j2(f):
    n, k = f.n, f.k
    for x in range(1, n + 1):
        rest = [v for v in range(1, n + 1) if v != x]
        for E in combinations(rest, k - 1):
            for J in combinations([v for v in rest if v not in E], 2):
                if _inside(f, TemplateDescriptor("J", i=2, x=x, E=E, J=J)):
                    return True
    return False


def _brute_g(f, i):
    n = f.n
    for x in range(1, n + 1):
        for E in combinations([v for v in range(1, n + 1) if v != x], i):
            if _inside(f, TemplateDescriptor("G", i=i, x=x, E=E)):
                return True
    return False


@st.composite
def template_subfamilies(draw):
    kind, i = draw(st.sampled_from([("HM", None), ("J", 2), ("G", 2), ("G", 3), ("J", 3), ("K2", None)]))
    n = draw(st.integers(8, 9)) if draw(st.booleans()) else 8
    base = build(kind, Params(n, 4), i=i)
    rng = random.Random(draw(st.integers(0, 2**32)))
    keep = draw(st.floats(0.3, 1.0))
    fam = base.with_masks([m for m in base if rng.random() < keep])
    return relabel(fam, random_permutation(n, rng))


@settings(max_examples=40, deadline=None)
@given(template_subfamilies())
def test_verdicts_match_brute_force(f):
    if len(f) == 0:
        return
    rep = classify(f)
    if rep.is_EKR:
        return  # a star is inside every template, the exact verdicts below assume no center
    assert rep.is_HM == _brute_hm(f)
    assert rep.in_J2 == _brute_j2(f)
    assert rep.in_G2 == _brute_g(f, 2)
    assert rep.in_G3 == _brute_g(f, 3)


@settings(max_examples=30, deadline=None)
@given(template_subfamilies(), st.integers(0, 2**32))
def test_verdicts_invariant_under_relabelling(f, seed):
    if len(f) == 0:
        return
    g = relabel(f, random_permutation(f.n, random.Random(seed)))
    assert classify(f).verdicts() == classify(g).verdicts()
    assert classify(f).min_missing_degree == classify(g).min_missing_degree


@pytest.mark.parametrize("n", [9, 10])
def test_degree_thresholds_on_templates(n):
    p = Params(n, 4)
    g2, g3 = build("G", p, i=2), build("G", p, i=3)
    assert g2_pair_violations(g2, (1, 2, 3)) == []
    assert g3_pair_violations(g3, 1, (2, 3, 4)) == []
    assert g3_triple_violations(g3, 1, (2, 3, 4)) == []
    # the rules are sharp: a wrong core is caught
    assert g2_pair_violations(g2, (1, 2, 4))
    assert g3_pair_violations(g3, 2, (1, 3, 4))


def test_pair_threshold_is_attained():
    g2 = build("G", Params(9, 4), i=2)
    d = sum(1 for m in g2 if m & to_mask([1, 5]) == to_mask([1, 5]))
    assert d == 2 * 9 - 7
