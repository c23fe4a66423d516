import pytest

from intfam.constructions import (
    Bound,
    TemplateDescriptor,
    build,
    crossover_table,
    expected_relation,
    formula_value,
    member_test,
)
from intfam.core import Params, binom, covering_number, is_intersecting, min_missing_degree, to_mask


@pytest.mark.parametrize(
    "kind,i,n,k,size",
    [
        ("HM", None, 9, 4, 53),
        ("J", 2, 9, 4, 51),
        ("G", 2, 9, 4, 51),
        ("G", 3, 9, 4, 51),
        ("K2", None, 9, 4, 50),
        ("J", 3, 9, 4, 50),
        ("J", 3, 10, 4, 68),
        ("J", 3, 11, 5, 201),
        ("G", 4, 11, 5, 201),
        ("T3", None, 7, 3, 13),
        ("HM", None, 7, 3, 13),
        ("Star", None, 7, 3, 15),
    ],
)
def test_sizes_by_enumeration(kind, i, n, k, size):
    f = build(kind, Params(n, k), i=i)
    assert len(f) == size
    assert is_intersecting(f)


def test_two_exception_family_with_smaller_overlap_also_has_50_members():
    f = build(TemplateDescriptor("K", i=3), Params(9, 4))
    assert len(f) == 50 == formula_value(Bound.Eq1_K2, Params(9, 4), 3)


@pytest.mark.parametrize("n", [9, 10, 11])
def test_fp_family_intersecting(n):
    f = build("FP", Params(n, 4))
    assert is_intersecting(f)


def test_default_placement_center_one():
    d = TemplateDescriptor("J", i=2).resolve(Params(9, 4))
    assert d.x == 1 and d.E == (2, 3, 4) and d.J == (5, 6)


def test_custom_placement_is_a_relabelled_copy():
    p = Params(9, 4)
    a = build(TemplateDescriptor("G", i=3, x=9, E=(6, 7, 8)), p)
    b = build("G", p, i=3)
    assert len(a) == len(b)
    test = member_test(TemplateDescriptor("G", i=3, x=9, E=(6, 7, 8)), p)
    assert test(to_mask([9, 6, 1, 2])) and not test(to_mask([1, 2, 3, 6]))


@pytest.mark.parametrize(
    "desc",
    [
        TemplateDescriptor("G", i=1),
        TemplateDescriptor("J", i=4),
        TemplateDescriptor("HM", E=(1, 2, 3, 4)),
        TemplateDescriptor("J", i=2, E=(2, 3, 4), J=(4, 5)),
        TemplateDescriptor("K", i=2, E1=(2, 3, 4, 5), E2=(2, 6, 7, 8)),
        TemplateDescriptor("Nope"),
    ],
)
def test_invalid_descriptors(desc):
    with pytest.raises(ValueError):
        build(desc, Params(9, 4))


def test_t3_needs_k3():
    with pytest.raises(ValueError):
        build("T3", Params(9, 4))


def test_templates_have_no_center():
    p = Params(9, 4)
    for kind, i in [("HM", None), ("J", 2), ("J", 3), ("G", 2), ("G", 3), ("K2", None)]:
        f = build(kind, p, i=i)
        assert min_missing_degree(f) >= 1
        assert covering_number(f) == 2


def test_formula_domain_guards():
    with pytest.raises(ValueError):
        formula_value(Bound.HM_bound, Params(8, 4))
    assert formula_value(Bound.Gi_size, Params(8, 4), 2) == len(build("G", Params(8, 4), i=2))
    with pytest.raises(ValueError):
        formula_value(Bound.Gi_size, Params(9, 4))
    assert formula_value(Bound.EKR_max, Params(64, 31)) == binom(63, 30)


def test_formula_closed_forms():
    p = Params(9, 4)
    assert formula_value(Bound.EKR_max, p) == binom(8, 3)
    assert formula_value("HM_bound", p) == 53
    assert formula_value(Bound.Main_i, p) == formula_value(Bound.Eq2_J3, p) == 50
    assert formula_value(Bound.Main_ii, Params(10, 4)) == 68


def test_crossover_small():
    rows = crossover_table(5, (11, 20))
    assert [r.relation for r in rows] == [expected_relation(r.n, 5) for r in rows]
    assert all(r.matches for r in rows)
    assert rows[0].relation == "greater" and rows[-1].relation == "less"
    assert crossover_table(4, (9, 9))[0].relation == "equal"


@pytest.mark.parametrize("n,k", [(9, 4), (11, 5)])
def test_fp_covering_number_three(n, k):
    f = build("FP", Params(n, k))
    assert covering_number(f) == 3
