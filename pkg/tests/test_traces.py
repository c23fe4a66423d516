import pytest

from intfam.constructions import Bound, build, formula_value
from intfam.core import Family, Params
from intfam.traces import (
    K4_CAPS,
    bound_from_traces,
    build_window,
    check_lemma_2_2,
    check_lemma_2_3,
    star_of_pairs,
    trace,
    trace_caps,
    window_size,
)


def test_window_keeps_frozen_and_fills_smallest():
    assert build_window(12, 4, (3, 7, 11)) == (1, 2, 3, 4, 5, 6, 7, 8, 11)
    assert len(build_window(13, 5, ())) == window_size(5) == 10
    with pytest.raises(ValueError):
        build_window(8, 4, ())


def test_caps():
    assert trace_caps(4) == K4_CAPS
    with pytest.raises(ValueError):
        trace_caps(3)
    caps = trace_caps(5)
    assert caps[0] == 0 and caps[1] == 0


@pytest.mark.parametrize("k", range(4, 9))
def test_trace_bound_is_j3_size(k):
    for n in range(2 * k + 1, 3 * k + 3):
        assert bound_from_traces(n, k) == formula_value(Bound.Main_ii, Params(n, k))


@pytest.mark.parametrize("n,k,size", [(10, 4, 68), (9, 4, 50), (11, 5, 201)])
def test_j3_profile_meets_caps(n, k, size):
    f = build("J", Params(n, k), i=3)
    Y = build_window(n, k, ())
    prof = trace(f, Y)
    assert sum(prof.counts().values()) <= len(f)
    assert check_lemma_2_2(f, Y) == []
    assert check_lemma_2_3(prof) == []
    assert prof.observed_bound() >= len(f) == size


def test_two_traces_need_two_outside_elements():
    f = build("J", Params(10, 4), i=3)
    assert trace(f, build_window(10, 4, ())).counts()[2] == 0
    g = build("J", Params(11, 4), i=3)
    prof = trace(g, build_window(11, 4, ()))
    assert prof.counts()[2] == 3
    assert star_of_pairs(prof) == 1


def test_lemma_checks_catch_violations():
    f = Family.from_sets(10, 4, [[1, 10, 2, 3], [1, 4, 5, 6], [2, 4, 7, 10]])
    Y = build_window(10, 4, ())
    assert check_lemma_2_2(f, Y) == []
    g = Family.from_sets(12, 4, [[1, 10, 11, 12], [1, 2, 10, 11]])
    assert check_lemma_2_2(g, build_window(12, 4, ())) == ["a member meets the window in one element"]
    h = Family.from_sets(11, 4, [[1, 2, 10, 11], [3, 4, 10, 11]])
    assert check_lemma_2_2(h, build_window(11, 4, ())) == ["traces [1, 2] and [3, 4] are disjoint"]
    prof = trace(build("J", Params(11, 4), i=2), build_window(11, 4, ()))
    assert check_lemma_2_3(prof)


def test_profile_dict():
    f = build("J", Params(11, 4), i=3)
    d = trace(f, build_window(11, 4, ())).to_dict()
    assert d["window"] == list(range(1, 10))
    assert sorted(d["counts"]) == [0, 1, 2, 3, 4]
    assert all(len(t) == 2 for t in d["traces"][2])
