import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import intersecting_families
from intfam import shifting
from intfam.classification import classify
from intfam.constructions import build
from intfam.core import Family, Params, is_intersecting, random_permutation, relabel, to_mask
from intfam.traces import build_window, check_lemma_2_2, check_lemma_2_3, trace

CASES = json.loads((Path(__file__).parent / "data" / "guarded_cases.json").read_text())


def test_shift_replaces_larger_by_smaller():
    f = Family.from_sets(5, 2, [[2, 3], [1, 3], [3, 4]])
    # {3,4} -> {1,3} is blocked because {1,3} is present
    assert shifting.shift(f, 1, 4) == f
    h = shifting.shift(Family.from_sets(5, 2, [[3, 4]]), 1, 4)
    assert h.sets() == [(1, 3)]


def test_shift_argument_order():
    f = Family.from_sets(5, 2, [[1, 2]])
    with pytest.raises(ValueError):
        shifting.shift(f, 3, 2)


@settings(max_examples=100, deadline=None)
@given(intersecting_families(max_n=10, max_k=5), st.data())
def test_shift_preserves_size_and_intersection(f, data):
    x = data.draw(st.integers(1, f.n - 1))
    y = data.draw(st.integers(x + 1, f.n))
    g = shifting.shift(f, x, y)
    assert len(g) == len(f)
    assert is_intersecting(g)
    assert shifting.potential(g) == shifting.potential(f) - len(shifting.moved(f, x, y)) * (y - x)


@settings(max_examples=60, deadline=None)
@given(intersecting_families(max_n=10, max_k=5))
def test_stabilize_properties(f):
    out, log = shifting.stabilize(f)
    assert shifting.is_stable(out)
    assert len(out) == len(f) and is_intersecting(out)
    assert len(log.steps) <= shifting.potential(f) - shifting.potential(out)
    assert log.replay(f) == out
    again, log2 = shifting.stabilize(out)
    assert again == out and not log2.steps


def test_frozen_elements_never_move():
    f = relabel(build("J", Params(9, 4), i=3), random_permutation(9, random.Random(2)))
    out, log = shifting.stabilize(f, frozen=(1, 2))
    assert all(1 not in (x, y) and 2 not in (x, y) for x, y, _ in log.steps)
    assert shifting.is_stable(out, (1, 2))


def test_detect_case_one():
    f = Family.from_sets(6, 3, [[2, 3, 4], [1, 3, 5], [1, 4, 5]])
    assert shifting.detect_case(f, 1, 2) == 1
    # the three sets already sit inside a one-exception family
    assert shifting.detect_case(f, 5, 6) == 2


@settings(max_examples=80, deadline=None)
@given(intersecting_families(max_n=9, max_k=4), st.data())
def test_detect_case_agrees_with_classification(f, data):
    x = data.draw(st.integers(1, f.n - 1))
    y = data.draw(st.integers(x + 1, f.n))
    c = shifting.detect_case(f, x, y)
    verdicts = classify(shifting.shift(f, x, y)).verdicts()
    if f.k != 4:
        verdicts = verdicts[:3]
    first = next((i + 1 for i, v in enumerate(verdicts) if v), None)
    assert c == first


def test_hypothesis_failures():
    p = Params(9, 4)
    assert shifting.hypothesis_failures(build("J", p, i=3)) == []
    assert shifting.hypothesis_failures(build("K2", p)) == ["missing degree 2 < 3"]
    assert shifting.hypothesis_failures(build("K2", p), floor=2) == []
    assert "HM" in shifting.hypothesis_failures(build("HM", p))
    assert "G3" in shifting.hypothesis_failures(build("G", p, i=3))
    assert shifting.hypothesis_failures(Family.from_sets(6, 3, [[1, 2, 3], [4, 5, 6]])) == ["not intersecting"]


def _post_ok(f, out, frozen, log):
    assert shifting.is_stable(out, frozen.elements)
    assert shifting.hypothesis_failures(out) == []
    assert len(frozen) <= 5 and len(log.case_events) <= 3
    assert len(out) == len(f)
    Y = build_window(out.n, out.k, frozen.elements)
    assert check_lemma_2_2(out, Y) == []
    assert check_lemma_2_3(trace(out, Y)) == []


@pytest.mark.parametrize("n", [9, 10, 11])
def test_guarded_on_relabelled_j3(n):
    rng = random.Random(n)
    base = build("J", Params(n, 4), i=3)
    for _ in range(3):
        f = relabel(base, random_permutation(n, rng))
        out, frozen, log = shifting.guarded_stabilize(f)
        _post_ok(f, out, frozen, log)


@pytest.mark.parametrize("entry", CASES, ids=lambda e: "cases-" + "-".join(map(str, e["cases"])))
def test_guarded_case_regressions(entry):
    f = Family.from_json(entry["family"])
    out, frozen, log = shifting.guarded_stabilize(f)
    assert [e.case for e in log.case_events] == entry["cases"]
    assert frozen.origin_case == entry["cases"][0]
    assert len(frozen) >= 2
    _post_ok(f, out, frozen, log)
    assert any(line.startswith("CASE") for line in log.lines())


def test_guarded_rejects_inputs_outside_hypotheses():
    with pytest.raises(shifting.GuardedShiftError, match="missing degree"):
        shifting.guarded_stabilize(build("K2", Params(9, 4)))
    with pytest.raises(shifting.GuardedShiftError, match="HM"):
        shifting.guarded_stabilize(build("HM", Params(9, 4)))


def test_guarded_k2_with_lower_floor_is_not_localized():
    rng = random.Random(0)
    f = relabel(build("K2", Params(9, 4)), random_permutation(9, rng))
    with pytest.raises(shifting.GuardedShiftError):
        shifting.guarded_stabilize(f, floor=2)


def test_guarded_member_of_case_event_log():
    entry = next(e for e in CASES if e["cases"][0] == 1)
    f = Family.from_json(entry["family"])
    _, frozen, log = shifting.guarded_stabilize(f)
    ev = log.case_events[0]
    assert {ev.x, ev.y} <= set(frozen.elements)
    assert frozen.mask & to_mask([ev.x, ev.y]) == to_mask([ev.x, ev.y])
