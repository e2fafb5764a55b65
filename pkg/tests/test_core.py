import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from h2ma.core import (
    Archive,
    BudgetExhausted,
    Candidate,
    EvaluationCounter,
    dominates,
    is_nondominated,
    nondominated_filter,
)

small = st.floats(-3, 3, allow_nan=False).map(lambda v: round(v, 1))
vec = st.tuples(small, small)


@pytest.mark.parametrize("a,b,expected", [
    ((1, 2), (2, 3), True),
    ((1, 2), (2, 1), False),
    ((1, 2), (1, 3), False),
])
def test_dominates_examples(a, b, expected):
    assert dominates(a, b) is expected


def test_dominates_length_mismatch():
    with pytest.raises(ValueError):
        dominates([1, 2], [1, 2, 3])


@given(vec)
def test_dominates_irreflexive(a):
    assert not dominates(a, a)


@given(vec, vec, vec)
def test_dominates_transitive(a, b, c):
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


def test_is_nondominated_examples():
    assert is_nondominated((0.5, 0.5), [(0.25, 0.75)])
    assert not is_nondominated((0.5, 0.5), [(0.4, 0.4)])
    assert is_nondominated((7.0, -1.0), [])


@given(vec, st.lists(vec, max_size=12))
def test_is_nondominated_matches_brute_force(y, others):
    expected = not any(all(o[i] < y[i] for i in range(2)) for o in others)
    assert is_nondominated(y, np.array(others).reshape(-1, 2)) == expected


def test_nondominated_filter_examples():
    a, b = Candidate([0.0], (0, 1)), Candidate([1.0], (1, 0))
    assert nondominated_filter([a, b]) == [a, b]
    c, d = Candidate([0.0], (0, 0)), Candidate([1.0], (1, 1))
    assert nondominated_filter([c, d]) == [c]
    assert nondominated_filter([]) == []


@given(st.lists(vec, max_size=15))
def test_filter_is_ordered_subsequence(points):
    members = [Candidate([float(i)], p) for i, p in enumerate(points)]
    kept = nondominated_filter(members)
    positions = [members.index(k) for k in kept]
    assert positions == sorted(positions)
    for k in kept:
        assert is_nondominated(k.y, [m.y for m in members])


@given(st.integers(0, 50))
def test_counter_wrap_counts_exactly(k):
    counter = EvaluationCounter(100)
    f = counter.wrap(lambda x: x * 2)
    for i in range(k):
        f(i)
    assert counter.count == k


def test_counter_never_exceeds_budget():
    counter = EvaluationCounter(3)
    for _ in range(3):
        counter.tick()
    with pytest.raises(BudgetExhausted):
        counter.tick()
    assert counter.count == 3 and counter.exhausted and counter.remaining == 0


def test_counter_rejects_nonpositive_budget():
    with pytest.raises(ValueError):
        EvaluationCounter(0)


@pytest.mark.parametrize("bad", [[np.nan, 1.0], [np.inf, 0.0], [1.0]])
def test_candidate_rejects_bad_objectives(bad):
    with pytest.raises(ValueError):
        Candidate([0.0], bad)


def test_candidate_arrays_are_read_only():
    c = Candidate([0.1, 0.2], [1.0, 2.0])
    with pytest.raises(ValueError):
        c.y[0] = 5.0


def test_archive_keeps_dominated_members_for_provenance():
    archive = Archive()
    archive.append(Candidate([0.0], (1, 1)), "warmup", evaluations=3)
    archive.append(Candidate([1.0], (0, 0)), "stochastic", evaluations=9)
    assert len(archive) == 2
    assert [c.y.tolist() for c in archive.nondominated()] == [[0.0, 0.0]]
    assert archive.phases == ["warmup", "stochastic"]
    assert archive.stamps == [3, 9]


def test_archive_rejects_unknown_phase_and_mixed_dimension():
    archive = Archive([Candidate([0.0], (1, 1))])
    with pytest.raises(ValueError):
        archive.append(Candidate([0.0], (0, 0)), "exploit")
    with pytest.raises(ValueError):
        archive.append(Candidate([0.0], (0, 0, 0)))


@settings(max_examples=50)
@given(arrays(float, (6, 2), elements=st.floats(0, 1)))
def test_archive_objectives_track_appends(Y):
    archive = Archive()
    for i, y in enumerate(Y):
        archive.append(Candidate([float(i)], y))
        assert archive.objectives.shape == (i + 1, 2)
    np.testing.assert_array_equal(archive.objectives, Y)
