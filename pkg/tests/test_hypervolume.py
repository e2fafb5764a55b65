import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from h2ma.core import nondominated_mask
from h2ma.hypervolume import (
    ContributionLandscape,
    UndefinedGradientError,
    UnsupportedDimensionError,
    contribution,
    contribution_gradient,
    hypervolume,
    mc_hypervolume_oracle,
)

THREE_STEP = np.array([[0.25, 0.75], [0.5, 0.5], [0.75, 0.25]])
Z = np.array([1.0, 1.0])

point_sets = arrays(float, st.tuples(st.integers(0, 10), st.just(2)),
                    elements=st.floats(0, 1, allow_nan=False, width=32))
unit_point = arrays(float, (2,), elements=st.floats(0, 0.875, width=32))


def rectangles(points, z):
    """Brute-force area via the grid of all distinct coordinates."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    pts = pts[np.all(pts < z, axis=1)]
    if not len(pts):
        return 0.0
    xs = np.unique(np.append(pts[:, 0], z[0]))
    ys = np.unique(np.append(pts[:, 1], z[1]))
    area = 0.0
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            cx, cy = xs[i], ys[j]
            if np.any((pts[:, 0] <= cx) & (pts[:, 1] <= cy)):
                area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
    return area


@pytest.mark.parametrize("points,expected", [
    (np.empty((0, 2)), 0.0),
    ([[0.0, 0.0]], 1.0),
    (THREE_STEP, 0.375),
    ([[0.0, 0.0], [0.5, 0.5]], 1.0),
])
def test_hypervolume_examples(points, expected):
    assert hypervolume(points, Z) == pytest.approx(expected, abs=1e-12)


def test_points_not_dominating_nadir_are_ignored():
    assert hypervolume([[1.0, 0.0], [0.5, 2.0]], Z) == 0.0


def test_three_objectives_rejected():
    with pytest.raises(UnsupportedDimensionError):
        hypervolume([[0, 0, 0]], [1, 1, 1])


def test_non_finite_points_rejected():
    with pytest.raises(ValueError):
        hypervolume([[np.nan, 0.0]], Z)


@given(point_sets)
def test_sweep_matches_grid_decomposition(points):
    assert hypervolume(points, Z) == pytest.approx(rectangles(points, Z), abs=1e-12)


@given(point_sets, unit_point)
def test_monotone_for_nondominated_additions(points, y):
    assume(not np.any(np.all(points <= y, axis=1)) if len(points) else True)
    assert hypervolume(np.vstack([points, y]), Z) > hypervolume(points, Z)


@given(point_sets, unit_point)
def test_dominated_point_is_neutral(points, y):
    assume(len(points) and np.any(np.all(points <= y, axis=1)))
    assert hypervolume(np.vstack([points, y]), Z) == pytest.approx(hypervolume(points, Z),
                                                                    abs=1e-15)


@given(point_sets)
def test_permutation_invariant(points):
    perm = np.random.default_rng(0).permutation(len(points))
    assert hypervolume(points[perm], Z) == hypervolume(points, Z)


@given(point_sets, unit_point)
def test_contribution_is_hypervolume_difference(points, y):
    diff = hypervolume(np.vstack([points, y]), Z) - hypervolume(points, Z)
    assert contribution(y, points, Z) == pytest.approx(diff, abs=1e-12)


def test_contribution_examples():
    others = [[0.25, 0.75], [0.75, 0.25]]
    assert contribution([0.5, 0.5], others, Z) == pytest.approx(0.0625, abs=1e-12)
    assert contribution([0.4, 0.4], [[0.3, 0.3]], Z) == 0.0
    assert contribution([0.0, 0.0], [], Z) == 1.0
    assert contribution([1.0, 0.5], [], Z) == 0.0


@pytest.mark.parametrize("y,others,expected", [
    ([0.5, 0.5], [[0.25, 0.75], [0.75, 0.25]], [-0.25, -0.25]),
    ([0.5, 0.5], [], [-0.5, -0.5]),
    ([0.9, 0.9], [], [-0.1, -0.1]),
])
def test_gradient_examples(y, others, expected):
    np.testing.assert_allclose(contribution_gradient(y, others, Z), expected, atol=1e-15)


def central_difference(landscape, y, h=1e-6):
    g = np.empty(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        g[i] = (landscape.value(y + e) - landscape.value(y - e)) / (2 * h)
    return g


@settings(max_examples=200)
@given(point_sets, unit_point)
def test_gradient_matches_central_differences(points, y):
    landscape = ContributionLandscape(points, Z)
    # stay clear of the kinks where a neighbour's coordinate is crossed
    margin = 1e-4
    assume(np.all(np.abs(points - y) > margin) if len(points) else True)
    assume(np.all(Z - y > margin))
    assume(landscape.value(y) > 0)
    np.testing.assert_allclose(landscape.gradient(y), central_difference(landscape, y), atol=1e-5)


@pytest.mark.parametrize("y,others", [
    ([0.5, 0.5], [[0.4, 0.4]]),        # dominated
    ([0.5, 0.5], [[0.5, 0.4]]),        # weakly dominated
    ([0.5, 0.5], [[0.5, 0.7]]),        # tie in first coordinate
    ([1.0, 0.5], []),                  # not below the nadir
])
def test_gradient_undefined_cases(y, others):
    with pytest.raises(UndefinedGradientError):
        contribution_gradient(y, others, Z)


def test_numeric_fallback_at_a_tie():
    landscape = ContributionLandscape([[0.5, 0.7]], Z)
    g = landscape.numeric_gradient(np.array([0.5, 0.5]))
    # past the tie the neighbour sits to the right and no longer caps the box
    np.testing.assert_allclose(g, [-0.5, -0.5], atol=1e-6)


def test_oracle_examples():
    est, se = mc_hypervolume_oracle([[0.0, 0.0]], Z, 10**6)
    assert abs(est - 1.0) <= 3 * se + 1e-12
    est, se = mc_hypervolume_oracle(THREE_STEP, Z, 10**6, seed=1)
    assert abs(est - 0.375) <= 3 * se
    assert mc_hypervolume_oracle([], Z, 1000) == (0.0, 0.0)


def test_oracle_agrees_on_random_instances():
    rng = np.random.default_rng(7)
    for k in range(30):
        P = rng.random((rng.integers(1, 11), 2))
        est, se = mc_hypervolume_oracle(P, Z, 200_000, seed=k)
        assert abs(est - hypervolume(P, Z)) <= 4 * se + 1e-12


def test_nondominated_subset_has_same_hypervolume():
    rng = np.random.default_rng(3)
    P = rng.random((40, 2))
    assert hypervolume(P[nondominated_mask(P)], Z) == pytest.approx(hypervolume(P, Z), abs=1e-14)
