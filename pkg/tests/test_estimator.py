import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from h2ma import H2MA, make_problem
from h2ma.hypervolume import hypervolume


def test_params_round_trip():
    est = H2MA(budget=500, gradient_mode="analytic", random_state=3)
    params = est.get_params()
    assert params["budget"] == 500 and params["random_state"] == 3
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(budget=800)
    assert est.budget == 800


def test_fit_sets_attributes():
    problem = make_problem("zdt2")
    est = H2MA(budget=2000).fit(problem)
    assert est.n_evaluations_ <= 2000
    assert est.pareto_front_.shape[1] == 2
    assert est.pareto_set_.shape == (len(est.pareto_front_), 30)
    assert est.hypervolume_ == hypervolume(est.pareto_front_, problem.nadir)
    assert est.score() == est.hypervolume_


def test_fit_by_name_and_seeded_repeatability():
    a = H2MA(budget=1500, random_state=5).fit("zdt6")
    b = H2MA(budget=1500, random_state=5).fit("zdt6")
    np.testing.assert_array_equal(a.pareto_front_, b.pareto_front_)


def test_unfitted_score_raises():
    with pytest.raises(NotFittedError):
        H2MA().score()


@pytest.mark.parametrize("bad", [dict(random_state=None), dict(budget=0),
                                 dict(gradient_mode="x")])
def test_invalid_params_raise_at_fit(bad):
    with pytest.raises(ValueError):
        H2MA(**bad).fit("zdt1")


def test_fit_rejects_arrays():
    with pytest.raises(TypeError):
        H2MA().fit(np.zeros((3, 2)))
