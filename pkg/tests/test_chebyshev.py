import numpy as np
import pytest

from hyperapprox.chebyshev import basis_dimension, best_approx, scalar_bws_rate
from hyperapprox.sets_metrics import sample_box, sample_segment
from tests.oracles import exp_cheb_tail, grid_minimax_constant


@pytest.fixture(scope="module")
def segment_401():
    return sample_segment(-1.0, 1.0, 401)


def test_reproduces_polynomial(segment_401):
    x = segment_401.points[:, 0]
    f = 0.3 * x ** 3 - 1.2 * x + 0.7
    res = best_approx(f, segment_401, 5)
    assert res.error <= 1e-10
    assert np.abs(res.poly.evaluate_many(segment_401.points) - f).max() <= 1e-9


def test_constant_minimax_matches_grid_oracle(segment_401):
    f = np.exp(segment_401.points[:, 0]).real
    res = best_approx(f, segment_401, 0, mode="minimax")
    oracle = grid_minimax_constant(f)
    assert res.error == pytest.approx(oracle, rel=1e-3)
    assert res.error == pytest.approx((np.e - 1.0 / np.e) / 2.0, rel=1e-3)


def test_least_squares_upper_bounds_minimax(segment_401):
    f = np.exp(segment_401.points[:, 0])
    for d in (0, 2, 5):
        mm = best_approx(f, segment_401, d, mode="minimax").error
        ls = best_approx(f, segment_401, d, mode="least-squares").error
        assert mm <= ls + 1e-15


def test_error_monotone_in_degree(segment_401):
    f = np.exp(segment_401.points[:, 0])
    errs = [best_approx(f, segment_401, d).error for d in range(0, 12)]
    for lo, hi in zip(errs[1:], errs[:-1]):
        assert lo <= hi + 1e-12


def test_rank_error_names_rank():
    sc = sample_segment(-1.0, 1.0, 5)
    with pytest.raises(ValueError, match="rank"):
        best_approx(np.ones(5), sc, 5)


def test_rejects_bad_mode(segment_401):
    with pytest.raises(ValueError):
        best_approx(np.ones(segment_401.count), segment_401, 1, mode="remez")


def test_basis_dimension():
    assert basis_dimension(1, 4) == 5
    assert basis_dimension(2, 3) == 10


def test_two_variable_fit():
    K = sample_box([(-1.0, 1.0), (-1.0, 1.0)], per_axis=15)
    x, y = K.points[:, 0], K.points[:, 1]
    f = (x * y + 0.5 * x ** 2).real
    res = best_approx(f, K, 2)
    assert res.error <= 1e-10


def test_scalar_rate_exp_geometric(segment_401):
    f = np.exp(segment_401.points[:, 0])
    fit = scalar_bws_rate(f, segment_401, range(0, 16))
    assert fit.verdict == "geometric"
    assert fit.theta < 0.5


def test_scalar_rate_exp_cross_checked_against_chebyshev_series(segment_401):
    f = np.exp(segment_401.points[:, 0])
    for d in range(2, 11):
        err = best_approx(f, segment_401, d).error
        tail = exp_cheb_tail(d)
        # the series tail is an upper bound and tight within a small factor
        assert err <= tail * 1.01 + 1e-13
        assert err >= 0.05 * tail


def test_scalar_rate_abs_not_geometric(segment_401):
    f = np.abs(segment_401.points[:, 0])
    fit = scalar_bws_rate(f, segment_401, range(0, 31, 2))
    assert fit.verdict == "not-geometric"


def test_scalar_rate_polynomial_floor(segment_401):
    x = segment_401.points[:, 0]
    f = x ** 2 - 0.25
    fit = scalar_bws_rate(f, segment_401, range(2, 9), floor=1e-10)
    assert fit.verdict == "geometric"
    assert fit.theta == 0.0


def test_scalar_rate_needs_six_degrees(segment_401):
    with pytest.raises(ValueError):
        scalar_bws_rate(np.ones(segment_401.count), segment_401, [1, 2, 3])
