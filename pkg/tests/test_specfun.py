import math

import numpy as np
import pytest

from ggbm import specfun
from ggbm.errors import RangeError
from pins import GGBM_PDF0, ML, ML_DERIV, MU_08_15  # noqa: F401


@pytest.mark.parametrize("key", sorted(ML))
def test_mittag_leffler_matches_pins(key):
    beta, x = key
    assert specfun.mittag_leffler(beta, -x) == pytest.approx(ML[key], abs=1e-10)


@pytest.mark.parametrize("key", sorted(ML_DERIV))
def test_mittag_leffler_derivative_pins(key):
    beta, n = key
    assert specfun.mittag_leffler_deriv(beta, -1.0, n) == pytest.approx(ML_DERIV[key], abs=1e-10)


def test_e1_is_exp():
    xs = np.linspace(-30, 2, 641)
    err = max(abs(specfun.mittag_leffler(1.0, float(x)) - math.exp(x)) for x in xs)
    assert err <= 1e-12


def test_half_order_closed_form():
    # E_{1/2}(-x) = exp(x^2) erfc(x)
    from scipy.special import erfcx

    for x in (0.1, 1.0, 3.0, 10.0):
        assert specfun.mittag_leffler(0.5, -x) == pytest.approx(erfcx(x), rel=1e-12)


def test_mittag_leffler_positive_argument():
    assert specfun.mittag_leffler(0.5, 1.0) == pytest.approx(math.e * math.erfc(-1.0), rel=1e-12)
    with pytest.raises(ValueError):
        specfun.mittag_leffler(0.5, 11.0)


def test_mittag_leffler_vectorized_and_monotone():
    xs = np.linspace(0, 30, 301)
    e = specfun.mittag_leffler(0.7, -xs)
    assert e.shape == xs.shape
    assert np.all(np.diff(e) < 0) and np.all(e > 0)


def test_derivative_high_order_is_finite_and_positive():
    # derivatives of a completely monotone function alternate around 0 on -x
    for n in (3, 5, 10):
        v = specfun.mittag_leffler_deriv(0.6, -1.0, n)
        assert v > 0 and math.isfinite(v)
    assert specfun.mittag_leffler_deriv(0.6, -1.0, 0) == specfun.mittag_leffler(0.6, -1.0)


def test_derivative_matches_finite_difference():
    h = 1e-4
    f = lambda x: specfun.mittag_leffler(0.7, x)  # noqa: E731
    fd = (f(-2 + h) - f(-2 - h)) / (2 * h)
    assert specfun.mittag_leffler_deriv(0.7, -2.0, 1) == pytest.approx(fd, rel=1e-7)


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.2])
def test_beta_out_of_range(bad):
    with pytest.raises(ValueError):
        specfun.mittag_leffler(bad, -1.0)


def test_m_wright_half_is_gaussian():
    zs = np.linspace(0, 8, 161)
    got = specfun.m_wright_density(0.5, zs)
    want = np.exp(-zs ** 2 / 4) / math.sqrt(math.pi)
    assert np.max(np.abs(got - want)) <= 1e-9


def test_m_wright_methods_agree():
    for b in (0.3, 0.6, 0.8):
        for x in (0.2, 1.0, 2.0):
            s = specfun.m_wright_density(b, x, method="series")
            i = specfun.m_wright_density(b, x, method="integral")
            assert s == pytest.approx(i, rel=1e-8, abs=1e-13)


def test_m_wright_series_reports_cancellation():
    with pytest.raises(RangeError):
        specfun.m_wright_density(0.8, 26.0, method="series")
    assert specfun.m_wright_density(0.8, 26.0) >= 0.0


def test_m_wright_at_zero():
    assert specfun.m_wright_density(0.3, 0.0) == pytest.approx(1 / math.gamma(0.7), rel=1e-13)


def test_m_wright_normalisation_and_laplace():
    from scipy import integrate

    f = lambda x: specfun.m_wright_density(0.6, x)  # noqa: E731
    assert integrate.quad(f, 0, 40, limit=200)[0] == pytest.approx(1.0, abs=1e-8)
    lap = integrate.quad(lambda x: math.exp(-1.5 * x) * f(x), 0, 40, limit=200)[0]
    assert lap == pytest.approx(specfun.mittag_leffler(0.6, -1.5), abs=1e-8)


def test_m_wright_survival():
    from scipy import integrate

    assert specfun.m_wright_survival(0.6, 0.0) == 1.0
    tail = integrate.quad(lambda x: specfun.m_wright_density(0.6, x), 1.0, 40, limit=200)[0]
    assert specfun.m_wright_survival(0.6, 1.0) == pytest.approx(tail, abs=1e-8)


def test_m_wright_two_var_scaling():
    t, tau = 2.0, 0.7
    s = t ** -0.6
    assert specfun.m_wright_two_var(0.6, tau, t) == pytest.approx(
        s * specfun.m_wright_density(0.6, s * tau), rel=1e-14)
    with pytest.raises(ValueError):
        specfun.m_wright_two_var(0.6, tau, 0.0)


def test_moments_and_mu():
    assert specfun.m_wright_moment(0.5, 2.0) == pytest.approx(2 / math.gamma(2.0))
    assert specfun.gaussian_abs_moment(2.0) == pytest.approx(1.0, rel=1e-14)
    assert specfun.gaussian_abs_moment(1.0) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-14)
    assert specfun.mu_beta_alpha(0.8, 1.5) == pytest.approx(MU_08_15, rel=1e-13)
    # beta = 1 reduces to fBm: E|Z|^(2/alpha)
    assert specfun.mu_beta_alpha(1.0, 1.0) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        specfun.mu_beta_alpha(1.0, 2.0)
    with pytest.raises(ValueError):
        specfun.m_wright_moment(0.5, -1.0)


def test_gamma_matches_math():
    for x in (0.1, 0.5, 1.0, 2.5, 7.3, 20.0, -0.5, -2.3):
        assert specfun.gamma_fn(x) == pytest.approx(math.gamma(x), rel=1e-13)
    for x in (0.3, 5.0, 100.0):
        assert specfun.log_gamma(x) == pytest.approx(math.lgamma(x), rel=1e-13, abs=1e-14)


def test_eval_config_validation():
    with pytest.raises(ValueError):
        specfun.EvalConfig(series_tolerance=0)
    with pytest.raises(ValueError):
        specfun.EvalConfig(quadrature_nodes=2)
