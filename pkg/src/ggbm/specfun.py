"""Mittag-Leffler and M-Wright functions and the constants built from them.

Everything here is a pure function of its arguments. Scalars in, float out;
array arguments are evaluated elementwise.

On the negative real axis the Mittag-Leffler series is alternating and loses
precision quickly, so past a conditioning threshold ``mittag_leffler`` switches
to the real-axis (Titchmarsh) integral

    E_b(-x) = sin(b pi) / (b pi) * int_0^inf exp(-(x v)^(1/b)) / (v^2 + 2 v cos(b pi) + 1) dv.

The M-Wright density has the same issue; beyond the series range it is
evaluated from Kanter's representation of the one-sided stable law,

    M_b(y) = y^(b/(1-b)) / (1-b) * int_0^1 A(u) exp(-A(u) y^(1/(1-b))) du,

which is what ``sampling.sample_m_wright`` draws from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, RangeError

__all__ = [
    "EvalConfig",
    "MLParams",
    "gamma_fn",
    "log_gamma",
    "mittag_leffler",
    "mittag_leffler_deriv",
    "m_wright_density",
    "m_wright_survival",
    "m_wright_log_quad",
    "m_wright_two_var",
    "m_wright_moment",
    "mu_beta_alpha",
    "gaussian_abs_moment",
    "kanter_a",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EvalConfig:
    """Accuracy budget for the special functions.

    ``quadrature_nodes`` is the subinterval limit handed to the adaptive
    quadrature used by the integral representations.
    """

    series_tolerance: float = 1e-13
    max_terms: int = 4000
    quadrature_nodes: int = 200

    def __post_init__(self):
        if not self.series_tolerance > 0:
            raise ValueError("series_tolerance must be > 0")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if self.quadrature_nodes < 8:
            raise ValueError("quadrature_nodes must be >= 8")


DEFAULT_CONFIG = EvalConfig()


@dataclass(frozen=True)
class MLParams:
    beta: float

    def __post_init__(self):
        _check_beta(self.beta)


def _check_beta(beta, allow_one=True):
    ok = 0 < beta <= 1 if allow_one else 0 < beta < 1
    if not ok:
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise ValueError(f"beta must lie in {bound}, got {beta!r}")


def _elementwise(fn):
    """Let a scalar kernel accept array-likes for its last positional argument."""

    def wrapper(*args, **kwargs):
        x = args[-1] if args else None
        if np.ndim(x) == 0:
            return fn(*args, **kwargs)
        head = args[:-1]
        arr = np.asarray(x, dtype=float)
        out = np.empty(arr.shape)
        for idx, v in np.ndenumerate(arr):
            out[idx] = fn(*head, float(v), **kwargs)
        return out

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    wrapper.__wrapped__ = fn
    return wrapper


# ---------------------------------------------------------------------------
# Gamma function (Lanczos, g = 7, n = 9)
# ---------------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_sum(z):
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc = acc + _LANCZOS[i] / (z + i)
    return acc


def log_gamma(x):
    """log Gamma(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("log_gamma is only defined here for x > 0")
    small = x < 0.5
    # reflection keeps the Lanczos sum in its accurate range
    xr = np.where(small, 1.0 - x, x)
    z = xr - 1.0
    t = z + _LANCZOS_G + 0.5
    lg = _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(_lanczos_sum(z))
    if np.any(small):
        refl = np.log(np.pi / np.abs(np.sin(np.pi * x))) - lg
        lg = np.where(small, refl, lg)
    return lg[()] if lg.ndim == 0 else lg


def gamma_fn(x):
    """Gamma(x) for real x outside the poles {0, -1, -2, ...}.

    Lanczos approximation, with Euler's reflection below 1/2.
    """
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) & (x == np.round(x))):
        raise ValueError("Gamma has a pole at nonpositive integers")
    small = x < 0.5
    xr = np.where(small, 1.0 - x, x)
    z = xr - 1.0
    t = z + _LANCZOS_G + 0.5
    # split the power so Gamma(50) does not overflow in the intermediate
    half = np.power(t, 0.5 * (z + 0.5))
    g = math.sqrt(2.0 * math.pi) * half * np.exp(-t) * half * _lanczos_sum(z)
    if np.any(small):
        g = np.where(small, np.pi / (np.sin(np.pi * x) * g), g)
    return float(g) if g.ndim == 0 else g


# ---------------------------------------------------------------------------
# Mittag-Leffler function
# ---------------------------------------------------------------------------


def _ml_series(beta, x, deriv, cfg, give_up=math.inf):
    """Differentiated power series, summed exactly (fsum) with an error bound.

    Returns (value, rounding_bound). Terms are formed in log space so that
    Gamma overflow never enters. Summation stops early, returning an infinite
    bound, once the rounding bound passes ``give_up``.
    """
    tol = cfg.series_tolerance
    terms = []
    bound = 0.0
    if x == 0.0:
        return math.factorial(deriv) * math.exp(-log_gamma(beta * deriv + 1.0)), 0.0
    lx = math.log(abs(x))
    neg = x < 0
    past_peak = 0
    prev = -math.inf
    for n in range(deriv, deriv + cfg.max_terms):
        k = n - deriv
        lt = (
            math.lgamma(n + 1.0) - math.lgamma(k + 1.0)
            + k * lx
            - log_gamma(beta * n + 1.0)
        )
        if lt > 700:
            raise ConvergenceError(
                f"Mittag-Leffler series overflows at x={x}; argument outside supported range"
            )
        mag = math.exp(lt)
        t = -mag if (neg and k % 2) else mag
        terms.append(t)
        bound += mag * (abs(lt) + 4.0) * _EPS
        if bound > give_up:
            return math.nan, math.inf
        if lt < prev:
            past_peak += 1
        prev = lt
        if past_peak > 2 and mag < 1e-3 * tol * _EPS:
            break
    else:
        raise ConvergenceError(
            f"Mittag-Leffler series did not converge within {cfg.max_terms} terms at x={x}"
        )
    return math.fsum(terms), bound


def _ml_integral(beta, x, cfg):
    """E_beta(-x), x > 0, from the real-axis integral (0 < beta < 1)."""
    c = math.cos(beta * math.pi)
    inv_b = 1.0 / beta

    def f(w):
        r = w / x
        return math.exp(-(w ** inv_b)) / (r * r + 2.0 * r * c + 1.0)

    # the kernel exp(-w^(1/b)) is negligible beyond w_max
    w_max = 40.0 ** beta
    opts = dict(epsabs=1e-15, epsrel=1e-13, limit=cfg.quadrature_nodes)
    if x < w_max:
        v = integrate.quad(f, 0.0, x, **opts)[0] + integrate.quad(f, x, w_max, **opts)[0]
    else:
        v = integrate.quad(f, 0.0, w_max, **opts)[0]
    return math.sin(beta * math.pi) / (beta * math.pi) * v / x


@_elementwise
def mittag_leffler(beta, x, cfg=DEFAULT_CONFIG):
    """Mittag-Leffler function E_beta(x) = sum_n x^n / Gamma(beta n + 1).

    Supported on the negative axis and on 0 <= x <= 10. For beta = 1 this is
    exp(x) to working precision.

    Raises:
        ValueError: beta outside (0, 1] or x > 10.
        ConvergenceError: the series cannot reach ``cfg.series_tolerance``.
    """
    _check_beta(beta)
    x = float(x)
    if x > 10:
        raise ValueError("mittag_leffler supports x <= 10")
    if beta == 1.0:
        return math.exp(x)
    if x == 0.0:
        return 1.0
    if x < 0 and -x <= 5.0:
        val, err = _ml_series(beta, x, 0, cfg, give_up=cfg.series_tolerance)
        if err <= cfg.series_tolerance:
            return val
    if x < 0:
        return _ml_integral(beta, -x, cfg)
    val, err = _ml_series(beta, x, 0, cfg)
    if err > cfg.series_tolerance * max(1.0, abs(val)):
        raise ConvergenceError(f"Mittag-Leffler series ill-conditioned at x={x}")
    return val


@_elementwise
def mittag_leffler_deriv(beta, x, n=0, cfg=DEFAULT_CONFIG):
    """n-th derivative of E_beta evaluated at x <= 0, for n <= 20.

    Term-wise differentiated series while it is well conditioned. Otherwise
    the moment form E_beta^(n)(-s) = int_0^inf tau^n exp(-s tau) M_beta(tau) dtau
    is integrated, whose integrand is positive (error relative to
    max(1, |value|)). ``n = 0`` is routed through :func:`mittag_leffler` so the
    two agree bit for bit.
    """
    if n == 0:
        return mittag_leffler.__wrapped__(beta, x, cfg)
    _check_beta(beta)
    if not 0 <= n <= 20:
        raise ValueError("derivative order must satisfy 0 <= n <= 20")
    if x > 0:
        raise ValueError("mittag_leffler_deriv requires x <= 0")
    if beta == 1.0:
        return math.exp(x)
    val, err = _ml_series(beta, float(x), n, cfg, give_up=cfg.series_tolerance)
    if err <= cfg.series_tolerance:
        return val
    val, err = _ml_deriv_integral(beta, float(x), n, cfg)
    if not err <= cfg.series_tolerance * max(1.0, abs(val)) * 10:
        raise ConvergenceError(
            f"derivative of order {n} at x={x} not resolved (error estimate {err:.1e})"
        )
    return val


def _ml_deriv_integral(beta, x, n, cfg):
    return m_wright_log_quad(beta, lambda tau: tau ** n * np.exp(x * tau), cfg)


# ---------------------------------------------------------------------------
# M-Wright function
# ---------------------------------------------------------------------------


def kanter_a(u, beta):
    """Kanter's function A(u) on (0, 1); increasing, A(0+) = (1-b) b^(b/(1-b))."""
    u = np.asarray(u, dtype=float)
    pu = np.pi * u
    b = beta
    return (
        np.sin((1 - b) * pu)
        * np.sin(b * pu) ** (b / (1 - b))
        / np.sin(pu) ** (1 / (1 - b))
    )


def _mw_series(beta, x, cfg, give_up=math.inf):
    """M_b(x) = (1/pi) sum_n (-x)^n / n! Gamma(b(n+1)) sin(pi b (n+1)).

    Returns (value, rounding_bound, largest_term); the value is nan if the
    rounding bound passes ``give_up`` first.
    """
    if x == 0.0:
        return math.exp(-log_gamma(1.0 - beta)), 0.0, 0.0
    lx = math.log(x)
    terms = []
    bound = 0.0
    biggest = 0.0
    prev = -math.inf
    past_peak = 0
    tol = cfg.series_tolerance
    for n in range(cfg.max_terms):
        lt = n * lx - math.lgamma(n + 1.0) + log_gamma(beta * (n + 1.0))
        if lt > 700.0:  # terms overflow; no digits can survive the cancellation
            return math.nan, math.inf, math.inf
        env = math.exp(lt) / math.pi
        t = env * math.sin(math.pi * beta * (n + 1.0))
        if n % 2:
            t = -t
        terms.append(t)
        biggest = max(biggest, env)
        bound += env * (abs(lt) + 4.0) * _EPS
        if bound > give_up:
            return math.nan, bound, biggest
        if lt < prev:
            past_peak += 1
        prev = lt
        if past_peak > 2 and env < 1e-3 * tol * _EPS:
            break
    else:
        raise ConvergenceError(f"M-Wright series did not converge at x={x}")
    return math.fsum(terms), bound, biggest


def _mw_integral(beta, x, cfg):
    b = beta
    c = 1.0 / (1.0 - b)
    xc = x ** c

    def f(u):
        a = float(kanter_a(u, b))
        return a * math.exp(-a * xc)

    # purely relative tolerance: tail values get multiplied by large powers of x
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=cfg.quadrature_nodes)
    v = integrate.quad(f, 0.0, 0.5, **opts)[0] + integrate.quad(f, 0.5, 1.0, **opts)[0]
    return c * x ** (b * c) * v


@_elementwise
def m_wright_density(beta, x, method="auto", cfg=DEFAULT_CONFIG):
    """M-Wright density M_beta(x) on x >= 0 for 0 < beta < 1.

    ``method="series"`` sums the power series in exactly rounded arithmetic and
    raises :class:`RangeError` when cancellation would exceed the tolerance
    budget. ``"integral"`` uses Kanter's representation. ``"auto"`` takes the
    series where it is safe and the integral elsewhere.
    """
    _check_beta(beta, allow_one=False)
    x = float(x)
    if x < 0:
        raise ValueError("M-Wright density is supported on x >= 0")
    if method not in ("auto", "series", "integral"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        try:
            val, err, _ = _mw_series(beta, x, cfg, give_up=cfg.series_tolerance)
        except ConvergenceError:
            err = math.inf
        if err <= cfg.series_tolerance:
            return max(val, 0.0)
    elif method == "series":
        val, err, biggest = _mw_series(beta, x, cfg)
        if err <= cfg.series_tolerance:
            return max(val, 0.0)
        raise RangeError(
            f"M-Wright series cancellation at x={x}: largest term {biggest:.3e}, "
            f"rounding bound {err:.1e} exceeds tolerance {cfg.series_tolerance:.1e}"
        )
    if x == 0.0:
        return math.exp(-log_gamma(1.0 - beta))
    return _mw_integral(beta, x, cfg)


@_elementwise
@lru_cache(maxsize=16)
def _m_wright_log_table(beta, cfg):
    """(s, h, M_beta(e^s)) on a uniform grid in s = log tau.

    M_beta(e^s) is analytic in the strip |Im s| < (1 - beta) pi / 2, which sets
    the trapezoid step for ~1e-14 accuracy; the table is stored at half that
    step so the coarse rule doubles as an error estimate. The upper end covers
    tau^21 M_beta(tau), enough for moments up to order 20.
    """
    h = 0.5 * min(1.0 / 16, math.pi ** 2 * (1.0 - beta) / 48)
    hi = 1.0
    while hi ** 21 * m_wright_density.__wrapped__(beta, hi, "auto", cfg) > 1e-18:
        hi *= 1.25
    s = np.arange(-45.0, math.log(hi) + h, h)
    m = np.array([m_wright_density.__wrapped__(beta, float(t), "auto", cfg) for t in np.exp(s)])
    return s, h, m


def m_wright_log_quad(beta, g, cfg=DEFAULT_CONFIG):
    """int_0^inf g(tau) M_beta(tau) dtau for a vectorised, smooth g; returns (value, error bound).

    Trapezoid rule in s = log tau on a cached table of M_beta. Valid when g(e^s) e^s
    is analytic near the real axis and negligible below tau = e^-45.
    """
    _check_beta(beta, allow_one=False)
    s, h, m = _m_wright_log_table(float(beta), cfg)
    tau = np.exp(s)
    f = g(tau) * tau * m
    fine = h * math.fsum(f)
    coarse = 2 * h * math.fsum(f[::2])
    # the tabulated density itself is good to a few 1e-13 relative
    return fine, abs(fine - coarse) + 5e-13 * abs(fine)


def m_wright_survival(beta, x, cfg=DEFAULT_CONFIG):
    """P(Y > x) for Y with density M_beta: int_0^1 exp(-A(u) x^(1/(1-b))) du."""
    _check_beta(beta, allow_one=False)
    x = float(x)
    if x <= 0:
        return 1.0
    xc = x ** (1.0 / (1.0 - beta))
    opts = dict(epsabs=1e-15, epsrel=1e-12, limit=cfg.quadrature_nodes)
    f = lambda u: math.exp(-float(kanter_a(u, beta)) * xc)  # noqa: E731
    return integrate.quad(f, 0.0, 0.5, **opts)[0] + integrate.quad(f, 0.5, 1.0, **opts)[0]


def m_wright_two_var(beta, tau, t, cfg=DEFAULT_CONFIG):
    """Density of U_beta(t): t^-beta M_beta(t^-beta tau)."""
    if not t > 0:
        raise ValueError("t must be > 0")
    s = t ** (-beta)
    return s * m_wright_density(beta, np.multiply(s, tau), cfg=cfg)


def m_wright_moment(beta, delta):
    """Absolute moment of order delta > -1 of M_beta: Gamma(d+1) / Gamma(b d + 1)."""
    _check_beta(beta)
    if not delta > -1:
        raise ValueError("moment order must exceed -1")
    return math.exp(log_gamma(delta + 1.0) - log_gamma(beta * delta + 1.0))


def gaussian_abs_moment(q):
    """E|Z|^q for standard normal Z, q > -1."""
    if not q > -1:
        raise ValueError("moment order must exceed -1")
    return 2.0 ** (q / 2) * math.exp(log_gamma((q + 1.0) / 2)) / math.sqrt(math.pi)


def mu_beta_alpha(beta, alpha):
    """E|B_{beta,alpha}(1)|^(2/alpha) for generalized grey Brownian motion.

    B(1) = sqrt(Y) Z with Y ~ M_beta and Z standard normal independent, so the
    moment factors as E[Y^(1/alpha)] E|Z|^(2/alpha).
    """
    _check_beta(beta)
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    return m_wright_moment(beta, 1.0 / alpha) * gaussian_abs_moment(2.0 / alpha)
