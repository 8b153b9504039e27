"""Frozen reference values.

Produced by ``tests/oracles/generate_pins.py`` (mpmath, independent of the
package). Mittag-Leffler values at |x| <= 5 come from the power series at
adaptive precision and agree with the spectral integral; values at x = 20 come
from the spectral integral; beta = 1/2 values also agree with exp(x^2) erfc(x).
"""

# E_beta(-x), keyed by (beta, x)
ML = {
    (0.3, 0.5): 0.63264900594359902246,
    (0.3, 1.0): 0.45659440832969067062,
    (0.3, 2.0): 0.29023222616787535504,
    (0.3, 5.0): 0.13708086902027063889,
    (0.3, 20.0): 0.037406226213884450844,
    (0.5, 0.5): 0.61569034419292587487,
    (0.5, 1.0): 0.42758357615580700441,
    (0.5, 2.0): 0.25539567631050574387,
    (0.5, 5.0): 0.11070463773306862637,
    (0.5, 20.0): 0.028174348741051319319,
    (0.7, 0.5): 0.60514759205956427271,
    (0.7, 1.0): 0.39961197811559939027,
    (0.7, 2.0): 0.21378672701529727534,
    (0.7, 5.0): 0.077569357764769809981,
    (0.7, 20.0): 0.01739569829160397999,
    (0.9, 0.5): 0.603405498695860968,
    (0.9, 1.0): 0.37606602142464187902,
    (0.9, 2.0): 0.16352830001693004278,
    (0.9, 5.0): 0.034431324804098418323,
    (0.9, 20.0): 0.0057495078161091125836,
    (0.6, 1.0): 0.41332734094310630052,
}

# E_beta^(n)(-1), keyed by (beta, n)
ML_DERIV = {
    (0.5, 1): 0.27321201478389856507,
    (0.5, 2): 0.30874312274381687867,
    (0.6, 1): 0.28517047230652793073,
    (0.6, 2): 0.32562493794109913005,
}

# fPp pmf, beta = 1/2, lambda = t = 1, n = 2
FPP_PMF_HALF_2 = 0.15437156137190843934

# fPp pmf, beta = 0.6, lambda = 1, t = 2, n = 0, 1, 2
FPP_PMF_06_T2 = (0.30058386667318317185, 0.25181956614181694395, 0.18324413447566140248)

# ggBm one-point density at 0 for beta = 0.8, alpha = 1.5, t = 1
GGBM_PDF0 = 0.4748257196142757915

# mu_{beta, alpha} for beta = 0.8, alpha = 1.5
MU_08_15 = 0.84488388579008251857
