import numpy as np
import pytest

from conftest import within_se
from ggbm.errors import PreconditionError
from ggbm.paths import DyadicGrid, ProcessSpec, sample_tcbm, simulate_ensemble
from ggbm.sampling import derive_stream
from ggbm.sde import (
    OUTSIDE_REGIME,
    PROVEN_REGIME,
    CoefficientSpec,
    solution_singularity_experiment,
    solve_time_changed,
    solve_time_changed_ensemble,
    solve_young,
    young_closed_form_error,
)


def _ggbm(level=12, seed=1):
    return simulate_ensemble(ProcessSpec.ggbm(0.8, 1.5), level, 1, seed).paths()[0]


def test_coefficients():
    assert CoefficientSpec.constant(2)(5.0) == 2.0
    assert CoefficientSpec.linear(2)(5.0) == 10.0
    assert CoefficientSpec.affine(2, 1)(5.0) == 11.0
    t = CoefficientSpec.table([0, 1, 2], [0, 1, 1], lipschitz=1.0)
    assert t(0.5) == 0.5 and t(3.0) == 1.0 and t.smoothness == 0.0
    assert CoefficientSpec.constant(0).is_zero and not CoefficientSpec.linear(1).is_zero
    assert CoefficientSpec.linear(0.5).label() == "LINEAR(0.5)"
    with pytest.raises(ValueError):
        CoefficientSpec.table([0, 1], [0, 3], lipschitz=1.0)
    with pytest.raises(ValueError):
        CoefficientSpec.table([0, 0], [0, 0], lipschitz=1.0)
    with pytest.raises(ValueError):
        CoefficientSpec("CUBIC")


def test_constant_coefficient_reproduces_driver():
    d = _ggbm()
    sol = solve_young(CoefficientSpec.constant(1.0), None, 0.0, d)
    assert np.allclose(sol.values, d.values, rtol=0, atol=1e-12)
    assert sol.regime == PROVEN_REGIME


def test_young_linear_converges_to_exponential():
    d = _ggbm(14)
    errs = young_closed_form_error(0.5, 1.0, d, range(10, 15))
    assert errs[14] <= 0.02
    assert all(errs[m + 1] < errs[m] for m in range(10, 14))


def test_young_drift():
    # dX = b dt with a zero-noise coefficient is exact Euler on t
    d = _ggbm(6)
    sol = solve_young(CoefficientSpec.constant(0.0), CoefficientSpec.constant(2.0), 1.0, d)
    assert np.allclose(sol.values, 1 + 2 * d.times)


def test_young_regime_checks():
    d = _ggbm(8)
    rough = CoefficientSpec.table([0, 1, 2], [0, 1, 1], lipschitz=1.0, smoothness=0.0)
    with pytest.raises(PreconditionError):
        solve_young(rough, None, 1.0, d)
    sol = solve_young(rough, None, 1.0, d, allow_outside_regime=True)
    assert sol.regime == OUTSIDE_REGIME and sol.path.meta["regime"] == OUTSIDE_REGIME
    smooth = CoefficientSpec.table([0, 1, 2], [0, 1, 1], lipschitz=1.0, smoothness=0.5)
    assert solve_young(smooth, None, 1.0, d).regime == PROVEN_REGIME
    tc = sample_tcbm(0.8, 1.5, DyadicGrid(8), derive_stream(1, 0))
    with pytest.raises(PreconditionError):
        solve_young(CoefficientSpec.linear(1.0), None, 1.0, tc)
    bm = simulate_ensemble(ProcessSpec.bm(), 8, 1, 1).paths()[0]
    with pytest.raises(PreconditionError):
        solve_young(CoefficientSpec.linear(1.0), None, 1.0, bm)


def test_time_changed_unit_coefficient_is_tcbm():
    grid = DyadicGrid(9)
    sol = solve_time_changed(CoefficientSpec.constant(1.0), None, 0.0, 0.8, 1.5, grid,
                             derive_stream(5, 2))
    path = sample_tcbm(0.8, 1.5, grid, derive_stream(5, 2))
    assert np.array_equal(sol.values, path.values)
    flat = np.diff(path.meta["time_change"]) == 0
    assert np.all(np.diff(sol.values)[flat] == 0)


def test_time_changed_ensemble_matches_single():
    f, b = CoefficientSpec.linear(0.5), CoefficientSpec.affine(-0.1, 0.2)
    t, y = solve_time_changed_ensemble(f, b, 1.0, 0.8, 1.5, 7, 4, 11, workers=2)
    for i in range(4):
        s = solve_time_changed(f, b, 1.0, 0.8, 1.5, DyadicGrid(7), derive_stream(11, i))
        assert np.array_equal(y[i], s.values)
    assert np.array_equal(t, DyadicGrid(7).times)


def test_time_changed_linear_is_mean_preserving():
    _, y = solve_time_changed_ensemble(CoefficientSpec.linear(0.5), None, 1.0, 0.8, 1.5, 4,
                                       50_000, 3, keep=[16])
    assert within_se(y[:, -1], 1.0)


def test_solution_singularity_experiment():
    one = CoefficientSpec.constant(1.0)
    with pytest.raises(PreconditionError):
        solution_singularity_experiment(CoefficientSpec.constant(0.0), one, 0.8, 1.5, 2, 10, 1)
    r = solution_singularity_experiment(CoefficientSpec.linear(0.5), CoefficientSpec.linear(0.5),
                                        0.8, 1.5, 20, 13, 7, workers=2)
    assert r.accuracy >= 0.9
