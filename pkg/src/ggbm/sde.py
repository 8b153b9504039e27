"""SDEs driven by ggBm (pathwise, Young regime) and by time-changed Bm.

* ``solve_young``: forward Euler X_{i+1} = X_i + g(X_i) dB_i + b(X_i) dt on the
  driver's grid. For drivers of p-variation index p < 2 and g in C^{1+k},
  k > p - 1, this converges pathwise to the Young solution (no Ito correction),
  e.g. x0 exp(c B) for g(x) = c x.
* ``solve_time_changed``: simulate u_i = U_{beta,alpha}(t_i), run
  Euler-Maruyama for dZ = f(Z) dW + b(Z) ds on the u-grid and return
  Y_i = Z(u_i), i.e. the solution written as Z o U.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .discriminate import DEFAULT_DISCRIMINATOR, confusion_experiment
from .errors import PreconditionError
from .paths import DyadicGrid, Path, ProcessSpec, sample_time_change, simulate_tcbm_noise
from .sampling import RngStream, derive_stream

__all__ = [
    "CoefficientSpec",
    "SolutionPath",
    "solve_young",
    "solve_time_changed",
    "solve_time_changed_ensemble",
    "young_closed_form_error",
    "solution_singularity_experiment",
    "OUTSIDE_REGIME",
    "PROVEN_REGIME",
]

PROVEN_REGIME = "proven regime"
OUTSIDE_REGIME = "outside proven regime"


@dataclass(frozen=True)
class CoefficientSpec:
    """A scalar coefficient x -> c(x).

    Kinds: CONSTANT(c), LINEAR(c) = c x, AFFINE(a, b) = a x + b, and TABLE, a
    piecewise-linear interpolant (flat beyond its end nodes) with a declared
    Lipschitz bound and a declared Hoelder order k of its derivative
    (smoothness C^{1+k}; k = 0 means Lipschitz only). The analytic kinds are C^inf.
    """

    kind: str
    params: tuple = ()
    lipschitz: float = 0.0
    smoothness: float = math.inf

    @classmethod
    def constant(cls, c):
        return cls("CONSTANT", (float(c),), 0.0)

    @classmethod
    def linear(cls, c):
        return cls("LINEAR", (float(c),), abs(float(c)))

    @classmethod
    def affine(cls, a, b):
        return cls("AFFINE", (float(a), float(b)), abs(float(a)))

    @classmethod
    def table(cls, xs, ys, lipschitz, smoothness=0.0):
        xs = tuple(float(x) for x in xs)
        ys = tuple(float(y) for y in ys)
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("table needs matching node and value lists of length >= 2")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("table nodes must be strictly increasing")
        steepest = max(abs(y1 - y0) / (x1 - x0) for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:]))
        if lipschitz is None or steepest > lipschitz * (1 + 1e-12):
            raise ValueError(f"declared Lipschitz bound {lipschitz} is below the table's slope {steepest}")
        return cls("TABLE", (xs, ys), float(lipschitz), float(smoothness))

    def __post_init__(self):
        if self.kind not in ("CONSTANT", "LINEAR", "AFFINE", "TABLE"):
            raise ValueError(f"unknown coefficient kind {self.kind!r}")

    def __call__(self, x):
        if self.kind == "CONSTANT":
            return self.params[0] + 0.0 * x
        if self.kind == "LINEAR":
            return self.params[0] * x
        if self.kind == "AFFINE":
            return self.params[0] * x + self.params[1]
        return np.interp(x, self.params[0], self.params[1])

    @property
    def is_zero(self) -> bool:
        if self.kind == "CONSTANT":
            return self.params[0] == 0.0
        if self.kind == "LINEAR":
            return self.params[0] == 0.0
        if self.kind == "AFFINE":
            return self.params == (0.0, 0.0)
        return all(y == 0.0 for y in self.params[1])

    def label(self) -> str:
        if self.kind == "TABLE":
            return f"TABLE(n={len(self.params[0])},L={self.lipschitz:g},k={self.smoothness:g})"
        return self.kind + "(" + ",".join(f"{p:g}" for p in self.params) + ")"


@dataclass
class SolutionPath:
    """Solution values on the driver grid plus driver metadata."""

    path: Path
    driver: dict = field(default_factory=dict)
    regime: str = PROVEN_REGIME

    @property
    def values(self):
        return self.path.values


def _young_regime(g, driver):
    """Regime label for g against the driver, or raise for non-Young drivers."""
    kind = driver.process.kind
    if kind not in ("GGBM", "FBM"):
        raise PreconditionError(f"Young solver needs a ggBm or fBm driver, got {kind}")
    p = driver.process.variation_index
    if not p < 2:
        raise PreconditionError(f"driver variation index {p:g} is not below 2")
    if g.kind == "CONSTANT":
        return PROVEN_REGIME
    return PROVEN_REGIME if g.smoothness > p - 1 else OUTSIDE_REGIME


def solve_young(g: CoefficientSpec, b, x0, driver: Path, allow_outside_regime=False) -> SolutionPath:
    """Forward Euler for dX = g(X) dB + b(X) dt along a ggBm or fBm path.

    A coefficient whose declared smoothness is too low for the driver raises
    :class:`PreconditionError`; with ``allow_outside_regime=True`` the run goes
    ahead and the result is labelled ``"outside proven regime"``.
    """
    regime = _young_regime(g, driver)
    if regime == OUTSIDE_REGIME and not allow_outside_regime:
        raise PreconditionError(
            f"coefficient {g.label()} is not C^(1+k) with k > {driver.process.variation_index - 1:g}"
        )
    dB = np.diff(driver.values)
    dt = driver.grid.step
    x = np.empty(driver.values.size)
    x[0] = x0
    gv = g  # local aliases keep the loop tight
    if b is None:
        for i in range(dB.size):
            x[i + 1] = x[i] + gv(x[i]) * dB[i]
    else:
        for i in range(dB.size):
            x[i + 1] = x[i] + gv(x[i]) * dB[i] + b(x[i]) * dt
    meta = {"driver": driver.process.label(), "g": g.label(),
            "b": b.label() if b is not None else "none", "x0": x0, "regime": regime}
    for key in ("seed", "stream", "mixing"):
        if key in driver.meta:
            meta["driver_" + key] = driver.meta[key]
    return SolutionPath(Path(driver.grid, x, driver.process, meta), dict(driver.meta), regime)


def _euler_maruyama(f, b, y0, du, dw):
    y = np.empty(du.size + 1)
    y[0] = y0
    if b is None:
        for i in range(du.size):
            y[i + 1] = y[i] + f(y[i]) * dw[i]
    else:
        for i in range(du.size):
            y[i + 1] = y[i] + f(y[i]) * dw[i] + b(y[i]) * du[i]
    return y


def solve_time_changed(f: CoefficientSpec, b, y0, beta, alpha, grid: DyadicGrid,
                       rng: RngStream, method="exact") -> SolutionPath:
    """Y = Z o U_{beta,alpha} for dZ = f(Z) dW + b(Z) ds, Euler-Maruyama on the u-grid.

    Draws from ``rng`` in the same order as :func:`paths.sample_tcbm`, so with
    f = 1 and no drift the solution is exactly that TCBM path shifted by y0.
    Zero time-change increments give exactly flat solution segments.
    """
    from .paths import _oversampled_step

    step = _oversampled_step(grid.level) if method == "grid" else None
    tc = sample_time_change(beta, alpha, grid.times, rng, method=method, step=step)
    z = rng.normal(2 ** grid.level)
    du = np.diff(tc.values)
    dw = np.sqrt(du) * z
    y = _euler_maruyama(f, b, y0, du, dw)
    spec = ProcessSpec.tcbm(beta, alpha)
    meta = {"driver": spec.label(), "f": f.label(), "b": b.label() if b is not None else "none",
            "y0": y0, "seed": rng.seed, "stream": rng.stream_index, "time_change": tc.values}
    return SolutionPath(Path(grid, y, spec, meta), {"time_change": tc.values,
                                                   "seed": rng.seed, "stream": rng.stream_index})


def solve_time_changed_ensemble(f: CoefficientSpec, b, y0, beta, alpha, level, n_paths, seed,
                                keep=None, workers=1):
    """Euler-Maruyama solutions for many replicas at once; returns (times, Y).

    Replica i uses stream i and the TCBM draw order, so row i equals
    ``solve_time_changed(..., derive_stream(seed, i))`` restricted to ``keep``.
    """
    t, u, dw = simulate_tcbm_noise(beta, alpha, level, n_paths, seed, keep=keep, workers=workers)
    du = np.diff(u, axis=1)
    y = np.empty_like(u)
    y[:, 0] = y0
    for i in range(du.shape[1]):
        # same association as the single-path loop, for identical rounding
        nxt = y[:, i] + f(y[:, i]) * dw[:, i]
        if b is not None:
            nxt = nxt + b(y[:, i]) * du[:, i]
        y[:, i + 1] = nxt
    return t, y


def young_closed_form_error(c, x0, driver: Path, levels) -> dict:
    """Relative sup error of Euler for g(x) = c x against x0 exp(c B), per level."""
    out = {}
    for m in levels:
        d = driver.restrict(m) if m < driver.grid.level else driver
        x = solve_young(CoefficientSpec.linear(c), None, x0, d).values
        exact = x0 * np.exp(c * d.values)
        out[m] = float(np.max(np.abs(x - exact)) / np.max(np.abs(exact)))
    return out


def solution_singularity_experiment(g, f, beta, alpha, n, level, seed, x0=1.0, y0=1.0,
                                    cfg=DEFAULT_DISCRIMINATOR, workers=1):
    """Confusion matrix for solutions driven by ggBm (Young) and by TCBM.

    Replica r of class c uses stream 2 r + c, exactly as in
    :func:`discriminate.confusion_experiment`; with g = f = CONSTANT(1) and
    x0 = y0 = 0 the solutions are the driver paths themselves.
    """
    if g.is_zero or f.is_zero:
        raise PreconditionError("diffusion coefficients must be bounded away from 0")
    grid = DyadicGrid(level)

    def transform(cls, r, ens):
        if cls == 0:
            drv = Path(grid, ens.values[0], ProcessSpec.ggbm(beta, alpha))
            return solve_young(g, None, x0, drv).values
        return solve_time_changed(f, None, y0, beta, alpha, grid,
                                  derive_stream(seed, 2 * r + 1)).values

    return confusion_experiment(n, beta, alpha, level, cfg, seed, workers, transform)
