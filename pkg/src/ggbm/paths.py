"""Sample paths on dyadic grids and the analytic laws they are checked against.

Processes: Brownian motion, fractional Brownian motion, generalized grey
Brownian motion (ggBm), Brownian motion time-changed by an inverse stable
subordinator (TCBM), the fractional Poisson process (fPp) and the fractal-time
Poisson process (ftPp).

ggBm is built as sqrt(Y) * B^H with H = alpha/2 and Y ~ M_beta independent of the
fBm B^H: conditionally on Y = tau the n-point characteristic function is
exp(-tau theta' C theta / 2), and averaging over M_beta gives
E_beta(-theta' C theta / 2).

The time change U(t) = U_beta(t^(alpha/beta)) is sampled exactly at the
requested times by walking the first passages of the subordinator: from the
current position P below a level x, the undershoot fraction is
Beta(beta, 1 - beta), the elapsed operational time is
(gap * undershoot)^beta * Y* with Y* size-biased M-Wright, and the jump across
the level is Pareto. An operational-grid inversion (``method="grid"``) is kept
as an independent cross-check.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import specfun
from .errors import SimulationBudgetError
from .sampling import (
    RngStream,
    derive_stream,
    sample_m_wright,
    sample_ml_waiting_time,
    sample_size_biased_m_wright,
)

__all__ = [
    "DyadicGrid",
    "ProcessSpec",
    "Path",
    "TimeChangePath",
    "Ensemble",
    "covariance_matrix",
    "ggbm_covariance",
    "sample_bm",
    "sample_fbm",
    "sample_ggbm",
    "sample_time_change",
    "sample_tcbm",
    "sample_path",
    "sample_fpp",
    "sample_ftpp",
    "fpp_pmf",
    "fpp_pgf",
    "ggbm_joint_pdf",
    "empirical_cf",
    "simulate_ensemble",
    "simulate_tcbm_noise",
    "fpp_count_ensemble",
    "ftpp_count_ensemble",
    "ENSEMBLE_BLOCK",
]


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicGrid:
    """Points i 2^-level, i = 0..2^level, on [0, 1]."""

    level: int

    def __post_init__(self):
        if int(self.level) != self.level or self.level < 1:
            raise ValueError("grid level must be an integer >= 1")

    @property
    def size(self) -> int:
        return 2 ** self.level + 1

    @property
    def step(self) -> float:
        return 2.0 ** -self.level

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.size) * self.step

    def indices_of(self, level: int) -> np.ndarray:
        """Positions of the level-``level`` points inside this grid."""
        if not 1 <= level <= self.level:
            raise ValueError(f"level {level} not within 1..{self.level}")
        return np.arange(0, self.size, 2 ** (self.level - level))


KINDS = ("BM", "FBM", "GGBM", "TCBM", "FPP", "FTPP")


@dataclass(frozen=True)
class ProcessSpec:
    """Which process, with its parameters.

    Use the constructors: ``ProcessSpec.bm()``, ``.fbm(H)``, ``.ggbm(beta, alpha)``,
    ``.tcbm(beta, alpha)``, ``.fpp(beta, lam)``, ``.ftpp(beta, lam)``.
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}")
        p = dict(self.params)
        if "H" in p and not 0 < p["H"] < 1:
            raise ValueError("Hurst parameter H must lie in (0, 1)")
        if "beta" in p and not 0 < p["beta"] <= 1:
            raise ValueError("beta must lie in (0, 1]")
        if "alpha" in p and not 0 < p["alpha"] < 2:
            raise ValueError("alpha must lie in (0, 2)")
        if "lam" in p and not p["lam"] > 0:
            raise ValueError("lambda must be > 0")

    @classmethod
    def bm(cls):
        return cls("BM")

    @classmethod
    def fbm(cls, H):
        return cls("FBM", (("H", float(H)),))

    @classmethod
    def ggbm(cls, beta, alpha):
        return cls("GGBM", (("beta", float(beta)), ("alpha", float(alpha))))

    @classmethod
    def tcbm(cls, beta, alpha):
        return cls("TCBM", (("beta", float(beta)), ("alpha", float(alpha))))

    @classmethod
    def fpp(cls, beta, lam):
        return cls("FPP", (("beta", float(beta)), ("lam", float(lam))))

    @classmethod
    def ftpp(cls, beta, lam):
        return cls("FTPP", (("beta", float(beta)), ("lam", float(lam))))

    def __getitem__(self, name):
        return dict(self.params)[name]

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    @property
    def singularity_regime(self) -> bool:
        """True when the mutual-singularity dichotomy applies (1 < alpha < 2, beta < 1)."""
        p = self.param_dict
        return self.kind in ("GGBM", "TCBM") and 1 < p["alpha"] < 2 and p["beta"] < 1

    @property
    def variation_index(self) -> float:
        """Theoretical p-variation index of the paths."""
        p = self.param_dict
        if self.kind in ("BM", "TCBM"):
            return 2.0
        if self.kind == "FBM":
            return 1.0 / p["H"]
        if self.kind == "GGBM":
            return 2.0 / p["alpha"]
        raise ValueError(f"{self.kind} paths are pure jump; no variation index here")

    def label(self) -> str:
        if not self.params:
            return self.kind
        return self.kind + "(" + ",".join(f"{k}={v:g}" for k, v in self.params) + ")"


@dataclass
class Path:
    """Values of a process on a dyadic grid. ``values[0] == 0``."""

    grid: DyadicGrid
    values: np.ndarray
    process: ProcessSpec
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise ValueError(
                f"expected {self.grid.size} values for level {self.grid.level}, "
                f"got shape {self.values.shape}"
            )

    @property
    def times(self):
        return self.grid.times

    def restrict(self, level: int) -> "Path":
        """The same path read off the coarser dyadic grid of the given level."""
        idx = self.grid.indices_of(level)
        meta = dict(self.meta)
        if "time_change" in meta:
            meta["time_change"] = np.asarray(meta["time_change"])[idx]
        return Path(DyadicGrid(level), self.values[idx], self.process, meta)

    def scaled(self, c: float) -> "Path":
        return Path(self.grid, c * self.values, self.process, dict(self.meta))


@dataclass
class TimeChangePath:
    """U_{beta,alpha} at increasing evaluation times; nondecreasing, U(0) = 0."""

    times: np.ndarray
    values: np.ndarray


def covariance_matrix(times, alpha) -> np.ndarray:
    """Sigma_alpha = (t_k^a + t_j^a - |t_k - t_j|^a)_{k,j}."""
    t = np.asarray(times, dtype=float)
    ta = t ** alpha
    return ta[:, None] + ta[None, :] - np.abs(t[:, None] - t[None, :]) ** alpha


def ggbm_covariance(times, beta, alpha) -> np.ndarray:
    """Covariance of ggBm: Sigma_alpha / (2 Gamma(beta + 1))."""
    return covariance_matrix(times, alpha) / (2.0 * specfun.gamma_fn(beta + 1.0))


# ---------------------------------------------------------------------------
# Gaussian building blocks
# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def _circulant_sqrt_eigs(H: float, n: int) -> np.ndarray:
    """sqrt of the circulant-embedding eigenvalues for n unit-step fGn values."""
    k = np.arange(n + 1, dtype=float)
    h2 = 2.0 * H
    gam = 0.5 * (np.abs(k + 1) ** h2 - 2 * k ** h2 + np.abs(k - 1) ** h2)
    row = np.concatenate([gam, gam[-2:0:-1]])
    lam = np.fft.fft(row).real
    if lam.min() < -1e-10 * lam.max():
        raise np.linalg.LinAlgError(
            f"circulant embedding not nonnegative for H={H}, n={n}"
        )
    lam = np.clip(lam, 0.0, None)
    return np.sqrt(lam / (2 * n))


def _fgn_from_normals(z: np.ndarray, H: float) -> np.ndarray:
    """Davies-Harte synthesis: rows of 2n standard normals -> rows of n fGn values."""
    z = np.atleast_2d(z)
    m = z.shape[1]
    n = m // 2
    s = _circulant_sqrt_eigs(float(H), n)
    w = np.zeros((z.shape[0], m), dtype=complex)
    w[:, 0] = s[0] * z[:, 0]
    w[:, n] = s[n] * z[:, n]
    half = np.sqrt(0.5)
    w[:, 1:n] = s[1:n] * half * (z[:, 1:n] + 1j * z[:, n + 1:])
    w[:, n + 1:] = np.conj(w[:, n - 1:0:-1])
    return np.fft.fft(w, axis=1)[:, :n].real


@lru_cache(maxsize=8)
def _fbm_cholesky(H: float, level: int) -> np.ndarray:
    t = DyadicGrid(level).times[1:]
    h2 = 2.0 * H
    c = 0.5 * (t[:, None] ** h2 + t[None, :] ** h2 - np.abs(t[:, None] - t[None, :]) ** h2)
    return np.linalg.cholesky(c)


def _cumulate(incr: np.ndarray) -> np.ndarray:
    incr = np.atleast_2d(incr)
    out = np.zeros((incr.shape[0], incr.shape[1] + 1))
    np.cumsum(incr, axis=1, out=out[:, 1:])
    return out


def _fbm_normals(rng: RngStream, H: float, level: int, method: str) -> np.ndarray:
    n = 2 ** level
    if method == "circulant":
        return rng.normal(2 * n)
    if method == "cholesky":
        return rng.normal(n)
    raise ValueError(f"unknown fBm method {method!r}")


def _fbm_from_normals(z: np.ndarray, H: float, level: int, method: str) -> np.ndarray:
    if method == "circulant":
        return _cumulate(_fgn_from_normals(z, H) * 2.0 ** (-level * H))
    L = _fbm_cholesky(float(H), level)
    z = np.atleast_2d(z)
    out = np.zeros((z.shape[0], z.shape[1] + 1))
    out[:, 1:] = z @ L.T
    return out


# ---------------------------------------------------------------------------
# Inverse-subordinator time change
# ---------------------------------------------------------------------------


def _passage_draws(rng: RngStream, beta: float, k: int):
    """Variates for k first-passage steps: undershoot, size-biased M-Wright, Pareto."""
    under = rng.beta(beta, 1.0 - beta, k)
    ystar = sample_size_biased_m_wright(beta, rng, k)
    v = rng.uniform(k)
    return under, ystar, v


def _first_passages(levels, under, ystar, v, beta):
    """U at each (nondecreasing) level for a batch of subordinator paths.

    ``levels`` has shape (K,); the variates have shape (R, K). Column k is used
    only if the path still sits at or below level k. Rows run through the same
    scalar recursion, so a replica's values never depend on its batch.
    """
    return np.stack([_first_passages_scalar(levels, a, b, c, beta)
                     for a, b, c in zip(under, ystar, v)])


def _first_passages_scalar(levels, under, ystar, v, beta):
    lv, fr, ys, vv = levels.tolist(), under.tolist(), ystar.tolist(), v.tolist()
    inv_b = 1.0 / beta
    t = p = 0.0
    out = []
    for k, x in enumerate(lv):
        if p <= x:
            gap = x - p
            t += (gap * fr[k]) ** beta * ys[k]
            p += gap * fr[k] + gap * (1.0 - fr[k]) * vv[k] ** -inv_b
        out.append(t)
    return np.asarray(out)


def _time_change_grid(rng, beta, levels, step, cap):
    """Invert a subordinator simulated on an operational grid of the given step.

    U(x) = step * #{k >= 1 : S(k step) <= x}, a lower bound within one step of
    the exact value. The horizon doubles until S passes the top level.
    """
    top = float(levels[-1])
    scale = step ** (1.0 / beta)
    n0 = max(1024, int(math.ceil(top ** beta / specfun.gamma_fn(1.0 + beta) / step)))
    from .sampling import sample_positive_stable

    chunks = []
    total = 0.0
    n = n0
    used = 0
    while True:
        if used + n > cap:
            raise SimulationBudgetError(
                f"operational grid would exceed {cap} steps before covering level {top}"
            )
        inc = sample_positive_stable(beta, rng, n) * scale
        c = np.cumsum(inc) + total
        chunks.append(c)
        total = c[-1]
        used += n
        if total > top:
            break
        n = used  # double the horizon
    S = np.concatenate(chunks)
    return step * np.searchsorted(S, levels, side="right").astype(float)


def sample_time_change(beta, alpha, eval_times, rng: RngStream, method="exact",
                       step=None, cap=2 ** 24) -> TimeChangePath:
    """U_{beta,alpha}(t) = inf{s : S_beta(s) > t^(alpha/beta)} at increasing times in [0, 1].

    ``method="exact"`` samples the joint law at the given times without
    discretisation error. ``method="grid"`` inverts a subordinator path on an
    operational grid of spacing ``step`` (capped at ``cap`` steps).
    """
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    t = np.asarray(eval_times, dtype=float)
    if t.ndim != 1 or np.any(np.diff(t) <= 0) or t[0] < 0 or t[-1] > 1:
        raise ValueError("eval_times must be strictly increasing within [0, 1]")
    levels = t ** (alpha / beta)
    if beta == 1.0:
        return TimeChangePath(t, levels.copy())
    if method == "exact":
        under, ystar, v = _passage_draws(rng, beta, t.size)
        u = _first_passages(levels, under[None], ystar[None], v[None], beta)[0]
    elif method == "grid":
        if step is None:
            raise ValueError("grid method needs an operational step")
        u = _time_change_grid(rng, beta, levels, step, cap)
    else:
        raise ValueError(f"unknown time-change method {method!r}")
    u[t == 0] = 0.0
    return TimeChangePath(t, u)


# ---------------------------------------------------------------------------
# Single paths
# ---------------------------------------------------------------------------


def sample_bm(grid: DyadicGrid, rng: RngStream) -> Path:
    z = rng.normal(2 ** grid.level)
    vals = _cumulate(z * math.sqrt(grid.step))[0]
    return Path(grid, vals, ProcessSpec.bm(), _stream_meta(rng))


def sample_fbm(H, grid: DyadicGrid, rng: RngStream, method="circulant") -> Path:
    """Fractional Brownian motion, covariance (t^2H + s^2H - |t - s|^2H) / 2.

    ``method="circulant"`` (Davies-Harte, exact, O(n log n)) or
    ``"cholesky"`` (exact, O(n^3), practical to level 12).
    """
    spec = ProcessSpec.fbm(H)
    z = _fbm_normals(rng, H, grid.level, method)
    vals = _fbm_from_normals(z, H, grid.level, method)[0]
    return Path(grid, vals, spec, _stream_meta(rng))


def sample_ggbm(beta, alpha, grid: DyadicGrid, rng: RngStream, method="circulant") -> Path:
    """ggBm path sqrt(Y) B^(alpha/2); Y is stored in ``meta["mixing"]``."""
    spec = ProcessSpec.ggbm(beta, alpha)
    y = sample_m_wright(beta, rng)
    H = alpha / 2.0
    z = _fbm_normals(rng, H, grid.level, method)
    vals = math.sqrt(y) * _fbm_from_normals(z, H, grid.level, method)[0]
    meta = _stream_meta(rng)
    meta["mixing"] = y
    return Path(grid, vals, spec, meta)


def _oversampled_step(level):
    return 2.0 ** -(level + 4)


def sample_tcbm(beta, alpha, grid: DyadicGrid, rng: RngStream, method="exact") -> Path:
    """X(t_i) = X(t_{i-1}) + sqrt(u_i - u_{i-1}) Z_i with u_i = U_{beta,alpha}(t_i).

    Exact in law on the grid. Equal consecutive u give exactly flat steps.
    The time change is stored in ``meta["time_change"]``.
    """
    spec = ProcessSpec.tcbm(beta, alpha)
    step = _oversampled_step(grid.level) if method == "grid" else None
    tc = sample_time_change(beta, alpha, grid.times, rng, method=method, step=step)
    z = rng.normal(2 ** grid.level)
    vals = _tcbm_from(tc.values[None], z[None])[0]
    meta = _stream_meta(rng)
    meta["time_change"] = tc.values
    return Path(grid, vals, spec, meta)


def _tcbm_from(u: np.ndarray, z: np.ndarray) -> np.ndarray:
    du = np.diff(u, axis=1)
    return _cumulate(np.sqrt(du) * z)


def sample_path(spec: ProcessSpec, grid: DyadicGrid, rng: RngStream) -> Path:
    """Dispatch on ``spec.kind`` for the continuous processes."""
    p = spec.param_dict
    if spec.kind == "BM":
        return sample_bm(grid, rng)
    if spec.kind == "FBM":
        return sample_fbm(p["H"], grid, rng)
    if spec.kind == "GGBM":
        return sample_ggbm(p["beta"], p["alpha"], grid, rng)
    if spec.kind == "TCBM":
        return sample_tcbm(p["beta"], p["alpha"], grid, rng)
    raise ValueError(f"{spec.kind} has no dyadic-grid path sampler")


def _stream_meta(rng):
    return {"seed": rng.seed, "stream": rng.stream_index}


# ---------------------------------------------------------------------------
# Ensembles
# ---------------------------------------------------------------------------


class Ensemble(NamedTuple):
    """Replica-indexed simulation output.

    ``values`` has one row per replica and one column per kept grid point.
    ``mixing`` holds Y for ggBm; ``time_change`` holds U at the kept points for
    TCBM.
    """

    spec: ProcessSpec
    level: int
    times: np.ndarray
    values: np.ndarray
    mixing: np.ndarray | None = None
    time_change: np.ndarray | None = None

    def paths(self):
        """Full-grid :class:`Path` objects (only when every grid point was kept)."""
        grid = DyadicGrid(self.level)
        if self.values.shape[1] != grid.size:
            raise ValueError("ensemble was thinned; no full paths available")
        out = []
        for i, row in enumerate(self.values):
            meta = {"replica": i}
            if self.mixing is not None:
                meta["mixing"] = float(self.mixing[i])
            if self.time_change is not None:
                meta["time_change"] = self.time_change[i]
            out.append(Path(grid, row, self.spec, meta))
        return out


def _batch_size(level):
    return max(1, min(4096, (1 << 22) // 2 ** (level + 1)))


def _simulate_batch(spec, level, seed, indices, keep, method):
    p = spec.param_dict
    grid = DyadicGrid(level)
    n = 2 ** level
    streams = [derive_stream(seed, int(i)) for i in indices]
    mixing = time_change = None
    if spec.kind == "BM":
        z = np.stack([s.normal(n) for s in streams])
        vals = _cumulate(z * math.sqrt(grid.step))
    elif spec.kind in ("FBM", "GGBM"):
        H = p["H"] if spec.kind == "FBM" else p["alpha"] / 2.0
        ys, zs = [], []
        for s in streams:
            if spec.kind == "GGBM":
                ys.append(sample_m_wright(p["beta"], s))
            zs.append(_fbm_normals(s, H, level, method))
        vals = _fbm_from_normals(np.stack(zs), H, level, method)
        if spec.kind == "GGBM":
            mixing = np.asarray(ys)
            vals *= np.sqrt(mixing)[:, None]
    elif spec.kind == "TCBM":
        u, z = _tcbm_noise_batch(streams, p["beta"], p["alpha"], grid.times[keep], level, method)
        return mixing, u, _tcbm_from(u, z)
    else:
        raise ValueError(f"{spec.kind} has no path ensemble")
    return mixing, time_change, vals[:, keep]


def _tcbm_noise_batch(streams, beta, alpha, t, level, method):
    """Time change at times t and the standard normals driving the increments."""
    kk = t.size
    if method == "grid":
        us, zs = [], []
        for s in streams:
            us.append(sample_time_change(beta, alpha, t, s, method="grid",
                                         step=_oversampled_step(level)).values)
            zs.append(s.normal(kk - 1))
        return np.stack(us), np.stack(zs)
    if method != "exact":
        raise ValueError(f"unknown time-change method {method!r}")
    draws = [sample_time_change_draws(s, beta, kk) for s in streams]
    zs = np.stack([d[3] for d in draws])
    if beta == 1.0:
        return np.broadcast_to(t ** alpha, (len(streams), kk)).copy(), zs
    under = np.stack([d[0] for d in draws])
    ystar = np.stack([d[1] for d in draws])
    v = np.stack([d[2] for d in draws])
    u = _first_passages(t ** (alpha / beta), under, ystar, v, beta)
    u[:, t == 0] = 0.0
    return u, zs


def simulate_tcbm_noise(beta, alpha, level, n_paths, seed, keep=None, start=0,
                        method="exact", workers=1, indices=None):
    """(times, U at those times, Brownian increments sqrt(dU) Z) for TCBM replicas.

    Same streams and draw order as :func:`simulate_ensemble` for TCBM, so
    cumulative sums of the increments are exactly the TCBM ensemble paths.
    """
    grid = DyadicGrid(level)
    keep = np.arange(grid.size) if keep is None else np.asarray(keep, dtype=int)
    if keep[0] != 0:
        keep = np.concatenate([[0], keep])
    t = grid.times[keep]
    idx = np.arange(start, start + n_paths) if indices is None else np.asarray(indices, dtype=np.int64)
    bs = max(1, min(2048, (1 << 21) // keep.size))

    def run(b):
        u, z = _tcbm_noise_batch([derive_stream(seed, int(i)) for i in b], beta, alpha, t, level, method)
        return u, np.sqrt(np.diff(u, axis=1)) * z

    parts = _map_batches(run, [idx[i:i + bs] for i in range(0, idx.size, bs)], workers)
    return t, np.concatenate([a for a, _ in parts]), np.concatenate([b for _, b in parts])


def _map_batches(fn, batches, workers):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, batches))
    return [fn(b) for b in batches]


def sample_time_change_draws(rng, beta, k):
    """Per-replica draws for a TCBM ensemble: passage variates then k-1 normals."""
    if beta == 1.0:
        empty = np.empty(k)
        return empty, empty, empty, rng.normal(k - 1)
    under, ystar, v = _passage_draws(rng, beta, k)
    return under, ystar, v, rng.normal(k - 1)


def simulate_ensemble(spec: ProcessSpec, level: int, n_paths: int, seed: int,
                      keep=None, start: int = 0, method=None, workers: int = 1,
                      indices=None) -> Ensemble:
    """Simulate replicas ``start .. start + n_paths - 1`` of a continuous process.

    Replica i uses stream ``derive_stream(seed, i)``, so the output depends only
    on (spec, level, seed, keep, method) and never on ``workers``. An explicit
    list of stream ``indices`` replaces the contiguous range.

    ``keep`` selects grid indices to retain (default: all). For TCBM only the
    kept times are simulated, which is exact in law at those times.
    """
    grid = DyadicGrid(level)
    keep = np.arange(grid.size) if keep is None else np.asarray(keep, dtype=int)
    if keep[0] != 0:
        keep = np.concatenate([[0], keep])
    if method is None:
        method = "exact" if spec.kind == "TCBM" else "circulant"
    bs = _batch_size(level)
    if spec.kind == "TCBM":
        bs = max(1, min(2048, (1 << 21) // keep.size))
    idx = np.arange(start, start + n_paths) if indices is None else np.asarray(indices, dtype=np.int64)
    n_paths = idx.size
    batches = [idx[i:i + bs] for i in range(0, n_paths, bs)]

    results = _map_batches(lambda b: _simulate_batch(spec, level, seed, b, keep, method),
                           batches, workers)
    values = np.concatenate([r[2] for r in results])
    mixing = None if results[0][0] is None else np.concatenate([r[0] for r in results])
    tc = None if results[0][1] is None else np.concatenate([r[1] for r in results])
    return Ensemble(spec, level, grid.times[keep], values, mixing, tc)


# ---------------------------------------------------------------------------
# Fractional Poisson processes
# ---------------------------------------------------------------------------

ENSEMBLE_BLOCK = 1 << 15
"""Replicas per random stream for the vectorised count ensembles."""


def sample_fpp(beta, lam, rng: RngStream, horizon=1.0) -> np.ndarray:
    """Event times of the renewal process with Mittag-Leffler waiting times."""
    ProcessSpec.fpp(beta, lam)
    times = []
    t = 0.0
    while True:
        t += sample_ml_waiting_time(beta, lam, rng)
        if t > horizon:
            return np.asarray(times)
        times.append(t)


def sample_ftpp(beta, lam, probe_times, rng: RngStream) -> np.ndarray:
    """Counts N(U_beta(t)) at the probe times, N a rate-lam Poisson process."""
    ProcessSpec.ftpp(beta, lam)
    t = np.asarray(probe_times, dtype=float)
    pos = t > 0
    counts = np.zeros(t.size, dtype=np.int64)
    if pos.any():
        tp = t[pos]
        # alpha = beta makes the clock t -> U_beta(t)
        u = sample_time_change(beta, beta, tp, rng).values
        du = np.diff(np.concatenate([[0.0], u]))
        counts[pos] = np.cumsum(rng.poisson(lam * du))
    return counts


def _blocks(n, block):
    return [(k, min(block, n - k * block)) for k in range((n + block - 1) // block)]


def fpp_count_ensemble(beta, lam, t, n, seed, block=ENSEMBLE_BLOCK, workers=1) -> np.ndarray:
    """N_beta(t) for n independent replicas (block k of replicas uses stream k)."""
    ProcessSpec.fpp(beta, lam)

    def run(kb):
        k, m = kb
        rng = derive_stream(seed, k)
        clock = np.zeros(m)
        count = np.zeros(m, dtype=np.int64)
        alive = np.ones(m, dtype=bool)
        while alive.any():
            clock += sample_ml_waiting_time(beta, lam, rng, m)
            alive &= clock <= t
            count += alive
        return count

    return _run_blocks(run, _blocks(n, block), workers)


def ftpp_count_ensemble(beta, lam, t, n, seed, block=ENSEMBLE_BLOCK, workers=1) -> np.ndarray:
    """N(U_beta(t)) for n replicas; a single time is sampled exactly as t^beta Y."""
    ProcessSpec.ftpp(beta, lam)

    def run(kb):
        k, m = kb
        rng = derive_stream(seed, k)
        u = t ** beta * np.asarray(sample_m_wright(beta, rng, m))
        return rng.poisson(lam * u)

    return _run_blocks(run, _blocks(n, block), workers)


def _run_blocks(fn, blocks, workers):
    return np.concatenate(_map_batches(fn, blocks, workers))


def fpp_pmf(n, t, beta, lam) -> float:
    """P(N_beta(t) = n) = (lam t^b)^n / n! * E_b^(n)(-lam t^b), n <= 20."""
    if not 0 <= n <= 20:
        raise ValueError("pmf is supported for 0 <= n <= 20")
    if not t > 0:
        raise ValueError("t must be > 0")
    z = lam * t ** beta
    d = specfun.mittag_leffler_deriv(beta, -z, n)
    return min(1.0, max(0.0, z ** n / math.factorial(n) * d))


def fpp_pgf(z, t, beta, lam) -> float:
    """E z^N_beta(t) = E_beta(lam t^beta (z - 1)) for z in [0, 1]."""
    if not 0 <= z <= 1:
        raise ValueError("z must lie in [0, 1]")
    return specfun.mittag_leffler(beta, lam * t ** beta * (z - 1.0))


# ---------------------------------------------------------------------------
# Analytic finite-dimensional quantities
# ---------------------------------------------------------------------------


def ggbm_joint_pdf(theta, times, beta, alpha, cfg=specfun.DEFAULT_CONFIG) -> float:
    """Joint density of (B(t_1), ..., B(t_n)) at ``theta`` for n <= 3.

    Gaussian scale mixture over M_beta with the ggBm fBm covariance
    C = Sigma_alpha / 2:
    (2 pi)^(-n/2) det(C)^(-1/2) int tau^(-n/2) exp(-theta' C^-1 theta / (2 tau)) M_beta(tau) dtau.

    The mixing integral is :func:`specfun.m_wright_log_quad`, a trapezoid rule
    in log tau that converges geometrically here.
    """
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    t = np.atleast_1d(np.asarray(times, dtype=float))
    n = t.size
    if th.shape != t.shape or not 1 <= n <= 3:
        raise ValueError("theta and times must have the same length, at most 3")
    if np.any(t <= 0) or np.any(np.diff(np.sort(t)) == 0):
        raise ValueError("times must be distinct and positive")
    specfun._check_beta(beta)
    C = covariance_matrix(t, alpha) / 2.0
    det = np.linalg.det(C)
    if not det > 1e-14 * np.max(np.abs(C)) ** n:
        raise np.linalg.LinAlgError("covariance matrix is singular")
    q = float(th @ np.linalg.solve(C, th))
    norm = (2 * math.pi) ** (-n / 2) / math.sqrt(det)
    if beta == 1.0:
        return norm * math.exp(-q / 2)
    if q == 0.0:
        if n >= 2:
            return math.inf
        # E[Y^-1/2] in closed form
        return norm * specfun.m_wright_moment(beta, -0.5)
    if q < 1e-16:
        raise ValueError("theta too close to 0 for the tabulated mixing integral")
    val, _ = specfun.m_wright_log_quad(beta, lambda tau: tau ** (-n / 2) * np.exp(-q / (2 * tau)), cfg)
    return norm * val


class CFEstimate(NamedTuple):
    value: complex
    se_real: float
    se_imag: float


def empirical_cf(samples, theta) -> CFEstimate:
    """(1/N) sum exp(i theta w_k) with standard errors of both parts.

    ``samples`` are the values w_k(t) of an ensemble at one time.
    """
    w = np.asarray(samples, dtype=float).ravel()
    if w.size == 0:
        raise ValueError("empty ensemble")
    c = np.cos(theta * w)
    s = np.sin(theta * w)
    n = w.size
    se = lambda a: float(a.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf  # noqa: E731
    return CFEstimate(complex(c.mean(), s.mean()), se(c), se(s))
