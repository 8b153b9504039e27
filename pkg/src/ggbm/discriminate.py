"""Path classifier separating ggBm from time-changed Brownian motion.

For 1 < alpha < 2 the two laws are mutually singular: ggBm paths have finite
2/alpha-variation and vanishing quadratic variation, while TCBM paths have
finite, nonzero quadratic variation and infinite 2/alpha-variation. On a dyadic
grid this shows up in the slopes of log2 V_2^(m) and log2 V_{2/alpha}^(m):

    ggBm: slope_2 ~ 1 - alpha (< 0),   slope_2a ~ 0
    TCBM: slope_2 ~ 0,                 slope_2a ~ beta (1 - 1/alpha) (> 0)
"""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .paths import Path, ProcessSpec, simulate_ensemble
from .variation import fit_slopes, level_sums

__all__ = [
    "GGBM",
    "TCBM",
    "INCONCLUSIVE",
    "LABELS",
    "DiscriminatorConfig",
    "Verdict",
    "classify",
    "classify_values",
    "ConfusionResult",
    "confusion_experiment",
    "write_verdicts_csv",
]

GGBM = "GGBM"
TCBM = "TCBM"
INCONCLUSIVE = "INCONCLUSIVE"
LABELS = (GGBM, TCBM, INCONCLUSIVE)
CLASSES = (GGBM, TCBM)


@dataclass(frozen=True)
class DiscriminatorConfig:
    """Slope window and thresholds (slopes in bits per level).

    The defaults put the TCBM value of slope_2a (beta (1 - 1/alpha), about 0.27
    at beta = 0.8, alpha = 1.5) above ``eps_d`` while keeping the stability band
    ``eps_s`` wide enough for the level-14 sampling spread of slope_2.
    """

    window: int = 4
    eps_s: float = 0.15
    eps_d: float = 0.20

    def __post_init__(self):
        if self.window < 3:
            raise ValueError("window must cover at least 3 levels")
        if not (self.eps_s > 0 and self.eps_d > 0):
            raise ValueError("thresholds must be positive")
        if self.eps_s >= self.eps_d:
            raise ValueError("eps_s must be smaller than eps_d so the decision regions are disjoint")


DEFAULT_DISCRIMINATOR = DiscriminatorConfig()


@dataclass(frozen=True)
class Verdict:
    label: str
    slope_2: float
    slope_2a: float
    eps_s: float
    eps_d: float
    levels: tuple


def _check_alpha(alpha):
    if not 1 < alpha < 2:
        raise PreconditionError("classification needs 1 < alpha < 2")


def _decide(s2, s2a, cfg):
    if not (np.isfinite(s2) and np.isfinite(s2a)):
        return INCONCLUSIVE
    if s2 <= -cfg.eps_d and abs(s2a) <= cfg.eps_s:
        return GGBM
    if abs(s2) <= cfg.eps_s and s2a >= cfg.eps_d:
        return TCBM
    return INCONCLUSIVE


def _window(top, cfg):
    if top < cfg.window:
        raise PreconditionError(f"path level {top} is below the window of {cfg.window} levels")
    return list(range(top - cfg.window + 1, top + 1))


def classify_values(values, alpha, cfg: DiscriminatorConfig = DEFAULT_DISCRIMINATOR) -> list:
    """Classify every row of a (n_paths, 2^L + 1) array; returns Verdicts."""
    _check_alpha(alpha)
    v = np.atleast_2d(np.asarray(values, dtype=float))
    top = int(round(np.log2(v.shape[1] - 1)))
    levels = _window(top, cfg)
    s2 = fit_slopes(level_sums(v, 2.0, levels), levels)
    s2a = fit_slopes(level_sums(v, 2.0 / alpha, levels), levels)
    return [
        Verdict(_decide(a, b, cfg), float(a), float(b), cfg.eps_s, cfg.eps_d, tuple(levels))
        for a, b in zip(s2, s2a)
    ]


def classify(path: Path, beta, alpha, cfg: DiscriminatorConfig = DEFAULT_DISCRIMINATOR) -> Verdict:
    """GGBM if V_2 decays and V_{2/alpha} is stable; TCBM if V_2 is stable and
    V_{2/alpha} grows; INCONCLUSIVE otherwise (including when a sum is zero).

    ``beta`` is accepted for symmetry with the process parameters; the slope
    statistics depend on alpha only.
    """
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    return classify_values(path.values, alpha, cfg)[0]


@dataclass
class ConfusionResult:
    """Counts[true class][label] plus the per-replica verdicts."""

    counts: dict
    verdicts: list  # (replica, true_class, Verdict)

    @property
    def n(self):
        return len(self.verdicts)

    @property
    def accuracy(self) -> float:
        return sum(self.counts[c][c] for c in CLASSES) / self.n

    @property
    def inconclusive_rate(self) -> float:
        return sum(self.counts[c][INCONCLUSIVE] for c in CLASSES) / self.n

    def matrix(self) -> np.ndarray:
        return np.array([[self.counts[c][lab] for lab in LABELS] for c in CLASSES])


def _tally(rows):
    counts = {c: {lab: 0 for lab in LABELS} for c in CLASSES}
    for _, true, v in rows:
        counts[true][v.label] += 1
    return ConfusionResult(counts, rows)


def confusion_experiment(n_per_class, beta, alpha, level, cfg=DEFAULT_DISCRIMINATOR,
                         seed=0, workers=1, transform=None) -> ConfusionResult:
    """Classify n ggBm and n TCBM paths.

    Replica r of class c (ggBm = 0, TCBM = 1) uses stream 2 r + c. ``transform``
    optionally maps (class, replica, one-row ensemble) to new path values,
    which is how SDE solutions reuse this experiment.
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    if not 0 < beta < 1:
        raise PreconditionError("the dichotomy needs 0 < beta < 1")
    _check_alpha(alpha)
    specs = (ProcessSpec.ggbm(beta, alpha), ProcessSpec.tcbm(beta, alpha))

    def run(job):
        cls, reps = job
        e = simulate_ensemble(specs[cls], level, len(reps), seed,
                              indices=[2 * r + cls for r in reps])
        vals = e.values
        if transform is not None:
            vals = np.stack([transform(cls, r, _row(e, k)) for k, r in enumerate(reps)])
        return classify_values(vals, alpha, cfg)

    jobs = [(c, range(lo, min(lo + CHUNK, n_per_class)))
            for lo in range(0, n_per_class, CHUNK) for c in (0, 1)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    by_key = {}
    for (c, reps), verdicts in zip(jobs, results):
        for r, v in zip(reps, verdicts):
            by_key[(r, c)] = v
    rows = [(r, CLASSES[c], by_key[(r, c)]) for r in range(n_per_class) for c in (0, 1)]
    return _tally(rows)


CHUNK = 32
"""Replicas simulated together per class inside a confusion experiment."""


def _row(ens, k):
    """Row k of an ensemble as a one-replica ensemble."""
    return ens._replace(
        values=ens.values[k:k + 1],
        mixing=None if ens.mixing is None else ens.mixing[k:k + 1],
        time_change=None if ens.time_change is None else ens.time_change[k:k + 1],
    )


def write_verdicts_csv(result: ConfusionResult, fh) -> None:
    """Rows ``replica,true_class,label,slope_2,slope_2a``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["replica", "true_class", "label", "slope_2", "slope_2a"])
    for r, true, v in result.verdicts:
        w.writerow([r, true, v.label, f"{v.slope_2:.17g}", f"{v.slope_2a:.17g}"])
