"""p-variation statistics on dyadic partitions.

For a path w on the level-L dyadic grid of [0, 1] and m <= L,

    V_p^(m) = sum_i |w(i 2^-m) - w((i - 1) 2^-m)|^p.

The slope of log2 V_p^(m) against m is positive when p is below the variation
index, negative above it, and zero at it; :func:`estimate_index` reads the index
off that sign change.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import IndexEstimationError
from .paths import Path

__all__ = [
    "VariationProfile",
    "IndexEstimate",
    "level_sums",
    "dyadic_sums",
    "max_subsequence_sums",
    "exact_p_variation",
    "level_weights",
    "fit_slopes",
    "estimate_index",
    "DEFAULT_P_GRID",
    "write_profiles_csv",
    "read_profiles_csv",
]

DEFAULT_P_GRID = np.round(np.arange(1.0, 3.0001, 0.025), 6)
EXACT_DP_MAX_LENGTH = 2 ** 12 + 1


@dataclass
class VariationProfile:
    """V_p^(m) at each requested level. ``variant`` is "full" or "max"."""

    p: float
    levels: list
    sums: np.ndarray
    variant: str = "full"

    def __post_init__(self):
        self.levels = [int(m) for m in self.levels]
        self.sums = np.asarray(self.sums, dtype=float)

    def log2_sums(self):
        with np.errstate(divide="ignore"):
            return np.log2(self.sums)

    def slope(self, weights=None) -> float:
        return float(fit_slopes(self.sums[None, :], self.levels, weights)[0])


@dataclass
class IndexEstimate:
    """Estimated variation index with the slope table it came from."""

    v_hat: float
    p_grid: np.ndarray
    slopes: np.ndarray
    levels: list
    diagnostics: dict = field(default_factory=dict)


def _check_levels(levels, grid_level):
    levels = [int(m) for m in levels]
    if not levels:
        raise ValueError("need at least one level")
    bad = [m for m in levels if not 0 <= m <= grid_level]
    if bad:
        raise ValueError(f"levels {bad} exceed the path grid level {grid_level}")
    return levels


def level_sums(values, p, levels) -> np.ndarray:
    """V_p^(m) for one path (1-D ``values``) or many (rows of a 2-D array).

    ``values`` must hold 2^L + 1 points per row; returns shape (..., len(levels)).
    """
    v = np.asarray(values, dtype=float)
    n = v.shape[-1] - 1
    L = int(round(np.log2(n))) if n > 0 else -1
    if n < 1 or 2 ** L != n:
        raise ValueError("values must hold 2^L + 1 points per path")
    levels = _check_levels(levels, L)
    out = np.empty(v.shape[:-1] + (len(levels),))
    for k, m in enumerate(levels):
        sub = v[..., :: 2 ** (L - m)]
        out[..., k] = np.sum(np.abs(np.diff(sub, axis=-1)) ** p, axis=-1)
    return out


def dyadic_sums(path: Path, p: float, levels) -> VariationProfile:
    """Full-partition sums V_p^(m) at each level, from grid values only."""
    if not p > 0:
        raise ValueError("p must be > 0")
    levels = _check_levels(levels, path.grid.level)
    return VariationProfile(p, levels, level_sums(path.values, p, levels))


def exact_p_variation(values, p: float) -> float:
    """max over subsequences containing both endpoints of sum |v_j - v_i|^p.

    Dynamic programming, best[j] = max_{i<j} best[i] + |v_j - v_i|^p; O(n^2).
    For p >= 1 this is the p-variation of the piecewise-linear interpolant.
    """
    if p < 1:
        raise ValueError("exact p-variation by subsequence DP needs p >= 1")
    v = np.asarray(values, dtype=float).ravel()
    if v.size > EXACT_DP_MAX_LENGTH:
        raise ValueError(f"sequence longer than {EXACT_DP_MAX_LENGTH} points")
    if v.size < 2:
        return 0.0
    best = np.empty(v.size)
    best[0] = 0.0
    for j in range(1, v.size):
        best[j] = np.max(best[:j] + np.abs(v[j] - v[:j]) ** p)
    return float(best[-1])


def max_subsequence_sums(path: Path, p: float, levels) -> VariationProfile:
    """Exact p-variation of the path restricted to each dyadic level.

    Nondecreasing in the level because the grids are nested.
    """
    levels = _check_levels(levels, path.grid.level)
    sums = [exact_p_variation(path.restrict(m).values if m < path.grid.level
                              else path.values, p) if m > 0
            else abs(path.values[-1] - path.values[0]) ** p for m in levels]
    return VariationProfile(p, levels, np.asarray(sums), variant="max")


def level_weights(levels) -> np.ndarray:
    """Unit weights with the top two levels doubled."""
    w = np.ones(len(levels))
    order = np.argsort(levels)
    w[order[-2:]] = 2.0
    return w


def fit_slopes(sums, levels, weights=None) -> np.ndarray:
    """Weighted least-squares slopes of log2 sums against level.

    ``sums`` has shape (..., len(levels)). Rows containing a zero sum give nan.
    """
    s = np.asarray(sums, dtype=float)
    x = np.asarray(levels, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two levels for a slope")
    w = level_weights(levels) if weights is None else np.asarray(weights, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.log2(s)
    y = np.where(np.isfinite(y), y, np.nan)
    xc = x - np.sum(w * x) / np.sum(w)
    return np.sum(w * xc * y, axis=-1) / np.sum(w * xc * xc)


def _crossing(p_grid, slopes):
    """First downward zero crossing of the slope table, linearly interpolated."""
    for k in range(len(p_grid) - 1):
        a, b = slopes[k], slopes[k + 1]
        if a == 0.0:
            return float(p_grid[k])
        if a > 0 > b or (a > 0 and b == 0.0):
            return float(p_grid[k] + a / (a - b) * (p_grid[k + 1] - p_grid[k]))
    return None


def estimate_index(path: Path, p_grid=None, level_range=None) -> IndexEstimate:
    """Variation index of one path from the zero crossing of s(p).

    ``level_range`` is an inclusive (low, high) pair, default (grid level - 6, grid level).
    Raises :class:`IndexEstimationError` when s(p) has no sign change on p_grid.
    """
    p_grid = DEFAULT_P_GRID if p_grid is None else np.asarray(p_grid, dtype=float)
    if np.any(np.diff(p_grid) <= 0) or np.any(p_grid <= 0):
        raise ValueError("p_grid must be positive and increasing")
    top = path.grid.level
    lo, hi = (max(1, top - 6), top) if level_range is None else level_range
    levels = _check_levels(range(lo, hi + 1), top)
    if len(levels) < 3:
        raise ValueError("level range must span at least three levels")
    slopes = np.array([fit_slopes(level_sums(path.values, p, levels), levels) for p in p_grid])
    v = _crossing(p_grid, slopes) if np.all(np.isfinite(slopes)) else None
    if v is None:
        raise IndexEstimationError(
            "slope table has no sign change over the probe exponents",
            p_grid=p_grid, slopes=slopes,
        )
    return IndexEstimate(v, p_grid, slopes, levels, {"weights": level_weights(levels)})


def write_profiles_csv(profiles, fh) -> None:
    """Rows ``p,level,sum`` with 17 significant digits."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["p", "level", "sum"])
    for prof in profiles:
        for m, s in zip(prof.levels, prof.sums):
            w.writerow([f"{prof.p:.17g}", m, f"{s:.17g}"])


def read_profiles_csv(fh) -> list:
    rows = list(csv.DictReader(fh))
    out = {}
    for r in rows:
        out.setdefault(float(r["p"]), []).append((int(r["level"]), float(r["sum"])))
    return [VariationProfile(p, [m for m, _ in v], [s for _, s in v]) for p, v in out.items()]
