"""Reproducible random streams and exact samplers.

Streams are Philox (counter-based) generators keyed by ``(seed, stream_index)``,
so any replica's stream can be rebuilt without touching the others and the
output never depends on how work is scheduled.

Samplers:

* positive beta-stable S with E exp(-theta S) = exp(-theta^beta), by Kanter's
  representation S = (A(u) / E)^((1 - b) / b);
* M-Wright Y = S^-beta, the law of the inverse subordinator at time 1;
* the size-biased M-Wright law (density proportional to y M_beta(y)), needed
  for exact first-passage sampling of the inverse subordinator;
* Mittag-Leffler waiting times J = E^(1/b) S / lambda^(1/b).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .specfun import kanter_a

__all__ = [
    "RngStream",
    "StableParams",
    "derive_stream",
    "subseed",
    "sample_positive_stable",
    "sample_m_wright",
    "sample_size_biased_m_wright",
    "sample_ml_waiting_time",
]

_MASK64 = (1 << 64) - 1
_TINY = 2.0 ** -54


class RngStream:
    """A deterministic random stream identified by ``(seed, stream_index)``.

    Not thread-safe: each replica owns its stream.
    """

    def __init__(self, seed: int, stream_index: int = 0):
        seed = int(seed)
        stream_index = int(stream_index)
        if not (0 <= seed <= _MASK64 and 0 <= stream_index <= _MASK64):
            raise ValueError("seed and stream_index must be unsigned 64-bit integers")
        self.seed = seed
        self.stream_index = stream_index
        self._bitgen = np.random.Philox(key=seed | (stream_index << 64))
        self.generator = np.random.Generator(self._bitgen)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_index={self.stream_index})"

    @property
    def counter(self) -> int:
        """Philox block counter; advances with every draw."""
        return int(self._bitgen.state["state"]["counter"][0])

    def uniform(self, size=None):
        """Uniforms on the open interval (0, 1)."""
        u = self.generator.random(size)
        # random() can return exactly 0.0; nudge it into the open interval
        return np.where(u == 0.0, _TINY, u) if size is not None else (u or _TINY)

    def exponential(self, size=None):
        return self.generator.standard_exponential(size)

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def gamma(self, shape, size=None):
        return self.generator.standard_gamma(shape, size)

    def beta(self, a, b, size=None):
        return self.generator.beta(a, b, size)

    def poisson(self, lam, size=None):
        return self.generator.poisson(lam, size)


def derive_stream(seed: int, index: int) -> RngStream:
    """Stream number ``index`` of the family rooted at ``seed``."""
    return RngStream(seed, index)


def subseed(seed: int, tag: int) -> int:
    """A 64-bit seed for an independent family of streams, keyed by (seed, tag)."""
    a, b = np.random.SeedSequence([int(seed), int(tag)]).generate_state(2, np.uint32)
    return int(a) | (int(b) << 32)


@dataclass(frozen=True)
class StableParams:
    """Index of a positive stable law. ``beta = 1`` is the degenerate law at 1."""

    beta: float

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise ValueError(f"stable index must lie in (0, 1], got {self.beta!r}")


def _beta_of(params):
    b = params.beta if isinstance(params, StableParams) else float(params)
    if not 0 < b <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {b!r}")
    return b


def _log_kanter(b, u):
    pu = np.pi * u
    return (
        np.log(np.sin((1 - b) * pu))
        + b / (1 - b) * np.log(np.sin(b * pu))
        - np.log(np.sin(pu)) / (1 - b)
    )


def sample_positive_stable(params, rng: RngStream, size=None):
    """Positive stable draws with Laplace transform exp(-theta^beta).

    Rejection-free (Kanter). Draw order: uniforms, then exponentials.
    """
    b = _beta_of(params)
    if b == 1.0:
        return 1.0 if size is None else np.ones(size)
    u = rng.uniform(size)
    e = rng.exponential(size)
    s = np.exp((1 - b) / b * (_log_kanter(b, u) - np.log(e)))
    return float(s) if size is None else s


def sample_m_wright(beta, rng: RngStream, size=None):
    """Draws with density M_beta, i.e. copies of U_beta(1) = S_beta(1)^-beta."""
    b = _beta_of(beta)
    if b == 1.0:
        return 1.0 if size is None else np.ones(size)
    u = rng.uniform(size)
    e = rng.exponential(size)
    # S^-b written directly in terms of Kanter's variables
    y = np.exp((1 - b) * (np.log(e) - _log_kanter(b, u)))
    return float(y) if size is None else y


def sample_size_biased_m_wright(beta, rng: RngStream, size: int):
    """Draws with density y M_beta(y) / E[Y].

    Reweighting Y = (E / A(u))^(1-b) by Y itself turns E into a
    Gamma(2 - b) variable and tilts u by A(u)^(b-1); the tilt is bounded by
    its value at u = 0 because A is increasing, so u is drawn by rejection.
    """
    b = _beta_of(beta)
    if b == 1.0:
        return np.ones(size)
    a0 = (1 - b) * b ** (b / (1 - b))
    accepted = []
    need = size
    while need > 0:
        batch = max(16, int(need * 2.5))
        u = rng.uniform(batch)
        w = rng.uniform(batch)
        keep = w <= (kanter_a(u, b) / a0) ** (b - 1)
        accepted.append(u[keep][:need])
        need -= accepted[-1].size
    u = np.concatenate(accepted)
    g = rng.gamma(2.0 - b, size)
    return np.exp((1 - b) * (np.log(g) - _log_kanter(b, u)))


def sample_ml_waiting_time(beta, lam, rng: RngStream, size=None):
    """Mittag-Leffler waiting times with P(J > t) = E_beta(-lam t^beta)."""
    b = _beta_of(beta)
    if not lam > 0:
        raise ValueError("rate must be > 0")
    e = rng.exponential(size)
    if b == 1.0:
        j = e / lam
    else:
        s = sample_positive_stable(b, rng, size)
        j = e ** (1.0 / b) * s / lam ** (1.0 / b)
    return float(j) if size is None else j
