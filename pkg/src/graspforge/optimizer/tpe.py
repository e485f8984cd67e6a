"""Tree-structured Parzen Estimator and the uniform baseline.

Both samplers maximize.  The estimator works in unit coordinates of the
space's static box and treats every dimension independently; the r_I cap is
enforced afterwards by resampling that one coordinate and, as a last resort,
clamping.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import truncnorm

from graspforge.optimizer.space import SearchSpace
from graspforge.transmission import DesignParams

CHILD_RESAMPLES = 16


@dataclass(frozen=True)
class TpeConfig:
    n_startup: int = 10
    good_fraction: float = 0.1
    n_candidates: int = 24
    prior_weight: float = 1.0
    magic_clip: bool = True

    def __post_init__(self):
        if self.n_startup < 2:
            raise ValueError("n_startup must be at least 2")
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be at least 1")
        if not 0.0 < self.good_fraction < 1.0:
            raise ValueError("good_fraction must lie in (0, 1)")
        if self.prior_weight <= 0.0:
            raise ValueError("prior_weight must be positive")

    def n_good(self, n: int) -> int:
        return min(max(1, math.ceil(self.good_fraction * n)), n - 1)


class ParzenEstimator:
    """Per-dimension mixture of Gaussians truncated to [0, 1], plus a broad prior.

    ``points`` has shape (n, d) in unit coordinates.
    """

    def __init__(self, points: np.ndarray, cfg: TpeConfig):
        points = np.atleast_2d(points)
        n, d = points.shape
        self.mu = np.hstack([points.T, np.full((d, 1), 0.5)])  # (d, n + 1)
        w = np.append(np.ones(n), cfg.prior_weight)
        self.log_w = np.log(w / w.sum())
        self.sigma = np.vstack([self._bandwidths(self.mu[j], cfg) for j in range(d)])

    @staticmethod
    def _bandwidths(mu: np.ndarray, cfg: TpeConfig) -> np.ndarray:
        # each kernel spans the larger gap to its neighbours; the domain edges act as neighbours
        order = np.argsort(mu, kind="stable")
        padded = np.concatenate([[0.0], mu[order], [1.0]])
        gaps = np.maximum(padded[1:-1] - padded[:-2], padded[2:] - padded[1:-1])
        sigma = np.empty_like(mu)
        sigma[order] = gaps
        sigma[-1] = 1.0  # prior
        floor = 1.0 / min(100.0, len(mu) + 1.0) if cfg.magic_clip else 1e-12
        return np.clip(sigma, floor, 1.0)

    def _bounds(self, j):
        mu, s = self.mu[j], self.sigma[j]
        return (0.0 - mu) / s, (1.0 - mu) / s

    def sample(self, rng: np.random.Generator, k: int, dims: Sequence[int] | None = None) -> np.ndarray:
        dims = range(self.mu.shape[0]) if dims is None else dims
        w = np.exp(self.log_w)
        out = np.empty((k, len(dims)))
        for col, j in enumerate(dims):
            comp = rng.choice(len(w), size=k, p=w)
            a, b = self._bounds(j)
            out[:, col] = truncnorm.rvs(a[comp], b[comp], loc=self.mu[j, comp], scale=self.sigma[j, comp],
                                        random_state=rng)
        return np.clip(out, 0.0, 1.0)

    def log_pdf(self, u: np.ndarray) -> np.ndarray:
        """Joint log density of rows of ``u`` (k, d)."""
        u = np.atleast_2d(u)
        total = np.zeros(u.shape[0])
        for j in range(self.mu.shape[0]):
            a, b = self._bounds(j)
            comp = truncnorm.logpdf(u[:, j, None], a, b, loc=self.mu[j], scale=self.sigma[j])
            total += logsumexp(comp + self.log_w, axis=1)
        return total


def split_history(scores: np.ndarray, n_good: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices of the best ``n_good`` scores and of the rest; earlier trials win ties."""
    order = np.argsort(-scores, kind="stable")
    return order[:n_good], order[n_good:]


def ask_random(space: SearchSpace, rng: np.random.Generator) -> DesignParams:
    return space.to_params(space.sample(rng))


def suggest_vector(xs: np.ndarray, scores: np.ndarray, space: SearchSpace, cfg: TpeConfig,
                   rng: np.random.Generator) -> np.ndarray:
    if len(scores) < cfg.n_startup:
        return space.sample(rng)
    good, bad = split_history(scores, cfg.n_good(len(scores)))
    unit = space.to_unit(xs)
    below = ParzenEstimator(unit[good], cfg)
    above = ParzenEstimator(unit[bad], cfg)

    cand = space.from_unit(below.sample(rng, cfg.n_candidates))
    c, p = space.child_index, space.parent_index
    lo, span = space.lower[c], space.upper[c] - space.lower[c]
    for i in range(len(cand)):
        cap = space.child_upper(cand[i, p])
        tries = 0
        while cand[i, c] > cap and tries < CHILD_RESAMPLES:
            cand[i, c] = lo + span * below.sample(rng, 1, [c])[0, 0]
            tries += 1
        cand[i] = space.clip(cand[i])

    u = space.to_unit(cand)
    ratio = below.log_pdf(u) - above.log_pdf(u)
    return cand[int(np.argmax(ratio))]


def ask(history: Sequence, space: SearchSpace, cfg: TpeConfig, rng: np.random.Generator) -> DesignParams:
    """Next design to evaluate, given finished trials (anything with ``params`` and ``score``)."""
    if len(history) < cfg.n_startup:
        return ask_random(space, rng)
    xs = np.array([t.params.as_vector() for t in history])
    scores = np.array([float(t.score) for t in history])
    return space.to_params(suggest_vector(xs, scores, space, cfg, rng))
