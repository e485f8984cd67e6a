"""Box bounds over the eight design variables, with r_I capped by R_I."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from graspforge.transmission import DELTA, DESIGN_BOUNDS, DESIGN_NAMES, DesignParams


def _default_bounds() -> dict[str, tuple[float, float]]:
    lo_R, hi_R = DESIGN_BOUNDS["R_I"]
    out = {}
    for name in DESIGN_NAMES:
        lo, hi = DESIGN_BOUNDS[name]
        out[name] = (lo, hi_R - DELTA if hi is None else hi)
    return out


@dataclass(frozen=True)
class SearchSpace:
    """Static per-dimension bounds (SI) plus one dependent upper bound.

    ``bounds["r_I"][1]`` is the loosest cap; at a given point the effective cap
    is ``min(bounds["r_I"][1], R_I - gap)``.
    """

    bounds: dict[str, tuple[float, float]] = field(default_factory=_default_bounds)
    child: str = "r_I"
    parent: str = "R_I"
    gap: float = DELTA

    def __post_init__(self):
        if tuple(self.bounds) != DESIGN_NAMES:
            raise ValueError(f"bounds must list exactly {DESIGN_NAMES} in order, got {tuple(self.bounds)}")
        for name, (lo, hi) in self.bounds.items():
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"{name}: need finite lower < upper, got ({lo}, {hi})")
        lo_child = self.bounds[self.child][0]
        lo_parent = self.bounds[self.parent][0]
        if lo_child >= lo_parent - self.gap:
            raise ValueError(
                f"{self.child} lower bound {lo_child:g} leaves no room below {self.parent} - {self.gap:g} "
                f"at {self.parent} = {lo_parent:g}"
            )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.bounds)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds.values()])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds.values()])

    @property
    def child_index(self) -> int:
        return self.names.index(self.child)

    @property
    def parent_index(self) -> int:
        return self.names.index(self.parent)

    def child_upper(self, parent_value: float) -> float:
        return min(self.bounds[self.child][1], parent_value - self.gap)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform over the feasible region; the parent is drawn before the child."""
        lo, hi = self.lower, self.upper
        x = np.empty(self.dim)
        for i, name in enumerate(self.names):
            if name == self.child:
                continue
            x[i] = rng.uniform(lo[i], hi[i])
        c = self.child_index
        x[c] = rng.uniform(lo[c], self.child_upper(x[self.parent_index]))
        return x

    def clip(self, x) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=float), self.lower, self.upper)
        c = self.child_index
        x[c] = min(x[c], self.child_upper(x[self.parent_index]))
        return x

    def contains(self, x, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float)
        if np.any(x < self.lower - tol) or np.any(x > self.upper + tol):
            return False
        return x[self.child_index] <= self.child_upper(x[self.parent_index]) + tol

    def to_unit(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.lower) / (self.upper - self.lower)

    def from_unit(self, u) -> np.ndarray:
        return self.lower + np.asarray(u, dtype=float) * (self.upper - self.lower)

    def to_params(self, x) -> DesignParams:
        return DesignParams.from_vector(x)

    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)
