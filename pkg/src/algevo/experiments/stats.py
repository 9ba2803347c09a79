"""Summary statistics over replicate runs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SummaryStats:
    """Step statistics of one (target, strategy) cell.

    ``mean_steps`` and ``se_steps`` only use converged replicates; they are
    NaN when no replicate converged (and ``se_steps`` is NaN for a single
    converged replicate).
    """

    n_converged: int
    n_extinct: int
    mean_steps: float
    se_steps: float

    @property
    def replicates(self) -> int:
        return self.n_converged + self.n_extinct

    @classmethod
    def from_runs(cls, steps, converged) -> "SummaryStats":
        steps = np.asarray(steps, dtype=float)
        converged = np.asarray(converged, dtype=bool)
        if steps.shape != converged.shape:
            raise ValueError("steps and converged must have the same length")
        ok = steps[converged]
        n = len(ok)
        mean = float(ok.mean()) if n else math.nan
        se = float(ok.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
        return cls(n, int((~converged).sum()), mean, se)

    def interval(self, width: float = 2.0) -> tuple[float, float]:
        return self.mean_steps - width * self.se_steps, self.mean_steps + width * self.se_steps


def speedup_quotient(s_u: SummaryStats, s_f: SummaryStats) -> float:
    """Ratio of the uniform mean to the strategy mean.

    Raises ``ValueError`` when either mean is undefined.
    """
    if not (math.isfinite(s_u.mean_steps) and math.isfinite(s_f.mean_steps)):
        raise ValueError("speed-up quotient is undefined when an arm has no converged run")
    if s_f.mean_steps == 0:
        raise ValueError("speed-up quotient is undefined for a zero-step strategy mean")
    return s_u.mean_steps / s_f.mean_steps


def intervals_disjoint(a: SummaryStats, b: SummaryStats, width: float = 2.0) -> bool:
    """True when the ``mean ± width * se`` intervals do not overlap."""
    lo_a, hi_a = a.interval(width)
    lo_b, hi_b = b.interval(width)
    return hi_a < lo_b or hi_b < lo_a
