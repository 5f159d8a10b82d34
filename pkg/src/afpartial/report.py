from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CheckReport:
    """Outcome of one verification routine.

    ``residuals`` maps sub-identity names to their maximum residual over all
    trials. Exact (integer) checks report 0.0 on success.
    """

    check: str
    trials: int
    residuals: dict[str, float] = field(default_factory=dict)
    passed: bool = True
    witness: dict | None = None
    notes: str = ""

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def bump(self, key: str, value: float) -> None:
        self.residuals[key] = max(self.residuals.get(key, 0.0), float(value))


def trial_seeds(seed: int, trials: int) -> list[int]:
    """Independent per-trial seeds, reproducible from ``(seed, trial index)``."""
    ss = np.random.SeedSequence(seed)
    return [int(c.generate_state(1)[0]) for c in ss.spawn(trials)]
