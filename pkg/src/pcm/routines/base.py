from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from ..objectives import Restriction

PRECISION = "precision-rule"
BUDGET = "budget-exhausted"


@dataclass
class RoutineOutcome:
    """Result of one coordinate-minimization call.

    ``queries[j]`` is the scalar queried at the routine's ``j``-th sample and
    ``losses[j]`` the exact restricted loss there (``None`` when not recorded).
    """

    final_point: float
    samples_used: int
    queries: np.ndarray
    losses: np.ndarray | None
    terminated_by: str
    path: list[tuple[int, int]] | None = field(default=None, repr=False)

    @property
    def trace(self) -> list[tuple[int, float, float | None]]:
        losses = self.losses if self.losses is not None else [None] * self.samples_used
        return [(j, float(q), None if v is None else float(v)) for j, (q, v) in enumerate(zip(self.queries, losses))]


def untouched(start: float) -> RoutineOutcome:
    return RoutineOutcome(float(start), 0, np.empty(0), np.empty(0), BUDGET)


class Routine(Protocol):
    """A self-terminating one-dimensional routine as driven by the PCM loop."""

    def run(
        self,
        restriction: Restriction,
        start: float,
        eps: float,
        mu0: float,
        budget: int,
        rng: np.random.Generator,
    ) -> RoutineOutcome: ...
