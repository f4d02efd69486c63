"""Shared value types: model parameters and arc-classification tallies."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple


class ArcTally(NamedTuple):
    """Counts of the five arc classes of one DFS outcome."""

    L: int  # loops
    F: int  # forward arcs
    B: int  # back arcs
    C: int  # cross arcs
    T: int  # tree arcs

    @property
    def total_arcs(self) -> int:
        return self.L + self.F + self.B + self.C + self.T


@dataclass(frozen=True)
class ModelParams:
    """Vertex count and the geometric-outdegree parameter p (exact, 0 < p < 1)."""

    n: int
    p: Fraction

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        p = Fraction(self.p)
        if not (0 < p < 1):
            raise ValueError("p must satisfy 0 < p < 1")
        object.__setattr__(self, "p", p)

    @property
    def arc_weight(self) -> Fraction:
        """The per-arc generating-function argument p/n."""
        return self.p / self.n
