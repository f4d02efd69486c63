"""Monte Carlo engine: sampling, DFS classification, and goodness-of-fit.

Floating point lives only here (sampling and test statistics); every exact
table it is compared against comes from :mod:`dfsarcs.forest`.

Randomness contract: Philox (counter-based) keyed by (master seed, trial
index), so each trial's stream is reproducible in isolation and summaries
do not depend on scheduling or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import chi2

from .forest import DistributionTable
from .model import ArcTally, ModelParams

__all__ = [
    "Digraph",
    "DfsResult",
    "FitReport",
    "InsufficientDataError",
    "TrialSummary",
    "classify_by_ancestry",
    "compare_empirical",
    "dfs_classify",
    "gen_digraph",
    "parse_projection",
    "run_trials",
    "sample_geometric",
    "trial_rng",
]

_MASK64 = (1 << 64) - 1


class InsufficientDataError(Exception):
    """Too few expected counts per cell for a meaningful chi-square test."""


@dataclass(frozen=True)
class Digraph:
    """A sampled multidigraph: per-vertex target lists in emission order (1-based)."""

    n: int
    arcs: tuple[tuple[int, ...], ...]

    @property
    def total_arcs(self) -> int:
        return sum(len(a) for a in self.arcs)


@dataclass(frozen=True)
class DfsResult:
    """One classified DFS run."""

    tally: ArcTally
    tree_sizes: tuple[int, ...]
    discovery_order: tuple[int, ...]
    arc_events: tuple[tuple[int, int, str], ...]  # (source, target, class) in scan order


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """The counter-based generator of one trial, split from the master seed."""
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, index & _MASK64]))


def sample_geometric(p: float, rng: np.random.Generator) -> int:
    """Number of arcs emitted by one vertex: P(k) = p^k (1-p).

    Inverse transform k = floor(ln U / ln p) with U uniform on (0, 1);
    U = 0 is resampled.
    """
    if not 0 < p < 1:
        raise ValueError("p must satisfy 0 < p < 1")
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    return int(math.log(u) / math.log(p))


def gen_digraph(params: ModelParams, rng: np.random.Generator) -> Digraph:
    p = float(params.p)
    arcs = []
    for _ in range(params.n):
        k = sample_geometric(p, rng)
        if k:
            targets = rng.integers(1, params.n + 1, size=k)
            arcs.append(tuple(int(t) for t in targets))
        else:
            arcs.append(())
    return Digraph(n=params.n, arcs=tuple(arcs))


def dfs_classify(g: Digraph) -> DfsResult:
    """Iterative DFS with scan-time arc classification.

    Roots are the smallest undiscovered labels.  For an arc u -> v seen
    while u is active: v undiscovered is a tree arc; v == u a loop; v on the
    active path a back arc; otherwise a later discovery time means v lies in
    u's subtree (forward), and an earlier one means cross.
    """
    n = g.n
    disc = [0] * (n + 1)  # 1-based; 0 = undiscovered
    on_stack = [False] * (n + 1)
    clock = 0
    counts = {"L": 0, "F": 0, "B": 0, "C": 0, "T": 0}
    events: list[tuple[int, int, str]] = []
    order: list[int] = []
    tree_sizes: list[int] = []

    for root in range(1, n + 1):
        if disc[root]:
            continue
        clock += 1
        disc[root] = clock
        order.append(root)
        tree_sizes.append(1)
        on_stack[root] = True
        stack: list[tuple[int, int]] = [(root, 0)]  # (vertex, next arc index)
        while stack:
            u, i = stack[-1]
            if i >= len(g.arcs[u - 1]):
                on_stack[u] = False
                stack.pop()
                continue
            stack[-1] = (u, i + 1)
            v = g.arcs[u - 1][i]
            if v == u:
                kind = "L"
            elif not disc[v]:
                kind = "T"
                clock += 1
                disc[v] = clock
                order.append(v)
                tree_sizes[-1] += 1
                on_stack[v] = True
                stack.append((v, 0))
            elif on_stack[v]:
                kind = "B"
            elif disc[v] > disc[u]:
                kind = "F"
            else:
                kind = "C"
            counts[kind] += 1
            events.append((u, v, kind))

    tally = ArcTally(counts["L"], counts["F"], counts["B"], counts["C"], counts["T"])
    return DfsResult(
        tally=tally,
        tree_sizes=tuple(tree_sizes),
        discovery_order=tuple(order),
        arc_events=tuple(events),
    )


def classify_by_ancestry(g: Digraph, result: DfsResult) -> tuple[str, ...]:
    """Independent re-classification from the finished forest (test oracle).

    Replays the DFS only to recover discovery/finish intervals, then labels
    every non-tree arc by interval nesting: v is an ancestor of u iff
    disc[v] <= disc[u] and fin[u] <= fin[v].
    """
    n = g.n
    disc = [0] * (n + 1)
    fin = [0] * (n + 1)
    clock = 0
    for root in range(1, n + 1):
        if disc[root]:
            continue
        clock += 1
        disc[root] = clock
        stack = [(root, 0)]
        while stack:
            u, i = stack[-1]
            if i >= len(g.arcs[u - 1]):
                clock += 1
                fin[u] = clock
                stack.pop()
                continue
            stack[-1] = (u, i + 1)
            v = g.arcs[u - 1][i]
            if v != u and not disc[v]:
                clock += 1
                disc[v] = clock
                stack.append((v, 0))

    def is_proper_ancestor(a: int, d: int) -> bool:
        return a != d and disc[a] < disc[d] and fin[d] < fin[a]

    kinds: list[str] = []
    for u, v, kind in result.arc_events:
        if v == u:
            kinds.append("L")
        elif kind == "T":
            kinds.append("T")  # tree arcs are part of the replayed forest itself
        elif is_proper_ancestor(v, u):
            kinds.append("B")
        elif is_proper_ancestor(u, v):
            kinds.append("F")
        else:
            kinds.append("C")
    return tuple(kinds)


_COMPONENTS = {"L": 0, "F": 1, "B": 2, "C": 3, "T": 4}


def parse_projection(spec: Sequence[str]) -> tuple[tuple[int, ...], ...]:
    """Each projection entry is an arc class or a '+'-joined sum, e.g. "B+C"."""
    out = []
    for entry in spec:
        idxs = []
        for part in entry.split("+"):
            part = part.strip()
            if part not in _COMPONENTS:
                raise ValueError(f"unknown arc class {part!r} in projection")
            idxs.append(_COMPONENTS[part])
        out.append(tuple(idxs))
    return tuple(out)


@dataclass(frozen=True)
class TrialSummary:
    """Empirical counts of projected tallies over independent trials."""

    params: ModelParams
    trials: int
    seed: int
    projection: tuple[str, ...]
    counts: Mapping[tuple[int, ...], int]
    moments: Mapping[str, tuple[float, float]]  # class -> (sum, sum of squares)

    def mean(self, role: str) -> float:
        s, _ = self.moments[role]
        return s / self.trials

    def variance(self, role: str) -> float:
        s, ss = self.moments[role]
        m = s / self.trials
        return max(ss / self.trials - m * m, 0.0)

    def to_json(self) -> dict:
        histogram = [
            {"key": list(k), "count": c} for k, c in sorted(self.counts.items())
        ]
        return {
            "n": self.params.n,
            "p": f"{self.params.p.numerator}/{self.params.p.denominator}",
            "trials": self.trials,
            "seed": self.seed,
            "projection": list(self.projection),
            "histogram": histogram,
        }


def run_trials(
    params: ModelParams,
    trials: int,
    seed: int = 0,
    projection: Sequence[str] = ("F",),
) -> TrialSummary:
    """Independent classified DFS runs with per-trial split RNG streams."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    proj = parse_projection(projection)
    counts: dict[tuple[int, ...], int] = {}
    sums = [0.0] * 5
    sqs = [0.0] * 5
    for i in range(trials):
        rng = trial_rng(seed, i)
        result = dfs_classify(gen_digraph(params, rng))
        tally = result.tally
        key = tuple(sum(tally[j] for j in group) for group in proj)
        counts[key] = counts.get(key, 0) + 1
        for j in range(5):
            sums[j] += tally[j]
            sqs[j] += tally[j] * tally[j]
    moments = {name: (sums[idx], sqs[idx]) for name, idx in _COMPONENTS.items()}
    return TrialSummary(
        params=params,
        trials=trials,
        seed=seed,
        projection=tuple(projection),
        counts=counts,
        moments=moments,
    )


@dataclass(frozen=True)
class FitReport:
    """Chi-square goodness-of-fit of an empirical law against an exact table."""

    statistic: float
    dof: int
    threshold: float
    significance: float
    tv_distance: float
    passed: bool
    cells: int


def compare_empirical(
    summary: TrialSummary,
    exact: DistributionTable,
    significance: float = 0.001,
) -> FitReport:
    """Chi-square with a tail bucket; low-expectation cells merge into the tail.

    Requires a single-component projection whose values index the exact
    table.  Raises InsufficientDataError when fewer than two cells carry an
    expected count of at least 5 after bucketing.
    """
    if len(summary.projection) != 1:
        raise ValueError("goodness-of-fit needs a single-component projection")
    trials = summary.trials
    kmax = len(exact.probabilities) - 1
    observed = [0] * (kmax + 1)
    observed_tail = 0
    for key, c in summary.counts.items():
        k = key[0]
        if k <= kmax:
            observed[k] += c
        else:
            observed_tail += c
    expected = [float(p) * trials for p in exact.probabilities]
    expected_tail = float(exact.tail) * trials

    # total-variation distance over the unmerged cells
    tv = 0.5 * (
        sum(abs(o - e) for o, e in zip(observed, expected))
        + abs(observed_tail - expected_tail)
    ) / trials

    # trim the top into the tail until both it and the last kept cell reach 5
    cut = kmax + 1
    while cut > 0 and (expected_tail < 5.0 or expected[cut - 1] < 5.0):
        cut -= 1
        expected_tail += expected[cut]
        observed_tail += observed[cut]
    # fold any remaining low-expectation interior cells into the tail bucket
    obs_cells: list[float] = []
    exp_cells: list[float] = []
    for o, e in zip(observed[:cut], expected[:cut]):
        if e < 5.0:
            observed_tail += o
            expected_tail += e
        else:
            obs_cells.append(o)
            exp_cells.append(e)
    obs_cells.append(observed_tail)
    exp_cells.append(expected_tail)
    if len(obs_cells) < 2 or expected_tail < 5.0:
        raise InsufficientDataError("fewer than two cells with expected count >= 5")
    statistic = sum((o - e) ** 2 / e for o, e in zip(obs_cells, exp_cells))
    dof = len(obs_cells) - 1
    threshold = float(chi2.isf(significance, dof))
    return FitReport(
        statistic=statistic,
        dof=dof,
        threshold=threshold,
        significance=significance,
        tv_distance=tv,
        passed=statistic <= threshold,
        cells=len(obs_cells),
    )
