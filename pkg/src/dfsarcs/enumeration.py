"""Brute-force oracle: exhaustive DFS instance enumeration and series checks.

An instance is the full sequence of explored arcs.  The enumerator walks
the decision tree of the exploration process directly: at every step the
active vertex either emits one more arc (one branch per possible target,
classified on the spot) or stops emitting; when the stack empties, the
smallest unused label becomes the next root.  Bounding the total arc count
makes the tree finite, and the tally counts are exact by construction.

The series side expands a factored rational function to a bounded total
degree by iterated truncated geometric expansion of each denominator
factor, so the comparison is coefficient-for-coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .algebra import Exponents, Poly, RationalFunction
from .model import ArcTally

__all__ = [
    "BoundTooSmallError",
    "InstanceCounter",
    "SeriesMismatch",
    "compare_series",
    "enumerate_forest_instances",
    "enumerate_tree_instances",
    "truncated_series",
]


class BoundTooSmallError(Exception):
    """The arc bound cannot accommodate a single spanning tree."""


@dataclass(frozen=True)
class InstanceCounter:
    """Exact tally counts of enumerated instances with bounded total arcs."""

    n: int
    max_arcs: int
    scope: str  # "single-tree" or "full-forest"
    counts: Mapping[ArcTally, int]

    def to_json(self) -> list[dict]:
        rows = sorted(self.counts.items())
        return [
            {"L": t.L, "F": t.F, "B": t.B, "C": t.C, "T": t.T, "count": c}
            for t, c in rows
        ]


def enumerate_tree_instances(n: int, max_arcs: int) -> InstanceCounter:
    """Count arc sequences that grow one tree on vertices 1..n in label order.

    The visitation order is fixed, so discovery time equals the label; a
    tree arc must hit exactly the next label, and every other arc stays
    inside the n given vertices.  The sequence ends when the root stops with
    the tree complete.  Total arcs (tree arcs included) stay <= max_arcs.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if max_arcs < n - 1:
        raise BoundTooSmallError(f"max_arcs={max_arcs} cannot build a tree on {n} vertices")
    counts: dict[ArcTally, int] = {}
    budget = max_arcs - (n - 1)  # non-tree arcs available

    def explore(disc: int, stack: tuple[int, ...], tally: tuple[int, int, int, int], arcs: int) -> None:
        v = stack[-1]
        if len(stack) == 1:
            if disc == n:
                key = ArcTally(*tally, n - 1)
                counts[key] = counts.get(key, 0) + 1
            # root stopped early: no tree on all n vertices, not counted
        else:
            explore(disc, stack[:-1], tally, arcs)
        L, F, B, C = tally
        if disc < n:
            # the forced next tree arc
            explore(disc + 1, stack + (disc + 1,), tally, arcs)
        if arcs == budget:
            return
        for target in range(1, n + 1):
            if target == v:
                explore(disc, stack, (L + 1, F, B, C), arcs + 1)
            elif target <= disc:
                if target in stack:
                    explore(disc, stack, (L, F, B + 1, C), arcs + 1)
                elif target > v:
                    explore(disc, stack, (L, F + 1, B, C), arcs + 1)
                else:
                    explore(disc, stack, (L, F, B, C + 1), arcs + 1)

    explore(1, (1,), (0, 0, 0, 0), 0)
    return InstanceCounter(n=n, max_arcs=max_arcs, scope="single-tree", counts=counts)


def enumerate_forest_instances(n: int, max_arcs: int) -> InstanceCounter:
    """Count complete DFS instances on labels 1..n with total arcs <= max_arcs.

    Roots follow the smallest-unused-label rule; tree arcs may hit any
    undiscovered vertex (every label assignment is its own instance).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if max_arcs < 0:
        raise ValueError("max_arcs must be nonnegative")
    counts: dict[ArcTally, int] = {}

    def next_root(disc: dict[int, int], tally: tuple[int, int, int, int, int], arcs: int) -> None:
        for v in range(1, n + 1):
            if v not in disc:
                d2 = dict(disc)
                d2[v] = len(d2)
                explore(d2, (v,), tally, arcs)
                return
        key = ArcTally(*tally)
        counts[key] = counts.get(key, 0) + 1

    def explore(disc: dict[int, int], stack: tuple[int, ...], tally: tuple[int, int, int, int, int], arcs: int) -> None:
        v = stack[-1]
        if len(stack) == 1:
            next_root(disc, tally, arcs)
        else:
            explore(disc, stack[:-1], tally, arcs)
        if arcs == max_arcs:
            return
        L, F, B, C, T = tally
        for target in range(1, n + 1):
            if target == v:
                explore(disc, stack, (L + 1, F, B, C, T), arcs + 1)
            elif target not in disc:
                d2 = dict(disc)
                d2[target] = len(d2)
                explore(d2, stack + (target,), (L, F, B, C, T + 1), arcs + 1)
            elif target in stack:
                explore(disc, stack, (L, F, B + 1, C, T), arcs + 1)
            elif disc[target] > disc[v]:
                explore(disc, stack, (L, F + 1, B, C, T), arcs + 1)
            else:
                explore(disc, stack, (L, F, B, C + 1, T), arcs + 1)

    next_root({}, (0, 0, 0, 0, 0), 0)
    return InstanceCounter(n=n, max_arcs=max_arcs, scope="full-forest", counts=counts)


def _truncated_inverse(form_poly: Poly, bound: int) -> Poly:
    """Series of 1/(1 - ell) to total degree <= bound, ell = 1 - form."""
    ell = Poly.one() - form_poly
    out = Poly.one()
    power = Poly.one()
    for _ in range(bound):
        power = _truncated_mul(power, ell, bound)
        if not power:
            break
        out = out + power
    return out


def _truncated_mul(a: Poly, b: Poly, bound: int) -> Poly:
    terms: dict[Exponents, Fraction | int] = {}
    for ea, ca in a.terms():
        da = sum(ea)
        for eb, cb in b.terms():
            if da + sum(eb) > bound:
                continue
            key = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3])
            terms[key] = terms.get(key, 0) + ca * cb
    return Poly.from_terms(terms)


def truncated_series(f: RationalFunction, bound: int) -> dict[Exponents, Fraction | int]:
    """Multivariate Taylor coefficients of f up to total degree <= bound."""
    acc = Poly.from_terms((e, c) for e, c in f.num.terms() if sum(e) <= bound)
    for form, mult in f.den.items():
        inv = _truncated_inverse(form.as_poly(), bound)
        for _ in range(mult):
            acc = _truncated_mul(acc, inv, bound)
    return {e: c for e, c in acc.terms()}


@dataclass(frozen=True)
class SeriesMismatch:
    tally: ArcTally
    series_coefficient: Fraction | int
    instance_count: int


def compare_series(
    counter: InstanceCounter,
    f: "RationalFunction | Mapping[int, RationalFunction]",
    bound: int,
) -> tuple[bool, SeriesMismatch | None]:
    """Coefficient-for-coefficient check of the counter against a series.

    ``bound`` limits the total degree (tree arcs included).  For single-tree
    counters ``f`` is one rational function with an implicit tree-arc degree
    of n-1; for forest counters ``f`` maps each tree-arc degree to its
    stratum.  Returns (True, None) on agreement, else the graded-least
    mismatch.
    """
    if bound > counter.max_arcs:
        raise ValueError("bound exceeds the enumeration's arc bound")
    if isinstance(f, RationalFunction):
        strata: Mapping[int, RationalFunction] = {counter.n - 1: f}
    else:
        strata = f
    expected: dict[ArcTally, Fraction | int] = {}
    for t_degree, part in strata.items():
        if t_degree > bound:
            continue
        for exps, coeff in truncated_series(part, bound - t_degree).items():
            expected[ArcTally(*exps, t_degree)] = coeff
    keys = set(expected)
    keys.update(t for t in counter.counts if t.total_arcs <= bound)
    mismatch: SeriesMismatch | None = None
    for tally in sorted(keys, key=lambda t: (t.total_arcs, t)):
        if tally.total_arcs > bound:
            continue
        series_c = expected.get(tally, 0)
        count = counter.counts.get(tally, 0)
        if series_c != count:
            mismatch = SeriesMismatch(tally, series_c, count)
            return False, mismatch
    return True, None
