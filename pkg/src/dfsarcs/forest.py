"""Whole-digraph generating functions, exact PGFs, and distribution tables.

A DFS of the whole digraph splits into trees.  The first tree (root = label
1, any m-1 of the remaining labels, any visit order) contributes one
first-tree generating function; every later tree sees the earlier vertices
as extra cross-arc targets, which substitutes w -> w + (earlier vertices)*z
into its factor.  Summing over the size of the first tree:

    forest(0) = 1
    forest(j) = sum over m of perm(j-1, m-1) * t^(m-1)
                * tree(m) * forest(j-m) with w -> w + m*z

where perm(j-1, m-1) counts (label choice) x (visit order) for the first
tree, t marks tree arcs, and the tree factor is the FULL family entry.
The t-grading is kept as an outer index (strata by tree-arc count); stored
rational functions never contain t.

Binding every variable at p/n except one tracked role (times s) turns the
same two recursions into exact univariate rational functions in s: the
probability generating functions of the arc-class counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import perm

from .algebra import RationalFunction, ShiftSubstitution, ratfun_sum
from .model import ModelParams
from .recursions import Family, FamilyTable, TrackedContext, compute_tracked
from .univariate import Affine, UniRat, unirat_sum

__all__ = [
    "ROLES",
    "DistributionTable",
    "ForestTable",
    "PgfResult",
    "compose_forest",
    "dist_coeffs",
    "mean_arc_count",
    "pgf_arc_count",
    "total_probability",
    "verify_joint_symmetry",
    "verify_pgf_identity",
]

ROLES = ("L", "F", "B", "C", "T")

# Which symbolic variable carries each role in the full family.
_ROLE_VARS = {"L": "w", "F": "x", "B": "y", "C": "z"}


class ForestTable:
    """Memoized t-graded forest composition over a full-family table."""

    def __init__(self, tree_table: FamilyTable | None = None, *, workers: int = 1):
        self.tree_table = tree_table or FamilyTable(Family.FULL)
        if self.tree_table.family is not Family.FULL:
            raise ValueError("forest composition needs the full four-variable family")
        self.workers = workers
        self._strata: dict[int, dict[int, RationalFunction]] = {
            0: {0: RationalFunction.one()}
        }

    def strata(self, j: int) -> dict[int, RationalFunction]:
        """Tree-arc-degree strata of the j-label forest sum (unshifted w)."""
        cached = self._strata.get(j)
        if cached is not None:
            return cached
        buckets: dict[int, list[RationalFunction]] = {}
        for m in range(1, j + 1):
            count = perm(j - 1, m - 1)
            tree_factor = self.tree_table.entry(m) * count
            inner = self.strata(j - m)
            shift = ShiftSubstitution(gamma=m)
            for degree, part in inner.items():
                buckets.setdefault(degree + m - 1, []).append(tree_factor * part.shift(shift))
        out = {d: ratfun_sum(terms, workers=self.workers) for d, terms in sorted(buckets.items())}
        self._strata[j] = out
        return out


def compose_forest(n: int, t: Fraction | int = 1, table: ForestTable | None = None) -> RationalFunction:
    """The n-label forest generating function with the tree-arc mark bound to t."""
    table = table or ForestTable()
    strata = table.strata(n)
    t = Fraction(t)
    return ratfun_sum([part * (t**degree) for degree, part in strata.items()])


def total_probability(n: int, p: Fraction, table: ForestTable | None = None) -> Fraction:
    """(1-p)^n times the forest function at the all-(p/n) point; must be 1."""
    params = ModelParams(n, p)
    v = params.arc_weight
    point = {"w": v, "x": v, "y": v, "z": v}
    table = table or ForestTable()
    acc = Fraction(0)
    for degree, part in table.strata(n).items():
        acc += part.evaluate(point) * v**degree
    return (1 - p) ** n * acc


@dataclass(frozen=True)
class PgfResult:
    """Exact univariate PGF of one arc-class count."""

    role: str
    params: ModelParams
    function: UniRat

    def value_at_one(self) -> Fraction:
        return self.function.value_at_one()

    def mean(self) -> Fraction:
        return self.function.derivative_at_one()


@dataclass(frozen=True)
class DistributionTable:
    """Exact probabilities P(count = k) for k = 0..kmax plus the tail mass."""

    role: str
    params: ModelParams
    probabilities: tuple[Fraction, ...]
    tail: Fraction


def _tracked_context(params: ModelParams, role: str) -> tuple[TrackedContext, Affine, "_TreeMark"]:
    v = params.arc_weight
    const = Affine.const
    values = {name: const(v) for name in ("w", "x", "y", "z")}
    if role in _ROLE_VARS:
        values[_ROLE_VARS[role]] = Affine.tracked(v)
    ctx = TrackedContext(tracked=role, x=values["x"], y=values["y"], z=values["z"])
    t_mark = _TreeMark(v, tracked=(role == "T"))
    return ctx, values["w"], t_mark


class _TreeMark:
    """The numeric (or tracked) weight t^(m-1) attached to an m-vertex tree."""

    def __init__(self, value: Fraction, tracked: bool):
        self.value = value
        self.tracked = tracked

    def apply(self, f: UniRat, m: int) -> UniRat:
        weight = self.value ** (m - 1)
        if not self.tracked:
            return f * weight
        return f.scale_poly((0,) * (m - 1) + (weight,))


def _forest_tracked(j: int, ctx: TrackedContext, w0: Affine, t_mark: _TreeMark,
                    memo: dict[tuple[int, Fraction, Fraction], UniRat]) -> UniRat:
    if j == 0:
        return UniRat.one()
    key = (j, w0.a0, w0.a1)
    cached = memo.get(key)
    if cached is not None:
        return cached
    terms = []
    for m in range(1, j + 1):
        tree = compute_tracked(m, ctx, w0)
        rest = _forest_tracked(j - m, ctx, w0 + m * ctx.z, t_mark, memo)
        terms.append(t_mark.apply(perm(j - 1, m - 1) * (tree * rest), m))
    out = unirat_sum(terms)
    memo[key] = out
    return out


def pgf_arc_count(params: ModelParams, role: str) -> PgfResult:
    """E[s^count] for one arc class, as an exact rational function of s."""
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}")
    ctx, w0, t_mark = _tracked_context(params, role)
    memo: dict[tuple[int, Fraction, Fraction], UniRat] = {}
    f = _forest_tracked(params.n, ctx, w0, t_mark, memo)
    return PgfResult(role=role, params=params, function=f * (1 - params.p) ** params.n)


def dist_coeffs(pgf: PgfResult, kmax: int = 16) -> DistributionTable:
    """Exact P(count = k) for k <= kmax; the tail keeps the remaining mass."""
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    coeffs = pgf.function.series(kmax)
    probs = tuple(Fraction(c) for c in coeffs)
    tail = Fraction(1) - sum(probs)
    return DistributionTable(role=pgf.role, params=pgf.params, probabilities=probs, tail=tail)


def mean_arc_count(params: ModelParams, role: str) -> Fraction:
    """Exact expectation of one arc-class count (PGF derivative at 1)."""
    return pgf_arc_count(params, role).mean()


def verify_pgf_identity(params: ModelParams) -> bool:
    """True iff the forward-count and back-count PGFs agree exactly."""
    return pgf_arc_count(params, "F").function == pgf_arc_count(params, "B").function


def verify_joint_symmetry(n: int, table: ForestTable | None = None) -> bool:
    """Joint-law symmetry of (L, F, B+C, T) against (L, B, F+C, T).

    Checked stratum by stratum in the tree-arc grading, which proves the
    identity for every value of the tree mark at once: each stratum must be
    invariant under (forward -> x, back+cross -> z) versus
    (back -> x, forward+cross -> z).
    """
    table = table or ForestTable()
    for part in table.strata(n).values():
        merged_fb = part.identify("y", "z")
        merged_bf = part.map_variables({"x": "z", "y": "x"})
        if not merged_fb == merged_bf:
            return False
    return True
