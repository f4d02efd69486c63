"""Memoized computation of the first-tree generating-function families.

Four families share one recursion skeleton

    entry(1) = 1 / (1 - w)
    entry(n) = prefactor(n) * sum over m of
               shift1(entry(m)) * shift2(m)(entry(n - m))

and differ only in the prefactor and the two shifts:

    full      four variables (w, x, y, z); the second child absorbs a back
              option and m-1 cross options, so w -> w + y + (m-1)z
    merged_fb three variables (y unused): forward tracked by x, back and
              cross merged into z; w -> w + mz
    merged_bf mirror image: back tracked by x, forward and cross merged
              into z; w -> w + x + (m-1)z
    merged_bf_alt
              alternate derivation of merged_bf that splits off the first
              child of the root instead of the last: prefactor 1/(1-w),
              first child shifted w -> w + x, second w -> w + mz

The conjecture under test is exactly ``merged_fb == merged_bf`` for every
size (and, specialized at z = w, the equidistribution of forward and back
arc counts).

Tables are append-only; a lock serializes entry computation so concurrent
readers only ever observe completed entries.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

from .algebra import (
    LinearForm,
    Poly,
    PoleAtPointError,
    RationalFunction,
    ShiftSubstitution,
    ratfun_sum,
)
from .univariate import Affine, UniRat, unirat_sum

__all__ = [
    "Family",
    "FamilyTable",
    "TrackedContext",
    "compute_tracked",
    "verify_extended",
    "verify_knuth",
    "nested_summand_factor_count",
]


class Family(str, Enum):
    FULL = "full"
    MERGED_FB = "merged_fb"
    MERGED_BF = "merged_bf"
    MERGED_BF_ALT = "merged_bf_alt"


_IDENTITY = ShiftSubstitution()


def _rules(family: Family) -> tuple[
    Callable[[int], LinearForm],
    Callable[[int], ShiftSubstitution],
    Callable[[int], ShiftSubstitution],
]:
    """(prefactor(n), shift for child m, shift for child n-m)."""
    if family is Family.FULL:
        return (
            lambda n: LinearForm(a_w=1, a_x=n - 1),
            lambda m: _IDENTITY,
            lambda m: ShiftSubstitution(beta=1, gamma=m - 1),
        )
    if family is Family.MERGED_FB:
        return (
            lambda n: LinearForm(a_w=1, a_x=n - 1),
            lambda m: _IDENTITY,
            lambda m: ShiftSubstitution(gamma=m),
        )
    if family is Family.MERGED_BF:
        return (
            lambda n: LinearForm(a_w=1, a_z=n - 1),
            lambda m: _IDENTITY,
            lambda m: ShiftSubstitution(alpha=1, gamma=m - 1),
        )
    if family is Family.MERGED_BF_ALT:
        return (
            lambda n: LinearForm(a_w=1),
            lambda m: ShiftSubstitution(alpha=1),
            lambda m: ShiftSubstitution(gamma=m),
        )
    raise ValueError(f"unknown family {family!r}")


_BASE = RationalFunction.inverse(LinearForm(a_w=1))  # 1/(1-w)


class FamilyTable:
    """Append-only memo table for one generating-function family."""

    def __init__(self, family: Family, *, workers: int = 1, reduce_entries: bool = False):
        self.family = Family(family)
        self.workers = workers
        self.reduce_entries = reduce_entries
        self.entries: dict[int, RationalFunction] = {1: _BASE}
        self._lock = threading.RLock()
        self._prefactor, self._shift1, self._shift2 = _rules(self.family)

    def entry(self, n: int) -> RationalFunction:
        if n < 1:
            raise ValueError("n must be at least 1")
        cached = self.entries.get(n)
        if cached is not None:
            return cached
        with self._lock:
            for k in range(2, n + 1):
                if k in self.entries:
                    continue
                self.entries[k] = self._compute(k)
        return self.entries[n]

    def _compute(self, n: int) -> RationalFunction:
        terms = []
        for m in range(1, n):
            left = self.entries[m].shift(self._shift1(m))
            right = self.entries[n - m].shift(self._shift2(m))
            terms.append(left * right)
        f = ratfun_sum(terms, workers=self.workers).scale_inverse(self._prefactor(n))
        if self.reduce_entries:
            f = f.reduce()
        return f

    def summand(self, n: int, m: int) -> RationalFunction:
        """The m-th product term of entry(n), including the prefactor."""
        if not (1 <= m < n):
            raise ValueError("need 1 <= m < n")
        left = self.entry(m).shift(self._shift1(m))
        right = self.entry(n - m).shift(self._shift2(m))
        return (left * right).scale_inverse(self._prefactor(n))


def nested_summand_factor_count(n: int, m: int | None = None) -> int:
    """Denominator factor count of one recursion summand in fully nested form.

    Nested form means both children are themselves kept as single products
    of their own recursive summands rather than being combined over a common
    denominator.  Each step contributes the factors of both children plus
    the one new prefactor, independently of every split choice; the function
    verifies that independence and returns the common count (which solves to
    2n - 1).
    """
    if n == 1:
        return 1
    splits = [m] if m is not None else range(1, n)
    counts = {
        nested_summand_factor_count(k) + nested_summand_factor_count(n - k) + 1
        for k in splits
    }
    if len(counts) != 1:
        raise AssertionError(f"split-dependent factor count at n={n}: {counts}")
    return counts.pop()


def verify_extended(n: int, gx: FamilyTable | None = None, gy: FamilyTable | None = None) -> bool:
    """True iff the merged forward-first and back-first families agree at size n."""
    gx = gx or FamilyTable(Family.MERGED_FB)
    gy = gy or FamilyTable(Family.MERGED_BF)
    return gx.entry(n) == gy.entry(n)


def verify_knuth(n: int, gx: FamilyTable | None = None, gy: FamilyTable | None = None) -> bool:
    """The z = w specialization: equidistribution of forward and back counts."""
    gx = gx or FamilyTable(Family.MERGED_FB)
    gy = gy or FamilyTable(Family.MERGED_BF)
    return gx.entry(n).identify("z", "w") == gy.entry(n).identify("z", "w")


@dataclass
class TrackedContext:
    """Numeric bindings for a single-variable extraction run.

    One of x, y, z carries the series variable s (an :class:`Affine` with
    zero constant part); the others are bound to rationals.  w never appears
    here: its value threads through the recursion as an affine argument,
    picking up s-multiples whenever the tracked variable feeds a shift.
    """

    tracked: str
    x: Affine
    y: Affine
    z: Affine
    memo: dict[tuple[int, Fraction, Fraction], UniRat] = field(default_factory=dict)

    def binding(self, name: str) -> Affine:
        return {"x": self.x, "y": self.y, "z": self.z}[name]


def _inverse_factor(value: Affine) -> Affine:
    """The affine 1 - value, guarded against collapsing to zero."""
    out = Affine(1 - value.a0, -value.a1)
    if out.a0 == 0 and out.a1 == 0:
        raise PoleAtPointError("denominator factor vanishes identically at the bound point")
    return out


def compute_tracked(n: int, ctx: TrackedContext, w0: Affine) -> UniRat:
    """The full-family recursion with numeric bindings, as a function of s.

    Same recursion as the four-variable table, but every variable except the
    tracked one is a rational and w is instantiated at the affine value
    ``w0`` (shifts add the bound y/z values, so the memo key is the affine
    coefficient pair of w rather than a plain number).
    """
    key = (n, w0.a0, w0.a1)
    cached = ctx.memo.get(key)
    if cached is not None:
        return cached
    if n == 1:
        out = UniRat.one().scale_inverse(_inverse_factor(w0))
    else:
        terms = []
        for m in range(1, n):
            shifted = w0 + ctx.y + (m - 1) * ctx.z
            terms.append(compute_tracked(m, ctx, w0) * compute_tracked(n - m, ctx, shifted))
        prefactor = _inverse_factor(w0 + (n - 1) * ctx.x)
        out = unirat_sum(terms).scale_inverse(prefactor)
    ctx.memo[key] = out
    return out
