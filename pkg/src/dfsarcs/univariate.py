"""Exact univariate rational functions in a single series variable s.

This is the numeric companion to :mod:`dfsarcs.algebra`: once all but one
of w, x, y, z are bound to rationals, every generating function collapses
to ``polynomial(s) / product of affine factors (a0 + a1*s)``.  Numerator
coefficients and factor coefficients are exact (int or Fraction), so PGF
identities, series coefficients, and means come out with zero rounding.

Factors are stored normalized: the constant part is scaled to 1 (or the
linear part to 1 when the constant vanishes) and the scale folded into the
numerator, which lets equal factors from different summands share a key.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

Scalar = int | Fraction


class PoleAtOriginError(Exception):
    """Series expansion at 0 requested but a denominator factor vanishes there."""


class PoleAtOneError(Exception):
    """Evaluation at s=1 hit a vanishing denominator factor."""


@dataclass(frozen=True)
class Affine:
    """An exact affine value a0 + a1*s, used for bound-but-shifted variables."""

    a0: Fraction
    a1: Fraction = Fraction(0)

    @classmethod
    def const(cls, value: Scalar) -> "Affine":
        return cls(Fraction(value))

    @classmethod
    def tracked(cls, scale: Scalar) -> "Affine":
        """The value scale * s of the tracked variable."""
        return cls(Fraction(0), Fraction(scale))

    def __add__(self, other: "Affine | int | Fraction") -> "Affine":
        if isinstance(other, Affine):
            return Affine(self.a0 + other.a0, self.a1 + other.a1)
        return Affine(self.a0 + other, self.a1)

    __radd__ = __add__

    def __rmul__(self, scalar: Scalar) -> "Affine":
        return Affine(self.a0 * scalar, self.a1 * scalar)

    @property
    def is_constant(self) -> bool:
        return self.a1 == 0


def _trim(coeffs: Iterable[Scalar]) -> tuple[Scalar, ...]:
    out = list(coeffs)
    while out and not out[-1]:
        out.pop()
    return tuple(out)


def poly_mul(a: tuple[Scalar, ...], b: tuple[Scalar, ...]) -> tuple[Scalar, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if not ca:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return _trim(out)


def poly_add(a: tuple[Scalar, ...], b: tuple[Scalar, ...]) -> tuple[Scalar, ...]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, cb in enumerate(b):
        out[i] += cb
    return _trim(out)


def poly_eval(coeffs: tuple[Scalar, ...], s: Scalar) -> Fraction:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * s + c
    return total


def poly_derivative(coeffs: tuple[Scalar, ...]) -> tuple[Scalar, ...]:
    return _trim(k * c for k, c in enumerate(coeffs) if k >= 1)


class UniRat:
    """numerator(s) / product of normalized affine factors, all exact."""

    __slots__ = ("num", "den")

    def __init__(self, num: Iterable[Scalar], den: Mapping[tuple[Fraction, Fraction], int] | None = None):
        self.num: tuple[Scalar, ...] = _trim(num)
        self.den: dict[tuple[Fraction, Fraction], int] = dict(den) if (den and self.num) else {}

    # -- construction ------------------------------------------------------

    @classmethod
    def const(cls, value: Scalar) -> "UniRat":
        return cls((value,))

    @classmethod
    def one(cls) -> "UniRat":
        return cls((1,))

    def scale_inverse(self, factor: Affine) -> "UniRat":
        """Multiply by 1/(a0 + a1*s), normalizing the factor's leading scale."""
        if not self.num:
            return self
        a0, a1 = Fraction(factor.a0), Fraction(factor.a1)
        if a0 == 0 and a1 == 0:
            raise ZeroDivisionError("division by the zero affine form")
        scale = a0 if a0 != 0 else a1
        key = (a0 / scale, a1 / scale)
        num = tuple(c / scale for c in self.num)
        if key == (Fraction(1), Fraction(0)):
            return UniRat(num, self.den)
        den = dict(self.den)
        den[key] = den.get(key, 0) + 1
        return UniRat(num, den)

    # -- arithmetic --------------------------------------------------------

    def __mul__(self, other: "UniRat | int | Fraction") -> "UniRat":
        if isinstance(other, UniRat):
            den = dict(self.den)
            for key, mult in other.den.items():
                den[key] = den.get(key, 0) + mult
            return UniRat(poly_mul(self.num, other.num), den)
        return UniRat(tuple(c * other for c in self.num), self.den)

    __rmul__ = __mul__

    def scale_poly(self, coeffs: tuple[Scalar, ...]) -> "UniRat":
        """Multiply by a plain polynomial in s."""
        return UniRat(poly_mul(self.num, _trim(coeffs)), self.den)

    def __add__(self, other: "UniRat") -> "UniRat":
        return unirat_sum([self, other])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniRat):
            return NotImplemented
        lhs, rhs = self.num, other.num
        for key in set(self.den) | set(other.den):
            a = self.den.get(key, 0)
            b = other.den.get(key, 0)
            factor = _trim(key)
            if a > b:
                for _ in range(a - b):
                    rhs = poly_mul(rhs, factor)
            elif b > a:
                for _ in range(b - a):
                    lhs = poly_mul(lhs, factor)
        return lhs == rhs

    __hash__ = None  # type: ignore[assignment]

    # -- analysis ----------------------------------------------------------

    def den_coeffs(self) -> tuple[Scalar, ...]:
        out: tuple[Scalar, ...] = (1,)
        for key, mult in self.den.items():
            factor = _trim(key)
            for _ in range(mult):
                out = poly_mul(out, factor)
        return out

    def evaluate(self, s: Scalar) -> Fraction:
        den_val = Fraction(1)
        for (a0, a1), mult in self.den.items():
            fv = a0 + a1 * Fraction(s)
            if fv == 0:
                raise ZeroDivisionError(f"pole at s={s}")
            den_val *= fv**mult
        return poly_eval(self.num, s) / den_val

    def value_at_one(self) -> Fraction:
        try:
            return self.evaluate(1)
        except ZeroDivisionError as exc:
            raise PoleAtOneError(str(exc)) from None

    def derivative_at_one(self) -> Fraction:
        """Exact d/ds at s=1 via the logarithmic derivative of the factored form."""
        n1 = poly_eval(self.num, 1)
        value = self.value_at_one()
        log_der = Fraction(0)
        if n1 != 0:
            log_der += poly_eval(poly_derivative(self.num), 1) / n1
        else:
            # fall back to expanding: f' = (N' D - N D') / D^2 with N(1)=0
            den = self.den_coeffs()
            d1 = poly_eval(den, 1)
            return poly_eval(poly_derivative(self.num), 1) / d1
        for (a0, a1), mult in self.den.items():
            log_der -= mult * a1 / (a0 + a1)
        return value * log_der

    def series(self, kmax: int) -> list[Fraction]:
        """Taylor coefficients c_0..c_kmax at s=0 by exact long division."""
        den = self.den_coeffs()
        if not den or den[0] == 0:
            raise PoleAtOriginError("denominator vanishes at s=0")
        d0 = Fraction(den[0])
        num = self.num
        coeffs: list[Fraction] = []
        for k in range(kmax + 1):
            acc = Fraction(num[k]) if k < len(num) else Fraction(0)
            for j in range(1, min(k, len(den) - 1) + 1):
                acc -= den[j] * coeffs[k - j]
            coeffs.append(acc / d0)
        return coeffs

    def __repr__(self) -> str:
        return f"UniRat(num_degree={len(self.num) - 1}, factors={sum(self.den.values())})"


def unirat_sum(fs: list[UniRat]) -> UniRat:
    """Sum over the least common denominator of the factor multisets."""
    fs = [f for f in fs if f.num]
    if not fs:
        return UniRat(())
    if len(fs) == 1:
        return fs[0]
    lcm: dict[tuple[Fraction, Fraction], int] = {}
    for f in fs:
        for key, mult in f.den.items():
            if lcm.get(key, 0) < mult:
                lcm[key] = mult
    total: tuple[Scalar, ...] = ()
    for f in fs:
        part = f.num
        for key, mult in lcm.items():
            missing = mult - f.den.get(key, 0)
            factor = _trim(key)
            for _ in range(missing):
                part = poly_mul(part, factor)
        total = poly_add(total, part)
    return UniRat(total, lcm)
