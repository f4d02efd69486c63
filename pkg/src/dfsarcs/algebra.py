"""Exact sparse polynomial and rational-function arithmetic in w, x, y, z.

Polynomials are stored sparsely as ``{packed_exponents: coefficient}`` where
the packed key holds the four exponents in 16-bit fields (w in the lowest
bits, then x, y, z).  Adding two keys multiplies the monomials, which keeps
the product loop free of tuple construction.  Coefficients are exact
rationals: plain ``int`` while integral, ``fractions.Fraction`` otherwise;
the two interoperate and hash identically, so term dictionaries compare
correctly regardless of boxing.

Rational functions keep their denominators *factored* as a multiset of
linear forms ``1 - a_w*w - a_x*x - a_y*y - a_z*z``.  Every denominator this
package ever produces is a product of such forms, and the factored shape
makes substituting ``w -> w + alpha*x + beta*y + gamma*z`` a cheap rewrite
of the factor list.  Denominators are never expanded except while deciding
equality, which cross-multiplies the non-shared factors (no gcd anywhere).

Exponents must stay below 2**16 per variable; the recursions in this
package peak far below that (hundreds).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, Mapping

VARIABLES = ("w", "x", "y", "z")

_BITS = 16
_MASK = (1 << _BITS) - 1
_SHIFT_W, _SHIFT_X, _SHIFT_Y, _SHIFT_Z = (0, _BITS, 2 * _BITS, 3 * _BITS)

Exponents = tuple[int, int, int, int]
Coefficient = int | Fraction


class AlgebraError(Exception):
    """Base class for errors raised by this module."""


class NotDivisibleError(AlgebraError):
    """Exact division by a linear form left a remainder."""


class PoleAtPointError(AlgebraError):
    """A denominator factor evaluates to zero at the requested point."""


def _pack(exponents: Exponents) -> int:
    ew, ex, ey, ez = exponents
    if min(ew, ex, ey, ez) < 0 or max(ew, ex, ey, ez) > _MASK:
        raise ValueError(f"exponents out of range: {exponents}")
    return ew | (ex << _SHIFT_X) | (ey << _SHIFT_Y) | (ez << _SHIFT_Z)


def _unpack(key: int) -> Exponents:
    return (
        key & _MASK,
        (key >> _SHIFT_X) & _MASK,
        (key >> _SHIFT_Y) & _MASK,
        (key >> _SHIFT_Z) & _MASK,
    )


def _var_index(name: str) -> int:
    try:
        return VARIABLES.index(name)
    except ValueError:
        raise ValueError(f"unknown variable {name!r}; expected one of {VARIABLES}") from None


def format_rational(value: Coefficient) -> str:
    """Render an exact rational as ``"num/den"``, omitting ``/den`` when 1."""
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer) into a Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


@dataclass(frozen=True)
class ShiftSubstitution:
    """The substitution w -> w + alpha*x + beta*y + gamma*z (x, y, z fixed)."""

    alpha: int = 0
    beta: int = 0
    gamma: int = 0

    def __post_init__(self) -> None:
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ValueError("shift coefficients must be nonnegative")

    def __add__(self, other: "ShiftSubstitution") -> "ShiftSubstitution":
        # Composition of shifts adds componentwise.
        return ShiftSubstitution(
            self.alpha + other.alpha, self.beta + other.beta, self.gamma + other.gamma
        )

    @property
    def is_identity(self) -> bool:
        return self.alpha == 0 and self.beta == 0 and self.gamma == 0


# Cache of the expansion of (w + alpha x + beta y + gamma z)^e as a list of
# (w_exponent, packed_xyz_offset, integer_coefficient).
_SHIFT_EXPANSIONS: dict[tuple[int, int, int, int], list[tuple[int, int, int]]] = {}


def _shift_expansion(e: int, alpha: int, beta: int, gamma: int) -> list[tuple[int, int, int]]:
    key = (e, alpha, beta, gamma)
    cached = _SHIFT_EXPANSIONS.get(key)
    if cached is not None:
        return cached
    rows: list[tuple[int, int, int]] = []
    for i in range(e + 1):  # surviving w-exponent
        rest = e - i
        ci = comb(e, i)
        for j in range(rest + 1):  # x-exponent
            if alpha == 0 and j > 0:
                continue
            cij = ci * comb(rest, j) * alpha**j
            for k in range(rest - j + 1):  # y-exponent; remainder goes to z
                l = rest - j - k
                if (beta == 0 and k > 0) or (gamma == 0 and l > 0):
                    continue
                coeff = cij * comb(rest - j, k) * beta**k * gamma**l
                offset = (j << _SHIFT_X) | (k << _SHIFT_Y) | (l << _SHIFT_Z)
                rows.append((i, offset, coeff))
    _SHIFT_EXPANSIONS[key] = rows
    return rows


class Poly:
    """Sparse polynomial in w, x, y, z with exact rational coefficients.

    Immutable by convention: no public method mutates ``self``.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[int, Coefficient] | None = None, *, _trusted: bool = False):
        # The packed-key dict is an internal detail; external callers build
        # polynomials through from_terms / constant / variable.
        if terms is None:
            terms = {}
        elif not _trusted:
            terms = {k: c for k, c in terms.items() if c}
        self._terms: dict[int, Coefficient] = terms

    # -- construction ------------------------------------------------------

    @classmethod
    def from_terms(cls, mapping: Mapping[Exponents, Coefficient] | Iterable[tuple[Exponents, Coefficient]]) -> "Poly":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        terms: dict[int, Coefficient] = {}
        for exps, coeff in items:
            if not coeff:
                continue
            key = _pack(tuple(exps))  # type: ignore[arg-type]
            terms[key] = terms.get(key, 0) + coeff
        return cls({k: c for k, c in terms.items() if c}, _trusted=True)

    @classmethod
    def constant(cls, value: Coefficient) -> "Poly":
        return cls({0: value} if value else {}, _trusted=True)

    @classmethod
    def variable(cls, name: str) -> "Poly":
        return cls({1 << (_var_index(name) * _BITS): 1}, _trusted=True)

    @classmethod
    def zero(cls) -> "Poly":
        return cls({}, _trusted=True)

    @classmethod
    def one(cls) -> "Poly":
        return cls({0: 1}, _trusted=True)

    # -- inspection --------------------------------------------------------

    def terms(self) -> Iterator[tuple[Exponents, Coefficient]]:
        for key, coeff in self._terms.items():
            yield _unpack(key), coeff

    def sorted_terms(self) -> list[tuple[Exponents, Coefficient]]:
        """Terms in the canonical graded-lexicographic order (w < x < y < z)."""
        return sorted(self.terms(), key=lambda t: (sum(t[0]), t[0]))

    def coefficient(self, exponents: Exponents) -> Coefficient:
        return self._terms.get(_pack(exponents), 0)

    @property
    def term_count(self) -> int:
        return len(self._terms)

    @property
    def total_degree(self) -> int:
        return max((sum(_unpack(k)) for k in self._terms), default=0)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:  # pragma: no cover - polynomials are not dict keys
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "Poly(0)"
        parts = []
        for exps, coeff in self.sorted_terms()[:8]:
            mono = "*".join(
                f"{v}^{e}" if e > 1 else v for v, e in zip(VARIABLES, exps) if e
            )
            parts.append(f"{format_rational(coeff)}{'*' + mono if mono else ''}")
        tail = " + ..." if self.term_count > 8 else ""
        return f"Poly({' + '.join(parts)}{tail})"

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a:
            return other
        if not b:
            return self
        out = dict(a)
        for key, coeff in b.items():
            v = out.get(key, 0) + coeff
            if v:
                out[key] = v
            else:
                del out[key]
        return Poly(out, _trusted=True)

    def __neg__(self) -> "Poly":
        return Poly({k: -c for k, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly | int | Fraction") -> "Poly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly.zero()
            return Poly({k: c * other for k, c in self._terms.items()}, _trusted=True)
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return Poly.zero()
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, Coefficient] = {}
        get = out.get
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                v = get(k, 0) + c1 * c2
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Poly(out, _trusted=True)

    __rmul__ = __mul__

    # -- substitutions -----------------------------------------------------

    def shift(self, sub: ShiftSubstitution) -> "Poly":
        """Replace w by w + alpha*x + beta*y + gamma*z, expanding exactly."""
        if sub.is_identity:
            return self
        out: dict[int, Coefficient] = {}
        get = out.get
        for key, coeff in self._terms.items():
            ew = key & _MASK
            if ew == 0:
                v = get(key, 0) + coeff
                if v:
                    out[key] = v
                else:
                    del out[key]
                continue
            base = key - ew
            for i, offset, mult in _shift_expansion(ew, sub.alpha, sub.beta, sub.gamma):
                kk = base + i + offset
                v = get(kk, 0) + coeff * mult
                if v:
                    out[kk] = v
                else:
                    del out[kk]
        return Poly(out, _trusted=True)

    def map_variables(self, mapping: Mapping[str, str]) -> "Poly":
        """Send each variable to another variable (merging exponents on collision).

        ``mapping`` lists only the variables that move, e.g. ``{"z": "w"}``
        merges z into w and ``{"x": "z", "y": "x"}`` realizes f(w, z, x, z).
        """
        moves = {_var_index(src): _var_index(dst) for src, dst in mapping.items()}
        if all(src == dst for src, dst in moves.items()):
            return self
        out: dict[int, Coefficient] = {}
        for key, coeff in self._terms.items():
            exps = list(_unpack(key))
            new = [0, 0, 0, 0]
            for idx, e in enumerate(exps):
                new[moves.get(idx, idx)] += e
            kk = _pack(tuple(new))  # type: ignore[arg-type]
            v = out.get(kk, 0) + coeff
            if v:
                out[kk] = v
            else:
                del out[kk]
        return Poly(out, _trusted=True)

    def identify(self, src: str, dst: str) -> "Poly":
        """Merge every occurrence of ``src`` into ``dst`` (exponents add)."""
        return self.map_variables({src: dst})

    # -- division and evaluation -------------------------------------------

    def divide_by_linear(self, form: "LinearForm") -> "Poly":
        """Return q with q * form == self exactly, else raise NotDivisibleError.

        Long division from the low-degree end: the divisor's constant term
        is 1, so the grlex-least remaining term is always the next quotient
        term.  Any quotient term of total degree >= deg(self) proves
        indivisibility, because deg(q) = deg(self) - 1 when q * form = self.
        """
        if not self._terms:
            return Poly.zero()
        divisor = form.as_poly()._terms
        max_q_degree = self.total_degree - 1
        rem = dict(self._terms)
        quo: dict[int, Coefficient] = {}
        while rem:
            key = min(rem, key=lambda k: (sum(_unpack(k)), _unpack(k)))
            if sum(_unpack(key)) > max_q_degree:
                raise NotDivisibleError(f"{form} does not divide the polynomial")
            coeff = rem.pop(key)
            quo[key] = coeff
            # remainder -= coeff * monomial(key) * form
            for dk, dc in divisor.items():
                if dk == 0:
                    continue
                kk = key + dk
                v = rem.get(kk, 0) - coeff * dc
                if v:
                    rem[kk] = v
                else:
                    rem.pop(kk, None)
        return Poly(quo, _trusted=True)

    def evaluate(self, point: Mapping[str, Coefficient]) -> Fraction:
        vals = [Fraction(point[v]) for v in VARIABLES]
        total = Fraction(0)
        for key, coeff in self._terms.items():
            ew, ex, ey, ez = _unpack(key)
            total += coeff * vals[0] ** ew * vals[1] ** ex * vals[2] ** ey * vals[3] ** ez
        return total

    # -- serialization -----------------------------------------------------

    def to_json(self) -> list[list]:
        return [[*exps, format_rational(c)] for exps, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data: Iterable[list]) -> "Poly":
        return cls.from_terms(
            ((int(e[0]), int(e[1]), int(e[2]), int(e[3])), parse_rational(str(e[4])))
            for e in data
        )


@dataclass(frozen=True, order=True)
class LinearForm:
    """The form 1 - a_w*w - a_x*x - a_y*y - a_z*z with nonnegative a's."""

    a_w: int = 0
    a_x: int = 0
    a_y: int = 0
    a_z: int = 0

    def __post_init__(self) -> None:
        coeffs = (self.a_w, self.a_x, self.a_y, self.a_z)
        if min(coeffs) < 0:
            raise ValueError("linear form coefficients must be nonnegative")
        if max(coeffs) == 0:
            raise ValueError("linear form needs at least one nonzero coefficient")

    def as_poly(self) -> Poly:
        terms: dict[Exponents, Coefficient] = {(0, 0, 0, 0): 1}
        for idx, a in enumerate((self.a_w, self.a_x, self.a_y, self.a_z)):
            if a:
                exps = [0, 0, 0, 0]
                exps[idx] = 1
                terms[tuple(exps)] = -a  # type: ignore[index]
        return Poly.from_terms(terms)

    def shift(self, sub: ShiftSubstitution) -> "LinearForm":
        # w -> w + alpha x + beta y + gamma z keeps the form linear.
        return LinearForm(
            self.a_w,
            self.a_x + self.a_w * sub.alpha,
            self.a_y + self.a_w * sub.beta,
            self.a_z + self.a_w * sub.gamma,
        )

    def map_variables(self, mapping: Mapping[str, str]) -> "LinearForm":
        moves = {_var_index(src): _var_index(dst) for src, dst in mapping.items()}
        coeffs = [0, 0, 0, 0]
        for idx, a in enumerate((self.a_w, self.a_x, self.a_y, self.a_z)):
            coeffs[moves.get(idx, idx)] += a
        return LinearForm(*coeffs)

    def evaluate(self, point: Mapping[str, Coefficient]) -> Fraction:
        return Fraction(1) - sum(
            (a * Fraction(point[v]) for v, a in zip(VARIABLES, self.coefficients) if a),
            Fraction(0),
        )

    @property
    def coefficients(self) -> tuple[int, int, int, int]:
        return (self.a_w, self.a_x, self.a_y, self.a_z)

    def __repr__(self) -> str:
        body = "".join(
            f"-{a if a != 1 else ''}{v}" for v, a in zip(VARIABLES, self.coefficients) if a
        )
        return f"(1{body})"


class RationalFunction:
    """numerator / product of linear-form factors, all arithmetic exact."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Mapping[LinearForm, int] | None = None):
        self.num = num
        if den and num:
            if any(m <= 0 for m in den.values()):
                raise ValueError("factor multiplicities must be positive")
            self.den: dict[LinearForm, int] = dict(den)
        else:
            # canonical zero keeps an empty denominator
            self.den = {}

    # -- construction ------------------------------------------------------

    @classmethod
    def one(cls) -> "RationalFunction":
        return cls(Poly.one())

    @classmethod
    def from_poly(cls, p: Poly) -> "RationalFunction":
        return cls(p)

    @classmethod
    def inverse(cls, form: LinearForm) -> "RationalFunction":
        return cls(Poly.one(), {form: 1})

    # -- inspection --------------------------------------------------------

    @property
    def factor_count(self) -> int:
        """Number of denominator factors counted with multiplicity."""
        return sum(self.den.values())

    def den_poly(self) -> Poly:
        out = Poly.one()
        for form, mult in self.den.items():
            fp = form.as_poly()
            for _ in range(mult):
                out = out * fp
        return out

    def __repr__(self) -> str:
        return f"RationalFunction({self.num!r}, factors={self.factor_count})"

    # -- arithmetic --------------------------------------------------------

    def __mul__(self, other: "RationalFunction | Poly | int | Fraction") -> "RationalFunction":
        if isinstance(other, RationalFunction):
            den = dict(self.den)
            for form, mult in other.den.items():
                den[form] = den.get(form, 0) + mult
            return RationalFunction(self.num * other.num, den)
        return RationalFunction(self.num * other, self.den)

    __rmul__ = __mul__

    def scale_inverse(self, form: LinearForm) -> "RationalFunction":
        """Multiply by 1/form (append the factor to the denominator)."""
        if not self.num:
            return self
        den = dict(self.den)
        den[form] = den.get(form, 0) + 1
        return RationalFunction(self.num, den)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return ratfun_sum([self, other])

    def shift(self, sub: ShiftSubstitution) -> "RationalFunction":
        if sub.is_identity:
            return self
        den: dict[LinearForm, int] = {}
        for form, mult in self.den.items():
            shifted = form.shift(sub)
            den[shifted] = den.get(shifted, 0) + mult
        return RationalFunction(self.num.shift(sub), den)

    def map_variables(self, mapping: Mapping[str, str]) -> "RationalFunction":
        den: dict[LinearForm, int] = {}
        for form, mult in self.den.items():
            mapped = form.map_variables(mapping)
            den[mapped] = den.get(mapped, 0) + mult
        return RationalFunction(self.num.map_variables(mapping), den)

    def identify(self, src: str, dst: str) -> "RationalFunction":
        return self.map_variables({src: dst})

    def reduce(self) -> "RationalFunction":
        """Cancel denominator factors that exactly divide the numerator.

        Opportunistic only: tries each distinct factor; keeps the factored
        form when division leaves a remainder.
        """
        num = self.num
        den = dict(self.den)
        for form in list(den):
            while den.get(form, 0) > 0:
                try:
                    num = num.divide_by_linear(form)
                except NotDivisibleError:
                    break
                den[form] -= 1
                if den[form] == 0:
                    del den[form]
        return RationalFunction(num, den)

    # -- equality and evaluation -------------------------------------------

    def equals(self, other: "RationalFunction") -> bool:
        """Exact equality as functions.

        Shared denominator factors cancel multiset-wise; the leftovers are
        cross-multiplied into the numerators and the expanded polynomials
        compared.  Sound because every factor is a nonzero polynomial.
        """
        left_extra: list[tuple[LinearForm, int]] = []
        right_extra: list[tuple[LinearForm, int]] = []
        for form in set(self.den) | set(other.den):
            a = self.den.get(form, 0)
            b = other.den.get(form, 0)
            if a > b:
                right_extra.append((form, a - b))  # multiplies the *other* side
            elif b > a:
                left_extra.append((form, b - a))
        lhs = self.num
        for form, mult in left_extra:
            fp = form.as_poly()
            for _ in range(mult):
                lhs = lhs * fp
        rhs = other.num
        for form, mult in right_extra:
            fp = form.as_poly()
            for _ in range(mult):
                rhs = rhs * fp
        return lhs == rhs

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RationalFunction):
            return self.equals(other)
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def same_representation(self, other: "RationalFunction") -> bool:
        return self.num == other.num and self.den == other.den

    def evaluate(self, point: Mapping[str, Coefficient]) -> Fraction:
        den_val = Fraction(1)
        for form, mult in self.den.items():
            fv = form.evaluate(point)
            if fv == 0:
                raise PoleAtPointError(f"factor {form} vanishes at {dict(point)}")
            den_val *= fv**mult
        return self.num.evaluate(point) / den_val

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        factors = sorted((*f.coefficients, m) for f, m in self.den.items())
        return {"numerator": self.num.to_json(), "factors": [list(f) for f in factors]}

    @classmethod
    def from_json(cls, data: Mapping) -> "RationalFunction":
        den: dict[LinearForm, int] = {}
        for a_w, a_x, a_y, a_z, mult in data.get("factors", []):
            den[LinearForm(a_w, a_x, a_y, a_z)] = int(mult)
        return cls(Poly.from_json(data["numerator"]), den)


def _lcm_denominator(fs: Iterable[RationalFunction]) -> dict[LinearForm, int]:
    lcm: dict[LinearForm, int] = {}
    for f in fs:
        for form, mult in f.den.items():
            if lcm.get(form, 0) < mult:
                lcm[form] = mult
    return lcm


def _cofactor_forms(lcm: Mapping[LinearForm, int], den: Mapping[LinearForm, int]) -> list[LinearForm]:
    forms: list[LinearForm] = []
    for form, mult in lcm.items():
        missing = mult - den.get(form, 0)
        forms.extend([form] * missing)
    return forms


def _expand_numerator(num: Poly, cofactors: list[LinearForm]) -> Poly:
    for form in cofactors:
        num = num * form.as_poly()
    return num


# Globals for forked worker processes (set by the pool initializer).
_POOL_TASKS: list[tuple[Poly, list[LinearForm]]] = []


def _pool_init(tasks: list[tuple[Poly, list[LinearForm]]]) -> None:
    global _POOL_TASKS
    _POOL_TASKS = tasks


def _pool_expand(i: int) -> dict[int, Coefficient]:
    num, cofactors = _POOL_TASKS[i]
    return _expand_numerator(num, cofactors)._terms


def ratfun_sum(fs: list[RationalFunction], workers: int = 1) -> RationalFunction:
    """Sum over the least common denominator of the factor multisets.

    With ``workers > 1`` the per-summand cofactor expansions run in forked
    worker processes; exact addition makes the combine order irrelevant.
    """
    fs = [f for f in fs if f.num]
    if not fs:
        return RationalFunction(Poly.zero())
    if len(fs) == 1:
        return fs[0]
    lcm = _lcm_denominator(fs)
    tasks = [(f.num, _cofactor_forms(lcm, f.den)) for f in fs]
    total = Poly.zero()
    if workers > 1 and len(tasks) > 2:
        import multiprocessing
        from concurrent.futures import ProcessPoolExecutor

        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(
            max_workers=workers, mp_context=ctx, initializer=_pool_init, initargs=(tasks,)
        ) as pool:
            for terms in pool.map(_pool_expand, range(len(tasks))):
                total = total + Poly(terms, _trusted=True)
    else:
        for num, cofactors in tasks:
            total = total + _expand_numerator(num, cofactors)
    return RationalFunction(total, lcm)
