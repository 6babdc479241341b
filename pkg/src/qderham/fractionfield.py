"""Fractions of a coefficient ring, for parameters that are only known to be generic.

Some relation sets have no pivot with a unit-monomial coefficient, e.g. a
relation whose leading coefficient is ``r + s + 1``.  Over the fraction field
such a coefficient is invertible provided it is nonzero, and the caller
records that assumption.  Elements are kept in a canonical form so that
equality and hashing are structural:

* the denominator involves no constrained symbol (it is rationalized through
  the constraint polynomial),
* numerator and denominator are coprime,
* the denominator has no monomial factor and its leading coefficient is 1.

Canonicalization goes through sympy and only happens when a denominator is
present; polynomial arithmetic stays on the fast Laurent path.
"""

from __future__ import annotations

from functools import lru_cache

import sympy as sp

from .symring import Coefficient, ConfigurationError, GaussianRational, Ring, specialize


class FractionField:
    """Field of fractions of ``base`` (which must be an integral domain)."""

    def __init__(self, base: Ring):
        if isinstance(base, FractionField):
            base = base.base
        self.base = base
        self.symbols = base.symbols
        self.invertible = frozenset(base.symbols)
        self._hash = hash(("fraction", base))
        self._sym = [sp.Symbol(name) for name in base.symbols]
        self._rules = []
        for rule, src in zip(base._rules, base.constraints):
            x = self._sym[rule.index]
            rhs = _to_sympy(base, rule.rhs)
            self._rules.append((x, sp.together(x ** rule.degree - rhs)))

    def __eq__(self, other):
        return isinstance(other, FractionField) and other.base == self.base

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FractionField({self.base!r})"

    @property
    def constraints(self):
        return self.base.constraints

    @property
    def zero(self) -> "RationalFunction":
        return RationalFunction(self, self.base.zero, self.base.one)

    @property
    def one(self) -> "RationalFunction":
        return RationalFunction(self, self.base.one, self.base.one)

    @property
    def imaginary_unit(self) -> "RationalFunction":
        return self.wrap(self.base.imaginary_unit)

    def const(self, value) -> "RationalFunction":
        return self.wrap(self.base.const(value))

    def symbol(self, name: str) -> "RationalFunction":
        return self.wrap(self.base.symbol(name))

    def gens(self):
        return tuple(self.wrap(g) for g in self.base.gens())

    def wrap(self, c: Coefficient) -> "RationalFunction":
        return RationalFunction(self, c, self.base.one)

    def __call__(self, value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return self.coerce(value)
        if isinstance(value, Coefficient):
            return self.wrap(self.base.coerce(value))
        return self.wrap(self.base(value))

    def coerce(self, c) -> "RationalFunction":
        if isinstance(c, RationalFunction):
            if c.field == self:
                return c
            return self.fraction(self.base.coerce(c.num), self.base.coerce(c.den))
        return self(c)

    def fraction(self, num: Coefficient, den: Coefficient) -> "RationalFunction":
        if not den:
            raise ZeroDivisionError("fraction with zero denominator")
        if den.is_unit_monomial():
            return RationalFunction(self, num * den.inverse(), self.base.one)
        if not num:
            return self.zero
        n, d = _canonical(self, num, den)
        return RationalFunction(self, n, d)


class RationalFunction:
    """``num / den`` in canonical form; see the module docstring."""

    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, field: FractionField, num: Coefficient, den: Coefficient):
        self.field = field
        self.num = num
        self.den = den
        self._hash = None

    @property
    def ring(self):
        return self.field

    def _other(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.field != self.field:
                raise ConfigurationError("coefficients from different fields")
            return other
        return self.field(other)

    def is_polynomial(self) -> bool:
        return self.den == 1

    def __add__(self, other):
        other = self._other(other)
        if self.is_polynomial() and other.is_polynomial():
            return RationalFunction(self.field, self.num + other.num, self.den)
        if self.den == other.den:
            return self.field.fraction(self.num + other.num, self.den)
        return self.field.fraction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(self.field, -self.num, self.den)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        other = self._other(other)
        if self.is_polynomial() and other.is_polynomial():
            return RationalFunction(self.field, self.num * other.num, self.den)
        if not self or not other:
            return self.field.zero
        return self.field.fraction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return self.field.fraction(self.den, self.num)

    def __truediv__(self, other):
        return self * self._other(other).inverse()

    def __rtruediv__(self, other):
        return self._other(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.field == other.field and self.num == other.num and self.den == other.den
        try:
            other = self.field(other)
        except (TypeError, ConfigurationError):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    def is_unit_monomial(self) -> bool:
        return bool(self.num)

    def is_monomial(self) -> bool:
        return self.is_polynomial() and len(self.num.terms) == 1

    def is_constant(self) -> bool:
        return self.is_polynomial() and self.num.is_constant()

    def free_symbols(self) -> set[str]:
        return self.num.free_symbols() | self.den.free_symbols()

    def specialize(self, assignments: dict) -> GaussianRational:
        den = specialize(self.den, assignments)
        if not den:
            raise ZeroDivisionError(f"denominator {self.den} vanishes at {assignments}")
        return specialize(self.num, assignments) / den

    def substitute(self, mapping: dict):
        num, den = self.num.substitute(mapping), self.den.substitute(mapping)
        target = num.ring
        return FractionField(target).fraction(num, den)

    def sort_key(self):
        return (self.num.sort_key(), self.den.sort_key())

    def __str__(self):
        if self.is_polynomial():
            return str(self.num)
        num = str(self.num)
        if len(self.num.terms) > 1:
            num = f"({num})"
        return f"{num}/({self.den})"

    def __repr__(self):
        return f"RationalFunction({self})"


def _to_sympy(ring: Ring, terms: dict):
    total = sp.Integer(0)
    for exps, v in terms.items():
        term = sp.Rational(v.re.numerator, v.re.denominator) + sp.I * sp.Rational(v.im.numerator, v.im.denominator)
        for name, e in zip(ring.symbols, exps):
            if e:
                term *= sp.Symbol(name) ** e
        total += term
    return total


def _from_sympy(expr, ring: Ring) -> Coefficient:
    if expr == 0:
        return ring.zero
    poly = sp.Poly(sp.expand(expr), *[sp.Symbol(name) for name in ring.symbols])
    terms = {}
    for exps, v in poly.terms():
        re, im = (sp.Rational(part) for part in sp.sympify(v).as_real_imag())
        terms[tuple(exps)] = GaussianRational(_frac(re), _frac(im))
    return ring.element(terms)


def _frac(x):
    from fractions import Fraction

    return Fraction(int(x.p), int(x.q))


def _canonical(field: FractionField, num: Coefficient, den: Coefficient):
    return _canonical_cached(field, num, den)


@lru_cache(maxsize=65536)
def _canonical_cached(field: FractionField, num: Coefficient, den: Coefficient):
    base = field.base
    expr = _to_sympy(base, num.terms) / _to_sympy(base, den.terms)
    for x, f in field._rules:
        n, d = sp.fraction(sp.cancel(sp.together(expr)))
        if d.has(x):
            expr = n * sp.invert(d, sp.fraction(f)[0], x)
    n, d = sp.fraction(sp.together(expr))
    # reduce the numerator by the constraints before cancelling
    n = _to_sympy(base, _from_sympy(n, base).terms)
    n, d = sp.fraction(sp.cancel(n / d, extension=True))
    N, D = _from_sympy(n, base), _from_sympy(d, base)
    if not D:
        raise ZeroDivisionError("denominator vanished during canonicalization")
    if any(x in D.free_symbols() for x in base.constrained_symbols()):
        raise ConfigurationError(f"could not rationalize denominator {D}")
    # strip the monomial factor of the denominator and make it monic
    k = len(base.symbols)
    low = tuple(min(e[i] for e in D.terms) for i in range(k))
    lead = max(D.terms, key=lambda e: tuple(e[i] for i in base._name_order))
    inv = base.element({low: D.terms[lead]}).inverse()
    N, D = N * inv, D * inv
    return N, (base.one if D == 1 else D)
