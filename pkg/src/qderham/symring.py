"""Exact commutative coefficients.

A :class:`Ring` is the Laurent polynomial ring over the Gaussian rationals in
a fixed tuple of named symbols, optionally quotiented by monic constraints of
the shape ``sym^m = rhs`` (``Q^2 = -Q - 1``, ``s^2 = r``, ``Q^2 = -1``).  Every
:class:`Coefficient` is stored in its unique reduced form, so equality is a
dictionary comparison.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce as _fold
from numbers import Rational


class ConfigurationError(ValueError):
    """Raised on mismatched rings, bad constraints or illegal inverses."""


class SpecializationError(ValueError):
    """Raised when a numeric assignment is incomplete or breaks a constraint."""


class GaussianRational:
    """Exact complex number ``re + im*I`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Rational)):
            return cls(value)
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")

    def __add__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        norm = self.re * self.re + self.im * self.im
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = "I" if self.im == 1 else "-I" if self.im == -1 else f"{self.im}*I"
        if self.re == 0:
            return im
        if im.startswith("-"):
            return f"{self.re} - {im[1:]}"
        return f"{self.re} + {im}"

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


_ONE = GaussianRational(1)


def _add_into(acc: dict, exps: tuple, value: GaussianRational) -> None:
    total = acc.get(exps)
    total = value if total is None else total + value
    if total:
        acc[exps] = total
    else:
        acc.pop(exps, None)


def _mul_raw(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            _add_into(out, tuple(x + y for x, y in zip(ea, eb)), ca * cb)
    return out


class _Rule:
    __slots__ = ("index", "degree", "rhs", "inverse")

    def __init__(self, index, degree, rhs, inverse):
        self.index = index
        self.degree = degree
        self.rhs = rhs          # reduced terms dict, sym-degree < degree
        self.inverse = inverse  # terms dict for sym^-1, or None


class Ring:
    """Laurent polynomials over Q(i) in ``symbols`` modulo monic constraints.

    >>> R = Ring(["q", "r", "s"]).constrain("s^2 - r")
    >>> str(R("s^-2 * r"))
    '1'
    """

    def __init__(self, symbols, invertible=None):
        symbols = tuple(symbols)
        if len(set(symbols)) != len(symbols):
            raise ConfigurationError(f"duplicate symbols in {symbols}")
        for name in symbols:
            if not name.isidentifier() or name == "I":
                raise ConfigurationError(f"illegal symbol name {name!r}")
        self.symbols = symbols
        self._index = {name: i for i, name in enumerate(symbols)}
        if invertible is None:
            invertible = symbols
        unknown = set(invertible) - set(symbols)
        if unknown:
            raise ConfigurationError(f"unknown symbols {sorted(unknown)}")
        self.invertible = frozenset(invertible)
        self._rules: tuple[_Rule, ...] = ()
        self._constraint_src: tuple[str, ...] = ()
        self._power_cache: dict = {}
        self._finish()

    def _finish(self):
        self._zero_exps = (0,) * len(self.symbols)
        self._by_index = {rule.index: rule for rule in self._rules}
        rules_key = tuple(
            (rule.index, rule.degree, frozenset(rule.rhs.items())) for rule in self._rules
        )
        self._key = (self.symbols, self.invertible, rules_key)
        self._hash = hash(self._key)
        self._name_order = sorted(range(len(self.symbols)), key=lambda i: self.symbols[i])

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Ring):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        cons = f", constraints={list(self.constraints)}" if self._rules else ""
        return f"Ring({list(self.symbols)}{cons})"

    @property
    def constraints(self) -> tuple[str, ...]:
        """Human-readable oriented constraints, e.g. ``('s^2 -> r',)``."""
        return self._constraint_src

    def constrained_symbols(self) -> tuple[str, ...]:
        return tuple(self.symbols[rule.index] for rule in self._rules)

    # -- construction of elements -------------------------------------

    def element(self, terms) -> "Coefficient":
        """Build a reduced coefficient from ``{exponent tuple: value}``."""
        raw: dict = {}
        for exps, value in dict(terms).items():
            exps = tuple(exps)
            if len(exps) != len(self.symbols):
                raise ConfigurationError("exponent vector length does not match ring")
            value = GaussianRational.coerce(value)
            if value:
                _add_into(raw, exps, value)
        return Coefficient(self, self._reduce(raw))

    def const(self, value) -> "Coefficient":
        return self.element({self._zero_exps: value})

    @property
    def zero(self) -> "Coefficient":
        return Coefficient(self, {})

    @property
    def one(self) -> "Coefficient":
        return self.const(1)

    @property
    def imaginary_unit(self) -> "Coefficient":
        return self.const(GaussianRational(0, 1))

    def symbol(self, name: str) -> "Coefficient":
        try:
            i = self._index[name]
        except KeyError:
            raise ConfigurationError(f"undeclared symbol {name!r}") from None
        exps = [0] * len(self.symbols)
        exps[i] = 1
        return self.element({tuple(exps): 1})

    def gens(self) -> tuple["Coefficient", ...]:
        return tuple(self.symbol(name) for name in self.symbols)

    def __call__(self, value) -> "Coefficient":
        """Coerce a number, a coefficient of a compatible ring, or parse a string."""
        if isinstance(value, Coefficient):
            return self.coerce(value)
        if isinstance(value, str):
            from .parsing import parse_expression

            return parse_expression(value, self)
        return self.const(value)

    def coerce(self, c: "Coefficient") -> "Coefficient":
        """Move ``c`` into this ring by symbol name, reducing under our constraints."""
        if c.ring == self:
            return c
        try:
            perm = [self._index[name] for name in c.ring.symbols]
        except KeyError as exc:
            raise ConfigurationError(f"symbol {exc.args[0]!r} not in target ring") from None
        raw: dict = {}
        for exps, value in c.terms.items():
            new = [0] * len(self.symbols)
            for src, dst in enumerate(perm):
                new[dst] = exps[src]
            _add_into(raw, tuple(new), value)
        return Coefficient(self, self._reduce(raw))

    # -- constraints ---------------------------------------------------

    def extend(self, symbols, invertible=None) -> "Ring":
        """A ring with extra symbols adjoined, keeping every constraint."""
        new_symbols = self.symbols + tuple(s for s in symbols if s not in self._index)
        inv = set(self.invertible) | set(new_symbols[len(self.symbols):] if invertible is None else invertible)
        ring = Ring(new_symbols, inv)
        for src in self._constraint_src:
            lhs, rhs = src.split("->")
            ring = ring.constrain(f"{lhs} - ({rhs})")
        return ring

    def constrain(self, relation) -> "Ring":
        """Return a new ring with ``relation = 0`` imposed.

        ``relation`` is a coefficient or a string (``"s^2 - r"`` or
        ``"s^2 = r"``).  The relation is oriented on the symbol occurring with
        the highest pure power (ties broken by symbol name); that power must be
        the only term of that degree in the symbol.
        """
        if isinstance(relation, str):
            if "=" in relation:
                lhs, rhs = relation.split("=", 1)
                poly = self(lhs) - self(rhs)
            else:
                poly = self(relation)
        else:
            poly = self.coerce(relation)
        if not poly:
            raise ConfigurationError("constraint reduces to zero under existing constraints")
        constrained = {rule.index for rule in self._rules}
        used_in_rhs = set()
        for rule in self._rules:
            for exps in rule.rhs:
                used_in_rhs.update(i for i, e in enumerate(exps) if e and i != rule.index)
        candidates = []
        for i, name in enumerate(self.symbols):
            if i in constrained or i in used_in_rhs:
                continue
            lo = min(exps[i] for exps in poly.terms)
            shifted = poly
            if lo < 0:
                if name not in self.invertible:
                    continue
                shifted = poly * self.symbol(name) ** (-lo)
            m = max(exps[i] for exps in shifted.terms)
            if m <= 0:
                continue
            tops = [exps for exps in shifted.terms if exps[i] == m]
            if len(tops) != 1 or any(e for j, e in enumerate(tops[0]) if j != i):
                continue
            lead = tops[0]
            c = shifted.terms[lead]
            rhs = {exps: -v / c for exps, v in shifted.terms.items() if exps != lead}
            if any(exps[j] for exps in rhs for j in constrained):
                continue
            candidates.append((m, name, i, rhs))
        if not candidates:
            raise ConfigurationError(f"cannot orient constraint {poly} = 0")
        candidates.sort(key=lambda t: (-t[0], t[1]))
        m, name, i, rhs = candidates[0]
        inverse = None
        if name in self.invertible:
            # sym * (sym^(m-1) - sum_{k>=1} c_k sym^(k-1)) = c_0
            c0 = {e: v for e, v in rhs.items() if e[i] == 0}
            if len(c0) != 1:
                raise ConfigurationError(
                    f"{name} is declared invertible but {poly} = 0 leaves it without a monomial inverse"
                )
            (e0, v0), = c0.items()
            if any(e0[j] and self.symbols[j] not in self.invertible for j in range(len(e0))):
                raise ConfigurationError(f"inverse of {name} needs a non-invertible symbol")
            inv0 = tuple(-e for e in e0)
            cofactor = {tuple(m - 1 if j == i else 0 for j in range(len(e0))): _ONE}
            for e, v in rhs.items():
                if e[i] > 0:
                    _add_into(cofactor, tuple(x - 1 if j == i else x for j, x in enumerate(e)), -v)
            inverse = _mul_raw(cofactor, {inv0: v0.inverse()})
        ring = Ring.__new__(Ring)
        ring.symbols = self.symbols
        ring._index = self._index
        ring.invertible = self.invertible
        ring._rules = self._rules + (_Rule(i, m, rhs, inverse),)
        rhs_str = str(Coefficient(self, rhs)) if rhs else "0"
        ring._constraint_src = self._constraint_src + (f"{_power_str(name, m)} -> {rhs_str}",)
        ring._power_cache = {}
        ring._finish()
        return ring

    # -- reduction -----------------------------------------------------

    def _check_laurent(self, exps):
        for i, e in enumerate(exps):
            if e < 0 and self.symbols[i] not in self.invertible:
                raise ConfigurationError(f"symbol {self.symbols[i]!r} is not invertible")

    def _power(self, i: int, e: int) -> dict:
        key = (i, e)
        cached = self._power_cache.get(key)
        if cached is not None:
            return cached
        rule = self._by_index[i]
        if 0 <= e < rule.degree:
            exps = [0] * len(self.symbols)
            exps[i] = e
            out = {tuple(exps): _ONE}
        elif e >= rule.degree:
            out = self._reduce(_mul_raw(self._power(i, e - rule.degree), rule.rhs))
        else:
            if rule.inverse is None:
                raise ConfigurationError(f"symbol {self.symbols[i]!r} is not invertible")
            out = self._reduce(_mul_raw(self._power(i, e + 1), rule.inverse))
        self._power_cache[key] = out
        return out

    def _reduce(self, raw: dict) -> dict:
        if not self._rules:
            for exps in raw:
                self._check_laurent(exps)
            return raw
        out: dict = {}
        for exps, value in raw.items():
            pending = []
            base = list(exps)
            for rule in self._rules:
                e = exps[rule.index]
                if e < 0 or e >= rule.degree:
                    base[rule.index] = 0
                    pending.append(self._power(rule.index, e))
            if not pending:
                self._check_laurent(exps)
                _add_into(out, exps, value)
                continue
            acc = {tuple(base): value}
            for factor in pending:
                acc = _mul_raw(acc, factor)
            for e2, v2 in self._reduce(acc).items():
                _add_into(out, e2, v2)
        return out


def _power_str(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


class Coefficient:
    """An element of a :class:`Ring`, always in reduced form.  Immutable."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    def _other(self, other) -> "Coefficient":
        if isinstance(other, Coefficient):
            if other.ring != self.ring:
                raise ConfigurationError(f"mismatched rings: {self.ring!r} vs {other.ring!r}")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._other(other)
        out = dict(self.terms)
        for exps, v in other.terms.items():
            _add_into(out, exps, v)
        return Coefficient(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient(self.ring, {e: -v for e, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        other = self._other(other)
        if not self.terms or not other.terms:
            return Coefficient(self.ring, {})
        return Coefficient(self.ring, self.ring._reduce(_mul_raw(self.terms, other.terms)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return _fold(lambda a, b: a * b, [self] * k, self.ring.one)

    def __truediv__(self, other):
        return self * self._other(other).inverse()

    def __rtruediv__(self, other):
        return self._other(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, Coefficient):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self.terms == self.ring.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_unit_monomial(self) -> bool:
        if len(self.terms) != 1:
            return False
        (exps, _), = self.terms.items()
        return all(not e or self.ring.symbols[i] in self.ring.invertible for i, e in enumerate(exps))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def inverse(self) -> "Coefficient":
        """Inverse of a unit monomial; anything else is refused."""
        if not self.is_unit_monomial():
            raise ConfigurationError(f"division by non-unit {self}")
        (exps, v), = self.terms.items()
        return self.ring.element({tuple(-e for e in exps): v.inverse()})

    def free_symbols(self) -> set[str]:
        return {self.ring.symbols[i] for exps in self.terms for i, e in enumerate(exps) if e}

    def substitute(self, mapping: dict) -> "Coefficient":
        """Replace symbols by coefficients (of the target ring of the mapped values).

        Symbols not mentioned map to themselves in the target ring.  Negative
        powers need the image to be a unit monomial.
        """
        if not mapping:
            return self
        target = next(iter(mapping.values())).ring
        images = []
        for name in self.ring.symbols:
            if name in mapping:
                images.append(target.coerce(mapping[name]))
            else:
                images.append(target.symbol(name))
        total = target.zero
        for exps, v in self.terms.items():
            term = target.const(v)
            for img, e in zip(images, exps):
                if e:
                    term = term * img ** e
            total = total + term
        return total

    def specialize(self, assignments: dict) -> GaussianRational:
        return specialize(self, assignments)

    def sort_key(self):
        return tuple(sorted(((e, (v.re, v.im)) for e, v in self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        order = self.ring._name_order
        keyed = sorted(self.terms.items(), key=lambda t: tuple(-t[0][i] for i in order))
        parts = []
        for exps, v in keyed:
            mono = "*".join(
                f"{self.ring.symbols[i]}^{exps[i]}" if exps[i] != 1 else self.ring.symbols[i]
                for i in order
                if exps[i]
            )
            parts.append(_term_str(v, mono))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"Coefficient({self})"


def _term_str(v: GaussianRational, mono: str) -> str:
    if not mono:
        return str(v)
    if v == 1:
        return mono
    if v == -1:
        return "-" + mono
    text = str(v)
    if v.re and v.im:
        text = f"({text})"
    return f"{text}*{mono}"


def q_integer(k: int, Q: Coefficient) -> Coefficient:
    """``[k]_Q = 1 + Q + ... + Q^(k-1)``."""
    if k < 1:
        raise ValueError("q_integer needs k >= 1")
    total = Q.ring.zero
    power = Q.ring.one
    for _ in range(k):
        total = total + power
        power = power * Q
    return total


def specialize(a: Coefficient, assignments: dict) -> GaussianRational:
    """Evaluate ``a`` exactly at numeric values for its ring's symbols.

    Every symbol occurring in ``a`` or in a constraint must be assigned, and
    the assignment must satisfy each constraint; otherwise
    :class:`SpecializationError` names the offending symbol or constraint.
    """
    if not isinstance(a, Coefficient):
        return a.specialize(assignments)
    ring = a.ring
    values = {name: GaussianRational.coerce(v) for name, v in assignments.items()}
    needed = set(a.free_symbols())
    for rule in ring._rules:
        needed.add(ring.symbols[rule.index])
        needed.update(Coefficient(ring, rule.rhs).free_symbols())
    missing = sorted(needed - set(values))
    if missing:
        raise SpecializationError(f"unassigned symbols: {', '.join(missing)}")
    for rule, src in zip(ring._rules, ring.constraints):
        lhs = values[ring.symbols[rule.index]] ** rule.degree
        if lhs != _evaluate(ring, rule.rhs, values):
            raise SpecializationError(f"assignment violates constraint {src}")
    return _evaluate(ring, a.terms, values)


def _evaluate(ring: Ring, terms: dict, values: dict) -> GaussianRational:
    total = GaussianRational(0)
    for exps, v in terms.items():
        term = v
        for i, e in enumerate(exps):
            if e:
                term = term * values[ring.symbols[i]] ** e
        total = total + term
    return total
