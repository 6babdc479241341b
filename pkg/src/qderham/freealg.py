"""Free graded associative algebras, quadratic rewrite systems and normal forms.

Words are tuples of letter positions in an :class:`Alphabet`; the alphabet
order *is* the generator order.  Words compare by length first, then
lexicographically, so quadratic rules can never increase a word.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .fractionfield import FractionField, RationalFunction
from .symring import Coefficient, ConfigurationError, Ring


class StructureError(ValueError):
    """A relation does not have the shape the rewrite machinery needs."""


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int = 0
    index: int = 0


class Alphabet:
    """An ordered tuple of generators."""

    def __init__(self, generators):
        self.generators = tuple(generators)
        self.names = tuple(g.name for g in self.generators)
        if len(set(self.names)) != len(self.names):
            raise ConfigurationError(f"duplicate generator names {self.names}")
        self.position = {g.name: i for i, g in enumerate(self.generators)}
        self.degrees = tuple(g.degree for g in self.generators)
        by_grade = {(g.degree, g.index): i for i, g in enumerate(self.generators)}
        self._d = tuple(by_grade.get((g.degree + 1, g.index)) for g in self.generators)

    @classmethod
    def calculus(cls, n: int, coordinates=None) -> "Alphabet":
        """``d2x1 < ... < d2xn < dx1 < ... < dxn < x1 < ... < xn``."""
        if coordinates is None:
            coordinates = [f"x{i}" for i in range(1, n + 1)]
        if len(coordinates) != n:
            raise ConfigurationError(f"expected {n} coordinate names")
        gens = [Generator(f"d2{c}", 2, i) for i, c in enumerate(coordinates, 1)]
        gens += [Generator(f"d{c}", 1, i) for i, c in enumerate(coordinates, 1)]
        gens += [Generator(c, 0, i) for i, c in enumerate(coordinates, 1)]
        return cls(gens)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        return f"Alphabet({', '.join(self.names)})"

    def __len__(self):
        return len(self.generators)

    def of(self, degree: int, index: int) -> int:
        for i, g in enumerate(self.generators):
            if g.degree == degree and g.index == index:
                return i
        raise KeyError((degree, index))

    def word(self, spec) -> tuple:
        """``"x1*dx2"`` or a sequence of names -> word tuple.  ``"1"`` is the unit."""
        if isinstance(spec, str):
            spec = spec.strip()
            names = [] if spec in ("", "1") else [s.strip() for s in spec.split("*")]
        else:
            names = list(spec)
        try:
            return tuple(self.position[name] for name in names)
        except KeyError as exc:
            raise ConfigurationError(f"unknown generator {exc.args[0]!r}") from None

    def render(self, word: tuple) -> str:
        return "*".join(self.names[i] for i in word) if word else "1"

    def grade(self, word: tuple) -> int:
        return sum(self.degrees[i] for i in word)

    def d_letter(self, letter: int):
        """Position of ``d`` of a letter, or None when d of it vanishes."""
        g = self.generators[letter]
        if g.degree >= 2:
            return None
        target = self._d[letter]
        if target is None:
            raise ConfigurationError(f"no differential partner for {g.name}")
        return target


def word_key(word: tuple):
    return (len(word), word)


def monomial_order(u: tuple, v: tuple) -> int:
    """-1, 0 or 1 as ``u`` is smaller than, equal to or larger than ``v``."""
    ku, kv = word_key(u), word_key(v)
    return (ku > kv) - (ku < kv)


class Element:
    """Finite linear combination of words with coefficients in a ring."""

    __slots__ = ("alphabet", "ring", "terms")

    def __init__(self, alphabet: Alphabet, ring: Ring, terms=None):
        self.alphabet = alphabet
        self.ring = ring
        self.terms = {} if terms is None else {w: c for w, c in terms.items() if c}

    @classmethod
    def from_word(cls, alphabet, ring, word, coeff=1) -> "Element":
        if not isinstance(word, tuple):
            word = alphabet.word(word)
        return cls(alphabet, ring, {word: ring(coeff)})

    @classmethod
    def one(cls, alphabet, ring) -> "Element":
        return cls(alphabet, ring, {(): ring.one})

    def _check(self, other: "Element"):
        if other.alphabet != self.alphabet or other.ring != self.ring:
            raise ConfigurationError("elements over different alphabets or rings")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            s = c if s is None else s + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return Element(self.alphabet, self.ring, out)

    def __neg__(self):
        return Element(self.alphabet, self.ring, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Element":
        c = self.ring(c)
        if not c:
            return Element(self.alphabet, self.ring)
        return Element(self.alphabet, self.ring, {w: c * v for w, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Element):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for wa, ca in self.terms.items():
            for wb, cb in other.terms.items():
                _accumulate(out, wa + wb, ca * cb)
        return Element(self.alphabet, self.ring, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.alphabet == other.alphabet and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, word) -> Coefficient:
        if not isinstance(word, tuple):
            word = self.alphabet.word(word)
        return self.terms.get(word, self.ring.zero)

    def grades(self) -> set:
        return {self.alphabet.grade(w) for w in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.grades()) <= 1

    def leading_word(self):
        return max(self.terms, key=word_key) if self.terms else None

    def map_coefficients(self, fn, ring=None) -> "Element":
        ring = self.ring if ring is None else ring
        return Element(self.alphabet, ring, {w: fn(c) for w, c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=word_key):
            c = self.terms[w]
            text = self.alphabet.render(w)
            cs = str(c)
            if not w:
                parts.append(cs if c.is_monomial() else f"({cs})")
            elif cs == "1":
                parts.append(text)
            elif cs == "-1":
                parts.append("-" + text)
            elif c.is_monomial() and " " not in cs:
                parts.append(f"{cs} * {text}")
            else:
                parts.append(f"({cs}) * {text}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    __repr__ = __str__


def _accumulate(out: dict, word: tuple, c: Coefficient) -> None:
    s = out.get(word)
    s = c if s is None else s + c
    if s:
        out[word] = s
    else:
        out.pop(word, None)


@dataclass(frozen=True)
class RewriteRule:
    lhs: tuple
    rhs: Element


@dataclass
class CriticalPair:
    word: tuple
    left: Element
    right: Element
    resolved: bool


class RelationSet:
    """Oriented quadratic rules plus unoriented residual relations.

    ``assumptions`` lists coefficients that were assumed non-zero while the
    set was simplified (e.g. ``1 + r`` when ``(1 + r) a*a = 0`` became
    ``a*a -> 0``).
    """

    def __init__(self, alphabet: Alphabet, ring: Ring, rules=None, residuals=(), assumptions=()):
        self.alphabet = alphabet
        self.ring = ring
        self.rules: dict = dict(rules or {})
        for lhs, rhs in self.rules.items():
            if len(lhs) != 2:
                raise StructureError(f"rule lhs {alphabet.render(lhs)} is not quadratic")
            for w in rhs.terms:
                if word_key(w) >= word_key(lhs):
                    raise StructureError(
                        f"rule {alphabet.render(lhs)} -> {rhs} does not decrease the monomial order"
                    )
        self.assumptions = tuple(assumptions)
        self._cache: dict = {}
        self._confluent = None
        self.residuals = tuple(r for r in (self.normal_form(x) for x in residuals) if r)

    @classmethod
    def empty(cls, alphabet, ring) -> "RelationSet":
        return cls(alphabet, ring)

    def rule_list(self) -> list[RewriteRule]:
        return [RewriteRule(lhs, self.rules[lhs]) for lhs in sorted(self.rules, key=word_key)]

    def relations(self) -> list[Element]:
        """Every defining relation as an element ``lhs - rhs`` (plus residuals)."""
        out = []
        for rule in self.rule_list():
            out.append(Element.from_word(self.alphabet, self.ring, rule.lhs) - rule.rhs)
        return out + list(self.residuals)

    def restrict(self, names) -> "RelationSet":
        """Rules whose words only use the letters ``names`` (residuals are dropped)."""
        keep = {self.alphabet.position[n] for n in names}
        rules = {
            lhs: rhs
            for lhs, rhs in self.rules.items()
            if set(lhs) <= keep and all(set(w) <= keep for w in rhs.terms)
        }
        return RelationSet(self.alphabet, self.ring, rules, assumptions=self.assumptions)

    def __len__(self):
        return len(self.rules) + len(self.residuals)

    # -- reduction -----------------------------------------------------

    def _word_nf(self, word: tuple) -> dict:
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        rules = self.rules
        for p in range(len(word) - 1):
            rhs = rules.get(word[p : p + 2])
            if rhs is None:
                continue
            out: dict = {}
            pre, post = word[:p], word[p + 2 :]
            for w, c in rhs.terms.items():
                for w2, c2 in self._word_nf(pre + w + post).items():
                    _accumulate(out, w2, c * c2)
            break
        else:
            out = {word: self.ring.one}
        self._cache[word] = out
        return out

    def adopt(self, e: Element) -> Element:
        """``e`` with coefficients moved into this set's ring (e.g. its fraction field)."""
        if e.alphabet != self.alphabet:
            raise ConfigurationError("element does not live over this relation set")
        if e.ring == self.ring:
            return e
        if isinstance(self.ring, FractionField) and e.ring == self.ring.base:
            return e.map_coefficients(self.ring.wrap, self.ring)
        raise ConfigurationError("element does not live over this relation set")

    def normal_form(self, e: Element, rng: random.Random | None = None) -> Element:
        """Reduce ``e`` until no rule applies.

        With ``rng`` the rule applications are picked at random (uncached),
        which is how order-independence gets tested.
        """
        e = self.adopt(e)
        if rng is not None:
            return self._random_nf(e, rng)
        out: dict = {}
        for w, c in e.terms.items():
            for w2, c2 in self._word_nf(w).items():
                _accumulate(out, w2, c * c2)
        return Element(self.alphabet, self.ring, out)

    def _random_nf(self, e: Element, rng: random.Random) -> Element:
        terms = dict(e.terms)
        while True:
            sites = [
                (w, p)
                for w in terms
                for p in range(len(w) - 1)
                if w[p : p + 2] in self.rules
            ]
            if not sites:
                return Element(self.alphabet, self.ring, terms)
            w, p = rng.choice(sites)
            c = terms.pop(w)
            for w2, c2 in self.rules[w[p : p + 2]].terms.items():
                _accumulate(terms, w[:p] + w2 + w[p + 2 :], c * c2)

    def multiply(self, a: Element, b: Element) -> Element:
        return self.normal_form(self.adopt(a) * self.adopt(b))

    def is_zero(self, e: Element) -> bool:
        """Whether ``e`` lies in the ideal generated by the relations."""
        return not self.reduce(e)

    def reduce(self, e: Element) -> Element:
        """Normal form, then elimination against the rest of the ideal.

        When the rules are confluent and there are no residual relations the
        normal form decides membership by itself.  Otherwise the ideal is
        spanned, one length/grade component at a time, by the multiples
        ``u*rho*v`` of the residuals (or of every relation, when the rules
        are not confluent), and ``e`` is eliminated against that span.  The
        elimination is fraction-free, so parameters are treated as generic.
        """
        e = self.adopt(e)
        nf = self.normal_form(e)
        if not nf:
            return nf
        generators = self._membership_generators()
        if not generators:
            return nf
        out = Element(self.alphabet, self.ring)
        for (length, grade), part in _components(nf).items():
            rows = _Echelon()
            for rho in generators:
                rl = len(next(iter(rho.terms)))
                rg = self.alphabet.grade(next(iter(rho.terms)))
                if rl > length or rg > grade:
                    continue
                for left_len in range(length - rl + 1):
                    right_len = length - rl - left_len
                    for u in _words(len(self.alphabet), left_len):
                        for v in _words(len(self.alphabet), right_len):
                            if self.alphabet.grade(u) + rg + self.alphabet.grade(v) != grade:
                                continue
                            shifted = Element(
                                self.alphabet, self.ring, {u + w + v: c for w, c in rho.terms.items()}
                            )
                            rows.insert(self.normal_form(shifted).terms)
            left = rows.reduce(part.terms)
            out = out + Element(self.alphabet, self.ring, left)
        return out

    def _membership_generators(self):
        if self.residuals or not self.is_confluent():
            return self.relations()
        return []

    # -- confluence ------------------------------------------------------

    def critical_pairs(self) -> list[CriticalPair]:
        by_first: dict = {}
        for lhs in self.rules:
            by_first.setdefault(lhs[0], []).append(lhs)
        pairs = []
        for lhs1 in sorted(self.rules, key=word_key):
            for lhs2 in sorted(by_first.get(lhs1[1], ()), key=word_key):
                word = lhs1 + lhs2[1:]
                a = Element.from_word(self.alphabet, self.ring, (lhs1[0],))
                c = Element.from_word(self.alphabet, self.ring, (lhs2[1],))
                left = self.normal_form(self.rules[lhs1] * c)
                right = self.normal_form(a * self.rules[lhs2])
                pairs.append(CriticalPair(word, left, right, not (left - right)))
        return pairs

    def is_confluent(self) -> bool:
        """Every overlap resolves under the rules alone (residuals are not used)."""
        if self._confluent is None:
            self._confluent = all(p.resolved for p in self.critical_pairs())
        return self._confluent

    def union(self, other: "RelationSet") -> "RelationSet":
        """Re-orient the relations of both sets together."""
        return orient_relations(
            self.relations() + other.relations(),
            self.alphabet,
            self.ring,
            assumptions=self.assumptions + other.assumptions,
        )

    def render(self) -> list[str]:
        lines = [
            f"{self.alphabet.render(r.lhs)} -> {r.rhs}" for r in self.rule_list()
        ]
        lines += [f"{res} = 0" for res in self.residuals]
        return lines


def _components(e: Element) -> dict:
    parts: dict = {}
    for w, c in e.terms.items():
        parts.setdefault((len(w), e.alphabet.grade(w)), {})[w] = c
    return {k: Element(e.alphabet, e.ring, v) for k, v in parts.items()}


def _words(size: int, length: int):
    return itertools.product(range(size), repeat=length)


class _Echelon:
    """Fraction-free row echelon form keyed by leading entry."""

    def __init__(self, key=word_key):
        self.rows: dict = {}
        self.key = key

    def _eliminate(self, row: dict) -> dict:
        row = dict(row)
        while row:
            lead = max(row, key=self.key)
            pivot = self.rows.get(lead)
            if pivot is None:
                return row
            a, b = pivot[lead], row[lead]
            if a.is_unit_monomial():
                factor = b * a.inverse()
                new = dict(row)
                for w, c in pivot.items():
                    _accumulate(new, w, -factor * c)
            else:
                new = {}
                for w, c in row.items():
                    _accumulate(new, w, a * c)
                for w, c in pivot.items():
                    _accumulate(new, w, -b * c)
            row = new
        return row

    def insert(self, row: dict) -> None:
        row = self._eliminate(row)
        if row:
            self.rows[max(row, key=self.key)] = row

    def reduce(self, row: dict) -> dict:
        return self._eliminate(row)


def orient_relations(relations, alphabet: Alphabet, ring: Ring, assumptions=(), localize: bool = True) -> RelationSet:
    """Turn quadratic relations into a rewrite system by unit-pivot elimination.

    Each relation is reduced by the rules found so far; if its leading word
    (the largest under :func:`monomial_order`) has a unit-monomial coefficient
    it becomes a rule, otherwise the relation is kept as a residual.  Adding a
    rule sends all residuals back through the loop.

    With ``localize`` (the default), residuals left at the end send the whole
    computation to the fraction field of ``ring``: every nonzero pivot is then
    invertible, and the pivots that were not units are appended to the
    assumptions (parameters are generic, so those coefficients are nonzero).
    """
    rows = []
    for rel in relations:
        if rel.alphabet != alphabet or rel.ring != ring:
            raise ConfigurationError("relation over a different alphabet or ring")
        for w in rel.terms:
            if len(w) != 2:
                raise StructureError(f"relation {rel} has a non-quadratic word {alphabet.render(w)}")
        if not rel.is_homogeneous():
            raise StructureError(f"relation {rel} is not grade-homogeneous")
        if rel:
            rows.append(dict(rel.terms))

    rules, residual, inverted = _orient_rows(rows)
    if residual and localize and not isinstance(ring, FractionField):
        ring = FractionField(ring)
        rows = [{w: ring.wrap(c) for w, c in row.items()} for row in rows]
        rules, residual, inverted = _orient_rows(rows)
    assumed = []
    for c in list(assumptions) + inverted:
        if not c.is_unit_monomial() or isinstance(c, RationalFunction):
            if c not in assumed:
                assumed.append(c)

    oriented = {}
    for lead, row in rules.items():
        rhs = {w: -c for w, c in row.items() if w != lead}
        oriented[lead] = Element(alphabet, ring, rhs)
    res = [Element(alphabet, ring, r) for r in residual]
    return RelationSet(alphabet, ring, oriented, res, assumed)


def _orient_rows(rows):
    rules: dict = {}  # lead -> row with coefficient 1 at lead
    residual: list = []
    inverted: list = []
    pending = [dict(r) for r in rows]
    while pending:
        row = pending.pop(0)
        changed = True
        while changed:
            changed = False
            for w in list(row):
                pivot = rules.get(w)
                if pivot is not None and w in row:
                    c = row[w]
                    for w2, c2 in pivot.items():
                        _accumulate(row, w2, -c * c2)
                    changed = True
        if not row:
            continue
        lead = max(row, key=word_key)
        lc = row[lead]
        if not lc.is_unit_monomial():
            residual.append(row)
            continue
        if isinstance(lc, RationalFunction) and not (lc.is_polynomial() and lc.num.is_unit_monomial()):
            inverted.append(lc.num)
        inv = lc.inverse()
        row = {w: c * inv for w, c in row.items()}
        for other in rules.values():
            c = other.get(lead)
            if c is not None:
                for w2, c2 in row.items():
                    _accumulate(other, w2, -c * c2)
        rules[lead] = row
        pending.extend(residual)
        residual = []
    return rules, residual, inverted
