"""The Q-Leibniz differential and the relations it forces.

Given exchange matrices ``B`` (coordinates among themselves) and ``C``
(coordinates past first differentials), applying ``d`` to the defining
relations produces the relations between ``x`` and ``d2x``, between ``dx`` and
``d2x`` and among the ``d2x``.  This module derives those relations,
assembles the full quotient and checks ``d^3 = 0`` on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .freealg import Alphabet, Element, RelationSet, orient_relations
from .symring import Coefficient, q_integer
from .tensorcheck import StructureMatrix


def exchange_relations(M: StructureMatrix, alphabet: Alphabet, left: int, right: int,
                       out_left: int, out_right: int) -> list[Element]:
    """``a^i b^j - M^{ij}_{kl} c^k e^l`` for generator degrees (left, right, out_left, out_right)."""
    n, ring = M.n, M.ring
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            e = Element.from_word(alphabet, ring, (alphabet.of(left, i), alphabet.of(right, j)))
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    c = M.entry(i, j, k, l)
                    if c:
                        e = e - Element.from_word(
                            alphabet, ring, (alphabet.of(out_left, k), alphabet.of(out_right, l)), c
                        )
            out.append(e)
    return out


def _pair_relations(alphabet, n, lhs_words, lhs_mat, rhs_words, rhs_mat):
    # sum_kl lhs_mat^{ij}_{kl} w_kl - sum_kl rhs_mat^{ij}_{kl} v_kl, per (i, j)
    ring = lhs_mat.ring
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            e = Element(alphabet, ring)
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    a = lhs_mat.entry(i, j, k, l)
                    b = rhs_mat.entry(i, j, k, l)
                    if a:
                        e = e + Element.from_word(alphabet, ring, lhs_words(k, l), a)
                    if b:
                        e = e - Element.from_word(alphabet, ring, rhs_words(k, l), b)
            out.append(e)
    return out


def _words(alphabet, da, db):
    return lambda k, l: (alphabet.of(da, k), alphabet.of(db, l))


def derive_x_d2x_relations(C: StructureMatrix, Q: Coefficient, alphabet: Alphabet | None = None) -> list[Element]:
    """``x^i d2x^j - C d2x^k x^l - (Q C - delta delta) dx^k dx^l`` for every (i, j)."""
    alphabet = alphabet or Alphabet.calculus(C.n)
    E = StructureMatrix.identity(C.ring, C.n)
    moved = exchange_relations(C, alphabet, 0, 2, 2, 0)
    dxdx = _pair_relations(alphabet, C.n, _words(alphabet, 1, 1), C.scale(Q) - E,
                           _words(alphabet, 1, 1), StructureMatrix.zero(C.ring, C.n))
    return [a - b for a, b in zip(moved, dxdx)]


def derive_dx_d2x_relations(C: StructureMatrix, Q: Coefficient, alphabet: Alphabet | None = None) -> list[Element]:
    """``([2]_Q E - Q^2 C) dx d2x - ([2]_Q Q C - E) d2x dx`` componentwise."""
    alphabet = alphabet or Alphabet.calculus(C.n)
    E = StructureMatrix.identity(C.ring, C.n)
    two = q_integer(2, Q)
    lhs = E.scale(two) - C.scale(Q * Q)
    rhs = C.scale(two * Q) - E
    return _pair_relations(alphabet, C.n, _words(alphabet, 1, 2), lhs, _words(alphabet, 2, 1), rhs)


def derive_d2x_d2x_relations(C: StructureMatrix, Q: Coefficient, alphabet: Alphabet | None = None):
    """Relations among second differentials.

    Returns ``(prefactored, reduced)``.  ``prefactored`` carries the explicit
    ``[3]_Q`` factor and is identically zero when ``Q`` is a primitive cube
    root of unity; ``reduced`` drops the factor and is ``None`` in that case.
    """
    alphabet = alphabet or Alphabet.calculus(C.n)
    E = StructureMatrix.identity(C.ring, C.n)
    three = q_integer(3, Q)
    reduced = _pair_relations(alphabet, C.n, _words(alphabet, 2, 2), E, _words(alphabet, 2, 2), C.scale(Q * Q))
    prefactored = [r.scale(three) for r in reduced]
    return prefactored, (reduced if three else None)


def derive_F_relations(F: StructureMatrix, Q: Coefficient, alphabet: Alphabet | None = None) -> list[Element]:
    """``x^i d2x^j - F d2x^k x^l`` followed by ``d2x^i d2x^j - Q^4 F d2x^k d2x^l``."""
    alphabet = alphabet or Alphabet.calculus(F.n)
    E = StructureMatrix.identity(F.ring, F.n)
    coords = exchange_relations(F, alphabet, 0, 2, 2, 0)
    seconds = _pair_relations(alphabet, F.n, _words(alphabet, 2, 2), E, _words(alphabet, 2, 2), F.scale(Q ** 4))
    return coords + seconds


# -- the differential ------------------------------------------------------


def differential(e: Element, Q: Coefficient) -> Element:
    """``d`` on the free algebra, splitting one letter at a time from the left."""
    alphabet, ring = e.alphabet, e.ring
    Q = ring(Q)
    out = Element(alphabet, ring)
    powers = {0: ring.one}

    def qpow(k):
        if k not in powers:
            powers[k] = Q ** k
        return powers[k]

    for word, c in e.terms.items():
        grade = 0
        terms = {}
        for p, letter in enumerate(word):
            target = alphabet.d_letter(letter)
            if target is not None:
                new = word[:p] + (target,) + word[p + 1 :]
                terms[new] = terms.get(new, ring.zero) + c * qpow(grade)
            grade += alphabet.degrees[letter]
        out = out + Element(alphabet, ring, terms)
    return out


@dataclass
class CalculusSpec:
    """One de Rham complex instance: exchange matrices, Q and the assembled quotient."""

    B: StructureMatrix
    C: StructureMatrix
    Q: Coefficient
    F: StructureMatrix | None = None
    alphabet: Alphabet | None = None
    relations: RelationSet | None = None
    second_order: RelationSet | None = None
    parts: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.B.n

    @property
    def ring(self):
        return self.B.ring


def assemble(B: StructureMatrix, C: StructureMatrix, Q, F: StructureMatrix | None = None,
             coordinates=None, second_order: RelationSet | None = None,
             include=("B", "C", "x_d2x", "dx_d2x", "d2x_d2x", "F")) -> CalculusSpec:
    """Build every relation of the complex and orient them together.

    ``second_order`` replaces the raw relations among the ``d2x`` by an
    already simplified set (see :mod:`qderham.plane2d`).  ``include`` selects
    which families go in, which is how the negative controls drop one.
    """
    ring = B.ring
    Q = ring(Q)
    alphabet = Alphabet.calculus(B.n, coordinates)
    parts = {}
    if "B" in include:
        parts["B"] = exchange_relations(B, alphabet, 0, 0, 0, 0)
    if "C" in include:
        parts["C"] = exchange_relations(C, alphabet, 0, 1, 1, 0)
    if "x_d2x" in include:
        parts["x_d2x"] = derive_x_d2x_relations(C, Q, alphabet)
    if "dx_d2x" in include:
        parts["dx_d2x"] = derive_dx_d2x_relations(C, Q, alphabet)
    assumptions = []
    if "d2x_d2x" in include:
        if second_order is not None:
            parts["d2x_d2x"] = [_rename(r, alphabet) for r in second_order.relations()]
            assumptions += list(second_order.assumptions)
        else:
            _, reduced = derive_d2x_d2x_relations(C, Q, alphabet)
            if reduced is not None:
                parts["d2x_d2x"] = reduced
                assumptions.append(q_integer(3, Q))
    if F is not None and "F" in include:
        parts["F"] = derive_F_relations(F, Q, alphabet)
    everything = [r for rels in parts.values() for r in rels if r]
    relations = orient_relations(everything, alphabet, ring, assumptions=assumptions)
    return CalculusSpec(B, C, Q, F, alphabet, relations, second_order, parts)


def _rename(e: Element, alphabet: Alphabet) -> Element:
    if e.alphabet == alphabet:
        return e
    terms = {
        tuple(alphabet.position[e.alphabet.names[i]] for i in w): c for w, c in e.terms.items()
    }
    return Element(alphabet, e.ring, terms)


def apply_d(e: Element, spec: CalculusSpec) -> Element:
    """``d(e)`` in the quotient, returned in normal form."""
    rs = spec.relations
    return rs.normal_form(differential(rs.normal_form(e), spec.Q))


# -- the d^3 = 0 battery -----------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str | None = None
    residue: Element | None = None
    detail: str = ""


@dataclass
class ComplexReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self):
        return next((c for c in self.checks if not c.passed), None)


def _all_words(letters, max_len):
    words = [()]
    frontier = [()]
    for _ in range(max_len):
        frontier = [w + (g,) for w in frontier for g in letters]
        words.extend(frontier)
    return words[1:]


def check_complex(spec: CalculusSpec, max_len: int = 4) -> ComplexReport:
    """Check that ``d`` descends to the quotient and that ``d^3`` kills it.

    (a) ``d`` of each defining relation lies in the ideal; (b) ``d^3(w)``
    vanishes for every coordinate word of length at most ``max_len``;
    (c) ``d`` raises the grade of each homogeneous test element by one.
    """
    rs, Q, alphabet = spec.relations, spec.Q, spec.alphabet
    checks = []

    failure = None
    for rel in rs.relations():
        image = differential(rel, Q)
        if not rs.is_zero(image):
            failure = CheckResult("d(relations) in ideal", False, str(rel), rs.reduce(image))
            break
    checks.append(failure or CheckResult("d(relations) in ideal", True))

    coords = [i for i, g in enumerate(alphabet.generators) if g.degree == 0]
    failure = None
    tested = []
    for w in _all_words(coords, max_len):
        e = Element.from_word(alphabet, spec.ring, w)
        tested.append(e)
        d3 = differential(differential(differential(e, Q), Q), Q)
        if not rs.is_zero(d3):
            failure = CheckResult("d^3 = 0 on coordinate words", False, alphabet.render(w), rs.reduce(d3))
            break
    checks.append(failure or CheckResult("d^3 = 0 on coordinate words", True, detail=f"{len(tested)} words"))

    failure = None
    for e in tested + rs.relations():
        for part in (e, differential(e, Q)):
            if not part.is_homogeneous():
                failure = CheckResult("d raises grade by one", False, str(part))
        de = differential(e, Q)
        if de and de.grades() != {g + 1 for g in e.grades()}:
            failure = CheckResult("d raises grade by one", False, str(e), de)
        if failure:
            break
    checks.append(failure or CheckResult("d raises grade by one", True))
    return ComplexReport(checks)
