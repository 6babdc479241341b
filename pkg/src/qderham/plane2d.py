"""The two-dimensional quantum plane ``x y = q y x`` worked end to end.

Builds the standard R-matrix, the two families of first-order calculi, finds
the values of ``Q`` for which the second differentials satisfy quadratic
relations, derives those relations and checks that the resulting planes are
covariant under the matching quantum groups.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import sympy as sp

from .diffcalc import CalculusSpec, assemble, derive_d2x_d2x_relations, exchange_relations
from .freealg import Alphabet, Element, Generator, RelationSet, orient_relations
from .symring import Coefficient, GaussianRational, Ring, q_integer
from .tensorcheck import (
    StructureMatrix,
    check_braid_compat,
    check_linear_condition,
)

CUBIC_ROOT = "cubic_root"
INV_SQRT_R_PLUS = "inverse_sqrt_r_plus"
INV_SQRT_R_MINUS = "inverse_sqrt_r_minus"
IMAGINARY_UNIT = "imaginary_unit"
OTHER = "other"


class BranchRefused(ValueError):
    """No quadratic relations among second differentials exist on this branch."""


def case_ring() -> Ring:
    return Ring(["q", "r"])


def standard_rhat(ring: Ring | None = None) -> StructureMatrix:
    """The 4x4 R-matrix of the q-plane in basis order 11, 12, 21, 22."""
    ring = ring or case_ring()
    return StructureMatrix.parse(ring, 2, [
        ["q", 0, 0, 0],
        [0, "q - q^-1", 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, "q"],
    ])


def plane_matrix(ring: Ring | None = None) -> StructureMatrix:
    """``B = R/q``, the exchange matrix of ``x y = q y x``."""
    ring = ring or case_ring()
    return standard_rhat(ring).scale(ring("q^-1"))


_C_ROWS = {
    1: [["r", 0, 0, 0], [0, "r - 1", "q", 0], [0, "r/q", 0, 0], [0, 0, 0, "r"]],
    2: [["r", 0, 0, 0], [0, 0, "q*r", 0], [0, "1/q", "r - 1", 0], [0, 0, 0, "r"]],
}


def c_matrix(family: int, ring: Ring | None = None, verify: bool = True) -> StructureMatrix:
    """First-order calculus matrix ``C_1`` or ``C_2`` on the q-plane."""
    ring = ring or case_ring()
    try:
        rows = _C_ROWS[family]
    except KeyError:
        raise ValueError("family must be 1 or 2") from None
    C = StructureMatrix.parse(ring, 2, rows)
    if verify:
        B = plane_matrix(ring)
        assert check_linear_condition(B, C), "C fails (E - B)(E + C) = 0"
        assert check_braid_compat(B, C), "C is not braid-compatible with B"
    return C


def swap_conjugate(M: StructureMatrix) -> StructureMatrix:
    """Relabel generator 1 <-> 2 (n = 2)."""
    n = M.n
    flip = lambda a: (n - 1 - a // n) * n + (n - 1 - a % n)
    N = n * n
    return StructureMatrix(M.ring, n, [[M.rows[flip(i)][flip(j)] for j in range(N)] for i in range(N)])


@dataclass
class SwapReport:
    holds: bool
    substitutions: list


def swap_duality_check(ring: Ring | None = None) -> SwapReport:
    """Does ``x <-> y`` together with ``q -> 1/q`` carry ``C_1`` onto ``C_2``?

    Both ``r -> r`` and ``r -> 1/r`` are tried; the ones that work are listed.
    """
    ring = ring or case_ring()
    C1, C2 = c_matrix(1, ring, verify=False), c_matrix(2, ring, verify=False)
    swapped = swap_conjugate(C1)
    found = []
    for label, r_image in (("q -> q^-1, r -> r", "r"), ("q -> q^-1, r -> r^-1", "r^-1")):
        image = swapped.substitute({"q": ring("q^-1"), "r": ring(r_image)})
        if image == C2:
            found.append(label)
    return SwapReport(bool(found), found)


# -- branches of Q -----------------------------------------------------------


@dataclass(frozen=True)
class QBranch:
    label: str
    constraint: str
    note: str = ""

    def realize(self, ring: Ring):
        """Ring carrying this branch's constraint, and ``Q`` inside it."""
        if self.label in (INV_SQRT_R_PLUS, INV_SQRT_R_MINUS):
            R = ring.extend(["s"])
            if "s" not in R.constrained_symbols():
                R = R.constrain("s^2 - r")
            s_inv = R("s^-1")
            return R, (s_inv if self.label == INV_SQRT_R_PLUS else -s_inv)
        if self.label == IMAGINARY_UNIT:
            # Q^2 + 1 splits over the Gaussian rationals, so take the root i itself
            return ring, ring.imaginary_unit
        R = ring.extend(["Q"])
        if not R.constraints or "Q" not in R.constrained_symbols():
            R = R.constrain(self.constraint.replace("= 0", ""))
        return R, R.symbol("Q")


BRANCHES = {
    CUBIC_ROOT: QBranch(CUBIC_ROOT, "Q^2 + Q + 1 = 0", "both primitive cube roots of unity"),
    INV_SQRT_R_PLUS: QBranch(INV_SQRT_R_PLUS, "s^2 = r, Q = s^-1"),
    INV_SQRT_R_MINUS: QBranch(INV_SQRT_R_MINUS, "s^2 = r, Q = -s^-1"),
    IMAGINARY_UNIT: QBranch(IMAGINARY_UNIT, "Q^2 + 1 = 0",
                            "computed at Q = i; Q = -i gives the same relations among second differentials"),
}


@dataclass
class BranchAnalysis:
    branches: list
    diagonal: list            # scalars multiplying (d2x^i)^2
    eliminated: Coefficient   # determinant of the mixed 2x2 block
    factors: list             # Coefficients whose product is `eliminated`
    three: Coefficient        # [3]_Q

    def evidence(self) -> list[str]:
        lines = [f"[3]_Q = {self.three}"]
        lines += [f"diagonal entry {i}{i}: {c}" for i, c in enumerate(self.diagonal, 1)]
        lines.append(f"mixed block determinant: {self.eliminated}")
        lines.append("factored: " + " * ".join(f"({f})" for f in self.factors))
        return lines


def _to_sympy(c: Coefficient):
    total = sp.Integer(0)
    for exps, v in c.terms.items():
        term = sp.Rational(v.re.numerator, v.re.denominator) + sp.I * sp.Rational(v.im.numerator, v.im.denominator)
        for name, e in zip(c.ring.symbols, exps):
            term *= sp.Symbol(name) ** e
        total += term
    return total


def _from_sympy(expr, ring: Ring) -> Coefficient:
    num, den = sp.fraction(sp.together(sp.expand(expr)))
    return _poly_to_coeff(num, ring) * _poly_to_coeff(den, ring).inverse()


def _poly_to_coeff(expr, ring: Ring) -> Coefficient:
    poly = sp.Poly(sp.expand(expr), *[sp.Symbol(name) for name in ring.symbols])
    terms = {}
    for exps, v in poly.terms():
        re, im = (sp.Rational(part) for part in v.as_real_imag())
        terms[tuple(exps)] = GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
    return ring.element(terms)


_U = sp.Symbol("u")
_Q = sp.Symbol("Q")


def _factor_in_q_squared(c: Coefficient):
    """Factor ``c`` as a polynomial in ``u = Q^2``.

    Returns ``(unit, factors)`` with ``factors`` a list of ``(sympy poly in u,
    multiplicity)`` and ``unit`` the leftover constant over a monomial.
    """
    num, den = sp.fraction(sp.together(_to_sympy(c)))
    in_u = sp.expand(num).subs(_Q ** 2, _U)
    if in_u.has(_Q):
        raise ValueError(f"{c} is not a function of Q^2")
    content, parts = sp.factor_list(in_u)
    return content / den, parts


def _det2(a, b, c, d):
    return a * d - b * c


def solve_q_branches(C: StructureMatrix) -> BranchAnalysis:
    """Values of ``Q`` at which ``d2x, d2y`` satisfy nontrivial quadratic relations.

    The relations ``(E - Q^2 C) (d2x d2x) = 0`` force every product of second
    differentials to vanish unless a diagonal coefficient or the mixed-block
    determinant vanishes; each irreducible factor in ``Q^2`` of those scalars
    is a branch.  The cube roots of unity come from the ``[3]_Q`` prefactor.
    """
    if C.n != 2:
        raise ValueError("solve_q_branches handles n = 2 only")
    ring = C.ring.extend(["Q"])
    Q = ring.symbol("Q")
    A = StructureMatrix.identity(ring, 2) - C.coerce(ring).scale(Q * Q)
    mixed = [A[i, j] for i in (0, 3) for j in (1, 2)] + [A[i, j] for i in (1, 2) for j in (0, 3)]
    if any(mixed) or A[0, 3] or A[3, 0]:
        raise ValueError("C couples the squares to other products; no block elimination")
    diagonal = [A[0, 0], A[3, 3]]
    eliminated = _det2(A[1, 1], A[1, 2], A[2, 1], A[2, 2])

    unit, parts = _factor_in_q_squared(eliminated)
    back = lambda f: _from_sympy(f.subs(_U, _Q ** 2), ring)
    factors = [_from_sympy(unit, ring)] + [back(f) ** m for f, m in parts]
    keys = [f for f, _ in parts]
    for scalar in diagonal:
        keys += [f for f, _ in _factor_in_q_squared(scalar)[1]]

    branches = [BRANCHES[CUBIC_ROOT]]
    seen = []
    for key in keys:
        if not key.has(_U) or any(sp.expand(key - k) == 0 or sp.expand(key + k) == 0 for k in seen):
            continue
        seen.append(key)
        branches.extend(_classify(key))
    return BranchAnalysis(branches, diagonal, eliminated, factors, q_integer(3, Q))


def _classify(key):
    r = sp.Symbol("r")
    for target, labels in (
        (_U * r - 1, (INV_SQRT_R_PLUS, INV_SQRT_R_MINUS)),
        (_U + 1, (IMAGINARY_UNIT,)),
    ):
        ratio = sp.cancel(key / target)
        if ratio.is_number:
            return [BRANCHES[label] for label in labels]
    poly = sp.sstr(sp.expand(key.subs(_U, _Q ** 2))).replace("**", "^")
    return [QBranch(OTHER, f"{poly} = 0", "degenerate case")]


# -- second-order planes ------------------------------------------------------


def second_order_plane(C: StructureMatrix, branch: QBranch | str, coordinates=None) -> RelationSet:
    """Relations among the second differentials on a branch, oriented and simplified."""
    if isinstance(branch, str):
        branch = BRANCHES[branch]
    if branch.label == CUBIC_ROOT:
        raise BranchRefused(
            "[3]_Q vanishes when Q^2 + Q + 1 = 0, so differentiating the dx-d2x relations "
            "imposes no quadratic relation on the second differentials"
        )
    ring, Q = branch.realize(C.ring)
    Cb = C.coerce(ring)
    alphabet = Alphabet.calculus(C.n, coordinates)
    _, reduced = derive_d2x_d2x_relations(Cb, Q, alphabet)
    assumptions = [q_integer(3, Q)]
    return orient_relations([r for r in reduced if r], alphabet, ring, assumptions=assumptions)


def assemble_case(family: int, branch: QBranch | str, ring: Ring | None = None) -> CalculusSpec:
    """The full complex on the q-plane for calculus ``C_family`` on ``branch``.

    On the cubic branch the second differentials are left free.
    """
    if isinstance(branch, str):
        branch = BRANCHES[branch]
    base = ring or case_ring()
    C = c_matrix(family, base, verify=False)
    plane = None if branch.label == CUBIC_ROOT else second_order_plane(C, branch)
    R, Q = branch.realize(base)
    return assemble(plane_matrix(R), C.coerce(R), Q, second_order=plane)


def coordinate_plane(ring: Ring | None = None, coordinates=None) -> RelationSet:
    ring = ring or case_ring()
    B = plane_matrix(ring)
    alphabet = Alphabet.calculus(2, coordinates)
    return orient_relations([r for r in exchange_relations(B, alphabet, 0, 0, 0, 0) if r], alphabet, ring)


# -- quantum groups and covariance ------------------------------------------------

ENTRIES = ("alpha", "beta", "gamma", "delta")

# (left word, right word, coefficient): left - coefficient * right
# "ad-da" entries encode alpha*delta - delta*alpha - coefficient * word.
_RAW = {
    "standard_q": [
        ("ab", "ba", "q"), ("ac", "ca", "q"), ("bc", "cb", "1"),
        ("cd", "db", "q"), ("bd", "db", "q"), ("ad-da", "bc", "q - q^-1"),
    ],
    "rq_family1": [
        ("ab", "ba", "r/q"), ("ac", "ca", "q"), ("bc", "cb", "q^2/r"),
        ("bd", "db", "r/q"), ("bd", "db", "q"),
        ("ad-da", "cb", "q - q/r"), ("ad-da", "bc", "r/q - q^-1"),
    ],
    "rq_family2": [
        ("ab", "ba", "1/(r*q)"), ("ac", "ca", "q"), ("bc", "cb", "r*q^2"),
        ("cd", "db", "1/(r*q)"), ("bd", "db", "q"),
        ("ad-da", "cb", "q - r*q"), ("ad-da", "bc", "1/q - 1/(r*q)"),
    ],
}

# index into the raw list -> replacement
_CORRECTIONS = {
    "standard_q": {3: ("cd", "dc", "q")},
    "rq_family1": {3: ("cd", "dc", "r/q")},
    "rq_family2": {3: ("cd", "dc", "1/(r*q)"), 6: ("ad-da", "bc", "1/(r*q) - 1/q")},
}

_LETTER = dict(zip("abcd", ENTRIES))


def entries_alphabet() -> Alphabet:
    return Alphabet([Generator(name, 0, -k) for k, name in enumerate(ENTRIES, 1)])


def _glq_element(alphabet, ring, left, right, coeff):
    word = lambda s: tuple(alphabet.position[_LETTER[ch]] for ch in s)
    rhs = Element.from_word(alphabet, ring, word(right), ring(coeff))
    if left == "ad-da":
        lhs = Element.from_word(alphabet, ring, word("ad")) - Element.from_word(alphabet, ring, word("da"))
    else:
        lhs = Element.from_word(alphabet, ring, word(left))
    return lhs - rhs


def glq2_relations(kind: str, ring: Ring | None = None, corrected: bool = True) -> list[Element]:
    """Defining relations of GL_q(2) or one of the GL_{r,q}(2) variants.

    ``corrected=False`` gives the raw relation table; the corrected
    set fixes ``gamma delta = c delta beta`` to ``gamma delta = c delta gamma``
    (and, in the first two-parameter block, the duplicated ``beta delta``
    line), and flips the sign of the second form of ``alpha delta - delta
    alpha`` in the second two-parameter block.
    """
    ring = ring or case_ring()
    if kind not in _RAW:
        raise ValueError(f"unknown kind {kind!r}")
    rows = list(_RAW[kind])
    if corrected:
        for i, row in _CORRECTIONS[kind].items():
            rows[i] = row
    alphabet = entries_alphabet()
    return [_glq_element(alphabet, ring, *row) for row in rows]


def glq2_corrections(kind: str) -> list[str]:
    out = []
    for i, new in _CORRECTIONS[kind].items():
        out.append(f"{_describe(_RAW[kind][i])}  =>  {_describe(new)}")
    return out


def _describe(row):
    left, right, coeff = row
    name = lambda s: "*".join(_LETTER[ch] for ch in s)
    lhs = "alpha*delta - delta*alpha" if left == "ad-da" else name(left)
    return f"{lhs} = ({coeff}) {name(right)}"


@dataclass
class CoactionSpec:
    """Bialgebra entries with their relations acting on a 2-generator plane.

    ``x -> alpha x + beta y``, ``y -> gamma x + delta y``; entries commute with
    plane generators.
    """

    relations: list
    label: str = ""

    @classmethod
    def glq2(cls, kind: str, ring: Ring | None = None, corrected: bool = True) -> "CoactionSpec":
        tag = "corrected" if corrected else "raw"
        return cls(glq2_relations(kind, ring, corrected), f"{kind} ({tag})")


@dataclass
class CovarianceReport:
    label: str
    passed: bool
    residues: list = field(default_factory=list)   # (relation text, residue)
    confluent: bool = True
    unresolved: list = field(default_factory=list)


def _transfer(e: Element, alphabet: Alphabet, ring: Ring) -> Element:
    terms = {}
    for w, c in e.terms.items():
        terms[tuple(alphabet.position[e.alphabet.names[i]] for i in w)] = ring.coerce(c)
    return Element(alphabet, ring, terms)


def check_covariance(plane: RelationSet, coaction: CoactionSpec) -> CovarianceReport:
    """Substitute the coaction into each plane relation and reduce in the combined algebra."""
    letters = sorted({i for rel in plane.relations() for w in rel.terms for i in w})
    if len(letters) != 2:
        raise ValueError("plane relations must involve exactly two generators")
    plane_gens = [plane.alphabet.generators[i] for i in letters]
    entries = entries_alphabet()
    alphabet = Alphabet(list(entries.generators) + plane_gens)
    ring = plane.ring
    pos = alphabet.position

    rels = [_transfer(r, alphabet, ring) for r in coaction.relations]
    for p in plane_gens:
        for t in ENTRIES:
            rels.append(
                Element.from_word(alphabet, ring, (pos[p.name], pos[t]))
                - Element.from_word(alphabet, ring, (pos[t], pos[p.name]))
            )
    plane_rels = [_transfer(r, alphabet, ring) for r in plane.relations()]
    combined = orient_relations([r for r in rels + plane_rels if r], alphabet, ring)

    x, y = (pos[g.name] for g in plane_gens)
    a, b, c, d = (pos[t] for t in ENTRIES)
    image = {
        x: Element(alphabet, ring, {(a, x): ring.one, (b, y): ring.one}),
        y: Element(alphabet, ring, {(c, x): ring.one, (d, y): ring.one}),
    }
    residues = []
    for rel in plane_rels:
        total = Element(alphabet, ring)
        for w, coeff in rel.terms.items():
            term = Element.one(alphabet, ring).scale(coeff)
            for letter in w:
                term = term * image[letter]
            total = total + term
        residue = combined.reduce(total)
        if residue:
            residues.append((str(rel), residue))
    pairs = combined.critical_pairs()
    unresolved = [(alphabet.render(p.word), p.left - p.right) for p in pairs if not p.resolved]
    return CovarianceReport(coaction.label, not residues, residues, not unresolved, unresolved)
