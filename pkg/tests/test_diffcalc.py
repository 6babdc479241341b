import random

import pytest
from hypothesis import given, settings, strategies as st

from qderham.diffcalc import (
    apply_d,
    assemble,
    check_complex,
    derive_d2x_d2x_relations,
    derive_dx_d2x_relations,
    derive_x_d2x_relations,
    differential,
    exchange_relations,
)
from qderham.freealg import Alphabet, Element
from qderham.plane2d import BRANCHES, CUBIC_ROOT, INV_SQRT_R_PLUS, assemble_case, c_matrix, plane_matrix
from qderham.symring import Ring, q_integer

RQ = Ring(["q", "r", "Q"])
A = Alphabet.calculus(2)


def first_order_only(family=1):
    B, C = plane_matrix(RQ), c_matrix(family, RQ, verify=False)
    return assemble(B, C, RQ("Q"), include=("B",))


@pytest.mark.parametrize("family", [1, 2])
def test_derived_relations_are_d_of_the_exchange_relations(family):
    spec = first_order_only(family)
    rs = spec.relations
    C = spec.C
    eq2 = exchange_relations(C, spec.alphabet, 0, 1, 1, 0)
    once = derive_x_d2x_relations(C, spec.Q, spec.alphabet)
    twice = derive_dx_d2x_relations(C, spec.Q, spec.alphabet)
    for rel, x_d2x, dx_d2x in zip(eq2, once, twice):
        d1 = apply_d(rel, spec)
        assert d1 == rs.normal_form(x_d2x)
        assert apply_d(d1, spec) == rs.normal_form(dx_d2x)


words = st.lists(st.integers(0, 5), min_size=1, max_size=6).map(tuple)


@settings(max_examples=60, deadline=None)
@given(words, st.integers(0, 6))
def test_q_leibniz_rule_for_every_split(word, cut):
    Q = RQ("Q")
    cut = min(cut, len(word))
    a = Element.from_word(A, RQ, word[:cut])
    b = Element.from_word(A, RQ, word[cut:])
    grade = A.grade(word[:cut])
    assert differential(a * b, Q) == differential(a, Q) * b + (a * differential(b, Q)).scale(Q ** grade)


@settings(max_examples=30, deadline=None)
@given(words)
def test_d_cubed_vanishes_on_free_coordinate_words_at_a_cube_root(word):
    cubic = Ring(["Q"]).constrain("Q^2 + Q + 1")
    coords = tuple(4 + (i % 2) for i in word)
    e = Element.from_word(A, cubic, coords)
    d3 = differential(differential(differential(e, cubic("Q")), cubic("Q")), cubic("Q"))
    # every mixed term of d^3 carries a q-binomial [3 choose k]_Q = 0
    assert not d3


def test_d_raises_grade():
    e = Element.from_word(A, RQ, A.word("x1*dx2*x2"))
    assert differential(e, RQ("Q")).grades() == {2}


def test_cubic_branch_drops_second_order_relations():
    ring, Q = BRANCHES[CUBIC_ROOT].realize(RQ)
    assert q_integer(3, Q) == 0
    prefactored, reduced = derive_d2x_d2x_relations(c_matrix(1, ring, verify=False), Q)
    assert reduced is None
    assert all(not r for r in prefactored)


def test_generic_q_keeps_four_second_order_relations():
    prefactored, reduced = derive_d2x_d2x_relations(c_matrix(1, RQ, verify=False), RQ("Q"))
    assert len(reduced) == 4
    assert all(p == r.scale(q_integer(3, RQ("Q"))) for p, r in zip(prefactored, reduced))


def test_complex_closes_on_the_cubic_branch():
    report = check_complex(assemble_case(1, CUBIC_ROOT), max_len=4)
    assert report.passed, report.first_failure()


def test_dropping_dx_d2x_relations_breaks_descent():
    ring, Q = BRANCHES[CUBIC_ROOT].realize(RQ)
    spec = assemble(plane_matrix(ring), c_matrix(1, ring, verify=False), Q,
                    include=("B", "C", "x_d2x"))
    failure = check_complex(spec, max_len=2).first_failure()
    assert failure.name == "d(relations) in ideal"


def test_d_cubed_survives_off_the_cubic_branch():
    spec = assemble_case(1, INV_SQRT_R_PLUS)
    failure = check_complex(spec, max_len=4).first_failure()
    assert failure.name == "d^3 = 0 on coordinate words"
    assert failure.witness == "x1*x1"
    # d^3(x1 x1) = [3]_Q (1 + r) d2x1 dx1 with Q = 1/s
    R = spec.ring
    expected = Element.from_word(spec.alphabet, R, spec.alphabet.word("d2x1*dx1"),
                                 q_integer(3, spec.Q) * (1 + R("r")))
    assert failure.residue == spec.relations.normal_form(expected)


def test_exchange_relations_shape():
    rels = exchange_relations(plane_matrix(RQ), A, 0, 0, 0, 0)
    assert len(rels) == 4
    assert [str(r) for r in rels] == ["0", "q^-2 * x1*x2 - q^-1 * x2*x1", "-q^-1 * x1*x2 + x2*x1", "0"]


def test_omitting_x_d2x_relations_fails_on_an_exchange_relation():
    ring, Q = BRANCHES[CUBIC_ROOT].realize(RQ)
    C = c_matrix(1, ring, verify=False)
    spec = assemble(plane_matrix(ring), C, Q, include=("B", "C", "dx_d2x"))
    failure = check_complex(spec, max_len=2).first_failure()
    assert failure.name == "d(relations) in ideal"
    assert failure.witness == "-r * dx1*x1 + x1*dx1"
    # the residue is the omitted relation between x1 and d2x1
    missing = derive_x_d2x_relations(C, Q, spec.alphabet)[0]
    assert failure.residue == spec.relations.normal_form(missing)


def _homogeneous(alphabet, ring, rng):
    grade = rng.randint(0, 2)
    letters = list(range(len(alphabet)))
    while True:
        w = tuple(rng.choice(letters) for _ in range(rng.randint(1, 3)))
        if alphabet.grade(w) == grade:
            return Element.from_word(alphabet, ring, w, rng.randint(1, 3)), grade


@pytest.mark.parametrize("branch", [CUBIC_ROOT, INV_SQRT_R_PLUS])
@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_q_leibniz_holds_in_the_quotient(branch, seed):
    spec = assemble_case(1, branch)
    rs, Q = spec.relations, spec.Q
    rng = random.Random(seed)
    (a, ga), (b, _) = _homogeneous(spec.alphabet, spec.ring, rng), _homogeneous(spec.alphabet, spec.ring, rng)
    lhs = apply_d(rs.multiply(a, b), spec)
    rhs = rs.multiply(apply_d(a, spec), b) + rs.multiply(a, apply_d(b, spec)).scale(Q ** ga)
    # the rules are not confluent, so equality is tested in the quotient
    assert rs.is_zero(lhs - rhs)
