import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from qderham.plane2d import c_matrix, case_ring, plane_matrix, standard_rhat
from qderham.symring import Ring
from qderham.tensorcheck import (
    DimensionError,
    PreconditionError,
    StructureMatrix,
    braid_compat_residual,
    build_F_from_B,
    build_from_hecke,
    check_braid,
    check_braid_compat,
    check_F_consistency,
    check_hecke,
    check_linear_condition,
    lift,
)

from oracles import evaluate

QR = case_ring()


def numeric(M, values):
    return np.array([[evaluate(c, values) for c in row] for row in M.rows], dtype=object)


def perturbed(M, row, col, delta="1"):
    rows = [list(r) for r in M.rows]
    rows[row][col] = rows[row][col] + M.ring(delta)
    return StructureMatrix(M.ring, M.n, rows)


values = st.fixed_dictionaries({
    "q": st.sampled_from([sp.Rational(2), sp.Rational(-3), sp.Rational(1, 3), sp.Rational(5, 2)]),
    "r": st.sampled_from([sp.Rational(3), sp.Rational(-2), sp.Rational(2, 7)]),
})


@settings(max_examples=10, deadline=None)
@given(values)
def test_lift_matches_kronecker_products(vals):
    C = c_matrix(1, QR, verify=False)
    I = np.eye(2, dtype=object)
    c = numeric(C, vals)
    assert (numeric(lift(C, 12), vals) == np.kron(c, I)).all()
    assert (numeric(lift(C, 23), vals) == np.kron(I, c)).all()


@settings(max_examples=10, deadline=None)
@given(values)
def test_braid_compat_residual_matches_numeric_products(vals):
    B, C = plane_matrix(QR), c_matrix(2, QR, verify=False)
    I = np.eye(2, dtype=object)
    b, c = numeric(B, vals), numeric(C, vals)
    B12, B23, C12, C23 = np.kron(b, I), np.kron(I, b), np.kron(c, I), np.kron(I, c)
    expected = B12.dot(C23).dot(C12) - C23.dot(C12).dot(B23)
    expected = np.vectorize(sp.simplify)(expected)
    assert (numeric(braid_compat_residual(B, C), vals) == expected).all()


def test_lift_rejects_other_slots():
    with pytest.raises(ValueError):
        lift(plane_matrix(QR), 13)


@pytest.mark.parametrize("family", [1, 2])
def test_both_calculi_are_consistent_with_the_plane(family):
    B, C = plane_matrix(QR), c_matrix(family, QR, verify=False)
    assert check_linear_condition(B, C)
    assert check_braid_compat(B, C)


@pytest.mark.parametrize("family, r", [(1, "q^2"), (2, "q^-2")])
def test_operator_identity_holds_only_at_special_r(family, r):
    B, C = plane_matrix(QR), c_matrix(family, QR, verify=False)
    assert not check_braid_compat(B, C, exact=True)
    q = Ring(["q"])
    for value in (r, "1"):
        Cq = C.substitute({"q": q("q"), "r": q(value)})
        Bq = B.substitute({"q": q("q"), "r": q(value)})
        assert check_braid_compat(Bq, Cq, exact=True)


@pytest.mark.parametrize("family", [1, 2])
@pytest.mark.parametrize("row, col", [(1, 2), (2, 1), (1, 1), (2, 2)])
def test_perturbed_entry_breaks_the_linear_condition(family, row, col):
    B, C = plane_matrix(QR), c_matrix(family, QR, verify=False)
    assert not check_linear_condition(B, perturbed(C, row, col))


def test_diagonal_entries_are_free_for_the_linear_condition():
    # row 11 of E - B vanishes, so C^{11}_{11} is not constrained by it
    B, C = plane_matrix(QR), c_matrix(1, QR, verify=False)
    assert check_linear_condition(B, perturbed(C, 0, 0))


def test_perturbed_entry_breaks_braid_compatibility():
    B, C = plane_matrix(QR), c_matrix(1, QR, verify=False)
    assert not check_braid_compat(B, perturbed(C, 0, 1))
    assert not check_braid_compat(B, perturbed(C, 2, 1))
    # C^{11}_{11} is the free parameter r, so changing it keeps compatibility
    assert check_braid_compat(B, perturbed(C, 0, 0))


def test_r_matrix_braid_and_hecke():
    R = standard_rhat(QR)
    assert check_braid(R)
    assert check_hecke(R, QR("q"), QR("q^-1"))
    assert not check_hecke(R, QR("q"), QR("q"))
    assert not check_braid(perturbed(R, 1, 1))


def test_hecke_construction_reproduces_plane_and_first_family():
    q = Ring(["q"])
    R = standard_rhat(q)
    triple = build_from_hecke(R, "q", "q^-1", "q")
    assert triple.B == plane_matrix(q)
    C1 = c_matrix(1, QR, verify=False).substitute({"q": q("q"), "r": q("q^2")})
    assert triple.C == C1
    assert triple.checks["linear"] and triple.checks["braid_compat"] and triple.checks["bff"]


def test_hecke_construction_on_cubic_root_asserts_factored_condition():
    ring = Ring(["q", "Q"]).constrain("Q^2 + Q + 1")
    triple = build_from_hecke(standard_rhat(ring), "q", "q^-1", "Q")
    assert triple.checks["F_factored"]
    report = check_F_consistency(triple.C, triple.F, ring("Q"))
    assert report.factored and report.full and report.cubic_identity


def test_hecke_construction_collects_all_precondition_failures():
    R = perturbed(standard_rhat(QR), 1, 1)
    with pytest.raises(PreconditionError) as info:
        build_from_hecke(R, "q", "q", "q")
    assert len(info.value.failures) == 2
    with pytest.raises(PreconditionError):
        build_from_hecke(standard_rhat(QR), "q + 1", "q^-1", "q")


def test_build_F_from_B_checks_commutation():
    B = plane_matrix(QR)
    F = build_F_from_B(B, B.scale("q^2"), "q")
    assert F == B.scale(QR("q^2"))
    with pytest.raises(PreconditionError) as info:
        build_F_from_B(B, c_matrix(1, QR, verify=False), "q")
    assert "[B, C] != 0" in info.value.failures[0]


def test_cubic_identity_for_symbolic_matrices():
    names = [f"c{i}" for i in range(16)] + [f"f{i}" for i in range(16)]
    ring = Ring(names + ["Q"]).constrain("Q^2 + Q + 1")
    C = StructureMatrix(ring, 2, [[ring(f"c{4 * i + j}") for j in range(4)] for i in range(4)])
    F = StructureMatrix(ring, 2, [[ring(f"f{4 * i + j}") for j in range(4)] for i in range(4)])
    report = check_F_consistency(C, F, ring("Q"))
    assert report.cubic_identity is True
    plain = Ring(names + ["Q"])
    generic = check_F_consistency(
        StructureMatrix(plain, 2, [[plain(f"c{4 * i + j}") for j in range(4)] for i in range(4)]),
        StructureMatrix(plain, 2, [[plain(f"f{4 * i + j}") for j in range(4)] for i in range(4)]),
        plain("Q"),
    )
    assert generic.cubic_identity is None


def test_dimension_mismatch_is_reported():
    with pytest.raises(DimensionError):
        check_linear_condition(plane_matrix(QR), StructureMatrix.identity(QR, 3))
    with pytest.raises(DimensionError):
        StructureMatrix(QR, 2, [[1, 0], [0, 1]])
