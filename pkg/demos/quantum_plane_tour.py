"""
Walk through the quantum plane x y = q y x from R-matrix to covariance.

Run with ``python demos/quantum_plane_tour.py``.  Everything printed is
computed exactly; nothing is looked up.
"""

from qderham.plane2d import (
    BRANCHES,
    CUBIC_ROOT,
    IMAGINARY_UNIT,
    INV_SQRT_R_PLUS,
    BranchRefused,
    CoactionSpec,
    c_matrix,
    case_ring,
    check_covariance,
    coordinate_plane,
    plane_matrix,
    second_order_plane,
    solve_q_branches,
    standard_rhat,
)
from qderham.tensorcheck import check_braid, check_braid_compat, check_hecke, check_linear_condition

ring = case_ring()
R = standard_rhat(ring)
print("R-matrix:")
print(R)
print("braid relation:", check_braid(R))
print("Hecke with mu = q, lambda = 1/q:", check_hecke(R, ring("q"), ring("q^-1")))
print()

B = plane_matrix(ring)
print("coordinate plane:", coordinate_plane(ring, ["x", "y"]).render())

for family in (1, 2):
    C = c_matrix(family, ring)
    print(f"\nfamily {family}")
    print("  linear condition:", check_linear_condition(B, C))
    print("  braid compatibility:", check_braid_compat(B, C))
    analysis = solve_q_branches(C)
    for line in analysis.evidence():
        print("  " + line)
    for branch in analysis.branches:
        try:
            plane = second_order_plane(C, branch, ["x", "y"])
        except BranchRefused as exc:
            print(f"  {branch.label}: no relations ({exc})")
            continue
        print(f"  {branch.label}: {plane.render()}")

# covariance of the second-order planes
for family, kind in ((1, "rq_family1"), (2, "rq_family2")):
    plane = second_order_plane(c_matrix(family, ring), IMAGINARY_UNIT)
    good = check_covariance(plane, CoactionSpec.glq2(kind, ring))
    raw = check_covariance(plane, CoactionSpec.glq2(kind, ring, corrected=False))
    print(f"\nQ = i plane of family {family}: covariant under {good.label}: {good.passed}")
    print(f"  under {raw.label}: {raw.passed}")
    for text, residue in raw.residues[:1]:
        print(f"  residue of {text}: {residue}")

plane = second_order_plane(c_matrix(1, ring), INV_SQRT_R_PLUS)
print("\nQ = 1/s plane under GL_q(2):", check_covariance(plane, CoactionSpec.glq2("standard_q", ring)).passed)
print("cubic branch constraint:", BRANCHES[CUBIC_ROOT].constraint)
