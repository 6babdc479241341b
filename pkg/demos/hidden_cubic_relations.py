"""
Show where the assembled calculus on the q-plane stops being quadratic.

Three observations, all exact:

1. d^3(x x) does not vanish on the Q = 1/s branch.  It equals
   [3]_Q (1 + r) d2x dx, so only a cube root of unity kills it.
2. On every branch the overlaps x dx d2x leave relations among three
   first differentials that no quadratic rule produces.
3. Because of 2, different rewrite orders reach different irreducible
   words, although they agree in the quotient.
"""

import random

from qderham.cli import parse_element
from qderham.diffcalc import check_complex
from qderham.plane2d import CUBIC_ROOT, INV_SQRT_R_PLUS, assemble_case
from qderham.symring import q_integer

spec = assemble_case(1, INV_SQRT_R_PLUS)
rs = spec.relations
print("rules on the Q = 1/s branch:")
for line in rs.render():
    print("  " + line)

report = check_complex(spec)
for check in report.checks:
    status = "ok" if check.passed else f"fails at {check.witness}: {check.residue}"
    print(f"{check.name}: {status}")
print("[3]_Q (1 + r) =", q_integer(3, spec.Q) * (1 + spec.ring("r")))

print("\nunresolved overlaps:")
for pair in rs.critical_pairs():
    if not pair.resolved:
        print(f"  {rs.alphabet.render(pair.word)}: {pair.left - pair.right} = 0")

cubic = assemble_case(1, CUBIC_ROOT)
print("\ncubic branch, d^3 battery passes:", check_complex(cubic).passed)
bad = [p for p in cubic.relations.critical_pairs() if not p.resolved]
print("cubic branch, unresolved overlaps:", len(bad))
for pair in bad[:2]:
    print(f"  {cubic.alphabet.render(pair.word)}: {pair.left - pair.right} = 0")

e = parse_element("x1*d2x2*dx2*d2x1", rs.alphabet, spec.ring)
forms = {str(rs.normal_form(e, rng=random.Random(seed))) for seed in range(20)}
print(f"\n{e} has {len(forms)} irreducible forms under random rewrite orders")
