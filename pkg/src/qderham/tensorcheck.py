"""Structure matrices and the matrix identities that make a calculus consistent.

A :class:`StructureMatrix` ``M`` of dimension ``n`` is an ``n^2 x n^2`` array
indexed by generator pairs, row ``(i, j)`` and column ``(k, l)`` flattened as
``(i-1)*n + j`` (so the basis order is ``11, 12, ..., nn``).  It encodes the
exchange rule ``a^i b^j = M^{ij}_{kl} b^k a^l``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .freealg import _Echelon
from .symring import Coefficient, ConfigurationError, Ring


class DimensionError(ValueError):
    pass


class PreconditionError(ValueError):
    """A constructor's preconditions failed; ``failures`` lists all of them."""

    def __init__(self, failures):
        super().__init__("; ".join(failures))
        self.failures = list(failures)


class _SquareMatrix:
    __slots__ = ("ring", "size", "rows")

    def __init__(self, ring: Ring, rows):
        self.ring = ring
        self.rows = tuple(tuple(ring(c) for c in row) for row in rows)
        self.size = len(self.rows)
        if any(len(r) != self.size for r in self.rows):
            raise DimensionError("matrix is not square")

    def _like(self, rows):
        raise NotImplementedError

    def _check(self, other):
        if type(other) is not type(self) or other.size != self.size:
            raise DimensionError(f"dimension mismatch: {self.size} vs {getattr(other, 'size', None)}")
        if other.ring != self.ring:
            raise ConfigurationError("matrices over different rings")

    def __getitem__(self, idx):
        a, b = idx
        return self.rows[a][b]

    def __add__(self, other):
        self._check(other)
        return self._like([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check(other)
        return self._like([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return self._like([[-a for a in r] for r in self.rows])

    def scale(self, c):
        c = self.ring(c)
        return self._like([[c * a for a in r] for r in self.rows])

    def __matmul__(self, other):
        self._check(other)
        n = self.size
        zero = self.ring.zero
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append([sum((a * cols[j][k] for k, a in nz if cols[j][k]), zero) for j in range(n)])
        return self._like(out)

    def __eq__(self, other):
        return type(other) is type(self) and self.ring == other.ring and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def nonzero_entries(self):
        return [(i, j, c) for i, r in enumerate(self.rows) for j, c in enumerate(r) if c]

    def map(self, fn, ring=None):
        out = type(self).__new__(type(self))
        _SquareMatrix.__init__(out, ring or self.ring, [[fn(c) for c in r] for r in self.rows])
        for name in getattr(type(self), "__extra__", ()):
            setattr(out, name, getattr(self, name))
        return out


class StructureMatrix(_SquareMatrix):
    """``n^2 x n^2`` coefficient matrix on ``V (x) V``."""

    __slots__ = ("n",)
    __extra__ = ("n",)

    def __init__(self, ring: Ring, n: int, rows):
        super().__init__(ring, rows)
        if self.size != n * n:
            raise DimensionError(f"expected {n * n}x{n * n} entries, got {self.size}")
        self.n = n

    def _like(self, rows):
        return StructureMatrix(self.ring, self.n, rows)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "StructureMatrix":
        N = n * n
        return cls(ring, n, [[ring.one if i == j else ring.zero for j in range(N)] for i in range(N)])

    @classmethod
    def zero(cls, ring: Ring, n: int) -> "StructureMatrix":
        return cls(ring, n, [[ring.zero] * (n * n) for _ in range(n * n)])

    @classmethod
    def parse(cls, ring: Ring, n: int, rows) -> "StructureMatrix":
        return cls(ring, n, [[ring(str(c)) for c in row] for row in rows])

    def entry(self, i, j, k, l) -> Coefficient:
        """``M^{ij}_{kl}`` with 1-based generator indices."""
        n = self.n
        return self.rows[(i - 1) * n + (j - 1)][(k - 1) * n + (l - 1)]

    def coerce(self, ring: Ring) -> "StructureMatrix":
        return StructureMatrix(ring, self.n, [[ring.coerce(c) for c in r] for r in self.rows])

    def substitute(self, mapping) -> "StructureMatrix":
        ring = next(iter(mapping.values())).ring
        return StructureMatrix(ring, self.n, [[c.substitute(mapping) for c in r] for r in self.rows])

    def __str__(self):
        return "\n".join("[" + ", ".join(str(c) for c in r) + "]" for r in self.rows)


class TensorOperator(_SquareMatrix):
    """Operator on ``V^(x)slot_count``, basis ordered lexicographically by index tuple."""

    __slots__ = ("n", "slot_count")
    __extra__ = ("n", "slot_count")

    def __init__(self, ring: Ring, n: int, slot_count: int, rows):
        super().__init__(ring, rows)
        if self.size != n ** slot_count:
            raise DimensionError("tensor operator has the wrong size")
        self.n = n
        self.slot_count = slot_count

    def _like(self, rows):
        return TensorOperator(self.ring, self.n, self.slot_count, rows)

    def entry(self, row: tuple, col: tuple) -> Coefficient:
        """Entry at 1-based index tuples, e.g. ``((1, 1, 1), (1, 1, 1))``."""
        return self.rows[_flat(row, self.n)][_flat(col, self.n)]


def _flat(idx, n):
    out = 0
    for i in idx:
        out = out * n + (i - 1)
    return out


def lift(M: StructureMatrix, slots) -> TensorOperator:
    """Place ``M`` on tensor slots 12 or 23 of ``V (x) V (x) V``."""
    slots = str(slots)
    if slots not in ("12", "23"):
        raise ValueError("slots must be 12 or 23")
    n, ring = M.n, M.ring
    N = n ** 3
    rows = [[ring.zero] * N for _ in range(N)]
    triples = list(itertools.product(range(n), repeat=3))
    for r, (i, j, k) in enumerate(triples):
        for c, (a, b, e) in enumerate(triples):
            if slots == "12":
                if k == e:
                    rows[r][c] = M.rows[i * n + j][a * n + b]
            elif i == a:
                rows[r][c] = M.rows[j * n + k][b * n + e]
    return TensorOperator(ring, n, 3, rows)


def _same_shape(*ms):
    n = ms[0].n
    for m in ms[1:]:
        if m.n != n:
            raise DimensionError(f"dimension mismatch: n={n} vs n={m.n}")
        if m.ring != ms[0].ring:
            raise ConfigurationError("structure matrices over different rings")


def linear_condition_residual(B: StructureMatrix, C: StructureMatrix) -> StructureMatrix:
    _same_shape(B, C)
    E = StructureMatrix.identity(B.ring, B.n)
    return (E - B) @ (E + C)


def check_linear_condition(B: StructureMatrix, C: StructureMatrix) -> bool:
    """``(E - B)(E + C) = 0``."""
    return linear_condition_residual(B, C).is_zero()


def _braid_sides(B, C):
    B12, B23 = lift(B, 12), lift(B, 23)
    C12, C23 = lift(C, 12), lift(C, 23)
    return B12 @ C23 @ C12, C23 @ C12 @ B23


def braid_compat_residual(B: StructureMatrix, C: StructureMatrix) -> TensorOperator:
    """``B12 C23 C12 - C23 C12 B23`` as an operator on ``V (x) V (x) V``."""
    _same_shape(B, C)
    lhs, rhs = _braid_sides(B, C)
    return lhs - rhs


def _in_row_space(basis: _SquareMatrix, residual: _SquareMatrix) -> bool:
    ech = _Echelon(key=lambda j: j)
    for row in basis.rows:
        ech.insert({j: c for j, c in enumerate(row) if c})
    return all(not ech.reduce({j: c for j, c in enumerate(row) if c}) for row in residual.rows)


def check_braid_compat(B: StructureMatrix, C: StructureMatrix, exact: bool = False) -> bool:
    """``B12 C23 C12 = C23 C12 B23``.

    By default the identity is required on the quadratic algebra defined by
    ``B``: every row of the difference must lie in the row span of
    ``(E - B)23``, the relations among the two trailing ``B``-generators.
    This is exactly what the overlap ``a a b`` of the rewrite system needs.
    ``exact=True`` demands the operator identity itself, which is stronger:
    the two-parameter calculi on the q-plane satisfy it only at ``r = 1``
    and at ``r = q^2`` (first family) or ``r = q^-2`` (second family).
    """
    residual = braid_compat_residual(B, C)
    if residual.is_zero():
        return True
    if exact:
        return False
    E = StructureMatrix.identity(B.ring, B.n)
    return _in_row_space(lift(E - B, 23), residual)


def check_bff(B: StructureMatrix, F: StructureMatrix, exact: bool = False) -> bool:
    """``B12 F23 F12 = F23 F12 B23``, read like :func:`check_braid_compat`."""
    return check_braid_compat(B, F, exact=exact)


def check_braid(R: StructureMatrix) -> bool:
    """``R12 R23 R12 = R23 R12 R23``."""
    R12, R23 = lift(R, 12), lift(R, 23)
    return (R12 @ R23 @ R12 - R23 @ R12 @ R23).is_zero()


def hecke_residual(R: StructureMatrix, mu, lam) -> StructureMatrix:
    E = StructureMatrix.identity(R.ring, R.n)
    return (R - E.scale(mu)) @ (R + E.scale(lam))


def check_hecke(R: StructureMatrix, mu, lam) -> bool:
    """``(R - mu E)(R + lambda E) = 0``."""
    return hecke_residual(R, mu, lam).is_zero()


def F_consistency_full(C: StructureMatrix, F: StructureMatrix, Q: Coefficient) -> StructureMatrix:
    """``E - (Q^2+Q) C + ((Q^2+Q) E - Q^3 C) Q F``."""
    _same_shape(C, F)
    E = StructureMatrix.identity(C.ring, C.n)
    a = Q * Q + Q
    return E - C.scale(a) + (E.scale(a) - C.scale(Q ** 3)) @ F.scale(Q)


def F_consistency_factored(C: StructureMatrix, F: StructureMatrix, Q: Coefficient) -> StructureMatrix:
    """``(E + C)(E - Q F)``."""
    _same_shape(C, F)
    E = StructureMatrix.identity(C.ring, C.n)
    return (E + C) @ (E - F.scale(Q))


def is_cubic_root(Q: Coefficient) -> bool:
    """Whether the ring forces ``Q^2 + Q + 1 = 0``."""
    return not (Q * Q + Q + 1)


@dataclass
class FConsistency:
    full: bool
    factored: bool
    cubic_identity: bool | None = None  # None: Q not constrained to a cube root


def check_F_consistency(C: StructureMatrix, F: StructureMatrix, Q: Coefficient) -> FConsistency:
    """Check the second-order compatibility of ``C`` and ``F``, in full and factored form.

    When ``Q^2 + Q + 1 = 0`` holds in the ring, also confirm that the two
    matrix expressions coincide there.
    """
    full = F_consistency_full(C, F, Q)
    factored = F_consistency_factored(C, F, Q)
    identity = (full - factored).is_zero() if is_cubic_root(Q) else None
    return FConsistency(full.is_zero(), factored.is_zero(), identity)


@dataclass
class HeckeTriple:
    B: StructureMatrix
    C: StructureMatrix
    F: StructureMatrix
    checks: dict = field(default_factory=dict)


def build_from_hecke(R: StructureMatrix, mu, lam, Q) -> HeckeTriple:
    """``B = R/mu``, ``C = R/lambda``, ``F = Q^2 R/mu`` from a Hecke R-matrix.

    The factored F-condition only holds when ``Q^3 = 1``; it is recorded in
    ``checks`` and asserted only when the ring makes ``Q`` a cube root.
    """
    ring = R.ring
    mu, lam, Q = ring(mu), ring(lam), ring(Q)
    failures = []
    for name, c in (("mu", mu), ("lambda", lam)):
        if not c.is_unit_monomial():
            failures.append(f"{name} = {c} is not a unit monomial")
    if failures:
        raise PreconditionError(failures)
    if not check_braid(R):
        failures.append("R does not satisfy the braid relation")
    if not check_hecke(R, mu, lam):
        failures.append(f"(R - ({mu})E)(R + ({lam})E) != 0")
    if failures:
        raise PreconditionError(failures)
    B = R.scale(mu.inverse())
    C = R.scale(lam.inverse())
    F = R.scale(Q * Q * mu.inverse())
    checks = {
        "linear": check_linear_condition(B, C),
        "braid_compat": check_braid_compat(B, C),
        "bff": check_bff(B, F),
        "F_factored": F_consistency_factored(C, F, Q).is_zero(),
    }
    required = ["linear", "braid_compat", "bff"] + (["F_factored"] if is_cubic_root(Q) else [])
    broken = [k for k in required if not checks[k]]
    if broken:
        raise AssertionError(f"Hecke construction failed its own checks: {broken}")
    return HeckeTriple(B, C, F, checks)


def build_F_from_B(B: StructureMatrix, C: StructureMatrix, Q) -> StructureMatrix:
    """``F = Q^2 B``, valid when ``B`` commutes with ``C`` and ``(B, Q^2 B)`` is braid-compatible."""
    _same_shape(B, C)
    Q = B.ring(Q)
    F = B.scale(Q * Q)
    failures = []
    comm = B @ C - C @ B
    if not comm.is_zero():
        i, j, c = comm.nonzero_entries()[0]
        failures.append(f"[B, C] != 0 (entry ({i}, {j}) = {c})")
    if not check_bff(B, F):
        failures.append("B12 F23 F12 != F23 F12 B23 for F = Q^2 B")
    if failures:
        raise PreconditionError(failures)
    return F
