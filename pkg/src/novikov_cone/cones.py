"""Cones of linear forms, admissibility, and unimodular subdivision.

A family of forms ``xi_1, ..., xi_m`` on ``Z^k`` is stored as integer rows.
Its cone is ``{x : xi_i(x) <= 0 for all i}``.  The main construction,
:func:`regular_family`, refines a lattice simplex around a target ray until
the spanning vectors form a basis of ``Z^k`` (a unimodular cone).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import isqrt

from .arith import (Matrix, check_bits, det, inverse, primitive, sin2_between,
                    snf_int, solve)
from .errors import (FirstCoordinateNonpositive, NonUnimodularFamily,
                     RayIsLattice, RayOnWall, ShapeError)

IntVector = tuple[int, ...]


@dataclass(frozen=True)
class FormFamily:
    """Integer linear forms on ``Z^k``, one coefficient row per form."""

    forms: tuple[IntVector, ...]

    def __init__(self, forms):
        forms = tuple(tuple(int(c) for c in f) for f in forms)
        if not forms:
            raise ShapeError("a form family must be nonempty")
        if len({len(f) for f in forms}) != 1:
            raise ShapeError("forms of different lengths")
        object.__setattr__(self, "forms", forms)

    @property
    def k(self) -> int:
        return len(self.forms[0])

    def matrix(self) -> Matrix:
        return Matrix(self.forms)

    def evaluate(self, x) -> tuple:
        return tuple(sum(a * b for a, b in zip(f, x)) for f in self.forms)

    def negated(self) -> "FormFamily":
        return FormFamily([[-c for c in f] for f in self.forms])


@dataclass(frozen=True)
class SimplicialBasis:
    """``k`` integer vectors ``u_1..u_k`` of ``Z^k`` (the columns of a matrix)."""

    vectors: tuple[IntVector, ...]

    def __init__(self, vectors):
        vectors = tuple(tuple(int(c) for c in v) for v in vectors)
        k = len(vectors)
        if k == 0 or any(len(v) != k for v in vectors):
            raise ShapeError("a simplicial basis needs k vectors of length k")
        object.__setattr__(self, "vectors", vectors)
        if det(self.matrix()) == 0:
            raise ShapeError("basis vectors are linearly dependent")

    @property
    def k(self) -> int:
        return len(self.vectors)

    def matrix(self) -> Matrix:
        """Vectors as columns."""
        return Matrix.from_columns(self.vectors, self.k)

    def det(self) -> int:
        return det(self.matrix())

    def coordinates(self, x) -> tuple[Fraction, ...]:
        """Coefficients of ``x`` in this basis."""
        sol = solve(self.matrix(), Matrix([[Fraction(c)] for c in x]))
        return sol.col(0)

    def replace(self, j: int, q) -> "SimplicialBasis":
        vecs = list(self.vectors)
        vecs[j] = tuple(q)
        return SimplicialBasis(vecs)


@dataclass(frozen=True)
class TargetDirection:
    v: tuple[Fraction, ...]
    tol_sin2: Fraction

    def __init__(self, v, tol_sin2):
        v = tuple(Fraction(c) for c in v)
        tol = Fraction(tol_sin2)
        if not v or all(c == 0 for c in v):
            raise ShapeError("target direction must be nonzero")
        if v[0] <= 0:
            raise FirstCoordinateNonpositive("first coordinate of v must be > 0")
        if not 0 < tol < 1:
            raise ValueError("tol_sin2 must lie in (0, 1)")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "tol_sin2", tol)


@dataclass(frozen=True)
class TraceStep:
    basis: SimplicialBasis
    abs_det: int
    point: IntVector | None
    replaced: int | None


@dataclass
class SubdivisionTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def dets(self) -> list[int]:
        return [s.abs_det for s in self.steps]

    def is_strictly_decreasing(self) -> bool:
        d = self.dets()
        return all(a > b for a, b in zip(d, d[1:]))


# ---------------------------------------------------------------------------
# admissibility

def _fourier_motzkin(rows):
    """Eliminate variables from ``a.x <= b`` (rows are ``(a, b)``).

    Returns the list of intermediate systems; the last has no variables left.
    """
    stages = [rows]
    n = len(rows[0][0]) if rows else 0
    for var in range(n):
        pos, neg, rest = [], [], []
        for a, b in rows:
            (pos if a[var] > 0 else neg if a[var] < 0 else rest).append((a, b))
        new = list(rest)
        for ap, bp in pos:
            for an, bn in neg:
                cp, cn = ap[var], -an[var]
                a = tuple(cn * x + cp * y for x, y in zip(ap, an))
                new.append((a, cn * bp + cp * bn))
        # normalise and deduplicate
        seen = {}
        for a, b in new:
            scale = max((abs(x) for x in a), default=0) or 1
            key = (tuple(x / scale for x in a), b / scale)
            seen[key] = key
        rows = list(seen.values())
        stages.append(rows)
    return stages


def admissibility_witness(g: FormFamily) -> IntVector | None:
    """An integer ``x`` with ``xi_i(x) < 0`` for every form, or None."""
    rows = [(tuple(Fraction(c) for c in f), Fraction(-1)) for f in g.forms]
    stages = _fourier_motzkin(rows)
    if any(b < 0 for _, b in stages[-1]):
        return None
    # back-substitute, picking a point inside each interval
    k = g.k
    x = [Fraction(0)] * k
    for var in reversed(range(k)):
        lo, hi = None, None
        for a, b in stages[var]:
            c = a[var]
            if c == 0:
                continue
            rhs = (b - sum(a[j] * x[j] for j in range(var + 1, k))) / c
            if c > 0:
                hi = rhs if hi is None else min(hi, rhs)
            else:
                lo = rhs if lo is None else max(lo, rhs)
        if lo is not None and hi is not None:
            x[var] = (lo + hi) / 2
        elif lo is not None:
            x[var] = lo
        elif hi is not None:
            x[var] = hi
    w = primitive(x) if any(x) else tuple(0 for _ in x)
    assert all(val < 0 for val in g.evaluate(w))
    return w


def is_admissible(g: FormFamily) -> bool:
    """True iff the cone of ``g`` is solid (some ``x`` is negative on all forms)."""
    return admissibility_witness(g) is not None


def cone_contains(g: FormFamily, x) -> bool:
    return all(val <= 0 for val in g.evaluate(x))


# ---------------------------------------------------------------------------
# regular families

def xi_coordinates(g: FormFamily, xi) -> tuple[Fraction, ...]:
    """Coordinates of the form ``xi`` in the basis of forms ``g``."""
    m = g.matrix().T
    sol = solve(m, Matrix([[Fraction(c)] for c in xi]))
    if sol is None:
        raise NonUnimodularFamily("forms do not span")
    return sol.col(0)


def check_xi_regular(g: FormFamily, xi) -> bool:
    if len(g.forms) != g.k:
        raise ShapeError("a regular family has exactly k forms")
    if abs(det(g.matrix())) != 1:
        return False
    return all(c > 0 for c in xi_coordinates(g, xi))


def dual_basis(g: FormFamily) -> SimplicialBasis:
    """Vectors ``t_j`` with ``-xi_i(t_j) = delta_ij``."""
    m = g.matrix()
    if len(g.forms) != g.k or abs(det(m)) != 1:
        raise NonUnimodularFamily("dual basis needs a unimodular family")
    inv = inverse(m)
    return SimplicialBasis([tuple(int(-x) for x in c) for c in inv.columns()])


def forms_from_dual(basis: SimplicialBasis) -> FormFamily:
    """Inverse of :func:`dual_basis`."""
    if abs(basis.det()) != 1:
        raise NonUnimodularFamily("dual basis must be unimodular")
    inv = inverse(basis.matrix())
    return FormFamily([tuple(int(-x) for x in r) for r in inv.rows])


def lattice_points_in_semiopen(basis: SimplicialBasis):
    """All nonzero lattice points of the semi-open parallelotope, sorted.

    Yields ``(q, beta)`` with ``beta`` the coordinates of ``q`` in the basis,
    each in ``[0, 1)``.  Order: by sum of ``beta``, then by ``q``.  There are
    exactly ``|det| - 1`` of them, one per nonzero coset of the sublattice.
    """
    m = basis.matrix()
    d, u, _ = snf_int(m)
    # sublattice = U^-1 D Z^k, so U^-1 y for 0 <= y_i < d_i represent the cosets
    uinv = inverse(u)
    inv_b = inverse(m)
    diag = [d[i, i] for i in range(basis.k)]
    found = []
    for y in product(*(range(di) for di in diag)):
        if not any(y):
            continue
        x = uinv.apply(y)
        beta = tuple(c - (c.numerator // c.denominator) for c in inv_b.apply(x))
        q = tuple(int(c) for c in m.apply(beta))
        found.append((sum(beta), q, beta))
    found.sort()
    for _, q, beta in found:
        yield q, beta


def lattice_point_in_semiopen(basis: SimplicialBasis) -> IntVector | None:
    """A nonzero lattice point of the semi-open parallelotope, or None iff unimodular."""
    for q, _ in lattice_points_in_semiopen(basis):
        return q
    return None


def subdivision_children(basis: SimplicialBasis, q) -> list[tuple[int, SimplicialBasis]]:
    """The cones obtained by swapping ``q`` in for each basis vector it uses."""
    beta = basis.coordinates(q)
    support = [j for j, b in enumerate(beta) if b != 0]
    if len(support) == 1:
        return [(support[0], basis.replace(support[0], q))]
    return [(j, basis.replace(j, q)) for j in support]


def subdivide_step(basis: SimplicialBasis, q, v) -> tuple[int, SimplicialBasis]:
    """Replace one vector by ``q`` so the new cone still contains ``v`` strictly.

    Returns the replaced index and the new basis; raises RayOnWall when ``v``
    lies on a wall of every candidate.
    """
    beta = basis.coordinates(q)
    if any(not 0 <= b < 1 for b in beta) or not any(beta):
        raise ValueError("q must be a nonzero point of the semi-open parallelotope")
    for j, child in subdivision_children(basis, q):
        if all(c > 0 for c in child.coordinates(v)):
            return j, child
    raise RayOnWall(f"direction {tuple(map(str, v))} lies on a wall of every subcone")


def _min_height(k: int, tol: Fraction) -> int:
    # sin^2 of any frame vector is at most (k - 1) / N^2; need that < tol
    bound = Fraction(k - 1) / tol
    n = isqrt(bound.numerator // bound.denominator)
    while n * n <= bound:
        n += 1
    return max(n, 1)


def _kuhn_simplex(v, height: int):
    """Vertices of a Kuhn simplex on ``x_1 = height`` containing the ray of v.

    Returns None when the ray meets the hyperplane on a simplex wall.
    """
    k = len(v)
    p = [Fraction(height) * c / v[0] for c in v[1:]]
    base = [c.numerator // c.denominator for c in p]
    frac = [c - b for c, b in zip(p, base)]
    if any(f == 0 for f in frac) or len(set(frac)) < len(frac):
        return None
    order = sorted(range(k - 1), key=lambda i: -frac[i])
    vertex = list(base)
    verts = [(height, *vertex)]
    for i in order:
        vertex[i] += 1
        verts.append((height, *vertex))
    return verts


def initial_simplex(target: TargetDirection, max_tries: int = 256) -> SimplicialBasis:
    v, k = target.v, len(target.v)
    n0 = _min_height(k, target.tol_sin2)
    for height in range(n0, n0 + max_tries):
        verts = _kuhn_simplex(v, height)
        if verts is not None:
            return SimplicialBasis(verts)
    w = primitive(v)
    if w[0] <= n0 + max_tries:
        raise RayIsLattice(
            f"direction is the lattice ray of {w}; no frame within tolerance avoids it")
    raise RayOnWall("direction lies on a lattice hyperplane wall at every tried height")


def regular_family(target: TargetDirection) -> tuple[SimplicialBasis, SubdivisionTrace]:
    """Unimodular frame around a rational direction.

    The output ``u_1..u_k`` is a basis of ``Z^k`` with ``v`` a strictly positive
    combination of it, every ``u_i`` within the angular tolerance of ``v``, and
    positive first coordinates.
    """
    v, k = target.v, len(target.v)
    trace = SubdivisionTrace()
    if k == 1:
        basis = SimplicialBasis([(1,)])
        trace.steps.append(TraceStep(basis, 1, None, None))
        return basis, trace
    basis = initial_simplex(target)
    trace.steps.append(TraceStep(basis, abs(basis.det()), None, None))
    w = primitive(v)
    while abs(basis.det()) > 1:
        chosen = None
        collinear = False
        for q, _ in lattice_points_in_semiopen(basis):
            if primitive(q) == w:
                collinear = True
                continue
            try:
                chosen = (q, *subdivide_step(basis, q, v))
                break
            except RayOnWall:
                continue
        if chosen is None:
            if collinear:
                raise RayIsLattice(f"direction is the lattice ray of {w}")
            raise RayOnWall("direction lies on a wall of every refinement")
        q, j, basis = chosen
        check_bits(*q)
        trace.steps.append(TraceStep(basis, abs(basis.det()), q, j))
    _verify_frame(basis, target)
    return basis, trace


def _verify_frame(basis: SimplicialBasis, target: TargetDirection) -> None:
    checks = frame_checks(basis, target)
    failed = [name for name, ok in checks.items() if not ok]
    assert not failed, f"frame postconditions failed: {failed}"


def frame_checks(basis: SimplicialBasis, target: TargetDirection) -> dict[str, bool]:
    """The four defining properties of a regular frame, evaluated exactly."""
    alpha = basis.coordinates(target.v)
    return {
        "unimodular": abs(basis.det()) == 1,
        "positive_expansion": all(a > 0 for a in alpha),
        "within_tolerance": all(sin2_between(target.v, u) < target.tol_sin2
                                for u in basis.vectors),
        "positive_first_coordinates": all(u[0] > 0 for u in basis.vectors),
    }


def perturb(v, scale: Fraction = Fraction(1, 10**15)) -> tuple[Fraction, ...]:
    """Deterministic jitter: add ``scale * p_i / (1 + p_i)`` to coordinate ``i >= 1``.

    ``p_i`` is the i-th prime; the offsets are pairwise distinct, which breaks
    the coincidences that put a rational ray on a lattice wall.
    """
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53]
    out = [Fraction(v[0])]
    for i, c in enumerate(v[1:]):
        p = primes[i % len(primes)] + len(primes) * (i // len(primes))
        out.append(Fraction(c) + scale * Fraction(p, p + 1))
    return tuple(out)


def unimodular_subcones_cover(basis: SimplicialBasis, q, max_den: int = 10) -> bool:
    """Check that the children of a subdivision cover the parent cone.

    Tests every ray ``sum c_i u_i`` with ``c_i = a_i / max_den``, ``a_i`` in
    ``0..max_den`` (not all zero).
    """
    children = [c for _, c in subdivision_children(basis, q)]
    k = basis.k
    m = basis.matrix()
    for coeffs in product(range(max_den + 1), repeat=k):
        if not any(coeffs):
            continue
        x = m.apply([Fraction(a, max_den) for a in coeffs])
        if not any(all(c >= 0 for c in child.coordinates(x)) for child in children):
            return False
    return True
