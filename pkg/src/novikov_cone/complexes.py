"""Finite free chain complexes over Q, Q[t] and Q[t]/(t^n).

A complex stores ranks ``r_0..r_d`` and boundary matrices ``d_r`` of shape
``r_{r-1} x r_r`` (columns are images of basis elements).  All linear algebra
goes through two ring primitives, ``solve`` and ``kernel``, so the lifting
constructions below are written once for every base ring.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import arith
from .arith import Matrix, Poly, TPoly
from .errors import (H0NotEpimorphic, InvalidComplex, NoSolution,
                     PreconditionFailed, ShapeError)


# ---------------------------------------------------------------------------
# base rings

class RationalField:
    tag = "Q"

    def coerce(self, x):
        if isinstance(x, Poly):
            if x.degree > 0:
                raise ValueError(f"{x} is not a constant")
            return x[0]
        return arith.as_fraction(x)

    def solve(self, a: Matrix, b: Matrix) -> Matrix | None:
        return arith.solve(a, b)

    def kernel(self, a: Matrix) -> Matrix:
        return Matrix.from_columns(arith.nullspace(a), a.ncols)

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(self.tag)

    def __repr__(self):
        return self.tag


class PolynomialRing(RationalField):
    tag = "Q[t]"

    def coerce(self, x):
        if isinstance(x, Poly):
            return Poly(x.coeffs)
        if isinstance(x, (list, tuple)):
            return Poly([arith.as_fraction(c) for c in x])
        return Poly(arith.as_fraction(x))

    def solve(self, a, b):
        return arith.solve_poly(a, b)

    def kernel(self, a):
        return arith.kernel_poly(a)


class TruncatedPolynomialRing(RationalField):
    """``Q[t]/(t^n)``, handled through its n-dimensional Q-structure."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.tag = f"Q[t]/t^{n}"

    def __eq__(self, other):
        return isinstance(other, TruncatedPolynomialRing) and other.n == self.n

    def __hash__(self):
        return hash(self.tag)

    def coerce(self, x):
        if isinstance(x, Poly):
            return TPoly(x.coeffs, self.n)
        if isinstance(x, (list, tuple)):
            return TPoly([arith.as_fraction(c) for c in x], self.n)
        return TPoly((arith.as_fraction(x),), self.n)

    def expand(self, a: Matrix) -> Matrix:
        """Q-matrix of ``a`` acting on coefficient vectors (t-degree minor)."""
        n = self.n
        rows = []
        for i in range(a.nrows):
            for deg in range(n):
                row = []
                for j in range(a.ncols):
                    x = self.coerce(a[i, j])
                    row.extend(x[deg - l] if deg >= l else Fraction(0) for l in range(n))
                rows.append(row)
        return Matrix(rows, a.ncols * n)

    def flatten(self, b: Matrix) -> Matrix:
        """Columns of ``b`` as coefficient vectors."""
        n = self.n
        cols = []
        for col in b.columns():
            cols.append([self.coerce(x)[d] for x in col for d in range(n)])
        return Matrix.from_columns(cols, b.nrows * n)

    def compress(self, m: Matrix) -> Matrix:
        n = self.n
        cols = []
        for col in m.columns():
            cols.append([TPoly(col[i * n:(i + 1) * n], n) for i in range(m.nrows // n)])
        return Matrix.from_columns(cols, m.nrows // n)

    def solve(self, a, b):
        x = arith.solve(self.expand(a), self.flatten(b))
        return None if x is None else self.compress(x)

    def kernel(self, a):
        basis = arith.nullspace(self.expand(a))
        return self.compress(Matrix.from_columns(basis, a.ncols * self.n))


_TRUNC = re.compile(r"^Q\[t\]/\(?t\^(\d+)\)?$")


def ring_from_tag(tag: str):
    tag = tag.replace(" ", "")
    if tag == "Q":
        return RationalField()
    if tag == "Q[t]":
        return PolynomialRing()
    m = _TRUNC.match(tag)
    if m:
        return TruncatedPolynomialRing(int(m.group(1)))
    raise ValueError(f"unknown base ring {tag!r}")


Q = RationalField()
QT = PolynomialRing()


# ---------------------------------------------------------------------------
# complexes and maps

class FreeComplex:
    """``0 <- C_0 <- C_1 <- ... <- C_d <- 0`` with free modules of given ranks."""

    def __init__(self, ring, ranks, boundaries=None, check: bool = True):
        self.ring = ring
        self.ranks = tuple(int(r) for r in ranks)
        boundaries = list(boundaries or [])
        if len(boundaries) > max(len(self.ranks) - 1, 0):
            raise ShapeError("more boundary matrices than degrees")
        mats = []
        for r in range(1, len(self.ranks)):
            shape = (self.ranks[r - 1], self.ranks[r])
            if r - 1 < len(boundaries) and boundaries[r - 1] is not None:
                m = boundaries[r - 1]
                m = m if isinstance(m, Matrix) else Matrix(m, shape[1])
                if m.shape != shape:
                    raise ShapeError(f"boundary d_{r} has shape {m.shape}, expected {shape}")
                mats.append(m.map(ring.coerce))
            else:
                mats.append(Matrix.zeros(*shape).map(ring.coerce))
        self._bd = mats
        if check and not validate(self):
            raise InvalidComplex("boundary composition d o d is not zero")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, r: int) -> int:
        return self.ranks[r] if 0 <= r < len(self.ranks) else 0

    def boundary(self, r: int) -> Matrix:
        """``d_r : C_r -> C_{r-1}`` (a zero matrix outside the stored range)."""
        if 1 <= r <= self.top:
            return self._bd[r - 1]
        return Matrix.zeros(self.rank(r - 1), self.rank(r)).map(self.ring.coerce)

    def padded(self, top: int) -> "FreeComplex":
        if top <= self.top:
            return self
        ranks = list(self.ranks) + [0] * (top - self.top)
        return FreeComplex(self.ring, ranks, self._bd, check=False)

    def __eq__(self, other):
        return (isinstance(other, FreeComplex) and self.ring == other.ring
                and self.ranks == other.ranks and self._bd == other._bd)

    def __repr__(self):
        return f"FreeComplex({self.ring!r}, ranks={self.ranks})"


def validate(c: FreeComplex) -> bool:
    """``d_{r-1} d_r = 0`` in every degree."""
    return all((c.boundary(r - 1) @ c.boundary(r)).is_zero() for r in range(2, c.top + 1))


def direct_sum(*cs: FreeComplex) -> FreeComplex:
    ring = cs[0].ring
    top = max(c.top for c in cs)
    ranks = [sum(c.rank(r) for c in cs) for r in range(top + 1)]
    bds = [Matrix.block_diag(*(c.boundary(r) for c in cs)) for r in range(1, top + 1)]
    return FreeComplex(ring, ranks, bds, check=False)


def evaluate_at_zero(c: FreeComplex) -> FreeComplex:
    """The complex ``C / tC`` over Q (polynomial entries evaluated at 0)."""
    bds = [c.boundary(r).map(lambda x: x(0) if isinstance(x, Poly) else x)
           for r in range(1, c.top + 1)]
    return FreeComplex(Q, c.ranks, bds)


class ChainMap:
    """Degreewise matrices ``f_r : A_r -> B_r``."""

    def __init__(self, source: FreeComplex, target: FreeComplex, maps=None, check: bool = True):
        self.source, self.target = source, target
        ring = source.ring
        top = max(source.top, target.top)
        maps = list(maps or [])
        mats = []
        for r in range(top + 1):
            shape = (target.rank(r), source.rank(r))
            if r < len(maps) and maps[r] is not None:
                m = maps[r] if isinstance(maps[r], Matrix) else Matrix(maps[r], shape[1])
                if m.shape != shape:
                    raise ShapeError(f"map in degree {r} has shape {m.shape}, expected {shape}")
                mats.append(m.map(ring.coerce))
            else:
                mats.append(Matrix.zeros(*shape).map(ring.coerce))
        self.maps = mats
        if check and not self.is_chain_map():
            raise InvalidComplex("maps do not commute with the boundaries")

    @property
    def top(self) -> int:
        return len(self.maps) - 1

    def __getitem__(self, r: int) -> Matrix:
        if 0 <= r <= self.top:
            return self.maps[r]
        return Matrix.zeros(self.target.rank(r), self.source.rank(r)).map(self.source.ring.coerce)

    def is_chain_map(self) -> bool:
        a, b = self.source, self.target
        return all(self[r - 1] @ a.boundary(r) == b.boundary(r) @ self[r]
                   for r in range(1, self.top + 1))

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self o other``."""
        top = max(self.top, other.top)
        return ChainMap(other.source, self.target,
                        [self[r] @ other[r] for r in range(top + 1)], check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        top = max(self.top, other.top)
        return ChainMap(self.source, self.target,
                        [self[r] - other[r] for r in range(top + 1)], check=False)

    def __eq__(self, other):
        top = max(self.top, other.top)
        return all(self[r] == other[r] for r in range(top + 1))

    @classmethod
    def identity(cls, c: FreeComplex) -> "ChainMap":
        return cls(c, c, [Matrix.identity(c.rank(r)) for r in range(c.top + 1)], check=False)

    @classmethod
    def zero(cls, a: FreeComplex, b: FreeComplex) -> "ChainMap":
        return cls(a, b, [], check=False)


def mapping_cone(f: ChainMap) -> FreeComplex:
    """``Cone_r = A_{r-1} + B_r`` with ``d(a, b) = (-d a, f a + d b)``."""
    a, b = f.source, f.target
    top = max(a.top + 1, b.top)
    ranks = [a.rank(r - 1) + b.rank(r) for r in range(top + 1)]
    bds = []
    for r in range(1, top + 1):
        da = a.boundary(r - 1)
        upper = Matrix.hstack(-da, Matrix.zeros(a.rank(r - 2), b.rank(r)).map(a.ring.coerce))
        lower = Matrix.hstack(f[r - 1], b.boundary(r))
        bds.append(Matrix.vstack(upper, lower))
    return FreeComplex(a.ring, ranks, bds, check=False)


# ---------------------------------------------------------------------------
# homology

def _column_in_image(ring, a: Matrix, b: Matrix) -> bool:
    if b.ncols == 0:
        return True
    return ring.solve(a, b) is not None


def is_acyclic(c: FreeComplex) -> bool:
    for r in range(c.top + 1):
        z = c.ring.kernel(c.boundary(r))
        if not _column_in_image(c.ring, c.boundary(r + 1), z):
            return False
    return True


def is_homology_equivalence(f: ChainMap) -> bool:
    return is_acyclic(mapping_cone(f))


def same_on_homology(f: ChainMap, g: ChainMap) -> bool:
    """True iff ``f`` and ``g`` induce the same map on homology."""
    diff = f - g
    src, tgt = f.source, f.target
    for r in range(max(src.top, tgt.top) + 1):
        z = src.ring.kernel(src.boundary(r))
        if not _column_in_image(src.ring, tgt.boundary(r + 1), diff[r] @ z):
            return False
    return True


def betti(c: FreeComplex) -> list[int]:
    """Betti numbers over Q."""
    if not isinstance(c.ring, RationalField) or c.ring != Q:
        raise ShapeError("betti numbers need a complex over Q")
    return [c.rank(r) - arith.rank(c.boundary(r)) - arith.rank(c.boundary(r + 1))
            for r in range(c.top + 1)]


def homology_dimensions(c: FreeComplex) -> list[int]:
    """Q-dimensions of homology for complexes over Q or Q[t]/(t^n)."""
    if c.ring == Q:
        return betti(c)
    if isinstance(c.ring, TruncatedPolynomialRing):
        n = c.ring.n
        ex = c.ring.expand
        return [n * c.rank(r) - arith.rank(ex(c.boundary(r))) - arith.rank(ex(c.boundary(r + 1)))
                for r in range(c.top + 1)]
    raise ShapeError("homology over Q[t] is infinite dimensional; use pitcher.homology_modules")


def is_epimorphic(f: ChainMap) -> bool:
    ring = f.source.ring
    return all(ring.solve(f[r], Matrix.identity(f.target.rank(r)).map(ring.coerce)) is not None
               for r in range(f.top + 1))


# ---------------------------------------------------------------------------
# collapsible summands and liftings

@dataclass(frozen=True)
class CollapsibleSummand:
    """``0 <- M <-id- M <- 0`` in degrees ``degree`` and ``degree + 1``."""

    degree: int
    rank: int

    def complex(self, ring) -> FreeComplex:
        ranks = [0] * self.degree + [self.rank, self.rank]
        bds = [None] * self.degree + [Matrix.identity(self.rank)]
        return FreeComplex(ring, ranks, bds, check=False)


def _collapsible_complex(ring, f: FreeComplex) -> tuple[list[CollapsibleSummand], FreeComplex]:
    """``K = sum over k >= 1 of kappa^k`` with kappa^k built on ``F_k``.

    In degree ``r`` the basis is ``[F_r (top of kappa^r), F_{r+1} (bottom of kappa^{r+1})]``.
    """
    summands = [CollapsibleSummand(k - 1, f.rank(k)) for k in range(1, f.top + 1)]
    top = f.top
    ranks = [(f.rank(r) if r >= 1 else 0) + f.rank(r + 1) for r in range(top + 1)]
    bds = []
    for r in range(1, top + 1):
        # K_r -> K_{r-1}: top of kappa^r goes identically to the bottom of kappa^r
        rows_top = f.rank(r - 1) if r - 1 >= 1 else 0
        m = [[0] * ranks[r] for _ in range(ranks[r - 1])]
        for i in range(f.rank(r)):
            m[rows_top + i][i] = 1
        bds.append(Matrix(m, ranks[r]))
    return summands, FreeComplex(ring, ranks, bds, check=False)


def _mu(f: FreeComplex, k: FreeComplex) -> list[Matrix]:
    """Degreewise matrices of ``mu : K -> F`` (identity on tops, ``d`` on bottoms)."""
    out = []
    for r in range(f.top + 1):
        top_part = Matrix.identity(f.rank(r)) if r >= 1 else Matrix.zeros(f.rank(r), 0)
        out.append(Matrix.hstack(top_part.map(f.ring.coerce), f.boundary(r + 1)))
    return out


@dataclass
class Epimorphic:
    summands: list[CollapsibleSummand]
    collapsible: FreeComplex
    extended_source: FreeComplex
    phi_prime: ChainMap


def h0_is_epimorphic(phi: ChainMap) -> bool:
    ring = phi.source.ring
    f = phi.target
    stacked = Matrix.hstack(phi[0], f.boundary(1))
    return ring.solve(stacked, Matrix.identity(f.rank(0)).map(ring.coerce)) is not None


def make_epimorphic(phi: ChainMap) -> Epimorphic:
    """Extend ``phi : B -> F`` to a degreewise surjection ``B + K -> F``."""
    if not h0_is_epimorphic(phi):
        raise H0NotEpimorphic("phi does not induce an epimorphism on H_0")
    b, f = phi.source, phi.target
    ring = b.ring
    summands, k = _collapsible_complex(ring, f)
    top = max(b.top, f.top)
    ext = direct_sum(b.padded(top), k.padded(top))
    mu = _mu(f, k)
    maps = [Matrix.hstack(phi[r], mu[r] if r <= f.top else
                          Matrix.zeros(f.rank(r), k.rank(r)).map(ring.coerce))
            for r in range(top + 1)]
    phi_prime = ChainMap(ext, f, maps)
    assert is_epimorphic(phi_prime)
    return Epimorphic(summands, k, ext, phi_prime)


def lift_through(alpha: ChainMap, gamma: ChainMap) -> ChainMap:
    """A chain map ``xi : A -> E`` with ``gamma o xi = alpha``.

    ``gamma : E -> F`` must be surjective in every degree and a homology
    equivalence; ``A`` is free.
    """
    if alpha.target.ranks != gamma.target.ranks:
        raise ShapeError("alpha and gamma must share their target")
    if not is_epimorphic(gamma):
        raise PreconditionFailed("gamma is not surjective in every degree")
    if not is_homology_equivalence(gamma):
        raise PreconditionFailed("gamma is not a homology equivalence")
    a, e = alpha.source, gamma.source
    ring = a.ring
    top = max(a.top, e.top)
    xi: list[Matrix] = []
    for r in range(top + 1):
        y = ring.solve(gamma[r], alpha[r])
        if y is None:
            raise NoSolution(f"alpha is not in the image of gamma in degree {r}")
        if r > 0:
            # z = d y - xi_{r-1}(d e) is a cycle of ker gamma; pull it back to nu
            z = e.boundary(r) @ y - xi[r - 1] @ a.boundary(r)
            lhs = Matrix.vstack(gamma[r], e.boundary(r))
            rhs = Matrix.vstack(Matrix.zeros(gamma[r].nrows, z.ncols).map(ring.coerce), z)
            nu = ring.solve(lhs, rhs)
            if nu is None:
                raise NoSolution(f"kernel of gamma is not acyclic in degree {r - 1}")
            y = y - nu
        xi.append(y)
    out = ChainMap(a, e, xi)
    assert gamma.compose(out) == alpha
    return out


@dataclass
class Triangle:
    gamma: ChainMap
    homotopy: list[Matrix]
    gamma_prime: ChainMap
    epimorphic: Epimorphic

    def check_homotopy(self, alpha: ChainMap, beta: ChainMap) -> bool:
        """``alpha - beta o gamma = d h + h d`` exactly."""
        diff = alpha - beta.compose(self.gamma)
        a, d = alpha.source, alpha.target
        h = self.homotopy

        def hom(r):
            if 0 <= r < len(h):
                return h[r]
            return Matrix.zeros(d.rank(r + 1), a.rank(r)).map(a.ring.coerce)

        return all(diff[r] == d.boundary(r + 1) @ hom(r) + hom(r - 1) @ a.boundary(r)
                   for r in range(max(a.top, d.top) + 1))


def compose_triangle(alpha: ChainMap, beta: ChainMap) -> Triangle:
    """``gamma : A -> B`` with ``beta o gamma`` homotopic to ``alpha``.

    Both maps go into the same complex ``D`` and must be homology equivalences.
    """
    if not is_homology_equivalence(alpha):
        raise PreconditionFailed("alpha is not a homology equivalence")
    if not is_homology_equivalence(beta):
        raise PreconditionFailed("beta is not a homology equivalence")
    a, b, d = alpha.source, beta.source, beta.target
    epi = make_epimorphic(beta)
    gamma_prime = lift_through(alpha, epi.phi_prime)
    top = max(a.top, epi.extended_source.top)
    gamma, homotopy = [], []
    for r in range(top + 1):
        g = gamma_prime[r]
        nb = b.rank(r)
        gamma.append(g.submatrix(range(nb), range(g.ncols)))
        # h_r = mu_{r+1} s pi_K gamma'_r, where s sends the bottom copy of
        # kappa^{r+1} in K_r to its top copy in K_{r+1}
        pk = g.submatrix(range(nb, g.nrows), range(g.ncols))
        top_r = d.rank(r) if r >= 1 else 0
        bottom = pk.submatrix(range(top_r, pk.nrows), range(pk.ncols))
        homotopy.append(bottom)
    out = ChainMap(a, b, gamma)
    tri = Triangle(out, homotopy, gamma_prime, epi)
    assert tri.check_homotopy(alpha, beta)
    return tri
