"""Pitcher invariants and Novikov Betti numbers of complexes over Q[t].

A finitely generated Q[t]-module splits as

    Q[t]^a  +  sum_i Q[t]/(t^{n_i})  +  sum_j Q[t]/(A_j),   A_j(0) != 0

and for the homology ``H_k`` of a free complex the Pitcher numbers are
``R_k = a_k + c_k``, ``S_k = c_k``, ``Q_k = a_k`` where ``c_k`` counts the
t-torsion summands.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import arith
from .arith import Matrix, Poly, invariant_factors, kernel_poly, snf_poly, solve_poly
from .complexes import QT, ChainMap, FreeComplex, betti, evaluate_at_zero, mapping_cone, validate
from .errors import ConsistencyError, InvalidComplex, NoSolution, ShapeError

__all__ = [
    "ModuleDecomposition", "PitcherNumbers", "PitcherReport", "decompose_module",
    "homology_modules", "pitcher_numbers", "novikov_betti", "relative_betti",
    "inequality_report", "r_from_t_zero",
]


@dataclass(frozen=True)
class ModuleDecomposition:
    free_rank: int
    t_torsion: tuple[int, ...] = ()
    coprime_torsion: tuple[Poly, ...] = ()

    @property
    def a(self) -> int:
        return self.free_rank

    @property
    def c(self) -> int:
        return len(self.t_torsion)

    @property
    def d(self) -> int:
        return len(self.coprime_torsion)

    def torsion_dimension(self) -> int:
        """Q-dimension of the torsion part."""
        return sum(self.t_torsion) + sum(g.degree for g in self.coprime_torsion)

    def invariant_factors(self) -> list[Poly]:
        """Nonunit invariant factors of the torsion part, in divisibility order.

        Reassembled from the two chains, so a decomposition built from a
        presentation round-trips to that presentation's invariant factors.
        """
        ts = list(self.t_torsion)
        gs = list(self.coprime_torsion)
        n = max(len(ts), len(gs))
        ts = [0] * (n - len(ts)) + ts
        gs = [Poly(1)] * (n - len(gs)) + gs
        t = Poly.t()
        return [t ** m * g for m, g in zip(ts, gs)]


def decompose_module(presentation, generators: int | None = None) -> ModuleDecomposition:
    """Decompose the cokernel of a polynomial matrix (columns are relations)."""
    m = presentation if isinstance(presentation, Matrix) else Matrix(presentation, None)
    if generators is not None and generators != m.nrows:
        raise ShapeError("generator count does not match the presentation")
    if m.nrows == 0:
        return ModuleDecomposition(0)
    if m.ncols == 0:
        return ModuleDecomposition(m.nrows)
    d, _, _ = snf_poly(m)
    factors = invariant_factors(d)
    ts, gs = [], []
    for f in factors:
        if f.degree == 0:
            continue
        v = f.valuation()
        g = f.shift_down(v)
        if v:
            ts.append(v)
        if g.degree > 0:
            gs.append(g.monic())
    return ModuleDecomposition(m.nrows - len(factors), tuple(ts), tuple(gs))


def _require_qt(c: FreeComplex) -> None:
    if c.ring != QT:
        raise ShapeError("pitcher invariants need a complex over Q[t]")
    if not validate(c):
        raise InvalidComplex("boundary composition d o d is not zero")


def homology_presentation(c: FreeComplex, k: int) -> Matrix:
    """Presentation of ``H_k`` on a free basis of the k-cycles."""
    z = kernel_poly(c.boundary(k))
    b = c.boundary(k + 1)
    if z.ncols == 0 or b.ncols == 0:
        return Matrix.zeros(z.ncols, 0)
    coords = solve_poly(z, b)
    if coords is None:
        raise NoSolution("boundaries are not cycles; complex is invalid")
    return coords


def homology_modules(c: FreeComplex) -> list[ModuleDecomposition]:
    _require_qt(c)
    return [decompose_module(homology_presentation(c, k)) for k in range(c.top + 1)]


@dataclass(frozen=True)
class PitcherNumbers:
    R: tuple[int, ...]
    S: tuple[int, ...]
    Q: tuple[int, ...]

    def __post_init__(self):
        for r, s, q in zip(self.R, self.S, self.Q):
            if q != r - s or q < 0:
                raise ConsistencyError(f"Pitcher numbers R={r}, S={s}, Q={q} are inconsistent")


def pitcher_numbers(decomps) -> PitcherNumbers:
    return PitcherNumbers(
        R=tuple(m.a + m.c for m in decomps),
        S=tuple(m.c for m in decomps),
        Q=tuple(m.a for m in decomps),
    )


def novikov_betti(c: FreeComplex, decomps=None) -> list[int]:
    """Ranks of homology over Q(t), cross-checked against ``Q_k``."""
    _require_qt(c)
    rk = [arith.rank_over_fraction_field(c.boundary(r)) for r in range(c.top + 2)]
    out = [c.rank(r) - rk[r] - rk[r + 1] for r in range(c.top + 1)]
    if decomps is None:
        decomps = homology_modules(c)
    qs = [m.a for m in decomps]
    if qs != out:
        raise ConsistencyError(f"Q(t)-ranks {out} differ from free ranks {qs}")
    return out


def relative_betti(c: FreeComplex, numbers: PitcherNumbers | None = None):
    """``dim_Q H_k`` of the cone of multiplication by t, with the check
    ``beta_k = R_k + S_{k-1}`` per degree.

    Returns ``(beta, checks)``.
    """
    _require_qt(c)
    t = Poly.t()
    times_t = ChainMap(c, c, [Matrix.identity(c.rank(r)).scale(t) for r in range(c.top + 1)],
                       check=False)
    cone = mapping_cone(times_t)
    beta = []
    for k in range(c.top + 1):
        m = decompose_module(homology_presentation(cone, k))
        if m.free_rank:
            raise ConsistencyError("cone of t has non-torsion homology")
        beta.append(m.torsion_dimension())
    if numbers is None:
        numbers = pitcher_numbers(homology_modules(c))
    checks = [beta[k] == numbers.R[k] + (numbers.S[k - 1] if k else 0)
              for k in range(c.top + 1)]
    return beta, checks


def r_from_t_zero(c: FreeComplex, k: int) -> int:
    """``dim_Q`` of the cokernel of the degree-k homology presentation at t = 0."""
    p = homology_presentation(c, k)
    p0 = p.map(lambda x: x(0) if isinstance(x, Poly) else x)
    return p0.nrows - arith.rank(p0)


def _alt(seq, k):
    return sum((-1) ** (k - j) * seq[j] for j in range(k + 1))


@dataclass
class PitcherReport:
    M: tuple[int, ...]
    beta: tuple[int, ...]
    numbers: PitcherNumbers
    verdicts: dict = field(default_factory=dict)

    def holds(self) -> bool:
        return all(all(v.values()) if isinstance(v, dict) else v
                   for v in self.verdicts.values())

    def failures(self) -> list[str]:
        out = []
        for name, v in self.verdicts.items():
            if isinstance(v, dict):
                out += [f"{name}[{k}]" for k, ok in v.items() if not ok]
            elif not v:
                out.append(name)
        return out


def evaluate_inequalities(M, beta, numbers: PitcherNumbers) -> dict:
    """All verdicts, recomputed from stored numbers only."""
    n = max(len(M), len(beta), len(numbers.Q))
    pad = lambda s: list(s) + [0] * (n - len(s))
    M, beta = pad(M), pad(beta)
    R, Q = pad(numbers.R), pad(numbers.Q)
    return {
        "pitcher": {k: _alt(M, k) >= _alt(Q, k) for k in range(n)},
        "morse": {k: _alt(M, k) >= _alt(beta, k) for k in range(n)},
        "novikov": {k: M[k] >= Q[k] for k in range(n)},
        "chain": {k: M[k] >= beta[k] >= R[k] >= Q[k] for k in range(n)},
        "euler": sum((-1) ** k * M[k] for k in range(n)) == sum((-1) ** k * beta[k] for k in range(n)),
    }


def inequality_report(M, c: FreeComplex) -> PitcherReport:
    M = tuple(int(m) for m in M)
    if any(m < 0 for m in M):
        raise ValueError("Morse counts must be nonnegative")
    decomps = homology_modules(c)
    numbers = pitcher_numbers(decomps)
    novikov_betti(c, decomps)
    beta, _ = relative_betti(c, numbers)
    return PitcherReport(M, tuple(beta), numbers, evaluate_inequalities(M, beta, numbers))


def beta_at_zero(c: FreeComplex) -> list[int]:
    """Betti numbers of ``C / tC``; a second route to the relative Betti numbers."""
    return betti(evaluate_at_zero(c))
