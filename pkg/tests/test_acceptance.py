"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import random
import time
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from novikov_cone.arith import Poly
from novikov_cone.complexes import (QT, FreeComplex, Q, TruncatedPolynomialRing,
                                    compose_triangle, homology_dimensions,
                                    is_epimorphic, is_homology_equivalence, lift_through,
                                    make_epimorphic, same_on_homology)
from novikov_cone.cones import (FormFamily, TargetDirection, dual_basis, is_admissible,
                                regular_family)
from novikov_cone.errors import NonUnimodularFamily, RayIsLattice, RayOnWall
from novikov_cone.incidence import (QuadraticSurd, RationalForm, appendix_example,
                                    convergence_radius, detect_rational, growth_rate,
                                    incidence_series, is_symplectic)
from novikov_cone.pitcher import (PitcherNumbers, beta_at_zero, evaluate_inequalities,
                                  homology_modules, inequality_report, novikov_betti,
                                  pitcher_numbers, r_from_t_zero, relative_betti)
from novikov_cone.series import (TruncatedSeries, bounded_support, jn_kernel_dimension,
                                 mul_truncated, twisted_mul_truncated)

from generators import epimorphic_instance, lifting_instance, random_complex, triangle_instance
from twists import random_series, random_twist


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return emit


def leibniz(rows):
    n = len(rows)
    total = 0
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        prod = 1
        for i in range(n):
            prod *= rows[i][p[i]]
        total += (-1) ** inv * prod
    return total


def lucas(q, n):
    xs = [0, 1]
    while len(xs) < n:
        xs.append(q * xs[-1] - xs[-2])
    return xs[:n]


# 1 ---------------------------------------------------------------------------

def test_criterion_1_example_family_series(verdict):
    start = time.perf_counter()
    bad = []
    for q in range(3, 11):
        s = incidence_series(appendix_example(q)[1], 50)
        if list(s.coefficients[1:]) != [-4 * x for x in lucas(q, 50)]:
            bad.append(f"q={q} series")
        f = detect_rational(s)
        if f is None or f.Q != Poly([1, -q, 1]):
            bad.append(f"q={q} denominator")
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 1
    verdict(1, ok, f"q=3..10, 50 terms vs recurrence, denominators 1-qt+t^2, "
                   f"{elapsed:.3f}s {bad or ''}")


# 2 ---------------------------------------------------------------------------

def test_criterion_2_symplectic(verdict):
    j = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    bad = []
    for q in range(3, 21):
        s, _ = appendix_example(q)
        rows = s.rows
        # independent oracle: S^T J S by explicit sums
        prod = [[sum(rows[a][i] * j[a][b] * rows[b][c] for a in range(4) for b in range(4))
                 for c in range(4)] for i in range(4)]
        if prod != j or not is_symplectic(s) or leibniz(rows) != 1:
            bad.append(q)
    verdict(2, not bad, f"S^T J S = J and det S = 1 for q=3..20 {bad or ''}")


# 3 ---------------------------------------------------------------------------

def test_criterion_3_radius(verdict):
    bad = []
    previous = None
    width = Fraction(1, 10 ** 12)
    for q in range(3, 21):
        target = (q - QuadraticSurd.sqrt(q * q - 4)) / 2
        f = detect_rational(incidence_series(appendix_example(q)[1], 12))
        r = convergence_radius(f, width)
        if r.exact != target or not (r.lower <= target <= r.upper) or r.width > width:
            bad.append(f"q={q} radius")
        if r.exact * growth_rate(q) != 1:
            bad.append(f"q={q} radius*A")
        if previous is not None and not r.exact < previous:
            bad.append(f"q={q} not decreasing")
        previous = r.exact
        # second route: a cubic denominator with an extra far root forces bisection
        cubic = RationalForm(Poly(1), f.Q * Poly([1, Fraction(-1, 10)]))
        rb = convergence_radius(cubic, width)
        if rb.exact is not None or not (rb.lower <= target <= rb.upper) or rb.width > width:
            bad.append(f"q={q} bisection")
        oracle = min(abs(z) for z in np.roots([1, -q, 1][::-1]))
        if abs(float(target) - oracle) > 1e-12:
            bad.append(f"q={q} numpy")
    verdict(3, not bad, f"radius (q-sqrt(q^2-4))/2 within 1e-12, radius*A = 1, "
                        f"strictly decreasing, q=3..20 {bad or ''}")


# 4 ---------------------------------------------------------------------------

def _frame_oracle(basis, v, tol):
    rows = [list(u) for u in basis]
    k = len(v)
    d = leibniz([[rows[j][i] for j in range(k)] for i in range(k)])
    if abs(d) != 1:
        return False
    # Cramer's rule for v = sum alpha_j u_j
    for j in range(k):
        cols = [list(u) for u in rows]
        cols[j] = list(v)
        alpha = Fraction(leibniz([[cols[c][i] for c in range(k)] for i in range(k)]), d)
        if alpha <= 0:
            return False
    vv = sum(x * x for x in v)
    for u in rows:
        uu = sum(x * x for x in u)
        vu = sum(a * b for a, b in zip(v, u))
        if not 1 - vu * vu / (vv * uu) < tol or u[0] <= 0:
            return False
    return True


def test_criterion_4_regular_family(verdict):
    rng = random.Random(2024)
    done, skipped, bad, worst = 0, 0, [], 0.0
    while done < 100:
        k = rng.choice([2, 3, 4])
        v = [Fraction(rng.randint(1, 10 ** 4), rng.randint(1, 10 ** 4))]
        v += [Fraction(rng.randint(-10 ** 4, 10 ** 4), rng.randint(1, 10 ** 4))
              for _ in range(k - 1)]
        tol = rng.choice([Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)])
        start = time.perf_counter()
        try:
            basis, trace = regular_family(TargetDirection(v, tol))
        except (RayIsLattice, RayOnWall):
            skipped += 1
            continue
        elapsed = time.perf_counter() - start
        worst = max(worst, elapsed)
        if not _frame_oracle(basis.vectors, v, tol) or not trace.is_strictly_decreasing() \
                or elapsed >= 2:
            bad.append(v)
        done += 1
    verdict(4, not bad, f"100 targets, k in 2..4, all four frame conditions, decreasing |det|, "
                        f"worst {worst:.3f}s, {skipped} degeneracies skipped {bad or ''}")


# 5 and 6 ----------------------------------------------------------------------

def _complexes():
    rng = random.Random(5)
    return [random_complex(rng, QT, max_top=4, max_rank=4, max_deg=2) for _ in range(200)]


@pytest.fixture(scope="module")
def complexes():
    return _complexes()


def test_criterion_5_pitcher_identities(verdict, complexes):
    bad, torsion = [], 0
    for i, c in enumerate(complexes):
        decomps = homology_modules(c)
        numbers = pitcher_numbers(decomps)
        torsion += any(m.c for m in decomps)
        beta, checks = relative_betti(c, numbers)
        # beta from the cone of t, cross-checked against the Betti numbers of C/tC
        if not all(checks) or beta != beta_at_zero(c):
            bad.append(f"#{i} beta")
        if novikov_betti(c, decomps) != list(numbers.Q):
            bad.append(f"#{i} Q")
        if [r_from_t_zero(c, k) for k in range(c.top + 1)] != list(numbers.R):
            bad.append(f"#{i} R")
    verdict(5, not bad, f"200 complexes over Q[t]: beta_k = R_k + S_(k-1), Q_k = Q(t)-rank, "
                        f"R_k = t=0 oracle; {torsion} with t-torsion {bad or ''}")


def test_criterion_6_inequalities(verdict, complexes):
    bad = []
    for i, c in enumerate(complexes):
        rep = inequality_report(c.ranks, c)
        if not rep.holds():
            bad.append(f"#{i} {rep.failures()}")
    # adversarial inputs with hand-computed verdicts
    adversarial = [
        # Q_1 = beta_1 = 1 but M = (0, 0)
        (FreeComplex(QT, [0, 1]), (0, 0),
         ["pitcher[1]", "morse[1]", "novikov[1]", "chain[1]", "euler"]),
        # H_0 = Q[t]/t: beta = (1, 1), R = (1, 0), Q = (0, 0); M_1 - M_0 = -1 < 0
        (FreeComplex(QT, [1, 1], [[[Poly.t()]]]), (1, 0),
         ["pitcher[1]", "morse[1]", "chain[1]", "euler"]),
        # free H_0 of rank 1 with one surplus critical point: only Euler consistency fails
        (FreeComplex(QT, [1]), (2,), ["euler"]),
    ]
    for c, m, expected in adversarial:
        got = inequality_report(m, c).failures()
        if got != expected:
            bad.append(f"M={m}: {got} != {expected}")
    numbers = PitcherNumbers((2, 0), (0, 0), (2, 0))
    if evaluate_inequalities((1, 5), (2, 0), numbers)["pitcher"][0]:
        bad.append("M_0 < Q_0 not flagged")
    verdict(6, not bad, f"200 complexes with M = ranks satisfy all inequalities; "
                        f"{len(adversarial) + 1} adversarial inputs flagged exactly {bad or ''}")


# 7 ---------------------------------------------------------------------------

def test_criterion_7_ring_axioms(verdict):
    rng = random.Random(7)
    bad = []
    for i in range(500):
        k, n = rng.randint(1, 3), rng.randint(1, 4)
        a, b, c = (random_series(rng, k, n) for _ in range(3))
        if mul_truncated(mul_truncated(a, b), c) != mul_truncated(a, mul_truncated(b, c)) or \
                mul_truncated(a, b + c) != mul_truncated(a, b) + mul_truncated(a, c) or \
                mul_truncated(a, TruncatedSeries.one(k, n)) != a:
            bad.append(f"commutative #{i}")
    nontrivial = 0
    for i in range(500):
        k, m, n = rng.randint(1, 3), rng.randint(1, 2), rng.randint(1, 4)
        tw = random_twist(rng, k, m)
        nontrivial += any(s != 1 or any(h) for row in tw.comm for s, h in row)
        a, b, c = (random_series(rng, k, n, m) for _ in range(3))
        mul = lambda x, y: twisted_mul_truncated(x, y, tw)
        if mul(mul(a, b), c) != mul(a, mul(b, c)) or mul(a, b + c) != mul(a, b) + mul(a, c) \
                or mul(a + b, c) != mul(a, c) + mul(b, c):
            bad.append(f"twisted #{i}")
    kernels = []
    for _ in range(50):
        k, n = rng.randint(1, 3), rng.randint(1, 4)
        pool = bounded_support(k, n, rng.randint(n, n + 2))
        support = rng.sample(pool, rng.randint(1, min(len(pool), 40)))
        kernels.append(jn_kernel_dimension(k, n, support))
    if any(kernels):
        bad.append(f"nonzero J_n kernels {kernels}")
    verdict(7, not bad, f"500 + 500 triples associative and distributive "
                        f"({nontrivial} with nontrivial commutators); 50 J_n kernels zero "
                        f"{bad or ''}")


# 8 ---------------------------------------------------------------------------

def _rings():
    return [Q] * 5 + [TruncatedPolynomialRing(1), TruncatedPolynomialRing(2),
                      TruncatedPolynomialRing(3), QT]


def test_criterion_8_liftings(verdict):
    rng = random.Random(8)
    rings = _rings()
    bad = []
    for i in range(100):
        ring = rings[i % len(rings)]
        alpha, gamma = lifting_instance(rng, ring)
        xi = lift_through(alpha, gamma)
        if not xi.is_chain_map() or gamma.compose(xi) != alpha:
            bad.append(f"lift #{i}")
        phi = epimorphic_instance(rng, ring)
        epi = make_epimorphic(phi)
        pp = epi.phi_prime
        same = is_homology_equivalence(pp) == is_homology_equivalence(phi)
        if ring is not QT:
            src = phi.source
            same = same and homology_dimensions(epi.extended_source)[:src.top + 1] == \
                homology_dimensions(src)
        if not (pp.is_chain_map() and is_epimorphic(pp) and same):
            bad.append(f"epi #{i}")
        a, b = triangle_instance(rng, ring)
        tri = compose_triangle(a, b)
        if not (tri.gamma.is_chain_map() and same_on_homology(b.compose(tri.gamma), a)
                and tri.check_homotopy(a, b)):
            bad.append(f"triangle #{i}")
    verdict(8, not bad, f"100 instances each of lift, make_epimorphic, triangle over "
                        f"Q, Q[t]/t^n (n=1..3), Q[t] {bad or ''}")


# 9 ---------------------------------------------------------------------------

def test_criterion_9_degenerate_inputs(verdict):
    bad = []
    if is_admissible(FormFamily([[1], [-1]])):
        bad.append("{xi, -xi} admissible")
    try:
        regular_family(TargetDirection((3, 3, 3), Fraction(1, 10 ** 6)))
        bad.append("lattice ray accepted")
    except RayIsLattice:
        pass
    try:
        dual_basis(FormFamily([[-2, 0], [0, -1]]))
        bad.append("non-unimodular family accepted")
    except NonUnimodularFamily:
        pass
    verdict(9, not bad, f"non-admissible pair, RayIsLattice, NonUnimodularFamily {bad or ''}")
