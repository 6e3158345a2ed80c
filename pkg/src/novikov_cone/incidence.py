"""Incidence-coefficient series, rationality detection and convergence radius.

The series is ``n_0 + sum_{m >= 0} <M^m tau, S> t^{m+1}`` for an integer
matrix ``M`` (the homological gradient descent), a class ``tau`` and a
linear functional ``S``.  Everything stays in exact integers / rationals;
irrational radii are carried as quadratic surds or rational enclosures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .arith import Matrix, Poly, check_bits, det
from .errors import ShapeError

__all__ = [
    "DescentData", "IncidenceSeries", "RationalForm", "QuadraticSurd",
    "RadiusEstimate", "incidence_series", "detect_rational", "convergence_radius",
    "appendix_example", "closed_form_check", "lucas_sequence", "symplectic_form",
    "is_symplectic", "growth_rate", "monodromy_det", "berlekamp_massey",
]


# ---------------------------------------------------------------------------
# series

@dataclass(frozen=True)
class DescentData:
    M: tuple[tuple[int, ...], ...]
    tau: tuple[int, ...]
    pairing: tuple[int, ...]
    n0: int = 0

    def __post_init__(self):
        n = len(self.M)
        if any(len(row) != n for row in self.M):
            raise ShapeError("descent matrix must be square")
        if len(self.tau) != n or len(self.pairing) != n:
            raise ShapeError(f"tau and pairing must have length {n}")

    @classmethod
    def build(cls, M, tau, pairing, n0=0) -> "DescentData":
        return cls(tuple(tuple(int(x) for x in row) for row in M),
                   tuple(int(x) for x in tau), tuple(int(x) for x in pairing), int(n0))


@dataclass(frozen=True)
class IncidenceSeries:
    coefficients: tuple[int, ...]

    @property
    def horizon(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, i):
        return self.coefficients[i]


def incidence_series(d: DescentData, K: int) -> IncidenceSeries:
    """Coefficients ``n_0 .. n_K`` by repeated matrix-vector products."""
    if K < 0:
        raise ValueError("horizon must be nonnegative")
    out = [d.n0]
    v = list(d.tau)
    for m in range(K):
        out.append(sum(p * x for p, x in zip(d.pairing, v)))
        if m + 1 < K:
            v = [sum(a * x for a, x in zip(row, v)) for row in d.M]
            check_bits(*v)
    return IncidenceSeries(tuple(out))


# ---------------------------------------------------------------------------
# rational generating functions

@dataclass(frozen=True)
class RationalForm:
    """``P / Q`` with ``Q(0) = 1``."""

    P: Poly
    Q: Poly

    def __post_init__(self):
        if self.Q[0] != 1:
            raise ValueError("denominator must have constant term 1")

    def expand(self, n: int) -> list[Fraction]:
        """First ``n`` Taylor coefficients."""
        out = []
        for i in range(n):
            s = self.P[i] - sum(self.Q[j] * out[i - j] for j in range(1, min(i, self.Q.degree) + 1))
            out.append(s)
        return out

    def is_integral(self) -> bool:
        return self.P.is_integral() and self.Q.is_integral()

    def __str__(self):
        return f"({self.P})/({self.Q})"


def berlekamp_massey(seq) -> tuple[list[Fraction], int]:
    """Connection polynomial ``C`` (``C[0] = 1``) of the shortest recurrence
    ``sum_i C[i] s[n-i] = 0`` valid for every ``n >= L``; returns ``(C, L)``.
    """
    s = [Fraction(x) for x in seq]
    c, b = [Fraction(1)], [Fraction(1)]
    L, m, bd = 0, 1, Fraction(1)
    for n in range(len(s)):
        d = s[n] + sum(c[i] * s[n - i] for i in range(1, L + 1) if i < len(c))
        if d == 0:
            m += 1
            continue
        coef = d / bd
        t = c[:]
        c = c + [Fraction(0)] * max(0, len(b) + m - len(c))
        for i, x in enumerate(b):
            c[i + m] -= coef * x
        if 2 * L <= n:
            L, b, bd, m = n + 1 - L, t, d, 1
        else:
            m += 1
    c = c[:L + 1] + [Fraction(0)] * max(0, L + 1 - len(c))
    return c, L


def detect_rational(s) -> RationalForm | None:
    """Minimal ``P/Q`` reproducing the prefix, or None when the prefix is too
    short to pin the recurrence down (fewer than ``2L + 2`` terms)."""
    coeffs = list(s.coefficients if isinstance(s, IncidenceSeries) else s)
    if len(coeffs) < 4:
        raise ValueError("need at least 4 coefficients")
    c, L = berlekamp_massey(coeffs)
    if len(coeffs) < 2 * L + 2:
        return None
    q = Poly(c)
    sc = Poly(coeffs) * q
    p = Poly(sc.coeffs[:L])
    form = RationalForm(p, q)
    if form.expand(len(coeffs)) != [Fraction(x) for x in coeffs]:
        return None
    return form


# ---------------------------------------------------------------------------
# quadratic surds

def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sign_surd(a: Fraction, b: Fraction, d: int) -> int:
    """Sign of ``a + b sqrt(d)``, ``d >= 0``."""
    sa, sb = _sign(a), _sign(b) if d else 0
    if sb == 0 or sa == sb:
        return sa or sb
    if sa == 0:
        return sb
    cmp = _sign(a * a - b * b * d)
    return sa if cmp > 0 else (sb if cmp < 0 else 0)


def _split_square(n: int) -> tuple[int, int]:
    """``n = f^2 m``, square factors removed by trial division up to 10^4."""
    f, m, p = 1, n, 2
    while p * p <= m and p < 10 ** 4:
        while m % (p * p) == 0:
            m //= p * p
            f *= p
        p += 1
    r = isqrt(m)
    if r * r == m:
        return f * r, 1
    return f, m


class QuadraticSurd:
    """``a + b sqrt(d)`` with rational ``a, b`` and square-free integer ``d >= 1``."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        a, b, d = Fraction(a), Fraction(b), int(d)
        if d < 0:
            raise ValueError("negative radicand")
        if d == 0:
            b, d = Fraction(0), 1
        f, d = _split_square(d)
        b *= f
        if d == 1:
            a, b = a + b, Fraction(0)
        self.a, self.b, self.d = a, b, d

    @classmethod
    def sqrt(cls, x) -> "QuadraticSurd":
        """``sqrt(x)`` for a nonnegative rational ``x``."""
        x = Fraction(x)
        if x < 0:
            raise ValueError("negative radicand")
        return cls(0, Fraction(1, x.denominator), x.numerator * x.denominator)

    def _lift(self, other):
        if isinstance(other, QuadraticSurd):
            if other.b and self.b and other.d != self.d:
                raise ValueError("surds with different radicands")
            return other
        return QuadraticSurd(other)

    def _d(self, other):
        return self.d if self.b else other.d

    def __add__(self, other):
        o = self._lift(other)
        return QuadraticSurd(self.a + o.a, self.b + o.b, self._d(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        d = self._d(o)
        return QuadraticSurd(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadraticSurd(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, other):
        o = self._lift(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero surd")
        num = self * o.conjugate()
        return QuadraticSurd(num.a / n, num.b / n, num.d)

    def sign(self) -> int:
        return _sign_surd(self.a, self.b, self.d)

    def compare(self, other) -> int:
        """Exact sign of ``self - other``; radicands may differ."""
        if not isinstance(other, QuadraticSurd):
            other = QuadraticSurd(other)
        if not self.b or not other.b or self.d == other.d:
            return (self - other).sign()
        # x = a1 + b1 sqrt(d1) - a2, y = -b2 sqrt(d2); sign of x + y
        a = self.a - other.a
        sx = _sign_surd(a, self.b, self.d)
        sy = -_sign(other.b)
        if sx == 0 or sx == sy:
            return sy if sx == 0 else sx
        # |x| vs |y| by squaring: x^2 - y^2 = a^2 + b1^2 d1 - b2^2 d2 + 2 a b1 sqrt(d1)
        s = _sign_surd(a * a + self.b ** 2 * self.d - other.b ** 2 * other.d, 2 * a * self.b, self.d)
        return sx if s > 0 else (sy if s < 0 else 0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QuadraticSurd)):
            return self.compare(other) == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def is_rational(self) -> bool:
        return self.b == 0

    def enclosure(self, width=Fraction(1, 10 ** 15)) -> tuple[Fraction, Fraction]:
        """Rational ``lo <= self <= hi`` with ``hi - lo <= width``."""
        if not self.b:
            return self.a, self.a
        k = 0
        while True:
            s = 2 ** k
            r = isqrt(self.d * s * s)
            lo_root, hi_root = Fraction(r, s), Fraction(r + 1, s)
            ends = sorted((self.a + self.b * lo_root, self.a + self.b * hi_root))
            if ends[1] - ends[0] <= width:
                return ends[0], ends[1]
            k += 8

    def __float__(self):
        lo, hi = self.enclosure()
        return float((lo + hi) / 2)

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b}, {self.d})"

    def __str__(self):
        if not self.b:
            return str(self.a)
        # written over a common denominator: (p + r sqrt(d)) / den
        den = self.a.denominator * self.b.denominator // gcd(self.a.denominator, self.b.denominator)
        p, r = self.a * den, self.b * den
        root = f"sqrt({self.d})"
        mag = abs(r)
        rt = root if mag == 1 else f"{mag}*{root}"
        if p:
            body = f"{p} {'+' if r > 0 else '-'} {rt}"
        else:
            body = rt if r > 0 else f"-{rt}"
        return body if den == 1 else f"({body})/{den}"


# ---------------------------------------------------------------------------
# convergence radius

@dataclass(frozen=True)
class RadiusEstimate:
    """Minimum modulus of the roots of the denominator.

    ``exact`` is set for denominators of degree at most 2; ``lower``/``upper``
    always bracket the radius (both None when it is infinite).
    """

    lower: Fraction | None
    upper: Fraction | None
    exact: QuadraticSurd | None = None

    @property
    def infinite(self) -> bool:
        return self.lower is None

    @property
    def width(self):
        return None if self.infinite else self.upper - self.lower


def _schur_cohn_outside(coeffs) -> bool:
    """True iff every root of the real polynomial lies strictly outside the
    closed unit disk (Schur-Cohn test, exact)."""
    p = [Fraction(c) for c in coeffs]
    while len(p) > 1:
        n = len(p) - 1
        delta = p[0] * p[0] - p[n] * p[n]
        if delta <= 0:
            return False
        p = [p[0] * p[i] - p[n] * p[n - i] for i in range(n)]
    return True


def _root_in_disk(q: Poly, r: Fraction) -> bool:
    """Does ``q`` vanish somewhere on ``|z| <= r``?"""
    scaled = [c * r ** i for i, c in enumerate(q.coeffs)]
    return not _schur_cohn_outside(scaled)


def _bisect_radius(q: Poly, width: Fraction) -> tuple[Fraction, Fraction]:
    c = q.coeffs
    n = q.degree
    # every root has modulus in [|c0| / (|c0| + max|ci|), |c0/cn|^(1/n)], the
    # upper end bounded crudely by 1 + |c0/cn|
    lo = abs(c[0]) / (abs(c[0]) + max(abs(x) for x in c[1:]))
    hi = 1 + abs(c[0] / c[n])
    assert not _root_in_disk(q, lo) or lo == 0
    while hi - lo > width:
        mid = (lo + hi) / 2
        # keep the denominators small: snap mid to a dyadic rational
        mid = Fraction(round(mid * 2 ** 64), 2 ** 64) if mid.denominator > 2 ** 64 else mid
        if _root_in_disk(q, mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def _quadratic_radius(q: Poly) -> QuadraticSurd:
    c0, c1 = q[0], q[1]
    if q.degree == 1:
        return QuadraticSurd(abs(c0 / c1))
    c2 = q[2]
    disc = c1 * c1 - 4 * c0 * c2
    if disc < 0:
        return QuadraticSurd.sqrt(c0 / c2)
    root = QuadraticSurd.sqrt(disc)
    # the root of smaller modulus has sqrt(disc) partially cancelling c1
    r = (root - abs(c1)) if c0 * c2 < 0 else (abs(c1) - root)
    return r / (2 * abs(c2))


def convergence_radius(form: RationalForm, width=Fraction(1, 10 ** 12)) -> RadiusEstimate:
    """Radius of convergence of ``P/Q`` (the form is assumed reduced)."""
    q = form.Q
    if q.degree <= 0:
        return RadiusEstimate(None, None)
    if q.degree <= 2:
        exact = _quadratic_radius(q)
        lo, hi = exact.enclosure(width)
        return RadiusEstimate(lo, hi, exact)
    lo, hi = _bisect_radius(q, width)
    return RadiusEstimate(lo, hi)


# ---------------------------------------------------------------------------
# the explicit genus-two family

def symplectic_form() -> Matrix:
    return Matrix([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], 4)


def is_symplectic(s: Matrix) -> bool:
    j = symplectic_form()
    return s.T @ j @ s == j


def appendix_example(q: int, n0: int = 0) -> tuple[Matrix, DescentData]:
    """Monodromy ``S`` and descent data for parameter ``q >= 3``.

    Basis ``(a1, b1, a2, b2)``.  ``tau = b1 - 2 b2``; the pairing with ``b1``
    is the ``a1``-coordinate functional.
    """
    if q < 3:
        raise ValueError("q must be at least 3")
    s = Matrix([[0, 2, 1, 0], [0, 0, 0, 1], [0, 1, 0, 0], [-1, q, 0, -2]], 4)
    m = ((0, 0, 0, 2), (0, 0, 0, 0), (0, 0, 0, 1), (0, 0, -1, q))
    return s, DescentData(m, (0, 1, 0, -2), (1, 0, 0, 0), n0)


def lucas_sequence(q: int, n: int) -> list[int]:
    """``x_0 = 0, x_1 = 1, x_{k+1} = q x_k - x_{k-1}``; first ``n`` terms."""
    xs = [0, 1]
    while len(xs) < n:
        xs.append(q * xs[-1] - xs[-2])
    return xs[:n]


def closed_form_check(q: int, K: int, n0: int = 0) -> bool:
    """``n_{k+1} = -4 x_k`` for ``0 <= k <= K``."""
    _, d = appendix_example(q, n0)
    s = incidence_series(d, K + 1)
    return list(s.coefficients[1:]) == [-4 * x for x in lucas_sequence(q, K + 1)]


def growth_rate(q: int) -> QuadraticSurd:
    """``A = (q + sqrt(q^2 - 4)) / 2``, the dominant root of ``x^2 - q x + 1``."""
    return (QuadraticSurd.sqrt(q * q - 4) + q) / 2


def monodromy_det(q: int):
    return det(appendix_example(q)[0])
