"""Group-ring elements and truncated (twisted) special power series.

Monomials ``t^I = t_1^{i_1} ... t_k^{i_k}`` are keyed by exponent tuples.  A
truncated series of order ``n`` lives in the quotient by the ideal spanned by
monomials with every exponent ``>= n``; its support is therefore inside
``S_n = {I : some i_j <= n - 1}``.

Twisted series have coefficients in the group ring ``Z[H]``, ``H = Z^m``, and
the variables act on coefficients through automorphisms ``sigma_i`` of ``H``
(``tau_i h = sigma_i(h) tau_i``) and commute up to signed units
(``tau_i tau_j = r_ij tau_j tau_i``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .arith import Matrix, det, rank
from .cones import FormFamily, cone_contains, dual_basis
from .errors import (InvalidTwistData, NegativeIndexError, OrderMismatch,
                     ShapeError, ZeroVectorError)

MultiIndex = tuple[int, ...]


class GroupRingElement:
    """Finite integer combination of elements of ``Z^k`` (Laurent monomials)."""

    __slots__ = ("terms", "rank")

    def __init__(self, terms=None, rank: int | None = None):
        clean = {}
        for idx, c in (terms or {}).items():
            idx = tuple(int(x) for x in idx)
            if c:
                clean[idx] = clean.get(idx, 0) + c
        self.terms = {i: c for i, c in clean.items() if c}
        if rank is None:
            if not self.terms:
                raise ShapeError("rank needed for the zero element")
            rank = len(next(iter(self.terms)))
        if any(len(i) != rank for i in self.terms):
            raise ShapeError("multi-indices of inconsistent length")
        self.rank = rank

    @classmethod
    def one(cls, rank: int) -> "GroupRingElement":
        return cls({(0,) * rank: 1}, rank)

    @classmethod
    def monomial(cls, idx, coeff: int = 1) -> "GroupRingElement":
        return cls({tuple(idx): coeff}, len(idx))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            return self == GroupRingElement({(0,) * self.rank: other}, self.rank)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        return hash((self.rank, frozenset(self.terms.items())))

    def _lift(self, other):
        if isinstance(other, int):
            return GroupRingElement({(0,) * self.rank: other}, self.rank)
        return other

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for i, c in other.terms.items():
            out[i] = out.get(i, 0) + c
        return GroupRingElement(out, self.rank)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement({i: -c for i, c in self.terms.items()}, self.rank)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        other = self._lift(other)
        out = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                idx = tuple(x + y for x, y in zip(i, j))
                out[idx] = out.get(idx, 0) + a * b
        return GroupRingElement(out, self.rank)

    __rmul__ = __mul__

    def act(self, m: Matrix) -> "GroupRingElement":
        """Apply the automorphism of ``Z^rank`` given by the integer matrix ``m``."""
        return GroupRingElement({m.apply(i): c for i, c in self.terms.items()}, self.rank)

    def __repr__(self):
        return f"GroupRingElement({self.terms!r})"


def height(lam: GroupRingElement, xi) -> Fraction:
    """Largest value of the linear form ``xi`` on the support of ``lam``."""
    if not lam:
        raise ZeroVectorError("height of the zero element")
    return max(sum(Fraction(a) * b for a, b in zip(xi, idx)) for idx in lam.terms)


# ---------------------------------------------------------------------------
# dual coordinates

@dataclass(frozen=True)
class DualView:
    """Support of an element rewritten in the dual basis ``t_1..t_k``."""

    terms: dict
    member: bool

    def laurent_split(self) -> tuple[MultiIndex, dict]:
        """Write the element as ``t^shift`` times a power series."""
        k = len(next(iter(self.terms))) if self.terms else 0
        shift = tuple(min((i[j] for i in self.terms), default=0) for j in range(k))
        shift = tuple(min(s, 0) for s in shift)
        power = {tuple(a - s for a, s in zip(i, shift)): c for i, c in self.terms.items()}
        return shift, power


def to_dual_coordinates(lam: GroupRingElement, g: FormFamily) -> DualView:
    """Rewrite ``lam`` in the dual basis of the unimodular family ``g``.

    Membership in the minus completion means every rewritten exponent is
    nonnegative, i.e. the support lies in the cone of ``g``.
    """
    dual_basis(g)  # raises NonUnimodularFamily
    # coordinates in the dual basis are c_i = -xi_i(x)
    terms = {}
    for idx, c in lam.terms.items():
        terms[tuple(-val for val in g.evaluate(idx))] = c
    return DualView(terms, all(x >= 0 for i in terms for x in i))


def in_minus_completion(lam: GroupRingElement, g: FormFamily) -> bool:
    """Support test against the cone directly (works for any family)."""
    return all(cone_contains(g, idx) for idx in lam.terms)


# ---------------------------------------------------------------------------
# twist data

@dataclass(frozen=True)
class TwistData:
    """Automorphisms ``sigma_i`` of ``H = Z^m`` and signed units ``r_ij``.

    ``comm[i][j]`` is ``(sign, h)`` encoding ``r_ij = sign * h`` with
    ``tau_i tau_j = r_ij tau_j tau_i``.
    """

    m: int
    sigma: tuple[tuple[tuple[int, ...], ...], ...]
    comm: tuple[tuple[tuple[int, tuple[int, ...]], ...], ...]

    def __init__(self, m, sigma, comm=None):
        k = len(sigma)
        sigma = tuple(tuple(tuple(int(x) for x in row) for row in s) for s in sigma)
        if comm is None:
            comm = [[(1, (0,) * m)] * k for _ in range(k)]
        comm = tuple(tuple((int(s), tuple(int(x) for x in h)) for s, h in row) for row in comm)
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "comm", comm)
        if any(len(s) != m or any(len(r) != m for r in s) for s in sigma):
            raise InvalidTwistData("sigma matrices must be m x m")
        if len(comm) != k or any(len(r) != k for r in comm):
            raise InvalidTwistData("commutator table must be k x k")
        if any(s not in (1, -1) or len(h) != m for row in comm for s, h in row):
            raise InvalidTwistData("commutators must be signed elements of H")

    @classmethod
    def trivial(cls, k: int, m: int) -> "TwistData":
        ident = [[int(i == j) for j in range(m)] for i in range(m)]
        return cls(m, [ident] * k)

    @property
    def k(self) -> int:
        return len(self.sigma)

    def sigma_matrix(self, i: int) -> Matrix:
        return Matrix(self.sigma[i], self.m)


@lru_cache(maxsize=None)
def _sigma_power(tw: TwistData, word: tuple[int, ...]) -> Matrix:
    """Matrix of ``sigma_{w_1} o ... o sigma_{w_l}`` for a word of variable indices."""
    out = Matrix.identity(tw.m)
    for letter in word:
        out = out @ tw.sigma_matrix(letter)
    return out


@lru_cache(maxsize=None)
def _sigma_multi(tw: TwistData, idx: MultiIndex) -> Matrix:
    word = tuple(i for i, e in enumerate(idx) for _ in range(e))
    return _sigma_power(tw, word)


@lru_cache(maxsize=None)
def normal_order(tw: TwistData, word: tuple[int, ...]) -> tuple[int, tuple[int, ...], MultiIndex]:
    """Rewrite a word in the variables as ``sign * h * tau^I`` (normal order).

    Adjacent inversions ``tau_b tau_a`` (``b > a``) are swapped one at a time;
    each swap emits ``r_ba``, which is moved to the front through the letters
    preceding it.
    """
    word = list(word)
    sign, h = 1, [0] * tw.m
    changed = True
    while changed:
        changed = False
        for p in range(len(word) - 1):
            b, a = word[p], word[p + 1]
            if b > a:
                s, r = tw.comm[b][a]
                r = _sigma_power(tw, tuple(word[:p])).apply(r)
                sign *= s
                h = [x + y for x, y in zip(h, r)]
                word[p], word[p + 1] = a, b
                changed = True
    idx = tuple(word.count(i) for i in range(tw.k))
    return sign, tuple(h), idx


def _word(idx: MultiIndex) -> tuple[int, ...]:
    return tuple(i for i, e in enumerate(idx) for _ in range(e))


@lru_cache(maxsize=None)
def _product_unit(tw: TwistData, i: MultiIndex, j: MultiIndex):
    """``tau^I tau^J = sign * h * tau^{I+J}``."""
    sign, h, _ = normal_order(tw, _word(i) + _word(j))
    return sign, h


# ---------------------------------------------------------------------------
# truncated series

class TruncatedSeries:
    """Element of the order-``n`` quotient, coefficients int or ``Z[H]``.

    ``h_rank`` is None for the commutative ring with integer coefficients.
    """

    __slots__ = ("k", "n", "terms", "h_rank")

    def __init__(self, k: int, n: int, terms=None, h_rank: int | None = None):
        if n < 1:
            raise ValueError("truncation order must be >= 1")
        self.k, self.n, self.h_rank = k, n, h_rank
        clean = {}
        for idx, c in (terms or {}).items():
            idx = tuple(int(x) for x in idx)
            if len(idx) != k:
                raise ShapeError("multi-index of wrong length")
            if any(x < 0 for x in idx):
                raise NegativeIndexError(f"negative exponent in {idx}")
            if h_rank is not None and isinstance(c, int):
                c = GroupRingElement({(0,) * h_rank: c}, h_rank)
            if min(idx, default=0) >= n:
                continue
            clean[idx] = clean.get(idx, 0) + c if idx in clean else c
        self.terms = {i: c for i, c in clean.items() if c}

    @property
    def twisted(self) -> bool:
        return self.h_rank is not None

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.k, self.n, self.h_rank, self.terms) == (
            other.k, other.n, other.h_rank, other.terms)

    def __hash__(self):
        return hash((self.k, self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other):
        if self.n != other.n:
            raise OrderMismatch(f"orders {self.n} and {other.n} differ")
        if self.k != other.k or self.h_rank != other.h_rank:
            raise ShapeError("series from different rings")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for i, c in other.terms.items():
            out[i] = out[i] + c if i in out else c
        return TruncatedSeries(self.k, self.n, out, self.h_rank)

    def __neg__(self):
        return TruncatedSeries(self.k, self.n, {i: -c for i, c in self.terms.items()},
                               self.h_rank)

    def __sub__(self, other):
        return self + (-other)

    @classmethod
    def one(cls, k: int, n: int, h_rank: int | None = None) -> "TruncatedSeries":
        return cls(k, n, {(0,) * k: 1}, h_rank)

    def __repr__(self):
        return f"TruncatedSeries(k={self.k}, n={self.n}, terms={self.terms!r})"


def reduce_mod_ideal(x, n: int, k: int | None = None) -> TruncatedSeries:
    """Project a power series (mapping exponent -> coefficient) to order ``n``."""
    if isinstance(x, TruncatedSeries):
        k, h_rank, terms = x.k, x.h_rank, x.terms
    else:
        terms = dict(x)
        h_rank = None
        for c in terms.values():
            if isinstance(c, GroupRingElement):
                h_rank = c.rank
                break
        if k is None:
            if not terms:
                raise ShapeError("k needed for an empty series")
            k = len(next(iter(terms)))
    for idx in terms:
        if any(e < 0 for e in idx):
            raise NegativeIndexError(f"negative exponent in {idx}")
    return TruncatedSeries(k, n, terms, h_rank)


def mul_truncated(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Product in the commutative order-``n`` quotient."""
    a._check(b)
    if a.twisted:
        raise ShapeError("use twisted_mul_truncated for twisted coefficients")
    n, out = a.n, {}
    for i, x in a.terms.items():
        for j, y in b.terms.items():
            idx = tuple(p + q for p, q in zip(i, j))
            if min(idx) >= n:
                continue
            out[idx] = out.get(idx, 0) + x * y
    return TruncatedSeries(a.k, n, out)


@lru_cache(maxsize=None)
def _validate_cached(tw: TwistData, degree_bound: int) -> bool:
    return _validate(tw, degree_bound)


def twisted_mul_truncated(a: TruncatedSeries, b: TruncatedSeries, tw: TwistData) -> TruncatedSeries:
    """Product in the twisted order-``n`` quotient.

    ``(r tau^I)(s tau^J) = r sigma^I(s) tau^I tau^J``, then ``tau^I tau^J`` is
    put in normal order.
    """
    a._check(b)
    if not a.twisted or a.h_rank != tw.m or a.k != tw.k:
        raise ShapeError("series and twist data do not match")
    if not _validate_cached(tw, 1):
        raise InvalidTwistData("twisted multiplication is not associative for this data")
    return _raw_twisted_mul(a, b, tw)


def _validate(tw: TwistData, degree_bound: int) -> bool:
    m, k = tw.m, tw.k
    for s in tw.sigma:
        if abs(det(Matrix(s, m))) != 1:
            return False
    zero = (0,) * m
    for i in range(k):
        if tw.comm[i][i] != (1, zero):
            return False
        for j in range(k):
            s1, h1 = tw.comm[i][j]
            s2, h2 = tw.comm[j][i]
            if s1 * s2 != 1 or any(x + y for x, y in zip(h1, h2)):
                return False
    order = 3 * degree_bound + 1  # no product of three test monomials is truncated
    gens = [zero] + [tuple(int(a == b) for b in range(m)) for a in range(m)]
    monos = []
    for idx in product(range(degree_bound + 1), repeat=k):
        for g in gens:
            monos.append(TruncatedSeries(k, order, {idx: GroupRingElement({g: 1}, m)}, m))
    mul = _raw_twisted_mul
    for x in monos:
        for y in monos:
            xy = mul(x, y, tw)
            for z in monos:
                if mul(xy, z, tw) != mul(x, mul(y, z, tw), tw):
                    return False
    return True


def _raw_twisted_mul(a, b, tw):
    n, out = a.n, {}
    for i, r in a.terms.items():
        act = _sigma_multi(tw, i)
        for j, s in b.terms.items():
            idx = tuple(p + q for p, q in zip(i, j))
            if min(idx) >= n:
                continue
            sign, h = _product_unit(tw, i, j)
            term = r * s.act(act) * GroupRingElement({h: sign}, tw.m)
            out[idx] = out[idx] + term if idx in out else term
    return TruncatedSeries(a.k, n, out, tw.m)


def validate_twist(tw: TwistData, degree_bound: int = 1) -> bool:
    """Brute-force associativity check on monomials ``h tau^I``.

    ``I`` ranges over exponents with every entry ``<= degree_bound`` and ``h``
    over ``{1} U`` generators of ``H``.  Also requires unimodular ``sigma_i``,
    ``r_ii = 1`` and ``r_ij r_ji = 1``.
    """
    return _validate_cached(tw, degree_bound)


# ---------------------------------------------------------------------------
# projections to single-variable quotients

@dataclass(frozen=True)
class SingleVariableSeries:
    """Series in ``t_var`` truncated below ``t_var^n``.

    ``coefficients[p]`` maps exponents of the remaining variables to the
    coefficient of ``t_var^p`` times that monomial.
    """

    var: int
    n: int
    coefficients: dict

    def __bool__(self):
        return any(self.coefficients.values())


def j_n_project(x: TruncatedSeries, i: int, g: FormFamily | None = None) -> SingleVariableSeries:
    """Image of ``x`` in the quotient by ``t_i^n`` (variable ``i``, 0-based)."""
    if g is not None and g.k != x.k:
        raise ShapeError("family and series dimensions differ")
    if not 0 <= i < x.k:
        raise IndexError("variable index out of range")
    coeffs: dict[int, dict] = {}
    for idx, c in x.terms.items():
        p = idx[i]
        if p >= x.n:
            continue
        rest = idx[:i] + idx[i + 1:]
        coeffs.setdefault(p, {})[rest] = c
    return SingleVariableSeries(i, x.n, coeffs)


def bounded_support(k: int, n: int, bound: int) -> list[MultiIndex]:
    """Monomials of ``S_n`` with all exponents ``<= bound``."""
    return [idx for idx in product(range(bound + 1), repeat=k) if min(idx) < n]


def jn_kernel_dimension(k: int, n: int, support) -> int:
    """Nullity of the sum of all projections restricted to ``support``.

    The map sends the coefficient vector on ``support`` to the concatenated
    coefficient vectors of the ``k`` single-variable images.
    """
    support = list(support)
    rows = []
    for i in range(k):
        kept = [idx for idx in support if idx[i] < n]
        for target in kept:
            rows.append([int(idx == target) for idx in support])
    if not support:
        return 0
    if not rows:
        return len(support)
    return len(support) - rank(Matrix(rows, len(support)))
