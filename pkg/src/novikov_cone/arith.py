"""Exact scalar, matrix and univariate polynomial arithmetic.

Entries are Python ``int``, :class:`fractions.Fraction`, or :class:`Poly`.
Nothing in this module touches floating point.
"""

from __future__ import annotations

import os
from fractions import Fraction
from itertools import zip_longest
from math import gcd

from .errors import BitLimitExceeded, ShapeError, ZeroVectorError

__all__ = [
    "Matrix", "Poly", "TPoly", "det", "rref", "rank", "nullspace", "solve",
    "inverse", "snf_int", "snf_poly", "solve_poly", "kernel_poly",
    "rank_over_fraction_field", "sin2_between", "as_fraction", "check_bits",
    "set_bit_limit",
]


# ---------------------------------------------------------------------------
# integer size guard

_BIT_LIMIT: int | None = None


def set_bit_limit(bits: int | None) -> None:
    global _BIT_LIMIT
    _BIT_LIMIT = bits


def bit_limit_from_env() -> int | None:
    raw = os.environ.get("NOVIKOV_CONE_MAX_BITS")
    return int(raw) if raw else None


def check_bits(*values) -> None:
    """Raise BitLimitExceeded if any integer (or rational part) is too large."""
    if _BIT_LIMIT is None:
        return
    for x in values:
        if isinstance(x, Fraction):
            size = max(x.numerator.bit_length(), x.denominator.bit_length())
        elif isinstance(x, int):
            size = x.bit_length()
        else:
            continue
        if size > _BIT_LIMIT:
            raise BitLimitExceeded(
                f"intermediate integer of {size} bits exceeds limit {_BIT_LIMIT}")


def as_fraction(x) -> Fraction:
    """Parse an int, Fraction, ``"p/q"`` string or ``(p, q)`` pair.

    Floats are rejected: exactness is part of the input contract.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if any(c in s for c in ".eE"):
            raise ValueError(f"floating-point literal {x!r} not allowed")
        return Fraction(s)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
            isinstance(p, int) and not isinstance(p, bool) for p in x):
        return Fraction(x[0], x[1])
    raise TypeError(f"cannot read {x!r} as an exact rational")


# ---------------------------------------------------------------------------
# polynomials over Q

class Poly:
    """Univariate polynomial in ``t`` with rational coefficients.

    ``coeffs[i]`` is the coefficient of ``t**i``; trailing zeros are stripped,
    so the zero polynomial has ``coeffs == ()``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, (int, Fraction)):
            coeffs = (coeffs,)
        c = [Fraction(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    def _wrap(self, coeffs):
        return Poly(coeffs)

    @classmethod
    def t(cls):
        return cls((0, 1))

    @classmethod
    def monomial(cls, degree: int, coeff=1):
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other.coeffs
        if isinstance(other, (int, Fraction)):
            return (Fraction(other),)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._wrap([a + b for a, b in zip_longest(self.coeffs, o, fillvalue=0)])

    __radd__ = __add__

    def __neg__(self):
        return self._wrap([-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._wrap([a - b for a, b in zip_longest(self.coeffs, o, fillvalue=0)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a = self.coeffs
        if not a or not o:
            return self._wrap(())
        out = [Fraction(0)] * (len(a) + len(o) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(o):
                    out[i + j] += x * y
        return self._wrap(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        o = other if isinstance(other, Poly) else Poly(other)
        if not o:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = o.degree
        inv = 1 / o.lc
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] * inv
            if c:
                quot[i - dq] = c
                for j, b in enumerate(o.coeffs):
                    rem[i - dq + j] -= c * b
        return Poly(quot), Poly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e: int):
        out = self._wrap((1,))
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        o = list(o)
        while o and o[-1] == 0:
            o.pop()
        return self.coeffs == tuple(o)

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, Poly) else Poly()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "Poly":
        return self * (1 / self.lc) if self else self

    def valuation(self) -> int:
        """Order of vanishing at ``t = 0`` (the zero polynomial raises)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise ValueError("valuation of the zero polynomial")

    def shift_down(self, m: int) -> "Poly":
        """Divide by ``t**m``; the low coefficients must vanish."""
        assert all(c == 0 for c in self.coeffs[:m])
        return Poly(self.coeffs[m:])

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def to_list(self) -> list[Fraction]:
        return list(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        return format_poly(self.coeffs)


def format_poly(coeffs, var: str = "t") -> str:
    if not any(coeffs):
        return "0"
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        parts.append(("-" if c < 0 else "+", body))
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, a % b
    return a.monic()


class TPoly(Poly):
    """Element of ``Q[t]/(t^n)``: a polynomial reduced below degree ``n``."""

    __slots__ = ("n",)

    def __init__(self, coeffs=(), n: int = 1):
        if isinstance(coeffs, (int, Fraction)):
            coeffs = (coeffs,)
        super().__init__(tuple(coeffs)[:n])
        self.n = n

    def _wrap(self, coeffs):
        return TPoly(coeffs, self.n)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, n = self.coeffs, self.n
        out = [Fraction(0)] * n
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(o[: n - i]):
                    out[i + j] += x * y
        return TPoly(out, n)

    __rmul__ = __mul__

    def __repr__(self):
        return f"TPoly({[str(c) for c in self.coeffs]}, n={self.n})"


# ---------------------------------------------------------------------------
# dense matrices

class Matrix:
    """Dense matrix with explicit shape; entries are any exact ring elements.

    Instances are treated as immutable: every operation returns a new matrix.
    """

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, rows, ncols: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if rows:
            width = len(rows[0])
            if ncols is not None and ncols != width:
                raise ShapeError("declared column count does not match rows")
            if any(len(r) != width for r in rows):
                raise ShapeError("ragged matrix rows")
            ncols = width
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols or 0

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, cols, nrows: int) -> "Matrix":
        cols = [tuple(c) for c in cols]
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            i, j = idx
            return self.rows[i][j]
        return self.rows[idx]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        return Matrix([self.col(j) for j in range(self.ncols)], self.nrows)

    def map(self, f) -> "Matrix":
        return Matrix([[f(x) for x in r] for r in self.rows], self.ncols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        out = []
        for r in self.rows:
            row = []
            for c in ocols:
                acc = 0
                for a, b in zip(r, c):
                    if a != 0 and b != 0:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Matrix(out, other.ncols)

    def apply(self, vec) -> tuple:
        if len(vec) != self.ncols:
            raise ShapeError("vector length does not match column count")
        out = []
        for r in self.rows:
            acc = 0
            for a, b in zip(r, vec):
                if a != 0 and b != 0:
                    acc = acc + a * b
            out.append(acc)
        return tuple(out)

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                      self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                      self.ncols)

    def __neg__(self) -> "Matrix":
        return self.map(lambda x: -x)

    def scale(self, c) -> "Matrix":
        return self.map(lambda x: c * x)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __hash__(self):
        return hash((self.shape, self.rows))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def submatrix(self, rows, cols) -> "Matrix":
        rows, cols = list(rows), list(cols)
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    @staticmethod
    def hstack(*ms: "Matrix") -> "Matrix":
        n = ms[0].nrows
        if any(m.nrows != n for m in ms):
            raise ShapeError("hstack needs equal row counts")
        return Matrix([sum((m.rows[i] for m in ms), ()) for i in range(n)],
                      sum(m.ncols for m in ms))

    @staticmethod
    def vstack(*ms: "Matrix") -> "Matrix":
        n = ms[0].ncols
        if any(m.ncols != n for m in ms):
            raise ShapeError("vstack needs equal column counts")
        return Matrix([r for m in ms for r in m.rows], n)

    @staticmethod
    def block_diag(*ms: "Matrix") -> "Matrix":
        total = sum(m.ncols for m in ms)
        out, offset = [], 0
        for m in ms:
            for r in m.rows:
                out.append([0] * offset + list(r) + [0] * (total - offset - m.ncols))
            offset += m.ncols
        return Matrix(out, total)

    def __repr__(self):
        return f"Matrix({self.tolist()!r}, ncols={self.ncols})"


def _as_matrix(m) -> Matrix:
    return m if isinstance(m, Matrix) else Matrix(m)


# ---------------------------------------------------------------------------
# determinants and linear algebra over Q

def det(m) -> int | Fraction | Poly:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m = _as_matrix(m)
    if not m.is_square():
        raise ShapeError(f"determinant of non-square {m.shape} matrix")
    n = m.nrows
    if n == 0:
        return 1
    a = m.tolist()
    # exact division: floor division is exact over Z and over Q[t]
    integral = all(isinstance(x, int) for r in a for x in r)
    if any(isinstance(x, Poly) for r in a for x in r):
        a = [[_to_poly(x) for x in r] for r in a]
        integral = True
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        piv = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * piv - a[i][k] * a[k][j]
                a[i][j] = num // prev if integral else num / prev
            check_bits(*a[i][k + 1:])
        prev = piv
    return sign * a[n - 1][n - 1]


def rref(m) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over Q and the list of pivot columns."""
    m = _as_matrix(m)
    a = [[Fraction(x) for x in r] for r in m.rows]
    pivots = []
    row = 0
    for col in range(m.ncols):
        if row == m.nrows:
            break
        p = next((i for i in range(row, m.nrows) if a[i][col] != 0), None)
        if p is None:
            continue
        a[row], a[p] = a[p], a[row]
        inv = 1 / a[row][col]
        a[row] = [x * inv for x in a[row]]
        for i in range(m.nrows):
            if i != row and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[row])]
        pivots.append(col)
        row += 1
    return Matrix(a, m.ncols), pivots


def rank(m) -> int:
    return len(rref(m)[1])


def nullspace(m) -> list[tuple[Fraction, ...]]:
    """A basis of ``{x : m x = 0}`` over Q."""
    m = _as_matrix(m)
    r, pivots = rref(m)
    free = [j for j in range(m.ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i, f]
        basis.append(tuple(v))
    return basis


def solve(a, b) -> Matrix | None:
    """A particular solution ``X`` of ``a X = b`` over Q, or None.

    Free variables are set to zero, so earlier columns of ``a`` are preferred.
    """
    a, b = _as_matrix(a), _as_matrix(b)
    if a.nrows != b.nrows:
        raise ShapeError("solve: row counts differ")
    aug, pivots = rref(Matrix.hstack(a, b))
    n = a.ncols
    if any(p >= n for p in pivots):
        return None
    x = [[Fraction(0)] * b.ncols for _ in range(n)]
    for i, p in enumerate(pivots):
        x[p] = list(aug.rows[i][n:])
    return Matrix(x, b.ncols)


def inverse(m) -> Matrix:
    m = _as_matrix(m)
    if not m.is_square():
        raise ShapeError("inverse of non-square matrix")
    x = solve(m, Matrix.identity(m.nrows))
    if x is None or rank(m) < m.nrows:
        raise ZeroDivisionError("singular matrix")
    return x


# ---------------------------------------------------------------------------
# Smith normal form over Euclidean domains

class _IntDomain:
    zero, one = 0, 1

    @staticmethod
    def norm(x):
        return abs(x)

    @staticmethod
    def divmod(a, b):
        return divmod(a, b)

    @staticmethod
    def unit_inverse(x):
        # multiplier making x canonical (nonnegative)
        return -1 if x < 0 else 1


class _PolyDomain:
    zero, one = Poly(), Poly((1,))

    @staticmethod
    def norm(x):
        return x.degree

    @staticmethod
    def divmod(a, b):
        return divmod(a, b)

    @staticmethod
    def unit_inverse(x):
        return Poly((1 / x.lc,))


def _smith(m: Matrix, dom):
    a = [list(r) for r in m.rows]
    nr, nc = m.nrows, m.ncols
    u = [[dom.one if i == j else dom.zero for j in range(nr)] for i in range(nr)]
    v = [[dom.one if i == j else dom.zero for j in range(nc)] for i in range(nc)]

    def row_axpy(i, c, k):  # row_i -= c * row_k
        a[i] = [x - c * y for x, y in zip(a[i], a[k])]
        u[i] = [x - c * y for x, y in zip(u[i], u[k])]

    def col_axpy(j, c, k):  # col_j -= c * col_k
        for r in a:
            r[j] = r[j] - c * r[k]
        for r in v:
            r[j] = r[j] - c * r[k]

    for t in range(min(nr, nc)):
        while True:
            best = None
            for i in range(t, nr):
                for j in range(t, nc):
                    x = a[i][j]
                    if x != 0 and (best is None or dom.norm(x) < dom.norm(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            a[t], a[i] = a[i], a[t]
            u[t], u[i] = u[i], u[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
            for r in v:
                r[t], r[j] = r[j], r[t]
            piv = a[t][t]
            clean = True
            for i in range(t + 1, nr):
                if a[i][t] != 0:
                    q, rem = dom.divmod(a[i][t], piv)
                    row_axpy(i, q, t)
                    clean = clean and rem == 0
            for j in range(t + 1, nc):
                if a[t][j] != 0:
                    q, rem = dom.divmod(a[t][j], piv)
                    col_axpy(j, q, t)
                    clean = clean and rem == 0
            check_bits(*a[t])
            if not clean:
                continue
            bad = next((i for i in range(t + 1, nr)
                        if any(dom.divmod(a[i][j], piv)[1] != 0 for j in range(t + 1, nc))),
                       None)
            if bad is None:
                break
            # pull the offending row into row t and redo the column sweep
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
            u[t] = [x + y for x, y in zip(u[t], u[bad])]
        if t < nr and t < nc and a[t][t] != 0:
            c = dom.unit_inverse(a[t][t])
            a[t] = [c * x for x in a[t]]
            u[t] = [c * x for x in u[t]]
    return Matrix(a, nc), Matrix(u, nr), Matrix(v, nc)


def snf_int(m) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form over Z: returns ``(D, U, V)`` with ``D = U m V``."""
    m = _as_matrix(m)
    if any(not isinstance(x, int) for r in m.rows for x in r):
        raise TypeError("snf_int needs integer entries")
    return _smith(m, _IntDomain)


def _to_poly(x) -> Poly:
    if isinstance(x, TPoly):
        return Poly(x.coeffs)
    return x if isinstance(x, Poly) else Poly(x)


def snf_poly(m) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form over Q[t]: ``D = U m V``, monic invariant factors."""
    m = _as_matrix(m).map(_to_poly)
    return _smith(m, _PolyDomain)


def invariant_factors(d: Matrix) -> list:
    return [d[i, i] for i in range(min(d.shape)) if d[i, i] != 0]


def solve_poly(a, b) -> Matrix | None:
    """Solve ``a X = b`` over Q[t] exactly, or return None."""
    a = _as_matrix(a).map(_to_poly)
    b = _as_matrix(b).map(_to_poly)
    if a.nrows != b.nrows:
        raise ShapeError("solve_poly: row counts differ")
    d, u, v = snf_poly(a)
    ub = (u @ b).map(_to_poly)
    r = len(invariant_factors(d))
    y = [[Poly()] * b.ncols for _ in range(a.ncols)]
    for i in range(ub.nrows):
        for j in range(b.ncols):
            x = ub[i, j]
            if i < r:
                q, rem = divmod(x, d[i, i])
                if rem:
                    return None
                y[i][j] = q
            elif x != 0:
                return None
    return (v @ Matrix(y, b.ncols)).map(_to_poly)


def kernel_poly(a) -> Matrix:
    """Columns form a free Q[t]-basis of ``ker a``."""
    a = _as_matrix(a).map(_to_poly)
    d, _, v = snf_poly(a)
    r = len(invariant_factors(d))
    return v.submatrix(range(v.nrows), range(r, v.ncols)).map(_to_poly)


def rank_over_fraction_field(m) -> int:
    """Rank of a polynomial matrix over Q(t), by fraction-free elimination.

    Independent of the Smith form code path.
    """
    m = _as_matrix(m).map(_to_poly)
    a = [list(r) for r in m.rows]
    r = 0
    for c in range(m.ncols):
        p = next((i for i in range(r, m.nrows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        for i in range(r + 1, m.nrows):
            if a[i][c]:
                f = a[i][c]
                row = [piv * x - f * y for x, y in zip(a[i], a[r])]
                g = Poly()
                for x in row:
                    if x:
                        g = poly_gcd(g, x) if g else x.monic()
                a[i] = [x // g for x in row] if g else row
        r += 1
    return r


# ---------------------------------------------------------------------------
# angles

def sin2_between(v, u) -> Fraction:
    """Squared sine of the angle between two rays, as an exact rational."""
    v = [Fraction(x) for x in v]
    u = [Fraction(x) for x in u]
    if len(v) != len(u):
        raise ShapeError("vectors of different length")
    vv = sum(x * x for x in v)
    uu = sum(x * x for x in u)
    if vv == 0 or uu == 0:
        raise ZeroVectorError("angle with the zero vector")
    vu = sum(x * y for x, y in zip(v, u))
    return 1 - vu * vu / (vv * uu)


def primitive(vec) -> tuple[int, ...]:
    """Primitive integer vector on the ray of a rational vector."""
    fr = [Fraction(x) for x in vec]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)
