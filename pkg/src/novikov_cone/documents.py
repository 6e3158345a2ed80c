"""JSON documents shared by the CLI subcommands.

Every document is ``{"schema": tag, "version": 1, "payload": {...}}``.
Numbers are JSON integers, ``"p/q"`` strings or ``[p, q]`` pairs; polynomials
are coefficient lists ``[c_0, c_1, ...]``.  Floating-point literals are
rejected at the tokenizer.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction

from .arith import Matrix, Poly, as_fraction
from .complexes import ChainMap, FreeComplex, RationalField, ring_from_tag
from .errors import DocumentError
from .series import GroupRingElement, TruncatedSeries, TwistData

VERSION = 1
SCHEMAS = ("matrix", "form-family", "complex", "chain-map", "series", "descent", "twist", "report")


def _no_floats(text):
    raise DocumentError(f"floating-point literal {text} not allowed; use p/q")


def loads(text: str) -> dict:
    try:
        return json.loads(text, parse_float=_no_floats,
                          parse_constant=lambda c: _no_floats(c))
    except json.JSONDecodeError as e:
        raise DocumentError(f"invalid JSON: {e}") from None


def read_document(path: str, schema: str | None = None) -> dict:
    """Load a document from a file path (``-`` for stdin); return its payload."""
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e}") from None
    return unwrap(loads(text), schema)


def unwrap(doc, schema: str | None = None) -> dict:
    if not isinstance(doc, dict) or "schema" not in doc or "payload" not in doc:
        raise DocumentError("document needs 'schema' and 'payload' keys")
    if doc["schema"] not in SCHEMAS:
        raise DocumentError(f"unknown schema {doc['schema']!r}")
    if schema is not None and doc["schema"] != schema:
        raise DocumentError(f"expected a {schema!r} document, got {doc['schema']!r}")
    if doc.get("version", VERSION) != VERSION:
        raise DocumentError(f"unsupported document version {doc.get('version')!r}")
    return doc["payload"]


def wrap(schema: str, payload) -> dict:
    return {"schema": schema, "version": VERSION, "payload": payload}


# ---------------------------------------------------------------------------
# reading values

def rational(x) -> Fraction:
    try:
        return as_fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise DocumentError(str(e)) from None


def integer(x) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        q = rational(x)
        if q.denominator != 1:
            raise DocumentError(f"{x!r} is not an integer")
        return int(q)
    return x


def field(payload, key, default=...):
    if not isinstance(payload, dict):
        raise DocumentError("payload must be an object")
    if key not in payload:
        if default is ...:
            raise DocumentError(f"missing field {key!r}")
        return default
    return payload[key]


def poly(x) -> Poly:
    """A coefficient list, or a bare number for a constant."""
    if isinstance(x, list):
        return Poly([rational(c) for c in x])
    return Poly(rational(x))


def entry(x, ring):
    # over polynomial rings a list is a coefficient list, never a [p, q] pair
    if is_polynomial_ring(ring):
        return ring.coerce(poly(x))
    return ring.coerce(rational(x))


def matrix(rows, ncols=None, ring=None) -> Matrix:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise DocumentError("a matrix is a list of rows")
    conv = (lambda x: entry(x, ring)) if ring is not None else rational
    try:
        return Matrix([[conv(x) for x in r] for r in rows], ncols)
    except DocumentError:
        raise
    except (TypeError, ValueError) as e:
        raise DocumentError(f"bad matrix: {e}") from None


def int_matrix(rows) -> list[list[int]]:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise DocumentError("a matrix is a list of rows")
    return [[integer(x) for x in r] for r in rows]


def ring(tag):
    try:
        return ring_from_tag(str(tag))
    except ValueError as e:
        raise DocumentError(str(e)) from None


def complex_(payload, check: bool = True) -> FreeComplex:
    rg = ring(field(payload, "ring", "Q"))
    ranks = [integer(r) for r in field(payload, "ranks")]
    if any(r < 0 for r in ranks):
        raise DocumentError("ranks must be nonnegative")
    bds_raw = field(payload, "boundaries", [])
    if len(bds_raw) > max(len(ranks) - 1, 0):
        raise DocumentError("more boundary matrices than degrees")
    bds = [matrix(b, ranks[i + 1], rg) for i, b in enumerate(bds_raw)]
    return FreeComplex(rg, ranks, bds, check=check)


def chain_map(payload) -> ChainMap:
    src = complex_(field(payload, "source"))
    tgt = complex_(field(payload, "target"))
    if src.ring != tgt.ring:
        raise DocumentError("source and target live over different rings")
    maps = [matrix(m, src.rank(r), src.ring) for r, m in enumerate(field(payload, "maps", []))]
    return ChainMap(src, tgt, maps)


def twist(payload) -> TwistData:
    m = integer(field(payload, "m"))
    sigma = [int_matrix(s) for s in field(payload, "sigma")]
    comm = field(payload, "comm", None)
    if comm is not None:
        comm = [[(integer(c[0]), [integer(x) for x in c[1]]) for c in row] for row in comm]
    return TwistData(m, sigma, comm)


def series(payload) -> TruncatedSeries:
    k = integer(field(payload, "k"))
    n = integer(field(payload, "n"))
    h_rank = field(payload, "h_rank", None)
    h_rank = None if h_rank is None else integer(h_rank)
    terms = {}
    for item in field(payload, "terms", []):
        if not isinstance(item, list) or len(item) != 2:
            raise DocumentError("a series term is [multi-index, coefficient]")
        idx = tuple(integer(x) for x in item[0])
        c = item[1]
        if h_rank is None:
            c = integer(c)
        else:
            if not isinstance(c, list):
                raise DocumentError("twisted coefficients are lists of [h, integer]")
            c = GroupRingElement({tuple(integer(x) for x in h): integer(v) for h, v in c}, h_rank)
        terms[idx] = terms[idx] + c if idx in terms else c
    return TruncatedSeries(k, n, terms, h_rank)


# ---------------------------------------------------------------------------
# writing values

def dump(x):
    """Recursively convert exact values to JSON-compatible data."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, Poly):
        return [dump(c) for c in x.coeffs]
    if isinstance(x, Matrix):
        return [[dump(c) for c in r] for r in x.rows]
    if isinstance(x, GroupRingElement):
        return [[list(h), c] for h, c in sorted(x.terms.items())]
    if isinstance(x, dict):
        return {str(k): dump(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [dump(v) for v in x]
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dump_complex(c: FreeComplex) -> dict:
    return {"ring": c.ring.tag, "ranks": list(c.ranks),
            "boundaries": [dump(c.boundary(r)) for r in range(1, c.top + 1)]}


def dump_chain_map(f: ChainMap) -> dict:
    return {"source": dump_complex(f.source), "target": dump_complex(f.target),
            "maps": [dump(f[r]) for r in range(f.top + 1)]}


def dump_series(s: TruncatedSeries) -> dict:
    out = {"k": s.k, "n": s.n,
           "terms": [[list(i), dump(c)] for i, c in sorted(s.terms.items())]}
    if s.h_rank is not None:
        out["h_rank"] = s.h_rank
    return out


def is_polynomial_ring(rg) -> bool:
    return type(rg) is not RationalField
