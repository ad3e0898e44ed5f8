"""JSON documents for tensors, matrix spaces and certificates.

Indices are 1-based on disk.  Field values are strings: rationals as ``"p/q"``,
prime-field elements as residues, GF(p^k) elements as integer codes
``sum c_i p^i`` in the basis 1, x, ..., x^(k-1) of the stored modulus.
Serialization is canonical (sorted entries, sorted keys), so equal objects
give byte-identical documents.
"""

from __future__ import annotations

import json
import re

from .degeneration import DegenerationCertificate, LaurentMatrix, RestrictionCertificate
from .errors import FieldError, ParseError
from .fields import ExtensionField, field_from_name
from .linalg import Matrix, MatrixSpace
from .tensor import RestrictionMaps, Tensor3

TENSOR_KIND = "tensor"
SPACE_KIND = "matrix-space"
CERT_KIND = "certificate"


_FLAT_LIST = re.compile(r"\[[^\[\]{}]*\]")


def dumps(doc) -> str:
    """Canonical JSON: sorted keys, innermost lists on one line."""
    text = json.dumps(doc, sort_keys=True, indent=1)
    return _FLAT_LIST.sub(lambda m: json.dumps(json.loads(m.group(0))), text) + "\n"


def _field_doc(field) -> dict:
    doc = {"field": field.name}
    if isinstance(field, ExtensionField):
        doc["modulus"] = list(field.modulus)
    return doc


# ------------------------------------------------------------------ serialization

def tensor_to_doc(t: Tensor3) -> dict:
    entries = [[i + 1, j + 1, k + 1, t.field.format(v)]
               for (i, j, k), v in sorted(t.nonzero().items())]
    return {"kind": TENSOR_KIND, **_field_doc(t.field), "dims": list(t.dims), "entries": entries}


def space_to_doc(s: MatrixSpace) -> dict:
    entries = []
    for m, a in enumerate(s.basis):
        for i in range(a.rows):
            for j in range(a.cols):
                if a[i, j] != s.field.zero:
                    entries.append([m + 1, i + 1, j + 1, s.field.format(a[i, j])])
    return {"kind": SPACE_KIND, **_field_doc(s.field),
            "dims": [len(s.basis), s.ambient_rows, s.ambient_cols], "entries": entries}


def _matrix_doc(m: Matrix) -> dict:
    f = m.field
    return {"rows": m.rows, "cols": m.cols,
            "entries": [[i + 1, j + 1, f.format(m[i, j])] for i in range(m.rows)
                        for j in range(m.cols) if m[i, j] != f.zero]}


def _laurent_doc(m: LaurentMatrix) -> dict:
    f = m.field
    entries = sorted((r + 1, c + 1, e, v) for r, c, e, v in m.entries())
    return {"rows": m.rows, "cols": m.cols,
            "entries": [[r, c, e, f.format(v)] for r, c, e, v in entries]}


def certificate_to_doc(cert, source: str = "input", label: str | None = None) -> dict:
    doc = {"kind": CERT_KIND, **_field_doc(cert.target.field), "source": source,
           "label": label if label is not None else cert.label,
           "target": tensor_to_doc(cert.target)}
    if isinstance(cert, RestrictionCertificate):
        doc["type"] = "restriction"
        doc["maps"] = [_matrix_doc(m) for m in cert.maps]
    else:
        doc["type"] = "degeneration"
        doc["maps"] = [_laurent_doc(m) for m in (cert.a, cert.b, cert.c)]
        doc["max_error_order"] = cert.max_error_order
    return doc


# ------------------------------------------------------------------ parsing

def _position(text: str, offset: int):
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _entry_offset(text: str, n: int, key: str = '"entries"', start: int = 0):
    """Offset of the n-th element of the first array under ``key`` at or after ``start``."""
    pos = text.find(key, start)
    if pos < 0:
        return None
    pos = text.find("[", pos)
    depth, count, in_str = 0, -1, False
    for idx in range(pos, len(text)):
        ch = text[idx]
        if in_str:
            if ch == "\\":
                continue
            if ch == '"':
                in_str = False
            continue
        if ch == '"':
            in_str = True
            if depth == 1:
                count += 1
                if count == n:
                    return idx
        elif ch == "[":
            depth += 1
            if depth == 2:
                count += 1
                if count == n:
                    return idx
        elif ch == "]":
            depth -= 1
            if depth == 0:
                return None
        elif depth == 1 and ch not in " \t\r\n,":
            # bare number or literal as an element
            if text[idx - 1] in "[, \t\r\n":
                count += 1
                if count == n:
                    return idx
    return None


class _Context:
    """Raises ParseError with a line/column pointing into the source text when possible."""

    def __init__(self, text: str | None):
        self.text = text

    def fail(self, message, entry=None, key='"entries"', start=0):
        if self.text is not None and entry is not None:
            off = _entry_offset(self.text, entry, key, start)
            if off is not None:
                raise ParseError(message, *_position(self.text, off))
        raise ParseError(message)


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _field_from_doc(doc, ctx):
    if not isinstance(doc, dict) or "field" not in doc:
        ctx.fail("document needs a 'field' key")
    field = field_from_name(str(doc["field"]))
    if "modulus" in doc:
        if not isinstance(field, ExtensionField) or list(doc["modulus"]) != list(field.modulus):
            ctx.fail(f"unsupported modulus {doc['modulus']} for {field.name}; "
                     f"expected {list(getattr(field, 'modulus', []))}")
    return field


def _dims(doc, n, ctx):
    dims = doc.get("dims")
    if (not isinstance(dims, list) or len(dims) != n
            or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 0 for d in dims)):
        ctx.fail(f"'dims' must be a list of {n} nonnegative integers")
    return tuple(dims)


def _value(field, raw, ctx, n, key='"entries"', start=0):
    if not isinstance(raw, (str, int)) or isinstance(raw, bool):
        ctx.fail(f"entry {n + 1}: value must be a string or integer", n, key, start)
    try:
        return field.parse(str(raw))
    except (ParseError, FieldError, ValueError, ZeroDivisionError) as exc:
        ctx.fail(f"entry {n + 1}: {exc}", n, key, start)


def _indexed_entries(doc, dims, field, ctx, key="entries", start=0, extra_int=0):
    """Yield (0-based index tuple, extra ints, value) with range and duplicate checks."""
    raw = doc.get(key, [])
    qkey = f'"{key}"'
    if not isinstance(raw, list):
        ctx.fail(f"'{key}' must be a list")
    seen = set()
    out = []
    width = len(dims) + extra_int + 1
    for n, e in enumerate(raw):
        if not isinstance(e, list) or len(e) != width:
            ctx.fail(f"entry {n + 1}: expected a list of {width} items", n, qkey, start)
        idx = e[:len(dims)]
        extras = e[len(dims):len(dims) + extra_int]
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in idx + extras):
            ctx.fail(f"entry {n + 1}: indices must be integers", n, qkey, start)
        for x, d in zip(idx, dims):
            if not 1 <= x <= d:
                ctx.fail(f"entry {n + 1}: index {x} out of range 1..{d}", n, qkey, start)
        coord = tuple(x - 1 for x in idx) + tuple(extras)
        if coord in seen:
            ctx.fail(f"entry {n + 1}: duplicate coordinate {tuple(idx) + tuple(extras)}",
                     n, qkey, start)
        seen.add(coord)
        out.append((coord, _value(field, e[-1], ctx, n, qkey, start)))
    return out


def tensor_from_doc(doc, text: str | None = None) -> Tensor3:
    ctx = _Context(text)
    if not isinstance(doc, dict):
        ctx.fail("tensor document must be an object")
    if doc.get("kind", TENSOR_KIND) != TENSOR_KIND:
        ctx.fail(f"expected kind '{TENSOR_KIND}', got {doc.get('kind')!r}")
    field = _field_from_doc(doc, ctx)
    dims = _dims(doc, 3, ctx)
    vals = {c: v for c, v in _indexed_entries(doc, dims, field, ctx) if v != field.zero}
    return Tensor3.from_dict(dims, vals, field)


def space_from_doc(doc, text: str | None = None) -> MatrixSpace:
    ctx = _Context(text)
    if not isinstance(doc, dict):
        ctx.fail("matrix-space document must be an object")
    if doc.get("kind", SPACE_KIND) != SPACE_KIND:
        ctx.fail(f"expected kind '{SPACE_KIND}', got {doc.get('kind')!r}")
    field = _field_from_doc(doc, ctx)
    d, rows, cols = _dims(doc, 3, ctx)
    grids = [[[field.zero] * cols for _ in range(rows)] for _ in range(d)]
    for (m, i, j), v in _indexed_entries(doc, (d, rows, cols), field, ctx):
        grids[m][i][j] = v
    mats = [Matrix.from_rows(g, field, coerce=False) if rows else Matrix.zeros(rows, cols, field)
            for g in grids]
    return MatrixSpace.span(mats, field, (rows, cols))


def certificate_from_doc(doc, text: str | None = None):
    """Returns (certificate, source name)."""
    ctx = _Context(text)
    if not isinstance(doc, dict) or doc.get("kind") != CERT_KIND:
        ctx.fail(f"expected kind '{CERT_KIND}'")
    field = _field_from_doc(doc, ctx)
    target = tensor_from_doc(doc.get("target"), None)
    if target.field != field:
        ctx.fail("certificate target is over a different field")
    maps_raw = doc.get("maps")
    if not isinstance(maps_raw, list) or len(maps_raw) != 3:
        ctx.fail("'maps' must be a list of three matrices")
    kind = doc.get("type")
    maps_pos = text.find('"maps"') if text else 0
    mats = []
    for m in maps_raw:
        if not isinstance(m, dict) or not isinstance(m.get("rows"), int) or not isinstance(m.get("cols"), int):
            ctx.fail("each map needs integer 'rows' and 'cols'")
        rows, cols = m["rows"], m["cols"]
        if kind == "restriction":
            grid = [[field.zero] * cols for _ in range(rows)]
            for (i, j), v in _indexed_entries(m, (rows, cols), field, ctx, start=maps_pos):
                grid[i][j] = v
            mats.append(Matrix.from_rows(grid, field, coerce=False) if rows
                        else Matrix.zeros(rows, cols, field))
        elif kind == "degeneration":
            ents = _indexed_entries(m, (rows, cols), field, ctx, start=maps_pos, extra_int=1)
            mats.append(LaurentMatrix.from_entries(rows, cols,
                                                   [(i, j, e, v) for (i, j, e), v in ents], field))
        else:
            ctx.fail(f"unknown certificate type {kind!r}")
        if text:
            maps_pos = text.find("}", text.find('"entries"', maps_pos)) + 1
    for m, d in zip(mats, target.dims):
        if m.rows != d:
            ctx.fail(f"map with {m.rows} rows cannot produce a factor of size {d}")
    label = str(doc.get("label", ""))
    if kind == "restriction":
        cert = RestrictionCertificate(RestrictionMaps(*mats), target, label)
    else:
        order = doc.get("max_error_order")
        if not isinstance(order, int):
            ctx.fail("degeneration certificate needs an integer 'max_error_order'")
        cert = DegenerationCertificate(*mats, target, order, label)
    return cert, str(doc.get("source", "input"))


def parse_tensor(text: str) -> Tensor3:
    return tensor_from_doc(_load(text), text)


def parse_space(text: str) -> MatrixSpace:
    return space_from_doc(_load(text), text)


def parse_certificate(text: str):
    return certificate_from_doc(_load(text), text)


def parse_document(text: str):
    """Dispatch on ``kind``: returns a Tensor3, MatrixSpace or (certificate, source)."""
    doc = _load(text)
    kind = doc.get("kind", TENSOR_KIND) if isinstance(doc, dict) else None
    if kind == TENSOR_KIND:
        return tensor_from_doc(doc, text)
    if kind == SPACE_KIND:
        return space_from_doc(doc, text)
    if kind == CERT_KIND:
        return certificate_from_doc(doc, text)
    raise ParseError(f"unknown document kind {kind!r}")


def dump_tensor(t: Tensor3) -> str:
    return dumps(tensor_to_doc(t))


def dump_space(s: MatrixSpace) -> str:
    return dumps(space_to_doc(s))


def dump_certificate(cert, source: str = "input", label: str | None = None) -> str:
    return dumps(certificate_to_doc(cert, source, label))
