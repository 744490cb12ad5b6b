"""JSON documents for functions, densities, sequences and families.

Rationals travel as strings ``"p/q"`` (or ``"p"`` for integers); decimals are
rejected so nothing is ever rounded.  Every parse error carries a JSON path
such as ``pieces[2][1]``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .core import (
    DecreasingTailFunction,
    Domain,
    PiecewiseAffineFunction,
    PowerTail,
    StepFunction,
    is_inf,
)
from .criteria import FunctionFamily, Geometric, SummableSequence
from .errors import DocumentError, RearrError
from .orlicz import OrliczFunction

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")

KINDS = ("step", "decreasing_tail", "orlicz_density", "sequence", "piecewise_affine", "family")


def parse_rational(value, where: str = "") -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise DocumentError(f"expected a rational string 'p/q', got {value!r}", where)
    if isinstance(value, int):
        return Fraction(value)
    if not _RATIONAL.match(value.strip()):
        raise DocumentError(f"malformed rational {value!r}", where)
    num, _, den = value.strip().partition("/")
    if den and int(den) == 0:
        raise DocumentError("zero denominator", where)
    return Fraction(int(num), int(den) if den else 1)


def format_rational(q) -> str:
    if is_inf(q):
        return "inf"
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _field(doc, key, where):
    if not isinstance(doc, dict):
        raise DocumentError("expected an object", where)
    if key not in doc:
        raise DocumentError(f"missing field {key!r}", where)
    return doc[key]


def _rationals(values, where, width=None):
    if not isinstance(values, list):
        raise DocumentError("expected a list", where)
    out = []
    for i, row in enumerate(values):
        here = f"{where}[{i}]"
        if width is None:
            out.append(parse_rational(row, here))
            continue
        if not isinstance(row, list) or len(row) != width:
            raise DocumentError(f"expected a list of {width} rationals", here)
        out.append(tuple(parse_rational(x, f"{here}[{j}]") for j, x in enumerate(row)))
    return out


def _domain(doc, where):
    value = _field(doc, "domain", where)
    try:
        return Domain(value)
    except ValueError:
        raise DocumentError(f"unknown domain {value!r} (use 'unit' or 'halfline')",
                            f"{where}.domain" if where else "domain") from None


def _sub(where, key):
    return f"{where}.{key}" if where else key


def from_document(doc, where: str = ""):
    """Build the object described by ``doc``; raises :class:`DocumentError`."""
    kind = _field(doc, "kind", where)
    try:
        if kind == "step":
            pieces = _rationals(_field(doc, "pieces", where), _sub(where, "pieces"), 3)
            return StepFunction(pieces, _domain(doc, where))
        if kind == "decreasing_tail":
            if _domain(doc, where) is not Domain.HALFLINE:
                raise DocumentError("decreasing_tail functions live on the half-line", _sub(where, "domain"))
            head = _rationals(_field(doc, "head", where), _sub(where, "head"), 3)
            tail_doc = doc.get("tail")
            tail = None
            if tail_doc is not None:
                tw = _sub(where, "tail")
                k = _field(tail_doc, "exponent", tw)
                if isinstance(k, bool) or not isinstance(k, int):
                    raise DocumentError("exponent must be an integer", _sub(tw, "exponent"))
                tail = PowerTail(parse_rational(_field(tail_doc, "start", tw), _sub(tw, "start")),
                                 parse_rational(_field(tail_doc, "coef", tw), _sub(tw, "coef")), k)
            return DecreasingTailFunction(tuple(head), tail)
        if kind == "orlicz_density":
            pieces = _rationals(_field(doc, "pieces", where), _sub(where, "pieces"), 3)
            end = doc.get("end")
            end = None if end is None else parse_rational(end, _sub(where, "end"))
            return OrliczFunction(tuple(pieces), end)
        if kind == "sequence":
            head = _rationals(_field(doc, "head", where), _sub(where, "head"))
            tail_doc = doc.get("tail")
            tail = None
            if tail_doc is not None:
                tw = _sub(where, "tail")
                tail = Geometric(parse_rational(_field(tail_doc, "C", tw), _sub(tw, "C")),
                                 parse_rational(_field(tail_doc, "rho", tw), _sub(tw, "rho")))
            return SummableSequence(tuple(head), tail)
        if kind == "piecewise_affine":
            xs = _rationals(_field(doc, "breakpoints", where), _sub(where, "breakpoints"))
            ys = _rationals(_field(doc, "values", where), _sub(where, "values"))
            slope = doc.get("final_slope")
            slope = 0 if slope is None else parse_rational(slope, _sub(where, "final_slope"))
            return PiecewiseAffineFunction(tuple(xs), tuple(ys), slope)
        if kind == "family":
            members = _field(doc, "members", where)
            if not isinstance(members, list):
                raise DocumentError("expected a list", _sub(where, "members"))
            built = [from_document(m, f"{_sub(where, 'members')}[{i}]") for i, m in enumerate(members)]
            if any(not isinstance(m, StepFunction) for m in built):
                raise DocumentError("family members must be step functions", _sub(where, "members"))
            return FunctionFamily(tuple(built), doc.get("tag"))
    except DocumentError:
        raise
    except (RearrError, ValueError, TypeError) as exc:
        raise DocumentError(str(exc), where or kind) from None
    raise DocumentError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", _sub(where, "kind"))


def _rows(rows):
    return [[format_rational(x) for x in row] for row in rows]


def to_document(obj) -> dict:
    if isinstance(obj, StepFunction):
        return {"kind": "step", "domain": obj.domain.value, "pieces": _rows(obj.pieces)}
    if isinstance(obj, DecreasingTailFunction):
        tail = None
        if obj.tail is not None:
            tail = {"start": format_rational(obj.tail.start), "coef": format_rational(obj.tail.coef),
                    "exponent": obj.tail.exponent}
        return {"kind": "decreasing_tail", "domain": "halfline", "head": _rows(obj.head), "tail": tail}
    if isinstance(obj, OrliczFunction):
        return {"kind": "orlicz_density", "pieces": _rows(obj.pieces),
                "end": None if obj.end is None else format_rational(obj.end)}
    if isinstance(obj, SummableSequence):
        tail = None
        if obj.tail is not None:
            tail = {"C": format_rational(obj.tail.C), "rho": format_rational(obj.tail.rho)}
        return {"kind": "sequence", "head": [format_rational(x) for x in obj.head], "tail": tail}
    if isinstance(obj, PiecewiseAffineFunction):
        return {"kind": "piecewise_affine",
                "breakpoints": [format_rational(x) for x in obj.breakpoints],
                "values": [format_rational(y) for y in obj.values],
                "final_slope": format_rational(obj.final_slope)}
    if isinstance(obj, FunctionFamily):
        return {"kind": "family", "tag": obj.tag, "members": [to_document(m) for m in obj.members]}
    raise TypeError(f"no document form for {type(obj).__name__}")


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", str(path)) from None
    except OSError as exc:
        raise DocumentError(exc.strerror or str(exc), str(path)) from None
    try:
        return from_document(doc)
    except DocumentError as exc:
        raise DocumentError(str(exc), str(path)) from None


def save(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(to_document(obj)))
