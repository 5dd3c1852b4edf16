"""JSON file formats for polytopes, max-affine functions, valuations and constant forms.

Rationals are written as integers or "p/q" strings. Companion polytopes in a
valuation file are either inline polytope objects or paths relative to the
valuation file.
"""

import json
from fractions import Fraction
from pathlib import Path

from . import exterior as ex
from .bodies import Polytope
from .cones import ConstForm
from .monge_ampere import MaxAffine
from .poly import Poly
from .valuations import Valuation

__all__ = [
    "MalformedInput",
    "parse_rational",
    "fmt",
    "polytope_from_json",
    "polytope_to_json",
    "max_affine_from_json",
    "max_affine_to_json",
    "valuation_from_json",
    "constform_from_json",
    "constform_to_json",
    "poly_from_string",
    "load_json",
    "load_polytope",
    "load_max_affine",
    "load_valuation",
    "load_constform",
]


class MalformedInput(Exception):
    """Input that cannot be parsed into the expected object."""


def parse_rational(value):
    if isinstance(value, bool):
        raise MalformedInput(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"not a rational: {value!r}") from exc
    raise MalformedInput(f"rationals must be integers or 'p/q' strings, got {value!r}")


def fmt(value):
    """Rational to string; floats use repr so output is reproducible."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [fmt(v) for v in value]
    return value


def _require(obj, key, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise MalformedInput(f"missing field {key!r}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise MalformedInput(f"field {key!r} has the wrong type")
    return value


def polytope_from_json(obj):
    dim = _require(obj, "dim", int)
    verts = _require(obj, "vertices", list)
    pts = []
    for v in verts:
        if not isinstance(v, list) or len(v) != dim:
            raise MalformedInput(f"vertex {v!r} does not have {dim} coordinates")
        pts.append([parse_rational(c) for c in v])
    if not pts:
        raise MalformedInput("a polytope needs at least one vertex")
    return Polytope(pts, dim)


def polytope_to_json(p):
    return {"dim": p.n, "vertices": [[fmt(c) for c in v] for v in p.vertices]}


def max_affine_from_json(obj):
    dim = _require(obj, "dim", int)
    pieces = []
    for piece in _require(obj, "pieces", list):
        a = _require(piece, "a", list)
        if len(a) != dim:
            raise MalformedInput(f"slope {a!r} does not have {dim} entries")
        pieces.append(([parse_rational(c) for c in a], parse_rational(piece.get("b", 0))))
    if not pieces:
        raise MalformedInput("a max-affine function needs at least one piece")
    return MaxAffine(pieces, dim)


def max_affine_to_json(f):
    return {"dim": f.n, "pieces": [{"a": [fmt(c) for c in a], "b": fmt(b)} for a, b in f.pieces]}


def valuation_from_json(obj, base=None):
    terms = []
    n = obj.get("dim") if isinstance(obj, dict) else None
    for t in _require(obj, "terms", list):
        c = parse_rational(_require(t, "c"))
        p = _require(t, "p", int)
        comps = []
        for ref in t.get("companions", []):
            if isinstance(ref, dict):
                comps.append(polytope_from_json(ref))
            elif isinstance(ref, str):
                path = Path(ref) if base is None else Path(base) / ref
                comps.append(load_polytope(path))
            else:
                raise MalformedInput(f"bad companion reference {ref!r}")
        if n is None:
            if not comps:
                raise MalformedInput("a valuation with only degree-n terms needs a 'dim' field")
            n = comps[0].n
        terms.append((c, p, comps))
    if n is None:
        raise MalformedInput("cannot infer the dimension of the valuation")
    return Valuation(n, terms)


def constform_from_json(obj):
    """{"n", "p", "terms": [{"I", "J", "c"}]} with raw coefficients of dx_I ^ dxi_J, or "matrix" for the displayed matrix."""
    n = _require(obj, "n", int)
    p = _require(obj, "p", int)
    if "matrix" in obj:
        return ConstForm.from_matrix(n, p, [[parse_rational(v) for v in row] for row in obj["matrix"]])
    terms = {}
    for t in _require(obj, "terms", list):
        I, J = tuple(_require(t, "I", list)), tuple(_require(t, "J", list))
        if len(I) != p or len(J) != p or any(not 0 <= i < n for i in I + J):
            raise MalformedInput(f"bad multi-index pair {I}, {J}")
        terms[(tuple(sorted(I)), tuple(sorted(J)))] = parse_rational(_require(t, "c"))
    return ConstForm(ex.SuperForm(n, terms), p)


def constform_to_json(f):
    return {
        "n": f.n,
        "p": f.p,
        "terms": [{"I": list(I), "J": list(J), "c": fmt(c)} for (I, J), c in sorted(f.form.constant_values().items()) if c],
    }


def poly_from_string(text, n):
    """Parse a polynomial in x1..xn (e.g. "x1**2 + 3*x2") with rational coefficients."""
    import sympy

    names = sympy.symbols(f"x1:{n + 1}")
    try:
        expr = sympy.sympify(text, locals={str(s): s for s in names})
        poly = sympy.Poly(expr, *names, domain="QQ")
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise MalformedInput(f"not a polynomial in x1..x{n}: {text!r}") from exc
    return Poly(n, {tuple(m): Fraction(int(c.numerator), int(c.denominator)) for m, c in poly.terms()})


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON ({exc.msg})") from exc


def load_polytope(path):
    return polytope_from_json(load_json(path))


def load_max_affine(path):
    return max_affine_from_json(load_json(path))


def load_valuation(path):
    return valuation_from_json(load_json(path), base=Path(path).parent)


def load_constform(path):
    return constform_from_json(load_json(path))
