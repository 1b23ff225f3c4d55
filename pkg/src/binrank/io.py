"""JSON encoding of forms and results.

Forms use ``{"degree": d, "coeffs": [c_0, ..., c_d], "field": "real"|"complex"}``
with complex scalars written as ``[re, im]``.  Numbers are printed with 17
significant digits.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .critical import CriticalRank1, CriticalRankK, DegenerateCircle
from .forms import BinaryForm, LinearForm


class FormatError(ValueError):
    pass


def scalar_to_json(z):
    if isinstance(z, (complex, np.complexfloating)):
        z = complex(z)
        if z.imag == 0:
            return float(z.real)
        return [z.real, z.imag]
    if isinstance(z, (bool, np.bool_)):
        return bool(z)
    if isinstance(z, (int, np.integer)):
        return int(z)
    return float(z)


def scalar_from_json(v):
    if isinstance(v, bool):
        raise FormatError("booleans are not scalars")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    raise FormatError(f"not a scalar: {v!r}")


def linear_to_json(l: LinearForm):
    return [scalar_to_json(l.a), scalar_to_json(l.b)]


def linear_from_json(v) -> LinearForm:
    if not isinstance(v, list) or len(v) != 2:
        raise FormatError(f"a linear form is [a, b], got {v!r}")
    return LinearForm(scalar_from_json(v[0]), scalar_from_json(v[1]))


def form_to_json(f: BinaryForm) -> dict:
    return {
        "degree": f.degree,
        "coeffs": [scalar_to_json(c) for c in f.coeffs],
        "field": f.field,
    }


def form_from_json(obj, degree: int | None = None) -> BinaryForm:
    """Parse the form schema, or a bare coefficient list ``[c_0, ..., c_d]``."""
    if isinstance(obj, list):
        coeffs = obj
        field = None
        declared = degree
    elif isinstance(obj, dict):
        try:
            coeffs = obj["coeffs"]
        except KeyError:
            raise FormatError("form object needs a 'coeffs' entry") from None
        declared = obj.get("degree", degree)
        field = obj.get("field")
        if field not in (None, "real", "complex"):
            raise FormatError(f"field must be 'real' or 'complex', got {field!r}")
    else:
        raise FormatError("a form is a JSON object or a coefficient list")
    if not isinstance(coeffs, list) or not coeffs:
        raise FormatError("coeffs must be a non-empty list")
    vals = [scalar_from_json(c) for c in coeffs]
    if declared is not None and (not isinstance(declared, int) or declared != len(vals) - 1):
        raise FormatError(f"degree {declared} does not match {len(vals)} coefficients")
    if field == "complex":
        arr = np.array(vals, dtype=complex)
        return BinaryForm(arr)
    if field == "real" and any(isinstance(v, complex) for v in vals):
        raise FormatError("complex coefficient in a real form")
    return BinaryForm(np.array(vals))


def load_form(text: str, degree: int | None = None) -> BinaryForm:
    """A form from inline JSON or from a JSON file path."""
    path = Path(text)
    try:
        is_file = path.is_file()
    except OSError:
        is_file = False
    if is_file:
        text = path.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return form_from_json(obj, degree)


def eigen_to_json(pairs) -> object:
    if isinstance(pairs, DegenerateCircle):
        return {"degenerate_circle": True, "degree": pairs.degree, "eigenvalue": pairs.eigenvalue,
                "eigenvectors": "every unit vector"}
    return [eigenpair_to_json(e) for e in pairs]


def eigenpair_to_json(e: CriticalRank1) -> dict:
    return {"v": linear_to_json(e.v), "lambda": scalar_to_json(e.lam),
            "multiplicity": e.multiplicity, "real": e.is_real}


def critical_to_json(c: CriticalRankK) -> dict:
    out = {
        "k": c.k,
        "summands": [{"mu": scalar_to_json(mu), "l": linear_to_json(l)} for mu, l in c.summands],
        "distance": c.distance,
        "grad_residual": c.grad_residual,
        "cert_residual": c.cert_residual,
        "boundary": c.boundary,
        "real": c.is_real,
        "real_summands": c.real_summands,
        "cofactor": form_to_json(c.cofactor),
        "cluster_size": c.cluster_size,
    }
    if c.tangent is not None:
        out["tangent"] = {"nu": scalar_to_json(c.tangent[0]), "l": linear_to_json(c.tangent[1])}
    return out


def critical_from_json(obj: dict, degree: int) -> CriticalRankK:
    try:
        summands = tuple((scalar_from_json(s["mu"]), linear_from_json(s["l"])) for s in obj["summands"])
        tangent = None
        if "tangent" in obj:
            tangent = (scalar_from_json(obj["tangent"]["nu"]), linear_from_json(obj["tangent"]["l"]))
        return CriticalRankK(
            k=int(obj["k"]), summands=summands,
            cofactor=form_from_json(obj["cofactor"]) if "cofactor" in obj else BinaryForm(np.zeros(1)),
            distance=float(obj["distance"]), grad_residual=float(obj["grad_residual"]),
            cert_residual=float(obj["cert_residual"]), is_real=bool(obj["real"]),
            boundary=bool(obj["boundary"]), tangent=tangent,
            real_summands=bool(obj.get("real_summands", False)),
            cluster_size=int(obj.get("cluster_size", 1)), degree=degree,
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed critical point: {exc}") from None


def _fmt(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = f"{x:.17g}"
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int | None = 2, _level: int = 0) -> str:
    """``json.dumps`` with floats at 17 significant digits."""
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = "," if indent is None else ","
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[" + sep.join(items) + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps(scalar_to_json(obj), indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")
