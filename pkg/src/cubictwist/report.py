"""JSON reports with exact rationals.

Every rational is written as a string: ``"28899"`` for integers and
``"-7/9"`` otherwise.  Keys are sorted and the layout is fixed, so the same
inputs always produce the same bytes.
"""

from __future__ import annotations

import dataclasses
import json
import re
from fractions import Fraction

from .arith import Tri
from .field_core import ConductorData, CubicField, FieldElement, RealInterval, embed
from .lattice_geom import GramMatrix3, wr_slack
from .ramified_ideals import IdealBasis, IdealCheck, RamifiedSpec

SCHEMA_VERSION = "1"

_RATIONAL = re.compile(r"-?\d+(/\d+)?")


def rational_str(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(s):
    if not isinstance(s, str) or not _RATIONAL.fullmatch(s):
        raise ValueError(f"not an exact rational string: {s!r}")
    return Fraction(s)


def gram_dict(G):
    out = {
        "matrix": [[rational_str(x) for x in row] for row in G.matrix()],
        "det": rational_str(G.det()),
        "equal_diagonal": G.has_equal_diagonal(),
    }
    if G.has_equal_diagonal():
        out["s_u_v_w"] = [rational_str(x) for x in (G.s11, G.u, G.v, G.w)]
        out["wr_slack"] = {k: rational_str(v) for k, v in wr_slack(G).items()}
    return out


def element_dict(x):
    return [rational_str(c) for c in x.coords]


def field_dict(F, precision_bits=None):
    c0, c1, c2 = F.coeffs
    out = {
        "label": F.label,
        "polynomial": F.poly_str(),
        "coefficients_c0_c1_c2": [rational_str(c) for c in (c0, c1, c2)],
        "polynomial_discriminant": rational_str(F.poly_discriminant),
        "field_discriminant": None if F.discriminant is None else rational_str(F.discriminant),
        "conductor": None if F.conductor is None else to_jsonable(F.conductor),
        "galois_matrix": [[rational_str(x) for x in row] for row in F.galois],
        "integral_basis": None if F.integral_basis is None else [element_dict(b) for b in F.integral_basis],
    }
    if precision_bits is not None:
        out["embedding_of_rho"] = [to_jsonable(iv) for iv in embed(F.rho, precision_bits)]
        out["precision_bits"] = precision_bits
    return out


def to_jsonable(obj):
    """Recursively convert library objects into JSON-ready values."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Tri):
        return obj.value
    if isinstance(obj, (int, Fraction)):
        return rational_str(obj)
    if isinstance(obj, float):
        raise TypeError("floating-point values are not allowed in reports")
    if isinstance(obj, FieldElement):
        return element_dict(obj)
    if isinstance(obj, GramMatrix3):
        return gram_dict(obj)
    if isinstance(obj, CubicField):
        return field_dict(obj)
    if isinstance(obj, ConductorData):
        return {"m": rational_str(obj.m), "a": rational_str(obj.a), "b": rational_str(obj.b)}
    if isinstance(obj, RealInterval):
        return {"lo": rational_str(obj.lo), "hi": rational_str(obj.hi)}
    if isinstance(obj, RamifiedSpec):
        return {"label": obj.label(), "I": sorted(obj.I), "J": sorted(obj.J), "e0": obj.e0,
                "p_I": obj.p_I, "p_J": obj.p_J, "norm": obj.norm}
    if isinstance(obj, IdealBasis):
        return {"elements": [element_dict(e) for e in obj.elements],
                "claimed_norm": rational_str(obj.claimed_norm),
                "construction": obj.construction, "note": obj.note}
    if isinstance(obj, IdealCheck):
        return {"spec": to_jsonable(obj.spec), "basis": to_jsonable(obj.basis),
                "gram": gram_dict(obj.gram), "covolume_ok": obj.covolume_ok,
                "predicted_wr": obj.predicted_wr, "reason": obj.reason,
                "enumerated_wr": obj.enumerated_wr,
                "first_minimum": rational_str(obj.first_minimum), "agrees": obj.agrees}
    if dataclasses.is_dataclass(obj):
        out = {}
        for f in dataclasses.fields(obj):
            if f.name == "field":
                continue
            out[f.name] = to_jsonable(getattr(obj, f.name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_report(command, config, results, status="ok"):
    return {"schema_version": SCHEMA_VERSION, "command": command,
            "config": to_jsonable(config), "status": status, "results": to_jsonable(results)}


def serialize_report(report):
    """Canonical bytes: sorted keys, two-space indent, trailing newline."""
    return (json.dumps(to_jsonable(report), sort_keys=True, indent=2, ensure_ascii=True)
            + "\n").encode("ascii")


def parse_report(data):
    """Inverse of :func:`serialize_report`; rationals stay as strings (see :func:`parse_rational`)."""
    obj = json.loads(data)
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {obj.get('schema_version')!r}")
    return obj
