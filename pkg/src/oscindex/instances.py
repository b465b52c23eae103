"""JSON instance files.

An instance describes ``d = b0 + b1 U_h``::

    {
      "label": "P + Q U_h",
      "oscillation": {"h": 1.0, "rho": 1.0},
      "rho_prime": 0.5,                      # optional, default rho / 2
      "b0": "P",
      "b1": "Q",
      "certificate": {"kind": "pquh"},       # optional
      "tolerances": {"tol": 0.39, "margin": 1e-6, "eps": 1e-3}
    }

Complex numbers are written as a number or as ``[re, im]``.

Coefficients (all constant on ``0 < |s| < rho_prime``)::

    1.5 | [0, 1]                           constant
    {"kind": "const", "value": z}
    {"kind": "exp", "k": k}                e^{i k psi}, psi the flattened angle
    {"kind": "trig", "coeffs": [[k, z], ...]}
    {"kind": "step", "plus": z, "minus": z}
    {"kind": "product", "factors": [...]}  {"kind": "sum", "terms": [...]}

Elements of B::

    "I" | "S" | "P" | "Q" | "0"
    {"kind": "generator", "c1": coef, "c2": coef}     c1 + c2 S
    {"kind": "riesz", "a": coef, "b": coef}           a P + b Q
    {"kind": "product", "factors": [...]}  {"kind": "sum", "terms": [...]}

Certificates::

    {"kind": "pquh", "swapped": false, "left": element or null, "scale": z}
    {"kind": "diagonal", "case": "III"}
    {"kind": "constant", "w1": [[z, z], [z, z]], "s1": ..., "e0": [z, z],
     "e1": [z, z], "form": "e3", "l": 1}
    {"kind": "file", "path": "relative/or/absolute.cert"}
"""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass, replace
from functools import reduce
from importlib import resources

import numpy as np

from .certfile import load_certificate
from .factorization import (
    Certificate,
    builtin_certificate_PQUh,
    constant_certificate,
    diagonal_certificate,
    left_multiply_certificate,
    scale_certificate,
    swap_certificate,
)
from .geometry import OscillationSpec, constant, step_blend, trig_polynomial, winding_exp
from .index import IndexOptions, instance_hash
from .symbols import (
    ElementB,
    ExtendedElement,
    Generator,
    ProductB,
    SumB,
    identity,
    projection_p,
    projection_q,
    riesz_combination,
    singular,
)


class InstanceError(ValueError):
    pass


# -- normalization ---------------------------------------------------------------------


def _cnum(z):
    if isinstance(z, (list, tuple)):
        if len(z) != 2:
            raise InstanceError(f"complex number must be [re, im], got {z!r}")
        return [float(z[0]), float(z[1])]
    if isinstance(z, (int, float)) and not isinstance(z, bool):
        return [float(z), 0.0]
    if isinstance(z, complex):
        return [z.real, z.imag]
    raise InstanceError(f"not a number: {z!r}")


def _cval(z):
    return complex(z[0], z[1])


def normalize_coefficient(c):
    if not isinstance(c, dict):
        return {"kind": "const", "value": _cnum(c)}
    kind = c.get("kind")
    if kind == "const":
        return {"kind": "const", "value": _cnum(c["value"])}
    if kind == "exp":
        return {"kind": "exp", "k": int(c["k"])}
    if kind == "trig":
        items = c["coeffs"].items() if isinstance(c["coeffs"], dict) else c["coeffs"]
        return {"kind": "trig", "coeffs": sorted([[int(k), _cnum(v)] for k, v in items])}
    if kind == "step":
        return {"kind": "step", "plus": _cnum(c["plus"]), "minus": _cnum(c["minus"])}
    if kind == "product":
        return {"kind": "product", "factors": [normalize_coefficient(f) for f in c["factors"]]}
    if kind == "sum":
        return {"kind": "sum", "terms": [normalize_coefficient(f) for f in c["terms"]]}
    raise InstanceError(f"unknown coefficient kind {kind!r}")


_NAMED = ("I", "S", "P", "Q", "0")


def normalize_element(e):
    if isinstance(e, str):
        if e not in _NAMED:
            raise InstanceError(f"unknown element name {e!r}; use one of {_NAMED}")
        return {"kind": "named", "name": e}
    if not isinstance(e, dict):
        raise InstanceError(f"element must be a name or an object, got {e!r}")
    kind = e.get("kind", "generator" if "c1" in e else None)
    if kind == "named":
        return normalize_element(e["name"])
    if kind == "generator":
        return {"kind": "generator", "c1": normalize_coefficient(e.get("c1", 0)), "c2": normalize_coefficient(e.get("c2", 0))}
    if kind == "riesz":
        return {"kind": "riesz", "a": normalize_coefficient(e["a"]), "b": normalize_coefficient(e["b"])}
    if kind == "product":
        return {"kind": "product", "factors": [normalize_element(f) for f in e["factors"]]}
    if kind == "sum":
        return {"kind": "sum", "terms": [normalize_element(f) for f in e["terms"]]}
    raise InstanceError(f"unknown element kind {kind!r}")


def normalize_certificate_spec(c):
    if c is None:
        return None
    kind = c.get("kind")
    if kind == "pquh":
        left = c.get("left")
        return {
            "kind": "pquh",
            "swapped": bool(c.get("swapped", False)),
            "left": None if left is None else normalize_element(left),
            "scale": _cnum(c.get("scale", 1.0)),
        }
    if kind == "diagonal":
        return {"kind": "diagonal", "case": str(c["case"])}
    if kind == "constant":
        mat = lambda m: [[_cnum(x) for x in row] for row in m]  # noqa: E731
        return {
            "kind": "constant",
            "w1": mat(c.get("w1", [[1, 0], [0, 1]])),
            "s1": mat(c.get("s1", [[1, 0], [0, 1]])),
            "e0": [_cnum(x) for x in c["e0"]],
            "e1": [_cnum(x) for x in c["e1"]],
            "form": str(c["form"]),
            "l": int(c["l"]),
            "left": None if c.get("left") is None else normalize_element(c["left"]),
        }
    if kind == "file":
        return {"kind": "file", "path": str(c["path"])}
    raise InstanceError(f"unknown certificate kind {kind!r}")


_TOL_KEYS = ("tol", "margin", "eps", "verify_tol")


def normalize(x: dict) -> dict:
    """Canonical form of an instance: shorthand expanded, defaults filled in."""
    if not isinstance(x, dict):
        raise InstanceError("instance must be a JSON object")
    try:
        osc = x["oscillation"]
        h, rho = float(osc["h"]), float(osc.get("rho", 1.0))
        b0, b1 = x["b0"], x.get("b1", "0")
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"missing field: {exc}") from None
    if not 0 < rho < np.pi:
        raise InstanceError(f"rho must lie in (0, pi), got {rho}")
    rp = float(x.get("rho_prime", rho / 2.0))
    if not 0 < rp <= rho:
        raise InstanceError(f"rho_prime must lie in (0, rho], got {rp}")
    tols = {k: float(v) for k, v in x.get("tolerances", {}).items()}
    unknown = set(tols) - set(_TOL_KEYS)
    if unknown:
        raise InstanceError(f"unknown tolerance keys {sorted(unknown)}")
    return {
        "label": str(x.get("label", "")),
        "oscillation": {"h": h, "rho": rho},
        "rho_prime": rp,
        "b0": normalize_element(b0),
        "b1": normalize_element(b1),
        "certificate": normalize_certificate_spec(x.get("certificate")),
        "tolerances": dict(sorted(tols.items())),
    }


# -- building ---------------------------------------------------------------------------


def build_coefficient(c, rp):
    kind = c["kind"]
    if kind == "const":
        return constant(_cval(c["value"]), rp)
    if kind == "exp":
        return winding_exp(c["k"], rp)
    if kind == "trig":
        return trig_polynomial({k: _cval(v) for k, v in c["coeffs"]}, rp)
    if kind == "step":
        return step_blend(_cval(c["plus"]), _cval(c["minus"]), rp)
    if kind == "product":
        return reduce(lambda a, b: a * b, (build_coefficient(f, rp) for f in c["factors"]))
    return reduce(lambda a, b: a + b, (build_coefficient(f, rp) for f in c["terms"]))


def build_element(e, rp) -> ElementB:
    kind = e["kind"]
    if kind == "named":
        name = e["name"]
        if name == "0":
            return Generator(constant(0.0, rp), constant(0.0, rp), "0")
        return {"I": identity, "S": singular, "P": projection_p, "Q": projection_q}[name](rp)
    if kind == "generator":
        return Generator(build_coefficient(e["c1"], rp), build_coefficient(e["c2"], rp))
    if kind == "riesz":
        return riesz_combination(build_coefficient(e["a"], rp), build_coefficient(e["b"], rp))
    if kind == "product":
        return ProductB([build_element(f, rp) for f in e["factors"]])
    return SumB([build_element(f, rp) for f in e["terms"]])


@dataclass
class Instance:
    spec: dict
    element: ExtendedElement
    base_dir: str = "."

    @property
    def label(self):
        return self.spec["label"]

    @property
    def hash(self) -> str:
        return instance_hash(self.spec)

    def options(self, **overrides) -> IndexOptions:
        vals = dict(self.spec["tolerances"])
        vals.update({k: v for k, v in overrides.items() if v is not None})
        return IndexOptions(**vals)

    def certificate(self) -> Certificate | None:
        return build_certificate(self.spec["certificate"], self.element, self.base_dir)

    def serialize(self) -> str:
        return serialize(self.spec)


def build_certificate(c, d: ExtendedElement, base_dir=".") -> Certificate | None:
    if c is None:
        return None
    kind = c["kind"]
    if kind == "pquh":
        if c["swapped"]:
            cert = swap_certificate(builtin_certificate_PQUh(-d.h), -d.h)
        else:
            cert = builtin_certificate_PQUh(d.h)
        lam = _cval(c["scale"])
        if lam != 1:
            cert = scale_certificate(cert, lam)
    elif kind == "diagonal":
        return diagonal_certificate(d, c["case"])
    elif kind == "constant":
        cert = constant_certificate(
            np.array([[_cval(z) for z in row] for row in c["w1"]]),
            np.array([[_cval(z) for z in row] for row in c["s1"]]),
            [_cval(z) for z in c["e0"]],
            [_cval(z) for z in c["e1"]],
            c["form"],
            c["l"],
        )
    else:
        path = c["path"] if os.path.isabs(c["path"]) else os.path.join(base_dir, c["path"])
        return load_certificate(path)
    if c.get("left") is not None:
        cert = left_multiply_certificate(cert, build_element(c["left"], d.rho_prime))
    return cert


def parse(x: dict, base_dir: str = ".") -> Instance:
    spec = normalize(x)
    rp = spec["rho_prime"]
    osc = OscillationSpec(spec["oscillation"]["h"], spec["oscillation"]["rho"])
    d = ExtendedElement(build_element(spec["b0"], rp), build_element(spec["b1"], rp), osc, spec["label"])
    return Instance(spec, d, base_dir)


def serialize(spec: dict) -> str:
    return json.dumps(spec, indent=2, sort_keys=True)


def load(path) -> Instance:
    """Load an instance from a path or a bundled name (``bundled:<name>``)."""
    path = str(path)
    if path.startswith("bundled:"):
        return bundled(path.split(":", 1)[1])
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: invalid JSON ({exc})") from None
    return parse(raw, os.path.dirname(os.path.abspath(path)))


# -- transformations used by the robustness checks ------------------------------------------


def _scale_element_spec(e, lam):
    return {"kind": "product", "factors": [{"kind": "generator", "c1": normalize_coefficient(lam), "c2": normalize_coefficient(0)}, e]}


def scaled(inst: Instance, lam: complex) -> Instance:
    """The instance of ``lam d``; certificates are scaled along."""
    spec = copy.deepcopy(inst.spec)
    z = _cnum(complex(lam))
    spec["b0"] = _scale_element_spec(spec["b0"], z)
    spec["b1"] = _scale_element_spec(spec["b1"], z)
    spec["label"] = f"{lam} * ({spec['label']})"
    c = spec["certificate"]
    if c is not None:
        if c["kind"] == "pquh":
            c["scale"] = _cnum(_cval(c["scale"]) * complex(lam))
        elif c["kind"] == "constant":
            c["w1"] = [[_cnum(_cval(x) * complex(lam)) for x in row] for row in c["w1"]]
        elif c["kind"] != "diagonal":
            raise InstanceError("cannot scale a file certificate")
    return parse(spec, inst.base_dir)


def with_rho_prime(inst: Instance, rho_prime: float) -> Instance:
    spec = copy.deepcopy(inst.spec)
    spec["rho_prime"] = float(rho_prime)
    return parse(spec, inst.base_dir)


def with_tolerances(inst: Instance, **tols) -> Instance:
    spec = copy.deepcopy(inst.spec)
    spec["tolerances"] = dict(sorted({**spec["tolerances"], **tols}.items()))
    return replace(parse(spec, inst.base_dir))


# -- bundled instances ------------------------------------------------------------------------


def bundled_names():
    files = resources.files("oscindex") / "data"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def bundled(name: str) -> Instance:
    files = resources.files("oscindex") / "data"
    target = files / f"{name}.json"
    if not target.is_file():
        raise InstanceError(f"no bundled instance {name!r}; available: {', '.join(bundled_names())}")
    return parse(json.loads(target.read_text()), str(files))
