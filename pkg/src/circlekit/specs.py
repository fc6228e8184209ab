"""JSON descriptions of diffeomorphisms, fields and nonsmooth elements.

The little DSL is shared by the command-line driver and the test fixtures:
maps are nested objects with a "type" tag, fields are either trigonometric
coefficient tables or line-picture bumps pulled back through the Cayley
coordinate with the (1+cosθ) weight.
"""

from __future__ import annotations

import numpy as np

from .circle import (CircleMap, ComposedMap, IdentityMap, MobiusElement,
                     MobiusMap, RotationMap, dilation, exp_field, psi_t,
                     translation)
from .errors import ToolkitError
from .fields import CayleyProfileField, TrigPolynomial, VectorField, line_bump
from .solitons import NonsmoothDiffeo


class SpecError(ToolkitError):
    """Malformed or inconsistent JSON specification."""


def parse_field(spec) -> VectorField:
    if not isinstance(spec, dict):
        raise SpecError("field spec must be an object")
    if "line_bump" in spec:
        lb = spec["line_bump"]
        try:
            profile = line_bump(float(lb["center"]), float(lb["width"]),
                                float(lb.get("height", 1.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"bad line_bump spec: {exc}") from exc
        return CayleyProfileField(profile, scale=1.0)
    if "cos" in spec or "sin" in spec:
        try:
            return TrigPolynomial(cos=[float(x) for x in spec.get("cos", [])],
                                  sin=[float(x) for x in spec.get("sin", [])])
        except (TypeError, ValueError) as exc:
            raise SpecError(f"bad trig field spec: {exc}") from exc
    raise SpecError("field spec needs 'cos'/'sin' or 'line_bump'")


def parse_diffeo(spec):
    """Build a circle map (or a nonsmooth pair) from its JSON description."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise SpecError("diffeo spec must be an object with a 'type' key")
    kind = spec["type"]
    try:
        if kind == "identity":
            return IdentityMap()
        if kind == "rotation":
            return RotationMap(float(spec["alpha"]))
        if kind == "mobius":
            return MobiusMap(MobiusElement(float(spec["a"]), float(spec["b"]),
                                           float(spec["c"]), float(spec["d"])))
        if kind == "dilation":
            return dilation(float(spec["t"]))
        if kind == "translation":
            return translation(float(spec["t"]))
        if kind == "exp_field":
            return exp_field(parse_field(spec["field"]), float(spec["t"]))
        if kind == "psi_t":
            return psi_t(float(spec["t"]))
        if kind == "compose":
            items = [parse_diffeo(s) for s in spec["items"]]
            if not items:
                raise SpecError("compose needs at least one item")
            out = items[-1]
            for m in reversed(items[:-1]):
                out = ComposedMap(m, out)
            return out
        if kind == "nonsmooth_pair":
            minus = parse_diffeo(spec["minus"])
            plus = parse_diffeo(spec["plus"])
            if not isinstance(minus, CircleMap) or not isinstance(plus, CircleMap):
                raise SpecError("nonsmooth_pair pieces must be plain maps")
            return NonsmoothDiffeo(minus, plus)
    except SpecError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad '{kind}' spec: {exc}") from exc
    raise SpecError(f"unknown diffeo type '{kind}'")


def parse_soliton(spec) -> NonsmoothDiffeo:
    """SolitonSpec: {"minus": DiffeoSpec, "plus": DiffeoSpec}."""
    if not isinstance(spec, dict) or "minus" not in spec or "plus" not in spec:
        raise SpecError("soliton spec needs 'minus' and 'plus' maps")
    minus = parse_diffeo(spec["minus"])
    plus = parse_diffeo(spec["plus"])
    if not isinstance(minus, CircleMap) or not isinstance(plus, CircleMap):
        raise SpecError("soliton pieces must be plain maps")
    return NonsmoothDiffeo(minus, plus)
