"""Loading and validating domain specifications (JSON or shorthand)."""
from __future__ import annotations

import json
import os
from importlib import resources

import jsonschema

from ..errors import DomainError
from .model import (JordanDomain, MoebiusDiskAutomorphism, RingDomain, SlitDiskDomain, CircularArcSlit,
                    build_symmetric_slit_disk, build_threefold_example, ring_from_json)
from .shapes import Circle


class SpecError(DomainError):
    """A domain specification is malformed; carries line/column for JSON syntax errors."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


def domain_schema() -> dict:
    text = resources.files("squeezelab").joinpath("schema/domain.schema.json").read_text()
    return json.loads(text)


def _parse_numbers(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise SpecError(f"bad number list {text!r}") from exc


def expand_shorthand(text: str) -> dict | None:
    """``annulus:R``, ``slit_disk:n,r,alpha``, ``disk:R``, ``punctured:x,y``, ``threefold:a``."""
    if ":" not in text or text.lstrip().startswith("{"):
        return None
    head, _, rest = text.partition(":")
    head = head.strip()
    nums = _parse_numbers(rest)
    if head == "annulus" and len(nums) == 1:
        return {"type": "annulus", "inner_radius": nums[0]}
    if head == "slit_disk" and len(nums) == 3:
        return {"type": "slit_disk", "n": int(nums[0]), "r": nums[1], "alpha": nums[2]}
    if head == "disk" and len(nums) == 1:
        return {"type": "disk", "center": [0.0, 0.0], "radius": nums[0]}
    if head == "punctured" and len(nums) == 2:
        return {"type": "ring", "outer": {"kind": "circle", "center": [0, 0], "radius": 1.0},
                "inner": {"kind": "point", "point": nums}}
    if head in ("threefold", "threefold_example") and len(nums) == 1:
        return {"type": "threefold_example", "a": nums[0]}
    raise SpecError(f"unrecognised domain shorthand {text!r}")


def read_spec(text: str) -> dict:
    """Turn a shorthand, inline JSON, or a path to a JSON file into a validated dict."""
    obj = expand_shorthand(text)
    if obj is None:
        src = text
        if not text.lstrip().startswith("{"):
            if not os.path.exists(text):
                raise SpecError(f"domain spec {text!r} is neither shorthand, JSON, nor an existing file")
            with open(text, encoding="utf-8") as fh:
                src = fh.read()
        try:
            obj = json.loads(src)
        except json.JSONDecodeError as exc:
            raise SpecError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                            exc.lineno, exc.colno) from exc
    validate_spec(obj)
    return obj


def validate_spec(obj):
    try:
        jsonschema.validate(obj, domain_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SpecError(f"domain spec fails schema at {where}: {exc.message}") from exc


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _moebius(obj):
    m = obj.get("moebius")
    if m is None:
        return None
    return MoebiusDiskAutomorphism(complex(*m["a"]), float(m.get("rotation", 0.0)))


def build_domain(obj: dict):
    """Domain object for a validated specification."""
    kind = obj["type"]
    if kind == "slit_disk":
        if "slits" in obj:
            return SlitDiskDomain(tuple(CircularArcSlit.from_json(s) for s in obj["slits"]))
        return build_symmetric_slit_disk(int(obj["n"]), float(obj["r"]), float(obj["alpha"]))
    if kind in ("ring", "annulus"):
        dom = ring_from_json(obj) if kind == "ring" else RingDomain.annulus(float(obj["inner_radius"]))
        t = _moebius(obj)
        return t.image_of_ring(dom) if t is not None else dom
    if kind == "threefold_example":
        return build_threefold_example(float(obj["a"]))
    if kind == "disk":
        c = obj.get("center", [0.0, 0.0])
        return JordanDomain(Circle(complex(c[0], c[1]), float(obj.get("radius", 1.0))))
    if kind == "barrier_set":
        from ..partition import BarrierSet

        return BarrierSet.from_json(obj)
    raise SpecError(f"unknown domain type {kind!r}")


def load_domain(text: str):
    """Parse, validate and build; returns ``(domain, spec_dict)``."""
    obj = read_spec(text)
    return build_domain(obj), obj


__all__ = ["SpecError", "build_domain", "canonical_json", "domain_schema", "expand_shorthand", "load_domain",
           "read_spec", "validate_spec"]
