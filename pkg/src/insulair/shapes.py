"""Shape specification files (JSON).

    {"type": "polygon", "vertices": [[x, y], ...]}
    {"type": "disk", "radius": R}
    {"type": "regular_ngon", "sides": m, "perimeter": P}
    {"type": "box", "sides": [a1, ..., an]}
"""
from __future__ import annotations

import json
from pathlib import Path

from .geometry import ConvexPolygon, Disk, rectangle, regular_polygon_with_perimeter


class ShapeSpecError(ValueError):
    pass


def parse_shape(spec: dict):
    """Return a ConvexPolygon or Disk; boxes in n >= 3 come back as a list of sides."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise ShapeSpecError("shape spec must be an object with a 'type' field")
    kind = spec["type"]
    try:
        if kind == "polygon":
            return ConvexPolygon(spec["vertices"])
        if kind == "disk":
            return Disk(float(spec["radius"]))
        if kind == "regular_ngon":
            m = int(spec["sides"])
            if m < 3:
                raise ShapeSpecError("regular_ngon needs at least 3 sides")
            return regular_polygon_with_perimeter(m, float(spec["perimeter"]))
        if kind == "box":
            sides = [float(a) for a in spec["sides"]]
            if not sides or any(not a > 0 for a in sides):
                raise ShapeSpecError("box sides must be positive")
            if len(sides) == 2:
                return rectangle(*sides)
            return sides
    except (KeyError, TypeError) as exc:
        raise ShapeSpecError(f"malformed {kind!r} spec: {exc}") from exc
    except ShapeSpecError:
        raise
    except ValueError as exc:
        raise ShapeSpecError(str(exc)) from exc
    raise ShapeSpecError(f"unknown shape type {kind!r}")


def load_shape(path):
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ShapeSpecError(f"cannot read shape file {path}: {exc}") from exc
    return parse_shape(spec)


def shape_to_spec(shape) -> dict:
    if isinstance(shape, Disk):
        return {"type": "disk", "radius": shape.radius}
    if isinstance(shape, ConvexPolygon):
        return {"type": "polygon", "vertices": shape.vertices.tolist()}
    return {"type": "box", "sides": list(shape)}
