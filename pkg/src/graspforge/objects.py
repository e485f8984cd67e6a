"""Target objects: planar boxes and cylinders with a fixed out-of-plane depth."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

DEFAULT_DEPTH = 0.1
DEFAULT_DENSITY = 500.0


@dataclass(frozen=True)
class ObjectSpec:
    kind: Literal["box", "cylinder"]
    width: float  # box width or cylinder diameter [m]
    thickness: float = 0.0  # box only [m]
    depth: float = DEFAULT_DEPTH
    density: float = DEFAULT_DENSITY
    mu: float = 1.0
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("box", "cylinder"):
            raise ValueError(f"unknown object kind {self.kind!r}")
        if self.width <= 0 or self.depth <= 0 or self.density <= 0:
            raise ValueError("object dimensions and density must be positive")
        if self.kind == "box" and self.thickness <= 0:
            raise ValueError("box thickness must be positive")

    @classmethod
    def box(cls, width: float, thickness: float, **kw) -> "ObjectSpec":
        kw.setdefault("name", f"box_{width * 1e3:g}x{thickness * 1e3:g}")
        return cls("box", width, thickness, **kw)

    @classmethod
    def cylinder(cls, diameter: float, **kw) -> "ObjectSpec":
        kw.setdefault("name", f"cylinder_{diameter * 1e3:g}")
        return cls("cylinder", diameter, **kw)

    @property
    def height(self) -> float:
        return self.thickness if self.kind == "box" else self.width

    @property
    def area(self) -> float:
        if self.kind == "box":
            return self.width * self.thickness
        return math.pi * self.width**2 / 4

    @property
    def mass(self) -> float:
        return self.density * self.area * self.depth

    @property
    def inertia(self) -> float:
        if self.kind == "box":
            return self.mass * (self.width**2 + self.thickness**2) / 12
        return self.mass * self.width**2 / 8


CATALOG: tuple[ObjectSpec, ...] = (
    ObjectSpec.box(0.050, 0.010),
    ObjectSpec.box(0.050, 0.030),
    ObjectSpec.box(0.150, 0.010),
    ObjectSpec.box(0.150, 0.030),
    ObjectSpec.cylinder(0.008),
    ObjectSpec.cylinder(0.020),
    ObjectSpec.cylinder(0.080),
)
CATALOG_BY_NAME = {o.name: o for o in CATALOG}


def lookup(name: str) -> ObjectSpec:
    try:
        return CATALOG_BY_NAME[name]
    except KeyError:
        raise KeyError(
            f"unknown object {name!r}; choose one of: {', '.join(CATALOG_BY_NAME)}"
        ) from None
