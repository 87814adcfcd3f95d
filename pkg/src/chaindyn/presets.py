"""Built-in example systems.

Parameterized names: ``identity-<n>``, ``complete-<n>``, ``odometer-<L>``;
the remaining presets take optional keyword overrides through build_preset.
"""

from __future__ import annotations

import re
from typing import Optional

from .errors import InvalidArgumentError
from .space import build_circle_grid, build_disjoint_union, build_shift_space
from .structure import OdometerSpec, odometer_system
from .system import GeneratorSystem, system_from_descriptions

_REGISTRY = {
    "example-4.1": "two circles (32 points each), x -> 2x and x -> 3x into the other circle; chain transitive, not chain mixing",
    "example-4.2": "binary shift space (depth 6), symbol-prepend generators; chain mixing",
    "doubling-tripling": "circle grid (128 points), {2x mod 1, 3x mod 1}",
    "doubling": "circle grid (128 points), single generator 2x mod 1",
    "odometer-<L>": "dyadic adding machine truncated to L digits (e.g. odometer-6)",
    "identity-<n>": "n-point circle grid, single identity generator (e.g. identity-4)",
    "complete-<n>": "n-point circle grid, identity generator; complete relations at delta >= diameter (e.g. complete-4)",
}


def list_presets() -> list[tuple[str, str]]:
    return sorted(_REGISTRY.items())


def example_4_1(
    points_per_circle: int = 32,
    circumference: float = 1.0,
    cross_distance: float = 1.0,
) -> GeneratorSystem:
    circle = build_circle_grid(points_per_circle, circumference)
    other = build_circle_grid(points_per_circle, circumference)
    space = build_disjoint_union([circle, other], cross_distance)
    return system_from_descriptions(
        space,
        [
            {"kind": "cross_affine", "mul": 2, "add": 0.0, "part_shift": 1},
            {"kind": "cross_affine", "mul": 3, "add": 0.0, "part_shift": 1},
        ],
    )


def example_4_2(depth: int = 6) -> GeneratorSystem:
    space = build_shift_space(2, depth)
    return system_from_descriptions(
        space, [{"kind": "prepend", "symbol": 0}, {"kind": "prepend", "symbol": 1}]
    )


def doubling_tripling(points: int = 128, circumference: float = 1.0) -> GeneratorSystem:
    space = build_circle_grid(points, circumference)
    return system_from_descriptions(
        space,
        [
            {"kind": "affine_circle", "mul": 2, "add": 0.0},
            {"kind": "affine_circle", "mul": 3, "add": 0.0},
        ],
    )


def doubling(points: int = 128, circumference: float = 1.0) -> GeneratorSystem:
    space = build_circle_grid(points, circumference)
    return system_from_descriptions(
        space, [{"kind": "affine_circle", "mul": 2, "add": 0.0}]
    )


def identity_system(points: int) -> GeneratorSystem:
    space = build_circle_grid(points, 1.0)
    return system_from_descriptions(
        space, [{"kind": "affine_circle", "mul": 1, "add": 0.0}]
    )


def dyadic_odometer(depth: int) -> GeneratorSystem:
    return odometer_system(OdometerSpec(tuple([2] * depth)))


def build_preset(name: str, **overrides) -> GeneratorSystem:
    """Build a preset system by (possibly parameterized) name."""
    if name == "example-4.1":
        return example_4_1(**overrides)
    if name == "example-4.2":
        return example_4_2(**overrides)
    if name == "doubling-tripling":
        return doubling_tripling(**overrides)
    if name == "doubling":
        return doubling(**overrides)
    m = re.fullmatch(r"odometer-(\d+)", name)
    if m:
        return dyadic_odometer(int(m.group(1)))
    m = re.fullmatch(r"identity-(\d+)", name)
    if m:
        return identity_system(int(m.group(1)))
    m = re.fullmatch(r"complete-(\d+)", name)
    if m:
        return identity_system(int(m.group(1)))
    known = ", ".join(k for k, _ in list_presets())
    raise InvalidArgumentError(f"unknown preset {name!r}; known presets: {known}")


def preset_default_analysis_params(name: str) -> dict:
    """Tolerances that exercise each preset in its interesting regime."""
    if name == "example-4.1":
        return {"epsilon": 0.05, "delta": 0.05, "delta_ball": 0.1}
    if name == "example-4.2":
        return {"epsilon": 0.3, "delta": 0.3, "delta_ball": 0.3}
    if name.startswith("odometer"):
        return {
            "epsilon": 0.75,
            "delta": 0.75,
            "delta_ball": 0.5,
            "eps_ladder": [0.75, 0.375, 0.1875, 0.09375, 0.046875, 0.0234375],
        }
    if name.startswith("complete"):
        return {"epsilon": 0.5, "delta": 0.5, "delta_ball": 0.5}
    if name.startswith("identity"):
        return {"epsilon": 0.05, "delta": 0.05, "delta_ball": 0.5}
    return {"epsilon": 1.0 / 32, "delta": 1.0 / 32, "delta_ball": 0.1}
