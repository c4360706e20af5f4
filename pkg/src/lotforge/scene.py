"""Scene data model and editing operations.

A Scene is a lot plus an ordered collection of placed element instances.
All operations are pure: they return new Scene values and never mutate
their inputs, so scenes can be shared across threads and requests freely.

The revision counter tracks edit-session state only. It is not part of
the persisted document and is deliberately excluded from equality.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

from .errors import (
    DimensionError,
    NotFoundError,
    PlacementError,
    PoseError,
    UnknownEntryError,
)
from .geometry import Polygon, intersects_rect, rect_polygon

if TYPE_CHECKING:
    from .catalog import Catalog

SCALE_MIN = 0.5
SCALE_MAX = 2.0
LOT_MIN = 5.0
LOT_MAX = 200.0

_INSTANCE_ID_RE = re.compile(r"^i(\d+)$")


@dataclass(frozen=True)
class Vec2:
    """Point in lot coordinates: x east, y north, meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise PoseError(f"non-finite coordinates ({self.x}, {self.y})")


@dataclass(frozen=True)
class Pose:
    """Placement of one element: position, clockwise rotation, uniform scale."""

    position: Vec2
    rotation_deg: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.rotation_deg):
            raise PoseError("non-finite rotation")
        object.__setattr__(self, "rotation_deg", self.rotation_deg % 360.0)
        if not math.isfinite(self.scale) or not (SCALE_MIN <= self.scale <= SCALE_MAX):
            raise PoseError(
                f"scale {self.scale} outside [{SCALE_MIN}, {SCALE_MAX}]"
            )


@dataclass(frozen=True)
class LotSpec:
    """The rectangle being repaired; origin at the lower-left corner."""

    width: float
    depth: float
    location_tag: str = "Los Angeles, CA"

    def __post_init__(self):
        for name, value in (("width", self.width), ("depth", self.depth)):
            if not math.isfinite(value) or not (LOT_MIN <= value <= LOT_MAX):
                raise DimensionError(
                    f"lot {name} {value} outside [{LOT_MIN}, {LOT_MAX}] m"
                )

    @property
    def area(self) -> float:
        return self.width * self.depth


DEFAULT_LOT = LotSpec(40.0, 30.0)


@dataclass(frozen=True)
class ElementInstance:
    instance_id: str
    entry_id: str
    pose: Pose


@dataclass(frozen=True, eq=False)
class Scene:
    lot: LotSpec
    scenario_id: str | None = None
    instances: tuple[ElementInstance, ...] = ()
    revision: int = 0

    def instance_map(self) -> dict[str, ElementInstance]:
        return {inst.instance_id: inst for inst in self.instances}

    def __eq__(self, other) -> bool:
        # Order-insensitive over instances; revision is session state.
        if not isinstance(other, Scene):
            return NotImplemented
        return (
            self.lot == other.lot
            and self.scenario_id == other.scenario_id
            and self.instance_map() == other.instance_map()
        )

    __hash__ = None


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    code: str
    instance_id: str | None
    message: str

    def sort_key(self) -> tuple:
        return (self.severity, self.code, self.instance_id or "")


def create_scene(lot: LotSpec, scenario_id: str | None = None) -> Scene:
    """Empty scene at revision 0: the un-repaired lot."""
    return Scene(lot=lot, scenario_id=scenario_id)


def next_instance_id(scene: Scene) -> str:
    """Smallest unused id of the form i0001, i0002, ...

    Derived from the ids already present so the result is a pure function
    of the scene (no hidden counters), surviving decode/encode and removals.
    """
    highest = 0
    for inst in scene.instances:
        m = _INSTANCE_ID_RE.match(inst.instance_id)
        if m:
            highest = max(highest, int(m.group(1)))
    return f"i{highest + 1:04d}"


def footprint_polygon(instance: ElementInstance, catalog: Catalog) -> Polygon:
    """Transformed footprint rectangle, vertices counter-clockwise."""
    entry = catalog.entry(instance.entry_id)
    pose = instance.pose
    return rect_polygon(
        entry.footprint_w,
        entry.footprint_d,
        pose.position.x,
        pose.position.y,
        rotation_deg=pose.rotation_deg,
        scale=pose.scale,
    )


def _require_on_lot(entry_id: str, pose: Pose, lot: LotSpec, catalog: Catalog) -> None:
    entry = catalog.entry(entry_id)
    poly = rect_polygon(
        entry.footprint_w, entry.footprint_d,
        pose.position.x, pose.position.y,
        rotation_deg=pose.rotation_deg, scale=pose.scale,
    )
    if not intersects_rect(poly, lot.width, lot.depth):
        raise PlacementError(
            f"{entry_id} at ({pose.position.x}, {pose.position.y}) lies outside the lot"
        )


def add_element(
    scene: Scene, entry_id: str, pose: Pose, catalog: Catalog
) -> tuple[Scene, str]:
    """Append a new instance; returns the new scene and the assigned id."""
    if not catalog.has_entry(entry_id):
        raise UnknownEntryError(f"unknown catalog entry {entry_id!r}")
    _require_on_lot(entry_id, pose, scene.lot, catalog)
    instance_id = next_instance_id(scene)
    inst = ElementInstance(instance_id=instance_id, entry_id=entry_id, pose=pose)
    new_scene = replace(
        scene, instances=scene.instances + (inst,), revision=scene.revision + 1
    )
    return new_scene, instance_id


def update_pose(scene: Scene, instance_id: str, pose: Pose) -> Scene:
    """Replace an instance's pose.

    No footprint check here (the catalog is not in scope); a pose moved
    off the lot shows up as an error in validate_scene.
    """
    if instance_id not in scene.instance_map():
        raise NotFoundError(f"no instance {instance_id!r} in scene")
    new_instances = tuple(
        replace(i, pose=pose) if i.instance_id == instance_id else i
        for i in scene.instances
    )
    return replace(scene, instances=new_instances, revision=scene.revision + 1)


def remove_element(scene: Scene, instance_id: str) -> Scene:
    if instance_id not in scene.instance_map():
        raise NotFoundError(f"no instance {instance_id!r} in scene")
    new_instances = tuple(
        i for i in scene.instances if i.instance_id != instance_id
    )
    return replace(scene, instances=new_instances, revision=scene.revision + 1)


def validate_scene(scene: Scene, catalog: Catalog) -> list[ValidationIssue]:
    """Collect issues; errors make the scene non-submittable.

    Pure and deterministic: issues come back sorted by
    (severity, code, instance_id).
    """
    issues: list[ValidationIssue] = []

    seen: set[str] = set()
    for inst in scene.instances:
        if inst.instance_id in seen:
            issues.append(ValidationIssue(
                "error", "duplicate-id", inst.instance_id,
                f"instance id {inst.instance_id!r} occurs more than once",
            ))
        seen.add(inst.instance_id)

    for inst in scene.instances:
        if not catalog.has_entry(inst.entry_id):
            issues.append(ValidationIssue(
                "error", "unknown-entry", inst.instance_id,
                f"entry {inst.entry_id!r} is not in the catalog",
            ))
            continue
        poly = footprint_polygon(inst, catalog)
        if not intersects_rect(poly, scene.lot.width, scene.lot.depth):
            issues.append(ValidationIssue(
                "error", "off-lot", inst.instance_id,
                f"footprint of {inst.instance_id} lies outside the lot",
            ))

    if scene.scenario_id is not None and not catalog.has_scenario(scene.scenario_id):
        issues.append(ValidationIssue(
            "warning", "unknown-scenario", None,
            f"scenario {scene.scenario_id!r} is not in the catalog",
        ))

    return sorted(issues, key=ValidationIssue.sort_key)
