from __future__ import annotations

import random

import pytest

from lotforge.catalog import builtin_catalog
from lotforge.scene import DEFAULT_LOT, LotSpec, Pose, Scene, Vec2, add_element, create_scene


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()


def make_pose(x: float, y: float, rot: float = 0.0, scale: float = 1.0) -> Pose:
    return Pose(position=Vec2(x, y), rotation_deg=rot, scale=scale)


def build_scene(catalog, placements, lot: LotSpec = DEFAULT_LOT, scenario=None) -> Scene:
    """placements: iterable of (entry_id, x, y[, rot[, scale]])."""
    scene = create_scene(lot, scenario)
    for placement in placements:
        entry_id, x, y = placement[:3]
        rot = placement[3] if len(placement) > 3 else 0.0
        scale = placement[4] if len(placement) > 4 else 1.0
        scene, _ = add_element(scene, entry_id, make_pose(x, y, rot, scale), catalog)
    return scene


def random_scene(
    rng: random.Random,
    catalog,
    lot: LotSpec = DEFAULT_LOT,
    min_elements: int = 0,
    max_elements: int = 12,
    entry_ids=None,
) -> Scene:
    """Random valid scene with canonical-precision (6 dp) pose values."""
    entry_ids = entry_ids or [e.entry_id for e in catalog.entries]
    scene = create_scene(lot)
    for _ in range(rng.randint(min_elements, max_elements)):
        pose = Pose(
            position=Vec2(
                round(rng.uniform(0.5, lot.width - 0.5), 6),
                round(rng.uniform(0.5, lot.depth - 0.5), 6),
            ),
            rotation_deg=round(rng.uniform(0.0, 359.9), 6),
            scale=round(rng.uniform(0.5, 2.0), 6),
        )
        scene, _ = add_element(scene, rng.choice(entry_ids), pose, catalog)
    return scene
