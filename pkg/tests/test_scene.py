from __future__ import annotations

import random

import pytest

from conftest import build_scene, make_pose, random_scene
from lotforge.errors import (
    DimensionError,
    NotFoundError,
    PlacementError,
    PoseError,
    UnknownEntryError,
)
from lotforge.scene import (
    DEFAULT_LOT,
    ElementInstance,
    LotSpec,
    Pose,
    Scene,
    Vec2,
    add_element,
    create_scene,
    footprint_polygon,
    next_instance_id,
    remove_element,
    update_pose,
    validate_scene,
)
from oracles import affine_footprint


def test_create_scene_empty_initial_state():
    scene = create_scene(LotSpec(40, 30))
    assert scene.instances == ()
    assert scene.revision == 0
    assert scene.scenario_id is None


def test_create_scene_with_scenario_tag():
    scene = create_scene(LotSpec(40, 30), "A4")
    assert scene.scenario_id == "A4"
    assert scene.instances == ()


def test_zero_area_lot_rejected():
    with pytest.raises(DimensionError):
        LotSpec(0, 30)
    with pytest.raises(DimensionError):
        LotSpec(40, 300)


def test_pose_rotation_normalized_and_scale_bounds():
    assert Pose(Vec2(0, 0), rotation_deg=360.0).rotation_deg == 0.0
    assert Pose(Vec2(0, 0), rotation_deg=-90.0).rotation_deg == 270.0
    with pytest.raises(PoseError):
        Pose(Vec2(0, 0), scale=3.0)
    with pytest.raises(PoseError):
        Pose(Vec2(0, 0), scale=0.4)
    with pytest.raises(PoseError):
        Vec2(float("nan"), 0)


def test_add_element_basic(catalog):
    scene = create_scene(DEFAULT_LOT)
    scene2, iid = add_element(scene, "tree.oak", make_pose(10, 10), catalog)
    assert len(scene2.instances) == 1
    assert scene2.revision == 1
    assert scene.instances == ()  # input untouched (value semantics)
    assert scene2.instance_map()[iid].entry_id == "tree.oak"


def test_add_element_off_lot_rejected(catalog):
    scene = create_scene(DEFAULT_LOT)
    with pytest.raises(PlacementError):
        add_element(scene, "bench.basic", make_pose(1000, 1000), catalog)


def test_add_element_unknown_entry(catalog):
    scene = create_scene(DEFAULT_LOT)
    with pytest.raises(UnknownEntryError):
        add_element(scene, "spaceship", make_pose(10, 10), catalog)


def test_add_raised_garden_bed_exists_in_baseline(catalog):
    scene = create_scene(DEFAULT_LOT)
    scene, _ = add_element(scene, "garden.bed.raised", make_pose(5, 5), catalog)
    assert len(scene.instances) == 1


def test_update_pose_and_remove(catalog):
    scene = build_scene(catalog, [("bench.basic", 10, 10)])
    iid = scene.instances[0].instance_id
    moved = update_pose(scene, iid, make_pose(5, 5))
    assert moved.instance_map()[iid].pose.position == Vec2(5, 5)
    assert moved.revision == scene.revision + 1
    emptied = remove_element(moved, iid)
    assert emptied.instances == ()
    with pytest.raises(NotFoundError):
        update_pose(scene, "nope", make_pose(1, 1))
    with pytest.raises(NotFoundError):
        remove_element(scene, "nope")


def test_update_pose_scale_bounds_enforced(catalog):
    scene = build_scene(catalog, [("bench.basic", 10, 10)])
    with pytest.raises(PoseError):
        update_pose(scene, scene.instances[0].instance_id, make_pose(10, 10, scale=3.0))


def test_instance_ids_unique_after_removal(catalog):
    scene = build_scene(catalog, [("bench.basic", 10, 10), ("goat", 12, 10)])
    scene = remove_element(scene, scene.instances[0].instance_id)
    scene, new_id = add_element(scene, "chicken", make_pose(8, 8), catalog)
    assert new_id not in {"i0001"} or new_id != scene.instances[0].instance_id
    ids = [i.instance_id for i in scene.instances]
    assert len(ids) == len(set(ids))
    assert next_instance_id(scene) not in ids


def test_footprint_polygon_identity_and_rot90(catalog):
    scene = build_scene(catalog, [("garden.bed.raised", 0, 0)])  # 2 x 1 footprint
    inst = scene.instances[0]
    poly = footprint_polygon(inst, catalog)
    assert sorted(poly) == [(-1.0, -0.5), (-1.0, 0.5), (1.0, -0.5), (1.0, 0.5)]

    rotated = ElementInstance(inst.instance_id, inst.entry_id, make_pose(0, 0, rot=90))
    poly90 = footprint_polygon(rotated, catalog)
    assert max(abs(p[0]) for p in poly90) == pytest.approx(0.5)
    assert max(abs(p[1]) for p in poly90) == pytest.approx(1.0)


def test_footprint_polygon_matches_affine_oracle(catalog):
    entry = catalog.entry("garden.bed.raised")
    inst = ElementInstance("i0001", "garden.bed.raised", make_pose(3, 4, rot=30, scale=2))
    poly = footprint_polygon(inst, catalog)
    expected = affine_footprint(entry, inst.pose)
    for got, want in zip(poly, expected):
        assert got == pytest.approx(want)


def test_footprint_commutes_with_rigid_motion(catalog):
    rng = random.Random(7)
    entry = catalog.entry("table.picnic")
    for _ in range(50):
        x, y = rng.uniform(2, 38), rng.uniform(2, 28)
        rot = rng.uniform(0, 360)
        scale = rng.uniform(0.5, 2.0)
        inst = ElementInstance("i0001", "table.picnic", make_pose(x, y, rot, scale))
        poly = footprint_polygon(inst, catalog)
        # translation by v moves every vertex by v
        dx, dy = rng.uniform(-3, 3), rng.uniform(-3, 3)
        shifted = ElementInstance(
            "i0001", "table.picnic", make_pose(x + dx, y + dy, rot, scale)
        )
        for (px, py), (qx, qy) in zip(poly, footprint_polygon(shifted, catalog)):
            assert qx == pytest.approx(px + dx)
            assert qy == pytest.approx(py + dy)
        # rotation about the position matches the brute-force oracle
        extra = rng.uniform(0, 360)
        spun = ElementInstance(
            "i0001", "table.picnic", make_pose(x, y, (rot + extra) % 360, scale)
        )
        oracle = affine_footprint(entry, spun.pose)
        for got, want in zip(footprint_polygon(spun, catalog), oracle):
            assert got == pytest.approx(want)


def test_validate_scene_empty_ok(catalog):
    assert validate_scene(create_scene(DEFAULT_LOT), catalog) == []


def test_validate_scene_flags_unknown_entry(catalog):
    scene = Scene(
        lot=DEFAULT_LOT,
        instances=(ElementInstance("i0001", "ghost", make_pose(5, 5)),),
    )
    issues = validate_scene(scene, catalog)
    assert [i.code for i in issues] == ["unknown-entry"]
    assert issues[0].severity == "error"


def test_validate_scene_flags_duplicate_ids(catalog):
    inst = ElementInstance("i0001", "bench.basic", make_pose(5, 5))
    scene = Scene(lot=DEFAULT_LOT, instances=(inst, inst))
    codes = [i.code for i in validate_scene(scene, catalog)]
    assert "duplicate-id" in codes


def test_validate_scene_flags_off_lot_and_unknown_scenario(catalog):
    scene = Scene(
        lot=DEFAULT_LOT,
        scenario_id="Z9",
        instances=(ElementInstance("i0001", "bench.basic", make_pose(300, 300)),),
    )
    issues = validate_scene(scene, catalog)
    assert [(i.severity, i.code) for i in issues] == [
        ("error", "off-lot"), ("warning", "unknown-scenario"),
    ]


def test_validate_scene_is_pure_and_deterministic(catalog):
    rng = random.Random(3)
    for _ in range(20):
        scene = random_scene(rng, catalog)
        first = validate_scene(scene, catalog)
        assert first == validate_scene(scene, catalog)


def test_scene_equality_ignores_order_and_revision(catalog):
    scene = build_scene(catalog, [("bench.basic", 10, 10), ("goat", 20, 20)])
    reordered = Scene(
        lot=scene.lot,
        scenario_id=scene.scenario_id,
        instances=tuple(reversed(scene.instances)),
        revision=99,
    )
    assert scene == reordered
    assert scene != remove_element(scene, scene.instances[0].instance_id)
