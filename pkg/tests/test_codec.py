from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import build_scene, random_scene
from lotforge.catalog import builtin_catalog
from lotforge.codec import canonicalize, decode_scene, encode_scene, format_number
from lotforge.errors import SceneDocumentError, VersionError
from lotforge.scene import (
    DEFAULT_LOT,
    ElementInstance,
    Pose,
    Scene,
    Vec2,
    create_scene,
)


def test_format_number():
    assert format_number(5.0) == "5"
    assert format_number(0.5) == "0.5"
    assert format_number(-0.0) == "0"
    assert format_number(1 / 3) == "0.333333"
    assert format_number(0.1234567) == "0.123457"


def test_empty_scene_round_trip():
    scene = create_scene(DEFAULT_LOT)
    text = encode_scene(scene)
    assert decode_scene(text) == scene
    assert '"format_version": "1"' in text
    assert '"instances": []' in text


def test_shuffled_instances_encode_identically(catalog):
    scene = build_scene(
        catalog,
        [("tree.oak", 10, 10), ("bench.basic", 20, 12, 90), ("goat", 30, 20, 45, 1.5)],
    )
    shuffled = Scene(
        lot=scene.lot,
        scenario_id=scene.scenario_id,
        instances=tuple(reversed(scene.instances)),
        revision=7,
    )
    assert encode_scene(scene) == encode_scene(shuffled)


def test_truncated_document_is_a_parse_error():
    scene = create_scene(DEFAULT_LOT)
    text = encode_scene(scene)[:40]
    with pytest.raises(SceneDocumentError):
        decode_scene(text)


def test_unknown_version_rejected():
    text = encode_scene(create_scene(DEFAULT_LOT)).replace('"1"', '"99"')
    with pytest.raises(VersionError):
        decode_scene(text)


@pytest.mark.parametrize("mutation", [
    ('"x": 10', '"x": "ten"'),
    ('"scale": 1', '"scale": 9'),
    ('"instances": [', '"stuff": ['),
])
def test_malformed_fields_rejected(catalog, mutation):
    scene = build_scene(catalog, [("tree.oak", 10, 10)])
    text = encode_scene(scene).replace(*mutation)
    with pytest.raises(SceneDocumentError):
        decode_scene(text)


def test_duplicate_instance_ids_rejected(catalog):
    scene = build_scene(catalog, [("tree.oak", 10, 10)])
    line = '{"id": "i0001", "entry": "tree.oak", "x": 10, "y": 10, "rot": 0, "scale": 1}'
    text = encode_scene(scene).replace(line, f"{line},\n    {line}")
    with pytest.raises(SceneDocumentError):
        decode_scene(text)


def test_round_trip_on_random_scenes(catalog):
    rng = random.Random(2024)
    for _ in range(100):
        scene = random_scene(rng, catalog)
        text = encode_scene(scene)
        decoded = decode_scene(text)
        assert decoded == scene
        # canonical encoding is byte-stable
        assert encode_scene(decoded) == text
        assert canonicalize(text) == text


def test_decode_normalizes_revision(catalog):
    scene = build_scene(catalog, [("tree.oak", 10, 10)])
    assert scene.revision == 1
    assert decode_scene(encode_scene(scene)).revision == 0


def _canonical_float(lo, hi):
    return st.floats(min_value=lo, max_value=hi, allow_nan=False).map(
        lambda v: round(v, 6)
    )


_instances = st.lists(
    st.tuples(
        st.sampled_from([e.entry_id for e in builtin_catalog().entries]),
        _canonical_float(0.5, 39.5),
        _canonical_float(0.5, 29.5),
        _canonical_float(0.0, 359.999999),
        _canonical_float(0.5, 2.0),
    ),
    max_size=8,
)


@settings(max_examples=200, deadline=None)
@given(_instances)
def test_round_trip_property(placements):
    instances = tuple(
        ElementInstance(f"i{n:04d}", entry, Pose(Vec2(x, y), rot, scale))
        for n, (entry, x, y, rot, scale) in enumerate(placements, start=1)
    )
    scene = Scene(lot=DEFAULT_LOT, scenario_id=None, instances=instances)
    text = encode_scene(scene)
    assert decode_scene(text) == scene
    assert encode_scene(decode_scene(text)) == text
