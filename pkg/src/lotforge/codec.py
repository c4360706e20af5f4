"""Canonical scene document encoding and decoding.

The wire format is UTF-8 JSON:

    {
      "format_version": "1",
      "lot": {"width": 40, "depth": 30, "location_tag": "Los Angeles, CA"},
      "scenario_id": "A4" | null,
      "instances": [
        {"id": "i0001", "entry": "tree.oak", "x": 10, "y": 12.5, "rot": 0, "scale": 1},
        ...
      ]
    }

Encoding is canonical: instances sorted by id, fixed key order, numbers
quantized to at most 6 decimal places with trailing zeros stripped. Equal
scenes therefore always serialize to byte-identical documents, which is
what makes golden-file tests possible. Values carrying more than 6
decimals survive a round trip only up to that quantization.

The revision counter is session state and is not serialized; decoded
scenes start at revision 0.
"""

from __future__ import annotations

import json
import math

from .errors import SceneDocumentError, VersionError
from .scene import ElementInstance, LotSpec, Pose, Scene, Vec2

FORMAT_VERSION = "1"

_LOT_KEYS = {"width", "depth", "location_tag"}
_TOP_KEYS = {"format_version", "lot", "scenario_id", "instances"}
_INSTANCE_KEYS = {"id", "entry", "x", "y", "rot", "scale"}


def format_number(value: float) -> str:
    """Decimal text with at most 6 places, no exponent, no trailing zeros."""
    if value == 0:
        value = 0.0  # normalize -0.0
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return text or "0"


def encode_scene(scene: Scene) -> str:
    num = format_number
    dumps = json.dumps  # string escaping only
    lines = [
        "{",
        f'  "format_version": {dumps(FORMAT_VERSION)},',
        '  "lot": {',
        f'    "width": {num(scene.lot.width)},',
        f'    "depth": {num(scene.lot.depth)},',
        f'    "location_tag": {dumps(scene.lot.location_tag)}',
        "  },",
        f'  "scenario_id": {dumps(scene.scenario_id)},',
    ]
    insts = sorted(scene.instances, key=lambda i: i.instance_id)
    if not insts:
        lines.append('  "instances": []')
    else:
        lines.append('  "instances": [')
        for idx, inst in enumerate(insts):
            pose = inst.pose
            body = (
                f'{{"id": {dumps(inst.instance_id)}, '
                f'"entry": {dumps(inst.entry_id)}, '
                f'"x": {num(pose.position.x)}, '
                f'"y": {num(pose.position.y)}, '
                f'"rot": {num(pose.rotation_deg)}, '
                f'"scale": {num(pose.scale)}}}'
            )
            comma = "," if idx < len(insts) - 1 else ""
            lines.append(f"    {body}{comma}")
        lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _require_number(obj: dict, key: str, where: str) -> float:
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneDocumentError(f"{where}: {key!r} must be a number")
    if not math.isfinite(value):
        raise SceneDocumentError(f"{where}: {key!r} must be finite")
    return float(value)


def _require_string(obj: dict, key: str, where: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise SceneDocumentError(f"{where}: {key!r} must be a non-empty string")
    return value


def decode_scene(text: str) -> Scene:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneDocumentError(exc.msg, exc.lineno, exc.colno) from exc

    if not isinstance(doc, dict):
        raise SceneDocumentError("scene document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SceneDocumentError(f"unknown top-level keys {sorted(unknown)}")
    missing = _TOP_KEYS - set(doc)
    if missing:
        raise SceneDocumentError(f"missing top-level keys {sorted(missing)}")

    version = doc["format_version"]
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported format_version {version!r}")

    lot_doc = doc["lot"]
    if not isinstance(lot_doc, dict) or set(lot_doc) - _LOT_KEYS:
        raise SceneDocumentError("lot must be an object with width/depth/location_tag")
    try:
        lot_kwargs = {
            "width": _require_number(lot_doc, "width", "lot"),
            "depth": _require_number(lot_doc, "depth", "lot"),
        }
        if "location_tag" in lot_doc:
            lot_kwargs["location_tag"] = _require_string(lot_doc, "location_tag", "lot")
        lot = LotSpec(**lot_kwargs)
    except SceneDocumentError:
        raise
    except Exception as exc:
        raise SceneDocumentError(f"lot: {exc}") from exc

    scenario_id = doc["scenario_id"]
    if scenario_id is not None and (not isinstance(scenario_id, str) or not scenario_id):
        raise SceneDocumentError("scenario_id must be null or a non-empty string")

    inst_docs = doc["instances"]
    if not isinstance(inst_docs, list):
        raise SceneDocumentError("instances must be an array")

    instances: list[ElementInstance] = []
    seen: set[str] = set()
    for idx, inst_doc in enumerate(inst_docs):
        where = f"instances[{idx}]"
        if not isinstance(inst_doc, dict) or set(inst_doc) != _INSTANCE_KEYS:
            raise SceneDocumentError(
                f"{where}: expected exactly the keys id/entry/x/y/rot/scale"
            )
        instance_id = _require_string(inst_doc, "id", where)
        if instance_id in seen:
            raise SceneDocumentError(f"{where}: duplicate instance id {instance_id!r}")
        seen.add(instance_id)
        entry_id = _require_string(inst_doc, "entry", where)
        try:
            pose = Pose(
                position=Vec2(
                    _require_number(inst_doc, "x", where),
                    _require_number(inst_doc, "y", where),
                ),
                rotation_deg=_require_number(inst_doc, "rot", where),
                scale=_require_number(inst_doc, "scale", where),
            )
        except SceneDocumentError:
            raise
        except Exception as exc:
            raise SceneDocumentError(f"{where}: {exc}") from exc
        instances.append(
            ElementInstance(instance_id=instance_id, entry_id=entry_id, pose=pose)
        )

    return Scene(lot=lot, scenario_id=scenario_id, instances=tuple(instances))


def canonicalize(text: str) -> str:
    """Re-emit a document in canonical form."""
    return encode_scene(decode_scene(text))
