"""lotforge: pattern-catalog design toolkit for urban lot repair.

Compose scenes from a pattern-language element catalog, score them
deterministically on eight livability metrics, render shareable plan
views, and reproduce the rating-survey aggregation analysis.
"""

__version__ = "0.1.0"

from .catalog import Catalog, CatalogEntry, Pattern, Scenario, builtin_catalog
from .codec import decode_scene, encode_scene
from .match import MatchReport, MatchTolerances, match_replication
from .metrics import MetricVector, ScoreConfig, SunSample, score_scene
from .render import RenderOptions, render_plan
from .scene import (
    DEFAULT_LOT,
    ElementInstance,
    LotSpec,
    Pose,
    Scene,
    Vec2,
    add_element,
    create_scene,
    remove_element,
    update_pose,
    validate_scene,
)

__all__ = [
    "Catalog", "CatalogEntry", "Pattern", "Scenario", "builtin_catalog",
    "decode_scene", "encode_scene",
    "MatchReport", "MatchTolerances", "match_replication",
    "MetricVector", "ScoreConfig", "SunSample", "score_scene",
    "RenderOptions", "render_plan",
    "DEFAULT_LOT", "ElementInstance", "LotSpec", "Pose", "Scene", "Vec2",
    "add_element", "create_scene", "remove_element", "update_pose",
    "validate_scene",
]
