"""Shipped fixtures: reference means table, practice scene, demo scene.

The per-scenario means table (data/reference_means.json, two-decimal values)
is the regression target for the aggregation pipeline. Only the means ship,
not raw ratings, so `reference_rating_rows` synthesizes a rating set that
reproduces every cell exactly: 20 designs per scenario with 5 ratings each
gives 100 ratings per (scenario, metric), enough resolution to land any
two-decimal mean on the nose.

The practice scene is this repo's canonical replication target for the
practice gate; the garden demo scene is the golden fixture for scoring.
"""

from __future__ import annotations

import csv
import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .catalog import METRICS
from .codec import decode_scene
from .scene import Scene

DESIGNS_PER_SCENARIO = 20
RATERS_PER_DESIGN = 5


def _data_text(name: str) -> str:
    return resources.files("lotforge.data").joinpath(name).read_text("utf-8")


@lru_cache(maxsize=1)
def reference_means() -> dict[str, dict[str, float]]:
    """Reference scenario-by-metric means, curated at two decimals."""
    return json.loads(_data_text("reference_means.json"))


def reference_rating_rows() -> list[dict[str, str]]:
    """Synthetic rating rows whose pipeline output reproduces the means table.

    For each (scenario, metric) with target mean v, the 100 ratings are
    `rem` copies of base+1 and the rest base, where base = floor(v) and
    rem = round(100*v) - 100*base. Fully deterministic; no attention rows.
    """
    rows: list[dict[str, str]] = []
    n_ratings = DESIGNS_PER_SCENARIO * RATERS_PER_DESIGN
    for scenario_id, per_metric in reference_means().items():
        for metric in METRICS:
            target = per_metric[metric]
            total = round(target * n_ratings)
            base = total // n_ratings
            rem = total - base * n_ratings
            values = [base + 1] * rem + [base] * (n_ratings - rem)
            for design_idx in range(DESIGNS_PER_SCENARIO):
                design_id = f"{scenario_id}-d{design_idx + 1:02d}"
                for rater_idx in range(RATERS_PER_DESIGN):
                    rows.append({
                        "rater_id": f"r-{design_id}-{rater_idx + 1}",
                        "design_id": design_id,
                        "scenario_id": scenario_id,
                        "metric": metric,
                        "value": str(values[design_idx * RATERS_PER_DESIGN + rater_idx]),
                        "is_attention_check": "false",
                        "expected_value": "",
                    })
    return rows


def write_reference_ratings_csv(path: str | Path) -> None:
    rows = reference_rating_rows()
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


@lru_cache(maxsize=1)
def practice_scene() -> Scene:
    """The canonical scene participants must replicate to pass the gate."""
    return decode_scene(_data_text("practice_scene.json"))


@lru_cache(maxsize=1)
def garden_demo_scene() -> Scene:
    """A fully dressed community-garden design used as the scoring golden."""
    return decode_scene(_data_text("garden_demo.json"))


@lru_cache(maxsize=1)
def garden_demo_scores() -> dict:
    """Frozen reference output of score_scene on the garden demo scene."""
    return json.loads(_data_text("garden_demo_scores.json"))
