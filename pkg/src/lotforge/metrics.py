"""Deterministic geometric scoring on the eight livability metrics.

Every metric is a pure function of (scene, catalog, config): a feature
value f is computed from geometry and affordance attributes, then mapped
to a 1..7 score via

    score = 1 + 6 * clamp(f / f_sat, 0, 1)

The saturation constants and distance thresholds are calibration knobs
shipped as config defaults, not claims about human raters. An empty lot
scores exactly 1.0 on every metric.

Shadows and light pools are canopy/light discs approximated as regular
24-gons, displaced for the sun angle, clipped to the lot, and unioned via
polygon clipping, so all coverage math is exact polygon area arithmetic
(up to the documented ~1% disc polygonization error).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

from .catalog import Catalog, CatalogEntry, METRICS
from .errors import AffordanceError, ConfigError, ValidationFailed
from .geometry import (
    Polygon,
    bearing_vector,
    clip_to_rect,
    point_in_convex,
    regular_ngon,
    union_area,
)
from .scene import ElementInstance, LotSpec, Scene, validate_scene
from .scene import footprint_polygon as instance_footprint


@dataclass(frozen=True)
class SunSample:
    """One sun position: altitude above horizon, azimuth clockwise from north."""

    altitude_deg: float
    azimuth_deg: float
    weight: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.altitude_deg <= 90.0):
            raise ConfigError(f"sun altitude {self.altitude_deg} outside (0, 90]")
        object.__setattr__(self, "azimuth_deg", self.azimuth_deg % 360.0)
        if not (self.weight > 0.0):
            raise ConfigError("sun sample weight must be positive")


# Fixed Los Angeles-flavored sampling: high noon sun plus two mid-morning /
# mid-afternoon positions. A real solar ephemeris is out of scope.
DEFAULT_SUN_SAMPLES = (
    SunSample(70.0, 180.0, 0.4),
    SunSample(35.0, 120.0, 0.3),
    SunSample(35.0, 240.0, 0.3),
)


@dataclass(frozen=True)
class ScoreConfig:
    sun_samples: tuple[SunSample, ...] = DEFAULT_SUN_SAMPLES
    shade_sat: float = 0.5             # shaded fraction at which shade saturates
    play_sat: float = 20.0             # total play capacity for a 7
    recreation_sat: float = 16.0       # total adult activity capacity for a 7
    pair_target: float = 15.0          # sociability pairs for a 7
    pair_distance: float = 3.0         # meters between seat centroids to pair up
    gathering_pair_bonus: int = 2      # pairs credited per gathering-tagged element
    seat_target: float = 20.0          # seats at which the comfort seat term saturates
    comfort_seat_weight: float = 0.6
    comfort_shade_weight: float = 0.4
    safety_lighting_norm: float = 0.5  # lighting coverage divisor in the safety mix
    supervision_distance: float = 15.0 # play element counts as supervised within this
    nature_green_norm: float = 0.3     # green area / lot area divisor
    nature_animal_bonus: float = 0.05
    nature_animal_cap: int = 4
    stage_radius: float = 10.0         # open area must sit within this of a stage
    stage_open_area_m2: float = 50.0
    open_grid_step: float = 1.0
    grid_resolution: float = 0.1       # used by the sampling oracle, not scoring

    def __post_init__(self):
        if not self.sun_samples:
            raise ConfigError("at least one sun sample is required")
        total = sum(s.weight for s in self.sun_samples)
        if abs(total - 1.0) > 1e-6:
            raise ConfigError(f"sun sample weights sum to {total}, expected 1")
        positive = (
            "shade_sat", "play_sat", "recreation_sat", "pair_target",
            "pair_distance", "seat_target", "safety_lighting_norm",
            "supervision_distance", "nature_green_norm", "stage_radius",
            "stage_open_area_m2", "open_grid_step", "grid_resolution",
        )
        for name in positive:
            if not (getattr(self, name) > 0):
                raise ConfigError(f"{name} must be strictly positive")


DEFAULT_CONFIG = ScoreConfig()

_CONFIG_SCALARS = (
    "shade_sat", "play_sat", "recreation_sat", "pair_target", "pair_distance",
    "gathering_pair_bonus", "seat_target", "comfort_seat_weight",
    "comfort_shade_weight", "safety_lighting_norm", "supervision_distance",
    "nature_green_norm", "nature_animal_bonus", "nature_animal_cap",
    "stage_radius", "stage_open_area_m2", "open_grid_step", "grid_resolution",
)


def load_score_config(text: str) -> ScoreConfig:
    """Partial-override config document; unknown keys are rejected."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = set(doc) - set(_CONFIG_SCALARS) - {"sun_samples", "version"}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    kwargs = {}
    if "sun_samples" in doc:
        samples = doc["sun_samples"]
        if not isinstance(samples, list):
            raise ConfigError("sun_samples must be an array")
        kwargs["sun_samples"] = tuple(
            SunSample(s["altitude"], s["azimuth"], s.get("weight", 1.0)) for s in samples
        )
    for key in _CONFIG_SCALARS:
        if key in doc:
            kwargs[key] = doc[key]
    return replace(DEFAULT_CONFIG, **kwargs)


def config_digest(config: ScoreConfig) -> str:
    """Stable short identifier of a config, used for response caching."""
    doc = {k: getattr(config, k) for k in _CONFIG_SCALARS}
    doc["sun_samples"] = [
        (s.altitude_deg, s.azimuth_deg, s.weight) for s in config.sun_samples
    ]
    blob = json.dumps(doc, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class MetricVector:
    shade: float
    play: float
    comfort: float
    safety: float
    nature: float
    recreation: float
    entertainment: float
    sociability: float

    def as_dict(self) -> dict[str, float]:
        return {m: getattr(self, m) for m in METRICS}


@dataclass(frozen=True)
class SeatingStats:
    seats: int
    shaded_seat_fraction: float


@dataclass(frozen=True)
class ScoreBreakdown:
    """Every intermediate feeding the eight scores."""

    shaded_fraction: float
    seats: int
    shaded_seat_fraction: float
    lighting_coverage: float
    sociability_pairs: int
    play_capacity: int
    adult_activity_capacity: int
    green_area_m2: float
    green_fraction: float
    animal_count: int
    play_near_seat_fraction: float
    stage_present: bool
    open_area_near_stage_m2: float
    features: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        doc = {
            "shaded_fraction": round(self.shaded_fraction, 6),
            "seats": self.seats,
            "shaded_seat_fraction": round(self.shaded_seat_fraction, 6),
            "lighting_coverage": round(self.lighting_coverage, 6),
            "sociability_pairs": self.sociability_pairs,
            "play_capacity": self.play_capacity,
            "adult_activity_capacity": self.adult_activity_capacity,
            "green_area_m2": round(self.green_area_m2, 6),
            "green_fraction": round(self.green_fraction, 6),
            "animal_count": self.animal_count,
            "play_near_seat_fraction": round(self.play_near_seat_fraction, 6),
            "stage_present": self.stage_present,
            "open_area_near_stage_m2": round(self.open_area_near_stage_m2, 6),
            "features": {m: round(v, 6) for m, v in self.features.items()},
        }
        return doc


@dataclass(frozen=True)
class ScoreResult:
    vector: MetricVector
    breakdown: ScoreBreakdown


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def _score(f: float, f_sat: float) -> float:
    return 1.0 + 6.0 * _clamp01(f / f_sat)


def shadow_polygon(
    instance: ElementInstance, catalog: Catalog, sun: SunSample, lot: LotSpec
) -> Polygon:
    """Shadow cast by a shade-caster under one sun sample, clipped to the lot.

    The canopy disc (radius canopy_radius * scale) is displaced away from
    the sun by height * scale / tan(altitude); at 90 degrees altitude the
    offset is exactly zero. Returns [] when the shadow misses the lot.
    """
    entry = catalog.entry(instance.entry_id)
    if not entry.is_shade_caster():
        raise AffordanceError(f"entry {entry.entry_id!r} does not cast shade")
    pose = instance.pose
    if sun.altitude_deg >= 90.0:
        offset = 0.0
    else:
        offset = entry.height * pose.scale / math.tan(math.radians(sun.altitude_deg))
    dx, dy = bearing_vector(sun.azimuth_deg + 180.0)
    disc = regular_ngon(
        pose.position.x + dx * offset,
        pose.position.y + dy * offset,
        entry.canopy_radius * pose.scale,
    )
    return clip_to_rect(disc, lot.width, lot.depth)


def _resolved(scene: Scene, catalog: Catalog) -> list[tuple[ElementInstance, CatalogEntry]]:
    return [(inst, catalog.entry(inst.entry_id)) for inst in scene.instances]


def _sample_shadows(scene: Scene, catalog: Catalog, sun: SunSample) -> list[Polygon]:
    polys = []
    for inst in scene.instances:
        if catalog.entry(inst.entry_id).is_shade_caster():
            poly = shadow_polygon(inst, catalog, sun, scene.lot)
            if poly:
                polys.append(poly)
    return polys


def shaded_fraction(scene: Scene, catalog: Catalog, config: ScoreConfig = DEFAULT_CONFIG) -> float:
    """Weighted fraction of the lot inside the union of all shadows."""
    lot_area = scene.lot.area
    total = 0.0
    for sun in config.sun_samples:
        polys = _sample_shadows(scene, catalog, sun)
        total += sun.weight * (union_area(polys) / lot_area)
    return total


def seating_stats(scene: Scene, catalog: Catalog, config: ScoreConfig = DEFAULT_CONFIG) -> SeatingStats:
    """Total seats and the capacity-weighted fraction of them in shade.

    A seating element counts as shaded when its centroid sits inside the
    shadow union for at least half of the total sample weight.
    """
    seated = [(i, e) for i, e in _resolved(scene, catalog) if e.seat_capacity > 0]
    seats = sum(e.seat_capacity for _, e in seated)
    if not seated:
        return SeatingStats(0, 0.0)

    shadow_sets = [_sample_shadows(scene, catalog, sun) for sun in config.sun_samples]
    shaded_capacity = 0
    for inst, entry in seated:
        px, py = inst.pose.position.x, inst.pose.position.y
        weight_in_shade = sum(
            sun.weight
            for sun, polys in zip(config.sun_samples, shadow_sets)
            if any(point_in_convex(px, py, poly) for poly in polys)
        )
        if weight_in_shade >= 0.5:
            shaded_capacity += entry.seat_capacity
    return SeatingStats(seats, shaded_capacity / seats)


def lighting_coverage(scene: Scene, catalog: Catalog) -> float:
    """Fraction of the lot covered by the union of all light pools."""
    polys = []
    for inst, entry in _resolved(scene, catalog):
        if entry.light_radius > 0:
            disc = regular_ngon(
                inst.pose.position.x,
                inst.pose.position.y,
                entry.light_radius * inst.pose.scale,
            )
            clipped = clip_to_rect(disc, scene.lot.width, scene.lot.depth)
            if clipped:
                polys.append(clipped)
    return union_area(polys) / scene.lot.area


def sociability_pairs(scene: Scene, catalog: Catalog, config: ScoreConfig = DEFAULT_CONFIG) -> int:
    """Seating pairs close enough to talk, plus gathering-element bonuses."""
    seat_positions = [
        (i.pose.position.x, i.pose.position.y)
        for i, e in _resolved(scene, catalog)
        if e.seat_capacity > 0
    ]
    pairs = 0
    for a in range(len(seat_positions)):
        for b in range(a + 1, len(seat_positions)):
            if math.dist(seat_positions[a], seat_positions[b]) <= config.pair_distance:
                pairs += 1
    gathering = sum(1 for _, e in _resolved(scene, catalog) if "gathering" in e.tags)
    return pairs + config.gathering_pair_bonus * gathering


def _play_near_seat_fraction(
    placed: list[tuple[ElementInstance, CatalogEntry]], config: ScoreConfig
) -> float:
    play = [i for i, e in placed if e.play_capacity > 0]
    if not play:
        return 0.0
    seats = [i for i, e in placed if e.seat_capacity > 0]
    if not seats:
        return 0.0
    near = 0
    for p in play:
        pp = (p.pose.position.x, p.pose.position.y)
        if any(
            math.dist(pp, (s.pose.position.x, s.pose.position.y)) <= config.supervision_distance
            for s in seats
        ):
            near += 1
    return near / len(play)


def _open_area_near_stage(
    scene: Scene,
    placed: list[tuple[ElementInstance, CatalogEntry]],
    footprints: list[Polygon],
    config: ScoreConfig,
) -> float:
    """Square meters of unoccupied 1 m grid cells within reach of a stage.

    Counting stops once the configured threshold is reached; the
    entertainment indicator only needs "enough", not the exact total.
    """
    stages = [
        (i.pose.position.x, i.pose.position.y)
        for i, e in placed
        if "stage-like" in e.tags
    ]
    if not stages:
        return 0.0
    step = config.open_grid_step
    cell = step * step
    boxes = []
    for poly in footprints:
        xs = [p[0] for p in poly]
        ys = [p[1] for p in poly]
        boxes.append((min(xs), min(ys), max(xs), max(ys)))
    radius = config.stage_radius
    target = config.stage_open_area_m2
    total = 0.0
    nx = int(scene.lot.width / step)
    ny = int(scene.lot.depth / step)
    for ix in range(nx):
        x = (ix + 0.5) * step
        for iy in range(ny):
            y = (iy + 0.5) * step
            if not any(math.dist((x, y), s) <= radius for s in stages):
                continue
            occupied = False
            for (bx0, by0, bx1, by1), poly in zip(boxes, footprints):
                if bx0 <= x <= bx1 and by0 <= y <= by1 and point_in_convex(x, y, poly):
                    occupied = True
                    break
            if not occupied:
                total += cell
                if total >= target:
                    return total
    return total


def score_scene(
    scene: Scene, catalog: Catalog, config: ScoreConfig = DEFAULT_CONFIG
) -> ScoreResult:
    """Score a valid scene on all eight metrics with a full breakdown."""
    issues = [i for i in validate_scene(scene, catalog) if i.severity == "error"]
    if issues:
        raise ValidationFailed(issues)

    placed = _resolved(scene, catalog)
    footprints = [instance_footprint(inst, catalog) for inst in scene.instances]
    lot_area = scene.lot.area

    shade_frac = shaded_fraction(scene, catalog, config)
    seating = seating_stats(scene, catalog, config)
    coverage = lighting_coverage(scene, catalog)
    pairs = sociability_pairs(scene, catalog, config)
    play_capacity = sum(e.play_capacity for _, e in placed)
    adult_capacity = sum(e.adult_activity_capacity for _, e in placed)
    # Green area is a physical area, so it scales with the footprint (scale^2).
    green_area = sum(e.green_area * i.pose.scale ** 2 for i, e in placed)
    green_fraction = green_area / lot_area
    animal_count = sum(1 for _, e in placed if e.category == "animal")
    near_fraction = _play_near_seat_fraction(placed, config)
    stage_present = any("stage-like" in e.tags for _, e in placed)
    open_area = _open_area_near_stage(scene, placed, footprints, config)

    features = {
        "shade": shade_frac,
        "play": float(play_capacity),
        "comfort": (
            config.comfort_seat_weight * min(1.0, seating.seats / config.seat_target)
            + config.comfort_shade_weight * seating.shaded_seat_fraction
        ),
        "safety": (
            0.5 * (coverage / config.safety_lighting_norm)
            + 0.5 * near_fraction
        ),
        "nature": (
            green_fraction / config.nature_green_norm
            + config.nature_animal_bonus * min(animal_count, config.nature_animal_cap)
        ),
        "recreation": float(adult_capacity),
        "entertainment": (
            0.5 * (1.0 if stage_present else 0.0)
            + 0.5 * (1.0 if open_area >= config.stage_open_area_m2 else 0.0)
        ),
        "sociability": float(pairs),
    }
    saturations = {
        "shade": config.shade_sat,
        "play": config.play_sat,
        "comfort": 1.0,
        "safety": 1.0,
        "nature": 1.0,
        "recreation": config.recreation_sat,
        "entertainment": 1.0,
        "sociability": config.pair_target,
    }
    vector = MetricVector(**{m: _score(features[m], saturations[m]) for m in METRICS})
    breakdown = ScoreBreakdown(
        shaded_fraction=shade_frac,
        seats=seating.seats,
        shaded_seat_fraction=seating.shaded_seat_fraction,
        lighting_coverage=coverage,
        sociability_pairs=pairs,
        play_capacity=play_capacity,
        adult_activity_capacity=adult_capacity,
        green_area_m2=green_area,
        green_fraction=green_fraction,
        animal_count=animal_count,
        play_near_seat_fraction=near_fraction,
        stage_present=stage_present,
        open_area_near_stage_m2=open_area,
        features=features,
    )
    return ScoreResult(vector=vector, breakdown=breakdown)
