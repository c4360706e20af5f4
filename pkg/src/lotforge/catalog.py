"""The pattern-language knowledge base.

Patterns, placeable entries with affordance attributes, and the twelve
scenario briefs all live in a single versioned JSON document
(data/catalog.v1.json) so communities can extend the language by editing
data, not code. The loader enforces referential integrity: every id
referenced anywhere must resolve, and violations name the dangling id.

Catalogs are immutable after load and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .errors import CatalogError, NotFoundError, UnknownEntryError

# Metric ids in presentation order. "nature" is short for Access to Nature.
METRICS = (
    "shade", "play", "comfort", "safety",
    "nature", "recreation", "entertainment", "sociability",
)
METRIC_LABELS = {
    "shade": "Shade",
    "play": "Play",
    "comfort": "Comfort",
    "safety": "Safety",
    "nature": "Access to Nature",
    "recreation": "Recreation",
    "entertainment": "Entertainment",
    "sociability": "Sociability",
}

CATEGORIES = (
    "greenery", "seating", "play", "structure", "market",
    "lighting", "animal", "garden", "art", "surface",
)

SCENARIO_GROUPS = ("A", "B", "C")
SCENARIO_IDS = tuple(f"{g}{n}" for g in SCENARIO_GROUPS for n in range(1, 5))


@dataclass(frozen=True)
class Pattern:
    pattern_id: str
    name: str
    summary: str
    number: int | None = None
    related: tuple[str, ...] = ()


@dataclass(frozen=True)
class CatalogEntry:
    entry_id: str
    display_name: str
    category: str
    footprint_w: float
    footprint_d: float
    height: float = 0.0
    canopy_radius: float = 0.0
    light_radius: float = 0.0
    seat_capacity: int = 0
    play_capacity: int = 0
    adult_activity_capacity: int = 0
    green_area: float = 0.0
    tags: frozenset[str] = frozenset()
    patterns: tuple[str, ...] = ()

    def is_shade_caster(self) -> bool:
        return "shade-caster" in self.tags


@dataclass(frozen=True)
class Lexicon:
    direct: tuple[str, ...] = ()
    indirect: tuple[str, ...] = ()


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    group: str
    brief: str
    designated_metrics: frozenset[str]
    suggested_entries: tuple[str, ...] = ()
    lexicon: Lexicon = Lexicon()
    note: str | None = None


@dataclass(frozen=True)
class Catalog:
    version: str
    patterns: tuple[Pattern, ...]
    entries: tuple[CatalogEntry, ...]
    scenarios: tuple[Scenario, ...]
    _patterns_by_id: dict = field(init=False, repr=False, compare=False)
    _entries_by_id: dict = field(init=False, repr=False, compare=False)
    _scenarios_by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_patterns_by_id", {p.pattern_id: p for p in self.patterns})
        object.__setattr__(self, "_entries_by_id", {e.entry_id: e for e in self.entries})
        object.__setattr__(self, "_scenarios_by_id", {s.scenario_id: s for s in self.scenarios})

    def has_entry(self, entry_id: str) -> bool:
        return entry_id in self._entries_by_id

    def entry(self, entry_id: str) -> CatalogEntry:
        try:
            return self._entries_by_id[entry_id]
        except KeyError:
            raise UnknownEntryError(f"unknown catalog entry {entry_id!r}") from None

    def has_pattern(self, pattern_id: str) -> bool:
        return pattern_id in self._patterns_by_id

    def pattern(self, pattern_id: str) -> Pattern:
        try:
            return self._patterns_by_id[pattern_id]
        except KeyError:
            raise NotFoundError(f"unknown pattern {pattern_id!r}") from None

    def has_scenario(self, scenario_id: str) -> bool:
        return scenario_id in self._scenarios_by_id

    def scenario(self, scenario_id: str) -> Scenario:
        try:
            return self._scenarios_by_id[scenario_id]
        except KeyError:
            raise NotFoundError(f"unknown scenario {scenario_id!r}") from None


def _as_nonneg_number(doc: dict, key: str, where: str, default: float = 0.0) -> float:
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
        raise CatalogError(f"{where}: {key} must be a non-negative number")
    return float(value)


def _as_nonneg_int(doc: dict, key: str, where: str) -> int:
    value = doc.get(key, 0)
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise CatalogError(f"{where}: {key} must be a non-negative integer")
    return value


def _as_str_list(doc: dict, key: str, where: str) -> list[str]:
    value = doc.get(key, [])
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise CatalogError(f"{where}: {key} must be a list of strings")
    return value


def _parse_pattern(doc: dict) -> Pattern:
    where = f"pattern {doc.get('pattern_id')!r}"
    number = doc.get("number")
    if number is not None and (isinstance(number, bool) or not isinstance(number, int)):
        raise CatalogError(f"{where}: number must be an integer")
    return Pattern(
        pattern_id=doc["pattern_id"],
        name=doc["name"],
        summary=doc.get("summary", ""),
        number=number,
        related=tuple(_as_str_list(doc, "related", where)),
    )


def _parse_entry(doc: dict) -> CatalogEntry:
    where = f"entry {doc.get('entry_id')!r}"
    category = doc.get("category")
    if category not in CATEGORIES:
        raise CatalogError(f"{where}: unknown category {category!r}")
    entry = CatalogEntry(
        entry_id=doc["entry_id"],
        display_name=doc["display_name"],
        category=category,
        footprint_w=_as_nonneg_number(doc, "footprint_w", where),
        footprint_d=_as_nonneg_number(doc, "footprint_d", where),
        height=_as_nonneg_number(doc, "height", where),
        canopy_radius=_as_nonneg_number(doc, "canopy_radius", where),
        light_radius=_as_nonneg_number(doc, "light_radius", where),
        seat_capacity=_as_nonneg_int(doc, "seat_capacity", where),
        play_capacity=_as_nonneg_int(doc, "play_capacity", where),
        adult_activity_capacity=_as_nonneg_int(doc, "adult_activity_capacity", where),
        green_area=_as_nonneg_number(doc, "green_area", where),
        tags=frozenset(_as_str_list(doc, "tags", where)),
        patterns=tuple(_as_str_list(doc, "patterns", where)),
    )
    if entry.footprint_w <= 0 or entry.footprint_d <= 0:
        raise CatalogError(f"{where}: footprint must be positive")
    if entry.is_shade_caster() and (entry.canopy_radius <= 0 or entry.height <= 0):
        raise CatalogError(
            f"{where}: shade-caster requires positive canopy_radius and height"
        )
    return entry


def _parse_scenario(doc: dict) -> Scenario:
    where = f"scenario {doc.get('scenario_id')!r}"
    lex_doc = doc.get("lexicon", {})
    if not isinstance(lex_doc, dict):
        raise CatalogError(f"{where}: lexicon must be an object")
    lexicon = Lexicon(
        direct=tuple(_as_str_list(lex_doc, "direct", where)),
        indirect=tuple(_as_str_list(lex_doc, "indirect", where)),
    )
    for phrase in lexicon.direct + lexicon.indirect:
        if phrase != phrase.lower():
            raise CatalogError(f"{where}: lexicon phrase {phrase!r} must be lowercase")
    metrics = _as_str_list(doc, "designated_metrics", where)
    if not metrics:
        raise CatalogError(f"{where}: designated_metrics must be non-empty")
    for m in metrics:
        if m not in METRICS:
            raise CatalogError(f"{where}: unknown metric {m!r}")
    note = doc.get("note")
    if note is not None and not isinstance(note, str):
        raise CatalogError(f"{where}: note must be a string")
    return Scenario(
        scenario_id=doc["scenario_id"],
        group=doc["group"],
        brief=doc["brief"],
        designated_metrics=frozenset(metrics),
        suggested_entries=tuple(_as_str_list(doc, "suggested_entries", where)),
        lexicon=lexicon,
        note=note,
    )


def _check_unique(ids: list[str], kind: str) -> None:
    seen: set[str] = set()
    for i in ids:
        if i in seen:
            raise CatalogError(f"duplicate {kind} id {i!r}")
        seen.add(i)


def validate_catalog(catalog: Catalog) -> None:
    """Enforce referential integrity and the scenario-set shape."""
    _check_unique([p.pattern_id for p in catalog.patterns], "pattern")
    _check_unique([e.entry_id for e in catalog.entries], "entry")
    _check_unique([s.scenario_id for s in catalog.scenarios], "scenario")

    for pattern in catalog.patterns:
        for rel in pattern.related:
            if not catalog.has_pattern(rel):
                raise CatalogError(
                    f"pattern {pattern.pattern_id!r} relates to unknown pattern {rel!r}"
                )
    for entry in catalog.entries:
        for pid in entry.patterns:
            if not catalog.has_pattern(pid):
                raise CatalogError(
                    f"entry {entry.entry_id!r} references unknown pattern {pid!r}"
                )
    for scenario in catalog.scenarios:
        if scenario.scenario_id not in SCENARIO_IDS:
            raise CatalogError(f"unexpected scenario id {scenario.scenario_id!r}")
        if scenario.group != scenario.scenario_id[0]:
            raise CatalogError(
                f"scenario {scenario.scenario_id!r} carries group {scenario.group!r}"
            )
        for eid in scenario.suggested_entries:
            if not catalog.has_entry(eid):
                raise CatalogError(
                    f"scenario {scenario.scenario_id!r} suggests unknown entry {eid!r}"
                )
    present = {s.scenario_id for s in catalog.scenarios}
    if present != set(SCENARIO_IDS):
        missing = sorted(set(SCENARIO_IDS) - present)
        raise CatalogError(f"catalog must define exactly the 12 scenarios; missing {missing}")


def load_catalog(document: str) -> Catalog:
    """Parse and validate a catalog document."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog is not valid JSON: {exc.msg} (line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise CatalogError("catalog document must be a JSON object")
    version = doc.get("version")
    if not isinstance(version, str) or not version:
        raise CatalogError("catalog version must be a non-empty string")
    try:
        catalog = Catalog(
            version=version,
            patterns=tuple(_parse_pattern(p) for p in doc.get("patterns", [])),
            entries=tuple(_parse_entry(e) for e in doc.get("entries", [])),
            scenarios=tuple(_parse_scenario(s) for s in doc.get("scenarios", [])),
        )
    except KeyError as exc:
        raise CatalogError(f"missing required field {exc.args[0]!r}") from exc
    validate_catalog(catalog)
    return catalog


@lru_cache(maxsize=1)
def builtin_catalog() -> Catalog:
    """The baseline catalog shipped with the package."""
    text = resources.files("lotforge.data").joinpath("catalog.v1.json").read_text("utf-8")
    return load_catalog(text)


def catalog_document(catalog: Catalog) -> dict:
    """Plain-dict form of a catalog, loadable by load_catalog after dumps."""
    def entry_doc(e: CatalogEntry) -> dict:
        doc = {
            "entry_id": e.entry_id,
            "display_name": e.display_name,
            "category": e.category,
            "footprint_w": e.footprint_w,
            "footprint_d": e.footprint_d,
        }
        for key in ("height", "canopy_radius", "light_radius", "green_area"):
            if getattr(e, key):
                doc[key] = getattr(e, key)
        for key in ("seat_capacity", "play_capacity", "adult_activity_capacity"):
            if getattr(e, key):
                doc[key] = getattr(e, key)
        if e.tags:
            doc["tags"] = sorted(e.tags)
        if e.patterns:
            doc["patterns"] = list(e.patterns)
        return doc

    def scenario_doc(s: Scenario) -> dict:
        doc = {
            "scenario_id": s.scenario_id,
            "group": s.group,
            "brief": s.brief,
            "designated_metrics": [m for m in METRICS if m in s.designated_metrics],
            "suggested_entries": list(s.suggested_entries),
            "lexicon": {"direct": list(s.lexicon.direct), "indirect": list(s.lexicon.indirect)},
        }
        if s.note:
            doc["note"] = s.note
        return doc

    def pattern_doc(p: Pattern) -> dict:
        doc = {"pattern_id": p.pattern_id, "name": p.name, "summary": p.summary}
        if p.number is not None:
            doc["number"] = p.number
        if p.related:
            doc["related"] = list(p.related)
        return doc

    return {
        "version": catalog.version,
        "patterns": [pattern_doc(p) for p in catalog.patterns],
        "entries": [entry_doc(e) for e in catalog.entries],
        "scenarios": [scenario_doc(s) for s in catalog.scenarios],
    }


def encode_catalog(catalog: Catalog) -> str:
    return json.dumps(catalog_document(catalog), indent=2) + "\n"


def scenarios(catalog: Catalog) -> list[Scenario]:
    """All 12 scenarios in A1..A4, B1..B4, C1..C4 order."""
    return [catalog.scenario(sid) for sid in SCENARIO_IDS]


def palette_for_scenario(catalog: Catalog, scenario_id: str) -> list[CatalogEntry]:
    """Scenario-suggested entries first, then everything else by category.

    Users are never restricted to the suggestion; the palette always
    contains every entry exactly once.
    """
    scenario = catalog.scenario(scenario_id)
    suggested = [catalog.entry(eid) for eid in scenario.suggested_entries]
    in_suggested = set(scenario.suggested_entries)
    order = {entry.entry_id: idx for idx, entry in enumerate(catalog.entries)}
    rest = sorted(
        (e for e in catalog.entries if e.entry_id not in in_suggested),
        key=lambda e: (CATEGORIES.index(e.category), order[e.entry_id]),
    )
    return suggested + rest


def entries_for_pattern(catalog: Catalog, pattern_id: str) -> list[CatalogEntry]:
    catalog.pattern(pattern_id)  # raises NotFoundError when unknown
    return [e for e in catalog.entries if pattern_id in e.patterns]
