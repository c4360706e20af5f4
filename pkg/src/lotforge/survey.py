"""Rating-survey aggregation and free-text response coding.

The pipeline: ingest rating rows, drop raters who blew the attention
checks, average ratings per design, average design means per scenario,
pick each scenario's top metrics, and compare them against the designated
metrics from the catalog. Free-text responses get prefiltered (too short,
or a bare list of metric names) and then coded direct / indirect /
uncaptured against per-scenario lexicons.

All transforms are pure and order-insensitive: shuffling input rows
changes no output. No significance testing happens here by design.
"""

from __future__ import annotations

import csv
import io
import string
from collections import defaultdict
from dataclasses import dataclass

from .catalog import Catalog, Lexicon, METRICS, METRIC_LABELS, scenarios
from .errors import ConfigError, IngestError, MissingDataError

RATINGS_COLUMNS = (
    "rater_id", "design_id", "scenario_id", "metric",
    "value", "is_attention_check", "expected_value",
)
RESPONSES_COLUMNS = ("rater_id", "design_id", "scenario_id", "text")

ATTENTION_FAILURE_LIMIT = 2  # two or more failed checks excludes the rater
MIN_RESPONSE_TOKENS = 4

# Words that make up metric names, for spotting bare metric-list responses.
METRIC_WORDS = frozenset(
    w for label in METRIC_LABELS.values() for w in label.lower().split()
) | frozenset(METRICS)

# Documented default stopword list for the metric-list prefilter.
STOPWORDS = frozenset(
    "a an and are for in is it of on or the there this that to with".split()
)

_PUNCT_TABLE = str.maketrans({c: " " for c in string.punctuation})


@dataclass(frozen=True)
class RatingRecord:
    rater_id: str
    design_id: str
    scenario_id: str
    metric: str
    value: int
    is_attention_check: bool = False
    expected_value: int | None = None
    row: int = 0  # source row for error reporting


@dataclass(frozen=True)
class RatingDataset:
    records: tuple[RatingRecord, ...]

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class ResponseRecord:
    rater_id: str
    design_id: str
    scenario_id: str
    text: str


@dataclass(frozen=True)
class DesignMeans:
    scenario_of: dict[str, str]                 # design_id -> scenario_id
    means: dict[str, dict[str, float]]          # design_id -> metric -> mean


@dataclass(frozen=True)
class ScenarioMeans:
    means: dict[str, dict[str, float]]          # scenario_id -> metric -> mean
    n_designs: dict[str, int]


@dataclass(frozen=True)
class TopMetrics:
    argmax_set: frozenset[str]
    top3: tuple[str, str, str]


@dataclass(frozen=True)
class ScenarioAgreement:
    scenario_id: str
    argmax_set: frozenset[str]
    designated: frozenset[str]
    agrees: bool
    top3: tuple[str, str, str]


@dataclass(frozen=True)
class AgreementReport:
    per_scenario: dict[str, ScenarioAgreement]
    agree_count: int
    total: int

    def disagreements(self) -> list[str]:
        return [s for s, a in sorted(self.per_scenario.items()) if not a.agrees]


@dataclass(frozen=True)
class CaptureReport:
    direct: int = 0
    indirect: int = 0
    uncaptured: int = 0
    discarded: int = 0


def _parse_bool(raw: str, row: int, column: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no", ""):
        return False
    raise IngestError(f"{column} must be true/false, got {raw!r}", row)


def _parse_value(raw: str, row: int, column: str) -> int:
    try:
        value = int(raw.strip())
    except ValueError:
        raise IngestError(f"{column} must be an integer, got {raw!r}", row) from None
    if not (1 <= value <= 7):
        raise IngestError(f"{column} must be in 1..7, got {value}", row)
    return value


def ingest_ratings(rows) -> RatingDataset:
    """Validate raw mapping rows (e.g. csv.DictReader output) into a dataset.

    Row numbers count the header as row 1, so the first data row is row 2.
    """
    records: list[RatingRecord] = []
    scenario_of: dict[str, str] = {}
    for idx, raw in enumerate(rows):
        row = idx + 2
        missing = [c for c in RATINGS_COLUMNS if raw.get(c) is None]
        if missing:
            raise IngestError(f"missing column(s) {missing}", row)
        metric = raw["metric"].strip()
        if metric not in METRICS:
            raise IngestError(f"unknown metric {metric!r}", row)
        for column in ("rater_id", "design_id", "scenario_id"):
            if not raw[column].strip():
                raise IngestError(f"{column} must be non-empty", row)
        design_id = raw["design_id"].strip()
        scenario_id = raw["scenario_id"].strip()
        previous = scenario_of.setdefault(design_id, scenario_id)
        if previous != scenario_id:
            raise IngestError(
                f"design {design_id!r} maps to both {previous!r} and {scenario_id!r}", row
            )
        is_check = _parse_bool(raw["is_attention_check"], row, "is_attention_check")
        expected_raw = (raw["expected_value"] or "").strip()
        if is_check:
            if not expected_raw:
                raise IngestError("attention check rows require expected_value", row)
            expected = _parse_value(expected_raw, row, "expected_value")
        else:
            if expected_raw:
                raise IngestError("expected_value is only allowed on attention checks", row)
            expected = None
        records.append(RatingRecord(
            rater_id=raw["rater_id"].strip(),
            design_id=design_id,
            scenario_id=scenario_id,
            metric=metric,
            value=_parse_value(raw["value"], row, "value"),
            is_attention_check=is_check,
            expected_value=expected,
            row=row,
        ))
    return RatingDataset(records=tuple(records))


def read_ratings_csv(text: str) -> RatingDataset:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise IngestError("ratings CSV is empty")
    missing = [c for c in RATINGS_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise IngestError(f"ratings CSV header missing column(s) {missing}", 1)
    return ingest_ratings(reader)


def read_responses_csv(text: str) -> list[ResponseRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise IngestError("responses CSV is empty")
    missing = [c for c in RESPONSES_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise IngestError(f"responses CSV header missing column(s) {missing}", 1)
    out = []
    for idx, raw in enumerate(reader):
        row = idx + 2
        for column in RESPONSES_COLUMNS:
            if raw.get(column) is None:
                raise IngestError(f"missing column {column!r}", row)
        out.append(ResponseRecord(
            rater_id=raw["rater_id"].strip(),
            design_id=raw["design_id"].strip(),
            scenario_id=raw["scenario_id"].strip(),
            text=raw["text"],
        ))
    return out


def filter_raters(dataset: RatingDataset) -> tuple[RatingDataset, list[str]]:
    """Drop raters failing two or more attention checks; drop check rows.

    Idempotent: the surviving dataset carries no attention rows, so
    filtering again excludes nobody.
    """
    failures: dict[str, int] = defaultdict(int)
    for rec in dataset.records:
        if rec.is_attention_check and rec.value != rec.expected_value:
            failures[rec.rater_id] += 1
    excluded = sorted(
        rater for rater, n in failures.items() if n >= ATTENTION_FAILURE_LIMIT
    )
    excluded_set = set(excluded)
    kept = tuple(
        rec for rec in dataset.records
        if rec.rater_id not in excluded_set and not rec.is_attention_check
    )
    return RatingDataset(records=kept), excluded


def design_means(dataset: RatingDataset) -> DesignMeans:
    """Arithmetic mean per (design, metric); every metric must be rated."""
    sums: dict[str, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
    scenario_of: dict[str, str] = {}
    for rec in dataset.records:
        if rec.is_attention_check:
            continue
        sums[rec.design_id][rec.metric].append(rec.value)
        scenario_of[rec.design_id] = rec.scenario_id
    if not sums:
        raise MissingDataError("no ratings to aggregate")
    means: dict[str, dict[str, float]] = {}
    for design_id in sorted(sums):
        per_metric = {}
        for metric in METRICS:
            values = sums[design_id].get(metric)
            if not values:
                raise MissingDataError(
                    f"design {design_id!r} has no ratings for metric {metric!r}"
                )
            per_metric[metric] = sum(values) / len(values)
        means[design_id] = per_metric
    return DesignMeans(scenario_of=scenario_of, means=means)


def scenario_means(designs: DesignMeans) -> ScenarioMeans:
    """Unweighted mean of design means per scenario and metric."""
    grouped: dict[str, list[dict[str, float]]] = defaultdict(list)
    for design_id, per_metric in designs.means.items():
        grouped[designs.scenario_of[design_id]].append(per_metric)
    means: dict[str, dict[str, float]] = {}
    counts: dict[str, int] = {}
    for scenario_id in sorted(grouped):
        rows = grouped[scenario_id]
        if not rows:
            raise MissingDataError(f"scenario {scenario_id!r} has no designs")
        means[scenario_id] = {
            m: sum(r[m] for r in rows) / len(rows) for m in METRICS
        }
        counts[scenario_id] = len(rows)
    return ScenarioMeans(means=means, n_designs=counts)


def top_metrics(sm: ScenarioMeans, eps: float = 1e-9) -> dict[str, TopMetrics]:
    """Per scenario: the eps-tied argmax set and the top three metrics.

    Ties inside the argmax set (and in the top-3 ordering) break by the
    canonical metric order, so dual-maximum rows need no special casing.
    """
    out: dict[str, TopMetrics] = {}
    for scenario_id, per_metric in sm.means.items():
        best = max(per_metric.values())
        argmax = frozenset(m for m in METRICS if per_metric[m] >= best - eps)
        ranked = sorted(
            METRICS, key=lambda m: (-per_metric[m], METRICS.index(m))
        )
        out[scenario_id] = TopMetrics(argmax_set=argmax, top3=tuple(ranked[:3]))
    return out


def agreement_report(
    sm: ScenarioMeans,
    designated: dict[str, frozenset[str]],
    eps: float = 1e-9,
) -> AgreementReport:
    """Does the highest-rated metric line up with a designated metric?"""
    tops = top_metrics(sm, eps)
    per_scenario: dict[str, ScenarioAgreement] = {}
    agree_count = 0
    for scenario_id in sorted(sm.means):
        if scenario_id not in designated:
            raise ConfigError(f"no designated metrics for scenario {scenario_id!r}")
        top = tops[scenario_id]
        marked = frozenset(designated[scenario_id])
        agrees = bool(top.argmax_set & marked)
        agree_count += agrees
        per_scenario[scenario_id] = ScenarioAgreement(
            scenario_id=scenario_id,
            argmax_set=top.argmax_set,
            designated=marked,
            agrees=agrees,
            top3=top.top3,
        )
    return AgreementReport(
        per_scenario=per_scenario, agree_count=agree_count, total=len(per_scenario)
    )


def designated_from_catalog(catalog: Catalog) -> dict[str, frozenset[str]]:
    return {s.scenario_id: frozenset(s.designated_metrics) for s in scenarios(catalog)}


def _tokens(text: str) -> list[str]:
    return text.lower().translate(_PUNCT_TABLE).split()


def prefilter_responses(
    responses: list[ResponseRecord],
) -> tuple[list[ResponseRecord], list[tuple[ResponseRecord, str]]]:
    """Drop responses that are bare metric lists or too short to code.

    The metric-list rule runs first: "shade comfort safety" is a metric
    list even though it is also short. Hard-to-read grammar is a human
    judgment and is never discarded automatically.
    """
    retained: list[ResponseRecord] = []
    discarded: list[tuple[ResponseRecord, str]] = []
    for resp in responses:
        tokens = _tokens(resp.text)
        known = METRIC_WORDS | STOPWORDS
        if tokens and all(t in known for t in tokens) and any(t in METRIC_WORDS for t in tokens):
            discarded.append((resp, "metric-list"))
        elif len(tokens) < MIN_RESPONSE_TOKENS:
            discarded.append((resp, "short"))
        else:
            retained.append(resp)
    return retained, discarded


def _stem(word: str) -> str:
    # Naive suffix stripping; adequate for the shipped lexicons.
    for suffix in ("ing", "ed", "s"):
        if word.endswith(suffix) and len(word) - len(suffix) >= 3:
            return word[: -len(suffix)]
    return word


def code_response(resp: ResponseRecord, lexicon: Lexicon) -> str:
    """Classify one retained response: direct beats indirect beats uncaptured."""
    lowered = resp.text.lower()
    if any(phrase in lowered for phrase in lexicon.direct):
        return "direct"
    stems = {_stem(t) for t in _tokens(resp.text)}
    if any(_stem(term) in stems for term in lexicon.indirect):
        return "indirect"
    return "uncaptured"


def code_responses(
    retained: list[ResponseRecord],
    lexicons: dict[str, Lexicon],
    discarded_counts: dict[str, int] | None = None,
) -> dict[str, CaptureReport]:
    """Per-scenario capture counts over already-prefiltered responses."""
    tallies: dict[str, dict[str, int]] = defaultdict(
        lambda: {"direct": 0, "indirect": 0, "uncaptured": 0}
    )
    for resp in retained:
        if resp.scenario_id not in lexicons:
            raise ConfigError(f"no lexicon for scenario {resp.scenario_id!r}")
        tallies[resp.scenario_id][code_response(resp, lexicons[resp.scenario_id])] += 1
    discarded_counts = discarded_counts or {}
    out = {}
    for scenario_id in sorted(set(tallies) | set(discarded_counts)):
        t = tallies.get(scenario_id, {"direct": 0, "indirect": 0, "uncaptured": 0})
        out[scenario_id] = CaptureReport(
            direct=t["direct"],
            indirect=t["indirect"],
            uncaptured=t["uncaptured"],
            discarded=discarded_counts.get(scenario_id, 0),
        )
    return out


def analyze_responses(
    responses: list[ResponseRecord], lexicons: dict[str, Lexicon]
) -> dict[str, CaptureReport]:
    """Prefilter then code; discard counts feed the per-scenario reports."""
    retained, discarded = prefilter_responses(responses)
    discarded_counts: dict[str, int] = defaultdict(int)
    for resp, _reason in discarded:
        discarded_counts[resp.scenario_id] += 1
    return code_responses(retained, lexicons, dict(discarded_counts))


def lexicons_from_catalog(catalog: Catalog) -> dict[str, Lexicon]:
    return {s.scenario_id: s.lexicon for s in scenarios(catalog)}


def means_table_document(
    sm: ScenarioMeans, report: AgreementReport
) -> dict:
    """Machine-readable mirror of the means table: per-cell mean + markers."""
    table = {}
    for scenario_id in sorted(sm.means):
        agreement = report.per_scenario[scenario_id]
        table[scenario_id] = {
            metric: {
                "mean": round(sm.means[scenario_id][metric], 6),
                "top": metric in agreement.argmax_set,
                "designated": metric in agreement.designated,
            }
            for metric in METRICS
        }
    return {
        "scenarios": table,
        "agree_count": report.agree_count,
        "total": report.total,
        "disagreements": report.disagreements(),
    }


def format_means_table(sm: ScenarioMeans, report: AgreementReport) -> str:
    """Plain-text means table; * marks the top metric(s), + the designated."""
    headers = [METRIC_LABELS[m] for m in METRICS]
    lines = []
    lines.append("  ".join(["Scen"] + [f"{h:>16}" for h in headers]))
    for scenario_id in sorted(sm.means):
        agreement = report.per_scenario[scenario_id]
        cells = []
        for metric in METRICS:
            mark = ""
            if metric in agreement.argmax_set:
                mark += "*"
            if metric in agreement.designated:
                mark += "+"
            cells.append(f"{sm.means[scenario_id][metric]:.2f}{mark:<2}".rjust(16))
        lines.append("  ".join([f"{scenario_id:<4}"] + cells))
    lines.append("")
    lines.append(f"agreement: {report.agree_count}/{report.total}"
                 f" (disagreements: {', '.join(report.disagreements()) or 'none'})")
    return "\n".join(lines)
