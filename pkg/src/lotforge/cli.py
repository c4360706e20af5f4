"""Batch command line: validate | score | render | analyze | serve.

Exit codes are stable contract:
    0  success
    1  validation failure (scene has error issues)
    2  input error (unreadable/unparseable files, bad arguments)
    3  internal error (bugs; never expected inputs)
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .catalog import METRICS, builtin_catalog, load_catalog
from .codec import decode_scene
from .errors import (
    ConfigError,
    IngestError,
    LotforgeError,
    MissingDataError,
    SceneDocumentError,
    ValidationFailed,
)
from .metrics import DEFAULT_CONFIG, SunSample, load_score_config, score_scene
from .render import RenderOptions, render_plan
from .scene import validate_scene
from .survey import (
    analyze_responses,
    agreement_report,
    design_means,
    designated_from_catalog,
    filter_raters,
    format_means_table,
    lexicons_from_catalog,
    means_table_document,
    read_ratings_csv,
    read_responses_csv,
    scenario_means,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

_INPUT_ERRORS = (
    SceneDocumentError, IngestError, ConfigError, MissingDataError,
    OSError, UnicodeDecodeError,
)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text("utf-8")
    except OSError as exc:
        raise click.exceptions.Exit(_fail(f"cannot read {path}: {exc}"))


def _fail(message: str, code: int = EXIT_INPUT) -> int:
    click.echo(f"error: {message}", err=True)
    return code


def _load_catalog_arg(catalog_path: str | None):
    if catalog_path is None:
        return builtin_catalog()
    return load_catalog(_read_text(catalog_path))


@click.group()
@click.option("--catalog", "catalog_path", type=click.Path(), default=None,
              help="Catalog document to use instead of the builtin one.")
@click.option("--quiet", is_flag=True, default=False, help="Suppress chatter.")
@click.pass_context
def main(ctx, catalog_path, quiet):
    """Design toolkit for urban lot repair scenes."""
    ctx.ensure_object(dict)
    ctx.obj["catalog_path"] = catalog_path
    ctx.obj["quiet"] = quiet


def _catalog_from_ctx(ctx):
    try:
        return _load_catalog_arg(ctx.obj.get("catalog_path"))
    except LotforgeError as exc:
        raise click.exceptions.Exit(_fail(str(exc)))


@main.command()
@click.argument("scene_path", type=click.Path())
@click.pass_context
def validate(ctx, scene_path):
    """Check a scene document; exit 1 when error issues exist."""
    catalog = _catalog_from_ctx(ctx)
    try:
        scene = decode_scene(_read_text(scene_path))
    except SceneDocumentError as exc:
        ctx.exit(_fail(str(exc)))
    issues = validate_scene(scene, catalog)
    for issue in issues:
        where = f" {issue.instance_id}" if issue.instance_id else ""
        click.echo(f"{issue.severity} {issue.code}{where}: {issue.message}")
    click.echo(f"{len(issues)} issues")
    ctx.exit(EXIT_VALIDATION if any(i.severity == "error" for i in issues) else EXIT_OK)


@main.command()
@click.argument("scene_path", type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Score config document overriding the defaults.")
@click.option("--breakdown", is_flag=True, default=False,
              help="Print every scoring intermediate.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def score(ctx, scene_path, config_path, breakdown, fmt):
    """Score a scene on the eight livability metrics."""
    catalog = _catalog_from_ctx(ctx)
    try:
        scene = decode_scene(_read_text(scene_path))
        config = DEFAULT_CONFIG if config_path is None else load_score_config(_read_text(config_path))
    except _INPUT_ERRORS as exc:
        ctx.exit(_fail(str(exc)))
    try:
        result = score_scene(scene, catalog, config)
    except ValidationFailed as exc:
        ctx.exit(_fail(f"scene failed validation: {exc}", EXIT_VALIDATION))
    if fmt == "json":
        doc = {"scores": {k: round(v, 6) for k, v in result.vector.as_dict().items()}}
        if breakdown:
            doc["breakdown"] = result.breakdown.as_dict()
        click.echo(json.dumps(doc, indent=2))
    else:
        for metric in METRICS:
            click.echo(f"{metric:<14} {getattr(result.vector, metric):.2f}")
        if breakdown:
            click.echo("--- breakdown ---")
            for key, value in result.breakdown.as_dict().items():
                if key == "features":
                    continue
                click.echo(f"{key.replace('_', ' ')}: {value}")
    ctx.exit(EXIT_OK)


@main.command()
@click.argument("scene_path", type=click.Path())
@click.option("-o", "--output", "out_path", type=click.Path(), required=True)
@click.option("--shadows", is_flag=True, default=False)
@click.option("--sun", "sun_text", default=None,
              help="Sun position as 'altitude,azimuth' degrees.")
@click.option("--legend", is_flag=True, default=False)
@click.pass_context
def render(ctx, scene_path, out_path, shadows, sun_text, legend):
    """Write a deterministic top-down SVG plan of a scene."""
    catalog = _catalog_from_ctx(ctx)
    try:
        scene = decode_scene(_read_text(scene_path))
        sun = None
        if sun_text is not None:
            alt_text, az_text = sun_text.split(",")
            sun = SunSample(float(alt_text), float(az_text), 1.0)
    except (_INPUT_ERRORS + (ValueError,)) as exc:
        ctx.exit(_fail(f"bad input: {exc}"))
    svg = render_plan(scene, catalog, RenderOptions(
        show_shadows=shadows or sun is not None, sun=sun, legend=legend,
    ))
    Path(out_path).write_text(svg, "utf-8")
    if not ctx.obj.get("quiet"):
        click.echo(f"wrote {out_path}")
    ctx.exit(EXIT_OK)


@main.command()
@click.argument("ratings_path", type=click.Path())
@click.option("--responses", "responses_path", type=click.Path(), default=None)
@click.option("-o", "--output", "out_dir", type=click.Path(), default=None,
              help="Directory for report.txt / report.json / capture.json.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def analyze(ctx, ratings_path, responses_path, out_dir, fmt):
    """Run the rating pipeline: filter raters, aggregate, check agreement."""
    catalog = _catalog_from_ctx(ctx)
    try:
        dataset = read_ratings_csv(_read_text(ratings_path))
        kept, excluded = filter_raters(dataset)
        designs = design_means(kept)
        sm = scenario_means(designs)
        report = agreement_report(sm, designated_from_catalog(catalog))
        capture = None
        if responses_path is not None:
            responses = read_responses_csv(_read_text(responses_path))
            capture = analyze_responses(responses, lexicons_from_catalog(catalog))
    except _INPUT_ERRORS as exc:
        ctx.exit(_fail(str(exc)))

    doc = means_table_document(sm, report)
    doc["excluded_raters"] = excluded
    if capture is not None:
        doc["capture"] = {
            sid: {"direct": c.direct, "indirect": c.indirect,
                  "uncaptured": c.uncaptured, "discarded": c.discarded}
            for sid, c in capture.items()
        }

    text_report = []
    if excluded:
        text_report.append(
            f"excluded {len(excluded)} rater(s) for failed attention checks: "
            + ", ".join(excluded)
        )
    else:
        text_report.append("excluded 0 raters")
    text_report.append(format_means_table(sm, report))
    if capture is not None:
        text_report.append("")
        text_report.append("response capture (direct/indirect/uncaptured/discarded):")
        for sid, c in capture.items():
            text_report.append(
                f"  {sid}: {c.direct}/{c.indirect}/{c.uncaptured}/{c.discarded}"
            )
    text = "\n".join(text_report)

    click.echo(json.dumps(doc, indent=2) if fmt == "json" else text)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text + "\n", "utf-8")
        (out / "report.json").write_text(json.dumps(doc, indent=2) + "\n", "utf-8")
    ctx.exit(EXIT_OK)


@main.command()
@click.option("--port", type=int, default=8000, envvar="LOTFORGE_PORT", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", type=click.Path(), default="lotforge-data",
              envvar="LOTFORGE_DATA_DIR", show_default=True)
@click.option("--seed", type=int, default=0, envvar="LOTFORGE_SEED", show_default=True)
@click.option("--static-dir", type=click.Path(), default=None, envvar="LOTFORGE_STATIC",
              help="Directory with the browser UI bundle to serve at /.")
@click.pass_context
def serve(ctx, port, host, data_dir, seed, static_dir):
    """Run the design service until interrupted."""
    import socket

    import uvicorn

    from .service import create_app

    catalog = _catalog_from_ctx(ctx)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        ctx.exit(_fail(f"cannot bind {host}:{port}: {exc}"))
    finally:
        probe.close()

    app = create_app(data_dir, seed=seed, catalog=catalog, static_dir=static_dir)
    if not ctx.obj.get("quiet"):
        click.echo(f"serving on http://{host}:{port} (data: {data_dir})")
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        ctx.exit(_fail(f"server failed to start: {exc}"))
    ctx.exit(EXIT_OK)


def entrypoint():
    """Console entry point with the documented exit-code mapping."""
    try:
        main(standalone_mode=True)
    except LotforgeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except Exception as exc:  # pragma: no cover - bugs, not inputs
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)


if __name__ == "__main__":
    entrypoint()
