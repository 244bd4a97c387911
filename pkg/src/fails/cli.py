"""Operator command line: scrape, analyze, summary, chat, serve.

Exit codes: 0 success, 1 user error, 2 internal error. Errors go to stderr
using the same code vocabulary as the HTTP API.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from fails import store
from fails.ingestion import ScrapeConfig, run_pipeline
from fails.llm import ClientError, MockClient, RemoteClient, build_dataset_digest, chat, new_session
from fails.model import AnalysisSelection, builtin_registry, parse_ts
from fails.plots import ImageFormat, PlotKind, output_filename, render_all

DEFAULT_DATA_FILE = "data/incidents.csv"


def _data_file(value: str | None) -> Path:
    return Path(value or os.environ.get("FAILS_DATA_FILE") or DEFAULT_DATA_FILE)


def _fail(code: str, message: str, exit_code: int = 1):
    click.echo(f"error [{code}]: {message}", err=True)
    sys.exit(exit_code)


def _parse_date(raw: str, param: str):
    for candidate in (raw, raw + "T00:00:00Z"):
        try:
            return parse_ts(candidate)
        except ValueError:
            continue
    _fail("BAD_QUERY", f"cannot parse --{param} {raw!r}; use YYYY-MM-DD or ISO-8601 Z")


@click.group()
def main():
    """Incident analytics for LLM-service status pages."""


@main.command()
@click.option("--providers", "-p", multiple=True, help="Provider ids (default: all four).")
@click.option("--fixtures", type=click.Path(exists=True, file_okay=False), default=None,
              help="Offline mode: read page snapshots from this fixture directory.")
@click.option("--out", "out_file", type=click.Path(dir_okay=False), default=None,
              help=f"Dataset CSV to merge into (default {DEFAULT_DATA_FILE}).")
@click.option("--page-limit", type=int, default=None)
def scrape(providers, fixtures, out_file, page_limit):
    """Fetch incident histories and merge them into the dataset file."""
    registry = builtin_registry()
    wanted = frozenset(providers) if providers else frozenset(p.id for p in registry.providers)
    for pid in wanted:
        if not registry.has_provider(pid):
            _fail("UNKNOWN_PROVIDER", f"unknown provider {pid!r}")

    config = ScrapeConfig(
        providers=wanted,
        fixture_dir=Path(fixtures) if fixtures else None,
        page_limit=page_limit,
    )
    try:
        dataset, report = run_pipeline(config, registry=registry)
    except Exception as exc:
        _fail("SCRAPE_FAILED", str(exc), exit_code=2)

    path = _data_file(out_file)
    if path.exists():
        base = store.read_dataset(path)
        merged, merge_report = store.merge_datasets(base, dataset)
    else:
        merged = dataset
        merge_report = store.MergeReport(added=len(dataset.records))
    store.write_dataset(merged, path)

    for pid in sorted(report.per_provider):
        r = report.per_provider[pid]
        click.echo(
            f"{pid}: {r.pages_fetched} pages, {r.incidents_parsed} incidents, "
            f"{len(r.warnings)} warnings, {len(r.errors)} errors"
        )
        for err in r.errors:
            click.echo(f"  error: {err}", err=True)
    click.echo(
        f"dataset {path}: {len(merged.records)} records "
        f"(+{merge_report.added} added, {merge_report.replaced} replaced, "
        f"{merge_report.unchanged} unchanged)"
    )


@main.command()
@click.option("--kind", required=True, help="Plot kind (kebab-case) or 'all'.")
@click.option("--from", "from_", required=True, help="Window start (YYYY-MM-DD or ISO-8601 Z).")
@click.option("--to", required=True, help="Window end.")
@click.option("--services", "-s", multiple=True, help="Service ids (default: all).")
@click.option("--format", "fmt", type=click.Choice(["svg", "png"]), default="svg")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="plots")
@click.option("--data", "data_file", type=click.Path(), default=None)
def analyze(kind, from_, to, services, fmt, out_dir, data_file):
    """Render one plot kind (or all 17) for a selection."""
    registry = builtin_registry()
    path = _data_file(data_file)
    if not path.exists():
        _fail("NO_DATASET", f"dataset file {path} does not exist; run scrape first")
    dataset = store.read_dataset(path)

    if kind == "all":
        kinds = list(PlotKind)
    else:
        try:
            kinds = [PlotKind.from_name(kind)]
        except KeyError:
            _fail("UNKNOWN_KIND", f"unknown plot kind {kind!r}")

    start = _parse_date(from_, "from")
    end = _parse_date(to, "to")
    if services:
        for sid in services:
            if not registry.has_service(sid):
                _fail("BAD_QUERY", f"unknown service {sid!r}")
        selected = frozenset(services)
    else:
        selected = frozenset(s.id for s in registry.services)
    try:
        sel = AnalysisSelection(start=start, end=end, services=selected)
    except ValueError as exc:
        _fail("BAD_QUERY", str(exc))

    rendered, skipped = render_all(dataset, sel, kinds, format=ImageFormat(fmt), registry=registry)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for plot_kind, plot in rendered.items():
        target = out / output_filename(plot_kind, sel, plot.format)
        target.write_bytes(plot.data)
        click.echo(f"wrote {target}")
    for plot_kind, reason in skipped.items():
        click.echo(f"skipped {plot_kind.value}: {reason}", err=True)
    if not rendered:
        _fail("INSUFFICIENT_DATA", "no requested plot kind had data in this selection")


@main.command()
@click.option("--data", "data_file", type=click.Path(), default=None)
def summary(data_file):
    """Per-provider dataset summary (first date, last date, report count)."""
    from fails.analytics import dataset_summary

    path = _data_file(data_file)
    if not path.exists():
        _fail("NO_DATASET", f"dataset file {path} does not exist; run scrape first")
    dataset = store.read_dataset(path)
    rows = dataset_summary(dataset)
    if not rows:
        click.echo("dataset is empty")
        return
    click.echo(f"{'provider':<14} {'first date':<12} {'last date':<12} {'reports':>8}")
    for row in rows:
        click.echo(
            f"{row.provider:<14} {row.first.date().isoformat():<12} "
            f"{row.last.date().isoformat():<12} {row.reports:>8}"
        )


@main.command()
@click.option("--mock", is_flag=True, help="Use the deterministic offline client.")
@click.option("--data", "data_file", type=click.Path(), default=None)
def chat_cmd(mock, data_file):
    """Interactive chatbot over the dataset digest. Quit with 'exit'."""
    path = _data_file(data_file)
    if not path.exists():
        _fail("NO_DATASET", f"dataset file {path} does not exist; run scrape first")
    dataset = store.read_dataset(path)
    client = MockClient() if mock else RemoteClient()
    session = new_session(build_dataset_digest(dataset))

    click.echo(f"chatting over {len(dataset.records)} incidents; 'exit' to quit")
    while True:
        try:
            message = click.prompt("you", prompt_suffix="> ")
        except (click.Abort, EOFError):
            break
        if message.strip().lower() in ("exit", "quit"):
            break
        try:
            reply, session = chat(client, session, message)
        except ClientError as exc:
            click.echo(f"error [LLM_UPSTREAM]: {exc}", err=True)
            continue
        click.echo(reply)


main.add_command(chat_cmd, name="chat")


@main.command()
@click.option("--port", type=int, default=None)
@click.option("--data", "data_file", type=click.Path(), default=None)
@click.option("--fixtures", type=click.Path(exists=True, file_okay=False), default=None,
              help="Serve with the scraper in offline fixture mode.")
@click.option("--mock-llm", is_flag=True, help="Use the deterministic LLM client.")
def serve(port, data_file, fixtures, mock_llm):
    """Run the HTTP API server."""
    import uvicorn

    from fails.api import create_app

    registry = builtin_registry()
    config = ScrapeConfig(
        providers=frozenset(p.id for p in registry.providers),
        fixture_dir=Path(fixtures) if fixtures else None,
    )
    app = create_app(
        data_file=_data_file(data_file),
        scrape_config=config,
        use_mock_client=mock_llm,
        registry=registry,
    )
    port = port or int(os.environ.get("FAILS_PORT", "8000"))
    uvicorn.run(app, host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
