"""HTTP service exposing scraping, incident queries, analytics plots, LLM
analysis and the dataset chatbot.

The server holds the dataset in memory and reloads it whenever the backing
file's content hash changes; readers always see either the old or the new
dataset, never a mix. One scrape job may run at a time.
"""

from __future__ import annotations

import hashlib
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from fails import analytics, store
from fails.ingestion import ScrapeConfig, ScrapeReport, run_pipeline
from fails.llm import (
    ChatSession,
    ClientError,
    CompletionClient,
    MockClient,
    RemoteClient,
    analyze_all,
    analyze_plot,
    build_dataset_digest,
    chat,
    new_session,
)
from fails.model import (
    AnalysisSelection,
    IncidentDataset,
    IncidentRecord,
    RecoveryStage,
    Registry,
    builtin_registry,
    empty_dataset,
    format_ts,
    full_selection,
    parse_ts,
)
from fails.plots import (
    ImageFormat,
    InsufficientData,
    PlotKind,
    build_plot_spec,
    render,
)

MAX_PAGE_SIZE = 500
DEFAULT_PAGE_SIZE = 50

SORT_KEYS = ("start", "end", "duration", "provider", "impact")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class ScrapeJob:
    job_id: str
    state: str = "pending"  # pending | running | succeeded | failed
    report: Optional[ScrapeReport] = None
    merge_report: Optional[store.MergeReport] = None
    error: Optional[str] = None
    started_at: Optional[datetime] = None
    finished_at: Optional[datetime] = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "state": self.state,
            "report": self.report.to_dict() if self.report else None,
            "merge_report": self.merge_report.to_dict() if self.merge_report else None,
            "error": self.error,
            "started_at": format_ts(self.started_at) if self.started_at else None,
            "finished_at": format_ts(self.finished_at) if self.finished_at else None,
        }


@dataclass
class AppState:
    data_file: Path
    scrape_config: ScrapeConfig
    client: CompletionClient
    registry: Registry
    jobs: dict[str, ScrapeJob] = field(default_factory=dict)
    sessions: dict[str, dict] = field(default_factory=dict)
    _dataset: Optional[IncidentDataset] = None
    _dataset_hash: str = ""
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def dataset(self) -> tuple[IncidentDataset, str]:
        """Current dataset plus its content hash, reloading on file change."""
        with self._lock:
            if not self.data_file.exists():
                if self._dataset is None or self._dataset_hash != "":
                    self._dataset = empty_dataset()
                    self._dataset_hash = ""
                return self._dataset, self._dataset_hash
            payload = self.data_file.read_bytes()
            digest = hashlib.sha256(payload).hexdigest()
            if digest != self._dataset_hash:
                self._dataset = store.read_dataset(self.data_file)
                self._dataset_hash = digest
            return self._dataset, self._dataset_hash

    def active_job(self) -> Optional[ScrapeJob]:
        return next(
            (j for j in self.jobs.values() if j.state in ("pending", "running")), None
        )


def _parse_date(raw: str, param: str) -> datetime:
    for parser in (parse_ts, lambda t: parse_ts(t + "T00:00:00Z")):
        try:
            return parser(raw)
        except ValueError:
            continue
    raise ApiError(400, "BAD_QUERY", f"cannot parse {param}={raw!r} as a date")


def _parse_selection(
    state: AppState, dataset: IncidentDataset, from_: Optional[str], to: Optional[str],
    services: Optional[str],
) -> AnalysisSelection:
    base = full_selection(dataset, state.registry)
    start = _parse_date(from_, "from") if from_ else base.start
    end = _parse_date(to, "to") if to else base.end
    if services:
        wanted = frozenset(s.strip() for s in services.split(",") if s.strip())
        for sid in wanted:
            if not state.registry.has_service(sid):
                raise ApiError(400, "BAD_QUERY", f"unknown service {sid!r}")
    else:
        wanted = base.services
    if start >= end:
        raise ApiError(400, "BAD_QUERY", "'from' must precede 'to'")
    if not wanted:
        raise ApiError(400, "BAD_QUERY", "at least one service must be selected")
    return AnalysisSelection(start=start, end=end, services=wanted)


def _record_status(record: IncidentRecord) -> str:
    if record.stage_times:
        return max(record.stage_times).token
    return "resolved" if record.end else "reported"


def _record_json(record: IncidentRecord) -> dict:
    payload = record.to_dict()
    payload["duration_seconds"] = record.duration_seconds
    payload["status"] = _record_status(record)
    return payload


def _sort_records(records: list[IncidentRecord], sort: str, order: str) -> list[IncidentRecord]:
    reverse = order == "desc"

    if sort == "start":
        return sorted(records, key=lambda r: (r.start, r.incident_id), reverse=reverse)
    if sort == "provider":
        return sorted(records, key=lambda r: (r.provider, r.incident_id), reverse=reverse)
    if sort == "impact":
        return sorted(records, key=lambda r: (int(r.impact), r.incident_id), reverse=reverse)

    # end/duration: open incidents always sort last, whatever the order
    if sort == "end":
        closed = sorted(
            (r for r in records if r.end is not None),
            key=lambda r: (r.end, r.incident_id),
            reverse=reverse,
        )
    else:
        closed = sorted(
            (r for r in records if r.end is not None),
            key=lambda r: (r.duration_seconds, r.incident_id),
            reverse=reverse,
        )
    open_ = sorted((r for r in records if r.end is None), key=lambda r: r.incident_id)
    return closed + open_


def _run_scrape_job(state: AppState, job: ScrapeJob) -> None:
    from fails.model import utc_now

    job.state = "running"
    job.started_at = utc_now()
    try:
        dataset, report = run_pipeline(state.scrape_config, registry=state.registry)
        job.report = report
        if state.data_file.exists():
            base = store.read_dataset(state.data_file)
            merged, merge_report = store.merge_datasets(base, dataset)
        else:
            merged = dataset
            merge_report = store.MergeReport(added=len(dataset.records))
        store.write_dataset(merged, state.data_file)
        job.merge_report = merge_report
        job.state = "succeeded"
    except Exception as exc:  # job must never take the server down
        job.error = str(exc)
        job.state = "failed"
    finally:
        job.finished_at = utc_now()


def create_app(
    data_file: str | Path,
    scrape_config: Optional[ScrapeConfig] = None,
    client: Optional[CompletionClient] = None,
    use_mock_client: bool = False,
    registry: Optional[Registry] = None,
) -> FastAPI:
    registry = registry or builtin_registry()
    if client is None:
        client = MockClient() if use_mock_client else RemoteClient()
    if scrape_config is None:
        scrape_config = ScrapeConfig(providers=frozenset(p.id for p in registry.providers))

    state = AppState(
        data_file=Path(data_file),
        scrape_config=scrape_config,
        client=client,
        registry=registry,
    )
    app = FastAPI(title="fails", version="0.1.0")
    app.state.fails = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    # ---- scraping -------------------------------------------------------

    @app.post("/api/scrape", status_code=202)
    def start_scrape():
        with state._lock:
            if state.active_job() is not None:
                raise ApiError(409, "SCRAPE_IN_PROGRESS", "a scrape job is already running")
            job = ScrapeJob(job_id=uuid.uuid4().hex)
            state.jobs[job.job_id] = job
        thread = threading.Thread(target=_run_scrape_job, args=(state, job), daemon=True)
        thread.start()
        return {"job_id": job.job_id}

    @app.get("/api/scrape/{job_id}")
    def scrape_status(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            raise ApiError(404, "UNKNOWN_JOB", f"no scrape job {job_id!r}")
        return job.to_dict()

    # ---- incidents ------------------------------------------------------

    @app.get("/api/incidents")
    def incidents(
        provider: Optional[str] = None,
        service: Optional[str] = None,
        from_: Optional[str] = Query(None, alias="from"),
        to: Optional[str] = None,
        sort: str = "start",
        order: str = "asc",
        page: int = 1,
        page_size: int = DEFAULT_PAGE_SIZE,
    ):
        dataset, _ = state.dataset()
        if sort not in SORT_KEYS:
            raise ApiError(400, "BAD_QUERY", f"unknown sort key {sort!r}; one of {SORT_KEYS}")
        if order not in ("asc", "desc"):
            raise ApiError(400, "BAD_QUERY", f"order must be asc or desc, not {order!r}")
        if page < 1 or page_size < 1 or page_size > MAX_PAGE_SIZE:
            raise ApiError(400, "BAD_QUERY", f"bad pagination (page_size <= {MAX_PAGE_SIZE})")

        records = list(dataset.records)
        if provider:
            records = [r for r in records if r.provider == provider]
        if service:
            records = [r for r in records if service in r.services]
        if from_:
            lo = _parse_date(from_, "from")
            records = [r for r in records if r.start >= lo]
        if to:
            hi = _parse_date(to, "to")
            records = [r for r in records if r.start <= hi]

        ordered = _sort_records(records, sort, order)
        total = len(ordered)
        window = ordered[(page - 1) * page_size : page * page_size]
        return {
            "items": [_record_json(r) for r in window],
            "total": total,
            "page": page,
            "page_size": page_size,
        }

    # ---- plots ----------------------------------------------------------

    def _plot_kind(name: str) -> PlotKind:
        try:
            return PlotKind.from_name(name)
        except KeyError:
            raise ApiError(404, "UNKNOWN_KIND", f"unknown plot kind {name!r}") from None

    def _build_spec(kind: PlotKind, from_, to, services):
        dataset, _ = state.dataset()
        sel = _parse_selection(state, dataset, from_, to, services)
        try:
            return build_plot_spec(kind, dataset, sel, registry=state.registry)
        except InsufficientData as exc:
            raise ApiError(422, "INSUFFICIENT_DATA", str(exc)) from exc

    @app.get("/api/plots/{kind_name}/spec")
    def plot_spec(
        kind_name: str,
        from_: Optional[str] = Query(None, alias="from"),
        to: Optional[str] = None,
        services: Optional[str] = None,
    ):
        kind = _plot_kind(kind_name)
        return _build_spec(kind, from_, to, services).to_dict()

    @app.get("/api/plots/{kind_name}")
    def plot_image(
        kind_name: str,
        from_: Optional[str] = Query(None, alias="from"),
        to: Optional[str] = None,
        services: Optional[str] = None,
        format: str = "svg",
        width: int = 1600,
        height: int = 900,
    ):
        kind = _plot_kind(kind_name)
        try:
            fmt = ImageFormat(format)
        except ValueError:
            raise ApiError(400, "BAD_QUERY", f"format must be svg or png, not {format!r}")
        spec = _build_spec(kind, from_, to, services)
        plot = render(spec, format=fmt, width=width, height=height)
        media = "image/svg+xml" if fmt == ImageFormat.SVG else "image/png"
        return Response(content=plot.data, media_type=media)

    # ---- LLM analysis ---------------------------------------------------

    @app.post("/api/analyze/{kind_name}")
    def analyze_one(
        kind_name: str,
        from_: Optional[str] = Query(None, alias="from"),
        to: Optional[str] = None,
        services: Optional[str] = None,
    ):
        kind = _plot_kind(kind_name)
        spec = _build_spec(kind, from_, to, services)
        plot = render(spec, format=ImageFormat.PNG, width=800, height=450)
        try:
            text = analyze_plot(state.client, plot, spec)
        except ClientError as exc:
            raise ApiError(502, "LLM_UPSTREAM", str(exc)) from exc
        return {"analysis": text}

    @app.post("/api/analyze-all")
    def analyze_everything(
        from_: Optional[str] = Query(None, alias="from"),
        to: Optional[str] = None,
        services: Optional[str] = None,
    ):
        dataset, _ = state.dataset()
        sel = _parse_selection(state, dataset, from_, to, services)
        plots: dict[PlotKind, tuple] = {}
        for kind in PlotKind:
            try:
                spec = build_plot_spec(kind, dataset, sel, registry=state.registry)
            except InsufficientData:
                continue
            plots[kind] = (render(spec, format=ImageFormat.PNG, width=800, height=450), spec)
        if not plots:
            raise ApiError(422, "INSUFFICIENT_DATA", "no plot kind has data in this selection")
        try:
            text = analyze_all(state.client, plots)
        except ClientError as exc:
            raise ApiError(502, "LLM_UPSTREAM", str(exc)) from exc
        return {"analysis": text, "kinds": sorted(k.value for k in plots)}

    # ---- chat -----------------------------------------------------------

    @app.post("/api/chat")
    def chat_endpoint(body: dict):
        message = (body or {}).get("message", "").strip()
        if not message:
            raise ApiError(400, "BAD_QUERY", "message must be non-empty")
        dataset, dataset_hash = state.dataset()

        session_id = (body or {}).get("session_id")
        with state._lock:
            if session_id is not None:
                entry = state.sessions.get(session_id)
                if entry is None:
                    raise ApiError(404, "UNKNOWN_SESSION", f"no chat session {session_id!r}")
            else:
                digest = build_dataset_digest(dataset)
                session = new_session(digest)
                entry = {"session": session, "dataset_hash": dataset_hash}
                state.sessions[session.session_id] = entry
                session_id = session.session_id

            if entry["dataset_hash"] != dataset_hash:
                from dataclasses import replace

                entry["session"] = replace(
                    entry["session"], digest=build_dataset_digest(dataset)
                )
                entry["dataset_hash"] = dataset_hash
            session = entry["session"]

        try:
            reply, updated = chat(state.client, session, message)
        except ClientError as exc:
            raise ApiError(502, "LLM_UPSTREAM", str(exc)) from exc
        with state._lock:
            state.sessions[session_id]["session"] = updated
        return {"session_id": session_id, "reply": reply}

    # ---- summary --------------------------------------------------------

    @app.get("/api/summary")
    def summary():
        dataset, _ = state.dataset()
        rows = analytics.dataset_summary(dataset)
        return [
            {
                "provider": s.provider,
                "first_date": s.first.date().isoformat(),
                "last_date": s.last.date().isoformat(),
                "reports": s.reports,
                "maintenance_reports": s.maintenance_reports,
            }
            for s in rows
        ]

    @app.get("/api/health")
    def health():
        dataset, _ = state.dataset()
        return {"status": "ok", "incidents": len(dataset.records)}

    return app
