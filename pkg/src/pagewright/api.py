"""HTTP/JSON boundary consumed by the web UI and the CLI.

Thin layer over :class:`ServiceCore`: request validation, bearer-token
auth (when configured), and a uniform ``{code, message}`` error body.
"""

from __future__ import annotations

from fastapi import Depends, FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import (
    ConfigurationError,
    ConflictError,
    ContractViolation,
    NotFoundError,
    PagewrightError,
    ValidationError,
)
from .service import JobTicket, ServiceCore

API_PREFIX = "/api/v1"

_STATUS_BY_ERROR = [
    (NotFoundError, 404),
    (ConflictError, 409),
    (ContractViolation, 409),
    (ValidationError, 400),
    (ConfigurationError, 400),
]


class CreateProjectBody(BaseModel):
    name: str
    context_description: str = ""
    stack_profile: str = "default"


class AddPageBody(BaseModel):
    name: str
    description: str = ""


class SubmitPromptBody(BaseModel):
    page_id: str
    kind: str
    text: str
    target_page_id: str | None = None
    label: str | None = Field(default=None, max_length=120)


class CheckoutBody(BaseModel):
    snapshot_id: str


def _error_status(exc: PagewrightError) -> int:
    for error_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            return status
    return 500


def create_app(core: ServiceCore) -> FastAPI:
    app = FastAPI(title="pagewright", version="0.1.0")
    app.state.core = core
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    async def require_token(request: Request) -> None:
        token = core.config.api_token
        if not token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise PermissionError("invalid or missing bearer token")

    auth = Depends(require_token)

    @app.exception_handler(PagewrightError)
    async def handle_service_error(_: Request, exc: PagewrightError):
        return JSONResponse(
            status_code=_error_status(exc),
            content={"code": exc.code, "message": exc.message},
        )

    @app.exception_handler(PermissionError)
    async def handle_auth_error(_: Request, exc: PermissionError):
        return JSONResponse(status_code=401, content={"code": "unauthorized", "message": str(exc)})

    @app.get(f"{API_PREFIX}/health")
    async def health():
        return {"status": "ok"}

    @app.get(f"{API_PREFIX}/profiles", dependencies=[auth])
    async def list_profiles():
        return [
            {
                "id": profile.id,
                "display_name": profile.display_name,
                "predefined_features": [
                    {"id": f.id, "description": f.description}
                    for f in profile.predefined_features
                ],
            }
            for profile in core.profiles.all()
        ]

    @app.post(f"{API_PREFIX}/projects", status_code=201, dependencies=[auth])
    async def create_project(body: CreateProjectBody):
        project = core.create_project(body.name, body.context_description, body.stack_profile)
        return core.project_dict(project)

    @app.get(f"{API_PREFIX}/projects", dependencies=[auth])
    async def list_projects():
        return [core.project_dict(p) for p in core.list_projects()]

    @app.get(f"{API_PREFIX}/projects/{{project_id}}", dependencies=[auth])
    async def get_project(project_id: str):
        return core.project_dict(core.get_project(project_id))

    @app.post(f"{API_PREFIX}/projects/{{project_id}}/pages", status_code=201, dependencies=[auth])
    async def add_page(project_id: str, body: AddPageBody):
        page = core.add_page(project_id, body.name, body.description)
        return {
            "id": page.id,
            "name": page.name,
            "description": page.description,
            "status": page.status,
        }

    @app.post(f"{API_PREFIX}/projects/{{project_id}}/prompts", status_code=202, dependencies=[auth])
    async def submit_prompt(project_id: str, body: SubmitPromptBody):
        ticket = core.submit_prompt(
            project_id,
            body.page_id,
            body.kind,
            body.text,
            target_page_id=body.target_page_id,
            label=body.label,
        )
        return ticket.as_dict()

    @app.get(f"{API_PREFIX}/jobs/{{ticket_id}}", dependencies=[auth])
    async def get_job(ticket_id: str):
        ticket: JobTicket = core.get_job(ticket_id)
        return ticket.as_dict()

    @app.post(f"{API_PREFIX}/projects/{{project_id}}/rollback", dependencies=[auth])
    async def rollback(project_id: str):
        return core.rollback(project_id)

    @app.post(f"{API_PREFIX}/projects/{{project_id}}/checkout", dependencies=[auth])
    async def checkout(project_id: str, body: CheckoutBody):
        return core.checkout(project_id, body.snapshot_id)

    @app.post(f"{API_PREFIX}/projects/{{project_id}}/features/{{feature_id}}", dependencies=[auth])
    async def apply_feature(project_id: str, feature_id: str):
        return core.apply_feature(project_id, feature_id)

    @app.get(f"{API_PREFIX}/projects/{{project_id}}/history", dependencies=[auth])
    async def get_history(project_id: str):
        entries = []
        for request_record, response_record in core.transcript(project_id):
            entries.append(
                {
                    "request": {
                        "id": request_record.id,
                        "kind": request_record.kind,
                        "page_id": request_record.page_id,
                        "model_id": request_record.model_id,
                        "temperature": request_record.temperature,
                        "sent_at": request_record.sent_at,
                        "messages": [
                            {"role": m.role, "text": m.text} for m in request_record.messages
                        ],
                        "injected_paths": list(request_record.injected_paths),
                    },
                    "response": None
                    if response_record is None
                    else {
                        "id": response_record.id,
                        "text": response_record.text,
                        "token_usage": list(response_record.token_usage),
                        "latency_ms": response_record.latency_ms,
                        "finish_reason": response_record.finish_reason,
                    },
                }
            )
        return entries

    @app.get(f"{API_PREFIX}/projects/{{project_id}}/graph", dependencies=[auth])
    async def get_graph(project_id: str):
        graph = core.version_graph(project_id)
        return {
            "head": graph.head,
            "root": graph.root,
            "active_path": graph.active_path,
            "abandoned_branches": graph.abandoned_branches,
            "discarded_count": graph.discarded_count,
            "nodes": [
                {
                    "id": node.id,
                    "parent": node.parent,
                    "label": node.label,
                    "tree_digest": node.tree_digest,
                    "prompt_record_id": node.prompt_record_id,
                    "created_at": node.created_at,
                    "seq": node.seq,
                }
                for node in graph.nodes
            ],
        }

    @app.get(f"{API_PREFIX}/projects/{{project_id}}/files", dependencies=[auth])
    async def get_files(project_id: str):
        return {"paths": core.head_files(project_id), "tree_digest": core.head_digest(project_id)}

    @app.post(f"{API_PREFIX}/projects/{{project_id}}/run", dependencies=[auth])
    async def run_app(project_id: str):
        return core.run(project_id).as_dict()

    @app.post(f"{API_PREFIX}/projects/{{project_id}}/stop", dependencies=[auth])
    async def stop_app(project_id: str):
        return core.stop(project_id).as_dict()

    @app.get(f"{API_PREFIX}/projects/{{project_id}}/run", dependencies=[auth])
    async def run_status(project_id: str):
        return core.run_status(project_id).as_dict()

    @app.post(f"{API_PREFIX}/projects/{{project_id}}/install", dependencies=[auth])
    async def install(project_id: str):
        report = core.install(project_id)
        return {
            "ok": report.ok,
            "steps": [
                {"argv": s.argv, "exit_code": s.exit_code, "output_tail": s.output_tail}
                for s in report.steps
            ],
        }

    return app
