"""Command-line entry point.

Verbs: ``serve`` (run the HTTP service), ``replay`` (drive a scripted
session against mock fixtures), ``analyze`` (prompt-log category counts),
``stats`` (rollback counts), ``export-graph`` (version graph as DOT/JSON).

Exit codes: 0 success, 1 assertion/replay failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analytics import (
    analyze_log,
    graph_to_dot,
    graph_to_json,
    load_prompt_log,
    render_report_table,
    rollback_counts,
)
from .bundled import bundled_path
from .errors import NotFoundError, PagewrightError
from .gateway import ProviderConfig
from .replay import replay
from .service import ServiceConfig, ServiceCore

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _resolve_bundled_script(name: str) -> tuple[Path, Path] | None:
    """Map a bare script name to its bundled script + fixtures pair."""
    try:
        script = bundled_path("scripts", f"{name}.jsonl")
        fixtures = bundled_path("fixtures", name)
    except NotFoundError:
        return None
    return script, fixtures


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app
    from .config import build_service_config, load_settings

    settings = load_settings(
        config_file=Path(args.config) if args.config else None,
        cli_overrides={
            "host": args.host,
            "port": args.port,
            "data_root": args.data_root,
            "provider": args.provider,
            "endpoint": args.endpoint,
            "credential": args.credential,
            "model": args.model,
            "fixtures": args.fixtures,
            "token": args.token,
            "port_range_start": args.port_range_start,
            "auto_install": False if args.no_install else None,
        },
    )
    core = ServiceCore(build_service_config(settings))
    try:
        uvicorn.run(
            create_app(core), host=settings["host"], port=int(settings["port"]), log_level="info"
        )
    finally:
        core.close()
    return EXIT_OK


def _cmd_replay(args: argparse.Namespace) -> int:
    script_arg: str = args.script
    fixtures = Path(args.fixtures) if args.fixtures else None
    script_path = Path(script_arg)
    if not script_path.exists() and "/" not in script_arg:
        bundled = _resolve_bundled_script(script_arg)
        if bundled is not None:
            script_path, default_fixtures = bundled
            fixtures = fixtures or default_fixtures
    if not script_path.exists():
        print(f"error: script not found: {script_arg}", file=sys.stderr)
        return EXIT_USAGE
    if fixtures is None:
        print("error: --fixtures is required for non-bundled scripts", file=sys.stderr)
        return EXIT_USAGE

    report = replay(script_path, fixtures, Path(args.data_root) if args.data_root else None)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_FAILURE


def _load_log(path_arg: str) -> Path:
    path = Path(path_arg)
    if not path.exists() and "/" not in path_arg:
        try:
            return bundled_path("logs", f"{path_arg}.jsonl")
        except NotFoundError:
            pass
    return path


def _cmd_analyze(args: argparse.Namespace) -> int:
    path = _load_log(args.log)
    if not path.exists():
        print(f"error: log not found: {args.log}", file=sys.stderr)
        return EXIT_USAGE
    report = analyze_log(load_prompt_log(path))
    if args.json:
        payload = {
            "participants": report.participants,
            "counts": report.counts,
            "totals": report.totals_row(),
        }
        print(json.dumps(payload, indent=2))
    else:
        print(render_report_table(report))
    return EXIT_OK


def _open_core(data_root: str) -> ServiceCore:
    return ServiceCore(
        ServiceConfig(
            data_root=Path(data_root),
            provider=ProviderConfig(mode="mock", fixtures_dir=Path(data_root)),
            auto_install=False,
        )
    )


def _cmd_stats(args: argparse.Namespace) -> int:
    log_path = _load_log(args.target)
    if log_path.exists() and log_path.is_file():
        counts = rollback_counts(load_prompt_log(log_path))
        for participant, count in counts.items():
            print(f"{participant}\t{count}")
        print(f"total\t{sum(counts.values())}")
        return EXIT_OK

    core = _open_core(args.data_root)
    try:
        project = core.find_project(args.target)
        graph = core.version_graph(project.id)
        print(f"project\t{project.name}")
        print(f"rollback events\t{len(graph.abandoned_branches)}")
        print(f"discarded snapshots\t{graph.discarded_count}")
        print(f"active path length\t{len(graph.active_path)}")
    except NotFoundError:
        print(f"error: no log file or project named {args.target!r}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        core.close()
    return EXIT_OK


def _cmd_export_graph(args: argparse.Namespace) -> int:
    core = _open_core(args.data_root)
    try:
        project = core.find_project(args.project)
        graph = core.version_graph(project.id)
        if args.format == "dot":
            print(graph_to_dot(graph), end="")
        else:
            print(json.dumps(graph_to_json(graph), indent=2))
    except NotFoundError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        core.close()
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pagewright", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", help="JSON config file; flags and PAGEWRIGHT_* env override it")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--data-root", default=None)
    serve.add_argument("--provider", choices=["mock", "live"], default=None)
    serve.add_argument("--endpoint", help="chat-completion endpoint base URL")
    serve.add_argument("--credential", help="bearer credential for the provider")
    serve.add_argument("--model", default=None, help="model id (default: gpt-4 live, mock-model mock)")
    serve.add_argument("--fixtures", help="fixtures dir (mock mode)")
    serve.add_argument("--token", help="static bearer token required from clients")
    serve.add_argument("--no-install", action="store_true", help="skip install at scaffold")
    serve.add_argument("--port-range-start", type=int, default=None)
    serve.set_defaults(func=_cmd_serve)

    rep = sub.add_parser("replay", help="replay a scripted session against mock fixtures")
    rep.add_argument("script", help="script path or bundled name (todoapp, forumapp, ...)")
    rep.add_argument("--fixtures", help="mock fixtures directory")
    rep.add_argument("--data-root", help="keep replay state here instead of a temp dir")
    rep.set_defaults(func=_cmd_replay)

    ana = sub.add_parser("analyze", help="prompt-log category counts per participant")
    ana.add_argument("log", help="log path or bundled name (exploratory_study, ...)")
    ana.add_argument("--json", action="store_true")
    ana.set_defaults(func=_cmd_analyze)

    stats = sub.add_parser("stats", help="rollback stats for a log file or stored project")
    stats.add_argument("target", help="log path, bundled log name, or project name/id")
    stats.add_argument("--data-root", default="./pagewright-data")
    stats.set_defaults(func=_cmd_stats)

    export = sub.add_parser("export-graph", help="export a project's version graph")
    export.add_argument("project", help="project name or id")
    export.add_argument("--data-root", default="./pagewright-data")
    export.add_argument("--format", choices=["dot", "json"], default="dot")
    export.set_defaults(func=_cmd_export_graph)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except PagewrightError as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
