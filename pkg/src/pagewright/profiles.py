"""Stack profiles: the template data that defines a generated app's shape.

A profile directory contains::

    profile.json      declarations (commands, shared files, features...)
    templates/        prompt templates (*.txt)
    scaffold/         baseline project files, copied verbatim
    features/<id>/    canned projection files for each predefined feature

Profiles are pure data: adding a stack means adding a directory, not code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .model import FileEntry, normalize_path
from .prompts.templates import PromptTemplate, load_template_dir

REQUIRED_TEMPLATES = (
    "system_preamble",
    "context_section",
    "page_creation_task",
    "page_creation_user",
    "refinement_task",
    "transition_task",
)


@dataclass(frozen=True)
class CommandSpec:
    """One supervised command: argv, working dir, extra environment.

    ``{frontend_port}``, ``{backend_port}`` and ``{host}`` tokens in argv
    and env values are substituted at start time.
    """

    argv: tuple[str, ...]
    cwd: str = "."
    env: dict[str, str] = field(default_factory=dict)

    def substituted(self, values: dict[str, str]) -> "CommandSpec":
        def sub(text: str) -> str:
            for token, value in values.items():
                text = text.replace("{" + token + "}", value)
            return text

        return CommandSpec(
            argv=tuple(sub(a) for a in self.argv),
            cwd=self.cwd,
            env={k: sub(v) for k, v in self.env.items()},
        )


@dataclass(frozen=True)
class ReadinessProbe:
    port_token: str  # which allocated port this server listens on
    path: str = "/"


@dataclass(frozen=True)
class PredefinedFeature:
    """A built-in, pre-tested capability applied without authoring prompts."""

    id: str
    description: str
    canned_projection: tuple[FileEntry, ...]

    def manifest(self) -> list[str]:
        return sorted(entry.path for entry in self.canned_projection)


@dataclass(frozen=True)
class StackProfile:
    id: str
    display_name: str
    scaffold_tree: tuple[FileEntry, ...]
    shared_context_paths: tuple[str, ...]
    install_commands: tuple[CommandSpec, ...]
    run_commands: dict[str, CommandSpec]  # server name -> command
    readiness: dict[str, ReadinessProbe]
    preview_url_template: str
    ignore_globs: tuple[str, ...]
    predefined_features: tuple[PredefinedFeature, ...]
    templates: dict[str, PromptTemplate]

    def feature(self, feature_id: str) -> PredefinedFeature | None:
        for feat in self.predefined_features:
            if feat.id == feature_id:
                return feat
        return None


def _read_tree(directory: Path) -> tuple[FileEntry, ...]:
    if not directory.is_dir():
        return ()
    entries = []
    for path in sorted(directory.rglob("*")):
        if path.is_file():
            rel = normalize_path(path.relative_to(directory).as_posix())
            entries.append(FileEntry(path=rel, content=path.read_bytes()))
    return tuple(entries)


def _command(spec: dict) -> CommandSpec:
    return CommandSpec(
        argv=tuple(spec["argv"]),
        cwd=spec.get("cwd", "."),
        env=dict(spec.get("env", {})),
    )


def load_profile(directory: Path) -> StackProfile:
    manifest_path = directory / "profile.json"
    if not manifest_path.is_file():
        raise ConfigurationError(f"profile manifest missing: {manifest_path}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))

    templates = load_template_dir(directory / "templates", manifest.get("template_kinds"))
    missing = [t for t in REQUIRED_TEMPLATES if t not in templates]
    if missing:
        raise ConfigurationError(f"profile {manifest['id']!r} lacks templates: {missing}")

    features = []
    for feat in manifest.get("predefined_features", []):
        projection = _read_tree(directory / "features" / feat["id"])
        if not projection:
            raise ConfigurationError(
                f"predefined feature {feat['id']!r} has an empty projection"
            )
        features.append(
            PredefinedFeature(
                id=feat["id"],
                description=feat.get("description", ""),
                canned_projection=projection,
            )
        )

    return StackProfile(
        id=manifest["id"],
        display_name=manifest.get("display_name", manifest["id"]),
        scaffold_tree=_read_tree(directory / "scaffold"),
        shared_context_paths=tuple(
            normalize_path(p) for p in manifest.get("shared_context_paths", [])
        ),
        install_commands=tuple(_command(c) for c in manifest.get("install_commands", [])),
        run_commands={
            name: _command(c) for name, c in manifest.get("run_commands", {}).items()
        },
        readiness={
            name: ReadinessProbe(port_token=p["port_token"], path=p.get("path", "/"))
            for name, p in manifest.get("readiness", {}).items()
        },
        preview_url_template=manifest.get(
            "preview_url", "http://{host}:{frontend_port}/"
        ),
        ignore_globs=tuple(manifest.get("ignore_globs", [])),
        predefined_features=tuple(features),
        templates=templates,
    )


class ProfileRegistry:
    """All known stack profiles, loaded once at startup."""

    def __init__(self, directories: list[Path]):
        self._profiles: dict[str, StackProfile] = {}
        for directory in directories:
            profile = load_profile(directory)
            self._profiles[profile.id] = profile

    @staticmethod
    def bundled(extra_dirs: list[Path] | None = None) -> "ProfileRegistry":
        from .bundled import bundled_path

        root = bundled_path("profiles")
        directories = [p for p in sorted(root.iterdir()) if p.is_dir()]
        return ProfileRegistry(directories + (extra_dirs or []))

    def get(self, profile_id: str) -> StackProfile:
        if profile_id not in self._profiles:
            raise ConfigurationError(f"unknown stack profile: {profile_id!r}")
        return self._profiles[profile_id]

    def has(self, profile_id: str) -> bool:
        return profile_id in self._profiles

    def ids(self) -> list[str]:
        return sorted(self._profiles)

    def all(self) -> list[StackProfile]:
        return [self._profiles[i] for i in self.ids()]
