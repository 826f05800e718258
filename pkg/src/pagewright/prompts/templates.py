"""Prompt templates: UTF-8 text files with ``{{slot_name}}`` placeholders.

Templates are data, not code; each stack profile ships its own template
directory and operators can edit the wording without touching the package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigurationError, ValidationError
from .kinds import PromptKind

_SLOT_RE = re.compile(r"\{\{([a-z][a-z0-9_]*)\}\}")


@dataclass(frozen=True)
class PromptTemplate:
    """A named template; ``slots`` is derived from the body at load time."""

    id: str
    kind: PromptKind
    body: str
    slots: tuple[str, ...] = field(default="")  # type: ignore[assignment]

    def __post_init__(self):
        seen: list[str] = []
        for match in _SLOT_RE.finditer(self.body):
            name = match.group(1)
            if name not in seen:
                seen.append(name)
        object.__setattr__(self, "slots", tuple(seen))

    def render(self, values: dict[str, str]) -> str:
        """Fill every slot; extra or missing keys are errors."""
        missing = set(self.slots) - set(values)
        extra = set(values) - set(self.slots)
        if missing or extra:
            raise ValidationError(
                f"template {self.id!r}: missing slots {sorted(missing)}, "
                f"unexpected {sorted(extra)}"
            )
        out = self.body
        for name, value in values.items():
            out = out.replace("{{" + name + "}}", value)
        return out


def load_template_dir(
    directory: Path, kinds: dict[str, str] | None = None
) -> dict[str, PromptTemplate]:
    """Load every ``*.txt`` file in *directory* as a template.

    ``kinds`` maps template id to a PromptKind value; unmapped templates
    default to Initial (they are composition building blocks, not
    user-facing kinds).
    """
    if not directory.is_dir():
        raise ConfigurationError(f"template directory missing: {directory}")
    kinds = kinds or {}
    templates: dict[str, PromptTemplate] = {}
    for path in sorted(directory.glob("*.txt")):
        template_id = path.stem
        kind = PromptKind.parse(kinds[template_id]) if template_id in kinds else PromptKind.INITIAL
        templates[template_id] = PromptTemplate(
            id=template_id, kind=kind, body=path.read_text(encoding="utf-8")
        )
    if not templates:
        raise ConfigurationError(f"no templates found in {directory}")
    return templates
