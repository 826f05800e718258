"""Access to the data shipped inside the package: profiles, scripts,
mock fixtures, and study log fixtures."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import NotFoundError


def bundled_path(*parts: str) -> Path:
    """Resolve a path under the packaged ``bundled/`` data directory."""
    base = resources.files("pagewright") / "bundled"
    target = Path(str(base)).joinpath(*parts)
    if not target.exists():
        raise NotFoundError(f"no bundled data at {'/'.join(parts)}")
    return target
