"""Service configuration from file, environment, and CLI flags.

Precedence: CLI flag > ``PAGEWRIGHT_*`` environment variable > config file
> built-in default. The config file is JSON with the same key names the
CLI uses.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .errors import ConfigurationError
from .gateway import ProviderConfig
from .service import ServiceConfig

# file/env key -> (env var, parser)
_KEYS = {
    "data_root": "PAGEWRIGHT_DATA_ROOT",
    "host": "PAGEWRIGHT_HOST",
    "port": "PAGEWRIGHT_PORT",
    "token": "PAGEWRIGHT_TOKEN",
    "provider": "PAGEWRIGHT_PROVIDER",
    "endpoint": "PAGEWRIGHT_ENDPOINT",
    "credential": "PAGEWRIGHT_CREDENTIAL",
    "model": "PAGEWRIGHT_MODEL",
    "fixtures": "PAGEWRIGHT_FIXTURES",
    "port_range_start": "PAGEWRIGHT_PORT_RANGE_START",
    "auto_install": "PAGEWRIGHT_AUTO_INSTALL",
}

_INT_KEYS = {"port", "port_range_start"}
_BOOL_KEYS = {"auto_install"}


def _parse(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigurationError(f"{key} must be an integer, got {value!r}") from exc
    if key in _BOOL_KEYS:
        lowered = value.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"{key} must be a boolean, got {value!r}")
    return value


def load_settings(
    config_file: Path | None = None,
    cli_overrides: dict | None = None,
    env: dict[str, str] | None = None,
) -> dict:
    """Merge file, environment, and CLI values into one settings dict."""
    env = os.environ if env is None else env
    settings: dict = {
        "data_root": "./pagewright-data",
        "host": "127.0.0.1",
        "port": 8800,
        "token": None,
        "provider": "live",
        "endpoint": None,
        "credential": None,
        "model": None,
        "fixtures": None,
        "port_range_start": 4300,
        "auto_install": True,
    }

    if config_file is not None:
        if not config_file.is_file():
            raise ConfigurationError(f"config file not found: {config_file}")
        try:
            loaded = json.loads(config_file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid JSON in {config_file}: {exc}") from exc
        unknown = set(loaded) - set(settings)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        settings.update(loaded)

    for key, env_var in _KEYS.items():
        if env_var in env:
            settings[key] = _parse(key, env[env_var])

    for key, value in (cli_overrides or {}).items():
        if value is not None:
            settings[key] = value

    return settings


def build_service_config(settings: dict) -> ServiceConfig:
    provider_mode = settings["provider"]
    model_id = settings["model"] or ("mock-model" if provider_mode == "mock" else "gpt-4")
    provider = ProviderConfig(
        mode=provider_mode,
        endpoint_url=settings["endpoint"] or "",
        credential=settings["credential"] or "",
        model_id=model_id,
        fixtures_dir=Path(settings["fixtures"]) if settings["fixtures"] else None,
    )
    provider.validate()
    start = int(settings["port_range_start"])
    return ServiceConfig(
        data_root=Path(settings["data_root"]),
        provider=provider,
        host=settings["host"],
        api_token=settings["token"],
        auto_install=bool(settings["auto_install"]),
        port_range=(start, start + 99),
    )
