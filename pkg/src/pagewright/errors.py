"""Exception hierarchy shared by every layer of the service.

Each error carries a stable ``code`` string that the HTTP layer maps onto a
status code and that the CLI prints verbatim, so callers can match on codes
rather than message text.
"""

from __future__ import annotations


class PagewrightError(Exception):
    """Base class for all service errors."""

    code = "internal-error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ValidationError(PagewrightError):
    """Caller supplied input that fails a precondition (empty name, bad kind...)."""

    code = "validation-error"


class ConflictError(PagewrightError):
    """State already holds something the request would duplicate or race with."""

    code = "conflict"


class NotFoundError(PagewrightError):
    code = "not-found"


class ContractViolation(PagewrightError):
    """An operation was called in a state its contract forbids."""

    code = "contract-violation"


class ConfigurationError(PagewrightError):
    code = "configuration-error"


class PathSafetyError(ValidationError):
    """A workspace path is absolute, escapes the root, or is otherwise unsafe.

    ``reason`` is a stable tag ("absolute-path", "parent-segment", ...) used
    in projection reject lists.
    """

    code = "unsafe-path"

    def __init__(self, message: str, reason: str = "unsafe"):
        super().__init__(message)
        self.reason = reason


class NoChangeError(ConflictError):
    """Commit refused: the workspace digest equals the current head's."""

    code = "no-change"


class AtRootError(ConflictError):
    """Rollback refused: head is already the scaffold snapshot."""

    code = "at-root"


class ProjectionError(PagewrightError):
    """Applying parsed file blocks to the workspace failed; state was rolled back."""

    code = "projection-failed"


class ProviderError(PagewrightError):
    """The model provider returned a non-retryable failure."""

    code = "provider-error"


class ProviderTimeout(ProviderError):
    code = "provider-timeout"


class FixtureMissing(ProviderError):
    """Mock provider has no fixture for the request; carries the canonical hash."""

    code = "fixture-missing"

    def __init__(self, request_hash: str):
        super().__init__(f"no fixture for request hash {request_hash}")
        self.request_hash = request_hash


class InstallFailed(PagewrightError):
    code = "install-failed"

    def __init__(self, message: str, log_tail: list[str]):
        super().__init__(message)
        self.log_tail = log_tail


class PortConflict(PagewrightError):
    code = "port-conflict"
