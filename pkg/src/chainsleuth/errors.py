"""Exception taxonomy shared across the package."""


class ChainsleuthError(Exception):
    """Base class for all package errors."""

    code = "error"

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self), "detail": getattr(self, "detail", None)}


class FixtureError(ChainsleuthError):
    """Malformed fixture bundle; message names the offending file/record."""

    code = "fixture_error"


class IntegrityError(ChainsleuthError):
    """Cross-reference or ordering violation in stored chain data."""

    code = "integrity_error"


class MalformedEventError(ChainsleuthError):
    """Log matched a known event signature but its payload is invalid."""

    code = "malformed_event"


class TransportError(ChainsleuthError):
    """Remote API failure that survived the retry budget."""

    code = "transport_error"


class ConfigError(ChainsleuthError):
    """Invalid configuration or CLI arguments."""

    code = "config_error"
