"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Arguments or configuration violate a documented contract."""


class ResourceError(RuntimeError):
    """Requested work exceeds a hard memory or register-width guard."""


class ConsistencyError(RuntimeError):
    """An internal cross-check failed (e.g. an energy matches no level)."""
