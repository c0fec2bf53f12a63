"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A configured size cap (sphere size, degree, BFS radius) was exceeded."""


class CertificateError(AssertionError):
    """An exact certificate failed to recompose. Always indicates a bug."""


class NotOppositeError(ValueError):
    pass


class NoSolverError(RuntimeError):
    """No generator moves an adjacent opposite pair back to the base pair."""
