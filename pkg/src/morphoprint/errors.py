"""Exception hierarchy shared across the package."""


class MorphoprintError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MorphoprintError):
    """Invalid or malformed configuration. Carries a field path when known."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class DegenerateGeometryError(MorphoprintError):
    """Geometry too degenerate to process (collinear hull, zero perimeter)."""


class ExportError(MorphoprintError):
    """A history cannot be exported with the given profile/settings."""


class SeedMismatchError(MorphoprintError):
    """A reference individual failed to re-evaluate to its archived fitness."""
