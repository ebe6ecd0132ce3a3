"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes (config 2, domain 3,
capability 4), so the split between the classes matters.
"""


class JurysimError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(JurysimError, ValueError):
    """A value violates its mathematical domain (e.g. a competence
    outside (0,1), a non-finite weight)."""


class LengthMismatchError(DomainError):
    """Paired vectors (weights/votes/competences) have different lengths."""


class EnumerationCapError(JurysimError, ValueError):
    """An exact enumeration was requested above the supported size."""


class ConfigError(JurysimError, ValueError):
    """A structurally invalid experiment or CLI configuration."""
