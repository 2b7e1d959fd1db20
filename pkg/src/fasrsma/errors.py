"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a special function."""


class ContractViolation(ValueError):
    """Numerical input violates a documented contract (asymmetry, negative
    eigenvalues beyond tolerance, size mismatches, ...)."""


class ConfigError(ValueError):
    """Malformed experiment configuration; message carries the field path."""


class ReportUnavailable(RuntimeError):
    """A comparison report was requested on data that cannot support it."""
