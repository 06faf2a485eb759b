"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes, so every numerical routine
raises one of these rather than a bare ``ValueError``/``RuntimeError``.
"""


class SSHRabiError(Exception):
    """Base class for all package errors."""


class ConfigError(SSHRabiError, ValueError):
    """Bad user input: parameters, configuration files, fixtures."""


class DomainError(ConfigError):
    """Argument outside the domain where a formula is defined."""


class DegeneratePointError(DomainError):
    """E_k = 0, so the band coefficients are undefined."""


class IndeterminatePopulationError(DomainError):
    """n_c == n_v; the stability predicates need a strict imbalance."""


class FixtureParseError(ConfigError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class NumericalError(SSHRabiError, RuntimeError):
    """A numerical procedure (quadrature, search) did not converge."""


class QuadratureError(NumericalError):
    def __init__(self, message, estimate, error_bound):
        self.estimate = estimate
        self.error_bound = error_bound
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error_bound!r})")


class SearchError(NumericalError):
    pass


class ModelConsistencyError(SSHRabiError):
    """Profiles that do not combine into a real dispersion per circulant mode."""


class NormalizationError(SSHRabiError, ValueError):
    pass


class AliasingError(SSHRabiError, ValueError):
    pass
