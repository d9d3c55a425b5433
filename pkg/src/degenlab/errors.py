"""Exception types shared across the package."""


class DomainError(ValueError):
    """Evaluation point lies outside the declared domain box."""


class SchemaError(ValueError):
    """Malformed scenario or profile document; message names the field."""


class ResourceLimitError(RuntimeError):
    """Requested mesh or workload exceeds a configured cap."""


class SolverError(RuntimeError):
    """Linear solve failed to reach its residual target."""


class CflError(RuntimeError):
    """Leapfrog iteration became unstable (norm growth beyond guard)."""


class InconclusiveIntegralError(RuntimeError):
    """Graded quadrature exhausted its budget without settling
    convergent-vs-divergent; the caller decides how to proceed."""
