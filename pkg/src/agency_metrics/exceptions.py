"""Exception hierarchy.

Every error carries an ``exit_code`` so the command-line front end can map
error classes onto disjoint process exit statuses.
"""


class AgencyMetricsError(Exception):
    """Base class for all library errors."""

    exit_code = 1
    kind = "error"

    def to_dict(self):
        return {"error": self.kind, "message": str(self)}


class InputFileNotFoundError(AgencyMetricsError, FileNotFoundError):
    exit_code = 3
    kind = "file_not_found"


class ParseError(AgencyMetricsError):
    exit_code = 4
    kind = "parse_error"


class ValidationError(AgencyMetricsError, ValueError):
    """Input violates a documented invariant (stochasticity, ranges, enums)."""

    exit_code = 5
    kind = "validation_error"


class DimensionError(ValidationError):
    """Shapes of mutually dependent inputs disagree."""

    exit_code = 6
    kind = "dimension_error"


class SingularityError(ValidationError):
    """KL divergence is infinite: q vanishes on the support of p."""

    exit_code = 7
    kind = "singularity_error"


class DomainError(ValidationError):
    """Argument outside the mathematical domain of a closed-form bound."""

    exit_code = 8
    kind = "domain_error"


class ResourceError(AgencyMetricsError):
    """Exact enumeration would exceed the configured cap."""

    exit_code = 9
    kind = "resource_error"


class IterationLimitError(AgencyMetricsError):
    """An iterative solver hit ``max_iter`` before certifying its tolerance."""

    exit_code = 10
    kind = "iteration_limit_error"

    def __init__(self, message, gap=None, iterations=None):
        super().__init__(message)
        self.gap = gap
        self.iterations = iterations

    def to_dict(self):
        out = super().to_dict()
        out["gap"] = self.gap
        out["iterations"] = self.iterations
        return out
