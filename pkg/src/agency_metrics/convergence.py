"""Closed-form approximation and optimization rate estimates.

Asymptotic constants are set to 1 throughout; every report says so via
``theta_constants_assumed``.
"""

import math
from dataclasses import dataclass

from .exceptions import DomainError

NC_BASES = {"natural": math.log(10.0), "ten": 1.0}


@dataclass(frozen=True)
class NetworkShape:
    """Depth ``L`` and parameter count ``N``; ``N`` is stored as ``log10``."""

    depth_l: int
    log10_params_n: float

    def __post_init__(self):
        if int(self.depth_l) != self.depth_l or self.depth_l < 3:
            raise DomainError(f"depth_l must be an integer >= 3, got {self.depth_l}")
        if not math.isfinite(self.log10_params_n):
            raise DomainError("log10_params_n must be finite")
        object.__setattr__(self, "depth_l", int(self.depth_l))
        object.__setattr__(self, "log10_params_n", float(self.log10_params_n))

    @classmethod
    def from_params(cls, depth_l, params_n):
        if not params_n > 0 or not math.isfinite(params_n):
            raise DomainError(f"params_n must be positive, got {params_n}")
        return cls(depth_l, math.log10(params_n))


def bounded_depth_epsilon(shape):
    """``log10 eps`` solving ``N = eps ** (-1 / (2 (L - 2)))`` at equality."""
    return -2.0 * (shape.depth_l - 2) * shape.log10_params_n


def log_complexity(epsilon_log10, base="natural"):
    """``log(1 / eps)`` in base e or 10, from ``log10 eps``."""
    if base not in NC_BASES:
        raise DomainError(f"base must be one of {sorted(NC_BASES)}, got {base!r}")
    epsilon_log10 = float(epsilon_log10)
    if not math.isfinite(epsilon_log10) or epsilon_log10 > 0:
        raise DomainError(f"epsilon must lie in (0, 1]; got log10 eps = {epsilon_log10}")
    return (0.0 - epsilon_log10) * NC_BASES[base]


@dataclass(frozen=True)
class RateQuery:
    dim_d: float
    sparsity_s: float
    iterations_t: float

    def __post_init__(self):
        for name in ("dim_d", "sparsity_s", "iterations_t"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be positive and finite, got {value}")
            object.__setattr__(self, name, value)
        if self.sparsity_s > self.dim_d:
            raise DomainError("sparsity_s cannot exceed dim_d")
        if self.dim_d <= 1:
            raise DomainError("dim_d must exceed 1 for log d to be positive")


@dataclass(frozen=True)
class RateComparison:
    dense_rate: float
    sparse_rate: float
    speedup: float
    theta_constants_assumed: bool = True


def sparse_rate_compare(query):
    """Dense ``d / T`` against sparse ``s ln(d) / T`` gradient rates."""
    dense = query.dim_d / query.iterations_t
    sparse = query.sparsity_s * math.log(query.dim_d) / query.iterations_t
    speedup = query.dim_d / (query.sparsity_s * math.log(query.dim_d))
    return RateComparison(dense, sparse, speedup)


def convergence_report(shape=None, nc_base="natural", query=None):
    """Report dict with the keys used by the JSON interface."""
    report = {"theta_constants_assumed": True}
    if shape is not None:
        log10_eps = bounded_depth_epsilon(shape)
        report.update(
            log10_epsilon=log10_eps,
            nc_log=log_complexity(log10_eps, nc_base),
            nc_base=nc_base,
            bound_at_equality=True,
        )
    if query is not None:
        rates = sparse_rate_compare(query)
        report.update(
            dense_rate=rates.dense_rate,
            sparse_rate=rates.sparse_rate,
            speedup=rates.speedup,
        )
    return report
