"""Measure of epsilon-agentic functions inside the cube ``[0, M]^n``.

A function ``f: {1..n} -> [0, M]`` is epsilon-agentic when every coordinate
lies within ``epsilon`` of an ideal function.  The admissible set is a box,
so its measure is the product of clipped interval lengths.  Everything is
carried as ``log10`` because realistic tolerances (``10**-360``) underflow
double precision.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_float_array, check_positive
from .exceptions import DimensionError, ValidationError

LOG10_2 = math.log10(2.0)
DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class FunctionCube:
    """Ideal function ``f_ideal`` in ``[0, bound_m]^n`` with tube half-width epsilon.

    Give ``epsilon`` directly or, for tolerances below the float range, as
    ``log10_epsilon``.
    """

    f_ideal: np.ndarray
    bound_m: float
    epsilon: float = None
    log10_epsilon: float = None

    def __post_init__(self):
        f = as_float_array(self.f_ideal, "f_ideal", ndim=1)
        if f.size == 0:
            raise ValidationError("f_ideal must have at least one coordinate")
        bound = check_positive(self.bound_m, "bound_m")
        if np.any(f < 0) or np.any(f > bound):
            raise ValidationError("f_ideal entries must lie in [0, bound_m]")
        if (self.epsilon is None) == (self.log10_epsilon is None):
            raise ValidationError("give exactly one of epsilon or log10_epsilon")
        if self.epsilon is not None:
            log10_eps = math.log10(check_positive(self.epsilon, "epsilon"))
        else:
            log10_eps = float(self.log10_epsilon)
            if not math.isfinite(log10_eps):
                raise ValidationError("log10_epsilon must be finite")
        f = f.copy()
        f.setflags(write=False)
        object.__setattr__(self, "f_ideal", f)
        object.__setattr__(self, "bound_m", bound)
        object.__setattr__(self, "log10_epsilon", log10_eps)
        object.__setattr__(self, "epsilon", 10.0 ** log10_eps)

    @property
    def n(self):
        return self.f_ideal.size

    @classmethod
    def centered(cls, n, bound_m, epsilon=None, log10_epsilon=None):
        return cls(np.full(int(n), bound_m / 2.0), bound_m, epsilon, log10_epsilon)

    def to_dict(self):
        return {
            "n": self.n,
            "bound_m": self.bound_m,
            "f_ideal": self.f_ideal.tolist(),
            "log10_epsilon": self.log10_epsilon,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            f_ideal = data["f_ideal"]
            bound = data["bound_m"]
        except KeyError as exc:
            raise ValidationError(f"cube document is missing key {exc}") from None
        cube = cls(f_ideal, bound, data.get("epsilon"), data.get("log10_epsilon"))
        if "n" in data and int(data["n"]) != cube.n:
            raise DimensionError(f"n={data['n']} but f_ideal has {cube.n} entries")
        return cube


def _log10_gap_plus_eps(gap, log10_eps):
    """``log10(gap + eps)`` for ``0 <= gap < eps`` without forming eps."""
    if gap <= 0:
        return log10_eps
    return log10_eps + math.log10(1.0 + 10.0 ** (math.log10(gap) - log10_eps))


def _eps_exceeds(gap, log10_eps):
    return gap <= 0 or log10_eps > math.log10(gap)


def log10_interval_lengths(cube):
    """``log10 length(I_i)`` with ``I_i = [max(0, f_i - eps), min(M, f_i + eps)]``."""
    e = cube.log10_epsilon
    m = cube.bound_m
    out = np.empty(cube.n)
    for i, f in enumerate(cube.f_ideal.tolist()):
        below, above = f, m - f
        clip_low = _eps_exceeds(below, e)
        clip_high = _eps_exceeds(above, e)
        if clip_low and clip_high:
            out[i] = math.log10(m)
        elif clip_low:
            out[i] = _log10_gap_plus_eps(below, e)
        elif clip_high:
            out[i] = _log10_gap_plus_eps(above, e)
        else:
            out[i] = LOG10_2 + e
    return out


@dataclass(frozen=True)
class MeasureReport:
    log10_measure: float
    log10_total: float
    log10_probability: float
    interval_lengths: np.ndarray
    log10_interval_lengths: np.ndarray
    all_interior: bool
    independence_assumed: bool = True

    def to_dict(self):
        return {
            "log10_measure": self.log10_measure,
            "log10_total": self.log10_total,
            "log10_probability": self.log10_probability,
            "interval_lengths": self.interval_lengths.tolist(),
            "log10_interval_lengths": self.log10_interval_lengths.tolist(),
            "all_interior": self.all_interior,
            "independence_assumed": self.independence_assumed,
        }


def epsilon_tube_measure(cube):
    """Lebesgue measure and probability of the epsilon-tube around ``f_ideal``."""
    logs = log10_interval_lengths(cube)
    log10_measure = math.fsum(logs.tolist())
    log10_total = cube.n * math.log10(cube.bound_m)
    interior = bool(np.all(logs == LOG10_2 + cube.log10_epsilon))
    if interior:
        # exact closed form (2 eps / M)^n
        log10_probability = cube.n * (LOG10_2 + cube.log10_epsilon - math.log10(cube.bound_m))
    else:
        log10_probability = min(0.0, log10_measure - log10_total)
    with np.errstate(under="ignore"):
        lengths = np.power(10.0, logs)
    return MeasureReport(
        log10_measure=log10_measure,
        log10_total=log10_total,
        log10_probability=log10_probability,
        interval_lengths=lengths,
        log10_interval_lengths=logs,
        all_interior=interior,
    )


@dataclass(frozen=True)
class MonteCarloResult:
    estimate: float
    std_error: float
    hits: int
    samples: int
    seed: int
    underpowered: bool
    analytic_log10_probability: float = field(default=None)

    def to_dict(self):
        return dict(self.__dict__)


def _count_hits(cube, count, seed, chunk_index):
    # each chunk owns a seed derived from (seed, chunk_index): results do not
    # depend on how chunks are spread over workers
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk_index,)))
    eps = cube.epsilon
    alive = count
    for f in cube.f_ideal.tolist():
        if alive == 0:
            break
        # coordinates are independent, so only surviving points need the next one
        u = rng.random(alive) * cube.bound_m
        alive = int(np.count_nonzero(np.abs(u - f) <= eps))
    return alive


def monte_carlo_measure(cube, samples, seed, chunk_size=DEFAULT_CHUNK, n_jobs=1):
    """Hit fraction of uniform points of ``[0, M]^n`` inside the sup-norm tube.

    Flags the run as underpowered when the analytic probability is below
    ``10 / samples``; below that level a zero estimate is expected.
    """
    samples = int(samples)
    if samples < 1:
        raise ValidationError("samples must be at least 1")
    sizes = [min(chunk_size, samples - start) for start in range(0, samples, chunk_size)]
    if n_jobs == 1:
        counts = [_count_hits(cube, size, seed, k) for k, size in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            counts = list(pool.map(lambda k: _count_hits(cube, sizes[k], seed, k), range(len(sizes))))
    hits = sum(counts)
    estimate = hits / samples
    std_error = math.sqrt(estimate * (1.0 - estimate) / samples)
    analytic = epsilon_tube_measure(cube).log10_probability
    return MonteCarloResult(
        estimate=estimate,
        std_error=std_error,
        hits=hits,
        samples=samples,
        seed=int(seed),
        underpowered=analytic < math.log10(10.0 / samples),
        analytic_log10_probability=analytic,
    )


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Curiosity, empowerment and mesa vectors spanning the agentic subspace."""

    c0: np.ndarray
    e0: np.ndarray
    a0: np.ndarray

    def __post_init__(self):
        vectors = [as_float_array(getattr(self, k), k, ndim=1) for k in ("c0", "e0", "a0")]
        if len({v.size for v in vectors}) != 1:
            raise DimensionError("basis vectors must have equal length")
        for name, vec in zip(("c0", "e0", "a0"), vectors):
            object.__setattr__(self, name, vec)

    @classmethod
    def from_tables(cls, curiosity, empowerment, mesa):
        """Flatten reward-shaped tables into basis vectors."""
        return cls(*(np.ravel(np.asarray(t, dtype=float)) for t in (curiosity, empowerment, mesa)))

    def matrix(self):
        return np.column_stack([self.c0, self.e0, self.a0])


@dataclass(frozen=True)
class ProjectionResult:
    coefficients: tuple
    residual_norm: float
    effective_rank: int

    def to_dict(self):
        return {
            "coefficients": list(self.coefficients),
            "residual_norm": self.residual_norm,
            "effective_rank": self.effective_rank,
        }


def subspace_projection(basis, f, rcond=1e-10):
    """Least-squares coordinates of ``f`` in ``span{c0, e0, a0}``.

    Singular values below ``rcond`` times the largest are dropped; the
    minimum-norm solution is returned when the basis is rank deficient.
    """
    f = as_float_array(f, "f", ndim=1)
    b = basis.matrix()
    if f.size != b.shape[0]:
        raise DimensionError(f"f has length {f.size}, basis vectors have length {b.shape[0]}")
    u, sing, vt = np.linalg.svd(b, full_matrices=False)
    rank = int(np.sum(sing > rcond * sing[0])) if sing.size and sing[0] > 0 else 0
    u_r, s_r, vt_r = u[:, :rank], sing[:rank], vt[:rank]
    coef = vt_r.T @ ((u_r.T @ f) / s_r)
    residual = float(np.linalg.norm(f - u_r @ (u_r.T @ f)))
    return ProjectionResult(tuple(float(c) for c in coef), residual, rank)
