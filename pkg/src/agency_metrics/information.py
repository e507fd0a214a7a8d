"""Entropy, KL divergence, mutual information and channel capacity.

All internal computation is in nats; ``base`` arguments accept ``"nats"``
or ``"bits"`` and only convert at the boundary.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_choice, check_distribution, check_positive, check_stochastic
from .exceptions import DimensionError, IterationLimitError, SingularityError, ValidationError

LN2 = math.log(2.0)
BASES = {"nats": 1.0, "bits": LN2}


def to_base(value_nats, base):
    check_choice(base, BASES, "base")
    return value_nats / BASES[base]


def from_base(value, base):
    check_choice(base, BASES, "base")
    return value * BASES[base]


def _xlogx(p):
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = p[mask] * np.log(p[mask])
    return out


def entropy(p, base="nats"):
    p = check_distribution(p, "p")
    return to_base(max(0.0, -float(_xlogx(p).sum())), base)


def curiosity_kl(p, q, smoothing=0.0, base="nats"):
    """Smoothed KL divergence ``sum_x p(x) [log p(x) - log(q(x) + smoothing)]``.

    Terms with ``p(x) = 0`` contribute nothing.  With ``smoothing = 0`` a zero
    of ``q`` on the support of ``p`` raises :class:`SingularityError`.
    """
    p = check_distribution(p, "p")
    q = check_distribution(q, "q")
    if p.shape != q.shape:
        raise DimensionError(f"p has length {p.size} but q has length {q.size}")
    smoothing = float(smoothing)
    if not math.isfinite(smoothing) or smoothing < 0:
        raise ValidationError(f"smoothing must be a finite non-negative number, got {smoothing}")
    support = p > 0
    shifted = q[support] + smoothing
    if np.any(shifted == 0):
        raise SingularityError("q vanishes on the support of p; pass smoothing > 0")
    kl = float(np.sum(p[support] * (np.log(p[support]) - np.log(shifted))))
    if smoothing == 0:
        # Gibbs' inequality; only rounding can push the sum below zero
        kl = max(kl, 0.0)
    return to_base(kl, base)


def _row_divergences(channel, output):
    """``D(W_i || output)`` for every row ``i``; ``inf`` if a row escapes the support."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(channel > 0, np.log(channel) - np.log(output)[None, :], 0.0)
    return np.sum(channel * ratio, axis=1)


def mutual_information(input_dist, channel, base="nats"):
    """``I(X; Y) = H(Y) - H(Y | X)`` for input ``X ~ input_dist``, ``Y | X ~ channel``."""
    r = check_distribution(input_dist, "input_dist")
    w = check_stochastic(channel, "channel")
    if w.shape[0] != r.size:
        raise DimensionError(
            f"input_dist has {r.size} entries but channel has {w.shape[0]} rows"
        )
    output = r @ w
    h_out = -float(_xlogx(output).sum())
    h_cond = -float(r @ _xlogx(w).sum(axis=1))
    return to_base(max(0.0, h_out - h_cond), base)


@dataclass(frozen=True)
class CapacityResult:
    """Channel capacity with the input distribution attaining it.

    ``capacity`` and ``achieved_tol`` are expressed in ``base`` units.
    ``achieved_tol`` is the certified gap between the capacity upper bound
    ``max_i D(W_i || q)`` and the lower bound ``I(input_dist)``.
    """

    capacity: float
    input_dist: np.ndarray
    iterations: int
    achieved_tol: float
    base: str = "bits"

    @property
    def capacity_nats(self):
        return from_base(self.capacity, self.base)

    @property
    def capacity_bits(self):
        return to_base(self.capacity_nats, "bits")

    def to_dict(self):
        return {
            "capacity_bits": self.capacity_bits,
            "capacity_nats": self.capacity_nats,
            "input_dist": np.asarray(self.input_dist).tolist(),
            "iterations": self.iterations,
            "achieved_tol": self.achieved_tol,
        }


def blahut_arimoto(channel, tol=1e-9, max_iter=100_000, base="bits"):
    """Capacity of a discrete memoryless channel ``channel[input, output]``.

    Starts from the uniform input distribution and iterates
    ``r_i <- r_i exp(D(W_i || r W))`` until the gap between the upper bound
    ``max_i D_i`` and the lower bound ``sum_i r_i D_i`` is at most ``tol``
    (in ``base`` units).  The reported capacity is the lower bound, which the
    returned input distribution attains.
    """
    w = check_stochastic(channel, "channel")
    tol = check_positive(tol, "tol")
    check_choice(base, BASES, "base")
    tol_nats = from_base(tol, base)
    num_inputs = w.shape[0]

    log_r = np.full(num_inputs, -math.log(num_inputs))
    gap = math.inf
    for it in range(1, int(max_iter) + 1):
        r = np.exp(log_r)
        output = r @ w
        divergences = _row_divergences(w, output)
        lower = float(r @ np.where(r > 0, divergences, 0.0))
        upper = float(np.max(divergences))
        gap = upper - lower
        if gap <= tol_nats:
            capacity = min(max(lower, 0.0), math.log(min(w.shape)))
            return CapacityResult(
                capacity=to_base(capacity, base),
                input_dist=r / r.sum(),
                iterations=it,
                achieved_tol=to_base(max(gap, 0.0), base),
                base=base,
            )
        log_r = log_r + np.where(np.isfinite(divergences), divergences, 0.0)
        log_r -= np.logaddexp.reduce(log_r)
    raise IterationLimitError(
        f"Blahut-Arimoto stopped after {max_iter} iterations with bound gap "
        f"{to_base(gap, base):.3g} {base}",
        gap=to_base(gap, base),
        iterations=int(max_iter),
    )
