"""Empowerment, the composite agency objective and the intrinsic reward R_A."""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_choice, check_positive, check_shape, check_stochastic
from .exceptions import ResourceError, ValidationError
from .information import BASES, blahut_arimoto, to_base
from .mdp import check_reward

DEFAULT_ENUMERATION_CAP = 4096
DEFAULT_SMOOTHING = 1e-9


@dataclass(frozen=True)
class AgencyWeights:
    """Coefficients of ``alpha * curiosity + beta * (-empowerment) + gamma_mesa * mesa``."""

    alpha: float = 1.0
    beta: float = 1.0
    gamma_mesa: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma_mesa"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.alpha < 0 or self.beta < 0:
            raise ValidationError("alpha and beta must be non-negative")


def check_belief(belief, mdp):
    """A belief model is a transition-shaped tensor of predicted ``q(s' | s, a)``."""
    arr = check_stochastic(belief, "belief", ndim=3)
    return check_shape(arr, mdp.reward_shape, "belief")


def action_sequence_channel(mdp, state, horizon, cap=DEFAULT_ENUMERATION_CAP):
    """Channel from every length-``horizon`` action sequence to ``S_{t+horizon}``.

    Rows are in lexicographic sequence order (first action most significant).
    """
    if int(horizon) != horizon or horizon < 1:
        raise ValidationError(f"horizon must be a positive integer, got {horizon}")
    if not 0 <= state < mdp.num_states:
        raise ValidationError(f"state {state} out of range for {mdp.num_states} states")
    horizon = int(horizon)
    if mdp.num_actions ** horizon > cap:
        raise ResourceError(
            f"{mdp.num_actions}^{horizon} action sequences exceed the enumeration cap {cap}"
        )
    rows = mdp.transition[int(state)]
    for _ in range(horizon - 1):
        rows = np.einsum("is,sat->iat", rows, mdp.transition).reshape(-1, mdp.num_states)
    # chained products drift off the simplex by a few ulps
    return rows / rows.sum(axis=1, keepdims=True)


def empowerment(mdp, state, horizon=1, tol=1e-9, cap=DEFAULT_ENUMERATION_CAP,
                max_iter=100_000, base="bits"):
    """n-step empowerment: capacity of the action-sequence -> state channel.

    Exact enumeration of all ``num_actions ** horizon`` sequences; refuses
    with :class:`ResourceError` rather than sampling when that exceeds ``cap``.
    """
    channel = action_sequence_channel(mdp, state, horizon, cap)
    return blahut_arimoto(channel, tol=tol, max_iter=max_iter, base=base)


def empowerment_map(mdp, horizon=1, tol=1e-9, cap=DEFAULT_ENUMERATION_CAP, base="bits"):
    """Empowerment of every state as a vector of capacities."""
    return np.array([
        empowerment(mdp, s, horizon, tol, cap, base=base).capacity
        for s in range(mdp.num_states)
    ])


def agency_objective(weights, curiosity, empowerment_value, mesa):
    """Agency loss; empowerment enters negated so minimizing the loss maximizes it."""
    values = (float(curiosity), float(empowerment_value), float(mesa))
    if not all(math.isfinite(v) for v in values):
        raise ValidationError("agency objective inputs must be finite")
    curiosity, empowerment_value, mesa = values
    return (weights.alpha * curiosity
            + weights.beta * -empowerment_value
            + weights.gamma_mesa * mesa)


def ideal_agency_reward(mdp, belief, weights, horizon=1, mesa_reward=None,
                        smoothing=DEFAULT_SMOOTHING, tol=1e-9,
                        cap=DEFAULT_ENUMERATION_CAP, base="bits",
                        empowerment_at="successor"):
    """Intrinsic reward table R_A of the ideal agentic objective.

    ``R_A(s, a, s') = alpha * surprise(s' | s, a) + beta * E(s'') + gamma_mesa * mesa(s, a, s')``
    where surprise is ``-log(belief[s, a, s'] + smoothing)`` and ``s''`` is
    the successor ``s'`` (default) or the source ``s`` when
    ``empowerment_at="source"``.  Surprise and empowerment share ``base``.
    """
    belief = check_belief(belief, mdp)
    smoothing = check_positive(smoothing, "smoothing")
    check_choice(base, BASES, "base")
    check_choice(empowerment_at, {"successor", "source"}, "empowerment_at")

    reward = np.zeros(mdp.reward_shape)
    if weights.alpha:
        reward += weights.alpha * to_base(-np.log(belief + smoothing), base)
    if weights.beta:
        emp = empowerment_map(mdp, horizon, tol, cap, base)
        if empowerment_at == "successor":
            reward += weights.beta * emp[None, None, :]
        else:
            reward += weights.beta * emp[:, None, None]
    if weights.gamma_mesa and mesa_reward is not None:
        reward += weights.gamma_mesa * check_reward(mesa_reward, mdp, "mesa_reward")
    return reward
