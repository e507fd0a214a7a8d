"""Canonicalize-normalize-distance comparison of reward functions.

The distance between two rewards is the norm of the difference of their
standardized forms ``s(R) = c(R) / n(c(R))``.  It is a pseudometric: rewards
related by positive scaling and potential shaping sit at distance zero.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_float_array, check_choice, check_positive, check_shape
from .agency import DEFAULT_SMOOTHING, ideal_agency_reward
from .mdp import check_policy, check_reward, policy_evaluation, return_range, uniform_policy

NORMALIZERS = ("L1", "L2", "return_range")
DISTANCES = ("L1", "L2")
WEIGHTINGS = ("unweighted", "transition_weighted")


@dataclass(frozen=True)
class StarcConfig:
    """Choices left open by the metric recipe.

    ``canonical_policy`` is ``"uniform"`` or an explicit ``(S, A)`` policy.
    Transition weighting gives entry ``(s, a, s')`` weight ``T(s, a, s')`` in
    norms and distances, so impossible transitions carry no mass.
    """

    canonical_policy: object = "uniform"
    normalizer: str = "L2"
    distance: str = "L2"
    weighting: str = "transition_weighted"
    tol: float = 1e-9

    def __post_init__(self):
        check_choice(self.normalizer, NORMALIZERS, "normalizer")
        check_choice(self.distance, DISTANCES, "distance")
        check_choice(self.weighting, WEIGHTINGS, "weighting")
        object.__setattr__(self, "tol", check_positive(self.tol, "tol"))
        if isinstance(self.canonical_policy, str):
            check_choice(self.canonical_policy, ("uniform",), "canonical_policy")

    def policy_for(self, mdp):
        if isinstance(self.canonical_policy, str):
            return uniform_policy(mdp)
        return check_policy(self.canonical_policy, mdp, "canonical_policy")

    @property
    def policy_label(self):
        return self.canonical_policy if isinstance(self.canonical_policy, str) else "explicit"


@dataclass(frozen=True)
class StandardizedReward:
    values: np.ndarray
    norm_used: float
    trivial: bool = field(default=False)


def canonicalize(reward, mdp, config=StarcConfig()):
    """``c(R)(s, a, .) = E_{S'~T(s,a)}[R(s, a, S') - V(s) + discount * V(S')]``.

    ``V`` is the value of the configured canonical policy.  The result is
    broadcast across the ``s'`` axis.
    """
    reward = check_reward(reward, mdp)
    values = policy_evaluation(mdp, reward, config.policy_for(mdp), config.tol)
    shaped = reward - values[:, None, None] + mdp.discount * values[None, None, :]
    expected = np.einsum("ijk,ijk->ij", mdp.transition, shaped)
    return np.broadcast_to(expected[:, :, None], mdp.reward_shape).copy()


def apply_potential_shaping(reward, phi, mdp):
    """``R + F`` with ``F(s, a, s') = discount * phi(s') - phi(s)``."""
    reward = check_reward(reward, mdp)
    phi = check_shape(as_float_array(phi, "phi", ndim=1), (mdp.num_states,), "phi")
    return reward + (mdp.discount * phi[None, None, :] - phi[:, None, None])


def _weights(mdp, weighting):
    if weighting == "transition_weighted":
        return mdp.transition
    return np.ones(mdp.reward_shape)


def table_norm(values, mdp, kind, weighting):
    """Weighted L1 or L2 norm of a reward-shaped table."""
    w = _weights(mdp, weighting)
    if kind == "L1":
        return float(np.sum(w * np.abs(values)))
    return float(np.sqrt(np.sum(w * values * values)))


def normalizer_value(reward, mdp, config=StarcConfig()):
    """``n(R)`` under the configured normalizer."""
    reward = check_reward(reward, mdp)
    if config.normalizer == "return_range":
        return return_range(mdp, reward, min(config.tol, 1e-10))
    return table_norm(reward, mdp, config.normalizer, config.weighting)


def standardize(reward, mdp, config=StarcConfig()):
    canonical = canonicalize(reward, mdp, config)
    norm = normalizer_value(canonical, mdp, config)
    if norm <= config.tol:
        return StandardizedReward(np.zeros(mdp.reward_shape), norm, trivial=True)
    return StandardizedReward(canonical / norm, norm, trivial=False)


@dataclass(frozen=True)
class MetricReport:
    distance: float
    normalizer: str
    distance_kind: str
    canonical_policy: str
    trivial_f: bool
    trivial_a: bool
    norm_f: float
    norm_a: float
    config_tol: float
    metric_kind: str = "pseudometric"

    def to_dict(self):
        return dict(self.__dict__)


def starc_report(reward_f, reward_a, mdp, config=StarcConfig()):
    s_f = standardize(reward_f, mdp, config)
    s_a = standardize(reward_a, mdp, config)
    if s_f.trivial and s_a.trivial:
        distance = 0.0
    else:
        distance = table_norm(s_f.values - s_a.values, mdp, config.distance, config.weighting)
    return MetricReport(
        distance=distance,
        normalizer=config.normalizer,
        distance_kind=config.distance,
        canonical_policy=config.policy_label,
        trivial_f=s_f.trivial,
        trivial_a=s_a.trivial,
        norm_f=s_f.norm_used,
        norm_a=s_a.norm_used,
        config_tol=config.tol,
    )


def starc_distance(reward_f, reward_a, mdp, config=StarcConfig()):
    return starc_report(reward_f, reward_a, mdp, config).distance


def agency_metric(candidate, mdp, belief, weights, horizon=1, config=StarcConfig(),
                  mesa_reward=None, smoothing=DEFAULT_SMOOTHING, **reward_kwargs):
    """Distance from ``candidate`` to the ideal agentic reward; lower is more agentic."""
    ideal = ideal_agency_reward(mdp, belief, weights, horizon, mesa_reward,
                                smoothing=smoothing, **reward_kwargs)
    return starc_distance(candidate, ideal, mdp, config)
