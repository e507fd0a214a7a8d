"""Finite tabular MDPs: representation, exact evaluation, control, generators.

Rewards, policies and value vectors are plain numpy arrays:

* reward tables have shape ``(num_states, num_actions, num_states)``,
* policies have shape ``(num_states, num_actions)`` with stochastic rows,
* value vectors have shape ``(num_states,)``.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import (
    as_float_array,
    check_distribution,
    check_positive,
    check_shape,
    check_stochastic,
    frozen,
)
from .exceptions import IterationLimitError, ValidationError

# direct linear solve up to this many states, fixed-point sweeps above
DIRECT_SOLVE_MAX_STATES = 512
DEFAULT_DISCOUNT = 0.9
DEFAULT_TOL = 1e-10

ACTION_NAMES = ("up", "down", "left", "right")
_MOVES = ((0, -1), (0, 1), (-1, 0), (1, 0))


@dataclass(frozen=True, eq=False)
class TabularMdp:
    """Finite MDP with transition tensor ``transition[s, a, s']``."""

    transition: np.ndarray
    discount: float = DEFAULT_DISCOUNT
    initial_dist: np.ndarray = None

    def __post_init__(self):
        transition = check_stochastic(self.transition, "transition", ndim=3)
        num_states, num_actions, num_next = transition.shape
        if num_next != num_states:
            raise ValidationError(
                f"transition must have shape (S, A, S), got {transition.shape}"
            )
        discount = float(self.discount)
        if not 0.0 <= discount < 1.0:
            raise ValidationError(f"discount must lie in [0, 1), got {discount}")
        if self.initial_dist is None:
            initial = np.full(num_states, 1.0 / num_states)
        else:
            initial = check_distribution(self.initial_dist, "initial_dist")
            check_shape(initial, (num_states,), "initial_dist")
        object.__setattr__(self, "transition", frozen(transition))
        object.__setattr__(self, "discount", discount)
        object.__setattr__(self, "initial_dist", frozen(initial))

    @property
    def num_states(self):
        return self.transition.shape[0]

    @property
    def num_actions(self):
        return self.transition.shape[1]

    @property
    def reward_shape(self):
        return (self.num_states, self.num_actions, self.num_states)

    def with_discount(self, discount):
        return TabularMdp(self.transition, discount, self.initial_dist)

    def to_dict(self):
        return {
            "num_states": self.num_states,
            "num_actions": self.num_actions,
            "discount": self.discount,
            "initial_dist": self.initial_dist.tolist(),
            "transition": self.transition.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            mdp = cls(
                np.asarray(data["transition"], dtype=float),
                data.get("discount", DEFAULT_DISCOUNT),
                data.get("initial_dist"),
            )
        except KeyError as exc:
            raise ValidationError(f"MDP document is missing key {exc}") from None
        for key, actual in (("num_states", mdp.num_states), ("num_actions", mdp.num_actions)):
            if key in data and int(data[key]) != actual:
                raise ValidationError(f"{key}={data[key]} disagrees with transition shape")
        return mdp


def check_reward(reward, mdp, name="reward"):
    arr = as_float_array(reward, name, ndim=3)
    return check_shape(arr, mdp.reward_shape, name)


def check_policy(policy, mdp, name="policy"):
    arr = check_stochastic(policy, name, ndim=2)
    return check_shape(arr, (mdp.num_states, mdp.num_actions), name)


def uniform_policy(mdp):
    return np.full((mdp.num_states, mdp.num_actions), 1.0 / mdp.num_actions)


def deterministic_policy(actions, num_actions):
    actions = np.asarray(actions, dtype=int)
    policy = np.zeros((actions.size, num_actions))
    policy[np.arange(actions.size), actions] = 1.0
    return policy


def expected_reward(mdp, reward):
    """Expected immediate reward ``r(s, a) = sum_s' T(s, a, s') R(s, a, s')``."""
    return np.einsum("ijk,ijk->ij", mdp.transition, reward)


def bellman_residual(mdp, reward, policy, values):
    """Max-norm residual of ``V = r_pi + discount * P_pi V``."""
    r_pi, p_pi = _policy_system(mdp, reward, policy)
    return float(np.max(np.abs(values - (r_pi + mdp.discount * p_pi @ values))))


def _policy_system(mdp, reward, policy):
    r_pi = np.einsum("ij,ij->i", policy, expected_reward(mdp, reward))
    p_pi = np.einsum("ij,ijk->ik", policy, mdp.transition)
    return r_pi, p_pi


def _sweep_to_fixed_point(r_pi, p_pi, discount, tol, values=None, max_iter=1_000_000):
    values = np.zeros_like(r_pi) if values is None else values
    for it in range(max_iter):
        new = r_pi + discount * p_pi @ values
        # residual of ``new`` is at most discount * ||new - values||
        if np.max(np.abs(new - values)) <= tol:
            return new
        values = new
    raise IterationLimitError(
        "policy evaluation did not converge", gap=float(np.max(np.abs(new - values))), iterations=max_iter
    )


def policy_evaluation(mdp, reward, policy, tol=DEFAULT_TOL):
    """Value of ``policy`` with Bellman residual at most ``tol``.

    Small MDPs are solved exactly with ``(I - discount * P_pi) V = r_pi``;
    large ones fall back to fixed-point sweeps.
    """
    tol = check_positive(tol, "tol")
    reward = check_reward(reward, mdp)
    policy = check_policy(policy, mdp)
    r_pi, p_pi = _policy_system(mdp, reward, policy)
    if mdp.num_states <= DIRECT_SOLVE_MAX_STATES:
        values = np.linalg.solve(np.eye(mdp.num_states) - mdp.discount * p_pi, r_pi)
        residual = np.max(np.abs(values - (r_pi + mdp.discount * p_pi @ values)))
        if residual <= tol:
            return values
        return _sweep_to_fixed_point(r_pi, p_pi, mdp.discount, tol, values)
    return _sweep_to_fixed_point(r_pi, p_pi, mdp.discount, tol)


def _greedy(q_values, tie_tol):
    """Lowest-index action among those within ``tie_tol`` of the row maximum."""
    best = q_values.max(axis=1, keepdims=True)
    return np.argmax(q_values >= best - tie_tol, axis=1)


def value_iteration(mdp, reward, tol=DEFAULT_TOL, max_iter=100_000):
    """Optimal values and a deterministic greedy policy.

    Value iteration runs until its sweep change certifies ``tol``; on MDPs
    small enough for direct solves the greedy policy is then polished by
    policy iteration, so the returned values are the exact value of the
    returned policy.  Ties go to the lowest action index.
    """
    tol = check_positive(tol, "tol")
    reward = check_reward(reward, mdp)
    r_sa = expected_reward(mdp, reward)
    gamma = mdp.discount
    scale = max(1.0, float(np.max(np.abs(r_sa))) / (1.0 - gamma))
    tie_tol = 1e-12 * scale

    values = np.zeros(mdp.num_states)
    # stopping on ||V' - V|| <= tol (1 - gamma) / 2 bounds the residual of V' by tol
    threshold = max(tol * (1.0 - gamma) / 2.0, 8 * np.finfo(float).eps * scale)
    for it in range(max_iter):
        new = (r_sa + gamma * mdp.transition @ values).max(axis=1)
        delta = float(np.max(np.abs(new - values)))
        values = new
        if delta <= threshold:
            break
    else:
        raise IterationLimitError("value iteration did not converge", gap=delta, iterations=max_iter)

    q_values = r_sa + gamma * mdp.transition @ values
    actions = _greedy(q_values, tie_tol)
    if mdp.num_states <= DIRECT_SOLVE_MAX_STATES:
        for _ in range(max_iter):
            policy = deterministic_policy(actions, mdp.num_actions)
            values = policy_evaluation(mdp, reward, policy, tol)
            q_values = r_sa + gamma * mdp.transition @ values
            improved = _greedy(q_values, tie_tol)
            # switch only where the current action is beaten by more than tie_tol
            current = q_values[np.arange(mdp.num_states), actions]
            stale = q_values.max(axis=1) - current <= tie_tol
            improved = np.where(stale, actions, improved)
            if np.array_equal(improved, actions):
                break
            actions = improved
    return values, deterministic_policy(actions, mdp.num_actions)


def optimality_residual(mdp, reward, values):
    q_values = expected_reward(mdp, reward) + mdp.discount * mdp.transition @ values
    return float(np.max(np.abs(values - q_values.max(axis=1))))


def expected_return(mdp, reward, policy, tol=DEFAULT_TOL):
    """``J(pi) = sum_s initial_dist[s] * V_pi(s)``."""
    values = policy_evaluation(mdp, reward, policy, tol)
    return float(mdp.initial_dist @ values)


def return_range(mdp, reward, tol=DEFAULT_TOL):
    """``max_pi J(pi) - min_pi J(pi)`` over stationary policies."""
    reward = check_reward(reward, mdp)
    _, best = value_iteration(mdp, reward, tol)
    _, worst = value_iteration(mdp, -reward, tol)
    spread = expected_return(mdp, reward, best, tol) - expected_return(mdp, reward, worst, tol)
    return max(0.0, spread)


def make_gridworld(width, height, slip=0.0, discount=DEFAULT_DISCOUNT):
    """Grid of ``width * height`` cells, state index ``y * width + x``.

    Actions are up/down/left/right; bumping into a wall stays put.  With
    probability ``slip`` the move is replaced by one of the four chosen
    uniformly at random.
    """
    if int(width) != width or int(height) != height or width < 1 or height < 1:
        raise ValidationError(f"grid dimensions must be positive integers, got {width}x{height}")
    if not 0.0 <= slip < 1.0:
        raise ValidationError(f"slip must lie in [0, 1), got {slip}")
    width, height = int(width), int(height)
    num_states = width * height
    moves = np.zeros((num_states, len(_MOVES), num_states))
    for y in range(height):
        for x in range(width):
            s = y * width + x
            for a, (dx, dy) in enumerate(_MOVES):
                nx, ny = x + dx, y + dy
                if 0 <= nx < width and 0 <= ny < height:
                    moves[s, a, ny * width + nx] = 1.0
                else:
                    moves[s, a, s] = 1.0
    slipped = moves.mean(axis=1, keepdims=True)
    transition = (1.0 - slip) * moves + slip * slipped
    return TabularMdp(transition, discount)


def make_random_mdp(seed, num_states, num_actions, sparsity=0.0, discount=DEFAULT_DISCOUNT):
    """Random MDP, a pure function of its arguments.

    Each row draws weights in (0, 1], zeroes ``floor(sparsity * S)`` of them
    (always keeping one) and normalizes.
    """
    if num_states < 1 or num_actions < 1:
        raise ValidationError("num_states and num_actions must be at least 1")
    if not 0.0 <= sparsity < 1.0:
        raise ValidationError(f"sparsity must lie in [0, 1), got {sparsity}")
    rng = np.random.default_rng(seed)
    weights = 1.0 - rng.random((num_states, num_actions, num_states))
    drop = min(int(np.floor(sparsity * num_states)), num_states - 1)
    if drop:
        for s in range(num_states):
            for a in range(num_actions):
                weights[s, a, rng.permutation(num_states)[:drop]] = 0.0
    transition = weights / weights.sum(axis=2, keepdims=True)
    return TabularMdp(transition, discount)


def make_random_reward(seed, mdp, scale=1.0):
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal(mdp.reward_shape)


def reward_to_dict(reward):
    return {"values": np.asarray(reward, dtype=float).tolist()}


def reward_from_dict(data, mdp=None):
    try:
        values = as_float_array(data["values"], "values", ndim=3)
    except KeyError:
        raise ValidationError("reward document is missing key 'values'") from None
    if mdp is not None:
        check_shape(values, mdp.reward_shape, "values")
    return values
