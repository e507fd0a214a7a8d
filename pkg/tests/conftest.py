"""Independent oracles shared by the test modules.

Nothing here calls into the code under test except to read MDP fields.
"""

import itertools
import math

import numpy as np
import pytest


def sweep_evaluate(transition, discount, reward, actions, sweeps=4000):
    """Value of a deterministic policy by plain fixed-point iteration."""
    num_states = transition.shape[0]
    idx = np.arange(num_states)
    p = transition[idx, actions]
    r = np.sum(p * reward[idx, actions], axis=1)
    v = np.zeros(num_states)
    for _ in range(sweeps):
        v = r + discount * p @ v
    return v


def enumerate_returns(mdp, reward, sweeps=4000):
    """``J`` of every deterministic stationary policy."""
    t = np.asarray(mdp.transition)
    init = np.asarray(mdp.initial_dist)
    returns = []
    for actions in itertools.product(range(mdp.num_actions), repeat=mdp.num_states):
        v = sweep_evaluate(t, mdp.discount, reward, np.array(actions), sweeps)
        returns.append(float(init @ v))
    return np.array(returns)


def mi_direct(px, channel):
    """``sum_{x,y} p(x) W(y|x) log2(W(y|x) / p(y))`` by explicit loops."""
    channel = np.asarray(channel)
    py = [sum(px[i] * channel[i][j] for i in range(len(px))) for j in range(channel.shape[1])]
    total = 0.0
    for i in range(len(px)):
        for j in range(channel.shape[1]):
            w = channel[i][j]
            if px[i] > 0 and w > 0:
                total += px[i] * w * math.log2(w / py[j])
    return total


def binary_entropy(e):
    if e in (0.0, 1.0):
        return 0.0
    return -e * math.log2(e) - (1 - e) * math.log2(1 - e)


def bsc(e):
    return np.array([[1 - e, e], [e, 1 - e]])


_MOVES = ((0, -1), (0, 1), (-1, 0), (1, 0))


def grid_reachable(width, height, start, horizon):
    """Distinct cells reachable by some action sequence, simulated on coordinates."""
    x0, y0 = start % width, start // width
    cells = set()
    for seq in itertools.product(range(4), repeat=horizon):
        x, y = x0, y0
        for a in seq:
            dx, dy = _MOVES[a]
            if 0 <= x + dx < width and 0 <= y + dy < height:
                x, y = x + dx, y + dy
        cells.add((x, y))
    return len(cells)


def gram_schmidt_residual(vectors, f, tol=1e-10):
    """Distance from ``f`` to the span of ``vectors`` via classical Gram-Schmidt."""
    basis = []
    for v in vectors:
        w = np.array(v, dtype=float)
        for q in basis:
            w = w - (q @ w) * q
        for q in basis:
            w = w - (q @ w) * q
        scale = max(np.linalg.norm(v), 1.0)
        if np.linalg.norm(w) > tol * scale:
            basis.append(w / np.linalg.norm(w))
    r = np.array(f, dtype=float)
    for q in basis:
        r = r - (q @ r) * q
    return float(np.linalg.norm(r)), len(basis)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
