"""JSON documents for MDPs, rewards, beliefs, distributions, channels and cubes."""

import json
from pathlib import Path

import numpy as np

from ._validation import check_distribution, check_stochastic
from .agency import check_belief
from .exceptions import InputFileNotFoundError, ParseError, ValidationError
from .mdp import TabularMdp, reward_from_dict
from .measure import FunctionCube, SubspaceBasis


def load_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise InputFileNotFoundError(f"no such file: {path}") from None
    except IsADirectoryError:
        raise InputFileNotFoundError(f"expected a file, got a directory: {path}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _require(data, key, path):
    if not isinstance(data, dict) or key not in data:
        raise ValidationError(f"{path}: expected a JSON object with key {key!r}")
    return data[key]


def load_mdp(path):
    data = load_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: MDP document must be a JSON object")
    return TabularMdp.from_dict(data)


def load_reward(path, mdp=None):
    return reward_from_dict(load_json(path), mdp)


def load_belief(path, mdp):
    """Beliefs mirror the MDP layout under the key ``predicted``."""
    data = load_json(path)
    return check_belief(_require(data, "predicted", path), mdp)


def load_distribution(path):
    return check_distribution(_require(load_json(path), "probs", path), str(path))


def load_channel(path):
    return check_stochastic(_require(load_json(path), "rows", path), str(path))


def load_cube(path):
    data = load_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: cube document must be a JSON object")
    return FunctionCube.from_dict(data)


def load_basis(path):
    """Basis document ``{"c0": [...], "e0": [...], "a0": [...], "f": [...]}``."""
    data = load_json(path)
    basis = SubspaceBasis(*(_require(data, k, path) for k in ("c0", "e0", "a0")))
    target = np.asarray(_require(data, "f", path), dtype=float)
    return basis, target


def write_json(path, document):
    Path(path).write_text(dumps(document))


def dumps(document):
    return json.dumps(document, sort_keys=True, indent=2) + "\n"
