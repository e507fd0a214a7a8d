"""scikit-learn compatible wrappers.

Rewards enter as rows of a 2-d array, each row a flattened
``(num_states, num_actions, num_states)`` table, so the standardizer can sit
in a :class:`sklearn.pipeline.Pipeline` or feed ``pairwise_distances``-style
code.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from .exceptions import DimensionError
from .mdp import TabularMdp
from .starc import StarcConfig, standardize, table_norm


class RewardStandardizer(TransformerMixin, BaseEstimator):
    """Map rewards to their standardized (canonicalized, normalized) form.

    Parameters
    ----------
    mdp : TabularMdp
        Environment on which rewards are compared.
    canonical_policy, normalizer, distance, weighting, tol
        Forwarded to :class:`StarcConfig`.

    Attributes
    ----------
    config_ : StarcConfig
    n_features_in_ : int
    trivial_ : ndarray of bool
        Triviality flags of the last transformed batch.
    """

    def __init__(self, mdp=None, canonical_policy="uniform", normalizer="L2",
                 distance="L2", weighting="transition_weighted", tol=1e-9):
        self.mdp = mdp
        self.canonical_policy = canonical_policy
        self.normalizer = normalizer
        self.distance = distance
        self.weighting = weighting
        self.tol = tol

    def fit(self, X=None, y=None):
        if not isinstance(self.mdp, TabularMdp):
            raise TypeError("mdp must be a TabularMdp")
        self.config_ = StarcConfig(self.canonical_policy, self.normalizer,
                                   self.distance, self.weighting, self.tol)
        self.reward_shape_ = self.mdp.reward_shape
        expected = int(np.prod(self.reward_shape_))
        if X is not None:
            X = validate_data(self, X, reset=True)
            if X.shape[1] != expected:
                raise DimensionError(f"rows must have {expected} entries, got {X.shape[1]}")
        else:
            self.n_features_in_ = expected
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise DimensionError(f"rows must have {self.n_features_in_} entries, got {X.shape[1]}")
        out = np.empty_like(X)
        trivial = np.zeros(X.shape[0], dtype=bool)
        for i, row in enumerate(X):
            result = standardize(row.reshape(self.reward_shape_), self.mdp, self.config_)
            out[i] = result.values.ravel()
            trivial[i] = result.trivial
        self.trivial_ = trivial
        return out

    def pairwise_distances(self, X, Y=None):
        """Matrix of metric distances between rows of ``X`` and rows of ``Y``."""
        sx = self.transform(X)
        tx = self.trivial_
        if Y is None:
            sy, ty = sx, tx
        else:
            sy = self.transform(Y)
            ty = self.trivial_
        out = np.zeros((sx.shape[0], sy.shape[0]))
        for i in range(sx.shape[0]):
            for j in range(sy.shape[0]):
                if tx[i] and ty[j]:
                    continue
                diff = (sx[i] - sy[j]).reshape(self.reward_shape_)
                out[i, j] = table_norm(diff, self.mdp, self.config_.distance,
                                       self.config_.weighting)
        return out
