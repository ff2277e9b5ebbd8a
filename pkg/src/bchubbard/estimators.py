"""Estimator-style wrappers for use in scikit-learn pipelines.

The model has no trainable parameters, so ``fit`` only validates input and
records shapes; the work happens in ``transform``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .analysis import pair_record
from .correlations import marginal_entropies
from .measurement_search import SearchConfig, minimize_conditional_entropy
from .phase_model import classify_phase, energy_density, ground_state_densities, odlro
from .rdm import as_density_matrix


class GroundStateTransformer(TransformerMixin, BaseEstimator):
    """Map rows ``(u, mu)`` to ``(n_s, n_d, energy, odlro)``."""

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns (u, mu), got {X.shape[1]}")
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        out = np.empty((X.shape[0], 4))
        for k, (u, mu) in enumerate(X):
            n_s, n_d = ground_state_densities(u, mu)
            out[k] = (n_s, n_d, energy_density(n_s, n_d, u, mu), odlro(n_s, n_d))
        return out

    def predict(self, X):
        """Phase labels as strings."""
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        return np.array([str(classify_phase(u, mu)) for u, mu in X], dtype=object)

    def get_feature_names_out(self, input_features=None):
        return np.array(["n_s", "n_d", "energy", "odlro"], dtype=object)


class PairCorrelationTransformer(TransformerMixin, BaseEstimator):
    """Map rows ``(n_s, n_d)`` to ``(I, C, Q, K, N, S_single)`` at separation ``r``.

    Parameters
    ----------
    r : int
        Site separation.
    n_samples, seed : int
        Settings of the qutrit search used for three-level points.
    """

    def __init__(self, r=1, n_samples=20000, seed=0):
        self.r = r
        self.n_samples = n_samples
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns (n_s, n_d), got {X.shape[1]}")
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        cfg = SearchConfig(n_samples=self.n_samples, seed=self.seed)
        out = np.empty((X.shape[0], 6))
        for k, (n_s, n_d) in enumerate(X):
            rec, _ = pair_record(n_s, n_d, self.r, cfg=cfg, stream_index=k)
            out[k] = (rec.I, rec.C, rec.Q, rec.K, rec.N, rec.S_single)
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(["I", "C", "Q", "K", "N", "S_single"], dtype=object)


class QutritDiscord(BaseEstimator):
    """Numerical discord of one two-qutrit state; measurement on the second site.

    After :meth:`fit` the attributes ``min_entropy_``, ``basis_``,
    ``discord_``, ``classical_`` and ``mutual_information_`` are set.
    """

    def __init__(self, n_samples=20000, n_refine=3, tol=1e-9, seed=0, engine="haar"):
        self.n_samples = n_samples
        self.n_refine = n_refine
        self.tol = tol
        self.seed = seed
        self.engine = engine

    def fit(self, X, y=None):
        # check_array rejects complex input, so only the shape is validated here.
        rho = as_density_matrix(np.asarray(X, dtype=complex), (3, 3))
        cfg = SearchConfig(n_samples=self.n_samples, n_refine=self.n_refine, tol=self.tol, seed=self.seed)
        res = minimize_conditional_entropy(rho, cfg, engine=self.engine)
        self.min_entropy_ = res.min_value
        self.basis_ = None if res.basis is None else res.basis.vectors
        self.discord_ = res.Q
        self.classical_ = res.C
        self.mutual_information_ = res.I
        self.converged_ = res.converged
        self.single_site_entropy_ = marginal_entropies(rho)[0]
        return self
