"""scikit-learn compatible wrappers around the reservoir pipeline.

The frozen random circuit is a drop-in feature map (like other random
Fourier feature transformers) and the readout is a ridge regression, so the
pair composes with sklearn pipelines, grid search and friends.  The heavy
lifting lives in :mod:`qrff.reservoir`; these classes only add the
fit/transform/predict surface and input validation.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import reservoir
from .sampling import FrequencyDensity, parse_density, sample_reservoir


def _resolve_seed(random_state) -> int | tuple[int, ...]:
    if random_state is None:
        return int(np.random.SeedSequence().entropy % (1 << 63))
    return int(random_state)


def _resolve_density(density, dim: int) -> FrequencyDensity:
    if isinstance(density, FrequencyDensity):
        if density.dim != dim:
            raise ValueError(
                f"density dimension {density.dim} does not match data dimension {dim}"
            )
        return density
    return parse_density(str(density), dim)


class ReservoirFeatureMap(BaseEstimator, TransformerMixin):
    """Random frozen-circuit feature map.

    fit draws the circuit weights (rows of the frequency matrix from
    ``density``, fair-coin phase bits); transform measures the circuit, one
    feature per block, each bounded by 1/n_components in absolute value.

    Parameters
    ----------
    n_components : number of circuit blocks / output features.
    density : frequency density spec ("cauchy", "gaussian", "t3",
        "mixture:<delta>:<nu>:<base>") or a FrequencyDensity.
    method : "statevector" simulates the circuit; "closed-form" uses the
        algebraically identical cosine fast path.
    random_state : seed for the draw; None draws fresh entropy.
    """

    def __init__(self, n_components=64, density="cauchy", method="statevector",
                 random_state=None):
        self.n_components = n_components
        self.density = density
        self.method = method
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        density = _resolve_density(self.density, self.n_features_in_)
        draw = sample_reservoir(
            density, self.n_components, self.n_features_in_,
            _resolve_seed(self.random_state),
        )
        self.circuit_ = reservoir.ReservoirCircuit(draw)
        return self

    def transform(self, X):
        check_is_fitted(self, "circuit_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return reservoir.feature_matrix(self.circuit_, X, method=self.method)


class QuantumReservoirRegressor(BaseEstimator, RegressorMixin):
    """Frozen random circuit plus ridge readout, as one regressor.

    ``alpha`` is the ridge strength; None uses the 1e-10 * n_components
    default, 0 demands a full-rank design (raising
    :class:`qrff.reservoir.RankDeficiencyError` otherwise).
    """

    def __init__(self, n_components=64, density="cauchy", alpha=None,
                 method="statevector", random_state=None):
        self.n_components = n_components
        self.density = density
        self.alpha = alpha
        self.method = method
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        self.n_features_in_ = X.shape[1]
        density = _resolve_density(self.density, self.n_features_in_)
        draw = sample_reservoir(
            density, self.n_components, self.n_features_in_,
            _resolve_seed(self.random_state),
        )
        self.circuit_ = reservoir.ReservoirCircuit(draw)
        self.readout_ = reservoir.fit_readout(
            self.circuit_, X, y, ridge=self.alpha, method=self.method
        )
        return self

    def predict(self, X):
        check_is_fitted(self, "readout_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return reservoir.predict(self.circuit_, self.readout_, X, method=self.method)
