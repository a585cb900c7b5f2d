"""Frozen random circuit, measured feature map, and trainable linear readout.

The reservoir circuit runs ``state-prep Vbar -> block unitary Ubar(x) ->
measure`` on ceil(log2(2n)) qubits with 2x2 blocks at frozen random weights.
Feature j is built from the probability of the even outcome 2j,

    phi_j(x) = 2 * Pbar_{2j}(x) - 1/n  =  (1/n) cos((pi/2) B_j + 2*pi*A_j . x),

and the model output is the linear readout F_w(x) = w . phi(x).  Readouts
come either from the transform-based analytic weights (unbiased estimator of
the target) or from ridge least squares on data.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import linalg

from .fourier import FourierModel
from .gates import build_reservoir_unitary, build_state_prep, padded_dimension
from .sampling import FrequencyDensity, ReservoirDraw
from .statevector import StateVector, apply_block_diagonal, apply_dense, exact_distribution


class AbsoluteContinuityError(RuntimeError):
    """The frequency density vanishes at a drawn point where fhat does not."""


class RankDeficiencyError(RuntimeError):
    """Unregularized normal equations are singular; retry with ridge > 0."""


@dataclass(frozen=True)
class ReservoirCircuit:
    """A reservoir draw together with its register geometry."""

    draw: ReservoirDraw

    @property
    def n(self) -> int:
        return self.draw.n

    @property
    def d(self) -> int:
        return self.draw.d

    @property
    def num_qubits(self) -> int:
        return padded_dimension(self.n, 2)[1]

    @property
    def dim(self) -> int:
        return padded_dimension(self.n, 2)[2]


@dataclass(frozen=True)
class ReadoutWeights:
    """Readout vector with a record of where it came from."""

    w: np.ndarray
    provenance: str

    def __post_init__(self) -> None:
        w = np.atleast_1d(np.asarray(self.w, dtype=np.float64))
        object.__setattr__(self, "w", w)
        if not np.all(np.isfinite(w)):
            raise ValueError("readout weights must be finite")


@lru_cache(maxsize=16)
def _reservoir_state_prep(n: int, dim: int) -> np.ndarray:
    return build_state_prep(n, 2, dim)


def output_distribution(circuit: ReservoirCircuit, x: np.ndarray) -> np.ndarray:
    """All outcome probabilities of the simulated reservoir circuit at x."""
    state = apply_dense(
        StateVector.zero(circuit.num_qubits),
        _reservoir_state_prep(circuit.n, circuit.dim),
    )
    unitary = build_reservoir_unitary(circuit.draw.a, circuit.draw.b, x)
    return exact_distribution(apply_block_diagonal(state, unitary)).probs


def block_probability_pairs(circuit: ReservoirCircuit, x: np.ndarray) -> np.ndarray:
    """Per-block outcome pairs (Pbar_{2j}, Pbar_{2j+1}); each pair sums to 1/n."""
    probs = output_distribution(circuit, x)
    return probs[: 2 * circuit.n].reshape(circuit.n, 2)


def features(circuit: ReservoirCircuit, x: np.ndarray) -> np.ndarray:
    """Feature vector 2*Pbar_{2j} - 1/n from the simulated statevector."""
    pairs = block_probability_pairs(circuit, x)
    return 2.0 * pairs[:, 0] - 1.0 / circuit.n


def features_closed_form(circuit: ReservoirCircuit, xs: np.ndarray) -> np.ndarray:
    """Cosine-identity fast path; rows of ``xs`` give rows of features (m, n)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    angles = 2.0 * np.pi * xs @ circuit.draw.a.T + (np.pi / 2.0) * circuit.draw.b
    return np.cos(angles) / circuit.n


def feature_matrix(
    circuit: ReservoirCircuit, xs: np.ndarray, method: str = "statevector"
) -> np.ndarray:
    """Stack features for every row of ``xs``; (m, n)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    if method == "closed-form":
        return features_closed_form(circuit, xs)
    if method != "statevector":
        raise ValueError(f"unknown feature method '{method}'")
    return np.stack([features(circuit, x) for x in xs])


def predict(
    circuit: ReservoirCircuit,
    weights: ReadoutWeights,
    xs: np.ndarray,
    method: str = "statevector",
) -> np.ndarray:
    """Readout output F_w at each row of ``xs``."""
    return feature_matrix(circuit, xs, method) @ weights.w


def optimal_weights(
    draw: ReservoirDraw, model: FourierModel, density: FrequencyDensity
) -> ReadoutWeights:
    """Analytic readout making F_w an unbiased estimator of the target.

    w_i = (2 / density(A_i)) * ((1 - B_i) Re fhat(A_i) + B_i Im fhat(A_i)).
    """
    dens = density.density(draw.a)
    values = model.eval_fhat(draw.a)
    numerator = (1 - draw.b) * values.real + draw.b * values.imag
    zero_dens = dens <= 0.0
    if np.any(zero_dens & (np.abs(values) > 0)):
        idx = int(np.nonzero(zero_dens & (np.abs(values) > 0))[0][0])
        raise AbsoluteContinuityError(
            f"density vanishes at drawn frequency row {idx} where fhat does not"
        )
    w = np.where(zero_dens, 0.0, 2.0 * numerator / np.where(zero_dens, 1.0, dens))
    return ReadoutWeights(w, "optimal-analytic")


def fit_readout(
    circuit: ReservoirCircuit,
    xs: np.ndarray,
    ys: np.ndarray,
    ridge: float | None = None,
    method: str = "statevector",
) -> ReadoutWeights:
    """Least-squares readout: minimize ||Phi w - y||^2 + ridge * ||w||^2.

    ``ridge=None`` uses the default 1e-10 * n, which stabilizes
    near-duplicate frequency rows; ``ridge=0`` demands a full-rank design
    and raises :class:`RankDeficiencyError` otherwise.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    if xs.shape[0] != ys.shape[0]:
        raise ValueError(f"{xs.shape[0]} inputs but {ys.shape[0]} targets")
    if xs.shape[0] < 1:
        raise ValueError("need at least one training sample")
    if ridge is None:
        ridge = 1e-10 * circuit.n
    if ridge < 0:
        raise ValueError("ridge must be >= 0")

    phi = feature_matrix(circuit, xs, method)
    if ridge == 0.0:
        w, _, rank, _ = np.linalg.lstsq(phi, ys, rcond=None)
        if rank < circuit.n:
            raise RankDeficiencyError(
                f"design matrix rank {rank} < n = {circuit.n}; retry with ridge > 0"
            )
        return ReadoutWeights(w, "least-squares(0)")
    gram = phi.T @ phi + ridge * np.eye(circuit.n)
    w = linalg.solve(gram, phi.T @ ys, assume_a="pos")
    return ReadoutWeights(w, f"least-squares({ridge:g})")


def training_rmse(
    circuit: ReservoirCircuit,
    weights: ReadoutWeights,
    xs: np.ndarray,
    ys: np.ndarray,
    method: str = "statevector",
) -> float:
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    residual = predict(circuit, weights, xs, method) - ys
    return float(np.sqrt(np.mean(residual**2)))


# ---------------------------------------------------------------------------
# dataset files: comma-separated, header x1,...,xd,y
# ---------------------------------------------------------------------------


def save_dataset(path: str | Path, xs: np.ndarray, ys: np.ndarray) -> None:
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    if xs.shape[0] != ys.shape[0]:
        raise ValueError("inputs and targets must have equal length")
    header = ",".join(f"x{j + 1}" for j in range(xs.shape[1])) + ",y"
    data = np.column_stack([xs, ys])
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


def load_dataset(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
    columns = [c.strip() for c in header.split(",")]
    if len(columns) < 2 or columns[-1] != "y" or columns[0] != "x1":
        raise ValueError(
            f"{path}: expected header 'x1,...,xd,y', got '{header}'"
        )
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(columns):
        raise ValueError(f"{path}: rows have {data.shape[1]} fields, header {len(columns)}")
    return data[:, :-1], data[:, -1]
