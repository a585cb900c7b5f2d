"""The trainable variational circuit and its measured output function.

A parameter set theta with n triples defines, for every input x, the
unitary pipeline ``state-prep V  ->  block unitary U(theta, x)  ->  measure``
on ceil(log2(4n)) qubits.  Outcomes are grouped by residue modulo 4; the
circuit's real-valued output is

    f(x) = R - 2R * (P1 + P2)

which coincides with the plain cosine sum ``closed_form`` below.  The two
paths are kept strictly separate: ``evaluate`` always runs the statevector
simulation so the algebraic identity stays testable against ``closed_form``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gates import build_state_prep, build_trainable_unitary, padded_dimension
from .params import CircuitParams  # noqa: F401  (re-export: theta lives here)
from .rng import SeedLike
from .statevector import (
    StateVector,
    apply_block_diagonal,
    apply_dense,
    exact_distribution,
    sample_shots,
)

PROB_ATOL = 1e-12


@dataclass(frozen=True)
class ResidueProbabilities:
    """Outcome probabilities grouped by index residue modulo 4."""

    p0: float
    p1: float
    p2: float
    p3: float

    def __post_init__(self) -> None:
        total = self.p0 + self.p1 + self.p2 + self.p3
        for name, p in zip("p0 p1 p2 p3".split(), self.as_array()):
            if p < -PROB_ATOL or p > 1 + PROB_ATOL:
                raise ValueError(f"{name} = {p} outside [0, 1]")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"residue probabilities sum to {total}, expected 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2, self.p3])


@lru_cache(maxsize=16)
def _state_prep_cached(n: int, stride: int, dim: int) -> np.ndarray:
    return build_state_prep(n, stride, dim)


def prepared_state(theta: CircuitParams) -> StateVector:
    """V |0...0>: equal superposition over the block-leading basis states."""
    _, nq, dim = padded_dimension(theta.n, 4)
    v = _state_prep_cached(theta.n, 4, dim)
    return apply_dense(StateVector.zero(nq), v)


def output_state(theta: CircuitParams, x: np.ndarray) -> StateVector:
    """U(theta, x) V |0...0>."""
    unitary = build_trainable_unitary(theta, x)
    return apply_block_diagonal(prepared_state(theta), unitary)


def _residues(probs: np.ndarray, n: int) -> ResidueProbabilities:
    # pad states beyond index 4n belong to no residue class; the state-prep
    # reflection leaves them at zero amplitude, so nothing is dropped
    grouped = probs[: 4 * n].reshape(n, 4).sum(axis=0)
    return ResidueProbabilities(*grouped)


def exact_probabilities(theta: CircuitParams, x: np.ndarray) -> ResidueProbabilities:
    """Exact residue probabilities from the simulated statevector."""
    dist = exact_distribution(output_state(theta, x))
    return _residues(dist.probs, theta.n)


def estimate_probabilities(
    theta: CircuitParams, x: np.ndarray, shots: int, seed: SeedLike
) -> ResidueProbabilities:
    """Residue frequencies of ``shots`` sampled measurement outcomes."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    dist = exact_distribution(output_state(theta, x))
    outcomes = sample_shots(dist, shots, seed)
    in_blocks = outcomes[outcomes < 4 * theta.n]  # pad outcomes count nowhere
    counts = np.bincount(in_blocks % 4, minlength=4) / float(shots)
    return ResidueProbabilities(*counts)


def evaluate(
    theta: CircuitParams,
    x: np.ndarray,
    amplitude: float,
    shots: int | None = None,
    seed: SeedLike = 0,
) -> float:
    """Circuit output R - 2R (P1 + P2) at scale R = ``amplitude``.

    With ``shots=None`` the probabilities are exact; otherwise they are
    estimated from that many sampled measurements.
    """
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    if shots is None:
        p = exact_probabilities(theta, x)
    else:
        p = estimate_probabilities(theta, x, shots, seed)
    return amplitude - 2.0 * amplitude * (p.p1 + p.p2)


def closed_form(theta: CircuitParams, x: np.ndarray, amplitude: float) -> float:
    """Independent oracle: (R/n) * sum_i cos(gamma_i) cos(b_i + a_i . x)."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    ell = theta.b + theta.a @ x
    return float(amplitude * np.mean(np.cos(theta.gamma) * np.cos(ell)))


def closed_form_batch(theta: CircuitParams, xs: np.ndarray, amplitude: float) -> np.ndarray:
    """Vectorized ``closed_form`` over rows of ``xs`` (shape (m, d))."""
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    ell = xs @ theta.a.T + theta.b  # (m, n)
    return amplitude * np.cos(ell) @ np.cos(theta.gamma) / theta.n
