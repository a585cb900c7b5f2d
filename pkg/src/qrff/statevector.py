"""Dense complex statevectors and block-diagonal unitary application.

States live on ``nq`` qubits as length ``N = 2**nq`` complex128 arrays,
basis index ``k`` meaning the computational state whose binary expansion
(most significant qubit first) is ``k``.  The circuits in this package only
ever need one structured operation: applying a block-diagonal unitary whose
blocks are small (2x2 or 4x4) and whose tail is an identity pad, which costs
O(N) instead of O(N^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import SeedLike, make_rng

NORM_ATOL = 1e-12


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state of ``num_qubits`` qubits."""

    amps: np.ndarray
    num_qubits: int

    def __post_init__(self) -> None:
        amps = np.asarray(self.amps, dtype=np.complex128)
        object.__setattr__(self, "amps", amps)
        if amps.ndim != 1:
            raise ValueError(f"amplitudes must be 1-D, got shape {amps.shape}")
        if amps.shape[0] != 2**self.num_qubits:
            raise ValueError(
                f"length {amps.shape[0]} does not match 2**{self.num_qubits}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        """|0...0> on ``num_qubits`` qubits."""
        if num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        amps = np.zeros(2**num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps, num_qubits)

    @classmethod
    def from_amplitudes(cls, amps: np.ndarray) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128)
        n = amps.shape[0]
        nq = int(n).bit_length() - 1
        if 2**nq != n:
            raise ValueError(f"amplitude length {n} is not a power of two")
        return cls(amps, nq)


@dataclass(frozen=True)
class BlockDiagonalUnitary:
    """Unitary of the form diag(B_1, ..., B_n, I_pad).

    ``blocks`` are dense complex squares (constant small size in practice);
    ``pad`` is the size of the trailing identity.
    """

    blocks: tuple[np.ndarray, ...]
    pad: int = 0

    def __post_init__(self) -> None:
        blocks = tuple(np.asarray(b, dtype=np.complex128) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        for b in blocks:
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise ValueError(f"block must be square, got shape {b.shape}")
        if self.pad < 0:
            raise ValueError("pad must be nonnegative")

    @property
    def dim(self) -> int:
        return sum(b.shape[0] for b in self.blocks) + self.pad

    def as_dense(self) -> np.ndarray:
        """Materialize the full matrix (tests and small dimensions only)."""
        n = self.dim
        out = np.zeros((n, n), dtype=np.complex128)
        off = 0
        for b in self.blocks:
            k = b.shape[0]
            out[off : off + k, off : off + k] = b
            off += k
        out[off:, off:] = np.eye(self.pad)
        return out

    def validate_unitary(self, atol: float = NORM_ATOL) -> None:
        """Check B B^dagger = I for every block (debug / test hook)."""
        for i, b in enumerate(self.blocks):
            err = np.max(np.abs(b @ b.conj().T - np.eye(b.shape[0])))
            if err > atol:
                raise ValueError(f"block {i} not unitary: max deviation {err:.3e}")


def apply_block_diagonal(state: StateVector, unitary: BlockDiagonalUnitary) -> StateVector:
    """Apply a block-diagonal unitary, block by block, in O(N)."""
    if unitary.dim != state.dim:
        raise ValueError(
            f"dimension mismatch: unitary is {unitary.dim}, state is {state.dim}"
        )
    out = state.amps.copy()
    off = 0
    for b in unitary.blocks:
        k = b.shape[0]
        out[off : off + k] = b @ state.amps[off : off + k]
        off += k
    # identity pad leaves the tail untouched
    return StateVector(out, state.num_qubits)


def apply_dense(state: StateVector, matrix: np.ndarray) -> StateVector:
    """Apply an arbitrary dense unitary (used for the state-prep reflection)."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (state.dim, state.dim):
        raise ValueError(f"matrix shape {matrix.shape} does not match dim {state.dim}")
    return StateVector(matrix @ state.amps, state.num_qubits)


@dataclass(frozen=True)
class MeasurementDistribution:
    """Born-rule outcome probabilities over all N basis states."""

    probs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1:
            raise ValueError("probabilities must be 1-D")
        if np.any(probs < -NORM_ATOL) or np.any(probs > 1 + NORM_ATOL):
            raise ValueError("probabilities outside [0, 1]")
        total = probs.sum()
        if abs(total - 1.0) > NORM_ATOL:
            raise ValueError(f"probabilities sum to {total}, expected 1")

    @property
    def num_outcomes(self) -> int:
        return self.probs.shape[0]


def exact_distribution(state: StateVector) -> MeasurementDistribution:
    """Measurement distribution |<k|state>|^2 over all basis states."""
    return MeasurementDistribution(np.abs(state.amps) ** 2)


def sample_shots(
    dist: MeasurementDistribution, shots: int, seed: SeedLike
) -> np.ndarray:
    """Draw ``shots`` i.i.d. outcome indices; deterministic given ``seed``."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = make_rng(seed)
    probs = dist.probs / dist.probs.sum()
    return rng.choice(dist.num_outcomes, size=shots, p=probs)
