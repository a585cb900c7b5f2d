"""Gate constructors for the block-structured circuits.

Single-qubit gates follow the usual conventions

    H = (1/sqrt(2)) [[1, 1], [1, -1]]
    Ry(g) = [[cos(g/2), -sin(g/2)], [sin(g/2), cos(g/2)]]
    Rz(a) = diag(exp(-i a/2), exp(+i a/2))

The data-encoding gate sandwiches a chain of Z-rotations between two
Hadamards; the trainable 4x4 blocks are Kronecker products of an encoding
gate with a Y-rotation.  Block counts that are not a power-of-two fraction
of the register are topped up with an identity pad.
"""

from __future__ import annotations

import numpy as np

from .params import TWO_PI, CircuitParams
from .statevector import BlockDiagonalUnitary

SQRT_HALF = 1.0 / np.sqrt(2.0)


def hadamard() -> np.ndarray:
    return np.array([[SQRT_HALF, SQRT_HALF], [SQRT_HALF, -SQRT_HALF]], dtype=np.complex128)


def rz(alpha: float) -> np.ndarray:
    phase = np.exp(-0.5j * alpha)
    return np.array([[phase, 0.0], [0.0, np.conj(phase)]], dtype=np.complex128)


def ry(gamma: float) -> np.ndarray:
    c, s = np.cos(gamma / 2.0), np.sin(gamma / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def u1_block(a: np.ndarray, b: float, x: np.ndarray) -> np.ndarray:
    """Data-encoding gate H Rz(-b) Rz(-a_d x_d) ... Rz(-a_1 x_1) H.

    Its (1,1) entry equals cos(l/2) with l = b + a.x, which is what the
    residue probabilities of the assembled circuit see.
    """
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if a.shape != x.shape:
        raise ValueError(f"frequency/input dimension mismatch: {a.shape} vs {x.shape}")
    if a.size < 1:
        raise ValueError("input dimension must be >= 1")
    out = hadamard()
    for ai, xi in zip(a, x):
        out = rz(-ai * xi) @ out
    out = rz(-float(b)) @ out
    return hadamard() @ out


def trainable_block(a: np.ndarray, b: float, gamma: float, x: np.ndarray) -> "TrainableBlock":
    if not 0.0 <= gamma <= TWO_PI:
        raise ValueError(f"gamma must lie in [0, 2*pi], got {gamma}")
    u1 = u1_block(a, b, x)
    u2 = ry(gamma)
    return TrainableBlock(u1, u2)


class TrainableBlock:
    """One 4x4 block U1 (x) U2 of the trainable circuit."""

    def __init__(self, u1: np.ndarray, u2: np.ndarray):
        self.u1 = u1
        self.u2 = u2
        self.product = np.kron(u1, u2)


def padded_dimension(count: int, stride: int) -> tuple[int, int, int]:
    """Smallest power-of-two register holding ``count`` blocks of ``stride``.

    Returns (pad, num_qubits, N) with N = stride*count + pad = 2**num_qubits.
    """
    if count < 1:
        raise ValueError("block count must be >= 1")
    used = stride * count
    num_qubits = max(1, int(np.ceil(np.log2(used))))
    n_total = 2**num_qubits
    if n_total < used:  # guard against log2 rounding
        num_qubits += 1
        n_total *= 2
    return n_total - used, num_qubits, n_total


def build_trainable_unitary(theta: CircuitParams, x: np.ndarray) -> BlockDiagonalUnitary:
    """Block matrix with n 4x4 blocks U1_i (x) Ry(gamma_i) plus identity pad."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    pad, _, _ = padded_dimension(theta.n, 4)
    blocks = tuple(
        trainable_block(theta.a[i], theta.b[i], theta.gamma[i], x).product
        for i in range(theta.n)
    )
    return BlockDiagonalUnitary(blocks, pad)


def build_reservoir_unitary(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> BlockDiagonalUnitary:
    """Block matrix with n 2x2 encoding blocks at frozen random weights.

    Row i encodes with frequencies 2*pi*a_i and phase (pi/2)*b_i, so a
    frequency matrix ``a`` of shape (n, d) and a bit vector ``b`` of
    length n define the whole unitary for a given input x.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    n = a.shape[0]
    if b.shape != (n,):
        raise ValueError(f"bit vector length {b.shape} does not match {n} rows")
    if not np.all((b == 0) | (b == 1)):
        raise ValueError("bit vector entries must be 0 or 1")
    if a.shape[1] != x.shape[0]:
        raise ValueError(f"input dimension mismatch: {a.shape[1]} vs {x.shape[0]}")
    pad, _, _ = padded_dimension(n, 2)
    blocks = tuple(
        u1_block(TWO_PI * a[i], (np.pi / 2.0) * b[i], x) for i in range(n)
    )
    return BlockDiagonalUnitary(blocks, pad)


def build_state_prep(n: int, stride: int, dim: int) -> np.ndarray:
    """Reflection V = 2|phi><phi| - I mapping |0> to the block-leading superposition.

    The target state psi puts amplitude 1/sqrt(n) on indices {0, stride, ...,
    stride*(n-1)}; phi = (|0> + |psi>)/sqrt(2(1 + <0|psi>)).  V is Hermitian,
    unitary and an involution, and its first column is exactly psi.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if dim < stride * n:
        raise ValueError(f"dimension {dim} too small for {n} blocks of stride {stride}")
    if dim & (dim - 1):
        raise ValueError(f"dimension {dim} is not a power of two")
    psi = np.zeros(dim, dtype=np.complex128)
    psi[stride * np.arange(n)] = 1.0 / np.sqrt(n)
    zero = np.zeros(dim, dtype=np.complex128)
    zero[0] = 1.0
    overlap = psi[0].real  # <0|psi> = 1/sqrt(n), always positive
    phi = (zero + psi) / np.sqrt(2.0 * (1.0 + overlap))
    return 2.0 * np.outer(phi, phi.conj()) - np.eye(dim, dtype=np.complex128)
