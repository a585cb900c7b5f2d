"""Trainable-circuit parameter container."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class CircuitParams:
    """Weights of the trainable circuit: n triples (a_i in R^d, b_i, gamma_i).

    ``a`` has shape (n, d), ``b`` and ``gamma`` shape (n,).  Rotation angles
    ``gamma`` must lie in [0, 2*pi]; values outside are rejected rather than
    wrapped so sampler bugs surface instead of aliasing.
    """

    a: np.ndarray
    b: np.ndarray
    gamma: np.ndarray

    def __post_init__(self) -> None:
        a = np.atleast_2d(np.asarray(self.a, dtype=np.float64))
        b = np.atleast_1d(np.asarray(self.b, dtype=np.float64))
        gamma = np.atleast_1d(np.asarray(self.gamma, dtype=np.float64))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "gamma", gamma)
        if a.ndim != 2:
            raise ValueError(f"a must be 2-D (n, d), got shape {a.shape}")
        n = a.shape[0]
        if n < 1:
            raise ValueError("need at least one parameter triple")
        if b.shape != (n,) or gamma.shape != (n,):
            raise ValueError(
                f"inconsistent lengths: a has {n} rows, b {b.shape}, gamma {gamma.shape}"
            )
        if np.any(gamma < 0.0) or np.any(gamma > TWO_PI):
            bad = gamma[(gamma < 0.0) | (gamma > TWO_PI)][0]
            raise ValueError(f"gamma must lie in [0, 2*pi], got {bad}")

    @property
    def n(self) -> int:
        """Number of blocks."""
        return self.a.shape[0]

    @property
    def d(self) -> int:
        """Input dimension."""
        return self.a.shape[1]

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist(), "gamma": self.gamma.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "CircuitParams":
        return cls(
            np.asarray(data["a"], dtype=np.float64),
            np.asarray(data["b"], dtype=np.float64),
            np.asarray(data["gamma"], dtype=np.float64),
        )
