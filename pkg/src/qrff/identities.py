"""Cross-checks between the simulated circuits and their closed forms.

Each suite compares two independently computed quantities over randomized
instances and reports the worst deviation.  These are the package's
self-verification hooks, runnable from the CLI (``qrff verify-identities``)
and exercised by the test suite at fixed seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import circuit, gates, reservoir
from .params import CircuitParams
from .rng import SeedLike, make_rng
from .sampling import ReservoirDraw
from .statevector import StateVector, apply_dense


@dataclass(frozen=True)
class IdentityResult:
    name: str
    trials: int
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def random_theta(rng: np.random.Generator, n: int, d: int, freq_scale: float = 4.0) -> CircuitParams:
    return CircuitParams(
        a=rng.normal(0.0, freq_scale, size=(n, d)),
        b=rng.normal(0.0, 2.0, size=n),
        gamma=rng.uniform(0.0, 2.0 * np.pi, size=n),
    )


def random_draw(rng: np.random.Generator, n: int, d: int) -> ReservoirDraw:
    return ReservoirDraw(
        a=rng.standard_cauchy(size=(n, d)),
        b=rng.integers(0, 2, size=n),
        seed=-1,
    )


def check_circuit_closed_form(trials: int, seed: SeedLike, tol: float = 1e-10) -> IdentityResult:
    """Statevector output R - 2R(P1+P2) against the cosine sum, random instances."""
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 4))
        theta = random_theta(rng, n, d)
        x = rng.normal(0.0, 1.0, size=d)
        amplitude = float(rng.choice([0.5, 1.0, 3.0]))
        lhs = circuit.evaluate(theta, x, amplitude)
        rhs = circuit.closed_form(theta, x, amplitude)
        worst = max(worst, abs(lhs - rhs))
    return IdentityResult("circuit output = closed form", trials, worst, tol)


def _closed_form_residues(theta: CircuitParams, x: np.ndarray) -> np.ndarray:
    ell = theta.b + theta.a @ np.atleast_1d(x)
    cg, sg = np.cos(theta.gamma / 2.0) ** 2, np.sin(theta.gamma / 2.0) ** 2
    cl, sl = np.cos(ell / 2.0) ** 2, np.sin(ell / 2.0) ** 2
    return np.array([
        np.mean(cg * cl), np.mean(sg * cl), np.mean(cg * sl), np.mean(sg * sl)
    ])


def check_residue_probabilities(trials: int, seed: SeedLike, tol: float = 1e-12) -> IdentityResult:
    """Simulated residue probabilities against their trigonometric sums."""
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 4))
        theta = random_theta(rng, n, d)
        x = rng.normal(0.0, 1.0, size=d)
        probs = circuit.exact_probabilities(theta, x).as_array()
        expected = _closed_form_residues(theta, x)
        worst = max(worst, float(np.max(np.abs(probs - expected))))
    return IdentityResult("residue probabilities", trials, worst, tol)


def check_marginal_identities(trials: int, seed: SeedLike, tol: float = 1e-12) -> IdentityResult:
    """p0+p1 = 1/2 + mean(cos l)/2 and p0+p2 = 1/2 + mean(cos gamma)/2."""
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 4))
        theta = random_theta(rng, n, d)
        x = rng.normal(0.0, 1.0, size=d)
        p = circuit.exact_probabilities(theta, x)
        ell = theta.b + theta.a @ x
        dev1 = abs((p.p0 + p.p1) - (0.5 + 0.5 * np.mean(np.cos(ell))))
        dev2 = abs((p.p0 + p.p2) - (0.5 + 0.5 * np.mean(np.cos(theta.gamma))))
        worst = max(worst, dev1, dev2)
    return IdentityResult("marginal identities", trials, worst, tol)


def check_pair_sums(trials: int, seed: SeedLike, tol: float = 1e-12) -> IdentityResult:
    """Reservoir block outcome pairs each sum to 1/n."""
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 17))
        d = int(rng.integers(1, 4))
        circ = reservoir.ReservoirCircuit(random_draw(rng, n, d))
        x = rng.normal(0.0, 1.0, size=d)
        pairs = reservoir.block_probability_pairs(circ, x)
        worst = max(worst, float(np.max(np.abs(pairs.sum(axis=1) - 1.0 / n))))
    return IdentityResult("reservoir pair sums", trials, worst, tol)


def check_feature_identity(trials: int, seed: SeedLike, tol: float = 1e-10) -> IdentityResult:
    """Measured readout sum w.phi(x) against the cosine representation."""
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 17))
        d = int(rng.integers(1, 4))
        circ = reservoir.ReservoirCircuit(random_draw(rng, n, d))
        x = rng.normal(0.0, 1.0, size=d)
        w = rng.normal(0.0, 2.0, size=n)
        measured = float(w @ reservoir.features(circ, x))
        angles = (np.pi / 2.0) * circ.draw.b + 2.0 * np.pi * circ.draw.a @ x
        cosine = float(np.mean(w * np.cos(angles)))
        worst = max(worst, abs(measured - cosine))
    return IdentityResult("reservoir feature identity", trials, worst, tol)


def check_state_prep(max_n: int = 8, tol: float = 1e-12) -> IdentityResult:
    """Reflection properties and first column of the state-prep unitary."""
    worst = 0.0
    trials = 0
    for stride in (2, 4):
        for n in range(1, max_n + 1):
            pad, nq, dim = gates.padded_dimension(n, stride)
            v = gates.build_state_prep(n, stride, dim)
            eye = np.eye(dim)
            worst = max(worst, float(np.max(np.abs(v @ v.conj().T - eye))))
            worst = max(worst, float(np.max(np.abs(v - v.conj().T))))
            worst = max(worst, float(np.max(np.abs(v @ v - eye))))
            psi = np.zeros(dim, dtype=complex)
            psi[stride * np.arange(n)] = 1.0 / np.sqrt(n)
            prepared = apply_dense(StateVector.zero(nq), v).amps
            worst = max(worst, float(np.max(np.abs(prepared - psi))))
            trials += 1
    return IdentityResult("state-prep reflection", trials, worst, tol)


def run_all(trials: int, seed: SeedLike) -> list[IdentityResult]:
    rng = make_rng(seed)
    seeds = rng.integers(0, 2**31, size=5)
    return [
        check_circuit_closed_form(trials, int(seeds[0])),
        check_residue_probabilities(trials, int(seeds[1])),
        check_marginal_identities(trials, int(seeds[2])),
        check_pair_sums(trials, int(seeds[3])),
        check_feature_identity(trials, int(seeds[4])),
        check_state_prep(),
    ]
