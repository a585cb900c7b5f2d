"""Right-hand sides of the approximation error bounds.

All bounds scale exactly as n^(-1/2); what varies is the constant in front,
assembled from the norms of the target (L1, the second-moment norm B2, the
density-weighted L2bar), the hypercube half-width M, the input dimension d,
and moments of the frequency density.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import optimize, special

from .fourier import FourierModel, integrate_radial_1d
from .sampling import FrequencyDensity


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound: which inequality family, its value, and its inputs."""

    kind: str
    value: float
    inputs: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (np.isfinite(self.value) and self.value > 0):
            raise ValueError(f"bound value must be finite and positive, got {self.value}")


def bound_l2_trainable(l1: float, n: int) -> float:
    """Mean-square error bound for the trainable circuit: L1 / sqrt(n)."""
    _check(l1=l1, n=n)
    return l1 / np.sqrt(n)


def bound_l2_reservoir(l2bar: float, n: int) -> float:
    """Expected mean-square error bound for the reservoir: L2bar / sqrt(n)."""
    _check(l2bar=l2bar, n=n)
    return l2bar / np.sqrt(n)


def bound_linf_trainable(l1: float, b2: float, half_width: float, d: int, n: int) -> float:
    """Uniform error bound on [-M, M]^d for the trainable circuit:

    (2*(pi+1)*L1 + 8*pi*M*sqrt(d)*sqrt(L1)*B2) / sqrt(n).
    """
    _check(l1=l1, n=n)
    if b2 < 0 or half_width < 0 or d < 1:
        raise ValueError("need b2 >= 0, half_width >= 0, d >= 1")
    constant = 2.0 * (np.pi + 1.0) * l1 + 8.0 * np.pi * half_width * np.sqrt(d) * np.sqrt(l1) * b2
    return constant / np.sqrt(n)


def bound_linf_reservoir(
    sup_ratio: float,
    freq_second_moment_sqrt: float,
    l2bar: float,
    half_width: float,
    d: int,
    n: int,
) -> float:
    """Expected uniform error bound on [-M, M]^d for the reservoir:

    (8 * sup|fhat/density| * (pi/2^(3/2) + 2*pi*M*sqrt(d)*E[||A||^2]^(1/2))
     + L2bar) / sqrt(n).

    Requires a finite frequency second moment, so heavy-tailed densities
    (e.g. Cauchy) are rejected outright.
    """
    if not np.isfinite(freq_second_moment_sqrt):
        raise ValueError(
            "frequency density has infinite second moment; the uniform "
            "reservoir bound needs E[||A||^2] < inf (use student-t with nu > 2)"
        )
    if sup_ratio < 0 or freq_second_moment_sqrt < 0 or l2bar < 0 or half_width < 0 or d < 1:
        raise ValueError("bound inputs must be nonnegative with d >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    constant = 8.0 * sup_ratio * (
        np.pi / 2.0**1.5 + 2.0 * np.pi * half_width * np.sqrt(d) * freq_second_moment_sqrt
    ) + l2bar
    return constant / np.sqrt(n)


def mixture_constant(delta: float, nu: float, d: int, sobolev_integral: float) -> float:
    """Constant C with integral |fhat|^2 / density <= C for the mixture density
    delta * t_nu + (1 - delta) * phi:

    C = (1/delta) * Gamma(nu/2) nu^(d/2) pi^(d/2) / Gamma((nu+d)/2)
        * max(1, 1/nu)^((nu+d)/2) * sobolev_integral.

    The corresponding L2bar bound is sqrt(2*C) (see
    :func:`mixture_l2bar_bound`), monotone decreasing in delta.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    if nu <= 0 or d < 1 or sobolev_integral < 0:
        raise ValueError("need nu > 0, d >= 1, sobolev_integral >= 0")
    prefactor = (
        special.gamma(nu / 2.0)
        * nu ** (d / 2.0)
        * np.pi ** (d / 2.0)
        / special.gamma((nu + d) / 2.0)
    )
    return (1.0 / delta) * prefactor * max(1.0, 1.0 / nu) ** ((nu + d) / 2.0) * sobolev_integral


def mixture_l2bar_bound(delta: float, nu: float, d: int, sobolev_integral: float) -> float:
    return float(np.sqrt(2.0 * mixture_constant(delta, nu, d, sobolev_integral)))


def sobolev_integral(model: FourierModel, order: float, tol: float = 1e-9) -> float:
    """integral |fhat(xi)|^2 (1 + ||xi||^2)^order dxi (d=1 quadrature)."""
    if model.dim != 1:
        raise ValueError("quadrature Sobolev integral implemented for dim=1 only")

    def integrand(s: float) -> float:
        val = model.fhat(np.array([[s]]))[0]
        return float(np.abs(val) ** 2 * (1.0 + s * s) ** order)

    return integrate_radial_1d(integrand, model.support_radius, tol, "Sobolev integral")


def sup_density_ratio(
    model: FourierModel,
    density: FrequencyDensity,
    search_radius: float = 50.0,
    grid: int = 4001,
) -> float:
    """sup over xi of |fhat(xi)| / density(xi), by grid scan plus local refinement.

    Implemented for d = 1 and 2; higher dimensions must supply the value.
    The result is a numerical estimate, not a certificate.
    """
    if model.dim == 1:
        xs = np.linspace(-search_radius, search_radius, grid).reshape(-1, 1)
        ratio = np.abs(model.eval_fhat(xs)) / density.density(xs)
        best = float(xs[np.argmax(ratio), 0])
        res = optimize.minimize_scalar(
            lambda s: -float(np.abs(model.fhat(np.array([[s]]))[0]) / density.density(np.array([[s]]))[0]),
            bracket=None,
            bounds=(best - 1.0, best + 1.0),
            method="bounded",
        )
        return max(float(np.max(ratio)), float(-res.fun))
    if model.dim == 2:
        side = np.linspace(-search_radius, search_radius, 201)
        mesh = np.stack(np.meshgrid(side, side), axis=-1).reshape(-1, 2)
        ratio = np.abs(model.eval_fhat(mesh)) / density.density(mesh)
        start = mesh[np.argmax(ratio)]
        res = optimize.minimize(
            lambda p: -float(
                np.abs(model.fhat(p.reshape(1, 2))[0]) / density.density(p.reshape(1, 2))[0]
            ),
            start,
            method="Nelder-Mead",
        )
        return max(float(np.max(ratio)), float(-res.fun))
    raise ValueError("sup ratio search implemented for dim <= 2; pass the value explicitly")


def report(kind: str, value: float, **inputs: Any) -> BoundReport:
    return BoundReport(kind, float(value), inputs)


def _check(n: int = 1, l1: float = 1.0, l2bar: float = 1.0) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if l1 < 0 or l2bar < 0:
        raise ValueError("norms must be nonnegative")
