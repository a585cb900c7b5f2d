"""Probabilistic parameter construction for both circuit families.

Trainable path: frequencies are drawn from densities proportional to the
real and imaginary parts of the target's Fourier transform, mixed by a
Bernoulli switch, and the rotation angles encode the transform's sign.  The
resulting circuit output is an unbiased estimator of the target with
variance L1^2 / n.

Reservoir path: a frozen frequency matrix A (rows i.i.d. from a chosen
density) and fair-coin phase bits B, drawn once and reused for every input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

from .fourier import FourierModel, compute_norms, integrate_radial_1d
from .params import CircuitParams
from .rng import SeedLike, make_rng

CDF_TOL = 1e-6  # inverse-CDF table accuracy target


# ---------------------------------------------------------------------------
# frequency densities for the reservoir path
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrequencyDensity:
    """A named sampling density on R^d with evaluable (log-)density.

    ``kind`` is one of "student-t", "gaussian", "mixture"; a mixture puts
    weight ``delta`` on a student-t component and 1 - delta on ``base``.
    """

    kind: str
    dim: int = 1
    nu: float | None = None
    delta: float | None = None
    base: "FrequencyDensity | None" = None

    def __post_init__(self) -> None:
        if self.kind == "student-t":
            if self.nu is None or self.nu <= 0:
                raise ValueError("student-t needs nu > 0")
        elif self.kind == "mixture":
            if self.nu is None or self.nu <= 0:
                raise ValueError("mixture needs nu > 0 for its student-t part")
            if self.delta is None or not 0.0 < self.delta <= 1.0:
                raise ValueError("mixture weight delta must lie in (0, 1]")
            if self.base is None:
                raise ValueError("mixture needs a base density")
            if self.base.dim != self.dim:
                raise ValueError("mixture components must share the dimension")
        elif self.kind != "gaussian":
            raise ValueError(f"unknown density kind '{self.kind}'")

    @property
    def label(self) -> str:
        if self.kind == "student-t":
            return "cauchy" if self.nu == 1 else f"t{self.nu:g}"
        if self.kind == "mixture":
            return f"mixture({self.delta:g}*t{self.nu:g}+{1 - self.delta:g}*{self.base.label})"
        return "gaussian"

    def density(self, xi: np.ndarray) -> np.ndarray:
        xi = _as_rows(xi, self.dim)
        sq = np.sum(xi**2, axis=-1)
        if self.kind == "gaussian":
            return (2.0 * np.pi) ** (-self.dim / 2.0) * np.exp(-0.5 * sq)
        if self.kind == "student-t":
            return _t_norm_const(self.nu, self.dim) * (1.0 + sq / self.nu) ** (
                -(self.nu + self.dim) / 2.0
            )
        t_part = FrequencyDensity("student-t", self.dim, nu=self.nu).density(xi)
        return self.delta * t_part + (1.0 - self.delta) * self.base.density(xi)

    def log_density(self, xi: np.ndarray) -> np.ndarray:
        return np.log(self.density(xi))

    def sample(self, size: int, seed: SeedLike) -> np.ndarray:
        """Draw ``size`` i.i.d. rows; deterministic given ``seed``."""
        rng = make_rng(seed)
        return self._draw(rng, size)

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.standard_normal((size, self.dim))
        if self.kind == "student-t":
            normals = rng.standard_normal((size, self.dim))
            chi2 = rng.chisquare(self.nu, size=size)
            return normals / np.sqrt(chi2 / self.nu)[:, None]
        pick_t = rng.random(size) < self.delta
        out = np.empty((size, self.dim))
        n_t = int(pick_t.sum())
        t_part = FrequencyDensity("student-t", self.dim, nu=self.nu)
        if n_t:
            out[pick_t] = t_part._draw(rng, n_t)
        if size - n_t:
            out[~pick_t] = self.base._draw(rng, size - n_t)
        return out

    def second_moment(self) -> float:
        """E[||A||^2]; inf for tails too heavy to integrate (nu <= 2)."""
        if self.kind == "gaussian":
            return float(self.dim)
        if self.kind == "student-t":
            return self.dim * self.nu / (self.nu - 2.0) if self.nu > 2 else np.inf
        t_m = FrequencyDensity("student-t", self.dim, nu=self.nu).second_moment()
        return self.delta * t_m + (1.0 - self.delta) * self.base.second_moment()


def _t_norm_const(nu: float, dim: int) -> float:
    return float(
        special.gamma((nu + dim) / 2.0)
        / (special.gamma(nu / 2.0) * nu ** (dim / 2.0) * np.pi ** (dim / 2.0))
    )


def cauchy_density(dim: int = 1) -> FrequencyDensity:
    return FrequencyDensity("student-t", dim, nu=1.0)


def student_t_density(nu: float, dim: int = 1) -> FrequencyDensity:
    return FrequencyDensity("student-t", dim, nu=float(nu))


def gaussian_density(dim: int = 1) -> FrequencyDensity:
    return FrequencyDensity("gaussian", dim)


def mixture_density(
    delta: float, nu: float, base: FrequencyDensity | None = None, dim: int = 1
) -> FrequencyDensity:
    base = base if base is not None else gaussian_density(dim)
    return FrequencyDensity("mixture", dim, nu=float(nu), delta=float(delta), base=base)


def parse_density(spec: str, dim: int = 1) -> FrequencyDensity:
    """Parse CLI density specs: "cauchy", "gaussian", "t3", "mixture:0.5:3:gaussian"."""
    spec = spec.strip().lower()
    if spec == "cauchy":
        return cauchy_density(dim)
    if spec == "gaussian":
        return gaussian_density(dim)
    if spec.startswith("t") and spec[1:].replace(".", "", 1).isdigit():
        return student_t_density(float(spec[1:]), dim)
    if spec.startswith("mixture:"):
        parts = spec.split(":")
        if len(parts) != 4:
            raise ValueError("mixture spec is mixture:<delta>:<nu>:<base>")
        return mixture_density(float(parts[1]), float(parts[2]), parse_density(parts[3], dim), dim)
    raise ValueError(f"unknown density spec '{spec}'")


# ---------------------------------------------------------------------------
# samplers for densities proportional to |Re fhat| / |Im fhat|
# ---------------------------------------------------------------------------


class TabulatedInverseCdf:
    """Inverse-CDF sampler for a nonnegative 1-D density given pointwise.

    The CDF is accumulated with Simpson's rule on a uniform grid over
    [-radius, radius]; the grid is doubled until consecutive tables agree to
    ``CDF_TOL``.  The radius itself is doubled first until the windowed tail
    mass is negligible.
    """

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], radius: float):
        radius = self._expand_radius(func, radius)
        grid_size = 1 << 13
        prev = None
        for _ in range(6):
            xs = np.linspace(-radius, radius, grid_size + 1)
            cdf = self._cumulative_simpson(func, xs)
            if prev is not None:
                agree = np.max(np.abs(cdf[::2] - prev))
                if agree < CDF_TOL:
                    break
            prev = cdf
            grid_size *= 2
        total = cdf[-1]
        if total <= 0:
            raise ValueError("density integrates to zero on its support window")
        self.xs = xs
        self.cdf = cdf / total

    @staticmethod
    def _expand_radius(func, radius: float) -> float:
        body, _ = integrate.quad(func, -radius, radius, limit=200)
        for _ in range(24):
            tail_r, _ = integrate.quad(func, radius, 2 * radius, limit=200)
            tail_l, _ = integrate.quad(func, -2 * radius, -radius, limit=200)
            if tail_l + tail_r <= 1e-12 * max(body, 1e-300):
                return radius
            body += tail_l + tail_r
            radius *= 2
        return radius

    @staticmethod
    def _cumulative_simpson(func, xs: np.ndarray) -> np.ndarray:
        h = xs[1] - xs[0]
        vals = func(xs)
        mids = func((xs[:-1] + xs[1:]) / 2.0)
        increments = (h / 6.0) * (vals[:-1] + 4.0 * mids + vals[1:])
        cdf = np.concatenate([[0.0], np.cumsum(increments)])
        return cdf

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        return np.interp(u, self.cdf, self.xs).reshape(size, 1)


class RejectionSampler:
    """Rejection sampler from an unnormalized target with product-Cauchy envelope.

    ``bound`` must dominate target(xi) / envelope(xi) everywhere; runtime
    violations raise instead of silently biasing the draw.
    """

    def __init__(
        self,
        target: Callable[[np.ndarray], np.ndarray],
        dim: int,
        bound: float | None = None,
        scale: float = 1.0,
        probe_radius: float = 10.0,
    ):
        self.target = target
        self.dim = dim
        self.scale = scale
        if bound is None:
            bound = self._probe_bound(probe_radius)
        self.bound = bound

    def _envelope(self, xi: np.ndarray) -> np.ndarray:
        s = self.scale
        return np.prod(1.0 / (np.pi * s * (1.0 + (xi / s) ** 2)), axis=-1)

    def _probe_bound(self, probe_radius: float) -> float:
        grid_1d = np.linspace(-probe_radius, probe_radius, 101)
        mesh = np.stack(np.meshgrid(*([grid_1d] * self.dim)), axis=-1).reshape(-1, self.dim)
        ratio = self.target(mesh) / self._envelope(mesh)
        return 2.0 * float(np.max(ratio))

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.empty((size, self.dim))
        filled = 0
        while filled < size:
            m = max(2 * (size - filled), 64)
            proposal = self.scale * rng.standard_cauchy((m, self.dim))
            ratio = self.target(proposal) / (self.bound * self._envelope(proposal))
            if np.any(ratio > 1.0 + 1e-9):
                raise RuntimeError(
                    "rejection envelope violated; increase the bound or scale"
                )
            accept = rng.random(m) < ratio
            take = min(int(accept.sum()), size - filled)
            out[filled : filled + take] = proposal[accept][:take]
            filled += take
        return out


def _point_mass_sampler(dim: int) -> Callable[[np.random.Generator, int], np.ndarray]:
    def draw(rng: np.random.Generator, size: int) -> np.ndarray:
        return np.zeros((size, dim))

    return draw


def _as_rows(x: np.ndarray, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1) if dim == 1 else x.reshape(1, -1)
    return x


# ---------------------------------------------------------------------------
# trainable-circuit parameter sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierSamplingPlan:
    """Everything needed to draw circuit parameters targeting one model.

    ``bernoulli_p`` is the probability of the real-part branch; the two
    samplers draw frequencies from the densities proportional to |Re fhat|
    and |Im fhat| (an arbitrary fixed point mass when a branch has zero
    mass, which is then never selected).
    """

    model: FourierModel = field(repr=False)
    bernoulli_p: float
    l1: float
    nu1_sampler: Callable[[np.random.Generator, int], np.ndarray] = field(repr=False)
    nu0_sampler: Callable[[np.random.Generator, int], np.ndarray] = field(repr=False)


def build_plan(model: FourierModel, tol: float = 1e-9) -> FourierSamplingPlan:
    """Prepare the Bernoulli weight and both conditional frequency samplers."""
    l1 = model.l1_norm if model.l1_norm is not None else compute_norms(model).l1
    if not np.isfinite(l1):
        raise ValueError("model has non-integrable Fourier transform (L1 infinite)")

    if model.fhat_is_real:
        re_mass, im_mass = l1, 0.0
    else:
        re_mass = _abs_part_mass(model, "re", tol)
        im_mass = _abs_part_mass(model, "im", tol)

    p = re_mass / l1
    nu1 = _part_sampler(model, "re", re_mass)
    nu0 = _part_sampler(model, "im", im_mass)
    return FourierSamplingPlan(model, float(np.clip(p, 0.0, 1.0)), float(l1), nu1, nu0)


def _abs_part(model: FourierModel, part: str) -> Callable[[np.ndarray], np.ndarray]:
    if part == "re":
        return lambda xi: np.abs(np.real(model.fhat(xi)))
    return lambda xi: np.abs(np.imag(model.fhat(xi)))


def _abs_part_mass(model: FourierModel, part: str, tol: float) -> float:
    func = _abs_part(model, part)
    if model.dim == 1:
        return integrate_radial_1d(
            lambda s: float(func(np.array([[s]]))[0]),
            model.support_radius, tol, f"|{part.capitalize()} fhat| mass",
        )
    if model.dim == 2:
        r = model.support_radius
        value, _ = integrate.dblquad(
            lambda y, x: float(func(np.array([[x, y]]))[0]), -r, r, -r, r, epsabs=tol
        )
        return value
    raise ValueError("branch masses need dim <= 2 or analytic samplers on the model")


def _part_sampler(model: FourierModel, part: str, mass: float):
    if mass <= 1e-12:
        return _point_mass_sampler(model.dim)
    analytic = model.re_sampler if part == "re" else model.im_sampler
    if analytic is not None:
        return analytic
    func = _abs_part(model, part)
    if model.dim == 1:
        def on_axis(s):
            arr = np.atleast_1d(np.asarray(s, dtype=np.float64))
            return func(arr.reshape(-1, 1)).reshape(np.shape(s))

        table = TabulatedInverseCdf(on_axis, model.support_radius)
        return table.draw
    sampler = RejectionSampler(func, model.dim, probe_radius=model.support_radius)
    return sampler.draw


def sample_theta(
    plan: FourierSamplingPlan, n: int, amplitude: float, seed: SeedLike
) -> CircuitParams:
    """Draw n parameter triples so the circuit output estimates the target.

    ``amplitude`` (the output scale R) must dominate L1[fhat] so the angle
    arccos(w / R) exists; the draw is deterministic given ``seed``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if amplitude < plan.l1 * (1.0 - 1e-12):
        raise ValueError(
            f"amplitude {amplitude} is below L1[fhat] = {plan.l1}; no valid angles"
        )
    rng = make_rng(seed)
    z = rng.random(n) < plan.bernoulli_p
    draws = np.zeros((n, plan.model.dim))
    n_re = int(z.sum())
    if n_re:
        draws[z] = plan.nu1_sampler(rng, n_re)
    if n - n_re:
        draws[~z] = plan.nu0_sampler(rng, n - n_re)

    values = plan.model.eval_fhat(draws)
    signs = np.where(z, np.sign(values.real), np.sign(values.imag))
    w = plan.l1 * signs

    ratio = w / amplitude
    if np.any(np.abs(ratio) > 1.0 + 1e-9):
        raise AssertionError("arccos argument left [-1, 1]; norm bookkeeping is wrong")
    gamma = np.arccos(np.clip(ratio, -1.0, 1.0))

    a = 2.0 * np.pi * draws
    b = (np.pi / 2.0) * (1.0 - z.astype(np.float64))
    return CircuitParams(a, b, gamma)


# ---------------------------------------------------------------------------
# reservoir draws
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReservoirDraw:
    """Frozen random reservoir weights: frequency rows A and phase bits B."""

    a: np.ndarray
    b: np.ndarray
    seed: tuple[int, ...] | int

    def __post_init__(self) -> None:
        a = np.atleast_2d(np.asarray(self.a, dtype=np.float64))
        b = np.atleast_1d(np.asarray(self.b, dtype=np.int64))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if b.shape != (a.shape[0],):
            raise ValueError(f"A has {a.shape[0]} rows but B has shape {b.shape}")
        if not np.all((b == 0) | (b == 1)):
            raise ValueError("B entries must be 0 or 1")

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def d(self) -> int:
        return self.a.shape[1]


def sample_reservoir(
    density: FrequencyDensity, n: int, d: int, seed: SeedLike
) -> ReservoirDraw:
    """Draw A (rows i.i.d. from ``density``) and fair-coin bits B."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if density.dim != d:
        raise ValueError(f"density dimension {density.dim} does not match d={d}")
    rng = make_rng(seed)
    a = density._draw(rng, n)
    b = rng.integers(0, 2, size=n)
    stored = seed if isinstance(seed, (int, tuple)) else -1
    return ReservoirDraw(a, b, stored)
