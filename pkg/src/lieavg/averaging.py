"""Averaging of fast-oscillating bilinear systems.

A prescribed 2*pi-periodic oscillation y1(t) enters the bilinear system
dx/dt = B(x, eps*y1 + x).  Over the slow time s = eps^2 t the mean motion
obeys the averaged equation

    dxbar/ds = avg_t B(B(xbar, y1t), y1) + B(xbar, xbar),

where y1t is the zero-mean antiderivative of y1.  When B is antisymmetric
and satisfies the Jacobi identity the averaged equation collapses to a
single shifted term B(S + xbar, xbar); `shift_vector` computes the constant
S for which this holds (see the note in its docstring on the sign).

In the Lie-algebra instantiation B(x, y) = -ad*_{I^-1 y} x the same
averaged flow is the drift-extended Euler equation
dm/ds = -ad*_{I^-1 m + V} m with V = `drift_vector`, the mean of half the
bracket of the oscillation with its antiderivative.

All profiles are uniform samplings of one period; averages are rectangle
rule sums, spectrally accurate for trigonometric polynomials, and the
antiderivative is taken through the discrete Fourier series so it is
exactly periodic and zero-mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import LieAlgebra
from .expr import Expression, parse

__all__ = [
    "OscillationProfile",
    "BilinearOperator",
    "lie_poisson_operator",
    "periodic_mean",
    "oscillating_primitive",
    "averaged_rhs",
    "drift_vector",
    "shift_vector",
    "shifted_averaged_rhs",
]

MIN_SAMPLES = 16
ZERO_MEAN_TOL = 1e-10
FLAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OscillationProfile:
    """One period of a 2*pi-periodic vector signal, sampled at t_j = 2*pi*j/K."""

    samples: np.ndarray  # (K, n), row j = signal at t_j

    def __post_init__(self):
        s = np.ascontiguousarray(np.asarray(self.samples, dtype=float))
        if s.ndim != 2:
            raise ValueError("profile samples must be a K x n matrix")
        if s.shape[0] < MIN_SAMPLES:
            raise ValueError(f"profile needs at least {MIN_SAMPLES} samples")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def K(self):
        return self.samples.shape[0]

    @property
    def dim(self):
        return self.samples.shape[1]

    @property
    def grid(self):
        return 2.0 * np.pi * np.arange(self.K) / self.K

    @classmethod
    def from_expressions(cls, exprs, K=256, var="t"):
        """Sample per-coordinate expressions in `var` on the period grid."""
        parsed = [parse(e) if isinstance(e, str) else e for e in exprs]
        ts = 2.0 * np.pi * np.arange(K) / K
        samples = np.column_stack(
            [[e.evaluate({var: t}) for t in ts] for e in parsed]
        )
        return cls(samples)

    @classmethod
    def from_callable(cls, fn, n, K=256):
        ts = 2.0 * np.pi * np.arange(K) / K
        samples = np.array([np.asarray(fn(t), dtype=float).reshape(n) for t in ts])
        return cls(samples)

    def interpolate(self, t):
        """Trigonometric interpolation of the profile at arbitrary time t."""
        K = self.K
        coeffs = np.fft.rfft(self.samples, axis=0)
        k = np.arange(coeffs.shape[0])
        weights = np.full(coeffs.shape[0], 2.0)
        weights[0] = 1.0
        if K % 2 == 0:
            weights[-1] = 1.0
        phase = np.exp(1j * np.outer(k, np.atleast_1d(t)))
        values = np.einsum("kn,kt->tn", coeffs * weights[:, None], phase).real / K
        if np.isscalar(t) or np.ndim(t) == 0:
            return values[0]
        return values


def periodic_mean(profile: OscillationProfile) -> np.ndarray:
    """Rectangle-rule mean over the period (exact for band-limited signals)."""
    return profile.samples.mean(axis=0)


def _require_zero_mean(profile):
    mean = periodic_mean(profile)
    if np.max(np.abs(mean)) > ZERO_MEAN_TOL:
        raise ValueError(
            f"profile must have zero mean (max |mean| = {np.max(np.abs(mean)):g})"
        )


def oscillating_primitive(profile: OscillationProfile) -> OscillationProfile:
    """Zero-mean antiderivative of a zero-mean profile, via the discrete
    Fourier series: nonzero modes divided by (i*frequency), constant mode
    dropped.  Exactly periodic and zero-mean by construction."""
    _require_zero_mean(profile)
    coeffs = np.fft.fft(profile.samples, axis=0)
    freqs = np.fft.fftfreq(profile.K) * profile.K
    coeffs[0] = 0.0
    coeffs[1:] /= 1j * freqs[1:, None]
    return OscillationProfile(np.real(np.fft.ifft(coeffs, axis=0)))


@dataclass(eq=False)
class BilinearOperator:
    """Bilinear map (x, y) -> vector with empirically verified flags.

    `verify` runs randomized residual checks for antisymmetry and the
    Jacobi identity; the shifted averaged form refuses to run until both
    flags are set.
    """

    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dim: int
    antisymmetric: bool = False
    jacobi: bool = False

    def __call__(self, x, y):
        return self.func(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def verify(self, trials=100, tol=FLAG_TOL, seed=0):
        """Randomized flag verification; returns (anti_residual, jacobi_residual)."""
        rng = np.random.default_rng(seed)
        anti = jac = 0.0
        for _ in range(trials):
            x, y, z = rng.uniform(-1.0, 1.0, (3, self.dim))
            anti = max(anti, float(np.max(np.abs(self(x, y) + self(y, x)))))
            cyc = (
                self(self(x, y), z) + self(self(y, z), x) + self(self(z, x), y)
            )
            jac = max(jac, float(np.max(np.abs(cyc))))
        self.antisymmetric = anti < tol
        self.jacobi = jac < tol
        return anti, jac


def lie_poisson_operator(algebra: LieAlgebra) -> BilinearOperator:
    """The coadjoint bilinear operator B(x, y) = -ad*_{I^-1 y} x on the dual."""
    n = algebra.n
    c_flat = algebra.c.reshape(n, n * n)
    inv = algebra.inertia_inv

    def func(x, y):
        adv = ((inv @ y) @ c_flat).reshape(n, n)
        return -(adv @ x)

    return BilinearOperator(func, n)


def averaged_rhs(B: BilinearOperator, profile: OscillationProfile, xbar) -> np.ndarray:
    """Mean slow-motion right-hand side:
    avg_j B(B(xbar, y1t(t_j)), y1(t_j)) + B(xbar, xbar)."""
    _require_zero_mean(profile)
    xbar = np.asarray(xbar, dtype=float)
    prim = oscillating_primitive(profile)
    acc = np.zeros_like(xbar)
    for y1t, y1 in zip(prim.samples, profile.samples):
        acc += B(B(xbar, y1t), y1)
    return acc / profile.K + B(xbar, xbar)


def drift_vector(algebra: LieAlgebra, profile: OscillationProfile) -> np.ndarray:
    """Mean drift generated by the oscillation in the algebra:
    (1/K) sum_j (1/2) [v(t_j), v^t(t_j)] with the algebra bracket."""
    _require_zero_mean(profile)
    if profile.dim != algebra.n:
        raise ValueError("profile dimension does not match algebra")
    prim = oscillating_primitive(profile)
    return 0.5 * np.einsum(
        "ijk,ti,tj->k", algebra.c, profile.samples, prim.samples
    ) / profile.K


def shift_vector(B: BilinearOperator, profile: OscillationProfile) -> np.ndarray:
    """Constant S = (1/2) avg_t B(y1, y1t) for the shifted averaged form.

    With this sign, B(S + xbar, xbar) reproduces `averaged_rhs` exactly for
    any antisymmetric B satisfying the Jacobi identity; in the Lie-algebra
    instantiation with ad-invariant inertia, S = -I(drift_vector)."""
    _require_zero_mean(profile)
    prim = oscillating_primitive(profile)
    acc = np.zeros(profile.dim)
    for y1, y1t in zip(profile.samples, prim.samples):
        acc += B(y1, y1t)
    return 0.5 * acc / profile.K


def shifted_averaged_rhs(B: BilinearOperator, shift, xbar) -> np.ndarray:
    """Shifted form of the averaged equation: B(shift + xbar, xbar).

    Requires B's antisymmetry and Jacobi flags to have been verified."""
    if not (B.antisymmetric and B.jacobi):
        raise ValueError(
            "bilinear operator flags not verified; call verify() first"
        )
    shift = np.asarray(shift, dtype=float)
    xbar = np.asarray(xbar, dtype=float)
    return B(shift + xbar, xbar)
