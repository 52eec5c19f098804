"""Birman-Schwinger core: dressed couplings and the reduced determinant.

The resolvent difference between the full operator (attractive delta line of
strength alpha plus n delta points) and the line-only operator is finite
rank; its n x n Schur-complement matrix is

    D(z)_kl = s_{beta_k}(z) delta_kl
              - (1/2pi) K0(kappa(z) |y_k - y_l|) (1 - delta_kl)
              - phi_kl(z),

where phi_kl is the line-dressed coupling

    phi_kl(z) = (alpha/4pi) int_R  e^{i p (y1_k - y1_l)}
                e^{-sqrt(p^2-z) (|y2_k| + |y2_l|)}
                / ( sqrt(p^2-z) (2 sqrt(p^2-z) - alpha) )  dp,

obtained by closing the Fourier representation of the line-trace resolvent
blocks; for a single dot at height a it reduces to the on-axis diagonal form
(alpha/4pi) int e^{-2 sqrt(p^2+kappa^2) a} / ((2 sqrt(p^2+kappa^2)-alpha)
sqrt(p^2+kappa^2)) dp.

Zeros of det D below the guided-channel threshold -alpha^2/4 are the bound
states; the analytic continuation of the same determinant carries the
resonances (resonance module).

Numerics: on the physical real axis z = -kappa^2 (kappa > alpha/2) the p
integral is evaluated after substituting u = sqrt(p^2 + kappa^2) = kappa +
v^2, which simultaneously removes the endpoint derivative blow-up and turns
the threshold pinch 2u - alpha -> 0 into an explicit factor 1/(delta + v^2),
delta = kappa - alpha/2, that is subtracted and integrated in closed form.
This keeps full accuracy for states exponentially close to the threshold,
provided delta is supplied exactly (see d_matrix_at_offset).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleOnPathError, ThresholdError
from .quadrature import QuadSpec, integrate_halfline, integrate_interval
from .specfun import kappa_of, macdonald_k0, s_beta, s_breve

__all__ = [
    "ModelParams",
    "DMatrix",
    "gamma00_multiplier",
    "phi_kl",
    "phi_diag_real",
    "d_matrix",
    "d_matrix_at_offset",
    "GREEN_NORMALIZATION",
]

# free 2D Green's function is (1/2pi) K0(kappa |x-x'|)
GREEN_NORMALIZATION = 1.0 / (2.0 * math.pi)


@dataclass(frozen=True)
class ModelParams:
    """Operator data: line strength alpha, dot positions, dot parameters.

    The betas are the logarithmic boundary-condition parameters of the 2D
    point interactions (beta -> +oo removes a dot), not formal coupling
    constants.
    """

    alpha: float
    dots: tuple[tuple[float, float], ...] = ()
    betas: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "dots", tuple((float(x), float(y)) for x, y in self.dots))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if len(self.dots) != len(self.betas):
            raise ValueError("dots and betas must have equal length")
        for x, y in self.dots:
            if y == 0.0:
                raise ValueError(f"dot ({x}, {y}) lies on the line")
        if len(set(self.dots)) != len(self.dots):
            raise ValueError("dot positions must be pairwise distinct")

    @property
    def n(self) -> int:
        return len(self.dots)

    @property
    def threshold(self) -> float:
        """Bottom of the essential spectrum, -alpha^2/4."""
        return -0.25 * self.alpha * self.alpha

    def single_dot_height(self) -> float:
        if self.n != 1:
            raise ValueError(f"single-dot operation on a model with n={self.n}")
        return abs(self.dots[0][1])


@dataclass
class DMatrix:
    """Reduced determinant matrix D(z) with diagnostics."""

    z: complex
    entries: np.ndarray
    det: complex
    cond_estimate: float

    def null_vector(self) -> np.ndarray:
        """Unit vector minimizing |D v|, from the SVD of the entries."""
        if self.entries.size == 0:
            return np.zeros(0)
        _, _, vh = np.linalg.svd(self.entries)
        return vh[-1].conj()

    def smallest_eigenvalue(self) -> float:
        """Smallest eigenvalue of the (real symmetric) matrix; real path only."""
        return float(np.linalg.eigvalsh(np.real(self.entries))[0])


def gamma00_multiplier(p: float, z: complex, alpha: float) -> complex:
    """Momentum multiplier of the line block: 1/alpha - 1/(2 sqrt(p^2 - z)).

    The square root is taken with Re >= 0.  Vanishes exactly on the locus
    p^2 - z = alpha^2/4, which for z = -kappa^2 reproduces the essential
    spectrum threshold -alpha^2/4.
    """
    u = cmath.sqrt(p * p - z)
    value = 1.0 / alpha - 0.5 / u
    if abs(value) < 1e-14:
        raise ThresholdError(
            f"line multiplier vanishes at p={p}, z={z}: essential-spectrum locus"
        )
    return value


def _pair_geometry(model: ModelParams, k: int, l: int) -> tuple[float, float]:
    xk, yk = model.dots[k]
    xl, yl = model.dots[l]
    return abs(yk) + abs(yl), xk - xl


def _guard_continuum(z: complex, alpha: float) -> None:
    zeta = complex(z) + 0.25 * alpha * alpha
    if abs(zeta.imag) <= 1e-8 * alpha * alpha and zeta.real >= -1e-8 * alpha * alpha:
        raise PoleOnPathError(
            f"z={z} lies in or too near [-alpha^2/4, oo); use the sheet-aware continuation"
        )


def _phi_vform_real(delta: float, alpha: float, s: float, dy1: float, spec: QuadSpec) -> float:
    """Real-path dressed coupling at kappa = alpha/2 + delta, delta > 0."""
    kappa = 0.5 * alpha + delta
    h0 = 1.0 / math.sqrt(2.0 * kappa)

    def h(v: float) -> float:
        q = v * v + 2.0 * kappa
        r = math.sqrt(q)
        val = math.exp(-s * v * v) / r
        if dy1 != 0.0:
            val *= math.cos(dy1 * v * r)
        return val

    # cutoff where the gaussian tail is negligible against the subtracted term
    vmax = math.sqrt(max(math.log(max(h0, 1.0) / (spec.abs_tol * 1e-2)), 1.0) / s) + 1.0
    core = integrate_interval(
        lambda v: (h(v) - h0) / (2.0 * (delta + v * v)), 0.0, vmax, spec
    ).value
    closed = h0 * math.atan(vmax / math.sqrt(delta)) / (2.0 * math.sqrt(delta))
    return (alpha / math.pi) * math.exp(-kappa * s) * (core + closed)


def _phi_vform_complex(delta: complex, alpha: float, s: float, dy1: float, spec: QuadSpec) -> complex:
    kappa = 0.5 * alpha + delta
    rt = cmath.sqrt(delta)
    h0 = 1.0 / cmath.sqrt(2.0 * kappa)

    def h(v: float) -> complex:
        q = v * v + 2.0 * kappa
        r = cmath.sqrt(q)
        val = cmath.exp(-s * v * v) / r
        if dy1 != 0.0:
            val *= cmath.cos(dy1 * v * r)
        return val

    vmax = math.sqrt(max(math.log(1.0 / (spec.abs_tol * 1e-2)), 1.0) / s) + 1.0
    core = integrate_interval(
        lambda v: (h(v) - h0) / (2.0 * (delta + v * v)), 0.0, vmax, spec
    ).value
    closed = h0 * cmath.atan(vmax / rt) / (2.0 * rt)
    return (alpha / math.pi) * cmath.exp(-kappa * s) * (complex(core) + closed)


def _phi_pform_complex(z: complex, alpha: float, s: float, dy1: float, spec: QuadSpec) -> complex:
    def f(p: float) -> complex:
        u = cmath.sqrt(p * p - z)
        val = cmath.exp(-u * s) / (u * (2.0 * u - alpha))
        if dy1 != 0.0:
            val *= math.cos(dy1 * p)
        return val

    env_pref = 4.0 / alpha

    def envelope(p: float) -> float:
        return env_pref * math.exp(-s * p) / (p * p)

    tail_spec = spec.with_(endpoint_transform=False, tail_envelope=envelope)
    val = integrate_halfline(f, tail_spec).value
    return (alpha / (2.0 * math.pi)) * complex(val)


def phi_kl(z: complex, k: int, l: int, model: ModelParams, spec: QuadSpec | None = None) -> complex:
    """Line-dressed coupling (Gamma_10 Gamma_00^{-1} Gamma_01)_{kl} at energy z.

    Symmetric in (k, l); real for real z below the threshold.  Raises
    PoleOnPathError when z sits in or numerically on the continuum
    [-alpha^2/4, oo), where the momentum denominator vanishes on the path.
    """
    spec = spec or QuadSpec()
    alpha = model.alpha
    _guard_continuum(z, alpha)
    s, dy1 = _pair_geometry(model, k, l)
    z = complex(z)

    if z.imag == 0.0 and z.real < model.threshold:
        kappa = math.sqrt(-z.real)
        return _phi_vform_real(kappa - 0.5 * alpha, alpha, s, dy1, spec)

    kappa = kappa_of(z)
    delta = kappa - 0.5 * alpha
    if delta.real > 1e-6 * alpha and abs(dy1) * abs(kappa.imag) < 20.0:
        return _phi_vform_complex(delta, alpha, s, dy1, spec)
    if delta.real <= 0.0 and abs(z.imag) < 1e-6 * alpha * alpha:
        raise PoleOnPathError(f"z={z} too close to the continuum for the momentum form")
    return _phi_pform_complex(z, alpha, s, dy1, spec)


def phi_diag_real(
    delta: float, a: float, alpha: float, spec: QuadSpec | None = None
) -> float:
    """On-axis diagonal coupling at kappa = alpha/2 + delta for a dot at height a.

    Taking the threshold offset delta directly (instead of kappa) avoids the
    cancellation kappa - alpha/2 for states exponentially close to the
    threshold.
    """
    if delta <= 0.0:
        raise PoleOnPathError(f"delta={delta}: physical-sheet coupling needs kappa > alpha/2")
    spec = spec or QuadSpec()
    return _phi_vform_real(delta, alpha, 2.0 * abs(a), 0.0, spec)


def _entries_at(
    z: complex,
    kappa: complex,
    deltas_phi,
    model: ModelParams,
    spec: QuadSpec,
    real_path: bool,
) -> np.ndarray:
    n = model.n
    dtype = float if real_path else complex
    mat = np.zeros((n, n), dtype=dtype)
    for k in range(n):
        diag = s_breve(kappa.real, model.betas[k]) if real_path else s_beta(z, model.betas[k])
        mat[k, k] = diag - deltas_phi(k, k)
        for l in range(k + 1, n):
            dist = math.dist(model.dots[k], model.dots[l])
            g = macdonald_k0(kappa * dist) * GREEN_NORMALIZATION
            val = -(g.real if real_path else g) - deltas_phi(k, l)
            mat[k, l] = val
            mat[l, k] = val
    return mat


def _finish(z: complex, mat: np.ndarray) -> DMatrix:
    if mat.size == 0:
        return DMatrix(z=complex(z), entries=mat, det=1.0, cond_estimate=1.0)
    det = np.linalg.det(mat)
    cond = float(np.linalg.cond(mat))
    return DMatrix(z=complex(z), entries=mat, det=complex(det), cond_estimate=cond)


def d_matrix(z: complex, model: ModelParams, spec: QuadSpec | None = None) -> DMatrix:
    """Reduced determinant matrix D(z) for z off [-alpha^2/4, oo)."""
    spec = spec or QuadSpec()
    if model.n == 0:
        return _finish(z, np.zeros((0, 0)))
    _guard_continuum(z, model.alpha)
    z = complex(z)
    real_path = z.imag == 0.0 and z.real < model.threshold
    kappa = complex(math.sqrt(-z.real)) if real_path else kappa_of(z)

    def phi_entry(k: int, l: int):
        val = phi_kl(z, k, l, model, spec)
        return val.real if real_path else val

    return _finish(z, _entries_at(z, kappa, phi_entry, model, spec, real_path))


def d_matrix_at_offset(delta: float, model: ModelParams, spec: QuadSpec | None = None) -> DMatrix:
    """D(-kappa^2) at kappa = alpha/2 + delta with the offset kept exact.

    This is the scan-friendly entry point: delta may be as small as 1e-12
    without losing the threshold pinch to rounding.
    """
    if delta <= 0.0:
        raise PoleOnPathError("physical-sheet scan needs delta > 0")
    spec = spec or QuadSpec()
    kappa = 0.5 * model.alpha + delta
    z = -kappa * kappa

    def phi_entry(k: int, l: int):
        s, dy1 = _pair_geometry(model, k, l)
        return _phi_vform_real(delta, model.alpha, s, dy1, spec)

    return _finish(z, _entries_at(z, complex(kappa), phi_entry, model, spec, True))
