"""On-shell scattering in the guided channel of the line.

For energies lambda in (-alpha^2/4, 0) the transverse mode
e^{-alpha |x2|/2} is the only open channel, so the S-matrix is 1x1 and is
fully described by the reflection amplitude

    R(lambda) = T(lambda) - 1 = g(lambda) / eta(lambda),

with g the same closed-form factor that drives the continuation and eta
evaluated on the boundary label.  Writing eta = x - i g~ with real x shows
|R + 1/2| = 1/2 identically (the unitarity circle), and the analytic
continuation of R into the lower region has its pole exactly at the zero
of eta, i.e. at the resonance.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ThresholdError
from .operator_model import ModelParams
from .quadrature import QuadSpec
from .resonance import (
    OmegaMinus,
    ResonancePole,
    _clamp_into,
    _secant_root,
    eta,
    eta_continued,
    g_factor,
    sheet_point,
)

__all__ = [
    "ScatteringPoint",
    "amplitudes",
    "lambda_grid",
    "guided_wave",
    "continued_reflection",
    "find_amplitude_pole",
]

# relative endpoint margin for lambda grids, in units of alpha^2
GRID_MARGIN = 1e-6


@dataclass(frozen=True)
class ScatteringPoint:
    lam: float
    momentum: float
    R: complex
    T: complex


def _check_open_channel(lam: float, model: ModelParams) -> None:
    if not (model.threshold < lam < 0.0):
        raise ThresholdError(
            f"lambda={lam} outside the open guided channel ({model.threshold}, 0)"
        )


def _require_on_axis_dot(model: ModelParams) -> None:
    if model.n != 1:
        raise ValueError("amplitudes are implemented for a single dot")
    if model.dots[0][0] != 0.0:
        raise ValueError("amplitudes assume the dot at (0, a); translate the model first")


def amplitudes(lam: float, model: ModelParams, spec: QuadSpec | None = None) -> ScatteringPoint:
    """Reflection and transmission amplitudes at energy lambda in the channel."""
    _require_on_axis_dot(model)
    _check_open_channel(lam, model)
    point = sheet_point(complex(lam), model)
    r = g_factor(complex(lam), model) / eta(point, model, spec)
    return ScatteringPoint(
        lam=lam,
        momentum=math.sqrt(lam + 0.25 * model.alpha * model.alpha),
        R=r,
        T=1.0 + r,
    )


def lambda_grid(model: ModelParams, n: int) -> np.ndarray:
    """Uniform energy grid over the channel, endpoints avoided by the
    relative margin 1e-6 alpha^2."""
    m = GRID_MARGIN * model.alpha * model.alpha
    return np.linspace(model.threshold + m, -m, n)


def guided_wave(
    x: tuple[float, float],
    lam: float,
    model: ModelParams,
    spec: QuadSpec | None = None,
) -> complex:
    """Two-term asymptotic form of the generalized eigenfunction.

    psi(x) = [e^{i k x1} + R e^{i k |x1|}] e^{-alpha |x2|/2} with
    k = (lambda + alpha^2/4)^{1/2}; valid for |x1| beyond the crossover
    max(2a, 4/k), inside which an accuracy warning is emitted.
    """
    _require_on_axis_dot(model)
    _check_open_channel(lam, model)
    pt = amplitudes(lam, model, spec)
    k = pt.momentum
    a = model.single_dot_height()
    x1, x2 = x
    if abs(x1) < max(2.0 * a, 4.0 / k):
        warnings.warn("guided_wave evaluated inside the near zone; asymptotics degrade")
    transverse = math.exp(-0.5 * model.alpha * abs(x2))
    return (cmath.exp(1j * k * x1) + pt.R * cmath.exp(1j * k * abs(x1))) * transverse


def continued_reflection(z: complex, model: ModelParams, spec: QuadSpec | None = None) -> complex:
    """Analytic continuation of the reflection amplitude, g(z)/eta^{l(z)}(z)."""
    _require_on_axis_dot(model)
    return g_factor(complex(z), model) / eta_continued(z, model, spec)


def find_amplitude_pole(
    model: ModelParams,
    spec: QuadSpec | None = None,
    scan_points: int = 41,
    max_iter: int = 60,
) -> ResonancePole:
    """Pole of the continued amplitude, located through the amplitude itself.

    On the channel R = i g~/(x - i g~) with real x, so Re(g/R) = x changes
    sign exactly where the resonance crosses; the search starts from that
    crossing and drives 1/R to zero in the lower region.  The starting
    point is derived purely from sampled amplitudes, independent of the
    determinant-based pole search.
    """
    _require_on_axis_dot(model)
    grid = lambda_grid(model, scan_points)
    xs = [
        (g_factor(complex(l), model) / amplitudes(l, model, spec).R).real for l in grid
    ]
    crossing = [i for i in range(len(xs) - 1) if xs[i] == 0.0 or xs[i] * xs[i + 1] < 0.0]
    if not crossing:
        raise ThresholdError("no resonance crossing of Re(g/R) found on the channel")
    i0 = crossing[0]
    lam0 = float(0.5 * (grid[i0] + grid[i0 + 1]))

    omega = OmegaMinus.for_alpha(model.alpha)

    def inside(z: complex) -> bool:
        return omega.contains(z) or (z.imag == 0.0 and omega.re_lo < z.real < omega.re_hi)

    def f(z: complex) -> complex:
        return 1.0 / continued_reflection(z, model, spec)

    def residual_tol(z: complex) -> float:
        return 1e-10 / max(abs(g_factor(z, model)), 1e-30)

    z0 = _clamp_into(complex(lam0), omega)
    z1 = _clamp_into(z0 + complex(0.0, -1e-4 * model.alpha * model.alpha), omega)
    root, res, its = _secant_root(f, z0, z1, inside, residual_tol, max_iter)
    from .bound_spectrum import varsigma_beta

    return ResonancePole(
        z=root,
        model=model,
        b=math.exp(-model.single_dot_height() * varsigma_beta(model.betas[0])),
        residual=res * abs(g_factor(root, model)),
        iterations=its,
    )
