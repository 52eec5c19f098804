"""Analytic continuation across the guided-channel interval and pole search.

The single-dot reduced determinant d(z) = s_beta(z) - phi(z) has the
integral form

    phi(z) = int_0^oo mu(z, t) / (t - z - alpha^2/4) dt,
    mu(z, t) = (alpha/16pi) (alpha + 2 sqrt(t-z)) e^{-2 a sqrt(t-z)}
               / (sqrt(t) sqrt(t-z)),

where sqrt(t-z) is principal (this is the determination continued from the
upper half plane; in the upper-half-plane notation it reads
(z-t)^{1/2} = i sqrt(t-z)).  mu(z, t) is analytic in z across the interval
(-alpha^2/4, 0); the only obstruction to continuing phi downward is the
pole of the energy denominator crossing the integration path.  Tracking
that pole gives the three determinations

    phi^+(z)      = the integral itself                      (Im z > 0),
    phi^0(lambda) = PV integral + i g~(lambda)               (on the interval),
    phi^-(z)      = the integral + 2 g(z)                    (Im z < 0),

with g(z) = (i alpha / 4) e^{-alpha a} / (z + alpha^2/4)^{1/2} and
g~ = -i g.  The relative sign of the g terms is fixed by requiring the
boundary values to match from both sides (edge-of-the-wedge); the
matching is enforced by the test suite.  Note the lower-sheet residue term
enters with +2g here: the half-residue already contained in the boundary
value plus one full residue picked up by the contour crossing.

Zeros of eta = s_beta - phi^{l(z)} in the lower region are the resonance
poles; for two mirror dots with couplings (beta, beta + b) the determinant
factorizes at b = 0 into (s_beta + G)(s_beta - G - 2 phi) with
G = K0(2 a kappa(z)) times the Green normalization, the embedded
antisymmetric level being the zero of the first factor.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .bound_spectrum import epsilon_beta, varsigma_beta
from .errors import BranchCutError, ConvergenceError, RegionError
from .operator_model import GREEN_NORMALIZATION, ModelParams
from .quadrature import QuadSpec, integrate_near_pole, integrate_pv
from .specfun import k0_prime, kappa_of, macdonald_k0, s_beta, s_breve, s_breve_prime

__all__ = [
    "SheetPoint",
    "OmegaMinus",
    "ResonancePole",
    "TwoPointLevels",
    "sheet_point",
    "mu_kernel",
    "mu0",
    "g_factor",
    "g_tilde",
    "phi_sheet",
    "eta",
    "eta_continued",
    "find_pole",
    "two_point_levels",
    "eta_hat2",
    "eta_hat2_continued",
    "find_pole2",
    "mu2_slope",
    "nu2_curvature",
    "trajectory_fits",
]

LABELS = ("+", "0", "-")


@dataclass(frozen=True)
class SheetPoint:
    """Complex energy plus the sheet label selecting the determination."""

    z: complex
    label: str

    def __post_init__(self) -> None:
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}")
        object.__setattr__(self, "z", complex(self.z))
        if self.label == "0" and self.z.imag != 0.0:
            raise ValueError("label '0' requires a real energy")
        if self.label == "-" and self.z.imag >= 0.0:
            raise ValueError("label '-' requires Im z < 0")
        if self.label == "+" and self.z.imag < 0.0:
            raise ValueError("label '+' requires Im z >= 0")


@dataclass(frozen=True)
class OmegaMinus:
    """Implemented second-sheet region: an open rectangle below the interval.

    Margins delta = 1e-3 alpha^2 horizontally and depth alpha^2/8; inside
    it Re z < 0, hence Re(2 a sqrt(-z)) > 0 and every K0 argument stays in
    the right half plane.
    """

    re_lo: float
    re_hi: float
    im_lo: float

    @classmethod
    def for_alpha(cls, alpha: float) -> "OmegaMinus":
        a2 = alpha * alpha
        return cls(re_lo=-0.25 * a2 + 1e-3 * a2, re_hi=-1e-3 * a2, im_lo=-a2 / 8.0)

    def contains(self, z: complex) -> bool:
        z = complex(z)
        return (self.re_lo < z.real < self.re_hi) and (self.im_lo < z.imag <= 0.0)


@dataclass(frozen=True)
class ResonancePole:
    """A located zero of the continued determinant, with solver diagnostics."""

    z: complex
    model: ModelParams
    b: float
    residual: float
    iterations: int


def sheet_point(z: complex, model: ModelParams) -> SheetPoint:
    """Classify an energy into its natural sheet label.

    Upper half plane and the real axis below the threshold are physical
    ('+'); the open interval (-alpha^2/4, 0) is the boundary label '0';
    the lower half plane is the continued region '-'.
    """
    z = complex(z)
    if z.imag > 0.0:
        return SheetPoint(z, "+")
    if z.imag < 0.0:
        return SheetPoint(z, "-")
    thr = model.threshold
    if z.real < thr:
        return SheetPoint(z, "+")
    if thr < z.real < 0.0:
        return SheetPoint(z, "0")
    raise BranchCutError(f"z={z} sits on a threshold or the cut [0, oo)")


def _single_dot(model: ModelParams) -> tuple[float, float]:
    return model.alpha, model.single_dot_height()


def mu_kernel(z: complex, t: float, model: ModelParams) -> complex:
    """Numerator kernel mu(z, t) of the energy-denominator representation."""
    if t <= 0.0:
        raise ValueError("mu_kernel needs t > 0; the t=0 endpoint is handled by quadrature")
    alpha, a = _single_dot(model)
    r = cmath.sqrt(t - z)
    return (
        (alpha / (16.0 * math.pi))
        * (alpha + 2.0 * r)
        * cmath.exp(-2.0 * a * r)
        / (math.sqrt(t) * r)
    )


def mu0(lam: float, t: float, model: ModelParams) -> float:
    """Boundary value of mu on the interval: real and positive for t > lam."""
    if t <= 0.0:
        raise ValueError("mu0 needs t > 0")
    alpha, a = _single_dot(model)
    s = math.sqrt(t - lam)
    return (
        (alpha / (16.0 * math.pi))
        * (alpha + 2.0 * s)
        * math.exp(-2.0 * a * s)
        / (math.sqrt(t) * s)
    )


def g_factor(z: complex, model: ModelParams) -> complex:
    """g(z) = (i alpha/4) e^{-alpha a} / (z + alpha^2/4)^{1/2}, principal root."""
    alpha, a = _single_dot(model)
    return 0.25j * alpha * math.exp(-alpha * a) / cmath.sqrt(z + 0.25 * alpha * alpha)


def g_tilde(lam: float, model: ModelParams) -> float:
    """Real form -i g(lambda) on the interval; strictly positive."""
    alpha, a = _single_dot(model)
    return 0.25 * alpha * math.exp(-alpha * a) / math.sqrt(lam + 0.25 * alpha * alpha)


def _validate(point: SheetPoint, model: ModelParams) -> None:
    z, label = point.z, point.label
    thr = model.threshold
    if label == "0":
        if not (thr < z.real < 0.0):
            raise RegionError(f"label '0' needs Re z in ({thr}, 0), got {z.real}")
    elif label == "+":
        if z.imag == 0.0 and z.real >= thr:
            raise RegionError(f"real z={z.real} with label '+' must lie below {thr}")
    else:
        if not OmegaMinus.for_alpha(model.alpha).contains(z):
            raise RegionError(f"z={z} outside the implemented second-sheet region")


def _mu_envelope(z: complex, model: ModelParams):
    def env(t: float) -> float:
        return 2.0 * abs(mu_kernel(z, t, model))

    return env


def phi_sheet(point: SheetPoint, model: ModelParams, spec: QuadSpec | None = None) -> complex:
    """The determination phi^{l(z)}(z) of the continued coupling."""
    spec = spec or QuadSpec()
    _validate(point, model)
    alpha, _ = _single_dot(model)
    z, label = point.z, point.label
    pole = z + 0.25 * alpha * alpha

    if label == "0":
        lam = z.real
        t_spec = spec.with_(
            endpoint_transform=True,
            tail_envelope=lambda t: 2.0 * mu0(lam, t, model),
        )
        pv = integrate_pv(lambda t: mu0(lam, t, model), pole.real, t_spec)
        return complex(pv.value, g_tilde(lam, model))

    t_spec = spec.with_(endpoint_transform=True, tail_envelope=_mu_envelope(z, model))
    value = integrate_near_pole(lambda t: mu_kernel(z, t, model), pole, t_spec).value
    if label == "-":
        value = value + 2.0 * g_factor(z, model)
    return complex(value)


def eta(point: SheetPoint, model: ModelParams, spec: QuadSpec | None = None) -> complex:
    """Continued single-dot determinant s_beta(z) - phi^{l(z)}(z)."""
    if model.n != 1:
        raise ValueError("eta is the single-dot determinant; model must have n=1")
    return s_beta(point.z, model.betas[0]) - phi_sheet(point, model, spec)


def eta_continued(z: complex, model: ModelParams, spec: QuadSpec | None = None) -> complex:
    """eta at z with the label inferred from the position of z."""
    return eta(sheet_point(z, model), model, spec)


def _secant_root(f, z0: complex, z1: complex, inside, residual_tol, max_iter: int):
    """Damped secant with a numerical-derivative fallback.

    Steps leaving the admissible region are halved; the iteration stops on
    the residual criterion.  Returns (root, residual, iterations).
    """
    f0, f1 = f(z0), f(z1)
    its = 2
    for _ in range(max_iter):
        if abs(f1) <= residual_tol(z1):
            return z1, abs(f1), its
        denom = f1 - f0
        if denom == 0:
            h = 1e-7 * max(1.0, abs(z1))
            denom = (f(z1 + h) - f(z1 - h)) / (2.0 * h)
            its += 2
            if denom == 0:
                raise ConvergenceError("flat determinant; cannot step")
            step = -f1 / denom
        else:
            step = -f1 * (z1 - z0) / denom
        cand = z1 + step
        halvings = 0
        while not inside(cand):
            step *= 0.5
            cand = z1 + step
            halvings += 1
            if halvings > 60:
                raise ConvergenceError(f"iterate escaped the region near {z1}")
        z0, f0 = z1, f1
        z1 = cand
        f1 = f(z1)
        its += 1
    if abs(f1) <= residual_tol(z1):
        return z1, abs(f1), its
    raise ConvergenceError(f"no convergence after {max_iter} secant steps (|f|={abs(f1):.2e})")


def _clamp_into(z: complex, omega: OmegaMinus) -> complex:
    re = min(max(z.real, omega.re_lo * 0.999 + omega.re_hi * 0.001), omega.re_hi * 0.999)
    im = min(max(z.imag, omega.im_lo * 0.5), 0.0)
    return complex(re, im)


def find_pole(
    model: ModelParams,
    initial_guess: complex | None = None,
    spec: QuadSpec | None = None,
    max_iter: int = 60,
) -> ResonancePole:
    """Second-sheet zero of eta for a single dot with an embedded level.

    Requires epsilon_beta in (-alpha^2/4, 0).  Starts from the embedded
    level (or the supplied guess), takes one Newton step with the analytic
    dominant derivative s_beta'(z) = 1/(4 pi z), then damped secant.
    """
    if model.n != 1:
        raise ValueError("find_pole requires a single-dot model")
    alpha = model.alpha
    beta = model.betas[0]
    eps_b = epsilon_beta(beta)
    if not (model.threshold < eps_b < 0.0):
        raise RegionError(
            f"epsilon_beta={eps_b} not inside ({model.threshold}, 0); no embedded level"
        )
    omega = OmegaMinus.for_alpha(alpha)

    def inside(z: complex) -> bool:
        return omega.contains(z) or (
            z.imag == 0.0 and omega.re_lo < z.real < omega.re_hi
        )

    def f(z: complex) -> complex:
        return eta_continued(z, model, spec)

    def residual_tol(z: complex) -> float:
        return 1e-10 * max(1.0, abs(s_beta(z, beta)))

    z0 = _clamp_into(complex(initial_guess) if initial_guess is not None else complex(eps_b), omega)
    step = -f(z0) * (4.0 * math.pi * z0)
    z1 = z0 + step
    halvings = 0
    while not inside(z1):
        step *= 0.5
        z1 = z0 + step
        halvings += 1
        if halvings > 60:
            raise ConvergenceError("Newton predictor escaped the region")

    root, res, its = _secant_root(f, z0, z1, inside, residual_tol, max_iter)
    if root.imag > 1e-12:
        raise ConvergenceError(f"pole drifted to the upper half plane: {root}")
    return ResonancePole(
        z=root,
        model=model,
        b=math.exp(-model.single_dot_height() * varsigma_beta(beta)),
        residual=res,
        iterations=its,
    )


@dataclass(frozen=True)
class TwoPointLevels:
    """Eigenvalues of two identical dots spaced by 2a, line absent."""

    eps1: float
    kappa1: float
    eps2: float | None
    kappa2: float | None
    has_two: bool


def _decoupled_root(a: float, beta: float, sign: float, green: float) -> float | None:
    """Root of s_breve(kappa) = sign * green * K0(2 a kappa), or None."""
    from scipy.optimize import brentq

    def h(k: float) -> float:
        return s_breve(k, beta) - sign * green * float(macdonald_k0(complex(2.0 * a * k)).real)

    lo = 1e-10
    if h(lo) >= 0.0:
        return None
    hi = 1.0
    for _ in range(200):
        if h(hi) > 0.0:
            break
        hi *= 2.0
    else:
        return None
    return float(brentq(h, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200))


def two_point_levels(a: float, beta: float, alpha: float | None = None) -> TwoPointLevels:
    """Decoupled two-dot levels from s_breve(kappa) = +-(1/2pi) K0(2 a kappa).

    The + branch (symmetric) always has one root; the - branch
    (antisymmetric, the larger level eps2) exists iff 2a > e^{2 pi beta}.
    The line strength does not enter.
    """
    del alpha
    g = GREEN_NORMALIZATION
    k1 = _decoupled_root(a, beta, +1.0, g)
    if k1 is None:
        raise ConvergenceError("symmetric decoupled level not bracketed")
    k2 = _decoupled_root(a, beta, -1.0, g)
    if k2 is None:
        return TwoPointLevels(eps1=-k1 * k1, kappa1=k1, eps2=None, kappa2=None, has_two=False)
    return TwoPointLevels(eps1=-k1 * k1, kappa1=k1, eps2=-k2 * k2, kappa2=k2, has_two=True)


def _green_factor(mode: str) -> float:
    if mode == "consistent":
        return GREEN_NORMALIZATION
    if mode == "paper-literal":
        return 1.0
    raise ValueError("mode must be 'consistent' or 'paper-literal'")


def _two_dot_model(alpha: float, a: float, beta: float, b: float) -> ModelParams:
    return ModelParams(alpha=alpha, dots=((0.0, a), (0.0, -a)), betas=(beta, beta + b))


def eta_hat2(
    b: float,
    point: SheetPoint,
    alpha: float,
    a: float,
    beta: float,
    spec: QuadSpec | None = None,
    mode: str = "consistent",
) -> complex:
    """Continued two-dot determinant for mirror dots with couplings (beta, beta+b).

    Computed in the factor-friendly form
    (s_beta - phi)(s_beta + b - phi) - (G + phi)^2 with
    G = c K0(2 a kappa(z)); c is 1/2pi in the 'consistent' mode (the Green
    normalization used everywhere else) and 1 in the 'paper-literal' mode.
    Expanding reproduces s_beta(s_beta+b) - G^2 - (2 s_beta + b) phi - 2 G phi.
    """
    c = _green_factor(mode)
    helper = ModelParams(alpha=alpha, dots=((0.0, a),), betas=(beta,))
    z = point.z
    sb = s_beta(z, beta)
    phi = phi_sheet(point, helper, spec)
    green = c * macdonald_k0(2.0 * a * kappa_of(z))
    return (sb - phi) * (sb + b - phi) - (green + phi) ** 2


def eta_hat2_continued(
    b: float,
    z: complex,
    alpha: float,
    a: float,
    beta: float,
    spec: QuadSpec | None = None,
    mode: str = "consistent",
) -> complex:
    helper = ModelParams(alpha=alpha, dots=((0.0, a),), betas=(beta,))
    return eta_hat2(b, sheet_point(z, helper), alpha, a, beta, spec, mode)


def _antisym_root(a: float, beta: float, mode: str) -> float | None:
    return _decoupled_root(a, beta, -1.0, _green_factor(mode))


def mu2_slope(alpha: float, a: float, beta: float, mode: str = "consistent") -> float:
    """Leading slope of the two-dot resonance position,
    kappa2 / (s_breve'(kappa2) + 2 a c K0'(2 a kappa2))."""
    c = _green_factor(mode)
    k2 = _antisym_root(a, beta, mode)
    if k2 is None:
        raise RegionError("no antisymmetric decoupled level for these parameters")
    denom = s_breve_prime(k2) + 2.0 * a * c * float(k0_prime(complex(2.0 * a * k2)).real)
    return k2 / denom


def nu2_curvature(
    alpha: float,
    a: float,
    beta: float,
    spec: QuadSpec | None = None,
    mode: str = "consistent",
) -> float:
    """Leading coefficient of the two-dot resonance width, nu2(b) ~ coeff * b^2.

    Second-order implicit differentiation of the determinant equation at
    (b, z) = (0, eps2) gives

        coeff = - kappa2 g~(eps2)
                / ( 4 (s_breve'(kappa2) + 2 a c K0'(2 a kappa2))
                    |s_breve(kappa2) - phi^0(eps2)|^2 ),

    negative whenever the denominator derivative sum is positive.
    """
    c = _green_factor(mode)
    k2 = _antisym_root(a, beta, mode)
    if k2 is None:
        raise RegionError("no antisymmetric decoupled level for these parameters")
    eps2 = -k2 * k2
    helper = ModelParams(alpha=alpha, dots=((0.0, a),), betas=(beta,))
    if not (helper.threshold < eps2 < 0.0):
        raise RegionError(f"eps2={eps2} is not embedded in ({helper.threshold}, 0)")
    phi0 = phi_sheet(SheetPoint(complex(eps2), "0"), helper, spec)
    w0 = s_breve(k2, beta) - phi0
    denom = s_breve_prime(k2) + 2.0 * a * c * float(k0_prime(complex(2.0 * a * k2)).real)
    return -k2 * g_tilde(eps2, helper) / (4.0 * denom * abs(w0) ** 2)


def find_pole2(
    b: float,
    alpha: float,
    a: float,
    beta: float,
    spec: QuadSpec | None = None,
    mode: str = "consistent",
    max_iter: int = 80,
) -> ResonancePole:
    """Second-sheet zero z2(b) of the two-dot determinant near the embedded level.

    At b = 0 the determinant factorizes and the zero sits exactly at the
    real antisymmetric level eps2; for b != 0 it moves like
    eps2 + mu2_slope * b + i nu2_curvature * b^2.
    """
    k2 = _antisym_root(a, beta, mode)
    if k2 is None:
        raise RegionError("parameters admit no antisymmetric level; nothing is embedded")
    eps2 = -k2 * k2
    thr = -0.25 * alpha * alpha
    if not (thr < eps2 < 0.0):
        raise RegionError(f"eps2={eps2} not inside ({thr}, 0); level is not embedded")
    omega = OmegaMinus.for_alpha(alpha)

    def inside(z: complex) -> bool:
        return omega.contains(z) or (z.imag == 0.0 and omega.re_lo < z.real < omega.re_hi)

    def f(z: complex) -> complex:
        return eta_hat2_continued(b, z, alpha, a, beta, spec, mode)

    scale = abs(s_breve(k2, beta)) + abs(s_breve_prime(k2))

    def residual_tol(z: complex) -> float:
        return 1e-12 * max(1.0, scale * scale)

    slope = mu2_slope(alpha, a, beta, mode)
    z0 = _clamp_into(complex(eps2 + slope * b, 0.0), omega)
    h = 1e-6 * alpha * alpha
    fz0 = f(z0)
    df = (f(z0 + h) - f(z0 - h)) / (2.0 * h)
    if df == 0:
        raise ConvergenceError("flat two-dot determinant at the predictor")
    step = -fz0 / df
    z1 = z0 + step
    halvings = 0
    while not inside(z1):
        step *= 0.5
        z1 = z0 + step
        halvings += 1
        if halvings > 60:
            raise ConvergenceError("two-dot predictor escaped the region")

    root, res, its = _secant_root(f, z0, z1, inside, residual_tol, max_iter)
    if root.imag > 1e-12:
        raise ConvergenceError(f"two-dot pole drifted to the upper half plane: {root}")
    return ResonancePole(
        z=root,
        model=_two_dot_model(alpha, a, beta, b),
        b=b,
        residual=res,
        iterations=its,
    )


def trajectory_fits(poles: list[ResonancePole], eps_beta: float) -> dict:
    """Log-log slope of |nu| vs b and the linear bound constant for mu.

    Returns {'nu_slope': fitted slope of log|nu| against log b,
    'mu_over_b_max': max_k |mu_k - eps_beta| / b_k}.
    """
    bs = np.array([p.b for p in poles])
    nus = np.array([abs(p.z.imag) for p in poles])
    mus = np.array([p.z.real for p in poles])
    if np.any(nus <= 0.0) or len(poles) < 2:
        raise ValueError("trajectory fit needs at least two poles with nonzero width")
    slope = float(np.polyfit(np.log(bs), np.log(nus), 1)[0])
    c_mu = float(np.max(np.abs(mus - eps_beta) / bs))
    return {"nu_slope": slope, "mu_over_b_max": c_mu}
