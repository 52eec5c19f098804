"""Discrete spectrum below the guided-channel threshold -alpha^2/4.

Bound states are the zeros of det D(-kappa^2) for kappa > alpha/2.  The
search runs in the threshold offset delta = kappa - alpha/2 (logarithmic
grid), counting sign changes of the sorted eigenvalue branches of the real
symmetric matrix; this catches clusters of exponentially close roots that a
bare determinant scan would miss, and root polishing in the offset variable
keeps residuals meaningful for states within 1e-9 of the threshold.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, EvaluationAtSingularityError
from .operator_model import ModelParams, d_matrix_at_offset, phi_diag_real
from .quadrature import QuadSpec, integrate_halfline
from .specfun import PSI1, macdonald_k0, s_breve

__all__ = [
    "BoundState",
    "epsilon_beta",
    "varsigma_beta",
    "gamma_scalar",
    "kappa_single",
    "kappa_max",
    "find_bound_states",
    "eigenfunction_value",
    "eigenfunction_grid",
]

_SCAN_POINTS = 400
_DELTA_FLOOR = 1e-12


@dataclass(frozen=True)
class BoundState:
    """Isolated eigenvalue -kappa^2 with the kernel vector of D."""

    energy: float
    kappa: float
    null_vector: np.ndarray
    solver_residual: float


def epsilon_beta(beta: float) -> float:
    """Single-dot eigenvalue without the line: -4 exp(2(-2 pi beta + psi(1)))."""
    return -4.0 * math.exp(2.0 * (-2.0 * math.pi * beta + PSI1))


def varsigma_beta(beta: float) -> float:
    """Decay rate of the dot-only state, sqrt(-epsilon_beta)."""
    return 2.0 * math.exp(PSI1 - 2.0 * math.pi * beta)


def kappa_max(model: ModelParams) -> float:
    """Scan ceiling: twice the largest decoupled-dot rate plus alpha."""
    return 2.0 * max(varsigma_beta(b) for b in model.betas) + model.alpha


def gamma_scalar(
    kappa: float, model: ModelParams, spec: QuadSpec | None = None
) -> float:
    """Single-dot reduced determinant s_beta(kappa) - phi_a(kappa), kappa > alpha/2."""
    a = model.single_dot_height()
    delta = kappa - 0.5 * model.alpha
    return s_breve(kappa, model.betas[0]) - phi_diag_real(delta, a, model.alpha, spec)


def _gamma_at_offset(delta: float, model: ModelParams, spec: QuadSpec | None) -> float:
    a = model.single_dot_height()
    kappa = 0.5 * model.alpha + delta
    return s_breve(kappa, model.betas[0]) - phi_diag_real(delta, a, model.alpha, spec)


def kappa_single(model: ModelParams, spec: QuadSpec | None = None) -> BoundState:
    """The unique bound state of a single-dot model.

    The scalar gamma(kappa) is continuous, strictly increasing, and runs
    from -oo at the threshold to +oo, so a bracketed solve cannot fail; the
    root is polished in x = sqrt(kappa - alpha/2) to keep the residual at
    the 1e-10 scale even when the state hugs the threshold.
    """
    if model.n != 1:
        raise ValueError("kappa_single requires a single-dot model")
    alpha = model.alpha

    def f(x: float) -> float:
        return _gamma_at_offset(x * x, model, spec)

    x_lo = 1e-9 * max(1.0, math.sqrt(alpha))
    while f(x_lo) >= 0.0:
        x_lo *= 0.25
        if x_lo < 1e-150:
            raise ConvergenceError("no sign change above the threshold")
    x_hi = math.sqrt(max(kappa_max(model) - 0.5 * alpha, 1.0))
    for _ in range(60):
        if f(x_hi) > 0.0:
            break
        x_hi *= 2.0
    else:
        raise ConvergenceError("bracket expansion failed for gamma(kappa)")

    x_root = brentq(f, x_lo, x_hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    delta = x_root * x_root
    kappa = 0.5 * alpha + delta
    return BoundState(
        energy=-(kappa * kappa),
        kappa=kappa,
        null_vector=np.array([1.0]),
        solver_residual=abs(f(x_root)),
    )


def _eigvals(delta: float, model: ModelParams, spec: QuadSpec | None) -> np.ndarray:
    dm = d_matrix_at_offset(delta, model, spec)
    return np.linalg.eigvalsh(dm.entries)


def _polish_branch(
    ta: float, tb: float, j: int, model: ModelParams, spec: QuadSpec | None
) -> BoundState | None:
    """Brentq on the j-th sorted eigenvalue branch over log-offset (ta, tb)."""

    def f(t: float) -> float:
        return float(_eigvals(math.exp(t), model, spec)[j])

    fa, fb = f(ta), f(tb)
    if fa == 0.0:
        t_root = ta
    elif fb == 0.0:
        t_root = tb
    elif fa * fb > 0.0:
        warnings.warn(f"eigenvalue branch {j} lost its sign change; skipping")
        return None
    else:
        t_root = brentq(f, ta, tb, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    delta = math.exp(t_root)
    dm = d_matrix_at_offset(delta, model, spec)
    vals, vecs = np.linalg.eigh(dm.entries)
    kappa = 0.5 * model.alpha + delta
    return BoundState(
        energy=-(kappa * kappa),
        kappa=kappa,
        null_vector=vecs[:, j].copy(),
        solver_residual=abs(float(vals[j])),
    )


def find_bound_states(
    model: ModelParams,
    spec: QuadSpec | None = None,
    grid_points: int = _SCAN_POINTS,
) -> list[BoundState]:
    """All isolated eigenvalues below -alpha^2/4, sorted by energy.

    Scans a logarithmic grid in the threshold offset, counts negative
    eigenvalues of D at each node, isolates every change by bisection and
    polishes each crossing branch.  The count N is expected to satisfy
    1 <= N <= n; violations are reported as warnings, not failures.
    """
    if model.n == 0:
        return []
    alpha = model.alpha
    d_hi = kappa_max(model) - 0.5 * alpha
    d_lo = _DELTA_FLOOR * max(alpha, 1.0)
    for _ in range(3):
        t_grid = np.linspace(math.log(d_lo), math.log(d_hi), grid_points)
        negs = [int(np.sum(_eigvals(math.exp(t), model, spec) < 0.0)) for t in t_grid]
        if negs[-1] == 0:
            break
        d_hi *= 2.0
        warnings.warn("negative eigenvalue at the scan ceiling; extending kappa_max")

    # no root should sit in the top 10% of the kappa range (linear scale)
    tail_negs = [n_ for t, n_ in zip(t_grid, negs) if math.exp(t) > 0.9 * d_hi]
    if len(tail_negs) > 1 and any(v != tail_negs[0] for v in tail_negs):
        warnings.warn("sign change in the last 10% of the scan; kappa_max may be low")

    crossings: list[tuple[float, float, int]] = []

    def isolate(ta: float, tb: float, na: int, nb: int, depth: int) -> None:
        if na == nb:
            return
        if abs(na - nb) == 1 or depth > 48:
            lo, hi = (nb, na) if na > nb else (na, nb)
            for j in range(lo, hi):
                crossings.append((ta, tb, j))
            if na < nb:
                warnings.warn("non-monotone eigenvalue branch in the scan")
            return
        tm = 0.5 * (ta + tb)
        nm = int(np.sum(_eigvals(math.exp(tm), model, spec) < 0.0))
        isolate(ta, tm, na, nm, depth + 1)
        isolate(tm, tb, nm, nb, depth + 1)

    for i in range(len(t_grid) - 1):
        isolate(float(t_grid[i]), float(t_grid[i + 1]), negs[i], negs[i + 1], 0)

    states = [
        st
        for (ta, tb, j) in crossings
        if (st := _polish_branch(ta, tb, j, model, spec)) is not None
    ]
    states.sort(key=lambda s: s.energy)
    if not 1 <= len(states) <= model.n:
        warnings.warn(
            f"found N={len(states)} states for n={model.n}; outside the expected 1..n"
        )
    return states


def _eigenfunction_raw(
    x1: float, x2: float, kappa: float, a: float, alpha: float, spec: QuadSpec
) -> float:
    r = math.hypot(x1, x2 - a)
    if r < 1e-300:
        raise EvaluationAtSingularityError("eigenfunction has a log singularity at the dot")
    value = float(macdonald_k0(complex(kappa * r)).real)

    depth = a + abs(x2)

    def f(p: float) -> float:
        u = math.sqrt(p * p + kappa * kappa)
        val = math.exp(-u * depth) / (u * (2.0 * u - alpha))
        return val * math.cos(p * x1) if x1 != 0.0 else val

    env_pref = 4.0 / alpha

    def envelope(p: float) -> float:
        return env_pref * math.exp(-depth * p) / (p * p)

    guided = integrate_halfline(f, spec.with_(endpoint_transform=False, tail_envelope=envelope))
    return value + 2.0 * math.pi * alpha * float(guided.value)


def _single_dot_frame(model: ModelParams) -> tuple[float, float, float]:
    (y1, y2), = model.dots
    return y1, math.copysign(1.0, y2), abs(y2)


def eigenfunction_value(
    x: tuple[float, float],
    state: BoundState,
    model: ModelParams,
    spec: QuadSpec | None = None,
) -> float:
    """Bound-state eigenfunction at a point, for the single-dot model.

    The 2D Fourier representation reduces analytically: the point part is
    K0(kappa |x-y|), the line-guided part a 1D momentum integral with
    kernel 2 pi alpha e^{-sqrt(p^2+kappa^2)(|x2|+a)} cos(p x1)
    / (sqrt(p^2+kappa^2)(2 sqrt(p^2+kappa^2)-alpha)).  The free overall
    constant is fixed by requiring psi = 1 at the midpoint between the
    line and the dot, which makes psi real and positive there.
    """
    spec = spec or QuadSpec()
    y1, sgn, a = _single_dot_frame(model)
    x1s, x2s = x[0] - y1, sgn * x[1]
    raw = _eigenfunction_raw(x1s, x2s, state.kappa, a, model.alpha, spec)
    norm = _eigenfunction_raw(0.0, 0.5 * a, state.kappa, a, model.alpha, spec)
    return raw / norm


def eigenfunction_grid(
    x1_values,
    x2_values,
    state: BoundState,
    model: ModelParams,
    spec: QuadSpec | None = None,
) -> np.ndarray:
    """Eigenfunction sampled on the tensor grid, normalization computed once.

    Grid points landing exactly on the dot (where the true value diverges
    logarithmically) are returned as NaN.
    """
    spec = spec or QuadSpec()
    y1, sgn, a = _single_dot_frame(model)
    norm = _eigenfunction_raw(0.0, 0.5 * a, state.kappa, a, model.alpha, spec)
    out = np.empty((len(x1_values), len(x2_values)))
    for i, x1 in enumerate(x1_values):
        for j, x2 in enumerate(x2_values):
            try:
                out[i, j] = (
                    _eigenfunction_raw(x1 - y1, sgn * x2, state.kappa, a, model.alpha, spec)
                    / norm
                )
            except EvaluationAtSingularityError:
                out[i, j] = math.nan
    return out
