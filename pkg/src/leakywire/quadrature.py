"""Adaptive integration on the half-line and Cauchy principal values.

Two hard cases drive the design:

* integrands with a t^{-1/2} endpoint singularity and an exponentially
  decaying tail (all the dressed-coupling integrals have this shape), and
* a simple pole on or near the real path, handled by singularity
  subtraction: the smooth numerator is expanded at the pole, the pole term
  is integrated in closed form, and only bounded remainders are sent to
  the adaptive engine.

The adaptive engine underneath is QUADPACK (scipy.integrate.quad); this
module owns the endpoint transform t = u^2, the envelope-based tail
truncation and the subtraction algebra.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from scipy.integrate import quad as _scipy_quad

from .errors import PoleAtEndpointError, QuadratureConvergenceError

__all__ = [
    "QuadSpec",
    "QuadResult",
    "integrate_interval",
    "integrate_halfline",
    "integrate_pv",
    "integrate_near_pole",
    "halfline_cutoff",
    "sqrt_exp_envelope",
]

_INF = math.inf


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and transforms for the adaptive integrators.

    Attributes
    ----------
    abs_tol, rel_tol : float
        Target absolute / relative accuracy of each integral.
    max_subdivisions : int
        QUADPACK subdivision budget per piece.
    endpoint_transform : bool
        Apply t = u^2 at the lower endpoint; removes a t^{-1/2}
        singularity exactly.
    tail_envelope : callable or None
        Decreasing bound g(t) >= |f(t)| valid for large t.  When given,
        the half-line is truncated where g drops below abs_tol/10 and the
        truncation is verified by one extra panel; when None the infinite
        range is handed to QUADPACK directly.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    endpoint_transform: bool = False
    tail_envelope: Callable[[float], float] | None = None

    def __post_init__(self) -> None:
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def with_(self, **kw) -> "QuadSpec":
        from dataclasses import replace

        return replace(self, **kw)


class QuadResult(NamedTuple):
    value: complex
    error: float


def sqrt_exp_envelope(rate: float, prefactor: float = 1.0) -> Callable[[float], float]:
    """Envelope C * exp(-rate*sqrt(t)) / sqrt(t), the generic tail bound of
    the dressed-coupling integrands (rate = twice the line-dot distance)."""

    def env(t: float) -> float:
        return prefactor * math.exp(-rate * math.sqrt(t)) / math.sqrt(t)

    return env


def halfline_cutoff(envelope: Callable[[float], float], tol: float, start: float = 1.0) -> float:
    """Smallest power-of-two multiple of `start` where the envelope is below tol."""
    t = start
    for _ in range(200):
        if envelope(t) < tol:
            return t
        t *= 2.0
    raise QuadratureConvergenceError("tail envelope never drops below tolerance")


def _tolerances(spec: QuadSpec, value: complex) -> float:
    return max(spec.abs_tol, spec.rel_tol * abs(value))


def _quad_real(f, a, b, spec: QuadSpec) -> tuple[float, float, bool]:
    out = _scipy_quad(
        f, a, b,
        epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions, full_output=1,
    )
    flagged = len(out) > 3
    return out[0], out[1], flagged


def _quad_piece(f, a, b, spec: QuadSpec) -> QuadResult:
    """Adaptive integral of a real- or complex-valued callable on (a, b).

    Raises QuadratureConvergenceError only when QUADPACK both flags the
    piece and its error estimate is well above the requested tolerance;
    benign roundoff flags with a good estimate are accepted.
    """
    probe_at = a + 1.0 if math.isinf(b) else 0.5 * (a + b)
    probe = f(probe_at)
    if isinstance(probe, complex):
        re, re_err, re_flag = _quad_real(lambda t: f(t).real, a, b, spec)
        im, im_err, im_flag = _quad_real(lambda t: f(t).imag, a, b, spec)
        value: complex = complex(re, im)
        err = math.hypot(re_err, im_err)
        flagged = re_flag or im_flag
    else:
        value, err, flagged = _quad_real(f, a, b, spec)
    if flagged and err > 50.0 * _tolerances(spec, value):
        raise QuadratureConvergenceError(
            f"subdivision budget exhausted on ({a}, {b}); error estimate {err:.3e}"
        )
    return QuadResult(value, err)


def _add(*results: QuadResult) -> QuadResult:
    total = sum((r.value for r in results), 0.0)
    err = sum(r.error for r in results)
    if all(not isinstance(r.value, complex) for r in results):
        return QuadResult(total, err)
    return QuadResult(complex(total), err)


def integrate_interval(f, a: float, b: float, spec: QuadSpec | None = None) -> QuadResult:
    """Adaptive integral of a smooth integrand on a finite interval."""
    return _quad_piece(f, a, b, spec or QuadSpec())


def _lower_piece(f, lo: float, hi: float, spec: QuadSpec) -> QuadResult:
    """Integral of f on (lo, hi) with the u^2 transform when requested."""
    if hi <= lo:
        return QuadResult(0.0, 0.0)
    if not spec.endpoint_transform:
        return _quad_piece(f, lo, hi, spec)
    rlo, rhi = math.sqrt(lo), math.sqrt(hi)
    return _quad_piece(lambda u: f(u * u) * (2.0 * u), rlo, rhi, spec)


def integrate_halfline(f, spec: QuadSpec | None = None, lower: float = 0.0) -> QuadResult:
    """Integral of f over (lower, oo).

    The integrand may behave like t^{-1/2} at the lower endpoint (enable
    spec.endpoint_transform) and must decay at infinity.  With a tail
    envelope the range is truncated where the envelope falls below
    abs_tol/10 and the discarded tail is checked by one verification
    panel; the panel value is included in the result.
    """
    spec = spec or QuadSpec()
    if spec.tail_envelope is None:
        split = lower + 1.0
        head = _lower_piece(f, lower, split, spec)
        tail = _quad_piece(f, split, _INF, spec)
        return _add(head, tail)

    cut = halfline_cutoff(spec.tail_envelope, spec.abs_tol / 10.0, start=max(1.0, lower + 1.0))
    split = min(lower + 1.0, cut)
    head = _lower_piece(f, lower, split, spec)
    mid = _quad_piece(f, split, cut, spec) if cut > split else QuadResult(0.0, 0.0)
    # verification panel: push the envelope three more decades
    cut2 = halfline_cutoff(spec.tail_envelope, spec.abs_tol / 1e4, start=cut)
    panel = _quad_piece(f, cut, cut2, spec) if cut2 > cut else QuadResult(0.0, 0.0)
    if abs(panel.value) > 10.0 * spec.abs_tol:
        raise QuadratureConvergenceError(
            f"tail truncation unsafe: verification panel {abs(panel.value):.3e}"
        )
    return _add(head, mid, panel)


def _pv_window(f, t0: float, w: float, spec: QuadSpec) -> QuadResult:
    """Folded subtraction window: int_0^w (f(t0+s) - f(t0-s))/s ds.

    This equals the principal value of f(t)/(t-t0) over (t0-w, t0+w); the
    integrand extends continuously to 2 f'(t0) at s = 0, so no pole is
    ever seen by the adaptive engine.
    """

    def g(s: float):
        if s == 0.0:
            h = 1e-7 * w
            return (f(t0 + h) - f(t0 - h)) / h
        return (f(t0 + s) - f(t0 - s)) / s

    return _quad_piece(g, 0.0, w, spec)


def _bridge_piece(g, lo: float, hi: float, spec: QuadSpec) -> QuadResult:
    """Integral of g on (lo, hi), 0 < lo < hi, robust to wide decade spans.

    Power-law stretches (left behind by a pole window sitting close to the
    origin) are flattened by the substitution t = e^s.
    """
    if hi <= lo:
        return QuadResult(0.0, 0.0)
    if hi / lo < 8.0:
        return _quad_piece(g, lo, hi, spec)
    return _quad_piece(lambda s: g(math.exp(s)) * math.exp(s), math.log(lo), math.log(hi), spec)


def integrate_pv(
    f,
    t0: float,
    spec: QuadSpec | None = None,
    lower: float = 0.0,
    upper: float = _INF,
) -> QuadResult:
    """Cauchy principal value of f(t)/(t - t0) over (lower, upper).

    `f` is the smooth numerator; the simple pole at t0 must lie strictly
    inside the interval.  Uses singularity subtraction on a symmetric
    window of half-width min((t0-lower)/2, (upper-t0)/2, 1), where the
    pole term integrates to zero by symmetry, plus ordinary adaptive
    integration outside the window.
    """
    spec = spec or QuadSpec()
    if not (t0 > lower):
        raise PoleAtEndpointError(f"pole t0={t0} not inside ({lower}, {upper})")
    if not (t0 < upper):
        raise PoleAtEndpointError(f"pole t0={t0} not inside ({lower}, {upper})")

    w = min((t0 - lower) / 2.0, 1.0)
    if math.isfinite(upper):
        w = min(w, (upper - t0) / 2.0)

    window = _pv_window(f, t0, w, spec)
    g = lambda t: f(t) / (t - t0)
    left = _lower_piece(g, lower, t0 - w, spec)

    if math.isfinite(upper):
        right = _bridge_piece(g, t0 + w, upper, spec)
        return _add(window, left, right)

    cap = max(1.0, 8.0 * (t0 + w))
    bridge = _bridge_piece(g, t0 + w, cap, spec)
    if spec.tail_envelope is not None:
        env = spec.tail_envelope
        right_spec = spec.with_(
            endpoint_transform=False,
            tail_envelope=lambda t: env(t) / max(t - t0, cap - t0),
        )
    else:
        right_spec = spec.with_(endpoint_transform=False)
    right = integrate_halfline(g, right_spec, lower=cap)
    return _add(window, left, bridge, right)


def integrate_near_pole(
    f,
    t0: complex,
    spec: QuadSpec | None = None,
    lower: float = 0.0,
) -> QuadResult:
    """Integral of f(t)/(t - t0) over (lower, oo) for a pole off the path.

    For Re t0 inside the range and Im t0 != 0 the subtraction scheme of
    integrate_pv is reused with the pole term integrated exactly,

        int_W f(c)/(t - t0) dt = f(c) [Log(c+w-t0) - Log(c-w-t0)],

    which stays accurate uniformly as Im t0 -> 0 (the boundary-value
    limit of the physical-sheet integral).  For Re t0 <= lower no
    subtraction is needed.
    """
    spec = spec or QuadSpec()
    t0 = complex(t0)
    c, gamma = t0.real, t0.imag

    if c <= lower:
        if gamma == 0.0 and c >= lower:
            raise PoleAtEndpointError(f"real pole at endpoint t0={t0}")
        if spec.tail_envelope is not None:
            env = spec.tail_envelope
            spec = spec.with_(tail_envelope=lambda t: env(t) / max(abs(t - c), 1.0))
        return integrate_halfline(lambda t: f(t) / (t - t0), spec, lower=lower)

    if gamma == 0.0:
        raise PoleAtEndpointError(
            "pole on the real path; use integrate_pv for principal values"
        )

    w = min((c - lower) / 2.0, 1.0)
    fc = f(c)
    log_term = fc * (cmath.log(complex(w, -gamma)) - cmath.log(complex(-w, -gamma)))
    g = lambda t: f(t) / (t - t0)
    window = _quad_piece(lambda t: (f(t) - fc) / (t - t0), c - w, c + w, spec)
    left = _lower_piece(g, lower, c - w, spec)

    cap = max(1.0, 8.0 * (c + w))
    bridge = _bridge_piece(g, c + w, cap, spec)
    if spec.tail_envelope is not None:
        env = spec.tail_envelope
        right_spec = spec.with_(
            endpoint_transform=False,
            tail_envelope=lambda t: env(t) / max(abs(t - c), cap - c),
        )
    else:
        right_spec = spec.with_(endpoint_transform=False)
    right = integrate_halfline(g, right_spec, lower=cap)

    total = _add(window, left, bridge, right)
    return QuadResult(complex(total.value) + log_term, total.error)
