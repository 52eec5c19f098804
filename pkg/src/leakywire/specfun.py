"""Branch-consistent elementary building blocks.

Everything downstream (Green kernels, determinants, continuations) relies on
one square-root convention: the energy plane carries a cut along the
nonnegative real axis, and for z = r e^{i theta} with theta in (0, 2pi)

    sqrt_cut(z) = sqrt(r) e^{i theta / 2},        Im sqrt_cut(z) > 0.

The decay rate entering every kernel is kappa(z) = -i sqrt_cut(z), which has
Re kappa(z) >= 0 and reduces to kappa for z = -kappa^2.  The Macdonald
function K0 and its derivative are evaluated for Re w > 0 only; that covers
every use in this package.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.special import kv

from .errors import BranchCutError, DomainError

__all__ = [
    "PSI1",
    "BRANCH",
    "BranchConvention",
    "sqrt_cut",
    "kappa_of",
    "macdonald_k0",
    "k0_prime",
    "s_value",
    "s_beta",
    "s_breve",
    "s_breve_prime",
]

# digamma(1) = -Euler-Mascheroni, stored to full double precision
PSI1 = -0.57721566490153286


@dataclass(frozen=True)
class BranchConvention:
    """Documentation-level record of the square-root branch in use."""

    cut: str = "nonnegative real axis [0, oo)"
    determination: str = "z = r e^{i theta}, theta in (0, 2pi) -> sqrt(r) e^{i theta/2}"
    half_plane: str = "values in the open upper half plane"


BRANCH = BranchConvention()


def sqrt_cut(z: complex) -> complex:
    """Square root with the cut on [0, oo) and values in the upper half plane.

    Satisfies sqrt_cut(z)**2 == z and sqrt_cut(-kappa**2) == 1j*kappa for
    kappa > 0.  Raises BranchCutError for z on the cut; sheet-aware callers
    must not land there.
    """
    z = complex(z)
    if z.imag == 0.0:
        if z.real >= 0.0:
            raise BranchCutError(f"sqrt_cut: z={z} lies on the cut [0, oo)")
        # negative real axis: continuous limit from either side
        return complex(0.0, math.sqrt(-z.real))
    w = cmath.sqrt(z)
    return w if w.imag > 0.0 else -w


def kappa_of(z: complex) -> complex:
    """Decay rate kappa(z) = -i*sqrt_cut(z), the '√-z' of the Green kernels.

    Re kappa(z) >= 0, so exp(-kappa(z)*distance) decays on the physical
    sheet; kappa(-kappa0**2) == kappa0 exactly for kappa0 > 0.
    """
    w = sqrt_cut(z)
    return complex(w.imag, -w.real)


def _require_right_half(w: complex) -> complex:
    w = complex(w)
    if w.real <= 0.0:
        raise DomainError(f"K0 requested at Re w <= 0 (w={w})")
    return w


def macdonald_k0(w: complex) -> complex:
    """Macdonald function K0(w) for Re w > 0 (complex argument allowed)."""
    w = _require_right_half(w)
    return complex(kv(0, w))


def k0_prime(w: complex) -> complex:
    """d/dw K0(w) = -K1(w), for Re w > 0."""
    w = _require_right_half(w)
    return -complex(kv(1, w))


def s_value(z: complex) -> complex:
    """Regularized diagonal value s(z) = (ln(sqrt_cut(z)/2i) - psi(1)) / 2pi.

    With the branch above, sqrt_cut(z)/2i = kappa(z)/2 lies in the right
    half plane, so the principal logarithm applies and s is analytic off
    the cut.
    """
    kap = kappa_of(z)
    return (cmath.log(kap / 2.0) - PSI1) / (2.0 * math.pi)


def s_beta(z: complex, beta: float) -> complex:
    """Point-interaction diagonal s_beta(z) = beta + s(z)."""
    return beta + s_value(z)


def s_breve(kappa: float, beta: float) -> float:
    """Real-axis form: s_beta(-kappa^2) for kappa > 0, computed in reals."""
    if kappa <= 0.0:
        raise DomainError(f"s_breve requires kappa > 0, got {kappa}")
    return beta + (math.log(kappa / 2.0) - PSI1) / (2.0 * math.pi)


def s_breve_prime(kappa: float) -> float:
    """d/dkappa of s_breve, equal to 1/(2 pi kappa)."""
    if kappa <= 0.0:
        raise DomainError(f"s_breve_prime requires kappa > 0, got {kappa}")
    return 1.0 / (2.0 * math.pi * kappa)
