"""Spectral and resonance toolkit for a leaky wire with quantum dots.

A delta line of strength alpha in the plane plus finitely many delta
points, reduced by the Birman-Schwinger scheme to an n x n determinant:
bound states below -alpha^2/4, second-sheet resonance poles across
(-alpha^2/4, 0), and guided-channel reflection/transmission amplitudes.
"""

from .bound_spectrum import (
    BoundState,
    eigenfunction_grid,
    eigenfunction_value,
    epsilon_beta,
    find_bound_states,
    gamma_scalar,
    kappa_max,
    kappa_single,
    varsigma_beta,
)
from .operator_model import DMatrix, ModelParams, d_matrix, gamma00_multiplier, phi_kl
from .quadrature import QuadSpec, integrate_halfline, integrate_near_pole, integrate_pv
from .resonance import (
    OmegaMinus,
    ResonancePole,
    SheetPoint,
    TwoPointLevels,
    eta,
    eta_continued,
    eta_hat2,
    find_pole,
    find_pole2,
    mu2_slope,
    nu2_curvature,
    phi_sheet,
    sheet_point,
    two_point_levels,
)
from .scattering import ScatteringPoint, amplitudes, continued_reflection, guided_wave
from .specfun import kappa_of, macdonald_k0, s_beta, s_breve, sqrt_cut

__version__ = "0.1.0"

__all__ = [
    "BoundState",
    "DMatrix",
    "ModelParams",
    "OmegaMinus",
    "QuadSpec",
    "ResonancePole",
    "ScatteringPoint",
    "SheetPoint",
    "TwoPointLevels",
    "amplitudes",
    "continued_reflection",
    "d_matrix",
    "eigenfunction_grid",
    "eigenfunction_value",
    "epsilon_beta",
    "eta",
    "eta_continued",
    "eta_hat2",
    "find_bound_states",
    "find_pole",
    "find_pole2",
    "gamma00_multiplier",
    "gamma_scalar",
    "guided_wave",
    "integrate_halfline",
    "integrate_near_pole",
    "integrate_pv",
    "kappa_max",
    "kappa_of",
    "kappa_single",
    "macdonald_k0",
    "mu2_slope",
    "nu2_curvature",
    "phi_kl",
    "phi_sheet",
    "s_beta",
    "s_breve",
    "sheet_point",
    "sqrt_cut",
    "two_point_levels",
    "varsigma_beta",
]
