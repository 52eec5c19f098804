"""FastAPI service exposing the solver endpoints.

All computations are pure functions of the request, so the service is
stateless; sweep points are dispatched to the worker pool (capped by
LEAKYWIRE_THREADS) and collected in input order.  Domain errors map to
400, convergence failures to 409.
"""

from __future__ import annotations

import math
import warnings
from functools import wraps

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bound_spectrum import (
    eigenfunction_grid,
    epsilon_beta,
    find_bound_states,
    kappa_single,
)
from ..errors import ConvergenceError, LeakyWireError, QuadratureConvergenceError
from ..oracle import selftest
from ..pool import map_ordered
from ..resonance import (
    ResonancePole,
    find_pole,
    find_pole2,
    mu2_slope,
    nu2_curvature,
    trajectory_fits,
    two_point_levels,
)
from ..scattering import amplitudes, lambda_grid
from ..specfun import PSI1
from .schemas import (
    BoundStateOut,
    EigenfunctionRequest,
    EigenfunctionResponse,
    EigenPointOut,
    PoleOut,
    ResonanceFitOut,
    ResonanceRequest,
    ResonanceResponse,
    ScatterPointOut,
    ScatterRequest,
    ScatterResponse,
    SelftestCheckOut,
    SelftestResponse,
    SpectrumRequest,
    SpectrumResponse,
    TwopointRequest,
    TwopointResponse,
    TwoPointLevelsOut,
)

_RETRYABLE = (ConvergenceError, QuadratureConvergenceError)


def _wrap(fn):
    @wraps(fn)
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _RETRYABLE as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except (LeakyWireError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    return inner


def _beta_for(req: ResonanceRequest) -> float:
    if req.beta is not None:
        return req.beta
    # invert eps_beta = -4 exp(2(-2 pi beta + psi(1)))
    return (PSI1 - 0.5 * math.log(-req.eps_beta / 4.0)) / (2.0 * math.pi)


def _pole_out(pole: ResonancePole, a: float | None = None) -> PoleOut:
    return PoleOut(
        a=a,
        b=pole.b,
        mu=pole.z.real,
        nu=pole.z.imag,
        residual=pole.residual,
        iterations=pole.iterations,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="leakywire", version=__version__)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/spectrum", response_model=SpectrumResponse)
    @_wrap
    def spectrum(req: SpectrumRequest) -> SpectrumResponse:
        model = req.model.to_model()
        spec = req.quad.to_spec() if req.quad else None
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            states = find_bound_states(model, spec, grid_points=req.grid_points)
        return SpectrumResponse(
            states=[
                BoundStateOut(
                    energy=s.energy,
                    kappa=s.kappa,
                    residual=s.solver_residual,
                    null_vector=[float(v) for v in s.null_vector.real],
                )
                for s in states
            ],
            warnings=[str(w.message) for w in caught],
        )

    @app.post("/eigenfunction", response_model=EigenfunctionResponse)
    @_wrap
    def eigenfunction(req: EigenfunctionRequest) -> EigenfunctionResponse:
        model = req.model.to_model()
        spec = req.quad.to_spec() if req.quad else None
        state = kappa_single(model, spec)
        x1s, x2s = req.x1.points(), req.x2.points()
        values = eigenfunction_grid(x1s, x2s, state, model, spec)
        points = [
            EigenPointOut(
                x1=x1,
                x2=x2,
                psi=None if math.isnan(values[i, j]) else float(values[i, j]),
            )
            for i, x1 in enumerate(x1s)
            for j, x2 in enumerate(x2s)
        ]
        return EigenfunctionResponse(
            state=BoundStateOut(
                energy=state.energy,
                kappa=state.kappa,
                residual=state.solver_residual,
                null_vector=[1.0],
            ),
            points=points,
        )

    @app.post("/resonance", response_model=ResonanceResponse)
    @_wrap
    def resonance(req: ResonanceRequest) -> ResonanceResponse:
        from ..operator_model import ModelParams

        beta = _beta_for(req)
        spec = req.quad.to_spec() if req.quad else None

        def solve(a: float) -> ResonancePole:
            model = ModelParams(alpha=req.alpha, dots=((0.0, a),), betas=(beta,))
            return find_pole(model, spec=spec)

        poles = map_ordered(solve, req.a_values)
        fit = None
        if len(poles) >= 2 and all(p.z.imag < 0 for p in poles):
            fits = trajectory_fits(poles, epsilon_beta(beta))
            fit = ResonanceFitOut(nu_slope=fits["nu_slope"], mu_over_b_max=fits["mu_over_b_max"])
        return ResonanceResponse(
            eps_beta=epsilon_beta(beta),
            beta=beta,
            points=[_pole_out(p, a) for p, a in zip(poles, req.a_values)],
            fit=fit,
        )

    @app.post("/scatter", response_model=ScatterResponse)
    @_wrap
    def scatter(req: ScatterRequest) -> ScatterResponse:
        model = req.model.to_model()
        spec = req.quad.to_spec() if req.quad else None
        lams = req.lambdas if req.lambdas else [float(x) for x in lambda_grid(model, req.grid_n)]

        def solve(lam: float) -> ScatterPointOut:
            pt = amplitudes(lam, model, spec)
            return ScatterPointOut(
                lam=pt.lam,
                momentum=pt.momentum,
                r_re=pt.R.real,
                r_im=pt.R.imag,
                t_re=pt.T.real,
                t_im=pt.T.imag,
                r_abs2=abs(pt.R) ** 2,
                t_abs2=abs(pt.T) ** 2,
            )

        return ScatterResponse(points=map_ordered(solve, lams))

    @app.post("/twopoint", response_model=TwopointResponse)
    @_wrap
    def twopoint(req: TwopointRequest) -> TwopointResponse:
        spec = req.quad.to_spec() if req.quad else None
        levels = two_point_levels(req.a, req.beta)

        def solve(b: float) -> PoleOut:
            pole = find_pole2(b, req.alpha, req.a, req.beta, spec, mode=req.mode)
            return _pole_out(pole)

        return TwopointResponse(
            levels=TwoPointLevelsOut(
                eps1=levels.eps1,
                kappa1=levels.kappa1,
                eps2=levels.eps2,
                kappa2=levels.kappa2,
                has_two=levels.has_two,
            ),
            mu2_slope=mu2_slope(req.alpha, req.a, req.beta, req.mode),
            nu2_curvature=nu2_curvature(req.alpha, req.a, req.beta, spec, req.mode),
            points=map_ordered(solve, req.b_values),
        )

    @app.post("/selftest", response_model=SelftestResponse)
    @_wrap
    def run_selftest() -> SelftestResponse:
        report = selftest()
        return SelftestResponse(
            passed=report.passed,
            checks=[SelftestCheckOut(**c) for c in report.checks],
        )

    return app
