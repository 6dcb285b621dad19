"""Minimax tuning of the relaxation parameter over a spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .closed_form import convergence_factor
from .spectral import ControlProblem, Spectrum, mode_params
from .variants import Variant

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class OptimizationError(RuntimeError):
    pass


def golden_section(obj, lo: float, hi: float, tol: float = 1e-6, max_evals: int = 500):
    """Minimise a unimodal ``obj`` on [lo, hi].

    Returns (x, f(x), evaluations). Raises OptimizationError when the bracket
    cannot be shrunk below ``tol`` within ``max_evals`` evaluations.
    """
    if not hi > lo:
        raise ValueError("need hi > lo")
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = obj(c), obj(d)
    evals = 2
    while b - a > tol:
        if evals >= max_evals:
            raise OptimizationError(f"golden section did not reach tol={tol} in {max_evals} evaluations")
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = obj(d)
        evals += 1
    x = (a + b) / 2.0
    fx = obj(x)
    return x, fx, evals + 1


@dataclass(frozen=True)
class ThetaOptimum:
    variant: Variant
    thetas: tuple[float, ...]
    rho: float
    evaluations: int

    @property
    def theta(self) -> float:
        return self.thetas[0]


def minimax_objective(variant: Variant, spectrum: Spectrum, problem: ControlProblem):
    """theta -> max over the spectrum of the convergence factor."""
    mode = mode_params(problem, spectrum.as_array())

    def objective(theta1, theta2=None):
        return float(np.max(convergence_factor(variant, mode, theta1, theta2)))

    return objective


def optimize_theta(
    variant: Variant,
    spectrum: Spectrum,
    problem: ControlProblem,
    *,
    bounds: tuple[float, float] = (0.0, 2.0),
    tol: float = 1e-6,
    max_evals: int = 500,
) -> ThetaOptimum:
    """Numerically optimal relaxation for ``variant`` on ``spectrum``.

    Single-theta variants: golden section on ``bounds``; the objective is a max
    of |1 - theta c_i| terms, hence convex and unimodal. NN1a: bounded
    Nelder-Mead on bounds^2 started from (1, 1).
    """
    if variant.analysis_only:
        raise ValueError(f"{variant} cannot be fixed by relaxation; no optimum to search for")
    if len(spectrum) == 0:
        raise ValueError("spectrum is empty")
    objective = minimax_objective(variant, spectrum, problem)
    if variant is not Variant.NN1a:
        theta, rho, evals = golden_section(objective, bounds[0], bounds[1], tol=tol, max_evals=max_evals)
        return ThetaOptimum(variant, (theta,), rho, evals)

    res = minimize(
        lambda x: objective(x[0], x[1]),
        x0=np.array([1.0, 1.0]),
        method="Nelder-Mead",
        bounds=[bounds, bounds],
        options={"maxfev": max_evals, "xatol": tol, "fatol": 1e-12},
    )
    if not res.success:
        raise OptimizationError(f"NN1a simplex search failed: {res.message}")
    return ThetaOptimum(variant, (float(res.x[0]), float(res.x[1])), float(res.fun), int(res.nfev))
