import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from tddnn import CASE_A, CASE_B, Variant, log_grid_spectrum, optimize_theta
from tddnn.spectral import explicit_spectrum
from tddnn.tuning import OptimizationError, golden_section, minimax_objective

V = Variant
GRID = log_grid_spectrum(1e-2, 1e2, 200)


def test_golden_section_quadratic():
    x, fx, evals = golden_section(lambda t: (t - 0.3) ** 2, 0.0, 2.0, tol=1e-8)
    assert x == pytest.approx(0.3, abs=1e-8) and fx < 1e-15 and evals < 100


def test_golden_section_kink():
    x, _, _ = golden_section(lambda t: max(abs(1 - 3 * t), abs(1 - t / 2)), 0.0, 2.0)
    assert x == pytest.approx(4 / 7, abs=1e-6)


def test_golden_section_budget():
    with pytest.raises(OptimizationError):
        golden_section(abs, -1.0, 1.0, tol=1e-12, max_evals=10)
    with pytest.raises(ValueError):
        golden_section(abs, 1.0, 1.0)


@pytest.mark.parametrize("variant", [V.NN1b, V.NN2a, V.NN2c, V.NN3a, V.NN3c], ids=str)
@pytest.mark.parametrize("problem", [CASE_A, CASE_B], ids=["A", "B"])
def test_matches_independent_bounded_search(variant, problem):
    obj = minimax_objective(variant, GRID, problem)
    ref = minimize_scalar(obj, bounds=(0, 2), method="bounded", options={"xatol": 1e-9})
    opt = optimize_theta(variant, GRID, problem)
    assert opt.rho == pytest.approx(ref.fun, abs=1e-5)
    assert opt.theta == pytest.approx(ref.x, abs=1e-4)


def test_minimax_is_attained_on_grid():
    opt = optimize_theta(V.NN2a, GRID, CASE_A)
    obj = minimax_objective(V.NN2a, GRID, CASE_A)
    assert obj(opt.theta) == pytest.approx(opt.rho)
    assert obj(opt.theta + 1e-3) > opt.rho and obj(opt.theta - 1e-3) > opt.rho


def test_nn2c_case_b():
    assert optimize_theta(V.NN2c, GRID, CASE_B).theta == pytest.approx(0.265, abs=0.01)


def test_nn3c_case_b():
    assert optimize_theta(V.NN3c, GRID, CASE_B).theta == pytest.approx(0.307, abs=0.01)


def test_nn1a_case_a_plateau():
    opt = optimize_theta(V.NN1a, GRID, CASE_A)
    assert len(opt.thetas) == 2
    assert min(opt.thetas) <= 1e-3
    assert opt.rho == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("variant", [V.NN2b, V.NN3b], ids=str)
@pytest.mark.parametrize("problem", [CASE_A, CASE_B], ids=["A", "B"])
def test_divergent_optimum_is_zero(variant, problem):
    opt = optimize_theta(variant, GRID, problem)
    assert opt.rho >= 1.0 and opt.theta <= 1e-5


def test_deterministic():
    a = optimize_theta(V.NN1b, GRID, CASE_B)
    b = optimize_theta(V.NN1b, GRID, CASE_B)
    assert a == b


def test_rejects_analysis_only_and_empty():
    with pytest.raises(ValueError):
        optimize_theta(V.Raw1b, GRID, CASE_A)
    with pytest.raises(ValueError):
        optimize_theta(V.NN2a, explicit_spectrum([]), CASE_A)


def test_single_mode_spectrum():
    # one mode: the factor can be driven to zero
    opt = optimize_theta(V.NN2a, explicit_spectrum([1.0]), CASE_A)
    assert opt.rho < 1e-5
