import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tddnn import CASE_A, CASE_B, ControlProblem, explicit_spectrum, laplacian_1d_spectrum, log_grid_spectrum, mode_params
from tddnn.io import read_spectrum_csv, write_spectrum_csv
from tddnn.spectral import Spectrum, inverse_modal_transform, laplacian_1d_eigenvectors, modal_transform


def test_presets_match_test_cases():
    assert (CASE_A.nu, CASE_A.gamma, CASE_A.T, CASE_A.alpha) == (0.1, 0.0, 1.0, 0.5)
    assert (CASE_B.nu, CASE_B.gamma, CASE_B.T, CASE_B.alpha) == (10.0, 10.0, 5.0, 1.0)


@pytest.mark.parametrize(
    "kw",
    [
        dict(nu=0.0, gamma=0.0, T=1.0, alpha=0.5),
        dict(nu=-1.0, gamma=0.0, T=1.0, alpha=0.5),
        dict(nu=1.0, gamma=-0.1, T=1.0, alpha=0.5),
        dict(nu=1.0, gamma=0.0, T=0.0, alpha=0.5),
        dict(nu=1.0, gamma=0.0, T=1.0, alpha=1.0),
        dict(nu=1.0, gamma=0.0, T=1.0, alpha=0.0),
        dict(nu=math.nan, gamma=0.0, T=1.0, alpha=0.5),
        dict(nu=1.0, gamma=math.inf, T=1.0, alpha=0.5),
    ],
)
def test_problem_rejects_invalid(kw):
    with pytest.raises(ValueError):
        ControlProblem(**kw)


def test_mode_at_zero_case_a():
    m = mode_params(CASE_A, 0.0)
    assert m.sigma == pytest.approx(math.sqrt(10.0), rel=1e-15)
    assert m.omega == 0.0 and m.beta == 1.0


def test_mode_direct_arithmetic():
    m = mode_params(ControlProblem(1.0, 1.0, 1.0, 0.5), 1.0)
    assert m.sigma == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert m.omega == 2.0 and m.beta == 0.0
    assert m.a == pytest.approx(math.sqrt(2.0) / 2) and m.b == pytest.approx(math.sqrt(2.0) / 2)


def test_mode_asymptotic_ratios():
    d = 1e6
    m = mode_params(CASE_B, d)
    assert abs(m.sigma / d - 1) < 1e-6
    assert abs(m.omega / d - 1) < 1e-6
    assert abs(m.beta / d + 10) < 1e-6


@pytest.mark.parametrize("d", [-1e-3, math.nan, math.inf])
def test_mode_rejects_bad_eigenvalue(d):
    with pytest.raises(ValueError):
        mode_params(CASE_A, d)


@given(
    nu=st.floats(1e-3, 1e3),
    gamma=st.floats(0, 100),
    T=st.floats(0.1, 10),
    frac=st.floats(0.01, 0.99),
    d=st.floats(0, 1e4),
)
def test_mode_identities(nu, gamma, T, frac, d):
    m = mode_params(ControlProblem(nu, gamma, T, frac * T), d)
    assert m.sigma**2 - d**2 == pytest.approx(1 / nu, rel=1e-12, abs=1e-12 * d * d)
    assert m.a + m.b == pytest.approx(m.sigma * T, rel=1e-12)
    assert m.sigma >= math.sqrt(1 / nu) * (1 - 1e-15)


def test_mode_monotone_in_d():
    d = np.linspace(0, 50, 101)
    m = mode_params(CASE_B, d)
    assert np.all(np.diff(m.sigma) > 0) and np.all(np.diff(m.omega) > 0) and np.all(np.diff(m.beta) < 0)


def test_vectorised_mode_matches_scalar():
    d = np.array([0.0, 0.3, 7.0])
    mv = mode_params(CASE_A, d)
    for i, di in enumerate(d):
        ms = mode_params(CASE_A, di)
        assert mv.sigma[i] == ms.sigma and mv.b[i] == ms.b


def test_laplacian_n1():
    assert laplacian_1d_spectrum(1).eigenvalues == pytest.approx((8.0,), rel=1e-15)


def test_laplacian_n3_against_dense():
    dense = 16 * (2 * np.eye(3) - np.eye(3, k=1) - np.eye(3, k=-1))
    assert np.allclose(laplacian_1d_spectrum(3).as_array(), np.linalg.eigvalsh(dense), rtol=1e-12)


@pytest.mark.parametrize("n", [5, 50, 200])
def test_laplacian_against_dense_and_formula(n):
    h = 1 / (n + 1)
    spec = laplacian_1d_spectrum(n)
    dense = (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / h**2
    assert np.allclose(spec.as_array(), np.linalg.eigvalsh(dense), rtol=1e-10)
    j = np.arange(1, n + 1)
    assert np.allclose(spec.as_array(), 4 / h**2 * np.sin(j * np.pi * h / 2) ** 2, rtol=1e-10)
    assert spec.source == f"laplacian_1d({n})"


def test_laplacian_smallest_near_pi_squared():
    assert abs(laplacian_1d_spectrum(50).eigenvalues[0] / math.pi**2 - 1) < 0.01


def test_laplacian_rejects_zero():
    with pytest.raises(ValueError):
        laplacian_1d_spectrum(0)


def test_eigenvectors_diagonalise():
    n = 7
    h = 1 / (n + 1)
    A = (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / h**2
    P = laplacian_1d_eigenvectors(n)
    assert np.allclose(P.T @ P, np.eye(n), atol=1e-13)
    assert np.allclose(P.T @ A @ P, np.diag(laplacian_1d_spectrum(n).as_array()), atol=1e-9)


def test_modal_round_trip():
    rng = np.random.default_rng(1)
    P = laplacian_1d_eigenvectors(20)
    x = rng.normal(size=20)
    back = inverse_modal_transform(P, modal_transform(P, x))
    assert np.max(np.abs(back - x)) <= 1e-12 * np.max(np.abs(x))
    assert np.all(modal_transform(P, np.zeros(20)) == 0)


def test_modal_constant_vector_n3():
    dense = 16 * (2 * np.eye(3) - np.eye(3, k=1) - np.eye(3, k=-1))
    _, Q = np.linalg.eigh(dense)
    P = laplacian_1d_eigenvectors(3)
    c = modal_transform(P, np.ones(3))
    # same basis up to column signs
    assert np.allclose(np.abs(c), np.abs(Q.T @ np.ones(3)), atol=1e-13)
    assert c[1] == pytest.approx(0.0, abs=1e-15)


def test_modal_dimension_mismatch():
    with pytest.raises(ValueError):
        modal_transform(laplacian_1d_eigenvectors(3), np.ones(4))
    with pytest.raises(ValueError):
        inverse_modal_transform(laplacian_1d_eigenvectors(3), np.ones(2))


def test_spectrum_validation():
    with pytest.raises(ValueError):
        Spectrum((2.0, 1.0), "x")
    with pytest.raises(ValueError):
        Spectrum((-1.0,), "x")
    assert explicit_spectrum([3, 1, 2]).eigenvalues == (1.0, 2.0, 3.0)


def test_log_grid():
    g = log_grid_spectrum(1e-2, 1e2, 200)
    assert len(g) == 200 and g.eigenvalues[0] == pytest.approx(1e-2) and g.eigenvalues[-1] == pytest.approx(1e2)
    with pytest.raises(ValueError):
        log_grid_spectrum(1.0, 0.5, 10)


def test_spectrum_csv_round_trip(tmp_path):
    spec = laplacian_1d_spectrum(9)
    path = tmp_path / "s.csv"
    write_spectrum_csv(spec, path)
    assert path.read_text().splitlines()[0] == "d"
    assert read_spectrum_csv(path).eigenvalues == spec.eigenvalues
