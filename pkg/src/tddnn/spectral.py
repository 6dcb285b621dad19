"""Control problem parameters, eigenvalue sources and per-mode quantities.

After diagonalising the spatial operator every eigenvalue ``d`` gives an
independent scalar forward-backward system. Everything downstream only needs
``d`` together with the four problem scalars, so spectra can be built from the
1D Laplacian, a logarithmic grid, or any explicit list of eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class ControlProblem:
    """Scalars of the control problem and of the two-subdomain time split.

    nu    : control regularisation weight, must be > 0
    gamma : final-target weight, >= 0
    T     : final time
    alpha : interface time, 0 < alpha < T
    """

    nu: float
    gamma: float
    T: float
    alpha: float

    def __post_init__(self):
        for name in ("nu", "gamma", "T", "alpha"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.nu <= 0:
            raise ValueError(f"nu must be > 0, got {self.nu}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.T <= 0:
            raise ValueError(f"T must be > 0, got {self.T}")
        if not 0 < self.alpha < self.T:
            raise ValueError(f"alpha must lie in (0, T={self.T}), got {self.alpha}")


CASE_A = ControlProblem(nu=0.1, gamma=0.0, T=1.0, alpha=0.5)
CASE_B = ControlProblem(nu=10.0, gamma=10.0, T=5.0, alpha=1.0)


@dataclass(frozen=True)
class Mode:
    """One eigenvalue with its derived quantities.

    Fields are floats for a single mode, or equally shaped numpy arrays when the
    mode was built from an array of eigenvalues (vectorised sweeps).
    """

    problem: ControlProblem
    d: float | np.ndarray
    sigma: float | np.ndarray
    omega: float | np.ndarray
    beta: float | np.ndarray
    a: float | np.ndarray
    b: float | np.ndarray

    @property
    def sigma_minus_d(self):
        # sigma - d without cancellation for large d
        return (1.0 / self.problem.nu) / (self.sigma + self.d)


def mode_params(problem: ControlProblem, d) -> Mode:
    """Derived quantities sigma, omega, beta, a, b for eigenvalue(s) ``d``."""
    arr = np.asarray(d, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("eigenvalue must be finite")
    if np.any(arr < 0):
        raise ValueError("eigenvalue must be >= 0")
    nu, gamma = problem.nu, problem.gamma
    sigma = np.sqrt(arr * arr + 1.0 / nu)
    omega = arr + gamma / nu
    beta = 1.0 - gamma * arr
    a = sigma * problem.alpha
    b = sigma * (problem.T - problem.alpha)
    if arr.ndim == 0:
        return Mode(problem, float(arr), float(sigma), float(omega), float(beta), float(a), float(b))
    return Mode(problem, arr, sigma, omega, beta, a, b)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]
    source: str

    def __post_init__(self):
        values = np.asarray(self.eigenvalues, dtype=float)
        if values.size and (not np.all(np.isfinite(values)) or np.any(values < 0)):
            raise ValueError("eigenvalues must be finite and >= 0")
        if np.any(np.diff(values) < 0):
            raise ValueError("eigenvalues must be sorted ascending")

    def __len__(self):
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.eigenvalues, dtype=float)


def laplacian_1d_spectrum(n: int) -> Spectrum:
    """Eigenvalues of (1/h^2) tridiag(-1, 2, -1) on (0, 1), h = 1/(n+1).

    Uses the closed form 4/h^2 sin^2(j pi h / 2), j = 1..n, already ascending.
    """
    if n < 1:
        raise ValueError(f"grid size must be >= 1, got {n}")
    h = 1.0 / (n + 1)
    j = np.arange(1, n + 1)
    values = 4.0 / h**2 * np.sin(j * np.pi * h / 2.0) ** 2
    return Spectrum(tuple(float(v) for v in values), f"laplacian_1d({n})")


def laplacian_1d_eigenvectors(n: int) -> np.ndarray:
    """Orthonormal eigenvectors (columns) matching :func:`laplacian_1d_spectrum`."""
    if n < 1:
        raise ValueError(f"grid size must be >= 1, got {n}")
    h = 1.0 / (n + 1)
    k = np.arange(1, n + 1)
    return np.sqrt(2.0 * h) * np.sin(np.outer(k, k) * np.pi * h)


def log_grid_spectrum(dmin: float, dmax: float, points: int) -> Spectrum:
    if not (0 < dmin < dmax) or points < 2:
        raise ValueError("need 0 < dmin < dmax and points >= 2")
    values = np.logspace(math.log10(dmin), math.log10(dmax), points)
    return Spectrum(tuple(float(v) for v in values), f"log_grid({dmin!r}, {dmax!r}, {points})")


def explicit_spectrum(values: Iterable[float]) -> Spectrum:
    ordered = sorted(float(v) for v in values)
    return Spectrum(tuple(ordered), "explicit")


def modal_transform(eigenvectors: np.ndarray, nodal: Sequence[float]) -> np.ndarray:
    """Coefficients of ``nodal`` in the eigenbasis, P^T x."""
    P = np.asarray(eigenvectors, dtype=float)
    x = np.asarray(nodal, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("eigenvector matrix must be square")
    if x.shape[0] != P.shape[0]:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {P.shape[0]}")
    return P.T @ x


def inverse_modal_transform(eigenvectors: np.ndarray, modal: Sequence[float]) -> np.ndarray:
    P = np.asarray(eigenvectors, dtype=float)
    c = np.asarray(modal, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("eigenvector matrix must be square")
    if c.shape[0] != P.shape[1]:
        raise ValueError(f"dimension mismatch: {c.shape[0]} vs {P.shape[1]}")
    return P @ c
