"""Finite-difference ground truth in time.

Two independent checks on the analytic machinery:

* ``monolithic_solve`` solves the reduced two-point problem for one mode,

      z'' - sigma^2 z = -zhat / nu,   z(0) = z0,
      z'(T) + omega z(T) = gamma zhat(T) / nu,

  and recovers the dual from mu = nu (z' + d z).
* ``discrete_sweep`` repeats one Neumann-Neumann sweep with finite-difference
  subdomain solves instead of the exact hyperbolic amplitudes.

Both use the centred three-point stencil inside and one-sided second-order
differences for every first-order boundary or interface row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .engine import InterfaceState, SingularStepError, _check_state
from .spectral import Mode
from .variants import Dirichlet, Neumann, Update, Variant


@dataclass(frozen=True)
class ModeData:
    """Initial value and target samples for one mode.

    ``zhat`` holds nt+1 samples on the uniform grid of [0, T]. ``zhat_T`` is the
    final-time target entering the Robin row; it defaults to ``zhat[-1]``.
    """

    z0: float
    zhat: np.ndarray
    nt: int
    zhat_T: float | None = None

    def __post_init__(self):
        if self.nt < 2:
            raise ValueError(f"nt must be >= 2, got {self.nt}")
        zhat = np.asarray(self.zhat, dtype=float)
        if zhat.shape != (self.nt + 1,):
            raise ValueError(f"zhat needs nt+1 = {self.nt + 1} samples, got shape {zhat.shape}")
        if not np.all(np.isfinite(zhat)) or not np.isfinite(self.z0):
            raise ValueError("data must be finite")
        object.__setattr__(self, "zhat", zhat)
        if self.zhat_T is None:
            object.__setattr__(self, "zhat_T", float(zhat[-1]))

    @classmethod
    def zero(cls, nt: int) -> "ModeData":
        return cls(0.0, np.zeros(nt + 1), nt)


@dataclass(frozen=True)
class DiscreteSolution:
    t: np.ndarray
    z: np.ndarray
    mu: np.ndarray


def _two_point_solve(h: float, sigma2: float, rhs: np.ndarray, left, right) -> np.ndarray:
    """Solve u'' - sigma2 u = rhs on a uniform grid with rows c0 u + c1 u' = g.

    ``left``/``right`` are (c0, c1, g). A Neumann-type row uses the one-sided
    three-point slope; its far node is eliminated with the neighbouring
    interior equation so the system stays tridiagonal.
    """
    n = rhs.size
    ab = np.zeros((3, n))
    # interior: u_{i-1} - (2 + h^2 sigma2) u_i + u_{i+1} = h^2 rhs_i
    ab[0, 2:] = 1.0
    ab[1, 1:-1] = -(2.0 + h * h * sigma2)
    ab[2, :-2] = 1.0
    b = h * h * rhs.astype(float)

    c0, c1, g = left
    ab[1, 0] = c0 - c1 / h
    ab[0, 1] = c1 * (2.0 - h * h * sigma2) / (2.0 * h)
    b[0] = g + c1 * h * rhs[1] / 2.0

    c0, c1, g = right
    ab[1, -1] = c0 + c1 / h
    ab[2, -2] = c1 * (h * h * sigma2 - 2.0) / (2.0 * h)
    b[-1] = g - c1 * h * rhs[-2] / 2.0

    try:
        with np.errstate(all="raise"):
            u = solve_banded((1, 1), ab, b)
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        raise SingularStepError(f"singular tridiagonal system: {exc}") from exc
    if not np.all(np.isfinite(u)):
        raise SingularStepError("singular tridiagonal system: non-finite solution")
    return u


def _slope_left(u: np.ndarray, h: float) -> float:
    return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)


def _slope_right(u: np.ndarray, h: float) -> float:
    return (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)


def _derivative(u: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative (five-point stencils).

    The truncation error then sits below the O(h^2) discretisation error of u,
    which is smooth in t; mu = nu (u' + d u) inherits that smoothness, so
    differencing mu once more in ``dual_residual`` keeps second order.
    """
    if u.size < 5:
        return np.gradient(u, h, edge_order=2 if u.size > 2 else 1)
    du = np.empty_like(u)
    du[2:-2] = (u[:-4] - 8.0 * u[1:-3] + 8.0 * u[3:-1] - u[4:]) / (12.0 * h)
    du[0] = (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / (12.0 * h)
    du[1] = (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]) / (12.0 * h)
    du[-1] = (25.0 * u[-1] - 48.0 * u[-2] + 36.0 * u[-3] - 16.0 * u[-4] + 3.0 * u[-5]) / (12.0 * h)
    du[-2] = (3.0 * u[-1] + 10.0 * u[-2] - 18.0 * u[-3] + 6.0 * u[-4] - u[-5]) / (12.0 * h)
    return du


def time_grid(T: float, nt: int) -> np.ndarray:
    return np.linspace(0.0, T, nt + 1)


def monolithic_solve(mode: Mode, data: ModeData) -> DiscreteSolution:
    """Second-order finite-difference solution of the coupled system for one mode."""
    p = mode.problem
    t = time_grid(p.T, data.nt)
    h = p.T / data.nt
    rhs = -data.zhat / p.nu
    z = _two_point_solve(
        h,
        mode.sigma**2,
        rhs,
        left=(1.0, 0.0, data.z0),
        right=(mode.omega, 1.0, p.gamma * data.zhat_T / p.nu),
    )
    mu = p.nu * (_derivative(z, h) + mode.d * z)
    return DiscreteSolution(t, z, mu)


def residual_check(solution: DiscreteSolution, mode: Mode, data: ModeData) -> float:
    """Largest residual of the assembled rows: interior ODE rows (scaled by
    1/h^2), the initial-value row and the one-sided final-time Robin row."""
    p = mode.problem
    z = np.asarray(solution.z, dtype=float)
    h = p.T / data.nt
    interior = (z[:-2] - 2.0 * z[1:-1] + z[2:]) / h**2 - mode.sigma**2 * z[1:-1] + data.zhat[1:-1] / p.nu
    initial = z[0] - data.z0
    final = _slope_right(z, h) + mode.omega * z[-1] - p.gamma * data.zhat_T / p.nu
    return float(max(np.max(np.abs(interior)), abs(initial), abs(final)))


def dual_residual(solution: DiscreteSolution, mode: Mode, data: ModeData) -> float:
    """Max over the grid of |mu' - z - d mu + zhat|, differencing mu to second order."""
    h = mode.problem.T / data.nt
    mu_dot = np.gradient(solution.mu, h, edge_order=2)
    return float(np.max(np.abs(mu_dot - solution.z - mode.d * solution.mu + data.zhat)))


# ---- discrete subdomain sweeps ---------------------------------------------


@dataclass(frozen=True)
class _Discrete:
    u: np.ndarray
    h: float
    on_left: bool  # True for Omega1 = (0, alpha); interface at its right end

    def value(self) -> float:
        return float(self.u[-1] if self.on_left else self.u[0])

    def slope(self) -> float:
        return _slope_right(self.u, self.h) if self.on_left else _slope_left(self.u, self.h)


def _row(mode: Mode, kind: str) -> tuple[float, float]:
    return {
        "value": (1.0, 0.0),
        "slope": (0.0, 1.0),
        "robin": (mode.d, 1.0),
        "flux": (mode.sigma**2, mode.d),
    }[kind]


def _apply(mode: Mode, kind: str, s: _Discrete) -> float:
    c0, c1 = _row(mode, kind)
    return c0 * s.value() + c1 * s.slope()


def _solve_sub(mode: Mode, nt: int, left_side: bool, kind: str, g: float) -> _Discrete:
    p = mode.problem
    length = p.alpha if left_side else p.T - p.alpha
    h = length / nt
    rhs = np.zeros(nt + 1)
    c0, c1 = _row(mode, kind)
    if left_side:
        u = _two_point_solve(h, mode.sigma**2, rhs, left=(1.0, 0.0, 0.0), right=(c0, c1, g))
    else:
        u = _two_point_solve(h, mode.sigma**2, rhs, left=(c0, c1, g), right=(mode.omega, 1.0, 0.0))
    return _Discrete(u, h, left_side)


_DIRICHLET_ROWS = {
    Dirichlet.ROBIN_VALUE: ("robin", "value"),
    Dirichlet.VALUE_VALUE: ("value", "value"),
    Dirichlet.ROBIN_ROBIN: ("robin", "robin"),
}


def discrete_sweep(
    variant: Variant,
    mode: Mode,
    state: InterfaceState,
    theta1: float,
    theta2: float | None = None,
    nt: int = 256,
) -> InterfaceState:
    """One finite-difference sweep of the error iteration; ``nt`` intervals per subdomain."""
    if nt < 2:
        raise ValueError(f"nt must be >= 2, got {nt}")
    _check_state(variant, state)
    if theta2 is None:
        theta2 = theta1
    f = state.f
    g = state.f if state.g is None else state.g
    recipe = variant.recipe

    row1, row2 = _DIRICHLET_ROWS[recipe.dirichlet]
    z1 = _solve_sub(mode, nt, True, row1, f)
    z2 = _solve_sub(mode, nt, False, row2, f if recipe.dirichlet is Dirichlet.ROBIN_ROBIN else g)

    slope_jump = z1.slope() - z2.slope()
    flux_jump = _apply(mode, "flux", z1) - _apply(mode, "flux", z2)
    if recipe.neumann is Neumann.SLOPE_SLOPE:
        psi1 = _solve_sub(mode, nt, True, "slope", slope_jump)
        psi2 = _solve_sub(mode, nt, False, "slope", -slope_jump)
    elif recipe.neumann is Neumann.FLUX_SLOPE:
        psi1 = _solve_sub(mode, nt, True, "flux", flux_jump)
        psi2 = _solve_sub(mode, nt, False, "slope", -slope_jump)
    else:
        psi1 = _solve_sub(mode, nt, True, "flux", flux_jump)
        psi2 = _solve_sub(mode, nt, False, "flux", -flux_jump)

    value_sum = psi1.value() + psi2.value()
    robin_sum = _apply(mode, "robin", psi1) + _apply(mode, "robin", psi2)
    if recipe.update is Update.VALUE:
        return InterfaceState(f - theta1 * value_sum)
    if recipe.update is Update.ROBIN:
        return InterfaceState(f - theta1 * robin_sum)
    if recipe.update is Update.ROBIN_VALUE_PAIR:
        return InterfaceState(f - theta1 * robin_sum, g - theta2 * value_sum)
    return InterfaceState(f - theta1 * value_sum, g - theta2 * value_sum)
