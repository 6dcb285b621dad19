"""Exact two-subdomain Neumann-Neumann sweeps on the per-mode error equation.

On each subdomain the homogeneous equation z'' - sigma^2 z = 0 together with the
outer boundary condition leaves a one-parameter family

    Omega1: z1 = A sinh(sigma t)                       (z1(0) = 0)
    Omega2: z2 = B (sigma cosh(sigma (T - t)) + omega sinh(sigma (T - t)))
                                                       (z2'(T) + omega z2(T) = 0)

and the same for the corrections psi1 = C ..., psi2 = D .... Each step fixes
the amplitude on each side from one interface condition at t = alpha. The
engine works directly from those conditions; it never uses the E/F
coefficients, so it is an independent check on the closed forms.

The interface datum f is the primal-form datum: for Dirichlet conditions on the
dual state, mu(alpha) = nu f.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .spectral import ControlProblem, Mode, Spectrum, mode_params
from .variants import Dirichlet, Neumann, Update, Variant

# printed-normalisation amplitudes need cosh/sinh of the subdomain lengths
MAX_EXPONENT = 700.0


class SingularStepError(ArithmeticError):
    """An interface condition left a subdomain amplitude undetermined."""


@dataclass(frozen=True)
class InterfaceState:
    f: float
    g: float | None = None

    def norm(self) -> float:
        return abs(self.f) if self.g is None else math.hypot(self.f, self.g)

    def scaled(self, c: float) -> "InterfaceState":
        return InterfaceState(c * self.f, None if self.g is None else c * self.g)


@dataclass(frozen=True)
class Trace:
    """Value and slope of a function at t = alpha.

    ``rb`` and ``fx`` optionally hold the Robin and flux functionals in a
    cancellation-free form; otherwise they are formed from value and slope.
    """

    value: float
    slope: float
    rb: float | None = None
    fx: float | None = None

    def __mul__(self, c: float) -> "Trace":
        return Trace(
            c * self.value,
            c * self.slope,
            None if self.rb is None else c * self.rb,
            None if self.fx is None else c * self.fx,
        )

    __rmul__ = __mul__

    def __sub__(self, other: "Trace") -> "Trace":
        def diff(x, y):
            return None if x is None or y is None else x - y

        return Trace(self.value - other.value, self.slope - other.slope, diff(self.rb, other.rb), diff(self.fx, other.fx))


def robin(mode: Mode, tr: Trace) -> float:
    # u' + d u  (dual state / nu)
    return tr.slope + mode.d * tr.value if tr.rb is None else tr.rb


def flux(mode: Mode, tr: Trace) -> float:
    # sigma^2 u + d u'  (dual slope / nu)
    return mode.sigma**2 * tr.value + mode.d * tr.slope if tr.fx is None else tr.fx


def _scaled_traces(mode: Mode) -> tuple[Trace, Trace]:
    """Traces of the two bases divided by e^a and e^b; never overflows."""
    s, w, d, a, b = mode.sigma, mode.omega, mode.d, mode.a, mode.b
    nu, gamma = mode.problem.nu, mode.problem.gamma
    sha, cha = -math.expm1(-2.0 * a) / 2.0, (1.0 + math.exp(-2.0 * a)) / 2.0
    shb, chb = -math.expm1(-2.0 * b) / 2.0, (1.0 + math.exp(-2.0 * b)) / 2.0
    # On the Omega2 basis u' + d u = -Gc / nu and sigma^2 u + d u' = sigma Gs / nu with
    # Gs, Gc = sigma gamma {sinh, cosh} b + beta {cosh, sinh} b. Forming them from value
    # and slope loses ~log10(nu d^2) digits; sigma gamma + beta = 1 + gamma (sigma - d).
    sg_plus_beta = 1.0 + gamma * mode.sigma_minus_d
    eb = math.exp(-2.0 * b)
    gs = (sg_plus_beta + eb * (mode.beta - s * gamma)) / 2.0
    gc = (sg_plus_beta + eb * (s * gamma - mode.beta)) / 2.0
    left = Trace(sha, s * cha, s * cha + d * sha, s * (s * sha + d * cha))
    right = Trace(s * chb + w * shb, -s * (s * shb + w * chb), -gc / nu, s * gs / nu)
    return left, right


def _basis_traces(mode: Mode) -> tuple[Trace, Trace]:
    """Interface traces of sinh(sigma t) and of the Omega2 basis, as printed."""
    if mode.a > MAX_EXPONENT or mode.b > MAX_EXPONENT:
        raise OverflowError(
            f"sigma*alpha={mode.a:.3g}, sigma*(T-alpha)={mode.b:.3g}: amplitudes not representable"
        )
    left, right = _scaled_traces(mode)
    return left * math.exp(mode.a), right * math.exp(mode.b)


def _solve(rhs: float, coeff: float, scale: float, what: str) -> float:
    if abs(coeff) <= 1e-13 * scale:
        raise SingularStepError(f"{what}: vanishing interface coefficient ({coeff:.3g})")
    return rhs / coeff


def _robin_coeff(mode: Mode, tr: Trace):
    return robin(mode, tr), abs(tr.slope) + abs(mode.d * tr.value)


def _flux_coeff(mode: Mode, tr: Trace):
    return flux(mode, tr), abs(mode.sigma**2 * tr.value) + abs(mode.d * tr.slope)


def _check_state(variant: Variant, state: InterfaceState):
    if variant.two_unknowns and state.g is None:
        raise ValueError(f"{variant} carries two interface unknowns (f, g)")
    if not variant.two_unknowns and state.g is not None:
        raise ValueError(f"{variant} carries a single interface unknown f")


def dirichlet_step(variant: Variant, mode: Mode, state: InterfaceState) -> tuple[float, float]:
    """Amplitudes (A, B) of z1, z2 from the variant's Dirichlet-step conditions."""
    return _dirichlet(variant, mode, state, _basis_traces(mode))


def _dirichlet(variant, mode, state, basis):
    _check_state(variant, state)
    left, right = basis
    f = state.f
    g = state.f if state.g is None else state.g
    kind = variant.recipe.dirichlet
    if kind is Dirichlet.ROBIN_VALUE:
        A = _solve(f, *_robin_coeff(mode, left), "Omega1 Robin condition")
        B = _solve(g, right.value, abs(right.value), "Omega2 value condition")
    elif kind is Dirichlet.VALUE_VALUE:
        A = _solve(f, left.value, abs(left.value), "Omega1 value condition")
        B = _solve(g, right.value, abs(right.value), "Omega2 value condition")
    else:
        A = _solve(f, *_robin_coeff(mode, left), "Omega1 Robin condition")
        B = _solve(f, *_robin_coeff(mode, right), "Omega2 Robin condition")
    return A, B


def neumann_step(variant: Variant, mode: Mode, A: float, B: float) -> tuple[float, float]:
    """Amplitudes (C, D) of psi1, psi2 from the correction conditions."""
    return _neumann(variant, mode, A, B, _basis_traces(mode))


def _neumann(variant, mode, A, B, basis):
    left, right = basis
    z1, z2 = A * left, B * right
    kind = variant.recipe.neumann
    slope_jump = z1.slope - z2.slope
    if kind is Neumann.SLOPE_SLOPE:
        C = _solve(slope_jump, left.slope, abs(left.slope), "Omega1 slope condition")
        D = _solve(-slope_jump, right.slope, abs(right.slope), "Omega2 slope condition")
        return C, D
    flux_jump = flux(mode, z1) - flux(mode, z2)
    C = _solve(flux_jump, *_flux_coeff(mode, left), "Omega1 flux condition")
    if kind is Neumann.FLUX_SLOPE:
        D = _solve(-slope_jump, right.slope, abs(right.slope), "Omega2 slope condition")
    else:
        D = _solve(-flux_jump, *_flux_coeff(mode, right), "Omega2 flux condition")
    return C, D


def update_step(
    variant: Variant, mode: Mode, state: InterfaceState, C: float, D: float, theta1: float, theta2: float | None = None
) -> InterfaceState:
    """Relax the interface data with the correction traces."""
    return _update(variant, mode, state, C, D, theta1, theta2, _basis_traces(mode))


def _update(variant, mode, state, C, D, theta1, theta2, basis):
    _check_state(variant, state)
    if theta2 is None:
        theta2 = theta1
    left, right = basis
    psi1, psi2 = C * left, D * right
    value_sum = psi1.value + psi2.value
    robin_sum = robin(mode, psi1) + robin(mode, psi2)
    kind = variant.recipe.update
    if kind is Update.VALUE:
        return InterfaceState(state.f - theta1 * value_sum)
    if kind is Update.ROBIN:
        return InterfaceState(state.f - theta1 * robin_sum)
    if kind is Update.ROBIN_VALUE_PAIR:
        return InterfaceState(state.f - theta1 * robin_sum, state.g - theta2 * value_sum)
    return InterfaceState(state.f - theta1 * value_sum, state.g - theta2 * value_sum)


@dataclass(frozen=True)
class SubdomainSolution:
    """Amplitudes of one sweep with respect to the scaled bases
    e^{-a} sinh(sigma t) and e^{-b} (sigma cosh(sigma (T - t)) + ...).

    ``A``..``D`` convert to the printed normalisation; they underflow to zero
    once sigma alpha or sigma (T - alpha) exceeds ~745.
    """

    As: float
    Bs: float
    Cs: float
    Ds: float
    mode: Mode

    @property
    def A(self):
        return self.As * math.exp(-self.mode.a)

    @property
    def B(self):
        return self.Bs * math.exp(-self.mode.b)

    @property
    def C(self):
        return self.Cs * math.exp(-self.mode.a)

    @property
    def D(self):
        return self.Ds * math.exp(-self.mode.b)

    def traces(self) -> dict[str, Trace]:
        """Interface traces of z1, z2, psi1, psi2 and of the duals mu, phi.

        Duals come from mu = nu (z' + d z) and mu' = z + d mu = nu (sigma^2 z + d z').
        """
        left, right = _scaled_traces(self.mode)
        nu = self.mode.problem.nu
        out = {"z1": self.As * left, "z2": self.Bs * right, "psi1": self.Cs * left, "psi2": self.Ds * right}
        for primal, dual in (("z1", "mu1"), ("z2", "mu2"), ("psi1", "phi1"), ("psi2", "phi2")):
            tr = out[primal]
            out[dual] = Trace(nu * robin(self.mode, tr), nu * flux(self.mode, tr))
        return out


def sweep(
    variant: Variant, mode: Mode, state: InterfaceState, theta1: float, theta2: float | None = None
) -> tuple[InterfaceState, SubdomainSolution]:
    """One Dirichlet, Neumann, update cycle (scaled bases, any eigenvalue size)."""
    basis = _scaled_traces(mode)
    A, B = _dirichlet(variant, mode, state, basis)
    C, D = _neumann(variant, mode, A, B, basis)
    new = _update(variant, mode, state, C, D, theta1, theta2, basis)
    return new, SubdomainSolution(A, B, C, D, mode)


@dataclass
class IterationTrace:
    variant: Variant
    d: float
    history: list[tuple[int, float, float | None, float]] = field(default_factory=list)
    converged: bool = False
    diverged: bool = False
    rho_observed: float = math.nan

    @property
    def iterations(self) -> int:
        return self.history[-1][0] if self.history else 0

    @property
    def error_norms(self) -> np.ndarray:
        return np.array([row[3] for row in self.history])


DIVERGENCE_BOUND = 1e12


def _observed_rate(norms: list[float]) -> float:
    steps = len(norms) - 1
    if steps < 1:
        return 0.0
    tail = max(1, steps // 2)
    first, last = norms[-1 - tail], norms[-1]
    if first == 0.0 or last == 0.0:
        return 0.0
    return (last / first) ** (1.0 / tail)


def run(
    variant: Variant,
    mode: Mode,
    init: InterfaceState | None = None,
    theta1: float = 0.5,
    theta2: float | None = None,
    max_iter: int = 100,
    tol: float = 1e-10,
) -> IterationTrace:
    """Iterate sweeps until the interface error drops by ``tol`` or blows up.

    The error equation has the zero solution, so the interface data themselves
    are the error. ``rho_observed`` is the geometric mean of the per-step norm
    ratios over the trailing half of the iterations. The default start is
    f = 1 (and g = 1). For the raw formulations f = g is an invariant line that
    misses the unit eigenvalue; pass a generic ``init`` to see them stall.
    """
    if max_iter < 2:
        raise ValueError("max_iter must be >= 2")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if init is None:
        init = InterfaceState(1.0, 1.0) if variant.two_unknowns else InterfaceState(1.0)
    _check_state(variant, init)
    trace = IterationTrace(variant, float(mode.d))
    norm0 = init.norm()
    trace.history.append((0, init.f, init.g, norm0))
    if norm0 == 0.0:
        trace.converged = True
        trace.rho_observed = 0.0
        return trace
    state = init
    norms = [norm0]
    for k in range(1, max_iter + 1):
        state, _ = sweep(variant, mode, state, theta1, theta2)
        norm = state.norm()
        norms.append(norm)
        trace.history.append((k, state.f, state.g, norm))
        if not math.isfinite(norm) or norm > DIVERGENCE_BOUND * norm0:
            trace.diverged = True
            break
        if norm <= tol * norm0:
            trace.converged = True
            break
    trace.rho_observed = _observed_rate(norms)
    return trace


class SpectrumRunError(RuntimeError):
    def __init__(self, failures: dict[float, Exception], traces: list):
        self.failures = failures
        self.traces = traces
        detail = "; ".join(f"d={d:.6g}: {exc}" for d, exc in failures.items())
        super().__init__(f"{len(failures)} mode(s) failed: {detail}")


def thread_count() -> int:
    raw = os.environ.get("TDDNN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_spectrum(
    variant: Variant,
    spectrum: Spectrum,
    problem: ControlProblem,
    theta1: float = 0.5,
    theta2: float | None = None,
    max_iter: int = 100,
    tol: float = 1e-10,
    init: InterfaceState | None = None,
) -> list[IterationTrace]:
    """:func:`run` for every eigenvalue; modes are independent.

    Failing modes are collected and reported together in a SpectrumRunError.
    """

    def one(d):
        try:
            return run(variant, mode_params(problem, d), init, theta1, theta2, max_iter, tol)
        except (ArithmeticError, ValueError) as exc:
            return exc

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        results = list(pool.map(one, spectrum.eigenvalues))
    failures = {d: r for d, r in zip(spectrum.eigenvalues, results) if isinstance(r, Exception)}
    traces = [r for r in results if not isinstance(r, Exception)]
    if failures:
        raise SpectrumRunError(failures, traces)
    return traces
