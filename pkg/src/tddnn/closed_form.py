"""Closed-form convergence analysis of the Neumann-Neumann variants.

All hyperbolic expressions are evaluated with the leading exponential factored
out: ``cosh x = e^x (1 + e^{-2x}) / 2`` and ``sinh x = e^x (1 - e^{-2x}) / 2``.
Every E/F coefficient is a ratio whose numerator carries e^{sigma T} and whose
denominator carries e^{a} e^{b} = e^{sigma T}, so the exponentials cancel and
nothing overflows, whatever the size of sigma T.

Functions accept a :class:`~tddnn.spectral.Mode` whose fields are floats or
numpy arrays; array modes give vectorised sweeps over a spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import ControlProblem, Mode, mode_params
from .variants import Variant

# sup of the high-frequency contraction factor is |1 - LIMIT * theta|
_INFINITY_SLOPE = {
    Variant.NN1b: 2.0,
    Variant.NN1c: 2.0,
    Variant.NN2a: 4.0,
    Variant.NN3a: 4.0,
    Variant.NN2c: 3.0,
    Variant.NN3c: 3.0,
}


def _sh(x):
    """sinh(x) * e^{-x}"""
    return -np.expm1(-2.0 * x) / 2.0


def _ch(x):
    """cosh(x) * e^{-x}"""
    return (1.0 + np.exp(-2.0 * x)) / 2.0


@dataclass(frozen=True)
class _Terms:
    """Scaled building blocks shared by the E/F displays of every variant."""

    P: object  # sigma cosh(sigma T) + omega sinh(sigma T)
    r: object  # sigma cosh b + omega sinh b
    Q: object  # sigma sinh b + omega cosh b
    Da: object  # sigma cosh a + d sinh a
    Sa: object  # sigma sinh a + d cosh a
    sha: object  # sinh a
    cha: object  # cosh a
    Gs: object  # sigma gamma sinh b + beta cosh b
    Gc: object  # sigma gamma cosh b + beta sinh b


def _terms(mode: Mode) -> _Terms:
    s, w, d = mode.sigma, mode.omega, mode.d
    gamma, nu = mode.problem.gamma, mode.problem.nu
    a, b = mode.a, mode.b
    sT = a + b
    shb, chb = _sh(b), _ch(b)
    sha, cha = _sh(a), _ch(a)
    # sigma*gamma + beta = 1 + gamma (sigma - d), which cancels badly for large d
    sg_plus_beta = 1.0 + gamma * mode.sigma_minus_d
    eb = np.exp(-2.0 * b)
    return _Terms(
        P=s * _ch(sT) + w * _sh(sT),
        r=s * chb + w * shb,
        Q=s * shb + w * chb,
        Da=s * cha + d * sha,
        Sa=s * sha + d * cha,
        sha=sha,
        cha=cha,
        Gs=(sg_plus_beta + eb * (mode.beta - s * gamma)) / 2.0,
        Gc=(sg_plus_beta + eb * (s * gamma - mode.beta)) / 2.0,
    )


@dataclass(frozen=True)
class EFPair:
    E: float | np.ndarray
    F: float | np.ndarray


def _check_mode(mode: Mode):
    for name in ("d", "sigma", "omega", "beta", "a", "b"):
        if not np.all(np.isfinite(getattr(mode, name))):
            raise ValueError(f"mode field {name} is not finite")


def ef_coefficients(variant: Variant, mode: Mode) -> EFPair:
    """The E and F coefficients of ``variant`` for one (or an array of) mode(s).

    The analysis-only formulations reuse the coefficients of the algorithm they
    modify: Raw1b those of NN1b, Raw1c those of NN1c, PairNN2a those of NN2a.
    """
    _check_mode(mode)
    t = _terms(mode)
    key = {Variant.Raw1b: Variant.NN1b, Variant.Raw1c: Variant.NN1c, Variant.PairNN2a: Variant.NN2a}.get(
        variant, variant
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        if key is Variant.NN1a:
            E, F = t.P / (t.Q * t.Da), t.P / (t.r * t.Sa)
        elif key is Variant.NN1b:
            E, F = t.P / (t.Q * t.Da), t.P / (t.r * t.cha)
        elif key is Variant.NN1c:
            E, F = t.P / (t.Gs * t.Da), t.P / (t.r * t.Sa)
        elif key is Variant.NN2a:
            E, F = t.P / (t.Q * t.sha), t.P / (t.r * t.cha)
        elif key is Variant.NN2b:
            E, F = t.P / (t.Gs * t.sha), t.P / (t.r * t.Sa)
        elif key is Variant.NN2c:
            E, F = t.P / (t.Q * t.sha), t.P / (t.r * t.Sa)
        elif key is Variant.NN3a:
            E, F = t.P / (t.Gs * t.Da), t.P / (t.Gc * t.Sa)
        elif key is Variant.NN3b:
            E, F = t.P / (t.Q * t.Da), t.P / (t.Gc * t.cha)
        elif key is Variant.NN3c:
            E, F = t.P / (t.Q * t.Da), t.P / (t.Gc * t.Sa)
        else:  # pragma: no cover
            raise ValueError(f"unsupported variant {variant}")
    return EFPair(E, F)


def divergence_margin(variant: Variant, mode: Mode):
    """F - nu E for NN2b, E - nu F for NN3b, in factorised form.

    Both equal -nu d P^2 / (positive product), hence are <= 0 for every mode.
    The factorised form keeps the sign exact where the plain difference of E
    and F would cancel (d -> 0).
    """
    _check_mode(mode)
    t = _terms(mode)
    nu, d = mode.problem.nu, mode.d
    with np.errstate(divide="ignore", invalid="ignore"):
        if variant is Variant.NN2b:
            return -nu * d * t.P * t.P / (t.Sa * t.sha * t.Gs * t.r)
        if variant is Variant.NN3b:
            return -nu * d * t.P * t.P / (t.Q * t.Da * t.Gc * t.cha)
    raise ValueError(f"divergence margin is defined for NN2b and NN3b only, not {variant}")


def sweep_factor(variant: Variant, mode: Mode, theta):
    """Signed one-sweep multiplier f^k = factor * f^{k-1} of a single-theta variant."""
    if variant.has_matrix:
        raise ValueError(f"{variant} has a 2x2 iteration matrix; use iteration_matrix")
    ef = ef_coefficients(variant, mode)
    E, F = ef.E, ef.F
    nu, d = mode.problem.nu, mode.d
    if variant in (Variant.NN1b, Variant.NN2a, Variant.NN3a):
        return 1.0 - theta * (E + F)
    if variant is Variant.NN1c:
        return 1.0 - theta * (E - F / nu)
    if variant is Variant.NN2c:
        return 1.0 - theta * (E + d * F)
    if variant is Variant.NN3c:
        return 1.0 - theta * (d * E + F)
    # NN2b, NN3b
    return 1.0 - theta * d * divergence_margin(variant, mode)


@dataclass(frozen=True)
class IterationMatrix2x2:
    """Map (f^{k-1}, g^{k-1}) -> (f^k, g^k); entries may be arrays."""

    m11: object
    m12: object
    m21: object
    m22: object

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=float)

    def eigenvalues(self):
        """((re1, im1), (re2, im2)) from the characteristic quadratic.

        The discriminant is formed as ((m11 - m22)/2)^2 + m12 m21, which avoids
        the cancellation of trace^2/4 - det, and the smaller real root comes
        from det / larger root.
        """
        m11, m12, m21, m22 = (np.asarray(x, dtype=float) for x in (self.m11, self.m12, self.m21, self.m22))
        half_trace = (m11 + m22) / 2.0
        det = m11 * m22 - m12 * m21
        disc = ((m11 - m22) / 2.0) ** 2 + m12 * m21
        real = disc >= 0
        root = np.sqrt(np.abs(disc))
        big = half_trace + np.copysign(root, half_trace)
        with np.errstate(divide="ignore", invalid="ignore"):
            small = np.where(big != 0, det / np.where(big != 0, big, 1.0), half_trace - np.copysign(root, half_trace))
        re1 = np.where(real, big, half_trace)
        re2 = np.where(real, small, half_trace)
        im1 = np.where(real, 0.0, root)
        im2 = np.where(real, 0.0, -root)
        if re1.ndim == 0:
            return (float(re1), float(im1)), (float(re2), float(im2))
        return (re1, im1), (re2, im2)

    def spectral_radius(self):
        (re1, im1), (re2, im2) = self.eigenvalues()
        return np.maximum(np.hypot(re1, im1), np.hypot(re2, im2))


def iteration_matrix(variant: Variant, mode: Mode, theta1, theta2=None) -> IterationMatrix2x2:
    """Iteration matrix of the two-unknown formulations (NN1a, Raw1b, Raw1c, PairNN2a)."""
    if not variant.has_matrix:
        raise ValueError(f"{variant} has a scalar iteration factor, not a matrix")
    if theta2 is None:
        theta2 = theta1
    if not (np.all(np.isfinite(theta1)) and np.all(np.isfinite(theta2))):
        raise ValueError("relaxation parameters must be finite")
    ef = ef_coefficients(variant, mode)
    E, F = ef.E, ef.F
    nu, d = mode.problem.nu, mode.d
    t1, t2 = theta1, theta2
    if variant is Variant.NN1a:
        return IterationMatrix2x2(1 - t1 * d * E, t1 * F / nu, -t2 * E, 1 - t2 * d * F)
    if variant is Variant.Raw1b:
        return IterationMatrix2x2(1 - t1 * d * E, -t1 * d * F, -t2 * E, 1 - t2 * F)
    if variant is Variant.Raw1c:
        return IterationMatrix2x2(1 - t1 * E, t1 * F / nu, t2 * nu * d * E, 1 - t2 * d * F)
    return IterationMatrix2x2(1 - t1 * E, -t1 * F, -t2 * E, 1 - t2 * F)


def convergence_factor(variant: Variant, mode: Mode, theta1, theta2=None):
    """Per-mode contraction: |sweep factor|, or the spectral radius for matrix variants."""
    if not np.all(np.isfinite(theta1)) or (theta2 is not None and not np.all(np.isfinite(theta2))):
        raise ValueError("relaxation parameters must be finite")
    if variant.has_matrix:
        return iteration_matrix(variant, mode, theta1, theta2).spectral_radius()
    return np.abs(sweep_factor(variant, mode, theta1))


def rho_over(variant: Variant, problem: ControlProblem, eigenvalues, theta1, theta2=None) -> np.ndarray:
    """Convergence factor evaluated over an array of eigenvalues."""
    mode = mode_params(problem, np.asarray(eigenvalues, dtype=float))
    return np.asarray(convergence_factor(variant, mode, theta1, theta2), dtype=float)


# --- limits d -> 0 and d -> infinity -------------------------------------


@dataclass(frozen=True)
class _ZeroTerms:
    q: float
    ta: float
    tb: float
    ca: float
    cb: float
    gq: float

    @property
    def coth_ratio(self):
        return self.ca * (self.cb + self.gq) / (1.0 + self.gq * self.cb)

    @property
    def tanh_ratio(self):
        return self.ta * (self.tb + self.gq) / (1.0 + self.gq * self.tb)


def _zero_terms(problem: ControlProblem) -> _ZeroTerms:
    q = math.sqrt(1.0 / problem.nu)
    ta = math.tanh(q * problem.alpha)
    tb = math.tanh(q * (problem.T - problem.alpha))
    return _ZeroTerms(q=q, ta=ta, tb=tb, ca=1.0 / ta, cb=1.0 / tb, gq=problem.gamma * q)


def zero_eigenvalue_sum(variant: Variant, problem: ControlProblem) -> float:
    """Closed form of the quantity multiplied by theta at d = 0.

    For NN1a this is nu^{-1} E F at d = 0, the term under the square root of
    the complex eigenvalue pair.
    """
    z = _zero_terms(problem)
    if variant in (Variant.NN1a, Variant.NN2a, Variant.NN3a):
        return 2.0 + z.coth_ratio + z.tanh_ratio
    if variant in (Variant.NN2c, Variant.NN3c):
        return 1.0 + z.coth_ratio
    if variant is Variant.NN1b:
        return 1.0 + math.sqrt(problem.nu) * (z.ta + (1.0 + z.gq * z.tb) / (z.gq + z.tb)) + z.tanh_ratio
    if variant is Variant.NN1c:
        return 1.0 + z.tanh_ratio - z.q * (z.ca + (z.gq + z.tb) / (1.0 + z.gq * z.tb))
    if variant in (Variant.NN2b, Variant.NN3b):
        return 0.0
    raise ValueError(f"no zero-eigenvalue formula for {variant}")


@dataclass(frozen=True)
class RhoLimits:
    at_zero: float
    at_infinity: float
    divergent: bool


def rho_limits(variant: Variant, problem: ControlProblem, theta1, theta2=None) -> RhoLimits:
    """Convergence factor at d = 0 and its limit as d -> infinity."""
    if variant.analysis_only:
        raise ValueError(f"{variant} is an analysis-only formulation")
    if not math.isfinite(theta1) or (theta2 is not None and not math.isfinite(theta2)):
        raise ValueError("relaxation parameters must be finite")
    x0 = zero_eigenvalue_sum(variant, problem)
    if variant is Variant.NN1a:
        t2 = theta1 if theta2 is None else theta2
        prod = theta1 * t2 * x0
        # eigenvalues 1 +- sqrt(-prod)
        at_zero = math.sqrt(1.0 + prod) if prod >= 0 else 1.0 + math.sqrt(-prod)
        at_inf = max(abs(1.0 - theta1), abs(1.0 - t2))
        return RhoLimits(at_zero, at_inf, False)
    at_zero = abs(1.0 - theta1 * x0)
    if variant in (Variant.NN2b, Variant.NN3b):
        return RhoLimits(at_zero, math.inf if theta1 != 0 else 1.0, theta1 != 0)
    return RhoLimits(at_zero, abs(1.0 - _INFINITY_SLOPE[variant] * theta1), False)


# --- equioscillation ------------------------------------------------------


@dataclass(frozen=True)
class Equioscillation:
    variant: Variant
    theta: float
    valid: bool
    rho_at_zero: float
    rho_at_infinity: float

    @property
    def converges(self) -> bool:
        return self.valid and max(self.rho_at_zero, self.rho_at_infinity) < 1.0


def theta_equioscillation(variant: Variant, problem: ControlProblem) -> Equioscillation:
    """Relaxation parameter equalising the d = 0 and d -> infinity factors.

    NN3a and NN3c share the values of NN2a and NN2c. ``valid`` is False when the
    formula yields theta <= 0 (possible for NN1c), in which case no positive
    relaxation balances the two ends.
    """
    z = _zero_terms(problem)
    if variant is Variant.NN1b:
        theta = 2.0 / (
            3.0 + math.sqrt(problem.nu) * (z.ta + (1.0 + z.gq * z.tb) / (z.gq + z.tb)) + z.tanh_ratio
        )
    elif variant is Variant.NN1c:
        theta = 2.0 / (3.0 + z.tanh_ratio - z.q * (z.ca + (z.gq + z.tb) / (1.0 + z.gq * z.tb)))
    elif variant in (Variant.NN2a, Variant.NN3a):
        theta = 2.0 / (6.0 + z.coth_ratio + z.tanh_ratio)
    elif variant in (Variant.NN2c, Variant.NN3c):
        theta = 2.0 / (4.0 + z.coth_ratio)
    else:
        raise ValueError(f"no equioscillation formula for {variant}")
    limits = rho_limits(variant, problem, theta)
    valid = theta > 0
    if valid and abs(limits.at_zero - limits.at_infinity) > 1e-8:
        raise ArithmeticError(
            f"{variant}: equioscillation check failed ({limits.at_zero} vs {limits.at_infinity})"
        )
    return Equioscillation(variant, theta, valid, limits.at_zero, limits.at_infinity)
