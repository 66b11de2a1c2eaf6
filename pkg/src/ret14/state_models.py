"""State equations p(rho, T), e(rho, T) with Gibbs-consistent entropy.

Built-in models:

* :class:`JuttnerModel`, the relativistic monatomic ideal gas with
  e = rho c^2 (G - 1/gamma), p = rho c^2 / gamma, G = K3/K2,
  gamma = m c^2 / (k_B T).
* :class:`PolyatomicModel`, the one-function family e = rho c^2 omega(gamma),
  p = rho c^2 / gamma, with omega supplied in closed form or as a spline
  table in gamma.
* :class:`UserModel`, arbitrary p and specific internal energy callables;
  missing derivatives are filled by central finite differences and entropy
  is obtained by path integration of the Gibbs form, gated by an
  integrability check.

Entropy always satisfies T dS = d(eps) - (p/rho^2) d(rho), so
S_T = eps_T / T and S_rho = (eps_rho - p/rho^2) / T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .bessel import bessel_k_scaled, bessel_ratio_g, bessel_ratio_g_prime

__all__ = [
    "PhysicalConstants",
    "ThermalState",
    "StateEvaluation",
    "StateModel",
    "JuttnerModel",
    "PolyatomicModel",
    "UserModel",
    "EvaluationError",
    "IntegrabilityError",
    "evaluate",
    "gibbs_entropy",
    "model_from_config",
]

# step factor for central differences, cube root of machine epsilon
_FD_REL_STEP = float(np.cbrt(np.finfo(float).eps))


class EvaluationError(ValueError):
    """Model undefined at the requested state; carries the coordinate."""

    def __init__(self, message, rho=None, T=None, gamma=None):
        super().__init__(message)
        self.rho = rho
        self.T = T
        self.gamma = gamma


class IntegrabilityError(ValueError):
    """The supplied (p, eps) pair violates Gibbs integrability."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Light speed, particle rest mass and Boltzmann constant.

    Natural units c = m = k_B = 1 by default; the classical-limit module
    sweeps c explicitly.
    """

    c: float = 1.0
    m: float = 1.0
    k_B: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.m > 0 and self.k_B > 0):
            raise ValueError("all physical constants must be strictly positive")

    @property
    def theta(self) -> float:
        """Specific gas constant k_B / m."""
        return self.k_B / self.m

    def gamma(self, T: float) -> float:
        """Relativistic coldness m c^2 / (k_B T)."""
        return self.m * self.c**2 / (self.k_B * T)


@dataclass(frozen=True)
class ThermalState:
    """Rest-frame mass density and absolute temperature."""

    rho: float
    T: float

    def __post_init__(self):
        if not (self.rho > 0 and self.T > 0):
            raise ValueError(f"state requires rho > 0 and T > 0, got ({self.rho}, {self.T})")


@dataclass(frozen=True)
class StateEvaluation:
    """All state functions and first derivatives at one (rho, T) point.

    e = rho (c^2 + eps) holds exactly; ``gibbs_residual`` is the defect of
    e_rho - (e + p - T p_T)/rho, which vanishes for Gibbs-integrable models.
    Stability indicators are reported, not enforced.
    """

    p: float
    e: float
    eps: float
    S: float
    p_rho: float
    p_T: float
    e_rho: float
    e_T: float
    eps_rho: float
    eps_T: float
    S_rho: float
    S_T: float
    gibbs_residual: float
    p_rho_positive: bool
    e_T_positive: bool

    @property
    def c_V(self) -> float:
        return self.eps_T


def _central(f, x, rel=_FD_REL_STEP):
    h = rel * max(abs(x), 1e-30)
    return (f(x + h) - f(x - h)) / (2.0 * h)


class StateModel:
    """Base state model: p and eps required, the rest has FD fallbacks."""

    name = "user"

    def pressure(self, rho, T, constants):
        raise NotImplementedError

    def internal_energy(self, rho, T, constants):
        raise NotImplementedError

    def pressure_rho(self, rho, T, constants):
        return _central(lambda r: self.pressure(r, T, constants), rho)

    def pressure_T(self, rho, T, constants):
        return _central(lambda t: self.pressure(rho, t, constants), T)

    def internal_energy_rho(self, rho, T, constants):
        return _central(lambda r: self.internal_energy(r, T, constants), rho)

    def internal_energy_T(self, rho, T, constants):
        return _central(lambda t: self.internal_energy(rho, t, constants), T)

    def entropy(self, rho, T, constants):
        raise NotImplementedError


class JuttnerModel(StateModel):
    """Monatomic relativistic ideal gas (non-degenerate)."""

    name = "juttner"

    def pressure(self, rho, T, constants):
        return rho * constants.theta * T

    def pressure_rho(self, rho, T, constants):
        return constants.theta * T

    def pressure_T(self, rho, T, constants):
        return rho * constants.theta

    def internal_energy(self, rho, T, constants):
        g = constants.gamma(T)
        return constants.c**2 * (bessel_ratio_g(g) - 1.0 / g - 1.0)

    def internal_energy_rho(self, rho, T, constants):
        return 0.0

    def internal_energy_T(self, rho, T, constants):
        # d(eps)/dT = c^2 (G' + 1/gamma^2) dgamma/dT with dgamma/dT = -gamma/T
        g = constants.gamma(T)
        gp = bessel_ratio_g_prime(g)
        return -constants.c**2 * (g / T) * (gp + 1.0 / g**2)

    def entropy(self, rho, T, constants):
        # S = theta (gamma G + ln K2 - ln gamma - ln rho), with
        # ln K2 = ln(e^gamma K2) - gamma to avoid underflow
        g = constants.gamma(T)
        big_g = bessel_ratio_g(g)
        ln_k2 = math.log(bessel_k_scaled(2, g)) - g
        return constants.theta * (g * big_g + ln_k2 - math.log(g) - math.log(rho))


class PolyatomicModel(StateModel):
    """One-function family e = rho c^2 omega(gamma), p = rho c^2 / gamma.

    ``omega`` may be a closed form (with derivatives and an antiderivative
    for the entropy) or a cubic-spline table in gamma; spline models raise
    :class:`EvaluationError` outside the tabulated range.
    """

    name = "polyatomic"

    def __init__(self, omega, omega_prime, omega_pp=None, omega_int=None,
                 gamma_range=None):
        self._omega = omega
        self._omega_prime = omega_prime
        self._omega_pp = omega_pp
        self._omega_int = omega_int
        self.gamma_range = gamma_range

    @classmethod
    def from_table(cls, gammas, omegas):
        """Cubic-spline omega through (gamma, omega) pairs."""
        gammas = np.asarray(gammas, dtype=float)
        omegas = np.asarray(omegas, dtype=float)
        if gammas.ndim != 1 or gammas.size < 4 or np.any(np.diff(gammas) <= 0):
            raise ValueError("omega table needs >= 4 strictly increasing gamma knots")
        spline = CubicSpline(gammas, omegas)
        return cls(
            omega=spline,
            omega_prime=spline.derivative(1),
            omega_pp=spline.derivative(2),
            omega_int=spline.antiderivative(),
            gamma_range=(float(gammas[0]), float(gammas[-1])),
        )

    @classmethod
    def juttner_omega(cls):
        """omega = G - 1/gamma, reproducing the monatomic caloric equation."""

        def omega(g):
            return bessel_ratio_g(g) - 1.0 / g

        def omega_prime(g):
            return bessel_ratio_g_prime(g) + 1.0 / g**2

        def omega_pp(g):
            big_g = bessel_ratio_g(g)
            gp = bessel_ratio_g_prime(g)
            gpp = 2.0 * big_g * gp - 5.0 * gp / g + 5.0 * big_g / g**2
            return gpp - 2.0 / g**3

        def omega_int(g):
            # int G dgamma = 2 ln gamma - ln K2, so int omega = ln gamma - ln K2
            return math.log(g) - (math.log(bessel_k_scaled(2, g)) - g)

        return cls(omega, omega_prime, omega_pp, omega_int)

    def _check_range(self, g, rho=None, T=None):
        if self.gamma_range is not None:
            lo, hi = self.gamma_range
            if not lo <= g <= hi:
                raise EvaluationError(
                    f"gamma = {g:.6g} outside tabulated omega range [{lo:.6g}, {hi:.6g}]",
                    rho=rho, T=T, gamma=g,
                )

    def omega(self, g):
        self._check_range(g)
        return float(self._omega(g))

    def omega_prime(self, g):
        self._check_range(g)
        return float(self._omega_prime(g))

    def omega_pp(self, g):
        if self._omega_pp is None:
            return _central(self.omega_prime, g)
        self._check_range(g)
        return float(self._omega_pp(g))

    def pressure(self, rho, T, constants):
        return rho * constants.theta * T

    def pressure_rho(self, rho, T, constants):
        return constants.theta * T

    def pressure_T(self, rho, T, constants):
        return rho * constants.theta

    def internal_energy(self, rho, T, constants):
        g = constants.gamma(T)
        self._check_range(g, rho, T)
        return constants.c**2 * (self.omega(g) - 1.0)

    def internal_energy_rho(self, rho, T, constants):
        return 0.0

    def internal_energy_T(self, rho, T, constants):
        g = constants.gamma(T)
        self._check_range(g, rho, T)
        return -constants.c**2 * (g / T) * self.omega_prime(g)

    def entropy(self, rho, T, constants):
        # S = theta (gamma omega - int omega dgamma - ln rho)
        g = constants.gamma(T)
        self._check_range(g, rho, T)
        if self._omega_int is None:
            raise EvaluationError("omega antiderivative unavailable", rho=rho, T=T, gamma=g)
        return constants.theta * (g * self.omega(g) - float(self._omega_int(g)) - math.log(rho))


class UserModel(StateModel):
    """State model from user callables p(rho, T) and eps(rho, T).

    Optional analytic derivatives override the finite-difference fallback.
    Entropy, unless supplied, is integrated along (rho at T_ref, then T at
    rho) from ``reference``, where it is set to zero.
    """

    name = "user"

    def __init__(self, pressure, internal_energy, p_rho=None, p_T=None,
                 eps_rho=None, eps_T=None, entropy=None,
                 reference=ThermalState(1.0, 1.0)):
        self._p = pressure
        self._eps = internal_energy
        self._p_rho = p_rho
        self._p_T = p_T
        self._eps_rho = eps_rho
        self._eps_T = eps_T
        self._entropy = entropy
        self.reference = reference

    def pressure(self, rho, T, constants):
        return self._p(rho, T)

    def internal_energy(self, rho, T, constants):
        return self._eps(rho, T)

    def pressure_rho(self, rho, T, constants):
        if self._p_rho is not None:
            return self._p_rho(rho, T)
        return super().pressure_rho(rho, T, constants)

    def pressure_T(self, rho, T, constants):
        if self._p_T is not None:
            return self._p_T(rho, T)
        return super().pressure_T(rho, T, constants)

    def internal_energy_rho(self, rho, T, constants):
        if self._eps_rho is not None:
            return self._eps_rho(rho, T)
        return super().internal_energy_rho(rho, T, constants)

    def internal_energy_T(self, rho, T, constants):
        if self._eps_T is not None:
            return self._eps_T(rho, T)
        return super().internal_energy_T(rho, T, constants)

    def entropy(self, rho, T, constants):
        if self._entropy is not None:
            return self._entropy(rho, T)
        r0, t0 = self.reference.rho, self.reference.T

        def s_rho(r, t):
            return (self.internal_energy_rho(r, t, constants)
                    - self.pressure(r, t, constants) / r**2) / t

        def s_T(r, t):
            return self.internal_energy_T(r, t, constants) / t

        leg_rho, _ = quad(lambda r: s_rho(r, t0), r0, rho, limit=200)
        leg_T, _ = quad(lambda t: s_T(rho, t), t0, T, limit=200)
        return leg_rho + leg_T


def _gibbs_residual(p, e, p_T, e_rho, rho, T):
    return e_rho - (e + p - T * p_T) / rho


def evaluate(model: StateModel, state: ThermalState,
             constants: PhysicalConstants = PhysicalConstants()) -> StateEvaluation:
    """Evaluate a state model: all fields of :class:`StateEvaluation`.

    Derivatives are analytic when the model provides them, otherwise
    central finite differences with a cube-root-of-epsilon relative step.
    """
    rho, T = state.rho, state.T
    c2 = constants.c**2
    p = model.pressure(rho, T, constants)
    eps = model.internal_energy(rho, T, constants)
    e = rho * (c2 + eps)
    p_rho = model.pressure_rho(rho, T, constants)
    p_T = model.pressure_T(rho, T, constants)
    eps_rho = model.internal_energy_rho(rho, T, constants)
    eps_T = model.internal_energy_T(rho, T, constants)
    e_rho = c2 + eps + rho * eps_rho
    e_T = rho * eps_T
    S = model.entropy(rho, T, constants)
    S_T = eps_T / T
    S_rho = (eps_rho - p / rho**2) / T
    return StateEvaluation(
        p=p, e=e, eps=eps, S=S,
        p_rho=p_rho, p_T=p_T, e_rho=e_rho, e_T=e_T,
        eps_rho=eps_rho, eps_T=eps_T, S_rho=S_rho, S_T=S_T,
        gibbs_residual=_gibbs_residual(p, e, p_T, e_rho, rho, T),
        p_rho_positive=bool(p_rho > 0), e_T_positive=bool(e_T > 0),
    )


def gibbs_entropy(model: StateModel, state: ThermalState,
                  constants: PhysicalConstants = PhysicalConstants(),
                  integrability_tol: float = 1e-6):
    """Entropy per mass with its derivatives (S, S_rho, S_T).

    S_T = eps_T / T and S_rho = (eps_rho - p/rho^2)/T.  The Gibbs form is
    only a total differential when e_rho = (e + p - T p_T)/rho; a relative
    defect beyond ``integrability_tol`` raises :class:`IntegrabilityError`.
    """
    ev = evaluate(model, state, constants)
    scale = max(abs(ev.e_rho), ev.p / state.rho, 1e-300)
    if abs(ev.gibbs_residual) > integrability_tol * scale:
        raise IntegrabilityError(
            f"Gibbs integrability defect {ev.gibbs_residual:.3e} exceeds "
            f"{integrability_tol:.1e} x {scale:.3e} at (rho, T) = "
            f"({state.rho:.6g}, {state.T:.6g})"
        )
    return ev.S, ev.S_rho, ev.S_T


def model_from_config(config: dict):
    """Build (model, constants) from the JSON model block.

    Accepted kinds: "juttner", "polyatomic_pr", "polyatomic_acpr".
    Polyatomic kinds take an "omega_table" of [gamma, omega] rows and fall
    back to the closed-form monatomic omega when the table is omitted.
    User models are constructed through the library API, not from JSON.
    """
    kind = config.get("model", "juttner")
    const_cfg = config.get("constants", {})
    constants = PhysicalConstants(
        c=float(const_cfg.get("c", 1.0)),
        m=float(const_cfg.get("m", 1.0)),
        k_B=float(const_cfg.get("k_B", 1.0)),
    )
    if kind == "juttner":
        return JuttnerModel(), constants
    if kind in ("polyatomic_pr", "polyatomic_acpr"):
        table = config.get("omega_table")
        if table:
            table = np.asarray(table, dtype=float)
            model = PolyatomicModel.from_table(table[:, 0], table[:, 1])
        else:
            model = PolyatomicModel.juttner_omega()
        return model, constants
    if kind == "user":
        raise ValueError("user models are library-only; construct UserModel directly")
    raise ValueError(f"unknown model kind {kind!r}")
