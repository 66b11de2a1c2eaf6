"""Equilibrium closure coefficients (a, b) and production coefficients.

The deviatoric equilibrium triple tensor is parameterized by two scalar
functions a(rho, T), b(rho, T).  The closure reproduces the Eckart
(Navier-Stokes-Fourier) equations in the first Maxwellian iterate exactly
when

    a = (1/4) { -b + (e + p - T p_T) b_rho / p_rho + T b_T },

and the production coefficients are then pinned to the transport
coefficients (chi, mu, nu):

    a1 = (b_rho p_T - b_T p_rho) / (p_rho chi)
    a2 = -b / mu
    a3 = -(4 / (c^2 nu)) [ a + (2/3) b - rho a_rho - (a_T / e_T) T p_T ].

Built-in closures: the monatomic ideal-gas closure (from G = K3/K2), the
one-function polyatomic closure, its linear-in-rho variant with a derived
from the compatibility relation, and the Geroch-Lindblom closure a = c1,
b = c2 T - 4 c1, which is compatible with every state model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bessel import bessel_ratio_g, bessel_ratio_g_prime
from .state_models import (
    PhysicalConstants,
    PolyatomicModel,
    StateModel,
    ThermalState,
    evaluate,
    _central,
)

__all__ = [
    "ClosureValues",
    "EquilibriumClosure",
    "CallableClosure",
    "MonatomicJuttnerClosure",
    "PolyatomicAcprClosure",
    "PolyatomicPrClosure",
    "GerochLindblomClosure",
    "PerturbedClosure",
    "TransportCoefficients",
    "ProductionCoefficients",
    "SingularDerivativeError",
    "MissingModelError",
    "compatibility_residual",
    "a_from_b",
    "production_coefficients",
    "heatflux_condition_residuals",
    "monatomic_production_closed_form",
    "polyatomic_production_closed_form",
    "lmr_symbol_map",
    "builtin_closure",
]


class SingularDerivativeError(ValueError):
    """p_rho (or another dividing quantity) vanishes at the requested state."""


class MissingModelError(ValueError):
    """A polyatomic closure was requested without an omega state model."""


@dataclass(frozen=True)
class ClosureValues:
    """a, b and their (rho, T) derivatives at one state."""

    a: float
    b: float
    a_rho: float
    a_T: float
    b_rho: float
    b_T: float


@dataclass(frozen=True)
class TransportCoefficients:
    """Heat conductivity chi, shear viscosity mu, bulk viscosity nu."""

    chi: float
    mu: float
    nu: float

    def __post_init__(self):
        if self.chi < 0 or self.mu < 0 or self.nu < 0:
            raise ValueError("transport coefficients must be non-negative")

    def __iter__(self):
        return iter((self.chi, self.mu, self.nu))


@dataclass(frozen=True)
class ProductionCoefficients:
    a1: float
    a2: float
    a3: float


class EquilibriumClosure:
    """Pair of scalar fields a(rho, T), b(rho, T) with first derivatives."""

    provenance = "user"

    def evaluate(self, state: ThermalState,
                 constants: PhysicalConstants = PhysicalConstants()) -> ClosureValues:
        raise NotImplementedError


class CallableClosure(EquilibriumClosure):
    """Closure from user callables a(rho, T), b(rho, T).

    Missing derivative callables fall back to central finite differences.
    """

    def __init__(self, a, b, a_rho=None, a_T=None, b_rho=None, b_T=None,
                 provenance="user"):
        self._a, self._b = a, b
        self._a_rho, self._a_T = a_rho, a_T
        self._b_rho, self._b_T = b_rho, b_T
        self.provenance = provenance

    def evaluate(self, state, constants=PhysicalConstants()):
        rho, T = state.rho, state.T
        a_rho = self._a_rho(rho, T) if self._a_rho else _central(lambda r: self._a(r, T), rho)
        a_T = self._a_T(rho, T) if self._a_T else _central(lambda t: self._a(rho, t), T)
        b_rho = self._b_rho(rho, T) if self._b_rho else _central(lambda r: self._b(r, T), rho)
        b_T = self._b_T(rho, T) if self._b_T else _central(lambda t: self._b(rho, t), T)
        return ClosureValues(a=self._a(rho, T), b=self._b(rho, T),
                             a_rho=a_rho, a_T=a_T, b_rho=b_rho, b_T=b_T)


class MonatomicJuttnerClosure(EquilibriumClosure):
    """Monatomic ideal-gas closure a = rho c^2 (1/4 + G/gamma), b = rho c^2 G/gamma."""

    provenance = "monatomic_juttner"

    def evaluate(self, state, constants=PhysicalConstants()):
        rho, T = state.rho, state.T
        c2 = constants.c**2
        g = constants.gamma(T)
        G = bessel_ratio_g(g)
        Gp = bessel_ratio_g_prime(g)
        # d(G/gamma)/dT = (G' gamma - G)/gamma^2 * (-gamma/T)
        dGog_dT = -(Gp * g - G) / (g * T)
        a = rho * c2 * (0.25 + G / g)
        b = rho * c2 * G / g
        return ClosureValues(
            a=a, b=b,
            a_rho=a / rho, a_T=rho * c2 * dGog_dT,
            b_rho=b / rho, b_T=rho * c2 * dGog_dT,
        )


class PolyatomicAcprClosure(EquilibriumClosure):
    """One-function polyatomic closure,

        a = (1/4) c^2 rho (1/gamma^2 + omega/gamma + omega^2 - omega'),
        b = c^2 rho (gamma omega + 1) / gamma^2.
    """

    provenance = "polyatomic_acpr"

    def __init__(self, model: PolyatomicModel):
        if not isinstance(model, PolyatomicModel):
            raise MissingModelError("polyatomic closure requires a PolyatomicModel")
        self.model = model

    def evaluate(self, state, constants=PhysicalConstants()):
        rho, T = state.rho, state.T
        c2 = constants.c**2
        g = constants.gamma(T)
        w = self.model.omega(g)
        wp = self.model.omega_prime(g)
        wpp = self.model.omega_pp(g)
        a_per_rho = 0.25 * c2 * (1.0 / g**2 + w / g + w * w - wp)
        b_per_rho = c2 * (g * w + 1.0) / g**2
        # d/dgamma of the per-rho factors, then dgamma/dT = -gamma/T
        da_dg = 0.25 * c2 * (-2.0 / g**3 + (wp * g - w) / g**2 + 2.0 * w * wp - wpp)
        db_dg = c2 * ((w + g * wp) / g**2 - 2.0 * (g * w + 1.0) / g**3)
        return ClosureValues(
            a=rho * a_per_rho, b=rho * b_per_rho,
            a_rho=a_per_rho, a_T=-rho * da_dg * g / T,
            b_rho=b_per_rho, b_T=-rho * db_dg * g / T,
        )


class PolyatomicPrClosure(EquilibriumClosure):
    """Linear-in-rho polyatomic closure b = rho c^2 beta(gamma) with a derived
    from the compatibility relation specialized to e = rho c^2 omega,
    p = rho c^2 / gamma:

        a = (1/4) { b (e/p - 1) + T b_T } = (1/4) rho c^2 { beta (gamma omega - 1) - gamma beta' }.

    ``beta`` defaults to (gamma omega + 1)/gamma^2, in which case a reduces
    to the one-function closure.
    """

    provenance = "polyatomic_pr"

    def __init__(self, model: PolyatomicModel, beta=None, beta_prime=None,
                 beta_pp=None):
        if not isinstance(model, PolyatomicModel):
            raise MissingModelError("polyatomic closure requires a PolyatomicModel")
        self.model = model
        if beta is None:
            def beta(g, _m=model):
                return (g * _m.omega(g) + 1.0) / g**2

            def beta_prime(g, _m=model):
                return (_m.omega(g) + g * _m.omega_prime(g)) / g**2 \
                    - 2.0 * (g * _m.omega(g) + 1.0) / g**3

            def beta_pp(g, _m=model):
                w, wp, wpp = _m.omega(g), _m.omega_prime(g), _m.omega_pp(g)
                return (2.0 * wp + g * wpp) / g**2 \
                    - 4.0 * (w + g * wp) / g**3 + 6.0 * (g * w + 1.0) / g**4
        elif beta_prime is None:
            beta_fn = beta

            def beta_prime(g):
                return _central(beta_fn, g)

        self._beta = beta
        self._beta_prime = beta_prime
        self._beta_pp = beta_pp

    def evaluate(self, state, constants=PhysicalConstants()):
        rho, T = state.rho, state.T
        c2 = constants.c**2
        g = constants.gamma(T)
        w = self.model.omega(g)
        wp = self.model.omega_prime(g)
        beta = self._beta(g)
        bp = self._beta_prime(g)
        bpp = self._beta_pp(g) if self._beta_pp else _central(self._beta_prime, g)
        a_per_rho = 0.25 * c2 * (beta * (g * w - 1.0) - g * bp)
        b_per_rho = c2 * beta
        da_dg = 0.25 * c2 * (bp * (g * w - 1.0) + beta * (w + g * wp) - bp - g * bpp)
        return ClosureValues(
            a=rho * a_per_rho, b=rho * b_per_rho,
            a_rho=a_per_rho, a_T=-rho * da_dg * g / T,
            b_rho=b_per_rho, b_T=-rho * c2 * bp * g / T,
        )


class GerochLindblomClosure(EquilibriumClosure):
    """a = c1, b = c2 T - 4 c1; compatible with every state model."""

    provenance = "geroch_lindblom"

    def __init__(self, c1: float = 0.0, c2: float = 1.0):
        self.c1 = c1
        self.c2 = c2

    def evaluate(self, state, constants=PhysicalConstants()):
        return ClosureValues(
            a=self.c1, b=self.c2 * state.T - 4.0 * self.c1,
            a_rho=0.0, a_T=0.0, b_rho=0.0, b_T=self.c2,
        )


class PerturbedClosure(EquilibriumClosure):
    """Wrap a closure with b scaled by a constant factor, a untouched.

    A factor 1 + delta injects a compatibility defect of size delta times
    the compatible a, which is the designed-failure knob of the verifier.
    """

    def __init__(self, base: EquilibriumClosure, b_factor: float):
        self.base = base
        self.b_factor = b_factor
        self.provenance = f"{base.provenance}*perturbed"

    def evaluate(self, state, constants=PhysicalConstants()):
        v = self.base.evaluate(state, constants)
        f = self.b_factor
        return ClosureValues(a=v.a, b=f * v.b, a_rho=v.a_rho, a_T=v.a_T,
                             b_rho=f * v.b_rho, b_T=f * v.b_T)


def a_from_b(b: float, b_rho: float, b_T: float, state: ThermalState,
             model: StateModel, constants: PhysicalConstants = PhysicalConstants()) -> float:
    """The unique a making (a, b) reproduce the Eckart equations:

        a = (1/4) { -b + (e + p - T p_T) b_rho / p_rho + T b_T }.
    """
    ev = evaluate(model, state, constants)
    if ev.p_rho == 0.0:
        raise SingularDerivativeError(f"p_rho vanishes at (rho, T) = ({state.rho}, {state.T})")
    return 0.25 * (-b + (ev.e + ev.p - state.T * ev.p_T) * b_rho / ev.p_rho
                   + state.T * b_T)


def compatibility_residual(closure: EquilibriumClosure, state: ThermalState,
                           model: StateModel,
                           constants: PhysicalConstants = PhysicalConstants()) -> float:
    """a minus its compatible value; zero (to tolerance) iff the closure
    converges to the Eckart equations in the first Maxwellian iterate."""
    v = closure.evaluate(state, constants)
    return v.a - a_from_b(v.b, v.b_rho, v.b_T, state, model, constants)


def production_coefficients(closure: EquilibriumClosure, state: ThermalState,
                            model: StateModel, transport: TransportCoefficients,
                            constants: PhysicalConstants = PhysicalConstants()) -> ProductionCoefficients:
    """Production coefficients (a1, a2, a3) pinned by the transport coefficients."""
    chi, mu, nu = transport
    for name, value in (("chi", chi), ("mu", mu), ("nu", nu)):
        if value == 0.0:
            raise ZeroDivisionError(f"transport coefficient {name} is zero")
    v = closure.evaluate(state, constants)
    ev = evaluate(model, state, constants)
    if ev.p_rho == 0.0:
        raise SingularDerivativeError(f"p_rho vanishes at (rho, T) = ({state.rho}, {state.T})")
    if ev.e_T == 0.0:
        raise SingularDerivativeError(f"e_T vanishes at (rho, T) = ({state.rho}, {state.T})")
    a1 = (v.b_rho * ev.p_T - v.b_T * ev.p_rho) / (ev.p_rho * chi)
    a2 = -v.b / mu
    # The a3 bracket cancels to O(b/gamma^2) against O(b) terms in the
    # near-classical regime; extended precision keeps the two evaluation
    # routes (this one and the closed forms) in agreement there.
    ld = np.longdouble
    bracket = (ld(v.a) + ld(2.0) / ld(3.0) * ld(v.b) - ld(v.a_rho) * ld(state.rho)
               - (ld(v.a_T) / ld(ev.e_T)) * ld(state.T) * ld(ev.p_T))
    a3 = float(-(4.0 / (constants.c**2 * nu)) * bracket)
    return ProductionCoefficients(a1=a1, a2=a2, a3=a3)


def heatflux_condition_residuals(closure: EquilibriumClosure, state: ThermalState,
                                 model: StateModel, transport: TransportCoefficients,
                                 constants: PhysicalConstants = PhysicalConstants()):
    """The two independent heat-flux matching conditions (r1, r2).

    These arise from matching the mixed projection of the triple-tensor
    divergence against the Eckart heat law, with the gradients of rho and T
    independent:

        r1 = (e + p) b_rho - (4a + b) p_rho - chi a1 T p_rho
        r2 = (e + p) b_T   - (4a + b) p_T   + chi a1 (e + p - T p_T)

    Both vanish exactly when a1 takes its pinned value and (a, b) satisfy
    the compatibility relation.
    """
    v = closure.evaluate(state, constants)
    ev = evaluate(model, state, constants)
    prod = production_coefficients(closure, state, model, transport, constants)
    chi = transport.chi
    r1 = (ev.e + ev.p) * v.b_rho - (4.0 * v.a + v.b) * ev.p_rho \
        - chi * prod.a1 * state.T * ev.p_rho
    r2 = (ev.e + ev.p) * v.b_T - (4.0 * v.a + v.b) * ev.p_T \
        + chi * prod.a1 * (ev.e + ev.p - state.T * ev.p_T)
    return r1, r2


def monatomic_production_closed_form(state: ThermalState,
                                     transport: TransportCoefficients,
                                     constants: PhysicalConstants = PhysicalConstants()) -> ProductionCoefficients:
    """Closed-form monatomic production coefficients,

        a1 = -(p / (chi T)) (gamma + 5G - gamma G^2)
        a2 = -(p / mu) G
        a3 = -(4p / (3 c^2 nu)) (2G - 3 (gamma + G(6 - gamma G))
                                  / (gamma (gamma + G(5 - gamma G)) - 1)).

    Equivalent to the generic coefficients through dG/dgamma
    = G^2 - 5G/gamma - 1.
    """
    chi, mu, nu = transport
    ld = np.longdouble
    g = ld(constants.gamma(state.T))
    G = ld(bessel_ratio_g(float(g)))
    p = state.rho * constants.theta * state.T
    # both brackets cancel strongly at large gamma; extended precision
    a1 = float(-(p / (chi * state.T)) * (g + 5.0 * G - g * G * G))
    a2 = -(p / mu) * float(G)
    a3 = float(-(4.0 * p / (3.0 * constants.c**2 * nu)) * (
        2.0 * G - 3.0 * (g + G * (6.0 - g * G)) / (g * (g + G * (5.0 - g * G)) - 1.0)
    ))
    return ProductionCoefficients(a1=a1, a2=a2, a3=a3)


def polyatomic_production_closed_form(closure: EquilibriumClosure, state: ThermalState,
                                      model: StateModel, transport: TransportCoefficients,
                                      constants: PhysicalConstants = PhysicalConstants()) -> ProductionCoefficients:
    """Linear-in-rho specialization of the production coefficients,

        a1 = -(1/(chi T)) (4a - b e/p),  a2 = -b/mu,
        a3 = -(4/(c^2 nu)) ((2/3) b - (a_T / e_T) p).
    """
    chi, mu, nu = transport
    v = closure.evaluate(state, constants)
    ev = evaluate(model, state, constants)
    a1 = -(4.0 * v.a - v.b * ev.e / ev.p) / (chi * state.T)
    a2 = -v.b / mu
    a3 = -(4.0 / (constants.c**2 * nu)) * ((2.0 / 3.0) * v.b - (v.a_T / ev.e_T) * ev.p)
    return ProductionCoefficients(a1=a1, a2=a2, a3=a3)


def lmr_symbol_map(prod: ProductionCoefficients, c: float = 1.0) -> dict:
    """Report the production coefficients in the classical 14-moment symbols
    B1^pi = -a3 c^2 / 4, B3 = a2, B4 = a1."""
    return {
        "B1_pi": -prod.a3 * c**2 / 4.0,
        "B3": prod.a2,
        "B4": prod.a1,
    }


def builtin_closure(kind: str, model: StateModel | None = None,
                    gl_c1: float = 0.0, gl_c2: float = 1.0,
                    beta=None) -> EquilibriumClosure:
    """Construct a built-in closure by name.

    Polyatomic kinds require ``model`` to be a :class:`PolyatomicModel`.
    """
    if kind == "monatomic_juttner":
        return MonatomicJuttnerClosure()
    if kind == "geroch_lindblom":
        return GerochLindblomClosure(c1=gl_c1, c2=gl_c2)
    if kind == "polyatomic_acpr":
        if model is None:
            raise MissingModelError("polyatomic_acpr requires an omega model")
        return PolyatomicAcprClosure(model)
    if kind == "polyatomic_pr":
        if model is None:
            raise MissingModelError("polyatomic_pr requires an omega model")
        return PolyatomicPrClosure(model, beta=beta)
    raise ValueError(f"unknown closure kind {kind!r}")
