"""Equilibrium main field, potential coefficients and Euler convexity.

For the equilibrium (Euler) subsystem the main field is

    lambda = -g_r / T,   lambda^b = U^b / T,   G0 = lambda.lambda = c^2/T^2,

with g_r = (e + p)/rho - T S the chemical potential per mass.  The
generating-potential coefficients are Gamma0 = -p and Gamma1 = -2 T b, and
the triple-tensor coefficient a follows from Gamma1 through

    a = (1/4) ( Gamma1 / T + (dGamma1/dG0) c^2 / T^3 ),

where the (lambda, G0) -> (rho, T) chain rule gives

    df/dlambda = -f_rho T rho / p_rho,
    df/dG0 = -(T^2 / (2 c^2 p_rho)) { f_rho (e + p - T p_T) + f_T p_rho T }.

This reconstruction is an independent route to the same a as the
compatibility relation: entropy-principle symmetrization makes the
constraint automatic.  ``euler_convexity`` checks the Euler block of the
symmetrizer (non-equilibrium main-field components are frozen); for
thermodynamically stable models it is negative definite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closure import SingularDerivativeError
from .covariant import check_four_velocity
from .state_models import (
    PhysicalConstants,
    StateModel,
    ThermalState,
    evaluate,
    gibbs_entropy,
)

__all__ = [
    "MainFieldEq",
    "PotentialCoefficients",
    "ConvexityReport",
    "equilibrium_main_field",
    "chain_rule_derivatives",
    "potential_coefficients",
    "a_from_gamma1",
    "a_from_b_routes_defect",
    "euler_convexity",
]


@dataclass(frozen=True)
class MainFieldEq:
    """Equilibrium main field; lam_vec.lam_vec = G0 by construction."""

    lam: float
    lam_vec: np.ndarray
    G0: float
    g_r: float


@dataclass(frozen=True)
class PotentialCoefficients:
    """Gamma0 = -p and Gamma1 = -2 T b with the (lambda, G0) derivatives of
    Gamma1.  The quadratic coefficient Gamma2 has no closed form here and is
    deliberately not represented."""

    Gamma0: float
    Gamma1: float
    dGamma1_dlambda: float
    dGamma1_dG0: float


@dataclass(frozen=True)
class ConvexityReport:
    """Eigen-signature of the Euler-subsystem symmetrizer in the rest frame.

    Variables ordered (d lambda, d lambda_0, d lambda_1..3); the quadratic
    form must be negative definite for a convex entropy."""

    negative_definite: bool
    eigenvalues: np.ndarray
    matrix: np.ndarray


def equilibrium_main_field(state: ThermalState, U, model: StateModel,
                           constants: PhysicalConstants = PhysicalConstants()) -> MainFieldEq:
    """Main-field components at an equilibrium state with four-velocity U."""
    c = constants.c
    U = check_four_velocity(U, c)
    ev = evaluate(model, state, constants)
    S, _, _ = gibbs_entropy(model, state, constants)
    g_r = (ev.e + ev.p) / state.rho - state.T * S
    return MainFieldEq(
        lam=-g_r / state.T,
        lam_vec=U / state.T,
        G0=c**2 / state.T**2,
        g_r=g_r,
    )


def chain_rule_derivatives(f_rho: float, f_T: float, state: ThermalState,
                           model: StateModel,
                           constants: PhysicalConstants = PhysicalConstants()):
    """(df/dlambda, df/dG0) of a scalar f(rho, T) along the main-field chart."""
    ev = evaluate(model, state, constants)
    if ev.p_rho == 0.0:
        raise SingularDerivativeError(
            f"p_rho vanishes at (rho, T) = ({state.rho}, {state.T})")
    T = state.T
    df_dlam = -f_rho * T * state.rho / ev.p_rho
    df_dG0 = -(T**2 / (2.0 * constants.c**2 * ev.p_rho)) * (
        f_rho * (ev.e + ev.p - T * ev.p_T) + f_T * ev.p_rho * T
    )
    return df_dlam, df_dG0


def potential_coefficients(b: float, b_rho: float, b_T: float,
                           state: ThermalState, model: StateModel,
                           constants: PhysicalConstants = PhysicalConstants()) -> PotentialCoefficients:
    ev = evaluate(model, state, constants)
    T = state.T
    g1 = -2.0 * T * b
    g1_rho = -2.0 * T * b_rho
    g1_T = -2.0 * b - 2.0 * T * b_T
    d_lam, d_G0 = chain_rule_derivatives(g1_rho, g1_T, state, model, constants)
    return PotentialCoefficients(Gamma0=-ev.p, Gamma1=g1,
                                 dGamma1_dlambda=d_lam, dGamma1_dG0=d_G0)


def a_from_gamma1(b: float, b_rho: float, b_T: float, state: ThermalState,
                  model: StateModel,
                  constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Reconstruct a from the potential coefficient Gamma1 = -2 T b.

    Numerically identical to the compatibility-relation route for every
    (b, model) pair; the two evaluations are independent code paths.
    """
    pot = potential_coefficients(b, b_rho, b_T, state, model, constants)
    T = state.T
    return 0.25 * (pot.Gamma1 / T + pot.dGamma1_dG0 * constants.c**2 / T**3)


def a_from_b_routes_defect(closure, state: ThermalState, model: StateModel,
                           constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Relative disagreement between the two reconstructions of a from the
    closure's b: the compatibility relation and the Gamma1 route.  They are
    the same function of (b, b_rho, b_T), so the defect is pure round-off."""
    from .closure import a_from_b

    v = closure.evaluate(state, constants)
    via_compat = a_from_b(v.b, v.b_rho, v.b_T, state, model, constants)
    via_gamma1 = a_from_gamma1(v.b, v.b_rho, v.b_T, state, model, constants)
    scale = max(abs(via_compat), state.rho * constants.c**2)
    return abs(via_compat - via_gamma1) / scale


def euler_convexity(state: ThermalState, model: StateModel,
                    constants: PhysicalConstants = PhysicalConstants(),
                    threshold: float = 1e-12) -> ConvexityReport:
    """Definiteness of the Euler-subsystem quadratic form in the rest frame.

    Assembled from the state derivatives: with dT = -(T^2/c) dlam_0 and
    drho expressed through (dlam, dlam_0), the form decomposes into a 2x2
    scalar block and -(e + p) T on the three spatial dlam_i.  Indefiniteness
    is a reported outcome, not an error.
    """
    ev = evaluate(model, state, constants)
    if ev.p_rho == 0.0:
        raise SingularDerivativeError(
            f"p_rho vanishes at (rho, T) = ({state.rho}, {state.T})")
    c = constants.c
    T = state.T
    P = state.rho * T / ev.p_rho
    R = T * (ev.e + ev.p - T * ev.p_T) / (c * ev.p_rho)
    m11 = -c**2 * P
    m12 = -(c**2 * R + c * ev.e_rho * P) / 2.0
    m22 = -c * R * ev.e_rho - ev.e_T * T**2
    M = np.zeros((5, 5))
    M[0, 0], M[0, 1], M[1, 0], M[1, 1] = m11, m12, m12, m22
    spatial = -(ev.e + ev.p) * T
    M[2, 2] = M[3, 3] = M[4, 4] = spatial
    eig = np.linalg.eigvalsh(M)
    scale = float(np.max(np.abs(eig))) + 1e-300
    return ConvexityReport(
        negative_definite=bool(np.all(eig < -threshold * scale)),
        eigenvalues=eig,
        matrix=M,
    )
