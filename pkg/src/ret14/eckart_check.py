"""Field-level check that the divergence closure reproduces the Eckart laws.

The first Maxwellian iterate replaces the balance law of the triple tensor
by its equilibrium flux, with all proper-time derivatives eliminated
through the equilibrium conservation laws (particle number, temperature,
momentum).  For a compatible closure and the pinned production
coefficients, the three independent projections of

    d_a A_E^{a<bg>} - I^{<bg>}

vanish identically in the first gradients, pointwise.  Field points carry
analytic first derivatives, so the verification is algebraic up to
round-off; no spacetime grid or finite-difference layer is involved.

The built-in field family is a Gaussian bump in (t, x) on rho and T with
an x-boost velocity profile, all with closed-form derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closure import (
    EquilibriumClosure,
    ProductionCoefficients,
    TransportCoefficients,
    compatibility_residual,
)
from .covariant import (
    METRIC,
    NoneqFields,
    assemble_production,
    check_four_velocity,
    dev3,
    lower,
    projector,
)
from .state_models import PhysicalConstants, StateModel, ThermalState, evaluate

__all__ = [
    "FieldPoint",
    "MaterialDerivatives",
    "EckartFields",
    "ProjectionResiduals",
    "DegeneracyError",
    "eliminate_material_derivatives",
    "eckart_constitutive",
    "triple_divergence",
    "projection_residuals",
    "residual_norms",
    "GaussianBumpField",
    "random_field_points",
]

EckartFields = NoneqFields


class DegeneracyError(ValueError):
    """e_T or e + p vanishes, so the equilibrium laws cannot be inverted."""


@dataclass(frozen=True)
class FieldPoint:
    """State, four-velocity and all first coordinate gradients at a point.

    ``grad_U[alpha, beta]`` holds d_alpha U^beta; gradient indices are
    covariant (coordinates x^0 = c t).
    """

    state: ThermalState
    U: np.ndarray
    grad_rho: np.ndarray
    grad_T: np.ndarray
    grad_U: np.ndarray

    def validate(self, c: float = 1.0, tol: float = 1e-10):
        check_four_velocity(self.U, c, tol)
        U_low = lower(self.U)
        drift = np.abs(np.asarray(self.grad_U) @ U_low)
        scale = c * float(np.max(np.abs(self.grad_U))) + 1e-300
        if float(np.max(drift)) > tol * scale:
            raise ValueError("grad_U violates differentiated normalization U_b d_a U^b = 0")
        return self


@dataclass(frozen=True)
class MaterialDerivatives:
    rho_dot: float
    T_dot: float
    U_dot: np.ndarray


@dataclass(frozen=True)
class ProjectionResiduals:
    """Projections of d_a A_E^{a<bg>} - I^{<bg>} with material derivatives
    eliminated.  ``heat`` and ``shear`` carry covariant components; ``scale``
    is rho c^3 times the largest relative gradient.  ``compatibility_defect``
    is attached (not raised) when the closure violates the compatibility
    relation beyond tolerance."""

    trace: float
    heat: np.ndarray
    shear: np.ndarray
    scale: float
    compatibility_defect: float | None = None


def eliminate_material_derivatives(pt: FieldPoint, model: StateModel,
                                   constants: PhysicalConstants = PhysicalConstants()) -> MaterialDerivatives:
    """Proper-time derivatives of (rho, T, U) from the equilibrium laws:

        rho_dot = -rho theta,
        T_dot   = -(T p_T / e_T) theta,
        U_dot^b = -(c^2/(e+p)) h^{mb} d_m p,   theta = d_a U^a.
    """
    ev = evaluate(model, pt.state, constants)
    if ev.e_T == 0.0:
        raise DegeneracyError("e_T vanishes; temperature equation degenerate")
    if ev.e + ev.p == 0.0:
        raise DegeneracyError("e + p vanishes; momentum equation degenerate")
    c2 = constants.c**2
    theta = float(np.trace(pt.grad_U))
    grad_p = ev.p_rho * pt.grad_rho + ev.p_T * pt.grad_T
    h = projector(pt.U, constants.c)
    U_dot = -(c2 / (ev.e + ev.p)) * np.einsum("mb,m->b", h, grad_p)
    return MaterialDerivatives(
        rho_dot=-pt.state.rho * theta,
        T_dot=-(pt.state.T * ev.p_T / ev.e_T) * theta,
        U_dot=U_dot,
    )


def eckart_constitutive(pt: FieldPoint, transport: TransportCoefficients,
                        model: StateModel,
                        constants: PhysicalConstants = PhysicalConstants()) -> NoneqFields:
    """Navier-Stokes-Fourier fields at first iterate:

        pi  = -nu d_a U^a,
        q^b = -chi h^{ab} (d_a T - (T/c^2) Udot_a),
        t   = 2 mu dev3(d U),

    with the acceleration taken from the equilibrium momentum equation.
    """
    c = constants.c
    dots = eliminate_material_derivatives(pt, model, constants)
    h = projector(pt.U, c)
    theta = float(np.trace(pt.grad_U))
    w = pt.grad_T - (pt.state.T / c**2) * lower(dots.U_dot)
    q = -transport.chi * np.einsum("ab,a->b", h, w)
    t = 2.0 * transport.mu * dev3(METRIC @ pt.grad_U, pt.U, c)
    return NoneqFields(q=q, t=t, pi=-transport.nu * theta)


def triple_divergence(a, b, da, db, U, grad_U, c: float = 1.0) -> np.ndarray:
    """Exact chain-rule divergence d_a A^{a<bg>} of the equilibrium triple
    tensor, given the coordinate gradients da, db of its two coefficients
    and the four-velocity gradient.

    Linear in (da, db, grad_U); any elimination of material derivatives is
    encoded by the caller through modified gradients.
    """
    U = np.asarray(U, dtype=float)
    grad_U = np.asarray(grad_U, dtype=float)
    h = np.outer(U, U) / c**2 - METRIC
    theta = float(np.trace(grad_U))
    U_dot = grad_U.T @ U
    S = 4.0 * np.outer(U, U) / c**2 - METRIC
    da_dot = float(da @ U)

    div = (da_dot + a * theta) * S
    div += a * (4.0 / c**2) * (np.outer(U_dot, U) + np.outer(U, U_dot))
    w = h @ db
    div += np.outer(U, w) + np.outer(w, U)
    v = (theta * U + U_dot) / c**2
    P = h @ grad_U          # P[g, b] = h^{ag} d_a U^b
    div += b * (np.outer(U, v) + np.outer(v, U) + P + P.T)
    return div


def projection_residuals(pt: FieldPoint, closure: EquilibriumClosure,
                         prod: ProductionCoefficients,
                         transport: TransportCoefficients,
                         model: StateModel,
                         constants: PhysicalConstants = PhysicalConstants(),
                         compat_tol: float = 1e-8) -> ProjectionResiduals:
    """The three projections (trace, heat, shear) of the first-iterate
    defect d_a A_E^{a<bg>} - I^{<bg>}, normalized so all share the natural
    scale rho c^3 ||grad||_inf."""
    c = constants.c
    c2 = c * c
    pt.validate(c)
    rho, T = pt.state.rho, pt.state.T
    U = pt.U
    U_low = lower(U)
    dots = eliminate_material_derivatives(pt, model, constants)

    # replace the time-like part of every gradient by its equilibrium value
    def modified(grad, dot_eq):
        dot_raw = grad @ U if grad.ndim == 1 else None
        if grad.ndim == 1:
            spatial = grad - float(dot_raw) * U_low / c2
            return spatial + np.asarray(dot_eq, dtype=float) * U_low / c2
        dot_raw_vec = grad.T @ U
        spatial = grad - np.outer(U_low, dot_raw_vec) / c2
        return spatial + np.outer(U_low, dot_eq) / c2

    g_rho = modified(np.asarray(pt.grad_rho, dtype=float), dots.rho_dot)
    g_T = modified(np.asarray(pt.grad_T, dtype=float), dots.T_dot)
    g_U = modified(np.asarray(pt.grad_U, dtype=float), dots.U_dot)

    v = closure.evaluate(pt.state, constants)
    da = v.a_rho * g_rho + v.a_T * g_T
    db = v.b_rho * g_rho + v.b_T * g_T
    div = triple_divergence(v.a, v.b, da, db, U, g_U, c)

    fields = eckart_constitutive(pt, transport, model, constants)
    I = assemble_production(prod.a1, prod.a2, prod.a3, fields, U, c)

    R = div - I
    h_low = METRIC @ projector(U, c) @ METRIC
    trace = float(U_low @ R @ U_low) / c2
    X = R @ U_low / c
    heat = h_low @ X
    shear = h_low @ R @ h_low - (float(np.einsum("bg,bg->", h_low, R)) / 3.0) * h_low

    grad_sup = max(
        float(np.max(np.abs(pt.grad_rho))) / rho,
        float(np.max(np.abs(pt.grad_T))) / T,
        float(np.max(np.abs(pt.grad_U))) / c,
    )
    scale = rho * c**3 * grad_sup

    defect = compatibility_residual(closure, pt.state, model, constants)
    warn = None
    if abs(defect) > compat_tol * rho * c2:
        warn = defect
    return ProjectionResiduals(trace=trace, heat=heat, shear=shear,
                               scale=scale, compatibility_defect=warn)


def residual_norms(res: ProjectionResiduals):
    """(|trace|, ||heat||, ||shear||_F) in the coordinate frame."""
    return (abs(res.trace),
            float(np.linalg.norm(res.heat)),
            float(np.linalg.norm(res.shear)))


class GaussianBumpField:
    """Analytic field family: Gaussian bumps on rho and T plus an x-boost
    velocity profile, all with closed-form first derivatives.

    rho = rho0 (1 + A g_rho(t, x)), T = T0 (1 + B g_T(t, x)),
    v = v_amp g_v(t, x), with independent bump centers and widths.
    Amplitudes |A|, |B| <= 0.1 keep the state comfortably positive.
    """

    def __init__(self, rho0=1.0, T0=1.0, amp_rho=0.05, amp_T=0.05, v_amp=0.2,
                 bump_rho=(0.0, 0.0, 1.0, 1.0), bump_T=(0.0, 0.0, 1.0, 1.0),
                 bump_v=(0.0, 0.0, 1.0, 1.0), constants=PhysicalConstants()):
        if abs(amp_rho) > 0.1 or abs(amp_T) > 0.1:
            raise ValueError("bump amplitudes are limited to 0.1")
        if abs(v_amp) >= constants.c:
            raise ValueError("velocity amplitude must stay below c")
        self.rho0, self.T0 = rho0, T0
        self.amp_rho, self.amp_T, self.v_amp = amp_rho, amp_T, v_amp
        self.bump_rho, self.bump_T, self.bump_v = bump_rho, bump_T, bump_v
        self.constants = constants

    @staticmethod
    def _bump(t, x, params):
        t0, x0, st, sx = params
        g = math.exp(-0.5 * ((t - t0) / st) ** 2 - 0.5 * ((x - x0) / sx) ** 2)
        return g, -g * (t - t0) / st**2, -g * (x - x0) / sx**2

    def field_point(self, t: float, x: float) -> FieldPoint:
        c = self.constants.c
        g_r, dt_r, dx_r = self._bump(t, x, self.bump_rho)
        g_t, dt_t, dx_t = self._bump(t, x, self.bump_T)
        g_v, dt_v, dx_v = self._bump(t, x, self.bump_v)

        rho = self.rho0 * (1.0 + self.amp_rho * g_r)
        T = self.T0 * (1.0 + self.amp_T * g_t)
        v = self.v_amp * g_v

        # gradients with respect to x^0 = c t, x^1 = x
        grad_rho = np.array([self.rho0 * self.amp_rho * dt_r / c,
                             self.rho0 * self.amp_rho * dx_r, 0.0, 0.0])
        grad_T = np.array([self.T0 * self.amp_T * dt_t / c,
                           self.T0 * self.amp_T * dx_t, 0.0, 0.0])
        grad_v = np.array([self.v_amp * dt_v / c, self.v_amp * dx_v, 0.0, 0.0])

        lorentz = 1.0 / math.sqrt(1.0 - (v / c) ** 2)
        U = np.array([lorentz * c, lorentz * v, 0.0, 0.0])
        dU_dv = np.array([lorentz**3 * v / c, lorentz**3, 0.0, 0.0])
        grad_U = np.outer(grad_v, dU_dv)
        return FieldPoint(state=ThermalState(rho, T), U=U,
                          grad_rho=grad_rho, grad_T=grad_T, grad_U=grad_U)


def random_field_points(n: int, seed: int = 0,
                        constants: PhysicalConstants = PhysicalConstants(),
                        rho0: float = 1.0, T0: float = 1.0,
                        amplitude: float = 0.08, v_max: float = 0.25):
    """Deterministic batch of analytic field points with sizable gradients.

    Uses a counter-based generator (Philox) so batches are reproducible
    across platforms.  Returns [(t, x, FieldPoint), ...].
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    points = []
    for _ in range(n):
        def bump():
            return (rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                    rng.uniform(0.6, 1.6), rng.uniform(0.6, 1.6))

        field = GaussianBumpField(
            rho0=rho0, T0=T0,
            amp_rho=rng.uniform(0.3, 1.0) * amplitude * rng.choice([-1.0, 1.0]),
            amp_T=rng.uniform(0.3, 1.0) * amplitude * rng.choice([-1.0, 1.0]),
            v_amp=rng.uniform(0.3, 1.0) * v_max * constants.c * rng.choice([-1.0, 1.0]),
            bump_rho=bump(), bump_T=bump(), bump_v=bump(),
            constants=constants,
        )
        # sample within a width of the origin so every gradient is alive
        t, x = rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)
        points.append((t, x, field.field_point(t, x)))
    return points
