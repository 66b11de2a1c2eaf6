"""Flat-spacetime tensor algebra with metric signature (+, -, -, -).

Index 0 is time.  Contravariant components are stored in plain ndarrays;
raising and lowering always go through the one metric constant below, and
rank-3 objects are full (4, 4, 4) arrays symmetric in the last index pair.
``sym2_pack``/``sym2_unpack`` convert symmetric rank-2 tensors to the
10-component packed form used in reports.

Conventions worth pinning down once: with this signature the projector
h^{ab} = U^a U^b / c^2 - g^{ab} satisfies h^{ab} U_b = 0,
h^{ab} h_{ab} = 3, g_{ab} h^{ab} = -3, and the mixed form g h is an
anti-involution, (g h)^2 = -(g h).  The deviatoric operators dev4 and dev3
are idempotent and agree on tensors that are both g-traceless and
orthogonal to U.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "METRIC",
    "NormalizationError",
    "ConstraintError",
    "lower",
    "raise_index",
    "boost_x",
    "four_velocity",
    "check_four_velocity",
    "projector",
    "dev4",
    "dev3",
    "sym2_pack",
    "sym2_unpack",
    "NoneqFields",
    "assemble_equilibrium_tensors",
    "assemble_full_symmetric_triple",
    "dev4_last_pair",
    "assemble_production",
    "entropy_production",
]

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


class NormalizationError(ValueError):
    """Four-velocity not normalized to U.U = c^2."""


class ConstraintError(ValueError):
    """Non-equilibrium fields violate their orthogonality/trace constraints."""


def lower(v):
    """Lower every index: vectors g v, rank-2 g M g."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        return METRIC @ v
    if v.ndim == 2:
        return METRIC @ v @ METRIC
    raise ValueError("lower supports rank 1 and 2")


# the metric is its own inverse in this signature
raise_index = lower


def boost_x(beta: float) -> np.ndarray:
    """Lorentz boost along x with velocity beta*c, acting on contravariant components."""
    if not abs(beta) < 1.0:
        raise ValueError("boost requires |beta| < 1")
    g = 1.0 / np.sqrt(1.0 - beta**2)
    lam = np.eye(4)
    lam[0, 0] = lam[1, 1] = g
    lam[0, 1] = lam[1, 0] = g * beta
    return lam


def four_velocity(v: float, c: float = 1.0) -> np.ndarray:
    """Four-velocity of an x-directed three-velocity v, |v| < c."""
    if not abs(v) < c:
        raise ValueError("three-velocity must satisfy |v| < c")
    g = 1.0 / np.sqrt(1.0 - (v / c) ** 2)
    return np.array([g * c, g * v, 0.0, 0.0])


def check_four_velocity(U, c: float = 1.0, tol: float = 1e-9):
    U = np.asarray(U, dtype=float)
    norm = float(lower(U) @ U)
    if abs(norm - c * c) > tol * c * c:
        raise NormalizationError(f"U.U = {norm!r} differs from c^2 = {c * c!r}")
    return U


def projector(U, c: float = 1.0) -> np.ndarray:
    """Contravariant projector h^{ab} = U^a U^b / c^2 - g^{ab}."""
    U = check_four_velocity(U, c)
    return np.outer(U, U) / c**2 - METRIC


def dev4(M) -> np.ndarray:
    """Four-dimensional traceless part of a symmetric contravariant tensor."""
    M = np.asarray(M, dtype=float)
    trace = float(np.einsum("ab,ab->", METRIC, M))
    return M - 0.25 * trace * METRIC


def dev3(M, U, c: float = 1.0) -> np.ndarray:
    """Traceless part of the projection orthogonal to U (symmetrizes first)."""
    M = np.asarray(M, dtype=float)
    Ms = 0.5 * (M + M.T)
    h = projector(U, c)
    h_mix = h @ METRIC            # h^a_b
    h_low = METRIC @ h @ METRIC   # h_ab
    projected = h_mix @ Ms @ h_mix.T
    trace = float(np.einsum("ab,ab->", h_low, Ms))
    return projected - trace * h / 3.0


def sym2_pack(M) -> np.ndarray:
    """Pack a symmetric 4x4 tensor into its 10 independent components."""
    M = np.asarray(M, dtype=float)
    idx = np.triu_indices(4)
    return M[idx]


def sym2_unpack(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    M = np.zeros((4, 4))
    idx = np.triu_indices(4)
    M[idx] = v
    return M + np.triu(M, 1).T


@dataclass(frozen=True)
class NoneqFields:
    """Heat flux q^a, shear stress t^{ab} and dynamical pressure pi.

    q is orthogonal to U; t is symmetric, g-traceless and orthogonal to U.
    """

    q: np.ndarray
    t: np.ndarray
    pi: float

    def validate(self, U, c: float = 1.0, tol: float = 1e-10):
        U = np.asarray(U, dtype=float)
        U_low = lower(U)
        scale_q = float(np.max(np.abs(self.q))) + 1e-300
        scale_t = float(np.max(np.abs(self.t))) + 1e-300
        if abs(float(self.q @ U_low)) > tol * scale_q * c:
            raise ConstraintError("heat flux not orthogonal to U")
        if float(np.max(np.abs(self.t - self.t.T))) > tol * scale_t:
            raise ConstraintError("shear stress not symmetric")
        if float(np.max(np.abs(self.t @ U_low))) > tol * scale_t * c:
            raise ConstraintError("shear stress not orthogonal to U")
        if abs(float(np.einsum("ab,ab->", METRIC, self.t))) > tol * scale_t:
            raise ConstraintError("shear stress not traceless")
        return self


def assemble_equilibrium_tensors(rho, p, e, a, b, U, c: float = 1.0):
    """Equilibrium particle flux, energy-momentum and deviatoric triple tensor.

    V^a = rho U^a, T^{ab} = p h^{ab} + e U^a U^b / c^2, and

        A^{a<bg>} = a U^a (h^{bg} + 3 U^b U^g / c^2)
                    + b (h^{ag} U^b + h^{ab} U^g),

    which is traceless in (b, g) by construction.
    """
    U = check_four_velocity(U, c)
    h = projector(U, c)
    V = rho * U
    T_E = p * h + e * np.outer(U, U) / c**2
    UU = np.outer(U, U)
    A = a * np.einsum("a,bg->abg", U, h + 3.0 * UU / c**2)
    A += b * (np.einsum("ag,b->abg", h, U) + np.einsum("ab,g->abg", h, U))
    return V, T_E, A


def assemble_full_symmetric_triple(abar, bbar, U, c: float = 1.0) -> np.ndarray:
    """Fully symmetric equilibrium triple tensor
    abar U U U + bbar (h U + h U + h U)."""
    U = check_four_velocity(U, c)
    h = projector(U, c)
    A = abar * np.einsum("a,b,g->abg", U, U, U)
    A += bbar * (np.einsum("ab,g->abg", h, U)
                 + np.einsum("ag,b->abg", h, U)
                 + np.einsum("bg,a->abg", h, U))
    return A


def dev4_last_pair(A) -> np.ndarray:
    """Apply the four-dimensional deviatoric operator to the last index pair."""
    A = np.asarray(A, dtype=float)
    trace = np.einsum("amn,mn->a", A, METRIC)
    return A - 0.25 * np.einsum("a,bg->abg", trace, METRIC)


def assemble_production(a1, a2, a3, fields: NoneqFields, U, c: float = 1.0) -> np.ndarray:
    """Production tensor
    a1 (U q + q U) + a2 t + a3 pi (U U - c^2 g / 4); traceless by construction."""
    U = check_four_velocity(U, c)
    fields.validate(U, c)
    I = a1 * (np.einsum("b,g->bg", U, fields.q) + np.einsum("g,b->bg", U, fields.q))
    I += a2 * fields.t
    I += a3 * fields.pi * (np.outer(U, U) - 0.25 * c**2 * METRIC)
    return I


def _eckart_fields_from_gradients(T, U, grad_T, grad_U, transport, c):
    chi, mu, nu = transport
    h = projector(U, c)
    theta = float(np.trace(grad_U))
    U_dot = np.asarray(grad_U, dtype=float).T @ U   # U^a d_a U^b
    w = np.asarray(grad_T, dtype=float) - (T / c**2) * lower(U_dot)
    q = -chi * np.einsum("ab,a->b", h, w)
    W = METRIC @ grad_U                              # d^a U^b
    t = 2.0 * mu * dev3(W, U, c)
    pi = -nu * theta
    return NoneqFields(q=q, t=t, pi=pi)


def entropy_production(T, U, grad_T, grad_U, transport=None,
                       fields: NoneqFields | None = None, c: float = 1.0) -> float:
    """Entropy production of the Navier-Stokes-Fourier structure,

        sigma = -(q^a / T^2)(d_a T - (T/c^2) Udot_a)
                + (t^{ab} d_a U_b - pi d_a U^a) / T.

    ``fields`` defaults to the constitutive laws pi = -nu theta,
    q = -chi h (dT - (T/c^2) Udot), t = 2 mu dev3(dU) built from
    ``transport`` = (chi, mu, nu); sigma is then non-negative whenever the
    transport coefficients are.
    """
    U = check_four_velocity(U, c)
    grad_T = np.asarray(grad_T, dtype=float)
    grad_U = np.asarray(grad_U, dtype=float)
    if fields is None:
        if transport is None:
            raise ValueError("either fields or transport must be supplied")
        fields = _eckart_fields_from_gradients(T, U, grad_T, grad_U, transport, c)
    U_dot = grad_U.T @ U
    w = grad_T - (T / c**2) * lower(U_dot)
    grad_U_low = grad_U @ METRIC                    # d_a U_b
    sigma = -float(fields.q @ w) / T**2
    sigma += (float(np.einsum("ab,ab->", fields.t, grad_U_low))
              - fields.pi * float(np.trace(grad_U))) / T
    return sigma
