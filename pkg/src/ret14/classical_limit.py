"""Classical (c -> infinity) coefficients by Richardson extrapolation.

At fixed (rho, T) the closure and production coefficients approach their
classical counterparts along rescaled combinations,

    a_C  = lim ( 4a - rho c^2 - 2 rho eps ),
    b_C  = lim   2 c^2 (b - p),
    a1_C = lim   2 c^2 a1,
    a2_C = lim ( -a2 ),
    a3_C = lim     c^2 a3,

with corrections of order 1/c^2, so the limits are extrapolated in
h = 1/c^2 along a geometric sequence of light speeds.  The monatomic gas
converges to a_C = rho k_B T / m and b_C = 5 rho (k_B T / m)^2; closures
without a classical normalization (Geroch-Lindblom for instance) diverge
and are reported as non-converged rather than failing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .closure import EquilibriumClosure, TransportCoefficients, a_from_b, \
    compatibility_residual, production_coefficients
from .state_models import PhysicalConstants, StateModel, ThermalState, evaluate

__all__ = [
    "ClassicalCoefficients",
    "LIMIT_COMBINATIONS",
    "richardson_extrapolate",
    "fit_convergence_order",
    "default_c_sequence",
    "classical_coefficients",
    "classical_compatibility_residual",
]

# Which rescaled relativistic contraction feeds which classical moment
# density; used to label report rows.  The moment-hierarchy objects are
# labels only, never independent data.
LIMIT_COMBINATIONS = {
    "a_C": "(4/c) B^{0ll} - 6 T^{00} + 3 c V^0, one third of the momentum-trace density",
    "b_C": "2c B^{k0i} - c^2 T^{ki}, trace flux density (diagonal coefficient)",
    "a1_C": "2c I^{0j} against the heat flux q_j",
    "a2_C": "-I^{<ij>} against the shear stress t_<ij>",
    "a3_C": "-4 I^{ij} delta_ij / (3 pi), dynamical-pressure production",
}

_COEFFICIENT_NAMES = ("a_C", "b_C", "a1_C", "a2_C", "a3_C")


@dataclass(frozen=True)
class ClassicalCoefficients:
    """Extrapolated classical coefficients with convergence diagnostics.

    ``convergence_rate`` is the weakest fitted order among the five
    sequences; ``converged`` requires every rate to reach 1.8 (order 2 in
    c, with 0.2 slack) and every extrapolation-error tail to drop below
    tolerance.  ``diagnostics`` holds the per-c rescaled values, the
    extrapolants and the per-coefficient rates and errors.
    """

    a_C: float
    b_C: float
    a1_C: float
    a2_C: float
    a3_C: float
    convergence_rate: float
    converged: bool
    diagnostics: dict = field(repr=False, default_factory=dict)


def richardson_extrapolate(values, ratio: float = 4.0):
    """Richardson limit of a sequence y_j = y + k h_j + O(h_j^2) with
    h_{j+1} = h_j / ratio.  Returns (limit, error_estimate)."""
    table = [list(map(float, values))]
    n = len(table[0])
    if n < 2:
        return table[0][-1], math.inf
    for k in range(1, n):
        rk = ratio**k
        prev = table[-1]
        table.append([(rk * prev[i + 1] - prev[i]) / (rk - 1.0)
                      for i in range(len(prev) - 1)])
    limit = table[-1][0]
    err = abs(table[-1][0] - table[-2][-1]) if n >= 2 else math.inf
    return limit, err


def fit_convergence_order(values, c_sequence):
    """Least-squares slope of log |y_{j+1} - y_j| against log c_j.

    Order p means differences shrink like c^-p; returns nan when the
    sequence is flat to round-off (already converged).
    """
    diffs = np.abs(np.diff(np.asarray(values, dtype=float)))
    scale = float(np.max(np.abs(values))) + 1e-300
    if np.all(diffs <= 1e-14 * scale):
        return math.nan
    cs = np.asarray(c_sequence, dtype=float)[:-1]
    mask = diffs > 0
    if mask.sum() < 2:
        return math.nan
    slope = np.polyfit(np.log(cs[mask]), np.log(diffs[mask]), 1)[0]
    return float(-slope)


def default_c_sequence(state: ThermalState, m: float = 1.0, k_B: float = 1.0,
                       factors=(1, 2, 4, 8, 16), gamma_min: float = 10.0):
    """c0 * factors with c0 chosen so gamma(c0) >= gamma_min."""
    c0 = math.sqrt(gamma_min * k_B * state.T / m)
    return [c0 * f for f in factors]


def _rescaled_values(closure, model, transport, state, c_sequence, m, k_B):
    rows = []
    for c in c_sequence:
        constants = PhysicalConstants(c=c, m=m, k_B=k_B)
        ev = evaluate(model, state, constants)
        v = closure.evaluate(state, constants)
        prod = production_coefficients(closure, state, model, transport, constants)
        rows.append({
            "c": c,
            "gamma": constants.gamma(state.T),
            "a_C": 4.0 * v.a - state.rho * c**2 - 2.0 * state.rho * ev.eps,
            "b_C": 2.0 * c**2 * (v.b - ev.p),
            "a1_C": 2.0 * c**2 * prod.a1,
            "a2_C": -prod.a2,
            "a3_C": c**2 * prod.a3,
        })
    return rows


def classical_coefficients(closure: EquilibriumClosure, model: StateModel,
                           transport: TransportCoefficients, state: ThermalState,
                           c_sequence=None, m: float = 1.0, k_B: float = 1.0,
                           rel_tol: float = 1e-6) -> ClassicalCoefficients:
    """Extrapolate the classical coefficients of a closure/model family.

    The family is swept in c through the physical constants; closures and
    models receive the constants at evaluation time, so the built-ins are
    c-parameterized automatically.
    """
    if c_sequence is None:
        c_sequence = default_c_sequence(state, m, k_B)
    c_sequence = sorted(float(c) for c in c_sequence)
    if len(c_sequence) < 3:
        raise ValueError("c_sequence needs at least 3 strictly increasing values")
    if any(b <= a for a, b in zip(c_sequence, c_sequence[1:])):
        raise ValueError("c_sequence must be strictly increasing")

    gamma_max = PhysicalConstants(c=c_sequence[-1], m=m, k_B=k_B).gamma(state.T)
    asymptotic_guard = gamma_max >= 100.0

    rows = _rescaled_values(closure, model, transport, state, c_sequence, m, k_B)
    # consecutive c ratios are arbitrary; use the dominant one for the table
    ratio = (c_sequence[1] / c_sequence[0]) ** 2

    limits, rates, errors, conv = {}, {}, {}, {}
    for name in _COEFFICIENT_NAMES:
        seq = [row[name] for row in rows]
        limit, err = richardson_extrapolate(seq, ratio=ratio)
        rate = fit_convergence_order(seq, c_sequence)
        # coefficients with vanishing classical limit (monatomic a3_C) are
        # judged against the magnitude of the sequence they collapsed from
        scale = max(abs(limit), max(abs(s) for s in seq), 1e-300)
        ok = (math.isnan(rate) or rate >= 1.8) and err <= rel_tol * scale
        limits[name], rates[name], errors[name], conv[name] = limit, rate, err, ok

    finite_rates = [r for r in rates.values() if not math.isnan(r)]
    overall_rate = min(finite_rates) if finite_rates else math.nan
    return ClassicalCoefficients(
        a_C=limits["a_C"], b_C=limits["b_C"], a1_C=limits["a1_C"],
        a2_C=limits["a2_C"], a3_C=limits["a3_C"],
        convergence_rate=overall_rate,
        converged=bool(all(conv.values()) and asymptotic_guard),
        diagnostics={
            "rows": rows,
            "rates": rates,
            "errors": errors,
            "per_coefficient_converged": conv,
            "asymptotic_guard": asymptotic_guard,
            "gamma_max": gamma_max,
            "c_sequence": list(c_sequence),
        },
    )


def classical_compatibility_residual(coeffs: ClassicalCoefficients,
                                     closure: EquilibriumClosure, model: StateModel,
                                     state: ThermalState, c_sequence,
                                     m: float = 1.0, k_B: float = 1.0) -> float:
    """Extrapolated limit of the rescaled compatibility defect.

    The defect of the compatibility relation is rescaled to classical
    pressure units, r(c) = 4 (a - a_compatible) p_cl / (rho c^2), and
    extrapolated like the coefficients; a compatible family gives zero, a
    perturbed one a finite nonzero limit.  A non-converged ``coeffs`` flag
    is not an error here (the residual limit can exist regardless); it
    propagates to the caller through ``coeffs.converged``.
    """
    p_cl = state.rho * (k_B / m) * state.T
    c_sequence = sorted(float(c) for c in c_sequence)
    vals = []
    for c in c_sequence:
        constants = PhysicalConstants(c=c, m=m, k_B=k_B)
        r = compatibility_residual(closure, state, model, constants)
        vals.append(4.0 * r * p_cl / (state.rho * c**2))
    ratio = (c_sequence[1] / c_sequence[0]) ** 2
    limit, _ = richardson_extrapolate(vals, ratio=ratio)
    return limit
