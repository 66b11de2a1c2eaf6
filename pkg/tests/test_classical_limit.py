import math

import numpy as np
import pytest

from ret14.classical_limit import (
    classical_coefficients,
    classical_compatibility_residual,
    default_c_sequence,
    fit_convergence_order,
    richardson_extrapolate,
)
from ret14.closure import (
    GerochLindblomClosure,
    MonatomicJuttnerClosure,
    PerturbedClosure,
    SingularDerivativeError,
    TransportCoefficients,
)
from ret14.state_models import JuttnerModel, PhysicalConstants, ThermalState, UserModel

JUTTNER = JuttnerModel()
MONATOMIC = MonatomicJuttnerClosure()
TRANSPORT = TransportCoefficients(chi=0.7, mu=1.3, nu=2.1)
STATE = ThermalState(1.4, 0.9)


def test_richardson_exact_on_polynomial_sequence():
    # y_j = L + 3 h_j + 2 h_j^2 with h ratio 4 is resolved exactly
    L = 1.7
    hs = [1.0 / 4**j for j in range(4)]
    values = [L + 3 * h + 2 * h * h for h in hs]
    limit, err = richardson_extrapolate(values, ratio=4.0)
    assert limit == pytest.approx(L, abs=1e-13)
    assert err <= 1e-12


def test_fit_convergence_order_synthetic():
    cs = [2.0 * 2**j for j in range(5)]
    values = [1.0 + 5.0 / c**2 for c in cs]
    assert fit_convergence_order(values, cs) == pytest.approx(2.0, abs=1e-6)
    flat = [1.0] * 5
    assert math.isnan(fit_convergence_order(flat, cs))


def test_default_c_sequence_gamma_guard():
    cs = default_c_sequence(STATE, gamma_min=10.0)
    assert PhysicalConstants(c=cs[0]).gamma(STATE.T) == pytest.approx(10.0)
    assert PhysicalConstants(c=cs[-1]).gamma(STATE.T) >= 100.0


def test_monatomic_classical_targets():
    # asymptotic expansion gives a_C -> p_cl (1 + 25/(4 gamma) + ...) and
    # b_C -> 5 p_cl theta T (1 + 3/(4 gamma) + ...), so the extrapolated
    # limits land on the classical monatomic values
    theta = PhysicalConstants().theta
    p_cl = STATE.rho * theta * STATE.T
    coeffs = classical_coefficients(MONATOMIC, JUTTNER, TRANSPORT, STATE)
    assert coeffs.converged
    assert coeffs.a_C == pytest.approx(p_cl, rel=1e-8)
    assert coeffs.b_C == pytest.approx(5.0 * STATE.rho * (theta * STATE.T) ** 2, rel=1e-8)
    rates = coeffs.diagnostics["rates"]
    assert 1.8 <= rates["a_C"] <= 2.2
    assert 1.8 <= rates["b_C"] <= 2.2
    # monatomic bulk production dies out classically
    assert abs(coeffs.a3_C) <= 1e-6 * p_cl


def test_a2_limit_matches_direct_formula():
    cs = default_c_sequence(STATE)
    coeffs = classical_coefficients(MONATOMIC, JUTTNER, TRANSPORT, STATE, cs)
    last = coeffs.diagnostics["rows"][-1]
    err = coeffs.diagnostics["errors"]["a2_C"]
    spread = abs(coeffs.a2_C - last["a2_C"])
    # the direct value at the largest c sits within the convergence envelope
    assert spread <= 10.0 * max(err, abs(coeffs.a2_C - last["a2_C"]))
    assert coeffs.a2_C == pytest.approx(last["a2_C"], rel=1e-2)


def test_geroch_lindblom_family_not_convergent():
    coeffs = classical_coefficients(GerochLindblomClosure(), JUTTNER, TRANSPORT, STATE)
    assert not coeffs.converged
    # the diverging sequence is visible in the diagnostics
    b_rows = [r["b_C"] for r in coeffs.diagnostics["rows"]]
    assert abs(b_rows[-1]) > abs(b_rows[0])


def test_classical_compatibility_residual_compatible_and_perturbed():
    cs = default_c_sequence(STATE)
    theta = PhysicalConstants().theta
    p_cl = STATE.rho * theta * STATE.T
    coeffs = classical_coefficients(MONATOMIC, JUTTNER, TRANSPORT, STATE, cs)
    res = classical_compatibility_residual(coeffs, MONATOMIC, JUTTNER, STATE, cs)
    assert abs(res) <= 1e-6 * p_cl
    perturbed = PerturbedClosure(MONATOMIC, 1.01)
    res_p = classical_compatibility_residual(coeffs, perturbed, JUTTNER, STATE, cs)
    assert abs(res_p) >= 1e-3 * p_cl


def test_flat_pressure_model_hits_precondition_error():
    flat = UserModel(pressure=lambda r, T: 1.0 + T,
                     internal_energy=lambda r, T: 1.5 * T,
                     p_rho=lambda r, T: 0.0, p_T=lambda r, T: 1.0,
                     eps_rho=lambda r, T: 0.0, eps_T=lambda r, T: 1.5)
    with pytest.raises(SingularDerivativeError):
        classical_coefficients(MONATOMIC, flat, TRANSPORT, STATE)


def test_sequence_validation():
    with pytest.raises(ValueError):
        classical_coefficients(MONATOMIC, JUTTNER, TRANSPORT, STATE, [1.0, 2.0])
    with pytest.raises(ValueError):
        classical_coefficients(MONATOMIC, JUTTNER, TRANSPORT, STATE, [1.0, 1.0, 2.0])


def test_error_estimates_shrink_along_sequence():
    coeffs = classical_coefficients(MONATOMIC, JUTTNER, TRANSPORT, STATE)
    rows = coeffs.diagnostics["rows"]
    diffs = [abs(rows[i + 1]["a_C"] - rows[i]["a_C"]) for i in range(len(rows) - 1)]
    assert all(a > b for a, b in zip(diffs, diffs[1:]))
