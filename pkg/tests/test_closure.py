import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ret14.bessel import bessel_ratio_g
from ret14.closure import (
    CallableClosure,
    GerochLindblomClosure,
    MissingModelError,
    MonatomicJuttnerClosure,
    PerturbedClosure,
    PolyatomicAcprClosure,
    PolyatomicPrClosure,
    SingularDerivativeError,
    TransportCoefficients,
    a_from_b,
    builtin_closure,
    compatibility_residual,
    heatflux_condition_residuals,
    lmr_symbol_map,
    monatomic_production_closed_form,
    polyatomic_production_closed_form,
    production_coefficients,
)
from ret14.state_models import (
    JuttnerModel,
    PhysicalConstants,
    PolyatomicModel,
    ThermalState,
    UserModel,
    evaluate,
)

CONSTS = PhysicalConstants()
JUTTNER = JuttnerModel()
POLY = PolyatomicModel.juttner_omega()
TRANSPORT = TransportCoefficients(chi=0.7, mu=1.3, nu=2.1)


def grid_states(n_rho=20, n_gamma=20):
    rhos = np.geomspace(1e-3, 1e3, n_rho)
    gammas = np.geomspace(0.1, 100.0, n_gamma)
    return [ThermalState(float(r), float(1.0 / g)) for r in rhos for g in gammas]


def compat_reference(closure, st_, model, constants):
    """Straightforward re-derivation of the compatibility right-hand side,
    independent of the library's arrangement."""
    v = closure.evaluate(st_, constants)
    ev = evaluate(model, st_, constants)
    rhs = -v.b
    rhs += (ev.e + ev.p - st_.T * ev.p_T) * (v.b_rho / ev.p_rho)
    rhs += st_.T * v.b_T
    return v.a - rhs / 4.0


def test_geroch_lindblom_residual_exact_zero():
    gl = GerochLindblomClosure()
    for st_ in (ThermalState(1.0, 1.0), ThermalState(3.0, 0.2), ThermalState(0.1, 7.0)):
        assert compatibility_residual(gl, st_, JUTTNER, CONSTS) == 0.0


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5),
       st.floats(min_value=0.05, max_value=20), st.floats(min_value=0.05, max_value=20))
def test_geroch_lindblom_compatible_for_any_constants(c1, c2, rho, T):
    gl = GerochLindblomClosure(c1=c1, c2=c2)
    st_ = ThermalState(rho, T)
    r = compatibility_residual(gl, st_, JUTTNER, CONSTS)
    assert abs(r) <= 1e-12 * (abs(c1) + abs(c2) * T + 1.0)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 5.0, 50.0])
def test_monatomic_compatibility_spot_values(gamma):
    st_ = ThermalState(1.0, 1.0 / gamma)
    r = compatibility_residual(MonatomicJuttnerClosure(), st_, JUTTNER, CONSTS)
    assert abs(r) <= 1e-9 * st_.rho * CONSTS.c**2


@pytest.mark.parametrize("closure,model", [
    (MonatomicJuttnerClosure(), JUTTNER),
    (PolyatomicAcprClosure(POLY), POLY),
    (PolyatomicPrClosure(POLY), POLY),
], ids=["monatomic", "acpr", "pr"])
def test_builtin_compatibility_grid(closure, model):
    for st_ in grid_states(8, 10):
        r = compatibility_residual(closure, st_, model, CONSTS)
        assert abs(r) <= 1e-9 * st_.rho * CONSTS.c**2


def test_perturbed_closure_residual_matches_reference():
    base = MonatomicJuttnerClosure()
    perturbed = PerturbedClosure(base, 1.01)
    for st_ in (ThermalState(0.5, 0.3), ThermalState(4.0, 2.0)):
        r = compatibility_residual(perturbed, st_, JUTTNER, CONSTS)
        ref = compat_reference(perturbed, st_, JUTTNER, CONSTS)
        assert r == pytest.approx(ref, rel=1e-12)
        # a 1% scaling of b shifts a by -1% of the compatible value
        a_compat = base.evaluate(st_, CONSTS).a
        assert r == pytest.approx(-0.01 * a_compat, rel=1e-10)


def test_a_from_b_known_forms():
    st_ = ThermalState(1.7, 0.4)
    gamma = CONSTS.gamma(st_.T)
    c2 = CONSTS.c**2
    # b = T gives a = 0
    assert a_from_b(st_.T, 0.0, 1.0, st_, JUTTNER, CONSTS) == pytest.approx(0.0, abs=1e-14)
    # monatomic b = c^2 G rho / gamma gives a = rho c^2 (1/4 + G/gamma)
    v = MonatomicJuttnerClosure().evaluate(st_, CONSTS)
    a = a_from_b(v.b, v.b_rho, v.b_T, st_, JUTTNER, CONSTS)
    G = bessel_ratio_g(gamma)
    assert a == pytest.approx(st_.rho * c2 * (0.25 + G / gamma), rel=1e-12)
    # one-function polyatomic b reproduces its closed-form a
    va = PolyatomicAcprClosure(POLY).evaluate(st_, CONSTS)
    a = a_from_b(va.b, va.b_rho, va.b_T, st_, POLY, CONSTS)
    assert a == pytest.approx(va.a, rel=1e-12)


def test_a_from_b_roundtrip():
    # completing an arbitrary b with a_from_b yields a compatible closure
    def b_fn(rho, T):
        return 0.3 * rho * T**2 + 1.7 * T

    completed = CallableClosure(
        a=lambda rho, T: a_from_b(
            b_fn(rho, T), 0.3 * T**2, 0.6 * rho * T + 1.7,
            ThermalState(rho, T), JUTTNER, CONSTS),
        b=b_fn,
        b_rho=lambda rho, T: 0.3 * T**2,
        b_T=lambda rho, T: 0.6 * rho * T + 1.7,
    )
    for st_ in (ThermalState(1.0, 1.0), ThermalState(0.2, 3.0)):
        r = compatibility_residual(completed, st_, JUTTNER, CONSTS)
        scale = max(abs(completed.evaluate(st_, CONSTS).a), st_.rho * CONSTS.c**2)
        assert abs(r) <= 1e-12 * scale


def test_monatomic_production_closed_form_matches_generic():
    mc = MonatomicJuttnerClosure()
    for st_ in grid_states(10, 12):
        generic = production_coefficients(mc, st_, JUTTNER, TRANSPORT, CONSTS)
        closed = monatomic_production_closed_form(st_, TRANSPORT, CONSTS)
        assert generic.a1 == pytest.approx(closed.a1, rel=1e-9)
        assert generic.a2 == pytest.approx(closed.a2, rel=1e-9)
        assert generic.a3 == pytest.approx(closed.a3, rel=1e-9)


@pytest.mark.parametrize("closure", [PolyatomicAcprClosure(POLY), PolyatomicPrClosure(POLY)],
                         ids=["acpr", "pr"])
def test_polyatomic_production_specialization(closure):
    for st_ in grid_states(6, 8):
        generic = production_coefficients(closure, st_, POLY, TRANSPORT, CONSTS)
        special = polyatomic_production_closed_form(closure, st_, POLY, TRANSPORT, CONSTS)
        assert generic.a1 == pytest.approx(special.a1, rel=1e-9)
        assert generic.a2 == pytest.approx(special.a2, rel=1e-9)
        assert generic.a3 == pytest.approx(special.a3, rel=1e-9)


def test_pr_default_beta_reduces_to_one_function_closure():
    pr = PolyatomicPrClosure(POLY)
    acpr = PolyatomicAcprClosure(POLY)
    for st_ in grid_states(4, 6):
        vp, va = pr.evaluate(st_, CONSTS), acpr.evaluate(st_, CONSTS)
        assert vp.a == pytest.approx(va.a, rel=1e-12)
        assert vp.b == pytest.approx(va.b, rel=1e-12)
        assert vp.a_T == pytest.approx(va.a_T, rel=1e-9)


def test_heatflux_conditions():
    mc = MonatomicJuttnerClosure()
    st_ = ThermalState(2.0, 0.7)
    ev = evaluate(JUTTNER, st_, CONSTS)
    v = mc.evaluate(st_, CONSTS)
    scale = (ev.e + ev.p) * (abs(v.b_rho) + abs(v.b_T))
    r1, r2 = heatflux_condition_residuals(mc, st_, JUTTNER, TRANSPORT, CONSTS)
    assert abs(r1) <= 1e-9 * scale and abs(r2) <= 1e-9 * scale
    # Geroch-Lindblom with its pinned a1 = -c2/chi
    gl = GerochLindblomClosure(c1=0.0, c2=1.0)
    r1, r2 = heatflux_condition_residuals(gl, st_, JUTTNER, TRANSPORT, CONSTS)
    assert abs(r1) <= 1e-13 * scale and abs(r2) <= 1e-13 * scale
    # doubling a1 breaks both conditions linearly
    prod = production_coefficients(mc, st_, JUTTNER, TRANSPORT, CONSTS)
    chi = TRANSPORT.chi
    r1_wrong = (ev.e + ev.p) * v.b_rho - (4 * v.a + v.b) * ev.p_rho \
        - chi * (2 * prod.a1) * st_.T * ev.p_rho
    assert abs(r1_wrong) > 1e-6 * scale


def test_zero_transport_coefficient_named_in_error():
    mc = MonatomicJuttnerClosure()
    st_ = ThermalState(1.0, 1.0)
    with pytest.raises(ZeroDivisionError, match="mu"):
        production_coefficients(mc, st_, JUTTNER,
                                TransportCoefficients(1.0, 0.0, 1.0), CONSTS)


def test_negative_transport_rejected():
    with pytest.raises(ValueError):
        TransportCoefficients(-1.0, 1.0, 1.0)


def test_singular_pressure_derivative():
    flat = UserModel(pressure=lambda r, T: 1.0 + T,
                     internal_energy=lambda r, T: 1.5 * T,
                     p_rho=lambda r, T: 0.0, p_T=lambda r, T: 1.0,
                     eps_rho=lambda r, T: 0.0, eps_T=lambda r, T: 1.5)
    with pytest.raises(SingularDerivativeError):
        a_from_b(1.0, 0.0, 1.0, ThermalState(1.0, 1.0), flat, CONSTS)


def test_builtin_closure_factory():
    assert isinstance(builtin_closure("monatomic_juttner"), MonatomicJuttnerClosure)
    gl = builtin_closure("geroch_lindblom", gl_c1=0.5, gl_c2=2.0)
    assert gl.c1 == 0.5 and gl.c2 == 2.0
    with pytest.raises(MissingModelError):
        builtin_closure("polyatomic_acpr")
    with pytest.raises(ValueError):
        builtin_closure("nope")


def test_shear_production_coefficient_negative_for_builtins():
    for closure, model in ((MonatomicJuttnerClosure(), JUTTNER),
                           (PolyatomicAcprClosure(POLY), POLY),
                           (GerochLindblomClosure(), JUTTNER)):
        for st_ in grid_states(4, 6):
            prod = production_coefficients(closure, st_, model, TRANSPORT, CONSTS)
            assert prod.a2 < 0.0


def test_lmr_symbol_map():
    mc = MonatomicJuttnerClosure()
    st_ = ThermalState(1.0, 0.5)
    prod = production_coefficients(mc, st_, JUTTNER, TRANSPORT, CONSTS)
    symbols = lmr_symbol_map(prod, CONSTS.c)
    assert symbols["B1_pi"] == pytest.approx(-prod.a3 * CONSTS.c**2 / 4.0)
    assert symbols["B3"] == prod.a2
    assert symbols["B4"] == prod.a1


def test_callable_closure_fd_fallback():
    mc = MonatomicJuttnerClosure()
    bare = CallableClosure(
        a=lambda rho, T: mc.evaluate(ThermalState(rho, T), CONSTS).a,
        b=lambda rho, T: mc.evaluate(ThermalState(rho, T), CONSTS).b,
    )
    st_ = ThermalState(1.1, 0.9)
    v_fd, v_an = bare.evaluate(st_, CONSTS), mc.evaluate(st_, CONSTS)
    assert v_fd.a_T == pytest.approx(v_an.a_T, rel=1e-6)
    assert v_fd.b_rho == pytest.approx(v_an.b_rho, rel=1e-6)
