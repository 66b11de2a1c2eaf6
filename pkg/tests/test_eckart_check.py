import numpy as np
import pytest

from ret14.closure import (
    GerochLindblomClosure,
    MonatomicJuttnerClosure,
    PerturbedClosure,
    PolyatomicAcprClosure,
    PolyatomicPrClosure,
    TransportCoefficients,
    production_coefficients,
)
from ret14.covariant import METRIC, assemble_equilibrium_tensors, four_velocity, lower
from ret14.eckart_check import (
    FieldPoint,
    GaussianBumpField,
    eckart_constitutive,
    eliminate_material_derivatives,
    projection_residuals,
    random_field_points,
    residual_norms,
    triple_divergence,
)
from ret14.state_models import (
    JuttnerModel,
    PhysicalConstants,
    PolyatomicModel,
    ThermalState,
    evaluate,
)

CONSTS = PhysicalConstants()
JUTTNER = JuttnerModel()
POLY = PolyatomicModel.juttner_omega()
TRANSPORT = TransportCoefficients(chi=0.7, mu=1.3, nu=2.1)


def homogeneous_point(rho=1.0, T=1.0, v=0.0, c=1.0):
    return FieldPoint(state=ThermalState(rho, T), U=four_velocity(v, c),
                      grad_rho=np.zeros(4), grad_T=np.zeros(4),
                      grad_U=np.zeros((4, 4)))


def expansion_point(theta, rho=1.0, T=1.0, c=1.0):
    grad_U = np.zeros((4, 4))
    grad_U[1, 1] = grad_U[2, 2] = grad_U[3, 3] = theta / 3.0
    return FieldPoint(state=ThermalState(rho, T), U=four_velocity(0.0, c),
                      grad_rho=np.zeros(4), grad_T=np.zeros(4), grad_U=grad_U)


def test_homogeneous_material_derivatives_vanish():
    dots = eliminate_material_derivatives(homogeneous_point(), JUTTNER, CONSTS)
    assert dots.rho_dot == 0.0 and dots.T_dot == 0.0
    assert np.all(dots.U_dot == 0.0)


def test_pure_expansion_material_derivatives():
    theta = 0.4
    pt = expansion_point(theta)
    ev = evaluate(JUTTNER, pt.state, CONSTS)
    dots = eliminate_material_derivatives(pt, JUTTNER, CONSTS)
    assert dots.rho_dot == pytest.approx(-pt.state.rho * theta, rel=1e-14)
    assert dots.T_dot == pytest.approx(-pt.state.T * ev.p_T * theta / ev.e_T, rel=1e-13)
    assert np.all(dots.U_dot == 0.0)


def test_acceleration_orthogonal_to_velocity():
    for _, _, pt in random_field_points(20, seed=5, constants=CONSTS):
        dots = eliminate_material_derivatives(pt, JUTTNER, CONSTS)
        drift = abs(float(lower(pt.U) @ dots.U_dot))
        assert drift <= 1e-10 * (np.max(np.abs(dots.U_dot)) + 1e-300) * CONSTS.c


def test_constitutive_fields_homogeneous():
    fields = eckart_constitutive(homogeneous_point(), TRANSPORT, JUTTNER, CONSTS)
    assert fields.pi == 0.0
    assert np.all(fields.q == 0.0) and np.all(fields.t == 0.0)


def test_constitutive_heat_flux_with_acceleration_correction():
    # rest frame, only d_x T nonzero; the pressure gradient accelerates the
    # frame, so q picks up the relativistic correction:
    # q^x = -chi (d_x T - T d_x p / (e + p))
    dT = 0.3
    pt = FieldPoint(state=ThermalState(1.0, 1.0), U=four_velocity(0.0, 1.0),
                    grad_rho=np.zeros(4), grad_T=np.array([0.0, dT, 0.0, 0.0]),
                    grad_U=np.zeros((4, 4)))
    ev = evaluate(JUTTNER, pt.state, CONSTS)
    fields = eckart_constitutive(pt, TRANSPORT, JUTTNER, CONSTS)
    expected = -TRANSPORT.chi * (dT - pt.state.T * ev.p_T * dT / (ev.e + ev.p))
    assert fields.q[1] == pytest.approx(expected, rel=1e-13)
    assert fields.q[0] == 0.0
    assert np.all(fields.t == 0.0) and fields.pi == 0.0


def test_constitutive_pure_shear():
    # d_x U^y = s at rest; the covariant shear component is t_xy = -mu s,
    # equivalently t_{xy} = +mu s for the lowered velocity gradient, and the
    # classical momentum flux T^{xy} = -mu s is recovered
    s = 0.25
    grad_U = np.zeros((4, 4))
    grad_U[1, 2] = s
    pt = FieldPoint(state=ThermalState(1.0, 1.0), U=four_velocity(0.0, 1.0),
                    grad_rho=np.zeros(4), grad_T=np.zeros(4), grad_U=grad_U)
    fields = eckart_constitutive(pt, TRANSPORT, JUTTNER, CONSTS)
    assert fields.t[1, 2] == pytest.approx(-TRANSPORT.mu * s, rel=1e-13)
    assert fields.t[2, 1] == fields.t[1, 2]
    assert abs(np.einsum("ab,ab->", METRIC, fields.t)) <= 1e-15
    # entropy production of this configuration is positive
    from ret14.covariant import entropy_production
    sigma = entropy_production(pt.state.T, pt.U, pt.grad_T, pt.grad_U,
                               fields=fields, c=CONSTS.c)
    assert sigma == pytest.approx(TRANSPORT.mu * s**2 / pt.state.T, rel=1e-13)
    assert fields.pi == 0.0


def test_triple_divergence_matches_finite_differences():
    field = GaussianBumpField(amp_rho=0.07, amp_T=-0.05, v_amp=0.22,
                              bump_rho=(0.1, -0.2, 0.9, 1.2),
                              bump_T=(-0.3, 0.2, 1.1, 0.8),
                              bump_v=(0.2, 0.1, 1.3, 1.0), constants=CONSTS)
    closure = MonatomicJuttnerClosure()

    def triple_at(t, x):
        pt = field.field_point(t, x)
        v = closure.evaluate(pt.state, CONSTS)
        ev = evaluate(JUTTNER, pt.state, CONSTS)
        _, _, A = assemble_equilibrium_tensors(pt.state.rho, ev.p, ev.e,
                                               v.a, v.b, pt.U, CONSTS.c)
        return A

    t0, x0, h = 0.15, -0.1, 1e-5
    dA0 = (triple_at(t0 + h, x0) - triple_at(t0 - h, x0)) / (2 * h * CONSTS.c)
    dA1 = (triple_at(t0, x0 + h) - triple_at(t0, x0 - h)) / (2 * h)
    div_fd = dA0[0] + dA1[1]

    pt = field.field_point(t0, x0)
    v = closure.evaluate(pt.state, CONSTS)
    da = v.a_rho * pt.grad_rho + v.a_T * pt.grad_T
    db = v.b_rho * pt.grad_rho + v.b_T * pt.grad_T
    div = triple_divergence(v.a, v.b, da, db, pt.U, pt.grad_U, CONSTS.c)
    assert np.max(np.abs(div - div_fd)) <= 1e-7 * np.max(np.abs(div))
    # the divergence of a traceless tensor is traceless
    assert abs(np.einsum("bg,bg->", METRIC, div)) <= 1e-12 * np.max(np.abs(div))


@pytest.mark.parametrize("closure,model", [
    (MonatomicJuttnerClosure(), JUTTNER),
    (PolyatomicAcprClosure(POLY), POLY),
    (PolyatomicPrClosure(POLY), POLY),
    (GerochLindblomClosure(), JUTTNER),
], ids=["monatomic", "acpr", "pr", "geroch_lindblom"])
def test_projection_residuals_vanish_for_compatible_closures(closure, model):
    for _, _, pt in random_field_points(25, seed=11, constants=CONSTS):
        prod = production_coefficients(closure, pt.state, model, TRANSPORT, CONSTS)
        res = projection_residuals(pt, closure, prod, TRANSPORT, model, CONSTS)
        assert res.compatibility_defect is None
        assert max(residual_norms(res)) <= 1e-8 * res.scale


def test_projection_residual_structure():
    closure = MonatomicJuttnerClosure()
    for _, _, pt in random_field_points(10, seed=3, constants=CONSTS):
        prod = production_coefficients(closure, pt.state, JUTTNER, TRANSPORT, CONSTS)
        res = projection_residuals(pt, closure, prod, TRANSPORT, JUTTNER, CONSTS)
        # heat residual lives in the U-orthogonal subspace
        assert abs(float(res.heat @ pt.U)) <= 1e-12 * (np.max(np.abs(res.heat)) + 1e-300)
        # shear residual is orthogonal to U and traceless against the projector
        assert np.max(np.abs(res.shear @ pt.U)) <= 1e-12 * (np.max(np.abs(res.shear)) + 1e-300)
        h = np.outer(pt.U, pt.U) / CONSTS.c**2 - METRIC
        assert abs(np.einsum("ab,ab->", h, res.shear)) <= 1e-10 * (np.max(np.abs(res.shear)) + 1e-300)


def test_violation_shows_in_heat_projection():
    base = MonatomicJuttnerClosure()
    violated = PerturbedClosure(base, 1.01)
    responses = []
    for _, _, pt in random_field_points(25, seed=17, constants=CONSTS):
        prod = production_coefficients(violated, pt.state, JUTTNER, TRANSPORT, CONSTS)
        res = projection_residuals(pt, violated, prod, TRANSPORT, JUTTNER, CONSTS)
        assert res.compatibility_defect is not None
        responses.append(float(np.linalg.norm(res.heat)) / res.scale)
    assert max(responses) >= 1e-3
    assert np.median(responses) >= 1e-3


def test_residuals_linear_in_violation_and_gradients():
    base = MonatomicJuttnerClosure()
    _, _, pt = random_field_points(1, seed=23, constants=CONSTS)[0]

    def heat_norm(closure, point):
        prod = production_coefficients(closure, point.state, JUTTNER, TRANSPORT, CONSTS)
        res = projection_residuals(point, closure, prod, TRANSPORT, JUTTNER, CONSTS)
        return float(np.linalg.norm(res.heat))

    small = heat_norm(PerturbedClosure(base, 1.001), pt)
    large = heat_norm(PerturbedClosure(base, 1.002), pt)
    assert large / small == pytest.approx(2.0, rel=2e-2)

    doubled = FieldPoint(state=pt.state, U=pt.U, grad_rho=2 * pt.grad_rho,
                         grad_T=2 * pt.grad_T, grad_U=2 * pt.grad_U)
    closure = PerturbedClosure(base, 1.01)
    assert heat_norm(closure, doubled) == pytest.approx(
        2.0 * heat_norm(closure, pt), rel=1e-9)


def test_field_point_validation():
    bad = FieldPoint(state=ThermalState(1.0, 1.0), U=np.array([1.0, 0.2, 0.0, 0.0]),
                     grad_rho=np.zeros(4), grad_T=np.zeros(4), grad_U=np.zeros((4, 4)))
    with pytest.raises(Exception):
        bad.validate(1.0)
    grad_U = np.zeros((4, 4))
    grad_U[1, 0] = 0.3  # time component drift breaks U_b d_a U^b = 0
    bad2 = FieldPoint(state=ThermalState(1.0, 1.0), U=four_velocity(0.0, 1.0),
                      grad_rho=np.zeros(4), grad_T=np.zeros(4), grad_U=grad_U)
    with pytest.raises(ValueError):
        bad2.validate(1.0)


def test_random_field_points_deterministic():
    a = random_field_points(5, seed=99, constants=CONSTS)
    b = random_field_points(5, seed=99, constants=CONSTS)
    for (ta, xa, pa), (tb, xb, pb) in zip(a, b):
        assert ta == tb and xa == xb
        assert np.array_equal(pa.U, pb.U)
        assert np.array_equal(pa.grad_U, pb.grad_U)


def test_bump_field_amplitude_guard():
    with pytest.raises(ValueError):
        GaussianBumpField(amp_rho=0.5)
    with pytest.raises(ValueError):
        GaussianBumpField(v_amp=1.5)
