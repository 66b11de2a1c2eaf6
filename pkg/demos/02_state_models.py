"""State models: the relativistic ideal gas and the one-function polyatomic family.

Every model exposes p, e, specific internal energy, entropy and first
derivatives; the Gibbs residual e_rho - (e + p - T p_T)/rho measures
thermodynamic consistency and vanishes for the built-ins.
"""

import numpy as np

from ret14 import (
    JuttnerModel,
    PhysicalConstants,
    PolyatomicModel,
    ThermalState,
    UserModel,
    evaluate,
    gibbs_entropy,
)

consts = PhysicalConstants()          # natural units c = m = k_B = 1
juttner = JuttnerModel()

print("Relativistic monatomic ideal gas across the coldness range:")
print(f"  {'gamma':>8} {'p':>12} {'e':>12} {'e/p':>10} {'c_V':>10} {'Gibbs defect':>13}")
for gamma in (0.1, 1.0, 10.0, 100.0):
    state = ThermalState(rho=1.0, T=1.0 / gamma)
    ev = evaluate(juttner, state, consts)
    print(f"  {gamma:8.1f} {ev.p:12.5e} {ev.e:12.5e} {ev.e / ev.p:10.4f}"
          f" {ev.c_V:10.4f} {abs(ev.gibbs_residual):13.2e}")
print("  (e/p stays above 3, the ultrarelativistic bound; c_V -> 3/2 classically)")

print("\nEntropy differences approach the classical monatomic gas as gamma grows:")
for T1, T2 in ((1e-4, 2e-4), (1e-5, 2e-5)):
    s1 = juttner.entropy(1.0, T1, consts)
    s2 = juttner.entropy(1.0, T2, consts)
    ideal = 1.5 * consts.theta * np.log(T2 / T1)
    print(f"  T: {T1:.0e} -> {T2:.0e}   dS = {s2 - s1:.8f}   (3/2) ln(T2/T1) = {ideal:.8f}")

print("\nPolyatomic model from a tabulated omega(gamma):")
gammas = np.geomspace(0.05, 200.0, 30)
omega = 3.0 / gammas + 2.2          # a synthetic caloric table
poly = PolyatomicModel.from_table(gammas, omega)
for gamma in (0.2, 2.0, 20.0):
    state = ThermalState(rho=2.0, T=1.0 / gamma)
    ev = evaluate(poly, state, consts)
    print(f"  gamma = {gamma:5.1f}   e = {ev.e:12.5e}   p = {ev.p:12.5e}"
          f"   Gibbs defect = {abs(ev.gibbs_residual):.2e}")

print("\nUser model from bare callables (derivatives by finite differences,")
print("entropy by path integration of the Gibbs form):")
user = UserModel(pressure=lambda r, T: r * T,
                 internal_energy=lambda r, T: 1.5 * T + 0.1 * T * T)
state = ThermalState(1.3, 0.8)
S, S_rho, S_T = gibbs_entropy(user, state, consts)
print(f"  S = {S:.8f}   S_rho = {S_rho:.8f}   S_T = {S_T:.8f}")
ev = evaluate(user, state, consts)
print(f"  p_rho = {ev.p_rho:.8f} (exact {state.T})   Gibbs defect = {abs(ev.gibbs_residual):.2e}")
