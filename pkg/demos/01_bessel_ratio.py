"""Modified Bessel functions K_n and the ratio G = K3/K2.

The ratio drives every monatomic closed form: the caloric equation of
state, the closure coefficients and the production terms.  This script
shows the raw functions, the exponential scaling that keeps G alive far
into the near-classical regime, and the derivative identity
dG/dgamma = G^2 - 5 G/gamma - 1.
"""

import numpy as np

from ret14 import bessel_k, bessel_k_scaled, bessel_ratio_g, bessel_ratio_g_prime

print("K_n(x) for a few orders and arguments")
for n in (0, 1, 2, 3):
    row = "  ".join(f"K_{n}({x:5.1f}) = {bessel_k(n, x):12.6e}" for x in (0.5, 1.0, 10.0))
    print("  " + row)

print("\nUnscaled values underflow around x ~ 740; the scaled ones do not:")
for x in (10.0, 100.0, 1000.0, 10000.0):
    print(f"  e^x K_2({x:7.1f}) = {bessel_k_scaled(2, x):.12f}"
          f"   G = {bessel_ratio_g(x):.12f}")

print("\nG decreases from ~4/gamma (ultrarelativistic) toward 1 + 5/(2 gamma):")
for gamma in (0.1, 1.0, 10.0, 100.0, 1000.0):
    g = bessel_ratio_g(gamma)
    print(f"  gamma = {gamma:7.1f}   G = {g:13.9f}   1 + 5/(2 gamma) = {1 + 2.5 / gamma:13.9f}")

print("\nDerivative identity versus central finite differences:")
for gamma in (0.5, 5.0, 50.0, 500.0):
    identity = bessel_ratio_g_prime(gamma)
    h = 1e-6 * gamma
    fd = (bessel_ratio_g(gamma + h) - bessel_ratio_g(gamma - h)) / (2 * h)
    print(f"  gamma = {gamma:6.1f}   identity = {identity:15.9e}   fd = {fd:15.9e}")

worst = 0.0
for gamma in np.geomspace(0.1, 1e3, 200):
    g = bessel_ratio_g(float(gamma))
    h = 1e-4 * float(gamma)
    fd = (bessel_ratio_g(float(gamma) + h) - bessel_ratio_g(float(gamma) - h)) / (2 * h)
    worst = max(worst, abs(fd + 1 + 5 * g / gamma - g * g) / (1 + abs(fd)))
print(f"\nWorst identity defect on 200 log-spaced points: {worst:.3e}")
