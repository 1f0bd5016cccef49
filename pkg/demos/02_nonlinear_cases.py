"""
Nonlinear oscillators
=====================

Van der Pol, Duffing with quadratic damping, and the damped pendulum at
both of its equilibria.
"""

import math

from avgstab import fixture, shift_equilibrium
from avgstab.averaging import ExcitationOrbit, functionals, limit_cycle_amplitude
from avgstab.classify import analyze
from avgstab.ode import empirical_verdict, integrate

vdp = fixture("vanderpol")

# T1 = eps^2 - eps^4/4 for mu = 1: positive near the origin, zero at eps = 2
for eps in (0.01, 0.5, 1.0, 1.9, 2.5):
    t1 = functionals(vdp, ExcitationOrbit(eps)).t1
    print(f"eps = {eps:4}  T1 = {t1: .6e}   closed form {eps**2 - eps**4 / 4: .6e}")

print("limit-cycle candidates:", limit_cycle_amplitude(vdp, 4.0))

tr = integrate(vdp, [0.01, 0.0], 60.0, 1e-2)
print("RK4 amplitude after t = 45:", abs(tr.states[tr.t >= 45, 0]).max())

# quadratic damping makes T1 cubic in eps
duff = analyze(fixture("duffing"), 0.1)
print("\nDuffing T1/eps^3 =", duff.functionals.t1 / 0.1**3, " (-8/(3 pi) =", -8 / (3 * math.pi), ")")
print("Duffing verdict:", duff.verdict.status, duff.verdict.criterion)

pend = fixture("pendulum")
for label, s in [("x_e = (0, 0)", pend), ("x_e = (pi, 0)", shift_equilibrium(pend, [math.pi, 0.0]))]:
    a = analyze(s, 1e-3)
    sp = a.singular_point
    print(f"\npendulum {label}: criterion {a.verdict.criterion}, {a.status}")
    print(f"  singular point {sp.kind} ({sp.stability}), back-solved {sp.back_solved}")
    print("  simulation says:", empirical_verdict(s))
