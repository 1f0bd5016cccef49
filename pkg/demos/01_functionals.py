"""
Cycle-averaged functionals on linear systems
=============================================

Probe the origin with the orbit x = eps cos t, xdot = -eps sin t and read
the eigenvalue sum and product straight out of T1 and T2.
"""

import numpy as np

from avgstab import fixture, parse_system
from avgstab.averaging import ExcitationOrbit, cycle_average, eigen_summary, functionals
from avgstab.classify import classify

# The averages everything else rests on. 256 periodic trapezoid nodes are
# already exact to round-off for trigonometric polynomials.
for label, g in [("<cos sin>", lambda t: np.cos(t) * np.sin(t)),
                 ("<cos^2>", lambda t: np.cos(t) ** 2),
                 ("<cos^4>", lambda t: np.cos(t) ** 4),
                 ("<cos^2 sin^2>", lambda t: np.cos(t) ** 2 * np.sin(t) ** 2)]:
    value, err = cycle_average(g, 256)
    print(f"{label:>14} = {value:.16f}   (error estimate {err:.1e})")

# xddot + 3 xdot + 2 x = 0 has eigenvalues -1 and -2
s = parse_system({"n": 2, "rhs": ["x2", "-2*x1 - 3*x2"]})
fr = functionals(s, ExcitationOrbit(0.1))
print("\nT1, T2 =", fr.t1, fr.t2)
print("eigenvalue sum, product =", eigen_summary(fr))

# every linear row of the criteria tables
print()
for name in ["table4_row1", "table4_row2", "table4_row3", "table4_row4", "table4_row5",
             "table4_row6", "table5_row1", "table5_row2", "table5_row3", "table5_row4"]:
    v = classify(functionals(fixture(name), ExcitationOrbit(1e-3)))
    print(f"{name:12s}  T1 {v.t1_sign:4s}  T2 {v.t2_sign:4s}  criterion {v.criterion:3s} {v.status}")
