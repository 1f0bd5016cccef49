"""
Averaging linearization and the marginal case
=============================================

x1' = x2, x2' = x2^2 - x1 + x1^3 has a Jacobian with eigenvalues +-1j, so
the Jacobian alone cannot decide. The averaged matrix A(eps) keeps some of
the nonlinearity and can be swept over the orbit radius.
"""

import numpy as np

from avgstab import fixture
from avgstab.classify import analyze
from avgstab.linearize import averaging_matrix, compare_jacobian, epsilon_sweep, jacobian_fd
from avgstab.ode import empirical_verdict

s = fixture("marginal_cubic")

J = jacobian_fd(s)
print("Jacobian:\n", J.matrix.round(12), "\neigenvalues:", J.eigenvalues)

A = averaging_matrix(s, 0.5)
print("\nA(0.5):\n", A.matrix.round(12), "\neigenvalues:", A.eigenvalues)

# the gap to the Jacobian is (3/4) eps^2
c = compare_jacobian(s, [1e-1, 1e-2, 1e-3])
for eps, d in zip(c.epsilons, c.differences):
    print(f"eps = {eps:.0e}  ||A - J|| = {d:.3e}   0.75 eps^2 = {0.75 * eps**2:.3e}")
print("fitted order:", round(c.order, 4))

sw = epsilon_sweep(s, 1e-3, 1.1, 12)
print("\nsweep verdict:", sw.verdict)
print("largest |Re lambda| over the sweep:", np.abs(sw.eigenvalues.real).max())

a = analyze(s, 1e-3, auto_sweep=True)
print("\nanalyze: criterion", a.verdict.criterion, "->", a.status, "(sweep-derived:", a.sweep_derived, ")")
print("random starts at r0 = 0.05:", empirical_verdict(s, r0=0.05))
