"""Averaging-based linearization and its comparison with the Jacobian.

Entry ``(r, c)`` of the averaged state matrix is ``(2/eps^2) <x_c f_r>``.
For a linear system this reproduces the matrix exactly at every radius;
for a smooth nonlinear one it tends to the Jacobian as ``eps -> 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .averaging import MAX_NODES, QUAD_RTOL, default_nodes, _nodes_ok
from .errors import NoConvergence, NonFinite, NotAnEquilibrium
from .system import SystemDef, verify_equilibrium

__all__ = [
    "LinearizedModel", "EpsilonSweep", "JacobianComparison",
    "averaging_matrix", "eigenvalues", "jacobian_fd", "epsilon_sweep",
    "compare_jacobian", "sweep_tolerance",
]

AVERAGING = "AveragingOrbit"
FINITE_DIFFERENCE = "FiniteDifferenceJacobian"


@dataclass(frozen=True)
class LinearizedModel:
    epsilon: float
    matrix: np.ndarray
    eigenvalues: np.ndarray
    source: str
    quad_error: float = 0.0
    warnings: tuple = ()


@dataclass(frozen=True)
class EpsilonSweep:
    epsilons: np.ndarray
    eigenvalues: np.ndarray  # (samples, n), each row sorted
    matrices: np.ndarray  # (samples, n, n)
    verdict: str  # Stable | Unstable | Marginal
    tolerances: np.ndarray

    @property
    def samples(self):
        return list(zip(self.epsilons.tolist(), [list(row) for row in self.eigenvalues]))

    @property
    def eps_range(self):
        return float(self.epsilons[0]), float(self.epsilons[-1])

    @property
    def max_real(self) -> np.ndarray:
        return self.eigenvalues.real.max(axis=1)


@dataclass(frozen=True)
class JacobianComparison:
    epsilons: np.ndarray
    differences: np.ndarray  # ||A(eps) - J||_inf
    jacobian: np.ndarray
    matrices: np.ndarray
    order: float = field(default=float("nan"))  # least-squares log-log slope

    @property
    def shrinking(self) -> bool:
        """Differences decrease monotonically with decreasing epsilon."""
        idx = np.argsort(self.epsilons)
        d = self.differences[idx]
        return bool(np.all(np.diff(d) >= 0))


def _plane_states(t, n, eps, r, c):
    xs = [np.zeros_like(t) for _ in range(n)]
    if r == c:
        xs[c] = eps * np.cos(t)
    else:
        xs[c] = eps * np.cos(t)
        xs[r] = eps * np.sin(t)
    return xs


def _averaged(s, eps, nodes, max_nodes=MAX_NODES):
    n = nodes or default_nodes(s)
    _nodes_ok(n)
    eps2 = eps * eps
    while True:
        t = 2.0 * np.pi * np.arange(n) / n
        full = np.empty((s.n, s.n))
        half = np.empty((s.n, s.n))
        if s.n == 2:
            xs = [eps * np.cos(t), -eps * np.sin(t)]
            fs = s.evaluate_batch(xs)
            if not np.all(np.isfinite(fs)):
                raise NonFinite("right-hand side is not finite on the excitation orbit")
            for r in range(2):
                for c in range(2):
                    full[r, c] = np.mean(xs[c] * fs[r])
                    half[r, c] = np.mean(xs[c][::2] * fs[r][::2])
        else:
            for r in range(s.n):
                for c in range(s.n):
                    xs = _plane_states(t, s.n, eps, r, c)
                    fr = np.broadcast_to(s.evaluate_batch(xs)[r], t.shape)
                    if not np.all(np.isfinite(fr)):
                        raise NonFinite("right-hand side is not finite on the excitation orbit")
                    full[r, c] = np.mean(xs[c] * fr)
                    half[r, c] = np.mean(xs[c][::2] * fr[::2])
        full *= 2.0 / eps2
        half *= 2.0 / eps2
        err = float(np.max(np.abs(full - half)))
        if err <= QUAD_RTOL * max(1.0, float(np.max(np.abs(full)))):
            return full, err
        n *= 2
        if n > max_nodes:
            raise NoConvergence(f"averaged matrix quadrature error {err:.3e} at {max_nodes} nodes")


def averaging_matrix(s: SystemDef, epsilon: float, nodes: int | None = None) -> LinearizedModel:
    """State matrix ``A(eps)`` from cycle averages on plane orbits.

    For ``n == 2`` the single orbit ``x1 = eps cos t, x2 = -eps sin t``
    supplies all four entries. For ``n > 2``, entry ``(r, c)`` excites
    ``x_c = eps cos t`` and ``x_r = eps sin t`` with the other states at zero;
    diagonal entries use ``x_c = eps cos t`` alone.
    """
    if not (math.isfinite(epsilon) and epsilon > 0):
        raise ValueError("epsilon must be positive")
    if not verify_equilibrium(s):
        raise NotAnEquilibrium("origin is not an equilibrium")
    A, err = _averaged(s, epsilon, nodes)
    warnings = tuple(
        f"f{r + 1}: term {term} couples three or more states and is invisible to plane orbits"
        for r, term in s.cross_coupled_terms()
    ) if s.n > 2 else ()
    return LinearizedModel(epsilon, A, eigenvalues(A), AVERAGING, err, warnings)


def _sorted(lams):
    return np.array(sorted(lams, key=lambda z: (z.real, z.imag)), dtype=complex)


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues of a small dense real matrix, sorted by (Re, Im).

    2x2 matrices use the characteristic quadratic
    ``lambda^2 - tau*lambda + Delta = 0``; larger ones go through LAPACK and
    are accepted only if ``|det(A - lambda I)| <= 1e-8 ||A||^n`` for every
    root.
    """
    A = np.asarray(m, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(A)):
        raise NonFinite("matrix has non-finite entries")
    n = A.shape[0]
    if n == 1:
        return np.array([complex(A[0, 0])])
    if n == 2:
        tau = A[0, 0] + A[1, 1]
        delta = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        half = 0.5 * tau
        disc = half * half - delta
        if disc >= 0:
            root = math.sqrt(disc)
            # avoid cancellation: larger-magnitude root first, then Vieta
            big = half + math.copysign(root, half) if half != 0 else root
            small = delta / big if big != 0 else -root
            return _sorted([complex(big), complex(small)])
        root = math.sqrt(-disc)
        return _sorted([complex(half, root), complex(half, -root)])
    lams = np.linalg.eigvals(A)
    norm = max(float(np.linalg.norm(A, np.inf)), np.finfo(float).tiny)
    eye = np.eye(n)
    for lam in lams:
        resid = abs(np.linalg.det(A - lam * eye))
        if resid > 1e-8 * norm ** n:
            raise NoConvergence(f"eigenvalue {lam} fails the backward-error check ({resid:.3e})")
    return _sorted(lams)


def jacobian_fd(s: SystemDef, h: float = 1e-5, at=None) -> LinearizedModel:
    """Central-difference Jacobian at ``at`` (the origin by default)."""
    if not h > 0:
        raise ValueError("h must be positive")
    x0 = np.zeros(s.n) if at is None else np.asarray(at, dtype=float)
    J = np.empty((s.n, s.n))
    for c in range(s.n):
        e = np.zeros(s.n)
        e[c] = h
        J[:, c] = (s.evaluate(x0 + e) - s.evaluate(x0 - e)) / (2.0 * h)
    return LinearizedModel(0.0, J, eigenvalues(J), FINITE_DIFFERENCE)


def sweep_tolerance(A) -> float:
    """Band around the imaginary axis treated as zero real part."""
    return 1e-7 * float(np.linalg.norm(A, np.inf))


def epsilon_sweep(s: SystemDef, eps_min: float, eps_max: float, samples: int = 20,
                  nodes: int | None = None) -> EpsilonSweep:
    """Eigenvalues of ``A(eps)`` on a geometric radius grid.

    Stable iff every eigenvalue has ``Re < -tol`` at every radius; Unstable
    iff some eigenvalue has ``Re > +tol`` somewhere; Marginal otherwise.
    """
    if not 0 < eps_min < eps_max:
        raise ValueError("need 0 < eps_min < eps_max")
    if samples < 3:
        raise ValueError("need at least 3 samples")
    eps = np.geomspace(eps_min, eps_max, samples)
    models = [averaging_matrix(s, float(e), nodes) for e in eps]
    mats = np.array([m.matrix for m in models])
    lams = np.array([m.eigenvalues for m in models])
    tols = np.array([sweep_tolerance(m.matrix) for m in models])
    re = lams.real
    if np.any(re > tols[:, None]):
        verdict = "Unstable"
    elif np.all(re < -tols[:, None]):
        verdict = "Stable"
    else:
        verdict = "Marginal"
    return EpsilonSweep(eps, lams, mats, verdict, tols)


def compare_jacobian(s: SystemDef, eps_list, h: float = 1e-5, nodes: int | None = None) -> JacobianComparison:
    """``||A(eps) - J||_inf`` for each radius, plus the fitted log-log order."""
    eps = np.asarray(list(eps_list), dtype=float)
    if eps.size == 0 or np.any(eps <= 0):
        raise ValueError("all epsilons must be positive")
    J = jacobian_fd(s, h).matrix
    mats = np.array([averaging_matrix(s, float(e), nodes).matrix for e in eps])
    diffs = np.array([np.linalg.norm(A - J, np.inf) for A in mats])
    order = float("nan")
    if eps.size >= 2 and np.all(diffs > 0):
        order = float(np.polyfit(np.log(eps), np.log(diffs), 1)[0])
    return JacobianComparison(eps, diffs, J, mats, order)
