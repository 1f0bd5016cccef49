"""Cycle averages over a small excitation orbit and the two stability functionals.

The probe orbit is ``x1 = eps*cos(t)``, ``x2 = -eps*sin(t)`` for one period
``t in [0, 2*pi)``. Averages use the periodic trapezoid rule, which is
spectrally accurate for smooth periodic integrands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NoConvergence, NonFinite, NotAnEquilibrium, NotCanonical
from .system import SystemDef, verify_equilibrium

__all__ = [
    "DEFAULT_EPSILON", "DEFAULT_NODES", "ABS_NODES", "MAX_NODES",
    "ExcitationOrbit", "FunctionalResult", "cycle_average", "default_nodes",
    "functionals_scalar", "functionals_statespace", "functionals",
    "eigen_summary", "limit_cycle_amplitude",
]

DEFAULT_EPSILON = 1e-3
DEFAULT_NODES = 256
ABS_NODES = 1024
MAX_NODES = 65536
QUAD_RTOL = 1e-9


@dataclass(frozen=True)
class ExcitationOrbit:
    """Circular probe of radius ``epsilon`` in the plane of states ``plane``.

    ``plane = (i, j)`` (0-based) puts ``x_i = eps*cos(t)`` and
    ``x_j = -eps*sin(t)``; every other state is held at zero.
    """

    epsilon: float
    plane: tuple = (0, 1)

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon!r}")
        i, j = self.plane
        if i == j or min(i, j) < 0:
            raise ValueError(f"invalid orbit plane {self.plane!r}")

    def states(self, t, n):
        i, j = self.plane
        if max(i, j) >= n:
            raise ValueError(f"orbit plane {self.plane!r} outside a {n}-state system")
        t = np.asarray(t, dtype=float)
        xs = [np.zeros_like(t) for _ in range(n)]
        xs[i] = self.epsilon * np.cos(t)
        xs[j] = -self.epsilon * np.sin(t)
        return xs


@dataclass(frozen=True)
class FunctionalResult:
    t1: float
    t2: float
    epsilon: float
    quad_error: float
    nodes: int
    form: str = "statespace"  # or "scalar"


def _nodes_ok(nodes):
    if nodes < 16 or nodes % 2:
        raise ValueError(f"node count must be even and >= 16, got {nodes}")


def cycle_average(g: Callable, nodes: int = DEFAULT_NODES, *, tol: float | None = None,
                  max_nodes: int = MAX_NODES) -> tuple[float, float]:
    """Average of a 2*pi-periodic ``g`` over one period.

    ``g`` is called once with the full array of nodes. The error estimate is
    the difference between the ``nodes`` and ``nodes/2`` rules. With ``tol``
    set the node count is doubled until the estimate drops below it.
    """
    _nodes_ok(nodes)
    n = nodes
    while True:
        t = 2.0 * np.pi * np.arange(n) / n
        vals = np.broadcast_to(np.asarray(g(t), dtype=float), t.shape)
        if not np.all(np.isfinite(vals)):
            raise NonFinite("integrand returned a non-finite value on the orbit")
        value = float(np.mean(vals))
        err = abs(value - float(np.mean(vals[::2])))
        if tol is None or err <= tol:
            return value, err
        n *= 2
        if n > max_nodes:
            raise NoConvergence(f"quadrature error {err:.3e} above {tol:.3e} at {max_nodes} nodes")


def default_nodes(s: SystemDef) -> int:
    # |.| makes the integrand only finitely smooth; trapezoid converges algebraically
    return ABS_NODES if s.has_abs else DEFAULT_NODES


def _converged(s, orbit, nodes, combine, rtol=QUAD_RTOL, max_nodes=MAX_NODES):
    """Evaluate ``combine(avg)`` with node doubling.

    ``avg(a, b)`` is the cycle average of ``x_a * f_b`` on the orbit.
    """
    n = nodes or default_nodes(s)
    _nodes_ok(n)
    eps2 = orbit.epsilon ** 2
    while True:
        t = 2.0 * np.pi * np.arange(n) / n
        xs = orbit.states(t, s.n)
        fs = s.evaluate_batch(xs)
        if not np.all(np.isfinite(fs)):
            raise NonFinite("right-hand side is not finite on the excitation orbit")
        full = combine(lambda a, b: float(np.mean(xs[a] * fs[b])))
        half = combine(lambda a, b: float(np.mean(xs[a][::2] * fs[b][::2])))
        err = max(abs(x - y) for x, y in zip(full, half))
        scale = max(eps2, *(abs(v) for v in full))
        if err <= rtol * scale:
            return full, err, n
        n *= 2
        if n > max_nodes:
            raise NoConvergence(f"functional quadrature error {err:.3e} at {max_nodes} nodes")


def _check_equilibrium(s):
    if not verify_equilibrium(s):
        raise NotAnEquilibrium(f"origin is not an equilibrium of {s.label or 'the system'}")


def functionals_scalar(s: SystemDef, orbit: ExcitationOrbit, nodes: int | None = None) -> FunctionalResult:
    """T1 = <2 xdot f>, T2 = <2 x f> for ``xddot = f(x, xdot)``.

    ``s`` must be in canonical second-order form (``f1`` is exactly ``x2``).
    """
    if not s.is_second_order_canonical:
        raise NotCanonical("scalar functionals need f1 == x2")
    _check_equilibrium(s)
    (t1, t2), err, n = _converged(s, orbit, nodes, lambda avg: (2 * avg(1, 1), 2 * avg(0, 1)))
    return FunctionalResult(t1, t2, orbit.epsilon, err, n, form="scalar")


def functionals_statespace(s: SystemDef, orbit: ExcitationOrbit, nodes: int | None = None) -> FunctionalResult:
    """Functionals for a planar state-space system.

    T1 = 2(<x1 f1> + <x2 f2>) and
    T2 = (4/eps^2)(<x2 f1><x1 f2> - <x1 f1><x2 f2>).
    For linear systems these equal trace(A)*eps^2 and -det(A)*eps^2.
    """
    if s.n != 2:
        raise ValueError("state-space functionals are defined for n = 2")
    _check_equilibrium(s)
    eps2 = orbit.epsilon ** 2

    def combine(avg):
        a11, a12, a21, a22 = avg(0, 0), avg(1, 0), avg(0, 1), avg(1, 1)
        return 2 * (a11 + a22), 4.0 / eps2 * (a12 * a21 - a11 * a22)

    (t1, t2), err, n = _converged(s, orbit, nodes, combine)
    return FunctionalResult(t1, t2, orbit.epsilon, err, n, form="statespace")


def functionals(s: SystemDef, orbit: ExcitationOrbit, nodes: int | None = None) -> FunctionalResult:
    """Scalar form when ``s`` is canonical second order, state-space otherwise."""
    if s.is_second_order_canonical:
        return functionals_scalar(s, orbit, nodes)
    return functionals_statespace(s, orbit, nodes)


def eigen_summary(fr: FunctionalResult) -> tuple[float, float]:
    """(sum, product) of the eigenvalue estimates: T1/eps^2 and -T2/eps^2."""
    eps2 = fr.epsilon ** 2
    return fr.t1 / eps2, -fr.t2 / eps2


def limit_cycle_amplitude(s: SystemDef, eps_max: float, *, samples: int = 200,
                          eps_min: float | None = None, nodes: int | None = None,
                          zero_tol: float = 1e-6, tol: float = 1e-10) -> list[float]:
    """Orbit radii in ``(0, eps_max]`` where T1 changes sign.

    T1 is scanned on a geometric grid; values inside the zero band
    ``|T1| <= zero_tol*eps^2`` carry no sign. Each bracket is bisected
    until ``|T1| <= tol``.
    """
    if not eps_max > 0:
        raise ValueError("eps_max must be positive")
    _check_equilibrium(s)

    def t1(eps):
        return functionals(s, ExcitationOrbit(eps), nodes).t1

    grid = np.geomspace(eps_min or eps_max * 1e-4, eps_max, samples)
    roots = []
    last = None  # (eps, sign) of the previous signed sample
    for eps in grid:
        v = t1(eps)
        sign = 0 if abs(v) <= zero_tol * eps * eps else (1 if v > 0 else -1)
        if sign == 0:
            continue
        if last is not None and sign != last[1]:
            roots.append(float(_bisect(t1, last[0], eps, last[1], tol)))
        last = (float(eps), sign)
    return roots


def _bisect(fn, lo, hi, sign_lo, tol):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        v = fn(mid)
        if abs(v) <= tol:
            return mid
        if mid in (lo, hi):
            break
        if (v > 0) == (sign_lo > 0):
            lo = mid
        else:
            hi = mid
    raise NoConvergence(f"bisection stalled near eps = {0.5 * (lo + hi):.17g}")
