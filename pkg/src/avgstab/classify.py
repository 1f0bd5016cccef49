"""Equilibrium verdicts and singular-point types from (T1, T2).

Sign rules, tried in order::

    I    T1 > 0                  Unstable
    II   T1 < 0 and T2 >= 0      Unstable
    III  T1 < 0 and T2 < 0       AsymptoticallyStable
    IV   T1 = 0 and T2 < 0       MarginallyStable
    V    T1 = 0 and T2 >= 0      Unstable

"Zero" means inside the band ``|T| <= zero_tol * eps^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .averaging import DEFAULT_EPSILON, ExcitationOrbit, FunctionalResult, eigen_summary, functionals
from .errors import AmbiguousNearBoundary, NotAnEquilibrium
from .linearize import EpsilonSweep, epsilon_sweep
from .system import SystemDef, verify_equilibrium

__all__ = [
    "UNSTABLE", "ASYMPTOTICALLY_STABLE", "MARGINALLY_STABLE", "DEFAULT_ZERO_TOL",
    "Verdict", "SingularPointType", "Analysis", "sign_of", "criterion_for",
    "classify", "classify_singular_point", "analyze",
]

UNSTABLE = "Unstable"
ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
MARGINALLY_STABLE = "MarginallyStable"
DEFAULT_ZERO_TOL = 1e-6
DEGENERATE_RTOL = 1e-6

_STATUS = {"I": UNSTABLE, "II": UNSTABLE, "III": ASYMPTOTICALLY_STABLE, "IV": MARGINALLY_STABLE, "V": UNSTABLE}
_SWEEP_STATUS = {"Stable": ASYMPTOTICALLY_STABLE, "Unstable": UNSTABLE, "Marginal": MARGINALLY_STABLE}


@dataclass(frozen=True)
class Verdict:
    status: str
    criterion: str
    t1_sign: str  # Neg | Zero | Pos
    t2_sign: str


@dataclass(frozen=True)
class SingularPointType:
    kind: str  # Node | DegenerateNode | Focus | Center | Saddle | UniformMotion
    stability: str  # Stable | Unstable | Marginal
    back_solved: dict | None = None
    note: str = ""


def sign_of(value: float, epsilon: float, zero_tol: float = DEFAULT_ZERO_TOL) -> str:
    if abs(value) <= zero_tol * epsilon * epsilon:
        return "Zero"
    return "Pos" if value > 0 else "Neg"


def criterion_for(t1_sign: str, t2_sign: str) -> str:
    if t1_sign == "Pos":
        return "I"
    if t1_sign == "Neg":
        return "II" if t2_sign in ("Zero", "Pos") else "III"
    return "IV" if t2_sign == "Neg" else "V"


def classify(fr: FunctionalResult, zero_tol: float = DEFAULT_ZERO_TOL, strict: bool = False) -> Verdict:
    """Apply the five sign criteria to a functional pair.

    In ``strict`` mode a T1 that lands just outside the zero band (within a
    factor 10 of it) raises :class:`AmbiguousNearBoundary`.
    """
    if not zero_tol > 0:
        raise ValueError("zero_tol must be positive")
    band = zero_tol * fr.epsilon ** 2
    if strict and band < abs(fr.t1) < 10 * band:
        raise AmbiguousNearBoundary(fr.t1, fr.epsilon, zero_tol)
    s1 = sign_of(fr.t1, fr.epsilon, zero_tol)
    s2 = sign_of(fr.t2, fr.epsilon, zero_tol)
    crit = criterion_for(s1, s2)
    return Verdict(_STATUS[crit], crit, s1, s2)


def classify_singular_point(fr: FunctionalResult, zero_tol: float = DEFAULT_ZERO_TOL) -> SingularPointType:
    """Node / focus / centre / saddle type from the eigenvalue sum and product.

    ``back_solved`` holds the positive parameters ``a``, ``b`` of the
    matching textbook row, e.g. ``T1 = -2a eps^2, T2 = -(a^2+b^2) eps^2``
    for a stable focus, or ``T1 = (b-a) eps^2, T2 = ab eps^2`` for a saddle.
    """
    s, p = eigen_summary(fr)
    s_sign = sign_of(fr.t1, fr.epsilon, zero_tol)
    p_sign = {"Pos": "Neg", "Neg": "Pos", "Zero": "Zero"}[sign_of(fr.t2, fr.epsilon, zero_tol)]
    if s_sign == "Zero":
        s = 0.0
    if p_sign == "Zero":
        p = 0.0

    if s_sign == "Zero" and p_sign == "Zero":
        return SingularPointType("UniformMotion", "Unstable", None,
                                 "repeated zero eigenvalue; listed as a degenerate saddle")
    if p_sign in ("Neg", "Zero"):
        # real eigenvalues -a <= 0 <= b:  s = b - a, p = -ab
        root = math.sqrt(s * s - 4.0 * p)
        a = 0.5 * (root - s)
        b = a + s
        return SingularPointType("Saddle", "Unstable", {"a": a, "b": b})

    stability = "Stable" if s < 0 else "Unstable"
    if s_sign == "Zero":
        return SingularPointType("Center", "Marginal", {"b": p})
    d = s * s - 4.0 * p
    if abs(d) <= DEGENERATE_RTOL * max(s * s, abs(p)):
        return SingularPointType("DegenerateNode", stability, {"a": abs(s) / 2.0})
    if d > 0:
        root = math.sqrt(d)
        a, b = sorted(((abs(s) - root) / 2.0, (abs(s) + root) / 2.0))
        return SingularPointType("Node", stability, {"a": a, "b": b})
    return SingularPointType("Focus", stability, {"a": abs(s) / 2.0, "b": math.sqrt(-d) / 2.0})


def table_values(kind: str, stability: str, back_solved: dict) -> tuple[float, float]:
    """(T1/eps^2, T2/eps^2) implied by a back-solved textbook row."""
    a = back_solved.get("a", 0.0)
    b = back_solved.get("b", 0.0)
    sgn = -1.0 if stability == "Stable" else 1.0
    if kind == "Node":
        return sgn * (a + b), -a * b
    if kind == "DegenerateNode":
        return sgn * 2 * a, -a * a
    if kind == "Focus":
        return sgn * 2 * a, -(a * a + b * b)
    if kind == "Center":
        return 0.0, -b
    if kind == "Saddle":
        return b - a, a * b
    raise ValueError(f"no table row for {kind}")


@dataclass(frozen=True)
class Analysis:
    system: SystemDef
    functionals: FunctionalResult
    verdict: Verdict
    singular_point: SingularPointType
    sweep: EpsilonSweep | None = None
    notes: tuple = field(default=())

    @property
    def sweep_derived(self) -> bool:
        return self.sweep is not None

    @property
    def status(self) -> str:
        """Final status; the epsilon sweep overrides a marginal table verdict."""
        if self.sweep is not None:
            return _SWEEP_STATUS[self.sweep.verdict]
        return self.verdict.status


def analyze(s: SystemDef, epsilon: float = DEFAULT_EPSILON, *, nodes: int | None = None,
            zero_tol: float = DEFAULT_ZERO_TOL, strict: bool = False, auto_sweep: bool = False,
            sweep_range: tuple | None = None, sweep_samples: int = 20) -> Analysis:
    """Functionals, verdict and singular-point type at the origin.

    With ``auto_sweep`` an undecided T1 (inside the zero band with T2 < 0,
    or ambiguous in strict mode) is settled by an epsilon sweep of the
    averaged state matrix over ``sweep_range`` (default
    ``(epsilon, 1000*epsilon)``).
    """
    if not verify_equilibrium(s):
        raise NotAnEquilibrium(f"origin is not an equilibrium of {s.label or 'the system'}")
    fr = functionals(s, ExcitationOrbit(epsilon), nodes)
    notes = []
    try:
        verdict = classify(fr, zero_tol, strict=strict)
        needs_sweep = verdict.criterion == "IV"
    except AmbiguousNearBoundary as err:
        if not auto_sweep:
            raise
        verdict = classify(fr, zero_tol)
        needs_sweep = True
        notes.append(str(err))
    sweep = None
    if auto_sweep and needs_sweep:
        lo, hi = sweep_range or (epsilon, 1000.0 * epsilon)
        sweep = epsilon_sweep(s, lo, hi, sweep_samples, nodes)
        notes.append(f"status from epsilon sweep over [{lo:g}, {hi:g}]")
    spt = classify_singular_point(fr, zero_tol)
    return Analysis(s, fr, verdict, spt, sweep, tuple(notes))
