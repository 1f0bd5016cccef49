"""State-space system definitions ``dx_i/dt = f_i(x_1, ..., x_n)``."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from . import expr as ex
from .errors import DimensionMismatch, DomainError, InvalidSystem, ParseError, UnknownSymbol

__all__ = [
    "SystemDef", "parse_system", "load_system", "shift_equilibrium",
    "verify_equilibrium", "probe_points", "fixture", "fixture_names",
]

PROBE_RADIUS = 1e-3
PROBE_COUNT = 32


def probe_points(n: int, radius: float = PROBE_RADIUS, count: int = PROBE_COUNT) -> np.ndarray:
    """Origin plus ``count`` deterministic points on the sphere of ``radius``."""
    rng = np.random.default_rng(12345)
    pts = rng.standard_normal((count, n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return np.vstack([np.zeros((1, n)), radius * pts])


@dataclass(frozen=True)
class SystemDef:
    """An autonomous n-state system.

    Construction validates the dimension, that every symbol is bound and
    that all right-hand sides are finite on the probe neighbourhood of the
    origin (see :func:`probe_points`).
    """

    n: int
    rhs: tuple
    params: Mapping[str, float] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise DimensionMismatch(f"state dimension must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "rhs", tuple(self.rhs))
        object.__setattr__(self, "params", MappingProxyType({k: float(v) for k, v in self.params.items()}))
        if len(self.rhs) != self.n:
            raise DimensionMismatch(f"n = {self.n} but {len(self.rhs)} right-hand sides given")
        for f in self.rhs:
            for i in ex.variables(f):
                if i >= self.n:
                    raise UnknownSymbol(f"x{i + 1}")
            for p in ex.parameters(f):
                if p not in self.params:
                    raise UnknownSymbol(p)
        pts = probe_points(self.n)
        try:
            vals = self.evaluate_batch(pts.T)
        except DomainError as err:
            raise InvalidSystem(f"right-hand side undefined near the origin ({err})") from err
        if not np.all(np.isfinite(vals)):
            raise InvalidSystem("right-hand side is not finite near the origin")

    def __hash__(self):
        return hash((self.n, self.rhs, tuple(sorted(self.params.items())), self.label))

    def __eq__(self, other):
        if not isinstance(other, SystemDef):
            return NotImplemented
        return (self.n, self.rhs, dict(self.params), self.label) == (other.n, other.rhs, dict(other.params), other.label)

    def evaluate(self, state: Sequence[float]) -> np.ndarray:
        """Right-hand side at a single state, shape ``(n,)``."""
        return np.array([ex.evaluate(f, state, self.params) for f in self.rhs])

    def evaluate_batch(self, xs) -> np.ndarray:
        """Right-hand side on arrays: ``xs[i]`` holds x_{i+1} samples.

        Returns an array of shape ``(n,) + broadcast shape``.
        """
        xs = [np.asarray(x, dtype=float) for x in xs]
        shape = np.broadcast_shapes(*(x.shape for x in xs))
        return np.stack([np.broadcast_to(ex.evaluate_array(f, xs, self.params), shape) for f in self.rhs])

    @property
    def has_abs(self) -> bool:
        return any(ex.uses_function(f, "abs") for f in self.rhs)

    @property
    def is_second_order_canonical(self) -> bool:
        """``f1`` is literally ``x2`` (the scalar ``xddot = f`` form)."""
        return self.n == 2 and self.rhs[0] == ex.Var(1)

    def to_document(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "params": dict(self.params),
            "rhs": [ex.to_string(f) for f in self.rhs],
        }

    def cross_coupled_terms(self) -> list[tuple[int, str]]:
        """Nonlinear additive terms that involve three or more states.

        Plane-orbit averaging zeroes every state outside the excited pair, so
        such terms never contribute to the averaged matrix.
        """
        found = []
        for r, f in enumerate(self.rhs):
            for term in ex.additive_terms(f):
                if len(ex.variables(term)) >= 3 and not ex.is_linear(term):
                    found.append((r, ex.to_string(term)))
        return found


def parse_system(doc) -> SystemDef:
    """Build a :class:`SystemDef` from a system-definition document.

    ``doc`` is either the JSON text or the already-decoded object. Two forms
    are accepted::

        {"label": ..., "n": 2, "params": {...}, "rhs": ["x2", "-x1"]}
        {"label": ..., "params": {...}, "order2": {"f": "-x - xdot"}}

    The second is sugar for ``x1' = x2, x2' = f(x, xdot)``.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as err:
            raise ParseError(f"invalid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise ParseError("system definition must be a JSON object")
    params = doc.get("params", {}) or {}
    if not isinstance(params, dict) or not all(isinstance(v, (int, float)) for v in params.values()):
        raise ParseError("params must map names to numbers")
    clash = [p for p in params if p in ex.FUNCTIONS or ex._VAR_RE.match(p) or p in ("x", "xdot")]
    if clash:
        raise ParseError(f"parameter name collides with a reserved symbol: {clash[0]!r}")
    label = str(doc.get("label", ""))
    if "order2" in doc:
        order2 = doc["order2"]
        if not isinstance(order2, dict) or not isinstance(order2.get("f"), str):
            raise ParseError('"order2" must be an object with a string field "f"')
        n = 2
        texts = ["x2", order2["f"]]
    else:
        if "rhs" not in doc:
            raise ParseError('system definition needs "rhs" or "order2"')
        texts = doc["rhs"]
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            raise ParseError('"rhs" must be a list of strings')
        n = doc.get("n", len(texts))
        if not isinstance(n, int) or isinstance(n, bool):
            raise ParseError('"n" must be an integer')
        if len(texts) != n:
            raise DimensionMismatch(f"n = {n} but {len(texts)} right-hand sides given")
    rhs = [ex.parse_expr(t, n, params) for t in texts]
    return SystemDef(n=n, rhs=tuple(rhs), params=params, label=label)


def load_system(path) -> SystemDef:
    return parse_system(Path(path).read_text(encoding="utf-8"))


def shift_equilibrium(s: SystemDef, xe: Sequence[float]) -> SystemDef:
    """Move the equilibrium ``xe`` to the origin by substituting ``x_i -> z_i + xe_i``.

    Components with ``xe_i == 0`` are left untouched, so a canonical
    ``f1 = x2`` stays canonical when only ``x1`` is shifted.
    """
    xe = [float(v) for v in xe]
    if len(xe) != s.n:
        raise DimensionMismatch(f"shift has {len(xe)} components, system has {s.n}")
    if not all(np.isfinite(xe)):
        raise ValueError("equilibrium location must be finite")
    mapping = {i: ex.BinOp("+", ex.Var(i), ex.Num(v)) for i, v in enumerate(xe) if v != 0.0}
    rhs = tuple(ex.substitute(f, mapping) for f in s.rhs)
    label = f"{s.label} shifted by {xe}" if s.label else f"shifted by {xe}"
    return SystemDef(n=s.n, rhs=rhs, params=s.params, label=label)


def verify_equilibrium(s: SystemDef, tol: float = 1e-9) -> bool:
    """True iff every ``|f_i(0)| <= tol``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    return bool(np.all(np.abs(s.evaluate(np.zeros(s.n))) <= tol))


FIXTURE_DIR = Path(__file__).parent / "fixtures"


def fixture_names() -> list[str]:
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.json"))


def fixture(name: str) -> SystemDef:
    """One of the bundled example systems, e.g. ``fixture("vanderpol")``."""
    path = FIXTURE_DIR / f"{name}.json"
    if not path.exists():
        raise KeyError(f"no bundled fixture {name!r}; have {fixture_names()}")
    return load_system(path)
