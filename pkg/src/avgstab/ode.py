"""Fixed-step RK4 integration: an independent check on the verdicts."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .system import SystemDef

__all__ = [
    "Trajectory", "integrate", "integrate_batch", "empirical_verdict",
    "portrait", "ring_seeds", "trajectory_csv", "write_portrait",
    "DIVERGENCE_NORM", "DEFAULT_SEED",
]

DIVERGENCE_NORM = 1e6
DEFAULT_SEED = 42


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # (len(t), n)
    x0: np.ndarray
    step: float
    diverged: bool = False

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)


def _rhs(s, X):
    # X: (n, m) batch of states
    return s.evaluate_batch(list(X))


def _rk4_batch(s, X0, t_end, step, diverge_at=DIVERGENCE_NORM):
    """Integrate every column of ``X0`` (shape (n, m)).

    Returns times, states (k+1, n, m) and the index of the first sample at
    which each trajectory became non-finite or exceeded ``diverge_at``
    (``-1`` when it never did).
    """
    if not step > 0 or not t_end > 0:
        raise ValueError("step and t_end must be positive")
    nsteps = int(np.ceil(t_end / step - 1e-9))
    h = t_end / nsteps
    X = np.array(X0, dtype=float)
    out = np.empty((nsteps + 1,) + X.shape)
    out[0] = X
    bad = np.full(X.shape[1], -1)
    alive = np.ones(X.shape[1], dtype=bool)
    with np.errstate(all="ignore"):
        for k in range(nsteps):
            k1 = _rhs(s, X)
            k2 = _rhs(s, X + 0.5 * h * k1)
            k3 = _rhs(s, X + 0.5 * h * k2)
            k4 = _rhs(s, X + h * k3)
            X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            norm = np.linalg.norm(X, axis=0)
            newly = alive & ~(np.isfinite(norm) & (norm <= diverge_at))
            if np.any(newly):
                bad[newly] = k + 1
                alive &= ~newly
                # park dead trajectories at their last good state
                X[:, newly] = out[k][:, newly]
            out[k + 1] = X
            if not np.any(alive):
                out = out[: k + 2]
                break
    t = h * np.arange(out.shape[0])
    return t, out, bad, h


def integrate_batch(s: SystemDef, x0s, t_end: float, step: float) -> list[Trajectory]:
    X0 = np.asarray(x0s, dtype=float).reshape(-1, s.n).T
    t, out, bad, h = _rk4_batch(s, X0, t_end, step)
    trajs = []
    for j in range(X0.shape[1]):
        stop = out.shape[0] if bad[j] < 0 else bad[j]
        trajs.append(Trajectory(t[:stop].copy(), out[:stop, :, j].copy(), X0[:, j].copy(), h, bool(bad[j] >= 0)))
    return trajs


def integrate(s: SystemDef, x0, t_end: float, step: float) -> Trajectory:
    """Classical RK4 from ``x0`` to ``t_end``.

    The step is shrunk slightly if needed so that the last sample lands on
    ``t_end``. A trajectory whose norm exceeds 1e6 (or turns non-finite) is
    cut at the last good sample and flagged ``diverged``.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (s.n,):
        raise ValueError(f"x0 must have {s.n} components")
    return integrate_batch(s, [x0], t_end, step)[0]


def _random_directions(n, count, rng):
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def empirical_verdict(s: SystemDef, n_trials: int = 16, r0: float = 0.05, t_end: float = 50.0,
                      step: float = 1e-2, seed: int = DEFAULT_SEED, growth: float = 10.0) -> str:
    """Stable / Unstable / Inconclusive from random starts at radius ``r0``.

    Stable when every trajectory's max norm over the final quarter is below
    ``r0/2``; Unstable when any trajectory exceeds ``growth*r0`` (diverged
    runs included); Inconclusive otherwise.
    """
    if n_trials < 8:
        raise ValueError("n_trials must be at least 8")
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    rng = np.random.default_rng(seed)
    x0s = r0 * _random_directions(s.n, n_trials, rng)
    trajs = integrate_batch(s, x0s, t_end, step)
    if any(tr.diverged or tr.norms.max() > growth * r0 for tr in trajs):
        return "Unstable"
    tail_max = []
    for tr in trajs:
        start = int(np.searchsorted(tr.t, 0.75 * t_end))
        tail_max.append(tr.norms[start:].max())
    if max(tail_max) < 0.5 * r0:
        return "Stable"
    return "Inconclusive"


def ring_seeds(count: int, radius: float, n: int = 2) -> np.ndarray:
    """``count`` seeds evenly spaced on a circle in the (x1, x2) plane."""
    ang = 2.0 * np.pi * np.arange(count) / count
    seeds = np.zeros((count, n))
    seeds[:, 0] = radius * np.cos(ang)
    seeds[:, 1] = radius * np.sin(ang)
    return seeds


def portrait(s: SystemDef, seeds, t_end: float = 20.0, step: float = 1e-2) -> list[Trajectory]:
    if s.n != 2:
        raise ValueError("phase portraits need a planar system")
    return integrate_batch(s, seeds, t_end, step)


def trajectory_csv(tr: Trajectory) -> str:
    """CSV text with header ``t,x1,...,xn`` at 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = tr.states.shape[1]
    w.writerow(["t"] + [f"x{i + 1}" for i in range(n)])
    for ti, row in zip(tr.t, tr.states):
        w.writerow([f"{ti:.17g}"] + [f"{v:.17g}" for v in row])
    return buf.getvalue()


def write_portrait(trajs: list[Trajectory], outdir, prefix: str = "traj") -> Path:
    """One CSV per trajectory plus ``index.json``; returns the index path."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, tr in enumerate(trajs):
        name = f"{prefix}_{k:03d}.csv"
        (outdir / name).write_text(trajectory_csv(tr), encoding="utf-8")
        entries.append({
            "file": name,
            "x0": [float(v) for v in tr.x0],
            "samples": int(len(tr.t)),
            "step": float(tr.step),
            "diverged": tr.diverged,
        })
    index = outdir / "index.json"
    index.write_text(json.dumps({"trajectories": entries}, indent=2) + "\n", encoding="utf-8")
    return index
