import json
import math

import numpy as np
import pytest

from avgstab import fixture, parse_system
from avgstab.ode import (
    empirical_verdict,
    integrate,
    integrate_batch,
    portrait,
    ring_seeds,
    trajectory_csv,
    write_portrait,
)

# frozen from tests/oracles.py (DOP853, rtol 1e-11, t_end 200)
VDP_STEADY_AMPLITUDE = 2.0086198604732752


def test_harmonic_period():
    tr = integrate(fixture("harmonic"), [1.0, 0.0], 2 * math.pi, 1e-3)
    assert np.all(np.abs(tr.final - [1.0, 0.0]) <= 1e-9)
    assert tr.t[-1] == pytest.approx(2 * math.pi, abs=1e-12)
    assert len(tr.t) == len(tr.states)
    assert np.all(np.diff(tr.t) > 0)


def test_exponential_decay():
    s = parse_system({"n": 1, "rhs": ["-x1"]})
    tr = integrate(s, [1.0], 1.0, 1e-2)
    assert abs(tr.final[0] - math.exp(-1)) <= 1e-10


def test_fourth_order_convergence():
    s = fixture("harmonic")
    errs = []
    for h in (0.1, 0.05):
        tr = integrate(s, [1.0, 0.0], 2 * math.pi, h)
        errs.append(np.linalg.norm(tr.final - [1.0, 0.0]))
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.1)


def test_energy_drift_harmonic():
    tr = integrate(fixture("harmonic"), [1.0, 0.0], 200 * math.pi, 1e-2)
    energy = 0.5 * np.sum(tr.states**2, axis=1)
    assert np.max(np.abs(energy - 0.5)) < 1e-6


def test_vanderpol_reaches_limit_cycle():
    tr = integrate(fixture("vanderpol"), [0.01, 0.0], 60.0, 1e-2)
    tail = tr.t >= 45.0
    amp = np.max(np.abs(tr.states[tail, 0]))
    assert 1.9 <= amp <= 2.1
    assert amp == pytest.approx(VDP_STEADY_AMPLITUDE, abs=1e-3)


def test_divergence_is_flagged():
    s = parse_system({"n": 1, "rhs": ["x1^2"]})
    tr = integrate(s, [1.0], 5.0, 1e-3)  # blows up at t = 1
    assert tr.diverged
    assert tr.t[-1] < 1.01
    assert np.all(np.isfinite(tr.states))
    assert np.all(np.linalg.norm(tr.states, axis=1) <= 1e6)


def test_batch_matches_single():
    s = fixture("pendulum")
    seeds = ring_seeds(5, 0.3)
    batch = integrate_batch(s, seeds, 3.0, 1e-2)
    for x0, tr in zip(seeds, batch):
        single = integrate(s, x0, 3.0, 1e-2)
        assert np.array_equal(single.states, tr.states)


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        integrate(fixture("harmonic"), [1.0, 0.0], 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(fixture("harmonic"), [1.0, 0.0], -1.0, 0.1)
    with pytest.raises(ValueError):
        integrate(fixture("harmonic"), [1.0], 1.0, 0.1)


@pytest.mark.parametrize("name,kwargs,expected", [
    ("table5_row1", {}, "Stable"),
    ("vanderpol", {}, "Unstable"),
    ("marginal_cubic", {"r0": 0.05}, "Inconclusive"),
    ("harmonic", {}, "Inconclusive"),
    ("pendulum", {}, "Stable"),
    ("table4_row4", {}, "Unstable"),
])
def test_empirical_verdicts(name, kwargs, expected):
    assert empirical_verdict(fixture(name), **kwargs) == expected


def test_empirical_verdict_is_seeded():
    s = fixture("marginal_cubic")
    assert empirical_verdict(s, seed=1) == empirical_verdict(s, seed=1)
    with pytest.raises(ValueError):
        empirical_verdict(s, n_trials=4)


def test_portrait_files(tmp_path):
    trajs = portrait(fixture("marginal_cubic"), ring_seeds(4, 0.2), t_end=1.0, step=0.1)
    index = write_portrait(trajs, tmp_path / "out")
    meta = json.loads(index.read_text())
    assert len(meta["trajectories"]) == 4
    first = (tmp_path / "out" / meta["trajectories"][0]["file"]).read_text().splitlines()
    assert first[0] == "t,x1,x2"
    assert len(first) == 1 + 11
    assert first[1] == "0,0.20000000000000001,0"


def test_portrait_requires_plane():
    with pytest.raises(ValueError):
        portrait(fixture("lorenz"), [[0.1, 0, 0]])


def test_csv_round_trips_exactly():
    tr = integrate(fixture("vanderpol"), [0.1, 0.0], 1.0, 0.1)
    rows = trajectory_csv(tr).splitlines()[1:]
    back = np.array([[float(v) for v in r.split(",")] for r in rows])
    assert np.array_equal(back[:, 1:], tr.states)
    assert np.array_equal(back[:, 0], tr.t)
