"""
Phase portrait export
=====================

Integrate a ring of seeds around the origin of the marginal system and
write one CSV per trajectory plus an index, ready for any plotting tool.
"""

import sys
from pathlib import Path

from avgstab import fixture
from avgstab.ode import portrait, ring_seeds, write_portrait

outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "portrait_out")

s = fixture("marginal_cubic")
trajs = portrait(s, ring_seeds(12, 0.3), t_end=20.0, step=1e-2)
index = write_portrait(trajs, outdir)

for tr in trajs[:4]:
    r = tr.norms
    print(f"x0 = {tr.x0.round(3)}  radius range [{r.min():.3f}, {r.max():.3f}]  diverged={tr.diverged}")
print("wrote", index)

# optional picture when matplotlib happens to be around
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots(figsize=(5, 5))
    for tr in trajs:
        ax.plot(tr.states[:, 0], tr.states[:, 1], lw=0.8)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_aspect("equal")
    fig.savefig(outdir / "portrait.png", dpi=120)
    print("wrote", outdir / "portrait.png")
