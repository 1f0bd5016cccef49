"""Regenerate tests/golden/*.json from the current CLI.

Run only after a deliberate behaviour change, then review the diff.
"""
import io
import json
import sys
from contextlib import redirect_stdout
from pathlib import Path

from avgstab.cli import main
from avgstab.system import FIXTURE_DIR

GOLDEN = Path(__file__).parent / "golden"

# (golden name, argv)
CASES = [(f"analyze_{name}", ["analyze", "--input", str(FIXTURE_DIR / f"{name}.json")]) for name in [
    "table4_row1", "table4_row2", "table4_row3", "table4_row4", "table4_row5", "table4_row6",
    "table5_row1", "table5_row2", "table5_row3", "table5_row4",
    "vanderpol", "duffing", "pendulum", "marginal_cubic", "harmonic", "linear_stable", "rayleigh",
]] + [
    ("analyze_pendulum_upper", ["analyze", "--input", str(FIXTURE_DIR / "pendulum.json"),
                                "--shift", "3.141592653589793,0"]),
    ("linearize_marginal_cubic", ["linearize", "--input", str(FIXTURE_DIR / "marginal_cubic.json"),
                                  "--epsilon", "0.5"]),
    ("linearize_lorenz", ["linearize", "--input", str(FIXTURE_DIR / "lorenz.json")]),
    ("sweep_vanderpol", ["sweep", "--input", str(FIXTURE_DIR / "vanderpol.json"), "--samples", "8"]),
    ("compare_pendulum", ["compare-jacobian", "--input", str(FIXTURE_DIR / "pendulum.json")]),
]


def run(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    if code != 0:
        raise SystemExit(f"{argv} exited {code}")
    return buf.getvalue()


if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CASES:
        report = json.loads(run(argv))
        (GOLDEN / f"{name}.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
        print("wrote", name, file=sys.stderr)
