"""``stab`` command-line front-end.

Exit codes: 0 ok, 1 usage, 2 origin is not an equilibrium, 3 numerical
failure, 4 parse error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from .averaging import DEFAULT_EPSILON, eigen_summary, limit_cycle_amplitude
from .classify import DEFAULT_ZERO_TOL, analyze
from .errors import NotAnEquilibrium, NotCanonical, NumericalError, ParseError, StabError
from .linearize import averaging_matrix, compare_jacobian, epsilon_sweep, jacobian_fd
from .ode import DEFAULT_SEED, portrait, ring_seeds, write_portrait
from .system import load_system, shift_equilibrium, verify_equilibrium

EXIT_OK, EXIT_USAGE, EXIT_NOT_EQUILIBRIUM, EXIT_NUMERICAL, EXIT_PARSE = 0, 1, 2, 3, 4
COMMANDS = ("analyze", "linearize", "sweep", "portrait", "compare-jacobian")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(kind):
    def conv(text):
        val = kind(text)
        if not val > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text}")
        return val
    return conv


def _node_count(text):
    n = int(text)
    if n < 16 or n % 2:
        raise argparse.ArgumentTypeError(f"node count must be even and >= 16, got {text}")
    return n


def _eps_range(text):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}") from None
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError("need 0 < MIN < MAX")
    return lo, hi


def _shift(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stab", description="Equilibrium stability via cycle-averaged functionals.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", required=True, help="system-definition JSON file")
    p.add_argument("--epsilon", type=_positive(float), default=DEFAULT_EPSILON)
    p.add_argument("--eps-range", type=_eps_range, default=None, metavar="MIN:MAX")
    p.add_argument("--samples", type=_positive(int), default=None)
    p.add_argument("--nodes", type=_node_count, default=None)
    p.add_argument("--zero-tol", type=_positive(float), default=DEFAULT_ZERO_TOL)
    p.add_argument("--shift", type=_shift, default=None, help="equilibrium to move to the origin, e.g. 3.14159,0")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--output", default=None)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--h", type=_positive(float), default=1e-5, help="finite-difference step")
    p.add_argument("--no-sweep", action="store_true", help="analyze: never defer to an epsilon sweep")
    p.add_argument("--lc-max", type=_positive(float), default=None, help="sweep: largest radius for limit-cycle roots")
    p.add_argument("--radius", type=_positive(float), default=0.2, help="portrait: seed ring radius")
    p.add_argument("--t-end", type=_positive(float), default=20.0)
    p.add_argument("--step", type=_positive(float), default=1e-2)
    return p


def _complex_pairs(lams):
    return [[float(z.real), float(z.imag)] for z in lams]


def _matrix(A):
    return [[float(v) for v in row] for row in np.asarray(A)]


def _nodes(args):
    if args.nodes is not None:
        return args.nodes
    env = os.environ.get("STAB_NODES")
    if not env:
        return None
    try:
        return _node_count(env)
    except (ValueError, argparse.ArgumentTypeError) as err:
        raise UsageError(f"STAB_NODES: {err}") from None


def _load(args):
    s = load_system(args.input)
    if args.shift is not None:
        s = shift_equilibrium(s, args.shift)
    return s


def cmd_analyze(args, s):
    if s.n != 2:
        raise UsageError("analyze needs a planar (n = 2) system; use linearize or sweep")
    a = analyze(s, args.epsilon, nodes=_nodes(args), zero_tol=args.zero_tol,
                auto_sweep=not args.no_sweep, sweep_range=args.eps_range,
                sweep_samples=args.samples or 20)
    fr, v, sp = a.functionals, a.verdict, a.singular_point
    ssum, sprod = eigen_summary(fr)
    return {
        "command": "analyze",
        "label": s.label,
        "shift": args.shift,
        "epsilon": fr.epsilon,
        "nodes": fr.nodes,
        "form": fr.form,
        "t1": fr.t1,
        "t2": fr.t2,
        "quad_error": fr.quad_error,
        "verdict": v.status,
        "criterion": v.criterion,
        "t1_sign": v.t1_sign,
        "t2_sign": v.t2_sign,
        "status": a.status,
        "sweep_derived": a.sweep_derived,
        "sweep_verdict": a.sweep.verdict if a.sweep is not None else None,
        "singular_point": sp.kind,
        "singular_point_stability": sp.stability,
        "back_solved": sp.back_solved,
        "eigen_summary": {"sum": ssum, "product": sprod},
        "notes": list(a.notes) + ([sp.note] if sp.note else []),
    }


def cmd_linearize(args, s):
    if not verify_equilibrium(s):
        raise NotAnEquilibrium("origin is not an equilibrium")
    m = averaging_matrix(s, args.epsilon, _nodes(args))
    J = jacobian_fd(s, args.h)
    return {
        "command": "linearize",
        "label": s.label,
        "shift": args.shift,
        "epsilon": m.epsilon,
        "matrix": _matrix(m.matrix),
        "eigenvalues": _complex_pairs(m.eigenvalues),
        "quad_error": m.quad_error,
        "jacobian": _matrix(J.matrix),
        "jacobian_eigenvalues": _complex_pairs(J.eigenvalues),
        "h": args.h,
        "difference_norm": float(np.linalg.norm(m.matrix - J.matrix, np.inf)),
        "warnings": list(m.warnings),
    }


def cmd_sweep(args, s):
    if not verify_equilibrium(s):
        raise NotAnEquilibrium("origin is not an equilibrium")
    lo, hi = args.eps_range or (1e-3, 1.0)
    sw = epsilon_sweep(s, lo, hi, args.samples or 20, _nodes(args))
    roots = None
    if s.n == 2:
        roots = limit_cycle_amplitude(s, args.lc_max or max(4.0, hi), nodes=_nodes(args), zero_tol=args.zero_tol)
    return {
        "command": "sweep",
        "label": s.label,
        "shift": args.shift,
        "eps_range": [lo, hi],
        "verdict": sw.verdict,
        "samples": [
            {"epsilon": float(e), "eigenvalues": _complex_pairs(l), "tolerance": float(tol)}
            for e, l, tol in zip(sw.epsilons, sw.eigenvalues, sw.tolerances)
        ],
        "limit_cycle_roots": [float(r) for r in roots] if roots is not None else None,
    }


def cmd_compare(args, s):
    if not verify_equilibrium(s):
        raise NotAnEquilibrium("origin is not an equilibrium")
    lo, hi = args.eps_range or (1e-3, 1e-1)
    eps = np.geomspace(lo, hi, args.samples or 3)
    c = compare_jacobian(s, eps, args.h, _nodes(args))
    return {
        "command": "compare-jacobian",
        "label": s.label,
        "shift": args.shift,
        "jacobian": _matrix(c.jacobian),
        "h": args.h,
        "rows": [{"epsilon": float(e), "difference_norm": float(d)} for e, d in zip(c.epsilons, c.differences)],
        "order": None if np.isnan(c.order) else c.order,
        "shrinking": c.shrinking,
    }


def cmd_portrait(args, s):
    if s.n != 2:
        raise UsageError("portrait needs a planar (n = 2) system")
    seeds = ring_seeds(args.samples or 8, args.radius)
    trajs = portrait(s, seeds, args.t_end, args.step)
    outdir = Path(args.output or "portrait")
    index = write_portrait(trajs, outdir)
    return {
        "command": "portrait",
        "label": s.label,
        "index": str(index),
        "trajectories": len(trajs),
        "diverged": sum(tr.diverged for tr in trajs),
    }


_HANDLERS = {
    "analyze": cmd_analyze,
    "linearize": cmd_linearize,
    "sweep": cmd_sweep,
    "compare-jacobian": cmd_compare,
    "portrait": cmd_portrait,
}


def _csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cmd = report["command"]
    if cmd == "sweep":
        n = len(report["samples"][0]["eigenvalues"]) if report["samples"] else 0
        w.writerow(["epsilon"] + [f"{p}_{i + 1}" for i in range(n) for p in ("re", "im")])
        for row in report["samples"]:
            w.writerow([f"{row['epsilon']:.17g}"] + [f"{v:.17g}" for pair in row["eigenvalues"] for v in pair])
    elif cmd == "compare-jacobian":
        w.writerow(["epsilon", "difference_norm"])
        for row in report["rows"]:
            w.writerow([f"{row['epsilon']:.17g}", f"{row['difference_norm']:.17g}"])
    else:
        w.writerow(["key", "value"])
        for k, v in report.items():
            w.writerow([k, json.dumps(v) if not isinstance(v, str) else v])
    return buf.getvalue()


def _text(report):
    lines = []
    for k, v in report.items():
        if isinstance(v, float):
            v = f"{v:.17g}"
        elif isinstance(v, (list, dict)):
            v = json.dumps(v)
        lines.append(f"{k:>26}: {v}")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        return _csv(report)
    return _text(report)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as err:
        print(f"stab: {err}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as err:  # --help
        return EXIT_OK if not err.code else EXIT_USAGE
    try:
        s = _load(args)
        report = _HANDLERS[args.command](args, s)
    except UsageError as err:
        print(f"stab: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"stab: cannot read input: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:  # out-of-range option values the parser cannot see
        print(f"stab: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as err:
        print(f"stab: parse error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except NotAnEquilibrium as err:
        print(f"stab: {err}", file=sys.stderr)
        return EXIT_NOT_EQUILIBRIUM
    except (NumericalError, NotCanonical) as err:
        print(f"stab: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except StabError as err:
        print(f"stab: {err}", file=sys.stderr)
        return EXIT_NUMERICAL

    if args.command == "sweep" and args.format == "csv":
        print(f"verdict: {report['verdict']}; limit-cycle roots: {report['limit_cycle_roots']}", file=sys.stderr)
    text = render(report, args.format)
    if args.output and args.command != "portrait":
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
