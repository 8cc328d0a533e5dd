"""Command-line front end emitting CSV and JSON artifacts.

Exit status is 0 on success, 1 for invalid input and 2 when a built-in
check fails (an ordering violation in the Werner sweep or a monotonicity
violation in the audit).
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .concentration import convergence_table
from .core import BELL_STATES, LN2, BellCoefficients, CheckFailed, PureState, ket
from .locc import audit_monotonicity
from .measures import werner_sweep
from .purification import iterate
from .separable import RelEntOptions
from .teleportation import teleport

CHANNELS = {**BELL_STATES, "00": ket("00")}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x) + 0.0, ".12g")


def _round_floats(obj):
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _env_seed() -> int:
    raw = os.environ.get("ENTANGLE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"ENTANGLE_SEED must be an integer, got {raw!r}") from None


def _parse_amplitudes(text: str) -> np.ndarray:
    try:
        amps = np.array([complex(s.strip().replace("i", "j")) for s in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse amplitudes {text!r}") from None
    if amps.shape != (2,):
        raise argparse.ArgumentTypeError("expected two comma-separated amplitudes")
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise argparse.ArgumentTypeError("amplitudes must not both be zero")
    return amps / norm


def _parse_counts(text: str) -> list[int]:
    try:
        ns = [int(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse counts {text!r}") from None
    if any(n < 1 for n in ns):
        raise argparse.ArgumentTypeError("counts must be positive")
    return ns


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="entangle", description="Entanglement protocol simulations.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, unit=False):
        sp.add_argument("--out", help="write data here instead of stdout, plus a .meta.json sidecar")
        sp.add_argument("--seed", type=int, default=None, help="default: $ENTANGLE_SEED or 0")
        if unit:
            sp.add_argument("--unit", choices=("nats", "ebits"), default="nats")

    t = sub.add_parser("teleport", help="teleport one qubit and list the four outcomes")
    t.add_argument("--channel", choices=sorted(CHANNELS), default="phi+")
    t.add_argument("--input", type=_parse_amplitudes, default="1,0",
                   help="two amplitudes 'a,b' (complex allowed, e.g. 0.6,0.8j); normalized")
    common(t)

    q = sub.add_parser("purify", help="iterate the two-pair purification recurrence")
    for k in "ABCD":
        q.add_argument(f"--{k}", type=float, required=True)
    q.add_argument("--target", type=float, default=1 - 1e-6)
    q.add_argument("--max-rounds", type=int, default=200)
    common(q)

    c = sub.add_parser("concentrate", help="concentration yield per pair against n")
    c.add_argument("--a2", type=float, required=True)
    c.add_argument("--ns", type=_parse_counts, default="10,100,1000,10000")
    common(c, unit=True)

    w = sub.add_parser("werner-sweep", help="E_F and E_RE along a Werner fidelity grid")
    w.add_argument("--from", dest="start", type=float, default=0.25)
    w.add_argument("--to", dest="stop", type=float, default=1.0)
    w.add_argument("--points", type=int, default=31)
    w.add_argument("--jobs", type=int, default=1)
    common(w, unit=True)

    a = sub.add_parser("locc-audit", help="random LOCC monotonicity audit (JSON report)")
    a.add_argument("--trials", type=int, default=1000)
    a.add_argument("--measure", choices=("formation", "relent"), default="formation")
    common(a)
    return p


def _teleport(args):
    outcomes = teleport(PureState(args.input), CHANNELS[args.channel])
    rows = [(o.bell_result, o.probability, o.fidelity_to_input, o.degenerate) for o in outcomes]
    return to_csv(["outcome", "probability", "fidelity", "degenerate"], rows), 0


def _purify(args):
    coeffs = BellCoefficients(args.A, args.B, args.C, args.D)
    trace = iterate(coeffs, args.target, args.max_rounds)
    header = ["round", "A", "B", "C", "D", "N", "surviving_fraction"]
    return to_csv(header, trace.rows()), 0


def _concentrate(args):
    scale, unit = (1 / LN2, "ebits") if args.unit == "ebits" else (1.0, "nats")
    rows = [(r.n, r.rate * scale, r.ratio) for r in convergence_table(args.a2, args.ns)]
    return to_csv(["n", f"rate_{unit}", "ratio_to_entropy"], rows), 0


def _werner(args):
    if args.points < 1:
        raise ValueError("--points must be at least 1")
    if args.jobs < 1:
        raise ValueError("--jobs must be at least 1")
    grid = np.linspace(args.start, args.stop, args.points)
    rows = werner_sweep(grid, RelEntOptions(seed=args.seed), check=True, jobs=args.jobs)
    scale, unit = (1 / LN2, "ebits") if args.unit == "ebits" else (1.0, "nats")
    header = ["F", f"E_F_{unit}", f"E_RE_{unit}", "fidelity", "ppt_witness", "ere_converged"]
    data = [(r.F, r.E_F * scale, r.E_RE * scale, r.fidelity, r.ppt_witness, r.ere_converged)
            for r in rows]
    return to_csv(header, data), 0


def _audit(args):
    if args.trials < 1:
        raise ValueError("--trials must be at least 1")
    report = audit_monotonicity(args.measure, args.trials, args.seed)
    text = json.dumps(_round_floats(report.__dict__), indent=2, sort_keys=True) + "\n"
    return text, 2 if report.violations else 0


HANDLERS = {
    "teleport": _teleport,
    "purify": _purify,
    "concentrate": _concentrate,
    "werner-sweep": _werner,
    "locc-audit": _audit,
}


def _config(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if isinstance(v, np.ndarray):
            v = [[float(z.real), float(z.imag)] for z in v]
        cfg[k] = v
    return cfg


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.seed is None:
            args.seed = _env_seed()
        text, status = HANDLERS[args.command](args)
    except UsageError as err:
        print(err, file=sys.stderr)
        return 1
    except CheckFailed as err:
        print(f"entangle: check failed: {err}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as err:
        print(f"entangle: error: {err}", file=sys.stderr)
        return 1

    if args.out:
        _write(args.out, text)
        meta = {
            "command": args.command,
            "config": _config(args),
            "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "exit_status": status,
            "version": __version__,
        }
        _write(args.out + ".meta.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)
    if status == 2:
        print("entangle: monotonicity violations found", file=sys.stderr)
    return status


def main():
    sys.exit(run())
