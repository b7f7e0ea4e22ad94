"""Command-line entry point.

Exit codes: 0 success, 1 verification or validation failure, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import synth
from .boolean import TruthTable, all_functions, canonical_balanced_set, is_balanced, is_constant
from .circuit import JointOp, PromiseError, dj_decision, run_dj
from .config import DEFAULT_B0_POINT, DEFAULT_B0_SWEEP, ConfigError, RunConfig, parse_b0
from .dynamics import NumericalError, results_to_csv, sweep_b0
from .params import REFERENCE_B0, REFERENCE_FIDELITIES
from .pulses import compile_joint_op

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2
EXPECTED_TYPE_COUNTS = {1: 7, 2: 12, 3: 12, 4: 4}

log = logging.getLogger("djcqed")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(msg: str, code: int = EXIT_INVALID) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


# --- synth -----------------------------------------------------------------

def synth_report() -> tuple[list[dict], dict[int, int], list[str]]:
    """Rows of the reconstructed table, type counts, and any verification failures."""
    rows, problems = [], []
    counts = {t: 0 for t in EXPECTED_TYPE_COUNTS}
    for f in canonical_balanced_set(3):
        try:
            dec = synth.synthesize(f)
            oracle = synth.brute_force_synthesize(f)
        except synth.SynthesisError as exc:
            problems.append(f"{f}: {exc}")
            continue
        if not dec.verify():
            problems.append(f"{f}: decomposition {dec} does not reproduce the oracle")
        if dec.multiset != oracle.multiset:
            problems.append(f"{f}: synthesis {dec} disagrees with exhaustive search {oracle}")
        counts[dec.type_class] = counts.get(dec.type_class, 0) + 1
        rows.append(synth.decomposition_to_dict(dec))
    if counts != EXPECTED_TYPE_COUNTS:
        problems.append(f"type counts {counts} differ from {EXPECTED_TYPE_COUNTS}")
    return rows, counts, problems


def format_synth_table(rows: list[dict]) -> str:
    header = ("#", "f", "ANF", "gates", "type", "alias")
    body = [(str(i + 1), r["truth_table"], r["anf"], " ".join(r["gates"]),
             str(r["type"]), r["alias"] or "") for i, r in enumerate(rows)]
    widths = [max(len(row[c]) for row in [header] + body) for c in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in [header] + body]
    return "\n".join(lines) + "\n"


def cmd_synth(args) -> int:
    rows, counts, problems = synth_report()
    doc = {"rows": rows, "type_counts": {str(k): v for k, v in counts.items()}}
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    if args.format == "json" and not args.out:
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(format_synth_table(rows))
        sys.stdout.write("type counts: " + ", ".join(f"{k}: {v}" for k, v in counts.items()) + "\n")
    if problems:
        for p in problems:
            print(f"verification failed: {p}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


# --- dj --------------------------------------------------------------------

def dj_table_csv() -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["truth_table", "p000", "decision"])
    for f in all_functions(3):
        if is_constant(f) or is_balanced(f):
            d = run_dj(f)
            w.writerow([str(f), format(d.p000, ".12g"), dj_decision(d).value])
    return buf.getvalue()


def cmd_dj(args) -> int:
    if args.all:
        _emit(dj_table_csv(), args.out)
        return EXIT_OK
    try:
        f = TruthTable.from_string(args.function)
        if f.n != 3:
            raise ValueError("expected an 8-character 0/1 string")
        dist = run_dj(f)
    except PromiseError as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(f"bad function {args.function!r}: {exc}")
    lines = [f"function {f}"]
    lines += [f"  P(|{i:03b}>) = {p:.12f}" for i, p in enumerate(dist.probabilities)]
    lines.append(f"decision: {dj_decision(dist).value}")
    if args.shots:
        lines.append(f"samples ({args.shots} shots, seed {args.seed}): "
                     f"{dist.sample(args.shots, args.seed)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# --- pulse / run / sweep ---------------------------------------------------

def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    changes = {}
    if getattr(args, "b0", None) is not None:
        changes["b0"] = parse_b0(args.b0)
    if getattr(args, "cutoff", None) is not None:
        changes["photon_cutoff"] = args.cutoff
    if getattr(args, "dt", None) is not None:
        changes["dt_override_s"] = args.dt * 1e-9
    if getattr(args, "g_mhz", None) is not None:
        changes["g_over_2pi_mhz"] = args.g_mhz
    if getattr(args, "out", None):
        changes["output_path"] = args.out
    if changes:
        cfg = RunConfig.from_dict({**cfg.to_dict(), **{
            k: list(v) if k == "b0" else v for k, v in changes.items()}})
    return cfg


def cmd_pulse(args) -> int:
    cfg = _load_config(args)
    op = JointOp.parse(args.op)
    sched = compile_joint_op(op, cfg.coupling(cfg.b0_values([DEFAULT_B0_POINT])[0]))
    _emit(json.dumps(sched.to_dicts(), indent=2) + "\n", cfg.output_path)
    return EXIT_OK


def _ops(names) -> list[JointOp]:
    return [JointOp.parse(n) for n in names] if names else list(JointOp)


def reference_comparison(results) -> str:
    lines = []
    for r in results:
        if r.b0 == REFERENCE_B0:
            target = REFERENCE_FIDELITIES[r.op.name]
            lines.append(f"b0={r.b0:g} {r.op.name}: fidelity {r.fidelity:.4f} "
                         f"(reported {target:.3f}, diff {r.fidelity - target:+.4f})")
    return "\n".join(lines)


def _simulate(args, default_b0) -> int:
    cfg = _load_config(args)
    b0s = cfg.b0_values(default_b0)
    noise = cfg.noise.to_params()
    sim = cfg.sim_config()
    ops = _ops(args.op)
    coupling = cfg.coupling(b0s[0])
    sim.step_for(coupling.with_b0(max(b0s)))  # reject an oversized dt before running
    results = sweep_b0(ops, b0s, coupling, noise, sim, jobs=args.jobs)
    _emit(results_to_csv(results), cfg.output_path)
    summary = reference_comparison(results)
    if summary:
        print(summary, file=sys.stdout if cfg.output_path else sys.stderr)
    for r in results:
        if r.flagged:
            log.warning("%s b0=%g: top Fock level population %.2e", r.op.name, r.b0,
                        r.cutoff_population)
    return EXIT_OK


def cmd_sweep(args) -> int:
    return _simulate(args, DEFAULT_B0_SWEEP)


def cmd_run(args) -> int:
    if args.b0 is not None and len(parse_b0(args.b0)) != 1:
        return _fail("run takes a single b0; use sweep for several")
    return _simulate(args, [DEFAULT_B0_POINT])


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="djcqed", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="reconstruct and verify the 35 oracle decompositions")
    p.add_argument("--out", help="write the table as JSON to this path")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("dj", help="run the ideal algorithm")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--function", help="8-character truth table, x1 most significant")
    g.add_argument("--all", action="store_true", help="CSV over all 72 promise functions")
    p.add_argument("--out")
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_dj)

    def sim_flags(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output path")
        p.add_argument("--b0", help="b0 value or comma-separated list")
        p.add_argument("--cutoff", type=int, help="photon cutoff (Fock levels 0..N)")
        p.add_argument("--dt", type=float, help="integration step in ns")
        p.add_argument("--g-mhz", type=float, dest="g_mhz", help="g/2π in MHz")

    p = sub.add_parser("pulse", help="emit the pulse schedule of a joint operation")
    sim_flags(p)
    p.add_argument("--op", required=True, choices=[o.name for o in JointOp])
    p.set_defaults(func=cmd_pulse)

    for name, func, help_ in (("sweep", cmd_sweep, "fidelity versus b0"),
                              ("run", cmd_run, "fidelity at a single b0")):
        p = sub.add_parser(name, help=help_)
        sim_flags(p)
        p.add_argument("--op", action="append", choices=[o.name for o in JointOp],
                       help="restrict to these operations (repeatable)")
        p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        for p in exc.problems:
            print(f"config error: {p}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        return _fail(str(exc), EXIT_NUMERICAL)
    except (ValueError, OSError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
