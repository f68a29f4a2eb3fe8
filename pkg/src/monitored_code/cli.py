"""Command line entry point.

Exit status: 0 on success, 1 for bad input (unreadable or malformed files,
bad arguments), 2 when an internal invariant fails (including a failed
``verify`` check).

Output formats
  analyze   json object, or csv with the EntropyReport fields plus g, g_A, g_B
  distill   one json line per run: m, m_bar, s, feedback, fidelity_log2, seed
  groups    text sections [stabilizer], [logical], [logical_nontrivial_pairs]
  verify    one json line per check; csv: check,passed,count,seconds,detail
  sweep     csv header n,p,sample,seed,S_half,S_R,tau,depth,spec_hash
  profile   csv header sample,seed,L,I_AR,g_A,I_AB,d_code
  fit       json object with a, b, gamma, c, rss (or gamma_code, prefactor)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from contextlib import contextmanager

import numpy as np

from . import distillation, dual_code, experiments, groups, verification
from .dual_code import DecodeError
from .pauli_core import DimensionError
from .schedule import ScheduleParseError, read_schedule
from .tableau import ImpossibleOutcome, enumerate_branches


class InputError(ValueError):
    pass


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _float_grid(text: str) -> list[float]:
    """'0.1,0.2' or 'start:stop:step' (stop included)."""
    if ":" in text:
        start, stop, step = (float(t) for t in text.split(":"))
        if step <= 0:
            raise InputError("grid step must be positive")
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [float(t) for t in text.split(",") if t.strip()]


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def _dump(obj) -> str:
    return json.dumps(obj, default=_jsonable, sort_keys=False)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([r.get(c, "") for c in columns])
    return buf.getvalue()


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _load(path):
    try:
        return read_schedule(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _region(args, schedule):
    members = _int_list(args.subsystem)
    if not members or any(q < 0 or q >= schedule.n for q in members):
        raise InputError(f"subsystem must list qubits in 0..{schedule.n - 1}")
    return members


# subcommands ------------------------------------------------------------------

def cmd_analyze(args) -> int:
    sched = _load(args.schedule)
    region = _region(args, sched)
    calc = dual_code.EntropyCalculator(sched)
    rec = calc.report(region).as_dict()
    clean = calc.cleaning(region)
    rec.update({"g": clean.g, "g_A": clean.g_A, "g_B": clean.g_B,
                "recoverable": calc.code.recoverable(region),
                "logical_qubits": groups.logical_qubit_count(sched)})
    if not clean.identities_hold:
        raise verification.InvariantViolation("cleaning identities fail")
    with _output(args.out) as fh:
        if args.format == "csv":
            fh.write(_csv(list(rec), [rec]))
        else:
            fh.write(_dump(rec) + "\n")
    return 0


def cmd_distill(args) -> int:
    sched = _load(args.schedule)
    mode = args.mode
    if mode == "ab":
        region = _region(args, sched)
    code = dual_code.DualCode(sched)

    def one(rng=None, chooser=None, seed=None):
        if mode == "ab":
            return distillation.distill_AB(sched, region, rng=rng, chooser=chooser, seed=seed, code=code)
        if mode == "sysref":
            return distillation.distill_system_reference(sched, rng=rng, chooser=chooser, seed=seed, code=code)
        return distillation.distill_gullans_huse(sched.n, sched, rng=rng, chooser=chooser, seed=seed)

    records = []
    if args.exhaustive:
        for log2w, res in enumerate_branches(lambda ch: one(chooser=ch)):
            rec = res.as_record()
            rec["log2_weight"] = log2w
            records.append(rec)
    else:
        seeds = np.random.SeedSequence(args.seed).spawn(args.runs)
        for ss in seeds:
            seed = int(ss.generate_state(1)[0])
            records.append(one(rng=np.random.default_rng(seed), seed=seed).as_record())
    with _output(args.out) as fh:
        if args.format == "csv":
            cols = list(records[0]) if records else ["m", "m_bar", "s", "feedback", "fidelity_log2", "seed"]
            rows = [{k: (" ".join(map(str, v)) if isinstance(v, list) else v) for k, v in r.items()} for r in records]
            fh.write(_csv(cols, rows))
        else:
            for r in records:
                fh.write(_dump(r) + "\n")
    return 0


def cmd_groups(args) -> int:
    sched = _load(args.schedule)
    stab = groups.build_stabilizer(sched)
    logic = groups.build_logical(sched)
    pairs = groups.logical_pairs(sched)
    if args.format == "json":
        obj = {"stabilizer": [p.letters() for p in stab.paulis()],
               "logical": [p.letters() for p in logic.paulis()],
               "logical_nontrivial_pairs": [[a.letters(), b.letters()] for a, b in pairs]}
        text = _dump(obj) + "\n"
    else:
        lines = ["[stabilizer]"] + [p.letters() for p in stab.paulis()]
        lines += ["[logical]"] + [p.letters() for p in logic.paulis()]
        lines += ["[logical_nontrivial_pairs]"] + [f"{a.letters()} {b.letters()}" for a, b in pairs]
        text = "\n".join(lines) + "\n"
    with _output(args.out) as fh:
        fh.write(text)
    return 0


def cmd_verify(args) -> int:
    if args.suite not in verification.SUITES and args.suite not in verification.CHECKS:
        raise InputError(f"unknown suite or check {args.suite!r}")
    results = verification.run_suite(args.suite, seed=args.seed, n_max=args.n_max, trials=args.trials)
    records = [r.as_record() for r in results]
    with _output(args.out) as fh:
        if args.format == "csv":
            fh.write(_csv(["check", "passed", "count", "seconds", "detail"], records))
        else:
            for r in records:
                fh.write(_dump(r) + "\n")
    return 0 if all(r.passed for r in results) else 2


def cmd_sweep(args) -> int:
    ns = _int_list(args.n)
    ps = _float_grid(args.p)
    if not ns or not ps or any(not 0 <= p <= 1 for p in ps) or any(n < 2 for n in ns):
        raise InputError("need n >= 2 and p in [0, 1]")
    res = experiments.sweep_measurement_rate(ns, ps, depth=args.depth, samples=args.samples,
                                             seed=args.seed, boundary=args.boundary)
    with _output(args.out) as fh:
        fh.write(res.to_jsonl() if args.format == "json" else res.to_csv())
    return 0


def cmd_profile(args) -> int:
    depth = 2 * args.n if args.depth is None else args.depth
    spec = experiments.CircuitSpec(args.n, depth, args.p, args.boundary, args.seed)
    prof = experiments.decoupling_profile(spec, samples=args.samples)
    rows = []
    for k, s in enumerate(prof["samples"]):
        for r in s["rows"]:
            rows.append({"sample": k, "seed": s["seed"], **r, "d_code": _jsonable(s["d_code"])})
    with _output(args.out) as fh:
        if args.format == "json":
            fh.write(_dump({"d_code_median": prof["d_code_median"], "rows": rows}) + "\n")
        else:
            fh.write(_csv(["sample", "seed", "L", "I_AR", "g_A", "I_AB", "d_code"], rows))
    return 0


def cmd_fit(args) -> int:
    try:
        with open(args.input, newline="") as fh:
            table = list(csv.DictReader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from exc
    try:
        if args.code:
            x = [float(r["n"]) for r in table]
            y = [float(r["d_code"]) if r["d_code"] not in ("", "inf") else math.inf for r in table]
            gamma, pref = experiments.fit_code_exponent(x, y)
            out = {"gamma_code": gamma, "prefactor": pref, "points": len(x)}
        else:
            x = [float(r["L"]) for r in table]
            y = [float(r["S"]) for r in table]
            fit = experiments.subleading_fit(x, y)
            out = {"a": fit.a, "b": fit.b, "gamma": fit.gamma, "c": fit.c, "rss": fit.rss,
                   "residuals": [float(v) for v in fit.residuals]}
    except KeyError as exc:
        raise InputError(f"missing column {exc}") from exc
    except experiments.InsufficientData as exc:
        raise InputError(str(exc)) from exc
    with _output(args.out) as fh:
        if args.format == "csv":
            cols = [k for k in out if k != "residuals"]
            fh.write(_csv(cols, [out]))
        else:
            fh.write(_dump(out) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    def globals_parser(suppress):
        g = argparse.ArgumentParser(add_help=False)
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        g.add_argument("--seed", type=int, **(kw or {"default": 0}))
        g.add_argument("--out", help="output path (default stdout)", **(kw or {"default": None}))
        g.add_argument("--format", choices=("json", "csv"), **(kw or {"default": None}))
        return g

    # flags are accepted before or after the subcommand
    common = globals_parser(True)
    ap = argparse.ArgumentParser(prog="monitored-code", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter,
                                 parents=[globals_parser(False)])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="entropies of a schedule")
    p.add_argument("--schedule", required=True)
    p.add_argument("--subsystem", required=True, help="qubit list such as 0,2 or 0-3")
    p.set_defaults(func=cmd_analyze, default_format="json")

    p = sub.add_parser("distill", parents=[common], help="run a distillation protocol")
    p.add_argument("--schedule", required=True)
    p.add_argument("--subsystem", default="0")
    p.add_argument("--mode", choices=("ab", "sysref", "gh"), default="ab")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--exhaustive", action="store_true", help="enumerate every outcome branch")
    p.set_defaults(func=cmd_distill, default_format="json")

    p = sub.add_parser("groups", parents=[common], help="stabilizer and logical generators")
    p.add_argument("--schedule", required=True)
    p.set_defaults(func=cmd_groups, default_format="text")

    p = sub.add_parser("verify", parents=[common], help="run named checks")
    p.add_argument("--suite", default="all", help="theorems, lemmas, structure, all, or one check name")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.set_defaults(func=cmd_verify, default_format="json")

    p = sub.add_parser("sweep", parents=[common], help="steady-state entropy versus measurement rate")
    p.add_argument("--n", required=True, help="sizes, e.g. 16,32")
    p.add_argument("--p", required=True, help="rates, e.g. 0.05:0.30:0.05 or 0.1,0.2")
    p.add_argument("--depth", type=int, default=None, help="default 2n")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--boundary", choices=("periodic", "open"), default="periodic")
    p.set_defaults(func=cmd_sweep, default_format="csv")

    p = sub.add_parser("profile", parents=[common], help="I(A,R) and g_A versus prefix length")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--boundary", choices=("periodic", "open"), default="periodic")
    p.set_defaults(func=cmd_profile, default_format="csv")

    p = sub.add_parser("fit", parents=[common], help="fit S(L) or d_code(n) from a csv file")
    p.add_argument("--input", required=True, help="csv with columns L,S (or n,d_code with --code)")
    p.add_argument("--code", action="store_true")
    p.set_defaults(func=cmd_fit, default_format="json")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except ScheduleParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InputError, DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (verification.InvariantViolation, DecodeError, ImpossibleOutcome, AssertionError) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
