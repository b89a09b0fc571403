"""Command-line front end: simulate, evaluate, verify, sweep, algebra-check,
gen-corpus."""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import random
import sys

from . import corpus
from .algebra import (CombinerAlgebra, GridEvaluation, check_field_axioms,
                      degree_check, evaluate_on_grid, interpolate, merge_projection)
from .are import CSV_COLUMNS, audit_row, evaluate_root, sweep_b
from .machine import MachineError, machine_to_text, parse_machine, run_direct
from .transcript import (TranscriptFormatError, transcript_from_binary,
                         transcript_from_text, transcript_to_binary,
                         transcript_to_text)
from .verifier import default_block_size, verify


def _load_machine(path: str):
    with open(path, encoding="utf-8") as f:
        return parse_machine(f.read())


def _load_transcript(path: str, fmt: str):
    if fmt == "binary":
        with open(path, "rb") as f:
            return transcript_from_binary(f.read())
    with open(path, encoding="utf-8") as f:
        return transcript_from_text(f.read())


def _write_transcript(tr, path: str, fmt: str):
    if fmt == "binary":
        with open(path, "wb") as f:
            f.write(transcript_to_binary(tr))
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(transcript_to_text(tr))


def _geometric_bs(t: int):
    bs = []
    b = 1
    while b <= t:
        bs.append(b)
        b *= 2
    if bs[-1] != t:
        bs.append(t)
    return bs


def _parse_b_list(raw: str, t: int):
    if raw.strip().lower() == "geometric":
        return _geometric_bs(t)
    return [int(x) for x in raw.split(",") if x.strip()]


def cmd_simulate(args) -> int:
    m = _load_machine(args.machine)
    final, tr = run_direct(m, args.input, args.t)
    print(f"state: {final.state}")
    print(f"input_head: {final.input_head}")
    print("work_heads: " + " ".join(str(h) for h in final.work_heads))
    if args.out:
        _write_transcript(tr, args.out, args.format)
        print(f"transcript: {args.out} ({tr.t} records)")
    return 0


def cmd_evaluate(args) -> int:
    m = _load_machine(args.machine)
    tr = _load_transcript(args.transcript, args.format)
    b = args.b if args.b is not None else default_block_size(tr.t)
    summary, audit = evaluate_root(m, args.input, tr, b)
    row = audit_row(tr.t, b, summary, audit)
    w = csv.writer(sys.stdout)
    w.writerow(CSV_COLUMNS)
    w.writerow([row[c] for c in CSV_COLUMNS])
    print(f"root: [{summary.interval[0]},{summary.interval[1]}] "
          f"{summary.q_in} -> {summary.q_out} status={summary.status}")
    if not summary.is_ok():
        loc = summary.locus
        print(f"locus: {loc.kind} block={loc.block} tape={loc.tape} "
              f"field={loc.field} ({loc.detail})", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args) -> int:
    m = _load_machine(args.machine)
    tr = _load_transcript(args.transcript, args.format)
    verdict = verify(m, args.input, tr, args.b)
    print(verdict.to_json())
    return 0 if verdict.decision == "ACCEPT" else 1


def cmd_sweep(args) -> int:
    m = _load_machine(args.machine)
    tr = _load_transcript(args.transcript, args.format)
    b_values = _parse_b_list(args.b_list, tr.t) if args.b_list else _geometric_bs(tr.t)
    rows, root = sweep_b(m, args.input, tr, b_values)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([row[c] for c in CSV_COLUMNS])
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if args.plot:
        from .plotting import render_sweep
        png = args.plot if isinstance(args.plot, str) else None
        if png is None:
            base = args.out or "sweep.csv"
            png = os.path.splitext(base)[0] + ".png"
        render_sweep(rows, png)
        print(f"figure: {png}", file=sys.stderr)
    return 0 if root.is_ok() else 1


def cmd_algebra_check(args) -> int:
    failures = list(check_field_axioms())
    m = _load_machine(args.machine)
    alg = CombinerAlgebra(m.states)
    rng = random.Random(args.seed or 0)

    # interpolation identity on a random grid
    axes = ((0, 1, 2), (0, 1, 2))
    vals = rng.randbytes(9 * 2)
    import numpy as np
    grid = GridEvaluation(axes=axes,
                          values=np.frombuffer(vals, dtype=np.uint8).reshape(3, 3, 2))
    back = evaluate_on_grid(interpolate(grid), axes)
    if not np.array_equal(back.values, grid.values):
        failures.append("interpolation does not reproduce its grid values")

    # degree stability of the combiner's truth table
    d = degree_check(alg.g_truth_grid())
    if d > alg.degree_bound:
        failures.append(f"combiner degree {d} exceeds bound {alg.degree_bound}")

    # algebraic/semantic agreement on random composition trees
    for _ in range(50):
        n = rng.randint(1, 8)
        projs = [(rng.choice(m.states), rng.choice(m.states), rng.random() < 0.9)
                 for _ in range(n)]
        grids = [alg.leaf_grid(*p) for p in projs]
        ref = projs[0]
        acc = grids[0]
        for p, g in zip(projs[1:], grids[1:]):
            ref = merge_projection(ref, p)
            acc = alg.combine(acc, g)
        if alg.decode_grid(acc) != ref:
            failures.append(f"grid merge disagrees with projection merge on {projs}")
            break

    if failures:
        for f in failures:
            print(f"FAIL: {f}", file=sys.stderr)
        return 1
    print("algebra-check: pass")
    return 0


def cmd_gen_corpus(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    pairs = corpus.generate_corpus(args.seed or 0, args.count, args.t)
    for i, (m, x) in enumerate(pairs):
        with open(os.path.join(args.out, f"m{i:03d}.tm"), "w", encoding="utf-8") as f:
            f.write(machine_to_text(m))
        with open(os.path.join(args.out, f"m{i:03d}.input"), "w", encoding="utf-8") as f:
            f.write(x + "\n")
    print(f"wrote {len(pairs)} machines to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqrtsim",
                                description="block-respecting simulation toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, transcript=False):
        sp.add_argument("--machine", required=True, help="machine file")
        sp.add_argument("--input", default="", help="input string")
        sp.add_argument("--format", choices=("text", "binary"), default="text")
        if transcript:
            sp.add_argument("transcript", help="transcript file")

    sp = sub.add_parser("simulate", help="run the machine and emit a transcript")
    add_common(sp)
    sp.add_argument("-t", type=int, required=True, help="step count")
    sp.add_argument("--out", help="transcript output path")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("evaluate", help="evaluate the root summary with a space audit")
    add_common(sp, transcript=True)
    sp.add_argument("-b", type=int, default=None, help="block size (default ceil(sqrt(t)))")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("verify", help="accept or reject a transcript")
    add_common(sp, transcript=True)
    sp.add_argument("-b", type=int, default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="evaluate across block sizes, emit CSV")
    add_common(sp, transcript=True)
    sp.add_argument("--b-list", help="comma list of block sizes, or 'geometric'")
    sp.add_argument("--out", help="CSV output path (default stdout)")
    sp.add_argument("--plot", nargs="?", const=True, default=None,
                    help="also render the sweep figure (PNG path optional)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("algebra-check", help="field and combiner self-checks")
    sp.add_argument("--machine", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_algebra_check)

    sp = sub.add_parser("gen-corpus", help="generate random small machines")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("-t", type=int, default=64, help="liveness horizon for rejection")
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_gen_corpus)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MachineError, TranscriptFormatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
