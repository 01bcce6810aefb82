"""Command line: gen, solve, verify-jackson, props."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from .assembly import HAMILTON_CAP, HamiltonCapError, cover_pipeline, hamilton_cycle_exact
from .balancing.config import BalancerConfig
from .digraph import Digraph, GraphFormatError, format_edge_list, is_d_regular, is_oriented, parse_edge_list
from .instances import (
    FAMILIES,
    InfeasibleInstance,
    InstanceSpec,
    SolverCapError,
    generate,
    instance_problems,
    min_cycle_cover_exact,
    random_regular_oriented,
    regular_tournaments,
)
from .partition import PartitionError, parse_partition
from .props import SUITES, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
WORKERS_ENV = "CYCLEPART_WORKERS"


class UsageError(Exception):
    pass


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}")


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _write(path: Path, text: str, force: bool) -> None:
    if path.exists() and not force:
        raise UsageError(f"{path} exists; pass --force to overwrite")
    path.write_text(text)


def _emit(report: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True, default=str))
    else:
        print("\n".join(lines))


def verdict(count: int, bound: int) -> str:
    if count == bound:
        return "TIGHT"
    return "WITHIN" if count < bound else "EXCEEDS"


def cmd_gen(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(",")) if args.sizes else ()
    n = args.n if args.n is not None else args.m
    spec = InstanceSpec(args.family, n=n, d=args.d, blocks=args.blocks, seed=args.seed, sizes=sizes)
    try:
        g = generate(spec)
    except InfeasibleInstance as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    errs = instance_problems(spec, g)
    if errs:
        print(f"error: generated instance failed its checks: {errs}", file=sys.stderr)
        return EXIT_VIOLATION
    text = format_edge_list(g)
    report = {"command": "gen", "spec": spec.to_json(), "n": g.n, "e": g.e, "digest": _digest(text)}
    if args.out:
        out = Path(args.out)
        _write(out, text, args.force)
        _write(out.with_name(out.name + ".spec.json"), json.dumps(spec.to_json(), indent=2) + "\n", args.force)
        report["path"] = str(out)
        _emit(report, args.json, [f"wrote {out} (n={g.n}, e={g.e})"])
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _load(path: str) -> tuple[Digraph, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(str(exc))
    try:
        return parse_edge_list(text), text
    except GraphFormatError as exc:
        raise UsageError(f"{path}: {exc}")


def cmd_solve(args) -> int:
    g, text = _load(args.instance)
    d = is_d_regular(g)
    oriented = is_oriented(g)
    report: dict = {
        "command": "solve",
        "input_digest": _digest(text),
        "mode": "exact" if args.exact else "pipeline",
        "n": g.n,
        "d": d,
        "oriented": oriented,
        "timings": {},
    }
    if d:
        report["bounds"] = {"n/(d+1)": g.n // (d + 1), "n/(2d+1)": g.n // (2 * d + 1)}
    t0 = time.perf_counter()
    if args.exact:
        try:
            found = min_cycle_cover_exact(g, cap=args.cap)
        except SolverCapError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CAP
        report["timings"]["exact"] = round(time.perf_counter() - t0, 6)
        if found is None:
            report["cover"] = None
            report["message"] = "no cycle cover exists"
            _emit(report, args.json, ["no cycle cover exists"])
            return EXIT_VIOLATION
        count, cover = found
        report["validator"] = "PASS" if not cover.problems(g) else "FAIL"
    else:
        cfg = BalancerConfig(gamma=Fraction(args.gamma), theta=Fraction(args.theta), seed=args.seed)
        p = None
        if args.partition:
            try:
                p = parse_partition(Path(args.partition).read_text(), g.n)
            except (OSError, PartitionError) as exc:
                raise UsageError(str(exc))
        res = cover_pipeline(g, p, cfg, cap=args.cap)
        report["timings"]["pipeline"] = round(time.perf_counter() - t0, 6)
        report["pipeline"] = res.report.to_json()
        if res.cover is None:
            report["cover"] = None
            _emit(report, args.json, [f"pipeline failed at stage {res.report.stage}: {res.report.message}"])
            return EXIT_VIOLATION
        cover = res.cover
        count = len(cover)
        report["validator"] = "PASS" if not cover.problems(g) else "FAIL"
    report["cover"] = cover.to_json()
    report["count"] = count
    report["min_length"] = min(len(c) for c in cover.cycles) if cover.cycles else 0
    lines = [f"cycles: {count}", f"validator: {report['validator']}"]
    if d:
        bound = report["bounds"]["n/(2d+1)" if oriented else "n/(d+1)"]
        report["bound"] = bound
        report["verdict"] = verdict(count, bound)
        lines.append(f"bound: {bound} ({'oriented' if oriented else 'digraph'}) verdict: {report['verdict']}")
    if args.cover_out:
        _write(Path(args.cover_out), json.dumps(cover.to_json(), indent=2) + "\n", args.force)
    if args.dot:
        _write(Path(args.dot), cover.to_dot(g), args.force)
    _emit(report, args.json, lines)
    return EXIT_OK if report["validator"] == "PASS" else EXIT_VIOLATION


def _parse_range(text: str) -> list[int]:
    for sep in ("..", "-", ":"):
        if sep in text:
            a, b = text.split(sep, 1)
            return list(range(int(a), int(b) + 1))
    return [int(text)]


def _jackson_one(item):
    n, d, idx, g = item
    cyc = hamilton_cycle_exact(g, cap=max(HAMILTON_CAP, n))
    return n, idx, cyc is not None, g


def cmd_verify_jackson(args) -> int:
    d = args.d
    if d <= 2:
        raise UsageError("the conjecture concerns d > 2")
    try:
        ns = _parse_range(args.n_range) if args.n_range else list(range(2 * d + 1, 4 * d + 2))
    except ValueError:
        raise UsageError(f"bad --n-range {args.n_range!r}")
    if any(n > 4 * d + 1 for n in ns):
        raise UsageError(f"n must be at most 4d+1 = {4 * d + 1}")
    if any(n < 2 * d + 1 for n in ns):
        raise UsageError(f"an oriented {d}-regular graph needs n >= {2 * d + 1}")
    workers = _workers()
    items, truncated = [], False
    for n in ns:
        if args.mode == "enumerate" and n == 2 * d + 1 and n <= 9:
            source = regular_tournaments(n)
        else:
            source = (random_regular_oriented(n, d, args.seed * 1_000_003 + n * 10_007 + t) for t in range(args.samples))
        for idx, g in enumerate(source):
            if len(items) >= args.budget:
                truncated = True
                break
            items.append((n, d, idx, g))
    per_n: dict[int, dict] = {n: {"checked": 0, "hamiltonian": 0} for n in ns}
    hits = []
    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_jackson_one, items))
    for n, idx, ham, g in sorted(results, key=lambda r: (r[0], r[1])):
        per_n[n]["checked"] += 1
        per_n[n]["hamiltonian"] += ham
        if not ham:
            hits.append({"n": n, "index": idx, "edge_list": format_edge_list(g)})
    report = {
        "command": "verify-jackson",
        "d": d,
        "mode": args.mode,
        "seed": args.seed,
        "budget": args.budget,
        "truncated": truncated,
        "per_n": {str(n): v for n, v in per_n.items()},
        "counterexamples": hits,
        "timings": {"search": round(time.perf_counter() - t0, 6)},
    }
    lines = [f"n={n}: {v['hamiltonian']}/{v['checked']} Hamiltonian" for n, v in per_n.items()]
    lines.append(f"counterexamples: {len(hits)}" + (" (budget exhausted, partial)" if truncated else ""))
    for h in hits:
        lines.append(f"--- n={h['n']} #{h['index']}\n{h['edge_list']}")
    _emit(report, args.json, lines)
    if hits:
        return EXIT_VIOLATION
    return EXIT_CAP if truncated else EXIT_OK


def cmd_props(args) -> int:
    if args.suite not in SUITES:
        print(f"error: unknown suite {args.suite!r}; known: {', '.join(sorted(SUITES))}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    res = run_suite(args.suite, args.seed, args.iters)
    report = {"command": "props", **res.to_json(), "timings": {"suite": round(time.perf_counter() - t0, 6)}}
    _emit(report, args.json, [f"{args.suite}: {'PASS' if res.ok else 'FAIL'} ({res.checked} checked, {res.skipped} skipped)"])
    return EXIT_OK if res.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cyclepart", description="Cycle partitions of regular digraphs at desk scale.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int, help="block size (alias of --n)")
    g.add_argument("--d", type=int)
    g.add_argument("--blocks", type=int)
    g.add_argument("--sizes", help="comma separated block sizes")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="cover an instance with cycles")
    s.add_argument("instance")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--pipeline", action="store_true")
    s.add_argument("--partition", help="cell partition file (text or JSON)")
    s.add_argument("--cap", type=int, default=None)
    s.add_argument("--gamma", default="1/64")
    s.add_argument("--theta", default="1/4")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cover-out")
    s.add_argument("--dot")
    s.set_defaults(func=cmd_solve)

    j = sub.add_parser("verify-jackson", help="search for non-Hamiltonian regular oriented graphs")
    j.add_argument("--d", type=int, required=True)
    j.add_argument("--n-range")
    j.add_argument("--mode", choices=("enumerate", "sample"), default="sample")
    j.add_argument("--samples", type=int, default=1000)
    j.add_argument("--budget", type=int, default=100_000)
    j.add_argument("--seed", type=int, default=0)
    j.set_defaults(func=cmd_verify_jackson)

    p = sub.add_parser("props", help="run a randomised invariant suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=100)
    p.set_defaults(func=cmd_props)

    for sp in (g, s, j, p):
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--force", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "cap", "unset") is None:
        args.cap = 16 if args.exact else HAMILTON_CAP
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HamiltonCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
