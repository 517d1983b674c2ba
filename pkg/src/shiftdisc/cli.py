"""Command-line frontend: ``shiftdisc <command> [options]``.

Every run writes one document ``{command, config, result, version}`` (JSON),
a flat table (CSV), or one JSON record per line followed by a summary (NDJSON).
Exit status: 0 ok, 2 invalid arguments, 3 budget exceeded, 4 internal
consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from math import comb
from typing import Callable

import numpy as np

from . import __version__
from .colorings import HASH_ID, block_vector, explicit_coloring, randomized_coloring, window_vector
from .cubes import (
    IntervalPartition,
    all_maximal_cubes,
    decode_image,
    enumerate_cube,
    image,
    encode_image,
)
from .discrepancy import (
    DEFAULT_BUDGET,
    cube_cover_report,
    exact_discrepancy,
    hit_count_stats,
    mc_discrepancy,
    worst_set_scan,
)
from .enumeration import as_sorted_set, check_budget, iter_subsets
from .errors import ConsistencyError, InvalidArgument, ShiftDiscError
from .parity import ParityParams, parity_report
from .shift_graph import build_pipeline, odd_cycle_check, verify_proper
from .towers import BOUND_NAMES, KINDS, ParamsA, ParamsB, bound_calculators, image_count, tower

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_CONSISTENCY = 4


def _json_default(obj):
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, default=_json_default, sort_keys=True, allow_nan=False)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected a rational like 1/2 or 0.3, got {text!r}") from exc


class Emitter:
    """Collects table rows, or streams them as NDJSON lines."""

    def __init__(self, fmt: str, out, header: dict):
        self.fmt = fmt
        self.out = out
        self.header = header
        self.rows: list[dict] = []

    def row(self, record: dict) -> None:
        if self.fmt == "ndjson":
            self.out.write(dumps({**self.header, "record": record}) + "\n")
            self.out.flush()
        else:
            self.rows.append(record)


# ---------------------------------------------------------------- commands


def cmd_towers(args, emit: Emitter) -> dict:
    heights = range(1, args.height + 1) if args.sweep else [args.height]
    values = []
    for h in heights:
        tv = tower(args.kind, h, args.x, args.bit_limit).to_dict()
        values.append(tv)
        if args.sweep:
            emit.row(tv)
    return values[-1]


def cmd_bounds(args, emit: Emitter) -> dict:
    params = {k: getattr(args, k) for k in ("k", "l", "n", "p", "delta") if getattr(args, k) is not None}
    names = [args.name] if args.name else list(BOUND_NAMES)
    for name in names:
        try:
            value = bound_calculators(name, params).to_dict()
        except InvalidArgument as exc:
            if args.name:
                raise
            value = {"name": name, "skipped": str(exc)}
        emit.row(value)
    return {"params": {k: str(v) for k, v in params.items()}}


def _pipeline(args, strict: bool = True):
    return build_pipeline(args.n, args.l, strict=strict and not args.non_strict, strategy=args.strategy,
                          memo=not args.no_memo)


def cmd_shift_color(args, emit: Emitter) -> dict:
    kappa = _pipeline(args, strict=False)
    result = {"pipeline": kappa.describe()}
    if args.block:
        block = as_sorted_set(args.block, args.n)
        if len(block) > kappa.l:
            result["windows"] = kappa.window_colors(block)
        else:
            result["color"] = kappa.color(block)
        result["block"] = list(block)
    return result


def cmd_shift_verify(args, emit: Emitter) -> dict:
    kappa = _pipeline(args)
    budget = args.samples if args.mode == "sampled" else args.budget
    report = verify_proper(kappa, args.mode, budget, args.seed)
    return {"pipeline": kappa.describe(), **report.to_dict()}


def cmd_odd_cycle(args, emit: Emitter) -> dict:
    return {"N": args.n, "l": args.l, "odd_cycle": odd_cycle_check(args.n, args.l, args.budget)}


def cmd_parity(args, emit: Emitter) -> dict:
    if not args.sweep:
        report = parity_report(ParityParams(args.p, args.n, args.l, args.h))
        return report
    worst = 0.0
    count = 0
    for l in range(2, args.l + 1):
        ps = [Fraction(s) for s in args.sweep_p] or [Fraction(3, 10), Fraction(1, 2), Fraction(l, l + 1)]
        for p in ps:
            for n in range(1, args.n + 1):
                params = ParityParams(p, n, l, 0)
                rep = parity_report(params)
                for h, prob in enumerate(rep["distribution"]):
                    dev = abs(prob - 1 / l)
                    slack = rep["bound"] - dev
                    worst = min(worst, slack)
                    count += 1
                    emit.row({"l": l, "p": str(p), "n": n, "h": h, "probability": prob,
                              "deviation": dev, "bound": rep["bound"], "within_bound": slack >= -1e-12})
    return {"records": count, "min_slack": worst, "all_within_bound": worst >= -1e-12}


def _params(args):
    if args.variant == "A":
        return ParamsA.from_nl(args.intervals, args.l)
    return ParamsB.from_nl(args.intervals, args.l, args.c)


def _ground(args, params) -> tuple[int, ...]:
    if args.S:
        S = as_sorted_set(args.S, args.N)
        if len(S) != params.m:
            raise InvalidArgument(f"|S| = {len(S)} but the construction needs m = {params.m}")
        return S
    N = args.N if args.N is not None else params.m
    if N < params.m:
        raise InvalidArgument(f"N={N} is smaller than m={params.m}")
    if N == params.m:
        return tuple(range(1, N + 1))
    return tuple(sorted(random.Random(args.seed).sample(range(1, N + 1), params.m)))


def _all_cubes(args, params, S):
    part = IntervalPartition.for_params(S, params)
    check_budget(f"C({len(S)}, {params.k})", comb(len(S), params.k), args.budget)
    groups, uncovered = all_maximal_cubes(part, iter_subsets(S, params.k))
    return part, groups, uncovered


def cmd_cube_stats(args, emit: Emitter) -> dict:
    params = _params(args)
    S = _ground(args, params)
    part, groups, uncovered = _all_cubes(args, params, S)
    hist: dict[int, int] = {}
    seen: set = set()
    for key, (cube, members) in sorted(groups.items()):
        if enumerate_cube(cube) != members:
            raise ConsistencyError(f"cube {key} does not enumerate to the sets mapped to it")
        if seen & set(members):
            raise ConsistencyError("maximal cubes overlap")
        seen.update(members)
        hist[cube.dimension] = hist.get(cube.dimension, 0) + 1
        emit.row({"J": list(cube.J), "R": list(cube.R), "dimension": cube.dimension, "size": len(members)})
    total = comb(len(S), params.k)
    return {
        "variant": params.variant, "k": params.k, "l": params.l, "n": params.n, "m": params.m,
        "S": list(S), "total_sets": total, "cubes": len(groups),
        "covered_fraction": (total - len(uncovered)) / total,
        "uncovered": len(uncovered),
        "dimension_histogram": {str(d): c for d, c in sorted(hist.items())},
    }


def cmd_codec_roundtrip(args, emit: Emitter) -> dict:
    params = _params(args)
    if params.variant != "A":
        raise InvalidArgument("the cube-image codec is defined for variant A")
    S = _ground(args, params)
    kappa = build_pipeline(max(S), args.l, strict=not args.non_strict)
    part, groups, _ = _all_cubes(args, params, S)
    codes = set()
    ok = 0
    for key, (cube, members) in sorted(groups.items()):
        code = encode_image(cube, kappa)
        decoded = decode_image(code, params.p_win)
        expected = set(image(cube, kappa, members))
        if decoded != expected:
            raise ConsistencyError(f"decode(encode(cube)) differs from the image of cube {key}")
        ok += 1
        codes.add(dumps(code.to_dict()))
        emit.row({"J": list(cube.J), "R": list(cube.R), "code": code.to_dict()})
    bound = image_count(params.p_win)
    return {"cubes": len(groups), "roundtrips_ok": ok, "distinct_codes": len(codes),
            "code_bound": bound, "within_bound": len(codes) <= bound}


def _coloring(args, N: int):
    if args.coloring == "explicit":
        kappa = build_pipeline(N, args.l, strict=True)
        return kappa, explicit_coloring(kappa, args.c)
    kappa = build_pipeline(N, args.l, strict=not args.non_strict)
    return kappa, randomized_coloring(kappa, args.seed)


def cmd_color(args, emit: Emitter) -> dict:
    X = as_sorted_set(args.set, args.N)
    kappa, gamma = _coloring(args, args.N)
    result = {"coloring": gamma.name, "set": list(X), "color": gamma(X), "pipeline": kappa.describe()}
    if args.coloring == "explicit":
        result["block_vector"] = list(block_vector(X, kappa))
    else:
        result["window_vector"] = list(window_vector(X, kappa))
        result["hash"] = HASH_ID
    return result


def _disc_ground(args) -> tuple[int, ...]:
    if args.S:
        return as_sorted_set(args.S, args.N)
    size = args.size if args.size is not None else args.N
    if size > args.N:
        raise InvalidArgument(f"size {size} exceeds N={args.N}")
    if size == args.N:
        return tuple(range(1, args.N + 1))
    return tuple(sorted(random.Random(args.seed).sample(range(1, args.N + 1), size)))


def cmd_disc_exact(args, emit: Emitter) -> dict:
    S = _disc_ground(args)
    _, gamma = _coloring(args, args.N)
    report = exact_discrepancy(gamma, S, args.k, args.budget, threads=args.threads)
    return {"coloring": gamma.name, "S": list(S), "k": args.k, **report.to_dict()}


def cmd_disc_mc(args, emit: Emitter) -> dict:
    S = _disc_ground(args)
    _, gamma = _coloring(args, args.N)
    report = mc_discrepancy(gamma, S, args.k, args.samples, args.seed, threads=args.threads)
    return {"coloring": gamma.name, "S": list(S), "k": args.k, **report.to_dict()}


def cmd_cover_report(args, emit: Emitter) -> dict:
    params = _params(args)
    S = _ground(args, params)
    _, gamma = _coloring(args, max(args.N or 0, max(S)))
    report = cube_cover_report(S, params, gamma, args.dim_threshold, args.budget)
    if not report.holds:
        raise ConsistencyError("overall deviation exceeds the composition bound")
    d = report.to_dict()
    for row in d.pop("per_cube"):
        emit.row(row)
    return {"coloring": gamma.name, "S": list(S), "variant": params.variant, "k": params.k, **d}


def cmd_worst_set(args, emit: Emitter) -> dict:
    params = _params(args)
    N = args.N if args.N is not None else params.m
    _, gamma = _coloring(args, N)
    report = worst_set_scan(N, params, gamma, args.mode, args.samples, args.seed, args.budget,
                            args.size, args.mc_samples, keep=True)
    for S, dev, method in report.per_set:
        emit.row({"S": list(S), "deviation": dev, "method": method})
    return {"coloring": gamma.name, "N": N, "k": params.k, "size": args.size or params.m, **report.to_dict()}


def cmd_hit_stats(args, emit: Emitter) -> dict:
    return hit_count_stats(_params(args), args.samples, args.seed, args.delta).to_dict()


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv", "ndjson"), default="json")
    p.add_argument("--output", default="-", help="output path, '-' for standard output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    p.add_argument("--threads", type=_positive, default=1, help="worker threads (output does not depend on it)")


def _pipeline_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", choices=("greedy", "delta"), default="greedy")
    p.add_argument("--non-strict", action="store_true", help="allow pipelines ending with more than 3 colors")
    p.add_argument("--no-memo", action="store_true")


def _construction_opts(p: argparse.ArgumentParser, coloring: bool = True) -> None:
    p.add_argument("--variant", choices=("A", "B"), default="B")
    p.add_argument("--l", type=_positive, required=True)
    p.add_argument("--intervals", type=_positive, required=True, help="number of intervals n")
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--N", type=_positive, default=None, help="universe size (default m)")
    p.add_argument("--S", type=_int_list, default=None, help="explicit ground set of size m")
    if coloring:
        _coloring_opts(p)


def _coloring_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--coloring", choices=("explicit", "randomized"), default="explicit")
    p.add_argument("--non-strict", action="store_true")


COMMANDS: dict[str, Callable] = {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shiftdisc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        _common(p)
        p.set_defaults(func=fn)
        COMMANDS[name] = fn
        return p

    p = add("towers", cmd_towers, "tower function values")
    p.add_argument("--kind", choices=KINDS, default="standard")
    p.add_argument("--height", type=_positive, required=True)
    p.add_argument("--x", type=_positive, required=True)
    p.add_argument("--bit-limit", type=_positive, default=1 << 17)
    p.add_argument("--sweep", action="store_true", help="emit every height up to --height")

    p = add("bounds", cmd_bounds, "closed-form bound calculators")
    p.add_argument("--name", choices=BOUND_NAMES, default=None)
    for key in ("k", "l", "n", "p", "delta"):
        p.add_argument(f"--{key}", type=_rational, default=None)

    p = add("shift-color", cmd_shift_color, "describe a pipeline and color a block")
    p.add_argument("--n", type=_positive, required=True, help="universe size N")
    p.add_argument("--l", type=_positive, required=True)
    p.add_argument("--block", type=_int_list, default=None)
    _pipeline_opts(p)

    p = add("shift-verify", cmd_shift_verify, "check a pipeline is a proper coloring")
    p.add_argument("--n", type=_positive, required=True, help="universe size N")
    p.add_argument("--l", type=_positive, required=True)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=_positive, default=10**6)
    _pipeline_opts(p)

    p = add("odd-cycle", cmd_odd_cycle, "test whether Sh(N, l) is non-bipartite")
    p.add_argument("--n", type=_positive, required=True, help="universe size N")
    p.add_argument("--l", type=_positive, required=True)

    p = add("parity", cmd_parity, "distribution of Bernoulli sums mod l")
    p.add_argument("--l", type=_positive, required=True)
    p.add_argument("--p", type=_rational, default=Fraction(1, 2))
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--h", type=int, default=0)
    p.add_argument("--sweep", action="store_true", help="grid over 2..l, 1..n, p values and all h")
    p.add_argument("--sweep-p", type=str, nargs="*", default=[])

    p = add("cube-stats", cmd_cube_stats, "maximal cube decomposition of C(S, k)")
    _construction_opts(p, coloring=False)

    p = add("codec-roundtrip", cmd_codec_roundtrip, "encode and decode every cube image")
    _construction_opts(p, coloring=False)
    p.add_argument("--non-strict", action="store_true")

    p = add("color", cmd_color, "color one k-set")
    p.add_argument("--N", type=_positive, required=True)
    p.add_argument("--l", type=_positive, required=True)
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--set", type=_int_list, required=True)
    _coloring_opts(p)

    for name, fn, help in (("disc-exact", cmd_disc_exact, "exact discrepancy on C(S, k)"),
                           ("disc-mc", cmd_disc_mc, "Monte Carlo discrepancy on C(S, k)")):
        p = add(name, fn, help)
        p.add_argument("--N", type=_positive, required=True)
        p.add_argument("--l", type=_positive, required=True)
        p.add_argument("--k", type=_positive, required=True)
        p.add_argument("--c", type=int, default=3)
        p.add_argument("--S", type=_int_list, default=None)
        p.add_argument("--size", type=_positive, default=None, help="random ground set size (seeded)")
        if name == "disc-mc":
            p.add_argument("--samples", type=_positive, default=10_000)
        _coloring_opts(p)

    p = add("cover-report", cmd_cover_report, "cube cover accounting of the discrepancy")
    _construction_opts(p)
    p.add_argument("--dim-threshold", type=int, default=0)

    p = add("worst-set", cmd_worst_set, "largest discrepancy over ground sets")
    _construction_opts(p)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="sampled")
    p.add_argument("--samples", type=_positive, default=20)
    p.add_argument("--mc-samples", type=_positive, default=10_000)
    p.add_argument("--size", type=_positive, default=None)

    p = add("hit-stats", cmd_hit_stats, "number of properly hit intervals of a random k-set")
    p.add_argument("--variant", choices=("A", "B"), default="A")
    p.add_argument("--l", type=_positive, required=True)
    p.add_argument("--intervals", type=_positive, required=True)
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--samples", type=_positive, default=10_000)
    p.add_argument("--delta", type=float, default=0.5)
    return parser


def resolved_config(args) -> dict:
    skip = {"func", "output", "threads"}
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in sorted(vars(args).items()) if k not in skip}


def _write_csv(out, rows: list[dict], result: dict) -> None:
    if not rows:
        rows = [{k: v for k, v in result.items() if not isinstance(v, (dict, list))}]
    fields = list(rows[0])
    writer = csv.DictWriter(out, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: dumps(v) if isinstance(v, (dict, list, tuple)) else v for k, v in row.items()})


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    header = {"command": args.command, "config": resolved_config(args), "version": __version__}
    buffer = io.StringIO()
    stream_to = buffer
    out_file = None
    if args.format == "ndjson":
        out_file = stdout if args.output == "-" else open(args.output, "w", encoding="utf-8")
        stream_to = out_file
    emit = Emitter(args.format, stream_to, header)
    try:
        result = args.func(args, emit)
    except ShiftDiscError as exc:
        stderr.write(dumps({**header, "error": {"code": exc.code, "message": str(exc)}}) + "\n")
        return exc.exit_status
    except ConsistencyError as exc:
        stderr.write(dumps({**header, "error": {"code": "internal-consistency", "message": str(exc)}}) + "\n")
        return EXIT_CONSISTENCY
    finally:
        if out_file is not None and out_file is not stdout:
            out_file.close()
    if args.format == "ndjson":
        target = stdout if args.output == "-" else open(args.output, "a", encoding="utf-8")
        target.write(dumps({**header, "result": result}) + "\n")
        if target is not stdout:
            target.close()
        return EXIT_OK
    if args.format == "json":
        if emit.rows:
            result = {**result, "rows": emit.rows}
        buffer.write(dumps({**header, "result": result}) + "\n")
    else:
        _write_csv(buffer, emit.rows, result)
    if args.output == "-":
        stdout.write(buffer.getvalue())
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(buffer.getvalue())
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
