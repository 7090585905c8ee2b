"""Command-line front end: sequence dumps, single-matrix classification,
the counting experiment, and discrepancy diagnostics.

Exit codes: 0 success, 1 usage or input error, 2 runtime error (cycle cap hit).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import discrepancy as disc
from . import fuzzymc, qrseq, simulate

DEFAULT_SIM_SIZES = "5,50,100"  # n = 1000 is heavy; request it explicitly


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for runtime
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _spec_from_args(args, dim: int) -> qrseq.GeneratorSpec:
    kind = args.generator
    if kind == "faure":
        return qrseq.GeneratorSpec.faure(dim, skip=args.skip)
    if kind == "torus":
        return qrseq.GeneratorSpec.torus(dim, skip=args.skip)
    if kind == "kronecker":
        if args.alphas is None:
            raise ValueError("--alphas is required for the kronecker generator")
        if len(args.alphas) != dim:
            raise ValueError(f"--alphas must list {dim} values")
        return qrseq.GeneratorSpec.kronecker(args.alphas, skip=args.skip)
    if kind == "van-der-corput":
        if dim != 1:
            raise ValueError("van-der-corput is one-dimensional")
        return qrseq.GeneratorSpec.van_der_corput(base=args.base, skip=args.skip)
    raise ValueError(f"unknown generator {kind!r}")


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def cmd_seq(args) -> int:
    spec = _spec_from_args(args, args.dim)
    start = spec.skip  # already resolved from --skip or the generator default
    fp, close = _open_out(args.output)
    try:
        if args.format == "csv":
            qrseq.write_points(fp, spec, args.count, start=start)
        else:
            block = qrseq.point_block(spec, start, args.count)
            rows = [{"i": start + r, "coords": list(block[r])} for r in range(args.count)]
            json.dump(rows, fp, indent=2)
            fp.write("\n")
    finally:
        if close:
            fp.close()
    return 0


def cmd_classify(args) -> int:
    try:
        with open(args.input, encoding="utf-8") as fp:
            matrix = fuzzymc.read_matrix_csv(fp)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return 1

    max_steps = args.max_steps or fuzzymc.default_max_steps(matrix.shape[0])
    try:
        res = fuzzymc.analyze_powers(matrix, max_steps=max_steps)
    except fuzzymc.CycleNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.format == "json":
        payload = {
            "classification": res.classification.value,
            "tau": res.tau,
            "period": res.period,
            "steps_examined": res.steps_examined,
        }
        if res.stationary is not None:
            payload["stationary"] = [list(row) for row in res.stationary]
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"{res.classification.value}, tau={res.tau}, period={res.period}")
        if res.stationary is not None:
            if args.stationary_out:
                with open(args.stationary_out, "w", encoding="utf-8") as fp:
                    fuzzymc.write_matrix_csv(fp, res.stationary)
                print(f"stationary matrix written to {args.stationary_out}")
            else:
                print("stationary matrix:")
                fuzzymc.write_matrix_csv(sys.stdout, res.stationary)
    return 0


def _resolve_workers(args) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get("ERGOQ_WORKERS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"ERGOQ_WORKERS must be an integer, got {env!r}")
        if value < 1:
            raise ValueError(f"ERGOQ_WORKERS must be >= 1, got {value}")
        return value
    return 1


def cmd_simulate(args) -> int:
    kinds = ["faure", "torus"] if args.generator == "both" else [args.generator]
    workers = _resolve_workers(args)
    fill = simulate.FillStrategy(mode=args.fill, stream_dim=args.stream_dim)
    reports = []
    for kind in kinds:
        config = simulate.ExperimentConfig(
            sizes=args.sizes,
            trials=args.trials,
            generator=kind,
            fill=fill,
            skip=args.skip,
            max_steps=args.max_steps,
            count_rule=args.count_rule,
        )
        report = simulate.run_experiment(config, workers=workers)
        reports.append(report)
        print(f"generator: {kind}")
        print(simulate.emit_report(report, "markdown"), end="")
        print()

    for msg in simulate.trend_violations(reports):
        print(f"warning: ergodic-count ordering violated: {msg}", file=sys.stderr)

    timing = not args.no_timing
    for path, fmt in ((args.csv_out, "csv"), (args.json_out, "json"),
                      (args.markdown_out, "markdown")):
        if path:
            stem, dot, ext = path.rpartition(".")
            for report in reports:
                target = path
                if len(reports) > 1:
                    target = f"{stem or ext}-{report.generator}{dot and '.'}{ext if stem else ''}"
                    target = f"{stem}-{report.generator}.{ext}" if stem else f"{path}-{report.generator}"
                with open(target, "w", encoding="utf-8") as fp:
                    fp.write(simulate.emit_report(report, fmt, include_timing=timing))
    return 0


def cmd_discrepancy(args) -> int:
    if args.dim > 2:
        print("error: discrepancy supports dim <= 2", file=sys.stderr)
        return 1
    ns = []
    n = args.start_n
    while n < args.max_n:
        ns.append(n)
        n *= 2
    ns.append(args.max_n)

    if args.generator == "midpoint":
        if args.dim != 1:
            print("error: the midpoint baseline is one-dimensional", file=sys.stderr)
            return 1
        rows = [
            disc.TrendRow(n, d, n * d / (1.0 + __import__("math").log(n)))
            for n, d in ((n, disc.star_discrepancy_1d(disc.midpoint_set(n))) for n in ns)
        ]
    else:
        spec = _spec_from_args(args, args.dim)
        rows = disc.discrepancy_trend(spec, ns)

    print("n,d_star,normalized")
    for row in rows:
        print(f"{row.n},{row.d_star:.17g},{row.normalized:.17g}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="ergoq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen_choices = ("faure", "torus", "kronecker", "van-der-corput")

    p_seq = sub.add_parser("seq", help="dump low-discrepancy points as CSV")
    p_seq.add_argument("--generator", "-g", choices=gen_choices, default="torus")
    p_seq.add_argument("--dim", type=_positive_int, required=True)
    p_seq.add_argument("--count", type=_positive_int, required=True)
    p_seq.add_argument("--skip", type=_nonneg_int, default=None,
                       help="start index (default: generator burn-in)")
    p_seq.add_argument("--base", type=_positive_int, default=2,
                       help="prime base (van-der-corput only)")
    p_seq.add_argument("--alphas", type=_float_list, default=None,
                       help="comma-separated multipliers (kronecker only)")
    p_seq.add_argument("--format", choices=("csv", "json"), default="csv")
    p_seq.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    p_seq.set_defaults(func=cmd_seq)

    p_cls = sub.add_parser("classify", help="classify one transition matrix CSV")
    p_cls.add_argument("input", help="matrix CSV path")
    p_cls.add_argument("--max-steps", type=_positive_int, default=None)
    p_cls.add_argument("--format", choices=("text", "json"), default="text")
    p_cls.add_argument("--stationary-out", default=None,
                       help="write the stationary matrix here instead of inline")
    p_cls.set_defaults(func=cmd_classify)

    p_sim = sub.add_parser("simulate", help="run the ergodicity counting experiment")
    p_sim.add_argument("--generator", "-g", choices=("faure", "torus", "kronecker", "both"),
                       default="both")
    p_sim.add_argument("--sizes", type=_int_list, default=_int_list(DEFAULT_SIM_SIZES))
    p_sim.add_argument("--trials", type=int, default=simulate.DEFAULT_TRIALS)
    p_sim.add_argument("--fill", choices=tuple(m.value for m in simulate.FillMode),
                       default=simulate.FillMode.PER_ROW_POINT.value)
    p_sim.add_argument("--stream-dim", type=_positive_int, default=1)
    p_sim.add_argument("--skip", type=_nonneg_int, default=None)
    p_sim.add_argument("--max-steps", type=_positive_int, default=None)
    p_sim.add_argument("--count-rule", choices=tuple(r.value for r in simulate.CountRule),
                       default=simulate.CountRule.STRONG_PLUS_WEAK.value)
    p_sim.add_argument("--workers", type=_positive_int, default=None,
                       help="worker processes (default: ERGOQ_WORKERS or 1)")
    p_sim.add_argument("--csv-out", default=None)
    p_sim.add_argument("--json-out", default=None)
    p_sim.add_argument("--markdown-out", default=None)
    p_sim.add_argument("--no-timing", action="store_true",
                       help="omit wall-clock columns from file outputs")
    p_sim.set_defaults(func=cmd_simulate)

    p_dis = sub.add_parser("discrepancy", help="empirical discrepancy decay table")
    p_dis.add_argument("--generator", "-g",
                       choices=gen_choices + ("midpoint",), default="torus")
    p_dis.add_argument("--dim", type=_positive_int, default=1)
    p_dis.add_argument("--max-n", type=_positive_int, default=4096)
    p_dis.add_argument("--start-n", type=_positive_int, default=16)
    p_dis.add_argument("--skip", type=_nonneg_int, default=None)
    p_dis.add_argument("--base", type=_positive_int, default=2)
    p_dis.add_argument("--alphas", type=_float_list, default=None)
    p_dis.set_defaults(func=cmd_discrepancy)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except fuzzymc.CycleNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
