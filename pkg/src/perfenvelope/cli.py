"""Command-line pipelines: generate matrices, race, score, export curves.

Exit codes: 0 success, 2 usage error, 3 validation error, 4 runtime error.
Every subcommand takes ``--seed``; derived seeds are ``seed + i`` for the
``i``-th instance (``splp gen``) or repetition (``experiment``).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .envelope import MarginPolicy
from .evaluators import (
    SplpInstance,
    SyntheticParams,
    cmcs_evaluator,
    enumerate_cmcs_configurations,
    generate_splp_instance,
    generate_synthetic,
    replay_evaluator,
    sample_configurations,
)
from .evaluators.cmcs import DEFAULT_LIBRARY
from .metrics import (
    TruthSummary,
    TruthTable,
    experiment_csv,
    experiment_table,
    figure_csv,
    figure_data,
    overlap_fraction,
    overlap_top,
    read_figure_csv,
    speedup,
)
from .profiles import CheckpointSchedule, QualityMatrix, ValidationError, read_matrix, write_matrix
from .racing import RacingParams, RacingResult, run_racing

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3, 4

log = logging.getLogger("perfenvelope")


class UsageError(Exception):
    pass


def _margin(text):
    try:
        return MarginPolicy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _fractions(text):
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad fraction list {text!r}")


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _race_params(args) -> RacingParams:
    return RacingParams(args.pool_frac, args.margin, args.seed, args.order, args.passes)


def _check_schedule(matrix: QualityMatrix, matrix_path, n_configs, full_budget, other_path):
    if matrix.n_configs != n_configs or matrix.schedule.full_budget != full_budget:
        raise ValidationError(
            f"{matrix_path} ({matrix.n_configs} configs, budget {matrix.schedule.full_budget}) does not match "
            f"{other_path} ({n_configs} configs, budget {full_budget})")


def cmd_synth(args):
    params = SyntheticParams(args.configs, args.corr, args.noise, args.seed, args.rate_min, args.rate_max,
                             schedule=CheckpointSchedule(count=args.checkpoints))
    write_matrix(generate_synthetic(params), args.output)


def cmd_splp_gen(args):
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.instances):
        inst = generate_splp_instance(args.facilities, args.customers, args.seed + i)
        inst.save(out / f"instance_{i:02d}.json")


def _load_instances(paths):
    files = []
    for p in map(Path, paths):
        files.extend(sorted(p.glob("*.json")) if p.is_dir() else [p])
    if not files:
        raise ValidationError("no instance files found")
    try:
        return [SplpInstance.load(f) for f in files]
    except (KeyError, json.JSONDecodeError) as exc:
        raise ValidationError(f"bad instance file: {exc}") from None


def cmd_splp_trace(args):
    instances = _load_instances(args.instances)
    library = DEFAULT_LIBRARY[:args.library_size] if args.library_size else DEFAULT_LIBRARY
    configs = enumerate_cmcs_configurations(library)
    if args.configs:
        configs = sample_configurations(configs, args.configs, args.seed)
    log.info("tracing %d configurations on %d instances", len(configs), len(instances))
    ev = cmcs_evaluator(instances, configs, CheckpointSchedule(count=args.checkpoints), library)
    meta = dict(ev.matrix.meta, seed=args.seed, library=[name for name, _ in library])
    write_matrix(ev.matrix, args.output, meta)


def cmd_race(args):
    matrix = read_matrix(args.matrix)
    res = run_racing(replay_evaluator(matrix), _race_params(args), record_history=args.history)
    _write(args.output, res.to_json())


def cmd_oracle(args):
    matrix = read_matrix(args.matrix)
    _write(args.output, TruthTable.from_matrix(matrix, args.pool_frac).to_json())


def _load_json(path, loader):
    try:
        return loader(json.loads(Path(path).read_text(encoding="utf-8")))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValidationError(f"{path}: malformed document ({exc})") from None
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def cmd_metrics(args):
    res = _load_json(args.result, RacingResult.from_dict)
    truth = _load_json(args.truth, TruthSummary.from_dict)
    if (res.n_configs, res.full_budget) != (truth.n_configs, truth.full_budget):
        raise ValidationError(
            f"{args.result} ({res.n_configs} configs, budget {res.full_budget}) does not match "
            f"{args.truth} ({truth.n_configs} configs, budget {truth.full_budget})")
    if len(truth.true_top_set) != res.final_pool.capacity:
        raise ValidationError(f"pool size in {args.result} differs from top-set size in {args.truth}")
    line = (f"n_configs={truth.n_configs} speedup={speedup(res, truth):.4f} "
            f"overlap_top={str(overlap_top(res, truth)).lower()} overlap_pct={overlap_fraction(res, truth):.2f} "
            f"total_virtual_cost={res.total_virtual_cost}\n")
    _write(args.output, line)


def cmd_figure(args):
    matrix = read_matrix(args.matrix)
    _write(args.output, figure_csv(figure_data(matrix, args.fractions)))


def cmd_experiment(args):
    matrix = read_matrix(args.matrix)
    domain = args.domain or matrix.meta.get("generator", "")
    row = experiment_table(replay_evaluator(matrix), _race_params(args), args.repeats, domain=domain, jobs=args.jobs)
    _write(args.output, experiment_csv([row]))


def validate_file(path: Path, kind: str | None = None) -> str:
    """Check a file against its format and invariants; returns the detected kind."""
    name = path.name
    if kind is None:
        if name.endswith(".meta.json"):
            kind = "meta"
        elif name.endswith(".csv"):
            head = path.read_text(encoding="utf-8").split("\n", 1)[0]
            kind = "figure" if head.startswith("time_ms,") else (
                "experiment" if head.startswith("domain,") else "matrix")
        else:
            doc = json.loads(path.read_text(encoding="utf-8"))
            fmt = doc.get("format", "")
            kind = "result" if "racing-result" in fmt else "truth" if "truth" in fmt else "instance"
    if kind == "matrix":
        read_matrix(path)
    elif kind == "result":
        _load_json(path, RacingResult.from_dict)
    elif kind == "truth":
        _load_json(path, TruthSummary.from_dict)
    elif kind == "instance":
        try:
            SplpInstance.load(path)
        except (KeyError, json.JSONDecodeError, ValueError) as exc:
            raise ValidationError(f"{path}: {exc}") from None
    elif kind == "figure":
        series = read_figure_csv(path.read_text(encoding="utf-8"))
        if "top_pp" not in series:
            raise ValidationError(f"{path}: missing top_pp series")
        vals = [v for _, v in series["top_pp"]]
        if any(b > a for a, b in zip(vals, vals[1:])):
            raise ValidationError(f"{path}: top_pp is not non-increasing")
    elif kind == "experiment":
        head = path.read_text(encoding="utf-8").split("\n", 1)[0]
        if head != "domain,n_configs,speedup,overlap_top_pct,overlap_pct,repetitions":
            raise ValidationError(f"{path}: bad experiment header")
    elif kind == "meta":
        json.loads(path.read_text(encoding="utf-8"))["schedule"]
    else:
        raise UsageError(f"unknown file kind {kind!r}")
    return kind


def cmd_validate(args):
    for p in args.files:
        kind = validate_file(Path(p), args.kind)
        print(f"ok {kind} {p}")


def build_parser() -> argparse.ArgumentParser:
    # subcommands repeat --seed/-v without defaults so a value given before the subcommand survives
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    race_opts = argparse.ArgumentParser(add_help=False)
    race_opts.add_argument("--matrix", required=True)
    race_opts.add_argument("--pool-frac", type=float, default=0.01)
    race_opts.add_argument("--margin", type=_margin, default=MarginPolicy(), help="x<factor>, +<offset> or off")
    race_opts.add_argument("--order", choices=["id_order", "shuffled"], default="id_order")
    race_opts.add_argument("--passes", type=int, default=2)

    parser = argparse.ArgumentParser(prog="perfenv", description=__doc__.split("\n")[0])
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic quality matrix")
    p.add_argument("--configs", type=int, required=True)
    p.add_argument("--corr", type=float, default=0.85)
    p.add_argument("--noise", type=float, default=0.03)
    p.add_argument("--rate-min", type=float, default=0.3)
    p.add_argument("--rate-max", type=float, default=3.0)
    p.add_argument("--checkpoints", type=int, default=11)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    splp = sub.add_parser("splp", help="SPLP instances and CMCS traces").add_subparsers(dest="splp_cmd", required=True)
    p = splp.add_parser("gen", parents=[common], help="write random SPLP instances")
    p.add_argument("--facilities", type=int, default=30)
    p.add_argument("--customers", type=int, default=60)
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_splp_gen)
    p = splp.add_parser("trace", parents=[common], help="trace CMCS configurations into a matrix")
    p.add_argument("--instances", nargs="+", required=True, help="instance files or directories")
    p.add_argument("--configs", type=int, default=1000, help="sample size (0 = all)")
    p.add_argument("--library-size", type=int, default=0, help="use the first k components only")
    p.add_argument("--checkpoints", type=int, default=11)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_splp_trace)

    p = sub.add_parser("race", parents=[common, race_opts], help="race a matrix, write a result document")
    p.add_argument("--history", action="store_true", help="record cutoff history")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_race)

    p = sub.add_parser("oracle", parents=[common], help="exhaustive truth table for a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--pool-frac", type=float, default=0.01)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("metrics", parents=[common], help="score a race against a truth table")
    p.add_argument("--result", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("figure", parents=[common], help="quality and rank curves as long-format CSV")
    p.add_argument("--matrix", required=True)
    p.add_argument("--fractions", type=_fractions, default=[0.01, 0.05])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("experiment", parents=[common, race_opts], help="repeat races, write a summary row")
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--domain", default="")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("validate", parents=[common], help="check files against their formats")
    p.add_argument("files", nargs="+")
    p.add_argument("--kind", choices=["matrix", "result", "truth", "figure", "experiment", "instance", "meta"])
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, FileNotFoundError, KeyError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
