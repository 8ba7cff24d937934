"""Command-line entry point: ``psoacs {tune,solve,bench,presets}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench, pso
from .seeding import DEFAULT_SEED, default_workers
from .tsplib import BUNDLED, TsplibError, load_bundled, read_instance


class CliError(Exception):
    pass


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def load_instance(spec: str):
    """A path to a .tsp file, or the name of a bundled instance."""
    path = Path(spec)
    if path.is_file():
        try:
            return read_instance(path)
        except (OSError, UnicodeDecodeError) as exc:
            raise CliError(f"cannot read {spec}: {exc}") from None
        except TsplibError as exc:
            raise CliError(f"{spec}: {exc}") from None
    if spec in BUNDLED:
        return load_bundled(spec)
    raise CliError(f"instance file not found: {spec}")


def _write(path, text):
    if path:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise CliError(f"cannot write {path}: {exc}") from None


def cmd_tune(args) -> int:
    inst = load_instance(args.instance)
    base = pso.PsoConfig.quick() if args.quick else pso.PsoConfig()
    overrides = {k: v for k, v in (("pso_iterations", args.pso_iters), ("swarm_size", args.swarm),
                                   ("trials_per_eval", args.trials),
                                   ("acs_iterations_per_trial", args.acs_iters)) if v is not None}
    try:
        cfg = pso.PsoConfig(**{**base.__dict__, **overrides, "clock": args.clock,
                               "workers": args.workers})
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if cfg.swarm_size % 2:
        raise CliError(f"--swarm must be even, got {cfg.swarm_size}")

    def progress(row):
        if args.verbose:
            print(f"iter {row.iteration}: min {row.min_fitness} mean {row.mean_fitness:.2f} "
                  f"best {row.best_length}", file=sys.stderr)

    result = pso.optimize(inst, cfg, args.seed, callback=progress)
    preset = bench.ParamPreset(args.name or f"P_{inst.name}", result.params)
    preset_path = args.preset_out or f"{inst.name}.preset"
    _write(preset_path, bench.format_preset(preset))
    _write(args.trace or f"{inst.name}.trace.csv", pso.trace_csv(result.trace))
    print(f"best length: {result.fitness.length}")
    print(bench.format_preset(preset), end="")
    return 0


def _resolve_preset(args):
    if args.preset_file:
        try:
            presets = bench.parse_presets(Path(args.preset_file).read_text())
        except OSError as exc:
            raise CliError(f"cannot read {args.preset_file}: {exc}") from None
        except ValueError as exc:
            raise CliError(f"{args.preset_file}: {exc}") from None
        if args.preset:
            matches = [p for p in presets if p.name == args.preset]
            if not matches:
                raise CliError(f"preset {args.preset!r} not in {args.preset_file}")
            return matches[0]
        return presets[0]
    try:
        return bench.get_preset(args.preset)
    except KeyError as exc:
        raise CliError(exc.args[0]) from None


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    preset = _resolve_preset(args)
    rec = bench.evaluate_preset(inst, preset, args.trials, args.iters, args.seed, args.workers)
    best = min(rec.raw, key=lambda r: r.best_length)
    print(f"instance {inst.name}  preset {preset.name}  trials {rec.trials}  iters {args.iters}")
    print(f"min length: {rec.min_length}")
    print(f"avg length: {rec.avg_length:.2f}")
    print(f"avg time to best: {rec.avg_time_to_best:.3f}s")
    print("best tour: " + " ".join(map(str, best.tour_labels)))
    _write(args.raw or f"{inst.name}.{preset.name}.raw.csv", bench.emit_raw_csv([rec]))
    _write(args.out, bench.emit_csv([rec]))
    return 0


def cmd_bench(args) -> int:
    paths = []
    for spec in args.instances:
        p = Path(spec)
        if p.is_dir():
            paths += sorted(p.glob("*.tsp"))
        else:
            paths.append(spec)
    if not paths:
        raise CliError(f"no .tsp instances found in {' '.join(args.instances)}")
    instances = [load_instance(str(p)) for p in paths]
    if args.presets == "all":
        presets = list(bench.PRESETS.values())
    else:
        try:
            presets = [bench.get_preset(n.strip()) for n in args.presets.split(",") if n.strip()]
        except KeyError as exc:
            raise CliError(exc.args[0]) from None
    records = bench.cross_matrix(instances, presets, args.trials, args.iters, args.seed,
                                 args.workers)
    text = bench.emit_csv(records)
    if args.out == "-":
        print(text, end="")
    else:
        _write(args.out, text)
    _write(args.raw, bench.emit_raw_csv(records))
    return 0


def cmd_presets(args) -> int:
    print(bench.format_presets(bench.PRESETS.values()), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psoacs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"master seed (default {DEFAULT_SEED})")
        p.add_argument("--workers", type=positive_int, default=default_workers(),
                       help="parallel trials/evaluations (default: $PSOACS_WORKERS or cores)")

    p = sub.add_parser("tune", help="tune ACS parameters on one instance with PSO")
    p.add_argument("--instance", required=True, help="TSPLIB file or bundled instance name")
    p.add_argument("--quick", action="store_true",
                   help="desk-scale profile: swarm 10, 50 iterations, 3x200-iteration trials")
    p.add_argument("--pso-iters", type=positive_int, help="PSO iterations (default 500)")
    p.add_argument("--swarm", type=positive_int, help="swarm size, even (default 20)")
    p.add_argument("--trials", type=positive_int, help="ACS trials per fitness evaluation (default 5)")
    p.add_argument("--acs-iters", type=positive_int, help="ACS iterations per trial (default 1000)")
    p.add_argument("--clock", choices=("steps", "wall"), default="steps",
                   help="tie-break measure for equal lengths (default steps: reproducible)")
    p.add_argument("--name", help="name of the emitted preset (default P_<instance>)")
    p.add_argument("--preset-out", help="preset file to write (default <instance>.preset)")
    p.add_argument("--trace", help="per-iteration trace CSV (default <instance>.trace.csv)")
    p.add_argument("-v", "--verbose", action="store_true", help="log every PSO iteration")
    common(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("solve", help="run ACS trials with a fixed preset")
    p.add_argument("--instance", required=True)
    p.add_argument("--preset", help="built-in preset name (or name inside --preset-file)")
    p.add_argument("--preset-file", help="key=value preset file")
    p.add_argument("--trials", type=positive_int, default=25)
    p.add_argument("--iters", type=positive_int, default=2500)
    p.add_argument("--raw", help="per-trial CSV (default <instance>.<preset>.raw.csv)")
    p.add_argument("--out", help="write the aggregate CSV row here")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="evaluate presets across instances")
    p.add_argument("--instances", nargs="+", required=True,
                   help="directory of .tsp files and/or individual files")
    p.add_argument("--presets", default="all", help="'all' or comma-separated preset names")
    p.add_argument("--trials", type=positive_int, default=25)
    p.add_argument("--iters", type=positive_int, default=2500)
    p.add_argument("--out", default="bench_aggregate.csv", help="aggregate CSV path, '-' for stdout")
    p.add_argument("--raw", default="bench_raw.csv", help="per-trial CSV path")
    common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("presets", help="list built-in parameter sets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "solve" and not (args.preset or args.preset_file):
        print("error: solve needs --preset or --preset-file", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
