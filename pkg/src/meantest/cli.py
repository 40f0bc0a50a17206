"""Command-line entry point: test data files, run experiment plans, generate fixtures.

Exit codes: 0 = success (ACCEPT for ``test``), 1 = REJECT (``test`` only),
2 = any error, including unknown flags and malformed inputs. The default
seed comes from --seed, falling back to the MEANTEST_SEED environment
variable, then 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .core import run_tester
from .distributions import sample
from .experiments import run_experiment
from .io import (
    DataFormat,
    RunManifest,
    dump_json,
    load_plan,
    load_spec,
    manifest_path,
    plan_to_dict,
    read_samples,
    result_to_dict,
    seed_from_value,
    spec_to_dict,
    utc_now,
    write_plot_data,
    write_result,
    write_samples,
)

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_ERROR = 2


def _default_seed() -> int:
    raw = os.environ.get("MEANTEST_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"MEANTEST_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meantest",
        description="Split-sample mean tester and Monte Carlo experiment harness.",
    )
    parser.add_argument("--version", action="version", version=f"meantest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="test a data file of samples")
    p_test.add_argument("data", help="path to the sample file")
    p_test.add_argument("--epsilon", type=float, required=True, help="mean-norm separation")
    p_test.add_argument("--c-star", type=float, default=1.0, help="anti-concentration constant")
    p_test.add_argument(
        "--format",
        choices=[f.value for f in DataFormat],
        default=DataFormat.CSV_ROWS.value,
        help="input format (default: csv)",
    )
    p_test.add_argument("--dim", type=int, help="row width, required for raw input")
    p_test.add_argument("--json", action="store_true", help="print a machine-readable report")
    p_test.set_defaults(func=cmd_test)

    p_sim = sub.add_parser("simulate", help="run an experiment plan")
    p_sim.add_argument("plan", help="path to the plan JSON file")
    p_sim.add_argument("--out", required=True, help="result file path")
    p_sim.add_argument(
        "--parallelism",
        type=int,
        default=os.cpu_count() or 1,
        help="worker count for trials (default: available cores)",
    )
    p_sim.add_argument("--trials", type=int, help="override the plan's trial count")
    p_sim.add_argument("--seed", type=int, help="override the plan's base seed")
    p_sim.set_defaults(func=cmd_simulate)

    p_gen = sub.add_parser("generate", help="draw samples from a distribution spec")
    p_gen.add_argument("spec", help="path to the distribution spec JSON file")
    p_gen.add_argument("--count", type=int, required=True, help="number of samples")
    p_gen.add_argument("--seed", type=int, help="seed (default: MEANTEST_SEED or 0)")
    p_gen.add_argument("--out", required=True, help="output file path")
    p_gen.add_argument(
        "--format",
        choices=[f.value for f in DataFormat],
        default=DataFormat.CSV_ROWS.value,
        help="output format (default: csv)",
    )
    p_gen.set_defaults(func=cmd_generate)

    return parser


def cmd_test(args) -> int:
    fmt = DataFormat(args.format)
    if fmt is DataFormat.RAW_F64_LE and args.dim is None:
        raise ValueError("--dim is required for raw input")
    batch = read_samples(args.data, fmt, dim=args.dim)
    decision = run_tester(batch, args.epsilon, args.c_star)
    if args.json:
        report = {
            "verdict": decision.verdict.value,
            "z": decision.z,
            "threshold": decision.threshold,
            "n": decision.n,
            "under_sampled": decision.under_sampled,
            "dim": batch.shape[1],
            "rows": batch.shape[0],
            "epsilon": args.epsilon,
            "c_star": args.c_star,
        }
        print(json.dumps(report, sort_keys=True))
    else:
        print(f"verdict: {decision.verdict.value}")
        print(f"z: {decision.z:.17g}")
        print(f"threshold: {decision.threshold:.17g}")
        print(f"n (per half): {decision.n}")
        if decision.under_sampled:
            print("under-sampled: yes (fewer rows than the rule requires; no guarantee)")
    return EXIT_ACCEPT if decision.accept else EXIT_REJECT


def cmd_simulate(args) -> int:
    started = utc_now()
    plan = load_plan(args.plan)
    if args.trials is not None or args.seed is not None:
        from dataclasses import replace

        if args.trials is not None:
            plan = replace(plan, trials=args.trials)
        if args.seed is not None:
            plan = replace(plan, base_seed=seed_from_value(args.seed))
    result = run_experiment(plan, parallelism=args.parallelism)
    write_result(result, args.out)
    plots = write_plot_data(result, args.out)
    manifest = RunManifest(
        command=" ".join(["meantest"] + args.argv),
        config=plan_to_dict(plan),
        seed={"value": plan.base_seed.value, "trial_index": plan.base_seed.trial_index},
        tool_version=__version__,
        started_at=started,
        finished_at=utc_now(),
    )
    dump_json(manifest.to_dict(), manifest_path(args.out))
    status = "complete" if result.complete else "PARTIAL"
    print(f"{result.plan_name}: {len(result.cells)} cells, {result.completed_trials} trials ({status})")
    for cell in result.cells:
        lo, hi = cell.wilson_ci
        print(
            f"  [{cell.role}] dim={cell.config.dim} eps={cell.config.epsilon:g} n={cell.config.n}: "
            f"accept_rate={cell.accept_rate:.4f} ci=({lo:.4f}, {hi:.4f})"
            + (f" ERROR: {cell.error}" if cell.error else "")
        )
    print(f"wrote {args.out}, {manifest_path(args.out)}" + (f", {len(plots)} plot file(s)" if plots else ""))
    return EXIT_ACCEPT if result.complete else EXIT_ERROR


def cmd_generate(args) -> int:
    started = utc_now()
    spec = load_spec(args.spec)
    seed_value = args.seed if args.seed is not None else _default_seed()
    seed = seed_from_value(seed_value)
    batch = sample(spec, args.count, seed)
    write_samples(args.out, batch, args.format)
    manifest = RunManifest(
        command=" ".join(["meantest"] + args.argv),
        config={"spec": spec_to_dict(spec), "count": args.count, "format": args.format},
        seed={"value": seed.value, "trial_index": seed.trial_index},
        tool_version=__version__,
        started_at=started,
        finished_at=utc_now(),
    )
    dump_json(manifest.to_dict(), manifest_path(args.out))
    print(f"wrote {args.count} samples (dim={spec.dim}) to {args.out}")
    return EXIT_ACCEPT


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
