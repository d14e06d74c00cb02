"""Command-line entry point: ``lipwalk run | verify | compare``.

Exit codes: 0 success, 2 unreadable or invalid scenario, 3 invariant violation.
"""

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from lipwalk.analysis import verify_deadbeat
from lipwalk.controller import baseline_L_error
from lipwalk.errors import ConfigError, InvalidArgumentError, InvariantError
from lipwalk.lip_core import PendulumParams
from lipwalk.scenario import dumps, load, parse_override
from lipwalk.simulator import run_comparison, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3

OUTPUT_DIR_ENV = "LIPWALK_OUTPUT_DIR"
SAMPLE_COLUMNS = ["time", "step", "p", "L", "L_hat_end", "p_des_current"]
STEP_COLUMNS = ["step", "t_abs", "p_pre", "L_pre", "p_cmd", "p_applied",
                "p_post", "L_post", "L_des", "L_err_rel"]
DEFAULT_PARAMS = {"mass": 32.0, "com_height": 0.9, "step_duration": 0.4, "gravity": 9.81}


def fmt(value) -> str:
    # repr of a float is the shortest string that round-trips
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_log(log, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "samples.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SAMPLE_COLUMNS)
        for s in log.samples:
            writer.writerow([fmt(s.time), s.step, fmt(s.p), fmt(s.L), fmt(s.L_hat_end),
                             fmt(s.p_des_current)])
    with open(out_dir / "steps.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STEP_COLUMNS)
        for e in log.step_events:
            writer.writerow([e.step, fmt(e.t_abs), fmt(e.pre.p), fmt(e.pre.L), fmt(e.p_cmd),
                             fmt(e.p_applied), fmt(e.post.p), fmt(e.post.L), fmt(e.L_des),
                             fmt(e.L_err_rel)])
    write_json(out_dir / "summary.json", log.summary)


def write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _output_dir(args) -> Path:
    return Path(args.output or os.environ.get(OUTPUT_DIR_ENV, "lipwalk_out"))


def cmd_run(args) -> int:
    config = load(args.scenario, args.set)
    if args.dump_config:
        sys.stdout.write(dumps(config))
        return EXIT_OK
    log = run_scenario(config)
    out = _output_dir(args)
    write_log(log, out)
    print(f"wrote {len(log.samples)} samples and {len(log.step_events)} steps to {out}")
    print(f"max_step_L_rel_error = {log.summary['max_step_L_rel_error']}")
    return EXIT_OK


def cmd_compare(args) -> int:
    config = load(args.scenario, args.set)
    if args.dump_config:
        sys.stdout.write(dumps(config))
        return EXIT_OK
    am, base = run_comparison(config)
    out = _output_dir(args)
    write_log(am, out / "am")
    write_log(base, out / "baseline")
    offset = config.baseline_velocity_offset
    predicted = None
    if config.controller_mode == "continuous" and config.baseline_velocity_lag == 0:
        predicted = baseline_L_error(offset, config.params)
    delta = {
        "identical": am.samples == base.samples and am.step_events == base.step_events,
        "velocity_offset": offset,
        "predicted_baseline_L_error": predicted,
        "am_per_step_L_error": [e.pre.L - e.L_des for e in am.step_events],
        "baseline_per_step_L_error": [e.pre.L - e.L_des for e in base.step_events],
        "am_max_step_L_rel_error": am.summary["max_step_L_rel_error"],
        "baseline_max_step_L_rel_error": base.summary["max_step_L_rel_error"],
        "max_abs_placement_delta": max(abs(a.p_applied - b.p_applied)
                                       for a, b in zip(am.step_events, base.step_events)),
    }
    write_json(out / "comparison.json", delta)
    print(f"wrote am/ and baseline/ logs to {out}; identical = {delta['identical']}")
    return EXIT_OK


def cmd_verify(args) -> int:
    values = dict(DEFAULT_PARAMS)
    for item in args.set or ():
        key, value = parse_override(item)
        key = key[len("params."):] if key.startswith("params.") else key
        if key not in ("mass", "com_height", "step_duration", "gravity", "ell"):
            raise ConfigError("unknown parameter", key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", key)
        values[key] = float(value)
    try:
        params = PendulumParams(**values)
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc), "params") from exc
    report = verify_deadbeat(params, args.n, args.seed)
    if args.json:
        print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    else:
        print(f"params: m={params.mass!r} H={params.com_height!r} g={params.gravity!r} "
              f"T={params.step_duration!r} ell={params.ell!r}")
        print(f"random samples: {report.n_random} (seed {report.seed})")
        print(f"max relative L error after one step: {report.max_rel_error:.3e}")
        print(f"open-loop eigenvalues: {report.open_loop_eigenvalues} "
              f"(product error {report.eigen_product_error:.3e})")
        print(f"closed-loop L-error gain: {report.closed_loop_L_eigen:.3e}")
        for name, ok in report.checks.items():
            print(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    return EXIT_OK if report.passed else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, handler, help_text in (
        ("run", cmd_run, "simulate a scenario and write samples.csv, steps.csv, summary.json"),
        ("compare", cmd_compare, "run a scenario with the AM controller and the velocity baseline"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scenario", help="scenario TOML file")
        p.add_argument("-o", "--output", help=f"output directory (default ${OUTPUT_DIR_ENV} or ./lipwalk_out)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a scenario field, e.g. params.mass=40 or target.0.L_des=5")
        p.add_argument("--dump-config", action="store_true",
                       help="print the resolved scenario as TOML and exit")
        p.set_defaults(handler=handler)

    p = sub.add_parser("verify", help="check deadbeat regulation and the step-map spectrum")
    p.add_argument("--n", type=int, default=1000, help="number of random (state, target) pairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a pendulum parameter: mass, com_height, step_duration, gravity, ell")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
