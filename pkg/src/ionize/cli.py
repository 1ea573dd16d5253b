"""Command-line entry point: ``ionize <mode> --config <file>``."""

from __future__ import annotations

import argparse
import json
import sys

from .sweep import MODES, ConfigError, SweepConfig, run, validate


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionize",
        description="Sweep runner for driven-transmon ionization studies.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run a {mode} sweep")
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--resume", action="store_true",
                       help="skip cells already recorded in the manifest")
        p.add_argument("--validate-only", action="store_true",
                       help="print the static validation report and exit")
        p.add_argument("--output-dir", default=None,
                       help="override the config's output directory "
                            "(IONIZE_OUTPUT_DIR also works)")
        # Drive-pulse overrides, applied on top of the config's pulse block.
        p.add_argument("--eps-d-ghz", type=float, default=None)
        p.add_argument("--omega-d-ghz", type=float, default=None)
        p.add_argument("--t-f-ns", type=float, default=None)
        p.add_argument("--t-ramp-ns", type=float, default=None)
    return parser


def _apply_overrides(config: SweepConfig, args) -> SweepConfig:
    raw = dict(config.raw)
    if args.output_dir is not None:
        raw["output_dir"] = args.output_dir
    pulse = dict(raw.get("pulse", {}))
    for flag, key in (("t_f_ns", "t_f_ns"), ("t_ramp_ns", "t_ramp_ns")):
        value = getattr(args, flag)
        if value is not None:
            pulse[key] = value
    if pulse:
        raw["pulse"] = pulse
    for flag, axis in (("eps_d_ghz", "eps_d"), ("omega_d_ghz", "omega_d")):
        value = getattr(args, flag)
        if value is not None:
            raw[axis] = {"start": value, "stop": value, "count": 1}
    return SweepConfig(mode=config.mode, raw=raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = SweepConfig.load(args.config)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if config.mode != args.mode:
        print(f"error: config mode {config.mode!r} does not match "
              f"subcommand {args.mode!r}", file=sys.stderr)
        return 2
    config = _apply_overrides(config, args)
    if args.validate_only:
        report = validate(config)
        print(json.dumps(report, indent=2, sort_keys=True))
        return 2 if report["problems"] else 0
    report = validate(config)
    if report["problems"]:
        for problem in report["problems"]:
            print(f"error: {problem}", file=sys.stderr)
        return 2
    for warning in report["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    try:
        return run(config, workers=args.workers, resume=args.resume)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
