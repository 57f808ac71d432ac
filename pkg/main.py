#!/usr/bin/env python3
"""
Eigen-Domain MIMO Channel Generator
===================================

Command line front end for generating and stressing eigen-domain channel
traces, evaluating per-mode SIR and exporting validation data.

USAGE:
1. Generate: python main.py generate --class V --n 2 --m 2 --samples 100000 --seed 7 --out run/trace.evcm
2. Stress:   python main.py stress --trace run/trace.evcm --period 2 --out run/stressed.evcm
3. SIR:      python main.py sir --trace run/trace.evcm --u-update frozen --v-update every --out run/sir.csv
4. Analyze:  python main.py analyze --trace run/trace.evcm --out-dir run/analysis
5. Validate: python main.py validate --profile quick --out-dir run/validation
6. Info:     python main.py info run/trace.evcm

Exit codes: 0 success, 1 usage or configuration error, 2 failed validation,
3 file I/O or trace format error. Every run writes manifest.json beside its
outputs.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from analysis.acceptance import PROFILES, PROFILE_QUICK, run_acceptance
from analysis.scenario import TrackingPolicy, UpdateRule, forced_swap, run_tracking, sorted_decomposition_sir
from analysis.statistics import empirical_cdf, oob_rejection, rayleigh_slope
from constants import TOOL_VERSION, Analysis
from models.doppler import periodogram
from models.eigenmodel import assemble_trace, generate
from models.types import EigenTrace
from storage.export import export_csv
from storage.files import atomic_write
from storage.manifest import MANIFEST_NAME, RunManifest, config_to_dict, load_manifest, verify_manifest, write_manifest
from storage.trace_io import MAGIC, load_trace, read_header, write_trace
from utils.config import load_config, parse_config
from utils.errors import ConfigError, EigenChannelError, TraceFormatError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3

REPORT_NAME = "acceptance_report.json"


class UsageError(Exception):
    """Bad command line"""


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems as exceptions instead of exiting with 2"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def configure_logging():
    load_dotenv()
    level = getattr(logging, os.getenv("LOG_LEVEL", "INFO").upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.getenv("LOG_FILE", "eigenchan.log")),
            logging.StreamHandler()
        ]
    )


def build_parser() -> CliParser:
    parser = CliParser(prog="main.py", description="Eigen-domain MIMO channel generator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    commands = parser.add_subparsers(dest="command", metavar="{generate,stress,sir,analyze,validate,info}")
    commands.required = True

    gen = commands.add_parser("generate", help="Generate a channel trace")
    gen.add_argument("--config", type=str, help="Model configuration document (key = value)")
    gen.add_argument("--class", dest="model_class", type=str, help="Model class I, II, III, IV or V")
    gen.add_argument("--n", type=int, help="Receive dimension N")
    gen.add_argument("--m", type=int, help="Transmit dimension M")
    gen.add_argument("--samples", dest="n_sam", type=int, help="Output samples after the start-up discard")
    gen.add_argument("--seed", type=int, help="Master seed")
    gen.add_argument("--s-f", dest="s_f", type=float, help="Sampling factor, f_s = S_f * f_d")
    gen.add_argument("--k-f", dest="k_f", type=float, help="Rice factor")
    gen.add_argument("--f-d", dest="f_d", type=float, help="Maximum Doppler shift in Hz")
    gen.add_argument("--s-ratios", type=str, help="Comma-separated singular value ratios")
    gen.add_argument("--omega", type=float, help="Angular rate for classes I-III (rad/s)")
    gen.add_argument("--n-s", dest="n_s", type=int, help="Ring scatterers for class IV")
    gen.add_argument("--theta", type=str, help="Class III phase offset; empty for a random draw")
    gen.add_argument("--scenario", action="store_true",
                     help="Use the scenario sampling default (S_f = 20 instead of 8) when --s-f is not given")
    gen.add_argument("--payload", choices=["eigen", "physical", "both"], default="eigen")
    gen.add_argument("--out", type=str, required=True, help="Output trace path")

    stress = commands.add_parser("stress", help="Inject forced eigenvector swaps into a trace")
    stress.add_argument("--trace", type=str, required=True)
    stress.add_argument("--period", type=int, required=True, help="Swap block length in samples")
    stress.add_argument("--payload", choices=["eigen", "both"], default="eigen")
    stress.add_argument("--out", type=str, required=True)

    sir = commands.add_parser("sir", help="Per-mode SIR under a tracking policy")
    sir.add_argument("--trace", type=str, required=True)
    sir.add_argument("--u-update", type=str, default="every", help="frozen, every or every-k")
    sir.add_argument("--v-update", type=str, default="every", help="frozen, every or every-k")
    sir.add_argument("--k", type=int, default=1, help="Refresh interval for every-k")
    sir.add_argument("--swap-period", type=int, help="Inject forced swaps with this period first")
    sir.add_argument("--power-sum", action="store_true", help="Sum interference powers instead of amplitudes")
    sir.add_argument("--sorted", action="store_true", help="Track a sorted per-sample SVD instead of the natural path")
    sir.add_argument("--out", type=str, required=True)

    analyze = commands.add_parser("analyze", help="Export spectra and CDFs of a trace")
    analyze.add_argument("--trace", type=str, required=True)
    analyze.add_argument("--out-dir", type=str, required=True)
    analyze.add_argument("--segments", type=int, default=Analysis.DEFAULT_SEGMENTS)

    validate = commands.add_parser("validate", help="Run the acceptance suite")
    validate.add_argument("--profile", choices=sorted(PROFILES), default=None,
                          help="Scale of the run (default: $EIGENCHAN_PROFILE or quick)")
    validate.add_argument("--criteria", type=str, help="Comma-separated criterion numbers (default: all)")
    validate.add_argument("--out-dir", type=str, required=True)

    info = commands.add_parser("info", help="Show a trace header or a manifest")
    info.add_argument("path", type=str)
    return parser


def _overrides(args) -> dict:
    values = {
        "model_class": args.model_class.upper() if args.model_class else None,
        "n": args.n, "m": args.m, "n_sam": args.n_sam, "seed": args.seed, "s_f": args.s_f,
        "k_f": args.k_f, "f_d": args.f_d, "omega": args.omega, "n_s": args.n_s,
    }
    if args.s_ratios is not None:
        try:
            values["s_ratios"] = tuple(float(p) for p in args.s_ratios.split(",") if p.strip()) or None
        except ValueError:
            raise ConfigError("s_ratios", f"expected comma-separated numbers, got {args.s_ratios!r}") from None
    if args.theta is not None:
        try:
            values["theta"] = float(args.theta) if args.theta.strip() else None
        except ValueError:
            raise ConfigError("theta", f"expected a number, got {args.theta!r}") from None
    return values


def _load_eigen(path) -> EigenTrace:
    loaded = load_trace(path)
    if loaded.eigen is None:
        raise TraceFormatError(f"{path} holds only the physical channel; this command needs the eigen payload")
    return loaded.eigen


def cmd_generate(args) -> int:
    overrides = _overrides(args)
    if args.config:
        config = load_config(args.config, scenario=args.scenario, **overrides)
    else:
        config = parse_config("", scenario=args.scenario, **overrides)
    manifest = RunManifest(command="generate", config=config_to_dict(config))

    logger.info(f"🚀 generating class {config.model_class} {config.n}x{config.m}, {config.n_sam} samples")
    trace = generate(config)
    written = write_trace(trace, args.out, payload=args.payload)
    manifest.add_output(written.path)
    write_manifest(manifest, written.path.parent)
    print(f"✅ {written.path} ({written.header.file_bytes:,} bytes)")
    return EXIT_OK


def cmd_stress(args) -> int:
    trace = _load_eigen(args.trace)
    stressed = forced_swap(trace, args.period)
    written = write_trace(stressed, args.out, payload=args.payload)
    manifest = RunManifest(command="stress", config=config_to_dict(trace.config),
                           policy={"swap_injection": args.period}, extra={"source": str(args.trace)})
    manifest.add_output(written.path)
    write_manifest(manifest, written.path.parent)
    print(f"✅ {written.path}: swaps every {args.period} samples")
    return EXIT_OK


def cmd_sir(args) -> int:
    policy = TrackingPolicy(
        u_update=UpdateRule.parse(args.u_update, args.k),
        v_update=UpdateRule.parse(args.v_update, args.k),
        swap_injection=args.swap_period,
        power_sum=args.power_sum,
    )
    trace = _load_eigen(args.trace)
    series = sorted_decomposition_sir(trace, policy) if args.sorted else run_tracking(trace, policy)
    path = export_csv(series, args.out)
    manifest = RunManifest(command="sir", config=config_to_dict(trace.config), policy=series.policy,
                           extra={"source": str(args.trace), "collapses_mode1": series.collapses(0)})
    manifest.add_output(path)
    write_manifest(manifest, path.parent)
    print(f"✅ {path}: {len(series)} samples, {series.collapses(0)} samples with SIR_1 below 0 dB")
    return EXIT_OK


def cmd_analyze(args) -> int:
    loaded = load_trace(args.trace)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    channel = loaded.channel if loaded.channel is not None else assemble_trace(loaded.eigen)
    config = channel.config
    manifest = RunManifest(command="analyze", config=config_to_dict(config),
                           extra={"source": str(args.trace), "psd_normalization": "peak bin = 0 dB"})
    summary = {}

    def export(product, name):
        manifest.add_output(export_csv(product, out_dir / name))

    for i in range(config.n):
        for j in range(config.m):
            tag = f"h{i + 1}{j + 1}"
            series = channel.H[:, i, j]
            spectrum = periodogram(series, config.f_s, args.segments, f_d=config.f_d)
            export(spectrum, f"spectrum_{tag}.csv")
            entry = {"oob_rejection_db": _safe(lambda: oob_rejection(spectrum, config.f_d))}
            cdf = _safe(lambda: empirical_cdf(abs(series)))
            if cdf is not None:
                export(cdf, f"cdf_{tag}.csv")
                entry["cdf_slope_db_per_decade"] = _safe(lambda: rayleigh_slope(cdf))
            summary[tag] = entry

    if loaded.eigen is not None:
        values = loaded.eigen.singular_values
        export(periodogram(values[:, 0], config.f_s, args.segments, f_d=config.f_d), "spectrum_s1.csv")
        for k in range(values.shape[1]):
            cdf = _safe(lambda: empirical_cdf(abs(values[:, k])))
            if cdf is not None:
                export(cdf, f"cdf_s{k + 1}.csv")

    manifest.extra["summary"] = summary
    write_manifest(manifest, out_dir)
    print(f"✅ {len(manifest.outputs)} files in {out_dir}")
    for tag, entry in summary.items():
        print(f"   📊 {tag}: " + ", ".join(f"{k}={v:.2f}" for k, v in entry.items() if v is not None))
    return EXIT_OK


def _safe(compute):
    """Run one analysis step; spectra or CDFs a trace cannot support are skipped."""
    try:
        return compute()
    except EigenChannelError as e:
        logger.warning(f"⚠️ skipped: {e}")
        return None


def cmd_validate(args) -> int:
    profile = args.profile or os.getenv("EIGENCHAN_PROFILE", PROFILE_QUICK)
    if profile not in PROFILES:
        raise ConfigError("EIGENCHAN_PROFILE", f"must be one of {', '.join(PROFILES)}, got {profile!r}")
    criteria = None
    if args.criteria:
        try:
            criteria = [int(c) for c in args.criteria.split(",") if c.strip()]
        except ValueError:
            raise UsageError(f"--criteria expects comma-separated numbers, got {args.criteria!r}") from None

    report = run_acceptance(profile, criteria)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / REPORT_NAME
    with atomic_write(report_path, "w", encoding="utf-8") as handle:
        json.dump(report.to_dict(), handle, indent=2, ensure_ascii=False)
    manifest = RunManifest(command="validate", extra={"profile": profile, "passed": report.passed})
    manifest.add_output(report_path)
    write_manifest(manifest, out_dir)

    for result in report.results:
        print(f"{'✅' if result.passed else '❌'} {result.criterion:2d} {result.name}: {result.value}")
    if not report.passed:
        print(f"\n❌ FAILED: {len(report.failures)} of {len(report.results)} criteria")
        return EXIT_VALIDATION
    print(f"\n✅ all {len(report.results)} criteria passed ({profile})")
    return EXIT_OK


def cmd_info(args) -> int:
    path = Path(args.path)
    with open(path, "rb") as handle:
        magic = handle.read(len(MAGIC))
    if magic == MAGIC:
        print(json.dumps(read_header(path).to_dict(), indent=2))
        return EXIT_OK
    try:
        manifest = load_manifest(path)
    except (ValueError, TypeError) as e:
        raise TraceFormatError(f"{path} is neither a trace file nor a manifest ({e})") from e
    print(json.dumps(manifest.to_dict(), indent=2))
    problems = verify_manifest(path)
    for problem in problems:
        print(f"⚠️ {problem}")
    return EXIT_OK if not problems else EXIT_IO


COMMANDS = {
    "generate": cmd_generate,
    "stress": cmd_stress,
    "sir": cmd_sir,
    "analyze": cmd_analyze,
    "validate": cmd_validate,
    "info": cmd_info,
}


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and map failures onto exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return int(e.code or 0)

    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE
    except (OSError, TraceFormatError) as e:
        logger.error(f"❌ I/O failure: {e}")
        return EXIT_IO
    except EigenChannelError as e:
        logger.error(f"❌ {args.command} failed: {e}")
        return EXIT_USAGE


def main():
    configure_logging()
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
