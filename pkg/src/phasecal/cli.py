"""Command-line front end.

``phasecal simulate <config> --seed S --out DIR`` runs a full campaign and
exports traces, the report, optional density grids and figures.
``phasecal report DIR`` pretty-prints the jitter table of a finished run.
``phasecal selftest`` exercises the built-in oracle battery.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import RECEIVER_KINDS, ConfigError
from .configfile import load_config
from .export import export_traces, load_report_bundle, load_report_json
from .simulate import SCENARIOS, RunManifest, apply_scenario, run_simulation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _fmt_time(seconds: float) -> str:
    """Engineering formatting for small time values."""
    a = abs(seconds)
    if a == 0.0:
        return "0 s"
    for scale, unit in ((1e-15, "fs"), (1e-12, "ps"), (1e-9, "ns"), (1e-6, "us")):
        if a < scale * 1e3:
            return f"{seconds / scale:.3g} {unit}"
    return f"{seconds:.3g} s"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasecal",
        description="Transmit phase calibration simulator (local and over-the-air).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an L-cycle calibration campaign")
    sim.add_argument("config", type=Path, help="run configuration file")
    sim.add_argument("--seed", type=int, default=None, help="override the config rng seed")
    sim.add_argument("--out", type=Path, required=True, help="output directory")
    sim.add_argument(
        "--scenario",
        default="default",
        choices=sorted(SCENARIOS),
        help="named impairment overlay (default: config as-is)",
    )
    sim.add_argument("--transport", default="inproc", choices=("inproc", "udp"))
    sim.add_argument("--cycles", type=int, default=None, help="override num_cycles")
    sim.add_argument("--kde", action="store_true", help="also export density grids")
    sim.add_argument("--figures", action="store_true", help="also render figures")

    rep = sub.add_parser("report", help="pretty-print a finished run")
    rep.add_argument("run_dir", type=Path, help="directory written by simulate")
    rep.add_argument("--figures", action="store_true", help="render figures from the traces")

    sub.add_parser("selftest", help="run the built-in oracle battery")
    return parser


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    if args.cycles is not None:
        config = replace(config, num_cycles=args.cycles)
    config = apply_scenario(config, args.scenario)
    seed = config.rng_seed if args.seed is None else args.seed
    manifest = RunManifest(
        config=config,
        seed=seed,
        out_dir=args.out,
        scenario=args.scenario,
        transport=args.transport,
    )
    report = run_simulation(manifest)
    written = export_traces(report, args.out, include_kde=args.kde)
    if args.figures:
        from .figures import render_figures

        written.extend(render_figures(report, args.out))
    for path in written:
        print(path)
    return EXIT_OK


def _print_report(data: dict) -> None:
    meta = data["metadata"]
    print(f"scenario   : {meta['scenario']}")
    print(f"seed       : {meta['seed']}")
    print(f"config     : sha256 {meta['config_sha256'][:16]}…")
    print(f"bandwidth  : {meta['bandwidth_hz'] / 1e6:g} MHz")
    print(
        f"cycles     : {meta['num_cycles']} "
        f"(first {meta['warmup_cycles']} excluded from statistics)"
    )
    print()
    print("RMS cycle-to-cycle jitter")
    header = f"{'chain':<8}" + "".join(
        f"{kind + ' ' + which:>18}"
        for which in ("measured", "calibrated")
        for kind in RECEIVER_KINDS
    )
    print(header)
    for m in range(meta["num_chains"]):
        row = f"TX{m + 1:<6}"
        for which in ("measured", "calibrated"):
            for kind in RECEIVER_KINDS:
                cell = data["cells"][kind][which][f"chain_{m}"]
                row += f"{_fmt_time(cell['rms_c2c_jitter_s']):>18}"
        print(row)
    print()
    print("coherence factor over chains (mean phases)")
    for kind in RECEIVER_KINDS:
        c = data["coherence"][kind]
        print(f"  {kind:<6} measured {c['measured']:.4f}   calibrated {c['calibrated']:.4f}")


def _cmd_report(args) -> int:
    data = load_report_json(Path(args.run_dir) / "report.json")
    _print_report(data)
    if args.figures:
        from .figures import render_figures

        report = load_report_bundle(args.run_dir)
        for path in render_figures(report, args.run_dir):
            print(path)
    return EXIT_OK


def _cmd_selftest(_args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest() else EXIT_RUNTIME


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "report":
            return _cmd_report(args)
        return _cmd_selftest(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime failures: I/O, sockets, ...
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
