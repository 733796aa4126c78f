"""Command-line front end.

Verbs:
    run     one scenario -> manifest, peak report, spectrum CSV, heatmap
    sweep   scenario sweep section (or --axis flags) -> sweep.csv
    audit   geometry realization + spatial-sampling report only
    ingest  measured geometry CSV + channel CSV -> spectrum outputs
    presets list shipped scenario presets

Exit codes: 0 success, 1 config/parse errors, 2 validation failures,
3 numeric failures inside the pipeline.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .channel import ingest_channel
from .errors import ConfigError, NumericError, ValidationError
from .geometry import SensorArray, nyquist_audit
from .pipeline import (
    load_config,
    resolve,
    resolve_ingested,
    run_channel,
    run_scenario,
    sweep_rows,
    write_outputs,
    write_sweep_csv,
)
from .presets import PRESETS, get_preset


def _add_common(p: argparse.ArgumentParser, need_scenario: bool = True) -> None:
    if need_scenario:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", help="scenario JSON path (or a run manifest)")
        src.add_argument("--preset", help="name of a shipped preset")
    p.add_argument("--out-dir", default=None, help="output directory "
                   "(default: runs/<scenario name>)")
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--allow-undersampled", action="store_true",
                   help="run even if spatial sampling fails the half-wavelength check")
    p.add_argument("--force-modes", action="store_true",
                   help="run even if the requested mode count exceeds the stability limit")
    p.add_argument("--pad-az", type=int, default=None, help="azimuth zero-pad factor")
    p.add_argument("--pad-delay", type=int, default=None, help="delay zero-pad factor")


def _load_scenario(args) -> dict:
    cfg = get_preset(args.preset) if args.preset else load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = int(args.seed)
    proc = cfg.setdefault("processing", {})
    if args.pad_az is not None:
        proc["pad_az"] = args.pad_az
    if args.pad_delay is not None:
        proc["pad_delay"] = args.pad_delay
    return cfg


def _out_dir(args, name: str) -> Path:
    return Path(args.out_dir) if args.out_dir else Path("runs") / name


def _cmd_run(args) -> int:
    cfg = _load_scenario(args)
    scenario = resolve(cfg, allow_undersampled=args.allow_undersampled,
                       force_modes=args.force_modes)
    result = run_scenario(scenario)
    paths = write_outputs(result, _out_dir(args, scenario.name))
    print(f"{scenario.name}: modes={2 * scenario.mode_half + 1} "
          f"reduction={scenario.reduction} runtime={result.runtime_s:.2f}s")
    print(f"peak: phi={result.report.main.phi_deg:.6g} deg "
          f"tau={result.report.main.tau_s * 1e9:.6g} ns "
          f"delta={result.report.delta_db:.2f} dB")
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_scenario(args)
    for spec in args.axis or []:
        if "=" not in spec:
            raise ConfigError(f"--axis wants PATH=v1,v2,...: got {spec!r}")
        path, values = spec.split("=", 1)
        parsed = [json.loads(v) for v in values.split(",")]
        cfg.setdefault("sweep", {}).setdefault("axes", []).append(
            {"path": path, "values": parsed})
    out = _out_dir(args, cfg.get("name", "sweep"))
    rows = list(sweep_rows(cfg, allow_undersampled=args.allow_undersampled,
                           force_modes=args.force_modes))
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "sweep.csv"
    n = write_sweep_csv(rows, csv_path)
    (out / "sweep_config.json").write_text(
        json.dumps({"kind": "elliptic-doa-sweep", "version": __version__,
                    "config": cfg}, indent=2, sort_keys=True) + "\n")
    print(f"wrote {csv_path} ({n} rows)")
    return 0


def _cmd_audit(args) -> int:
    cfg = _load_scenario(args)
    scenario = resolve(cfg, allow_undersampled=True, force_modes=True)
    f_max = args.f_max if args.f_max else scenario.grid.f_max_hz
    report = nyquist_audit(scenario.array, f_max)
    print(report.to_text())
    if args.export_geometry:
        scenario.array.to_csv(args.export_geometry)
        print(f"wrote {args.export_geometry}")
    return 0 if report.passed else 2


def _cmd_ingest(args) -> int:
    array = SensorArray.from_csv(args.geometry)
    ch = ingest_channel(args.channel, array)
    proc = {}
    if args.config:
        proc = load_config(args.config).get("processing", {})
    if args.pad_az is not None:
        proc["pad_az"] = args.pad_az
    if args.pad_delay is not None:
        proc["pad_delay"] = args.pad_delay
    scenario = resolve_ingested(array, ch.grid, proc, name=args.name,
                                allow_undersampled=args.allow_undersampled,
                                force_modes=args.force_modes)
    result = run_channel(scenario, ch)
    paths = write_outputs(result, _out_dir(args, scenario.name))
    print(f"{scenario.name}: sensors={array.total_sensors} "
          f"K={ch.grid.samples} modes={2 * scenario.mode_half + 1}")
    print(f"peak: phi={result.report.main.phi_deg:.6g} deg "
          f"tau={result.report.main.tau_s * 1e9:.6g} ns "
          f"delta={result.report.delta_db:.2f} dB")
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_presets(_args) -> int:
    for name in sorted(PRESETS):
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="elliptic-doa",
                                 description="Joint azimuth/delay estimation "
                                             "with wideband ring arrays")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="verb", required=True)

    run_p = sub.add_parser("run", help="run one scenario")
    _add_common(run_p)
    run_p.set_defaults(fn=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="run a scenario sweep")
    _add_common(sweep_p)
    sweep_p.add_argument("--axis", action="append",
                         help="extra axis PATH=v1,v2,... (JSON scalars)")
    sweep_p.set_defaults(fn=_cmd_sweep)

    audit_p = sub.add_parser("audit", help="geometry / spatial sampling audit")
    _add_common(audit_p)
    audit_p.add_argument("--f-max", type=float, default=None,
                         help="audit frequency (default: top of the grid)")
    audit_p.add_argument("--export-geometry", default=None,
                         help="also write the realized sensor CSV here")
    audit_p.set_defaults(fn=_cmd_audit)

    ingest_p = sub.add_parser("ingest", help="process a measured channel")
    _add_common(ingest_p, need_scenario=False)
    ingest_p.add_argument("--geometry", required=True, help="sensor CSV (ring,p,x_m,y_m)")
    ingest_p.add_argument("--channel", required=True, help="channel CSV (p,f_hz,re,im)")
    ingest_p.add_argument("--config", default=None,
                          help="optional JSON with a processing section")
    ingest_p.add_argument("--name", default="ingest", help="run label")
    ingest_p.set_defaults(fn=_cmd_ingest)

    presets_p = sub.add_parser("presets", help="list shipped presets")
    presets_p.set_defaults(fn=_cmd_presets)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
