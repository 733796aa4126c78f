"""Scenario-driven runner: config resolution, pipeline execution, sweeps.

A scenario is a JSON document (kept diffable on disk) with sections:

    name        run label (string)
    seed        master seed; rings and the noise injector derive their
                streams from it unless given their own
    array       list of ring specs: semi_major_m, eccentricity, rotation_deg,
                sensors, sigma_m | sigma_wavelengths, seed (optional)
    grid        f_start_hz, bandwidth_hz, samples
    scene       list of waves: azimuth_deg, delay_s, elevation_deg,
                amplitude, distance_m (null = far field)
    processing  model, design, modes ("auto" or a total count), mode_threshold,
                reduction ("auto"/"none"/"symmetric"), pad_az, pad_delay,
                exclusion_cells, snr_db (null = noiseless)
    sweep       optional: {"axes": [{"path": ..., "values": [...]}, ...]}

Resolution turns "auto" fields into concrete numbers (mode counts via the
stability limit, sigma via the band-center wavelength, per-ring seeds) and
validates spatial sampling.  A resolved config is itself a valid scenario;
re-running one reproduces every numeric output bit for bit, which is what
the run manifest records.
"""

from __future__ import annotations

import copy
import json
import time
from dataclasses import dataclass
from typing import Optional

from . import __version__
from .beamform import build_bank, expand_array, mode_limit
from .channel import (
    ChannelMatrix,
    FrequencyGrid,
    IncidentWave,
    add_awgn,
    superpose,
)
from .constants import SPEED_OF_LIGHT
from .errors import ConfigError, ValidationError
from .geometry import EllipseSpec, SensorArray, build_concentric, nyquist_audit
from .spectrum import (
    DEFAULT_EXCLUSION_CELLS,
    JointSpectrum,
    PeakReport,
    find_peaks,
    joint_spectrum,
)

_PROCESSING_DEFAULTS = {
    "model": "planewave",
    "design": "robust",
    "modes": "auto",
    "mode_threshold": 1e-6,
    "reduction": "auto",
    "pad_az": 4,
    "pad_delay": 2,
    "exclusion_cells": list(DEFAULT_EXCLUSION_CELLS),
    "exclusion_deg": None,
    "snr_db": None,
}


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error at line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    if cfg.get("kind") == "elliptic-doa-manifest":
        cfg = cfg.get("config")
        if not isinstance(cfg, dict):
            raise ConfigError("manifest carries no embedded config")
    return cfg


def set_path(cfg: dict, path: str, value) -> None:
    """Assign into a nested config structure.

    Dot-separated path; integer tokens index lists and '*' fans out over a
    whole list ("array.*.eccentricity" retunes every ring).
    """
    tokens = path.split(".")

    def descend(node, toks):
        head, rest = toks[0], toks[1:]
        if head == "*":
            if not isinstance(node, list):
                raise ConfigError(f"'*' needs a list at {path!r}")
            if not rest:
                raise ConfigError(f"cannot assign to '*' directly in {path!r}")
            for item in node:
                descend(item, rest)
            return
        key = int(head) if isinstance(node, list) else head
        try:
            if rest:
                descend(node[key], rest)
            else:
                node[key] = value
        except (KeyError, IndexError, TypeError) as exc:
            raise ConfigError(f"bad sweep path {path!r}: {exc}") from exc

    descend(cfg, tokens)


@dataclass
class ResolvedScenario:
    """A fully concrete run: every auto field pinned, geometry realized."""

    name: str
    config: dict
    array: SensorArray
    grid: FrequencyGrid
    scene: list
    model: str
    design: str
    mode_half: int
    mode_limit_value: int
    reduction: str
    pad_az: int
    pad_delay: int
    exclusion_cells: tuple
    snr_db: Optional[float]
    seed: int
    nyquist: object


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing required section {key!r}")
    return cfg[key]


def _resolve_processing(proc_cfg: dict, array: SensorArray, grid: FrequencyGrid,
                        allow_undersampled: bool, force_modes: bool) -> dict:
    """Pin every processing knob against a realized array and grid."""
    proc = dict(_PROCESSING_DEFAULTS)
    proc.update(proc_cfg or {})
    unknown = set(proc) - set(_PROCESSING_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown processing keys: {sorted(unknown)}")
    if proc["model"] not in ("planewave", "spherical"):
        raise ConfigError(f"unknown model {proc['model']!r}")
    design = proc["design"]
    if design not in ("robust", "plain", "average"):
        raise ConfigError(f"unknown design {design!r}")

    r_min = None
    if design == "average":
        specs = [array.ring_spec(i) for i in range(array.ring_count)]
        if any(s is None for s in specs):
            raise ValidationError("average design needs ellipse parameters on every ring")
        r_min = min(0.5 * (s.semi_major_m + s.semi_minor_m) for s in specs)
    limit = mode_limit(array, grid, float(proc["mode_threshold"]),
                       design="plain" if design == "plain" else "robust",
                       r_min_m=r_min)
    if proc["modes"] == "auto":
        mh = limit
    else:
        try:
            total = int(proc["modes"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"modes must be 'auto' or an integer: {exc}") from exc
        if total < 1:
            raise ConfigError("modes must be positive")
        mh = total // 2  # symmetric range: requested total rounds up to odd
        if mh > limit and not force_modes:
            raise ValidationError(
                f"requested modes {total} (half-range {mh}) exceed the stability "
                f"limit {limit} at threshold {proc['mode_threshold']}; "
                f"pass --force-modes to override")

    reduction = proc["reduction"]
    if reduction == "auto":
        specs = [array.ring_spec(i) for i in range(array.ring_count)]
        clean = all(s is not None and s.sigma_m == 0.0 and s.sensors % 4 == 0
                    for s in specs)
        reduction = "symmetric" if (clean and design != "average") else "none"
    elif reduction not in ("none", "symmetric"):
        raise ConfigError(f"unknown reduction {reduction!r}")

    audit = nyquist_audit(array, grid.f_max_hz)
    if not audit.passed and not allow_undersampled:
        raise ValidationError(
            "spatial sampling fails the half-wavelength criterion "
            f"(max spacing {audit.max_spacing_m:.4g} m > {audit.limit_m:.4g} m); "
            "pass --allow-undersampled to override")

    pad_az = int(proc["pad_az"])
    pad_delay = int(proc["pad_delay"])
    if pad_az < 1 or pad_delay < 1:
        raise ConfigError("pad factors must be >= 1")
    excl = tuple(int(v) for v in proc["exclusion_cells"])
    if len(excl) != 2 or any(v < 0 for v in excl):
        raise ConfigError("exclusion_cells must be two non-negative integers")
    if proc["exclusion_deg"] is not None:
        # fixed angular window: keeps artifact readings comparable across
        # runs whose auto-selected mode counts (and thus cell sizes) differ
        cell_deg = 360.0 / (2 * mh + 1)
        excl = (max(1, round(float(proc["exclusion_deg"]) / cell_deg)), excl[1])
    snr_db = proc["snr_db"]
    if snr_db is not None:
        snr_db = float(snr_db)
    return {"model": proc["model"], "design": design, "mode_half": mh,
            "mode_limit": limit, "mode_threshold": float(proc["mode_threshold"]),
            "reduction": reduction, "nyquist": audit, "pad_az": pad_az,
            "pad_delay": pad_delay, "exclusion_cells": excl,
            "exclusion_deg": proc["exclusion_deg"], "snr_db": snr_db}


def resolve(cfg: dict, allow_undersampled: bool = False,
            force_modes: bool = False) -> ResolvedScenario:
    """Validate a raw scenario and pin every derived quantity."""
    cfg = copy.deepcopy(cfg)
    name = cfg.get("name", "scenario")
    seed = int(cfg.get("seed", 0))
    # heavily perturbed layouts cannot pass a strict consecutive-spacing
    # audit; scenarios that rely on average sampling may opt out themselves
    allow_undersampled = allow_undersampled or bool(cfg.get("allow_undersampled", False))

    grid_cfg = _require(cfg, "grid")
    try:
        grid = FrequencyGrid(f_start_hz=float(grid_cfg["f_start_hz"]),
                             bandwidth_hz=float(grid_cfg["bandwidth_hz"]),
                             samples=int(grid_cfg["samples"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad grid section: {exc}") from exc

    rings_cfg = _require(cfg, "array")
    if not isinstance(rings_cfg, list) or not rings_cfg:
        raise ConfigError("array must be a non-empty list of ring specs")
    lam_center = SPEED_OF_LIGHT / grid.f_center_hz
    specs = []
    for i, ring in enumerate(rings_cfg):
        if not isinstance(ring, dict):
            raise ConfigError(f"array[{i}] must be an object")
        ring = dict(ring)
        if ring.get("sigma_wavelengths") is not None:
            if ring.get("sigma_m"):
                raise ConfigError(f"array[{i}]: give sigma_m or sigma_wavelengths, not both")
            ring["sigma_m"] = float(ring.pop("sigma_wavelengths")) * lam_center
        else:
            ring.pop("sigma_wavelengths", None)
            ring["sigma_m"] = float(ring.get("sigma_m", 0.0))
        if ring.get("seed") is None:
            ring["seed"] = seed
        try:
            specs.append(EllipseSpec(
                semi_major_m=float(ring["semi_major_m"]),
                eccentricity=float(ring.get("eccentricity", 0.0)),
                rotation_deg=float(ring.get("rotation_deg", 0.0)),
                sensors=int(ring.get("sensors", 720)),
                sigma_m=ring["sigma_m"],
                seed=int(ring["seed"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad array[{i}] spec: {exc}") from exc
        rings_cfg[i] = {
            "semi_major_m": specs[-1].semi_major_m,
            "eccentricity": specs[-1].eccentricity,
            "rotation_deg": specs[-1].rotation_deg,
            "sensors": specs[-1].sensors,
            "sigma_m": specs[-1].sigma_m,
            "seed": specs[-1].seed,
        }
    array = build_concentric(specs)

    scene_cfg = _require(cfg, "scene")
    if not isinstance(scene_cfg, list) or not scene_cfg:
        raise ConfigError("scene must be a non-empty list of waves")
    scene = []
    for i, wv in enumerate(scene_cfg):
        try:
            scene.append(IncidentWave(
                azimuth_deg=float(wv["azimuth_deg"]),
                delay_s=float(wv["delay_s"]),
                elevation_deg=float(wv.get("elevation_deg", 90.0)),
                amplitude=float(wv.get("amplitude", 1.0)),
                distance_m=None if wv.get("distance_m") is None
                else float(wv["distance_m"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad scene[{i}] wave: {exc}") from exc

    proc = _resolve_processing(cfg.get("processing", {}), array, grid,
                               allow_undersampled=allow_undersampled,
                               force_modes=force_modes)
    model = proc["model"]
    if model == "spherical" and any(w.distance_m is None for w in scene):
        raise ValidationError("spherical model requires distance_m on every wave")
    design = proc["design"]
    mh = proc["mode_half"]
    limit = proc["mode_limit"]
    reduction = proc["reduction"]
    audit = proc["nyquist"]
    pad_az, pad_delay = proc["pad_az"], proc["pad_delay"]
    excl = proc["exclusion_cells"]
    snr_db = proc["snr_db"]

    resolved_cfg = {
        "name": name,
        "seed": seed,
        "array": rings_cfg,
        "grid": {"f_start_hz": grid.f_start_hz, "bandwidth_hz": grid.bandwidth_hz,
                 "samples": grid.samples},
        "scene": [{"azimuth_deg": w.azimuth_deg, "delay_s": w.delay_s,
                   "elevation_deg": w.elevation_deg, "amplitude": w.amplitude,
                   "distance_m": w.distance_m} for w in scene],
        "processing": {"model": model, "design": design, "modes": 2 * mh + 1,
                       "mode_threshold": float(proc["mode_threshold"]),
                       "reduction": reduction, "pad_az": pad_az,
                       "pad_delay": pad_delay, "exclusion_cells": list(excl),
                       "exclusion_deg": proc["exclusion_deg"], "snr_db": snr_db},
    }
    if allow_undersampled:
        resolved_cfg["allow_undersampled"] = True
    if "sweep" in cfg:
        resolved_cfg["sweep"] = cfg["sweep"]

    return ResolvedScenario(
        name=name, config=resolved_cfg, array=array, grid=grid, scene=scene,
        model=model, design=design, mode_half=mh, mode_limit_value=limit,
        reduction=reduction, pad_az=pad_az, pad_delay=pad_delay,
        exclusion_cells=excl, snr_db=snr_db, seed=seed, nyquist=audit)


def resolve_ingested(array: SensorArray, grid: FrequencyGrid, proc_cfg: dict,
                     name: str = "ingest", allow_undersampled: bool = False,
                     force_modes: bool = False) -> ResolvedScenario:
    """Resolve processing for an externally measured channel (no scene)."""
    proc = _resolve_processing(proc_cfg, array, grid,
                               allow_undersampled=allow_undersampled,
                               force_modes=force_modes)
    resolved_cfg = {
        "name": name,
        "grid": {"f_start_hz": grid.f_start_hz, "bandwidth_hz": grid.bandwidth_hz,
                 "samples": grid.samples},
        "processing": {"model": proc["model"], "design": proc["design"],
                       "modes": 2 * proc["mode_half"] + 1,
                       "mode_threshold": proc["mode_threshold"],
                       "reduction": proc["reduction"], "pad_az": proc["pad_az"],
                       "pad_delay": proc["pad_delay"],
                       "exclusion_cells": list(proc["exclusion_cells"]),
                       "exclusion_deg": proc["exclusion_deg"],
                       "snr_db": proc["snr_db"]},
    }
    return ResolvedScenario(
        name=name, config=resolved_cfg, array=array, grid=grid, scene=[],
        model=proc["model"], design=proc["design"], mode_half=proc["mode_half"],
        mode_limit_value=proc["mode_limit"], reduction=proc["reduction"],
        pad_az=proc["pad_az"], pad_delay=proc["pad_delay"],
        exclusion_cells=proc["exclusion_cells"], snr_db=proc["snr_db"],
        seed=0, nyquist=proc["nyquist"])


@dataclass
class RunResult:
    scenario: ResolvedScenario
    channel: ChannelMatrix
    spectrum: JointSpectrum
    report: PeakReport
    anchored: PeakReport
    runtime_s: float
    bank_unique_evals: int
    bank_dense_weights: int

    def manifest(self) -> dict:
        sc = self.scenario
        return {
            "kind": "elliptic-doa-manifest",
            "version": __version__,
            "config": sc.config,
            "resolved": {
                "mode_half": sc.mode_half,
                "modes_total": 2 * sc.mode_half + 1,
                "mode_limit": sc.mode_limit_value,
                "reduction": sc.reduction,
                "ring_seeds": [getattr(sc.array.ring_spec(i), "seed", None)
                               for i in range(sc.array.ring_count)],
                "nyquist_max_spacing_m": sc.nyquist.max_spacing_m,
                "nyquist_pass": sc.nyquist.passed,
                "bank_unique_evals": self.bank_unique_evals,
                "bank_dense_weights": self.bank_dense_weights,
                "runtime_s": self.runtime_s,
            },
        }


def run_channel(scenario: ResolvedScenario, ch: ChannelMatrix) -> RunResult:
    """Beamform + transform + peak extraction for an existing channel."""
    t0 = time.perf_counter()
    bank = build_bank(ch.array, ch.grid, design=scenario.design,
                      mode_half=scenario.mode_half, reduction=scenario.reduction)
    modes = expand_array(ch, bank)
    spec = joint_spectrum(modes, pad_az=scenario.pad_az, pad_delay=scenario.pad_delay)
    report = find_peaks(spec, exclusion_cells=scenario.exclusion_cells)
    if scenario.scene:
        first = scenario.scene[0]
        anchored = find_peaks(spec, expected=(first.azimuth_deg, first.delay_s),
                              exclusion_cells=scenario.exclusion_cells)
    else:
        anchored = report
    return RunResult(scenario=scenario, channel=ch, spectrum=spec, report=report,
                     anchored=anchored, runtime_s=time.perf_counter() - t0,
                     bank_unique_evals=bank.unique_eval_count,
                     bank_dense_weights=bank.dense_weight_count)


def run_scenario(scenario: ResolvedScenario) -> RunResult:
    """Full pipeline: synthesize, add noise, beamform, transform, report."""
    t0 = time.perf_counter()
    ch = superpose(scenario.scene, scenario.array, scenario.grid, model=scenario.model)
    if scenario.snr_db is not None:
        ch = add_awgn(ch, scenario.snr_db, seed=scenario.seed)
    result = run_channel(scenario, ch)
    result.runtime_s = time.perf_counter() - t0
    return result


def write_outputs(result: RunResult, out_dir) -> list:
    """Write manifest, peak report, spectrum CSV and heatmap; return paths."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(result.manifest(), indent=2, sort_keys=True) + "\n")
    paths.append(manifest_path)
    peaks_path = out / "peaks.txt"
    peaks_path.write_text(result.report.to_text() + "\n")
    paths.append(peaks_path)
    csv_path = out / "spectrum.csv"
    result.spectrum.export_csv(csv_path)
    paths.append(csv_path)
    pgm_path = out / "heatmap.pgm"
    result.spectrum.export_pgm(pgm_path)
    paths.append(pgm_path)
    return paths


def sweep_rows(cfg: dict, allow_undersampled: bool = False,
               force_modes: bool = False):
    """Run the scenario once per sweep grid point (cartesian, row-major).

    Yields dict rows: the axis values, the peak anchored near the true wave
    (phi_deg, tau_s, delta_db), the unanchored global peak, and the resolved
    mode count.  Determinism comes from per-point seeds in the config, so
    evaluation order carries no state.
    """
    sweep = cfg.get("sweep")
    if not sweep or not sweep.get("axes"):
        raise ConfigError("sweep requires a 'sweep' section with axes")
    axes = []
    for ax in sweep["axes"]:
        # an axis is one path with scalar values, or several paths advancing
        # in lockstep ("paths" + rows of values), e.g. eccentricity paired
        # with its mode count
        if "paths" in ax:
            paths = list(ax["paths"])
            values = [list(v) for v in ax.get("values", [])]
            if not values or any(len(v) != len(paths) for v in values):
                raise ConfigError("zipped sweep axis needs one value per path")
        elif "path" in ax:
            paths = [ax["path"]]
            values = [[v] for v in ax.get("values", [])]
            if not values:
                raise ConfigError("sweep axis needs non-empty values")
        else:
            raise ConfigError("each sweep axis needs a path (or paths)")
        axes.append((paths, values))

    def recurse(i, assignment):
        if i == len(axes):
            point = copy.deepcopy(cfg)
            point.pop("sweep", None)
            for path, value in assignment:
                set_path(point, path, value)
            scenario = resolve(point, allow_undersampled=allow_undersampled,
                               force_modes=force_modes)
            result = run_scenario(scenario)
            row = {path: value for path, value in assignment}
            row.update({
                "phi_deg": result.anchored.main.phi_deg,
                "tau_s": result.anchored.main.tau_s,
                "delta_db": result.anchored.delta_db,
                "global_phi_deg": result.report.main.phi_deg,
                "global_tau_s": result.report.main.tau_s,
                "modes_total": 2 * scenario.mode_half + 1,
                "runtime_s": result.runtime_s,
            })
            yield row
            return
        paths, values = axes[i]
        for row_vals in values:
            yield from recurse(i + 1, assignment + list(zip(paths, row_vals)))

    yield from recurse(0, [])


def write_sweep_csv(rows, path) -> int:
    """Write sweep rows to CSV; returns the row count."""
    rows = list(rows)
    if not rows:
        raise ConfigError("sweep produced no rows")
    cols = list(rows[0].keys())

    def fmt(v):
        if isinstance(v, float):
            return f"{v:.17g}"
        return str(v)

    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(fmt(row[c]) for c in cols) + "\n")
    return len(rows)
