"""Synthetic wideband multipath channels and measured-channel ingestion.

Phase convention: a path with delay tau contributes exp(+j 2 pi f tau) at the
array center, and sensor responses add a positive-exponent geometric phase on
top.  The joint-spectrum transform uses the matching opposite kernel signs.

Frequency grids are half-open: K samples at f_k = f_start + k * B / K, so the
sample step is exactly B/K, the delay resolution of a K-point transform is
exactly 1/B, and the maximum observable delay is (K-1)/B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import (
    ChannelDimensionError,
    ConfigError,
    DomainError,
    NonFiniteDataError,
    NonUniformGridError,
)
from .geometry import SensorArray


@dataclass(frozen=True)
class IncidentWave:
    """One propagation path reaching the array.

    delay_s and distance_m are independent inputs: the delay drives the
    center response phase, the distance only the spherical geometry terms.
    Callers wanting physical consistency should set delay_s = distance_m / c,
    but this is not enforced.  distance_m = None means "far field" and is
    only valid with the plane-wave model.
    """

    azimuth_deg: float
    delay_s: float
    elevation_deg: float = 90.0
    amplitude: float = 1.0
    distance_m: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.azimuth_deg):
            raise DomainError(f"azimuth_deg must be finite, got {self.azimuth_deg}")
        if not (self.delay_s >= 0.0 and math.isfinite(self.delay_s)):
            raise DomainError(f"delay_s must be non-negative, got {self.delay_s}")
        if not (0.0 <= self.elevation_deg <= 180.0):
            raise DomainError(f"elevation_deg must be in [0, 180], got {self.elevation_deg}")
        if not (self.amplitude > 0.0 and math.isfinite(self.amplitude)):
            raise DomainError(f"amplitude must be positive, got {self.amplitude}")
        if self.distance_m is not None and not (
            self.distance_m > 0.0 and math.isfinite(self.distance_m)
        ):
            raise DomainError(f"distance_m must be positive and finite, got {self.distance_m}")


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency sampling of one measurement band."""

    f_start_hz: float
    bandwidth_hz: float
    samples: int

    def __post_init__(self):
        if not (self.f_start_hz > 0.0 and math.isfinite(self.f_start_hz)):
            raise DomainError(f"f_start_hz must be positive, got {self.f_start_hz}")
        if not (self.bandwidth_hz > 0.0 and math.isfinite(self.bandwidth_hz)):
            raise DomainError(f"bandwidth_hz must be positive, got {self.bandwidth_hz}")
        if self.samples < 2:
            raise DomainError(f"need at least 2 samples, got {self.samples}")

    @property
    def step_hz(self) -> float:
        return self.bandwidth_hz / self.samples

    @property
    def frequencies(self) -> np.ndarray:
        k = np.arange(self.samples)
        return self.f_start_hz + k * (self.bandwidth_hz / self.samples)

    @property
    def f_max_hz(self) -> float:
        return float(self.frequencies[-1])

    @property
    def f_center_hz(self) -> float:
        return self.f_start_hz + 0.5 * self.bandwidth_hz

    @property
    def delay_resolution_s(self) -> float:
        return 1.0 / self.bandwidth_hz

    @property
    def max_delay_s(self) -> float:
        return (self.samples - 1) / self.bandwidth_hz


@dataclass
class ChannelMatrix:
    """Complex frequency response per sensor: values[p, k], p in global order."""

    array: SensorArray
    grid: FrequencyGrid
    values: np.ndarray
    provenance: str

    def __post_init__(self):
        expected = (self.array.total_sensors, self.grid.samples)
        if self.values.shape != expected:
            raise ChannelDimensionError(
                f"channel shape {self.values.shape} != sensors x samples {expected}")
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteDataError("channel contains non-finite entries")

    def ring_rows(self, ring: int) -> np.ndarray:
        """View of the rows belonging to one ring."""
        start = sum(len(self.array.ring_sensors(i)) for i in range(ring))
        stop = start + len(self.array.ring_sensors(ring))
        return self.values[start:stop]


def wave_response_center(wave: IncidentWave, grid: FrequencyGrid) -> np.ndarray:
    """Center-of-array response: amplitude * exp(+j 2 pi f tau) over the grid."""
    return wave.amplitude * np.exp(2j * np.pi * grid.frequencies * wave.delay_s)


def synthesize_planewave(array: SensorArray, wave: IncidentWave,
                         grid: FrequencyGrid) -> ChannelMatrix:
    """Far-field model: unit path-loss ratio, linearized geometric phase.

    H[p, k] = H_center(f_k) * exp(+j 2 pi f_k r_p sin(theta) cos(phi - phi_p) / c)
    """
    h0 = wave_response_center(wave, grid)
    freqs = grid.frequencies
    theta = math.radians(wave.elevation_deg)
    phi = math.radians(wave.azimuth_deg)
    blocks = []
    for ring in range(array.ring_count):
        r = array.ring_radii(ring)
        phip = array.ring_azimuths(ring)
        path = r * math.sin(theta) * np.cos(phi - phip)  # (P,)
        phase = 2j * np.pi * np.outer(path, freqs) / SPEED_OF_LIGHT
        blocks.append(np.exp(phase) * h0)
    return ChannelMatrix(array=array, grid=grid, values=np.vstack(blocks),
                         provenance="synthetic-planewave")


def synthesize_spherical(array: SensorArray, wave: IncidentWave,
                         grid: FrequencyGrid) -> ChannelMatrix:
    """Exact spherical-wavefront model with free-space path-loss ratio.

    Uses the exact per-sensor distance
    d_p = sqrt(d^2 + r_p^2 - 2 d r_p sin(theta) cos(phi - phi_p)), no Taylor
    truncation: H[p, k] = (d / d_p) H_center(f_k) exp(+j 2 pi f_k (d - d_p)/c).
    """
    if wave.distance_m is None:
        raise DomainError("spherical model needs a finite source distance")
    d = wave.distance_m
    if d <= array.max_radius_m:
        raise DomainError(
            f"source distance {d} m must exceed the array radius {array.max_radius_m} m")
    h0 = wave_response_center(wave, grid)
    freqs = grid.frequencies
    theta = math.radians(wave.elevation_deg)
    phi = math.radians(wave.azimuth_deg)
    blocks = []
    for ring in range(array.ring_count):
        r = array.ring_radii(ring)
        phip = array.ring_azimuths(ring)
        d_p = np.sqrt(d * d + r * r - 2.0 * d * r * math.sin(theta) * np.cos(phi - phip))
        delta = d - d_p
        phase = 2j * np.pi * np.outer(delta, freqs) / SPEED_OF_LIGHT
        blocks.append((d / d_p)[:, None] * np.exp(phase) * h0)
    return ChannelMatrix(array=array, grid=grid, values=np.vstack(blocks),
                         provenance="synthetic-spherical")


_MODELS = {
    "planewave": synthesize_planewave,
    "spherical": synthesize_spherical,
}


def superpose(scene: Sequence[IncidentWave], array: SensorArray,
              grid: FrequencyGrid, model: str = "planewave") -> ChannelMatrix:
    """Entrywise sum of per-wave responses, in scene order (deterministic)."""
    if not scene:
        raise ConfigError("scene must contain at least one wave")
    try:
        synth = _MODELS[model]
    except KeyError:
        raise ConfigError(f"unknown propagation model {model!r}") from None
    total = None
    for wave in scene:
        part = synth(array, wave, grid)
        total = part.values if total is None else total + part.values
    return ChannelMatrix(array=array, grid=grid, values=total,
                         provenance=f"synthetic-{model}")


def add_awgn(channel: ChannelMatrix, snr_db: Optional[float], seed: int = 0) -> ChannelMatrix:
    """Add circularly-symmetric complex Gaussian noise at a target mean SNR.

    The per-entry noise variance is mean(|H|^2) / 10^(snr_db/10).  snr_db of
    None or +inf returns an unchanged copy.  Deterministic for a given seed.
    """
    if snr_db is None or snr_db == math.inf:
        return replace(channel, values=channel.values.copy())
    if not math.isfinite(snr_db):
        raise DomainError(f"snr_db must be finite or +inf, got {snr_db}")
    mean_power = float(np.mean(np.abs(channel.values) ** 2))
    noise_var = mean_power / (10.0 ** (snr_db / 10.0))
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed)])))
    sigma = math.sqrt(noise_var / 2.0)
    noise = gen.normal(0.0, sigma, size=channel.values.shape + (2,))
    return replace(channel, values=channel.values + noise[..., 0] + 1j * noise[..., 1])


def export_channel(channel: ChannelMatrix, path) -> None:
    """Write `p,f_hz,re,im` rows sorted by (p, f), full double precision."""
    freqs = channel.grid.frequencies
    with open(path, "w") as fh:
        fh.write("p,f_hz,re,im\n")
        for p in range(channel.values.shape[0]):
            row = channel.values[p]
            for k in range(channel.values.shape[1]):
                fh.write(f"{p},{freqs[k]:.17g},{row[k].real:.17g},{row[k].imag:.17g}\n")


def ingest_channel(path, array: SensorArray) -> ChannelMatrix:
    """Parse a measured (or exported) channel file against a declared geometry.

    Validates sensor coverage, per-sensor sample counts, a shared frequency
    axis, grid uniformity within 1e-6 relative, and finiteness.  The grid is
    inferred with bandwidth = K * step (half-open band convention).
    """
    per_sensor: dict[int, list[tuple[float, complex]]] = {}
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "p,f_hz,re,im":
            raise ConfigError(f"unexpected channel header: {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ConfigError(f"line {lineno}: expected 4 fields, got {len(parts)}")
            try:
                p = int(parts[0])
                f = float(parts[1])
                v = complex(float(parts[2]), float(parts[3]))
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from exc
            per_sensor.setdefault(p, []).append((f, v))

    n = array.total_sensors
    if sorted(per_sensor) != list(range(n)):
        raise ChannelDimensionError(
            f"sensor indices {sorted(per_sensor)[:5]}... do not cover 0..{n - 1}")
    counts = {len(rows) for rows in per_sensor.values()}
    if len(counts) != 1:
        raise ChannelDimensionError(f"per-sensor sample counts differ: {sorted(counts)}")
    k = counts.pop()
    if k < 2:
        raise ChannelDimensionError("need at least 2 frequency samples per sensor")

    f_axis = np.array([f for f, _ in per_sensor[0]])
    for p in range(1, n):
        fp = np.array([f for f, _ in per_sensor[p]])
        if not np.array_equal(fp, f_axis):
            raise NonUniformGridError(f"sensor {p} has a different frequency axis")
    steps = np.diff(f_axis)
    step = float(steps.mean())
    if step <= 0.0 or np.any(np.abs(steps - step) > 1e-6 * step):
        raise NonUniformGridError("frequency axis is not uniform within 1e-6 relative")

    values = np.array([[v for _, v in per_sensor[p]] for p in range(n)])
    if not np.all(np.isfinite(values)):
        raise NonFiniteDataError("channel file contains non-finite entries")
    grid = FrequencyGrid(f_start_hz=float(f_axis[0]), bandwidth_hz=step * k, samples=k)
    return ChannelMatrix(array=array, grid=grid, values=values, provenance="ingested")
