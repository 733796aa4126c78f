"""Sensor layout construction for elliptical, circular and concentric arrays.

Sensors are placed at uniform steps of the *elliptic* angular coordinate
(eta_p = 2*pi*p/P), rotated rigidly by the ring's rotation angle, and
optionally perturbed by an isotropic bivariate Gaussian (sigma/sqrt(2) per
axis).  Uniform spacing in eta is not uniform in the polar azimuth once the
ring is eccentric; all downstream math therefore works from the realized
Cartesian coordinates, from which radius and polar azimuth are always
recomputed rather than stored.

Angles cross the public API in degrees and live internally in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import ConfigError, DomainError, ValidationError


@dataclass(frozen=True)
class EllipseSpec:
    """Placement recipe for one elliptical ring of sensors."""

    semi_major_m: float
    eccentricity: float = 0.0
    rotation_deg: float = 0.0
    sensors: int = 720
    sigma_m: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.semi_major_m > 0.0 and math.isfinite(self.semi_major_m)):
            raise DomainError(f"semi_major_m must be positive, got {self.semi_major_m}")
        if not (0.0 <= self.eccentricity < 1.0):
            raise DomainError(f"eccentricity must be in [0, 1), got {self.eccentricity}")
        if not (0.0 <= self.rotation_deg < 360.0):
            raise DomainError(f"rotation_deg must be in [0, 360), got {self.rotation_deg}")
        if self.sensors < 4:
            raise DomainError(f"need at least 4 sensors, got {self.sensors}")
        if self.sigma_m < 0.0:
            raise DomainError(f"sigma_m must be non-negative, got {self.sigma_m}")
        if self.seed < 0:
            raise DomainError(f"seed must be unsigned, got {self.seed}")

    @property
    def semi_minor_m(self) -> float:
        return self.semi_major_m * math.sqrt(1.0 - self.eccentricity**2)


@dataclass(frozen=True)
class Sensor:
    """One realized sensor position; polar descriptors derive from (x, y)."""

    index: int
    x_m: float
    y_m: float
    ring: int = 0

    @property
    def radius_m(self) -> float:
        return math.hypot(self.x_m, self.y_m)

    @property
    def azimuth_rad(self) -> float:
        return math.atan2(self.y_m, self.x_m)


def build_ellipse(spec: EllipseSpec, ring_index: int = 0) -> list[Sensor]:
    """Realize one ring of sensors from its spec.

    Position noise draws from a counter-based Philox stream keyed by
    (spec.seed, ring_index), so rebuilding with the same seed is
    bit-reproducible and rings of a concentric array get independent streams.
    """
    a = spec.semi_major_m
    b = spec.semi_minor_m
    alpha = math.radians(spec.rotation_deg)
    p = np.arange(spec.sensors)
    eta = 2.0 * np.pi * p / spec.sensors
    ca, sa = math.cos(alpha), math.sin(alpha)
    x = a * np.cos(eta) * ca - b * np.sin(eta) * sa
    y = a * np.cos(eta) * sa + b * np.sin(eta) * ca
    if spec.sigma_m > 0.0:
        gen = np.random.Generator(
            np.random.Philox(np.random.SeedSequence([int(spec.seed), int(ring_index)]))
        )
        noise = gen.normal(0.0, spec.sigma_m / math.sqrt(2.0), size=(spec.sensors, 2))
        x = x + noise[:, 0]
        y = y + noise[:, 1]
    return [Sensor(index=int(i), x_m=float(x[i]), y_m=float(y[i]), ring=ring_index)
            for i in range(spec.sensors)]


def rotate_sensors(sensors: Sequence[Sensor], alpha_deg: float) -> list[Sensor]:
    """Rigid counterclockwise rotation by alpha_deg about the array center.

    Radii are preserved (to rounding); matches building the ring with the
    rotation folded into its parametrization.
    """
    alpha = math.radians(alpha_deg)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return [Sensor(index=s.index, ring=s.ring,
                   x_m=s.x_m * ca - s.y_m * sa,
                   y_m=s.x_m * sa + s.y_m * ca)
            for s in sensors]


def mirror_rotate_sensors(sensors: Sequence[Sensor], alpha_deg: float) -> list[Sensor]:
    """The substitution x -> x cos a + y sin a, y -> x sin a - y cos a.

    This is an *improper* rotation (determinant -1): a reflection across the
    x-axis followed by a counterclockwise rotation by alpha_deg.  It still
    preserves radii, but alpha_deg = 0 negates y rather than acting as the
    identity.  Kept as a distinct operation so formulations written this way
    can be reproduced literally; use rotate_sensors for the proper rotation.
    """
    alpha = math.radians(alpha_deg)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return [Sensor(index=s.index, ring=s.ring,
                   x_m=s.x_m * ca + s.y_m * sa,
                   y_m=s.x_m * sa - s.y_m * ca)
            for s in sensors]


@dataclass
class SensorArray:
    """One or more concentric rings sharing the origin as their center."""

    rings: list[tuple[Optional[EllipseSpec], list[Sensor]]]
    provenance: str = "built"
    _xy_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ring_count(self) -> int:
        return len(self.rings)

    @property
    def total_sensors(self) -> int:
        return sum(len(sensors) for _, sensors in self.rings)

    def ring_sensors(self, ring: int) -> list[Sensor]:
        return self.rings[ring][1]

    def ring_spec(self, ring: int) -> Optional[EllipseSpec]:
        return self.rings[ring][0]

    def ring_xy(self, ring: int) -> np.ndarray:
        """(P, 2) Cartesian coordinates of one ring."""
        if ring not in self._xy_cache:
            sensors = self.rings[ring][1]
            self._xy_cache[ring] = np.array([[s.x_m, s.y_m] for s in sensors])
        return self._xy_cache[ring]

    def ring_radii(self, ring: int) -> np.ndarray:
        xy = self.ring_xy(ring)
        return np.hypot(xy[:, 0], xy[:, 1])

    def ring_azimuths(self, ring: int) -> np.ndarray:
        xy = self.ring_xy(ring)
        return np.arctan2(xy[:, 1], xy[:, 0])

    @property
    def max_radius_m(self) -> float:
        return max(float(self.ring_radii(i).max()) for i in range(self.ring_count))

    @property
    def min_radius_m(self) -> float:
        return min(float(self.ring_radii(i).min()) for i in range(self.ring_count))

    def to_csv(self, path) -> None:
        """Write `ring,p,x_m,y_m` rows, p being the global sensor index."""
        with open(path, "w") as fh:
            fh.write("ring,p,x_m,y_m\n")
            p = 0
            for ring_idx, (_, sensors) in enumerate(self.rings):
                for s in sensors:
                    fh.write(f"{ring_idx},{p},{s.x_m:.17g},{s.y_m:.17g}\n")
                    p += 1

    @classmethod
    def from_csv(cls, path) -> "SensorArray":
        rows = []
        with open(path) as fh:
            header = fh.readline().strip()
            if header != "ring,p,x_m,y_m":
                raise ConfigError(f"unexpected geometry header: {header!r}")
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 4:
                    raise ConfigError(f"line {lineno}: expected 4 fields, got {len(parts)}")
                try:
                    rows.append((int(parts[0]), int(parts[1]),
                                 float(parts[2]), float(parts[3])))
                except ValueError as exc:
                    raise ConfigError(f"line {lineno}: {exc}") from exc
        if not rows:
            raise ConfigError("geometry file contains no sensors")
        ps = sorted(r[1] for r in rows)
        if ps != list(range(len(rows))):
            raise ValidationError("global sensor indices must cover 0..N-1 exactly")
        rows.sort(key=lambda r: r[1])
        ring_ids = sorted({r[0] for r in rows})
        if ring_ids != list(range(len(ring_ids))):
            raise ValidationError("ring indices must cover 0..R-1 exactly")
        rings: list[tuple[Optional[EllipseSpec], list[Sensor]]] = []
        for ring_idx in ring_ids:
            ring_rows = [r for r in rows if r[0] == ring_idx]
            sensors = [Sensor(index=i, x_m=r[2], y_m=r[3], ring=ring_idx)
                       for i, r in enumerate(ring_rows)]
            rings.append((None, sensors))
        return cls(rings=rings, provenance="ingested")


def build_concentric(specs: Sequence[EllipseSpec]) -> SensorArray:
    """Realize several rings about a common center, in list order."""
    if not specs:
        raise ConfigError("need at least one ellipse spec")
    rings = [(spec, build_ellipse(spec, ring_index=i)) for i, spec in enumerate(specs)]
    return SensorArray(rings=rings, provenance="built")


@dataclass(frozen=True)
class NyquistReport:
    """Spatial sampling audit against the half-wavelength criterion."""

    f_max_hz: float
    wavelength_m: float
    limit_m: float
    per_ring: tuple  # (ring, max_spacing_m, max_spacing_wavelengths)
    passed: bool

    @property
    def max_spacing_m(self) -> float:
        return max(r[1] for r in self.per_ring)

    def to_text(self) -> str:
        lines = [f"nyquist audit at f_max = {self.f_max_hz:.6g} Hz "
                 f"(lambda = {self.wavelength_m:.6g} m, limit = {self.limit_m:.6g} m)"]
        for ring, spacing, wl in self.per_ring:
            verdict = "ok" if spacing < self.limit_m else "UNDERSAMPLED"
            lines.append(f"  ring {ring}: max adjacent spacing {spacing:.6g} m "
                         f"= {wl:.4f} lambda  [{verdict}]")
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def nyquist_audit(array: SensorArray, f_max_hz: float) -> NyquistReport:
    """Largest adjacent (cyclically consecutive) sensor spacing per ring.

    Passes iff every spacing is below c / (2 f_max).
    """
    if not (f_max_hz > 0.0 and math.isfinite(f_max_hz)):
        raise DomainError(f"f_max_hz must be positive, got {f_max_hz}")
    lam = SPEED_OF_LIGHT / f_max_hz
    limit = lam / 2.0
    per_ring = []
    for i in range(array.ring_count):
        xy = array.ring_xy(i)
        d = np.hypot(*(xy - np.roll(xy, -1, axis=0)).T)
        mx = float(d.max())
        per_ring.append((i, mx, mx / lam))
    passed = all(r[1] < limit for r in per_ring)
    return NyquistReport(f_max_hz=float(f_max_hz), wavelength_m=lam, limit_m=limit,
                         per_ring=tuple(per_ring), passed=passed)
