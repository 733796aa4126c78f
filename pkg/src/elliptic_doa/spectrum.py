"""Joint azimuth-delay maps, peak extraction and the artifact-ratio metric.

The mode-frequency matrix transforms with opposite-sign kernels to the
synthesis convention:

    S(phi_q, tau_k) = | sum_m sum_k' H[m, k'] e^{-j m phi_q} e^{-j 2 pi k' df tau_k} |

evaluated by FFTs with the mode axis laid out so m = 0 maps to bin 0 and
negative modes wrap.  Azimuth bins step 360/(M * pad_az) degrees; delay bins
step 1/(B * pad_delay) seconds (the frequency kernel is referenced to the
band start, so delay bins land on k/B regardless of the carrier; the
constant start-frequency phase ramp is invisible to the magnitude).

Quality is summarized by delta_db = 20 log10(main peak / largest artifact),
an artifact being a strict 8-neighbor local maximum outside a small
exclusion window around the main peak.  The window is measured in
*resolution cells* (360/M in azimuth, 1/B in delay) so that zero padding
does not shrink it into the peak's own main lobe.  Both axes carry the
sidelobe skirt of a rectangular truncation window (modes in azimuth,
samples in delay): sidelobe k sits (2k+1)/2 cells out at ~2/((2k+1) pi)
relative amplitude.  Those skirts are part of the peak's own response
envelope, not geometry-induced artifacts, so the default window of +-5
cells per axis excludes them down to -24.7 dB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .beamform import ModeMatrix
from .channel import FrequencyGrid
from .errors import DegenerateInputError, DomainError

DEFAULT_EXCLUSION_CELLS = (5, 5)


def joint_spectrum(modes: ModeMatrix, pad_az: int = 1, pad_delay: int = 1) -> "JointSpectrum":
    """2-D transform of the mode matrix into the azimuth-delay magnitude map."""
    if pad_az < 1 or pad_delay < 1:
        raise DomainError("pad factors must be >= 1")
    m_count = 2 * modes.mode_half + 1
    n_az = m_count * pad_az
    n_delay = modes.grid.samples * pad_delay
    buf = np.zeros((n_az, modes.grid.samples), dtype=complex)
    buf[modes.modes % n_az] = modes.values
    spec = np.fft.fft(np.fft.fft(buf, axis=0), n=n_delay, axis=1)
    return JointSpectrum(magnitudes=np.abs(spec), mode_half=modes.mode_half,
                         pad_az=pad_az, pad_delay=pad_delay, grid=modes.grid)


@dataclass
class JointSpectrum:
    """Magnitude map over azimuth bins (rows) and delay bins (columns)."""

    magnitudes: np.ndarray
    mode_half: int
    pad_az: int
    pad_delay: int
    grid: FrequencyGrid

    @property
    def azimuth_bins_deg(self) -> np.ndarray:
        n = self.magnitudes.shape[0]
        return np.arange(n) * 360.0 / n

    @property
    def delay_bins_s(self) -> np.ndarray:
        n = self.magnitudes.shape[1]
        return np.arange(n) / (self.pad_delay * self.grid.bandwidth_hz)

    def azimuth_of_bin(self, q: int) -> float:
        # multiply first so exact divisors yield exact degrees
        return (q * 360.0) / self.magnitudes.shape[0]

    def delay_of_bin(self, k: int) -> float:
        return k / (self.pad_delay * self.grid.bandwidth_hz)

    def export_csv(self, path) -> None:
        """Write `phi_deg,tau_s,mag_db` rows, dB relative to the global peak."""
        peak = self.magnitudes.max()
        if peak <= 0.0:
            raise DegenerateInputError("cannot export an all-zero spectrum")
        db = 20.0 * np.log10(np.maximum(self.magnitudes, peak * 1e-20) / peak)
        taus = self.delay_bins_s
        with open(path, "w") as fh:
            fh.write("phi_deg,tau_s,mag_db\n")
            for q in range(self.magnitudes.shape[0]):
                phi = self.azimuth_of_bin(q)
                row = db[q]
                for k in range(self.magnitudes.shape[1]):
                    fh.write(f"{phi:.10g},{taus[k]:.17g},{row[k]:.10g}\n")

    def export_pgm(self, path, floor_db: float = -35.0) -> None:
        """8-bit binary PGM heatmap.

        Rows are azimuth bins ascending, columns delay bins ascending; the
        dynamic range clamps at ``floor_db`` (default -35 dB) below the peak,
        with 255 at the peak and 0 at or below the floor.
        """
        peak = self.magnitudes.max()
        if peak <= 0.0:
            raise DegenerateInputError("cannot export an all-zero spectrum")
        db = 20.0 * np.log10(np.maximum(self.magnitudes, peak * 1e-20) / peak)
        img = np.clip(255.0 * (1.0 - db / floor_db), 0.0, 255.0).round().astype(np.uint8)
        n_az, n_d = img.shape
        header = (f"P5\n# rows: azimuth bins 0..{n_az - 1}, step {360.0 / n_az:.10g} deg\n"
                  f"# cols: delay bins 0..{n_d - 1}, "
                  f"step {1.0 / (self.pad_delay * self.grid.bandwidth_hz):.10g} s\n"
                  f"{n_d} {n_az}\n255\n")
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            fh.write(img.tobytes())


@dataclass(frozen=True)
class SpectrumPeak:
    phi_deg: float
    tau_s: float
    magnitude: float


@dataclass(frozen=True)
class PeakReport:
    """Main peak, strongest artifact and their ratio for one spectrum."""

    main: SpectrumPeak
    artifact: Optional[SpectrumPeak]
    delta_db: float
    maxima: tuple
    exclusion_cells: tuple

    def to_text(self) -> str:
        lines = [f"main: phi_deg={self.main.phi_deg:.10g} tau_s={self.main.tau_s:.17g} "
                 f"mag={self.main.magnitude:.10g}"]
        if self.artifact is None:
            lines.append("artifact: none")
        else:
            lines.append(f"artifact: phi_deg={self.artifact.phi_deg:.10g} "
                         f"tau_s={self.artifact.tau_s:.17g} mag={self.artifact.magnitude:.10g}")
        lines.append(f"delta_db={self.delta_db:.10g}")
        lines.append(f"exclusion_cells={self.exclusion_cells[0]},{self.exclusion_cells[1]}")
        for i, pk in enumerate(self.maxima):
            lines.append(f"rank {i}: phi_deg={pk.phi_deg:.10g} tau_s={pk.tau_s:.17g} "
                         f"mag={pk.magnitude:.10g}")
        return "\n".join(lines)


def _local_maxima_mask(s: np.ndarray) -> np.ndarray:
    """Strictly-greater-than-8-neighbors mask; azimuth cyclic, delay clamped."""
    n_az, n_d = s.shape
    padded = np.full((n_az, n_d + 2), -1.0)
    padded[:, 1:-1] = s
    mask = np.ones_like(s, dtype=bool)
    for dq in (-1, 0, 1):
        rolled = np.roll(padded, dq, axis=0)
        for dk in (-1, 0, 1):
            if dq == 0 and dk == 0:
                continue
            mask &= s > rolled[:, 1 + dk: 1 + dk + n_d]
    return mask


def find_peaks(spectrum: JointSpectrum,
               expected: Optional[tuple] = None,
               exclusion_cells: tuple = DEFAULT_EXCLUSION_CELLS,
               top_n: int = 10) -> PeakReport:
    """Locate the main peak and the largest artifact.

    With ``expected`` = (phi_deg, tau_s), the main peak is the maximum within
    the exclusion window around the expected bin (so a wrong global maximum
    shows up as delta_db < 0); otherwise it is the global maximum.  Ties
    break toward the lowest (azimuth bin, delay bin) pair.
    """
    s = spectrum.magnitudes
    if not np.any(s > 0.0):
        raise DegenerateInputError("spectrum is identically zero")
    n_az, n_d = s.shape
    excl_q = int(exclusion_cells[0]) * spectrum.pad_az
    excl_k = int(exclusion_cells[1]) * spectrum.pad_delay

    def window_mask(q0: int, k0: int) -> np.ndarray:
        dq = np.abs(np.arange(n_az) - q0)
        dq = np.minimum(dq, n_az - dq)
        dk = np.abs(np.arange(n_d) - k0)
        return (dq[:, None] <= excl_q) & (dk[None, :] <= excl_k)

    if expected is not None:
        phi_e, tau_e = expected
        q_e = int(round(phi_e / 360.0 * n_az)) % n_az
        k_e = min(max(int(round(tau_e * spectrum.pad_delay * spectrum.grid.bandwidth_hz)), 0),
                  n_d - 1)
        region = window_mask(q_e, k_e)
        flat = np.where(region, s, -1.0)
        idx = int(flat.argmax())
    else:
        idx = int(s.argmax())
    q_main, k_main = np.unravel_index(idx, s.shape)
    main = SpectrumPeak(phi_deg=spectrum.azimuth_of_bin(int(q_main)),
                        tau_s=spectrum.delay_of_bin(int(k_main)),
                        magnitude=float(s[q_main, k_main]))

    maxima_mask = _local_maxima_mask(s)
    exclusion = window_mask(int(q_main), int(k_main))
    candidates = maxima_mask & ~exclusion
    if candidates.any():
        flat = np.where(candidates, s, -1.0)
        a_idx = int(flat.argmax())
        qa, ka = np.unravel_index(a_idx, s.shape)
        artifact = SpectrumPeak(phi_deg=spectrum.azimuth_of_bin(int(qa)),
                                tau_s=spectrum.delay_of_bin(int(ka)),
                                magnitude=float(s[qa, ka]))
        delta_db = math.inf if artifact.magnitude == 0.0 else (
            20.0 * math.log10(main.magnitude / artifact.magnitude))
    else:
        artifact = None
        delta_db = math.inf

    order = np.flatnonzero(maxima_mask.ravel())
    mags = s.ravel()[order]
    ranked = order[np.lexsort((order, -mags))][:top_n]
    maxima = tuple(
        SpectrumPeak(phi_deg=spectrum.azimuth_of_bin(int(i // n_d)),
                     tau_s=spectrum.delay_of_bin(int(i % n_d)),
                     magnitude=float(s.ravel()[i]))
        for i in ranked)
    return PeakReport(main=main, artifact=artifact, delta_db=float(delta_db),
                      maxima=maxima, exclusion_cells=(int(exclusion_cells[0]),
                                                      int(exclusion_cells[1])))
