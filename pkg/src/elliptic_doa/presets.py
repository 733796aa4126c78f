"""Shipped scenario presets.

Three frequency bands recur: 28-30 GHz (single rings, a = 0.5 m, K = 100),
39.5-43.5 GHz (nine-ring layouts, a = 0.345 m, K = 200, 250 modes) and
58-62 GHz (a = 0.242 m rings, K = 200).  Path amplitudes are all 1.0: the
artifact ratio is scale-free, so only relative levels would matter and none
are specified for these scenes.

Mode counts are pinned per scenario (rationales inline); where a layout's
stable range depends on its random realization, "auto" adapts it instead.
The fig13 two-ray preset uses 255 modes rather than the conventional 250 so
that the 330 and 300 degree arrivals land exactly on the padded azimuth bin
grid (1020 bins); 250 would put them between bins with no other effect.
"""

from __future__ import annotations

import copy

from .errors import ConfigError

_BAND_N257 = {"f_start_hz": 28e9, "bandwidth_hz": 2e9, "samples": 100}
_BAND_N259 = {"f_start_hz": 39.5e9, "bandwidth_hz": 4e9, "samples": 200}
_BAND_60G = {"f_start_hz": 58e9, "bandwidth_hz": 4e9, "samples": 200}

_SWEEP_AZ = [float(v) for v in range(-90, 95, 5)]
_SWEEP_EL = [float(v) for v in range(30, 95, 5)]


def _ring(a, e=0.0, alpha=0.0, sensors=720):
    return {"semi_major_m": a, "eccentricity": e, "rotation_deg": alpha,
            "sensors": sensors, "sigma_m": 0.0}


def _nine_ring_cea(a=0.345):
    rings = [_ring(a, e=0.9, alpha=22.5 * k) for k in range(8)]
    rings.append(_ring(a, e=0.0))
    return rings


def _nine_ring_ucca(inner=0.15, outer=0.345):
    step = (outer - inner) / 8.0
    return [_ring(inner + k * step) for k in range(9)]


def fig3():
    """Single in-plane wave at (90 deg, 30 ns) on a 0.5 m circle.

    501 modes keeps every order below k r at the low band edge, so filter
    gains stay modest and the map tolerates low SNR; the stability limit
    itself (~650 at the default threshold) admits near-evanescent orders
    whose gains amplify noise by up to 1e6.
    """
    return {
        "name": "fig3",
        "seed": 0,
        "array": [_ring(0.5)],
        "grid": dict(_BAND_N257),
        "scene": [{"azimuth_deg": 90.0, "delay_s": 30e-9}],
        "processing": {"modes": 501},
    }


# Eccentricity paired with its mode count.  Nothing pins the counts for
# these sweeps externally, and the high-eccentricity selectivity pattern
# depends on them: past ~0.65 k b(f_min) the growing filter gains on
# near-evanescent modes first erode the broadside region and eventually
# flip the whole map (see mode_limit).  The flattened-ring counts below
# put the validity-window edges at the conventional places (+-50 deg for
# e = 0.95, +-15 deg for e = 0.99); round rings keep the full stable range.
_ECC_MODES_SINGLE = [[0.0, "auto"], [0.7, "auto"], [0.95, 121], [0.99, 97]]
_ECC_MODES_PAIRED = [[0.0, "auto"], [0.7, "auto"], [0.95, 183], [0.99, 97]]


def fig4a():
    """Artifact-ratio sweep over azimuth for four eccentricities, alpha = 0."""
    cfg = fig3()
    cfg["name"] = "fig4a"
    cfg["scene"][0]["azimuth_deg"] = 0.0
    cfg["sweep"] = {"axes": [
        {"paths": ["array.*.eccentricity", "processing.modes"],
         "values": [list(v) for v in _ECC_MODES_SINGLE]},
        {"path": "scene.0.azimuth_deg", "values": _SWEEP_AZ},
    ]}
    return cfg


def fig4b():
    """Same sweep with the ring rotated 90 degrees."""
    cfg = fig4a()
    cfg["name"] = "fig4b"
    cfg["array"][0]["rotation_deg"] = 90.0
    cfg["sweep"]["axes"][1]["values"] = [float(v) for v in range(0, 185, 5)]
    return cfg


def fig4c():
    """Two concentric rings rotated 0 and 90 degrees, swept jointly."""
    cfg = fig4a()
    cfg["name"] = "fig4c"
    cfg["array"] = [_ring(0.5), _ring(0.5, alpha=90.0)]
    cfg["sweep"]["axes"][0]["values"] = [list(v) for v in _ECC_MODES_PAIRED]
    return cfg


def fig5():
    """Elevation sweep at fixed azimuth 0 for three eccentricities."""
    cfg = fig3()
    cfg["name"] = "fig5"
    cfg["scene"][0] = {"azimuth_deg": 0.0, "delay_s": 30e-9, "elevation_deg": 90.0}
    cfg["sweep"] = {"axes": [
        {"paths": ["array.*.eccentricity", "processing.modes"],
         # the circle needs its count pulled below the stability limit here:
         # at low elevation the data occupy modes only up to ~ka sin(theta),
         # and filters beyond that amplify leakage
         "values": [[0.0, 441], [0.7, "auto"], [0.95, 121]]},
        {"path": "scene.0.elevation_deg", "values": _SWEEP_EL},
    ]}
    return cfg


def fig6b():
    """Nine-ring concentric layout (8 rotated ellipses + circle), (45 deg, 20 ns)."""
    return {
        "name": "fig6b",
        "seed": 0,
        "array": _nine_ring_cea(),
        "grid": dict(_BAND_N259),
        "scene": [{"azimuth_deg": 45.0, "delay_s": 20e-9}],
        "processing": {"modes": 250},
    }


def fig6c():
    cfg = fig6b()
    cfg["name"] = "fig6c"
    cfg["scene"] = [{"azimuth_deg": 250.0, "delay_s": 40e-9}]
    return cfg


def fig7_uca():
    """Single 0.345 m circle, wave at (55 deg, 20 ns)."""
    return {
        "name": "fig7-uca",
        "seed": 0,
        "array": [_ring(0.345)],
        "grid": dict(_BAND_N259),
        "scene": [{"azimuth_deg": 55.0, "delay_s": 20e-9}],
        "processing": {"modes": 250},
    }


def fig7_ucca():
    """Nine equidistant concentric circles, 0.15 m to 0.345 m."""
    cfg = fig7_uca()
    cfg["name"] = "fig7-ucca"
    cfg["array"] = _nine_ring_ucca()
    return cfg


def fig7_cea():
    cfg = fig7_uca()
    cfg["name"] = "fig7-cea"
    cfg["array"] = _nine_ring_cea()
    return cfg


def fig8():
    """Position-noise sweep on the nine-ring layout, five seeds per level.

    Sigma is specified in wavelengths at the band center (41.5 GHz).  The
    mode count adapts per realization ("auto"): position noise pulls sensors
    inward, shrinking the smallest radius and with it the stable mode range;
    a fixed 250-mode bank would divide by denormal Bessel values once sigma
    reaches a couple of wavelengths.
    """
    cfg = fig6b()
    cfg["name"] = "fig8"
    cfg["processing"]["modes"] = "auto"
    # keep filter gains modest on shrunken radii (evanescent-mode junk
    # otherwise swamps the map), and measure artifacts through the same
    # absolute angular window the unperturbed 251-mode layout uses
    cfg["processing"]["mode_threshold"] = 1e-3
    cfg["processing"]["exclusion_deg"] = 5 * 360.0 / 251
    # randomized layouts only satisfy spatial sampling on average, never
    # pairwise, so the strict audit is informational here
    cfg["allow_undersampled"] = True
    cfg["sweep"] = {"axes": [
        {"path": "array.*.sigma_wavelengths", "values": [0.5, 1.0, 2.0, 5.0]},
        {"path": "seed", "values": [1, 2, 3, 4, 5]},
    ]}
    return cfg


def fig12():
    """Single 0.242 m ring at e = 0.7, wave at (330 deg, 4 ns), 58-62 GHz."""
    return {
        "name": "fig12",
        "seed": 0,
        "array": [_ring(0.242, e=0.7)],
        "grid": dict(_BAND_60G),
        "scene": [{"azimuth_deg": 330.0, "delay_s": 4e-9}],
        "processing": {"modes": 250},
    }


def fig13():
    """Two-ray scene on two concentric e = 0.7 rings rotated 0/90 degrees."""
    cfg = fig12()
    cfg["name"] = "fig13"
    cfg["array"] = [_ring(0.242, e=0.7), _ring(0.242, e=0.7, alpha=90.0)]
    cfg["scene"] = [{"azimuth_deg": 330.0, "delay_s": 4e-9},
                    {"azimuth_deg": 300.0, "delay_s": 8e-9}]
    cfg["processing"] = {"modes": 255}
    return cfg


PRESETS = {
    "fig3": fig3,
    "fig4a": fig4a,
    "fig4b": fig4b,
    "fig4c": fig4c,
    "fig5": fig5,
    "fig6b": fig6b,
    "fig6c": fig6c,
    "fig7-uca": fig7_uca,
    "fig7-ucca": fig7_ucca,
    "fig7-cea": fig7_cea,
    "fig8": fig8,
    "fig12": fig12,
    "fig13": fig13,
}


def get_preset(name: str) -> dict:
    try:
        builder = PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}") from None
    return copy.deepcopy(builder())
