"""Reference presets for the bundled scenarios.

Holds the calibrated grating models for the two reference pair sources,
the per-channel detector jitters, and the time-tagger jitter.  The
grating parameters are frozen calibration results: each model's
reflectivity FWHM matches its nominal bandwidth and the paired joint
spectra reproduce the reference coherence times (see the test suite for
the frozen expectations).
"""

from __future__ import annotations

import numpy as np

from .detection import DetectorModel, effective_jitter
from .interference import CoincidenceConfig, InterferenceSetup, _required_n_points
from .spectral import (
    FbgModel,
    FrequencyGrid,
    JointSpectralAmplitude,
    fbg_reflectivity_fwhm,
    fbg_response,
)

# Per-channel detector jitter FWHMs for channels (1, 2', 3', 4).
REFERENCE_JITTERS_FWHM = (17e-12, 13e-12, 11e-12, 16e-12)

# RMS jitter of the time-tagging unit, common to all channels.
TIME_TAGGER_RMS = 4.2e-12

# Nominal reflectivity FWHM of each grating, in pm at 1550 nm.
NOMINAL_BANDWIDTHS_PM = {
    "signal_a": 41.0,
    "idler_a": 27.0,
    "signal_b": 44.0,
    "idler_b": 41.0,
}

FILTER_SIGNAL_A = FbgModel(
    length=0.03621385696080538,
    n_sections=128,
    peak_kappa=55.22747831485113,
    order=2.0,
    width=0.8,
)
FILTER_IDLER_A = FbgModel(
    length=0.054991412421963724,
    n_sections=128,
    peak_kappa=36.3693149878288,
    order=2.0,
    width=0.8,
)
# The two source-B gratings share a +10 pm tuning offset relative to the
# pair degeneracy point: the 20 pm pair-internal misalignment shapes the
# joint spectrum while the interfering idler band stays centered.
FILTER_SIGNAL_B = FbgModel(
    length=0.05595707749782343,
    n_sections=128,
    peak_kappa=71.48336151321678,
    order=8.0,
    width=1.0,
    detuning_offset=7840381133.439556,
)
FILTER_IDLER_B = FbgModel(
    length=0.06005149780254221,
    n_sections=128,
    peak_kappa=66.60949595549747,
    order=8.0,
    width=1.0,
    detuning_offset=7840381133.439556,
)

REFERENCE_FILTERS = {
    "signal_a": FILTER_SIGNAL_A,
    "idler_a": FILTER_IDLER_A,
    "signal_b": FILTER_SIGNAL_B,
    "idler_b": FILTER_IDLER_B,
}

# Jitter FWHM pairs (signal channel, idler channel) used when measuring
# each source's two-photon coherence curve: source A on channels (1, 2'),
# source B on channels (4, 3').
COHERENCE_JITTER_PAIRS = {
    "a": (REFERENCE_JITTERS_FWHM[0], REFERENCE_JITTERS_FWHM[1]),
    "b": (REFERENCE_JITTERS_FWHM[3], REFERENCE_JITTERS_FWHM[2]),
}


def tagger_composed_jitters(
    jitters_fwhm: tuple[float, float, float, float] = REFERENCE_JITTERS_FWHM,
    tagger_rms: float = TIME_TAGGER_RMS,
) -> tuple[float, float, float, float]:
    """Per-channel jitters with the time-tagger contribution folded in.

    Each detector FWHM is combined in quadrature with the tagger's RMS
    jitter (converted to FWHM).
    """
    return tuple(
        effective_jitter(components_fwhm=(j,), components_rms=(tagger_rms,))
        for j in jitters_fwhm
    )


def _sized_grid(span: float, n_points: int | None, tau_max: float | None) -> FrequencyGrid:
    if n_points is None:
        n_points = 513
        if tau_max is not None:
            probe = FrequencyGrid(n_points=3, span=span)
            n_points = max(n_points, _required_n_points(probe, tau_max))
    return FrequencyGrid(n_points=n_points, span=span)


def filtered_pair_jsa(
    signal: FbgModel,
    idler: FbgModel,
    grid: FrequencyGrid | None = None,
    n_points: int | None = None,
    span_factor: float = 8.0,
    tau_max: float | None = None,
) -> JointSpectralAmplitude:
    """Joint spectral amplitude of a CW-pumped pair behind two gratings.

    The signal reflection is sampled at +omega and the idler reflection
    at -omega; the product is normalized to unit peak magnitude.  When
    grid is omitted one is sized from the filter bandwidths, and, when
    tau_max is given, so that delays up to tau_max resolve.
    """
    if grid is None:
        w_s = fbg_reflectivity_fwhm(signal)
        w_i = fbg_reflectivity_fwhm(idler)
        grid = _sized_grid(span_factor * max(w_s, w_i), n_points, tau_max)
    amp = fbg_response(signal, grid).amp * fbg_response(idler, grid).amp[::-1]
    peak = np.max(np.abs(amp))
    if peak == 0.0:
        raise ValueError("filter reflection bands do not overlap")
    return JointSpectralAmplitude(grid=grid, j_amp=amp / peak)


def reference_source_a(
    grid: FrequencyGrid | None = None,
    n_points: int | None = None,
    tau_max: float | None = None,
) -> JointSpectralAmplitude:
    """Pair spectrum of reference source A (41 pm signal, 27 pm idler)."""
    return filtered_pair_jsa(
        FILTER_SIGNAL_A, FILTER_IDLER_A, grid=grid, n_points=n_points, tau_max=tau_max
    )


def reference_source_b(
    grid: FrequencyGrid | None = None,
    n_points: int | None = None,
    tau_max: float | None = None,
) -> JointSpectralAmplitude:
    """Pair spectrum of reference source B (44 pm signal, 41 pm idler)."""
    return filtered_pair_jsa(
        FILTER_SIGNAL_B, FILTER_IDLER_B, grid=grid, n_points=n_points, tau_max=tau_max
    )


def reference_setup(
    tau_14: float,
    tau_23: float,
    tau_max: float | None = None,
    jitters_fwhm: tuple[float, float, float, float] = REFERENCE_JITTERS_FWHM,
) -> InterferenceSetup:
    """Interference setup with source A and source B on the two arms.

    Both sources are sampled on one shared grid sized from the widest
    filter band.  tau_max bounds the largest delay the caller intends to
    evaluate; the grid resolution is chosen accordingly.
    """
    if tau_max is None:
        tau_max = tau_23
    reach = max(tau_14, tau_23, tau_max)
    widths = [fbg_reflectivity_fwhm(m) for m in REFERENCE_FILTERS.values()]
    grid = _sized_grid(8.0 * max(widths), None, reach)
    return InterferenceSetup(
        jsa_a=reference_source_a(grid=grid),
        jsa_b=reference_source_b(grid=grid),
        detectors=DetectorModel(jitter_fwhm=jitters_fwhm),
        windows=CoincidenceConfig(tau_14=tau_14, tau_23=tau_23),
    )
