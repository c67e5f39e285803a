"""Four-photon interference engine and temporal coherence functions.

Two independent computational routes to the same physical quantity:

* ``fourfold_probability`` sums the frequency-domain coincidence
  expression over the grid, with the window sinc kernels and jitter
  kernels attached to index differences. The four-term interference
  bracket splits into two factorized direct terms (autocorrelation
  sums) and two cross terms evaluated as chained matrix contractions,
  never as a literal four-nested loop.

* ``fourfold_probability_oracle`` works in the time domain: it builds
  the pair amplitudes by discrete Fourier transform of each JSA, forms
  the antisymmetrized four-time detection density, and integrates the
  detection times over the coincidence windows (jitter folded into the
  window weights analytically). It shares no kernel code with the
  frequency route.

Both routes carry the same absolute normalization, so their ratio is a
discretization-error diagnostic, not a free parameter.

All outputs are unnormalized probabilities: one global scale is left
free by design and every reported metric (visibility, normalized dip
curves) is a ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import erf

from .detection import DetectorModel, jitter_kernel, jitter_sigma_time
from .spectral import (
    FrequencyGrid,
    JointSpectralAmplitude,
    fwhm_from_samples,
    joint_spectral_amplitude,
    make_filter,
)
from .units import RECT_TC_PRODUCT, RMS_TO_FWHM

__all__ = [
    "GridResolutionError",
    "CoincidenceConfig",
    "InterferenceSetup",
    "HomCurve",
    "CoherenceCurve",
    "coherence_function",
    "jsa_coherence_fwhm",
    "fourfold_probability",
    "fourfold_probability_oracle",
    "fourfold_baseline",
    "hom_curve",
    "visibility",
    "visibility_at_zero_delay",
    "visibility_map",
]

# Relative tolerance for the imaginary residue of the (mathematically
# real) coincidence sum, measured against the term-magnitude scale.
IMAG_RESIDUE_TOL = 1e-9

# Oscillation-resolution rule: grid spacing must satisfy
# d_omega <= 2*pi / (RESOLUTION_PERIODS * T_max).
RESOLUTION_PERIODS = 8.0


class GridResolutionError(ValueError):
    """Grid too coarse to resolve the fastest kernel oscillation."""

    def __init__(self, message: str, required_n_points: int | None = None):
        super().__init__(message)
        self.required_n_points = required_n_points


@dataclass(frozen=True)
class CoincidenceConfig:
    """Coincidence windows relative to the channel-1 trigger."""

    tau_14: float  # s, heralding (outer) window
    tau_23: float  # s, BS-photon window
    trigger_channel: int = 1

    def __post_init__(self) -> None:
        if not (self.tau_14 > 0 and self.tau_23 > 0):
            raise ValueError("coincidence windows must be positive")
        if self.trigger_channel != 1:
            raise ValueError("only channel 1 triggering is supported")


@dataclass(frozen=True)
class InterferenceSetup:
    """Everything the coincidence probability depends on.

    Source A feeds channels 1 (herald) and 2 (BS input); source B feeds
    channels 4 (herald) and 3 (BS input).
    """

    jsa_a: JointSpectralAmplitude
    jsa_b: JointSpectralAmplitude
    detectors: DetectorModel
    windows: CoincidenceConfig

    def __post_init__(self) -> None:
        if self.jsa_a.grid != self.jsa_b.grid:
            raise ValueError("both JSAs must share one frequency grid")

    @cached_property
    def coherence_times(self) -> tuple[float, float]:
        """Jitter-free coherence FWHM of each source's JSA [s]."""
        return (jsa_coherence_fwhm(self.jsa_a), jsa_coherence_fwhm(self.jsa_b))


@dataclass(frozen=True)
class HomCurve:
    delays: np.ndarray
    values: np.ndarray
    plateau: float
    dip: float
    plateau_delay: float
    plateau_reliable: bool


@dataclass(frozen=True)
class CoherenceCurve:
    delays: np.ndarray
    density: np.ndarray
    t_c_fwhm: float


# ---------------------------------------------------------------------------
# Temporal coherence


def coherence_function(
    jsa: JointSpectralAmplitude,
    jit_s: float,
    jit_i: float,
    delays: np.ndarray,
) -> CoherenceCurve:
    """Signal-idler arrival-delay density G(tau) and its FWHM.

    G(tau) = sum over frequency pairs of J(W1) J*(W2) exp(i(W1-W2)tau)
    weighted by both detection kernels; evaluated over index lags. The
    FWHM is interpolated linearly; if the delay span fails to bracket
    the half maximum on both sides this raises instead of extrapolating.
    """
    delays = np.asarray(delays, dtype=float)
    if delays.ndim != 1 or delays.size < 5:
        raise ValueError("need a 1-d array of at least 5 delays")
    if abs(delays[0] + delays[-1]) > 1e-6 * (delays[-1] - delays[0]):
        raise ValueError("delay scan must be symmetric about zero")
    grid = jsa.grid
    _, x = _lag_frequencies(grid)
    r = np.correlate(jsa.j_amp, jsa.j_amp, mode="full")  # R(d) at index d+n-1
    k = jitter_kernel(jit_s, x) * jitter_kernel(jit_i, x)
    g = _lag_sum_over_delays(r * k, x, delays) * grid.step**2
    floor = -1e-9 * float(np.max(np.abs(g)))
    if float(np.min(g)) < floor:
        raise AssertionError("coherence density has a significant negative part")
    g = np.maximum(g, 0.0)
    t_c = fwhm_from_samples(delays, g)
    return CoherenceCurve(delays=delays, density=g, t_c_fwhm=t_c)


def jsa_coherence_fwhm(jsa: JointSpectralAmplitude) -> float:
    """Jitter-free coherence FWHM of a JSA, with adaptive delay span."""
    grid = jsa.grid
    absj = np.abs(jsa.j_amp)
    support = grid.omega[absj > 1e-6 * absj.max()]
    w_supp = float(support[-1] - support[0])
    if w_supp <= 0:
        w_supp = 2.0 * grid.step
    _, x = _lag_frequencies(grid)
    rk = np.correlate(jsa.j_amp, jsa.j_amp, mode="full")
    half_span = 3.0 * 2.0 * math.pi / w_supp
    for _ in range(40):
        delays = np.linspace(-half_span, half_span, 8193)
        g = _lag_sum_over_delays(rk, x, delays)
        peak = float(np.max(g))
        if g[0] < 0.5 * peak and g[-1] < 0.5 * peak:
            return fwhm_from_samples(delays, g)
        half_span *= 2.0
    raise ValueError("coherence FWHM did not converge; JSA support degenerate?")


def _lag_frequencies(grid: FrequencyGrid) -> tuple[np.ndarray, np.ndarray]:
    n = grid.n_points
    lags = np.arange(-(n - 1), n)
    return lags, lags * grid.step


def _lag_sum_over_delays(coeff: np.ndarray, x: np.ndarray, delays: np.ndarray) -> np.ndarray:
    """Re sum_d coeff[d] exp(i x_d tau) per tau, chunked to bound memory."""
    out = np.empty(delays.size, dtype=float)
    chunk = max(1, int(4e6 // max(x.size, 1)))
    for lo in range(0, delays.size, chunk):
        t = delays[lo : lo + chunk]
        phase = np.exp(1j * np.outer(x, t))
        out[lo : lo + chunk] = np.real(coeff @ phase)
    return out


# ---------------------------------------------------------------------------
# Frequency-domain coincidence probability


def _sinc(x: np.ndarray) -> np.ndarray:
    # sin(x)/x with sinc(0)=1; np.sinc uses the normalized convention.
    return np.sinc(x / np.pi)


def _required_n_points(grid: FrequencyGrid, t_max: float) -> int:
    step_max = 2.0 * math.pi / (RESOLUTION_PERIODS * t_max)
    n = int(math.ceil(2.0 * grid.span / step_max)) + 1
    return n if n % 2 == 1 else n + 1


def _check_resolution(grid: FrequencyGrid, t_max: float, context: str) -> None:
    step_max = 2.0 * math.pi / (RESOLUTION_PERIODS * t_max)
    if grid.step > step_max * (1.0 + 1e-12):
        need = _required_n_points(grid, t_max)
        raise GridResolutionError(
            f"grid spacing {grid.step:.3e} rad/s cannot resolve {context}: "
            f"need <= {step_max:.3e} rad/s (n_points >= {need} at this span)",
            required_n_points=need,
        )


class FourfoldEngine:
    """Precomputed contraction state for one setup; cheap per-delay eval.

    Direct bracket terms collapse onto JSA autocorrelations over the
    lag axis; cross terms reduce to bilinear forms u^H M u with
    u = exp(i tau W) after three n x n matrix products done once.
    """

    def __init__(self, setup: InterferenceSetup):
        grid = setup.jsa_a.grid
        tc_a, tc_b = setup.coherence_times
        cfg = setup.windows
        self._static_t_max = max(cfg.tau_14, cfg.tau_23, tc_a, tc_b)
        _check_resolution(grid, self._static_t_max, "window/coherence kernels")
        self.grid = grid
        self.omega = grid.omega
        n = grid.n_points

        j1, j2, j3, j4 = setup.detectors.jitter_fwhm
        lags, x = _lag_frequencies(grid)
        g1 = jitter_kernel(j1, x)
        g4 = jitter_kernel(j4, x)
        phi2 = cfg.tau_23 * _sinc(cfg.tau_23 * x / 2.0) * jitter_kernel(j2, x)
        phi3 = cfg.tau_23 * _sinc(cfg.tau_23 * x / 2.0) * jitter_kernel(j3, x)
        s14 = cfg.tau_14 * _sinc(cfg.tau_14 * x / 2.0) * g4

        ja = setup.jsa_a.j_amp
        jb = setup.jsa_b.j_amp
        ra = np.correlate(ja, ja, mode="full")
        rb = np.correlate(jb, jb, mode="full")

        # Direct terms: a-side scalars, b-side lag coefficients with the
        # delay phase applied at evaluation time.
        self._a_phi2 = complex(np.sum(np.conj(ra) * (g1 * phi2)))
        self._a_phi3 = complex(np.sum(np.conj(ra) * (g1 * phi3)))
        self._b_phi3 = np.conj(rb) * (s14 * phi3)
        self._b_phi2 = np.conj(rb) * (s14 * phi2)
        self._x = x

        # Cross terms: chain 1-2 (g1), 2-3 (phi), 3-4 (window-14 kernel
        # with delay phase), 4-1 (other phi); trace taken against the
        # 3-4 link leaves an n x n core per bracket term.
        idx = np.arange(n)
        d = idx[None, :] - idx[:, None] + (n - 1)
        k12 = (ja[:, None] * np.conj(ja)[None, :]) * g1[d]
        k_phi2 = phi2[d].astype(complex)
        k_phi3 = phi3[d].astype(complex)
        w3 = k_phi3 @ k12 @ k_phi2
        w4 = k_phi2 @ k12 @ k_phi3
        k34 = (jb[:, None] * np.conj(jb)[None, :]) * s14[d]
        self._m3 = k34 * w3.T
        self._m4 = k34 * w4.T
        self._scale = grid.step**4
        # Roundoff capacity of the four bilinear forms: deep in the tail
        # the terms cancel to a value far below the magnitudes actually
        # summed, so residues must be judged against those magnitudes.
        self._residue_cap = self._scale * (
            abs(self._a_phi2) * float(np.sum(np.abs(self._b_phi3)))
            + abs(self._a_phi3) * float(np.sum(np.abs(self._b_phi2)))
            + float(np.sum(np.abs(self._m3)))
            + float(np.sum(np.abs(self._m4)))
        )

    def terms(self, tau: float) -> tuple[complex, complex, complex, complex]:
        """Bracket contributions (T1, T2, T3, T4), each times step^4."""
        _check_resolution(self.grid, max(self._static_t_max, abs(tau)), "the delay phase")
        phase = np.exp(1j * tau * self._x)
        t1 = self._a_phi2 * np.sum(self._b_phi3 * phase)
        t2 = self._a_phi3 * np.sum(self._b_phi2 * phase)
        u = np.exp(1j * tau * self.omega)
        t3 = np.conj(u) @ self._m3 @ u
        t4 = np.conj(u) @ self._m4 @ u
        s = self._scale
        return t1 * s, t2 * s, t3 * s, t4 * s

    def probability(self, tau: float) -> float:
        t1, t2, t3, t4 = self.terms(tau)
        total = t1 + t2 - t3 - t4
        scale = max(abs(t1) + abs(t2) + abs(t3) + abs(t4), self._residue_cap)
        if scale > 0 and abs(total.imag) > IMAG_RESIDUE_TOL * scale:
            raise AssertionError(
                f"imaginary residue {total.imag:.3e} exceeds {IMAG_RESIDUE_TOL} x {scale:.3e}"
            )
        p = total.real
        if scale > 0 and p < -IMAG_RESIDUE_TOL * scale:
            raise AssertionError(f"negative probability {p:.3e} at tau={tau:.3e}")
        return max(p, 0.0)

    def baseline(self) -> float:
        """No-interference reference: direct terms only, at zero delay."""
        t1, t2, _, _ = self.terms(0.0)
        return float((t1 + t2).real)


def fourfold_probability(setup: InterferenceSetup, tau: float) -> float:
    """Unnormalized four-photon coincidence probability at delay tau."""
    return FourfoldEngine(setup).probability(tau)


def fourfold_baseline(setup: InterferenceSetup) -> float:
    """P(tau=0) with the interference terms removed (the dip reference)."""
    return FourfoldEngine(setup).baseline()


# ---------------------------------------------------------------------------
# Time-domain oracle


def _window_weights(u: np.ndarray, step: float, lo: float, hi: float, sigma: float) -> np.ndarray:
    """Quadrature weights for integrating a window over detection times.

    Each weight approximates the integral over one time cell of the
    jitter-smeared indicator of [lo, hi]: the erf closed form when
    sigma > 0, the exact cell-overlap length when sigma = 0.
    """
    if sigma > 0:
        rt2 = sigma * math.sqrt(2.0)
        w = 0.5 * (erf((hi - u) / rt2) - erf((lo - u) / rt2))
        return w * step
    cell_lo = np.maximum(u - step / 2.0, lo)
    cell_hi = np.minimum(u + step / 2.0, hi)
    return np.clip(cell_hi - cell_lo, 0.0, None)


def _lattice(lo: float, hi: float, step: float) -> tuple[np.ndarray, int]:
    """Integer-offset sample points covering [lo, hi] on a shared lattice."""
    k0 = int(math.floor(lo / step))
    k1 = int(math.ceil(hi / step))
    return np.arange(k0, k1 + 1) * step, k0


def fourfold_probability_oracle(setup: InterferenceSetup, tau: float) -> float:
    """Brute-force time-domain evaluation of the coincidence probability.

    Pair amplitudes f(t) come from a direct Fourier sum of each JSA on a
    shared time lattice; the four detection-time integrals use window
    weights with jitter folded in analytically. Independent of the
    frequency-domain contraction route. Practical for modest grids.
    """
    grid = setup.jsa_a.grid
    cfg = setup.windows
    tc_a, tc_b = setup.coherence_times
    j1, j2, j3, j4 = setup.detectors.jitter_fwhm
    sig = [jitter_sigma_time(j) for j in (j1, j2, j3, j4)]

    step = min(cfg.tau_14 / 8.0, cfg.tau_23 / 8.0, min(tc_a, tc_b) / 24.0)
    positive = [s for s in sig if s > 0]
    if positive:
        step = min(step, min(positive) / 3.0)

    pad = [5.0 * s for s in sig]
    if sig[0] > 0:
        u1, o1 = _lattice(-pad[0], pad[0], step)
        g1w = np.exp(-0.5 * (u1 / sig[0]) ** 2) / (sig[0] * math.sqrt(2 * math.pi)) * step
    else:
        u1, o1 = np.zeros(1), 0
        g1w = np.ones(1)
    u2, o2 = _lattice(-cfg.tau_23 / 2 - pad[1], cfg.tau_23 / 2 + pad[1], step)
    u3, o3 = _lattice(-cfg.tau_23 / 2 - pad[2], cfg.tau_23 / 2 + pad[2], step)
    u4, o4 = _lattice(tau - cfg.tau_14 / 2 - pad[3], tau + cfg.tau_14 / 2 + pad[3], step)
    w2 = _window_weights(u2, step, -cfg.tau_23 / 2, cfg.tau_23 / 2, sig[1])
    w3 = _window_weights(u3, step, -cfg.tau_23 / 2, cfg.tau_23 / 2, sig[2])
    w4 = _window_weights(u4, step, tau - cfg.tau_14 / 2, tau + cfg.tau_14 / 2, sig[3])

    # All pairwise time differences live on the lattice; the pair
    # amplitudes are tabulated once per source over the needed lag range.
    spans = {
        "a12": (o1 - o2 - (u2.size - 1), o1 - o2 + (u1.size - 1)),
        "a13": (o1 - o3 - (u3.size - 1), o1 - o3 + (u1.size - 1)),
        "b43": (o4 - o3 - (u3.size - 1), o4 - o3 + (u4.size - 1)),
        "b42": (o4 - o2 - (u2.size - 1), o4 - o2 + (u4.size - 1)),
    }
    dmin = min(lo for lo, _ in spans.values())
    dmax = max(hi for _, hi in spans.values())
    v = np.arange(dmin, dmax + 1) * step
    period = 2.0 * math.pi / grid.step
    v_need = float(np.max(np.abs(v)))
    if v_need > 0.45 * period:
        # The tabulated pair amplitude is periodic with 2*pi/step, so
        # the largest needed lag must stay well inside half a period.
        step_max = 0.45 * 2.0 * math.pi / v_need
        need = int(math.ceil(2.0 * grid.span / step_max)) + 1
        need += need % 2 == 0
        raise GridResolutionError(
            f"time lag {v_need:.3e} s aliases on this grid (period {period:.3e} s); "
            f"increase n_points to >= {need}",
            required_n_points=need,
        )

    def pair_amplitude(j_amp: np.ndarray) -> np.ndarray:
        return np.exp(-1j * np.outer(v, grid.omega)) @ j_amp * grid.step

    fa = pair_amplitude(setup.jsa_a.j_amp)
    fb = pair_amplitude(setup.jsa_b.j_amp)

    def table(f: np.ndarray, oa: int, na: int, ob: int, nb: int) -> np.ndarray:
        ia = np.arange(na)[:, None]
        ib = np.arange(nb)[None, :]
        return f[(oa + ia) - (ob + ib) - dmin]

    fa12 = table(fa, o1, u1.size, o2, u2.size)
    fa13 = table(fa, o1, u1.size, o3, u3.size)
    fb43 = table(fb, o4, u4.size, o3, u3.size)
    fb42 = table(fb, o4, u4.size, o2, u2.size)

    term1 = (g1w @ np.abs(fa12) ** 2 @ w2) * (w4 @ np.abs(fb43) ** 2 @ w3)
    term2 = (g1w @ np.abs(fa13) ** 2 @ w3) * (w4 @ np.abs(fb42) ** 2 @ w2)
    xm = (fa12 * w2[None, :]) @ fb42.conj().T
    ym = (fa13.conj() * w3[None, :]) @ fb43.T
    cross = -2.0 * float(np.real(g1w @ (xm * ym) @ w4))
    return float(term1 + term2 + cross)


# ---------------------------------------------------------------------------
# Dip curves, visibility, maps


def _plateau_delay(setup: InterferenceSetup) -> tuple[float, bool]:
    """Delay used as the P(infinity) estimate, and its reliability.

    Nominal rule: max(6 x max coherence time, 3 x max jitter). The
    sample must sit past the dip but before the capture roll-off that
    starts near tau_23/2, so the nominal value is clamped into
    [t_lo, t_hi] below. Outside the tau_23 >= 4 T_c regime (or when the
    clamp interval is empty) no plateau exists and the flag is False.
    """
    cfg = setup.windows
    tc_max = max(setup.coherence_times)
    j_max = max(setup.detectors.jitter_fwhm)
    sigma_max = j_max / RMS_TO_FWHM
    nominal = max(6.0 * tc_max, 3.0 * j_max)
    t_lo = max(2.0 * tc_max + cfg.tau_14 / 2.0 + 3.0 * sigma_max, 3.0 * j_max)
    t_hi = cfg.tau_23 / 2.0 - tc_max - cfg.tau_14 / 2.0 - 3.0 * sigma_max
    reliable = cfg.tau_23 >= 4.0 * tc_max and t_hi >= t_lo
    if not reliable:
        # Indicative sample only; keep it inside the capture region so the
        # curve stays computable on a grid sized for tau_23.
        return min(nominal, cfg.tau_23 / 2.0), False
    return min(max(nominal, t_lo), t_hi), True


def hom_curve(setup: InterferenceSetup, delays: np.ndarray) -> HomCurve:
    """Coincidence probability over a delay scan, plus dip and plateau.

    The plateau sample is evaluated internally at the delay described
    in ``_plateau_delay``; the scan itself must include zero delay.
    """
    delays = np.asarray(delays, dtype=float)
    if not np.any(delays == 0.0):
        raise ValueError("delay scan must include tau = 0")
    engine = FourfoldEngine(setup)
    values = np.array([engine.probability(t) for t in delays])
    tau_p, reliable = _plateau_delay(setup)
    plateau = engine.probability(tau_p)
    dip = float(values[np.flatnonzero(delays == 0.0)[0]])
    return HomCurve(
        delays=delays,
        values=values,
        plateau=plateau,
        dip=dip,
        plateau_delay=tau_p,
        plateau_reliable=reliable,
    )


def visibility(curve: HomCurve) -> float:
    """(plateau - dip) / plateau for a curve with a trustworthy plateau."""
    if not curve.plateau_reliable:
        raise ValueError(
            "plateau is unreliable (tau_23 too small relative to the coherence "
            "time); visibility is not defined in this regime"
        )
    if not (curve.plateau > 0):
        raise ValueError("plateau must be positive")
    return (curve.plateau - curve.dip) / curve.plateau


def visibility_at_zero_delay(setup: InterferenceSetup) -> float:
    """V from one engine build: 1 - P(0) / baseline.

    The baseline (direct terms at tau = 0) is the distinguishable-photon
    reference unaffected by the capture roll-off near tau_23/2, so this
    agrees with the plateau route whenever the latter is reliable.
    """
    engine = FourfoldEngine(setup)
    t1, t2, t3, t4 = engine.terms(0.0)
    base = (t1 + t2).real
    if base <= 0:
        raise ValueError("zero baseline; setup captures no coincidences")
    return float((t3 + t4).real / base)


def _identical_source_setup(
    t_c: float,
    tau_14: float,
    tau_23: float,
    jitter: float | tuple[float, float, float, float],
    filter_kind: str,
) -> InterferenceSetup:
    # Filter intensity FWHM that makes the jitter-free coherence FWHM of
    # J = F(W) F(-W) equal t_c, per analytic transform of each shape.
    widths = {
        "rect": RECT_TC_PRODUCT,
        "gaussian": 4.0 * math.sqrt(2.0) * math.log(2.0),
        "lorentzian": 2.0 * math.log(2.0),
    }
    try:
        w_f = widths[filter_kind] / t_c
    except KeyError:
        raise ValueError(f"unsupported filter kind for identical sources: {filter_kind!r}")
    span = 8.0 * w_f
    t_max = max(tau_14, tau_23, t_c)
    n = _required_n_points(FrequencyGrid(n_points=3, span=span), t_max)
    grid = FrequencyGrid(n_points=max(n, 129), span=span)
    f = make_filter(grid, filter_kind, w_f)
    jsa = joint_spectral_amplitude(f, f)
    jit = jitter if isinstance(jitter, tuple) else (float(jitter),) * 4
    setup = InterferenceSetup(
        jsa_a=jsa,
        jsa_b=jsa,
        detectors=DetectorModel(jitter_fwhm=jit),
        windows=CoincidenceConfig(tau_14=tau_14, tau_23=tau_23),
    )
    # coherence FWHM equals t_c by construction of w_f; priming the
    # cache skips the numeric lag-sum estimate of the same number
    setup.__dict__["coherence_times"] = (t_c, t_c)
    return setup


def visibility_map(
    tc_values: np.ndarray,
    tau14_values: np.ndarray,
    jitter: float,
    filter_kind: str = "rect",
    tau23_factor: float = 8.0,
) -> np.ndarray:
    """V over a (T_c, tau_14) grid for identical sources, one jitter.

    tau_23 is set to tau23_factor x T_c per cell (must stay >= 4) so the
    BS-side windows capture the wave packets without post-filtering.
    Returns V[i_tc, i_tau14].
    """
    if tau23_factor < 4.0:
        raise ValueError("tau23_factor below the reliable-plateau regime")
    tc_values = np.asarray(tc_values, dtype=float)
    tau14_values = np.asarray(tau14_values, dtype=float)
    out = np.empty((tc_values.size, tau14_values.size))
    for i, t_c in enumerate(tc_values):
        for k, tau14 in enumerate(tau14_values):
            setup = _identical_source_setup(
                t_c, tau14, tau23_factor * t_c, jitter, filter_kind
            )
            out[i, k] = visibility_at_zero_delay(setup)
    return out
