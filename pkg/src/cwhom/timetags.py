"""Time-tag stream simulation and fourfold coincidence counting.

Classical Monte Carlo generator for four-channel tag streams (Poisson
pair emission, beam-splitter port routing, stray photons, detector
jitter), trigger-relative fourfold counting, and the shifted-tag
accidental estimate together with its closed-form counterpart.

The generator is classical by construction: the same-port probability
gamma is an exogenous input (optionally a function of the arrival-time
difference of the two interfering photons), so the Monte Carlo validates
post-selection logic and accidental algebra, not the interference
integral itself.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .detection import DetectorModel
from .interference import CoherenceCurve, CoincidenceConfig
from .units import RMS_TO_FWHM

FS = 1e-15

# Channel labels: 1 and 4 are the heralding channels of the two sources,
# 2 and 3 are the beam-splitter output channels (2', 3').
CHANNEL_TRIGGER = 1
CHANNEL_BS_EARLY = 2
CHANNEL_BS_LATE = 3
CHANNEL_PARTNER = 4
CHANNELS = (1, 2, 3, 4)


@dataclass(frozen=True)
class TagStream:
    """Sorted four-channel detection record.

    channels and times_fs are parallel arrays; times are integer
    femtoseconds, sorted ascending, within [0, duration].
    """

    channels: np.ndarray
    times_fs: np.ndarray
    duration: float

    def __post_init__(self) -> None:
        ch = np.asarray(self.channels, dtype=np.uint8)
        t = np.asarray(self.times_fs, dtype=np.int64)
        if ch.shape != t.shape or ch.ndim != 1:
            raise ValueError("channels and times_fs must be parallel 1-d arrays")
        if not np.isin(ch, CHANNELS).all():
            raise ValueError("channel labels must be in {1, 2, 3, 4}")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if t.size and np.any(np.diff(t) < 0):
            raise ValueError("timestamps must be sorted ascending")
        if t.size and (t[0] < 0 or t[-1] > round(self.duration / FS)):
            raise ValueError("timestamps must lie within [0, duration]")
        object.__setattr__(self, "channels", ch)
        object.__setattr__(self, "times_fs", t)

    def channel_times(self, channel: int) -> np.ndarray:
        """Sorted int64 femtosecond timestamps of one channel."""
        return self.times_fs[self.channels == channel]

    @property
    def n_events(self) -> int:
        return int(self.times_fs.size)


@dataclass(frozen=True)
class SimScenario:
    """Inputs of the tag-stream generator.

    pair_rate_a and pair_rate_b are emitted pairs per second.  gamma is
    the probability that two paired beam-splitter photons exit the same
    port, either a constant or a function of their arrival-time
    difference.  noise_rates are observed stray-count rates per channel
    (not subject to efficiency thinning); etas are per-channel detection
    efficiencies applied to pair photons.  pairing_horizon bounds the
    arrival-time difference within which photons from opposite sources
    are treated as one interfering duo; by default it spans the internal
    delay density grid.
    """

    pair_rate_a: float
    pair_rate_b: float
    internal_delay_density: CoherenceCurve
    gamma: float | Callable[[np.ndarray], np.ndarray] = 0.0
    noise_rates: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    etas: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    detectors: DetectorModel = field(default_factory=lambda: DetectorModel(jitter_fwhm=(0.0, 0.0, 0.0, 0.0)))
    duration: float = 1.0
    rng_seed: int = 0
    pairing_horizon: float | None = None

    def __post_init__(self) -> None:
        if self.pair_rate_a < 0 or self.pair_rate_b < 0:
            raise ValueError("pair rates must be nonnegative")
        if not callable(self.gamma) and not 0.0 <= float(self.gamma) <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if len(self.noise_rates) != 4 or any(r < 0 for r in self.noise_rates):
            raise ValueError("noise_rates must be four nonnegative rates")
        if len(self.etas) != 4 or any(not 0.0 <= e <= 1.0 for e in self.etas):
            raise ValueError("etas must be four efficiencies in [0, 1]")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.pairing_horizon is not None and self.pairing_horizon <= 0:
            raise ValueError("pairing_horizon must be positive")

    def gamma_of(self, delta: np.ndarray) -> np.ndarray:
        if callable(self.gamma):
            g = np.asarray(self.gamma(delta), dtype=float)
        else:
            g = np.full(np.shape(delta), float(self.gamma))
        if np.any((g < 0.0) | (g > 1.0)):
            raise ValueError("gamma values must lie in [0, 1]")
        return g


@dataclass(frozen=True)
class AccidentalParams:
    """Per-window probabilities of the closed-form accidental model."""

    mu_c1: float
    mu_c2: float
    eta: tuple[float, float, float, float]
    p_noise: tuple[float, float, float, float]
    gamma: float

    def __post_init__(self) -> None:
        values = (self.mu_c1, self.mu_c2, self.gamma, *self.eta, *self.p_noise)
        if len(self.eta) != 4 or len(self.p_noise) != 4:
            raise ValueError("eta and p_noise must each hold four entries")
        if any(not 0.0 <= v <= 1.0 for v in values):
            raise ValueError("all probabilities must lie in [0, 1]")


def _sample_internal_delays(
    density: CoherenceCurve, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw signal-idler delays from a tabulated density by inverse CDF."""
    if n == 0:
        return np.zeros(0)
    g = np.maximum(np.asarray(density.density, dtype=float), 0.0)
    x = np.asarray(density.delays, dtype=float)
    cdf = np.concatenate(([0.0], np.cumsum((g[1:] + g[:-1]) * np.diff(x) / 2.0)))
    if cdf[-1] <= 0.0:
        raise ValueError("internal delay density integrates to zero")
    cdf /= cdf[-1]
    # strictly increasing knots keep interp well defined
    keep = np.concatenate(([True], np.diff(cdf) > 0))
    return np.interp(rng.random(n), cdf[keep], x[keep])


def _pair_bs_photons(
    t_a: np.ndarray, t_b: np.ndarray, horizon: float
) -> tuple[np.ndarray, np.ndarray]:
    """Mutual-nearest-neighbour pairing of opposite-source photon times.

    Both inputs are sorted.  A duo forms when each photon is the other's
    nearest opposite-source photon and they lie within horizon of each
    other; everything else stays unpaired.  One-to-one by construction.
    Returns index arrays (into t_a and t_b) of the paired duos.
    """
    na, nb = len(t_a), len(t_b)
    if na == 0 or nb == 0:
        return np.zeros(0, dtype=np.intp), np.zeros(0, dtype=np.intp)

    def _nearest(src: np.ndarray, ref: np.ndarray) -> np.ndarray:
        # index of the ref element closest to each src element
        right = np.searchsorted(ref, src)
        left = np.clip(right - 1, 0, len(ref) - 1)
        right = np.clip(right, 0, len(ref) - 1)
        take_right = np.abs(ref[right] - src) < np.abs(ref[left] - src)
        return np.where(take_right, right, left)

    b_of_a = _nearest(t_a, t_b)
    a_of_b = _nearest(t_b, t_a)
    ia = np.arange(na, dtype=np.intp)
    mutual = a_of_b[b_of_a] == ia
    close = np.abs(t_b[b_of_a] - t_a) <= horizon
    ia = ia[mutual & close]
    return ia, b_of_a[mutual & close].astype(np.intp)


def simulate_streams(scenario: SimScenario) -> TagStream:
    """Generate one four-channel tag stream.

    Each source emits pairs as a Poisson process; the heralding photon
    goes to channel 1 (source A) or 4 (source B) and the partner photon
    to a beam-splitter port.  Paired opposite-source partners exit the
    same uniformly chosen port with probability gamma(delta) and split
    otherwise; unpaired partners route uniformly.  Pair photons are
    thinned by the channel efficiency, stray counts arrive as untinned
    per-channel Poisson noise, and every tag receives Gaussian channel
    jitter.  Deterministic for a fixed rng_seed.
    """
    rng = np.random.default_rng(scenario.rng_seed)
    t_total = scenario.duration
    density = scenario.internal_delay_density

    # emission times and internal delays, sources drawn in a fixed order
    n_a = rng.poisson(scenario.pair_rate_a * t_total)
    n_b = rng.poisson(scenario.pair_rate_b * t_total)
    emit_a = np.sort(rng.random(n_a) * t_total)
    emit_b = np.sort(rng.random(n_b) * t_total)
    bs_a = emit_a + _sample_internal_delays(density, n_a, rng)
    bs_b = emit_b + _sample_internal_delays(density, n_b, rng)

    horizon = scenario.pairing_horizon
    if horizon is None:
        x = np.asarray(density.delays, dtype=float)
        horizon = float(x[-1] - x[0])
    order_a = np.argsort(bs_a, kind="stable")
    order_b = np.argsort(bs_b, kind="stable")
    ia, ib = _pair_bs_photons(bs_a[order_a], bs_b[order_b], horizon)
    ia = order_a[ia]
    ib = order_b[ib]

    # port assignment: 0 -> channel 2, 1 -> channel 3
    port_a = np.zeros(n_a, dtype=np.int8)
    port_b = np.zeros(n_b, dtype=np.int8)
    lone_a = np.setdiff1d(np.arange(n_a), ia, assume_unique=False)
    lone_b = np.setdiff1d(np.arange(n_b), ib, assume_unique=False)
    port_a[lone_a] = rng.random(lone_a.size) < 0.5
    port_b[lone_b] = rng.random(lone_b.size) < 0.5
    if ia.size:
        g = scenario.gamma_of(bs_a[ia] - bs_b[ib])
        same = rng.random(ia.size) < g
        joint = (rng.random(ia.size) < 0.5).astype(np.int8)
        port_a[ia] = joint
        port_b[ib] = np.where(same, joint, 1 - joint)

    channels: list[np.ndarray] = []
    times: list[np.ndarray] = []

    def _admit(ch: int, t: np.ndarray, eta: float) -> None:
        if t.size and eta < 1.0:
            t = t[rng.random(t.size) < eta]
        channels.append(np.full(t.size, ch, dtype=np.uint8))
        times.append(t)

    _admit(CHANNEL_TRIGGER, emit_a, scenario.etas[0])
    _admit(CHANNEL_BS_EARLY, np.concatenate([bs_a[port_a == 0], bs_b[port_b == 0]]), scenario.etas[1])
    _admit(CHANNEL_BS_LATE, np.concatenate([bs_a[port_a == 1], bs_b[port_b == 1]]), scenario.etas[2])
    _admit(CHANNEL_PARTNER, emit_b, scenario.etas[3])

    for ch, rate in zip(CHANNELS, scenario.noise_rates):
        n_noise = rng.poisson(rate * t_total)
        channels.append(np.full(n_noise, ch, dtype=np.uint8))
        times.append(rng.random(n_noise) * t_total)

    ch_all = np.concatenate(channels)
    t_all = np.concatenate(times)
    sigmas = [j / RMS_TO_FWHM for j in scenario.detectors.jitter_fwhm]
    for ch, sigma in zip(CHANNELS, sigmas):
        if sigma > 0.0:
            mask = ch_all == ch
            t_all[mask] += rng.normal(0.0, sigma, int(mask.sum()))

    keep = (t_all >= 0.0) & (t_all <= t_total)
    ch_all = ch_all[keep]
    t_fs = np.rint(t_all[keep] / FS).astype(np.int64)
    t_fs = np.minimum(t_fs, round(t_total / FS))
    order = np.lexsort((ch_all, t_fs))
    return TagStream(channels=ch_all[order], times_fs=t_fs[order], duration=t_total)


def _window_hits(tags: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """True where at least one tag lies in the inclusive window [lo, hi]."""
    return np.searchsorted(tags, lo, side="left") < np.searchsorted(tags, hi, side="right")


def count_fourfolds(stream: TagStream, cfg: CoincidenceConfig, tau: float) -> int:
    """Count trigger-anchored fourfold coincidences.

    For each channel-1 tag at t1 the fourfold requires at least one tag
    in channel 2 and in channel 3 within [t1 - tau_23/2, t1 + tau_23/2]
    and at least one channel-4 tag within [t1 + tau - tau_14/2,
    t1 + tau + tau_14/2]; each trigger contributes at most one count.
    """
    t1 = stream.channel_times(1)
    if t1.size == 0:
        return 0
    t2 = stream.channel_times(2)
    t3 = stream.channel_times(3)
    t4 = stream.channel_times(4)
    h23 = round(cfg.tau_23 / 2.0 / FS)
    h14 = round(cfg.tau_14 / 2.0 / FS)
    off = round(tau / FS)
    ok = _window_hits(t2, t1 - h23, t1 + h23)
    ok &= _window_hits(t3, t1 - h23, t1 + h23)
    ok &= _window_hits(t4, t1 + off - h14, t1 + off + h14)
    return int(np.count_nonzero(ok))


def shifted_accidentals(
    stream: TagStream,
    cfg: CoincidenceConfig,
    delta: float,
    shift_channel: int,
    tau: float = 0.0,
) -> int:
    """Accidental estimate by decorrelating one beam-splitter channel.

    Adds delta to every tag of shift_channel (2 or 3) and re-counts
    fourfolds; the surviving events must contain an uncorrelated photon
    in that channel.
    """
    if shift_channel not in (2, 3):
        raise ValueError("shift_channel must be 2 or 3")
    if delta < 10.0 * cfg.tau_23:
        raise ValueError("delta must be at least 10 times tau_23")
    d_fs = round(delta / FS)
    times = stream.times_fs.copy()
    mask = stream.channels == shift_channel
    times[mask] += d_fs
    order = np.argsort(times, kind="stable")
    shifted = TagStream(
        channels=stream.channels[order],
        times_fs=times[order],
        duration=stream.duration + delta,
    )
    return count_fourfolds(shifted, cfg, tau)


def analytic_accidentals(p: AccidentalParams) -> dict[str, float]:
    """Closed-form per-window fourfold probabilities.

    Returns the unshifted probability A0, the two single-channel shifted
    probabilities As2 and As3, and the real-event probability
    P_real = A0 - As2 - As3; the subtraction cancels every noise term
    and leaves the two-pair split-port contribution.
    """
    e1, e2, e3, e4 = p.eta
    p1, p2, p3, p4 = p.p_noise
    ebar2 = 1.0 - (1.0 - e2) ** 2
    ebar3 = 1.0 - (1.0 - e3) ** 2
    mu11 = p.mu_c1 * e1
    mu24 = p.mu_c2 * e4
    real = (1.0 - p.gamma) * mu24 * e3 * mu11 * e2
    bunch_2 = 0.5 * p.gamma * mu24 * mu11 * ebar2 * p3
    bunch_3 = 0.5 * p.gamma * mu24 * mu11 * ebar3 * p2
    pair_b_noise_12 = 0.5 * mu24 * e3 * p1 * p2
    pair_b_noise_13 = 0.5 * mu24 * e2 * p1 * p3
    pair_a_noise_43 = 0.5 * mu11 * e2 * p4 * p3
    pair_a_noise_42 = 0.5 * mu11 * e3 * p4 * p2
    a0 = real + bunch_2 + bunch_3 + pair_b_noise_12 + pair_b_noise_13 + pair_a_noise_43 + pair_a_noise_42
    as2 = pair_b_noise_12 + pair_a_noise_42 + bunch_3
    as3 = pair_a_noise_43 + pair_b_noise_13 + bunch_2
    return {"A0": a0, "As2": as2, "As3": as3, "P_real": a0 - as2 - as3}


def accidental_params_from(
    scenario: SimScenario,
    tau_w: float,
    gamma: float | None = None,
    bs_photon_fillers: bool = False,
) -> AccidentalParams:
    """Map generator rates onto the per-window closed-form parameters.

    mu_c = pair_rate * tau_w and P_n = noise_rate * tau_w; gamma must be
    supplied explicitly when the scenario uses a delay-dependent gamma.
    With bs_photon_fillers the beam-splitter channel probabilities also
    count uncorrelated pair photons (marginal port occupancy 1/2), which
    a shifted window sees exactly like stray counts; the heralding
    channels keep noise only since pair tags there are accounted by the
    mu_c factors.
    """
    if gamma is None:
        if callable(scenario.gamma):
            raise ValueError("scenario gamma is delay dependent; pass gamma explicitly")
        gamma = float(scenario.gamma)
    p_n = [r * tau_w for r in scenario.noise_rates]
    if bs_photon_fillers:
        photon_rate = 0.5 * (scenario.pair_rate_a + scenario.pair_rate_b)
        p_n[1] += photon_rate * scenario.etas[1] * tau_w
        p_n[2] += photon_rate * scenario.etas[2] * tau_w
    return AccidentalParams(
        mu_c1=scenario.pair_rate_a * tau_w,
        mu_c2=scenario.pair_rate_b * tau_w,
        eta=tuple(scenario.etas),
        p_noise=tuple(p_n),
        gamma=gamma,
    )


def save_tags_csv(stream: TagStream, path: str) -> None:
    """Write `channel,timestamp_fs` rows, sorted by timestamp."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("channel,timestamp_fs\n")
        for ch, t in zip(stream.channels, stream.times_fs):
            fh.write(f"{int(ch)},{int(t)}\n")


def load_tags_csv(path: str, duration: float | None = None) -> TagStream:
    """Read a `channel,timestamp_fs` file back into a TagStream."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "channel,timestamp_fs":
            raise ValueError("tag file must have header channel,timestamp_fs")
        body = fh.read()
    if body.strip():
        rows = np.loadtxt(io.StringIO(body), delimiter=",", dtype=np.int64, ndmin=2)
    else:
        rows = np.zeros((0, 2), dtype=np.int64)
    if rows.size == 0:
        ch = np.zeros(0, dtype=np.uint8)
        t = np.zeros(0, dtype=np.int64)
    else:
        ch = rows[:, 0].astype(np.uint8)
        t = rows[:, 1]
    order = np.lexsort((ch, t))
    if duration is None:
        duration = float(t[order][-1] * FS) if t.size else FS
    return TagStream(channels=ch[order], times_fs=t[order], duration=duration)
