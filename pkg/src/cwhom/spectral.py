"""Spectral building blocks: frequency grids, filters, and biphoton JSAs.

Frequencies are angular offsets from the (degenerate) center frequency,
in rad/s. Grids are symmetric about zero with an odd point count so that
negation maps grid points onto grid points exactly; downstream code
relies on that to evaluate F(-W) by index reversal.

Fiber Bragg gratings are modeled with a piecewise-uniform coupled-mode
transfer matrix and a super-Gaussian apodization of the coupling
strength. The complex reflection response (magnitude and phase) is what
shapes the biphoton joint spectral amplitude.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, asdict, replace

import numpy as np
from scipy.optimize import minimize

from .units import C_M_PER_S, LAMBDA0_M, wavelength_pm_to_angular

__all__ = [
    "FrequencyGrid",
    "SpectralAmplitude",
    "JointSpectralAmplitude",
    "FbgModel",
    "make_grid_for_filters",
    "make_filter",
    "tabulated_filter",
    "load_filter_table",
    "fbg_response",
    "fbg_reflectivity_fwhm",
    "fit_fbg",
    "load_fbg_model",
    "save_fbg_model",
    "joint_spectral_amplitude",
    "fwhm_from_samples",
]

# Effective index used to convert angular-frequency detuning to the
# propagation detuning of the grating equations. Fixed for fused silica
# fiber near 1550 nm; bandwidth calibration absorbs the residual error.
FBG_EFFECTIVE_INDEX = 1.468

DEFAULT_N_POINTS = 513
DEFAULT_SPAN_FACTOR = 8.0


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform symmetric grid of angular-frequency offsets.

    n_points must be odd and >= 3 so that zero is a grid point and that
    -omega is on the grid whenever omega is.
    """

    n_points: int
    span: float  # half width, rad/s; grid covers [-span, +span]

    def __post_init__(self) -> None:
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ValueError("n_points must be odd and >= 3")
        if not (self.span > 0):
            raise ValueError("span must be positive")

    @property
    def omega(self) -> np.ndarray:
        return np.linspace(-self.span, self.span, self.n_points)

    @property
    def step(self) -> float:
        return 2.0 * self.span / (self.n_points - 1)


def make_grid_for_filters(
    fwhms: list[float] | tuple[float, ...],
    n_points: int = DEFAULT_N_POINTS,
    span_factor: float = DEFAULT_SPAN_FACTOR,
) -> FrequencyGrid:
    """Grid sized to the widest filter: span = span_factor * max FWHM."""
    if not fwhms:
        raise ValueError("at least one filter FWHM required")
    w = max(fwhms)
    if w <= 0:
        raise ValueError("filter FWHM must be positive")
    return FrequencyGrid(n_points=n_points, span=span_factor * w)


@dataclass(frozen=True)
class SpectralAmplitude:
    """Complex field amplitude sampled on a FrequencyGrid (|amp| <= 1)."""

    grid: FrequencyGrid
    amp: np.ndarray

    def __post_init__(self) -> None:
        amp = np.asarray(self.amp, dtype=complex)
        if amp.shape != (self.grid.n_points,):
            raise ValueError("amplitude shape does not match grid")
        if np.max(np.abs(amp)) > 1.0 + 1e-12:
            raise ValueError("|amplitude| must not exceed 1")
        object.__setattr__(self, "amp", amp)

    def mirrored(self) -> np.ndarray:
        """Amplitude evaluated at -omega (exact, by index reversal)."""
        return self.amp[::-1]


@dataclass(frozen=True)
class JointSpectralAmplitude:
    """Biphoton joint spectral amplitude J(W) on a shared grid.

    J(W) refers to the signal photon at +W and the idler at -W.
    """

    grid: FrequencyGrid
    j_amp: np.ndarray

    def __post_init__(self) -> None:
        j = np.asarray(self.j_amp, dtype=complex)
        if j.shape != (self.grid.n_points,):
            raise ValueError("JSA shape does not match grid")
        object.__setattr__(self, "j_amp", j)


# ---------------------------------------------------------------------------
# Analytic filters


def make_filter(grid: FrequencyGrid, kind: str, fwhm: float, center: float = 0.0) -> SpectralAmplitude:
    """Analytic filter amplitude with the given intensity FWHM (rad/s).

    kinds: 'rect', 'gaussian', 'lorentzian'. The FWHM refers to |F|^2.
    Rectangular edges are band-averaged per grid cell so the effective
    width is exact even when edges fall between grid points.
    """
    if fwhm <= 0:
        raise ValueError("fwhm must be positive")
    if fwhm > grid.span:
        raise ValueError("fwhm exceeds grid span")
    w = grid.omega - center
    if kind == "rect":
        # Fractional cell coverage of the band |w| <= fwhm/2, in intensity.
        frac = np.clip((fwhm / 2.0 - np.abs(w)) / grid.step + 0.5, 0.0, 1.0)
        amp = np.sqrt(frac)
    elif kind == "gaussian":
        amp = np.exp(-2.0 * math.log(2.0) * (w / fwhm) ** 2)
    elif kind == "lorentzian":
        amp = 1.0 / np.sqrt(1.0 + (2.0 * w / fwhm) ** 2)
    else:
        raise ValueError(f"unknown filter kind: {kind!r}")
    return SpectralAmplitude(grid=grid, amp=amp.astype(complex))


def tabulated_filter(
    grid: FrequencyGrid,
    omega: np.ndarray,
    reflectance: np.ndarray,
    phase: np.ndarray | None = None,
) -> SpectralAmplitude:
    """Interpolate a measured (omega, |F|^2, phase) table onto a grid.

    Outside the tabulated range the amplitude is zero. Reflectance must
    lie in [0, 1]; abscissae must be strictly increasing.
    """
    omega = np.asarray(omega, dtype=float)
    reflectance = np.asarray(reflectance, dtype=float)
    if omega.ndim != 1 or omega.size < 2:
        raise ValueError("table needs at least two rows")
    if np.any(np.diff(omega) <= 0):
        raise ValueError("table abscissae must be strictly increasing")
    if reflectance.shape != omega.shape:
        raise ValueError("table column lengths differ")
    if np.any(reflectance < 0) or np.any(reflectance > 1 + 1e-12):
        raise ValueError("reflectance must lie in [0, 1]")
    r2 = np.interp(grid.omega, omega, reflectance, left=0.0, right=0.0)
    amp = np.sqrt(np.clip(r2, 0.0, 1.0)).astype(complex)
    if phase is not None:
        phase = np.asarray(phase, dtype=float)
        if phase.shape != omega.shape:
            raise ValueError("table column lengths differ")
        ph = np.interp(grid.omega, omega, phase, left=0.0, right=0.0)
        amp = amp * np.exp(1j * ph)
    return SpectralAmplitude(grid=grid, amp=amp)


def load_filter_table(path) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Read a filter table CSV: wavelength_pm,reflectance[,phase_rad].

    Returns (omega [rad/s], reflectance, phase or None) sorted by omega.
    """
    wl_pm, refl, phase = [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = [c.strip().lower() for c in header]
        if cols[:2] != ["wavelength_pm", "reflectance"]:
            raise ValueError(f"unexpected filter table header: {header}")
        has_phase = len(cols) > 2 and cols[2] == "phase_rad"
        for row in reader:
            if not row:
                continue
            wl_pm.append(float(row[0]))
            refl.append(float(row[1]))
            if has_phase:
                phase.append(float(row[2]))
    omega = np.array([wavelength_pm_to_angular(w) for w in wl_pm])
    refl = np.asarray(refl, dtype=float)
    ph = np.asarray(phase, dtype=float) if phase else None
    order = np.argsort(omega)
    return omega[order], refl[order], (ph[order] if ph is not None else None)


# ---------------------------------------------------------------------------
# Fiber Bragg grating model


@dataclass(frozen=True)
class FbgModel:
    """Piecewise-uniform coupled-mode grating with super-Gaussian apodization.

    kappa(z) = peak_kappa * exp(-ln2 * (2 (z - L/2) / (width * L))**(2 p)),
    so `width` is the FWHM of the coupling profile as a fraction of the
    grating length and `order` p controls how flat the profile top is.
    """

    length: float  # m
    n_sections: int
    peak_kappa: float  # 1/m
    order: float
    width: float  # fraction of length
    detuning_offset: float = 0.0  # rad/s
    design_wavelength: float = LAMBDA0_M  # m

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.n_sections < 16:
            raise ValueError("n_sections must be >= 16")
        if self.peak_kappa < 0:
            raise ValueError("peak_kappa must be nonnegative")
        if self.order < 1.0:
            raise ValueError("order must be >= 1")
        if not (0 < self.width <= 1.0):
            raise ValueError("width must lie in (0, 1]")


def _sinhc(x: np.ndarray) -> np.ndarray:
    """sinh(x)/x, complex-safe, with the x -> 0 limit handled."""
    out = np.ones_like(x)
    small = np.abs(x) < 1e-8
    xs = np.where(small, 1.0, x)
    out = np.sinh(xs) / xs
    return np.where(small, 1.0 + x**2 / 6.0, out)


def _kappa_profile(model: FbgModel) -> np.ndarray:
    n = model.n_sections
    z = (np.arange(n) + 0.5) * (model.length / n)
    u = 2.0 * (z - model.length / 2.0) / (model.width * model.length)
    return model.peak_kappa * np.exp(-math.log(2.0) * np.abs(u) ** (2.0 * model.order))


def fbg_response(model: FbgModel, grid: FrequencyGrid) -> SpectralAmplitude:
    """Complex reflection amplitude r(W) of the grating on a grid.

    Each section contributes the standard uniform-grating 2x2 transfer
    matrix; sections are chained from the input facet. The result
    satisfies |r|^2 + |t|^2 = 1 for this lossless model.
    """
    kappa = _kappa_profile(model)
    dz = model.length / model.n_sections
    # Propagation detuning (1/m) from the angular-frequency offset.
    delta = (grid.omega - model.detuning_offset) * FBG_EFFECTIVE_INDEX / C_M_PER_S
    delta = delta.astype(complex)

    n_w = grid.n_points
    t11 = np.ones(n_w, dtype=complex)
    t12 = np.zeros(n_w, dtype=complex)
    t21 = np.zeros(n_w, dtype=complex)
    t22 = np.ones(n_w, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in kappa:
            gamma = np.sqrt(np.asarray(k**2 - delta**2, dtype=complex))
            ch = np.cosh(gamma * dz)
            shc = _sinhc(gamma * dz) * dz  # sinh(gamma dz) / gamma
            f11 = ch - 1j * delta * shc
            f12 = -1j * k * shc
            f21 = 1j * k * shc
            f22 = ch + 1j * delta * shc
            t11, t12, t21, t22 = (
                t11 * f11 + t12 * f21,
                t11 * f12 + t12 * f22,
                t21 * f11 + t22 * f21,
                t21 * f12 + t22 * f22,
            )
    if not np.all(np.isfinite(t11)):
        raise ValueError("invalid FBG model: transfer matrix overflow (kappa*L too large)")
    r = t21 / t11
    t = 1.0 / t11
    residual = np.max(np.abs(np.abs(r) ** 2 + np.abs(t) ** 2 - 1.0))
    if residual > 1e-9:
        raise ValueError(f"invalid FBG model: energy conservation violated ({residual:.2e})")
    return SpectralAmplitude(grid=grid, amp=r)


def fbg_reflectivity_fwhm(model: FbgModel, n_points: int = 4097, span: float | None = None) -> float:
    """FWHM of |r(W)|^2 in rad/s, by linear interpolation of the crossings."""
    if span is None:
        # Generous span: grating bandwidth scales with kappa and 1/length.
        span = 12.0 * (model.peak_kappa + math.pi / model.length) * C_M_PER_S / FBG_EFFECTIVE_INDEX / 2.0
        span = max(span, 40.0 / model.length * C_M_PER_S / FBG_EFFECTIVE_INDEX)
    grid = FrequencyGrid(n_points=n_points, span=span)
    r2 = np.abs(fbg_response(model, grid).amp) ** 2
    return fwhm_from_samples(grid.omega, r2)


def fwhm_from_samples(x: np.ndarray, y: np.ndarray) -> float:
    """Full width at half the peak value of sampled y(x).

    Linear interpolation between the bracketing samples; on each side
    the first half-maximum crossing walking outward from the peak wins.
    Raises if either crossing is not bracketed by the sampled range.
    """
    i0 = int(np.argmax(y))
    half = y[i0] / 2.0
    if y[0] >= half or y[-1] >= half:
        raise ValueError("half-maximum crossings not bracketed by the sampled range")
    lo = i0
    while y[lo] > half:
        lo -= 1
    x_lo = x[lo] + (x[lo + 1] - x[lo]) * (half - y[lo]) / (y[lo + 1] - y[lo])
    hi = i0
    while y[hi] > half:
        hi += 1
    x_hi = x[hi] - (x[hi] - x[hi - 1]) * (half - y[hi]) / (y[hi - 1] - y[hi])
    return float(x_hi - x_lo)


def fit_fbg(
    omega: np.ndarray,
    reflectance: np.ndarray,
    seed: FbgModel,
    rng_seed: int = 0,
    n_restarts: int = 3,
) -> tuple[FbgModel, float]:
    """Fit (peak_kappa, order, width, detuning_offset) to a measured |r|^2.

    Length and section count are kept from the seed (they describe the
    physical device, not the fit). Derivative-free simplex search with
    `n_restarts` randomized starts around the seed; the best evaluated
    point wins, ties broken by fewest iterations. Returns (model,
    residual) with residual the sum of squared reflectance errors.
    """
    omega = np.asarray(omega, dtype=float)
    reflectance = np.asarray(reflectance, dtype=float)
    if omega.size < 20:
        raise ValueError("too few samples to fit a grating model")
    if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(reflectance))):
        raise ValueError("fit inputs must be finite")
    if np.ptp(reflectance) == 0:
        raise ValueError("degenerate table: reflectance has no variation")
    if np.any(np.diff(omega) <= 0):
        raise ValueError("fit abscissae must be strictly increasing")
    span = max(abs(omega[0]), abs(omega[-1]))
    n_pts = max(257, 2 * omega.size + 1) | 1
    grid = FrequencyGrid(n_points=n_pts, span=span)

    scale_off = max(abs(seed.detuning_offset), 0.05 * span)

    def unpack(x) -> FbgModel:
        return replace(
            seed,
            peak_kappa=seed.peak_kappa * math.exp(x[0]),
            order=max(1.0, seed.order * math.exp(x[1])),
            width=min(1.0, seed.width * math.exp(x[2])),
            detuning_offset=seed.detuning_offset + x[3] * scale_off,
        )

    def residual(x) -> float:
        try:
            model = unpack(x)
            r2 = np.abs(fbg_response(model, grid).amp) ** 2
        except (ValueError, FloatingPointError):
            return 1e12
        fit = np.interp(omega, grid.omega, r2)
        return float(np.sum((fit - reflectance) ** 2))

    x0 = np.zeros(4)
    seed_res = residual(x0)
    if seed_res == 0.0:
        return seed, 0.0

    rng = np.random.default_rng(rng_seed)
    best: tuple[float, int, FbgModel] | None = None
    starts = [x0] + [0.1 * rng.standard_normal(4) for _ in range(n_restarts)]
    for start in starts:
        out = minimize(residual, start, method="Nelder-Mead",
                       options={"xatol": 1e-6, "fatol": 1e-14, "maxiter": 4000})
        cand = (float(out.fun), int(out.nit), unpack(out.x))
        if best is None or cand[:2] < best[:2]:
            best = cand
    assert best is not None
    if best[0] > seed_res:
        return seed, seed_res
    return best[2], best[0]


def load_fbg_model(path) -> FbgModel:
    with open(path) as fh:
        data = json.load(fh)
    return FbgModel(**data)


def save_fbg_model(model: FbgModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(asdict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Joint spectral amplitude


def joint_spectral_amplitude(
    signal: SpectralAmplitude,
    idler: SpectralAmplitude,
    pump_envelope: np.ndarray | None = None,
    normalize: bool = True,
) -> JointSpectralAmplitude:
    """J(W) = F_s(W) * F_i(-W) * pump(W), optionally peak-normalized.

    With a CW pump and pm-scale filters the pump phase-matching envelope
    is flat over the filter support, so it defaults to 1.
    """
    if signal.grid != idler.grid:
        raise ValueError("signal and idler grids must match")
    j = signal.amp * idler.mirrored()
    if pump_envelope is not None:
        pump = np.asarray(pump_envelope, dtype=complex)
        if pump.shape != j.shape:
            raise ValueError("pump envelope shape does not match grid")
        j = j * pump
    peak = np.max(np.abs(j))
    if peak == 0:
        raise ValueError("JSA is identically zero (disjoint filters?)")
    if normalize:
        j = j / peak
    return JointSpectralAmplitude(grid=signal.grid, j_amp=j)
