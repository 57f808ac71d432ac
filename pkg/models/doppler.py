"""
Virtual Doppler Generators
==========================

Doppler filter shapes, tone-set construction, tone sums and the Welch
periodogram used to check the resulting spectra.

Two filter families are supported:
- vector: slow fading for first-column singular-vector elements, a 1/|f|
  skirt around a dominant DC tone, confined to +/-0.255 f_d
- value: the classical (Jakes) bathtub inside (-f_d, f_d) for singular values
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import signal

from constants import Analysis, Doppler
from utils.errors import AnalysisError, ConfigError, FilterSingularityError

logger = logging.getLogger(__name__)

KIND_VECTOR = "vector"
KIND_VALUE = "value"
_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ToneSet:
    """Frequencies (Hz), filter amplitudes and random phases of one generator"""
    frequencies: np.ndarray
    amplitudes: np.ndarray
    phases: np.ndarray
    kind: str = KIND_VECTOR
    band_edge: Optional[float] = None

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=np.float64)
        amps = np.asarray(self.amplitudes, dtype=np.float64)
        phases = np.asarray(self.phases, dtype=np.float64)
        if not (freqs.ndim == amps.ndim == phases.ndim == 1) or not (freqs.size == amps.size == phases.size):
            raise ValueError("tone set needs equal-length 1-D frequency, amplitude and phase arrays")
        if np.any(amps < 0):
            raise ValueError("tone amplitudes must be non-negative")
        if np.any(phases < 0) or np.any(phases >= _TWO_PI):
            raise ValueError("tone phases must lie in [0, 2*pi)")
        if self.band_edge is not None and np.any(np.abs(freqs) > self.band_edge * (1 + 1e-12)):
            raise ValueError(f"tone frequencies exceed the declared band +/-{self.band_edge:g} Hz")
        for name, value in (("frequencies", freqs), ("amplitudes", amps), ("phases", phases)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __len__(self) -> int:
        return self.frequencies.size

    @property
    def weights(self) -> np.ndarray:
        """Complex tone weights A * e^{j phi}"""
        return self.amplitudes * np.exp(1j * self.phases)

    @property
    def power(self) -> float:
        return float(np.sum(self.amplitudes ** 2))


@dataclass(frozen=True)
class Spectrum:
    """Welch PSD in dB relative to its peak, bins ascending in Hz"""
    bin_freqs: np.ndarray
    psd_db: np.ndarray
    resolution: float
    f_d: Optional[float] = None

    @property
    def normalized_freqs(self) -> np.ndarray:
        if not self.f_d:
            raise AnalysisError("spectrum has no Doppler reference for f/f_d")
        return self.bin_freqs / self.f_d


def _scalar_or_array(values: np.ndarray):
    return float(values) if values.ndim == 0 else values


def vector_filter(f, f_d: float, n_sam: int, k_f: float, n: int):
    """
    Singular-vector filter: 1/(0.6 N_sam sqrt(1+K_f) |f/f_d|) capped at
    A_uv = 1/sqrt(n), A_uv at DC and zero beyond the 0.255 f_d tone span.
    """
    if f_d <= 0 or n < 2 or n_sam <= 0:
        raise ValueError(f"vector_filter needs f_d > 0, n >= 2, n_sam > 0 (got {f_d}, {n}, {n_sam})")
    f = np.asarray(f, dtype=np.float64)
    cap = 1.0 / math.sqrt(n)
    ratio = np.abs(f) / f_d
    with np.errstate(divide="ignore"):
        skirt = 1.0 / (Doppler.VECTOR_FILTER_FACTOR * n_sam * math.sqrt(1.0 + k_f) * ratio)
    out = np.where(ratio == 0, cap, np.minimum(skirt, cap))
    out = np.where(ratio <= Doppler.VECTOR_BAND * (1 + 1e-12), out, 0.0)
    return _scalar_or_array(out)


def value_filter(f, f_d: float):
    """Classical Doppler filter 1/sqrt|1 - (f/f_d)^2| inside (-f_d, f_d)"""
    if f_d <= 0:
        raise ValueError(f"value_filter needs f_d > 0, got {f_d}")
    f = np.asarray(f, dtype=np.float64)
    ratio = np.abs(f) / f_d
    if np.any(ratio == 1.0):
        raise FilterSingularityError("classical filter evaluated at |f| = f_d")
    inside = ratio < 1.0
    out = np.zeros_like(ratio)
    out[inside] = 1.0 / np.sqrt(np.abs(1.0 - ratio[inside] ** 2))
    return _scalar_or_array(out)


def tone_count(n_sam: int) -> int:
    """N_freq = N_sam / 30, rounded half up"""
    return int(math.floor(n_sam / Doppler.SAMPLES_PER_TONE + 0.5))


def tone_grid(kind: str, f_d: float, n_freq: int) -> np.ndarray:
    """Uniform tone grid in Hz; the vector grid contains DC, the value grid stops short of +/-f_d."""
    if kind == KIND_VECTOR:
        half = n_freq // 2
        step = Doppler.VECTOR_BAND / max(half, 1)
        return np.arange(-half, n_freq - half) * step * f_d
    if kind == KIND_VALUE:
        edge = n_freq / (n_freq + 1.0)
        return np.linspace(-edge, edge, n_freq) * f_d
    raise ValueError(f"unknown tone kind {kind!r}")


def make_tone_set(kind: str, f_d: float, n_sam: int, k_f: float, n: int,
                  rng: np.random.Generator, headroom: float = 1.0) -> ToneSet:
    """
    Build one generator's tones. n_sam is the generated (pre-discard) length.
    headroom scales the non-DC vector tones; the value kind ignores it.
    """
    if n_sam < Doppler.MIN_SAMPLES:
        raise ConfigError("samples", f"need at least {Doppler.MIN_SAMPLES} samples for two tones, got {n_sam}")
    n_freq = tone_count(n_sam)
    freqs = tone_grid(kind, f_d, n_freq)
    if kind == KIND_VECTOR:
        amps = np.asarray(vector_filter(freqs, f_d, n_sam, k_f, n), dtype=np.float64)
        amps = np.where(freqs == 0, amps, amps * headroom)
        edge = Doppler.VECTOR_BAND * f_d
    else:
        amps = np.asarray(value_filter(freqs, f_d), dtype=np.float64)
        edge = f_d
    phases = rng.uniform(0.0, _TWO_PI, size=n_freq)
    logger.debug(f"{kind} tone set: {n_freq} tones, power {np.sum(amps ** 2):.4f}")
    return ToneSet(frequencies=freqs, amplitudes=amps, phases=phases, kind=kind, band_edge=edge)


def tone_sum(ts: ToneSet, n: int, s_f: float, f_d: float) -> complex:
    """sum_p A_p exp(j(2 pi n f_p / (S_f f_d) + phi_p)) at one sample index"""
    arg = _TWO_PI * n * ts.frequencies / (s_f * f_d) + ts.phases
    return complex(np.sum(ts.amplitudes * np.exp(1j * arg)))


def tone_series(ts: ToneSet, start: int, count: int, s_f: float, f_d: float) -> np.ndarray:
    """
    tone_sum for sample indices start .. start+count-1, computed as one matrix
    product: n = start + c*B + b splits each phasor into a per-row part
    e^{j2 pi b nu} and a per-block rotation e^{j2 pi (start + cB) nu}.
    """
    if count <= 0:
        return np.zeros(0, dtype=np.complex128)
    nu = ts.frequencies / (s_f * f_d)
    block = max(1, int(math.isqrt(count)))
    blocks = -(-count // block)
    base = np.exp(1j * _TWO_PI * np.outer(np.arange(block), nu))
    offsets = start + np.arange(blocks) * block
    rotations = ts.weights[:, None] * np.exp(1j * _TWO_PI * np.outer(nu, offsets))
    grid = base @ rotations
    return grid.T.reshape(-1)[:count]


def phase_trajectory(ts: ToneSet, n: int, s_f: float, f_d: float, previous: complex = 1.0 + 0j) -> complex:
    """Unit-modulus e^{j theta_N}; an exactly zero sum keeps the previous phase."""
    total = tone_sum(ts, n, s_f, f_d)
    magnitude = abs(total)
    if magnitude == 0.0:
        logger.warning(f"⚠️ zero tone sum at sample {n}; reusing previous phase")
        return complex(previous)
    return total / magnitude


def phase_series(ts: ToneSet, start: int, count: int, s_f: float, f_d: float) -> np.ndarray:
    """Vectorized phase_trajectory over a sample range"""
    total = tone_series(ts, start, count, s_f, f_d)
    magnitude = np.abs(total)
    zero = magnitude == 0.0
    if not np.any(zero):
        return total / magnitude
    logger.warning(f"⚠️ {int(zero.sum())} zero tone sums; reusing previous phase")
    out = np.ones(count, dtype=np.complex128)
    last = 1.0 + 0j
    for i in range(count):
        if not zero[i]:
            last = total[i] / magnitude[i]
        out[i] = last
    return out


def periodogram(series, f_s: float, segments: int = Analysis.DEFAULT_SEGMENTS,
                f_d: Optional[float] = None) -> Spectrum:
    """Welch PSD with a Hann window and 50% overlap, normalized to a 0 dB peak."""
    x = np.asarray(series, dtype=np.complex128)
    if segments < 1:
        raise AnalysisError(f"segments must be >= 1, got {segments}")
    nperseg = int(2 * x.size / (segments + 1))
    if x.ndim != 1 or nperseg < 16:
        raise AnalysisError(f"series of {x.size} samples is shorter than one segment for {segments} segments")
    freqs, psd = signal.welch(
        x, fs=f_s, window="hann", nperseg=nperseg, noverlap=nperseg // 2,
        detrend=False, return_onesided=False, scaling="density",
    )
    freqs = np.fft.fftshift(freqs)
    psd = np.fft.fftshift(np.real(psd))
    peak = float(psd.max())
    if peak <= 0:
        raise AnalysisError("series has no power")
    psd_db = 10.0 * np.log10(np.maximum(psd / peak, 1e-30))
    return Spectrum(bin_freqs=freqs, psd_db=psd_db, resolution=f_s / nperseg, f_d=f_d)
