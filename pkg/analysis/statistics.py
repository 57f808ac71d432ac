"""
Channel Statistics
==================

Empirical CDFs and Rayleigh slope fits, Doppler out-of-band rejection,
swap detection on singular-vector series and the sorted-order comparisons.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from constants import Analysis, Scenario
from models.doppler import Spectrum
from models.eigenmodel import assemble_trace
from models.types import EigenTrace
from utils.errors import AnalysisError
from utils.numkit import ORDER_DESCENDING, svd

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cdf:
    """Staircase CDF; levels in dB relative to the RMS (or a shared reference)"""
    levels_db: np.ndarray
    prob: np.ndarray
    sample_count: int

    def __len__(self) -> int:
        return self.levels_db.size

    def at(self, levels) -> np.ndarray:
        """P(level <= x) read off the staircase"""
        idx = np.searchsorted(self.levels_db, np.asarray(levels, dtype=np.float64), side="right") - 1
        return np.where(idx >= 0, self.prob[np.clip(idx, 0, None)], 0.0)


def empirical_cdf(magnitudes, reference_rms: Optional[float] = None,
                  step_db: float = Analysis.CDF_STEP_DB) -> Cdf:
    x = np.asarray(magnitudes, dtype=np.float64).ravel()
    if x.size == 0:
        raise AnalysisError("empirical CDF of an empty sample")
    if x.size < Analysis.MIN_CDF_SAMPLES:
        raise AnalysisError(f"need at least {Analysis.MIN_CDF_SAMPLES} samples, got {x.size}")
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise AnalysisError("magnitudes must be finite and non-negative")
    rms = float(reference_rms) if reference_rms is not None else float(np.sqrt(np.mean(x ** 2)))
    if rms <= 0:
        raise AnalysisError("all magnitudes are zero")

    with np.errstate(divide="ignore"):
        levels = np.sort(20.0 * np.log10(x / rms))
    finite = levels[np.isfinite(levels)]
    if finite.size == 0:
        raise AnalysisError("no non-zero magnitudes")
    lo = np.ceil(round(finite[0] / step_db, 9)) * step_db
    hi = np.ceil(round(finite[-1] / step_db, 9)) * step_db
    grid = lo + step_db * np.arange(int(round((hi - lo) / step_db)) + 1)
    prob = np.searchsorted(levels, grid + 1e-12, side="right") / x.size
    return Cdf(levels_db=grid, prob=prob, sample_count=int(x.size))


def rayleigh_slope(cdf: Cdf, p_lo: float = Analysis.SLOPE_P_LO, p_hi: float = Analysis.SLOPE_P_HI) -> float:
    """Least-squares dB per decade of probability between p_lo and p_hi"""
    if not 0 < p_lo < p_hi < 0.5:
        raise AnalysisError(f"probability window must satisfy 0 < p_lo < p_hi < 0.5, got [{p_lo}, {p_hi}]")
    mask = (cdf.prob >= p_lo) & (cdf.prob <= p_hi)
    log_p = np.log10(cdf.prob[mask])
    if mask.sum() < 3 or np.ptp(log_p) == 0:
        raise AnalysisError(f"not enough CDF points between p={p_lo:g} and p={p_hi:g} for a slope fit")
    slope, _ = np.polyfit(log_p, cdf.levels_db[mask], 1)
    return float(slope)


def band_rejection(spec: Spectrum, edge: float) -> float:
    """Peak PSD minus the largest PSD at |f| > edge (Hz)"""
    outside = np.abs(spec.bin_freqs) > edge
    if not np.any(outside):
        raise AnalysisError(f"spectrum has no bins beyond +/-{edge:g} Hz")
    return float(np.max(spec.psd_db) - np.max(spec.psd_db[outside]))


def oob_rejection(spec: Spectrum, f_d: float) -> float:
    """Rejection beyond the Doppler band plus a 5% leakage guard"""
    return band_rejection(spec, f_d * (1.0 + Analysis.OOB_GUARD))


def column_correlation(U_series) -> np.ndarray:
    """|u_1(t_n)^H u_1(t_{n+1})| for consecutive samples"""
    U = np.asarray(U_series, dtype=np.complex128)
    if U.ndim != 3 or U.shape[0] < 2:
        raise AnalysisError("column correlation needs at least two matrices")
    first = U[:, :, 0]
    return np.abs(np.sum(first[:-1].conj() * first[1:], axis=1))


def detect_swaps(U_series, threshold: float = Scenario.SWAP_THRESHOLD) -> List[int]:
    """Sample indices n where the first column decorrelates between n and n+1"""
    if not 0 < threshold < 1:
        raise AnalysisError(f"threshold must lie in (0, 1), got {threshold}")
    return [int(n) for n in np.flatnonzero(column_correlation(U_series) < threshold)]


def count_crossings(values) -> List[int]:
    """Indices n where the magnitude ranking of the modes differs between n and n+1"""
    mags = np.abs(np.asarray(values))
    if mags.ndim != 2 or mags.shape[0] < 2:
        raise AnalysisError("crossing count needs a (T, modes) series with T >= 2")
    ranks = np.argsort(-mags, axis=1, kind="stable")
    changed = np.any(ranks[1:] != ranks[:-1], axis=1)
    return [int(n) for n in np.flatnonzero(changed)]


def distribution_compare(a: Cdf, b: Cdf) -> float:
    """Sup distance between two CDFs over their common level range"""
    lo = max(a.levels_db[0], b.levels_db[0])
    hi = min(a.levels_db[-1], b.levels_db[-1])
    if lo > hi:
        raise AnalysisError(f"CDF ranges do not overlap ([{a.levels_db[0]:.2f}, {a.levels_db[-1]:.2f}] vs "
                            f"[{b.levels_db[0]:.2f}, {b.levels_db[-1]:.2f}] dB)")
    points = np.union1d(a.levels_db, b.levels_db)
    points = points[(points >= lo) & (points <= hi)]
    return float(np.max(np.abs(a.at(points) - b.at(points))))


def selection_equivalence(trace: EigenTrace) -> float:
    """
    Largest relative gap, over samples, between the sorted |s_i| of a trace
    and the descending singular values of its assembled channel.
    """
    H = assemble_trace(trace).H
    gains = np.sort(np.abs(trace.singular_values), axis=1)[:, ::-1]
    worst = 0.0
    for k in range(len(trace)):
        reference = svd(H[k], order=ORDER_DESCENDING).values[: gains.shape[1]]
        scale = max(float(reference[0]), 1e-300)
        worst = max(worst, float(np.max(np.abs(gains[k] - reference))) / scale)
    logger.debug(f"selection equivalence over {len(trace)} samples: {worst:.3e}")
    return worst
