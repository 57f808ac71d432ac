"""
Tracking Scenarios
==================

Per-eigenmode SIR under outdated channel knowledge, forced-swap stress
traces, and the sorted re-decomposition that stands in for a conventional
SVD library.

SIR convention: S_hat = U_hat^H H V_hat, entry (i, j) = u_hat_i^H H v_hat_j.
Mode i sees |S_hat[i, i]|^2 over the coherent sum |sum_{j != i} S_hat[i, j]|^2.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from constants import Scenario
from models.detclasses import swap_pattern
from models.eigenmodel import assemble_trace
from models.types import EigenTrace
from utils.errors import ConfigError, DimensionError
from utils.numkit import ORDER_DESCENDING, as_cmatrix, svd

logger = logging.getLogger(__name__)

RULE_FROZEN = "frozen"
RULE_EVERY = "every"
RULE_EVERY_K = "every-k"
RULES = (RULE_FROZEN, RULE_EVERY, RULE_EVERY_K)


@dataclass(frozen=True)
class UpdateRule:
    """When tracked weights are refreshed from the channel"""
    kind: str = RULE_EVERY
    k: int = 1

    def __post_init__(self):
        if self.kind not in RULES:
            raise ConfigError("update", f"must be one of {', '.join(RULES)}, got {self.kind!r}")
        if self.k < 1:
            raise ConfigError("k", f"refresh interval must be >= 1, got {self.k}")

    def refresh_index(self, n):
        """Sample whose decomposition supplies the weights used at sample n"""
        n = np.asarray(n)
        if self.kind == RULE_FROZEN:
            return np.zeros_like(n)
        if self.kind == RULE_EVERY:
            return n
        return (n // self.k) * self.k

    def describe(self) -> str:
        return f"every-{self.k}" if self.kind == RULE_EVERY_K else self.kind

    @classmethod
    def parse(cls, text: str, k: int = 1) -> "UpdateRule":
        text = text.strip().lower()
        if text in ("frozen", "frozen-at-t0"):
            return cls(RULE_FROZEN)
        if text in ("every", "every-sample"):
            return cls(RULE_EVERY)
        if text == "every-k":
            return cls(RULE_EVERY_K, k)
        if text.startswith("every-") and text[6:].isdigit():
            return cls(RULE_EVERY_K, int(text[6:]))
        raise ConfigError("update", f"unknown update rule {text!r}")


@dataclass(frozen=True)
class TrackingPolicy:
    u_update: UpdateRule = field(default_factory=UpdateRule)
    v_update: UpdateRule = field(default_factory=UpdateRule)
    swap_injection: Optional[int] = None
    power_sum: bool = False

    def __post_init__(self):
        if self.swap_injection is not None and self.swap_injection < 1:
            raise ConfigError("swap_period", f"must be >= 1, got {self.swap_injection}")

    def describe(self) -> dict:
        return {
            "u_update": self.u_update.describe(),
            "v_update": self.v_update.describe(),
            "swap_injection": self.swap_injection,
            "interference": "power-sum" if self.power_sum else "coherent",
        }


@dataclass(frozen=True)
class SirSeries:
    """Per-mode SIR in dB over time; +inf marks interference-free samples"""
    t: np.ndarray
    sir_db: np.ndarray
    mode_count: int
    policy: dict
    f_d: float = 1.0

    def __len__(self) -> int:
        return self.t.size

    def capped_db(self, cap: float = Scenario.SIR_CAP_DB) -> np.ndarray:
        return np.clip(self.sir_db, -cap, cap)

    def collapses(self, mode: int = 0, threshold_db: float = 0.0) -> int:
        """Number of samples where the given mode falls below threshold_db"""
        return int(np.count_nonzero(self.sir_db[:, mode] < threshold_db))


def _sir_from_projection(S_hat: np.ndarray, modes: int, power_sum: bool = False) -> np.ndarray:
    """Linear SIR per mode for a (..., n, m) stack of projected channels"""
    core = S_hat[..., :modes, :modes]
    diag = np.diagonal(core, axis1=-2, axis2=-1)
    signal = np.abs(diag) ** 2
    if power_sum:
        interference = np.sum(np.abs(core) ** 2, axis=-1) - signal
    else:
        interference = np.abs(np.sum(core, axis=-1) - diag) ** 2
    clean = interference <= Scenario.SIR_INF_FLOOR * signal
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = signal / interference
    return np.where(clean, np.inf, ratio)


def sir(H, U_hat, V_hat, power_sum: bool = False) -> np.ndarray:
    """Per-mode linear SIR of H seen through the weights U_hat, V_hat"""
    H = as_cmatrix(H, "H")
    U_hat = as_cmatrix(U_hat, "U_hat")
    V_hat = as_cmatrix(V_hat, "V_hat")
    n, m = H.shape
    if U_hat.shape != (n, n) or V_hat.shape != (m, m):
        raise DimensionError(f"weights U{U_hat.shape}, V{V_hat.shape} do not fit a {n}x{m} channel")
    S_hat = U_hat.conj().T @ H @ V_hat
    return _sir_from_projection(S_hat, min(n, m), power_sum)


def to_db(linear: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(linear)


def forced_swap(trace: EigenTrace, period) -> EigenTrace:
    """
    Swap U's eigenvectors on every other block of `period` samples, starting
    unswapped at n = 0. S and V are passed through untouched.
    """
    if period is None or (isinstance(period, float) and math.isinf(period)):
        return trace
    period = int(period)
    if period < 1:
        raise ConfigError("period", f"swap period must be >= 1, got {period}")
    pattern = swap_pattern(trace.config.n)
    swapped = (np.arange(len(trace)) // period) % 2 == 1
    U = trace.U.copy()
    U[swapped] = U[swapped] @ pattern
    logger.debug(f"forced swap with period {period}: {int(swapped.sum())} of {len(trace)} samples swapped")
    return trace.replace_u(U)


def run_tracking(trace: EigenTrace, policy: TrackingPolicy) -> SirSeries:
    """
    Evaluate SIR when the weights come from earlier samples of the trace.

    Weights are current at every refresh sample, where the coupling matrices
    are exactly the identity and the SIR is +inf.
    """
    if policy.swap_injection:
        trace = forced_swap(trace, policy.swap_injection)
    count = len(trace)
    n_idx = np.arange(count)
    iu = policy.u_update.refresh_index(n_idx)
    iv = policy.v_update.refresh_index(n_idx)

    # U_hat^H H V_hat = (U[iu]^H U[n]) S[n] (V[n]^H V[iv])
    left = np.conj(np.swapaxes(trace.U[iu], -1, -2)) @ trace.U
    right = np.conj(np.swapaxes(trace.V, -1, -2)) @ trace.V[iv]
    left[iu == n_idx] = np.eye(trace.config.n)
    right[iv == n_idx] = np.eye(trace.config.m)
    S_hat = left @ trace.S @ right

    modes = trace.config.modes
    sir_db = to_db(_sir_from_projection(S_hat, modes, policy.power_sum))
    return SirSeries(t=trace.t.copy(), sir_db=sir_db, mode_count=modes,
                     policy=policy.describe(), f_d=trace.config.f_d)


def sorted_decomposition(trace: EigenTrace) -> EigenTrace:
    """Re-decompose every assembled sample with descending singular values."""
    H = assemble_trace(trace).H
    U = np.empty_like(trace.U)
    S = np.zeros_like(trace.S)
    V = np.empty_like(trace.V)
    for k in range(len(trace)):
        triple = svd(H[k], order=ORDER_DESCENDING)
        U[k], S[k], V[k] = triple.U, triple.S, triple.V
    return replace(trace, U=U, S=S, V=V)


def sorted_decomposition_sir(trace: EigenTrace, policy: TrackingPolicy) -> SirSeries:
    """SIR when the tracked weights come from a sorted per-sample SVD of the channel"""
    if policy.swap_injection:
        trace = forced_swap(trace, policy.swap_injection)
    series = run_tracking(sorted_decomposition(trace), replace(policy, swap_injection=None))
    described = dict(series.policy, swap_injection=policy.swap_injection, decomposition="sorted")
    return replace(series, policy=described)
