"""
Class V Eigen-Domain Generator
==============================

Builds U(t), S(t), V(t) directly:
1. first singular-vector columns from virtual Doppler tone sums, with the
   last element closing the unit norm
2. the rest of U and V carried along by Householder transitions, starting
   from the SVD of one random channel sample
3. singular values from classical-Doppler tone sums, ratio-shaped and
   normalized so the mean total power gain is N*M
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from constants import Doppler, Numerics
from models.doppler import KIND_VALUE, KIND_VECTOR, make_tone_set, phase_series, tone_series
from models.types import ChannelTrace, EigenTrace, ModelConfig, embed_singular_values
from utils.errors import ConfigError, ConstraintViolationError, DimensionError, NormError
from utils.numkit import (
    assemble, householder_transition, reorthonormalize, svd, transport_step, unitarity_error,
)
from utils.seeding import StreamFactory

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FirstColumnSeries:
    """Unit-norm first columns (T, dim) and the samples where capping kicked in"""
    vectors: np.ndarray
    capped: np.ndarray

    @property
    def cap_rate(self) -> float:
        return float(np.mean(self.capped)) if self.capped.size else 0.0


def _kept_range(cfg: ModelConfig):
    generated = cfg.generated_length
    return generated, generated - cfg.n_sam


def vector_headroom(dim: int) -> float:
    """Scale for the non-DC vector tones: literal amplitudes at dim 2, 0.8 / (dim - 1) above"""
    if dim <= 2:
        return 1.0
    return Doppler.VECTOR_NOISE_HEADROOM / (dim - 1)


def gen_first_vector_series(dim: int, cfg: ModelConfig, streams: StreamFactory,
                            headroom: Optional[float] = None) -> FirstColumnSeries:
    """
    First-column series u_1(t_n) of length cfg.n_sam.

    Elements 1..dim-1 are independent vector-kind tone sums. The last element
    takes the remaining norm and the phase of a separate tone sum. When the
    free elements already exceed unit power they are scaled back onto the
    unit sphere and the last element is zero for that sample.
    """
    if dim < 2:
        raise DimensionError(f"first-column series needs dim >= 2, got {dim}")
    if headroom is None:
        headroom = vector_headroom(dim)
    generated, start = _kept_range(cfg)
    count = cfg.n_sam

    vectors = np.empty((count, dim), dtype=np.complex128)
    for i in range(dim - 1):
        ts = make_tone_set(KIND_VECTOR, cfg.f_d, generated, cfg.k_f, dim, streams.generator("element", i), headroom)
        vectors[:, i] = tone_series(ts, start, count, cfg.s_f, cfg.f_d)
    phase_tones = make_tone_set(KIND_VECTOR, cfg.f_d, generated, cfg.k_f, dim, streams.generator("phase"), headroom)
    phase = phase_series(phase_tones, start, count, cfg.s_f, cfg.f_d)

    free = vectors[:, :-1]
    power = np.sum(np.abs(free) ** 2, axis=1)
    capped = power > 1.0
    if np.any(capped):
        free[capped] /= np.sqrt(power[capped])[:, None]
        power = np.where(capped, 1.0, power)
    vectors[:, -1] = np.sqrt(np.clip(1.0 - power, 0.0, None)) * phase
    vectors /= np.linalg.norm(vectors, axis=1)[:, None]

    series = FirstColumnSeries(vectors=vectors, capped=capped)
    rate = series.cap_rate
    if rate > Doppler.CAP_ABORT_RATE:
        raise ConstraintViolationError(
            f"unit-norm constraint capped on {rate:.1%} of samples for dim {dim} "
            f"(limit {Doppler.CAP_ABORT_RATE:.0%}); try a smaller dimension or a larger K_f"
        )
    if rate > Doppler.CAP_WARN_RATE:
        logger.warning(f"⚠️ unit-norm constraint capped on {rate:.2%} of samples (dim {dim})")
    else:
        logger.debug(f"dim {dim} first-column series: capping rate {rate:.3%}")
    return series


def complete_matrices(u1_series: np.ndarray, seed_matrix: np.ndarray,
                      reortho_interval: int = Numerics.REORTHO_INTERVAL) -> np.ndarray:
    """
    Carry a unitary seed along a first-column series with Householder steps.

    The seed is first rotated so its first column equals u1_series[0]; every
    later matrix is T(u1[n-1] -> u1[n]) applied to the previous one. Every
    reortho_interval steps the matrix is re-orthonormalized with column one
    pinned to the target vector.
    """
    u1 = np.asarray(u1_series, dtype=np.complex128)
    seed = np.asarray(seed_matrix, dtype=np.complex128)
    if u1.ndim != 2 or seed.shape != (u1.shape[1], u1.shape[1]):
        raise DimensionError(f"seed {seed.shape} does not match vectors of length {u1.shape[-1]}")
    err = unitarity_error(seed)
    if err >= Numerics.UNITARY_TOL:
        raise NormError(f"seed matrix is not unitary (error {err:.3e})")

    count, dim = u1.shape
    out = np.empty((count, dim, dim), dtype=np.complex128)
    if count == 0:
        return out
    out[0] = householder_transition(seed[:, 0], u1[0]) @ seed
    for n in range(1, count):
        current = transport_step(out[n - 1], u1[n - 1], u1[n])
        if reortho_interval and n % reortho_interval == 0:
            drift = unitarity_error(current)
            current[:, 0] = u1[n]
            current = reorthonormalize(current, keep_first=True)
            if drift > 1e-12:
                logger.warning(f"⚠️ unitarity drift {drift:.2e} at step {n} before re-orthonormalization")
        out[n] = current
    return out


def gen_singular_values(cfg: ModelConfig, streams: StreamFactory) -> np.ndarray:
    """
    (n_sam, min(n, m)) complex singular values: classical-Doppler tone sums
    plus the line-of-sight tone, ratio-shaped, then scaled so the mean of
    sum_i |s_i|^2 over the emitted samples is exactly n*m.
    """
    modes = cfg.modes
    if cfg.s_ratios is not None and len(cfg.s_ratios) != modes - 1:
        raise ConfigError("s_ratios", f"needs {modes - 1} values, got {len(cfg.s_ratios)}")
    generated, start = _kept_range(cfg)
    count = cfg.n_sam
    n_idx = start + np.arange(count)

    values = np.empty((count, modes), dtype=np.complex128)
    for i in range(modes):
        ts = make_tone_set(KIND_VALUE, cfg.f_d, generated, cfg.k_f, modes, streams.generator("mode", i))
        values[:, i] = tone_series(ts, start, count, cfg.s_f, cfg.f_d)
        if cfg.k_f > 0:
            values[:, i] += np.sqrt(cfg.k_f) * np.exp(2j * np.pi * n_idx / cfg.s_f) / np.sum(ts.amplitudes)

    if cfg.s_ratios:
        for j, ratio in enumerate(cfg.s_ratios):
            current = np.mean(np.abs(values[:, j + 1]))
            values[:, j + 1] *= ratio * np.mean(np.abs(values[:, j])) / current

    total = float(np.sum(np.mean(np.abs(values) ** 2, axis=0)))
    values *= np.sqrt(cfg.n * cfg.m / total)
    return values


def constant_singular_values(n: int, m: int, count: int) -> np.ndarray:
    """Fixed gains s_i proportional to sqrt(r + 1 - i) with sum |s_i|^2 = n*m"""
    r = min(n, m)
    levels = np.sqrt((r + 1 - np.arange(1, r + 1)) * 2.0 * n * m / (r * (r + 1)))
    return np.tile(levels.astype(np.complex128), (count, 1))


def random_seed_pair(n: int, m: int, rng: np.random.Generator):
    """U and V from the SVD of one complex Gaussian channel sample"""
    H0 = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2.0)
    triple = svd(H0)
    return triple.U, triple.V


def gen_class_v(cfg: ModelConfig) -> EigenTrace:
    if cfg.model_class != "V":
        raise ConfigError("class", f"gen_class_v needs class V, got {cfg.model_class}")
    streams = StreamFactory(cfg.seed)
    U0, V0 = random_seed_pair(cfg.n, cfg.m, streams.generator("seed", "H"))

    u1 = gen_first_vector_series(cfg.n, cfg, streams.child("u"))
    v1 = gen_first_vector_series(cfg.m, cfg, streams.child("v"))
    U = complete_matrices(u1.vectors, U0)
    V = complete_matrices(v1.vectors, V0)
    S = embed_singular_values(gen_singular_values(cfg, streams.child("s")), cfg.n, cfg.m)

    logger.info(
        f"✅ class V trace {cfg.n}x{cfg.m}, {cfg.n_sam} samples "
        f"(capping u {u1.cap_rate:.2%}, v {v1.cap_rate:.2%})"
    )
    return EigenTrace(config=cfg, U=U, S=S, V=V, t=cfg.timestamps())


def generate(cfg: ModelConfig) -> EigenTrace:
    """Trace for any model class"""
    if cfg.model_class == "V":
        return gen_class_v(cfg)
    from models import detclasses

    if cfg.model_class == "IV":
        return detclasses.class4(cfg)
    return detclasses.deterministic_trace(cfg)


def assemble_trace(trace: EigenTrace) -> ChannelTrace:
    """The equivalent physical channel H = U S V^H for every sample"""
    H = assemble(trace.U, trace.S, trace.V)
    return ChannelTrace(config=trace.config, H=H, t=trace.t.copy())
