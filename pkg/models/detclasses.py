"""
Deterministic Model Classes
===========================

Classes I-III give closed-form U(t), V(t) for 2x2 and 4x4 links:
- I: bipolar square wave, the vectors flip phase at every zero crossing of sin(wt)
- II: U rotates sinusoidally against a constant V
- III: constant magnitudes with sinusoidal (optionally randomized) phases

Class IV draws the first columns from ring-scatterer fading variables and
completes them with Householder steps. All classes use constant singular
values, so the total power gain never changes.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from models.doppler import ToneSet, tone_series
from models.eigenmodel import complete_matrices, constant_singular_values, random_seed_pair
from models.types import EigenTrace, ModelConfig, embed_singular_values
from utils.errors import ConfigError, DimensionError
from utils.seeding import StreamFactory

logger = logging.getLogger(__name__)

SUPPORTED_SIZES = (2, 4)
MIN_SCATTERERS = 6
_TWO_PI = 2.0 * np.pi
_R2 = 1.0 / np.sqrt(2.0)

UnitaryPair = Tuple[np.ndarray, np.ndarray]


def _sign(x: float) -> float:
    """sgn with sgn(0) = +1, so the pattern is defined at the zero crossings"""
    return -1.0 if x < 0 else 1.0


def _phase_angle(n: int, cfg: ModelConfig) -> float:
    return cfg.omega * n / cfg.f_s


def _check_size(cfg: ModelConfig, label: str):
    if cfg.n not in SUPPORTED_SIZES or cfg.n != cfg.m:
        raise DimensionError(f"class {label} is defined for 2x2 and 4x4 links, got {cfg.n}x{cfg.m}")


def square_wave_2x2(sign: float) -> UnitaryPair:
    U = np.array([[1.0, -sign], [sign, 1.0]], dtype=np.complex128) * _R2
    V = np.array([[1.0, sign], [-sign, 1.0]], dtype=np.complex128) * _R2
    return U, V


def square_wave_4x4(sign: float) -> np.ndarray:
    za, zb, zc, zd = sign / 2, 0.5, -sign / 2, -0.5
    return np.array([
        [za, zc, zc, za],
        [zb, zb, zb, zb],
        [zb, zb, zd, zd],
        [za, zc, za, zc],
    ], dtype=np.complex128)


def swap_pattern(n: int) -> np.ndarray:
    """
    Column permutation taking the positive square-wave state to the negative
    one: [[0, 1], [-1, 0]] for 2x2, pairwise swaps 1<->2 and 3<->4 for 4x4.
    """
    if n == 2:
        return square_wave_2x2(1.0)[0].conj().T @ square_wave_2x2(-1.0)[0]
    if n == 4:
        return square_wave_4x4(1.0).T @ square_wave_4x4(-1.0)
    raise DimensionError(f"swap pattern is defined for 2x2 and 4x4, got {n}x{n}")


def rotation_2x2(angle: float) -> np.ndarray:
    s, c = np.sin(angle), np.cos(angle)
    return np.array([[s, -c], [c, s]], dtype=np.complex128)


def hadamard_2x2() -> np.ndarray:
    return np.array([[1.0, -1.0], [1.0, 1.0]], dtype=np.complex128) * _R2


def z_pattern(za: complex, zb: complex) -> np.ndarray:
    """The 4x4 sign pattern; unitary when |za| = |zb| = 1/2"""
    return np.array([
        [za, -za, za, -za],
        [zb, -zb, -zb, zb],
        [za, za, -za, -za],
        [zb, zb, zb, zb],
    ], dtype=np.complex128)


def class1(n: int, cfg: ModelConfig) -> UnitaryPair:
    _check_size(cfg, "I")
    sign = _sign(np.sin(_phase_angle(n, cfg)))
    if cfg.n == 2:
        return square_wave_2x2(sign)
    U = square_wave_4x4(sign)
    return U, U.T.copy()


def class2(n: int, cfg: ModelConfig) -> UnitaryPair:
    """
    2x2: U = [[sin, -cos], [cos, sin]], V constant. The 4x4 U is the
    Kronecker product of that rotation with the constant 2x2 V, unitary
    for every wt; V is z_pattern(1/2, 1/2).
    """
    _check_size(cfg, "II")
    rotation = rotation_2x2(_phase_angle(n, cfg))
    if cfg.n == 2:
        return rotation, hadamard_2x2()
    return np.kron(rotation, hadamard_2x2()), z_pattern(0.5, 0.5)


def _phase_elements(angle: float, theta: float, scale: float) -> Tuple[complex, complex]:
    u_sin = np.exp(1j * np.pi * np.sin(angle + theta)) * scale
    u_cos = np.exp(1j * np.pi * np.cos(angle + theta)) * scale
    return u_sin, u_cos


def resolve_theta(cfg: ModelConfig, rng: Optional[np.random.Generator] = None) -> float:
    """cfg.theta, or one uniform draw when the config leaves it open"""
    if cfg.theta is not None:
        return float(cfg.theta)
    if rng is None:
        raise ConfigError("theta", "random phase requested but no random stream supplied")
    return float(rng.uniform(0.0, _TWO_PI))


def class3_first_column(angle: float, theta: float) -> np.ndarray:
    u_sin, u_cos = _phase_elements(angle, theta, 0.5)
    return np.array([u_sin, u_cos, u_sin, u_cos], dtype=np.complex128)


def class3(n: int, cfg: ModelConfig, rng: Optional[np.random.Generator] = None) -> UnitaryPair:
    """
    2x2: U = [[u_sin, -u_sin], [u_cos, u_cos]] against the constant V.
    4x4: sample n of the Householder chain built by class3_series, so a
    single sample agrees with the stacked trace.
    """
    _check_size(cfg, "III")
    theta = resolve_theta(cfg, rng)
    if cfg.n == 2:
        u_sin, u_cos = _phase_elements(_phase_angle(n, cfg), theta, _R2)
        U = np.array([[u_sin, -u_sin], [u_cos, u_cos]], dtype=np.complex128)
        return U, hadamard_2x2()
    return class3_series(cfg, theta, count=n + 1)[n], z_pattern(0.5, 0.5)


def class3_series(cfg: ModelConfig, theta: float, count: Optional[int] = None) -> np.ndarray:
    """4x4 class III U(t) for the first count samples (default n_sam), one Householder chain from the z_pattern seed"""
    count = cfg.n_sam if count is None else count
    angles = cfg.omega * np.arange(count) / cfg.f_s
    u1 = np.stack([class3_first_column(a, theta) for a in angles])
    return complete_matrices(u1, z_pattern(0.5, 0.5))


def deterministic_trace(cfg: ModelConfig) -> EigenTrace:
    """Stacked class I-III trace with constant singular values"""
    _check_size(cfg, cfg.model_class)
    count = cfg.n_sam
    U = np.empty((count, cfg.n, cfg.n), dtype=np.complex128)
    V = np.empty((count, cfg.m, cfg.m), dtype=np.complex128)

    if cfg.model_class == "I":
        for k in range(count):
            U[k], V[k] = class1(k, cfg)
    elif cfg.model_class == "II":
        for k in range(count):
            U[k], V[k] = class2(k, cfg)
    elif cfg.model_class == "III":
        theta = resolve_theta(cfg, StreamFactory(cfg.seed).generator("theta"))
        pinned = cfg.with_updates(theta=theta)
        if cfg.n == 2:
            for k in range(count):
                U[k], V[k] = class3(k, pinned)
        else:
            U[:] = class3_series(pinned, theta)
            V[:] = z_pattern(0.5, 0.5)
    else:
        raise ConfigError("class", f"no closed form for class {cfg.model_class}")

    S = embed_singular_values(constant_singular_values(cfg.n, cfg.m, count), cfg.n, cfg.m)
    logger.info(f"✅ class {cfg.model_class} trace {cfg.n}x{cfg.m}, {count} samples")
    return EigenTrace(config=cfg, U=U, S=S, V=V, t=cfg.timestamps())


@dataclass(frozen=True)
class RingScatterSeries:
    samples: np.ndarray
    n_s: int
    s_f: float
    angles: np.ndarray
    phases: np.ndarray


def ring_scatter_series(n_s: int, s_f: float, length: int, rng: Optional[np.random.Generator] = None,
                        angles: Optional[np.ndarray] = None,
                        phases: Optional[np.ndarray] = None) -> RingScatterSeries:
    """
    a(n) = sum_i exp(j(2 pi n sin(phi_i) / S_f + theta_i)).

    Scatterers sit equally spaced on the ring with one random rotation; the
    phases theta_i are uniform. Either set can be given explicitly instead.
    """
    if n_s < 1:
        raise ConfigError("n_s", f"need at least one scatterer, got {n_s}")
    if angles is None or phases is None:
        if rng is None:
            raise ValueError("ring_scatter_series needs a random stream unless angles and phases are given")
    if angles is None:
        angles = rng.uniform(0.0, _TWO_PI) + _TWO_PI * np.arange(n_s) / n_s
    if phases is None:
        phases = rng.uniform(0.0, _TWO_PI, size=n_s)
    angles = np.asarray(angles, dtype=np.float64)
    phases = np.mod(np.asarray(phases, dtype=np.float64), _TWO_PI)
    if angles.shape != (n_s,) or phases.shape != (n_s,):
        raise DimensionError(f"expected {n_s} angles and phases")

    # unit tones at sin(phi_i) on a unit Doppler scale
    tones = ToneSet(frequencies=np.sin(angles), amplitudes=np.ones(n_s), phases=phases, band_edge=1.0)
    samples = tone_series(tones, 0, length, s_f, 1.0)
    return RingScatterSeries(samples=samples, n_s=n_s, s_f=s_f, angles=angles, phases=phases)


def ring_first_columns(dim: int, cfg: ModelConfig, streams: StreamFactory) -> np.ndarray:
    """u_1 = (a_1, ..., a_dim) / ||a|| from independent ring-scatter variables"""
    a = np.column_stack([
        ring_scatter_series(cfg.n_s, cfg.s_f, cfg.n_sam, streams.generator("a", k)).samples
        for k in range(dim)
    ])
    return a / np.linalg.norm(a, axis=1)[:, None]


def class4(cfg: ModelConfig) -> EigenTrace:
    """Ring-scatterer singular vectors with constant singular values"""
    _check_size(cfg, "IV")
    if cfg.n_s < MIN_SCATTERERS:
        raise ConfigError("n_s", f"class IV needs at least {MIN_SCATTERERS} scatterers, got {cfg.n_s}")
    streams = StreamFactory(cfg.seed)
    U0, V0 = random_seed_pair(cfg.n, cfg.m, streams.generator("seed", "H"))
    U = complete_matrices(ring_first_columns(cfg.n, cfg, streams.child("u")), U0)
    V = complete_matrices(ring_first_columns(cfg.m, cfg, streams.child("v")), V0)
    S = embed_singular_values(constant_singular_values(cfg.n, cfg.m, cfg.n_sam), cfg.n, cfg.m)
    logger.info(f"✅ class IV trace {cfg.n}x{cfg.m}, {cfg.n_sam} samples, {cfg.n_s} scatterers")
    return EigenTrace(config=cfg, U=U, S=S, V=V, t=cfg.timestamps())
