"""
Model Types
===========

Configuration and trace containers shared by the generators, the scenario
layer and the trace file format.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from constants import Defaults, Doppler, Numerics
from utils.errors import ConfigError, DimensionError, NormError
from utils.numkit import unitarity_error

MODEL_CLASSES = ("I", "II", "III", "IV", "V")


@dataclass(frozen=True)
class ModelConfig:
    """All generation parameters for one trace"""
    n: int = Defaults.N
    m: int = Defaults.M
    f_d: float = Defaults.F_D_HZ
    s_f: float = Defaults.S_F_GENERATE
    n_sam: int = Defaults.SAMPLES
    k_f: float = Defaults.K_F
    s_ratios: Optional[Tuple[float, ...]] = None
    model_class: str = Defaults.MODEL_CLASS
    omega: float = Defaults.OMEGA
    n_s: int = Defaults.N_S
    seed: int = Defaults.SEED
    theta: Optional[float] = Defaults.THETA

    def __post_init__(self):
        if self.s_ratios is not None:
            object.__setattr__(self, "s_ratios", tuple(float(r) for r in self.s_ratios))
        if self.model_class not in MODEL_CLASSES:
            raise ConfigError("class", f"must be one of {', '.join(MODEL_CLASSES)}, got {self.model_class!r}")
        if min(self.n, self.m) < 2:
            raise ConfigError("n" if self.n < self.m else "m", f"smallest dimension must be >= 2, got {min(self.n, self.m)}")
        if max(self.n, self.m) > Numerics.SVD_MAX_DIM:
            bad = "n" if self.n > self.m else "m"
            raise ConfigError(bad, f"dimensions above {Numerics.SVD_MAX_DIM} are not supported")
        if not (self.f_d > 0 and math.isfinite(self.f_d)):
            raise ConfigError("f_d_hz", f"must be a positive finite frequency, got {self.f_d}")
        if not (self.s_f > Doppler.NYQUIST_FACTOR and math.isfinite(self.s_f)):
            raise ConfigError("s_f", f"must exceed {Doppler.NYQUIST_FACTOR:g} (Nyquist), got {self.s_f}")
        if self.n_sam < Doppler.MIN_SAMPLES:
            raise ConfigError("samples", f"must be >= {Doppler.MIN_SAMPLES}, got {self.n_sam}")
        if not (self.k_f >= 0 and math.isfinite(self.k_f)):
            raise ConfigError("k_f", f"must be >= 0, got {self.k_f}")
        if self.s_ratios is not None:
            if len(self.s_ratios) != self.modes - 1:
                raise ConfigError("s_ratios", f"needs min(n, m) - 1 = {self.modes - 1} values, got {len(self.s_ratios)}")
            if any(not (r > 0 and math.isfinite(r)) for r in self.s_ratios):
                raise ConfigError("s_ratios", "ratios must be positive and finite")
        if self.n_s < 1:
            raise ConfigError("n_s", f"must be >= 1, got {self.n_s}")
        if self.seed < 0:
            raise ConfigError("seed", f"must be non-negative, got {self.seed}")
        if not math.isfinite(self.omega):
            raise ConfigError("omega", "must be finite")

    @property
    def modes(self) -> int:
        return min(self.n, self.m)

    @property
    def f_s(self) -> float:
        return self.s_f * self.f_d

    @property
    def generated_length(self) -> int:
        """Samples generated before the start-up discard (ceil(N_sam / 0.8))"""
        keep = Doppler.DISCARD_DENOMINATOR - Doppler.DISCARD_NUMERATOR
        return -(-self.n_sam * Doppler.DISCARD_DENOMINATOR // keep)

    def timestamps(self) -> np.ndarray:
        return np.arange(self.n_sam) / self.f_s

    def with_updates(self, **changes) -> "ModelConfig":
        return replace(self, **changes)

    def to_text(self) -> str:
        from utils.config import serialize_config

        return serialize_config(self)


@dataclass(frozen=True)
class EigenTrace:
    """Time series of (U, S, V); stacked arrays with the sample index first"""
    config: ModelConfig
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        T = self.U.shape[0]
        n, m = self.config.n, self.config.m
        if self.U.shape != (T, n, n) or self.S.shape != (T, n, m) or self.V.shape != (T, m, m):
            raise DimensionError(
                f"trace shapes U{self.U.shape} S{self.S.shape} V{self.V.shape} do not fit n={n}, m={m}"
            )
        if self.t.shape != (T,):
            raise DimensionError(f"timestamps must have length {T}, got {self.t.shape}")

    def __len__(self) -> int:
        return self.U.shape[0]

    @property
    def singular_values(self) -> np.ndarray:
        """(T, min(n, m)) complex diagonal gains"""
        return np.diagonal(self.S, axis1=1, axis2=2).copy()

    def validate(self, tol: float = Numerics.UNITARY_TOL):
        """Raise if any sample breaks unitarity or the diagonal-support rule."""
        u_err, v_err = unitarity_error(self.U), unitarity_error(self.V)
        if u_err >= tol or v_err >= tol:
            raise NormError(f"unitarity error U={u_err:.3e}, V={v_err:.3e} exceeds {tol:g}")
        off = self.S.copy()
        r = self.config.modes
        off[:, np.arange(r), np.arange(r)] = 0
        if np.any(off != 0):
            raise DimensionError("S has entries off its diagonal support")

    def replace_u(self, U: np.ndarray) -> "EigenTrace":
        return replace(self, U=U)


@dataclass(frozen=True)
class ChannelTrace:
    """Assembled physical matrices H(t_n) with sampling metadata"""
    config: ModelConfig
    H: np.ndarray
    t: np.ndarray
    f_d: float = field(default=0.0)
    s_f: float = field(default=0.0)

    def __post_init__(self):
        if self.f_d == 0.0:
            object.__setattr__(self, "f_d", self.config.f_d)
        if self.s_f == 0.0:
            object.__setattr__(self, "s_f", self.config.s_f)
        T = self.H.shape[0]
        if self.H.shape != (T, self.config.n, self.config.m) or self.t.shape != (T,):
            raise DimensionError(f"channel trace shape {self.H.shape} does not fit the config")

    def __len__(self) -> int:
        return self.H.shape[0]

    @property
    def f_s(self) -> float:
        return self.f_d * self.s_f


def embed_singular_values(values: np.ndarray, n: int, m: int) -> np.ndarray:
    """Place (T, r) gains on the diagonal of (T, n, m); extra rows/columns stay zero."""
    T, r = values.shape
    S = np.zeros((T, n, m), dtype=np.complex128)
    S[:, np.arange(r), np.arange(r)] = values
    return S


