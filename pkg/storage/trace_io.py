"""
Trace Files
===========

Binary layout (little-endian):

    header   '<4sHHHQdddBBq' = magic "EVCM", version, N, M, N_sam, f_d, S_f,
             K_f, class tag (I..V -> 1..5), payload kind, seed   (52 bytes)
    payload  per sample, complex values as two float64 (re, im), row-major:
             eigen    U (N*N), diag(S) (min(N, M)), V (M*M)
             physical H (N*M)
             both     eigen block followed by H
"""

import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
from typing_extensions import Literal

from models.eigenmodel import assemble_trace
from models.types import MODEL_CLASSES, ChannelTrace, EigenTrace, ModelConfig, embed_singular_values
from storage.files import atomic_write
from utils.errors import ConfigError, TraceFormatError

logger = logging.getLogger(__name__)

MAGIC = b"EVCM"
FORMAT_VERSION = 1
HEADER_STRUCT = struct.Struct("<4sHHHQdddBBq")
HEADER_SIZE = HEADER_STRUCT.size
SAMPLE_DTYPE = np.dtype("<c16")

PayloadKind = Literal["eigen", "physical", "both"]
PAYLOAD_KINDS = ("eigen", "physical", "both")


@dataclass(frozen=True)
class TraceHeader:
    n: int
    m: int
    n_sam: int
    f_d: float
    s_f: float
    k_f: float
    model_class: str
    payload: str
    seed: int
    version: int = FORMAT_VERSION

    @property
    def values_per_sample(self) -> int:
        eigen = self.n * self.n + min(self.n, self.m) + self.m * self.m
        physical = self.n * self.m
        return {"eigen": eigen, "physical": physical, "both": eigen + physical}[self.payload]

    @property
    def payload_bytes(self) -> int:
        return self.n_sam * self.values_per_sample * SAMPLE_DTYPE.itemsize

    @property
    def file_bytes(self) -> int:
        return HEADER_SIZE + self.payload_bytes

    def pack(self) -> bytes:
        return HEADER_STRUCT.pack(
            MAGIC, self.version, self.n, self.m, self.n_sam, self.f_d, self.s_f, self.k_f,
            MODEL_CLASSES.index(self.model_class) + 1, PAYLOAD_KINDS.index(self.payload), self.seed,
        )

    @classmethod
    def unpack(cls, raw: bytes) -> "TraceHeader":
        if len(raw) < HEADER_SIZE:
            raise TraceFormatError(f"file too short for a header ({len(raw)} of {HEADER_SIZE} bytes)")
        magic, version, n, m, n_sam, f_d, s_f, k_f, tag, kind, seed = HEADER_STRUCT.unpack(raw[:HEADER_SIZE])
        if magic != MAGIC:
            raise TraceFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise TraceFormatError(f"unsupported trace version {version}")
        if not 1 <= tag <= len(MODEL_CLASSES):
            raise TraceFormatError(f"unknown class tag {tag}")
        if kind >= len(PAYLOAD_KINDS):
            raise TraceFormatError(f"unknown payload kind {kind}")
        return cls(n=n, m=m, n_sam=n_sam, f_d=f_d, s_f=s_f, k_f=k_f, model_class=MODEL_CLASSES[tag - 1],
                   payload=PAYLOAD_KINDS[kind], seed=seed, version=version)

    def to_config(self) -> ModelConfig:
        try:
            return ModelConfig(n=self.n, m=self.m, f_d=self.f_d, s_f=self.s_f, n_sam=self.n_sam,
                               k_f=self.k_f, model_class=self.model_class, seed=self.seed)
        except ConfigError as e:
            raise TraceFormatError(f"header describes an invalid model: {e}") from e

    def to_dict(self) -> dict:
        return {
            "magic": MAGIC.decode("ascii"), "version": self.version, "n": self.n, "m": self.m,
            "n_sam": self.n_sam, "f_d_hz": self.f_d, "s_f": self.s_f, "k_f": self.k_f,
            "class": self.model_class, "payload": self.payload, "seed": self.seed,
            "payload_bytes": self.payload_bytes,
        }


@dataclass(frozen=True)
class TraceFile:
    """What a trace file holds: its header plus whichever payloads it carries"""
    path: Path
    header: TraceHeader
    eigen: Optional[EigenTrace] = None
    channel: Optional[ChannelTrace] = None


def header_for(config: ModelConfig, n_sam: int, payload: str) -> TraceHeader:
    return TraceHeader(n=config.n, m=config.m, n_sam=n_sam, f_d=config.f_d, s_f=config.s_f,
                       k_f=config.k_f, model_class=config.model_class, payload=payload, seed=config.seed)


def write_trace(trace: Union[EigenTrace, ChannelTrace], path, payload: Optional[PayloadKind] = None) -> TraceFile:
    """
    Serialize a trace. Eigen traces default to the eigen payload; channel
    traces can only be written as physical.
    """
    if isinstance(trace, ChannelTrace):
        payload = payload or "physical"
        if payload != "physical":
            raise TraceFormatError("a channel trace carries no eigen components")
        blocks = [trace.H.reshape(len(trace), -1)]
        eigen, channel = None, trace
    else:
        payload = payload or "eigen"
        if payload not in PAYLOAD_KINDS:
            raise TraceFormatError(f"unknown payload kind {payload!r}")
        eigen = trace
        channel = assemble_trace(trace) if payload != "eigen" else None
        blocks = []
        if payload != "physical":
            blocks += [trace.U.reshape(len(trace), -1), trace.singular_values, trace.V.reshape(len(trace), -1)]
        if channel is not None:
            blocks.append(channel.H.reshape(len(trace), -1))

    header = header_for(trace.config, len(trace), payload)
    body = np.ascontiguousarray(np.concatenate(blocks, axis=1), dtype=SAMPLE_DTYPE)
    path = Path(path)
    with atomic_write(path, "wb") as handle:
        handle.write(header.pack())
        handle.write(body.tobytes())
    logger.info(f"📦 wrote {payload} trace {path} ({header.file_bytes:,} bytes, {len(trace)} samples)")
    return TraceFile(path=path, header=header,
                     eigen=eigen if payload != "physical" else None, channel=channel)


def read_header(path) -> TraceHeader:
    with open(path, "rb") as handle:
        return TraceHeader.unpack(handle.read(HEADER_SIZE))


def load_trace(path) -> TraceFile:
    path = Path(path)
    raw = path.read_bytes()
    header = TraceHeader.unpack(raw)
    if len(raw) != header.file_bytes:
        raise TraceFormatError(
            f"length mismatch in {path}: header implies {header.file_bytes} bytes, found {len(raw)}"
        )
    config = header.to_config()
    n, m, r, T = header.n, header.m, min(header.n, header.m), header.n_sam
    body = np.frombuffer(raw, dtype=SAMPLE_DTYPE, offset=HEADER_SIZE).reshape(T, header.values_per_sample)
    body = body.astype(np.complex128)
    t = np.arange(T) / config.f_s

    eigen = channel = None
    col = 0
    if header.payload != "physical":
        U = body[:, col:col + n * n].reshape(T, n, n)
        col += n * n
        S = embed_singular_values(body[:, col:col + r], n, m)
        col += r
        V = body[:, col:col + m * m].reshape(T, m, m)
        col += m * m
        eigen = EigenTrace(config=config, U=U, S=S, V=V, t=t)
    if header.payload != "eigen":
        H = body[:, col:col + n * m].reshape(T, n, m)
        channel = ChannelTrace(config=config, H=H, t=t.copy())
    logger.debug(f"read {header.payload} trace {path}: {n}x{m}, {T} samples")
    return TraceFile(path=path, header=header, eigen=eigen, channel=channel)


def read_trace(path) -> Union[EigenTrace, ChannelTrace]:
    """The eigen trace when the file has one, otherwise the physical channel"""
    loaded = load_trace(path)
    return loaded.eigen if loaded.eigen is not None else loaded.channel
