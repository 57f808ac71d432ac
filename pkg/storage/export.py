"""
CSV Export
==========

Plot-ready text for the analysis products. Every file starts with a header
row naming its columns and units; numbers carry 12 significant digits.

- SirSeries: t_norm (t * f_d), sir1_db .. sirN_db, +/-inf capped at +/-300 dB
- Spectrum:  f_over_fd, psd_db (peak = 0 dB)
- Cdf:       level_db, prob
"""

import csv
import logging
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from analysis.scenario import SirSeries
from analysis.statistics import Cdf
from models.doppler import Spectrum
from storage.files import atomic_write
from utils.errors import TraceFormatError

logger = logging.getLogger(__name__)

Product = Union[SirSeries, Spectrum, Cdf]


def _format(value: float) -> str:
    return f"{value:.12g}"


def _columns(product: Product):
    if isinstance(product, SirSeries):
        header = ["t_norm"] + [f"sir{i + 1}_db" for i in range(product.mode_count)]
        sir = product.capped_db().reshape(len(product), product.mode_count)
        return header, np.column_stack([product.t * product.f_d, sir])
    if isinstance(product, Spectrum):
        if product.f_d:
            return ["f_over_fd", "psd_db"], np.column_stack([product.normalized_freqs, product.psd_db])
        return ["f_hz", "psd_db"], np.column_stack([product.bin_freqs, product.psd_db])
    if isinstance(product, Cdf):
        return ["level_db", "prob"], np.column_stack([product.levels_db, product.prob])
    raise TypeError(f"cannot export {type(product).__name__}")


def export_csv(product: Product, path) -> Path:
    header, rows = _columns(product)
    path = Path(path)
    with atomic_write(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(v) for v in row])
    logger.info(f"📦 exported {type(product).__name__} to {path} ({len(rows)} rows)")
    return path


def _read_columns(path, expected: Sequence[str]) -> List[np.ndarray]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or list(header[: len(expected)]) != list(expected):
            raise TraceFormatError(f"{path}: expected columns {', '.join(expected)}, got {header}")
        rows = [[float(v) for v in row] for row in reader if row]
    table = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(header))
    return [table[:, i] for i in range(len(header))]


def load_cdf(path, sample_count: int = 0) -> Cdf:
    """Read a CDF written by export_csv back into a Cdf"""
    levels, prob = _read_columns(path, ["level_db", "prob"])
    return Cdf(levels_db=levels, prob=prob, sample_count=sample_count)
