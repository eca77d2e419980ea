"""Per-bit mutual information of QPSK over AWGN.

The curve is estimated once on an Es/N0 grid by seeded Monte Carlo and
then queried through piecewise-linear interpolation. Values are per
coded bit, i.e. the per-symbol mutual information divided by the number
of bits carried by one symbol.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from lmsharq.errors import ConfigError

MODULATION_BITS = 2

DEFAULT_MIN_DB = -30.0
DEFAULT_MAX_DB = 20.0
DEFAULT_POINTS = 201  # 0.25 dB spacing over the default range
DEFAULT_SAMPLES = 500_000
DEFAULT_SEED = 20177

MIN_SAMPLES = 10_000
TARGET_STD_ERROR = 1e-3

# unit-energy QPSK constellation
_QPSK = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / np.sqrt(2.0)

CSV_HEADER = ("es_n0_db", "mi_per_bit")


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


@dataclass
class MiTable:
    """Tabulated per-bit mutual information on an increasing Es/N0 grid.

    Treated as immutable after construction.
    """

    es_n0_linear: np.ndarray
    mi_per_bit: np.ndarray
    modulation_bits: int = MODULATION_BITS

    def __post_init__(self):
        self.es_n0_linear = np.asarray(self.es_n0_linear, dtype=float)
        self.mi_per_bit = np.asarray(self.mi_per_bit, dtype=float)
        if self.es_n0_linear.ndim != 1 or self.es_n0_linear.size < 2:
            raise ValueError("grid needs at least two points")
        if self.es_n0_linear.size != self.mi_per_bit.size:
            raise ValueError("grid and mi arrays differ in length")
        if np.any(np.diff(self.es_n0_linear) <= 0):
            raise ValueError("es_n0_linear grid must be strictly increasing")
        if np.any(self.mi_per_bit < 0.0) or np.any(self.mi_per_bit > 1.0):
            raise ValueError("mi_per_bit values must lie in [0, 1]")
        if np.any(np.diff(self.mi_per_bit) < 0.0):
            raise ValueError("mi_per_bit must be non-decreasing along the grid")
        if self.modulation_bits != MODULATION_BITS:
            raise ValueError("only QPSK (2 bits per symbol) is supported")


def _mc_mi_per_bit(snr_linear: float, samples: int, rng: np.random.Generator):
    """One grid point: Monte Carlo per-bit MI estimate and its std error."""
    sym = _QPSK[rng.integers(0, 4, size=samples)]
    scale = np.sqrt(0.5 / snr_linear)
    noise = scale * (rng.standard_normal(samples) + 1j * rng.standard_normal(samples))
    y = sym + noise
    # log p(y|x_j) up to a common constant, for every constellation point
    d2 = np.abs(y[:, None] - _QPSK[None, :]) ** 2
    expo = snr_linear * (np.abs(noise)[:, None] ** 2 - d2)
    integrand = np.log2(4.0) - logsumexp(expo, axis=1) / np.log(2.0)
    per_bit = integrand / MODULATION_BITS
    return float(np.mean(per_bit)), float(np.std(per_bit) / np.sqrt(samples))


def build_mi_table(
    es_n0_min_db: float = DEFAULT_MIN_DB,
    es_n0_max_db: float = DEFAULT_MAX_DB,
    points: int = DEFAULT_POINTS,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> MiTable:
    """Estimate the per-bit MI curve on a dB grid.

    Deterministic for a fixed seed. Raises ConfigError when the grid is
    invalid or the sample count cannot deliver the target precision.
    """
    if not es_n0_min_db < es_n0_max_db:
        raise ConfigError("es_n0_min_db must be below es_n0_max_db")
    if points < 2:
        raise ConfigError("need at least two grid points")
    if samples < MIN_SAMPLES:
        raise ConfigError(f"samples must be at least {MIN_SAMPLES}")
    rng = np.random.default_rng(seed)
    grid_db = np.linspace(es_n0_min_db, es_n0_max_db, points)
    grid_lin = db_to_linear(grid_db)
    mi = np.empty(points)
    worst_se = 0.0
    for i, snr in enumerate(grid_lin):
        mi[i], se = _mc_mi_per_bit(float(snr), samples, rng)
        worst_se = max(worst_se, se)
    if worst_se >= TARGET_STD_ERROR:
        raise ConfigError(
            f"estimator std error {worst_se:.2e} at {samples} samples; raise samples"
        )
    # estimator noise must not break monotonicity on the flat tails
    mi = np.clip(np.maximum.accumulate(mi), 0.0, 1.0)
    return MiTable(es_n0_linear=grid_lin, mi_per_bit=mi)


def mi_of(table: MiTable, es_n0_linear):
    """Per-bit MI at a linear Es/N0, clamped to the table range."""
    x = np.asarray(es_n0_linear, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("es_n0_linear must be positive")
    out = np.interp(x, table.es_n0_linear, table.mi_per_bit)
    return float(out) if np.ndim(es_n0_linear) == 0 else out


def mi_inverse(table: MiTable, mi_target: float) -> float:
    """Linear Es/N0 whose interpolated MI equals mi_target.

    mi_target must lie strictly inside the achievable MI interval.
    """
    lo = float(table.mi_per_bit[0])
    hi = float(table.mi_per_bit[-1])
    if not lo < mi_target < hi:
        raise ValueError(
            f"mi_target {mi_target!r} outside achievable interval ({lo:.6g}, {hi:.6g})"
        )
    idx = int(np.searchsorted(table.mi_per_bit, mi_target, side="left"))
    # searchsorted lands on the first grid value >= target, so the segment
    # below it rises strictly and interpolation is well defined
    x0 = table.es_n0_linear[idx - 1]
    x1 = table.es_n0_linear[idx]
    y0 = table.mi_per_bit[idx - 1]
    y1 = table.mi_per_bit[idx]
    if y1 == mi_target:
        return float(x1)
    return float(x0 + (x1 - x0) * (mi_target - y0) / (y1 - y0))


def save_mi_csv(table: MiTable, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for x, y in zip(table.es_n0_linear, table.mi_per_bit):
            writer.writerow([f"{linear_to_db(x):.6g}", f"{y:.6g}"])


def load_mi_csv(path) -> MiTable:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ValueError(f"expected header {','.join(CSV_HEADER)} in {path}")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    if len(rows) < 2:
        raise ValueError(f"table in {path} has fewer than two rows")
    grid_db = np.array([r[0] for r in rows])
    mi = np.array([r[1] for r in rows])
    return MiTable(es_n0_linear=db_to_linear(grid_db), mi_per_bit=mi)
