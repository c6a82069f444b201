"""Level-crossing quantization of breathing series into binary fingerprints.

Each quantizer branch compares a sample against a threshold pair and emits
two bits: ``10`` at or above the upper threshold, ``01`` at or below the
lower one, ``00`` in between (``11`` never occurs). A bank of branches at
nested threshold pairs is applied to the same window and the per-branch
streams are concatenated branch-major.

Working units: series from different modalities are rescaled so one
standard deviation equals ``NORMALIZED_STD`` before quantization, which
makes the default centimeter-shaped threshold ladder meaningful for belt
data and variance-normalized ICA outputs alike, and makes the whole
pipeline insensitive to per-modality gain.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .bits import as_bits
from .breathing import DisplacementSeries

__all__ = [
    "FingerprintBits",
    "QuantizerBank",
    "default_bank",
    "extract",
    "hamming_similarity",
    "normalize_series",
    "qtz",
    "segment_pad",
]

# Working amplitude unit: observations are rescaled to this standard
# deviation before quantization. At 0.20 a typical resting breath swings
# across most of the ten-step 0.05 ladder, which keeps the upper branches
# discriminative between subjects while the same subject's two modality
# views still quantize almost identically.
NORMALIZED_STD = 0.20


@dataclass(frozen=True)
class QuantizerBank:
    """Threshold pairs (upper, lower), sampling interval, branch count."""

    levels: tuple[tuple[float, float], ...]
    sample_interval: float = 0.1  # seconds between quantizer samples

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple((float(a), float(b)) for a, b in self.levels))
        if not self.levels:
            raise ValueError("bank needs at least one threshold pair")
        if self.sample_interval <= 0:
            raise ValueError("sample interval must be positive")
        uppers = [a for a, _ in self.levels]
        lowers = [b for _, b in self.levels]
        for a, b in self.levels:
            if a <= b:
                raise ValueError(f"upper threshold {a} must exceed lower {b}")
        if sorted(set(uppers)) != uppers or sorted(set(lowers), reverse=True) != lowers:
            raise ValueError("threshold pairs must be sorted and non-overlapping")

    @property
    def count(self) -> int:
        return len(self.levels)


def default_bank(
    step: float = 0.05, count: int = 10, sample_interval: float = 0.1
) -> QuantizerBank:
    """Symmetric ladder at +/-(step, 2*step, ..., count*step)."""
    levels = tuple((step * (i + 1), -step * (i + 1)) for i in range(count))
    return QuantizerBank(levels=levels, sample_interval=sample_interval)


@dataclass(frozen=True)
class FingerprintBits:
    """Branch-major quantized window: count * 2 * samples bits."""

    bits: np.ndarray
    branches: int
    samples_per_branch: int
    window: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "bits", as_bits(self.bits))
        if self.bits.size != self.branches * 2 * self.samples_per_branch:
            raise ValueError("bit count does not match branches * 2 * samples")

    def branch_codes(self, branch: int) -> np.ndarray:
        start = branch * 2 * self.samples_per_branch
        return self.bits[start : start + 2 * self.samples_per_branch].reshape(-1, 2)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("branch,sample_index,code\n")
        for b in range(self.branches):
            for i, (hi, lo) in enumerate(self.branch_codes(b)):
                out.write(f"{b},{i},{hi}{lo}\n")
        return out.getvalue()


def qtz(x: float, q_plus: float, q_minus: float) -> tuple[int, int]:
    """Two-bit level-crossing code; thresholds are boundary-inclusive."""
    if q_plus <= q_minus:
        raise ValueError("upper threshold must exceed lower threshold")
    if x >= q_plus:
        return (1, 0)
    if x <= q_minus:
        return (0, 1)
    return (0, 0)


def extract(
    series: DisplacementSeries, t_str: float, t_end: float, bank: QuantizerBank
) -> FingerprintBits:
    """Quantize a window at instants t_str + j*T, final floor instant included."""
    if t_end <= t_str:
        raise ValueError("window must have positive length")
    T = bank.sample_interval
    n_samples = int(np.floor((t_end - t_str) / T)) + 1
    instants = t_str + np.arange(n_samples) * T
    values = series.value_at(instants)

    chunks = []
    for q_plus, q_minus in bank.levels:
        hi = (values >= q_plus).astype(np.uint8)
        lo = (values <= q_minus).astype(np.uint8)
        chunks.append(np.stack([hi, lo], axis=1).ravel())
    return FingerprintBits(
        bits=np.concatenate(chunks),
        branches=bank.count,
        samples_per_branch=n_samples,
        window=(t_str, t_end),
    )


def segment_pad(bits: np.ndarray, target_len: int) -> list[np.ndarray]:
    """Split into target_len chunks, zero-padding the final one."""
    bits = as_bits(bits)
    if target_len <= 0:
        raise ValueError("target length must be positive")
    if bits.size == 0:
        raise ValueError("cannot segment an empty bit string")
    n_segments = -(-bits.size // target_len)
    padded = np.zeros(n_segments * target_len, dtype=np.uint8)
    padded[: bits.size] = bits
    return [padded[i * target_len : (i + 1) * target_len] for i in range(n_segments)]


def hamming_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Fraction of positions where the two bit strings agree."""
    a, b = as_bits(a), as_bits(b)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("empty bit strings have no similarity")
    return float(np.count_nonzero(a == b) / a.size)


def normalize_series(series: DisplacementSeries) -> DisplacementSeries:
    """Rescale to the working amplitude unit (std = NORMALIZED_STD), zero mean."""
    x = series.samples
    std = x.std()
    if std == 0:
        raise ValueError("cannot normalize a constant series")
    return DisplacementSeries(
        (x - x.mean()) * (NORMALIZED_STD / std), series.sample_rate, series.t_start
    )
