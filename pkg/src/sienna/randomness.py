"""Statistical randomness tests: frequency (monobit), runs, and approximate
entropy, following the standard NIST statistical test suite definitions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from .bits import as_bits

__all__ = ["RandomnessReport", "approximate_entropy", "monobit_test", "randomness_tests", "runs_test"]


@dataclass(frozen=True)
class RandomnessReport:
    monobit_p: float
    runs_p: float
    approx_entropy_per_bit: float
    approx_entropy_p: float
    n_bits: int


def monobit_test(bits: np.ndarray) -> float:
    """P-value of the frequency test: is the 0/1 balance plausible?"""
    bits = as_bits(bits)
    s = abs(int(2 * int(bits.sum()) - bits.size)) / math.sqrt(bits.size)
    return math.erfc(s / math.sqrt(2))


def runs_test(bits: np.ndarray) -> float:
    """P-value of the runs test; 0.0 when the frequency pre-check fails."""
    bits = as_bits(bits)
    n = bits.size
    pi = float(bits.sum()) / n
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return 0.0
    v = 1 + int(np.count_nonzero(np.diff(bits)))
    num = abs(v - 2.0 * n * pi * (1 - pi))
    den = 2.0 * math.sqrt(2.0 * n) * pi * (1 - pi)
    return math.erfc(num / den)


def _phi(bits: np.ndarray, m: int) -> float:
    """Sum of p*ln(p) over overlapping m-bit patterns (circular extension)."""
    n = bits.size
    if m == 0:
        return 0.0
    ext = np.concatenate([bits, bits[: m - 1]]).astype(np.int64)
    codes = np.zeros(n, dtype=np.int64)
    for j in range(m):
        codes = (codes << 1) | ext[j : j + n]
    counts = np.bincount(codes, minlength=1 << m)
    probs = counts[counts > 0] / n
    return float(np.sum(probs * np.log(probs)))


def approximate_entropy(bits: np.ndarray, block_len: int = 2) -> tuple[float, float]:
    """ApEn(m) in nats and its NIST p-value.

    ApEn compares the empirical entropy of overlapping ``block_len`` and
    ``block_len + 1`` bit patterns; i.i.d. fair bits approach ln 2 per bit.
    """
    bits = as_bits(bits)
    n = bits.size
    apen = _phi(bits, block_len) - _phi(bits, block_len + 1)
    chi2 = 2.0 * n * (math.log(2.0) - apen)
    p_value = float(gammaincc(2 ** (block_len - 1), chi2 / 2.0))
    return apen, p_value


def randomness_tests(bits: np.ndarray, block_len: int = 2) -> RandomnessReport:
    """Monobit, runs, and approximate-entropy statistics for one bit string."""
    bits = as_bits(bits)
    if bits.size < 100:
        raise ValueError(f"need at least 100 bits, got {bits.size}")
    apen, apen_p = approximate_entropy(bits, block_len)
    per_bit = min(max(apen / math.log(2.0), 0.0), 1.0)
    return RandomnessReport(
        monobit_p=monobit_test(bits),
        runs_p=runs_test(bits),
        approx_entropy_per_bit=per_bit,
        approx_entropy_p=apen_p,
        n_bits=bits.size,
    )
