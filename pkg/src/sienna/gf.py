"""Finite-field arithmetic over GF(2^K) for the Reed-Solomon codec.

Elements are integers in ``[0, 2^K)``. Addition is XOR; multiplication is
carry-less polynomial multiplication reduced by the field's irreducible
polynomial, realized through exp/log tables so vectorized numpy lookups
can be used in the codec hot paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["DEFAULT_POLYS", "FieldSpec", "GaloisField", "default_field", "gf_mul"]

# Conventional primitive polynomials (bitmask includes the x^K term).
DEFAULT_POLYS = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


@dataclass(frozen=True)
class FieldSpec:
    """Symbol width and reduction polynomial defining one GF(2^K)."""

    k_bits: int
    reduction_poly: int

    def __post_init__(self):
        if not 2 <= self.k_bits <= 16:
            raise ValueError(f"symbol width must be in [2, 16], got {self.k_bits}")
        if self.reduction_poly.bit_length() != self.k_bits + 1:
            raise ValueError(
                f"reduction polynomial 0x{self.reduction_poly:X} does not have "
                f"degree {self.k_bits}"
            )

    @property
    def size(self) -> int:
        return 1 << self.k_bits

    def tables(self) -> "GaloisField":
        return _build_tables(self.k_bits, self.reduction_poly)


def default_field(k_bits: int) -> FieldSpec:
    return FieldSpec(k_bits, DEFAULT_POLYS[k_bits])


class GaloisField:
    """exp/log tables plus vectorized arithmetic for one field instance."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        q = spec.size
        self.order = q - 1
        exp = np.zeros(2 * self.order, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for i in range(self.order):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & q:
                x ^= spec.reduction_poly
        if x != 1:
            raise ValueError(
                f"0x{spec.reduction_poly:X} is not primitive for GF(2^{spec.k_bits})"
            )
        exp[self.order : 2 * self.order] = exp[: self.order]
        self.exp = exp
        self.log = log

    def mul(self, a, b):
        """Element-wise product; scalars and arrays broadcast."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[self.log[a] + self.log[b]]
        zero = (a == 0) | (b == 0)
        if out.ndim == 0:
            return int(out) if not zero else 0
        out = np.where(zero, 0, out)
        return out

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("no inverse for 0")
        return int(self.exp[self.order - self.log[a]])

    def div(self, a, b: int):
        return self.mul(a, self.inv(b))

    def pow_alpha(self, e: int) -> int:
        """alpha**e for any integer exponent (alpha = 0b10, the generator)."""
        return int(self.exp[e % self.order])

    def poly_mul(self, p, q):
        """Product of coefficient arrays (lowest degree first)."""
        p = np.asarray(p, dtype=np.int64)
        q = np.asarray(q, dtype=np.int64)
        out = np.zeros(p.size + q.size - 1, dtype=np.int64)
        for i, c in enumerate(p):
            if c:
                out[i : i + q.size] ^= self.mul(int(c), q)
        return out

    def poly_eval(self, coeffs, x: int) -> int:
        """Horner evaluation of sum(coeffs[i] * x^i)."""
        acc = 0
        for c in reversed(np.asarray(coeffs, dtype=np.int64)):
            acc = self.mul(acc, x) ^ int(c)
        return acc


@lru_cache(maxsize=None)
def _build_tables(k_bits: int, reduction_poly: int) -> GaloisField:
    return GaloisField(FieldSpec(k_bits, reduction_poly))


def gf_mul(a: int, b: int, field: FieldSpec) -> int:
    """Product of two field elements under the spec's reduction polynomial."""
    if not 0 <= a < field.size or not 0 <= b < field.size:
        raise ValueError(f"elements must be below 2^{field.k_bits}: got {a}, {b}")
    return field.tables().mul(a, b)
