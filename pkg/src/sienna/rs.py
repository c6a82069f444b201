"""Bounded-distance Reed-Solomon codec over GF(2^K).

The code is systematic with codeword length M and message length N; up to
``t = (M - N) // 2`` corrupted symbols are corrected. The decoder runs a
fixed sequence of array operations (syndromes, Berlekamp-Massey, Chien
search, Forney) whose shapes do not depend on the received word, so the
decode time is insensitive to the number of errors. Decode failure is a
returned value (``None``), not an exception: callers confirm recovered
messages through a hash, never through the decoder alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bits import as_bits, bits_from_int
from .gf import FieldSpec, default_field

__all__ = ["RsCodeSpec", "RsCodec", "correctable_symbols", "rs_encode", "rs_decode"]


@dataclass(frozen=True)
class RsCodeSpec:
    """RS code parameters: GF(2^K) symbols, M-symbol codewords, N-symbol messages."""

    field: FieldSpec
    m_symbols: int
    n_symbols: int

    def __post_init__(self):
        if not self.n_symbols < self.m_symbols <= self.field.size - 1:
            raise ValueError(
                f"need N < M <= 2^K - 1, got N={self.n_symbols}, "
                f"M={self.m_symbols}, 2^K-1={self.field.size - 1}"
            )
        if (self.m_symbols - self.n_symbols) // 2 < 1:
            raise ValueError("parity too short to correct a single symbol")

    @property
    def t(self) -> int:
        return (self.m_symbols - self.n_symbols) // 2

    @property
    def n_parity(self) -> int:
        return self.m_symbols - self.n_symbols

    @property
    def codeword_bits(self) -> int:
        return self.m_symbols * self.field.k_bits

    @property
    def message_bits(self) -> int:
        return self.n_symbols * self.field.k_bits

    def codec(self) -> "RsCodec":
        return _codec_for(self)


def standard_code(k_bits: int = 8, m_symbols: int = 255, n_symbols: int = 201) -> RsCodeSpec:
    return RsCodeSpec(default_field(k_bits), m_symbols, n_symbols)


def correctable_symbols(spec: RsCodeSpec) -> int:
    """Maximum number of corrupted symbols the code is guaranteed to fix."""
    return spec.t


class RsCodec:
    """Encoder/decoder instance with precomputed evaluation matrices."""

    def __init__(self, spec: RsCodeSpec):
        self.spec = spec
        self.gf = spec.field.tables()
        gf, order = self.gf, self.gf.order
        m, p = spec.m_symbols, spec.n_parity

        # Generator polynomial with roots alpha^0 .. alpha^(p-1), highest
        # degree first for the long-division encoder.
        gen = np.array([1], dtype=np.int64)
        for i in range(p):
            gen = gf.poly_mul(gen, np.array([gf.pow_alpha(i), 1], dtype=np.int64))
        self._gen_high_first = gen[::-1].copy()

        # Syndrome matrix: S[j] = sum_i r[i] * alpha^(j * (m-1-i)).
        poly_pos = np.arange(m - 1, -1, -1, dtype=np.int64)
        j = np.arange(p, dtype=np.int64)[:, None]
        self._synd_mat = gf.exp[(j * poly_pos[None, :]) % order]

        # Powers of the Chien/Forney evaluation points x_i = alpha^(-(m-1-i)),
        # one row per codeword position, columns d = 0..p.
        d = np.arange(p + 1, dtype=np.int64)[None, :]
        self._eval_pows = gf.exp[((-poly_pos[:, None] * d) % order)]
        # X_i = alpha^(m-1-i), the error-position power used by Forney.
        self._x_pos = gf.exp[poly_pos % order]
        # Anti-diagonal index map for the fixed-shape polynomial product.
        self._conv_idx = np.arange(p + 1)[:, None] + np.arange(p)[None, :]

    # -- encoding ---------------------------------------------------------

    def encode(self, message: np.ndarray) -> np.ndarray:
        spec, gf = self.spec, self.gf
        message = _check_symbols(message, spec, spec.n_symbols)
        gen_tail = self._gen_high_first[1:]
        parity = np.zeros(spec.n_parity, dtype=np.int64)
        for sym in message:
            feedback = int(sym) ^ int(parity[0])
            parity[:-1] = parity[1:]
            parity[-1] = 0
            if feedback:
                parity ^= gf.mul(feedback, gen_tail)
        return np.concatenate([message, parity])

    # -- decoding ---------------------------------------------------------

    def decode(self, received: np.ndarray) -> np.ndarray | None:
        spec, gf = self.spec, self.gf
        received = _check_symbols(received, spec, spec.m_symbols)
        p, t = spec.n_parity, spec.t
        log, exp, order = gf.log, gf.exp, gf.order

        synd = self._syndromes(received)

        # Berlekamp-Massey with fixed-width arrays; every iteration performs
        # the same array operations regardless of where errors lie.
        loc = np.zeros(p + 1, dtype=np.int64)
        aux = np.zeros(p + 1, dtype=np.int64)
        loc[0] = aux[0] = 1
        synd_pad = np.concatenate([np.zeros(p, dtype=np.int64), synd])
        L, gap, b_inv = 0, 1, 1
        for n in range(p):
            window = synd_pad[n : n + p][::-1]
            delta = int(synd[n]) ^ _xor_reduce(gf.mul(loc[1:], window))
            shifted = np.concatenate([np.zeros(gap, dtype=np.int64), aux[: p + 1 - gap]])
            coef = gf.mul(delta, b_inv)
            update = loc ^ gf.mul(coef, shifted)
            if delta != 0 and 2 * L <= n:
                aux = loc
                b_inv = gf.inv(delta)
                L = n + 1 - L
                gap = 1
            else:
                gap += 1
            loc = update

        nz = np.nonzero(loc)[0]
        degree = int(nz[-1]) if nz.size else 0
        if degree > t:
            return None

        # Chien search over every position at once.
        loc_eval = _xor_reduce_rows(gf.mul(loc[None, :], self._eval_pows))
        err_mask = loc_eval == 0
        if int(err_mask.sum()) != degree:
            return None

        # Forney: omega = (synd * loc) mod x^p, error = X * omega(x) / loc'(x).
        # The product is accumulated over anti-diagonals in one shot so the
        # work done is independent of the locator degree.
        omega_full = np.zeros(2 * p, dtype=np.int64)
        terms = gf.mul(loc[:, None], synd[None, :])
        np.bitwise_xor.at(omega_full, self._conv_idx, terms)
        omega = omega_full[:p]
        dloc = np.zeros(p, dtype=np.int64)
        dloc[0::2] = loc[1::2][: dloc[0::2].size]

        omega_eval = _xor_reduce_rows(gf.mul(omega[None, :], self._eval_pows[:, :p]))
        dloc_eval = _xor_reduce_rows(gf.mul(dloc[None, :], self._eval_pows[:, :p]))
        if np.any(err_mask & (dloc_eval == 0)):
            return None
        safe = np.where(dloc_eval == 0, 1, dloc_eval)
        inv_dloc = exp[(order - log[safe]) % order]
        magnitudes = gf.mul(self._x_pos, gf.mul(omega_eval, inv_dloc))
        corrected = received ^ np.where(err_mask, magnitudes, 0)

        if np.any(self._syndromes(corrected)):
            return None
        return corrected[: spec.n_symbols]

    def _syndromes(self, word: np.ndarray) -> np.ndarray:
        return _xor_reduce_rows(self.gf.mul(self._synd_mat, word[None, :]))

    # -- bit-level views ----------------------------------------------------

    def symbols_to_bits(self, symbols: np.ndarray) -> np.ndarray:
        k = self.spec.field.k_bits
        return np.concatenate([bits_from_int(int(s), k) for s in symbols])

    def bits_to_symbols(self, bits: np.ndarray) -> np.ndarray:
        k = self.spec.field.k_bits
        bits = as_bits(bits)
        if bits.size % k:
            raise ValueError(f"bit length {bits.size} is not a multiple of {k}")
        weights = 1 << np.arange(k - 1, -1, -1)
        return bits.reshape(-1, k).astype(np.int64) @ weights


def rs_encode(message: np.ndarray, spec: RsCodeSpec) -> np.ndarray:
    """Systematic codeword: the message followed by M - N parity symbols."""
    return spec.codec().encode(message)


def rs_decode(received: np.ndarray, spec: RsCodeSpec) -> np.ndarray | None:
    """Recover the message from a corrupted codeword, or None on failure."""
    return spec.codec().decode(received)


@lru_cache(maxsize=None)
def _codec_for(spec: RsCodeSpec) -> RsCodec:
    return RsCodec(spec)


def _check_symbols(values, spec: RsCodeSpec, expected_len: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64).ravel()
    if arr.size != expected_len:
        raise ValueError(f"expected {expected_len} symbols, got {arr.size}")
    if arr.size and (arr.min() < 0 or arr.max() >= spec.field.size):
        raise ValueError(f"symbols must lie in [0, {spec.field.size})")
    return arr


def _xor_reduce(arr: np.ndarray) -> int:
    return int(np.bitwise_xor.reduce(arr))


def _xor_reduce_rows(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_xor.reduce(arr, axis=1)
