"""Vectorized kernels for applying small exact matrices across many
chunks at once.

The storage layer works on thousands of M-symbol chunks; every per-chunk
operation (encode, node extraction, help, repair, decode) is one fixed
matrix over GF(2^m) applied to a symbol column per chunk.  Here those
matrix applications run over numpy arrays of packed symbol values, using
per-constant multiplication lookup tables; addition is XOR.  Results are
bit-identical to the scalar path in linalg, which the tests cross-check.

Binary fields only: the byte <-> symbol packing slices the bit stream m
bits per symbol.
"""

from __future__ import annotations

import numpy as np

from .errors import UsageError
from .fields import BINARY, FieldSpec
from .linalg import Matrix


def _dtype(spec: FieldSpec):
    return np.uint8 if spec.m <= 8 else np.uint16


class BulkField:
    """Per-constant multiplication tables for one binary field."""

    def __init__(self, spec: FieldSpec):
        if spec.kind != BINARY:
            raise UsageError("bulk kernels support binary fields only")
        self.spec = spec
        self.dtype = _dtype(spec)
        self._tables: dict[int, np.ndarray] = {}

    def mul_table(self, c: int) -> np.ndarray:
        tab = self._tables.get(c)
        if tab is None:
            mul = self.spec.mul
            tab = np.array([mul(c, v) for v in range(self.spec.order)],
                           dtype=self.dtype)
            self._tables[c] = tab
        return tab

    def matmul(self, matrix, data: np.ndarray) -> np.ndarray:
        """Apply an (r x c) exact matrix to (c, N) symbol columns."""
        rows = matrix.rows if isinstance(matrix, Matrix) else matrix
        ncols = len(rows[0]) if rows else 0
        if data.shape[0] != ncols:
            raise UsageError(f"bulk matmul expects {ncols} rows, got {data.shape[0]}")
        n = data.shape[1]
        out = np.zeros((len(rows), n), dtype=self.dtype)
        for i, row in enumerate(rows):
            acc = out[i]
            for j, coeff in enumerate(row):
                if coeff == 0:
                    continue
                if coeff == 1:
                    acc ^= data[j]
                else:
                    acc ^= self.mul_table(coeff)[data[j]]
        return out


def bytes_to_symbols(data: bytes, m: int, total_symbols: int) -> np.ndarray:
    """Slice a byte stream into m-bit symbols (big-endian bit order).

    The stream is zero-extended to cover total_symbols * m bits.
    """
    need_bits = total_symbols * m
    need_bytes = (need_bits + 7) // 8
    buf = np.frombuffer(data.ljust(need_bytes, b"\x00"), dtype=np.uint8)
    bits = np.unpackbits(buf, count=need_bits, bitorder="big")
    weights = (1 << np.arange(m - 1, -1, -1)).astype(np.uint32)
    symbols = bits.reshape(total_symbols, m).astype(np.uint32) @ weights
    return symbols.astype(np.uint16 if m > 8 else np.uint8)


def symbols_to_bytes(symbols: np.ndarray, m: int) -> bytes:
    """Inverse of bytes_to_symbols; trailing pad bits come back as zeros."""
    total = symbols.shape[0]
    shifts = np.arange(m - 1, -1, -1, dtype=np.uint32)
    bits = ((symbols.astype(np.uint32)[:, None] >> shifts) & 1).astype(np.uint8)
    return np.packbits(bits.reshape(-1), bitorder="big").tobytes()
