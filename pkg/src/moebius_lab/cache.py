"""MUT1 binary cache for mu tables.

Layout (little endian, no padding)::

    b"MUT1" | n_max: u64 | n_max x i8   (mu(1), ..., mu(n_max))
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core_mu import MuTable, Provenance
from .errors import CacheFormatError

MAGIC = b"MUT1"
HEADER = struct.Struct("<4sQ")

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & _MASK64
    return h


def table_checksum(table: MuTable) -> int:
    """FNV-1a over the value bytes exactly as they sit in the cache."""
    return fnv1a64(table.body().tobytes())


def write_cache(path, table: MuTable) -> int:
    """Write the table; returns the file size in bytes."""
    path = Path(path)
    with open(path, "wb") as f:
        f.write(HEADER.pack(MAGIC, table.n_max))
        f.write(table.body().tobytes())
    return HEADER.size + table.n_max


def read_cache(path, validate: bool = True) -> MuTable:
    """Load a cache file.

    With ``validate=False`` out-of-range bytes are kept as-is so that a
    verifier can locate them; otherwise they raise CacheFormatError.
    """
    path = Path(path)
    with open(path, "rb") as f:
        head = f.read(HEADER.size)
        if len(head) < HEADER.size:
            raise CacheFormatError(f"{path}: truncated header")
        magic, n_max = HEADER.unpack(head)
        if magic != MAGIC:
            raise CacheFormatError(f"{path}: bad magic {magic!r}")
        if n_max < 1:
            raise CacheFormatError(f"{path}: n_max is 0")
        values = np.zeros(n_max + 1, dtype=np.int8)
        got = f.readinto(memoryview(values)[1:])
        if got != n_max or f.read(1):
            raise CacheFormatError(f"{path}: payload length does not match n_max={n_max}")
    table = MuTable(n_max, values, Provenance.LOADED)
    if validate:
        bad = table.first_invalid_index()
        if bad is not None:
            raise CacheFormatError(f"{path}: value at n={bad} is {int(values[bad])}, not in {{-1, 0, 1}}")
    return table
