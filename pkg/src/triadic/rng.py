"""Counter-based randomness.

Every keep/drop decision is a pure function of a seed and an identity (a stream
position or a node id), so samplers are reproducible and order-independent
where the design calls for it.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1
_INV53 = 1.0 / (1 << 53)


def splitmix64(x: int) -> int:
    """One round of the splitmix64 finalizer on a Python int."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def splitmix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`splitmix64` over uint64 arrays (wrapping arithmetic)."""
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def to_unit(x: int) -> float:
    return (x >> 11) * _INV53


def to_unit_array(x: np.ndarray) -> np.ndarray:
    return (x >> np.uint64(11)).astype(np.float64) * _INV53


def derive_key(seed: int, label: str) -> int:
    """64-bit subkey for an independent decision family."""
    h = hashlib.blake2b(label.encode(), digest_size=8, key=_seed_bytes(seed))
    return int.from_bytes(h.digest(), "little")


def _seed_bytes(seed: int) -> bytes:
    return (int(seed) & MASK64).to_bytes(8, "little")


def index_uniform(key: int, index: int) -> float:
    return to_unit(splitmix64(key ^ index))


def index_uniforms(key: int, start: int, count: int) -> np.ndarray:
    """Uniforms for stream positions ``start .. start+count-1``."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    return to_unit_array(splitmix64_array(idx ^ np.uint64(key)))


class NodeHasher:
    """Keyed hash of identifiers into 64-bit integers, memoized per id."""

    def __init__(self, seed: int, label: str):
        self._key = _seed_bytes(seed)
        self._salt = label.encode() + b"\x00"
        self._cache: dict = {}

    def value(self, ident) -> int:
        v = self._cache.get(ident)
        if v is None:
            data = self._salt + "\x1f".join(map(str, ident)).encode() if isinstance(ident, tuple) \
                else self._salt + str(ident).encode()
            v = int.from_bytes(hashlib.blake2b(data, digest_size=8, key=self._key).digest(), "little")
            self._cache[ident] = v
        return v

    def uniform(self, ident) -> float:
        return to_unit(self.value(ident))

    def bucket(self, ident, n: int) -> int:
        return self.value(ident) % n


def trial_seeds(seed: int, count: int) -> list[int]:
    """Independent 64-bit seeds for Monte Carlo trials."""
    ss = np.random.SeedSequence(seed)
    return [int(s.generate_state(1, dtype=np.uint64)[0]) for s in ss.spawn(count)]
