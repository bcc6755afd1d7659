"""A plain Bloom filter for remembering which content ids have been seen."""

from __future__ import annotations

import hashlib
import math

import numpy as np


class BloomFilter:
    def __init__(self, expected_items: int, fp_rate: float = 0.01, seed: int = 0):
        if expected_items < 1:
            raise ValueError("expected_items must be >= 1")
        if not 0 < fp_rate < 1:
            raise ValueError("fp_rate must lie in (0, 1)")
        self.expected_items = expected_items
        self.fp_rate = fp_rate
        m = math.ceil(-expected_items * math.log(fp_rate) / math.log(2) ** 2)
        self.n_bits = max(m, 8)
        self.n_hashes = max(1, round(self.n_bits / expected_items * math.log(2)))
        self._bits = np.zeros((self.n_bits + 7) // 8, dtype=np.uint8)
        self._key = (int(seed) & ((1 << 64) - 1)).to_bytes(8, "little")
        self.count = 0

    def _positions(self, item):
        d = hashlib.blake2b(str(item).encode(), digest_size=16, key=self._key).digest()
        h1 = int.from_bytes(d[:8], "little")
        h2 = int.from_bytes(d[8:], "little") | 1
        return [(h1 + k * h2) % self.n_bits for k in range(self.n_hashes)]

    def add(self, item) -> bool:
        """Insert ``item``; returns whether it was (possibly) present already."""
        present = True
        for pos in self._positions(item):
            byte, bit = divmod(pos, 8)
            mask = 1 << bit
            if not self._bits[byte] & mask:
                present = False
                self._bits[byte] |= mask
        if not present:
            self.count += 1
        return present

    def __contains__(self, item) -> bool:
        for pos in self._positions(item):
            byte, bit = divmod(pos, 8)
            if not self._bits[byte] & (1 << bit):
                return False
        return True

    def expected_fp_rate(self) -> float:
        """False-positive probability at the current fill."""
        k, m = self.n_hashes, self.n_bits
        return (1.0 - math.exp(-k * self.count / m)) ** k
