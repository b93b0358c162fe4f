"""Counter-keyed random streams.

Every random draw in the package comes from a Philox4x64-10 stream
(``numpy.random.Philox``) whose 128-bit key is ``seed + 2**64 * trial``
and whose counter starts at zero.  A trial's stream is therefore a pure
function of ``(seed, trial)``: trials can run in any order, on any worker,
and still see the same bits.

Only the raw 64-bit words of the bit generator are consumed.  Bits, bounded
integers and uniforms are derived here with fixed recipes, so outputs do not
depend on the numpy ``Generator`` method implementations.

Test vectors (first raw words) are pinned in ``docs/rng.md`` and in
``tests/test_rng.py``.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1

ALGORITHM = "philox4x64-10"


def derive_seed(master: int, *labels: object) -> int:
    """Derive a 64-bit sub-seed from ``master`` and a tuple of labels."""
    text = repr((int(master) & MASK64,) + tuple(str(x) for x in labels))
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class Stream:
    """Sequential reader over the Philox stream keyed by ``(seed, trial)``."""

    def __init__(self, seed: int, trial: int = 0):
        self.seed = int(seed) & MASK64
        self.trial = int(trial) & MASK64
        self._bg = np.random.Philox(key=self.seed + (self.trial << 64))
        self._buf: list[int] = []
        self._pos = 0

    def words(self, count: int) -> np.ndarray:
        count = int(count)
        left = len(self._buf) - self._pos
        if left == 0:
            return self._bg.random_raw(count).astype(np.uint64, copy=False)
        take = min(left, count)
        head = np.array(self._buf[self._pos:self._pos + take], dtype=np.uint64)
        self._pos += take
        if take == count:
            return head
        return np.concatenate([head, self._bg.random_raw(count - take).astype(np.uint64)])

    def _word(self) -> int:
        if self._pos == len(self._buf):
            self._buf = self._bg.random_raw(256).tolist()
            self._pos = 0
        self._pos += 1
        return self._buf[self._pos - 1]

    def bits(self, count: int) -> np.ndarray:
        """``count`` fair bits as uint8, least significant bit of each word first."""
        nwords = -(-int(count) // 64)
        raw = self.words(nwords)
        out = np.unpackbits(raw.view(np.uint8), bitorder="little")
        return out[:count]

    def uniform(self, count: int) -> np.ndarray:
        """Doubles in [0, 1) from the top 53 bits of each word."""
        raw = self.words(count)
        return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))

    def below(self, bound: int) -> int:
        """Unbiased integer in ``[0, bound)`` (Lemire's multiply-shift with rejection)."""
        bound = int(bound)
        if bound <= 0:
            raise ValueError("bound must be positive")
        m = self._word() * bound
        low = m & MASK64
        if low < bound:
            threshold = ((1 << 64) - bound) % bound
            while low < threshold:
                m = self._word() * bound
                low = m & MASK64
        return m >> 64
