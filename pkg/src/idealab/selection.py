"""Truncated selections: increasing maps (S), coin vectors (T), rearrangements (P).

``SubseqPrefix`` holds ``s(1) < s(2) < ...`` with every entry at most the
source horizon.  ``CoinVector`` is a 0/1 vector of length N; the natural
bijection between them marks ``t(s(i)) = 1`` and leaves every other bit 0.
The fair-coin product measure on T, pulled back through that bijection, is
what :func:`sample_lambda` draws from at finite length.

``PermPrefix`` holds an injective list; a sampled permutation of ``[1..N]``
is the whole object, no infinite completion is represented.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from .rng import Stream
from .sequences import DomainError, PointSeq


def _int_array(entries) -> np.ndarray:
    arr = np.asarray(entries, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("entries must be one-dimensional")
    return arr


class SubseqPrefix:
    """Strictly increasing naturals ``s(1) < ... < s(k)`` drawn from ``[1, horizon]``."""

    __slots__ = ("entries", "horizon")

    def __init__(self, entries, horizon: int | None = None):
        arr = _int_array(entries)
        if horizon is None:
            horizon = int(arr[-1]) if len(arr) else 1
        horizon = int(horizon)
        if len(arr):
            if arr[0] < 1:
                raise DomainError("selection entries must be >= 1")
            if arr[-1] > horizon:
                raise DomainError(f"entry {int(arr[-1])} exceeds horizon {horizon}")
            if len(arr) > 1 and not (arr[1:] > arr[:-1]).all():
                raise ValueError("subsequence entries must be strictly increasing")
        arr.setflags(write=False)
        self.entries = arr
        self.horizon = horizon

    @classmethod
    def identity(cls, n: int) -> "SubseqPrefix":
        return cls(np.arange(1, n + 1), n)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SubseqPrefix) and self.horizon == other.horizon
                and np.array_equal(self.entries, other.entries))

    def __repr__(self) -> str:
        head = ", ".join(str(int(v)) for v in self.entries[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"SubseqPrefix(({head}{more}), len={len(self)}, horizon={self.horizon})"

    def at(self, n: int) -> int:
        if not 1 <= n <= len(self.entries):
            raise DomainError(f"position {n} outside [1, {len(self.entries)}]")
        return int(self.entries[n - 1])

    def tolist(self) -> list[int]:
        return self.entries.tolist()

    def compose(self, inner: "SubseqPrefix") -> "SubseqPrefix":
        """``(self o inner)(n) = self(inner(n))``."""
        if len(inner) and inner.entries[-1] > len(self):
            raise DomainError("inner selection reaches past the outer prefix")
        return SubseqPrefix(self.entries[inner.entries - 1], self.horizon)

    def to_text(self) -> str:
        return f"# subseq horizon {self.horizon}\n" + "".join(f"{v}\n" for v in self.entries.tolist())

    @classmethod
    def from_text(cls, text: str) -> "SubseqPrefix":
        horizon, values = _parse_listing(text, "subseq")
        return cls(values, horizon)


class PermPrefix:
    """Injective naturals ``p(1), ..., p(k)`` from ``[1, horizon]``."""

    __slots__ = ("entries", "horizon")

    def __init__(self, entries, horizon: int | None = None):
        arr = _int_array(entries)
        if horizon is None:
            horizon = int(arr.max()) if len(arr) else 1
        horizon = int(horizon)
        if len(arr):
            if arr.min() < 1:
                raise DomainError("permutation entries must be >= 1")
            if arr.max() > horizon:
                raise DomainError(f"entry {int(arr.max())} exceeds horizon {horizon}")
            if len(np.unique(arr)) != len(arr):
                raise ValueError("permutation entries must be pairwise distinct")
        arr.setflags(write=False)
        self.entries = arr
        self.horizon = horizon

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PermPrefix) and self.horizon == other.horizon
                and np.array_equal(self.entries, other.entries))

    def __repr__(self) -> str:
        head = ", ".join(str(int(v)) for v in self.entries[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"PermPrefix(({head}{more}), len={len(self)}, horizon={self.horizon})"

    def tolist(self) -> list[int]:
        return self.entries.tolist()

    def to_text(self) -> str:
        return f"# perm horizon {self.horizon}\n" + "".join(f"{v}\n" for v in self.entries.tolist())

    @classmethod
    def from_text(cls, text: str) -> "PermPrefix":
        horizon, values = _parse_listing(text, "perm")
        return cls(values, horizon)


Selection = Union[SubseqPrefix, PermPrefix]


def _parse_listing(text: str, kind: str) -> tuple[int | None, list[int]]:
    horizon = None
    values = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 3 and parts[0] == kind and parts[1] == "horizon":
                horizon = int(parts[2])
            continue
        values.extend(int(tok) for tok in line.replace(",", " ").split())
    return horizon, values


class CoinVector:
    """A 0/1 vector ``t(1..N)``."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if len(arr) and arr.max() > 1:
            raise ValueError("coin vectors hold only 0 and 1")
        arr.setflags(write=False)
        self.bits = arr

    def __len__(self) -> int:
        return len(self.bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, CoinVector) and np.array_equal(self.bits, other.bits)

    def __repr__(self) -> str:
        return f"CoinVector(N={len(self)}, ones={self.ones})"

    @property
    def ones(self) -> int:
        return int(self.bits.sum())

    def to_hex(self) -> str:
        """``N:hex`` with bit 1 as the most significant bit of the first byte."""
        return f"{len(self.bits)}:{np.packbits(self.bits).tobytes().hex()}"

    @classmethod
    def from_hex(cls, text: str) -> "CoinVector":
        length, _, payload = text.strip().partition(":")
        n = int(length)
        raw = np.frombuffer(bytes.fromhex(payload), dtype=np.uint8)
        if len(raw) != -(-n // 8):
            raise ValueError(f"hex payload has {len(raw)} bytes, length {n} needs {-(-n // 8)}")
        bits = np.unpackbits(raw)
        if bits[n:].any():
            raise ValueError("padding bits past the declared length must be zero")
        return cls(bits[:n])


def subseq_to_coins(s: SubseqPrefix, n: int) -> CoinVector:
    """The bijection S -> T at length ``n``: bit j is 1 iff j is an entry of s."""
    if len(s.entries) and s.entries[-1] > n:
        raise DomainError(f"entry {int(s.entries[-1])} exceeds length {n}")
    bits = np.zeros(n, dtype=np.uint8)
    bits[s.entries - 1] = 1
    return CoinVector(bits)


def coins_to_subseq(t: CoinVector) -> SubseqPrefix:
    """Inverse of :func:`subseq_to_coins`; the all-zero vector is not in T."""
    pos = np.flatnonzero(t.bits)
    if len(pos) == 0:
        raise DomainError("the all-zero coin vector has no selection (not in T)")
    return SubseqPrefix(pos + 1, len(t.bits))


def sample_coins(seed: int, trial: int, n: int) -> CoinVector:
    stream = Stream(seed, trial)
    bits = stream.bits(n)
    # the all-zero cell lies outside T; redraw from the same stream
    while not bits.any():
        bits = stream.bits(n)
    return CoinVector(bits)


def sample_lambda(seed: int, trial: int, n: int) -> SubseqPrefix:
    """A fair-coin selection from ``[1, n]`` keyed by ``(seed, trial)``."""
    return coins_to_subseq(sample_coins(seed, trial, n))


def sample_perm(seed: int, trial: int, n: int) -> PermPrefix:
    """Uniform permutation of ``[1..n]`` by Fisher-Yates on the keyed stream."""
    stream = Stream(seed, trial)
    out = list(range(1, n + 1))
    for i in range(n - 1, 0, -1):
        j = stream.below(i + 1)
        out[i], out[j] = out[j], out[i]
    return PermPrefix(out, n)


def apply_selection(x: PointSeq, s: Selection) -> PointSeq:
    """The sequence ``n -> x_{s(n)}``; its horizon is the length of ``s``."""
    if len(s.entries) == 0:
        raise DomainError("empty selection")
    top = int(s.entries.max())
    if top > x.horizon:
        raise DomainError(f"selection reaches index {top} beyond horizon {x.horizon}")
    return PointSeq(x.values[s.entries - 1], x.metric, None, x.name)
