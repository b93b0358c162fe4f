"""Ideals on the naturals at finite truncation.

Whether a set ``A`` of naturals belongs to an ideal is a statement about the
whole infinite set, so at horizon ``N`` the answer is trilean: ``MEMBER``,
``NON_MEMBER`` or ``UNDECIDED``.  Two built-in rules:

* ``Fin`` looks at the guard tail ``[g*N, N]``: empty means member, two or
  more elements means non-member, exactly one is undecided.
* ``density`` looks at ``|A & [1,n]| / n`` at the powers of two inside the
  window ``[w*N, N]`` (and at ``N``).  All values ``<= tau_in`` with a
  profile non-increasing across the powers of two means member; all values
  ``>= tau_out`` means non-member.  A set the Fin rule calls a member is a
  density member too, since every admissible ideal contains the finite sets.

Interval witnesses: for the density ideal the cutpoints ``n_i = 2**i`` work,
because a set containing infinitely many blocks ``[2**i, 2**(i+1))`` has
``|A & [1, 2**(i+1))| / 2**(i+1) >= 1/2`` infinitely often, so its upper
density is at least 1/2.  For Fin any cutpoints work; ``n_i = i + 1`` is used.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .rng import Stream, derive_seed
from .selection import PermPrefix, Selection, SubseqPrefix
from .sequences import DomainError


class Verdict(enum.Enum):
    MEMBER = "member"
    NON_MEMBER = "non-member"
    UNDECIDED = "undecided"


class Invariance(enum.Enum):
    INVARIANT = "invariant"
    NOT_INVARIANT = "not-invariant"
    UNDECIDED = "undecided"


class UnsupportedIdeal(ValueError):
    pass


class IndexSet:
    """A finite set ``A`` of naturals inside ``[1, horizon]``."""

    __slots__ = ("elements", "horizon")

    def __init__(self, elements, horizon: int):
        arr = np.asarray(elements, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("elements must be one-dimensional")
        horizon = int(horizon)
        if horizon < 1:
            raise ValueError("horizon must be positive")
        if len(arr):
            if len(arr) > 1 and not (arr[1:] > arr[:-1]).all():
                raise ValueError("elements must be strictly increasing")
            if arr[0] < 1 or arr[-1] > horizon:
                raise DomainError(f"elements must lie in [1, {horizon}]")
        arr.setflags(write=False)
        self.elements = arr
        self.horizon = horizon

    @classmethod
    def from_iterable(cls, items, horizon: int) -> "IndexSet":
        return cls(np.unique(np.asarray(list(items), dtype=np.int64)), horizon)

    @classmethod
    def from_mask(cls, mask) -> "IndexSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(np.flatnonzero(mask) + 1, len(mask))

    @classmethod
    def full(cls, horizon: int) -> "IndexSet":
        return cls(np.arange(1, horizon + 1), horizon)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.horizon, dtype=bool)
        m[self.elements - 1] = True
        return m

    def count_upto(self, n) -> np.ndarray:
        """``|A & [1, n]|`` for each ``n`` (vectorised)."""
        return np.searchsorted(self.elements, n, side="right")

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, n) -> bool:
        i = np.searchsorted(self.elements, n)
        return bool(i < len(self.elements) and self.elements[i] == n)

    def __eq__(self, other) -> bool:
        return (isinstance(other, IndexSet) and self.horizon == other.horizon
                and np.array_equal(self.elements, other.elements))

    def __repr__(self) -> str:
        head = ", ".join(str(int(v)) for v in self.elements[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"IndexSet({{{head}{more}}}, size={len(self)}, horizon={self.horizon})"

    def union(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(np.union1d(self.elements, other.elements), max(self.horizon, other.horizon))

    def issubset(self, other: "IndexSet") -> bool:
        return bool(np.isin(self.elements, other.elements, assume_unique=True).all())

    def to_text(self, blocks: bool = False) -> str:
        """One natural per line, or ``start..end`` runs when ``blocks`` is set."""
        lines = [f"# indexset horizon {self.horizon}"]
        if not blocks:
            lines.extend(str(v) for v in self.elements.tolist())
        else:
            for start, end in _runs(self.elements):
                lines.append(f"{start}..{end}" if end > start else str(start))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, horizon: Optional[int] = None) -> "IndexSet":
        """Parse either serialization; a ``# indexset horizon N`` header sets the horizon."""
        found = None
        chunks = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 3 and parts[:2] == ["indexset", "horizon"]:
                    found = int(parts[2])
                continue
            if ".." in line:
                a, _, b = line.partition("..")
                lo, hi = int(a), int(b)
                if hi < lo:
                    raise ValueError(f"empty block {line!r}")
                chunks.append(np.arange(lo, hi + 1, dtype=np.int64))
            else:
                chunks.append(np.array([int(line)], dtype=np.int64))
        elems = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
        if len(elems) > 1 and not (elems[1:] > elems[:-1]).all():
            raise ValueError("serialized elements must be strictly increasing")
        if horizon is None:
            horizon = found if found is not None else (int(elems[-1]) if len(elems) else 1)
        return cls(elems, horizon)


def _runs(elements: np.ndarray) -> list[tuple[int, int]]:
    if len(elements) == 0:
        return []
    breaks = np.flatnonzero(np.diff(elements) != 1)
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [len(elements) - 1]])
    return [(int(elements[s]), int(elements[e])) for s, e in zip(starts, ends)]


@dataclass(frozen=True)
class IdealSpec:
    """An ideal on the naturals plus its finite-scale decision parameters."""

    kind: str
    window: float = 0.5
    tau_in: float = 0.05
    tau_out: float = 0.2
    guard: float = 0.25
    oracle: Optional[Callable[[IndexSet], Verdict]] = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("fin", "density", "custom"):
            raise ValueError(f"unknown ideal kind {self.kind!r}")
        if self.kind == "custom" and self.oracle is None:
            raise ValueError("a custom ideal needs an oracle")
        if not 0 < self.tau_in < self.tau_out < 1:
            raise ValueError("need 0 < tau_in < tau_out < 1")
        if not 0 < self.window < 1 or not 0 < self.guard < 1:
            raise ValueError("window and guard fractions must lie in (0, 1)")

    @property
    def name(self) -> str:
        return self.label or self.kind

    @classmethod
    def custom(cls, oracle: Callable[[IndexSet], Verdict], label: str = "custom") -> "IdealSpec":
        return cls("custom", oracle=oracle, label=label)

    def checkpoints(self, horizon: int) -> list[int]:
        """Powers of two in the tail window ``[w*N, N]``, plus ``N`` itself."""
        lo = max(1, math.ceil(self.window * horizon))
        pts = []
        p = 1
        while p <= horizon:
            if p >= lo:
                pts.append(p)
            p *= 2
        if not pts or pts[-1] != horizon:
            pts.append(horizon)
        return pts

    def guard_start(self, horizon: int) -> int:
        return max(1, math.ceil(self.guard * horizon))

    def cuts(self, horizon: int) -> list[int]:
        """Prefix lengths whose counts the built-in rules need."""
        cuts = set(self.checkpoints(horizon)) | {self.guard_start(horizon) - 1, horizon}
        return sorted(cuts)


FIN = IdealSpec("fin")
DENSITY = IdealSpec("density")

IDEALS = {"fin": FIN, "density": DENSITY}


def ideal_by_name(name: str) -> IdealSpec:
    try:
        return IDEALS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown ideal {name!r}; known: {sorted(IDEALS)}") from None


@dataclass(frozen=True)
class MembershipVerdict:
    verdict: Verdict
    profile: tuple[tuple[int, Fraction], ...]
    tail: tuple[int, int]

    @property
    def decided(self) -> bool:
        return self.verdict is not Verdict.UNDECIDED


def _fin_rule(tail_count: int) -> Verdict:
    if tail_count == 0:
        return Verdict.MEMBER
    if tail_count >= 2:
        return Verdict.NON_MEMBER
    return Verdict.UNDECIDED


def _density_rule(ideal: IdealSpec, checkpoints: Sequence[int], counts: Sequence[int],
                  tail_count: int) -> Verdict:
    if tail_count == 0:
        return Verdict.MEMBER
    if all(c >= ideal.tau_out * n for n, c in zip(checkpoints, counts)):
        return Verdict.NON_MEMBER
    if all(c <= ideal.tau_in * n for n, c in zip(checkpoints, counts)):
        # monotonicity is read on the geometric (power-of-two) checkpoints only:
        # N can sit a few indices past 2**k, where one element flips the order
        geo = [(n, c) for n, c in zip(checkpoints, counts) if n & (n - 1) == 0]
        # exact rational comparison c_i / n_i >= c_{i+1} / n_{i+1}
        steady = all(c0 * n1 >= c1 * n0 for (n0, c0), (n1, c1) in zip(geo, geo[1:]))
        if steady:
            return Verdict.MEMBER
    return Verdict.UNDECIDED


def decide_counts(ideal: IdealSpec, horizon: int, count_at: dict[int, int]) -> Verdict:
    """Apply a built-in rule given ``count_at[c] = |A & [1, c]|`` for ``c`` in ``ideal.cuts``."""
    lo = ideal.guard_start(horizon)
    tail = count_at[horizon] - count_at[lo - 1] if lo > 1 else count_at[horizon]
    if ideal.kind == "fin":
        return _fin_rule(tail)
    cps = ideal.checkpoints(horizon)
    return _density_rule(ideal, cps, [count_at[c] for c in cps], tail)


def decide_masks(ideal: IdealSpec, masks: np.ndarray) -> list[Verdict]:
    """Verdicts for the columns of a boolean ``(N, k)`` matrix of indicator vectors."""
    masks = np.asarray(masks, dtype=bool)
    if masks.ndim == 1:
        masks = masks[:, None]
    horizon, k = masks.shape
    if ideal.kind == "custom":
        return [ideal.oracle(IndexSet.from_mask(masks[:, j])) for j in range(k)]
    cuts = [c for c in ideal.cuts(horizon) if c > 0]
    starts = [0] + cuts[:-1]
    seg = np.add.reduceat(masks, starts, axis=0, dtype=np.int64)
    pref = np.cumsum(seg, axis=0)
    out = []
    for j in range(k):
        count_at = {0: 0}
        count_at.update({c: int(pref[i, j]) for i, c in enumerate(cuts)})
        out.append(decide_counts(ideal, horizon, count_at))
    return out


def density_profile(a: IndexSet, checkpoints) -> list[tuple[int, Fraction]]:
    """Exact ``|A & [1,n]| / n`` at each checkpoint."""
    cps = [int(n) for n in checkpoints]
    for i, n in enumerate(cps):
        if not 1 <= n <= a.horizon:
            raise DomainError(f"checkpoint {n} outside [1, {a.horizon}]")
        if i and n <= cps[i - 1]:
            raise ValueError("checkpoints must be increasing")
    counts = a.count_upto(cps)
    return [(n, Fraction(int(c), n)) for n, c in zip(cps, counts)]


def membership(ideal: IdealSpec, a: IndexSet) -> MembershipVerdict:
    """Trilean finite-scale decision of ``A in I`` with its density evidence."""
    n = a.horizon
    cps = ideal.checkpoints(n)
    profile = tuple(density_profile(a, cps))
    lo = ideal.guard_start(n)
    tail = int(len(a) - a.count_upto(lo - 1))
    if ideal.kind == "custom":
        verdict = ideal.oracle(a)
    elif ideal.kind == "fin":
        verdict = _fin_rule(tail)
    else:
        verdict = _density_rule(ideal, cps, [int(f * n) for n, f in profile], tail)
    return MembershipVerdict(verdict, profile, (lo, tail))


@dataclass(frozen=True)
class IntervalWitness:
    """Cutpoints ``n_1 < n_2 < ...`` such that no ideal member contains infinitely
    many of the blocks ``[n_i, n_{i+1})``."""

    cutpoints: tuple[int, ...]
    rule: str

    def __post_init__(self):
        c = self.cutpoints
        if not c or c[0] < 2:
            raise ValueError("cutpoints must start at 2 or above")
        if any(b <= a for a, b in zip(c, c[1:])):
            raise ValueError("cutpoints must be strictly increasing")

    def __len__(self) -> int:
        return len(self.cutpoints)

    def n(self, i: int) -> int:
        """The 1-based cutpoint ``n_i``."""
        return self.cutpoints[i - 1]


def interval_witness(ideal: IdealSpec, count: int) -> IntervalWitness:
    if count < 1:
        raise ValueError("count must be positive")
    if ideal.kind == "density":
        return IntervalWitness(tuple(2 ** i for i in range(1, count + 1)), "n_i = 2^i")
    if ideal.kind == "fin":
        return IntervalWitness(tuple(i + 1 for i in range(1, count + 1)), "n_i = i + 1")
    raise UnsupportedIdeal(f"no interval witness construction for ideal {ideal.name!r}")


def check_witness(witness: IntervalWitness, a: IndexSet) -> int:
    """Number of blocks ``[n_i, n_{i+1})`` inside ``[1, horizon]`` fully contained in ``A``."""
    c = np.asarray(witness.cutpoints, dtype=np.int64)
    lo, hi = c[:-1], c[1:] - 1
    inside = hi <= a.horizon
    lo, hi = lo[inside], hi[inside]
    have = a.count_upto(hi) - a.count_upto(lo - 1)
    return int(np.count_nonzero(have == hi - lo + 1))


def image_set(mapping: Selection, a: IndexSet) -> IndexSet:
    """``f[A]`` for a selection ``f`` defined on every element of ``A``."""
    if len(a) and a.elements[-1] > len(mapping):
        raise DomainError(f"element {int(a.elements[-1])} outside the map's prefix of length {len(mapping)}")
    img = mapping.entries[a.elements - 1]
    if isinstance(mapping, PermPrefix):
        img = np.sort(img)
    return IndexSet(img, mapping.horizon)


def standard_battery(horizon: int, seed: int = 0, trial: int = 0) -> list[tuple[str, IndexSet]]:
    """The named test families used for invariance sampling.

    evens, odds, squares, ``floor(k log k)``, the block union of
    ``[4**j, 2 * 4**j)``, and Bernoulli(p) sets for p in {0.01, 0.5} drawn from
    the stream keyed by ``(derive_seed(seed, "battery"), trial)``.
    """
    n = np.arange(1, horizon + 1, dtype=np.int64)
    k = np.arange(2, horizon + 2, dtype=np.float64)
    klogk = np.unique(np.floor(k * np.log(k)).astype(np.int64))
    klogk = klogk[(klogk >= 1) & (klogk <= horizon)]
    blocks = []
    j = 0
    while 4 ** j <= horizon:
        blocks.append(np.arange(4 ** j, min(2 * 4 ** j, horizon + 1), dtype=np.int64))
        j += 1
    u = Stream(derive_seed(seed, "battery"), trial).uniform(2 * horizon)
    return [
        ("evens", IndexSet(n[n % 2 == 0], horizon)),
        ("odds", IndexSet(n[n % 2 == 1], horizon)),
        ("squares", IndexSet(np.arange(1, math.isqrt(horizon) + 1, dtype=np.int64) ** 2, horizon)),
        ("klogk", IndexSet(klogk, horizon)),
        ("geometric-blocks", IndexSet(np.concatenate(blocks), horizon)),
        ("bernoulli-0.01", IndexSet(n[u[:horizon] < 0.01], horizon)),
        ("bernoulli-0.5", IndexSet(n[u[horizon:] < 0.5], horizon)),
    ]


@dataclass(frozen=True)
class InvarianceSample:
    verdict: Invariance
    pairs: tuple[tuple[str, Verdict, Verdict], ...]


def is_invariant_sample(mapping: Selection, ideal: IdealSpec,
                        families: Optional[Sequence] = None,
                        seed: int = 0, trial: int = 0) -> InvarianceSample:
    """Compare ``A in I`` with ``f[A] in I`` over a battery of test sets.

    Pairs where either side is undecided are skipped.  One decided
    disagreement makes the map not invariant; with no decided pair at all the
    answer is undecided.
    """
    if families is None:
        families = standard_battery(len(mapping), seed, trial)
    named = [(f if isinstance(f, tuple) else (f"set{i}", f)) for i, f in enumerate(families)]
    if not named:
        raise ValueError("need at least one test family")
    pairs = []
    decided = disagree = 0
    for name, a in named:
        va = membership(ideal, a).verdict
        vb = membership(ideal, image_set(mapping, a)).verdict
        pairs.append((name, va, vb))
        if va is not Verdict.UNDECIDED and vb is not Verdict.UNDECIDED:
            decided += 1
            disagree += va is not vb
    if disagree:
        verdict = Invariance.NOT_INVARIANT
    elif decided:
        verdict = Invariance.INVARIANT
    else:
        verdict = Invariance.UNDECIDED
    return InvarianceSample(verdict, tuple(pairs))
