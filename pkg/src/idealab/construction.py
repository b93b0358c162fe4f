"""Constructing ideal-divergent subsequences and rearrangements by block extension.

Given a witness pair (indices ``u`` whose terms stay within ``r`` of a center
and indices ``v`` whose terms stay at least ``2r`` away) and interval
cutpoints ``n_1 < n_2 < ...``, one extension round turns a prefix
``(s_1, ..., s_d)`` into a longer one in three steps:

1. pad with consecutive integers, ``s(i) = s_d + i - d``, up to position
   ``n_k - 1`` where ``k`` is least with ``n_k > d``;
2. copy ``u(p_k), u(p_k + 1), ...`` into positions ``[n_k, n_{k+1})``, with
   ``p_k`` the smallest index such that ``u(p_k) > s(n_k - 1)``;
3. copy ``v(q_k), ...`` into ``[n_{k+1}, n_{k+2})`` the same way.

The result lies in the set ``A_m`` of selections that, past position ``m``,
show a whole near block followed by a whole far block.  Iterating rounds for
``m = 1, 2, ...`` yields a selection in every visited ``A_m``; both the near
and far position sets then contain one witness block per round, so neither
belongs to the ideal and the selected sequence is not ideal-convergent.

The rearrangement variant keeps entries globally injective instead of
increasing: pads take the smallest unused integers and block picks skip
indices already used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .convergence import Convergence, ConvergenceVerdict, WitnessPair, i_converges, witness_pair
from .ideals import FIN, IdealSpec, IntervalWitness, interval_witness
from .rng import Stream, derive_seed
from .selection import PermPrefix, SubseqPrefix, apply_selection
from .sequences import DomainError, PointSeq

DEFAULT_MAX_HORIZON = 2 ** 22


class WitnessExhausted(RuntimeError):
    """The witness pair ran out of indices before a block was complete."""


class NotConstructible(RuntimeError):
    """No witness pair: the sequence converges, or has no convergent subsequence at this scale.

    In the second case no subsequence is ideal-convergent at all, so every
    selection is already a divergent one.
    """


@dataclass(frozen=True)
class BlockPlan:
    witness: IntervalWitness
    pair: WitnessPair
    m: int


@dataclass(frozen=True)
class AmVerdict:
    yes: bool
    k: Optional[int] = None

    def __bool__(self) -> bool:
        return self.yes


@dataclass(frozen=True)
class RoundTrace:
    m: int
    k: int
    pad: tuple[int, int]
    u_block: tuple[int, int]
    v_block: tuple[int, int]
    p_k: int
    q_k: int

    def line(self) -> str:
        pad = f"{self.pad[0]}..{self.pad[1]}" if self.pad[1] >= self.pad[0] else "-"
        return (f"m={self.m} k={self.k} pad={pad} "
                f"u_block={self.u_block[0]}..{self.u_block[1]} p_k={self.p_k} "
                f"v_block={self.v_block[0]}..{self.v_block[1]} q_k={self.q_k}")


def _ensure_covers(x: PointSeq, top: int) -> PointSeq:
    if top <= x.horizon:
        return x
    if x.rule is None:
        raise DomainError(f"index {top} beyond the stored horizon {x.horizon}")
    return x.extended(top)


def in_am(s: Union[SubseqPrefix, PermPrefix], plan: BlockPlan, x: PointSeq) -> AmVerdict:
    """Is ``s`` in ``A_m``: some ``n_k > m`` with a near block then a far block?

    Returns the least such ``k``.  Raises :class:`DomainError` when ``s`` is
    too short to test even one admissible ``k``.
    """
    c = plan.witness.cutpoints
    length = len(s)
    ks = [k for k in range(1, len(c) - 1) if c[k - 1] > plan.m and c[k + 1] - 1 <= length]
    if not ks:
        raise DomainError(f"selection of length {length} too short to test A_{plan.m}")
    top = c[ks[-1] + 1] - 1
    x = _ensure_covers(x, int(s.entries[:top].max()))
    d = x.metric.distances(x.take(s.entries[:top]), np.asarray(plan.pair.center))
    r = plan.pair.radius
    near = d <= r
    far = d >= 2 * r
    for k in ks:
        a, b, e = c[k - 1], c[k], c[k + 1]
        if near[a - 1:b - 1].all() and far[b - 1:e - 1].all():
            return AmVerdict(True, k)
    return AmVerdict(False)


def _least_k(cutpoints: np.ndarray, d: int) -> int:
    k = int(np.searchsorted(cutpoints, d, side="right")) + 1
    if k + 2 > len(cutpoints):
        raise ValueError(f"interval witness too short: need cutpoints past n_{k + 2}")
    return k


class _Builder:
    """A growing selection; each round is staged and committed only if it completes."""

    def __init__(self, entries: list[int], perm: bool):
        self.entries = list(entries)
        self.perm = perm
        self.used = set(entries)
        self.cursor = {"pad": 1, "u": 0, "v": 0}
        self._witness: Optional[IntervalWitness] = None
        self._cuts = np.zeros(0, dtype=np.int64)

    def round(self, m: int, witness: IntervalWitness, pair: WitnessPair) -> RoundTrace:
        staged: list[int] = []
        seen: set[int] = set()
        cursor = dict(self.cursor)

        def taken(n: int) -> bool:
            return n in self.used or n in seen

        def last() -> int:
            if staged:
                return staged[-1]
            return self.entries[-1] if self.entries else 0

        def pad(count: int) -> None:
            if count <= 0:
                return
            if not self.perm:
                start = last() + 1
                staged.extend(range(start, start + count))
                return
            n = cursor["pad"]
            while count:
                if not taken(n):
                    staged.append(n)
                    seen.add(n)
                    count -= 1
                n += 1
            cursor["pad"] = n

        def pick(which: str, supply: np.ndarray, count: int) -> int:
            if not self.perm:
                after = last()
                p = int(np.searchsorted(supply, after, side="right"))
                if p + count > len(supply):
                    raise WitnessExhausted(
                        f"{which} has {len(supply) - p} indices past {after}, need {count}")
                staged.extend(supply[p:p + count].tolist())
                return p + 1
            i = cursor[which]
            while i < len(supply) and taken(int(supply[i])):
                i += 1
            first = i
            while count and i < len(supply):
                n = int(supply[i])
                if not taken(n):
                    staged.append(n)
                    seen.add(n)
                    count -= 1
                i += 1
            if count:
                raise WitnessExhausted(f"{which} ran out of unused indices ({count} short)")
            cursor[which] = i
            return first + 1

        c = witness.cutpoints
        if witness is not self._witness:
            self._witness, self._cuts = witness, np.asarray(c, dtype=np.int64)
        d0 = len(self.entries)
        # for d < m: pad to length m first, in the step-1 style
        pad(m - d0)
        d = d0 + len(staged)
        k = _least_k(self._cuts, d)
        nk, nk1, nk2 = c[k - 1], c[k], c[k + 1]
        pad(nk - 1 - d)
        p_k = pick("u", pair.u.entries, nk1 - nk)
        q_k = pick("v", pair.v.entries, nk2 - nk1)
        self.entries.extend(staged)
        self.used.update(seen)
        self.cursor = cursor
        return RoundTrace(m, k, (d0 + 1, nk - 1), (nk, nk1 - 1), (nk1, nk2 - 1), p_k, q_k)


def _selection(entries: list[int], horizon: int, perm: bool):
    if perm:
        return PermPrefix(entries, horizon)
    return SubseqPrefix(entries, horizon)


def extend_prefix(prefix: SubseqPrefix, plan: BlockPlan, x: PointSeq) -> SubseqPrefix:
    """One three-step extension round of ``prefix`` under ``plan``.

    Raises :class:`WitnessExhausted` if ``plan.pair`` runs out of indices.
    """
    b = _Builder(prefix.tolist(), perm=False)
    b.round(plan.m, plan.witness, plan.pair)
    horizon = max(prefix.horizon, plan.pair.u.horizon, plan.pair.v.horizon, x.horizon, b.entries[-1])
    return SubseqPrefix(b.entries, horizon)


@dataclass
class Construction:
    """A constructed selection with everything needed to replay and audit it."""

    selection: Union[SubseqPrefix, PermPrefix]
    rounds: list[RoundTrace]
    pair: WitnessPair
    witness: IntervalWitness
    x: PointSeq
    seed: int
    exhausted: bool = False

    @property
    def perm(self) -> bool:
        return isinstance(self.selection, PermPrefix)

    def plans(self) -> list[BlockPlan]:
        return [BlockPlan(self.witness, self.pair, r.m) for r in self.rounds]

    def selected(self) -> PointSeq:
        """The sequence ``x_{s(n)}``."""
        return apply_selection(self.x, self.selection)

    def replay(self, ideal: IdealSpec, grid=None) -> ConvergenceVerdict:
        if grid is None:
            return i_converges(self.selected(), ideal)
        return i_converges(self.selected(), ideal, grid)

    def trace_text(self) -> str:
        kind = "perm" if self.perm else "subseq"
        head = [f"# {kind} construction seed={self.seed} length={len(self.selection)}",
                f"# witness {self.witness.rule}; center={self.pair.center!r} radius={self.pair.radius!r}",
                f"# prefix {self.selection.tolist()[:self.rounds[0].pad[0] - 1]}"]
        tail = ["# stopped: witness pair exhausted before target length"] if self.exhausted else []
        return "\n".join(head + [r.line() for r in self.rounds] + tail) + "\n"


def random_prefix(seed: int, perm: bool) -> list[int]:
    """A seeded prefix of length 1..3 with entries from ``[1, 4*length]``."""
    st = Stream(derive_seed(seed, "prefix"), 0)
    length = 1 + st.below(3)
    pool = list(range(1, 4 * length + 1))
    for i in range(len(pool) - 1, 0, -1):
        j = st.below(i + 1)
        pool[i], pool[j] = pool[j], pool[i]
    chosen = pool[:length]
    return chosen if perm else sorted(chosen)


def construct(x: PointSeq, ideal: IdealSpec, target_len: int, seed: int, perm: bool = False,
              max_horizon: Optional[int] = None) -> Construction:
    """Iterate extension rounds ``m = 1, 2, ...`` until ``target_len`` entries exist.

    Rule-backed sequences are lengthened (by factors of 4, up to
    ``max_horizon``) whenever the witness pair runs short.  If the pair is
    still exhausted, the selection built so far is returned with
    ``exhausted`` set, provided at least one round completed.
    """
    if target_len < 1:
        raise ValueError("target_len must be positive")
    cap = max(x.horizon, DEFAULT_MAX_HORIZON if max_horizon is None else int(max_horizon))
    limit = x.horizon if x.rule is None else cap
    if perm and target_len > limit:
        raise DomainError(f"cannot inject {target_len} entries into [1, {limit}]")
    if ideal.kind == "density":
        witness = interval_witness(ideal, 62)
    else:
        witness = interval_witness(ideal, target_len + 8)
    if i_converges(x, FIN).status is Convergence.CONVERGENT:
        raise NotConstructible(
            "the sequence converges, so every subsequence and every rearrangement converges "
            "to the same limit; no divergent selection exists")
    pair = witness_pair(x)
    if pair is None:
        raise NotConstructible(
            "no ball is visited recurrently at this horizon: the sequence has no convergent "
            "subsequence here, and then no selection of it is ideal-convergent, so every "
            "selection already diverges and there is nothing to build")
    builder = _Builder(random_prefix(seed, perm), perm)
    rounds: list[RoundTrace] = []
    exhausted = False
    m = 1
    while len(builder.entries) < target_len:
        try:
            rounds.append(builder.round(m, witness, pair))
        except WitnessExhausted:
            if x.rule is not None and x.horizon < cap:
                x = x.extended(min(4 * x.horizon, cap))
                pair = pair.rematerialize(x)
                continue
            if not rounds:
                raise
            exhausted = True
            break
        m += 1
    x = _ensure_covers(x, max(builder.entries))
    selection = _selection(builder.entries, x.horizon, perm)
    return Construction(selection, rounds, pair, witness, x, seed, exhausted)


def build_divergent_subseq(x: PointSeq, ideal: IdealSpec, target_len: int, seed: int,
                           max_horizon: Optional[int] = None) -> SubseqPrefix:
    return construct(x, ideal, target_len, seed, False, max_horizon).selection


def build_divergent_perm(x: PointSeq, ideal: IdealSpec, target_len: int, seed: int,
                         max_horizon: Optional[int] = None) -> PermPrefix:
    return construct(x, ideal, target_len, seed, True, max_horizon).selection
