"""Ideal convergence detectors for finite point sequences.

``i_converges`` looks for a limit among a small set of candidates: the values
at geometrically spaced tail indices, their coordinatewise lower median and
the lower median of the whole tail window.  A candidate ``z`` qualifies when
every exceptional set ``{n : d(x_n, z) >= eps}`` over the grid is a member of
the ideal; it is rejected as soon as one of them is a non-member.  Any
undecided membership keeps a candidate from settling either way, so the
detector answers ``UNDECIDED`` rather than guess.

``i_cauchy`` is the limit-free counterpart: for every ``eps`` some tail anchor
``N*`` must make ``{n : d(x_n, x_{N*}) > eps}`` a member.  In a complete space
the two notions agree, which the test suite checks across a generated corpus.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .ideals import FIN, IdealSpec, Verdict, decide_masks
from .selection import CoinVector, Selection, SubseqPrefix
from .sequences import DomainError, PointSeq

DEFAULT_GRID = tuple(2.0 ** -i for i in range(1, 8))
MAX_CANDIDATES = 16


class Convergence(enum.Enum):
    CONVERGENT = "convergent"
    DIVERGENT = "divergent"
    UNDECIDED = "undecided"


class Cauchy(enum.Enum):
    CAUCHY = "cauchy"
    NOT_CAUCHY = "not-cauchy"
    UNDECIDED = "undecided"


class ConfigError(ValueError):
    pass


def eps_grid(eps_min: float = DEFAULT_GRID[-1]) -> tuple[float, ...]:
    """Dyadic grid ``1/2, 1/4, ...`` down to the largest power not below ``eps_min``."""
    if not 0 < eps_min <= 0.5:
        raise ConfigError("eps_min must lie in (0, 1/2]")
    out = []
    e = 0.5
    while e >= eps_min:
        out.append(e)
        e /= 2
    return tuple(out)


def _check_grid(grid: Sequence[float]) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or len(g) == 0:
        raise ConfigError("eps grid must be a nonempty list")
    if not (g > 0).all() or (len(g) > 1 and not (np.diff(g) < 0).all()):
        raise ConfigError("eps grid must be positive and strictly decreasing")
    return g


@dataclass(frozen=True)
class EpsEvidence:
    eps: float
    verdict: Verdict


@dataclass(frozen=True)
class CandidateReport:
    point: object
    source: str
    evidence: tuple[EpsEvidence, ...]

    @property
    def qualifies(self) -> bool:
        return all(e.verdict is Verdict.MEMBER for e in self.evidence)

    @property
    def rejected(self) -> bool:
        return any(e.verdict is Verdict.NON_MEMBER for e in self.evidence)


@dataclass(frozen=True)
class ConvergenceVerdict:
    status: Convergence
    limit: object = None
    candidates: tuple[CandidateReport, ...] = ()
    note: str = ""

    @property
    def decided(self) -> bool:
        return self.status is not Convergence.UNDECIDED


@dataclass(frozen=True)
class CauchyVerdict:
    status: Cauchy
    anchors: tuple[tuple[float, Optional[int]], ...] = ()

    @property
    def decided(self) -> bool:
        return self.status is not Cauchy.UNDECIDED


def tail_indices(horizon: int, window: float = 0.5) -> list[int]:
    """``N``, ``N-1`` and ``ceil(N * 2**(-j/8))`` for j = 1..7, inside the tail window."""
    lo = max(1, math.ceil(window * horizon))
    raw = [horizon, horizon - 1] + [math.ceil(horizon * 2.0 ** (-j / 8)) for j in range(1, 8)]
    out = []
    for n in raw:
        if lo <= n <= horizon and n not in out:
            out.append(n)
    return out


def _lower_median(rows: np.ndarray):
    k = (len(rows) - 1) // 2
    return np.partition(rows, k, axis=0)[k]


def _as_point(value):
    arr = np.asarray(value, dtype=np.float64)
    return float(arr) if arr.ndim == 0 else tuple(float(v) for v in arr)


def candidates(x: PointSeq, window: float = 0.5) -> list[tuple[object, str]]:
    """Candidate limit points in a fixed, translation-compatible order."""
    idx = tail_indices(x.horizon, window)
    lo = max(1, math.ceil(window * x.horizon))
    samples = x.values[np.asarray(idx) - 1]
    raw = [(_as_point(x.values[n - 1]), f"x[{n}]") for n in idx]
    raw.append((_as_point(_lower_median(x.values[lo - 1:])), "window-median"))
    raw.append((_as_point(_lower_median(samples)), "sample-median"))
    out = []
    seen = set()
    for point, source in raw:
        if point not in seen:
            seen.add(point)
            out.append((point, source))
    return out[:MAX_CANDIDATES]


def _evidence(ideal: IdealSpec, d: np.ndarray, grid: np.ndarray, strict: bool) -> list[Verdict]:
    masks = d[:, None] > grid[None, :] if strict else d[:, None] >= grid[None, :]
    return decide_masks(ideal, masks)


def i_converges(x: PointSeq, ideal: IdealSpec, grid: Sequence[float] = DEFAULT_GRID) -> ConvergenceVerdict:
    g = _check_grid(grid)
    reports = []
    for point, source in candidates(x, ideal.window):
        verdicts = _evidence(ideal, x.distances(np.asarray(point)), g, strict=False)
        reports.append(CandidateReport(point, source,
                                       tuple(EpsEvidence(float(e), v) for e, v in zip(g, verdicts))))
    reports = tuple(reports)
    winners = [r for r in reports if r.qualifies]
    if winners:
        first = winners[0]
        for other in winners[1:]:
            # an I-limit is unique; two far-apart qualifiers mean the scale is too coarse
            if x.metric.distance(first.point, other.point) > g[-1]:
                return ConvergenceVerdict(Convergence.UNDECIDED, None, reports,
                                          "two qualifying limits further apart than min eps")
        return ConvergenceVerdict(Convergence.CONVERGENT, first.point, reports)
    if all(r.rejected for r in reports):
        return ConvergenceVerdict(Convergence.DIVERGENT, None, reports)
    return ConvergenceVerdict(Convergence.UNDECIDED, None, reports)


def i_cauchy(x: PointSeq, ideal: IdealSpec, grid: Sequence[float] = DEFAULT_GRID) -> CauchyVerdict:
    g = _check_grid(grid)
    anchors = tail_indices(x.horizon, ideal.window)
    table = np.array([[v is Verdict.MEMBER, v is Verdict.NON_MEMBER]
                      for n in anchors
                      for v in _evidence(ideal, x.distances(x.values[n - 1]), g, strict=True)])
    table = table.reshape(len(anchors), len(g), 2)
    found = []
    status = Cauchy.CAUCHY
    for j, e in enumerate(g):
        hits = np.flatnonzero(table[:, j, 0])
        if len(hits):
            found.append((float(e), anchors[hits[0]]))
            continue
        found.append((float(e), None))
        if table[:, j, 1].all():
            status = Cauchy.NOT_CAUCHY
        elif status is Cauchy.CAUCHY:
            status = Cauchy.UNDECIDED
    return CauchyVerdict(status, tuple(found))


@dataclass(frozen=True)
class WitnessPair:
    """Index sets ``u`` (within ``radius`` of ``center``) and ``v`` (at least ``2*radius`` away)."""

    u: SubseqPrefix
    v: SubseqPrefix
    center: object
    radius: float

    def rematerialize(self, x: PointSeq) -> "WitnessPair":
        """The same ball and annulus read off a (longer) sequence."""
        d = x.distances(np.asarray(self.center))
        return WitnessPair(SubseqPrefix(np.flatnonzero(d <= self.radius) + 1, x.horizon),
                           SubseqPrefix(np.flatnonzero(d >= 2 * self.radius) + 1, x.horizon),
                           self.center, self.radius)

    def holds(self, x: PointSeq) -> bool:
        d_u = x.metric.distances(x.take(self.u.entries), np.asarray(self.center))
        d_v = x.metric.distances(x.take(self.v.entries), np.asarray(self.center))
        return bool((d_u <= self.radius).all() and (d_v >= 2 * self.radius).all())


def _last_stages(horizon: int, count: int = 3) -> list[tuple[int, int]]:
    """The last ``count`` full dyadic stages ``[2**j, 2**(j+1))`` inside ``[1, horizon]``."""
    top = (horizon + 1).bit_length() - 2
    return [(2 ** j, 2 ** (j + 1)) for j in range(max(0, top - count + 1), top + 1)]


def _recurrent(mask: np.ndarray, stages) -> bool:
    return all(mask[a - 1:b - 1].any() for a, b in stages)


def _diameter(x: PointSeq) -> float:
    v = x.values
    if x.metric.kind == "discrete":
        return 1.0 if (v != v[0]).any() else 0.0
    if x.metric.kind == "real":
        return float(v.max() - v.min())
    return float(np.linalg.norm(v.max(axis=0) - v.min(axis=0)))


def _centers(x: PointSeq, radius: float) -> list:
    pts = [p for p, _ in candidates(x)]
    v = x.values
    qs = [np.partition(v, k, axis=0)[k] for k in ((len(v) - 1) * i // 8 for i in range(1, 8))]
    pts.extend(_as_point(q) for q in qs)
    if x.metric.kind == "real":
        lo, hi = float(v.min()), float(v.max())
        pts.extend([lo, hi])
        steps = int(math.ceil((hi - lo) / radius))
        pts.extend(lo + i * radius for i in range(steps + 1))
    elif x.metric.kind == "discrete":
        pts.extend(_as_point(u) for u in np.unique(v)[:MAX_CANDIDATES])
    out, seen = [], set()
    for p in pts:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def witness_pair(x: PointSeq) -> Optional[WitnessPair]:
    """A ball hit recurrently plus a recurrent set at twice its radius, if one exists.

    "Recurrent" at horizon ``N`` means meeting each of the last three full
    dyadic stages ``[2**j, 2**(j+1))``.  Radii halve from half the value-range
    diameter down to ``diameter / 2**8``; at the first radius that admits a
    pair, the center whose ball is hit least often wins (earlier centers win
    ties).  Returns ``None`` for classically convergent sequences and when no
    ball qualifies.
    """
    if x.horizon < 64:
        raise DomainError("witness_pair needs a horizon of at least 64")
    if i_converges(x, FIN).status is Convergence.CONVERGENT:
        return None
    diam = _diameter(x)
    if diam == 0:
        return None
    stages = _last_stages(x.horizon)
    for i in range(1, 9):
        r = diam / 2 ** i
        best = None
        for c in _centers(x, r):
            d = x.distances(np.asarray(c))
            near = d <= r
            if not _recurrent(near, stages):
                continue
            far = d >= 2 * r
            if not _recurrent(far, stages):
                continue
            hits = int(near.sum())
            if best is None or hits < best[0]:
                best = (hits, c, near, far)
        if best is not None:
            _, c, near, far = best
            return WitnessPair(SubseqPrefix(np.flatnonzero(near) + 1, x.horizon),
                               SubseqPrefix(np.flatnonzero(far) + 1, x.horizon), c, r)
    return None


def indicator_sequence(z: PointSeq, s: Selection, anchor: int, k: int) -> CoinVector:
    """Bits ``[rho(z_{s(j)}, z_{s(anchor)}) > 1/k]`` for j = 1..len(s)."""
    if not 1 <= anchor <= len(s):
        raise DomainError(f"anchor {anchor} outside [1, {len(s)}]")
    if k < 1:
        raise ValueError("k must be a positive natural")
    vals = z.take(s.entries)
    d = z.metric.distances(vals, vals[anchor - 1])
    return CoinVector((d > 1.0 / k).astype(np.uint8))
