"""Finite point sequences in a metric space.

A :class:`PointSeq` stores ``x_1, ..., x_N`` as a numpy array (row ``n-1``
holds ``x_n``).  Sequences built from a rule can be lengthened on demand,
which the witness construction relies on when it needs indices past the
original horizon.  Rules receive an int64 array of indices and must be
reentrant: the same index always yields the same value.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Callable, Optional

import numpy as np

Rule = Callable[[np.ndarray], np.ndarray]


class DomainError(ValueError):
    """An index, checkpoint or selection entry lies outside its allowed range."""


@dataclass(frozen=True)
class Metric:
    """``real`` (|a-b|), ``euclid`` (l2 in ``dim`` coordinates) or ``discrete`` (0/1)."""

    kind: str = "real"
    dim: int = 1

    def __post_init__(self):
        if self.kind not in ("real", "euclid", "discrete"):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.kind != "euclid" and self.dim != 1:
            raise ValueError("only the euclid metric takes a dimension")

    def distances(self, values: np.ndarray, point) -> np.ndarray:
        """Distance from every row of ``values`` to ``point``."""
        if self.kind == "real":
            return np.abs(values - point)
        if self.kind == "discrete":
            if values.ndim == 1:
                return (values != point).astype(np.float64)
            return np.any(values != point, axis=1).astype(np.float64)
        diff = values - np.asarray(point, dtype=np.float64)
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))

    def distance(self, a, b) -> float:
        a = np.asarray(a, dtype=np.float64)
        if self.kind == "euclid":
            return float(self.distances(a.reshape(1, -1), b)[0])
        return float(self.distances(a.reshape(1), b)[0])


REAL = Metric("real")
DISCRETE = Metric("discrete")


def euclid(dim: int) -> Metric:
    return Metric("euclid", dim)


class PointSeq:
    """The sequence ``x_1..x_N`` of a metric space, optionally backed by a rule."""

    __slots__ = ("values", "metric", "rule", "name")

    def __init__(self, values, metric: Metric = REAL, rule: Optional[Rule] = None,
                 name: str = ""):
        arr = np.asarray(values, dtype=np.float64)
        if metric.kind == "euclid":
            if arr.ndim != 2 or arr.shape[1] != metric.dim:
                raise ValueError(f"euclid({metric.dim}) values need shape (N, {metric.dim})")
        elif arr.ndim != 1:
            raise ValueError("real/discrete values must be one-dimensional")
        if len(arr) < 1:
            raise ValueError("a sequence needs at least one term")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sequence values must be finite")
        arr.setflags(write=False)
        self.values = arr
        self.metric = metric
        self.rule = rule
        self.name = name

    @classmethod
    def from_rule(cls, rule: Rule, horizon: int, metric: Metric = REAL, name: str = "") -> "PointSeq":
        idx = np.arange(1, int(horizon) + 1, dtype=np.int64)
        return cls(rule(idx), metric, rule, name)

    @property
    def horizon(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        label = self.name or "PointSeq"
        return f"<{label} N={self.horizon} metric={self.metric.kind}>"

    def at(self, n: int):
        """The term ``x_n`` (1-based)."""
        if not 1 <= n <= self.horizon:
            raise DomainError(f"index {n} outside [1, {self.horizon}]")
        return self.values[n - 1]

    def take(self, indices: np.ndarray) -> np.ndarray:
        """Rows for 1-based ``indices``."""
        indices = np.asarray(indices, dtype=np.int64)
        if len(indices) and (indices.min() < 1 or indices.max() > self.horizon):
            raise DomainError(f"indices outside [1, {self.horizon}]")
        return self.values[indices - 1]

    def extended(self, horizon: int) -> "PointSeq":
        """This sequence lengthened to ``horizon`` terms; needs a rule."""
        horizon = int(horizon)
        if horizon <= self.horizon:
            return self
        if self.rule is None:
            raise DomainError(f"{self!r} is stored, not rule-backed; cannot extend to {horizon}")
        new = self.rule(np.arange(self.horizon + 1, horizon + 1, dtype=np.int64))
        return PointSeq(np.concatenate([self.values, new]), self.metric, self.rule, self.name)

    def truncated(self, horizon: int) -> "PointSeq":
        return PointSeq(self.values[:horizon], self.metric, self.rule, self.name)

    def translated(self, shift) -> "PointSeq":
        rule = None if self.rule is None else partial(_shifted, self.rule, shift)
        return PointSeq(self.values + shift, self.metric, rule, self.name)

    def distances(self, point) -> np.ndarray:
        return self.metric.distances(self.values, point)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            for n, row in enumerate(self.values, start=1):
                w.writerow([n] + [repr(float(v)) for v in np.atleast_1d(row)])

    @classmethod
    def from_csv(cls, path, metric: Optional[Metric] = None) -> "PointSeq":
        """Load ``index,value[,value...]`` rows; indices must run 1..N in order.

        A non-numeric first row is treated as a header.  Without an explicit
        metric, one value column means ``real`` and more mean ``euclid``.
        """
        rows = []
        with open(path, newline="") as fh:
            for i, row in enumerate(csv.reader(fh)):
                if not row or row[0].startswith("#"):
                    continue
                try:
                    rows.append([float(c) for c in row])
                except ValueError:
                    if i == 0:
                        continue
                    raise ValueError(f"{path}: malformed row {i + 1}: {row}")
        if not rows:
            raise ValueError(f"{path}: no data rows")
        width = {len(r) for r in rows}
        if len(width) != 1 or width.pop() < 2:
            raise ValueError(f"{path}: rows need an index and the same number of values")
        data = np.array(rows)
        if not np.array_equal(data[:, 0], np.arange(1, len(data) + 1)):
            raise ValueError(f"{path}: indices must be 1..N in order")
        vals = data[:, 1:]
        if metric is None:
            metric = REAL if vals.shape[1] == 1 else euclid(vals.shape[1])
        if metric.kind != "euclid":
            vals = vals[:, 0]
        return cls(vals, metric, None, Path(path).stem)


def _shifted(rule: Rule, shift, n: np.ndarray) -> np.ndarray:
    return rule(n) + shift


# Built-in rules; module-level so sequences pickle across worker processes.

def harmonic(n: np.ndarray) -> np.ndarray:
    return 1.0 / n


def alternating(n: np.ndarray) -> np.ndarray:
    return np.where(n % 2 == 0, 1.0, -1.0)


def is_square(n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    r = np.floor(np.sqrt(n.astype(np.float64))).astype(np.int64)
    r = np.where(r * r > n, r - 1, r)
    r = np.where((r + 1) * (r + 1) <= n, r + 1, r)
    return r * r == n


def square_indicator(n: np.ndarray) -> np.ndarray:
    return is_square(n).astype(np.float64)


def identity_values(n: np.ndarray) -> np.ndarray:
    return n.astype(np.float64)


BUILTIN_RULES: dict[str, Rule] = {
    "harmonic": harmonic,
    "alternating": alternating,
    "square-indicator": square_indicator,
    "identity": identity_values,
}


def builtin(name: str, horizon: int) -> PointSeq:
    """One of the named corpus sequences (``harmonic``, ``alternating``, ...)."""
    try:
        rule = BUILTIN_RULES[name]
    except KeyError:
        raise ValueError(f"unknown sequence {name!r}; known: {sorted(BUILTIN_RULES)}") from None
    return PointSeq.from_rule(rule, horizon, REAL, name)


def ilog2(n: np.ndarray) -> np.ndarray:
    """Exact floor(log2 n) for positive int64 ``n``."""
    n = np.asarray(n, dtype=np.int64)
    _, e = np.frexp(n.astype(np.float64))
    k = e.astype(np.int64) - 1
    # float rounding can push values just under a power of two up by one
    k = np.where(np.left_shift(np.int64(1), k) > n, k - 1, k)
    return k

