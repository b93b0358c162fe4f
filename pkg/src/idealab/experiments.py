"""Function families, domain sampling and seeded Monte Carlo estimators.

Every trial is a pure function of ``(config, trial index)``: selections are
drawn from the stream keyed by ``(derive_seed(seed, "selection"), j)`` and
domain points from ``derive_seed(seed, "domain")``.  Workers only ever see
those keys, and results are merged in trial-index order, so the canonical
report does not depend on how many processes ran.
"""

from __future__ import annotations

import concurrent.futures as cf
import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .construction import NotConstructible, WitnessExhausted, construct, in_am
from .convergence import ConfigError, Convergence, eps_grid, i_converges
from .ideals import IdealSpec, IndexSet, Invariance, ideal_by_name, is_invariant_sample
from .rng import Stream, derive_seed
from .selection import apply_selection, sample_lambda
from .sequences import REAL, DomainError, PointSeq, alternating, builtin, ilog2, square_indicator

Z95 = 1.959963984540054
LOW, HIGH = 0.02, 0.98
MIN_HORIZON = 2 ** 10


# ---------------------------------------------------------------- families

FAMILY_KINDS = ("alternating", "powerx", "sinpi", "typewriter", "square-indicator", "table")


def _powerx(x: float, n: np.ndarray) -> np.ndarray:
    return np.power(x, n.astype(np.float64))


def _sinpi(x: float, n: np.ndarray) -> np.ndarray:
    # reduce n*x mod 2 before scaling so large n keep their precision
    return np.sin(np.pi * np.fmod(n.astype(np.float64) * x, 2.0))


def _typewriter(x: float, n: np.ndarray) -> np.ndarray:
    k = ilog2(n)
    j = n - np.left_shift(np.int64(1), k)
    y = np.ldexp(x, k.astype(np.int32))  # exact: x * 2**k
    return ((j <= y) & (y <= j + 1)).astype(np.float64)


def _constant_in_x(rule, x: float, n: np.ndarray) -> np.ndarray:
    return rule(n)


def near_small_rational(x: float, qmax: int = 8, tol: float = 1e-6) -> bool:
    """Is ``x`` within ``tol`` of some ``p/q`` with ``q <= qmax``?"""
    return any(abs(x - round(x * q) / q) < tol for q in range(1, qmax + 1))


@dataclass(frozen=True)
class FunctionFamily:
    """A sequence of functions ``f_n : [0, 1] -> R``.

    ``table`` families read a CSV of ``n,value`` rows and are constant in x.
    """

    kind: str
    table: Optional[str] = None
    _stored: Optional[PointSeq] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ConfigError(f"unknown family {self.kind!r}; known: {list(FAMILY_KINDS)}")
        if self.kind == "table":
            if not self.table:
                raise ConfigError("a table family needs a CSV path")
            if self._stored is None:
                object.__setattr__(self, "_stored", PointSeq.from_csv(self.table, REAL))

    @classmethod
    def parse(cls, text: str) -> "FunctionFamily":
        """``sinpi``, ``typewriter``, ... or ``table:path.csv``."""
        if text.startswith("table:"):
            return cls("table", text[len("table:"):])
        return cls(text)

    @property
    def name(self) -> str:
        return f"table:{self.table}" if self.kind == "table" else self.kind

    def rule(self, x: float) -> Optional[Callable[[np.ndarray], np.ndarray]]:
        x = float(x)
        if self.kind == "alternating":
            return partial(_constant_in_x, alternating, x)
        if self.kind == "square-indicator":
            return partial(_constant_in_x, square_indicator, x)
        if self.kind == "powerx":
            return partial(_powerx, x)
        if self.kind == "sinpi":
            return partial(_sinpi, x)
        if self.kind == "typewriter":
            return partial(_typewriter, x)
        return None

    def sequence(self, x: float, horizon: int) -> PointSeq:
        """``(f_n(x))`` for ``n = 1..horizon``."""
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x = {x} outside [0, 1]")
        if self.kind == "table":
            if horizon > self._stored.horizon:
                raise DomainError(f"table has {self._stored.horizon} terms, asked for {horizon}")
            return self._stored.truncated(horizon)
        return PointSeq.from_rule(self.rule(x), horizon, REAL, f"{self.kind}@{x!r}")

    def accepts(self, x: float) -> bool:
        """Sampling filter: sin(n pi x) points keep clear of small-denominator rationals."""
        return self.kind != "sinpi" or not near_small_rational(x)


@dataclass(frozen=True)
class DomainSampler:
    """``grid``: midpoints ``(i + 1/2) / count``; ``uniform``: seeded draws on [0, 1)."""

    kind: str = "grid"
    count: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("grid", "uniform"):
            raise ConfigError(f"unknown sampler {self.kind!r}")
        if self.count < 1:
            raise ConfigError("need at least one domain point")

    def points(self, family: Optional[FunctionFamily] = None) -> tuple[list[float], int]:
        """Accepted points and the number of rejected ones.

        Rejected grid points are dropped; uniform draws are replaced by
        further draws from the same stream.
        """
        keep = family.accepts if family is not None else (lambda _x: True)
        if self.kind == "grid":
            raw = [(i + 0.5) / self.count for i in range(self.count)]
            pts = [x for x in raw if keep(x)]
            return pts, len(raw) - len(pts)
        st = Stream(derive_seed(self.seed, "domain"), 0)
        pts, rejected = [], 0
        while len(pts) < self.count:
            x = float(st.uniform(1)[0])
            if keep(x):
                pts.append(x)
            else:
                rejected += 1
        return pts, rejected


# ---------------------------------------------------------------- config & reports

@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run depends on.  ``workers`` never affects results."""

    ideal: str = "density"
    horizon: int = 2 ** 17
    trials: int = 500
    points: int = 100
    seed: int = 0
    eps_min: float = 2.0 ** -7
    workers: int = 1
    family: Optional[str] = None
    sequence: Optional[str] = None
    sampler: str = "grid"
    target: Optional[int] = None

    def __post_init__(self):
        if self.trials < 1 or self.points < 1:
            raise ConfigError("trials and points must be at least 1")
        if self.horizon < MIN_HORIZON:
            raise ConfigError(f"horizon must be at least {MIN_HORIZON}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        try:
            ideal_by_name(self.ideal)
            eps_grid(self.eps_min)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.sampler not in ("grid", "uniform"):
            raise ConfigError(f"unknown sampler {self.sampler!r}")
        if self.target is not None and self.target < 1:
            raise ConfigError("target must be positive")

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**{k.replace("-", "_"): v for k, v in data.items()})

    @property
    def ideal_spec(self) -> IdealSpec:
        return ideal_by_name(self.ideal)

    @property
    def grid(self) -> tuple[float, ...]:
        return eps_grid(self.eps_min)

    def domain(self) -> DomainSampler:
        return DomainSampler(self.sampler, self.points, self.seed)

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return d


def wilson(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, mid - half)
    hi = 1.0 if successes == n else min(1.0, mid + half)
    return (lo, hi)


@dataclass(frozen=True)
class Estimate:
    """``successes`` out of ``decided`` trials; ``undecided`` are excluded but kept."""

    successes: int
    decided: int
    undecided: int = 0

    @property
    def trials(self) -> int:
        return self.decided + self.undecided

    @property
    def proportion(self) -> Optional[float]:
        return self.successes / self.decided if self.decided else None

    @property
    def ci(self) -> tuple[float, float]:
        return wilson(self.successes, self.decided)

    @property
    def undecided_rate(self) -> float:
        return self.undecided / self.trials if self.trials else 0.0

    @property
    def stderr(self) -> float:
        p = self.proportion
        return math.sqrt(p * (1 - p) / self.decided) if self.decided else math.inf

    def to_dict(self) -> dict:
        lo, hi = self.ci
        return {"successes": self.successes, "decided": self.decided, "undecided": self.undecided,
                "proportion": self.proportion, "ci95": [lo, hi],
                "undecided_rate": self.undecided_rate}


def _level(est: Estimate) -> Optional[str]:
    p = est.proportion
    if p is None:
        return None
    if p <= LOW:
        return "low"
    if p >= HIGH:
        return "high"
    return "middle"


@dataclass
class Tally:
    convergent: int = 0
    divergent: int = 0
    undecided: int = 0

    def add(self, status: Convergence) -> None:
        if status is Convergence.CONVERGENT:
            self.convergent += 1
        elif status is Convergence.DIVERGENT:
            self.divergent += 1
        else:
            self.undecided += 1

    @property
    def total(self) -> int:
        return self.convergent + self.divergent + self.undecided

    def estimate(self, of: str = "convergent") -> Estimate:
        hits = self.convergent if of == "convergent" else self.divergent
        return Estimate(hits, self.convergent + self.divergent, self.undecided)


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    results: dict
    tallies: dict[str, Tally]
    warnings: list[str] = field(default_factory=list)
    label: str = "ESTIMATE"
    timing: dict = field(default_factory=dict)

    def canonical(self) -> dict:
        return {"kind": self.kind, "label": self.label, "config": self.config,
                "results": self.results, "warnings": list(self.warnings),
                "tallies": {k: asdict(v) for k, v in self.tallies.items()}}

    def canonical_json(self) -> str:
        """Sorted keys, fixed layout, no timing: byte-identical across reruns."""
        return json.dumps(self.canonical(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def tallies_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["condition", "convergent", "divergent", "undecided", "trials"])
        for name in sorted(self.tallies):
            t = self.tallies[name]
            w.writerow([name, t.convergent, t.divergent, t.undecided, t.total])
        return buf.getvalue()


# ---------------------------------------------------------------- worker plumbing

def run_tasks(fn: Callable, tasks: Sequence, workers: int = 1) -> list:
    """``[fn(t) for t in tasks]``, possibly across processes; order is preserved."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with cf.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


@lru_cache(maxsize=1024)
def _selection(seed: int, j: int, horizon: int):
    return sample_lambda(derive_seed(seed, "selection"), j, horizon)


def _selected_status(x: PointSeq, ideal: IdealSpec, grid, seed: int, j: int) -> Convergence:
    s = _selection(seed, j, x.horizon)
    return i_converges(apply_selection(x, s), ideal, grid).status


def _emeasure_task(args) -> tuple[str, object]:
    x, ideal, grid, seed, j = args
    s = _selection(seed, j, x.horizon)
    v = i_converges(apply_selection(x, s), ideal, grid)
    return v.status.value, _jsonable(v.limit)


def _statuses(codes: Iterable[str]) -> Tally:
    t = Tally()
    for c in codes:
        t.add(Convergence(c))
    return t


# ---------------------------------------------------------------- estimators

@dataclass(frozen=True)
class EMeasure:
    """Convergent share of random selections, with the limits they converged to."""

    estimate: Estimate
    tally: Tally
    limits: tuple[tuple[str, int], ...]

    def limit_share(self, value: float) -> float:
        """Fraction of all trials judged convergent with limit exactly ``value``."""
        hits = sum(c for k, c in self.limits if k == repr(float(value)))
        return hits / self.tally.total


def estimate_e_measure(x: PointSeq, ideal: IdealSpec, cfg: ExperimentConfig) -> EMeasure:
    """Share of fair-coin selections ``s`` with ``(x_{s(n)})`` ideal-convergent.

    ``x`` is read at ``cfg.horizon`` (lengthened or truncated as needed).
    Undecided trials are excluded from the proportion and counted apart.
    """
    x = _at_horizon(x, cfg.horizon)
    tasks = [(x, ideal, cfg.grid, cfg.seed, j) for j in range(cfg.trials)]
    rows = run_tasks(_emeasure_task, tasks, cfg.workers)
    tally = _statuses(code for code, _ in rows)
    limits: dict[str, int] = {}
    for code, limit in rows:
        if code == Convergence.CONVERGENT.value:
            key = repr(limit)
            limits[key] = limits.get(key, 0) + 1
    return EMeasure(tally.estimate(), tally, tuple(sorted(limits.items())))


def _at_horizon(x: PointSeq, horizon: int) -> PointSeq:
    if x.horizon >= horizon:
        return x if x.horizon == horizon else x.truncated(horizon)
    return x.extended(horizon)


def lk3_experiment(x: PointSeq, ideal: IdealSpec, cfg: ExperimentConfig) -> ExperimentReport:
    """Pointwise verdict of ``x`` next to the measure of convergent selections."""
    x = _at_horizon(x, cfg.horizon)
    verdict = i_converges(x, ideal, cfg.grid)
    em = estimate_e_measure(x, ideal, cfg)
    est, tally = em.estimate, em.tally
    warnings = []
    if ideal.kind != "density":
        warnings.append(f"property (G) not claimed for {ideal.name}; the equivalence is not asserted")
    level = _level(est)
    expected = {Convergence.CONVERGENT: "high", Convergence.DIVERGENT: "low"}.get(verdict.status)
    if expected is None or level is None:
        consistent = None
    else:
        consistent = level == expected
    results = {
        "sequence": x.name,
        "ideal": ideal.name,
        "verdict": verdict.status.value,
        "limit": _jsonable(verdict.limit),
        "e_measure": est.to_dict(),
        "limits": dict(em.limits),
        "consistent": consistent,
    }
    return ExperimentReport("lk3", cfg.canonical(), results, {"selections": tally}, warnings)


def property_g_estimate(ideal: IdealSpec, cfg: ExperimentConfig,
                        families: Optional[Callable[[int], list]] = None) -> tuple[Estimate, list[str]]:
    """Share of fair-coin selections that pass the invariance battery.

    ``families`` maps a selection length to a list of test sets; the
    standard battery is used when omitted.  Proportions count decided trials.
    """
    if ideal.kind not in ("fin", "density"):
        raise ConfigError("property (G) is estimated for fin and density only")
    tasks = [(ideal, cfg.horizon, cfg.seed, j, families) for j in range(cfg.trials)]
    codes = run_tasks(_propg_task, tasks, cfg.workers)
    hits = codes.count(Invariance.INVARIANT.value)
    und = codes.count(Invariance.UNDECIDED.value)
    return Estimate(hits, len(codes) - und, und), codes


def _propg_task(args) -> str:
    ideal, horizon, seed, j, families = args
    s = _selection(seed, j, horizon)
    fams = None if families is None else families(len(s))
    return is_invariant_sample(s, ideal, fams, seed, j).verdict.value


def propg_experiment(ideal: IdealSpec, cfg: ExperimentConfig) -> ExperimentReport:
    est, codes = property_g_estimate(ideal, cfg)
    t = Tally(codes.count("invariant"), codes.count("not-invariant"), codes.count("undecided"))
    results = {"ideal": ideal.name, "invariant": est.to_dict()}
    # the tally reuses the convergent/divergent columns for invariant/not-invariant
    return ExperimentReport("propg", cfg.canonical(), results, {"invariance": t})


def emeasure_experiment(x: PointSeq, ideal: IdealSpec, cfg: ExperimentConfig) -> ExperimentReport:
    em = estimate_e_measure(x, ideal, cfg)
    results = {"sequence": x.name, "ideal": ideal.name, "e_measure": em.estimate.to_dict(),
               "limits": dict(em.limits)}
    return ExperimentReport("emeasure", cfg.canonical(), results, {"selections": em.tally})


def _tw3_row(args) -> tuple[str, list[str]]:
    family, x, ideal, grid, horizon, seed, trials = args
    seq = family.sequence(x, horizon)
    own = i_converges(seq, ideal, grid).status.value
    row = [_selected_status(seq, ideal, grid, seed, j).value for j in range(trials)]
    return own, row


def tw3_experiment(family: FunctionFamily, ideal: IdealSpec, cfg: ExperimentConfig) -> ExperimentReport:
    """Sampled estimates of the four product-measure conditions.

    One ``points x trials`` verdict matrix (every point paired with the same
    fair-coin selections) serves (ii), (iii) and (iv):

    (i)   share of points x whose ``(f_n(x))`` diverges;
    (ii)  share of points whose row of selection verdicts has convergence rate <= 0.02;
    (iii) share of convergent (x, s) pairs;
    (iv)  share of selections whose column has convergence rate <= 0.02.
    """
    pts, rejected = cfg.domain().points(family)
    if not pts:
        raise ConfigError("every sampled point was rejected")
    tasks = [(family, x, ideal, cfg.grid, cfg.horizon, cfg.seed, cfg.trials) for x in pts]
    rows = run_tasks(_tw3_row, tasks, cfg.workers)
    own = _statuses(r[0] for r in rows)
    matrix = np.array([[c == "convergent" for c in r[1]] for r in rows])
    decided = np.array([[c != "undecided" for c in r[1]] for r in rows])
    pairs = _statuses(c for r in rows for c in r[1])

    def rate_low(conv: np.ndarray, dec: np.ndarray) -> Estimate:
        n_dec = dec.sum(axis=1)
        ok = n_dec > 0
        low = (conv.sum(axis=1)[ok] <= LOW * n_dec[ok]).sum()
        return Estimate(int(low), int(ok.sum()), int((~ok).sum()))

    cond = {
        "i": own.estimate("divergent"),
        "ii": rate_low(matrix, decided),
        "iii": pairs.estimate("convergent"),
        "iv": rate_low(matrix.T, decided.T),
    }
    se = math.sqrt(cond["ii"].stderr ** 2 + cond["iv"].stderr ** 2)
    gap = abs((cond["ii"].proportion or 0.0) - (cond["iv"].proportion or 0.0))
    holds = {"i": _level(cond["i"]) == "high", "ii": _level(cond["ii"]) == "high",
             "iii": _level(cond["iii"]) == "low", "iv": _level(cond["iv"]) == "high"}
    fails = {"i": _level(cond["i"]) == "low", "ii": _level(cond["ii"]) == "low",
             "iii": _level(cond["iii"]) == "high", "iv": _level(cond["iv"]) == "low"}
    results = {
        "family": family.name,
        "ideal": ideal.name,
        "points": len(pts),
        "rejected_points": rejected,
        "conditions": {k: v.to_dict() for k, v in cond.items()},
        "ii_iv_gap": gap,
        "ii_iv_combined_se": se,
        "ii_iv_within_3se": bool(gap <= 3 * se),
        "all_hold": all(holds.values()),
        "all_fail": all(fails.values()),
        "equivalence_consistent": all(holds.values()) or all(fails.values()),
    }
    return ExperimentReport("tw3", cfg.canonical(), results, {"points": own, "pairs": pairs})


def _cc1_point(args) -> dict:
    family, x, ideal, grid, horizon, seed, trials, target = args
    seq = family.sequence(x, horizon)
    out = {"x": x}
    if i_converges(seq, ideal_by_name("fin"), grid).status is Convergence.CONVERGENT:
        out["classical"] = "convergent"
        return out
    out["classical"] = "not-convergent"
    out["random"] = [_selected_status(seq, ideal, grid, seed, j).value for j in range(trials)]
    for label, perm in (("subseq", False), ("perm", True)):
        try:
            c = construct(seq, ideal, target, derive_seed(seed, "construct", x), perm=perm)
        except (NotConstructible, WitnessExhausted, DomainError) as exc:
            out[label] = {"error": type(exc).__name__}
            continue
        replay = c.replay(ideal, grid).status.value
        am = all(bool(in_am(c.selection, p, c.x)) for p in c.plans())
        out[label] = {"replay": replay, "rounds": len(c.rounds), "length": len(c.selection),
                      "exhausted": c.exhausted, "in_am_all": am}
    return out


def cc1_demo(family: FunctionFamily, ideal: IdealSpec, cfg: ExperimentConfig,
             target_len: Optional[int] = None) -> ExperimentReport:
    """Random selections versus constructed divergent ones, point by point.

    A DEMONSTRATION only: a comeager set cannot be sampled.  Points where
    the family converges classically are skipped; if that is every point the
    demo refuses.
    """
    if target_len is None:
        target_len = cfg.target if cfg.target is not None else cfg.horizon
    target = int(target_len)
    pts, rejected = cfg.domain().points(family)
    tasks = [(family, x, ideal, cfg.grid, cfg.horizon, cfg.seed, cfg.trials, target) for x in pts]
    rows = run_tasks(_cc1_point, tasks, cfg.workers)
    active = [r for r in rows if r["classical"] != "convergent"]
    if not active:
        raise NotConstructible(
            f"{family.name} converges classically at every sampled point; every selection then "
            "converges too and there is nothing to demonstrate")
    random_t = _statuses(c for r in active for c in r["random"])
    tallies = {"random": random_t}
    results = {
        "family": family.name,
        "ideal": ideal.name,
        "points": len(pts),
        "rejected_points": rejected,
        "skipped_classically_convergent": len(rows) - len(active),
        "random_convergent": random_t.estimate("convergent").to_dict(),
        "note": "category statements cannot be sampled; constructed selections are exhibits, "
                "not estimates. Rearrangements are built, never drawn: P carries no "
                "natural measure here (where one is needed, uniform on S_N is used).",
    }
    for label in ("subseq", "perm"):
        t = Tally()
        failures = 0
        am_ok = True
        for r in active:
            rec = r[label]
            if "error" in rec:
                failures += 1
                continue
            t.add(Convergence(rec["replay"]))
            am_ok = am_ok and rec["in_am_all"]
        tallies[f"constructed-{label}"] = t
        results[f"constructed_{label}"] = {
            "divergent": t.estimate("divergent").to_dict(),
            "failures": failures,
            "in_am_all": am_ok,
        }
    results["per_point"] = [
        {"x": r["x"], **({k: r[k] for k in ("subseq", "perm") if k in r})} for r in active]
    return ExperimentReport("cc1", cfg.canonical(), results, tallies, label="DEMONSTRATION")


# ---------------------------------------------------------------- corpus

def _jsonable(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return repr(value)


CORPUS_KINDS = ("power-decay", "geometric-decay", "random-signs", "sinpi", "typewriter",
                "square-spikes", "sparse-spikes", "two-valued", "block-indicator", "log-decay")


def generated_corpus(seed: int, count: int, horizon: int) -> list[PointSeq]:
    """A seeded mix of convergent, ideal-only convergent and divergent real sequences.

    Sequence ``i`` has kind ``CORPUS_KINDS[i % 10]`` and draws its parameters
    from the stream ``(derive_seed(seed, "corpus"), i)``.
    """
    n = np.arange(1, horizon + 1, dtype=np.int64)
    nf = n.astype(np.float64)
    out = []
    for i in range(count):
        kind = CORPUS_KINDS[i % len(CORPUS_KINDS)]
        st = Stream(derive_seed(seed, "corpus"), i)
        c, a, b = (st.uniform(3) * 4 - 2).tolist()
        if kind == "power-decay":
            vals = c + a / nf ** (0.5 + 1.5 * abs(b) / 2)
        elif kind == "geometric-decay":
            vals = c + a * (0.5 + 0.49 * abs(b) / 2) ** nf
        elif kind == "random-signs":
            vals = np.where(st.bits(horizon) == 1, 1.0, -1.0) * (1 + abs(a))
        elif kind == "sinpi":
            x = float(st.uniform(1)[0])
            while near_small_rational(x):
                x = float(st.uniform(1)[0])
            vals = _sinpi(x, n)
        elif kind == "typewriter":
            vals = _typewriter(float(st.uniform(1)[0]), n)
        elif kind == "square-spikes":
            vals = c + (1 + abs(a)) * square_indicator(n)
        elif kind == "sparse-spikes":
            vals = c + np.where(st.uniform(horizon) < 0.01, 1 + abs(a), 0.0)
        elif kind == "two-valued":
            vals = np.where(st.uniform(horizon) < 0.5, c, c + 1 + abs(a))
        elif kind == "block-indicator":
            vals = c + ((ilog2(n) % 2) == 0) * (1 + abs(a))
        else:
            vals = c + a / np.log(nf + 1)
        out.append(PointSeq(vals, REAL, None, f"{kind}-{i}"))
    return out


def resolve_sequence(name: str, horizon: int) -> PointSeq:
    """Built-in sequence names, ``family@x`` for a family at a point, or a CSV path."""
    if "@" in name:
        fam, _, x = name.partition("@")
        return FunctionFamily.parse(fam).sequence(float(x), horizon)
    if name.endswith(".csv"):
        seq = PointSeq.from_csv(name)
        if horizon > seq.horizon:
            raise DomainError(f"{name} holds {seq.horizon} terms, asked for {horizon}")
        return seq.truncated(horizon)
    return builtin(name, horizon)
