import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from idealab.convergence import (DEFAULT_GRID, Cauchy, ConfigError, Convergence, candidates, eps_grid,
                                 i_cauchy, i_converges, indicator_sequence, tail_indices, witness_pair)
from idealab.ideals import DENSITY, FIN, Verdict
from idealab.selection import SubseqPrefix
from idealab.sequences import DomainError, PointSeq, REAL, builtin, euclid

N = 10 ** 5


def test_grid():
    assert eps_grid() == DEFAULT_GRID
    assert DEFAULT_GRID[0] == 0.5 and DEFAULT_GRID[-1] == 2 ** -7 and len(DEFAULT_GRID) == 7
    assert eps_grid(0.1) == (0.5, 0.25, 0.125)


@pytest.mark.parametrize("grid", [(), (0.1, 0.2), (0.5, 0.5), (0.5, -0.1)])
def test_bad_grid(grid):
    x = builtin("harmonic", 100)
    with pytest.raises(ConfigError):
        i_converges(x, FIN, grid)
    with pytest.raises(ConfigError):
        i_cauchy(x, FIN, grid)


def test_examples():
    v = i_converges(builtin("harmonic", N), FIN)
    assert v.status is Convergence.CONVERGENT and abs(v.limit) <= DEFAULT_GRID[-1]
    assert i_converges(builtin("alternating", N), DENSITY).status is Convergence.DIVERGENT
    v = i_converges(builtin("square-indicator", N), DENSITY)
    assert v.status is Convergence.CONVERGENT and v.limit == 0.0
    assert i_cauchy(builtin("harmonic", N), FIN).status is Cauchy.CAUCHY
    assert i_cauchy(builtin("alternating", N), DENSITY).status is Cauchy.NOT_CAUCHY
    assert i_cauchy(builtin("square-indicator", N), DENSITY).status is Cauchy.CAUCHY


def test_square_indicator_diverges_under_fin():
    assert i_converges(builtin("square-indicator", N), FIN).status is Convergence.DIVERGENT


def test_evidence_uses_grid():
    v = i_converges(builtin("harmonic", 4096), DENSITY, (0.5, 0.1))
    assert all(tuple(e.eps for e in c.evidence) == (0.5, 0.1) for c in v.candidates)


def test_tail_indices_and_candidate_bound():
    idx = tail_indices(1000)
    assert idx[:2] == [1000, 999] and all(500 <= n <= 1000 for n in idx)
    assert len(candidates(builtin("identity", 1000))) <= 16


def test_euclid_sequence():
    n = np.arange(1, 4097)
    x = PointSeq(np.stack([1 / n, 2 + 1 / n], axis=1), euclid(2))
    v = i_converges(x, DENSITY)
    assert v.status is Convergence.CONVERGENT
    assert np.allclose(v.limit, (0.0, 2.0), atol=DEFAULT_GRID[-1])


def corpus(seed=0, count=40, horizon=4096):
    rng = np.random.default_rng(seed)
    n = np.arange(1, horizon + 1)
    out = []
    for i in range(count):
        kind = i % 5
        if kind == 0:
            vals = rng.normal() + rng.normal() / n ** rng.uniform(0.5, 2)
        elif kind == 1:
            vals = rng.choice([-1.0, 1.0], size=horizon)
        elif kind == 2:
            vals = np.where(np.isin(n, (np.arange(1, 65) ** 2)), rng.normal(), rng.normal())
        elif kind == 3:
            vals = np.sin(n * np.pi * rng.uniform())
        else:
            vals = rng.normal() + np.where(rng.uniform(size=horizon) < 0.01, 3.0, 0.0)
        out.append(PointSeq(vals))
    return out


@pytest.mark.parametrize("x", corpus(), ids=lambda x: f"len{x.horizon}")
def test_fin_convergence_implies_density_convergence(x):
    a = i_converges(x, FIN)
    if a.status is Convergence.CONVERGENT:
        b = i_converges(x, DENSITY)
        assert b.status is Convergence.CONVERGENT
        assert REAL.distance(a.limit, b.limit) <= DEFAULT_GRID[-1]


@pytest.mark.parametrize("x", corpus(seed=1), ids=lambda x: f"len{x.horizon}")
@pytest.mark.parametrize("ideal", [FIN, DENSITY], ids=["fin", "density"])
def test_cauchy_agrees_with_convergence_one_sided(x, ideal):
    c = i_converges(x, ideal).status
    k = i_cauchy(x, ideal).status
    if c is Convergence.CONVERGENT:
        assert k is not Cauchy.NOT_CAUCHY
    if k is Cauchy.CAUCHY:
        assert c is not Convergence.DIVERGENT


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["harmonic", "alternating", "square-indicator"]),
       st.floats(-100, 100).map(lambda c: float(np.float64(c).round(3))))
def test_translation_equivariance(name, shift):
    for ideal in (FIN, DENSITY):
        x = builtin(name, 2048)
        a = i_converges(x, ideal)
        b = i_converges(x.translated(shift), ideal)
        assert a.status is b.status
        if a.status is Convergence.CONVERGENT:
            assert abs((a.limit + shift) - b.limit) <= 1e-9


def test_witness_pair_examples():
    w = witness_pair(builtin("alternating", 1024))
    assert w.center == 1.0 and w.radius == 1.0
    assert w.u.tolist() == list(range(2, 1025, 2))
    assert w.v.tolist() == list(range(1, 1024, 2))
    assert witness_pair(builtin("harmonic", 1024)) is None
    assert witness_pair(builtin("identity", 1024)) is None
    with pytest.raises(DomainError):
        witness_pair(builtin("alternating", 63))


@pytest.mark.parametrize("x", corpus(seed=2, count=15), ids=lambda x: f"len{x.horizon}")
def test_witness_pair_inequalities_replay(x):
    w = witness_pair(x)
    if w is None:
        return
    assert w.holds(x)
    d = x.distances(np.asarray(w.center))
    assert (d[w.u.entries - 1] <= w.radius).all() and (d[w.v.entries - 1] >= 2 * w.radius).all()


def test_witness_pair_rematerialize():
    w = witness_pair(builtin("alternating", 1024))
    longer = builtin("alternating", 4096)
    w2 = w.rematerialize(longer)
    assert w2.holds(longer) and len(w2.u) == 2048


def test_indicator_examples():
    z = builtin("alternating", 10)
    bits = indicator_sequence(z, SubseqPrefix.identity(10), 2, 1).bits.tolist()
    assert bits == [1, 0] * 5
    for j in range(1, 11):
        assert indicator_sequence(z, SubseqPrefix.identity(10), j, 3).bits[j - 1] == 0
    const = PointSeq(np.full(10, 4.0))
    assert indicator_sequence(const, SubseqPrefix([1, 5, 9], 10), 1, 7).ones == 0
    with pytest.raises(DomainError):
        indicator_sequence(z, SubseqPrefix.identity(10), 11, 1)


@given(st.integers(1, 60), st.integers(1, 20))
def test_indicator_monotone_in_k(k, anchor):
    z = builtin("harmonic", 64)
    s = SubseqPrefix.identity(64)
    lo = indicator_sequence(z, s, anchor, k).bits
    hi = indicator_sequence(z, s, anchor, k + 1).bits
    assert (hi >= lo).all()
