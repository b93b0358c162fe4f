import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from idealab.construction import (BlockPlan, NotConstructible, WitnessExhausted, build_divergent_perm,
                                  build_divergent_subseq, construct, extend_prefix, in_am,
                                  random_prefix)
from idealab.convergence import Convergence, WitnessPair
from idealab.ideals import DENSITY, FIN, IndexSet, check_witness, interval_witness
from idealab.selection import SubseqPrefix
from idealab.sequences import DomainError, PointSeq, builtin

import oracles

WORKED = [3, 7, 8, 10, 12, 14, 16, 17, 19, 21, 23, 25, 27, 29, 31]


def parity_pair(horizon):
    return WitnessPair(SubseqPrefix(np.arange(2, horizon + 1, 2), horizon),
                       SubseqPrefix(np.arange(1, horizon + 1, 2), horizon), 1.0, 1.0)


def plan(m, horizon=256, ideal=DENSITY, count=12):
    return BlockPlan(interval_witness(ideal, count), parity_pair(horizon), m)


def test_worked_extension():
    x = builtin("alternating", 64)
    s = extend_prefix(SubseqPrefix([3, 7], 64), plan(1, 64), x)
    assert s.tolist() == WORKED
    v = in_am(s, plan(1, 64), x)
    assert v.yes and v.k == 2


def test_in_am_no_and_too_short():
    x = builtin("alternating", 64)
    assert not in_am(SubseqPrefix(range(1, 16), 64), plan(1, 64), x)
    with pytest.raises(DomainError):
        in_am(SubseqPrefix([3, 7], 64), plan(1, 64), x)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 40), min_size=1, max_size=6, unique=True), st.integers(1, 12))
def test_extension_matches_hand_steps(prefix, m):
    prefix = sorted(prefix)
    x = builtin("alternating", 4096)
    p = plan(m, 4096)
    s = extend_prefix(SubseqPrefix(prefix, 4096), p, x)
    u, v = p.pair.u.tolist(), p.pair.v.tolist()
    assert s.tolist() == oracles.extend_by_hand(prefix, u, v, p.witness.cutpoints, m)
    assert s.tolist()[:len(prefix)] == prefix
    assert in_am(s, p, x)


def test_short_prefix_padded_to_m():
    x = builtin("alternating", 4096)
    s = extend_prefix(SubseqPrefix([5], 4096), plan(6, 4096), x)
    assert s.tolist()[:6] == [5, 6, 7, 8, 9, 10]


def test_exhaustion_is_an_error():
    x = builtin("alternating", 64)
    with pytest.raises(WitnessExhausted):
        extend_prefix(SubseqPrefix(list(range(1, 20)), 64), plan(1, 64), x)


@pytest.mark.parametrize("perm", [False, True], ids=["subseq", "perm"])
@pytest.mark.parametrize("ideal", [DENSITY, FIN], ids=["density", "fin"])
def test_constructed_selection_diverges(perm, ideal):
    c = construct(builtin("alternating", 2 ** 12), ideal, 2 ** 13, seed=3, perm=perm)
    assert len(c.selection) >= 2 ** 13 and not c.exhausted
    assert c.replay(ideal).status is Convergence.DIVERGENT
    assert all(in_am(c.selection, p, c.x) for p in c.plans())
    if perm:
        assert len(set(c.selection.tolist())) == len(c.selection)
    else:
        assert (np.diff(c.selection.entries) > 0).all()


def test_exceptional_sets_hold_witness_blocks():
    c = construct(builtin("alternating", 2 ** 12), DENSITY, 2 ** 14, seed=0)
    d = c.x.distances(np.asarray(c.pair.center))[c.selection.entries - 1]
    n = len(c.selection)
    near = IndexSet.from_mask(d <= c.pair.radius)
    far = IndexSet.from_mask(d >= 2 * c.pair.radius)
    assert check_witness(c.witness, near) >= len(c.rounds)
    assert check_witness(c.witness, far) >= len(c.rounds)
    assert near.horizon == far.horizon == n


def test_prefix_seeding():
    assert random_prefix(4, False) == random_prefix(4, False)
    lengths = {len(random_prefix(s, False)) for s in range(40)}
    assert lengths == {1, 2, 3}
    for s in range(40):
        p = random_prefix(s, True)
        assert len(set(p)) == len(p) and max(p) <= 4 * len(p)


def test_deterministic_given_seed():
    x = builtin("alternating", 2 ** 12)
    assert build_divergent_subseq(x, DENSITY, 5000, 9) == build_divergent_subseq(x, DENSITY, 5000, 9)
    assert build_divergent_perm(x, DENSITY, 5000, 9) == build_divergent_perm(x, DENSITY, 5000, 9)


def test_not_constructible():
    with pytest.raises(NotConstructible):
        construct(builtin("harmonic", 4096), DENSITY, 100, 0)
    with pytest.raises(NotConstructible):
        construct(builtin("identity", 4096), DENSITY, 100, 0)


def test_perm_cannot_exceed_stored_horizon():
    x = PointSeq(builtin("alternating", 128).values)
    with pytest.raises(DomainError):
        construct(x, DENSITY, 200, 0, perm=True)


def test_stored_sequence_stops_when_pair_runs_out():
    x = PointSeq(builtin("alternating", 1024).values)
    c = construct(x, DENSITY, 10 ** 6, 0)
    assert c.exhausted and len(c.rounds) >= 1 and c.selection.entries[-1] <= 1024
    assert c.replay(DENSITY).status is Convergence.DIVERGENT


def test_trace_lines():
    c = construct(builtin("alternating", 2 ** 12), DENSITY, 1000, seed=1)
    lines = c.trace_text().splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    assert len(body) == len(c.rounds)
    assert body[0].startswith("m=1 k=")
    assert all("u_block=" in ln and "q_k=" in ln for ln in body)
