"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import time

import numpy as np

from idealab.construction import BlockPlan, construct, extend_prefix, in_am
from idealab.convergence import Convergence, WitnessPair, i_cauchy, i_converges
from idealab.experiments import (ExperimentConfig, FunctionFamily, cc1_demo, emeasure_experiment,
                                 estimate_e_measure, generated_corpus, lk3_experiment,
                                 property_g_estimate, propg_experiment, tw3_experiment)
from idealab.ideals import (DENSITY, FIN, IndexSet, IntervalWitness, check_witness, density_profile,
                            interval_witness)
from idealab.rng import Stream
from idealab.selection import (CoinVector, SubseqPrefix, coins_to_subseq, sample_coins,
                               subseq_to_coins)
from idealab.sequences import builtin

import oracles


def test_h_round_trip(criterion):
    start = time.perf_counter()
    ok = True
    for code in range(1, 2 ** 16):
        bits = np.array([(code >> (15 - j)) & 1 for j in range(16)], dtype=np.uint8)
        t = CoinVector(bits)
        s = coins_to_subseq(t)
        ok &= subseq_to_coins(s, 16) == t
        ok &= coins_to_subseq(subseq_to_coins(s, 16)) == s
    n = 10 ** 5
    for j in range(1000):
        t = sample_coins(99, j, n)
        s = coins_to_subseq(t)
        ok &= subseq_to_coins(s, n) == t
        ok &= coins_to_subseq(subseq_to_coins(s, n)) == s
    elapsed = time.perf_counter() - start
    ok = bool(ok)
    assert criterion("h round-trip", ok and elapsed < 5, f"{elapsed:.2f}s, identity={ok}")


def test_worked_extension(criterion):
    x = builtin("alternating", 64)
    pair = WitnessPair(SubseqPrefix(range(2, 65, 2), 64), SubseqPrefix(range(1, 64, 2), 64), 1.0, 1.0)
    plan = BlockPlan(interval_witness(DENSITY, 6), pair, 1)
    s = extend_prefix(SubseqPrefix([3, 7], 64), plan, x)
    expected = [3, 7, 8, 10, 12, 14, 16, 17, 19, 21, 23, 25, 27, 29, 31]
    am = in_am(s, plan, x)
    ok = s.tolist() == expected and am.yes and am.k == 2
    assert criterion("worked extension", ok, f"got {s.tolist()}, in_Am={am}")


def test_constructed_divergence(criterion):
    start = time.perf_counter()
    x = builtin("alternating", 2 ** 12)
    details, ok = [], True
    for perm in (False, True):
        c = construct(x, DENSITY, 2 ** 16, seed=2024, perm=perm)
        replay = c.replay(DENSITY).status
        am = all(in_am(c.selection, BlockPlan(c.witness, c.pair, m), c.x).yes for m in range(1, 11))
        d = c.x.distances(np.asarray(c.pair.center))[c.selection.entries - 1]
        near = check_witness(c.witness, IndexSet.from_mask(d <= c.pair.radius))
        far = check_witness(c.witness, IndexSet.from_mask(d >= 2 * c.pair.radius))
        injective = len(set(c.selection.tolist())) == len(c.selection)
        ok &= (replay is Convergence.DIVERGENT and am and near >= 8 and far >= 8 and injective
               and len(c.selection) >= 2 ** 16)
        details.append(f"{'perm' if perm else 'subseq'}: {replay.value}, in_Am(m<=10)={am}, "
                       f"intervals near={near} far={far}")
    elapsed = time.perf_counter() - start
    assert criterion("constructed divergence", ok and elapsed < 10, "; ".join(details) + f"; {elapsed:.1f}s")


def test_e_measure_estimates(criterion):
    cfg = ExperimentConfig(horizon=2 ** 17, trials=500, seed=1)
    lines, ok = [], True

    def timed(name, ideal):
        t0 = time.perf_counter()
        em = estimate_e_measure(builtin(name, 2 ** 17), ideal, cfg)
        return em, time.perf_counter() - t0

    em, dt = timed("alternating", DENSITY)
    good = em.tally.convergent == 0 and em.tally.undecided <= 5 and dt < 60
    ok &= good
    lines.append(f"alternating/density conv={em.tally.convergent} und={em.tally.undecided} {dt:.0f}s")
    for ideal in (FIN, DENSITY):
        em, dt = timed("harmonic", ideal)
        good = em.tally.convergent == 500 and dt < 60
        ok &= good
        lines.append(f"harmonic/{ideal.name} conv={em.tally.convergent} {dt:.0f}s")
    em, dt = timed("square-indicator", DENSITY)
    share = em.limit_share(0.0)
    ok &= share >= 0.99 and dt < 60
    lines.append(f"square-indicator/density conv-to-0={share:.3f} {dt:.0f}s")
    assert criterion("E-measure estimates", bool(ok), "; ".join(lines))


def test_property_g(criterion):
    est, _ = property_g_estimate(DENSITY, ExperimentConfig(horizon=2 ** 17, trials=200, seed=3))
    p = est.proportion
    ok = p is not None and p >= 0.95
    assert criterion("property (G) of density", ok,
                     f"invariant {est.successes}/{est.decided}, undecided {est.undecided}")


def test_cauchy_cross_validation(criterion):
    xs = generated_corpus(seed=11, count=100, horizon=10 ** 5)
    agree = decided = 0
    for x in xs:
        for ideal in (FIN, DENSITY):
            c = i_converges(x, ideal).status
            k = i_cauchy(x, ideal).status
            if c is Convergence.UNDECIDED or k.value == "undecided":
                continue
            decided += 1
            agree += (c is Convergence.CONVERGENT) == (k.value == "cauchy")
    rate = agree / decided if decided else 0.0
    assert criterion("Cauchy cross-validation", decided > 0 and rate >= 0.99,
                     f"agree {agree}/{decided} decided of {2 * len(xs)}")


def test_product_consistency_sinpi(criterion):
    start = time.perf_counter()
    cfg = ExperimentConfig(horizon=2 ** 13, trials=200, points=200, seed=4)
    r = tw3_experiment(FunctionFamily("sinpi"), DENSITY, cfg)
    elapsed = time.perf_counter() - start
    c = r.results["conditions"]
    i, iii = c["i"]["proportion"], c["iii"]["proportion"]
    gap, se = r.results["ii_iv_gap"], r.results["ii_iv_combined_se"]
    ok = i is not None and i >= 0.99 and iii is not None and iii <= 0.01 and gap <= 3 * se \
        and elapsed < 300
    assert criterion("product-measure consistency (SinPi/density)", ok,
                     f"(i)={i} (ii)={c['ii']['proportion']} (iii)={iii} (iv)={c['iv']['proportion']} "
                     f"gap={gap:.4f} 3se={3 * se:.4f} {elapsed:.0f}s")


def test_asymmetry(criterion):
    tw = FunctionFamily("typewriter")
    cfg = ExperimentConfig(horizon=2 ** 13, trials=100, points=100, seed=5)
    fin = tw3_experiment(tw, FIN, cfg).results["conditions"]
    dens = tw3_experiment(tw, DENSITY, cfg).results["conditions"]
    demo = cc1_demo(tw, DENSITY, ExperimentConfig(horizon=2 ** 12, trials=20, points=100, seed=5))
    sub = demo.results["constructed_subseq"]["divergent"]["proportion"]
    per = demo.results["constructed_perm"]["divergent"]["proportion"]
    fails = demo.results["constructed_subseq"]["failures"] + demo.results["constructed_perm"]["failures"]
    ok = (fin["i"]["proportion"] >= 0.99 and dens["i"]["proportion"] <= 0.01
          and dens["iii"]["proportion"] >= 0.99 and sub is not None and sub >= 0.99
          and per is not None and per >= 0.99 and fails == 0)
    assert criterion("category/measure asymmetry (Typewriter)", ok,
                     f"fin (i)={fin['i']['proportion']}; density (i)={dens['i']['proportion']} "
                     f"random conv={dens['iii']['proportion']}; constructed divergent "
                     f"subseq={sub} perm={per}")


def test_determinism_across_workers(criterion):
    small = dict(horizon=2 ** 11, trials=12, points=8, seed=21)
    runs = {
        "emeasure": lambda cfg: emeasure_experiment(builtin("alternating", 2 ** 11), DENSITY, cfg),
        "lk3": lambda cfg: lk3_experiment(builtin("square-indicator", 2 ** 11), DENSITY, cfg),
        "propg": lambda cfg: propg_experiment(DENSITY, cfg),
        "tw3": lambda cfg: tw3_experiment(FunctionFamily("sinpi"), DENSITY, cfg),
        "cc1": lambda cfg: cc1_demo(FunctionFamily("alternating"), DENSITY, cfg, target_len=4096),
    }
    same = {}
    for kind, run in runs.items():
        outs = [run(ExperimentConfig(workers=w, **small)).canonical_json() for w in (1, 8, 1)]
        same[kind] = outs[0] == outs[1] == outs[2]
    assert criterion("determinism across workers", all(same.values()),
                     ", ".join(f"{k}={'same' if v else 'DIFF'}" for k, v in same.items()))


def test_oracle_equivalence(criterion):
    st = Stream(7, 0)
    mismatches = 0
    for trial in range(1000):
        n = 2 + st.below(10 ** 4 - 1)
        mode = st.below(3)
        if mode == 0:
            p = st.uniform(1)[0]
            elems = np.flatnonzero(st.uniform(n) < p) + 1
        elif mode == 1:
            elems = np.unique(np.array([st.below(n) + 1 for _ in range(st.below(50) + 1)]))
        else:
            starts = sorted({2 ** k for k in range(1, 14) if 2 ** k <= n})
            keep = [a for a in starts if st.below(2)]
            elems = np.unique(np.concatenate(
                [np.arange(a, min(2 * a, n + 1)) for a in keep] + [np.zeros(0, np.int64)]))
        a = IndexSet(elems.astype(np.int64), n)
        cps = sorted({1 + st.below(n) for _ in range(1 + st.below(8))})
        elist = a.elements.tolist()
        got = density_profile(a, cps)
        mismatches += got != [(c, oracles.density(elist, c)) for c in cps]
        for w in (interval_witness(DENSITY, 14), interval_witness(FIN, min(n, 200)),
                  IntervalWitness(tuple(sorted({2 + st.below(n) for _ in range(6)})), "random")):
            mismatches += check_witness(w, a) != oracles.witness_count(w.cutpoints, elist, n)
    assert criterion("oracle equivalence", mismatches == 0, f"{mismatches} mismatches over 1000 instances")
