"""Acceptance gate.  Each test prints one PASS/FAIL line (collected again in
the terminal summary) and then asserts."""
import json
import random
import time
from fractions import Fraction
from itertools import product

import numpy as np

from streamcsp import analysis, separability
from streamcsp.cli import main
from streamcsp.core import Constraint, Instance, TruthTable, opt_value, value
from streamcsp.dist import Dist, expect_f, in_S_N, in_S_Y, induced_distribution, marginals
from streamcsp.events import Stream, StreamEvent, from_instance, to_instance
from streamcsp.genhard import GenParams, gen_streaming_rmd
from streamcsp.polarize import (NonnegFn, canonical_fn, full_marginals, is_chain_supported,
                                polarization_bound, polarize_full, polarize_step, potential)
from streamcsp.sketch import L1Sketch, derive_seed
from streamcsp.stream_solver import ClassifierConfig, classify_exact, classify_stream, exact_bias

from conftest import report

AND2 = TruthTable.from_bits("0001")
XOR2 = TruthTable.from_bits("0110")
AND3 = TruthTable.from_bits("00000001")
H = Fraction(1, 2)


def _elapsed(t0):
    return f"{time.perf_counter() - t0:.1f}s"


# ---------------------------------------------------------------- 1

def test_01_two_and_ratio(tmp_path, capsys):
    t0 = time.perf_counter()
    code = main(["analyze", "--preset", "2and", "--out", str(tmp_path / "curves.csv")])
    summary = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    alpha, beta = Fraction(summary["alpha"]), Fraction(summary["beta"])
    ok = (code == 0 and abs(alpha - Fraction(4, 9)) <= Fraction(1, 1000)
          and abs(beta - Fraction(4, 15)) <= Fraction(1, 720))
    report(1, ok, "Max-2AND ratio via analyze --preset 2and",
           f"alpha={alpha} beta={beta} {_elapsed(t0)}")
    assert ok


# ---------------------------------------------------------------- 2

def test_02_two_and_curves():
    t0 = time.perf_counter()
    rng = random.Random(2)
    # marginals (mu, mu) with mu in [0, 1]; see the decisions ledger on the sign of mu
    mus = sorted({Fraction(rng.randint(0, 1000), 1000) for _ in range(200)})[:50]
    worst = Fraction(0)
    for mu in mus:
        g = separability.max_gamma_at_marginals(AND2, (mu, mu))
        b = separability.min_beta_at_marginals(AND2, (mu, mu))
        worst = max(worst, abs(g - analysis.two_and_gamma(mu)), abs(b - analysis.two_and_beta(mu)))
    ok = len(mus) == 50 and worst <= Fraction(1, 10**6)
    report(2, ok, "Max-2AND closed-form curves vs oracle at 50 mu",
           f"max error {float(worst):.2e} {_elapsed(t0)}")
    assert ok


# ---------------------------------------------------------------- 3

def _hard_ok(f, gamma, beta, v):
    return (isinstance(v, separability.Hard) and in_S_Y(v.D_Y, f, gamma)
            and in_S_N(v.D_N, f, beta) and marginals(v.D_Y) == marginals(v.D_N))


def test_03_dichotomy_spot_checks():
    t0 = time.perf_counter()
    checks = []
    v = separability.decide(AND2, H, Fraction(1, 4))
    checks.append(_hard_ok(AND2, H, Fraction(1, 4), v) and v.mu == (0, 0))
    for beta in (H, Fraction(3, 5), Fraction(9, 10)):
        checks.append(_hard_ok(XOR2, 1, beta, separability.decide(XOR2, 1, beta)))
    ok = all(checks)
    report(3, ok, "dichotomy spot checks with exact witness re-verification",
           f"{sum(checks)}/{len(checks)} {_elapsed(t0)}")
    assert ok


# ---------------------------------------------------------------- 4

def test_04_k2_resistance_and_equivalence():
    t0 = time.perf_counter()
    tables = [TruthTable(2, bits) for bits in product((0, 1), repeat=4)]
    rule_ok = all(separability.resistance(f) == separability.supports_one_wise(f)[0]
                  for f in tables if f.is_symmetric())
    grid = [Fraction(i, 20) for i in range(21)]
    cells = mismatches = 0
    for f in tables:
        for gamma, beta in product(grid[1:], grid[:-1]):
            if beta >= gamma:
                continue
            hard = isinstance(separability.decide(f, gamma, beta), separability.Hard)
            padded = separability.exists_padded_onewise_pair(f, gamma, beta)[0]
            cells += 1
            mismatches += hard != padded
    ok = rule_ok and mismatches == 0
    report(4, ok, "k=2 resistance rule and Hard <=> padded pair on 20x20 grid",
           f"16 tables, {cells} cells, {mismatches} mismatches {_elapsed(t0)}")
    assert ok


# ---------------------------------------------------------------- 5 and 7 helpers

def _planted(rng, f, n, m, noise):
    """Constraints satisfied by a hidden sigma, with a fraction replaced by random ones."""
    sigma = [rng.choice((-1, 1)) for _ in range(n)]
    sat = f.ones()
    items = []
    for _ in range(m):
        idx = tuple(rng.sample(range(n), f.k))
        if rng.random() < noise:
            signs = tuple(rng.choice((-1, 1)) for _ in range(f.k))
        else:
            a = rng.choice(sat)
            signs = tuple(sigma[j] * x for j, x in zip(idx, a))
        items.append((Constraint(idx, signs), Fraction(1)))
    return Instance(n, tuple(items))


def _random(rng, f, n, m):
    return Instance(n, tuple((Constraint(tuple(rng.sample(range(n), f.k)),
                                         tuple(rng.choice((-1, 1)) for _ in range(f.k))),
                              Fraction(1)) for _ in range(m)))


def _pool(rng, f, gamma, beta, count):
    yes, no = [], []
    while len(yes) < count:
        n = rng.randint(8, 14)
        psi = _planted(rng, f, n, rng.randint(2 * n, 4 * n), 0 if gamma == 1 else 0.08)
        if opt_value(f, psi)[0] >= gamma:
            yes.append(psi)
    while len(no) < count:
        n = rng.randint(8, 14)
        psi = _random(rng, f, n, rng.randint(4 * n, 6 * n))
        if opt_value(f, psi)[0] <= beta:
            no.append(psi)
    return yes, no


CONFIGS = [(AND2, Fraction(1), Fraction(3, 5)), (AND2, Fraction(9, 10), H),
           (AND3, Fraction(1), Fraction(1, 4))]


def test_05_exact_classifier_correct():
    t0 = time.perf_counter()
    rng = random.Random(5)
    total = correct = 0
    for f, gamma, beta in CONFIGS:
        v = separability.decide(f, gamma, beta)
        assert isinstance(v, separability.Easy)
        cfg = ClassifierConfig.from_verdict(v)
        yes, no = _pool(rng, f, gamma, beta, 200)
        correct += sum(classify_exact(psi, cfg) == "YES" for psi in yes)
        correct += sum(classify_exact(psi, cfg) == "NO" for psi in no)
        total += len(yes) + len(no)
    ok = correct == total == 1200
    report(5, ok, "exact-bias classifier on 3 Easy configs x 2 regimes x 200",
           f"{correct}/{total} correct {_elapsed(t0)}")
    assert ok


# ---------------------------------------------------------------- 6

def _test_vectors():
    rng = np.random.default_rng(6)
    vecs = [{2: 7}, {0: 10, 1: -3}, {5: -1}, {9: 2, 10: 2}]
    for nnz in (3, 4, 5, 6, 8, 8, 10, 12, 16, 16, 20, 24, 32, 40, 48, 64):
        idx = rng.choice(1000, size=nnz, replace=False)
        vals = rng.integers(-50, 51, size=nnz)
        vals[vals == 0] = 1
        vecs.append({int(i): int(v) for i, v in zip(idx, vals)})
    return vecs


def test_06_sketch_accuracy():
    t0 = time.perf_counter()
    worst = 1.0
    for eps in (0.5, 0.2, 0.1):
        for vi, vec in enumerate(_test_vectors()):
            exact = sum(abs(v) for v in vec.values())
            idx = np.fromiter(vec.keys(), dtype=np.int64)
            val = np.fromiter(vec.values(), dtype=np.int64)
            hits = 0
            for seed in range(1000):
                s = L1Sketch(1000, eps, derive_seed(seed, vi))
                s.update_many(idx, val, prescaled=True)
                est = s.estimate()
                hits += (1 - eps) * exact <= est <= (1 + eps) * exact
            worst = min(worst, hits / 1000)
    ok = worst >= 2 / 3
    report(6, ok, "sketch (1 +- eps) frequency over 1000 seeds, 20 vectors, 3 eps",
           f"worst rate {worst:.3f} {_elapsed(t0)}")
    assert ok


# ---------------------------------------------------------------- 7

def _noisy_stream(rng, psi):
    """Insert-only stream of psi with interleaved insert/delete pairs that cancel."""
    base = from_instance(psi).events
    out = []
    for e in base:
        out.append(e)
        if rng.random() < 0.3:
            junk = StreamEvent(1, tuple(rng.sample(range(psi.n), psi.k)),
                               tuple(rng.choice((-1, 1)) for _ in range(psi.k)))
            out.append(junk)
            out.append(StreamEvent(-1, junk.indices, junk.signs))
    return Stream(psi.n, psi.k, out)


def test_07_sketch_mode_agreement():
    t0 = time.perf_counter()
    rng = random.Random(7)
    agree = total = 0
    for f, gamma, beta in CONFIGS:
        v = separability.decide(f, gamma, beta)
        yes, no = _pool(rng, f, gamma, beta, 34)
        for psi in (yes + no)[:67]:
            cfg = ClassifierConfig.from_verdict(v, seed=rng.getrandbits(63))
            stream = _noisy_stream(rng, psi)
            assert to_instance(stream) == to_instance(from_instance(psi))
            agree += classify_stream(stream, cfg).verdict == classify_exact(psi, cfg)
            total += 1
    rate = agree / total
    ok = total >= 200 and rate >= 0.9
    report(7, ok, "sketch-mode vs exact-mode agreement, default repetitions",
           f"{agree}/{total} = {rate:.3f} {_elapsed(t0)}")
    assert ok


# ---------------------------------------------------------------- 8

def _random_fn(rng, k):
    vals = [Fraction(rng.randint(0, 12), rng.randint(1, 7)) if rng.random() < 0.8 else Fraction(0)
            for _ in range(1 << k)]
    if not any(vals):
        vals[rng.randrange(1 << k)] = Fraction(1)
    return NonnegFn(k, tuple(vals))


def test_08_polarization_suite():
    t0 = time.perf_counter()
    rng = random.Random(8)
    failures, longest = 0, {}
    for k in (2, 3, 4, 5):
        bound = polarization_bound(k)
        for _ in range(1000):
            A = _random_fn(rng, k)
            tr = polarize_full(A)
            m0, cur, good = full_marginals(A), A, True
            for s in tr.steps:
                nxt = polarize_step(cur, s.u, s.v)
                su = sum(1 for x, y in zip(s.u, s.v) if x > y)
                tu = sum(1 for x, y in zip(s.u, s.v) if x < y)
                good &= (full_marginals(nxt) == m0 and s.phi_before == potential(cur)
                         and s.phi_after == potential(nxt)
                         and s.phi_after - s.phi_before == 8 * s.eps * su * tu)
                cur = nxt
            good &= cur == tr.final == canonical_fn(A) and is_chain_supported(tr.final)
            good &= len(tr.steps) <= bound
            longest[k] = max(longest.get(k, 0), len(tr.steps))
            failures += not good
    ok = failures == 0
    report(8, ok, "polarization: marginals, potential ledger, endpoint, step bound",
           f"4000 inputs, {failures} failures, longest {longest} {_elapsed(t0)}")
    assert ok


# ---------------------------------------------------------------- 9

def test_09_generator_laws():
    t0 = time.perf_counter()
    MAJ3 = TruthTable.from_bits("00010111")
    mean_cases = [
        (AND2, Dist.of(2, [Fraction(1, 8), Fraction(1, 4), Fraction(1, 8), H])),
        (XOR2, Dist.uniform(2)),
        (MAJ3, Dist.of(3, [Fraction(1, 8)] * 8)),
        (AND3, Dist.of(3, [Fraction(1, 4), 0, 0, 0, 0, 0, Fraction(1, 4), H])),
    ]
    ok_means = []
    for f, D in mean_cases:
        vals = []
        for seed in range(100):
            p = GenParams(24, f.k, Fraction(1, f.k), 4, D, seed=seed)
            gen = gen_streaming_rmd(p)
            vals.append(float(value(f, to_instance(gen.stream), tuple(int(x) for x in gen.x_star))))
        se = np.std(vals, ddof=1) / np.sqrt(len(vals))
        ok_means.append(abs(np.mean(vals) - float(expect_f(D, f))) <= 3 * se)
    # gamma = 1 masks: supported inside f^{-1}(1)
    one_cases = [(AND2, Dist.point((1, 1))), (XOR2, Dist.from_points({(1, -1): H, (-1, 1): H})),
                 (MAJ3, Dist.from_points({a: Fraction(1, 4) for a in MAJ3.ones()}))]
    ok_ones = True
    for f, D in one_cases:
        for seed in range(100):
            gen = gen_streaming_rmd(GenParams(24, f.k, Fraction(1, f.k), 3, D, seed=seed))
            ok_ones &= value(f, to_instance(gen.stream), tuple(int(x) for x in gen.x_star)) == 1
    ok = all(ok_means) and ok_ones
    report(9, ok, "generator planted-value law (3 SE) and val(x_star)=1 for gamma=1 masks",
           f"means {sum(ok_means)}/{len(ok_means)}, gamma=1 {'ok' if ok_ones else 'broken'} "
           f"{_elapsed(t0)}")
    assert ok


# ---------------------------------------------------------------- 10

def test_10_bias_identity():
    t0 = time.perf_counter()
    rng = random.Random(10)
    identity_ok = True
    for _ in range(1000):
        k = rng.choice((2, 3, 4))
        n = rng.randint(k, 10)
        psi = Instance(n, tuple((Constraint(tuple(rng.sample(range(n), k)),
                                            tuple(rng.choice((-1, 1)) for _ in range(k))),
                                 Fraction(rng.randint(1, 5), rng.randint(1, 3)))
                                for _ in range(rng.randint(1, 10))))
        a = tuple(rng.choice((-1, 1)) for _ in range(n))
        lam = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(k))
        bias, _ = exact_bias(psi, lam)
        lhs = sum(x * y for x, y in zip(a, bias))
        rhs = sum(l * m for l, m in zip(lam, marginals(induced_distribution(psi, a))))
        identity_ok &= lhs == rhs
    max_ok = True
    for _ in range(60):
        k = rng.choice((2, 3))
        n = rng.randint(k, 12)
        psi = Instance(n, tuple((Constraint(tuple(rng.sample(range(n), k)),
                                            tuple(rng.choice((-1, 1)) for _ in range(k))),
                                 Fraction(rng.randint(1, 4))) for _ in range(rng.randint(1, 20))))
        lam = tuple(Fraction(rng.randint(-3, 3)) for _ in range(k))
        bias, B = exact_bias(psi, lam)
        den = int(np.lcm.reduce([x.denominator for x in bias]))
        ints = np.array([int(x * den) for x in bias], dtype=np.int64)
        signs = np.array(list(product((-1, 1), repeat=n)), dtype=np.int64)
        max_ok &= Fraction(int((signs @ ints).max()), den) == B
    ok = identity_ok and max_ok
    report(10, ok, "bias identity on 1000 triples and B = max over flips for n <= 12",
           f"identity {'ok' if identity_ok else 'broken'}, max {'ok' if max_ok else 'broken'} "
           f"{_elapsed(t0)}")
    assert ok
