from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from streamcsp.core import CSPError, TruthTable, encode, opt_value, value
from streamcsp.dist import Dist, expect_f
from streamcsp.events import to_instance
from streamcsp.genhard import (GenParams, default_alpha, gen_padded, gen_rmd_block,
                               gen_streaming_rmd, planted_value)

AND2 = TruthTable.from_bits("0001")
H = Fraction(1, 2)
AGREE = Dist.from_points({(1, 1): H, (-1, -1): H})


def params(**kw):
    base = dict(n=20, k=2, alpha_m=Fraction(1, 4), T=3, mask_dist=AGREE, seed=1)
    base.update(kw)
    return GenParams(**base)


def test_blocks_are_hypermatchings():
    for seed in range(20):
        p = params(seed=seed, k=3, n=21, alpha_m=Fraction(1, 3), mask_dist=Dist.uniform(3))
        gen = gen_streaming_rmd(p)
        m = p.edges_per_block
        assert len(gen.stream) == m * p.T
        for t in range(p.T):
            verts = [j for e in gen.stream.events[t * m:(t + 1) * m] for j in e.indices]
            assert len(verts) == len(set(verts)) == 3 * m


def test_event_literals_match_masks():
    gen = gen_streaming_rmd(params())
    for e, (_, mask) in zip(gen.stream, gen.masks):
        assert tuple(gen.x_star[j] * s for j, s in zip(e.indices, e.signs)) == mask


def test_determinism_and_seed_sensitivity():
    a, b = gen_streaming_rmd(params()), gen_streaming_rmd(params())
    assert a.stream.events == b.stream.events and (a.x_star == b.x_star).all()
    c = gen_streaming_rmd(params(seed=2))
    assert c.stream.events != a.stream.events


def test_single_block_equals_rmd_block():
    p = params(T=1)
    gen = gen_streaming_rmd(p)
    blk = gen_rmd_block(p, 0)
    assert [e.indices for e in gen.stream] == [tuple(e) for e in blk.edges.tolist()]
    assert [e.signs for e in gen.stream] == [tuple(z) for z in blk.z.tolist()]


def test_padding():
    body = gen_streaming_rmd(params())
    assert gen_padded(params()).stream.events == body.stream.events
    p = params(tau=H, pad_dist=Dist.uniform(2))
    gen = gen_padded(p)
    L = p.prefix_length
    assert L == p.edges_per_block * p.T
    assert gen.stream.events[L:] == body.stream.events
    assert all(blk == -1 for blk, _ in gen.masks[:L])
    with pytest.raises(CSPError):
        params(tau=H)


def test_parameter_validation():
    with pytest.raises(CSPError):
        params(alpha_m=Fraction(2, 3))
    with pytest.raises(CSPError):
        params(n=3, alpha_m=Fraction(1, 5))
    with pytest.raises(CSPError):
        params(mask_dist=Dist.uniform(3))
    assert default_alpha(10, 2) == Fraction(1, 10)
    assert default_alpha(10**4, 2) == Fraction(1, 400)


def test_mask_frequencies_chi_square():
    D = Dist.of(2, [Fraction(1, 8), Fraction(1, 4), Fraction(1, 8), H])
    counts = Counter()
    for seed in range(40):
        gen = gen_streaming_rmd(params(seed=seed, n=40, alpha_m=H, T=5, mask_dist=D))
        counts.update(encode(m) for _, m in gen.masks)
    total = sum(counts.values())
    chi2 = sum((counts[t] - total * float(D.p[t])) ** 2 / (total * float(D.p[t])) for t in range(4))
    assert chi2 < 16.27  # 3 degrees of freedom, p = 0.001


def test_planted_value_matches_assignment():
    gen = gen_streaming_rmd(params(mask_dist=Dist.uniform(2)))
    psi = to_instance(gen.stream)
    assert planted_value(gen, AND2) == value(AND2, psi, tuple(int(x) for x in gen.x_star))


def test_planted_value_law():
    D = Dist.of(2, [Fraction(1, 8), Fraction(1, 4), Fraction(1, 8), H])
    vals = [float(planted_value(gen_streaming_rmd(params(seed=s, mask_dist=D)), AND2))
            for s in range(100)]
    se = np.std(vals, ddof=1) / np.sqrt(len(vals))
    assert abs(np.mean(vals) - float(expect_f(D, AND2))) <= 3 * se


def test_no_side_trend():
    # uniform masks lie in the NO set at beta = 1/4; opt drifts down as blocks pile up
    beta, eps = Fraction(1, 4), Fraction(1, 5)

    def frac_high(T):
        high = 0
        for seed in range(30):
            gen = gen_streaming_rmd(GenParams(16, 2, H, T, Dist.uniform(2), seed=seed))
            high += opt_value(AND2, to_instance(gen.stream))[0] > beta + eps
        return high / 30

    f1, f4, f16 = frac_high(1), frac_high(4), frac_high(16)
    assert f1 >= f4 >= f16
    assert f16 < f1
