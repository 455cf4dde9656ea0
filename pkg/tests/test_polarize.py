from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from streamcsp.core import CSPError, encode
from streamcsp.dist import Dist, canonical
from streamcsp.polarize import (NonnegFn, canonical_fn, full_marginals, is_chain_supported,
                                polarization_bound, polarize_full, polarize_step, potential)

H = Fraction(1, 2)


def fn(k, pts: dict):
    vals = [Fraction(0)] * (1 << k)
    for a, w in pts.items():
        vals[encode(a)] += Fraction(w)
    return NonnegFn(k, tuple(vals))


ANTI = fn(2, {(-1, 1): H, (1, -1): H})


def test_potential_examples():
    assert potential(NonnegFn.from_dist(Dist.uniform(2))) == 2
    assert potential(NonnegFn.from_dist(Dist.point((1, 1, 1)))) == 9
    assert potential(ANTI) == 0


def test_step_examples():
    out = polarize_step(ANTI, (-1, 1), (1, -1))
    assert out == fn(2, {(1, 1): H, (-1, -1): H})
    assert potential(out) - potential(ANTI) == 4
    point = NonnegFn.from_dist(Dist.point((1, 1)))
    assert polarize_step(point, (-1, 1), (1, -1)) == point
    U3 = NonnegFn.from_dist(Dist.uniform(3))
    out = polarize_step(U3, (1, 1, -1), (-1, -1, 1))
    assert potential(out) - potential(U3) == 2
    assert full_marginals(out) == full_marginals(U3)
    with pytest.raises(CSPError):
        polarize_step(U3, (1, 1, 1), (-1, -1, 1))


def test_chain_support_examples():
    assert is_chain_supported(canonical((H, 0, Fraction(-1, 3))))
    assert not is_chain_supported(ANTI)
    assert is_chain_supported(Dist.point((1, -1, 1)))


def test_full_examples():
    tr = polarize_full(NonnegFn.from_dist(Dist.uniform(2)))
    assert tr.final == fn(2, {(1, 1): H, (-1, -1): H})
    assert len(tr.steps) == 1
    tr = polarize_full(NonnegFn.from_dist(Dist.uniform(3)))
    assert tr.final == fn(3, {(1, 1, 1): H, (-1, -1, -1): H})
    assert len(tr.steps) <= 24
    C = NonnegFn.from_dist(canonical((H, Fraction(1, 3), -H, 0)))
    tr = polarize_full(C)
    assert tr.final == C and not tr.steps
    with pytest.raises(CSPError):
        polarize_full(NonnegFn.of(1, [1, 1]))


def test_bound_recurrence():
    assert [polarization_bound(k) for k in (2, 3, 4, 5)] == [1, 24, 475, 13328]


def replay_ok(A: NonnegFn, tr) -> bool:
    """Re-apply every recorded step and check the ledger along the way."""
    cur = A
    m0 = full_marginals(A)
    for s in tr.steps:
        if potential(cur) != s.phi_before:
            return False
        nxt = polarize_step(cur, s.u, s.v)
        su = sum(1 for x, y in zip(s.u, s.v) if x > y)
        tu = sum(1 for x, y in zip(s.u, s.v) if x < y)
        if potential(nxt) != s.phi_after or s.phi_after - s.phi_before != 8 * s.eps * su * tu:
            return False
        if full_marginals(nxt) != m0:
            return False
        cur = nxt
    return cur == tr.final


@settings(max_examples=80, deadline=None)
@given(k=st.integers(2, 4), data=st.data())
def test_random_inputs(k, data):
    vals = data.draw(st.lists(st.fractions(min_value=0, max_value=3, max_denominator=9),
                              min_size=1 << k, max_size=1 << k))
    A = NonnegFn(k, tuple(vals))
    tr = polarize_full(A)
    assert replay_ok(A, tr)
    assert tr.final == canonical_fn(A)
    assert is_chain_supported(tr.final)
    assert len(tr.steps) <= polarization_bound(k)
    if is_chain_supported(A):
        assert potential(tr.final) >= potential(A)
    else:
        assert potential(tr.final) > potential(A)
