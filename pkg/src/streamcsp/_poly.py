"""Exact univariate polynomials over the rationals, low-order coefficient first."""
from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence

Poly = tuple  # tuple[Fraction, ...]

# isolated roots are bisected to this width (about 9.1e-13)
ROOT_WIDTH = Fraction(1, 1 << 40)


def trim(c: Sequence) -> Poly:
    c = [Fraction(x) for x in c]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c) if c else (Fraction(0),)


def degree(c: Poly) -> int:
    c = trim(c)
    return -1 if c == (0,) else len(c) - 1


def peval(c: Poly, x) -> Fraction:
    acc = Fraction(0)
    for a in reversed(c):
        acc = acc * x + a
    return acc


def padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pscale(a: Poly, s) -> Poly:
    return trim([x * s for x in a])


def pmul(a: Poly, b: Poly) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def pderiv(c: Poly) -> Poly:
    return trim([i * c[i] for i in range(1, len(c))] or [0])


def pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    b = trim(b)
    if b == (0,):
        raise ZeroDivisionError("polynomial division by zero")
    r = list(trim(a))
    db = len(b) - 1
    q = [Fraction(0)] * max(len(r) - db, 1)
    while len(r) - 1 >= db and trim(r) != (0,):
        s = r[-1] / b[-1]
        d = len(r) - 1 - db
        q[d] = s
        for i, y in enumerate(b):
            r[i + d] -= s * y
        r.pop()
        r = list(trim(r)) if r else [Fraction(0)]
    return trim(q), trim(r)


def pgcd(a: Poly, b: Poly) -> Poly:
    a, b = trim(a), trim(b)
    while b != (0,):
        a, b = b, pdivmod(a, b)[1]
    return pscale(a, 1 / a[-1]) if a != (0,) else a


def squarefree(c: Poly) -> Poly:
    c = trim(c)
    if degree(c) < 1:
        return c
    g = pgcd(c, pderiv(c))
    return pdivmod(c, g)[0] if degree(g) > 0 else c


def sturm_chain(c: Poly) -> list[Poly]:
    chain = [trim(c), pderiv(c)]
    while degree(chain[-1]) > 0:
        r = pdivmod(chain[-2], chain[-1])[1]
        if r == (0,):
            break
        chain.append(pscale(r, -1))
    return chain


def _variations(chain, x) -> int:
    signs = [v for v in (peval(p, x) for p in chain) if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if (s > 0) != (t > 0))


def isolate_roots(c: Poly, lo=Fraction(0), hi=Fraction(1)) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals ``(a, b]`` each holding exactly one distinct real root in ``(lo, hi]``."""
    c = squarefree(c)
    if degree(c) < 1:
        return []
    chain = sturm_chain(c)
    out = []
    stack = [(Fraction(lo), Fraction(hi), _variations(chain, lo) - _variations(chain, hi))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        m = (a + b) / 2
        vm = _variations(chain, m)
        stack.append((a, m, _variations(chain, a) - vm))
        stack.append((m, b, vm - _variations(chain, b)))
    out.sort()
    return out


def refine_root(c: Poly, a: Fraction, b: Fraction, width=ROOT_WIDTH):
    """Shrink ``(a, b]`` around its single root.  Returns ``(a, b, exact)``,
    where ``exact`` is the root itself when it is found to be rational."""
    c = squarefree(c)
    if peval(c, b) == 0:
        return b, b, b
    chain = sturm_chain(c)
    va, vb = _variations(chain, a), _variations(chain, b)
    while b - a > width:
        m = (a + b) / 2
        if peval(c, m) == 0:
            return m, m, m
        vm = _variations(chain, m)
        if va - vm >= 1:
            b, vb = m, vm
        else:
            a, va = m, vm
    guess = ((a + b) / 2).limit_denominator(1 << 20)
    if a < guess <= b and peval(c, guess) == 0:
        return guess, guess, guess
    return a, b, None


class PolyMax(NamedTuple):
    argmax: Fraction
    upper: Fraction
    lower: Fraction


def _abs_coeff_sum(c: Poly) -> Fraction:
    return sum((abs(x) for x in c), Fraction(0))


def max_bounds(c: Poly) -> PolyMax:
    """Certified bracket on ``max_{p in [0,1]} c(p)`` and an approximate maximizer."""
    c = trim(c)
    v0, v1 = peval(c, Fraction(0)), peval(c, Fraction(1))
    cands = [(v0, v0, Fraction(0)), (v1, v1, Fraction(1))]
    if degree(c) >= 2:
        d1 = pderiv(c)
        m2 = _abs_coeff_sum(pderiv(d1))
        for a, b in isolate_roots(d1):
            a, b, exact = refine_root(d1, a, b)
            if exact is not None:
                v = peval(c, exact)
                cands.append((v, v, exact))
                continue
            mid = (a + b) / 2
            h = (b - a) / 2
            v = peval(c, mid)
            bound = v + abs(peval(d1, mid)) * h + m2 * h * h / 2
            cands.append((bound, v, mid))
    upper = max(x[0] for x in cands)
    best = max(cands, key=lambda x: (x[1], -x[2]))
    return PolyMax(best[2], upper, best[1])


def max_on_unit_interval(c: Poly) -> tuple[Fraction, Fraction]:
    """``(p*, bound)``: approximate maximizer and a certified upper bound on the max."""
    r = max_bounds(c)
    return r.argmax, r.upper
