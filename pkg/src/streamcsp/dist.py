"""Distributions over {-1,1}^k with exact rational masses."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import _poly
from .core import CSPError, Instance, TruthTable, all_points, check_assignment, decode, encode


@dataclass(frozen=True)
class Dist:
    k: int
    p: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.p) != 1 << self.k:
            raise CSPError(f"distribution over k={self.k} needs {1 << self.k} masses")
        if any(x < 0 for x in self.p):
            raise CSPError("negative probability mass")
        if sum(self.p) != 1:
            raise CSPError(f"masses sum to {sum(self.p)}, not 1")

    @classmethod
    def of(cls, k: int, masses: Sequence) -> "Dist":
        return cls(k, tuple(Fraction(x) for x in masses))

    @classmethod
    def uniform(cls, k: int) -> "Dist":
        return cls(k, (Fraction(1, 1 << k),) * (1 << k))

    @classmethod
    def point(cls, a: Sequence[int]) -> "Dist":
        k = len(a)
        p = [Fraction(0)] * (1 << k)
        p[encode(a)] = Fraction(1)
        return cls(k, tuple(p))

    @classmethod
    def from_points(cls, weighted: dict) -> "Dist":
        """Build from ``{sign vector: mass}``."""
        k = len(next(iter(weighted)))
        p = [Fraction(0)] * (1 << k)
        for a, w in weighted.items():
            p[encode(a)] += Fraction(w)
        return cls(k, tuple(p))

    def __getitem__(self, a) -> Fraction:
        return self.p[a if isinstance(a, int) else encode(a)]

    def support(self) -> list[tuple[int, ...]]:
        return [decode(t, self.k) for t, x in enumerate(self.p) if x]

    def negated(self) -> "Dist":
        # index of -a is the bitwise complement of the index of a
        top = (1 << self.k) - 1
        return Dist(self.k, tuple(self.p[top - t] for t in range(1 << self.k)))


def _check_arity(D: Dist, f: TruthTable) -> None:
    if D.k != f.k:
        raise CSPError(f"distribution arity {D.k} differs from f arity {f.k}")


def marginals(D) -> tuple[Fraction, ...]:
    """Coordinate means.  Works for any object with ``k`` and mass vector ``p``."""
    mu = [Fraction(0)] * D.k
    for t, x in enumerate(D.p):
        if x:
            for j in range(D.k):
                mu[j] += x if (t >> (D.k - 1 - j)) & 1 else -x
    return tuple(mu)


def expect_f(D: Dist, f: TruthTable) -> Fraction:
    _check_arity(D, f)
    return sum((x for x, b in zip(D.p, f.bits) if b), Fraction(0))


@lru_cache(maxsize=None)
def _bernstein(k: int) -> tuple:
    """Monomial coefficients of p^j (1-p)^(k-j) for j = 0..k."""
    out = []
    for j in range(k + 1):
        c = (Fraction(1),)
        for _ in range(j):
            c = _poly.pmul(c, (Fraction(0), Fraction(1)))
        for _ in range(k - j):
            c = _poly.pmul(c, (Fraction(1), Fraction(-1)))
        out.append(c)
    return tuple(out)


@lru_cache(maxsize=256)
def pattern_polys(f: TruthTable) -> tuple:
    """``h_b(p) = E_{a ~ Bern(p)^k} f(b*a)`` for every pattern b, in table order.

    ``g_D = sum_b D(b) h_b`` is linear in D, which is what the LP cuts use.
    """
    k = f.k
    basis = _bernstein(k)
    top = (1 << k) - 1
    polys = []
    for tb in range(1 << k):
        acc = (Fraction(0),)
        for tc, fc in enumerate(f.bits):
            if fc:
                # a = b*c has a_i = +1 where b and c agree
                agree = k - bin((tb ^ tc) & top).count("1")
                acc = _poly.padd(acc, basis[agree])
        polys.append(acc)
    return tuple(polys)


def pattern_values(f: TruthTable, p) -> tuple[Fraction, ...]:
    """``h_b(p)`` for every b at a single point p."""
    p = Fraction(p)
    return tuple(_poly.peval(h, p) for h in pattern_polys(f))


def bern_poly(D: Dist, f: TruthTable) -> tuple[Fraction, ...]:
    _check_arity(D, f)
    acc = (Fraction(0),)
    for x, h in zip(D.p, pattern_polys(f)):
        if x:
            acc = _poly.padd(acc, _poly.pscale(h, x))
    return acc


max_on_unit_interval = _poly.max_on_unit_interval


def in_S_Y(D: Dist, f: TruthTable, gamma) -> bool:
    return expect_f(D, f) >= Fraction(gamma)


def in_S_N(D: Dist, f: TruthTable, beta, tol=0) -> bool:
    if tol < 0:
        raise CSPError("tolerance must be nonnegative")
    return _poly.max_bounds(bern_poly(D, f)).upper <= Fraction(beta) + Fraction(tol)


def induced_distribution(psi: Instance, a: Sequence[int]) -> Dist:
    """Weighted distribution of the negation patterns of ``psi`` after flipping by ``a``."""
    check_assignment(a, psi.n)
    W = psi.total_weight
    if W <= 0:
        raise CSPError("instance has zero total weight")
    k = psi.k
    p = [Fraction(0)] * (1 << k)
    for c, w in psi.constraints:
        p[encode(tuple(a[j] * b for j, b in zip(c.indices, c.signs)))] += w
    return Dist(k, tuple(x / W for x in p))


def chain_order(mu: Sequence) -> list[int]:
    """Coordinates by decreasing mean, ties by index."""
    return sorted(range(len(mu)), key=lambda j: (-Fraction(mu[j]), j))


def canonical(mu: Sequence) -> Dist:
    """The chain-supported distribution with marginals ``mu``."""
    mu = [Fraction(x) for x in mu]
    if any(abs(x) > 1 for x in mu):
        raise CSPError("marginals must lie in [-1, 1]")
    k = len(mu)
    order = chain_order(mu)
    ext = [Fraction(1)] + [mu[j] for j in order] + [Fraction(-1)]
    p = [Fraction(0)] * (1 << k)
    point = [-1] * k
    for i in range(k + 1):
        if i:
            point[order[i - 1]] = 1
        p[encode(point)] += (ext[i] - ext[i + 1]) / 2
    return Dist(k, tuple(p))


_YES_RESIDUAL = {(1, 1): Fraction(1, 2), (-1, -1): Fraction(1, 2)}
_NO_RESIDUAL = {(1, -1): Fraction(1, 2), (-1, 1): Fraction(1, 2)}


def decompose_padded_pair_k2(DY: Dist, DN: Dist):
    """Write ``DY = tau*D0 + (1-tau)*RY`` and ``DN = tau*D0 + (1-tau)*RN`` with
    zero-marginal residuals.  Returns ``(tau, D0, RY, RN)``."""
    if DY.k != 2 or DN.k != 2:
        raise CSPError("padded pair decomposition is only for k = 2")
    if marginals(DY) != marginals(DN):
        raise CSPError("marginals differ")
    RY = Dist.from_points(_YES_RESIDUAL)
    RN = Dist.from_points(_NO_RESIDUAL)
    delta = DY[(1, 1)] - DN[(1, 1)]
    if delta == 0:
        return Fraction(1), DY, RY, RN
    if delta < 0:
        # the NO side carries the agreeing residual instead
        tau, D0, _, _ = decompose_padded_pair_k2(DN, DY)
        return tau, D0, RN, RY
    tau = 1 - 2 * delta
    if tau == 0:
        return Fraction(0), Dist.uniform(2), RY, RN
    q = list(DY.p)
    for a in ((1, 1), (-1, -1)):
        q[encode(a)] -= delta
    return tau, Dist(2, tuple(x / tau for x in q)), RY, RN


def mix(parts: Sequence[tuple]) -> Dist:
    """Convex combination ``sum_i w_i D_i`` of distributions."""
    k = parts[0][1].k
    p = [Fraction(0)] * (1 << k)
    for w, D in parts:
        for t, x in enumerate(D.p):
            p[t] += Fraction(w) * x
    return Dist(k, tuple(p))


def points(k: int):
    return all_points(k)
