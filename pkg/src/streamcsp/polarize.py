"""Polarization of nonnegative functions on {-1,1}^k toward the canonical
chain-supported function with the same marginals.  All arithmetic is exact."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import CSPError, decode, encode
from .dist import canonical, chain_order, marginals


@dataclass(frozen=True)
class NonnegFn:
    k: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != 1 << self.k:
            raise CSPError(f"function on k={self.k} needs {1 << self.k} values")
        if any(v < 0 for v in self.values):
            raise CSPError("values must be nonnegative")

    @classmethod
    def of(cls, k: int, values: Sequence) -> "NonnegFn":
        return cls(k, tuple(Fraction(v) for v in values))

    @classmethod
    def from_dist(cls, D) -> "NonnegFn":
        return cls(D.k, tuple(D.p))

    @property
    def p(self):
        return self.values

    @property
    def mass(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def __getitem__(self, a) -> Fraction:
        return self.values[a if isinstance(a, int) else encode(a)]

    def support(self) -> list[tuple[int, ...]]:
        return [decode(t, self.k) for t, v in enumerate(self.values) if v]


def full_marginals(A) -> tuple[Fraction, ...]:
    """``(mu_0, mu_1, ..., mu_k)`` with ``mu_0`` the total mass."""
    return (sum(A.p, Fraction(0)),) + marginals(A)


def potential(A) -> Fraction:
    return sum((v * sum(decode(t, A.k)) ** 2 for t, v in enumerate(A.p) if v), Fraction(0))


def _leq(u, v) -> bool:
    return all(x <= y for x, y in zip(u, v))


def comparable(u, v) -> bool:
    return _leq(u, v) or _leq(v, u)


def join(u, v):
    return tuple(max(x, y) for x, y in zip(u, v))


def meet(u, v):
    return tuple(min(x, y) for x, y in zip(u, v))


def disagreement(u, v) -> tuple[int, int]:
    """``(s, t)``: coordinates where u is +1 and v is -1, and the reverse."""
    s = sum(1 for x, y in zip(u, v) if x > y)
    return s, sum(1 for x, y in zip(u, v) if x < y)


def _apply(vals: list, u, v) -> Fraction:
    eps = min(vals[encode(u)], vals[encode(v)])
    if eps:
        vals[encode(u)] -= eps
        vals[encode(v)] -= eps
        vals[encode(join(u, v))] += eps
        vals[encode(meet(u, v))] += eps
    return eps


def polarize_step(A: NonnegFn, u, v) -> NonnegFn:
    u, v = tuple(u), tuple(v)
    if len(u) != A.k or len(v) != A.k:
        raise CSPError("points must have length k")
    if comparable(u, v):
        raise CSPError(f"{u} and {v} are comparable")
    vals = list(A.values)
    _apply(vals, u, v)
    return NonnegFn(A.k, tuple(vals))


def is_chain_supported(A) -> bool:
    supp = [decode(t, A.k) for t, v in enumerate(A.p) if v]
    return all(comparable(u, v) for i, u in enumerate(supp) for v in supp[i + 1:])


@dataclass(frozen=True)
class Step:
    u: tuple
    v: tuple
    eps: Fraction
    phi_before: Fraction
    phi_after: Fraction


@dataclass
class PolarizationTrace:
    steps: list[Step] = field(default_factory=list)
    final: NonnegFn | None = None


class PolarizeError(RuntimeError):
    pass


def polarization_bound(k: int) -> int:
    """Upper bound on the step count from N(2)=1, N(k) <= (k^2+3)(1+N(k-1))."""
    if k < 2:
        raise CSPError("bound defined for k >= 2")
    n = 1
    for d in range(3, k + 1):
        n = (d * d + 3) * (1 + n)
    return n


class _Engine:
    """Runs the recursive procedure on one mutable value array.  A subcube is
    described by its fixed coordinates; recursive calls act in place."""

    def __init__(self, A: NonnegFn):
        self.k = A.k
        self.vals = list(A.values)
        self.phi = potential(A)
        self.trace = PolarizationTrace()

    # --- subcube helpers

    def _point(self, fixed: dict, free: list, local: Sequence[int]) -> tuple:
        a = [0] * self.k
        for c, b in fixed.items():
            a[c] = b
        for c, b in zip(free, local):
            a[c] = b
        return tuple(a)

    def _mass(self, a) -> Fraction:
        return self.vals[encode(a)]

    def _chain(self, fixed: dict, free: list) -> list[tuple]:
        """Maximal chain through the support of a chain-supported subcube."""
        pts = self._points(fixed, free)
        mu = [sum((self._mass(a) * a[c] for a in pts), Fraction(0)) for c in free]
        order = [free[i] for i in chain_order(mu)]
        chain, cur = [], {c: -1 for c in free}
        chain.append(self._point(fixed, free, [cur[c] for c in free]))
        for c in order:
            cur[c] = 1
            chain.append(self._point(fixed, free, [cur[c] for c in free]))
        return chain

    def _points(self, fixed: dict, free: list) -> list[tuple]:
        return [self._point(fixed, free, decode(t, len(free))) for t in range(1 << len(free))]

    def _step(self, u, v) -> None:
        s, t = disagreement(u, v)
        before = self.phi
        eps = _apply(self.vals, u, v)
        if eps:
            self.phi = before + 8 * eps * s * t
            self.trace.steps.append(Step(u, v, eps, before, self.phi))

    # --- the recursion

    def run(self, fixed: dict) -> None:
        free = [c for c in range(self.k) if c not in fixed]
        d = len(free)
        if d == 2:
            self._step(self._point(fixed, free, (-1, 1)), self._point(fixed, free, (1, -1)))
            return
        last = free[-1]
        lower, upper = {**fixed, last: -1}, {**fixed, last: 1}
        sub = free[:-1]
        self.run(lower)
        self.run(upper)
        top = self._point(fixed, free, (1,) * d)
        for _ in range(d * d + 1):
            a = self._chain(lower, sub)
            b = self._chain(upper, sub)
            pick = None
            for i in range(d):
                if not self._mass(a[i]):
                    continue
                for j in range(d - 1):
                    if self._mass(b[j]) and join(a[i], b[j]) == top:
                        pick = (i, j)
                        break
                if pick:
                    break
            if pick is None:
                break
            self._step(a[pick[0]], b[pick[1]])
            self.run(lower)
        else:
            raise PolarizeError("loop exceeded its iteration bound")
        # clean-up on a coordinate that is -1 on the whole support except the top
        for ell in free:
            if all(a[ell] == -1 for a in self._points(fixed, free)
                   if a != top and self._mass(a)):
                self.run({**fixed, ell: -1})
                return
        raise PolarizeError("no clean-up coordinate exists")


def polarize_full(A: NonnegFn) -> PolarizationTrace:
    if A.k < 2:
        raise CSPError("polarization needs k >= 2")
    eng = _Engine(A)
    eng.run({})
    eng.trace.final = NonnegFn(A.k, tuple(eng.vals))
    return eng.trace


def canonical_fn(A) -> NonnegFn:
    """``mu_0 * canonical(mu / mu_0)``; the zero function maps to itself."""
    m = full_marginals(A)
    if m[0] == 0:
        return NonnegFn(A.k, (Fraction(0),) * (1 << A.k))
    D = canonical([x / m[0] for x in m[1:]])
    return NonnegFn(A.k, tuple(m[0] * x for x in D.p))
