"""Constraint functions, instances and exact evaluation.

Conventions: a sign vector is a tuple of +1/-1 ints.  Truth tables are
indexed by the integer whose bit for position ``t`` (most significant first)
is 1 exactly when ``a_t == +1``.  Variable ids are 0-based in the API.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _accel

MAX_ARITY = 6
MAX_BRUTE_N = 26


class CSPError(ValueError):
    pass


def encode(a: Sequence[int]) -> int:
    """Table index of the sign vector ``a``."""
    t = 0
    for x in a:
        if x not in (1, -1):
            raise CSPError(f"sign entries must be +1 or -1, got {x!r}")
        t = 2 * t + (x > 0)
    return t


def decode(t: int, k: int) -> tuple[int, ...]:
    return tuple(1 if (t >> (k - 1 - p)) & 1 else -1 for p in range(k))


def all_points(k: int) -> list[tuple[int, ...]]:
    """All of {-1,1}^k in table order."""
    return [decode(t, k) for t in range(1 << k)]


@dataclass(frozen=True)
class TruthTable:
    k: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.k <= MAX_ARITY:
            raise CSPError(f"arity {self.k} outside 1..{MAX_ARITY}")
        if len(self.bits) != 1 << self.k:
            raise CSPError(f"table for k={self.k} needs {1 << self.k} entries, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise CSPError("table entries must be 0 or 1")

    @classmethod
    def from_bits(cls, bits: str, k: int | None = None) -> "TruthTable":
        bits = bits.strip()
        if k is None:
            k = max(len(bits).bit_length() - 1, 0)
        if set(bits) - {"0", "1"}:
            raise CSPError(f"bad truth table string {bits!r}")
        return cls(k, tuple(int(c) for c in bits))

    @classmethod
    def from_function(cls, k: int, fn: Callable[[tuple[int, ...]], object]) -> "TruthTable":
        return cls(k, tuple(int(bool(fn(a))) for a in all_points(k)))

    def __call__(self, a: Sequence[int]) -> int:
        return eval_f(self, a)

    def bitstring(self) -> str:
        return "".join(map(str, self.bits))

    def ones(self) -> list[tuple[int, ...]]:
        return [a for a in all_points(self.k) if self.bits[encode(a)]]

    def is_symmetric(self) -> bool:
        """True when f depends only on the number of +1 inputs."""
        by_weight: dict[int, int] = {}
        for t, b in enumerate(self.bits):
            w = bin(t).count("1")
            if by_weight.setdefault(w, b) != b:
                return False
        return True


def eval_f(f: TruthTable, a: Sequence[int]) -> int:
    if len(a) != f.k:
        raise CSPError(f"expected {f.k} inputs, got {len(a)}")
    return f.bits[encode(a)]


def rho(f: TruthTable) -> Fraction:
    return Fraction(sum(f.bits), 1 << f.k)


@dataclass(frozen=True)
class Constraint:
    indices: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.signs):
            raise CSPError("indices and signs differ in length")
        if len(set(self.indices)) != len(self.indices):
            raise CSPError(f"repeated variable in {self.indices}")
        if any(s not in (1, -1) for s in self.signs):
            raise CSPError("signs must be +1 or -1")

    @property
    def k(self) -> int:
        return len(self.indices)

    def check(self, n: int) -> None:
        for j in self.indices:
            if not 0 <= j < n:
                raise CSPError(f"variable {j} out of range for n={n}")

    def literals(self, sigma: Sequence[int]) -> tuple[int, ...]:
        return tuple(b * sigma[j] for j, b in zip(self.indices, self.signs))


@dataclass(frozen=True)
class Instance:
    n: int
    constraints: tuple[tuple[Constraint, Fraction], ...]

    def __post_init__(self):
        if self.n < 1:
            raise CSPError("need at least one variable")
        ks = {c.k for c, _ in self.constraints}
        if len(ks) > 1:
            raise CSPError("all constraints must share one arity")
        for c, w in self.constraints:
            c.check(self.n)
            if w < 0:
                raise CSPError("weights must be nonnegative")

    @classmethod
    def build(cls, n: int, items: Iterable) -> "Instance":
        """``items`` holds ``(indices, signs)`` or ``(indices, signs, weight)``."""
        out = []
        for it in items:
            if isinstance(it[0], Constraint):
                c, w = it[0], (it[1] if len(it) > 1 else 1)
            else:
                c = Constraint(tuple(int(j) for j in it[0]), tuple(int(s) for s in it[1]))
                w = it[2] if len(it) > 2 else 1
            out.append((c, Fraction(w)))
        return cls(n, tuple(out))

    @property
    def k(self) -> int | None:
        return self.constraints[0][0].k if self.constraints else None

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, w in self.constraints), Fraction(0))

    def flipped(self, a: Sequence[int]) -> "Instance":
        """The instance with variable ``v`` replaced by ``a_v * x_v``."""
        check_assignment(a, self.n)
        return Instance(self.n, tuple(
            (Constraint(c.indices, tuple(b * a[j] for j, b in zip(c.indices, c.signs))), w)
            for c, w in self.constraints))

    def scaled(self, factor) -> "Instance":
        factor = Fraction(factor)
        return Instance(self.n, tuple((c, w * factor) for c, w in self.constraints))


def check_assignment(sigma: Sequence[int], n: int) -> None:
    if len(sigma) != n:
        raise CSPError(f"assignment has length {len(sigma)}, expected {n}")
    if any(s not in (1, -1) for s in sigma):
        raise CSPError("assignment entries must be +1 or -1")


def constraint_value(f: TruthTable, c: Constraint, sigma: Sequence[int]) -> int:
    c.check(len(sigma))
    return eval_f(f, c.literals(sigma))


def _positive_weight(psi: Instance) -> Fraction:
    w = psi.total_weight
    if w <= 0:
        raise CSPError("instance has zero total weight")
    return w


def value(f: TruthTable, psi: Instance, sigma: Sequence[int]) -> Fraction:
    check_assignment(sigma, psi.n)
    W = _positive_weight(psi)
    sat = sum((w for c, w in psi.constraints if eval_f(f, c.literals(sigma))), Fraction(0))
    return sat / W


def _integer_weights(psi: Instance) -> np.ndarray:
    den = lcm(*(w.denominator for _, w in psi.constraints)) if psi.constraints else 1
    ints = [int(w * den) for _, w in psi.constraints]
    if sum(ints) >= 1 << 62:
        raise CSPError("weights too large for exact integer enumeration")
    return np.array(ints, dtype=np.int64)


def opt_value(f: TruthTable, psi: Instance, backend: str | None = None
              ) -> tuple[Fraction, tuple[int, ...]]:
    """Exact maximum value by exhaustive enumeration, with one maximizer."""
    if psi.n > MAX_BRUTE_N:
        raise CSPError(f"brute force capped at n={MAX_BRUTE_N}, got n={psi.n}")
    W = _positive_weight(psi)
    if psi.k != f.k:
        raise CSPError("instance arity differs from f")
    idx = np.array([c.indices for c, _ in psi.constraints], dtype=np.int64)
    sgn = np.array([c.signs for c, _ in psi.constraints], dtype=np.int64)
    w = _integer_weights(psi)
    best, code = _accel.brute_force(psi.n, idx, sgn, w, np.array(f.bits), backend=backend)
    sigma = tuple(1 if (code >> v) & 1 else -1 for v in range(psi.n))
    val = value(f, psi, sigma)
    if val != Fraction(best, int(w.sum())):
        raise AssertionError("enumeration kernel disagrees with exact evaluation")
    return val, sigma


def brute_max_naive(f: TruthTable, psi: Instance) -> Fraction:
    """Reference enumeration in plain Python; only for tiny tests."""
    return max(value(f, psi, s) for s in product((-1, 1), repeat=psi.n))
