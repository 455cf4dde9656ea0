"""Cauchy-projection sketch for the l1 norm of a turnstile integer vector.

The projection matrix is never stored.  Entry ``(row, i)`` is regenerated from
a counter-based hash of ``(seed, i, row)``, rounded to a fixed-point integer,
and accumulated in wrapping int64 arithmetic.  That makes the accumulator an
exact linear function of the update multiset: order does not matter,
insert-then-delete cancels exactly, and same-seed sketches merge by addition.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import _accel


class SketchError(ValueError):
    pass


def rows_for(epsilon: float) -> int:
    return math.ceil(48 / (epsilon * epsilon))


class L1Sketch:
    def __init__(self, n: int, epsilon: float, seed: int, denominator: int = 1):
        if not 0 < epsilon <= 0.5:
            raise SketchError(f"epsilon must lie in (0, 1/2], got {epsilon}")
        if n < 1:
            raise SketchError("dimension must be positive")
        if denominator < 1:
            raise SketchError("denominator must be a positive integer")
        self.n = n
        self.epsilon = float(epsilon)
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.denominator = int(denominator)
        self.rows = rows_for(epsilon)
        self.acc = np.zeros(self.rows, dtype=np.int64)

    def _scaled(self, v) -> int:
        v = Fraction(v) * self.denominator
        if v.denominator != 1:
            raise SketchError(f"update value {v / self.denominator} is not a multiple of "
                              f"1/{self.denominator}")
        return int(v)

    def update(self, i: int, v) -> None:
        if not 0 <= i < self.n:
            raise SketchError(f"index {i} out of range for n={self.n}")
        self.update_many(np.array([i]), np.array([self._scaled(v)]), prescaled=True)

    def update_many(self, indices, values, prescaled: bool = False) -> None:
        """Batch form of :meth:`update`.  With ``prescaled`` the values are
        already multiplied by the denominator and must be integers."""
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= self.n):
            raise SketchError("update index out of range")
        if not prescaled:
            values = [self._scaled(v) for v in values]
        _accel.accumulate(self.acc, self.seed, indices, np.asarray(values, dtype=np.int64))

    def estimate(self) -> float:
        return estimate_from(self.acc) / self.denominator

    def merge(self, other: "L1Sketch") -> "L1Sketch":
        if (self.n, self.rows, self.seed, self.denominator) != (
                other.n, other.rows, other.seed, other.denominator):
            raise SketchError("only sketches with identical parameters can be merged")
        out = self.copy()
        out.acc += other.acc
        return out

    def copy(self) -> "L1Sketch":
        out = L1Sketch.__new__(L1Sketch)
        out.__dict__.update(self.__dict__)
        out.acc = self.acc.copy()
        return out


def estimate_from(acc: np.ndarray) -> float:
    """Median of ``|acc|`` in unscaled units.  The median of a standard
    |Cauchy| is 1, so no correction factor is needed."""
    return float(np.median(np.abs(acc.astype(np.float64)))) / _accel.FIXED_SCALE


def sketch_new(n: int, epsilon: float, seed: int) -> L1Sketch:
    return L1Sketch(n, epsilon, seed)


def sketch_update(s: L1Sketch, i: int, v) -> None:
    s.update(i, v)


def sketch_estimate(s: L1Sketch) -> float:
    return s.estimate()


def derive_seed(seed: int, *path: int) -> int:
    """Independent 64-bit child seed for ``(seed, *path)``."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *path])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
