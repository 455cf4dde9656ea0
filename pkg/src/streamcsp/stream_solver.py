"""Bias-based streaming classifier and value estimator."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, lcm
from typing import NamedTuple, Sequence

import numpy as np

from . import separability
from .core import CSPError, Instance, TruthTable, rho
from .events import Stream, TurnstileCounter, validate
from .sketch import L1Sketch, derive_seed, estimate_from

YES, NO = "YES", "NO"
DEFAULT_REPETITIONS = 9
# sketch precision is never pushed below this; keeps the row count bounded
MIN_SKETCH_EPS = Fraction(1, 64)
_FLUSH = 1 << 13


def exact_bias(psi: Instance, lam: Sequence) -> tuple[tuple[Fraction, ...], Fraction]:
    W = psi.total_weight
    if W <= 0:
        raise CSPError("instance has zero total weight")
    lam = [Fraction(x) for x in lam]
    bias = [Fraction(0)] * psi.n
    for c, w in psi.constraints:
        if len(lam) != c.k:
            raise CSPError("direction length differs from constraint arity")
        for j, b, l in zip(c.indices, c.signs, lam):
            bias[j] += l * w * b
    bias = tuple(x / W for x in bias)
    return bias, sum((abs(x) for x in bias), Fraction(0))


@dataclass(frozen=True)
class ClassifierConfig:
    lam: tuple
    tau_Y: Fraction
    tau_N: Fraction
    epsilon: Fraction | None = None
    repetitions: int = DEFAULT_REPETITIONS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(Fraction(x) for x in self.lam))
        object.__setattr__(self, "tau_Y", Fraction(self.tau_Y))
        object.__setattr__(self, "tau_N", Fraction(self.tau_N))
        if self.tau_Y <= self.tau_N:
            raise CSPError("classifier needs tau_Y > tau_N")
        if self.epsilon is None:
            if self.tau_N > 0:
                eps = (self.tau_Y - self.tau_N) / (2 * (self.tau_Y + self.tau_N))
            else:
                eps = Fraction(1, 4)
            object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon <= 0:
            raise CSPError("epsilon must be positive")
        if self.repetitions < 1:
            raise CSPError("need at least one repetition")

    @classmethod
    def from_verdict(cls, v: separability.Easy, **kw) -> "ClassifierConfig":
        return cls(v.lam, v.tau_Y, v.tau_N, **kw)

    @property
    def threshold(self) -> Fraction:
        if self.tau_N > 0:
            return self.tau_N * (1 + self.epsilon)
        return max((self.tau_Y + self.tau_N) / 2, self.tau_Y / 2)

    def verdict(self, B) -> str:
        # with tau_N <= 0 a NO instance has B = 0, so the cut is strict
        if self.tau_N > 0:
            return NO if B <= self.threshold else YES
        return NO if B < self.threshold else YES

    @property
    def sketch_epsilon(self) -> float:
        return float(min(max(self.epsilon, MIN_SKETCH_EPS), Fraction(1, 2)))


class StreamResult(NamedTuple):
    verdict: str
    B: float
    W: int
    threshold: Fraction


def classify_exact(psi: Instance, cfg: ClassifierConfig) -> str:
    return cfg.verdict(exact_bias(psi, cfg.lam)[1])


def _integer_lambda(lam) -> tuple[list[int], int]:
    den = lcm(*(x.denominator for x in lam))
    return [int(x * den) for x in lam], den


class _Ingest:
    """Feeds validated events into a set of sketches in batches."""

    def __init__(self, stream: Stream, coeffs: list[list[int]], sketches: list[list[L1Sketch]]):
        self.stream = stream
        self.coeffs = coeffs        # one integer multiplier per position, per sketch group
        self.sketches = sketches    # sketches[g] share the coefficient row coeffs[g]
        self.counter = TurnstileCounter()
        self.idx: list[int] = []
        self.sgn: list[int] = []
        self.pos: list[int] = []

    def run(self) -> int:
        for e in self.stream:
            self.stream.check_event(e)
            self.counter.push(e)
            for t, (j, b) in enumerate(zip(e.indices, e.signs)):
                self.idx.append(j)
                self.sgn.append(e.op * b)
                self.pos.append(t)
            if len(self.idx) >= _FLUSH:
                self.flush()
        self.flush()
        if self.counter.total <= 0:
            raise CSPError("stream has zero total weight")
        return self.counter.total

    def flush(self) -> None:
        if not self.idx:
            return
        idx = np.array(self.idx, dtype=np.int64)
        sgn = np.array(self.sgn, dtype=np.int64)
        pos = np.array(self.pos, dtype=np.int64)
        for coeff, group in zip(self.coeffs, self.sketches):
            vals = sgn * np.array(coeff, dtype=np.int64)[pos]
            keep = vals != 0
            for s in group:
                s.update_many(idx[keep], vals[keep], prescaled=True)
        self.idx, self.sgn, self.pos = [], [], []


def classify_stream(stream: Stream, cfg: ClassifierConfig) -> StreamResult:
    if len(cfg.lam) != stream.k:
        raise CSPError("direction length differs from stream arity")
    ints, den = _integer_lambda(cfg.lam)
    eps = cfg.sketch_epsilon
    group = [L1Sketch(stream.n, eps, derive_seed(cfg.seed, r)) for r in range(cfg.repetitions)]
    W = _Ingest(stream, [ints], [group]).run()
    B = float(np.median([s.estimate() for s in group])) / (den * W)
    return StreamResult(cfg.verdict(B), B, W, cfg.threshold)


# ------------------------------------------------------------ value estimate

@dataclass(frozen=True)
class Distinguisher:
    gamma: Fraction
    beta: Fraction
    cfg: ClassifierConfig


def distinguishers(f: TruthTable, eps, tol=separability.DEFAULT_TOL) -> list[Distinguisher]:
    """One classifier per grid beta >= rho(f), at the smallest easy grid gamma."""
    eps = Fraction(eps).limit_denominator(10**6)
    r = rho(f)
    tau = eps * r / 2
    out = []
    if r in (0, 1) or tau <= 0:
        return out
    j = -(-r // tau)  # ceil: grid betas below rho only ever report rho
    while j * tau < 1:
        beta = j * tau
        gs = separability.gamma_star(f, beta, tol)
        i = floor(gs / tau) + 1 if gs is not None else floor(beta / tau) + 1
        while i * tau <= 1:
            v = separability.decide(f, i * tau, beta, tol)
            if isinstance(v, separability.Easy):
                out.append(Distinguisher(i * tau, beta, ClassifierConfig.from_verdict(v)))
                break
            i += 1
        j += 1
    return out


class ValueEstimate(NamedTuple):
    value: Fraction
    beta0: Fraction | None
    accepted: int
    total: int


def estimate_value(stream: Stream, f: TruthTable, eps, seed: int = 0,
                   repetitions: int = DEFAULT_REPETITIONS,
                   tol=separability.DEFAULT_TOL) -> ValueEstimate:
    """Run every grid distinguisher over one pass and report the largest
    accepted beta, floored at rho(f)."""
    if f.k != stream.k:
        raise CSPError("stream arity differs from f")
    r = rho(f)
    ds = distinguishers(f, eps, tol)
    if not ds:
        _net_weight(stream)
        return ValueEstimate(r, None, 0, 0)
    sk_eps = max(min(d.cfg.epsilon for d in ds), Fraction(1, 20))
    sk_eps = float(min(sk_eps, Fraction(1, 2)))
    # per-position sketches: acc for any direction is a linear combination
    groups = []
    for t in range(f.k):
        unit = [0] * f.k
        unit[t] = 1
        groups.append(([L1Sketch(stream.n, sk_eps, derive_seed(seed, q))
                        for q in range(repetitions)], unit))
    W = _Ingest(stream, [u for _, u in groups], [g for g, _ in groups]).run()
    beta0, accepted = None, 0
    for d in ds:
        ints, den = _integer_lambda(d.cfg.lam)
        ests = []
        for q in range(repetitions):
            acc = np.zeros_like(groups[0][0][q].acc)
            for t in range(f.k):
                if ints[t]:
                    acc += np.int64(ints[t]) * groups[t][0][q].acc
            ests.append(estimate_from(acc))
        B = float(np.median(ests)) / (den * W)
        if d.cfg.verdict(B) == YES:
            accepted += 1
            if beta0 is None or d.beta > beta0:
                beta0 = d.beta
    value = max(r, beta0) if beta0 is not None else r
    return ValueEstimate(value, beta0, accepted, len(ds))


def _net_weight(stream: Stream) -> int:
    W = validate(stream).total
    if W <= 0:
        raise CSPError("stream has zero total weight")
    return W
