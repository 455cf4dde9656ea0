"""Randomized mask detection instances and their Max-CSP streams.

A block hides ``x_star`` behind a random hypermatching: each hyperedge ``e``
reveals ``z = x_star|_e * b`` for a mask ``b`` drawn from the mask
distribution.  Read as a constraint ``(e, z)``, the planted assignment sees
exactly the literals ``b``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor

import numpy as np

from .core import CSPError, TruthTable, decode, encode
from .dist import Dist
from .events import Stream, StreamEvent, to_instance  # noqa: F401  (re-exported)


@dataclass(frozen=True)
class GenParams:
    n: int
    k: int
    alpha_m: Fraction
    T: int
    mask_dist: Dist
    pad_dist: Dist | None = None
    tau: Fraction = Fraction(0)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha_m", Fraction(self.alpha_m))
        object.__setattr__(self, "tau", Fraction(self.tau))
        if self.k < 1 or self.n < self.k:
            raise CSPError("need 1 <= k <= n")
        if not 0 < self.alpha_m <= Fraction(1, self.k):
            raise CSPError("alpha_m must lie in (0, 1/k]")
        if self.edges_per_block < 1:
            raise CSPError("alpha_m * n must be at least 1")
        if self.T < 1:
            raise CSPError("need at least one block")
        if self.mask_dist.k != self.k:
            raise CSPError("mask distribution arity differs from k")
        if not 0 <= self.tau < 1:
            raise CSPError("tau must lie in [0, 1)")
        if self.tau > 0 and (self.pad_dist is None or self.pad_dist.k != self.k):
            raise CSPError("padding needs a pad distribution of arity k")

    @property
    def edges_per_block(self) -> int:
        return floor(self.alpha_m * self.n)

    @property
    def prefix_length(self) -> int:
        if self.tau == 0:
            return 0
        return ceil(self.tau / (1 - self.tau) * self.alpha_m * self.n * self.T)


@dataclass
class RmdBlock:
    x_star: np.ndarray
    edges: np.ndarray   # (m, k) vertex ids, all distinct
    masks: np.ndarray   # (m, k) signs
    z: np.ndarray       # (m, k) signs


@dataclass
class Generated:
    stream: Stream
    x_star: np.ndarray
    masks: list = field(default_factory=list)  # per event: (block, mask); block -1 is padding
    seed: int = 0


def _rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *path]))


def _draw_masks(rng, D: Dist, m: int) -> np.ndarray:
    probs = np.array([float(x) for x in D.p])
    codes = rng.choice(len(probs), size=m, p=probs / probs.sum())
    return np.array([decode(int(t), D.k) for t in codes], dtype=np.int64).reshape(m, D.k)


def planted(params: GenParams) -> np.ndarray:
    return _rng(params.seed, 0).choice(np.array([-1, 1]), size=params.n)


def gen_rmd_block(params: GenParams, block: int = 0, x_star=None) -> RmdBlock:
    if x_star is None:
        x_star = planted(params)
    rng = _rng(params.seed, 1, block)
    m, k = params.edges_per_block, params.k
    edges = rng.permutation(params.n)[:m * k].reshape(m, k)
    masks = _draw_masks(rng, params.mask_dist, m)
    return RmdBlock(x_star, edges, masks, x_star[edges] * masks)


def _events(edges, z):
    return [StreamEvent(1, tuple(int(j) for j in e), tuple(int(s) for s in zz))
            for e, zz in zip(edges, z)]


def gen_streaming_rmd(params: GenParams) -> Generated:
    x_star = planted(params)
    out = Generated(Stream(params.n, params.k), x_star, seed=params.seed)
    for t in range(params.T):
        blk = gen_rmd_block(params, t, x_star)
        out.stream.extend(_events(blk.edges, blk.z))
        out.masks.extend((t, tuple(int(b) for b in mk)) for mk in blk.masks)
    return out


def gen_padded(params: GenParams) -> Generated:
    body = gen_streaming_rmd(params)
    L = params.prefix_length
    if L == 0:
        return body
    rng = _rng(params.seed, 2)
    # a uniform k-subset in uniformly random order is a uniform distinct tuple
    edges = np.array([rng.choice(params.n, size=params.k, replace=False) for _ in range(L)])
    masks = _draw_masks(rng, params.pad_dist, L)
    z = body.x_star[edges] * masks
    out = Generated(Stream(params.n, params.k, _events(edges, z)), body.x_star, seed=params.seed)
    out.masks = [(-1, tuple(int(b) for b in mk)) for mk in masks] + body.masks
    out.stream.extend(body.stream.events)
    return out


def default_alpha(n: int, k: int) -> Fraction:
    """Small desk-scale hypermatching density, raised so each block has an edge."""
    a = Fraction(1, 100 * k * k)
    return max(a, Fraction(1, n)) if Fraction(1, n) <= Fraction(1, k) else Fraction(1, k)


def planted_value(gen: Generated, f: TruthTable) -> Fraction:
    """Mean of f over the masks, which equals the value of x_star."""
    return Fraction(sum(f.bits[encode(b)] for _, b in gen.masks), len(gen.masks))

