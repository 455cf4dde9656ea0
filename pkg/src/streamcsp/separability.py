"""Deciding whether the YES and NO marginal sets intersect, and the quantities
derived from that decision (separating direction, ratio, resistance, padding).

Every LP here is solved exactly over the rationals.  The NO-side condition
``max_p g_D(p) <= beta`` is semi-infinite; it is enforced at a finite set of
cut points and tightened until the LP solution is certified by exact root
isolation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, lcm
from typing import Callable, NamedTuple, Sequence

from . import _poly
from .core import CSPError, TruthTable, all_points, rho
from .dist import Dist, marginals, pattern_polys, pattern_values
from .lpcore import EQ, GE, LE, LinearProgram, LpOutcome, solve_lp

DEFAULT_TOL = Fraction(1, 10**9)
INITIAL_CUTS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
MAX_CUTS = 10_000
_CUT_DENOMS = (8, 64, 512, 4096, 1 << 16, 1 << 24, 1 << 32, 1 << 40)


class Indeterminate(RuntimeError):
    def __init__(self, msg: str, slack=None):
        super().__init__(msg)
        self.slack = slack


class SeparabilityError(RuntimeError):
    pass


@dataclass(frozen=True)
class Hard:
    D_Y: Dist
    D_N: Dist
    mu: tuple
    slack: Fraction  # certified max_p g_{D_N}(p) minus beta
    tag: str = "Hard"


@dataclass(frozen=True)
class Easy:
    lam: tuple
    tau_Y: Fraction
    tau_N: Fraction
    tag: str = "Easy"


SeparationVerdict = Hard | Easy


# ---------------------------------------------------------------- LP plumbing

class _Vars:
    """Named blocks of LP columns, each one mass per point of {-1,1}^k."""

    def __init__(self, k: int, names: Sequence[str], extra: int = 0):
        self.k, self.m = k, 1 << k
        self.off = {nm: i * self.m for i, nm in enumerate(names)}
        self.n = len(names) * self.m + extra
        self.extra0 = len(names) * self.m
        self.pts = all_points(k)

    def row(self, terms: dict[str, Sequence], extras: dict[int, Fraction] | None = None):
        r = [Fraction(0)] * self.n
        for nm, coeffs in terms.items():
            o = self.off[nm]
            for t, c in enumerate(coeffs):
                r[o + t] += c
        for j, c in (extras or {}).items():
            r[self.extra0 + j] += c
        return r

    def ones(self):
        return [Fraction(1)] * self.m

    def coord(self, j: int, sign: int = 1):
        return [Fraction(sign * a[j]) for a in self.pts]

    def block(self, x, nm):
        o = self.off[nm]
        return x[o:o + self.m]


class _Rows:
    def __init__(self):
        self.rows, self.rel, self.rhs = [], [], []

    def add(self, row, rel, rhs):
        self.rows.append(row)
        self.rel.append(rel)
        self.rhs.append(Fraction(rhs))
        return len(self.rows) - 1


def _simplex(V: _Vars, R: _Rows, nm: str):
    R.add(V.row({nm: V.ones()}), EQ, 1)


def _match_marginals(V: _Vars, R: _Rows, a: str, b: str) -> list[int]:
    """Rows ``mu(a) - mu(b) = 0``; returns their row indices."""
    return [R.add(V.row({a: V.coord(j), b: V.coord(j, -1)}), EQ, 0) for j in range(V.k)]


def _add_cuts(V: _Vars, R: _Rows, f: TruthTable, blocks: Sequence[str], cuts, beta,
              t_col: int | None = None):
    for p in cuts:
        h = pattern_values(f, p)
        extras = {t_col: Fraction(-1)} if t_col is not None else None
        R.add(V.row({nm: h for nm in blocks}, extras), LE, 0 if t_col is not None else beta)


def _lp(V: _Vars, R: _Rows, objective, sense="max") -> LinearProgram:
    return LinearProgram.build(objective, R.rows, R.rel, R.rhs, sense=sense)


def _pick_cut(q, p_star: Fraction, bound: Fraction, cuts) -> Fraction | None:
    for d in _CUT_DENOMS:
        c = p_star.limit_denominator(d)
        if 0 <= c <= 1 and c not in cuts and _poly.peval(q, c) > bound:
            return c
    if p_star not in cuts and _poly.peval(q, p_star) > bound:
        return p_star
    return None


class _CutResult(NamedTuple):
    outcome: LpOutcome
    cuts: tuple
    slack: Fraction | None  # certified max minus bound, when optimal


def _cut_loop(f: TruthTable, build: Callable[[tuple], LinearProgram],
              no_side: Callable[[Sequence], Sequence[Fraction]],
              bound_of: Callable[[Sequence], Fraction],
              tol, cuts=INITIAL_CUTS, max_cuts=MAX_CUTS) -> _CutResult:
    """Re-solve ``build(cuts)`` until the NO-side masses pass the exact check."""
    cuts = tuple(sorted(set(Fraction(c) for c in cuts)))
    polys = pattern_polys(f)
    added = 0
    slack = None
    while True:
        out = solve_lp(build(cuts))
        if not out.optimal:
            return _CutResult(out, cuts, None)
        masses = no_side(out.x)
        q = (Fraction(0),)
        for w, h in zip(masses, polys):
            if w:
                q = _poly.padd(q, _poly.pscale(h, w))
        mb = _poly.max_bounds(q)
        bound = bound_of(out.x)
        slack = mb.upper - bound
        if slack <= tol:
            return _CutResult(out, cuts, slack)
        c = _pick_cut(q, mb.argmax, bound, cuts)
        if c is None:
            raise Indeterminate("polynomial bound cannot be certified at this tolerance", slack)
        added += 1
        if added > max_cuts:
            raise Indeterminate(f"no verdict after {max_cuts} cuts", slack)
        cuts = tuple(sorted(cuts + (c,)))


def _valid_thresholds(gamma, beta):
    gamma, beta = Fraction(gamma), Fraction(beta)
    if not 0 <= beta < gamma <= 1:
        raise CSPError(f"need 0 <= beta < gamma <= 1, got gamma={gamma}, beta={beta}")
    return gamma, beta


def _integer_direction(y: Sequence[Fraction]) -> tuple[Fraction, ...]:
    den = lcm(*(v.denominator for v in y))
    ints = [int(v * den) for v in y]
    g = 0
    for v in ints:
        g = gcd(g, v)
    g = g or 1
    return tuple(Fraction(v // g) for v in ints)


# ------------------------------------------------------------------- decide

def decide(f: TruthTable, gamma, beta, tol=DEFAULT_TOL, max_cuts=MAX_CUTS) -> SeparationVerdict:
    gamma, beta = _valid_thresholds(gamma, beta)
    tol = Fraction(tol)
    if beta < rho(f):
        # g_D(1/2) = rho for every D, so the NO side is empty
        return Easy((Fraction(0),) * f.k, Fraction(0), Fraction(-1))
    if max(f.bits) == 0:
        return Easy((Fraction(0),) * f.k, Fraction(1), Fraction(0))

    V = _Vars(f.k, ("Y", "N"))
    layout = {}

    def build(cuts):
        R = _Rows()
        _simplex(V, R, "Y")
        _simplex(V, R, "N")
        layout["marg"] = _match_marginals(V, R, "Y", "N")
        R.add(V.row({"Y": [Fraction(b) for b in f.bits]}), GE, gamma)
        _add_cuts(V, R, f, ["N"], cuts, beta)
        return _lp(V, R, [Fraction(0)] * V.n)

    res = _cut_loop(f, build, lambda x: V.block(x, "N"), lambda x: beta, tol,
                    max_cuts=max_cuts)
    if res.outcome.optimal:
        x = res.outcome.x
        DY = Dist(f.k, tuple(V.block(x, "Y")))
        DN = Dist(f.k, tuple(V.block(x, "N")))
        return Hard(DY, DN, marginals(DY), res.slack)

    y = res.outcome.farkas
    lam = _integer_direction([y[i] for i in layout["marg"]])
    return _easy_from_direction(f, gamma, beta, lam, res.cuts, tol)


def _easy_from_direction(f, gamma, beta, lam, cuts, tol) -> Easy:
    if any(lam):
        tY = tau_Y(f, gamma, lam)
        tN = tau_N(f, beta, lam, tol=tol, cuts=cuts)
        if tY > tN:
            return Easy(lam, tY, tN)
    best = _search_direction(f, gamma, beta, tol, cuts)
    if best is None:
        raise SeparabilityError("LP reported disjoint sets but no separating direction was found")
    return best


def _search_direction(f, gamma, beta, tol, cuts) -> Easy | None:
    best = None
    for lam in product((-1, 0, 1), repeat=f.k):
        if not any(lam) or next(v for v in lam if v) < 0:
            continue  # skip zero and one of each +-pair
        for sgn in (1, -1):
            d = tuple(Fraction(sgn * v) for v in lam)
            tY, tN = tau_Y(f, gamma, d), tau_N(f, beta, d, tol=tol, cuts=cuts)
            if tY > tN and (best is None or tY - tN > best.tau_Y - best.tau_N):
                best = Easy(d, tY, tN)
    return best


def tau_Y(f: TruthTable, gamma, lam) -> Fraction:
    """Exact ``min <lam, mu(D)>`` over distributions with ``E_D f >= gamma``."""
    V = _Vars(f.k, ("Y",))
    R = _Rows()
    _simplex(V, R, "Y")
    R.add(V.row({"Y": [Fraction(b) for b in f.bits]}), GE, Fraction(gamma))
    obj = V.row({"Y": [sum(Fraction(l) * a[j] for j, l in enumerate(lam)) for a in V.pts]})
    out = solve_lp(_lp(V, R, obj, "min"))
    if not out.optimal:
        raise CSPError("YES side is empty")
    return out.value


def tau_N(f: TruthTable, beta, lam, tol=DEFAULT_TOL, cuts=INITIAL_CUTS) -> Fraction:
    """Upper bound on ``max <lam, mu(D)>`` over the NO side; tight to ``tol``."""
    V = _Vars(f.k, ("N",))
    obj = V.row({"N": [sum(Fraction(l) * a[j] for j, l in enumerate(lam)) for a in V.pts]})
    beta = Fraction(beta)

    def build(cs):
        R = _Rows()
        _simplex(V, R, "N")
        _add_cuts(V, R, f, ["N"], cs, beta)
        return _lp(V, R, obj, "max")

    res = _cut_loop(f, build, lambda x: V.block(x, "N"), lambda x: beta, tol, cuts)
    if not res.outcome.optimal:
        raise CSPError("NO side is empty")
    return res.outcome.value


def extract_hyperplane(f: TruthTable, gamma, beta, tol=DEFAULT_TOL):
    v = decide(f, gamma, beta, tol)
    if isinstance(v, Hard):
        raise CSPError("sets intersect; there is no separating hyperplane")
    return v.lam, v.tau_Y, v.tau_N


# --------------------------------------------------------- threshold oracles

def gamma_star(f: TruthTable, beta, tol=DEFAULT_TOL) -> Fraction | None:
    """Largest gamma whose YES marginals meet the NO marginals at ``beta``.

    ``None`` when the NO side is empty.  Hard exactly for gamma up to this value.
    """
    beta = Fraction(beta)
    if beta < rho(f):
        return None
    V = _Vars(f.k, ("Y", "N"))
    obj = V.row({"Y": [Fraction(b) for b in f.bits]})

    def build(cuts):
        R = _Rows()
        _simplex(V, R, "Y")
        _simplex(V, R, "N")
        _match_marginals(V, R, "Y", "N")
        _add_cuts(V, R, f, ["N"], cuts, beta)
        return _lp(V, R, obj, "max")

    res = _cut_loop(f, build, lambda x: V.block(x, "N"), lambda x: beta, tol)
    return res.outcome.value


def _fixed_marginal_rows(V: _Vars, R: _Rows, nm: str, mu):
    for j, m in enumerate(mu):
        R.add(V.row({nm: V.coord(j)}), EQ, Fraction(m))


def max_gamma_at_marginals(f: TruthTable, mu) -> Fraction:
    """``max E_D f`` over distributions with marginals ``mu``."""
    V = _Vars(f.k, ("Y",))
    R = _Rows()
    _simplex(V, R, "Y")
    _fixed_marginal_rows(V, R, "Y", mu)
    out = solve_lp(_lp(V, R, V.row({"Y": [Fraction(b) for b in f.bits]}), "max"))
    if not out.optimal:
        raise CSPError("no distribution has these marginals")
    return out.value


def min_beta_at_marginals(f: TruthTable, mu, tol=DEFAULT_TOL) -> Fraction:
    """``min_D max_p g_D(p)`` over distributions with marginals ``mu`` (to ``tol``)."""
    V = _Vars(f.k, ("N",), extra=1)
    t = V.extra0
    obj = [Fraction(0)] * V.n
    obj[t] = Fraction(1)

    def build(cuts):
        R = _Rows()
        _simplex(V, R, "N")
        _fixed_marginal_rows(V, R, "N", mu)
        _add_cuts(V, R, f, ["N"], cuts, 0, t_col=0)
        return _lp(V, R, obj, "min")

    res = _cut_loop(f, build, lambda x: V.block(x, "N"), lambda x: x[t], tol)
    if not res.outcome.optimal:
        raise CSPError("no distribution has these marginals")
    return res.outcome.value


# ------------------------------------------------------------ ratio & friends

class RatioResult(NamedTuple):
    alpha: Fraction
    beta: Fraction


def ratio_at(f: TruthTable, beta, tol=DEFAULT_TOL) -> Fraction:
    """``sup beta/gamma`` over gammas in (beta, 1] where the problem is easy."""
    beta = Fraction(beta)
    g = gamma_star(f, beta, tol)
    if g is None or g <= beta:
        return Fraction(1)
    return beta / min(g, Fraction(1))


def approx_ratio(f: TruthTable, grid_step=Fraction(1, 720), tol=DEFAULT_TOL) -> RatioResult:
    step = Fraction(grid_step)
    if step <= 0:
        raise CSPError("grid step must be positive")
    best = None
    i = 0
    while i * step <= 1:
        b = i * step
        a = ratio_at(f, b, tol)
        if best is None or a < best.alpha:
            best = RatioResult(a, b)
        i += 1
    return best


def supports_one_wise(f: TruthTable) -> tuple[bool, Dist | None]:
    ones = f.ones()
    if not ones:
        return False, None
    m = len(ones)
    rows = [[Fraction(1)] * m] + [[Fraction(a[j]) for a in ones] for j in range(f.k)]
    lp = LinearProgram.build([0] * m, rows, [EQ] * (f.k + 1), [1] + [0] * f.k)
    out = solve_lp(lp)
    if not out.optimal:
        return False, None
    return True, Dist.from_points(dict(zip(ones, out.x)))


def resistance(f: TruthTable, tol=DEFAULT_TOL) -> bool:
    r = rho(f)
    if r == 1:
        return True
    return isinstance(decide(f, 1, r, tol), Hard)


class PaddedPair(NamedTuple):
    tau: Fraction
    D0: Dist
    RY: Dist
    RN: Dist


def exists_padded_onewise_pair(f: TruthTable, gamma, beta, tol=DEFAULT_TOL,
                               max_cuts=MAX_CUTS) -> tuple[bool, PaddedPair | None]:
    gamma, beta = _valid_thresholds(gamma, beta)
    V = _Vars(f.k, ("E", "FY", "FN"))

    def build(cuts):
        R = _Rows()
        R.add(V.row({"E": V.ones(), "FY": V.ones()}), EQ, 1)
        R.add(V.row({"E": V.ones(), "FN": V.ones()}), EQ, 1)
        for nm in ("FY", "FN"):
            for j in range(f.k):
                R.add(V.row({nm: V.coord(j)}), EQ, 0)
        fb = [Fraction(b) for b in f.bits]
        R.add(V.row({"E": fb, "FY": fb}), GE, gamma)
        _add_cuts(V, R, f, ["E", "FN"], cuts, beta)
        return _lp(V, R, [Fraction(0)] * V.n)

    def no_side(x):
        return [a + b for a, b in zip(V.block(x, "E"), V.block(x, "FN"))]

    res = _cut_loop(f, build, no_side, lambda x: beta, tol, max_cuts=max_cuts)
    if not res.outcome.optimal:
        return False, None
    x = res.outcome.x
    E, FY, FN = V.block(x, "E"), V.block(x, "FY"), V.block(x, "FN")
    tau = sum(E, Fraction(0))

    def normalized(v, mass):
        return Dist(f.k, tuple(c / mass for c in v)) if mass else Dist.uniform(f.k)

    return True, PaddedPair(tau, normalized(E, tau), normalized(FY, 1 - tau),
                            normalized(FN, 1 - tau))
