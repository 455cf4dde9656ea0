"""Exact rational linear programming.

A dense two-phase simplex over :class:`fractions.Fraction` with Bland's
pivoting rule.  Every outcome carries a certificate that can be checked by
re-multiplication against the full constraint system (constraint rows followed
by the finite variable bounds, all written in ``<=`` orientation):

* ``optimal``    -> primal point and dual multipliers with equal objective,
* ``infeasible`` -> Farkas multipliers ``y`` with ``y^T A = 0`` and ``y^T b < 0``,
* ``unbounded``  -> a feasible improving ray.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

Rational = Fraction

LE, GE, EQ = "<=", ">=", "=="
_RELATIONS = (LE, GE, EQ)


class LPError(ValueError):
    """Malformed linear program."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class LinearProgram:
    """``sense`` c.x  subject to  rows[i].x  relations[i]  rhs[i]  and bounds.

    ``lower`` defaults to 0 for every variable; a ``None`` entry means the
    variable is unbounded below.  ``upper`` defaults to no upper bounds.
    """

    objective: tuple
    rows: tuple
    relations: tuple
    rhs: tuple
    lower: Optional[tuple] = None
    upper: Optional[tuple] = None
    sense: str = "max"

    def __post_init__(self):
        n = len(self.objective)
        if len(self.rows) != len(self.relations) or len(self.rows) != len(self.rhs):
            raise LPError("rows, relations and rhs must have equal length")
        for i, row in enumerate(self.rows):
            if len(row) != n:
                raise LPError(f"row {i} has width {len(row)}, expected {n}")
        for rel in self.relations:
            if rel not in _RELATIONS:
                raise LPError(f"unknown relation {rel!r}")
        if self.sense not in ("max", "min"):
            raise LPError(f"unknown sense {self.sense!r}")
        for name in ("lower", "upper"):
            b = getattr(self, name)
            if b is not None and len(b) != n:
                raise LPError(f"{name} bounds have length {len(b)}, expected {n}")

    @classmethod
    def build(cls, objective, rows=(), relations=(), rhs=(), lower=None,
              upper=None, sense="max") -> "LinearProgram":
        conv = lambda seq: tuple(as_fraction(v) for v in seq)  # noqa: E731
        optconv = lambda seq: None if seq is None else tuple(  # noqa: E731
            None if v is None else as_fraction(v) for v in seq)
        return cls(conv(objective), tuple(conv(r) for r in rows), tuple(relations),
                   conv(rhs), optconv(lower), optconv(upper), sense)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def lower_bound(self, j: int) -> Optional[Fraction]:
        return Fraction(0) if self.lower is None else self.lower[j]

    def upper_bound(self, j: int) -> Optional[Fraction]:
        return None if self.upper is None else self.upper[j]


@dataclass(frozen=True)
class LpOutcome:
    status: str
    x: Optional[tuple] = None
    value: Optional[Fraction] = None
    dual: Optional[tuple] = None
    farkas: Optional[tuple] = None
    ray: Optional[tuple] = None
    pivots: int = field(default=0, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def infeasible(self) -> bool:
        return self.status == "infeasible"

    @property
    def unbounded(self) -> bool:
        return self.status == "unbounded"


def full_system(lp: LinearProgram):
    """Constraint rows then finite bounds, every inequality as ``a.x <= b``.

    Returns ``(A, b, kinds)`` where ``kinds[i]`` is ``"<="`` or ``"=="``.
    This is the row order used by dual and Farkas vectors.
    """
    n = lp.num_vars
    A, b, kinds = [], [], []
    for row, rel, r in zip(lp.rows, lp.relations, lp.rhs):
        if rel == GE:
            A.append(tuple(-v for v in row))
            b.append(-r)
            kinds.append(LE)
        else:
            A.append(tuple(row))
            b.append(r)
            kinds.append(rel)
    for j in range(n):
        lo, hi = lp.lower_bound(j), lp.upper_bound(j)
        if lo is not None:
            A.append(tuple(Fraction(-1) if t == j else Fraction(0) for t in range(n)))
            b.append(-lo)
            kinds.append(LE)
        if hi is not None:
            A.append(tuple(Fraction(1) if t == j else Fraction(0) for t in range(n)))
            b.append(hi)
            kinds.append(LE)
    return A, b, kinds


def _combine(y, A, n):
    out = [Fraction(0)] * n
    for yi, row in zip(y, A):
        if yi:
            for j, a in enumerate(row):
                if a:
                    out[j] += yi * a
    return out


def check_farkas(lp: LinearProgram, y: Sequence[Fraction]) -> bool:
    """True iff ``y`` proves infeasibility: ``0 = y^T A x <= y^T b < 0``."""
    A, b, kinds = full_system(lp)
    if len(y) != len(A):
        return False
    if any(k == LE and yi < 0 for yi, k in zip(y, kinds)):
        return False
    if any(v != 0 for v in _combine(y, A, lp.num_vars)):
        return False
    return sum((yi * bi for yi, bi in zip(y, b)), Fraction(0)) < 0


def check_dual(lp: LinearProgram, y: Sequence[Fraction], value: Fraction) -> bool:
    """True iff ``y`` is dual feasible and its objective equals ``value``."""
    A, b, kinds = full_system(lp)
    if len(y) != len(A):
        return False
    sign = 1 if lp.sense == "max" else -1
    if any(k == LE and sign * yi < 0 for yi, k in zip(y, kinds)):
        return False
    if _combine(y, A, lp.num_vars) != list(lp.objective):
        return False
    return sum((yi * bi for yi, bi in zip(y, b)), Fraction(0)) == value


def check_primal(lp: LinearProgram, x: Sequence[Fraction]) -> bool:
    A, b, kinds = full_system(lp)
    for row, bi, k in zip(A, b, kinds):
        lhs = sum((a * xj for a, xj in zip(row, x) if a), Fraction(0))
        if (k == LE and lhs > bi) or (k == EQ and lhs != bi):
            return False
    return True


def objective_value(lp: LinearProgram, x: Sequence[Fraction]) -> Fraction:
    return sum((c * xj for c, xj in zip(lp.objective, x) if c), Fraction(0))


class _Tableau:
    """Equality-form tableau ``T x = rhs`` with an artificial basis."""

    def __init__(self, rows, rhs, ncols):
        m = len(rows)
        self.m = m
        self.nx = ncols
        self.ncols = ncols + m
        self.T = []
        for i, row in enumerate(rows):
            full = list(row) + [Fraction(0)] * m
            full[ncols + i] = Fraction(1)
            self.T.append(full)
        self.rhs = list(rhs)
        self.basis = [ncols + i for i in range(m)]
        self.pivots = 0

    def pivot(self, r, j, d):
        prow = self.T[r]
        piv = prow[j]
        if piv != 1:
            inv = 1 / piv
            for c in range(self.ncols):
                if prow[c]:
                    prow[c] *= inv
            self.rhs[r] *= inv
        nz = [c for c in range(self.ncols) if prow[c]]
        pr = self.rhs[r]
        for i in range(self.m):
            if i == r:
                continue
            row = self.T[i]
            factor = row[j]
            if factor:
                for c in nz:
                    row[c] -= factor * prow[c]
                self.rhs[i] -= factor * pr
        factor = d[j]
        if factor:
            for c in nz:
                d[c] -= factor * prow[c]
            d[-1] -= factor * pr
        self.basis[r] = j
        self.pivots += 1

    def reduced_costs(self, cost):
        """Row ``c_j - c_B B^-1 A_j`` with the (negated) objective value last."""
        d = list(cost) + [Fraction(0)]
        for i, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb:
                row = self.T[i]
                for c in range(self.ncols):
                    if row[c]:
                        d[c] -= cb * row[c]
                d[-1] -= cb * self.rhs[i]
        return d

    def run(self, d, allowed):
        """Bland's rule maximisation; returns the entering column if unbounded."""
        while True:
            j = next((c for c in range(self.ncols) if allowed[c] and d[c] > 0), None)
            if j is None:
                return None
            best = None
            for i in range(self.m):
                a = self.T[i][j]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return j
            self.pivot(best[1], j, d)


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly; see module docstring for the certificates."""
    n = lp.num_vars
    csign = 1 if lp.sense == "max" else -1
    cmax = [csign * c for c in lp.objective]

    # internal columns: (original variable, sign); x_j = shift_j + sum sign * x'
    cols, shift, dbl = [], [], []
    for j in range(n):
        lo, hi = lp.lower_bound(j), lp.upper_bound(j)
        if lo is not None:
            cols.append((j, 1))
            shift.append(lo)
            if hi is not None:
                if hi < lo:
                    return _bound_conflict(lp, j)
                dbl.append((j, len(cols) - 1, hi - lo))
        elif hi is not None:
            cols.append((j, -1))
            shift.append(hi)
        else:
            cols.append((j, 1))
            cols.append((j, -1))
            shift.append(Fraction(0))
    shift_by_var = shift
    nx = len(cols)

    irows, irhs, ikind = [], [], []
    for row, rel, r in zip(lp.rows, lp.relations, lp.rhs):
        o = -1 if rel == GE else 1
        irows.append([o * row[j] * s for (j, s) in cols])
        irhs.append(o * (r - sum((row[j] * shift_by_var[j] for j in range(n) if row[j]),
                                 Fraction(0))))
        ikind.append(EQ if rel == EQ else LE)
    for (j, c, cap) in dbl:
        rr = [Fraction(0)] * nx
        rr[c] = Fraction(1)
        irows.append(rr)
        irhs.append(cap)
        ikind.append(LE)
    m = len(irows)
    chat = [cmax[j] * s for (j, s) in cols]
    const = sum((cmax[j] * shift_by_var[j] for j in range(n) if cmax[j]), Fraction(0))

    # slacks then sign flips so that rhs >= 0
    slack_of = {}
    ncols = nx
    for i in range(m):
        if ikind[i] == LE:
            slack_of[i] = ncols
            ncols += 1
    rows, rhs, flip = [], [], []
    for i in range(m):
        full = list(irows[i]) + [Fraction(0)] * (ncols - nx)
        if i in slack_of:
            full[slack_of[i]] = Fraction(1)
        f = -1 if irhs[i] < 0 else 1
        rows.append([f * v for v in full] if f < 0 else full)
        rhs.append(f * irhs[i])
        flip.append(f)

    tab = _Tableau(rows, rhs, ncols)
    art = range(ncols, ncols + m)

    cost1 = [Fraction(0)] * ncols + [Fraction(-1)] * m
    d = tab.reduced_costs(cost1)
    tab.run(d, [True] * tab.ncols)
    phase1 = -d[-1]
    if phase1 < 0:
        y = [-1 - d[a] for a in art]
        z = [y[i] * flip[i] for i in range(m)]
        cert = _lift(lp, cols, dbl, irows, z, [Fraction(0)] * nx, m)
        return LpOutcome("infeasible", farkas=tuple(cert), pivots=tab.pivots)

    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if tab.basis[r] >= ncols:
            j = next((c for c in range(ncols) if tab.T[r][c]), None)
            if j is not None:
                tab.pivot(r, j, d)

    cost2 = chat + [Fraction(0)] * (ncols - nx) + [Fraction(0)] * m
    d = tab.reduced_costs(cost2)
    allowed = [True] * ncols + [False] * m
    enter = tab.run(d, allowed)
    if enter is not None:
        dirn = [Fraction(0)] * ncols
        dirn[enter] = Fraction(1)
        for i, bv in enumerate(tab.basis):
            if bv < ncols:
                dirn[bv] = -tab.T[i][enter]
        ray = [Fraction(0)] * n
        for c, (j, s) in enumerate(cols):
            if dirn[c]:
                ray[j] += s * dirn[c]
        return LpOutcome("unbounded", ray=tuple(ray), pivots=tab.pivots)

    xs = [Fraction(0)] * ncols
    for i, bv in enumerate(tab.basis):
        if bv < ncols:
            xs[bv] = tab.rhs[i]
    x = list(shift_by_var)
    for c, (j, s) in enumerate(cols):
        if xs[c]:
            x[j] += s * xs[c]
    y = [-d[a] for a in art]
    z = [y[i] * flip[i] for i in range(m)]
    dual = _lift(lp, cols, dbl, irows, z, chat, m)
    value = csign * (d[-1] * -1 + const)
    dual = [csign * v for v in dual]
    return LpOutcome("optimal", x=tuple(x), value=value, dual=tuple(dual),
                     pivots=tab.pivots)


def _lift(lp, cols, dbl, irows, z, chat, m):
    """Map internal row multipliers onto the rows of :func:`full_system`."""
    n = lp.num_vars
    nrow = len(lp.rows)
    out = list(z[:nrow])
    resid = [Fraction(0)] * len(cols)
    for i in range(m):
        if z[i]:
            row = irows[i]
            for c in range(len(cols)):
                if row[c]:
                    resid[c] += z[i] * row[c]
    for c in range(len(cols)):
        resid[c] -= chat[c]
    ub_mult = {j: z[nrow + t] for t, (j, _, _) in enumerate(dbl)}
    col_of = {}
    for c, (j, s) in enumerate(cols):
        col_of.setdefault(j, []).append(c)
    for j in range(n):
        lo, hi = lp.lower_bound(j), lp.upper_bound(j)
        cs = col_of[j]
        if lo is not None:
            out.append(resid[cs[0]])
            if hi is not None:
                out.append(ub_mult[j])
        elif hi is not None:
            out.append(resid[cs[0]])
    return out


def _bound_conflict(lp, j):
    A, b, kinds = full_system(lp)
    y = [Fraction(0)] * len(A)
    # locate the two bound rows of variable j
    idx = len(lp.rows)
    for t in range(lp.num_vars):
        lo, hi = lp.lower_bound(t), lp.upper_bound(t)
        if t == j:
            y[idx] = Fraction(1)
            y[idx + 1] = Fraction(1)
            break
        idx += (lo is not None) + (hi is not None)
    return LpOutcome("infeasible", farkas=tuple(y))
