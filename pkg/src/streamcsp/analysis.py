"""Max-2AND threshold curves and approximation-ratio sweeps."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, TextIO

from . import separability
from .core import TruthTable

TWO_AND = TruthTable.from_bits("0001")
CSV_HEADER = ("mu", "gamma", "beta", "ratio", "oracle_beta")


def two_and_gamma(mu) -> Fraction:
    return (1 + abs(Fraction(mu))) / 2


def two_and_beta(mu) -> Fraction:
    m = abs(Fraction(mu))
    if m >= Fraction(1, 3):
        return m
    return (1 - m) ** 2 / (4 * (1 - 2 * m))


@dataclass(frozen=True)
class CurveRow:
    mu: Fraction
    gamma_of_mu: Fraction
    beta_of_mu: Fraction
    ratio: Fraction
    oracle_beta: Fraction | None = None


def mu_grid(step) -> list[Fraction]:
    step = Fraction(step)
    if step <= 0:
        raise ValueError("grid step must be positive")
    out, i = [], 0
    while i * step <= 1:
        out.append(i * step)
        i += 1
    if out[-1] != 1:
        out.append(Fraction(1))
    return out


def two_and_row(mu, oracle: bool = True, tol=separability.DEFAULT_TOL) -> CurveRow:
    mu = Fraction(mu)
    g, b = two_and_gamma(mu), two_and_beta(mu)
    ob = separability.min_beta_at_marginals(TWO_AND, (mu, mu), tol) if oracle else None
    return CurveRow(mu, g, b, b / g, ob)


def two_and_curves(grid_step=Fraction(1, 100), oracle: bool = True) -> list[CurveRow]:
    """Closed-form rows for symmetric marginals ``(mu, mu)``, ``mu`` in [0, 1]."""
    return [two_and_row(m, oracle) for m in mu_grid(grid_step)]


def ratio_curve(f: TruthTable, beta_grid: Iterable, tol=separability.DEFAULT_TOL
                ) -> list[tuple[Fraction, Fraction]]:
    return [(Fraction(b), separability.ratio_at(f, b, tol)) for b in beta_grid]


def _fmt(x) -> str:
    return "" if x is None else f"{float(x):.12g}"


def write_curves_csv(rows: Iterable[CurveRow], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(r.mu), _fmt(r.gamma_of_mu), _fmt(r.beta_of_mu), _fmt(r.ratio),
                    _fmt(r.oracle_beta)])


def write_ratio_csv(rows: Iterable[tuple], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("beta", "alpha"))
    for b, a in rows:
        w.writerow([_fmt(b), _fmt(a)])


def curves_csv(rows: Iterable[CurveRow]) -> str:
    buf = io.StringIO()
    write_curves_csv(rows, buf)
    return buf.getvalue()
