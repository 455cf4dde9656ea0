import csv
import io
from fractions import Fraction

from streamcsp import separability
from streamcsp.analysis import (CSV_HEADER, TWO_AND, curves_csv, mu_grid, ratio_curve,
                                two_and_beta, two_and_curves, two_and_gamma, two_and_row)
from streamcsp.core import TruthTable


def test_row_examples():
    assert two_and_beta(Fraction(1, 3)) == Fraction(1, 3)
    assert two_and_gamma(0) == Fraction(1, 2) and two_and_beta(0) == Fraction(1, 4)
    assert two_and_gamma(1) == 1 and two_and_beta(1) == 1


def test_closed_form_matches_oracle_on_coarse_grid():
    for mu in mu_grid(Fraction(1, 10)):
        row = two_and_row(mu)
        assert abs(row.beta_of_mu - row.oracle_beta) <= Fraction(2, 10**9)


def test_csv_schema_and_monotone_gamma():
    rows = two_and_curves(Fraction(1, 20), oracle=False)
    text = curves_csv(rows)
    parsed = list(csv.reader(io.StringIO(text)))
    assert tuple(parsed[0]) == CSV_HEADER
    assert len(parsed) == 22
    gammas = [float(r[1]) for r in parsed[1:]]
    assert gammas == sorted(gammas)
    assert all(r[4] == "" for r in parsed[1:])
    # 12 significant digits
    third = [r for r in parsed[1:] if r[0] == "0.35"][0]
    assert third[2] == f"{float(two_and_beta(Fraction(7, 20))):.12g}"


def test_ratio_curve_examples():
    (b, a), = ratio_curve(TWO_AND, [Fraction(4, 15)])
    assert a == Fraction(4, 9)
    near_one = ratio_curve(TWO_AND, [Fraction(99, 100)])[0][1]
    assert near_one > Fraction(98, 100)
    ones = TruthTable.from_bits("1111")
    assert all(a == 1 for _, a in ratio_curve(ones, [Fraction(1, 4), Fraction(1, 2)]))


def test_mu_grid_endpoints():
    g = mu_grid(Fraction(3, 10))
    assert g[0] == 0 and g[-1] == 1


def test_negative_marginals_follow_signed_formula():
    # at marginals (mu, mu) with mu < 0 the best 2AND value is (1 + mu)/2, not (1 + |mu|)/2
    for mu in (Fraction(-1, 2), Fraction(-1, 5)):
        assert separability.max_gamma_at_marginals(TWO_AND, (mu, mu)) == (1 + mu) / 2
        assert separability.max_gamma_at_marginals(TWO_AND, (mu, mu)) < two_and_gamma(mu)
