import json
import math
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate

from fracbern import closedform
from fracbern.errors import DomainError

GOLDEN = Path(__file__).parent / "golden" / "closed_form_table.json"


def scipy_whole_line(power_log, j):
    f = lambda x: math.log1p(x * x) ** power_log / (1.0 + x * x) ** j
    return integrate.quad(f, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-13, limit=500)[0]


def test_table_is_bitwise_deterministic():
    assert closedform.closed_form_table() == closedform.closed_form_table()


def test_recursion_consistency():
    t = closedform.closed_form_table()
    for n in range(1, 4):
        rhs = (1 - 1 / (2 * n)) * t.I[n - 1] - (2 / n) * (t.F[n - 1] - t.F[n])
        assert t.I[n] == pytest.approx(rhs, abs=1e-14)


def test_decomposition():
    t = closedform.closed_form_table()
    assert t.lemma_value - (t.eq_A102_value - 2 * math.pi) == pytest.approx(0.0, abs=1e-14)


def test_first_entries_from_formulas():
    t = closedform.closed_form_table()
    assert t.I[0] == pytest.approx(math.pi**3 / 3 + 4 * math.pi * math.log(2) ** 2, abs=1e-14)
    assert t.I[0] == pytest.approx(16.372976, abs=1e-6)
    assert t.F[1] == pytest.approx(0.606790, abs=1e-6)
    assert t.F[0] == pytest.approx(math.pi * math.log(4), abs=1e-15)


def test_second_moment_entry_matches_expanded_form():
    t = closedform.closed_form_table()
    l4 = math.log(4)
    expanded = -math.pi + math.pi**3 / 6 + 0.5 * math.pi * (-2 + l4) * l4
    assert t.I[1] == pytest.approx(expanded, abs=1e-13)
    assert t.I[1] == pytest.approx(0.689723, abs=1e-6)


def test_closed_total_rounds_to_two_digits():
    v = closedform.closed_form_table().lemma_value
    assert round(v, 2) == -2.83
    assert v == pytest.approx(-2.8348264764, abs=1e-10)


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_squared_log_integrals_against_scipy(j):
    assert closedform.closed_form_table().I[j - 1] == pytest.approx(scipy_whole_line(2, j), abs=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_log_integrals_against_scipy(n):
    assert closedform.closed_form_table().F[n - 1] == pytest.approx(scipy_whole_line(1, n), abs=1e-10)


def test_combination_against_scipy():
    combo = 12 * scipy_whole_line(2, 2) - 48 * scipy_whole_line(2, 3) + 48 * scipy_whole_line(2, 4)
    assert closedform.combination_value() == pytest.approx(combo, abs=1e-9)


def test_crosscheck_passes():
    rep = closedform.quadrature_crosscheck(1e-8)
    assert rep.passed and rep.max_abs_discrepancy <= 1e-8
    assert len(rep.names) == 9 and rep.names[-1] == "combination"
    assert all(e <= 1e-8 for e in rep.error_estimates)


def test_crosscheck_rejects_tiny_tolerance():
    with pytest.raises(DomainError):
        closedform.quadrature_crosscheck(1e-12)


def test_golden_file():
    golden = json.loads(GOLDEN.read_text())
    current = json.loads(json.dumps(closedform.closed_form_table().to_dict()))
    assert current == golden
