import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jwclab.limits import CONVERGED, DIVERGES, INDETERMINATE, estimate_limit, geometric_ladder, growth_exponent


def ladder():
    return geometric_ladder(4, 40)


def test_ladder_floor():
    ks, s = ladder()
    assert ks[0] == 4 and ks[-1] == 40
    assert s[-1] == 2.0**-40
    with pytest.raises(ValueError):
        geometric_ladder(4, 41)


def test_linear_remainder_is_removed_exactly():
    ks, s = ladder()
    est = estimate_limit(ks, s, 1 - s, tol=1e-6)
    assert est.verdict == CONVERGED
    assert est.extrapolated == pytest.approx(1.0, abs=1e-15)


def test_square_root_remainder():
    ks, s = ladder()
    est = estimate_limit(ks, s, 0.9 + 0.05 * np.sqrt(s), tol=1e-6)
    assert est.verdict == CONVERGED
    assert abs(est.extrapolated - 0.9) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-3, 3), st.floats(0.1, 2.0))
def test_power_remainders_converge(L, A, q):
    ks, s = ladder()
    est = estimate_limit(ks, s, L + A * s**q, tol=1e-6)
    assert est.verdict == CONVERGED
    assert abs(est.extrapolated - L) < 1e-6


def test_slow_power_decay_to_zero():
    ks, s = geometric_ladder(4, 30)
    est = estimate_limit(ks, s, 0.5 * s**0.125, tol=1e-3)
    assert est.verdict == CONVERGED
    assert abs(est.extrapolated) < 1e-9


def test_divergent_power():
    ks, s = ladder()
    est = estimate_limit(ks, s, s**-0.025, tol=1e-6)
    assert est.verdict == DIVERGES
    assert est.growth_exponent == pytest.approx(0.025, abs=1e-6)


def test_logarithmic_growth_diverges():
    ks, s = ladder()
    est = estimate_limit(ks, s, np.log(1 / s), tol=1e-6)
    assert est.verdict == DIVERGES


def test_oscillation_is_indeterminate():
    ks, s = ladder()
    est = estimate_limit(ks, s, np.sin(np.log(s)), tol=1e-6)
    assert est.verdict != CONVERGED


def test_round_off_noise_near_floor():
    ks, s = ladder()
    rng = np.random.default_rng(0)
    v = 1 - 2 * s + 4e-16 / s * rng.standard_normal(s.size)
    est = estimate_limit(ks, s, v, tol=1e-6)
    assert est.verdict == CONVERGED
    assert abs(est.extrapolated - 1) < 1e-8


def test_non_finite_values():
    ks, s = ladder()
    with np.errstate(divide="ignore"):
        v = 1 / (s - s[10])
    est = estimate_limit(ks, s, v, tol=1e-6)
    assert est.verdict == DIVERGES
    assert "non-finite" in est.notes[0]


def test_table_and_dict():
    ks, s = geometric_ladder(4, 8)
    est = estimate_limit(ks, s, 2 + s, tol=1e-3)
    rows = est.table()
    assert [r["k"] for r in rows] == [4, 5, 6, 7, 8]
    assert rows[0]["1-t"] == 2.0**-4
    assert set(rows[0]) == {"k", "1-t", "value_re", "value_im", "abs"}
    assert est.to_dict()["verdict"] in (CONVERGED, INDETERMINATE)


def test_growth_exponent_slope():
    s = 2.0 ** -np.arange(10, 30)
    assert growth_exponent(s, s**-0.3) == pytest.approx(0.3, abs=1e-12)
    assert growth_exponent(s, 5 * s**0) == pytest.approx(0.0, abs=1e-12)
    # scale-free
    assert growth_exponent(s, 2 * s**0.2) == pytest.approx(growth_exponent(s, s**0.2), abs=1e-12)
