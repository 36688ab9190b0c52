import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jwclab.ball_geometry import InvalidParameters, basis_vector, gap_power, herm, koranyi_gauge
from jwclab.boundary_analysis import (
    BOUNDED,
    DIVERGENT,
    NonSpecialCurve,
    SuiteConfig,
    default_curves,
    dilation_estimate,
    dilation_sup,
    holder_exponent,
    is_null_point,
    jwc_suite,
    jwc_suite_gamma_half,
    k_boundedness_probe,
    koranyi_slice,
    radial_vanishing,
    restricted_k_limit,
)
from jwclab.curves import special_restricted_curve, tangential_curve
from jwclab.generators import builtin, example_1_2, example_1_3, jacobian

E1, E2 = basis_vector(2, 1), basis_vector(2, 2)
G12 = example_1_2(0.25)
G13 = example_1_3(a=0.1, c=0.05, alpha_prime=0.5)
G13_FLOW = example_1_3(a=0.1, c=0.05, alpha_prime=0.5, convention="F-id")
ZERO = builtin("zero")


def g2_over_gap_power(G, e):
    return lambda Z: G(Z)[..., 1] / gap_power(Z, E1, e)


def test_radial_vanishing():
    assert is_null_point(radial_vanishing(ZERO, E1))
    assert is_null_point(radial_vanishing(G12, E1))
    est = radial_vanishing(builtin("minus_identity"), E1)
    assert est.converged and est.extrapolated.real == pytest.approx(1.0, abs=1e-12)
    assert not is_null_point(est)


@pytest.mark.parametrize("G,beta", [(G12, 1.0), (G13, 0.9), (ZERO, 0.0), (G13_FLOW, -0.9)],
                         ids=["ex12", "ex13", "zero", "ex13_flow"])
def test_dilation_estimate(G, beta):
    est = dilation_estimate(G, E1)
    assert est.converged
    assert est.extrapolated.real == pytest.approx(beta, abs=1e-6)
    assert abs(est.extrapolated.imag) < 1e-12


def test_dilation_flags_non_null_point():
    est = dilation_estimate(builtin("minus_identity"), E1)
    assert any("radial vanishing failed" in n for n in est.notes)


def test_dilation_sup_zero_and_monotone():
    assert dilation_sup(ZERO, E1, 1000) == 0
    vals = [dilation_sup(G12, E1, m) for m in (100, 1000, 10_000)]
    assert all(v <= 1 + 1e-3 for v in vals)
    assert vals[-1] >= vals[0] - 1e-12


@pytest.mark.parametrize("G", [G12, ZERO, G13_FLOW], ids=["ex12", "zero", "ex13_flow"])
def test_dilation_sup_consistent(G):
    beta = dilation_estimate(G, E1).extrapolated.real
    sup = dilation_sup(G, E1, 100_000)
    assert sup <= beta + 1e-3
    assert abs(sup - beta) <= 5e-2


def test_dilation_sup_unbounded_for_id_minus_f():
    # with G = id - F the defect functional is unbounded near the sphere
    sup, z = dilation_sup(G13, E1, 100_000, return_witness=True)
    assert sup > 1e3
    assert np.linalg.norm(z) < 1


def test_koranyi_slice_inside_region():
    for s in (0.5, 2.0**-10, 2.0**-40):
        z = koranyi_slice(E1, s, 2.0)
        assert len(z) == 1 + 8 * 16
        assert np.all(koranyi_gauge(z, E1) < 2)
        assert np.allclose(herm(z, E1), 1 - s, atol=0, rtol=1e-15)


def test_probe_constant_field():
    rep = k_boundedness_probe(lambda Z: np.full(len(Z), 5.0), E1)
    assert rep.verdict == BOUNDED
    assert abs(rep.growth_exponent) < 1e-12


def test_probe_example_fields():
    assert k_boundedness_probe(g2_over_gap_power(G12, 0.25), E1).verdict == BOUNDED
    rep = k_boundedness_probe(g2_over_gap_power(G12, 0.35), E1)
    assert rep.verdict == DIVERGENT
    assert rep.growth_exponent == pytest.approx(0.10, abs=0.02)


@pytest.mark.parametrize("e", [0.3, 0.4, 0.5, 0.6])
def test_probe_exponent_arithmetic(e):
    # |G2| / |z1 - 1|^e grows like (1-t)^(1/2 - alpha - e) on the slice
    rep = k_boundedness_probe(g2_over_gap_power(G12, e), E1)
    assert rep.growth_exponent == pytest.approx(e - 0.25, abs=0.02)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.05, 0.45), st.floats(1e-3, 1e3))
def test_probe_scale_covariance(e, scale):
    f = g2_over_gap_power(G12, e)
    a = k_boundedness_probe(f, E1)
    b = k_boundedness_probe(lambda Z: scale * f(Z), E1)
    assert a.verdict == b.verdict
    assert abs(a.growth_exponent - b.growth_exponent) < 1e-3


def test_probe_non_finite_is_divergent():
    with np.errstate(divide="ignore", invalid="ignore"):
        rep = k_boundedness_probe(lambda Z: 1 / (Z[:, 1] * 0), E1)
    assert rep.verdict == DIVERGENT and rep.witnesses


def test_probe_argument_checks():
    with pytest.raises(InvalidParameters):
        k_boundedness_probe(lambda Z: Z[:, 0], E1, M=1.0)
    with pytest.raises(InvalidParameters):
        k_boundedness_probe(lambda Z: Z[:, 0], E1, depths=4)


def test_restricted_limit_constant():
    res = restricted_k_limit(lambda Z: np.full(len(Z), 2 + 1j), E1, default_curves(E1))
    assert res.consensus == pytest.approx(2 + 1j, abs=1e-12)


def test_restricted_limit_sigma_family():
    curves = [special_restricted_curve(E1, E2, 0.5, r) for r in (1.2, 1.5, 2.0)]
    res = restricted_k_limit(g2_over_gap_power(G12, 0.25), E1, curves, tol=1e-3)
    assert res.verdict == "converged"
    assert abs(res.consensus) < 1e-3


def test_restricted_limit_curve_independence():
    # the probe passes, so every default curve gives the same limit
    assert k_boundedness_probe(g2_over_gap_power(G12, 0.2), E1).bounded
    res = restricted_k_limit(g2_over_gap_power(G12, 0.2), E1, default_curves(E1), tol=1e-3, k_max=30)
    lims = np.array([e.extrapolated for e in res.estimates])
    assert np.max(np.abs(lims - lims[0])) < 1e-3


def test_restricted_limit_diverges_on_thin_curve():
    curve = special_restricted_curve(E1, E2, 0.5, 1.05)
    res = restricted_k_limit(g2_over_gap_power(G12, 0.3), E1, [curve])
    assert res.verdict == "diverges"
    assert res.estimates[0].growth_exponent == pytest.approx(0.025, abs=0.005)


def test_restricted_limit_rejects_tangential_curve():
    with pytest.raises(NonSpecialCurve) as info:
        restricted_k_limit(lambda Z: Z[:, 0], E1, [tangential_curve(E1, E2, 0.5)])
    assert info.value.evidence["verdict"] == "not-special"


def test_item_iii_chain_rule():
    # <dG(p),p> on the radius equals d/dt G1(t e1)
    for t in (0.5, 0.9, 0.99):
        J = jacobian(G12, t * E1)
        assert J[0, 0] == pytest.approx(-1 + 2 * t, abs=1e-8)
        h = 1e-5
        fd = (G12((t + h) * E1)[0] - G12((t - h) * E1)[0]) / (2 * h)
        assert abs(J[0, 0] - fd) < 1e-8


def test_holder_fits():
    assert holder_exponent(G12, E1).alpha_fit == pytest.approx(1.0, abs=0.02)
    rep = holder_exponent(G13, E1)
    assert rep.verdict == "holder: positive"
    assert rep.alpha_fit == pytest.approx(0.5, abs=0.02)
    z = holder_exponent(ZERO, E1)
    assert z.verdict == "holder: exact" and np.isinf(z.alpha_fit)


def test_holder_rejects_curves_with_moving_projection():
    from jwclab.curves import disk_slice_curve

    with pytest.raises(InvalidParameters):
        holder_exponent(G12, E1, [disk_slice_curve(E1, 0.5)])


def test_suite_example_1_2():
    rep = jwc_suite(G12, E1, 0.25)
    assert rep.passed, rep.to_dict()
    assert rep.beta == pytest.approx(1.0, abs=1e-6)


def test_suite_declines_beyond_threshold():
    rep = jwc_suite(G12, E1, 0.4)
    assert not rep.passed
    assert "tangential_quotient_gamma=0.4" in rep.declined


def test_suite_zero_generator():
    rep = jwc_suite(ZERO, E1, 0.3)
    assert rep.passed and rep.beta == 0


def test_suite_gamma_range():
    with pytest.raises(InvalidParameters):
        jwc_suite(G12, E1, 0.5)


def test_suite_half():
    rep = jwc_suite_gamma_half(G13, E1)
    assert rep.passed, rep.declined
    assert rep.beta == pytest.approx(0.9, abs=1e-4)
    assert 0.45 <= rep.holder.alpha_fit <= 0.55
    declined = jwc_suite_gamma_half(G12, E1)
    assert not declined.passed
    assert "tangential_quotient_gamma=0.5" in declined.declined
    assert jwc_suite_gamma_half(ZERO, E1).passed


def test_suite_three_dimensions():
    G = example_1_2(0.25, n=3)
    p = basis_vector(3, 1)
    rep = jwc_suite(G, p, 0.25, SuiteConfig(depths=16))
    assert rep.passed, rep.verdicts()
