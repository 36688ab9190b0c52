import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jwclab.ball_geometry import DimensionError, InvalidParameters, basis_vector, koranyi_gauge
from jwclab.generators import (
    AdmissibleParams13,
    builtin,
    disk_grid_check,
    eqdue_defect,
    example_1_2,
    example_1_3,
    from_callable,
    generator_condition_check,
    jacobian,
    jacobian_batch,
)
from jwclab.sampling import boundary_biased, sobol_ball

E1 = basis_vector(2, 1)


def test_example_1_2_values():
    G = example_1_2(0.25)
    assert np.all(G(np.zeros(2)) == 0)
    v = G(np.array([0.9, 0.1]))
    assert v[0] == pytest.approx(-0.09, abs=1e-15)
    assert v[1] == pytest.approx(-0.1 * 0.1**-0.25, abs=1e-15)
    assert v[1] == pytest.approx(-0.17783, abs=1e-5)


def test_example_1_2_radial_quotient_is_t():
    G = example_1_2(0.25)
    t = 1 - 2.0 ** -np.arange(1, 41)
    q = G(t[:, None] * E1)[:, 0] / (t - 1)
    assert np.allclose(q, t, rtol=1e-14)


def test_example_1_2_higher_dimension_replicates():
    G = example_1_2(0.3, n=4)
    z = np.array([0.5, 0.1, 0.2j, -0.1])
    out = G(z)
    assert np.allclose(out[1:], -z[1:] * 0.5**-0.3)


@pytest.mark.parametrize("alpha", [0.0, 0.5, -0.1, 0.7])
def test_example_1_2_alpha_range(alpha):
    with pytest.raises(InvalidParameters):
        example_1_2(alpha)


def test_dimension_check():
    with pytest.raises(DimensionError):
        example_1_2(0.25)(np.zeros(3))


def test_admissible_constants_half():
    eps, C, D = AdmissibleParams13.constants(0.5)
    assert eps == pytest.approx(np.sqrt(2) / 2, abs=1e-15)
    assert C == pytest.approx(np.sqrt(3), abs=1e-14)
    assert D == pytest.approx(2.0, abs=1e-14)
    a_max, c_max = AdmissibleParams13.bounds(0.1, 0.5)
    assert a_max == pytest.approx(0.2, abs=1e-14)
    assert c_max == pytest.approx(0.1, abs=1e-14)


def test_admissible_rejections_name_bound():
    with pytest.raises(InvalidParameters, match="a < 0.2"):
        AdmissibleParams13(0.3, 0.05, 0.5)
    with pytest.raises(InvalidParameters, match="c=0.2"):
        AdmissibleParams13(0.1, 0.2, 0.5)
    with pytest.raises(InvalidParameters):
        AdmissibleParams13(0.1, 0.05, 1.0)


def test_example_1_3_radial_quotient():
    G = example_1_3(a=0.1, c=0.05, alpha_prime=0.5)
    s = 2.0 ** -np.arange(1, 41)
    t = 1 - s
    q = G(t[:, None] * E1)[:, 0] / (-s)
    assert np.allclose(q, 0.9 + 0.05 * np.sqrt(s), rtol=1e-14)


def test_example_1_3_conventions_are_opposite():
    G = example_1_3(a=0.1, c=0.05, alpha_prime=0.5)
    H = example_1_3(a=0.1, c=0.05, alpha_prime=0.5, convention="F-id")
    z = np.array([0.3 + 0.2j, 0.1])
    assert np.allclose(G(z), -H(z))
    # G = id - F
    assert np.allclose(G(z), z - G.self_map(z))


def test_example_1_3_self_map_on_grid():
    ok, margin = disk_grid_check(0.1, 0.05, 0.5)
    assert ok and margin < 0
    G = example_1_3(a=0.1, c=0.05, alpha_prime=0.5)
    z = sobol_ball(2, 4096, seed=3)
    assert np.all(np.abs(G.self_map(z)[:, 0]) < 1)


def test_grid_check_detects_bad_parameters():
    # c too large, or a past 1, pushes f out of the disk near zeta = 1
    assert not disk_grid_check(0.1, 0.3, 0.5)[0]
    assert not disk_grid_check(1.5, 0.1, 0.5)[0]


def test_stated_bounds_admit_a_non_self_map():
    # inside the stated bounds yet |f| > 1 somewhere near zeta = 1
    assert not AdmissibleParams13.violations(0.05, 0.049, 0.5)
    assert AdmissibleParams13.chain_violations(0.05, 0.049, 0.5)
    assert not disk_grid_check(0.05, 0.049, 0.5)[0]


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_chain_conditions_imply_self_map(ap, ua, uc):
    # whenever the term-by-term estimate applies, the grid check passes
    eps, _, D = AdmissibleParams13.constants(ap)
    a = ua / (1 + 2 * eps * D ** (1 + ap))
    c = uc * min(2 ** (1 - ap) * eps * a, (a - a * a) / (2**ap * D ** (1 + ap)))
    assert not AdmissibleParams13.chain_violations(a, c, ap)
    assert disk_grid_check(a, c, ap)[0]


def test_builtins():
    z = np.array([0.3, 0.4j])
    assert np.all(builtin("zero")(z) == 0)
    assert np.array_equal(builtin("minus_identity")(z), -z)
    assert builtin("logistic_1d")(np.array([0.5]))[0] == -0.25
    A = np.array([[0, 1], [-1, 0]])
    assert np.array_equal(builtin("linear", A=A)(z), A @ z)
    with pytest.raises(InvalidParameters):
        builtin("nope")


def test_from_callable():
    G = from_callable(lambda z: -2 * z, 2)
    assert np.array_equal(G(np.array([0.1, 0.2])), [-0.2, -0.4])


def test_condition_check():
    assert generator_condition_check(builtin("zero"), 256).worst_value == 0
    rep = generator_condition_check(example_1_2(0.25), 100_000, tol=1e-12)
    assert rep.passed and rep.violations == 0
    plus = from_callable(lambda z: z, 2, "plus_identity")
    rep = generator_condition_check(plus, 256)
    assert not rep.passed
    assert rep.worst_value == pytest.approx(np.linalg.norm(rep.worst_point) ** 2, rel=1e-12)


def test_condition_check_example_1_3_origin():
    # F does not fix the origin, so G = id - F does not vanish there
    rep = generator_condition_check(example_1_3(a=0.1, c=0.05, alpha_prime=0.5), 256)
    assert rep.origin_norm == pytest.approx(0.95, abs=1e-12)
    assert not rep.passed


def test_eqdue_defect_zero_and_radius():
    assert np.all(eqdue_defect(builtin("zero"), E1, sobol_ball(2, 64)) == 0)
    G = example_1_2(0.25)
    t = 0.7
    g = G(t * E1)
    direct = (np.vdot(t * E1, g) / (1 - t * t) - g[0] / (1 - t)).real
    assert eqdue_defect(G, E1, t * E1) == pytest.approx(direct, rel=1e-14)


def test_eqdue_sup_near_half():
    G = example_1_2(0.25)
    z = np.vstack([sobol_ball(2, 50_000, 1), boundary_biased(2, 50_000, 2)])
    sup = float(np.max(eqdue_defect(G, E1, z)))
    assert 0.45 < sup <= 0.5 + 1e-9


def test_jacobian_linear_exact():
    A = np.array([[0.1, 0.2j], [-0.3, 0.4 + 0.1j]])
    G = builtin("linear", A=A)
    assert np.allclose(jacobian(G, np.array([0.5, 0.2j])), A, atol=1e-12)


def test_jacobian_entry_example_1_2():
    J = jacobian(example_1_2(0.25), np.array([0.5, 0.1]))
    assert abs(J[0, 0]) < 1e-12


@pytest.mark.parametrize("G", [example_1_2(0.25), example_1_2(0.1, n=3),
                               example_1_3(a=0.1, c=0.05, alpha_prime=0.5)], ids=lambda g: g.label)
def test_jacobian_matches_analytic(G):
    Z = sobol_ball(G.dim, 100, seed=11)
    err = max(np.max(np.abs(jacobian(G, z) - G.analytic_jacobian(z))) for z in Z)
    assert err < 1e-10
    Jb = jacobian_batch(G, Z)
    assert np.max(np.abs(Jb - G.analytic_jacobian(Z))) < 1e-10


def test_jacobian_koranyi_mode():
    G = example_1_2(0.25)
    z = np.array([0.95, 0.1 + 0.05j])
    assert koranyi_gauge(z, E1) < 2
    J = jacobian(G, z, mode="koranyi", p=E1)
    assert np.max(np.abs(J - G.analytic_jacobian(z))) < 1e-10


def test_jacobian_circle_halving_near_sphere():
    G = example_1_2(0.25)
    z = np.array([0.999, 0.0])
    J = jacobian(G, z, radius=0.5)
    assert np.max(np.abs(J - G.analytic_jacobian(z))) < 1e-8


def test_jacobian_bad_nodes():
    with pytest.raises(ValueError):
        jacobian(example_1_2(0.25), np.zeros(2), nodes=8)


def test_branch_continuity_along_paths():
    # Re(1 - z1) > 0 in the ball, so powers of 1 - z1 never jump
    G = example_1_2(0.25)
    th = np.linspace(0, 2 * np.pi, 20001)
    z = np.stack([0.999 * np.exp(1j * th), np.full_like(th, 0.01)], axis=1)
    vals = G(z)[:, 1]
    assert np.max(np.abs(np.diff(vals))) < 1e-2
