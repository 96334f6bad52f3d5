import numpy as np
import pytest
from numpy.testing import assert_allclose

from sdforms.evolution import decompose_initial
from sdforms.polys import left_invariant_coframe, right_invariant_coframe
from sdforms.selfdual import (
    SelfDualForm,
    ball_orthogonality,
    d_residual,
    dump_point_samples,
    eval_kahler_basis,
    f_t_inverse,
    f_t_map,
    harmonic_residual,
    kato_ratio,
    l2_shell_orthogonality,
    star_two_form,
    wedge_norm_sq,
)
from sdforms.spectrum import eigen_decompose


@pytest.fixture(scope="module")
def modes_d2():
    return eigen_decompose(2)[0]


def random_points(n, seed=0, lo=0.3, hi=2.5):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * rng.uniform(lo, hi, size=(n, 1))


def minus_two_form(coefficient=1.0):
    """The closed form t^-4 * F^{-1}(t phi^1), pointwise norm t^-4."""
    return SelfDualForm([(coefficient, -2, right_invariant_coframe(1))])


# ----------------------------------------------------------------- 2-form algebra

def test_star_two_form_is_involution():
    rng = np.random.default_rng(1)
    for _ in range(10):
        A = rng.standard_normal((4, 4))
        M = A - A.T
        assert_allclose(star_two_form(star_two_form(M)), M, atol=1e-14)


def test_wedge_norm_on_selfdual_equals_component_sum():
    rng = np.random.default_rng(2)
    for _ in range(10):
        A = rng.standard_normal((4, 4))
        M = A - A.T
        SD = (M + star_two_form(M)) / 2
        comp = sum(SD[a, b] ** 2 for a in range(4) for b in range(a + 1, 4))
        assert_allclose(wedge_norm_sq(SD), comp, atol=1e-12)


# ----------------------------------------------------------------- Kahler basis

def test_kahler_basis_unit_norm_everywhere():
    for x in random_points(100, seed=3):
        for axis in (1, 2, 3):
            assert_allclose(wedge_norm_sq(eval_kahler_basis(axis, x)), 1.0,
                            atol=1e-12)


def test_kahler_basis_value_at_identity():
    M = eval_kahler_basis(1, np.array([1.0, 0, 0, 0]))
    s = 1 / np.sqrt(2)
    assert_allclose(M[0, 1], s, atol=1e-14)
    assert_allclose(M[2, 3], s, atol=1e-14)
    assert_allclose(M + M.T, 0.0, atol=1e-14)


def test_kahler_basis_constant_over_space():
    ref = [eval_kahler_basis(axis, np.array([1.0, 0, 0, 0])) for axis in (1, 2, 3)]
    for x in random_points(50, seed=4):
        for axis in (1, 2, 3):
            assert_allclose(eval_kahler_basis(axis, x), ref[axis - 1], atol=1e-12)


def test_kahler_basis_self_dual():
    for x in random_points(20, seed=5):
        M = eval_kahler_basis(2, x)
        assert_allclose(star_two_form(M), M, atol=1e-13)


def test_kahler_basis_rejects_origin():
    with pytest.raises(ValueError):
        eval_kahler_basis(1, np.zeros(4))


# ----------------------------------------------------------------- F_t maps

def test_f_t_maps_are_mutually_inverse():
    rng = np.random.default_rng(6)
    for x in random_points(20, seed=7):
        xi = rng.standard_normal(4)
        xi -= (xi @ x) * x / (x @ x)  # tangent covector
        M = f_t_inverse(xi, x)
        assert_allclose(f_t_map(M, x), xi, atol=1e-12)
        assert_allclose(f_t_inverse(f_t_map(M, x), x), M, atol=1e-12)


def test_f_t_norm_preserving():
    rng = np.random.default_rng(8)
    for x in random_points(20, seed=9):
        xi = rng.standard_normal(4)
        xi -= (xi @ x) * x / (x @ x)
        M = f_t_inverse(xi, x)
        assert_allclose(wedge_norm_sq(M), xi @ xi, atol=1e-12)


def test_f_t_of_kahler_is_invariant_coframe():
    from sdforms.selfdual import tangent_covector

    for x in random_points(10, seed=10):
        M = eval_kahler_basis(1, x)
        expected = tangent_covector(left_invariant_coframe(1), x)
        assert_allclose(f_t_map(M, x), expected, atol=1e-12)


# ----------------------------------------------------------------- series forms

def test_series_constant_kahler():
    sdf = SelfDualForm.kahler(1)
    for x in random_points(30, seed=11):
        assert_allclose(sdf.norm(x), 1.0, atol=1e-12)
        assert sdf.self_duality_defect(x) <= 1e-12


def test_series_minus_two_norm_decay():
    sdf = minus_two_form()
    for x in random_points(30, seed=12):
        t = np.linalg.norm(x)
        assert_allclose(sdf.norm(x), t ** -4, rtol=1e-10)
        assert sdf.self_duality_defect(x) <= 1e-10 * max(1.0, t ** -4)


def test_series_empty_is_zero():
    sdf = SelfDualForm([])
    assert_allclose(sdf(np.array([0.7, 0.1, -0.3, 0.2])), 0.0)


def test_series_rejects_origin():
    with pytest.raises(ValueError):
        minus_two_form()(np.zeros(4))


def test_series_from_mode_expansion(modes_d2):
    eta0 = left_invariant_coframe(1) + right_invariant_coframe(1)
    exp = decompose_initial(eta0, modes_d2)
    sdf = SelfDualForm.from_expansion(exp)
    # at |x| = 1 the form contracts back to the initial field
    for x in random_points(10, seed=13, lo=1.0, hi=1.0):
        from sdforms.selfdual import tangent_covector

        xi = f_t_map(sdf(x), x)
        assert_allclose(xi, tangent_covector(eta0, x), atol=1e-10)


# ----------------------------------------------------------------- closedness

def test_d_residual_constant_form():
    sdf = SelfDualForm.kahler(1)
    x = np.array([0.9, -0.2, 0.4, 0.1])
    assert d_residual(sdf, x, 1e-3) <= 1e-12


def test_d_residual_minus_two_small():
    sdf = minus_two_form()
    x = np.array([0.5, 0.5, 0.5, 0.5])  # on the unit sphere
    assert d_residual(sdf, x, 1e-3) <= 1e-5


def test_d_residual_second_order(modes_d2):
    # h-halving shrinks the residual ~4x wherever it is above rounding noise
    modes_d3 = eigen_decompose(3)[0]
    lam_m3 = next(m for m in modes_d3 if m.lam_int == -3)
    forms = [
        minus_two_form(),
        SelfDualForm([(0.7, 2, left_invariant_coframe(2)),
                      (1.3, -2, right_invariant_coframe(1))]),
        SelfDualForm([(1.0, -3, lam_m3.field)]),
    ]
    x = np.array([0.8, 0.4, -0.3, 0.9])
    for sdf in forms:
        r = [d_residual(sdf, x, h) for h in (1e-2, 5e-3, 2.5e-3)]
        assert 3.5 <= r[0] / r[1] <= 4.5
        assert 3.5 <= r[1] / r[2] <= 4.5


def test_d_residual_polynomial_modes_exact(modes_d2):
    # positive-eigenvalue modes give polynomial component matrices of degree
    # lambda - 2, for which the central stencil is exact: the residual sits
    # at rounding level for every h instead of decaying like h^2
    lam3 = next(m for m in modes_d2 if m.lam_int == 3)
    sdf = SelfDualForm([(1.0, 3, lam3.field)])
    x = np.array([0.8, 0.4, -0.3, 0.9])
    for h in (1e-2, 5e-3, 2.5e-3):
        assert d_residual(sdf, x, h) <= 1e-12


def test_d_residual_wrong_exponent_detected():
    # negative control: t^(lambda-1) instead of t^(lambda-2) is not closed
    broken = SelfDualForm([(1.0, -1, right_invariant_coframe(1))])
    x = np.array([1.0, 0, 0, 0])
    assert d_residual(broken, x, 1e-3) > 0.1


def test_d_residual_stencil_guard():
    with pytest.raises(ValueError):
        d_residual(minus_two_form(), np.array([1e-3, 0, 0, 0]), 1e-3)


# ----------------------------------------------------------------- harmonicity

def test_harmonic_residual_constant_form():
    x = np.array([0.5, 0.5, -0.5, 0.5])
    assert harmonic_residual(SelfDualForm.kahler(3), x, 1e-3) <= 1e-9


def test_harmonic_residual_minus_two():
    x = np.array([1.0, 0, 0, 0])
    assert harmonic_residual(minus_two_form(), x, 1e-3) <= 1e-3
    # O(h^2): quartering h shrinks the residual ~16x, confirming the
    # residual is pure stencil error around an exactly harmonic form
    r1 = harmonic_residual(minus_two_form(), x, 4e-3)
    r2 = harmonic_residual(minus_two_form(), x, 1e-3)
    assert 12 <= r1 / r2 <= 20


def test_harmonic_residual_negative_control():
    broken = SelfDualForm([(1.0, 0, right_invariant_coframe(1))])
    x = np.array([1.0, 0, 0, 0])
    assert harmonic_residual(broken, x, 1e-3) > 0.5


# ----------------------------------------------------------------- Kato

def test_kato_ratio_bound_on_mixed_form():
    sdf = SelfDualForm([(0.8, 2, left_invariant_coframe(2)),
                        (1.2, -2, right_invariant_coframe(1))])
    for x in random_points(500, seed=14):
        r = kato_ratio(sdf, x, 1e-4)
        if r is not None:
            assert r <= 2.0 / 3.0 + 1e-6


def test_kato_ratio_constant_form_signals_none():
    x = np.array([1.0, 0.2, 0.3, -0.1])
    assert kato_ratio(SelfDualForm.kahler(1), x, 1e-3) is None


def test_kato_ratio_pure_minus_two_saturates():
    # |omega|^(1/2) = t^-2 is harmonic: the sharpened inequality is equality
    sdf = minus_two_form()
    for x in random_points(50, seed=15):
        r = kato_ratio(sdf, x, 1e-5)
        assert r <= 2.0 / 3.0 + 1e-6
        assert r >= 2.0 / 3.0 - 1e-5


def test_kato_ratio_rejects_vanishing_norm():
    # alpha omega^2 - alpha omega^2 == 0 identically
    zero = SelfDualForm([(1.0, 2, left_invariant_coframe(2)),
                         (-1.0, 2, left_invariant_coframe(2))])
    with pytest.raises(ValueError):
        kato_ratio(zero, np.array([1.0, 0, 0, 0]), 1e-3)


# ----------------------------------------------------------------- orthogonality

def test_shell_orthogonality_distinct_lambda(modes_d2):
    by_lam = {}
    for m in modes_d2:
        by_lam.setdefault(m.lam_int, []).append(m)
    pairs = [(by_lam[2][0], by_lam[-2][0]),
             (by_lam[2][0], by_lam[3][0]),
             (by_lam[-2][1], by_lam[4][0])]
    for m1, m2 in pairs:
        for t in (0.5, 1.0, 2.0):
            assert abs(l2_shell_orthogonality(m1, m2, t)) <= 1e-10


def test_shell_self_pairing_positive(modes_d2):
    m = modes_d2[0]
    assert l2_shell_orthogonality(m, m, 1.0) > 0


def test_ball_orthogonality(modes_d2):
    by_lam = {}
    for m in modes_d2:
        by_lam.setdefault(m.lam_int, []).append(m)
    assert abs(ball_orthogonality(by_lam[2][0], by_lam[-2][0], 2.0)) <= 1e-10
    assert abs(ball_orthogonality(by_lam[3][0], by_lam[4][0], 2.0)) <= 1e-10


# ----------------------------------------------------------------- dumps

def test_dump_point_samples(tmp_path):
    path = tmp_path / "samples.csv"
    pts = random_points(5, seed=16)
    text = dump_point_samples(minus_two_form(), pts, str(path))
    lines = path.read_text().strip().split("\n")
    assert lines[0].startswith("x0,x1,x2,x3,omega_01")
    assert len(lines) == 6
    assert text.startswith("x0,")
