from math import pi

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sdforms.ale import (
    ASYMPTOTICALLY_KAHLER,
    FAST_DECAY,
    INDETERMINATE,
    AKFormParams,
    ALEModel,
    ak_form,
    ak_form_eval,
    ak_matrix_batch,
    ak_norm_sq_closed_form,
    decay_classify,
    decay_profile,
    energy_reference_values,
    frame_pairing_mean,
    frame_pairing_poly,
    grad_energy_boundary,
    grad_energy_volume,
    sup_grad,
)
from sdforms.selfdual import d_residual, star_two_form, wedge_norm_sq


def random_points(n, seed=0, lo=0.5, hi=4.0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * rng.uniform(lo, hi, size=(n, 1))


# --------------------------------------------------------------- coordinates

def test_rho_vanishes_on_minimal_sphere():
    model = ALEModel(0.1)
    assert abs(model.rho_of_t(10.0)) <= 1e-14


def test_rho_direct_value():
    assert_allclose(ALEModel(0.1).rho_of_t(100.0), 0.99)


def test_rho_t_roundtrip():
    model = ALEModel(0.1)
    ts = np.geomspace(1e-3, 1e3, 1000)
    back = model.t_of_rho(model.rho_of_t(ts))
    assert np.max(np.abs(back - ts) / ts) <= 1e-12


def test_t_of_rho_stable_on_negative_end():
    # the conjugate rewrite avoids catastrophic cancellation for rho << 0
    model = ALEModel(0.01)
    rho = -1e6
    t = float(model.t_of_rho(rho))
    assert t > 0
    assert_allclose(float(model.rho_of_t(t)), rho, rtol=1e-12)


def test_warp_identity():
    model = ALEModel(0.37)
    ts = np.geomspace(1e-2, 1e2, 1000)
    assert model.warp_identity_residual(ts).max() <= 1e-10


def test_minimal_sphere_area():
    eps = 0.23
    assert_allclose(ALEModel(eps).minimal_sphere_area(), 16 * pi ** 2 * eps ** 3,
                    rtol=1e-14)


def test_metric_eval_flat_degenerate_case():
    # eps = 0 documents the inverted flat metric with factor t^-4
    model = ALEModel(0.0)
    x = np.array([2.0, 0, 0, 0])
    assert_allclose(model.metric_eval(x), (1.0 / 16.0) * np.eye(4))
    with pytest.raises(ValueError):
        model.ricci_closed_form(x)
    with pytest.raises(ValueError):
        model.t_of_rho(1.0)


def test_rho_rejects_nonpositive_t():
    with pytest.raises(ValueError):
        ALEModel(0.1).rho_of_t(0.0)


# --------------------------------------------------------------- curvature

def test_ricci_closed_form_traceless_and_scalar_flat():
    model = ALEModel(0.5)
    for x in random_points(100, seed=1):
        assert abs(model.scalar_curvature(x)) <= 1e-12


def test_ricci_norm_identity():
    model = ALEModel(0.5)
    for x in random_points(100, seed=2):
        t = np.linalg.norm(x)
        rho = float(model.rho_of_t(t))
        expected = 192 * model.epsilon ** 4 / (rho ** 2 + 4 * model.epsilon ** 2) ** 4
        assert_allclose(model.ricci_norm_sq(x), expected, rtol=1e-10)


def test_ricci_numeric_matches_closed_form():
    model = ALEModel(0.5)
    x = np.array([2.0, 0.3, -0.4, 0.1])
    closed = model.ricci_closed_form(x)
    fd = model.ricci_numeric(x, 1e-3)
    rel = np.max(np.abs(closed - fd)) / np.max(np.abs(closed))
    assert rel <= 1e-4


def test_ricci_numeric_convergence_order():
    model = ALEModel(0.4)
    x = np.array([1.5, -0.7, 0.2, 0.9])
    closed = model.ricci_closed_form(x)
    errs = [np.max(np.abs(model.ricci_numeric(x, h) - closed)) for h in (2e-3, 1e-3)]
    order = np.log2(errs[0] / errs[1])
    assert 1.8 <= order <= 2.2


def test_ricci_vanishes_with_epsilon():
    x = np.array([1.3, 0.2, 0.1, -0.5])
    norms = [np.max(np.abs(ALEModel(e).ricci_closed_form(x))) for e in (0.04, 0.02, 0.01)]
    assert norms[0] > norms[1] > norms[2]
    # the eps^2 prefactor dominates once eps^2 << t^-2
    assert_allclose(norms[1] / norms[0], 0.25, rtol=0.01)


def test_ricci_numeric_stencil_guard():
    # the stencil scales with |x|, so it reaches the origin once 2h >= 1
    with pytest.raises(ValueError):
        ALEModel(0.5).ricci_numeric(np.array([1e-3, 0, 0, 0]), 0.6)


# --------------------------------------------------------------- the form

def test_ak_form_is_closed():
    sdf = ak_form(AKFormParams(1.0, 1.0, 0.3))
    x = np.array([0.9, 0.5, -0.2, 0.4])
    r = [d_residual(sdf, x, h) for h in (1e-2, 5e-3)]
    assert 3.5 <= r[0] / r[1] <= 4.5


def test_ak_form_eval_matches_closed_form_norm():
    params = AKFormParams(0.8, -1.2, 0.25)
    pairing_poly = frame_pairing_poly()
    for x in random_points(50, seed=3):
        t = np.linalg.norm(x)
        u = x / t
        _, norm_sq = ak_form_eval(params, x)
        expected = ak_norm_sq_closed_form(params, t, float(pairing_poly(u)))
        assert_allclose(norm_sq, expected, rtol=1e-10, atol=1e-14)


def test_ak_matrix_batch_consistent_with_series():
    params = AKFormParams(0.6, 0.9, 0.2)
    sdf = ak_form(params)
    pts = random_points(20, seed=4)
    batch = ak_matrix_batch(params, pts)
    for k, x in enumerate(pts):
        assert_allclose(batch[k], sdf(x), atol=1e-12)


def test_ak_form_self_dual():
    params = AKFormParams(1.0, 1.0, 0.15)
    for x in random_points(20, seed=5):
        M, _ = ak_form_eval(params, x)
        assert np.max(np.abs(star_two_form(M) - M)) <= 1e-12


def test_pairing_absolute_bound_and_zero_mean():
    # |<eta_2, eta_{-2}>| <= 1 pointwise and the sphere average vanishes
    pairing = frame_pairing_poly()
    pts = random_points(200, seed=6, lo=1.0, hi=1.0)
    vals = pairing(pts)
    assert np.max(np.abs(vals)) <= 1.0 + 1e-12
    assert abs(frame_pairing_mean()) <= 1e-14


# --------------------------------------------------------------- asymptotics

def test_plus_end_norm_approaches_alpha_squared():
    params = AKFormParams(1.0, 0.0, 0.1)
    t = float(params.model.t_of_rho(1000.0))
    norm_sq = float(ak_norm_sq_closed_form(params, t, 0.0))
    assert abs(norm_sq - 1.0) <= 10.0 / 1000.0 ** 2


def test_minus_end_norm_approaches_beta_squared():
    params = AKFormParams(0.0, 1.0, 0.1)
    t = float(params.model.t_of_rho(-1000.0))
    norm_sq = float(ak_norm_sq_closed_form(params, t, 0.0))
    assert abs(norm_sq - 1.0) <= 10.0 / 1000.0 ** 2


def test_three_asymptotic_envelopes():
    # leading coefficients of the three norm contributions at rho = +-1000
    eps = 0.1
    model = ALEModel(eps)
    rho = 1000.0
    tp = float(model.t_of_rho(rho))
    tm = float(model.t_of_rho(-rho))
    fp = eps ** 2 + tp ** -2
    fm = eps ** 2 + tm ** -2
    # alpha^2 piece: 1 - 4 eps^2/rho^2 going out, eps^8 rho^-8 going in
    a_plus = eps ** 8 * fp ** -4
    assert_allclose((1.0 - a_plus) * rho ** 2, 4 * eps ** 2, rtol=0.05)
    a_minus = eps ** 8 * fm ** -4
    assert_allclose(a_minus * rho ** 8, eps ** 8, rtol=0.05)
    # cross piece: 2 eps^4 rho^-4 on both ends (modulo the pairing factor)
    c_plus = 2 * eps ** 4 * tp ** -4 * fp ** -4
    c_minus = 2 * eps ** 4 * tm ** -4 * fm ** -4
    assert_allclose(c_plus * rho ** 4, 2 * eps ** 4, rtol=0.05)
    assert_allclose(c_minus * rho ** 4, 2 * eps ** 4, rtol=0.05)
    # beta^2 piece mirrors the alpha^2 piece
    b_plus = tp ** -8 * fp ** -4
    assert_allclose(b_plus * rho ** 8, eps ** 8, rtol=0.05)


# --------------------------------------------------------------- energy

def test_energy_boundary_vs_volume_oracle():
    params = AKFormParams(1.0, 0.0, 0.1)
    boundary = grad_energy_boundary(params, 50.0)
    volume = grad_energy_volume(params, 50.0)
    assert abs(volume - boundary) / boundary <= 0.01


def test_energy_beta_contributes_symmetrically():
    # the minus end carries the same energy in beta^2 as the plus end in alpha^2
    e_alpha = grad_energy_boundary(AKFormParams(1.0, 0.0, 0.1), 50.0)
    e_beta = grad_energy_boundary(AKFormParams(0.0, 1.0, 0.1), 50.0)
    assert_allclose(e_alpha, e_beta, rtol=1e-12)
    v_beta = grad_energy_volume(AKFormParams(0.0, 1.0, 0.1), 50.0)
    assert abs(v_beta - e_beta) / e_beta <= 0.01


def test_energy_epsilon_square_law():
    eps_seq = [0.4, 0.2, 0.1, 0.05]
    energies = [grad_energy_boundary(AKFormParams(1.0, 0.0, e), 50.0)
                for e in eps_seq]
    slope = np.polyfit(np.log(eps_seq), np.log(energies), 1)[0]
    assert abs(slope - 2.0) <= 0.05
    # doubling epsilon quadruples the energy
    assert_allclose(energies[0] / energies[1], 4.0, rtol=1e-10)


def test_energy_zero_form():
    params = AKFormParams(0.0, 0.0, 0.1)
    assert grad_energy_boundary(params, 50.0) == 0.0


def test_energy_computed_constant_vs_paper_values():
    # the computed limit is 8 pi^2 eps^2 (alpha^2 + beta^2); the report keeps
    # the two printed reference constants alongside for comparison
    params = AKFormParams(1.0, 0.0, 0.1)
    refs = energy_reference_values(params)
    computed = grad_energy_boundary(params, 100.0)
    assert_allclose(computed, refs["computed_expected"], rtol=1e-8)
    assert not np.isclose(computed, refs["reference_area_form"], rtol=0.3)
    assert not np.isclose(computed, refs["reference_prose"], rtol=0.3)


def test_energy_extrapolation_instability_flagged():
    with pytest.raises(ValueError, match="unstable"):
        grad_energy_boundary(AKFormParams(1.0, 1.0, 0.1), 0.02)


# --------------------------------------------------------------- switching

def test_sup_grad_increases_while_energy_decreases():
    eps_seq = [0.4, 0.2, 0.1]
    sups = sup_grad((1.0, 1.0), eps_seq)
    energies = [grad_energy_boundary(AKFormParams(1.0, 1.0, e), 50.0)
                for e in eps_seq]
    assert all(b > a for a, b in zip(sups, sups[1:]))
    assert all(b < a for a, b in zip(energies, energies[1:]))


def test_sup_grad_zero_form():
    assert sup_grad((0.0, 0.0), [0.2, 0.1]) == [0.0, 0.0]


def test_sup_grad_validates_sequence():
    with pytest.raises(ValueError):
        sup_grad((1.0, 1.0), [0.1, 0.2])


# --------------------------------------------------------------- decay

def test_decay_plus_end_kahler():
    report = decay_classify(decay_profile(AKFormParams(1.0, 1.0, 0.1), "plus"))
    assert report.classification == ASYMPTOTICALLY_KAHLER
    assert abs(report.exponent) < 0.1


def test_decay_minus_end_fast_for_beta_zero():
    report = decay_classify(decay_profile(AKFormParams(1.0, 0.0, 0.1), "minus"))
    assert report.classification == FAST_DECAY
    assert abs(report.exponent + 4.0) <= 0.1


def test_decay_synthetic_control_indeterminate():
    rhos = np.geomspace(10, 1000, 30)
    profile = [(float(r), float(r ** -2)) for r in rhos]
    report = decay_classify(profile)
    assert report.classification == INDETERMINATE
    assert_allclose(report.exponent, -2.0, atol=1e-12)


def test_decay_classifier_validation():
    with pytest.raises(ValueError, match="10 samples"):
        decay_classify([(1.0, 1.0)] * 5)
    rhos = np.geomspace(10, 1000, 20)
    profile = [(float(r), 1.0) for r in rhos]
    profile[5], profile[6] = profile[6], profile[5]
    with pytest.raises(ValueError, match="monotone"):
        decay_classify(profile)
    narrow = [(float(r), 1.0) for r in np.linspace(10, 20, 15)]
    with pytest.raises(ValueError, match="decade"):
        decay_classify(narrow)


def test_decay_never_indeterminate_on_generated_forms():
    for alpha, beta in [(1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (0.5, -2.0)]:
        if alpha == 0.0 and beta == 0.0:
            continue
        params = AKFormParams(alpha, beta, 0.1)
        for end in ("plus", "minus"):
            coeff = alpha if end == "plus" else beta
            profile = decay_profile(params, end)
            if all(v > 0 for _, v in profile):
                report = decay_classify(profile)
                assert report.classification != INDETERMINATE
                if coeff != 0.0:
                    assert report.classification == ASYMPTOTICALLY_KAHLER
                else:
                    assert report.classification == FAST_DECAY
