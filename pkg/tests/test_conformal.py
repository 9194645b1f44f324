"""Twistor rotation, the rescaled-rotated family, and its small-R limit."""

import numpy as np
import pytest

import quiverlim as ql


def test_twistor_moment_identities(a3star):
    # exact for every point, not only on the variety
    p = ql.random_rep(a3star.quiver, a3star.dims, ql.make_rng(60))
    mr, mc = ql.moment_real(p), ql.moment_complex(p)
    for xi in (0.3 - 0.7j, 1.2 + 0.4j, -2.0j):
        q = ql.twistor_rotate(p, xi)
        pred_r = ((1 - abs(xi) ** 2) * mr
                  + (-1j * np.conj(xi)) * mc + (-1j * xi) * mc.dagger())
        pred_c = mc + (-2j * xi) * mr + (-xi ** 2) * mc.dagger()
        assert (ql.moment_real(q) - pred_r).norm() < 1e-12 * max(1.0, pred_r.norm())
        assert (ql.moment_complex(q) - pred_c).norm() < 1e-12 * max(1.0, pred_c.norm())


def test_twistor_zero_is_identity(a3star):
    p = ql.random_rep(a3star.quiver, a3star.dims, ql.make_rng(61))
    assert (ql.twistor_rotate(p, 0.0) - p).norm() == 0.0


def test_twistor_on_variety(tstar, tstar_sample):
    # starting on the variety, the rotated moment values are forced
    p = tstar_sample.point
    sigma = tstar.central.sigma_array()
    zr = ql.zeta_real_lie(sigma, tstar.dims)
    for xi in (0.5, 0.3 + 0.4j, 1.0):
        q = ql.twistor_rotate(p, xi)
        dr = (ql.moment_real(q) - (1 - abs(xi) ** 2) * zr).norm()
        dc = (ql.moment_complex(q) + 2j * xi * zr).norm()
        assert dr < 1e-9
        assert dc < 1e-9


def test_conformal_point_level(tstar):
    # the conformal representative sits on the complex level -2i zeta_R exactly
    p0 = tstar.p0
    A = tstar.slice_point(seed=62)
    sigma = tstar.central.sigma_array()
    zr = ql.zeta_real_lie(sigma, tstar.dims)
    for hbar in (1.0, 0.5, 0.25):
        pA = ql.conformal_point(p0, A, hbar)
        assert (ql.moment_complex(pA) + 2j * zr).norm() < 1e-10


def test_conformal_point_rejects_off_slice_seed(tstar):
    p0 = tstar.p0
    bad = ql.random_rep(tstar.quiver, tstar.dims, ql.make_rng(63), scale=0.3)
    with pytest.raises(ql.NotOnSlice):
        ql.conformal_point(p0, bad, 1.0)


def test_conformal_limit_solves(tstar):
    p0 = tstar.p0
    A = tstar.slice_point(seed=64)
    rep = ql.conformal_limit(p0, A, 1.0)
    assert rep.converged
    assert rep.residual <= 1e-10
    # real moment vanishes, complex moment stays central at -2i zeta_R
    assert ql.moment_real(rep.point).norm() < 1e-9
    sigma = tstar.central.sigma_array()
    zr = ql.zeta_real_lie(sigma, tstar.dims)
    assert (ql.moment_complex(rep.point) + 2j * zr).norm() < 1e-9


def test_family_sample_stages(tstar):
    p0 = tstar.p0
    A = tstar.slice_point(seed=65)
    sigma = tstar.central.sigma_array()
    s = ql.conformal_family_sample(p0, A, sigma, 1.0, 0.1, grading=tstar.grading)
    assert s.R == 0.1
    assert set(s.stage_residuals) == {
        "start_solve", "rotation_real", "rotation_complex",
        "rescale_complex", "final_solve"}
    assert all(r < 1e-7 for r in s.stage_residuals.values())
    assert s.fingerprint.ndim == 1


def test_family_at_unit_rotation_needs_no_final_solve(tstar):
    # at |xi| = 1 the rotation already kills the real moment
    p0 = tstar.p0
    A = tstar.slice_point(seed=66)
    sigma = tstar.central.sigma_array()
    s = ql.conformal_family_sample(p0, A, sigma, 1.0, 1.0, grading=tstar.grading)
    assert s.iterations == 0


def test_rescale_commutes_with_the_limit(tstar):
    # rescaling the slice datum by R equals dividing hbar by R
    p0, grading = tstar.p0, tstar.grading
    A = tstar.slice_point(seed=67)
    hbar, R = 1.0, 0.5
    left = ql.conformal_limit(p0, grading.act(R, A), hbar, grading=grading)
    right = ql.conformal_limit(p0, A, hbar / R, grading=grading)
    assert ql.fingerprint_distance(left.point, right.point, 4) < 1e-8


def test_convergence_slope_quadratic(tstar):
    p0, grading = tstar.p0, tstar.grading
    A = tstar.slice_point(seed=68)
    sigma = tstar.central.sigma_array()
    for hbar in (1.0, 0.5):
        rep = ql.convergence_study(p0, A, sigma, hbar, (0.4, 0.2, 0.1, 0.05),
                                   grading=grading)
        assert not rep.degenerate
        assert 1.75 <= rep.slope <= 2.5
        dists = [row[1] for row in rep.rows]
        assert dists == sorted(dists, reverse=True)


def test_zero_datum_is_degenerate(tstar):
    p0, grading = tstar.p0, tstar.grading
    zero = ql.RepPoint.zeros(tstar.quiver, tstar.dims)
    sigma = tstar.central.sigma_array()
    rep = ql.convergence_study(p0, zero, sigma, 1.0, (0.4, 0.2, 0.1, 0.05),
                               grading=grading)
    assert rep.degenerate
    with pytest.raises(ql.DegenerateFit):
        ql.convergence_study(p0, zero, sigma, 1.0, (0.4, 0.2, 0.1, 0.05),
                             grading=grading, strict=True)


def test_convergence_report_rows(tstar):
    p0, grading = tstar.p0, tstar.grading
    A = tstar.slice_point(seed=69)
    sigma = tstar.central.sigma_array()
    rep = ql.convergence_study(p0, A, sigma, 1.0, (0.2, 0.1), grading=grading)
    assert rep.hbar == 1.0
    rows = rep.to_rows()
    assert len(rows) == 2
    assert rows[0]["R"] == 0.2
    assert rows[0]["distance"] > rows[1]["distance"]
