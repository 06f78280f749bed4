import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nevlab.errors import ConfigurationError, DomainError, InvalidProfileError
from nevlab.surface import (CurvatureProfile, ModelSurface, geodesic_radius, inverse_radius_correspondence,
                            radius_correspondence, solve_jacobi)

from conftest import random_profile


# -- curvature profiles ------------------------------------------------------
def test_profile_rejects_positive_curvature():
    with pytest.raises(InvalidProfileError):
        CurvatureProfile.constant(0.5)
    with pytest.raises(InvalidProfileError):
        CurvatureProfile.tabulated([0, 1], [0.1, -1])


def test_profile_rejects_increasing_curvature():
    with pytest.raises(InvalidProfileError):
        CurvatureProfile.tabulated([0, 1, 2], [-1.0, -2.0, -1.5])


def test_profile_rejects_unsorted_radii():
    with pytest.raises(InvalidProfileError):
        CurvatureProfile.tabulated([0, 2, 1], [0.0, -1.0, -2.0])


def test_tabulated_interpolation_is_monotone():
    p = CurvatureProfile.tabulated([0, 1, 3], [0.0, -1.0, -4.0])
    t = np.linspace(0, 3, 301)
    k = p(t)
    assert np.all(np.diff(k) <= 0) and np.all(k <= 0)
    assert p(2.0) == pytest.approx(-2.5)


def test_profile_file_round_trip(tmp_path):
    p = CurvatureProfile.tabulated([0, 0.5, 2], [-0.1, -0.2, -3.0])
    f = tmp_path / "kappa.csv"
    f.write_text(p.to_text())
    q = CurvatureProfile.from_file(f)
    assert np.array_equal(q.radii, p.radii) and np.array_equal(q.kappas, p.kappas)


def test_profile_file_needs_two_columns(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("0 0\n1 -1 7\n")
    with pytest.raises(InvalidProfileError, match="two columns"):
        CurvatureProfile.from_file(f)


# -- Jacobi equation -----------------------------------------------------------
def test_flat_profile_gives_identity():
    sol = solve_jacobi(CurvatureProfile.constant(0.0), 5.0)
    assert np.max(np.abs(sol.values - sol.grid)) < 1e-12


@pytest.mark.parametrize("c, r_max", [(1.0, 5.0), (2.0, 3.0)])
def test_constant_profile_matches_sinh(c, r_max):
    sol = solve_jacobi(CurvatureProfile.constant(-c * c), r_max, 1e-3)
    exact = np.sinh(c * sol.grid) / c
    assert np.max(np.abs(sol.values - exact)) < 1e-6


def test_rk4_error_scales_like_step_squared():
    prof = CurvatureProfile.constant(-1.0)
    errs = []
    for h in (0.1, 0.05):
        sol = solve_jacobi(prof, 3.0, h)
        errs.append(np.max(np.abs(sol.values - np.sinh(sol.grid))))
    # fourth-order scheme, so the ratio is far beyond the O(step^2) requirement
    assert errs[0] / errs[1] > 4.0


def test_jacobi_rejects_bad_configuration():
    with pytest.raises(ConfigurationError):
        solve_jacobi(CurvatureProfile.constant(-1.0), 1.0, 2.0)
    with pytest.raises(ConfigurationError):
        solve_jacobi(CurvatureProfile.constant(-1.0), -1.0)


def test_jacobi_rejects_range_beyond_table():
    p = CurvatureProfile.tabulated([0, 1], [0.0, -1.0])
    with pytest.raises(InvalidProfileError):
        solve_jacobi(p, 2.0)


def test_jacobi_initial_conditions():
    sol = solve_jacobi(CurvatureProfile.tabulated([0, 2, 4], [-0.3, -1, -2]), 4.0)
    assert sol.values[0] == 0.0 and sol.derivatives[0] == 1.0


@given(st.integers(0, 2**32 - 1))
def test_jacobi_bounds_hold_for_random_profiles(seed):
    profile = random_profile(np.random.default_rng(seed))
    sol = solve_jacobi(profile, 5.0, 1e-2)
    report = sol.bound_report()
    assert report["lower"] <= 0 and report["upper"] <= 0 and report["integral"] <= 0


def test_reciprocal_integral_flat_is_log():
    sol = solve_jacobi(CurvatureProfile.constant(0.0), 4.0)
    assert sol.reciprocal_integral(1.0, 3.0) == pytest.approx(math.log(3.0), abs=1e-12)


def test_reciprocal_integral_hyperbolic():
    sol = solve_jacobi(CurvatureProfile.constant(-1.0), 4.0)
    exact = math.log(math.tanh(1.5) / math.tanh(0.5))
    assert sol.reciprocal_integral(1.0, 3.0) == pytest.approx(exact, abs=1e-9)


# -- model surfaces ------------------------------------------------------------
def test_closed_form_surfaces(plane, disc):
    assert plane.conformal_factor(0.3 + 0.1j) == 0.5
    assert disc.conformal_factor(0) == 2.0
    assert disc.conformal_factor(0.5) == pytest.approx(2 / 0.75**2)
    assert plane.J(2.0) == 2.0 and disc.J(2.0) == pytest.approx(math.sinh(2.0))


def test_radial_hyperbolic_profile_reproduces_sinh():
    s = ModelSurface.radial(CurvatureProfile.constant(-1.0), r_max=4.0)
    t = np.linspace(0.1, 4.0, 20)
    assert np.max(np.abs(s.J(t) - np.sinh(t))) < 1e-9


@pytest.mark.parametrize("t", [0.5, 1.5, 3.0, 4.5])
def test_curvature_presentations_agree(cusp_like, t):
    rho = float(cusp_like.conformal_radius(t))
    K = cusp_like.curvature_from_conformal(rho, h=1e-5 * rho)
    assert K == pytest.approx(cusp_like.kappa(t), abs=1e-4)


def test_poincare_curvature_from_conformal_factor(disc):
    assert disc.curvature_from_conformal(0.4, h=1e-4) == pytest.approx(-1.0, abs=1e-6)


def test_conformal_round_trip(cusp_like):
    t = np.linspace(0.05, 5.9, 30)
    assert np.max(np.abs(cusp_like.radius_from_conformal(cusp_like.conformal_radius(t)) - t)) < 1e-9


def test_from_name(disc):
    assert ModelSurface.from_name("poincare_disc").name == disc.name
    with pytest.raises(ConfigurationError):
        ModelSurface.from_name("radial")
    with pytest.raises(ConfigurationError):
        ModelSurface.from_name("sphere")


# -- geodesic radius and the radius correspondence -------------------------------
def test_geodesic_radius_examples(plane, disc):
    assert geodesic_radius(plane, 3 + 4j) == pytest.approx(5.0)
    assert geodesic_radius(disc, 0.5j) == pytest.approx(math.log(3), abs=1e-15)
    assert geodesic_radius(disc, 0) == 0.0


def test_geodesic_radius_outside_disc(disc):
    with pytest.raises(DomainError):
        geodesic_radius(disc, 1.2)


def test_radius_correspondence_examples():
    assert radius_correspondence(0.5) == pytest.approx(math.log(3), abs=1e-15)
    assert inverse_radius_correspondence(math.log(3)) == pytest.approx(0.5, abs=1e-15)
    assert radius_correspondence(1e-8) / 1e-8 == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
def test_radius_correspondence_range(bad):
    with pytest.raises(DomainError):
        radius_correspondence(bad)


def test_inverse_correspondence_range():
    with pytest.raises(DomainError):
        inverse_radius_correspondence(0.0)


@given(st.floats(1e-6, 0.999999))
def test_correspondence_round_trip(rt):
    assert inverse_radius_correspondence(radius_correspondence(rt)) == pytest.approx(rt, abs=1e-14)


@given(st.floats(0.0, 0.999), st.floats(0, 2 * math.pi))
def test_poincare_radius_consistency(rho, theta):
    disc = ModelSurface.poincare()
    z = rho * complex(math.cos(theta), math.sin(theta))
    r = geodesic_radius(disc, z)
    back = inverse_radius_correspondence(r) if r > 0 else 0.0
    assert back == pytest.approx(abs(z), abs=1e-12)
