import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from nevlab.errors import ConfigurationError, DomainError, IntegrabilityError, PoleError
from nevlab.green import (GreenKernel, atsuji_bound_audit, atsuji_envelope, green_value,
                          harmonic_expectation, kernel_table, radial_green_consistency)
from nevlab.surface import CurvatureProfile, ModelSurface, solve_jacobi


def test_euclidean_closed_form(plane):
    k = GreenKernel.for_surface(plane, 2.0)
    assert green_value(k, 1.0) == pytest.approx(math.log(2) / math.pi, abs=1e-15)
    assert green_value(k, 1j) == pytest.approx(0.2206356, abs=1e-7)


def test_poincare_closed_form(disc):
    k = GreenKernel.for_surface(disc, 2.0)
    e = math.e
    expected = math.log((e**2 - 1) * (e + 1) / ((e**2 + 1) * (e - 1))) / math.pi
    assert float(k.at_radius(1.0)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("name", ["euclidean_plane", "poincare_disc"])
def test_dirichlet_boundary(name):
    s = ModelSurface.from_name(name)
    for form in (None, "radial_numeric"):
        k = GreenKernel.for_surface(s, 1.5, form=form)
        assert float(k.at_radius(1.5)) == 0.0


def test_errors(plane, disc):
    k = GreenKernel.for_surface(plane, 2.0)
    with pytest.raises(PoleError):
        green_value(k, 0)
    with pytest.raises(DomainError):
        green_value(k, 3.0)
    with pytest.raises(ConfigurationError):
        GreenKernel(plane, 1.0, "closed_poincare")
    with pytest.raises(ConfigurationError):
        GreenKernel(disc, 1.0, "nonsense")


@pytest.mark.parametrize("name, r", [("euclidean_plane", 3.0), ("poincare_disc", 3.0),
                                     ("euclidean_plane", 1.0), ("poincare_disc", 1.0)])
def test_radial_quadrature_matches_closed_forms(name, r):
    s = ModelSurface.from_name(name)
    grid = np.linspace(r / 100, r, 100)
    assert radial_green_consistency(s, r, grid) < 1e-6


def test_consistency_on_boundary_only(plane):
    assert radial_green_consistency(plane, 1.0, [1.0]) == 0.0


def test_consistency_needs_closed_form(cusp_like):
    with pytest.raises(ConfigurationError):
        radial_green_consistency(cusp_like, 1.0, [0.5])


@pytest.mark.parametrize("surf", ["plane", "disc", "cusp_like"])
def test_kernel_positive_and_decreasing(surf, request):
    s = request.getfixturevalue(surf)
    k = GreenKernel.for_surface(s, 3.0)
    v = k.at_radius(np.linspace(1e-3, 3.0, 400)[:-1])
    assert np.all(v > 0) and np.all(np.diff(v) < 0)


@pytest.mark.parametrize("surf", ["plane", "disc", "cusp_like"])
def test_logarithmic_pole_normalization(surf, request):
    s = request.getfixturevalue(surf)
    k = GreenKernel.for_surface(s, 2.0)
    t = np.geomspace(1e-9, 1e-3, 7)
    reg = k.at_radius(t) + np.log(t) / math.pi
    assert np.ptp(reg) < 1e-5


@pytest.mark.parametrize("surf", ["plane", "disc", "cusp_like"])
def test_distributional_normalization(surf, request):
    """A radial bump phi with phi(o)=1 integrates to -1 against g (Delta phi / 2) dV."""
    s = request.getfixturevalue(surf)
    r = 1.5
    k = GreenKernel.for_surface(s, r)
    phi = lambda t: (1 - (t / r) ** 2) ** 3
    d1 = lambda t: -6 * t / r**2 * (1 - (t / r) ** 2) ** 2
    d2 = lambda t: -6 / r**2 * (1 - (t / r) ** 2) ** 2 + 24 * t**2 / r**4 * (1 - (t / r) ** 2)
    h = 1e-6
    dJ = lambda t: (s.J(t + h) - s.J(t - h)) / (2 * h)
    lap = lambda t: d2(t) + dJ(t) / s.J(t) * d1(t)
    f = lambda t: float(k.at_radius(t)) * 0.5 * lap(t) * 2 * math.pi * float(s.J(t))
    val, _ = integrate.quad(f, 1e-9, r, limit=200, epsabs=1e-10)
    assert val == pytest.approx(-phi(0.0), abs=1e-6)


@given(st.floats(0.01, 0.95), st.floats(0, 2 * math.pi))
def test_angular_symmetry(rho, theta):
    disc = ModelSurface.poincare()
    k = GreenKernel.for_surface(disc, 4.0)
    # equal up to rounding in |z|
    assert green_value(k, rho * complex(math.cos(theta), math.sin(theta))) == pytest.approx(
        green_value(k, rho), rel=1e-13)


# -- Atsuji lower bound ------------------------------------------------------------
def test_atsuji_euclidean_constant(plane):
    jac = solve_jacobi(CurvatureProfile.constant(0.0), 5.0)
    for r in (2.0, 5.0):
        k = GreenKernel.for_surface(plane, r)
        c = atsuji_bound_audit(jac, k, 1.0, np.linspace(1.1, r - 0.1, 30))
        assert c == pytest.approx(math.log(r) / math.pi, rel=1e-9)


def test_atsuji_poincare_positive(disc):
    jac = solve_jacobi(CurvatureProfile.constant(-1.0), 3.0)
    k = GreenKernel.for_surface(disc, 3.0)
    assert atsuji_bound_audit(jac, k, 1.0, [2.0]) > 0


def test_atsuji_envelope_bounded_below(disc):
    assert atsuji_envelope(disc, 1.0, [2.0, 4.0, 8.0]) > 0.1


def test_atsuji_errors(plane):
    jac = solve_jacobi(CurvatureProfile.constant(0.0), 3.0)
    k = GreenKernel.for_surface(plane, 3.0)
    with pytest.raises(ConfigurationError):
        atsuji_bound_audit(jac, k, 1.0, [])
    with pytest.raises(ConfigurationError):
        atsuji_bound_audit(jac, k, 1.0, [3.0])
    with pytest.raises(ConfigurationError):
        atsuji_bound_audit(jac, k, 4.0, [2.0])


# -- harmonic measure at the centre ---------------------------------------------------
def test_harmonic_expectation_constant(plane):
    assert harmonic_expectation(plane, 1.0, lambda th: 3.5) == pytest.approx(3.5, abs=1e-12)


def test_harmonic_expectation_exp(plane):
    r = 2.5
    val = harmonic_expectation(plane, r, lambda th: max(r * math.cos(th), 0.0),
                               singular_angles=(math.pi / 2, 3 * math.pi / 2))
    assert val == pytest.approx(r / math.pi, abs=1e-10)


def test_harmonic_expectation_log_singularity(plane):
    val = harmonic_expectation(plane, 1.0, lambda th: math.log(abs(2 * math.sin(th / 2))),
                               singular_angles=(0.0,))
    assert abs(val) < 1e-8


def test_harmonic_expectation_rotation_invariant(disc):
    psi = lambda th: math.exp(math.cos(th)) + math.sin(3 * th) ** 2
    base = harmonic_expectation(disc, 1.0, psi)
    rotated = harmonic_expectation(disc, 1.0, lambda th: psi(th + 0.7))
    assert rotated == pytest.approx(base, abs=1e-10)


def test_harmonic_expectation_non_integrable(plane):
    with pytest.raises(IntegrabilityError):
        harmonic_expectation(plane, 1.0, lambda th: 1.0 / abs(math.sin(th / 2)) if th else 1e300,
                             singular_angles=(0.0,))


def test_kernel_table(plane):
    text = kernel_table(GreenKernel.for_surface(plane, 2.0), [0.5, 2.0])
    lines = text.splitlines()
    assert lines[0] == "r_x,g" and lines[2] == "2.0,0.0"
    assert float(lines[1].split(",")[1]) == pytest.approx(math.log(4) / math.pi)
