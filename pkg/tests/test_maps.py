import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nevlab.errors import ConfigurationError, DegenerateInputError, RootFindingError
from nevlab.maps import (INF, Divisor, MeromorphicMap, base_shift, catalog_listing, catalog_map,
                         chordal_distance, cluster_roots, polynomial_roots, quadtree_zeros,
                         winding_count)

CATALOG = [name for name, _ in catalog_listing()]


def fd(f, z, h=1e-4):
    """Fourth-order central difference."""
    return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h)


def test_catalog_listing():
    assert CATALOG == ["exp", "identity", "mobius", "rational3", "square", "z2m1"]
    with pytest.raises(ConfigurationError):
        catalog_map("sinh")
    with pytest.raises(ConfigurationError):
        catalog_map("exp", a=2)
    with pytest.raises(ConfigurationError):
        catalog_map("mobius", a=1.5)


def test_evaluation():
    assert catalog_map("exp")(1.0) == pytest.approx(math.e)
    assert catalog_map("rational3")(1.0) == 0
    assert abs(catalog_map("rational3")(1j * math.sqrt(2))) > 1e12
    assert cmath.isinf(MeromorphicMap.rational([1], [0, 1])(0))
    m = catalog_map("mobius", a=0.3)
    assert abs(m(0.7 * cmath.exp(0.4j))) < 1
    assert abs(abs(m(cmath.exp(1.1j))) - 1) < 1e-14


def test_common_factors_cancel():
    psi = MeromorphicMap.rational([-1, 0, 1], [-1, 1])
    assert psi.degree == 1
    assert psi(3.0) == pytest.approx(4.0)


def test_invalid_maps():
    with pytest.raises(ConfigurationError):
        MeromorphicMap.rational([1, 1], [0])
    with pytest.raises(ConfigurationError):
        MeromorphicMap.exp_composite(alpha=0)


def test_root_clustering():
    assert polynomial_roots([1, -2, 1]) == [(pytest.approx(1.0), 2)]
    roots = polynomial_roots([0, 0, -1, 0, 1])
    assert roots[0] == (0j, 2) and sorted(m for _, m in roots) == [1, 1, 2]
    assert cluster_roots([1.0, 1.0 + 1e-6, 2.0]) == [(pytest.approx(1.0), 2), (2.0, 1)]


@pytest.mark.parametrize("name", CATALOG)
@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivatives_match_finite_differences(name, order):
    psi = catalog_map(name)
    d = psi.derivative(order)
    lower = psi.derivative(order - 1)
    for z in (0.3 + 0.4j, -0.7 + 0.2j, 1.1 - 0.5j):
        assert d(z) == pytest.approx(fd(lower, z), rel=1e-7, abs=1e-8)


def test_derivative_pole_orders():
    m = catalog_map("mobius")
    assert m.derivative(3).pole_hint == ((pytest.approx(2.0), 4),)
    assert catalog_map("identity").derivative(2).is_constant
    with pytest.raises(ConfigurationError):
        m.derivative(-1)


@pytest.mark.parametrize("name", CATALOG)
@pytest.mark.parametrize("order", [1, 2])
def test_log_derivative_ratio(name, order):
    psi = catalog_map(name)
    h = psi.log_derivative_ratio(order)
    for z in (0.3 + 0.4j, -1.3 + 0.2j, 2.1 - 0.5j):
        assert h(z) == pytest.approx(psi.derivative(order)(z) / psi(z), rel=1e-10)


def test_log_derivative_ratio_poles():
    h = catalog_map("mobius").log_derivative_ratio(2)
    poles = h.poles(5.0)
    assert [m for _, m in poles] == [1, 2]
    assert poles[0][0] == pytest.approx(0.5) and poles[1][0] == pytest.approx(2.0)
    # z^2: psi'/psi = 2/z, psi''/psi = 2/z^2
    sq = catalog_map("square")
    assert sq.log_derivative_ratio(2)(0.5) == pytest.approx(8.0)
    with pytest.raises(DegenerateInputError):
        MeromorphicMap.rational([3.0]).log_derivative_ratio(1)


def test_quotient():
    psi = catalog_map("z2m1")
    q = psi.derivative(1).quotient(psi)
    assert q(0.5 + 0.5j) == pytest.approx(psi.derivative(1)(0.5 + 0.5j) / psi(0.5 + 0.5j))
    with pytest.raises(ConfigurationError):
        psi.quotient(catalog_map("exp"))


# -- preimages -----------------------------------------------------------------------
def test_rational_preimages():
    pts = catalog_map("z2m1").zeros(2.0)
    assert sorted(round(z.real, 12) for z, _ in pts) == [-1.0, 1.0]
    assert catalog_map("square").preimages(0, 1.0) == [(0j, 2)]
    assert [m for _, m in catalog_map("rational3").poles(3.0)] == [1, 1]


def test_exp_lattice_preimages():
    psi = catalog_map("exp")
    assert psi.zeros(50.0) == []
    ones = psi.preimages(1, 20.0)
    assert len(ones) == 7 and all(abs(z.real) < 1e-15 for z, _ in ones)
    twos = psi.preimages(2, 10.0)
    assert all(abs(cmath.exp(z) - 2) < 1e-12 for z, _ in twos)
    assert psi.poles(10.0) == []


def test_shifted_map():
    psi = catalog_map("identity").shifted(0.5 + 0.25j)
    assert psi(0) == 0.5 + 0.25j
    assert psi.zeros(2.0)[0][0] == pytest.approx(-0.5 - 0.25j)


def test_preimage_of_constant_value():
    with pytest.raises(DegenerateInputError):
        MeromorphicMap.rational([2.0]).preimages(2.0, 1.0)


def test_winding_count_and_quadtree():
    h = lambda z: (z - 0.3) ** 2 * (z + 0.5j)
    dh = lambda z: 2 * (z - 0.3) * (z + 0.5j) + (z - 0.3) ** 2
    assert winding_count(h, 1.0) == 3
    zs = quadtree_zeros(h, dh, 0j, 1.0)
    assert [m for _, m in zs] == [2, 1]
    assert zs[0][0] == pytest.approx(0.3, abs=1e-6) and zs[1][0] == pytest.approx(-0.5j, abs=1e-6)
    with pytest.raises(RootFindingError):
        winding_count(lambda z: z - 1.0, 1.0)


@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_preimages_match_winding(a):
    psi = catalog_map("rational3")
    h = psi.target_function(a)[0]
    found = psi.preimages(a, 2.5)
    circle = 2.5 * 0.999
    if all(abs(abs(z) - circle) > 1e-3 for z, _ in found):
        assert sum(m for z, m in found if abs(z) < circle) == winding_count(h, circle)


# -- divisors, chordal metric and base shift ----------------------------------------------
def test_divisor_validation():
    d = Divisor.reduced([0, 1, INF])
    assert d.targets == [0, 1, INF]
    with pytest.raises(ConfigurationError):
        Divisor(((0, 1), (0.0, 2)))
    with pytest.raises(ConfigurationError):
        Divisor(((1, 0),))
    with pytest.raises(ConfigurationError):
        Divisor(((INF, 1), (math.inf, 1)))


sphere_pts = st.one_of(st.just(INF), st.complex_numbers(max_magnitude=1e3, allow_nan=False,
                                                        allow_infinity=False))


@given(sphere_pts, sphere_pts, sphere_pts)
def test_chordal_metric(a, b, c):
    dab = chordal_distance(a, b)
    assert 0 <= dab <= 1 + 1e-15
    assert dab == pytest.approx(chordal_distance(b, a), abs=1e-15)
    assert dab <= chordal_distance(a, c) + chordal_distance(c, b) + 1e-12


def test_chordal_examples():
    assert chordal_distance(0, INF) == 1.0
    assert chordal_distance(1, -1) == pytest.approx(1.0)
    assert chordal_distance(INF, INF) == 0.0


def test_base_shift():
    assert base_shift(catalog_map("exp"), [0, INF]) == 0
    identity = catalog_map("identity")
    c = base_shift(identity, [0, INF])
    assert c != 0
    shifted = identity.shifted(c)
    assert min(chordal_distance(shifted(0), a) for a in (0, INF)) >= 1e-2
    # the choice is deterministic
    assert base_shift(identity, [0, INF]) == c
    assert base_shift(catalog_map("exp"), [0, 1, INF]) == pytest.approx(-math.pi / 2 * 1j)


def test_describe():
    d = catalog_map("exp").describe()
    assert d["kind"] == "exp" and d["numerator"] == [[0.0, 0.0], [1.0, 0.0]]
