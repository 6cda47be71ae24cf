import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qavg.ffield import field_from_order
from qavg.grid import coords
from qavg.quadric import (
    DegenerateFormError,
    ExponentRegion,
    NoConstructivePatternError,
    UnsupportedDimensionError,
    classify_point,
    count_isotropic_subspaces,
    count_points_closed_form,
    critical_point,
    dual_surface,
    enumerate_surface,
    hyperbolicity_test,
    is_symmetric,
    isotropic_subspace,
    iter_subspaces,
    make_surface,
    region_contains,
    region_for,
)


def surface(q, coeffs):
    return make_surface(field_from_order(q), coeffs)


# -- point counts ---------------------------------------------------------


@pytest.mark.parametrize(
    "q, coeffs, expected",
    [(3, (1, -1, 1, -1), 33), (3, (1, 1, 1, 1), 33), (3, (1, 1, 1, 2), 21), (3, (1, -1), 5), (5, (1, -1), 9)],
)
def test_known_counts(q, coeffs, expected):
    S = surface(q, coeffs)
    _, n = enumerate_surface(S)
    assert n == expected
    assert count_points_closed_form(S) == expected


def test_count_by_brute_loop():
    # independent oracle: plain Python loop over F_3^4
    n = sum((x0 * x0 - x1 * x1 + x2 * x2 - x3 * x3) % 3 == 0 for x0, x1, x2, x3 in itertools.product(range(3), repeat=4))
    assert n == 33


@given(
    st.sampled_from([3, 5, 7, 9]),
    st.sampled_from([2, 4]),
    st.data(),
)
def test_closed_form_matches_enumeration(q, d, data):
    F = field_from_order(q)
    idx = data.draw(st.lists(st.integers(1, q - 1), min_size=d, max_size=d))
    S = make_surface(F, [F.elements()[i] for i in idx])
    assert enumerate_surface(S)[1] == count_points_closed_form(S)


def test_odd_dimension_has_no_closed_form():
    with pytest.raises(UnsupportedDimensionError):
        count_points_closed_form(surface(3, (1, 1, 1)))


def test_degenerate_rejected():
    with pytest.raises(DegenerateFormError):
        surface(5, (1, 0, 1, 1))
    with pytest.raises(DegenerateFormError):
        surface(3, (1, 3))


def test_dual_surface_inverts():
    F = field_from_order(7)
    S = make_surface(F, (1, 2, 3, 4))
    D = dual_surface(S)
    assert all(F.mul[a, b] == 1 for a, b in zip(S.coeffs, D.coeffs))
    assert dual_surface(D).coeffs == S.coeffs


@pytest.mark.parametrize("q", [3, 5, 9])
def test_symmetric(q):
    assert is_symmetric(surface(q, (1, -1, 1, -1)))


# -- hyperbolicity --------------------------------------------------------


def test_subspace_enumeration_size():
    # Gaussian binomial [4 choose 2]_q = (q^4-1)(q^3-1)/((q^2-1)(q-1))
    assert sum(1 for _ in iter_subspaces(field_from_order(3), 4, 2)) == 130
    assert sum(1 for _ in iter_subspaces(field_from_order(5), 4, 2)) == 806


@pytest.mark.parametrize("coeffs", list(itertools.product((1, 2), repeat=4)))
def test_hyperbolicity_vs_brute_force_q3(coeffs):
    S = surface(3, coeffs)
    hits, total = count_isotropic_subspaces(S)
    assert total == 130
    assert hyperbolicity_test(S) == (hits > 0)


@pytest.mark.slow
def test_hyperbolicity_vs_brute_force_q5():
    for coeffs in itertools.product(range(1, 5), repeat=4):
        S = surface(5, coeffs)
        assert hyperbolicity_test(S) == (isotropic_subspace(S, "search") is not None), coeffs


def test_hyperbolicity_q9():
    F = field_from_order(9)
    for idx in [(1, 2, 1, 2), (1, 1, 1, F.generator), (1, F.generator, 1, F.generator)]:
        S = make_surface(F, [F.elements()[i] for i in idx])
        assert hyperbolicity_test(S) == (isotropic_subspace(S, "search") is not None)


def test_construct_alternating():
    S = surface(3, (1, -1, 1, -1))
    H = isotropic_subspace(S, "construct")
    assert H.basis == ((1, 1, 0, 0), (0, 0, 1, 1))
    assert H.dim == 2 and H.is_independent()
    assert H.is_isotropic_for(S)
    assert len(H.flat_points()) == 9


@pytest.mark.parametrize("q", [5, 7, 13])
def test_construct_scaled_pairs(q):
    # -a_j / a_i a nonzero square other than 1
    F = field_from_order(q)
    c = 2
    S = make_surface(F, (1, -(c * c), 1, -1))
    H = isotropic_subspace(S, "construct")
    assert H.is_isotropic_for(S)
    assert np.all(S.form(H.points()) == 0)


def test_elliptic_has_no_subspace():
    S = surface(3, (1, 1, 1, 2))
    assert not hyperbolicity_test(S)
    assert isotropic_subspace(S, "search") is None
    with pytest.raises(NoConstructivePatternError):
        isotropic_subspace(S, "construct")


def test_search_finds_isotropic():
    S = surface(5, (1, 2, 3, 4))
    H = isotropic_subspace(S, "search")
    assert hyperbolicity_test(S)
    assert H is not None and H.is_isotropic_for(S)
    pts = coords(S.field, 4)[H.flat_points()]
    assert np.all(S.form(pts) == 0)


# -- exponent regions -----------------------------------------------------


def test_region_vertices_d4():
    R = region_for(4, hyperbolic=True)
    assert critical_point(4) == (Fraction(5, 6), Fraction(1, 3))
    assert (Fraction(2, 3), Fraction(1, 6)) in R.vertices
    G = region_for(4, hyperbolic=False)
    assert (Fraction(4, 5), Fraction(1, 5)) in G.vertices


@pytest.mark.parametrize(
    "pt, hyperbolic, expected",
    [
        ((Fraction(5, 6), Fraction(1, 3)), True, "vertex"),
        ((Fraction(4, 5), Fraction(1, 5)), True, "outside"),
        ((Fraction(4, 5), Fraction(1, 5)), False, "vertex"),
        ((Fraction(0), Fraction(1, 2)), True, "boundary"),
        ((Fraction(1, 2), Fraction(1, 2)), True, "inside"),
        ((Fraction(3, 4), Fraction(1, 4)), True, "boundary"),
        ((Fraction(1, 4), Fraction(1, 2)), True, "inside"),
        ((Fraction(1, 2), Fraction(1, 4)), True, "inside"),
        ((Fraction(1, 2), Fraction(0)), True, "outside"),
    ],
)
def test_classify(pt, hyperbolic, expected):
    assert classify_point(region_for(4, hyperbolic), pt) == expected


fractions = st.fractions(min_value=0, max_value=1, max_denominator=60)


@given(st.permutations(range(5)), fractions, fractions)
def test_region_vertex_order_irrelevant(perm, x, y):
    R = region_for(4, hyperbolic=True)
    shuffled = ExponentRegion(tuple(R.vertices[i] for i in perm))
    assert classify_point(shuffled, (x, y)) == classify_point(R, (x, y))


@given(st.sampled_from([4, 6, 8]), st.booleans(), fractions, fractions)
def test_region_duality(d, hyperbolic, x, y):
    # (1/p, 1/r) -> (1 - 1/r, 1 - 1/p) is the adjoint exponent map
    R = region_for(d, hyperbolic)
    assert region_contains(R, (x, y)) == region_contains(R, (1 - y, 1 - x))


@given(st.sampled_from([4, 6, 8]), fractions, fractions)
def test_hyperbolic_exclusion_line(d, x, y):
    R = region_for(d, hyperbolic=True)
    if y < x - Fraction(d - 2, d):
        assert not region_contains(R, (x, y))


@given(st.sampled_from([4, 6, 8]), fractions, fractions)
def test_general_region_inside_hyperbolic(d, x, y):
    if region_contains(region_for(d, False), (x, y)):
        assert region_contains(region_for(d, True), (x, y))


def test_redundant_vertex_does_not_change_region():
    R = region_for(6, hyperbolic=True)
    padded = ExponentRegion(R.vertices + ((Fraction(1, 3), Fraction(1, 2)),))
    assert set(padded.halfplanes) == set(R.halfplanes)
