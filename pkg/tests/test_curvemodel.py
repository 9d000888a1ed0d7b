import numpy as np
import pytest

from syzlab.curvemodel import (
    INFINITY,
    ZERO_DIVISOR,
    Divisor,
    HyperellipticCurve,
    PlaneQuartic,
    Place,
    all_two_torsion,
    diff_variety_member,
    diffcon_g4_check,
    difference_variety_suite,
    find_difference_witness,
    function_divisor,
    genus4_cone,
    genus4_sample,
    grd_decompose,
    h1,
    interpolation_h0,
    quadric_rulings,
    quartic_bundle_on_two_lines,
    rr_basis,
    rr_dimension,
    theta_Q_member,
    torsion_class_h0,
    torsion_scan,
    twisted_wedge_cohomology,
    two_torsion,
)
from syzlab.exceptions import ParameterError

P = 1009


@pytest.fixture(scope="module")
def genus2():
    return HyperellipticCurve.random(2, P, np.random.default_rng(1))


@pytest.fixture(scope="module")
def genus3():
    return HyperellipticCurve.random(3, P, np.random.default_rng(2))


def test_random_curve_is_split(genus2):
    assert genus2.genus == 2
    assert len(genus2.weierstrass_roots) == 5
    assert all(genus2.contains(pl) for pl in genus2.rational_points()[:20])


def test_even_model_moves_root_to_infinity():
    # y² = x(x-1)(x-2)(x-3)(x-4)(x-5), degree 6
    f = [0, -120, 274, -225, 85, -15, 1]
    c = HyperellipticCurve.from_coefficients(f, 101)
    assert c.genus == 2
    assert len(c.weierstrass_roots) == 5


def test_rejects_non_squarefree():
    with pytest.raises(ParameterError):
        HyperellipticCurve.from_coefficients([0, 0, 1, 1], 101)


def test_divisor_arithmetic():
    a, b = Place.affine(3, 4), Place.weierstrass(7)
    d = Divisor.point(a, 2) + Divisor.point(b) - Divisor.point(INFINITY, 3)
    assert d.degree == 0
    assert d.multiplicity(a) == 2
    assert not d.is_effective()
    assert (d - d) == ZERO_DIVISOR
    assert a.conjugate(11) == Place.affine(3, 7)


def test_riemann_roch_small_cases(genus2, genus3):
    assert rr_dimension(genus2, Divisor.point(INFINITY, 3)) == 2
    assert rr_dimension(genus2, ZERO_DIVISOR) == 1
    for c in (genus2, genus3):
        assert rr_dimension(c, c.canonical()) == c.genus
        assert rr_dimension(c, c.pencil()) == 2


def test_riemann_roch_nonspecial_range(genus3):
    rng = np.random.default_rng(7)
    for degree in (5, 6, 8):
        d = genus3.random_effective_divisor(degree, rng)
        assert rr_dimension(genus3, d) == degree - genus3.genus + 1
        assert h1(genus3, d) == 0


def test_basis_matches_dimension(genus2):
    rng = np.random.default_rng(9)
    d = genus2.random_effective_divisor(4, rng)
    basis = rr_basis(genus2, d)
    assert basis.dimension == rr_dimension(genus2, d) == 3
    places = genus2.random_places(5, rng, exclude=d.places())
    assert basis.values_at(places).shape == (3, 5)


def test_two_torsion_classes(genus2):
    classes = list(all_two_torsion(genus2))
    assert len(classes) == 16
    assert classes[0].is_trivial
    for eta in classes[1:]:
        assert rr_dimension(genus2, eta.divisor()) == 0
        assert function_divisor(genus2, eta.witness()) == eta.divisor().scale(2)


def test_two_torsion_group_law(genus2):
    a = two_torsion(genus2, [0, 1])
    b = two_torsion(genus2, [1, 2])
    assert (a + b).subset == two_torsion(genus2, [0, 2]).subset
    with pytest.raises(ParameterError):
        two_torsion(genus2, [0])


def test_grd_decomposition(genus3):
    dec = grd_decompose(genus3, genus3.canonical())
    assert dec.r == genus3.genus - 1
    assert dec.base == ZERO_DIVISOR
    w = genus3.weierstrass_places()[0]
    dec = grd_decompose(genus3, genus3.pencil() + Divisor.point(w))
    assert dec.r == 1
    assert dec.base == Divisor.point(w)


def test_difference_of_weierstrass_points(genus3):
    w1, w2 = genus3.weierstrass_places()[:2]
    line = Divisor.point(w1) - Divisor.point(w2)
    assert diff_variety_member(genus3, line, 1, 1)
    witness = find_difference_witness(genus3, line, 1, 1, np.random.default_rng(0))
    assert witness is not None
    assert rr_dimension(genus3, line + witness) >= 1


@pytest.mark.parametrize("g", [2, 3, 4, 5, 6])
def test_difference_variety_membership_is_monotone(g):
    rng = np.random.default_rng(20 + g)
    c = HyperellipticCurve.random(g, P, rng)
    members = 0
    for _ in range(6):
        b = int(rng.integers(0, (g - 1) // 2 + 1))
        a = int(rng.integers(0, g - b))
        for extra in (0, 1):
            line = c.random_effective_divisor(a + extra, rng) - c.conjugate(
                c.random_effective_divisor(b + extra, rng)
            )
            verdicts = [diff_variety_member(c, line, a + k, b + k) for k in range(g + 1)]
            assert verdicts == sorted(verdicts)
            members += verdicts[0]
    assert members >= 6


def test_theta_membership_matches_difference_variety(genus3):
    rng = np.random.default_rng(4)
    g = genus3.genus
    for _ in range(10):
        j = int(rng.integers(0, 2))
        xi = genus3.random_effective_divisor(g - 2 * j, rng) - Divisor.point(INFINITY)
        assert theta_Q_member(genus3, xi, j) == diff_variety_member(genus3, xi, g - j - 1, j)


def test_interpolation_oracle_agrees(genus3):
    rng = np.random.default_rng(12)
    for n, k in ((6, 2), (9, 3), (10, 5)):
        places = genus3.random_places(k, rng)
        expected = rr_dimension(genus3, Divisor.point(INFINITY, n) - Divisor.sum_of(places))
        assert interpolation_h0(genus3, n, places) == expected


def test_torsion_oracle_agrees(genus3):
    classes = list(all_two_torsion(genus3))
    for eta in classes[1:12]:
        for k in range(0, 7):
            direct = rr_dimension(genus3, eta.divisor() + Divisor.point(INFINITY, k))
            assert torsion_class_h0(genus3, eta, k) == direct


def test_twisted_cohomology_without_twist(genus3):
    for j in range(2):
        h0, h1_value = twisted_wedge_cohomology(genus3, ZERO_DIVISOR, j, 2 - j)
        assert h1_value == rr_dimension(genus3, genus3.pencil().scale(j))
        assert h0 - h1_value == 2 * (2 - j) - genus3.genus + 1


def test_twisted_cohomology_satisfies_riemann_roch(genus3):
    rng = np.random.default_rng(14)
    g = genus3.genus
    twists = [genus3.random_effective_divisor(1, rng), Divisor.point(INFINITY)]
    twists += [eta.divisor() for eta in list(all_two_torsion(genus3))[1:4]]
    for twist in twists:
        for m in range(3):
            h0, h1_value = twisted_wedge_cohomology(genus3, twist, 0, m)
            assert h0 - h1_value == twist.degree + 2 * m - g + 1


def test_torsion_scan_at_genus_three(genus3):
    report = torsion_scan(genus3, 0, crosscheck=10)
    assert report["classes"] == 64
    assert not report["disagreements"]
    with pytest.raises(ParameterError):
        torsion_scan(genus3, 1)


def test_difference_variety_suite_finds_every_witness():
    report = difference_variety_suite(P, seed=3, instances=12, max_genus=4)
    assert report["instances"] == 12
    assert report["members"] + report["non_members"] == 12
    assert not report["positive_failures"]


def test_fermat_quartic():
    curve = PlaneQuartic.fermat(P)
    assert curve.smooth
    assert curve.within_weil_bound()


def test_quartic_bundle_on_two_lines_contains_a_conic():
    rng = np.random.default_rng(5)
    curve = PlaneQuartic.fermat(P)
    bundle = quartic_bundle_on_two_lines(curve, rng)
    assert bundle.is_nonspecial()
    assert bundle.h0_minus_canonical() >= 1


def test_genus4_sample_canonical_dimensions():
    curve = genus4_sample(P, np.random.default_rng(8))
    assert curve.smooth
    assert curve.h0_hyperplane([]) == 4
    pt = curve.points[0]
    assert curve.h0_hyperplane([pt]) == 3
    assert curve.h0_forms(1) == 4
    assert curve.h0_forms(2) == 9
    assert curve.rulings == 2


def test_genus4_difference_check():
    rng = np.random.default_rng(3)
    report = diffcon_g4_check(genus4_sample(P, rng), rng)
    assert report["deg_L"] == 0
    assert report["rulings"] == 2
    assert not report["degenerate"]
    assert report["plus_point_member"]
    assert report["not_in_C1_minus_C1"]
    assert report["mixed_member"]
    assert report["samples"] == 50


@pytest.fixture(scope="module")
def cone_curve():
    rng = np.random.default_rng(11)
    a2, a4, a6 = (rng.integers(0, P, size=n).tolist() for n in (3, 5, 7))
    return genus4_cone(a2, a4, a6, P)


def test_cone_model_lies_on_a_rank_three_quadric(cone_curve):
    coords = cone_curve.canonical()
    quadric = np.array(cone_curve.quadric, dtype=np.int64)
    assert len(cone_curve.points) > 12
    assert not (np.einsum("ni,ij,nj->n", coords, quadric, coords) % P).any()
    assert cone_curve.rulings == 1
    assert cone_curve.h0_forms(1) == 4
    assert cone_curve.h0_forms(2) == 9


def test_difference_check_flags_a_cone(cone_curve):
    report = diffcon_g4_check(cone_curve, np.random.default_rng(0))
    assert report["degenerate"]
    assert report["rulings"] == 1
    assert report["plus_point_member"] is None
    assert report["samples"] == 0


def test_quadric_rulings_needs_rank_three():
    assert quadric_rulings(np.eye(4, dtype=np.int64).tolist(), P) == 2
    with pytest.raises(ParameterError):
        quadric_rulings([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]], P)
    with pytest.raises(ParameterError):
        genus4_cone([1, 2], [0] * 5, [0] * 7, P)
