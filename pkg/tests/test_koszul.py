from fractions import Fraction

import numpy as np
import pytest

from syzlab.curvemodel import (
    HyperellipticCurve,
    PlaneQuartic,
    genus4_sample,
    quartic_bundle_on_two_lines,
)
from syzlab.exceptions import GradedRangeError, ParameterError
from syzlab.koszul import (
    BettiTable,
    betti_table,
    euler_diagonal_check,
    euler_diagonal_rhs,
    genus4_canonical,
    gl_secant_divisorial_check,
    koszul_differential,
    koszul_dim,
    mixed_columns,
    naturality_check,
    oracle_agreement,
    parse_model_spec,
    prym_green_predicted,
    quartic_bundle_model,
    quartic_canonical,
    random_hyperelliptic_model,
    rational_normal_curve,
    reduction_by_one_check,
    scroll_syzygies,
    secant_bounds,
)

P = 1009


@pytest.fixture(scope="module")
def twisted_cubic():
    return rational_normal_curve(3, P, seed=1)


@pytest.fixture(scope="module")
def fermat():
    return PlaneQuartic.fermat(P)


def test_twisted_cubic_table(twisted_cubic):
    table = betti_table(twisted_cubic, 3, 2)
    assert table.as_dict() == {(0, 0): 1, (1, 1): 3, (2, 1): 2}


def test_rational_normal_quartic_table():
    table = betti_table(rational_normal_curve(4, P, seed=2), 4, 2)
    assert [table.get(p, 1) for p in range(1, 5)] == [6, 8, 3, 0]
    assert not any(table.get(p, 2) for p in range(5))


def test_plane_quartic_is_a_hypersurface(fermat):
    table = betti_table(quartic_canonical(fermat, seed=0), 2, 3)
    assert table.as_dict() == {(0, 0): 1, (1, 3): 1}


def test_genus4_canonical_is_a_complete_intersection():
    curve = genus4_sample(P, np.random.default_rng(8))
    table = betti_table(genus4_canonical(curve, seed=0), 2, 3)
    assert table.as_dict() == {(0, 0): 1, (1, 1): 1, (1, 2): 1, (2, 3): 1}


def test_degree_five_genus_two_lies_on_one_quadric():
    model = random_hyperelliptic_model(2, 5, P, seed=4)
    assert model.nonspecial
    assert koszul_dim(model, 1, 1) == 1


def test_differential_squares_to_zero(twisted_cubic):
    ring = twisted_cubic.ring(3)
    composite = koszul_differential(ring, 1, 1).matmul(koszul_differential(ring, 2, 0))
    assert not composite.to_dense().any()
    with pytest.raises(ParameterError):
        koszul_differential(ring, 0, 1)


def test_change_of_basis_keeps_dimensions(twisted_cubic):
    ring = twisted_cubic.ring(3)
    rng = np.random.default_rng(6)
    change = np.triu(rng.integers(0, P, size=(4, 4)), k=1) + np.eye(4, dtype=np.int64)
    moved = ring.substitute(change)
    for p, q in ((1, 1), (2, 1), (1, 2)):
        assert koszul_dim(moved, p, q) == koszul_dim(ring, p, q)


def test_range_errors(twisted_cubic):
    with pytest.raises(GradedRangeError):
        koszul_dim(twisted_cubic, 1, 1, wedge_cap=2)
    with pytest.raises(GradedRangeError):
        koszul_dim(twisted_cubic.build(2), 1, 2)
    with pytest.raises(ParameterError):
        koszul_dim(twisted_cubic, -1, 0)
    assert koszul_dim(twisted_cubic, 5, 1) == 0


def test_euler_diagonal_value():
    assert euler_diagonal_rhs(2, 4, 0) == Fraction(-1)
    with pytest.raises(ParameterError):
        euler_diagonal_rhs(3, 3, 0)


def test_prym_green_prediction_at_genus_seven():
    table = prym_green_predicted(7)
    assert table.get(1, 1) == 3
    assert [table.get(p, 2) for p in range(1, 5)] == [8, 27, 24, 7]
    assert naturality_check(table)
    assert mixed_columns(table) == [1]
    assert euler_diagonal_check(table, 7, 12)
    with pytest.raises(ParameterError):
        prym_green_predicted(8)


def test_betti_table_json_and_render(twisted_cubic):
    table = betti_table(twisted_cubic, 3, 2)
    assert BettiTable.from_json(table.to_json()) == table
    text = table.render()
    assert text.splitlines()[1].startswith("total:")
    assert "." in text


def test_oracle_agrees_on_twisted_cubic(twisted_cubic):
    assert oracle_agreement(twisted_cubic, 3, 2, 3) == (True, [])


def test_oracle_agrees_on_hyperelliptic_model():
    model = random_hyperelliptic_model(2, 4, P, seed=1)
    ok, mismatches = oracle_agreement(model, 3, 2, 3)
    assert ok, mismatches


def test_scroll_syzygies_at_genus_five():
    rng = np.random.default_rng(10)
    c = HyperellipticCurve.random(5, P, rng)
    d = c.random_effective_divisor(10, rng)
    result = scroll_syzygies(c, d, seed=2)
    assert len(result.quadrics) == 2
    assert result.verified
    with pytest.raises(ParameterError):
        scroll_syzygies(c, c.random_effective_divisor(9, rng))


def test_divisorial_secant_on_quartic_bundle(fermat):
    bundle = quartic_bundle_on_two_lines(fermat, np.random.default_rng(5))
    assert gl_secant_divisorial_check(quartic_bundle_model(bundle, seed=0)) == (True, True)


def test_divisorial_secant_on_hyperelliptic_genus_three():
    lhs, rhs = gl_secant_divisorial_check(random_hyperelliptic_model(3, 6, P, seed=3))
    assert lhs and rhs


def test_reduction_by_one():
    rng = np.random.default_rng(13)
    c = HyperellipticCurve.random(2, P, rng)
    d = c.random_effective_divisor(6, rng)
    (x,) = c.random_places(1, rng, exclude=d.places())
    report = reduction_by_one_check(c, d, 1, x)
    assert report["premise"]
    assert report["holds"]
    assert report["K_p-1,2_minus_x"] == 0


def test_secant_bounds():
    bounds = secant_bounds(g=5, d=10, p=1, h1_value=0, cliff=0)
    assert bounds["divisorial"]
    assert bounds["secant_range"]
    assert not bounds["green_lazarsfeld"]


def test_model_strings():
    assert parse_model_spec("rnc d=4", P).degree == 4
    assert parse_model_spec("hyp g=3 seed=2", P).degree == 6
    prym = parse_model_spec("prym g=3 S=0,1", P)
    assert prym.degree == 4 and prym.genus == 3
    for bad in ("cone", "rnc d=x", "rnc e=3", "hyp seed=1", "hyp g=3 f=x^7"):
        with pytest.raises(ParameterError):
            parse_model_spec(bad, P)
