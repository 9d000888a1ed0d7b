import pytest

from syzlab.exceptions import ParameterError, UnboundedSearchError
from syzlab.lattice import (
    LEMMAS,
    NikulinView,
    certify,
    count_nikulin_c_vectors,
    div4_criterion,
    enumerate_classes,
    hodge_index_bound,
    make_lattice,
    nikulin_c_vectors,
    signature,
)


def test_theta_lattice_shape():
    lat = make_lattice("theta", 5, 1)
    assert lat.gram == ((8, -2), (-2, -4))
    assert signature(lat.gram) == (1, 1, 0)
    assert div4_criterion(lat)


def test_catalog_rejects_wrong_parity():
    with pytest.raises(ParameterError):
        make_lattice("theta", 6, 2)
    with pytest.raises(ParameterError):
        make_lattice("xi", 7, 3)
    with pytest.raises(ParameterError):
        make_lattice("mystery", 5, 1)


def test_nikulin_lattice_is_hyperbolic():
    lat = make_lattice("nikulin_lambda", 11)
    assert signature(lat.gram) == (1, 8, 0)
    e = lat.basis_vector("e")
    assert lat.square(e) == -4


def test_nikulin_view_of_half_sum():
    lat = make_lattice("nikulin_t_hat", 11)
    view = NikulinView.from_doubled(0, 0, [1] * 8)
    cls = view.to_class(lat)
    assert cls == lat.basis_vector("e")
    assert NikulinView.from_class(lat, cls) == view


def test_nikulin_vector_count_agrees():
    for bound in (0, 4, 8, 12):
        assert len(nikulin_c_vectors(bound)) == count_nikulin_c_vectors(bound)


def test_enumeration_needs_a_box():
    lat = make_lattice("theta", 5, 1)
    with pytest.raises(UnboundedSearchError):
        enumerate_classes(lat, -4)
    found = enumerate_classes(lat, -4, box=3)
    assert lat.vector(eta=1) in found
    assert all(lat.square(x) == -4 for x in found)


def test_hodge_index_bound():
    lat = make_lattice("theta", 5, 1)
    bound = hodge_index_bound(lat, lat.vector(H=1), lat.vector(eta=1))
    assert bound.holds and bound.strict


@pytest.mark.parametrize(
    "lemma_id, params",
    [("theta.div4", {"g": 5, "p": 1}), ("nikulin.H_nef", {"g": 11})],
)
def test_certificates_pass(lemma_id, params):
    cert = certify(lemma_id, params)
    assert cert.passed
    assert cert.candidates_checked > 0
    assert cert.to_json()["lemma_id"] == lemma_id


def test_nikulin_h_nef_counts_only_enumerated_classes():
    # one bound check, then two checks per class: eight vectors c = -e_j, five values of a each
    assert len(nikulin_c_vectors(4, nonpositive=True)) == 9
    assert certify("nikulin.H_nef", {"g": 11}).candidates_checked == 1 + 2 * 8 * 5


def test_certify_rejects_unknown_lemma_and_bad_genus():
    with pytest.raises(ParameterError):
        certify("theta.nope", {"g": 5, "p": 1})
    with pytest.raises(ParameterError):
        certify("nikulin.H_nef", {"g": 9})
    assert "nikulin.splitting" in LEMMAS
