from fractions import Fraction

import pytest

from syzlab.exceptions import ParameterError
from syzlab.moduli import (
    DivClass,
    c1_G0,
    dim_count_check,
    div_class_report,
    grr_expand,
    rank_G0,
    rank_rec,
    syz_class,
    syz_closed,
)


@pytest.mark.parametrize("i", [1, 2, 3, 5, 8])
def test_every_identity_holds(i):
    report = div_class_report(i)
    assert all(report["checks"].values()), report["checks"]


def test_syzygy_class_at_first_value():
    assert syz_closed(1) == DivClass.of(-4, 2)
    assert syz_class(1) == syz_closed(1)


@pytest.mark.parametrize("ell", range(1, 11))
def test_grr_expansion_matches_closed_form(ell):
    assert grr_expand(ell, 1) == c1_G0(ell, 1)


def test_base_ranks():
    assert rank_G0(1, 3) == 8
    assert rank_rec(0, 2, 1, "G") == rank_G0(2, 1)


def test_dim_count_flags_printed_value():
    report = dim_count_check(2)
    assert report["shifted"] == report["fibre"] == 70
    assert not report["printed_eq_fibre"]


def test_divclass_arithmetic():
    a = DivClass.of(1, Fraction(1, 2))
    assert a + a == a.scale(2) == 2 * a
    assert a - a == DivClass.of(0, 0)
    assert a.to_json() == {"lambda": "1", "psi": "1/2"}


def test_out_of_range_i_rejected():
    with pytest.raises(ParameterError):
        syz_class(0)
