"""Public syzlab API."""

from __future__ import annotations

from typing import Iterable, List, Optional

from ._version import __version__
from .client import ModelLike, Syzlab
from .config import SyzlabSettings
from .curvemodel import (
    Divisor,
    Genus4Cone,
    Genus4Curve,
    HyperellipticCurve,
    Place,
    PlaneQuartic,
    QuarticBundle,
    RRBasis,
    TwoTorsionClass,
    rr_basis,
    rr_dimension,
    two_torsion,
)
from .exactla import FieldMatrix, kernel_basis, rank
from .exceptions import (
    CacheError,
    GradedRangeError,
    ParameterError,
    ResampleBudgetError,
    SyzlabError,
    UnboundedSearchError,
)
from .koszul import BettiTable, LineBundleModel, SectionRing, parse_model_spec
from .lattice import Certificate, GramLattice, LatticeClass, make_lattice
from .logging_config import get_logger, setup_logging
from .moduli import DivClass

__all__ = [
    "__version__",
    "Syzlab",
    "SyzlabSettings",
    "FieldMatrix",
    "rank",
    "kernel_basis",
    "HyperellipticCurve",
    "Place",
    "Divisor",
    "RRBasis",
    "TwoTorsionClass",
    "PlaneQuartic",
    "QuarticBundle",
    "Genus4Curve",
    "Genus4Cone",
    "rr_basis",
    "rr_dimension",
    "two_torsion",
    "SectionRing",
    "LineBundleModel",
    "BettiTable",
    "parse_model_spec",
    "GramLattice",
    "LatticeClass",
    "Certificate",
    "make_lattice",
    "DivClass",
    "SyzlabError",
    "ParameterError",
    "UnboundedSearchError",
    "GradedRangeError",
    "ResampleBudgetError",
    "CacheError",
    "setup_logging",
    "get_logger",
    "configure",
    "set_default_client",
    "betti",
    "koszul_dim",
    "certify",
    "moduli_reports",
]

_default_client: Optional[Syzlab] = None


def _client() -> Syzlab:
    global _default_client
    if _default_client is None:
        _default_client = Syzlab()
    return _default_client


def set_default_client(client: Syzlab) -> None:
    global _default_client
    _default_client = client


def configure(**kwargs) -> Syzlab:
    _client().configure(**kwargs)
    return _client()


# Wrappers ----------------------------------------------------------------------------------------
def betti(model: ModelLike, pmax: int, qmax: int = 2) -> BettiTable:
    """
    Graded Betti table ``b_{p,q}`` for ``p <= pmax`` and ``q <= qmax``.

    Example:
        >>> syzlab.betti("rnc d=3", pmax=3).get(1, 1)
        3
    """
    return _client().betti(model, pmax, qmax)


def koszul_dim(model: ModelLike, p: int, q: int) -> int:
    return _client().koszul_dim(model, p, q)


def certify(lemma_id: str, **params: int) -> Certificate:
    """Replay a lattice lemma's finite case analysis, e.g. ``certify("nikulin.H_nef", g=11)``."""
    return _client().certify(lemma_id, **params)


def moduli_reports(values: Iterable[int]) -> List[dict]:
    return _client().moduli_reports(values)
