"""Divisor-class calculus on moduli of pointed curves in the span of λ and Σψ.

Classes live on the moduli space of curves of genus ``g = 2i+1`` with ``2g`` marked
points. Every bundle in the construction is symmetric in the markings, so first Chern
classes are pairs ``(c_lambda, c_psi)`` with ``c_psi`` the coefficient of ``Σ_j ψ_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Literal, Tuple, Union

import sympy

from .exactla import binomial
from .exceptions import ParameterError

Family = Literal["G", "H"]
Number = Union[int, Fraction]

MAX_I = 60
MAX_RECURSION = 256

# v_* rules for the degree-two monomials on the universal curve
PUSHFORWARD_TAGS = ("omega^2", "lambda*omega", "E_j*lambda", "E_j*omega", "E_j^2")


@dataclass(frozen=True)
class DivClass:
    """Exact class ``c_lambda·λ + c_psi·Σψ_j``."""

    c_lambda: Fraction
    c_psi: Fraction

    @classmethod
    def of(cls, c_lambda: Number, c_psi: Number) -> "DivClass":
        return cls(Fraction(c_lambda), Fraction(c_psi))

    def __add__(self, other: "DivClass") -> "DivClass":
        return DivClass(self.c_lambda + other.c_lambda, self.c_psi + other.c_psi)

    def __sub__(self, other: "DivClass") -> "DivClass":
        return DivClass(self.c_lambda - other.c_lambda, self.c_psi - other.c_psi)

    def __neg__(self) -> "DivClass":
        return DivClass(-self.c_lambda, -self.c_psi)

    def scale(self, factor: Number) -> "DivClass":
        f = Fraction(factor)
        return DivClass(self.c_lambda * f, self.c_psi * f)

    def __rmul__(self, factor: Number) -> "DivClass":
        return self.scale(factor)

    def to_json(self) -> Dict[str, str]:
        return {"lambda": str(self.c_lambda), "psi": str(self.c_psi)}

    def __str__(self) -> str:
        return f"{self.c_lambda}·λ + {self.c_psi}·Σψ"


ZERO = DivClass.of(0, 0)


@dataclass(frozen=True)
class PushforwardSymbol:
    """A degree-two monomial on the universal curve awaiting pushforward."""

    tag: str
    coefficient: Fraction
    marking: int = 0

    def __post_init__(self) -> None:
        if self.tag not in PUSHFORWARD_TAGS:
            raise ParameterError(f"unknown pushforward tag '{self.tag}'")


@dataclass(frozen=True)
class ChernBundle:
    """Rank and first Chern class of a vector bundle on the moduli space."""

    rank: int
    c1: DivClass

    def exterior_power(self, n: int) -> "ChernBundle":
        # c1(∧^n E) = C(r-1, n-1) c1(E)
        return ChernBundle(binomial(self.rank, n), self.c1.scale(binomial(self.rank - 1, n - 1)))

    def symmetric_power(self, n: int) -> "ChernBundle":
        # c1(Sym^n E) = C(r+n-1, r) c1(E)
        r = self.rank
        return ChernBundle(binomial(r + n - 1, n), self.c1.scale(binomial(r + n - 1, r)))

    def __mul__(self, other: "ChernBundle") -> "ChernBundle":
        return ChernBundle(
            self.rank * other.rank, self.c1.scale(other.rank) + other.c1.scale(self.rank)
        )

    def quotient(self, sub: "ChernBundle") -> "ChernBundle":
        return ChernBundle(self.rank - sub.rank, self.c1 - sub.c1)


@dataclass(frozen=True)
class RankTable:
    i: int
    ranks: Dict[Tuple[str, int, int], int]


def _check_i(i: int) -> None:
    if not 1 <= i <= MAX_I:
        raise ParameterError(f"i={i} outside 1..{MAX_I}")


# region ranks -------------------------------------------------------------------------
def rank_G0(ell: int, i: int) -> int:
    """Rank of the pushforward of ``ω^ℓ`` twisted by the markings: ``(2i+1)(2ℓ−1)+1``."""
    if ell < 1:
        raise ParameterError("rank_G0 needs ell >= 1")
    _check_i(i)
    return (2 * i + 1) * (2 * ell - 1) + 1


def rank_H0(q: int, i: int) -> int:
    if q < 0:
        raise ParameterError("rank_H0 needs q >= 0")
    _check_i(i)
    return binomial(2 * i + 1 + q, q)


def c1_G0(ell: int, i: int = 1) -> DivClass:
    """``c1(G_{0,ℓ}) = λ − C(ℓ+1, 2)·Σψ``."""
    if ell < 1:
        raise ParameterError("c1_G0 needs ell >= 1")
    return DivClass.of(1, -binomial(ell + 1, 2))


def _base_bundle(family: Family, q: int, i: int) -> ChernBundle:
    if family == "G":
        return ChernBundle(rank_G0(q, i), c1_G0(q, i))
    if family == "H":
        h01 = ChernBundle(2 * i + 2, c1_G0(1, i))
        return h01.symmetric_power(q)
    raise ParameterError(f"unknown family '{family}'")


@lru_cache(maxsize=None)
def _bundle_rec(p: int, q: int, i: int, family: Family) -> ChernBundle:
    if p == 0:
        return _base_bundle(family, q, i)
    first = _base_bundle(family, 1, i)
    middle = first.exterior_power(p) * _base_bundle(family, q, i)
    return middle.quotient(_bundle_rec(p - 1, q + 1, i, family))


def _bundle(p: int, q: int, i: int, family: Family) -> ChernBundle:
    if p < 0 or q < 1:
        raise ParameterError("need p >= 0 and q >= 1")
    if p > MAX_RECURSION:
        raise ParameterError(f"recursion depth {p} above cap {MAX_RECURSION}")
    if family not in ("G", "H"):
        raise ParameterError(f"unknown family '{family}'")
    _check_i(i)
    return _bundle_rec(p, q, i, family)


def rank_rec(p: int, q: int, i: int, family: Family) -> int:
    """Rank of ``family_{p,q}`` from ``0 → F_{p,q} → ∧^p F_{0,1} ⊗ F_{0,q} → F_{p−1,q+1} → 0``."""
    if q < 2:
        raise ParameterError("rank_rec needs q >= 2")
    return _bundle(p, q, i, family).rank


def c1_rec(p: int, q: int, i: int, family: Family) -> DivClass:
    if q < 2:
        raise ParameterError("c1_rec needs q >= 2")
    return _bundle(p, q, i, family).c1


def rank_table(i: int) -> RankTable:
    ranks = {}
    for family in ("G", "H"):
        for p in range(i):
            ranks[(family, p, 2 + (i - 1 - p))] = rank_rec(p, 2 + (i - 1 - p), i, family)
    return RankTable(i, ranks)


# region Grothendieck-Riemann-Roch -------------------------------------------------------
def _pushforward_rules(
    symbol: PushforwardSymbol, genus: int
) -> Tuple[Fraction, Dict[int, Fraction]]:
    c = symbol.coefficient
    if symbol.tag == "omega^2":
        return 12 * c, {}
    if symbol.tag == "lambda*omega":
        return (2 * genus - 2) * c, {}
    if symbol.tag == "E_j*lambda":
        return c, {}
    if symbol.tag == "E_j*omega":
        return Fraction(0), {symbol.marking: c}
    return Fraction(0), {symbol.marking: -c}


def grr_symbols(ell: int, markings: int) -> List[PushforwardSymbol]:
    """Degree-two part of ``ch(O(ℓΣE_j))·td`` as pushforward symbols, cross terms dropped."""
    omega = sympy.Symbol("omega")
    sections = sympy.symbols(f"E1:{markings + 1}")
    total = sum(sections)
    ch = 1 + ell * total + sympy.Rational(ell * ell, 2) * total**2
    td = 1 - omega / 2 + omega**2 / 12
    poly = sympy.Poly(sympy.expand(ch * td), omega, *sections)

    symbols: List[PushforwardSymbol] = []
    for exps, coeff in poly.terms():
        if sum(exps) != 2:
            continue
        value = Fraction(int(coeff.p), int(coeff.q))
        w, es = exps[0], exps[1:]
        hit = [j for j, e in enumerate(es, start=1) if e]
        if w == 2:
            symbols.append(PushforwardSymbol("omega^2", value))
        elif w == 1:
            symbols.append(PushforwardSymbol("E_j*omega", value, hit[0]))
        elif len(hit) == 1:
            symbols.append(PushforwardSymbol("E_j^2", value, hit[0]))
        # E_i·E_j = 0 for distinct markings
    return symbols


def grr_expand(ell: int, i: int) -> DivClass:
    """Push forward the degree-two GRR term for ``O(ℓ·ΣE_j)`` and symmetrize."""
    if ell < 0:
        raise ParameterError("grr_expand needs ell >= 0")
    _check_i(i)
    genus = 2 * i + 1
    markings = 2 * genus
    c_lambda = Fraction(0)
    psi: Dict[int, Fraction] = {j: Fraction(0) for j in range(1, markings + 1)}
    for symbol in grr_symbols(ell, markings):
        lam, per_marking = _pushforward_rules(symbol, genus)
        c_lambda += lam
        for j, c in per_marking.items():
            psi[j] += c
    if len(set(psi.values())) != 1:
        raise ParameterError("pushforward is not symmetric in the markings")
    return DivClass(c_lambda, psi[1])


# region closed forms ------------------------------------------------------------------
def c1_G_closed(i: int) -> DivClass:
    lead = binomial(2 * i, i)
    den = (i + 1) * (i + 2)
    return DivClass.of(
        Fraction(lead * (4 * i**3 + 5 * i**2 - 4 * i - 2), den),
        Fraction(-lead * (8 * i**3 + 13 * i**2 - i - 2), 2 * den),
    )


def c1_H_closed(i: int) -> DivClass:
    value = Fraction(binomial(2 * i, i) * i * (2 * i + 1) * (2 * i + 3), (i + 1) * (i + 2))
    return DivClass(value, -value)


def _prefactor(i: int) -> Fraction:
    return Fraction(binomial(2 * i, i - 1), 2 * i)


def syz_class(i: int) -> DivClass:
    """Class of the syzygy divisor as the degeneracy locus ``c1(G) − c1(H)``."""
    _check_i(i)
    return c1_rec(i - 1, 2, i, "G") - c1_rec(i - 1, 2, i, "H")


def syz_closed(i: int) -> DivClass:
    _check_i(i)
    return DivClass.of(-(6 * i + 2), 3 * i + 1).scale(_prefactor(i))


def sec_class(i: int) -> DivClass:
    _check_i(i)
    return DivClass.of(
        Fraction(-(18 * i**2 + 10 * i - 2), 2 * i - 1), 3 * i + 1
    ).scale(_prefactor(i))


def hur_pullback(i: int) -> DivClass:
    """λ-part of the Hurwitz class pulled back from the unpointed moduli space."""
    _check_i(i)
    return DivClass.of(Fraction(6 * (i + 2), 2 * i - 1), 0).scale(_prefactor(i))


def dim_count_check(i: int) -> Dict[str, object]:
    if i < 1:
        raise ParameterError("dim_count_check needs i >= 1")
    printed = i * binomial(2 * i + 3, i)
    shifted = i * binomial(2 * i + 3, i + 1)
    fibre = binomial(2 * i + 1, i - 1) * (4 * i + 6)
    return {
        "i": i,
        "printed": printed,
        "shifted": shifted,
        "fibre": fibre,
        "printed_eq_shifted": printed == shifted,
        "printed_eq_fibre": printed == fibre,
        "shifted_eq_fibre": shifted == fibre,
    }


def div_class_report(i: int) -> Dict[str, object]:
    """Every identity at one value of ``i`` with its verdict."""
    g_rec, h_rec = c1_rec(i - 1, 2, i, "G"), c1_rec(i - 1, 2, i, "H")
    syz, sec, hur = syz_class(i), sec_class(i), hur_pullback(i)
    rank_g, rank_h = rank_rec(i - 1, 2, i, "G"), rank_rec(i - 1, 2, i, "H")
    scaled = [c * 2 * i / binomial(2 * i, i - 1) for c in (syz.c_lambda, syz.c_psi)]
    checks = {
        "osztaly_G": g_rec == c1_G_closed(i),
        "osztaly_H": h_rec == c1_H_closed(i),
        "syz_closed": syz == syz_closed(i),
        "picid": syz - sec == hur.scale(i),
        "psi_equal": syz.c_psi == sec.c_psi,
        "rank_balance": rank_g == rank_h == binomial(2 * i + 1, i - 1) * (4 * i + 6),
        "integrality": all(c.denominator in (1, 2) for c in scaled),
    }
    return {
        "i": i,
        "checks": checks,
        "syz": syz.to_json(),
        "sec": sec.to_json(),
        "hur": hur.to_json(),
        "rank": rank_g,
        "dims": dim_count_check(i),
    }
