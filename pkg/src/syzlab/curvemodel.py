"""Explicit curve models over prime fields.

* :class:`HyperellipticCurve` ``y² = f(x)`` with ``deg f = 2g+1`` (one place at infinity),
  its rational places, divisors, Riemann-Roch bases, 2-torsion, difference-variety and
  secant tests.
* :class:`PlaneQuartic` for genus 3 and :class:`Genus4Curve` (a ``(3,3)`` curve on
  ``P¹×P¹``, canonically embedded in ``P³``) as general-curve suppliers, with
  :class:`Genus4Cone` for the one-ruling case.

Riemann-Roch spaces are computed as follows. For a divisor ``D`` pick
``Q(x) = ∏ (x - x0)^e`` clearing the affine poles of ``D``; every ``h ∈ L(D)`` is then
``(a(x) + b(x)·y) / Q(x)``. The pole order at infinity bounds ``deg a`` and ``deg b``, and
each affine place contributes the vanishing of the leading coefficients of the local
expansion of ``a + b·y`` in a uniformizer (``x - x0`` at ordinary places, ``y`` at
Weierstrass places).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy.ntheory.residue_ntheory import sqrt_mod
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_sqf_p

from .exactla import FieldMatrix, inv_modp, kernel_basis, modulus, rank
from .exceptions import ParameterError, ResampleBudgetError

logger = logging.getLogger(__name__)

Poly = Tuple[int, ...]
MAX_ENUMERATION_PRIME = 200_000


# region polynomial and series helpers ---------------------------------------------------
def _trim(a: Sequence[int]) -> List[int]:
    out = list(a)
    while out and out[-1] == 0:
        out.pop()
    return out


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _padd(a: Sequence[int], b: Sequence[int], p: int, sign: int = 1) -> List[int]:
    n = max(len(a), len(b))
    out = [
        ((a[k] if k < len(a) else 0) + sign * (b[k] if k < len(b) else 0)) % p for k in range(n)
    ]
    return _trim(out)


def _peval(a: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for coeff in reversed(a):
        acc = (acc * x + coeff) % p
    return acc


def _peval_np(a: Sequence[int], xs: np.ndarray, p: int) -> np.ndarray:
    acc = np.zeros_like(xs, dtype=np.int64)
    for coeff in reversed(a):
        acc = (acc * xs + coeff) % p
    return acc


def _taylor_shift(a: Sequence[int], x0: int, p: int) -> List[int]:
    """Coefficients of ``a(x0 + t)`` in ``t``."""
    out: List[int] = []
    for coeff in reversed(a):
        # out = out·(x0 + t) + coeff
        shifted = [0] + out
        for k, v in enumerate(out):
            shifted[k] = (shifted[k] + v * x0) % p
        if not shifted:
            shifted = [0]
        shifted[0] = (shifted[0] + coeff) % p
        out = shifted
    return out


def _linear_product(roots: Iterable[Tuple[int, int]], p: int) -> List[int]:
    out = [1]
    for x0, e in roots:
        for _ in range(e):
            out = _pmul(out, [(-x0) % p, 1], p)
    return out


def _factor_roots(a: Sequence[int], p: int) -> Tuple[Dict[int, int], bool]:
    """Rational roots with multiplicity, and whether ``a`` splits into linear factors."""
    coeffs = _trim(a)
    if len(coeffs) <= 1:
        return {}, True
    _, factors = gf_factor(ZZ.map(list(reversed(coeffs))), p, ZZ)
    roots: Dict[int, int] = {}
    split = True
    for fac, mult in factors:
        if len(fac) == 2:
            roots[(-int(fac[1])) % p] = int(mult)
        else:
            split = False
    return roots, split


def _smul(a: Sequence[int], b: Sequence[int], n: int, p: int) -> List[int]:
    out = [0] * n
    for i in range(min(n, len(a))):
        ai = a[i]
        if ai:
            for j in range(min(n - i, len(b))):
                out[i + j] = (out[i + j] + ai * b[j]) % p
    return out


def _np_powmod(base: np.ndarray, exponent: int, p: int) -> np.ndarray:
    result = np.ones_like(base, dtype=np.int64)
    b = base.astype(np.int64) % p
    e = exponent
    while e:
        if e & 1:
            result = (result * b) % p
        b = (b * b) % p
        e >>= 1
    return result


# region places and divisors --------------------------------------------------------------
@dataclass(frozen=True, order=True)
class Place:
    """A rational place: ``affine(x, y)``, ``weierstrass(x)`` or ``infinity``."""

    kind: str
    x: int = -1
    y: int = 0

    @classmethod
    def affine(cls, x: int, y: int) -> "Place":
        return cls("affine", x, y)

    @classmethod
    def weierstrass(cls, x: int) -> "Place":
        return cls("weierstrass", x, 0)

    @property
    def is_infinite(self) -> bool:
        return self.kind == "infinity"

    @property
    def is_weierstrass(self) -> bool:
        return self.kind in ("weierstrass", "infinity")

    def conjugate(self, p: int) -> "Place":
        if self.kind != "affine":
            return self
        return Place("affine", self.x, (-self.y) % p)

    def __str__(self) -> str:
        if self.kind == "infinity":
            return "∞"
        if self.kind == "weierstrass":
            return f"w({self.x})"
        return f"({self.x},{self.y})"


INFINITY = Place("infinity")


@dataclass(frozen=True)
class Divisor:
    """Formal sum of rational places."""

    support: Tuple[Tuple[Place, int], ...] = ()

    @classmethod
    def of(cls, mapping: Union[Mapping[Place, int], Iterable[Tuple[Place, int]]]) -> "Divisor":
        acc: Dict[Place, int] = {}
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        for place, n in items:
            acc[place] = acc.get(place, 0) + int(n)
        return cls(tuple(sorted((pl, n) for pl, n in acc.items() if n)))

    @classmethod
    def point(cls, place: Place, n: int = 1) -> "Divisor":
        return cls.of({place: n})

    @classmethod
    def sum_of(cls, places: Iterable[Place]) -> "Divisor":
        acc: Dict[Place, int] = {}
        for place in places:
            acc[place] = acc.get(place, 0) + 1
        return cls.of(acc)

    def as_dict(self) -> Dict[Place, int]:
        return dict(self.support)

    @property
    def degree(self) -> int:
        return sum(n for _, n in self.support)

    def multiplicity(self, place: Place) -> int:
        return self.as_dict().get(place, 0)

    def places(self) -> List[Place]:
        return [pl for pl, _ in self.support]

    def is_effective(self) -> bool:
        return all(n > 0 for _, n in self.support)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor.of(list(self.support) + list(other.support))

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((pl, -n) for pl, n in self.support))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def scale(self, k: int) -> "Divisor":
        return Divisor.of({pl: k * n for pl, n in self.support})

    def __rmul__(self, k: int) -> "Divisor":
        return self.scale(k)

    def expand(self) -> List[Place]:
        """Places repeated by multiplicity (effective divisors only)."""
        if not self.is_effective():
            raise ParameterError("only effective divisors expand into points")
        return [pl for pl, n in self.support for _ in range(n)]

    def __str__(self) -> str:
        if not self.support:
            return "0"
        return " + ".join(f"{n}·{pl}" if n != 1 else str(pl) for pl, n in self.support)


ZERO_DIVISOR = Divisor()


@dataclass(frozen=True)
class CurveFunction:
    """``(a(x) + b(x)·y) / q(x)`` with coefficient tuples listed low to high."""

    a: Poly
    b: Poly = ()
    q: Poly = (1,)

    def is_zero(self) -> bool:
        return not _trim(self.a) and not _trim(self.b)


# region hyperelliptic curves --------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class HyperellipticCurve:
    """``y² = f(x)`` over ``F_p`` with ``deg f = 2g+1``."""

    p: int
    f: Poly
    _cache: Dict[object, object] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        f = _trim(self.f)
        if len(f) - 1 < 3 or (len(f) - 1) % 2 == 0:
            raise ParameterError(f"odd model needs deg f = 2g+1 >= 3, got {len(f) - 1}")
        if not gf_sqf_p(ZZ.map(list(reversed(f))), self.p, ZZ):
            raise ParameterError("f is not squarefree")

    # region constructors ----------------------------------------------------------
    @classmethod
    def from_coefficients(cls, f: Sequence[int], p: int) -> "HyperellipticCurve":
        q = modulus(p)
        coeffs = _trim([int(c) % q for c in f])
        if (len(coeffs) - 1) % 2 == 0:
            return cls.from_even_model(coeffs, q)
        return cls(q, tuple(coeffs))

    @classmethod
    def from_even_model(cls, f: Sequence[int], p: int) -> "HyperellipticCurve":
        """Move a rational root of an even-degree ``f`` to infinity by ``x = r + 1/u``."""
        q = modulus(p)
        coeffs = _trim([int(c) % q for c in f])
        d = len(coeffs) - 1
        if d % 2:
            return cls(q, tuple(coeffs))
        roots, _ = _factor_roots(coeffs, q)
        if not roots:
            raise ParameterError("even-degree model without a rational root is not supported")
        r = min(roots)
        # u^d · f(r + 1/u) = Σ f_k (r·u + 1)^k u^(d-k)
        out: List[int] = []
        for k, fk in enumerate(coeffs):
            term = [fk]
            for _ in range(k):
                term = _pmul(term, [1, r], q)
            term = [0] * (d - k) + term
            out = _padd(out, term, q)
        return cls(q, tuple(_trim(out)))

    @classmethod
    def random(
        cls, g: int, p: int, rng: np.random.Generator, *, split: bool = True
    ) -> "HyperellipticCurve":
        """Random curve of genus ``g``; with ``split`` every Weierstrass point is rational."""
        q = modulus(p)
        if g < 1 or 2 * g + 1 > q:
            raise ParameterError(f"cannot sample genus {g} over F_{q}")
        if split:
            roots = sorted(int(r) for r in rng.choice(q, size=2 * g + 1, replace=False))
            return cls(q, tuple(_linear_product(((r, 1) for r in roots), q)))
        for _ in range(1000):
            coeffs = [int(c) for c in rng.integers(0, q, size=2 * g + 1)] + [1]
            try:
                return cls(q, tuple(coeffs))
            except ParameterError:
                continue
        raise ResampleBudgetError("no squarefree f found")

    # region invariants ------------------------------------------------------------
    @property
    def genus(self) -> int:
        return (len(self.f) - 2) // 2

    @property
    def weierstrass_roots(self) -> Tuple[int, ...]:
        key = "roots"
        if key not in self._cache:
            roots, _ = _factor_roots(self.f, self.p)
            self._cache[key] = tuple(sorted(roots))
        return self._cache[key]  # type: ignore[return-value]

    def weierstrass_places(self) -> List[Place]:
        """Finite Weierstrass places in root order, then ``∞``."""
        return [Place.weierstrass(r) for r in self.weierstrass_roots] + [INFINITY]

    def fx(self, x: int) -> int:
        return _peval(self.f, x, self.p)

    def contains(self, place: Place) -> bool:
        if place.kind == "infinity":
            return True
        value = self.fx(place.x)
        if place.kind == "weierstrass":
            return value == 0 and place.y == 0
        return place.y != 0 and (place.y * place.y - value) % self.p == 0

    def require(self, place: Place) -> None:
        if not self.contains(place):
            raise ParameterError(f"place {place} is not on the curve")

    def places_over(self, x0: int) -> List[Place]:
        """Rational places above ``x = x0`` (empty when they are not rational)."""
        value = self.fx(x0)
        if value == 0:
            return [Place.weierstrass(x0)]
        if pow(value, (self.p - 1) // 2, self.p) != 1:
            return []
        y0 = int(sqrt_mod(value, self.p))
        return sorted([Place.affine(x0, y0), Place.affine(x0, (-y0) % self.p)])

    def rational_points(self) -> List[Place]:
        """All affine non-Weierstrass rational places, sorted."""
        if "points" in self._cache:
            return self._cache["points"]  # type: ignore[return-value]
        if self.p > MAX_ENUMERATION_PRIME:
            raise ParameterError(f"point enumeration refused for p={self.p}")
        xs = np.arange(self.p, dtype=np.int64)
        values = _peval_np(self.f, xs, self.p)
        squares = _np_powmod(values, (self.p - 1) // 2, self.p) == 1
        places: List[Place] = []
        for x0 in np.flatnonzero(squares & (values != 0)):
            y0 = int(sqrt_mod(int(values[x0]), self.p))
            places.append(Place.affine(int(x0), y0))
            places.append(Place.affine(int(x0), (-y0) % self.p))
        places.sort()
        self._cache["points"] = places
        return places

    def random_places(
        self, count: int, rng: np.random.Generator, *, exclude: Iterable[Place] = ()
    ) -> List[Place]:
        """Distinct random affine places with distinct x-coordinates."""
        banned = {pl.x for pl in exclude if pl.kind != "infinity"}
        pool = [pl for pl in self.rational_points() if pl.x not in banned]
        chosen: List[Place] = []
        used: set = set()
        order = rng.permutation(len(pool))
        for idx in order:
            pl = pool[int(idx)]
            if pl.x in used:
                continue
            chosen.append(pl)
            used.add(pl.x)
            if len(chosen) == count:
                return chosen
        raise ResampleBudgetError(f"only {len(chosen)} usable rational places")

    def random_effective_divisor(
        self, degree: int, rng: np.random.Generator, *, exclude: Iterable[Place] = ()
    ) -> Divisor:
        if degree == 0:
            return ZERO_DIVISOR
        return Divisor.sum_of(self.random_places(degree, rng, exclude=exclude))

    def canonical(self) -> Divisor:
        return Divisor.point(INFINITY, 2 * self.genus - 2)

    def pencil(self) -> Divisor:
        """The hyperelliptic ``g¹₂``, represented by ``2·∞``."""
        return Divisor.point(INFINITY, 2)

    def conjugate(self, d: Divisor) -> Divisor:
        return Divisor.of({pl.conjugate(self.p): n for pl, n in d.support})

    # region local expansions ------------------------------------------------------
    def local_xy(self, place: Place, n: int) -> Tuple[List[int], List[int]]:
        """Series of ``x`` and ``y`` in a uniformizer at an affine place, ``n`` terms."""
        key = ("xy", place, n)
        if key in self._cache:
            return self._cache[key]  # type: ignore[return-value]
        p = self.p
        if place.kind == "affine":
            xs = [place.x, 1] + [0] * max(0, n - 2)
            fs = _taylor_shift(self.f, place.x, p)
            ys = [0] * n
            ys[0] = place.y
            inv2y = inv_modp(2 * place.y, p)
            for k in range(1, n):
                acc = fs[k] if k < len(fs) else 0
                acc -= sum(ys[t] * ys[k - t] for t in range(1, k))
                ys[k] = (acc * inv2y) % p
            result = (xs[:n], ys)
        elif place.kind == "weierstrass":
            fs = _taylor_shift(self.f, place.x, p)
            inv1 = inv_modp(fs[1], p)
            s = [0] * n
            for _ in range(n):
                power = list(s)
                rhs = [0] * n
                if n > 2:
                    rhs[2] = 1
                for k in range(2, len(fs)):
                    power = _smul(power, s, n, p)
                    for t in range(n):
                        rhs[t] = (rhs[t] - fs[k] * power[t]) % p
                s = [(v * inv1) % p for v in rhs]
            xs = list(s)
            xs[0] = (xs[0] + place.x) % p
            ys = [0] * n
            if n > 1:
                ys[1] = 1
            result = (xs, ys)
        else:
            raise ParameterError("no affine expansion at infinity")
        self._cache[key] = result
        return result

    def monomial_series(self, place: Place, n: int, deg_a: int, deg_b: int) -> List[List[int]]:
        """Series of ``1, x, .., x^deg_a`` then ``y, x·y, .., x^deg_b·y`` at ``place``."""
        xs, ys = self.local_xy(place, n)
        out: List[List[int]] = []
        power = [1] + [0] * (n - 1)
        powers = []
        for _ in range(max(deg_a, deg_b) + 1):
            powers.append(power)
            power = _smul(power, xs, n, self.p)
        out.extend(powers[k] for k in range(deg_a + 1))
        out.extend(_smul(powers[k], ys, n, self.p) for k in range(deg_b + 1))
        return out

    def valuation(self, place: Place, h: CurveFunction) -> int:
        """Order of vanishing of ``h`` at a rational place."""
        return function_divisor(self, h).multiplicity(place)

    def evaluate(self, h: CurveFunction, places: Sequence[Place]) -> np.ndarray:
        xs = np.array([pl.x for pl in places], dtype=np.int64)
        ys = np.array([pl.y for pl in places], dtype=np.int64)
        num = (_peval_np(h.a, xs, self.p) + _peval_np(h.b, xs, self.p) * ys) % self.p
        den = _peval_np(h.q, xs, self.p)
        if np.any(den == 0):
            raise ParameterError("evaluation point is a pole of the denominator")
        return (num * _np_powmod(den, self.p - 2, self.p)) % self.p


# region Riemann-Roch ----------------------------------------------------------------------
@dataclass(frozen=True)
class RRBasis:
    """Basis of ``L(D)`` as numerators over a common denominator."""

    curve: HyperellipticCurve
    divisor: Divisor
    denominator: Poly
    numerators: Tuple[Tuple[Poly, Poly], ...]

    @property
    def dimension(self) -> int:
        return len(self.numerators)

    def functions(self) -> List[CurveFunction]:
        return [CurveFunction(a, b, self.denominator) for a, b in self.numerators]

    def combination(self, coeffs: Sequence[int]) -> CurveFunction:
        p = self.curve.p
        a: List[int] = []
        b: List[int] = []
        for c, (na, nb) in zip(coeffs, self.numerators):
            a = _padd(a, [(c * v) % p for v in na], p)
            b = _padd(b, [(c * v) % p for v in nb], p)
        return CurveFunction(tuple(a), tuple(b), self.denominator)

    def values_at(self, places: Sequence[Place]) -> np.ndarray:
        """``dimension × len(places)`` matrix of function values."""
        if not self.numerators:
            return np.zeros((0, len(places)), dtype=np.int64)
        return np.stack([self.curve.evaluate(h, places) for h in self.functions()])


@dataclass(frozen=True)
class _RRSystem:
    denominator: List[int]
    deg_a: int
    deg_b: int
    matrix: FieldMatrix


def _rr_system(c: HyperellipticCurve, d: Divisor) -> _RRSystem:
    p, g = c.p, c.genus
    exps: Dict[int, int] = {}
    for place, n in d.support:
        if place.is_infinite:
            continue
        c.require(place)
        need = n if place.kind == "affine" else -(-n // 2)
        if need > 0:
            exps[place.x] = max(exps.get(place.x, 0), need)
    denominator = _linear_product(sorted(exps.items()), p)
    deg_q = len(denominator) - 1
    top = d.multiplicity(INFINITY) + 2 * deg_q
    deg_a = math.floor(top / 2)
    deg_b = math.floor((top - 2 * g - 1) / 2)
    ncols = max(0, deg_a + 1) + max(0, deg_b + 1)

    to_check = {pl for pl in d.places() if not pl.is_infinite}
    for x0 in exps:
        to_check.update(c.places_over(x0))
    rows: List[Dict[int, int]] = []
    for place in sorted(to_check):
        ramified = place.kind == "weierstrass"
        order = exps.get(place.x, 0) * (2 if ramified else 1) - d.multiplicity(place)
        if order <= 0 or ncols == 0:
            continue
        series = c.monomial_series(place, order, deg_a, deg_b)
        for k in range(order):
            rows.append({col: s[k] for col, s in enumerate(series) if s[k]})
    return _RRSystem(denominator, deg_a, deg_b, FieldMatrix.from_row_dicts(rows, ncols, p))


def rr_dimension(c: HyperellipticCurve, d: Divisor) -> int:
    """``h⁰(D)``."""
    system = _rr_system(c, d)
    return system.matrix.ncols - rank(system.matrix)


def rr_basis(c: HyperellipticCurve, d: Divisor) -> RRBasis:
    """Basis of ``L(D) = {h : div(h) + D >= 0}``."""
    system = _rr_system(c, d)
    split = max(0, system.deg_a + 1)
    numerators = []
    for v in kernel_basis(system.matrix):
        numerators.append((tuple(_trim(v[:split])), tuple(_trim(v[split:]))))
    return RRBasis(c, d, tuple(system.denominator), tuple(numerators))


def h0(c: HyperellipticCurve, d: Divisor) -> int:
    return rr_dimension(c, d)


def h1(c: HyperellipticCurve, d: Divisor) -> int:
    return rr_dimension(c, c.canonical() - d)


def riemann_roch_defect(c: HyperellipticCurve, d: Divisor) -> int:
    """``h⁰(D) − h¹(D) − (deg D − g + 1)``; zero for every divisor."""
    return rr_dimension(c, d) - h1(c, d) - (d.degree - c.genus + 1)


def function_divisor(c: HyperellipticCurve, h: CurveFunction) -> Divisor:
    """Divisor of ``h``; raises if its support is not rational."""
    if h.is_zero():
        raise ParameterError("the zero function has no divisor")
    p, g = c.p, c.genus
    a, b, q = _trim(h.a), _trim(h.b), _trim(h.q)
    norm = _padd(_pmul(a, a, p), _pmul(_pmul(b, b, p), list(c.f), p), p, sign=-1)
    norm_roots, norm_split = _factor_roots(norm, p)
    q_roots, q_split = _factor_roots(q, p)
    if not (norm_split and q_split):
        raise ParameterError("divisor support is not rational")
    acc: Dict[Place, int] = {}
    for x0 in sorted(set(norm_roots) | set(q_roots)):
        k_norm, k_q = norm_roots.get(x0, 0), q_roots.get(x0, 0)
        above = c.places_over(x0)
        if not above:
            raise ParameterError(f"places above x={x0} are not rational")
        if above[0].kind == "weierstrass":
            acc[above[0]] = k_norm - 2 * k_q
            continue
        first = above[0]
        series = c.monomial_series(first, k_norm + 1, max(len(a) - 1, 0), max(len(b) - 1, 0))
        expansion = [0] * (k_norm + 1)
        coeffs = list(a) + [0] * (max(len(a) - 1, 0) + 1 - len(a)) + list(b)
        for coeff, s in zip(coeffs, series):
            if coeff:
                for t in range(k_norm + 1):
                    expansion[t] = (expansion[t] + coeff * s[t]) % p
        v_first = next(t for t, v in enumerate(expansion) if v)
        acc[first] = v_first - k_q
        acc[above[1]] = (k_norm - v_first) - k_q
    pole = max(2 * (len(a) - 1) if a else -1, 2 * (len(b) - 1) + 2 * g + 1 if b else -1)
    acc[INFINITY] = -pole + 2 * (len(q) - 1)
    div = Divisor.of(acc)
    if div.degree != 0:
        raise ParameterError("divisor of a function must have degree zero")
    return div


# region 2-torsion -------------------------------------------------------------------------
@dataclass(frozen=True)
class TwoTorsionClass:
    """``η_S = Σ_{i∈S} w_i − |S|·∞`` for an even set ``S`` of finite Weierstrass indices."""

    curve: HyperellipticCurve
    subset: Tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return not self.subset

    def divisor(self) -> Divisor:
        roots = self.curve.weierstrass_roots
        d = Divisor.sum_of(Place.weierstrass(roots[k]) for k in self.subset)
        return d - Divisor.point(INFINITY, len(self.subset))

    def witness(self) -> CurveFunction:
        """Function with divisor ``2·η_S``."""
        roots = self.curve.weierstrass_roots
        return CurveFunction(tuple(_linear_product(((roots[k], 1) for k in self.subset),
                                                   self.curve.p)))

    def __add__(self, other: "TwoTorsionClass") -> "TwoTorsionClass":
        return TwoTorsionClass(self.curve, tuple(sorted(set(self.subset) ^ set(other.subset))))


def _require_split(c: HyperellipticCurve) -> None:
    if len(c.weierstrass_roots) != 2 * c.genus + 1:
        raise ParameterError("2-torsion needs every Weierstrass point to be rational")


def two_torsion(c: HyperellipticCurve, subset: Iterable[int]) -> TwoTorsionClass:
    """The class of ``Σ_S w_i`` minus ``|S|/2`` copies of the pencil.

    Indices ``0..2g`` are the finite Weierstrass points in root order and ``2g+1`` is ``∞``.
    """
    _require_split(c)
    total = 2 * c.genus + 2
    s = set(subset)
    if not s or len(s) == total or len(s) % 2 or not s <= set(range(total)):
        raise ParameterError("S must be a nonempty proper even subset of Weierstrass indices")
    if total - 1 in s:
        s = set(range(total)) - s
    return TwoTorsionClass(c, tuple(sorted(s)))


def all_two_torsion(c: HyperellipticCurve) -> Iterable[TwoTorsionClass]:
    """Every 2-torsion class, trivial class first."""
    _require_split(c)
    n = 2 * c.genus + 1
    for size in range(0, n + 1, 2):
        for subset in combinations(range(n), size):
            yield TwoTorsionClass(c, subset)


# region linear series ---------------------------------------------------------------------
@dataclass(frozen=True)
class GrdDecomposition:
    r: int
    base: Optional[Divisor]
    witness: Optional[CurveFunction]


def grd_decompose(c: HyperellipticCurve, d: Divisor) -> GrdDecomposition:
    """Write ``|D| = r·g¹₂ + B`` with ``B`` the base divisor."""
    g = c.genus
    if not 0 <= d.degree <= 2 * g - 2:
        raise ParameterError(f"degree {d.degree} outside 0..2g-2")
    r = rr_dimension(c, d) - 1
    if r < 0:
        return GrdDecomposition(-1, None, None)
    residual = d - c.pencil().scale(r)
    basis = rr_basis(c, residual)
    if basis.dimension != 1:
        raise ParameterError("moving part is not a multiple of the pencil")
    h = basis.functions()[0]
    base = residual + function_divisor(c, h)
    if not base.is_effective():
        raise ParameterError("base divisor is not effective")
    return GrdDecomposition(r, base, h)


def diff_variety_member(c: HyperellipticCurve, line: Divisor, a: int, b: int) -> bool:
    """Whether ``L ∈ C_a − C_b``, exactly, via ``h⁰((g−1−b)·A − L) >= g − a − b``."""
    if a < 0 or b < 0:
        raise ParameterError("a and b must be nonnegative")
    if line.degree != a - b:
        raise ParameterError(f"deg L = {line.degree} but a - b = {a - b}")
    g = c.genus
    if a + b >= g:
        return True
    return rr_dimension(c, c.pencil().scale(g - 1 - b) - line) >= g - a - b


def find_difference_witness(
    c: HyperellipticCurve,
    line: Divisor,
    a: int,
    b: int,
    rng: np.random.Generator,
    trial_budget: int = 200,
) -> Optional[Divisor]:
    """Search an effective ``E_b`` with ``h⁰(L + E_b) >= 1``; ``None`` when the budget runs out."""
    if line.degree != a - b:
        raise ParameterError(f"deg L = {line.degree} but a - b = {a - b}")

    def works(e: Divisor) -> bool:
        return rr_dimension(c, line + e) >= 1

    negative = Divisor.of({pl: -n for pl, n in line.support if n < 0})
    if negative.degree <= b:
        candidate = negative + Divisor.point(INFINITY, b - negative.degree)
        if works(candidate):
            return candidate
    trials = 0
    lifted = rr_basis(c, line + c.pencil().scale(b))
    if lifted.dimension:
        while trials < trial_budget // 2:
            trials += 1
            coeffs = [int(v) for v in rng.integers(0, c.p, size=lifted.dimension)]
            h = lifted.combination(coeffs)
            if h.is_zero():
                continue
            try:
                effective = line + c.pencil().scale(b) + function_divisor(c, h)
            except ParameterError:
                continue
            points = effective.expand()
            candidate = c.conjugate(Divisor.sum_of(points[:b]))
            if works(candidate):
                return candidate
    pool = sorted(
        {pl for pl in line.places()} | {pl.conjugate(c.p) for pl in line.places()}
        | set(c.weierstrass_places())
    )
    pool += c.random_places(min(8, len(c.rational_points()) // 2), rng, exclude=pool)
    while trials < trial_budget:
        trials += 1
        picks = [pool[int(k)] for k in rng.integers(0, len(pool), size=b)]
        candidate = Divisor.sum_of(picks)
        if works(candidate):
            return candidate
    return None


def theta_Q_member(c: HyperellipticCurve, xi: Divisor, j: int) -> bool:
    """Membership of ``ξ`` in the theta divisor of ``∧^j`` of the canonical kernel bundle."""
    g = c.genus
    if xi.degree != g - 2 * j - 1:
        raise ParameterError(f"deg ξ must be g - 2j - 1 = {g - 2 * j - 1}")
    return rr_dimension(c, c.pencil().scale(g - 1 - j) - xi) >= 1


def diffvar1_sides(
    c: HyperellipticCurve,
    line: Divisor,
    a: int,
    j: int,
    rng: np.random.Generator,
    samples: int = 20,
) -> Tuple[bool, bool]:
    """Both sides of ``L + C_a ⊂ C_{g−j−1} − C_j  ⇔  L ∈ C_{g−j−a−1} − C_j``.

    The left side is sampled over random effective ``x`` of degree ``a``.
    """
    g = c.genus
    if line.degree != g - 2 * j - 1 - a:
        raise ParameterError("deg L must be g - 2j - 1 - a")
    twist = c.pencil().scale(g - 1 - j) - line
    right = rr_dimension(c, twist) >= a + 1
    left = True
    for _ in range(samples):
        x = c.random_effective_divisor(a, rng)
        if rr_dimension(c, twist - x) < 1:
            left = False
            break
    return left, right


def secant_nonempty(
    c: Union[HyperellipticCurve, "QuarticBundle"], line: Optional[Divisor], p: int, d: int
) -> bool:
    """``V^{p+1}_{p+2}(L) ≠ ∅``, decided by ``L − K ∈ C_{p+2} − C_{2g−d+p}``."""
    if isinstance(c, QuarticBundle):
        if (d, p) != (6, 0):
            raise ParameterError("plane quartic models handle d = 6, p = 0 only")
        return c.h0_minus_canonical() >= 1
    if line is None or line.degree != d:
        raise ParameterError("L must be a divisor of degree d")
    if h1(c, line) != 0:
        raise ParameterError("special L reduces to the ordinary syzygy question")
    g = c.genus
    return diff_variety_member(c, line - c.canonical(), p + 2, 2 * g - d + p)


def twisted_wedge_cohomology(
    c: HyperellipticCurve, eta: Union[TwoTorsionClass, Divisor], j: int, m: int
) -> Tuple[int, int]:
    """``(h⁰(η + m·A), h¹(η + m·A))``, the latter as ``h⁰((g−1−m)·A − η)``."""
    if j < 0 or m < 0:
        raise ParameterError("j and m must be nonnegative")
    twist = eta.divisor() if isinstance(eta, TwoTorsionClass) else eta
    h0 = rr_dimension(c, twist + c.pencil().scale(m))
    h1_value = rr_dimension(c, c.pencil().scale(c.genus - 1 - m) - twist)
    return h0, h1_value


def interpolation_h0(c: HyperellipticCurve, pole_order: int, vanishing: Sequence[Place]) -> int:
    """``h⁰(N·∞ − Σ P)`` for distinct finite places, by evaluating monomials.

    A polynomial ``a + b·y`` vanishes at a Weierstrass place exactly when ``a`` vanishes
    there, so one evaluation per place suffices.
    """
    if pole_order < 0:
        return 0
    if len(set(vanishing)) != len(vanishing) or any(pl.is_infinite for pl in vanishing):
        raise ParameterError("interpolation needs distinct finite places")
    g, p = c.genus, c.p
    monomials = [(k, 0) for k in range(pole_order // 2 + 1)]
    monomials += [(k, 1) for k in range((pole_order - 2 * g - 1) // 2 + 1)]
    if not vanishing:
        return len(monomials)
    rows = [
        [pow(pl.x, k, p) * (pl.y if with_y else 1) % p for k, with_y in monomials]
        for pl in vanishing
    ]
    return len(monomials) - rank(FieldMatrix.from_rows(rows, p, ncols=len(monomials)))


def torsion_class_h0(c: HyperellipticCurve, eta: TwoTorsionClass, k: int) -> int:
    """``h⁰(η + k·∞)`` via the interpolation oracle, using ``η ~ |S|·∞ − Σ_S w``."""
    finite = [pl for pl in eta.divisor().places() if not pl.is_infinite]
    return interpolation_h0(c, k + len(eta.subset), finite)


def clifford_index(model: object) -> int:
    if isinstance(model, HyperellipticCurve):
        return 0
    if isinstance(model, (PlaneQuartic, QuarticBundle, Genus4Curve)):
        return 1
    raise ParameterError(f"no Clifford index known for {type(model).__name__}")


# region plane quartics ---------------------------------------------------------------------
def _ternary_monomials(degree: int) -> List[Tuple[int, int, int]]:
    return [
        (i, j, degree - i - j) for i in range(degree, -1, -1) for j in range(degree - i, -1, -1)
    ]


QUARTIC_MONOMIALS = _ternary_monomials(4)
CONIC_MONOMIALS = _ternary_monomials(2)
CUBIC_MONOMIALS = _ternary_monomials(3)


def _eval_monomials(points: np.ndarray, monomials: Sequence[Tuple[int, ...]], p: int) -> np.ndarray:
    """``len(monomials) × len(points)`` matrix of monomial values mod ``p``."""
    pts = np.asarray(points, dtype=np.int64) % p
    top = max((max(m) for m in monomials), default=0)
    powers = [np.ones_like(pts)]
    for _ in range(top):
        powers.append((powers[-1] * pts) % p)
    out = np.ones((len(monomials), pts.shape[0]), dtype=np.int64)
    for r, mono in enumerate(monomials):
        for var, e in enumerate(mono):
            if e:
                out[r] = (out[r] * powers[e][:, var]) % p
    return out


def _normalize_projective(v: Sequence[int], p: int) -> Tuple[int, ...]:
    lead = next(x for x in v if x % p)
    inv = inv_modp(lead, p)
    return tuple((x * inv) % p for x in v)


@dataclass(frozen=True, eq=False)
class PlaneQuartic:
    """Smooth plane quartic ``F(x, y, z) = 0`` (genus 3)."""

    p: int
    coeffs: Tuple[int, ...]
    points: Tuple[Tuple[int, int, int], ...]
    smooth: bool = True

    genus = 3

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[int], p: int) -> "PlaneQuartic":
        q = modulus(p)
        if q > 5000:
            raise ParameterError("plane quartic point enumeration needs p <= 5000")
        c = tuple(int(v) % q for v in coeffs)
        points = _quartic_points(c, q)
        smooth = _quartic_smooth(c, points, q)
        return cls(q, c, tuple(points), smooth)

    @classmethod
    def fermat(cls, p: int) -> "PlaneQuartic":
        coeffs = [1 if m in ((4, 0, 0), (0, 4, 0), (0, 0, 4)) else 0 for m in QUARTIC_MONOMIALS]
        return cls.from_coefficients(coeffs, p)

    @property
    def point_count(self) -> int:
        return len(self.points)

    def within_weil_bound(self) -> bool:
        return abs(self.point_count - (self.p + 1)) <= 2 * self.genus * math.sqrt(self.p)

    def point_array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64)

    def on_line(
        self, a: Tuple[int, int, int], b: Tuple[int, int, int]
    ) -> List[Tuple[int, int, int]]:
        """Rational points of the curve on the line through ``a`` and ``b``."""
        pts = self.point_array()
        cross = np.array(
            [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]],
            dtype=np.int64,
        ) % self.p
        hits = (pts @ cross) % self.p == 0
        return [self.points[k] for k in np.flatnonzero(hits)]


def _quartic_points(coeffs: Sequence[int], p: int) -> List[Tuple[int, int, int]]:
    xs, ys = np.meshgrid(np.arange(p, dtype=np.int64), np.arange(p, dtype=np.int64), indexing="ij")
    affine = np.stack([xs.ravel(), ys.ravel(), np.ones(p * p, dtype=np.int64)], axis=1)
    at_infinity = np.array([[x, 1, 0] for x in range(p)] + [[1, 0, 0]], dtype=np.int64)
    candidates = np.concatenate([affine, at_infinity])
    values = np.zeros(candidates.shape[0], dtype=np.int64)
    monos = _eval_monomials(candidates, QUARTIC_MONOMIALS, p)
    for c, row in zip(coeffs, monos):
        if c:
            values = (values + c * row) % p
    return [tuple(int(v) for v in candidates[k]) for k in np.flatnonzero(values == 0)]


def _quartic_smooth(coeffs: Sequence[int], points: Sequence[Tuple[int, int, int]], p: int) -> bool:
    if not points:
        return True
    pts = np.array(points, dtype=np.int64)
    nonzero = np.zeros(pts.shape[0], dtype=bool)
    for var in range(3):
        grads = []
        for c, mono in zip(coeffs, QUARTIC_MONOMIALS):
            if c and mono[var]:
                lowered = list(mono)
                lowered[var] -= 1
                grads.append(((c * mono[var]) % p, tuple(lowered)))
        if not grads:
            continue
        values = np.zeros(pts.shape[0], dtype=np.int64)
        monos = _eval_monomials(pts, [m for _, m in grads], p)
        for (c, _), row in zip(grads, monos):
            values = (values + c * row) % p
        nonzero |= values != 0
    return bool(np.all(nonzero))


def plane_quartic_sample(
    p: int, rng: np.random.Generator, *, min_points: int = 40, budget: int = 50
) -> PlaneQuartic:
    """Random smooth plane quartic with enough rational points."""
    for attempt in range(budget):
        coeffs = [int(v) for v in rng.integers(0, p, size=len(QUARTIC_MONOMIALS))]
        curve = PlaneQuartic.from_coefficients(coeffs, p)
        if curve.smooth and curve.point_count >= min_points and curve.within_weil_bound():
            return curve
        logger.debug(f"quartic sample {attempt} rejected (smooth={curve.smooth})")
    raise ResampleBudgetError("no smooth plane quartic within the budget")


@dataclass(frozen=True)
class QuarticBundle:
    """``L = 3H − E`` on a plane quartic, ``E`` six distinct rational points."""

    curve: PlaneQuartic
    removed: Tuple[Tuple[int, int, int], ...]

    degree = 6

    def __post_init__(self) -> None:
        if len(set(self.removed)) != 6:
            raise ParameterError("E must consist of six distinct points")

    def cubic_sections(self) -> List[List[int]]:
        """Coefficient vectors of the cubics through ``E`` (a basis of ``H⁰(L)``)."""
        values = _eval_monomials(np.array(self.removed), CUBIC_MONOMIALS, self.curve.p)
        return kernel_basis(FieldMatrix.from_array(values.T, self.curve.p))

    def h0_minus_canonical(self) -> int:
        """``h⁰(L − K)``: the number of independent conics through ``E``."""
        values = _eval_monomials(np.array(self.removed), CONIC_MONOMIALS, self.curve.p)
        return len(CONIC_MONOMIALS) - rank(FieldMatrix.from_array(values.T, self.curve.p))

    def is_nonspecial(self) -> bool:
        return len(self.cubic_sections()) == 4


def quartic_bundle_random(curve: PlaneQuartic, rng: np.random.Generator) -> QuarticBundle:
    picks = rng.choice(curve.point_count, size=6, replace=False)
    return QuarticBundle(curve, tuple(curve.points[int(k)] for k in sorted(picks)))


def quartic_bundle_on_two_lines(
    curve: PlaneQuartic, rng: np.random.Generator, budget: int = 400
) -> QuarticBundle:
    """``E`` = three points from each of two lines meeting the curve in four rational points.

    Then ``2H − E`` is the remaining pair of points, so ``L = K + x + y``.
    """
    lines: List[List[Tuple[int, int, int]]] = []
    for _ in range(budget):
        a, b = (curve.points[int(k)] for k in rng.choice(curve.point_count, size=2, replace=False))
        on = curve.on_line(a, b)
        if len(on) != 4:
            continue
        if lines and set(on) & set(lines[0]):
            continue
        lines.append(on)
        if len(lines) == 2:
            removed = tuple(lines[0][:3] + lines[1][:3])
            return QuarticBundle(curve, removed)
    raise ResampleBudgetError("no pair of fully split lines found")


# region genus 4 -------------------------------------------------------------------------------
SEGRE_QUADRIC = ((0, 0, 0, 1), (0, 0, -1, 0), (0, -1, 0, 0), (1, 0, 0, 0))
CONE_QUADRIC = ((0, 0, 1, 0), (0, -2, 0, 0), (1, 0, 0, 0), (0, 0, 0, 0))


def quadric_rulings(quadric: Sequence[Sequence[int]], p: int) -> int:
    """Number of rulings of the quadric surface with polar matrix ``quadric``.

    Rank 4 is a smooth quadric with two rulings, rank 3 a cone with one.
    """
    q = modulus(p)
    if q == 2:
        raise ParameterError("quadric rank needs an odd prime")
    r = rank(FieldMatrix.from_array(np.array(quadric, dtype=np.int64) % q, q))
    if r < 3:
        raise ParameterError(f"a rank {r} quadric contains no canonical genus-4 curve")
    return 2 if r == 4 else 1


def _forms_rank(coords: np.ndarray, degree: int, p: int) -> int:
    cols = [np.prod(coords[:, list(m)], axis=1) % p
            for m in combinations_with_replacement(range(coords.shape[1]), degree)]
    evaluation = np.stack(cols, axis=1)
    return rank(FieldMatrix.from_array(evaluation, p))


@dataclass(frozen=True, eq=False)
class Genus4Curve:
    """Smooth ``(3,3)`` curve on ``P¹×P¹``, canonical in ``P³`` on ``X0·X3 = X1·X2``."""

    p: int
    coeffs: Tuple[Tuple[int, ...], ...]
    points: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...]
    smooth: bool = True
    quadric: Tuple[Tuple[int, ...], ...] = SEGRE_QUADRIC

    genus = 4

    @property
    def rulings(self) -> int:
        return quadric_rulings(self.quadric, self.p)

    def canonical(self) -> np.ndarray:
        return self.segre()

    def h0_forms(self, degree: int) -> int:
        """``h⁰(O_C(degree))`` from the rank of degree-``degree`` forms on the points."""
        return _forms_rank(self.canonical(), degree, self.p)

    def segre(self, points: Optional[Sequence] = None) -> np.ndarray:
        pts = self.points if points is None else points
        return np.array(
            [[s0 * u0, s0 * u1, s1 * u0, s1 * u1] for (s0, s1), (u0, u1) in pts], dtype=np.int64
        ) % self.p

    def fibers(self) -> Dict[Tuple[int, int], List[Tuple[Tuple[int, int], Tuple[int, int]]]]:
        """Rational points grouped by the first ruling ``A = O(1,0)``."""
        out: Dict[Tuple[int, int], List] = {}
        for pt in self.points:
            out.setdefault(pt[0], []).append(pt)
        return out

    def split_fibers(self) -> List[List[Tuple[Tuple[int, int], Tuple[int, int]]]]:
        return [pts for pts in self.fibers().values() if len(pts) == 3]

    def h0_ruling(self, a: int, points: Sequence) -> int:
        """``h⁰(O(a, 0)(−Z))`` for reduced ``Z``: degree-``a`` forms in ``s`` vanishing on ``Z``."""
        svals = sorted({pt[0] for pt in points})
        if not svals:
            return a + 1
        rows = [[pow(s0, k, self.p) * pow(s1, a - k, self.p) % self.p for k in range(a + 1)]
                for s0, s1 in svals]
        return a + 1 - rank(FieldMatrix.from_rows(rows, self.p))

    def h0_hyperplane(self, points: Sequence) -> int:
        """``h⁰(K − Z)``: hyperplanes of ``P³`` through the Segre images of ``Z``."""
        if not points:
            return 4
        return 4 - rank(FieldMatrix.from_array(self.segre(points), self.p))


def _binary_values(p: int, degree: int) -> Tuple[List[Tuple[int, int]], np.ndarray]:
    pts = [(x, 1) for x in range(p)] + [(1, 0)]
    arr = np.array(pts, dtype=np.int64)
    vals = np.stack(
        [_np_powmod(arr[:, 0], degree - k, p) * _np_powmod(arr[:, 1], k, p) % p
         for k in range(degree + 1)], axis=1
    )
    return pts, vals


def genus4_from_coefficients(coeffs: Sequence[Sequence[int]], p: int) -> Genus4Curve:
    q = modulus(p)
    if q > 5000:
        raise ParameterError("genus-4 point enumeration needs p <= 5000")
    g = np.array(coeffs, dtype=np.int64) % q
    pts, cubic = _binary_values(q, 3)
    table = ((cubic @ g) % q @ cubic.T) % q
    idx_s, idx_u = np.nonzero(table == 0)
    points = tuple((pts[int(a)], pts[int(b)]) for a, b in zip(idx_s, idx_u))

    smooth = True
    if points:
        _, quad = _binary_values(q, 2)
        down, up = np.arange(3, 0, -1), np.arange(1, 4)
        # partial derivatives: in s they are (quadric in s, cubic in u), in u the reverse
        partials_s = [(down[:, None] * g[:3, :]) % q, (up[:, None] * g[1:, :]) % q]
        partials_u = [(g[:, :3] * down[None, :]) % q, (g[:, 1:] * up[None, :]) % q]
        s_idx, u_idx = idx_s, idx_u
        nonzero = np.zeros(len(points), dtype=bool)
        for ds in partials_s:
            nonzero |= np.einsum("nk,kc,nc->n", quad[s_idx], ds, cubic[u_idx]) % q != 0
        for du in partials_u:
            nonzero |= np.einsum("nk,kc,nc->n", cubic[s_idx], du, quad[u_idx]) % q != 0
        smooth = bool(np.all(nonzero))
    return Genus4Curve(q, tuple(tuple(int(v) for v in row) for row in g), points, smooth)


@dataclass(frozen=True, eq=False)
class Genus4Cone:
    """Cubic section ``w³ + a₂w² + a₄w + a₆`` of the cone ``X0·X2 = X1²``.

    ``a_k`` are binary forms of degree ``k`` in ``(s, t)``; a point ``((s, t), w)`` sits at
    ``(s², st, t², w)``. Both trigonal pencils coincide with the single ruling.
    """

    p: int
    forms: Tuple[Tuple[int, ...], ...]
    points: Tuple[Tuple[Tuple[int, int], int], ...]
    quadric: Tuple[Tuple[int, ...], ...] = CONE_QUADRIC

    genus = 4

    @property
    def rulings(self) -> int:
        return quadric_rulings(self.quadric, self.p)

    def canonical(self) -> np.ndarray:
        return np.array(
            [[s * s, s * t, t * t, w] for (s, t), w in self.points], dtype=np.int64
        ) % self.p

    def h0_forms(self, degree: int) -> int:
        return _forms_rank(self.canonical(), degree, self.p)


def genus4_cone(
    a2: Sequence[int], a4: Sequence[int], a6: Sequence[int], p: int
) -> Genus4Cone:
    q = modulus(p)
    if q > 5000:
        raise ParameterError("genus-4 point enumeration needs p <= 5000")
    if (len(a2), len(a4), len(a6)) != (3, 5, 7):
        raise ParameterError("cone forms need 3, 5 and 7 coefficients")
    pts, _ = _binary_values(q, 0)
    ws = np.arange(q, dtype=np.int64)
    # rows: base point (s, t); columns: w
    values = _np_powmod(ws, 3, q)[None, :].repeat(len(pts), axis=0)
    for power, form in ((2, a2), (1, a4), (0, a6)):
        _, monomials = _binary_values(q, len(form) - 1)
        coef = monomials @ (np.array(form, dtype=np.int64) % q) % q
        values = (values + coef[:, None] * _np_powmod(ws, power, q)[None, :]) % q
    rows, cols = np.nonzero(values == 0)
    points = tuple((pts[int(a)], int(b)) for a, b in zip(rows, cols))
    forms = tuple(tuple(int(v) % q for v in f) for f in (a2, a4, a6))
    return Genus4Cone(q, forms, points)


def genus4_sample(
    p: int, rng: np.random.Generator, *, min_split_fibers: int = 8, budget: int = 50
) -> Genus4Curve:
    """Random smooth ``(3,3)`` curve with enough totally split trigonal fibers."""
    for attempt in range(budget):
        coeffs = rng.integers(0, p, size=(4, 4))
        curve = genus4_from_coefficients(coeffs.tolist(), p)
        if curve.smooth and len(curve.split_fibers()) >= min_split_fibers:
            return curve
        logger.debug(f"genus-4 sample {attempt} rejected")
    raise ResampleBudgetError("no smooth genus-4 curve within the budget")


def diffcon_g4_check(
    curve: Union[Genus4Curve, Genus4Cone], rng: np.random.Generator, samples: int = 50
) -> Dict[str, object]:
    """``L = K − 2A``: ``L + x ∈ C_2 − C_1`` for sampled ``x``, yet ``L ∉ C_1 − C_1``.

    On a quadric cone ``K = 2A`` and ``L`` is trivial; the report is flagged ``degenerate``
    and carries no membership verdicts.
    """
    if curve.rulings == 1:
        logger.warning("canonical quadric is a cone: one trigonal pencil, nothing to test")
        return {
            "deg_L": 0,
            "rulings": 1,
            "degenerate": True,
            "plus_point_member": None,
            "not_in_C1_minus_C1": None,
            "mixed_member": None,
            "samples": 0,
        }
    assert isinstance(curve, Genus4Curve)
    fibers = curve.split_fibers()
    if not fibers:
        raise ParameterError("no totally split fiber to sample from")
    plus_point = []
    for _ in range(samples):
        fiber = fibers[int(rng.integers(0, len(fibers)))]
        k = int(rng.integers(0, 3))
        x, y = fiber[k], fiber[(k + 1) % 3]
        # h⁰(L + x + y) = h⁰(2A − x − y) − 1
        plus_point.append(curve.h0_ruling(2, [x, y]) - 1 >= 1)
    not_in_difference = []
    mixed = []
    for _ in range(samples):
        y = curve.points[int(rng.integers(0, len(curve.points)))]
        # h⁰(L + y) = h⁰(2A − y) − 2
        not_in_difference.append(curve.h0_ruling(2, [y]) - 2 == 0)
        # K − A − A' is trivial: h⁰(O + y) = h⁰(K − y) − 2
        mixed.append(curve.h0_hyperplane([y]) - 2 >= 1)
    return {
        "deg_L": 0,
        "rulings": curve.rulings,
        "degenerate": False,
        "plus_point_member": all(plus_point),
        "not_in_C1_minus_C1": all(not_in_difference),
        "mixed_member": all(mixed),
        "samples": samples,
    }


# region suites --------------------------------------------------------------------------------
def difference_variety_suite(
    p: int, seed: int = 0, instances: int = 200, trial_budget: int = 200, max_genus: int = 7
) -> Dict[str, object]:
    """Closed-form membership in ``C_a − C_b`` against the randomized witness search.

    Half of the instances are built as ``D_a − E_b`` and so lie in the difference variety;
    the other half are ``D_{a+1} − E_{b+1}``, which usually do not.
    """
    rng = np.random.default_rng(seed)
    positive_failures: List[Dict[str, object]] = []
    negatives_witnessed: List[Dict[str, object]] = []
    sides_mismatch: List[Dict[str, object]] = []
    verdicts = {True: 0, False: 0}
    for k in range(instances):
        g = int(rng.integers(2, max_genus + 1))
        c = HyperellipticCurve.random(g, p, rng)
        b = int(rng.integers(0, (g - 1) // 2 + 1))
        a = int(rng.integers(0, g - b))
        extra = k % 2
        line = (c.random_effective_divisor(a + extra, rng)
                - c.conjugate(c.random_effective_divisor(b + extra, rng)))
        closed = diff_variety_member(c, line, a, b)
        verdicts[closed] += 1
        witness = find_difference_witness(c, line, a, b, rng, trial_budget)
        record = {"g": g, "a": a, "b": b, "f": list(c.f), "L": str(line)}
        if closed and witness is None:
            positive_failures.append(record)
        if not closed and witness is not None:
            negatives_witnessed.append(record)
        j = int(rng.integers(0, (g - 1) // 2 + 1))
        top = g - 2 * j - 1
        if top >= 0:
            a1 = int(rng.integers(0, top + 1))
            xi = c.random_effective_divisor(top - a1, rng)
            left, right = diffvar1_sides(c, xi, a1, j, rng)
            if left != right:
                sides_mismatch.append({"g": g, "a": a1, "j": j, "L": str(xi)})
    logger.info(f"difference-variety suite: {verdicts[True]} members, "
                f"{len(positive_failures)} positive failures")
    return {
        "instances": instances,
        "members": verdicts[True],
        "non_members": verdicts[False],
        "positive_failures": positive_failures,
        "negatives_witnessed": negatives_witnessed,
        "sides_mismatch": sides_mismatch,
    }


def torsion_scan(
    c: HyperellipticCurve, p: int, crosscheck: int = 50, seed: int = 0
) -> Dict[str, object]:
    """``h⁰`` and ``h¹`` of ``η + (2p+2−j)·A`` for every 2-torsion class and ``j <= p``.

    ``crosscheck`` random classes are recomputed with :func:`torsion_class_h0`.
    """
    if c.genus != 2 * p + 3:
        raise ParameterError(f"the scan runs at genus 2p+3 = {2 * p + 3}")
    rows: List[Dict[str, object]] = []
    vanishing: List[List[int]] = []
    classes = list(all_two_torsion(c))
    for eta in classes:
        dims = [twisted_wedge_cohomology(c, eta, j, 2 * p + 2 - j) for j in range(p + 1)]
        rows.append({"S": list(eta.subset), "h0": [d[0] for d in dims],
                     "h1": [d[1] for d in dims]})
        if all(d[1] == 0 for d in dims):
            vanishing.append(list(eta.subset))
    rng = np.random.default_rng(seed)
    disagreements = []
    for idx in rng.choice(len(classes), size=min(crosscheck, len(classes)), replace=False):
        eta, row = classes[int(idx)], rows[int(idx)]
        for j in range(p + 1):
            # A = 2∞; h¹(η + mA) = h⁰(η + (g−1−m)A) = h⁰(η + jA)
            expected = (
                torsion_class_h0(c, eta, 2 * (2 * p + 2 - j)),
                torsion_class_h0(c, eta, 2 * j),
            )
            if expected != (row["h0"][j], row["h1"][j]):  # type: ignore[index]
                disagreements.append({"S": list(eta.subset), "j": j})
    logger.info(f"torsion scan: {len(rows)} classes, {len(vanishing)} with vanishing h¹")
    return {
        "genus": c.genus,
        "p": p,
        "f": list(c.f),
        "classes": len(rows),
        "rows": rows,
        "vanishing": vanishing,
        "crosschecked": min(crosscheck, len(classes)),
        "disagreements": disagreements,
    }
