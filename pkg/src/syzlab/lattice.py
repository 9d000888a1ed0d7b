"""Picard lattices of the K3 surfaces used for vanishing arguments, and lemma certificates.

The catalog holds six lattices:

* ``theta`` / ``theta_hat`` on ``{H, eta}`` (plus ``E``) for odd genus ``g = 2i+1``,
* ``xi`` / ``xi_hat`` on ``{H, eta}`` (plus ``E``) for even genus ``g = 2i``,
* ``nikulin_lambda`` = ``Z·L ⊕ N`` and ``nikulin_t_hat`` = ``<L, E> ⊕ N`` where ``N`` is the
  Nikulin lattice spanned by eight disjoint (-2)-classes ``N_1..N_8`` and their half sum
  ``e``. ``N`` is stored in the integral basis ``{N_1, ..., N_7, e}``.

Each certifier replays the finite case analysis of one lemma: it enumerates the candidate
set the proof reduces to, re-verifies the bounding inequality for the given parameters, and
returns a :class:`Certificate` with a verdict.
"""

from __future__ import annotations

import logging
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import (
    Any,
    Callable,
    Dict,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .exceptions import ParameterError, UnboundedSearchError

logger = logging.getLogger(__name__)

LATTICE_KINDS = ("theta", "theta_hat", "xi", "xi_hat", "nikulin_lambda", "nikulin_t_hat")
NIKULIN_KINDS = ("nikulin_lambda", "nikulin_t_hat")
DEFAULT_RADIUS = 12
MAX_BOX_SIZE = 5_000_000
MAX_G = 101
MAX_P = 50

_COMPARATORS: Dict[str, Callable[[Any, Any], Any]] = {
    "<": operator.lt,
    "<=": operator.le,
    "==": operator.eq,
    "!=": operator.ne,
    ">=": operator.ge,
    ">": operator.gt,
}


@dataclass(frozen=True)
class LatticeClass:
    """Integer coordinate vector in a lattice's integral basis."""

    coords: Tuple[int, ...]

    def __add__(self, other: "LatticeClass") -> "LatticeClass":
        _same_rank(self, other)
        return LatticeClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "LatticeClass") -> "LatticeClass":
        _same_rank(self, other)
        return LatticeClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "LatticeClass":
        return LatticeClass(tuple(-a for a in self.coords))

    def scale(self, k: int) -> "LatticeClass":
        return LatticeClass(tuple(k * a for a in self.coords))

    def __rmul__(self, k: int) -> "LatticeClass":
        return self.scale(k)

    def __len__(self) -> int:
        return len(self.coords)

    def to_json(self) -> List[int]:
        return list(self.coords)


def _same_rank(x: LatticeClass, y: LatticeClass) -> None:
    if len(x.coords) != len(y.coords):
        raise ParameterError(f"class ranks differ: {len(x.coords)} vs {len(y.coords)}")


@dataclass(frozen=True)
class GramLattice:
    """Integral quadratic form with a named basis."""

    name: str
    gram: Tuple[Tuple[int, ...], ...]
    basis_labels: Tuple[str, ...]
    kind: Optional[str] = None
    params: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        n = len(self.gram)
        if any(len(row) != n for row in self.gram):
            raise ParameterError("Gram matrix must be square")
        if any(self.gram[i][j] != self.gram[j][i] for i in range(n) for j in range(n)):
            raise ParameterError("Gram matrix must be symmetric")
        if len(self.basis_labels) != n:
            raise ParameterError("one label per basis vector required")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def param_map(self) -> Dict[str, int]:
        return dict(self.params)

    def matrix(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64)

    def basis_vector(self, label: str) -> LatticeClass:
        try:
            idx = self.basis_labels.index(label)
        except ValueError:
            raise ParameterError(f"lattice {self.name} has no basis vector '{label}'") from None
        return LatticeClass(tuple(1 if k == idx else 0 for k in range(self.rank)))

    def vector(self, **coeffs: int) -> LatticeClass:
        """Build ``Σ coeff·label``, e.g. ``lat.vector(H=1, eta=-1)``."""
        coords = [0] * self.rank
        for label, value in coeffs.items():
            try:
                coords[self.basis_labels.index(label)] += value
            except ValueError:
                raise ParameterError(f"lattice {self.name} has no basis vector '{label}'") from None
        return LatticeClass(tuple(coords))

    def zero(self) -> LatticeClass:
        return LatticeClass((0,) * self.rank)

    def pairing(self, x: LatticeClass, y: LatticeClass) -> int:
        return pairing(self, x, y)

    def square(self, x: LatticeClass) -> int:
        return pairing(self, x, x)


def pairing(lat: GramLattice, x: LatticeClass, y: LatticeClass) -> int:
    """``xᵀ · gram · y``."""
    if len(x.coords) != lat.rank or len(y.coords) != lat.rank:
        raise ParameterError(
            f"dimension mismatch: lattice rank {lat.rank}, classes {len(x)} and {len(y)}"
        )
    total = 0
    for i, xi in enumerate(x.coords):
        if xi:
            row = lat.gram[i]
            total += xi * sum(row[j] * yj for j, yj in enumerate(y.coords) if yj)
    return total


# region catalog -------------------------------------------------------------------------
def _theta_params(g: int, p: int) -> int:
    if g < 3 or g % 2 == 0:
        raise ParameterError(f"theta lattices need odd g >= 3, got g={g}")
    i = (g - 1) // 2
    if p < max(1, i - 1):
        raise ParameterError(f"theta lattices need p >= max(1, i-1) = {max(1, i - 1)}, got p={p}")
    return i


def _xi_params(g: int, p: int) -> int:
    if g < 4 or g % 2:
        raise ParameterError(f"xi lattices need even g >= 4, got g={g}")
    i = g // 2
    if p < i - 1 or p < 1:
        raise ParameterError(f"xi lattices need p >= i-1 = {i - 1}, got p={p}")
    return i


def _nikulin_block() -> List[List[int]]:
    block = [[0] * 8 for _ in range(8)]
    for j in range(7):
        block[j][j] = -2
        block[j][7] = block[7][j] = -1
    block[7][7] = -4
    return block


def _direct_sum(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> List[List[int]]:
    n, m = len(a), len(b)
    out = [[0] * (n + m) for _ in range(n + m)]
    for i in range(n):
        for j in range(n):
            out[i][j] = a[i][j]
    for i in range(m):
        for j in range(m):
            out[n + i][n + j] = b[i][j]
    return out


def _freeze(rows: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in rows)


NIKULIN_LABELS = tuple(f"N{j}" for j in range(1, 8)) + ("e",)


def make_lattice(kind: str, g: int, p: Optional[int] = None) -> GramLattice:
    """Build a catalog lattice with Gram entries exactly as in the construction."""
    if kind in ("theta", "theta_hat"):
        if p is None:
            raise ParameterError(f"{kind} needs p")
        i = _theta_params(g, p)
        gram = [[4 * p + 4, 2 * p - 2 * i], [2 * p - 2 * i, -4]]
        labels: Tuple[str, ...] = ("H", "eta")
        if kind == "theta_hat":
            gram = [row + [0] for row in gram] + [[0, 0, 0]]
            gram[0][2] = gram[2][0] = 2
            labels += ("E",)
        return GramLattice(f"{kind}(g={g},p={p})", _freeze(gram), labels, kind,
                           (("g", g), ("p", p), ("i", i)))
    if kind in ("xi", "xi_hat"):
        if p is None:
            raise ParameterError(f"{kind} needs p")
        i = _xi_params(g, p)
        off = 2 * p - 2 * i + 1
        gram = [[4 * p + 4, off], [off, -4]]
        labels = ("H", "eta")
        if kind == "xi_hat":
            gram = [row + [0] for row in gram] + [[0, 0, 0]]
            gram[0][2] = gram[2][0] = 2
            labels += ("E",)
        return GramLattice(f"{kind}(g={g},p={p})", _freeze(gram), labels, kind,
                           (("g", g), ("p", p), ("i", i)))
    if kind in NIKULIN_KINDS:
        if g < 3 or g % 2 == 0:
            raise ParameterError(f"Nikulin lattices need odd g >= 3, got g={g}")
        if kind == "nikulin_lambda":
            head: List[List[int]] = [[2 * g - 2]]
            labels = ("L",)
        else:
            head = [[2 * g - 2, 2], [2, 0]]
            labels = ("L", "E")
        gram = _direct_sum(head, _nikulin_block())
        return GramLattice(f"{kind}(g={g})", _freeze(gram), labels + NIKULIN_LABELS, kind,
                           (("g", g),))
    raise ParameterError(f"unknown lattice kind '{kind}' (expected one of {LATTICE_KINDS})")


def signature(gram: Sequence[Sequence[int]]) -> Tuple[int, int, int]:
    """Exact ``(positive, negative, zero)`` counts by symmetric LDLᵀ elimination."""
    a = [[Fraction(v) for v in row] for row in gram]
    n = len(a)
    pos = neg = zero = 0
    active = list(range(n))
    while active:
        pivot = next((k for k in active if a[k][k] != 0), None)
        if pivot is None:
            pair = next(
                ((k, l) for k in active for l in active if k != l and a[k][l] != 0), None
            )
            if pair is None:
                zero += len(active)
                break
            k, l = pair
            # congruence: row/col k += row/col l gives a nonzero diagonal 2·a[k][l]
            for m in range(n):
                a[k][m] += a[l][m]
            for m in range(n):
                a[m][k] += a[m][l]
            pivot = k
        d = a[pivot][pivot]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(pivot)
        for r in active:
            factor = a[r][pivot] / d
            if factor:
                for c in active:
                    a[r][c] -= factor * a[pivot][c]
        for r in range(n):
            a[r][pivot] = a[pivot][r] = Fraction(0)
        a[pivot][pivot] = d
    return pos, neg, zero


def div4_criterion(lat: GramLattice) -> bool:
    """True iff all diagonal entries are ``0 mod 4`` and off-diagonal entries are even."""
    n = lat.rank
    return all(lat.gram[k][k] % 4 == 0 for k in range(n)) and all(
        lat.gram[i][j] % 2 == 0 for i in range(n) for j in range(n) if i != j
    )


# region Nikulin half-integer view -----------------------------------------------------
@dataclass(frozen=True)
class NikulinView:
    """``a·L + b·E + Σ c_j N_j`` with ``c_j`` half-integers of equal ``2c_j`` parity."""

    a: int
    b: int
    c: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.c) != 8:
            raise ParameterError("a Nikulin view carries eight N-coefficients")
        doubled = [2 * cj for cj in self.c]
        if any(d.denominator != 1 for d in doubled):
            raise ParameterError("N-coefficients must be half-integers")
        if len({int(d) % 2 for d in doubled}) > 1:
            raise ParameterError("the integers 2c_j must share one parity")

    @classmethod
    def of(cls, a: int, b: int, c: Sequence[Union[int, Fraction]]) -> "NikulinView":
        return cls(a, b, tuple(Fraction(v) for v in c))

    @classmethod
    def from_doubled(cls, a: int, b: int, doubled: Sequence[int]) -> "NikulinView":
        return cls(a, b, tuple(Fraction(t, 2) for t in doubled))

    @classmethod
    def from_class(cls, lat: GramLattice, x: LatticeClass) -> "NikulinView":
        _require_nikulin(lat)
        coords = x.coords
        offset = 1 if lat.kind == "nikulin_lambda" else 2
        a = coords[0]
        b = coords[1] if offset == 2 else 0
        n = coords[offset:offset + 7]
        m = coords[offset + 7]
        half = Fraction(m, 2)
        return cls(a, b, tuple(Fraction(nj) + half for nj in n) + (half,))

    def to_class(self, lat: GramLattice) -> LatticeClass:
        _require_nikulin(lat)
        c8 = self.c[7]
        n = [int(cj - c8) for cj in self.c[:7]]
        head = [self.a] if lat.kind == "nikulin_lambda" else [self.a, self.b]
        if lat.kind == "nikulin_lambda" and self.b:
            raise ParameterError("nikulin_lambda has no E direction")
        return LatticeClass(tuple(head + n + [int(2 * c8)]))

    def __add__(self, other: "NikulinView") -> "NikulinView":
        return NikulinView(
            self.a + other.a, self.b + other.b, tuple(x + y for x, y in zip(self.c, other.c))
        )

    @property
    def c_norm4(self) -> int:
        """``Σ (2c_j)²``."""
        return int(sum((2 * cj) ** 2 for cj in self.c))

    @property
    def c_abs_sum(self) -> Fraction:
        return sum((abs(cj) for cj in self.c), Fraction(0))


def _require_nikulin(lat: GramLattice) -> None:
    if lat.kind not in NIKULIN_KINDS:
        raise ParameterError(f"{lat.name} is not a Nikulin lattice")


def _doubled_vectors(bound: int, nonpositive: bool) -> Tuple[Tuple[int, ...], ...]:
    reach = math.isqrt(bound)
    out: List[Tuple[int, ...]] = []
    for parity in (0, 1):
        values = [t for t in range(-reach, reach + 1) if t % 2 == parity]
        if nonpositive:
            values = [t for t in values if t <= 0]

        def extend(prefix: List[int], budget: int) -> Iterator[Tuple[int, ...]]:
            if len(prefix) == 8:
                yield tuple(prefix)
                return
            for t in values:
                if t * t <= budget:
                    prefix.append(t)
                    yield from extend(prefix, budget - t * t)
                    prefix.pop()

        out.extend(extend([], bound))
    return tuple(out)


@lru_cache(maxsize=None)
def nikulin_c_vectors(bound: int, nonpositive: bool = False) -> Tuple[Tuple[int, ...], ...]:
    """All ``(2c_1, ..., 2c_8)`` of common parity with ``Σ (2c_j)² <= bound``."""
    if bound < 0:
        return ()
    return _doubled_vectors(bound, nonpositive)


def count_nikulin_c_vectors(bound: int, nonpositive: bool = False) -> int:
    """Independent count of :func:`nikulin_c_vectors` by convolving one-coordinate series."""
    if bound < 0:
        return 0
    total = 0
    reach = math.isqrt(bound)
    for parity in (0, 1):
        series = np.zeros(bound + 1, dtype=np.int64)
        for t in range(-reach, reach + 1):
            if t % 2 == parity and (not nonpositive or t <= 0):
                series[t * t] += 1
        acc = np.zeros(bound + 1, dtype=np.int64)
        acc[0] = 1
        for _ in range(8):
            acc = np.convolve(acc, series)[: bound + 1]
        total += int(acc.sum())
    return total


# region enumeration -------------------------------------------------------------------
Constraint = Tuple[LatticeClass, str, int]
Box = Mapping[str, Tuple[int, int]]


def _box_ranges(lat: GramLattice, box: Optional[Union[int, Box]], labels: Sequence[str]):
    if box is None:
        raise UnboundedSearchError(f"enumeration on {lat.name} needs a finite box")
    if isinstance(box, int):
        return [(-box, box) for _ in labels]
    missing = [label for label in labels if label not in box]
    if missing:
        raise UnboundedSearchError(f"no bounds for coordinates {missing} on {lat.name}")
    ranges = []
    for label in labels:
        lo, hi = box[label]
        if lo is None or hi is None or not all(map(math.isfinite, (lo, hi))):
            raise UnboundedSearchError(f"coordinate '{label}' is unbounded")
        ranges.append((int(lo), int(hi)))
    return ranges


def _grid(ranges: Sequence[Tuple[int, int]]) -> np.ndarray:
    size = 1
    for lo, hi in ranges:
        size *= max(0, hi - lo + 1)
    if size > MAX_BOX_SIZE:
        raise UnboundedSearchError(f"search box of {size} points exceeds {MAX_BOX_SIZE}")
    if size == 0:
        return np.zeros((0, len(ranges)), dtype=np.int64)
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in ranges]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(ranges))


def _filter(
    lat: GramLattice, points: np.ndarray, self_int: Optional[int],
    constraints: Sequence[Constraint],
) -> np.ndarray:
    gram = lat.matrix()
    keep = np.ones(points.shape[0], dtype=bool)
    if self_int is not None:
        keep &= np.einsum("ni,ij,nj->n", points, gram, points) == self_int
    for cls, comparator, bound in constraints:
        if comparator not in _COMPARATORS:
            raise ParameterError(f"unknown comparator '{comparator}'")
        products = points @ (gram @ np.array(cls.coords, dtype=np.int64))
        keep &= _COMPARATORS[comparator](products, bound)
    return points[keep]


def enumerate_classes(
    lat: GramLattice,
    self_int: Optional[int] = None,
    linear_constraints: Sequence[Constraint] = (),
    *,
    box: Optional[Union[int, Box]] = None,
    c_bound: Optional[int] = None,
    nonpositive_c: bool = False,
) -> List[LatticeClass]:
    """Every class in a finite box with the given square and linear constraints.

    For ordinary lattices ``box`` bounds every basis coordinate. For Nikulin lattices it
    bounds ``L`` (and ``E``) and ``c_bound`` bounds ``Σ (2c_j)²`` over parity-consistent
    half-integer vectors.
    """
    if lat.kind in NIKULIN_KINDS:
        head = ["L"] if lat.kind == "nikulin_lambda" else ["L", "E"]
        if c_bound is None:
            raise UnboundedSearchError("Nikulin enumeration needs a bound on Σ(2c_j)²")
        head_points = _grid(_box_ranges(lat, box, head))
        rows = []
        for doubled in nikulin_c_vectors(c_bound, nonpositive_c):
            for hp in head_points:
                b = int(hp[1]) if len(hp) > 1 else 0
                view = NikulinView.from_doubled(int(hp[0]), b, doubled)
                rows.append(view.to_class(lat).coords)
        points = np.array(rows, dtype=np.int64).reshape(-1, lat.rank)
    else:
        points = _grid(_box_ranges(lat, box, lat.basis_labels))
    found = _filter(lat, points, self_int, linear_constraints)
    return [LatticeClass(tuple(int(v) for v in row)) for row in found]


@dataclass(frozen=True)
class HodgeIndexBound:
    lhs: int
    rhs: int
    holds: bool
    strict: bool

    def to_json(self) -> Dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "strict": self.strict}


def hodge_index_bound(
    lat: GramLattice, ample: LatticeClass, target: LatticeClass
) -> HodgeIndexBound:
    """Both sides of ``(A)²·(T)² <= (A·T)²`` for a class ``A`` of positive square."""
    a2 = lat.square(ample)
    if a2 <= 0:
        raise ParameterError("the ample class must have positive square")
    lhs = a2 * lat.square(target)
    rhs = lat.pairing(ample, target) ** 2
    return HodgeIndexBound(lhs, rhs, lhs <= rhs, lhs < rhs)


# region certificates -------------------------------------------------------------------
@dataclass
class Certificate:
    lemma_id: str
    params: Dict[str, int]
    search_bounds: Dict[str, Any]
    candidates_checked: int
    verdict: str
    counterexample: Optional[LatticeClass] = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "lemma_id": self.lemma_id,
            "params": dict(self.params),
            "search_bounds": dict(self.search_bounds),
            "candidates_checked": self.candidates_checked,
            "verdict": self.verdict,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json()
        return out


@dataclass
class _Audit:
    """Accumulates checked candidates and the first obstruction."""

    count: int = 0
    counterexample: Optional[LatticeClass] = None
    failed: bool = False
    bounds: Dict[str, Any] = field(default_factory=dict)

    def check(self, ok: bool, witness: Optional[LatticeClass] = None) -> None:
        self.count += 1
        if not ok and not self.failed:
            self.failed = True
            self.counterexample = witness

    def finish(self, lemma_id: str, params: Mapping[str, int]) -> Certificate:
        verdict = "counterexample" if self.failed else "pass"
        return Certificate(lemma_id, dict(params), self.bounds, self.count, verdict,
                           self.counterexample)


def _box_scan(audit: _Audit, lat: GramLattice, radius: int, self_int: int,
              constraints: Sequence[Constraint]) -> None:
    """Count the full box and flag any class meeting every obstruction condition."""
    points = _grid([(-radius, radius)] * lat.rank)
    hits = _filter(lat, points, self_int, constraints)
    audit.count += points.shape[0] - 1
    audit.check(hits.shape[0] == 0,
                LatticeClass(tuple(int(v) for v in hits[0])) if hits.shape[0] else None)


# theta family ---------------------------------------------------------------------------
def _cert_theta_div4(g: int, p: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    lat = make_lattice("theta_hat", g, p)
    i = lat.param_map["i"]
    audit = _Audit(bounds={
        "box": f"|a|,|b|,|c| <= {radius} for aH + b·eta + cE",
        "bound": "(a H + b eta + c E)^2 = 4a^2(p+1) - 4b^2 + 4ab(p-i) + 4ac",
    })
    audit.check(div4_criterion(lat), lat.basis_vector("H"))
    points = _grid([(-radius, radius)] * 3)
    squares = np.einsum("ni,ij,nj->n", points, lat.matrix(), points)
    a, b, c = points[:, 0], points[:, 1], points[:, 2]
    closed = 4 * a * a * (p + 1) - 4 * b * b + 4 * a * b * (p - i) + 4 * a * c
    bad = np.flatnonzero((squares != closed) | (squares % 4 != 0))
    audit.count += points.shape[0] - 1
    audit.check(bad.size == 0,
                LatticeClass(tuple(int(v) for v in points[bad[0]])) if bad.size else None)
    return audit


def _bn_decomposition(kind: str, g: int, p: int, radius: int) -> _Audit:
    lat = make_lattice(kind, g, p)
    eta = lat.basis_vector("eta")
    audit = _Audit(bounds={
        "box": f"A1 = a1 H + b1 eta with a1 in {{0, 1}}, |b1| <= {radius}; A2 = H - A1",
        "bound": "the summand with zero H-coefficient is b·eta with square -4b^2 < 0 unless b = 0",
    })
    for a1 in (0, 1):
        for b1 in range(-radius, radius + 1):
            b = b1 if a1 == 0 else -b1
            piece = eta.scale(b)
            square = lat.square(piece)
            audit.check(square == -4 * b * b and (square < 0 or b == 0), piece)
    return audit


def _cert_theta_bn(g: int, p: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    return _bn_decomposition("theta", g, p, radius)


def _cert_theta_hypvanodd(g: int, p: int, **_: int) -> _Audit:
    lat = make_lattice("theta_hat", g, p)
    i = lat.param_map["i"]
    H, eta, E = (lat.basis_vector(s) for s in ("H", "eta", "E"))
    audit = _Audit(bounds={
        "box": f"0 <= j <= p = {p}",
        "bound": "((2p+2-j)E + eta - H)^2 = 4(i+j) - 8p - 8 <= -4 needs i + j <= 2p+1",
    })
    audit.bounds["genus_of_D"] = lat.square(H) // 2 + 1
    for j in range(p + 1):
        x = E.scale(2 * p + 2 - j) + eta
        audit.check(lat.square(x) == -4, x)
        y = x - H
        sq = lat.square(y)
        audit.check(sq == 4 * (i + j) - 8 * p - 8 and sq <= -4, y)
    return audit


def _cert_theta_qh(g: int, p: int, **_: int) -> _Audit:
    lat = make_lattice("theta", g, p)
    i = lat.param_map["i"]
    H = lat.basis_vector("H")
    L = lat.vector(H=1, eta=-1)
    top = p + 10
    audit = _Audit(bounds={
        "box": f"2 <= q <= {top}; increments positive beyond",
        "bound": "(qH - L)^2 = (q-1)^2(4p+4) + 4(q-1)(p-i) - 4 >= 4p - 4",
    })
    previous = None
    for q in range(2, top + 1):
        x = H.scale(q) - L
        sq = lat.square(x)
        closed = (q - 1) ** 2 * (4 * p + 4) + 4 * (q - 1) * (p - i) - 4
        audit.check(sq == closed and sq >= 4 * p - 4, x)
        if previous is not None:
            audit.check(sq > previous, x)
        previous = sq
    return audit


# xi family ------------------------------------------------------------------------------
def _xi_hat(g: int, p: int):
    lat = make_lattice("xi_hat", g, p)
    return lat, lat.param_map["i"], *(lat.basis_vector(s) for s in ("H", "eta", "E"))


def _cert_xi_e_nef(g: int, p: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    lat, i, H, eta, E = _xi_hat(g, p)
    audit = _Audit(bounds={
        "box": f"|a|,|b|,|c| <= {radius} for R = aH + bE + c·eta with R^2 = -2, a < 0",
        "bound": "2a(R·H) = -2 + 4c^2 + a^2(4p+4) > 0 forces R·H < 0",
    })
    for R in enumerate_classes(lat, -2, [(E, "<", 0)], box=radius):
        a, c = R.coords[0], R.coords[1]
        rhs = -2 + 4 * c * c + a * a * (4 * p + 4)
        audit.check(2 * a * lat.pairing(R, H) == rhs and rhs > 0, R)
    _box_scan(audit, lat, radius, -2, [(E, "<", 0), (H, ">=", 0)])
    return audit


def _cert_xi_h_bpf(g: int, p: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    lat, i, H, eta, E = _xi_hat(g, p)
    audit = _Audit(bounds={
        "box": f"0 <= a <= {radius}, |c| <= {radius}",
        "bound": "-4c^2 = a(a(4p+4) - 2) has only a = c = 0 when a >= 0; then H·bE = 2b != 1",
    })
    for a in range(0, radius + 1):
        for c in range(-radius, radius + 1):
            solvable = -4 * c * c == a * (a * (4 * p + 4) - 2)
            audit.check(not solvable or (a == 0 and c == 0), lat.vector(H=a, eta=c))
    _box_scan(audit, lat, radius, 0, [(H, "==", 1), (E, ">=", 0)])
    return audit


def _cert_xi_lattice1(g: int, p: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    lat, i, H, eta, E = _xi_hat(g, p)
    audit = _Audit(bounds={
        "box": f"|x|,|y| <= {radius} for R = xE + y·eta",
        "bound": "R^2 = -4y^2 is never -2",
    })
    for x in range(-radius, radius + 1):
        for y in range(-radius, radius + 1):
            R = lat.vector(E=x, eta=y)
            sq = lat.square(R)
            audit.check(sq == -4 * y * y and sq != -2, R)
    return audit


def _cert_xi_a_nef(g: int, p: int, **_: int) -> _Audit:
    lat, i, H, eta, E = _xi_hat(g, p)
    off = 2 * p - 2 * i + 1
    # roots of -4c^2 + 2·off·c + 4p+4 bound the c with A^2 >= 0
    reach = (abs(off) + math.isqrt(off * off + 16 * (p + 1)) + 1) // 4 + 1
    audit = _Audit(bounds={
        "box": f"|c| <= {reach} with (H + c eta)^2 >= 0; -(A^2+2)/4 - 1 <= y <= -1",
        "bound": "R = A + yE with R^2 = -2 has -2 = R·A + 2y, so R·A < 0 gives R^2 <= -3",
    })
    for c in range(-reach, reach + 1):
        A = H + eta.scale(c)
        a2 = lat.square(A)
        audit.check(a2 == 4 * p + 4 + 2 * c * off - 4 * c * c, A)
        if a2 < 0:
            continue
        for y in range(-(a2 + 2) // 4 - 1, 0):
            R = A + E.scale(y)
            sq, ra = lat.square(R), lat.pairing(R, A)
            audit.check(sq == ra + 2 * y and not (sq == -2 and ra < 0), R)
    return audit


def _cert_xi_h1cor(g: int, p: int, **_: int) -> _Audit:
    lat, i, H, eta, E = _xi_hat(g, p)
    L = H - eta
    audit = _Audit(bounds={
        "box": f"2 <= q <= {p + 10} for qH - L = (q-1)H + eta",
        "bound": "(H + eta)^2 = 4p + 2(2(p-i)+1) > 0",
    })
    first = H + eta
    sq = lat.square(first)
    audit.check(sq == 4 * p + 2 * (2 * (p - i) + 1) and sq > 0, first)
    audit.check(lat.square(L) == 2 * g - 2 and lat.pairing(H, L) == 2 * p + 2 * i + 3, L)
    for q in range(2, p + 11):
        x = H.scale(q) - L
        audit.check(lat.square(x) > 0 and lat.pairing(x, H) > 0, x)
    return audit


def _cert_xi_l_bpf(g: int, p: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    lat, i, H, eta, E = _xi_hat(g, p)
    L = H - eta
    audit = _Audit(bounds={
        "box": f"1 <= a <= {radius}, |c| <= {radius}; a = 0 gives F = bE with F·L = 2b",
        "bound": "-4(c+a)^2 = a(a(2g-2) - 2) has no solution with a > 0",
    })
    for a in range(1, radius + 1):
        for c in range(-radius, radius + 1):
            audit.check(-4 * (c + a) ** 2 != a * (a * (2 * g - 2) - 2), lat.vector(H=a, eta=c))
    for b in range(-radius, radius + 1):
        audit.check(lat.pairing(E.scale(b), L) != 1, E.scale(b))
    _box_scan(audit, lat, radius, 0, [(L, "==", 1), (E, ">=", 0)])
    return audit


def _cert_xi_b_not_effective(g: int, p: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    lat, i, H, eta, E = _xi_hat(g, p)
    audit = _Audit(bounds={
        "box": f"0 <= j <= {p}; residual H + bE - eta with -p-2-{radius} <= b <= -p-2",
        "bound": "B^2 = 4(i+j) - 8p - 10 <= -6 and residual square 4(b+i) - 2 <= -6",
    })
    for j in range(p + 1):
        B = H - E.scale(2 * p + 2 - j) - eta
        sq = lat.square(B)
        audit.check(sq == 4 * (i + j) - 8 * p - 10 and sq <= -6, B)
    for b in range(-p - 2 - radius, -p - 1):
        R = H + E.scale(b) - eta
        sq = lat.square(R)
        audit.check(sq == 4 * (b + i) - 2 and sq <= -6, R)
    return audit


def _cert_xi_bn(g: int, p: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    return _bn_decomposition("xi", g, p, radius)


# Nikulin family -------------------------------------------------------------------------
def _nik(g: int):
    lat = make_lattice("nikulin_t_hat", g)
    L, E, e = (lat.basis_vector(s) for s in ("L", "E", "e"))
    return lat, L, E, e


def _n_class(lat: GramLattice, ell: int) -> LatticeClass:
    doubled = [0] * 8
    doubled[ell] = 2
    return NikulinView.from_doubled(0, 0, doubled).to_class(lat)


def _cauchy_schwarz_bound(audit: _Audit, g: int) -> None:
    bound = Fraction(4 * (g - 1), g - 3)
    audit.bounds["c_bound"] = "sum (2c_j)^2 < 4(g-1)/(g-3) <= 5, hence <= 4"
    audit.bounds["c_bound_value"] = str(bound)
    audit.check(bound <= 5)


def _cert_nikulin_h_nef(g: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    lat, L, E, e = _nik(g)
    H = L - e
    audit = _Audit(bounds={"box": "c_j <= 0, 0 <= k < sum|c_j|, k even, |a| <= k/(g-1) + 2"})
    _cauchy_schwarz_bound(audit, g)
    negative_n = {_n_class(lat, ell).scale(-1) for ell in range(8)}
    for doubled in nikulin_c_vectors(4, nonpositive=True):
        view = NikulinView.from_doubled(0, 0, doubled)
        abs_sum = view.c_abs_sum
        for k in range(0, int(math.ceil(abs_sum)), 2):
            reach = k // (g - 1) + 2
            for a in range(-reach, reach + 1):
                twice_b = k - a * (2 * g - 2)
                if twice_b % 2:
                    continue
                gamma = NikulinView.from_doubled(a, twice_b // 2, doubled).to_class(lat)
                head = lat.vector(L=a, E=twice_b // 2)
                hodge = hodge_index_bound(lat, L, head)
                obstruction = (
                    lat.square(gamma) == -2
                    and lat.pairing(gamma, H) < 0
                    and gamma not in negative_n
                )
                audit.check(hodge.holds or lat.square(gamma) != -2, gamma)
                audit.check(not obstruction, gamma)
    return audit


def _cert_nikulin_h_bpf(g: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    lat, L, E, e = _nik(g)
    audit = _Audit(bounds={
        "box": f"c_j <= 0 with sum (2c_j)^2 <= 8; |a|,|b| <= {radius} for c = 0",
        "bound": "4(g-1)·n <= (2 + sum|2c_j|)^2 fails for n = sum (2c_j)^2 >= 1; "
                 "k = 1 + sum|c_j| is even otherwise",
    })
    # beyond n = 8: 4(g-1)n > 2(4 + 8n) >= (2 + sqrt(8n))^2
    audit.check(4 * (g - 1) * 9 > 2 * (4 + 8 * 9) and 4 * (g - 1) >= 16)
    for doubled in nikulin_c_vectors(8, nonpositive=True):
        n = sum(t * t for t in doubled)
        t_sum = sum(abs(t) for t in doubled)
        if n == 0:
            continue
        audit.check(4 * (g - 1) * n > (2 + t_sum) ** 2,
                    NikulinView.from_doubled(0, 0, doubled).to_class(lat))
    for a in range(-radius, radius + 1):
        for b in range(-radius, radius + 1):
            head = lat.vector(L=a, E=b)
            audit.check(lat.pairing(head, L) != 1, head)
    return audit


def _cert_nikulin_e_elliptic(g: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    lat, L, E, e = _nik(g)
    audit = _Audit(bounds={
        "box": f"-{radius} <= a <= -1, b in {{-a(g-1), 1-a(g-1)}}, c_j <= 0",
        "bound": "(R·L) <= 2 gives sum (2c_j)^2 <= 4",
    })
    _cauchy_schwarz_bound(audit, g)
    for a in range(-radius, 0):
        for b in (-a * (g - 1), 1 - a * (g - 1)):
            for doubled in nikulin_c_vectors(4, nonpositive=True):
                R = NikulinView.from_doubled(a, b, doubled).to_class(lat)
                audit.check(lat.square(R) != -2, R)
    return audit


def _cert_nikulin_l_half_bpf(g: int, radius: int = DEFAULT_RADIUS, **_: int) -> _Audit:
    lat, L, E, e = _nik(g)
    h = (g - 1) // 2
    M = L - E.scale(h)
    audit = _Audit(bounds={
        "box": f"a = 1, -{h}-{radius} <= b <= -{h}, sum (2c_j)^2 <= 4",
        "bound": "c = 0 needs -2 = 2(g-1) + 4b, impossible as 4 divides 2(g-1) + 4b + 2 only "
                 "for even g",
    })
    audit.check(lat.square(M) == 0 and lat.pairing(M, E) == 2, M)
    for b in range(-h - radius, -h + 1):
        for doubled in nikulin_c_vectors(4):
            R = NikulinView.from_doubled(1, b, doubled).to_class(lat)
            audit.check(not (lat.square(R) == -2 and lat.pairing(R, M) < 0), R)
    return audit


def _cert_nikulin_ce_minus_e(g: int, c_range: int = 5, **_: int) -> _Audit:
    lat, L, E, e = _nik(g)
    audit = _Audit(bounds={
        "box": f"|c| <= {c_range}; R = bE - N_l with 1 <= b <= c, 1 <= l <= 8",
        "bound": "a = 0 and sum c_j^2 = 1 for the (-2)-class R in cE - e",
    })
    all_n = NikulinView.from_doubled(0, 0, [2] * 8).to_class(lat)
    audit.check(all_n == e.scale(2), all_n)
    residual_shapes = [
        d for d in nikulin_c_vectors(4, nonpositive=True) if sum(t * t for t in d) == 4
    ]
    audit.check(len(residual_shapes) == 8)
    for c in range(-c_range, c_range + 1):
        X = E.scale(c) - e
        audit.check(lat.square(X) == -4, X)
        if c < 0:
            audit.check(lat.pairing(X, L) == 2 * c < 0, X)
            continue
        for b in range(1, c + 1):
            for ell in range(8):
                N = _n_class(lat, ell)
                R = E.scale(b) - N
                rest = X - R
                audit.check(lat.square(R) == -2 and lat.pairing(N, rest) == -1, R)
    return audit


def _cert_nikulin_splitting(g: int, **_: int) -> _Audit:
    lat, L, E, e = _nik(g)
    i = (g - 3) // 2
    H = L - e
    audit = _Audit(bounds={"box": "fixed classes at g = 2i+3", "bound": "none"})
    audit.check(lat.square(H) == 2 * g - 6 and lat.pairing(H, E) == 2, H)
    for shift in (i + 1, i + 2):
        x = E.scale(shift) - e
        audit.check(lat.square(x) == -4, x)
    pencil = L - E.scale(i + 1)
    audit.check(lat.square(pencil) == 0 and lat.pairing(pencil, E) == 2, pencil)
    genus_d = lat.square(H) // 2 + 1
    audit.check(genus_d == 2 * i + 1, H)
    # K_D = (g-3)·E_D has degree 2·genus(D) - 2
    audit.check((g - 3) * lat.pairing(E, H) == 2 * genus_d - 2, E)
    return audit


@dataclass(frozen=True)
class LemmaSpec:
    lemma_id: str
    family: str
    runner: Callable[..., _Audit]
    anchor: str


LEMMAS: Dict[str, LemmaSpec] = {
    spec.lemma_id: spec
    for spec in (
        LemmaSpec("theta.div4", "theta", _cert_theta_div4, "theta-lattice divisibility"),
        LemmaSpec("theta.bn_decomposition", "theta", _cert_theta_bn, "theta decomposition"),
        LemmaSpec("theta.hypvanodd_arith", "theta", _cert_theta_hypvanodd, "hypvanodd"),
        LemmaSpec("theta.qH_minus_L", "theta", _cert_theta_qh, "theta H1 vanishing"),
        LemmaSpec("xi.E_nef", "xi", _cert_xi_e_nef, "xi E and H bpf"),
        LemmaSpec("xi.H_bpf", "xi", _cert_xi_h_bpf, "xi E and H bpf"),
        LemmaSpec("xi.lattice1", "xi", _cert_xi_lattice1, "lattice-1"),
        LemmaSpec("xi.A_nef", "xi", _cert_xi_a_nef, "xi A nef"),
        LemmaSpec("xi.h1cor", "xi", _cert_xi_h1cor, "h1-cor"),
        LemmaSpec("xi.L_bpf", "xi", _cert_xi_l_bpf, "xi L bpf"),
        LemmaSpec("xi.B_not_effective", "xi", _cert_xi_b_not_effective, "xi B not effective"),
        LemmaSpec("xi.bn_decomposition", "xi", _cert_xi_bn, "xi decomposition"),
        LemmaSpec("nikulin.H_nef", "nikulin", _cert_nikulin_h_nef, "nikulin H nef"),
        LemmaSpec("nikulin.H_bpf", "nikulin", _cert_nikulin_h_bpf, "nikulin H bpf"),
        LemmaSpec("nikulin.E_elliptic", "nikulin", _cert_nikulin_e_elliptic, "nikulin E"),
        LemmaSpec("nikulin.L_half_bpf", "nikulin", _cert_nikulin_l_half_bpf, "nikulin L-hE"),
        LemmaSpec("nikulin.cE_minus_e", "nikulin", _cert_nikulin_ce_minus_e, "nikulin cE-e"),
        LemmaSpec("nikulin.splitting", "nikulin", _cert_nikulin_splitting, "splitting"),
    )
}


def _validate(spec: LemmaSpec, params: Mapping[str, int]) -> Dict[str, int]:
    if "g" not in params:
        raise ParameterError(f"{spec.lemma_id} needs g")
    g = int(params["g"])
    if not 3 <= g <= MAX_G:
        raise ParameterError(f"g={g} outside the certified range 3..{MAX_G}")
    clean = {k: int(v) for k, v in params.items()}
    if spec.family == "nikulin":
        if g % 2 == 0 or g < 11:
            raise ParameterError(f"{spec.lemma_id} needs odd g >= 11, got g={g}")
        clean["i"] = (g - 3) // 2
        return clean
    if "p" not in params:
        raise ParameterError(f"{spec.lemma_id} needs p")
    if not 1 <= clean["p"] <= MAX_P:
        raise ParameterError(f"p={clean['p']} outside the certified range 1..{MAX_P}")
    make_lattice(spec.family, g, clean["p"])
    clean["i"] = (g - 1) // 2 if spec.family == "theta" else g // 2
    return clean


def certify(lemma_id: str, params: Mapping[str, int]) -> Certificate:
    """Replay one lemma's finite case analysis for the given parameters."""
    spec = LEMMAS.get(lemma_id)
    if spec is None:
        raise ParameterError(f"unknown lemma '{lemma_id}' (known: {sorted(LEMMAS)})")
    clean = _validate(spec, params)
    kwargs = {k: v for k, v in clean.items() if k != "i"}
    cert = spec.runner(**kwargs).finish(lemma_id, clean)
    if cert.candidates_checked == 0:
        raise UnboundedSearchError(f"{lemma_id} enumerated nothing for {clean}")
    logger.debug(f"{lemma_id} {clean}: {cert.verdict} ({cert.candidates_checked} candidates)")
    return cert


def default_grid(lemma_id: str, g_max: int = 41, p_max: int = 20) -> Iterator[Dict[str, int]]:
    """Default certification grid for a lemma."""
    spec = LEMMAS.get(lemma_id)
    if spec is None:
        raise ParameterError(f"unknown lemma '{lemma_id}'")
    if spec.family == "nikulin":
        for g in range(11, g_max + 1, 2):
            yield {"g": g}
    elif spec.family == "theta":
        for g in range(3, g_max + 1, 2):
            i = (g - 1) // 2
            for p in range(max(1, i - 1), p_max + 1):
                yield {"g": g, "p": p}
    else:
        for g in range(4, g_max + 1, 2):
            i = g // 2
            for p in range(max(1, i - 1), p_max + 1):
                yield {"g": g, "p": p}


def certify_grid(lemma_id: str, g_max: int = 41, p_max: int = 20) -> List[Certificate]:
    return [certify(lemma_id, params) for params in default_grid(lemma_id, g_max, p_max)]


def catalog_signatures(g: int, p: int) -> Dict[str, Tuple[int, int, int]]:
    """Signatures of every catalog lattice that exists at ``(g, p)``."""
    out = {}
    for kind in LATTICE_KINDS:
        try:
            lat = make_lattice(kind, g, p)
        except ParameterError:
            continue
        out[kind] = signature(lat.gram)
    return out
