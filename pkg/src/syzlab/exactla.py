"""Exact linear algebra over prime fields.

Every downstream dimension count (Riemann-Roch spaces, Koszul strands, graded kernels of
presentation matrices) reduces to :func:`rank` and :func:`kernel_basis` here. Matrices are
stored sparsely as one ``{column: value}`` dict per row and eliminated with deterministic
pivoting (smallest column first, rows in order). When elimination fills in more than a
configured fraction of the pivot block the computation restarts on a dense ``numpy.int64``
array, which is exact because ``p < 2**31`` keeps every product below ``2**62``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from .exceptions import ParameterError

logger = logging.getLogger(__name__)

BigRational = Fraction
RowDict = Dict[int, int]
Vector = Union[Sequence[int], Mapping[int, int]]

DEFAULT_PRIME = 1009
DEFAULT_DENSE_FILL = 0.3
_MIN_PIVOTS_BEFORE_SWITCH = 32


@dataclass(frozen=True)
class Prime:
    """A prime modulus in the range ``3 <= p < 2**31``."""

    p: int

    def __post_init__(self) -> None:
        if not 3 <= self.p < 2**31:
            raise ParameterError(f"prime {self.p} outside 3 <= p < 2^31")
        if not sympy.isprime(self.p):
            raise ParameterError(f"{self.p} is not prime")

    def __int__(self) -> int:
        return self.p

    def __index__(self) -> int:
        return self.p

    def inv(self, a: int) -> int:
        return inv_modp(a, self.p)


def modulus(p: Union[int, Prime]) -> int:
    """Return the integer modulus of ``p``, validating plain integers."""
    if isinstance(p, Prime):
        return p.p
    return Prime(int(p)).p


def inv_modp(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("No inverse for 0 mod p")
    return pow(a, p - 2, p)


def _as_row_dict(vec: Vector, p: int) -> RowDict:
    if isinstance(vec, Mapping):
        items = vec.items()
    else:
        items = enumerate(vec)
    out: RowDict = {}
    for col, value in items:
        v = int(value) % p
        if v:
            out[int(col)] = v
    return out


@dataclass(frozen=True, eq=False)
class FieldMatrix:
    """Immutable matrix over ``F_p`` with sparse row storage."""

    nrows: int
    ncols: int
    p: int
    rows: Tuple[RowDict, ...]

    def __post_init__(self) -> None:
        if self.nrows < 0 or self.ncols < 0:
            raise ParameterError("matrix dimensions must be nonnegative")
        if len(self.rows) != self.nrows:
            raise ParameterError("row count does not match nrows")
        for row in self.rows:
            if row and (min(row) < 0 or max(row) >= self.ncols):
                raise ParameterError("column index out of range")

    # region constructors ----------------------------------------------------------
    @classmethod
    def from_row_dicts(
        cls, rows: Iterable[Mapping[int, int]], ncols: int, p: Union[int, Prime]
    ) -> "FieldMatrix":
        q = modulus(p)
        stored = tuple(_as_row_dict(row, q) for row in rows)
        return cls(len(stored), ncols, q, stored)

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[int]], p: Union[int, Prime], ncols: Optional[int] = None
    ) -> "FieldMatrix":
        width = ncols if ncols is not None else (len(rows[0]) if rows else 0)
        if any(len(row) != width for row in rows):
            raise ParameterError("ragged rows")
        return cls.from_row_dicts(rows, width, p)  # type: ignore[arg-type]

    @classmethod
    def from_array(cls, array: np.ndarray, p: Union[int, Prime]) -> "FieldMatrix":
        q = modulus(p)
        arr = np.asarray(array, dtype=np.int64) % q
        rows = tuple(
            {int(c): int(arr[r, c]) for c in np.flatnonzero(arr[r])} for r in range(arr.shape[0])
        )
        return cls(arr.shape[0], arr.shape[1], q, rows)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, p: Union[int, Prime]) -> "FieldMatrix":
        return cls(nrows, ncols, modulus(p), tuple({} for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int, p: Union[int, Prime]) -> "FieldMatrix":
        return cls(n, n, modulus(p), tuple({i: 1} for i in range(n)))

    # region arithmetic ------------------------------------------------------------
    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.rows)

    def entry(self, i: int, j: int) -> int:
        return self.rows[i].get(j, 0)

    def transpose(self) -> "FieldMatrix":
        cols: List[RowDict] = [{} for _ in range(self.ncols)]
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                cols[j][i] = v
        return FieldMatrix(self.ncols, self.nrows, self.p, tuple(cols))

    def matmul(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.ncols != other.nrows or self.p != other.p:
            raise ParameterError(f"cannot multiply {self.shape} by {other.shape}")
        p = self.p
        out: List[RowDict] = []
        for row in self.rows:
            acc: RowDict = {}
            for k, a in row.items():
                for j, b in other.rows[k].items():
                    acc[j] = (acc.get(j, 0) + a * b) % p
            out.append({j: v for j, v in acc.items() if v})
        return FieldMatrix(self.nrows, other.ncols, p, tuple(out))

    def apply(self, vec: Vector) -> List[int]:
        """Return ``M @ vec`` as a dense list."""
        v = _as_row_dict(vec, self.p)
        return [sum(a * v.get(j, 0) for j, a in row.items()) % self.p for row in self.rows]

    def is_zero(self) -> bool:
        return all(not row for row in self.rows)

    def to_dense(self) -> np.ndarray:
        arr = np.zeros((self.nrows, self.ncols), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                arr[i, j] = v
        return arr

    def vstack(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.ncols != other.ncols:
            raise ParameterError("column counts differ")
        return FieldMatrix(
            self.nrows + other.nrows, self.ncols, self.p, self.rows + other.rows
        )


class RowReducer:
    """Incremental echelon accumulator over ``F_p``.

    Rows are reduced against the pivots seen so far; a row that survives is normalised so
    its smallest column carries a 1 and is stored under that column.
    """

    def __init__(self, p: Union[int, Prime]) -> None:
        self.p = modulus(p)
        self.pivots: Dict[int, RowDict] = {}
        self.fill = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Vector) -> RowDict:
        p = self.p
        r = _as_row_dict(vec, p)
        for pc in sorted(self.pivots):
            if not r:
                break
            coeff = r.get(pc, 0)
            if coeff == 0:
                continue
            for c, pv in self.pivots[pc].items():
                value = (r.get(c, 0) - coeff * pv) % p
                if value:
                    r[c] = value
                else:
                    r.pop(c, None)
        return r

    def add(self, vec: Vector) -> bool:
        """Insert ``vec``; return ``True`` when it raised the rank."""
        r = self.reduce(vec)
        if not r:
            return False
        pivot_col = min(r)
        inv = inv_modp(r[pivot_col], self.p)
        normed = {c: (v * inv) % self.p for c, v in r.items()}
        self.pivots[pivot_col] = normed
        self.fill += len(normed)
        return True

    def contains(self, vec: Vector) -> bool:
        return not self.reduce(vec)

    def rref(self) -> Dict[int, RowDict]:
        """Return fully reduced pivot rows keyed by pivot column."""
        p = self.p
        done: Dict[int, RowDict] = {}
        for pc in sorted(self.pivots, reverse=True):
            row = dict(self.pivots[pc])
            for qc, qrow in done.items():
                coeff = row.get(qc, 0)
                if not coeff:
                    continue
                for c, v in qrow.items():
                    value = (row.get(c, 0) - coeff * v) % p
                    if value:
                        row[c] = value
                    else:
                        row.pop(c, None)
            done[pc] = row
        return done


# region dense fallback ----------------------------------------------------------------
def _dense_echelon(arr: np.ndarray, p: int, *, full: bool) -> Tuple[np.ndarray, List[int]]:
    a = np.array(arr, dtype=np.int64, copy=True) % p
    m, n = a.shape
    pivcols: List[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv], :] = a[[piv, r], :]
        a[r, :] = (a[r, :] * inv_modp(int(a[r, c]), p)) % p
        targets = np.arange(m) if full else np.arange(r + 1, m)
        targets = targets[targets != r]
        if targets.size:
            factors = a[targets, c].copy()
            live = factors != 0
            if np.any(live):
                rows = targets[live]
                a[rows, :] = (a[rows, :] - np.outer(factors[live], a[r, :])) % p
        pivcols.append(c)
        r += 1
    return a[:r], pivcols


def _sparse_echelon(m: FieldMatrix, dense_fill: float) -> Optional[RowReducer]:
    reducer = RowReducer(m.p)
    for row in m.rows:
        reducer.add(row)
        if (
            reducer.rank >= _MIN_PIVOTS_BEFORE_SWITCH
            and reducer.fill > dense_fill * reducer.rank * max(m.ncols, 1)
        ):
            logger.debug(f"fill-in above {dense_fill:.0%} on {m.shape}, switching to dense")
            return None
    return reducer


def rank(m: FieldMatrix, *, dense_fill: float = DEFAULT_DENSE_FILL) -> int:
    """Row rank of ``m`` over ``F_p``."""
    if m.nrows == 0 or m.ncols == 0 or m.is_zero():
        return 0
    if m.nnz > dense_fill * m.nrows * m.ncols:
        return len(_dense_echelon(m.to_dense(), m.p, full=False)[1])
    reducer = _sparse_echelon(m, dense_fill)
    if reducer is None:
        return len(_dense_echelon(m.to_dense(), m.p, full=False)[1])
    return reducer.rank


def _rref_pivots(m: FieldMatrix, dense_fill: float) -> Dict[int, RowDict]:
    if m.nnz <= dense_fill * m.nrows * m.ncols:
        reducer = _sparse_echelon(m, dense_fill)
        if reducer is not None:
            return reducer.rref()
    reduced, pivcols = _dense_echelon(m.to_dense(), m.p, full=True)
    return {
        c: {int(j): int(reduced[k, j]) for j in np.flatnonzero(reduced[k])}
        for k, c in enumerate(pivcols)
    }


def kernel_basis(m: FieldMatrix, *, dense_fill: float = DEFAULT_DENSE_FILL) -> List[List[int]]:
    """Basis of the right kernel ``{v : m v = 0}`` as dense vectors."""
    p = m.p
    pivots = _rref_pivots(m, dense_fill) if m.nrows and m.ncols else {}
    free = [c for c in range(m.ncols) if c not in pivots]
    basis: List[List[int]] = []
    for f in free:
        v = [0] * m.ncols
        v[f] = 1
        for pc, row in pivots.items():
            coeff = row.get(f, 0)
            if coeff:
                v[pc] = (-coeff) % p
        basis.append(v)
    return basis


def pivot_columns(arr: np.ndarray, p: Union[int, Prime]) -> List[int]:
    """Leftmost maximal set of independent columns of a dense array."""
    a = np.asarray(arr, dtype=np.int64)
    if a.size == 0:
        return []
    return _dense_echelon(a, modulus(p), full=False)[1]


def left_kernel_basis(m: FieldMatrix, **kwargs) -> List[List[int]]:
    """Basis of ``{w : w m = 0}``."""
    return kernel_basis(m.transpose(), **kwargs)


def row_space_basis(vectors: Iterable[Vector], p: Union[int, Prime]) -> List[RowDict]:
    """Reduced echelon basis of the span of ``vectors``."""
    reducer = RowReducer(p)
    for vec in vectors:
        reducer.add(vec)
    rows = reducer.rref()
    return [rows[c] for c in sorted(rows)]


def solve_right(a: FieldMatrix, b: FieldMatrix) -> Optional[FieldMatrix]:
    """Solve ``a x = b``; return ``None`` if some column of ``b`` is not in the image."""
    if a.nrows != b.nrows or a.p != b.p:
        raise ParameterError("incompatible system")
    p = a.p
    aug = np.concatenate([a.to_dense(), b.to_dense()], axis=1)
    reduced, pivcols = _dense_echelon(aug, p, full=True)
    if any(c >= a.ncols for c in pivcols):
        return None
    x = np.zeros((a.ncols, b.ncols), dtype=np.int64)
    for k, c in enumerate(pivcols):
        x[c, :] = reduced[k, a.ncols:]
    return FieldMatrix.from_array(x, p)


def solve_coordinates(
    basis: Sequence[Sequence[int]], targets: Sequence[Sequence[int]], p: Union[int, Prime]
) -> List[List[int]]:
    """Express each target vector as a combination of ``basis`` vectors.

    Raises:
        ParameterError: if a target lies outside the span.
    """
    q = modulus(p)
    if not targets:
        return []
    width = len(targets[0])
    a = FieldMatrix.from_rows(basis, q, ncols=width).transpose() if basis else \
        FieldMatrix.zeros(width, 0, q)
    b = FieldMatrix.from_rows(targets, q, ncols=width).transpose()
    x = solve_right(a, b)
    if x is None:
        raise ParameterError("target vector outside the span of the basis")
    xt = x.transpose()
    return [[row.get(j, 0) for j in range(len(basis))] for row in xt.rows]


def random_matrix(
    nrows: int, ncols: int, p: Union[int, Prime], rng: np.random.Generator
) -> FieldMatrix:
    q = modulus(p)
    return FieldMatrix.from_array(rng.integers(0, q, size=(nrows, ncols), dtype=np.int64), q)


def random_invertible(n: int, p: Union[int, Prime], rng: np.random.Generator) -> FieldMatrix:
    """Uniform-ish invertible matrix, resampled until full rank."""
    while True:
        m = random_matrix(n, n, p, rng)
        if rank(m) == n:
            return m


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient; ``0`` for ``k < 0`` or ``k > n >= 0``."""
    if k < 0:
        return 0
    if n >= 0:
        return math.comb(n, k) if k <= n else 0
    # upper negation for negative n
    return (-1) ** k * math.comb(k - n - 1, k)
