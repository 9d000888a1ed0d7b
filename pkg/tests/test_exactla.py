import numpy as np
import pytest

from syzlab.exactla import (
    FieldMatrix,
    Prime,
    RowReducer,
    binomial,
    kernel_basis,
    left_kernel_basis,
    modulus,
    pivot_columns,
    rank,
    random_matrix,
    solve_coordinates,
    solve_right,
)
from syzlab.exceptions import ParameterError


def test_prime_validation():
    assert modulus(1009) == 1009
    assert modulus(Prime(101)) == 101
    with pytest.raises(ParameterError):
        Prime(1000)
    with pytest.raises(ParameterError):
        Prime(2)


def test_rank_and_kernel_of_small_matrix():
    m = FieldMatrix.from_rows([[1, 2, 3], [2, 4, 6], [0, 1, 1]], 7)
    assert rank(m) == 2
    kernel = kernel_basis(m)
    assert len(kernel) == 1
    assert m.apply(kernel[0]) == [0, 0, 0]


def test_left_kernel_annihilates_rows():
    m = FieldMatrix.from_rows([[1, 0], [0, 1], [3, 5]], 11)
    (w,) = left_kernel_basis(m)
    assert m.transpose().apply(w) == [0, 0]


def test_sparse_and_dense_paths_agree():
    rng = np.random.default_rng(3)
    for shape in [(40, 30), (25, 60), (50, 50)]:
        m = random_matrix(*shape, 1009, rng)
        assert rank(m, dense_fill=0.0) == rank(m, dense_fill=1.0)


def test_rank_of_product_is_bounded():
    rng = np.random.default_rng(5)
    a = random_matrix(30, 4, 101, rng)
    b = random_matrix(4, 30, 101, rng)
    assert rank(a.matmul(b)) <= 4


def test_kernel_dimension_matches_rank():
    rng = np.random.default_rng(11)
    m = random_matrix(12, 20, 1009, rng)
    kernel = kernel_basis(m)
    assert len(kernel) == 20 - rank(m)
    for v in kernel:
        assert not any(m.apply(v))


def test_solve_right_consistent_and_inconsistent():
    a = FieldMatrix.from_rows([[1, 0], [0, 1], [1, 1]], 13)
    b = FieldMatrix.from_rows([[2], [3], [5]], 13)
    x = solve_right(a, b)
    assert x is not None
    assert a.matmul(x).to_dense().tolist() == [[2], [3], [5]]
    bad = FieldMatrix.from_rows([[2], [3], [6]], 13)
    assert solve_right(a, bad) is None


def test_solve_coordinates_recovers_combination():
    basis = [[1, 0, 2, 3], [0, 1, 1, 1]]
    target = [[3, 4, 10, 13]]
    assert solve_coordinates(basis, target, 101) == [[3, 4]]
    with pytest.raises(ParameterError):
        solve_coordinates(basis, [[0, 0, 1, 0]], 101)


def test_row_reducer_tracks_rank():
    reducer = RowReducer(7)
    assert reducer.add([1, 2, 0])
    assert not reducer.add([2, 4, 0])
    assert reducer.add({2: 3})
    assert reducer.rank == 2
    assert reducer.contains([3, 6, 5])


def test_pivot_columns_picks_leftmost_independent_set():
    arr = np.array([[1, 2, 0], [2, 4, 1]])
    assert pivot_columns(arr, 7) == [0, 2]
    assert pivot_columns(np.zeros((0, 3), dtype=np.int64), 7) == []


def test_binomial_conventions():
    assert binomial(6, 2) == 15
    assert binomial(3, 5) == 0
    assert binomial(4, -1) == 0
    assert binomial(-1, 3) == -1


def test_matrix_validation():
    with pytest.raises(ParameterError):
        FieldMatrix.from_rows([[1, 2], [3]], 5)
    with pytest.raises(ParameterError):
        FieldMatrix.identity(2, 5).matmul(FieldMatrix.identity(3, 5))
