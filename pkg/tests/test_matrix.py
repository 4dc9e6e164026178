import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hadamard_swap import (
    DimensionError,
    RootOfUnityMatrix,
    hadamard_walsh,
    is_unitary,
    permanent_naive,
    permanent_ryser,
    remove_row,
    repeat_columns,
)

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


@pytest.mark.parametrize("perm", [permanent_naive, permanent_ryser])
def test_permanent_small_examples(perm):
    assert perm([[1, 2], [3, 4]]) == pytest.approx(10)
    assert perm(H) == pytest.approx(0, abs=1e-15)
    assert perm(np.eye(4)) == pytest.approx(1)
    assert perm([[4.2]]) == pytest.approx(4.2)


@pytest.mark.parametrize("n", range(1, 7))
def test_permanent_all_ones_is_factorial(n):
    assert permanent_naive(np.ones((n, n))) == pytest.approx(math.factorial(n))
    assert permanent_ryser(np.ones((n, n))) == pytest.approx(math.factorial(n))


@pytest.mark.parametrize("perm", [permanent_naive, permanent_ryser])
def test_permanent_rejects_non_square(perm):
    with pytest.raises(DimensionError):
        perm(np.ones((2, 3)))


def test_ryser_matches_naive_on_random_6x6(rng):
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    ref = permanent_naive(m)
    assert abs(permanent_ryser(m) - ref) <= 1e-10 * (1 + abs(ref))


def test_ryser_spans_several_gray_blocks(rng):
    # 14 columns -> 4 blocks of the vectorised sweep
    m = rng.normal(size=(14, 14)) * 0.3
    # row-expansion oracle reduces to 13x13 Ryser calls, which are single-block
    expansion = sum(
        m[0, j] * permanent_ryser(np.delete(np.delete(m, 0, 0), j, 1)) for j in range(14)
    )
    assert permanent_ryser(m) == pytest.approx(expansion, rel=1e-9)


def test_ryser_identity_large():
    assert permanent_ryser(np.eye(16)) == pytest.approx(1)


complex_matrices = st.integers(1, 8).flatmap(
    lambda n: arrays(
        np.complex128,
        (n, n),
        elements=st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
    )
)


@settings(max_examples=60, deadline=None)
@given(complex_matrices)
def test_ryser_agrees_with_naive(m):
    ref = permanent_naive(m)
    assert abs(permanent_ryser(m) - ref) <= 1e-10 * (1 + abs(ref))


def test_permanent_invariant_under_row_and_column_permutations(rng):
    m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    ref = permanent_ryser(m)
    rows, cols = rng.permutation(5), rng.permutation(5)
    assert permanent_ryser(m[rows]) == pytest.approx(ref, rel=1e-12)
    assert permanent_ryser(m[:, cols]) == pytest.approx(ref, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(complex_matrices, st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), st.data())
def test_permanent_multilinear_in_rows(m, lam, data):
    i = data.draw(st.integers(0, m.shape[0] - 1))
    scaled = m.copy()
    scaled[i] *= lam
    ref = permanent_naive(m)
    assert abs(permanent_ryser(scaled) - lam * ref) <= 1e-9 * (1 + abs(lam * ref))


def test_is_unitary():
    assert is_unitary(H, 1e-12)
    assert not is_unitary([[1, 1], [0, 1]], 1e-12)
    assert is_unitary(hadamard_walsh(3), 1e-12)


def test_repeat_columns():
    m = np.array([[1, 2], [3, 4]])
    assert np.array_equal(repeat_columns(m, (2, 0)), [[1, 1], [3, 3]])
    assert np.array_equal(repeat_columns(m, (1, 1)), m)
    s = hadamard_walsh(2) * 2
    out = repeat_columns(s, (2, 1, 1, 0))
    expected = np.column_stack([s[:, 0], s[:, 0], s[:, 1], s[:, 2]])
    assert np.array_equal(out, expected)
    with pytest.raises(DimensionError):
        repeat_columns(m, (1, 1, 0))


def test_remove_row():
    m = np.array([[1, 2], [3, 4]])
    assert np.array_equal(remove_row(m, 0), [[3, 4]])
    assert np.array_equal(remove_row(np.eye(3), 1), [[1, 0, 0], [0, 0, 1]])
    with pytest.raises(IndexError):
        remove_row(m, 2)


def test_remove_row_then_repeat_matches_direct_construction(rng):
    u = rng.normal(size=(4, 4))
    d = (2, 0, 1, 1)
    k = 0
    reduced = list(d)
    reduced[k] -= 1
    got = repeat_columns(remove_row(u, 0), reduced)
    cols = [j for j, c in enumerate(reduced) for _ in range(c)]
    direct = np.array([[u[i, j] for j in cols] for i in range(1, 4)])
    assert np.array_equal(got, direct)


def test_root_of_unity_matrix_roundtrip():
    exps = np.array([[0, 1, 2], [3, 4, 5]])
    r = RootOfUnityMatrix(3, exps)
    assert np.array_equal(r.exponents, exps % 3)
    c = r.to_complex()
    assert np.max(np.abs(np.abs(c) - 1)) <= 1e-14
    assert RootOfUnityMatrix.from_complex(c, 3) == r


@pytest.mark.parametrize("order", [1, 2, 3, 4, 6, 8])
def test_root_of_unity_entries_have_unit_modulus(order):
    exps = np.array(list(itertools.product(range(order), repeat=2)))
    c = RootOfUnityMatrix(order, exps).to_complex()
    assert np.max(np.abs(np.abs(c) - 1)) <= 1e-14
