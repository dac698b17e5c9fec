import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slnc.errors import DimensionError, FieldError, SingularMatrixError
from slnc.gf import (
    FieldMatrix,
    PrimeField,
    invert,
    is_prime,
    next_prime,
    null_space,
    rank,
    spans_intersect_trivially,
)
from oracles import span

F2, F3, F5 = PrimeField(2), PrimeField(3), PrimeField(5)


def test_primality():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert next_prime(56) == 59
    for bad in (0, 1, 4, 57, 2**31):
        with pytest.raises(FieldError):
            PrimeField(bad)
    assert PrimeField(2**31 - 1).q == 2**31 - 1


def test_rank_examples():
    assert rank(FieldMatrix.zeros(F5, 3, 4)) == 0
    assert rank(FieldMatrix.identity(F5, 4)) == 4
    assert rank(FieldMatrix.from_rows(F2, [(1, 0), (0, 1), (1, 1)])) == 2


def test_entries_reduced():
    M = FieldMatrix.from_rows(F3, [(4, -1)])
    assert M.rows == ((1, 2),)


def test_invert_examples():
    I = FieldMatrix.identity(F5, 3)
    assert invert(I) == I
    assert invert(FieldMatrix.from_rows(F5, [(2,)])).rows == ((3,),)
    with pytest.raises(SingularMatrixError):
        invert(FieldMatrix.from_rows(F5, [(1, 2), (2, 4)]))
    with pytest.raises(DimensionError):
        invert(FieldMatrix.from_rows(F5, [(1, 2)]))


def test_spans_examples():
    empty = FieldMatrix.zeros(F3, 2, 0)
    assert spans_intersect_trivially(empty, FieldMatrix.from_rows(F3, [(1,), (2,)]))
    for F in (F2, F3, F5):
        assert spans_intersect_trivially(FieldMatrix.from_rows(F, [(1,), (0,)]),
                                         FieldMatrix.from_rows(F, [(0,), (1,)]))
    assert not spans_intersect_trivially(FieldMatrix.from_rows(F3, [(1,), (1,)]),
                                         FieldMatrix.from_rows(F3, [(2,), (2,)]))
    with pytest.raises(DimensionError):
        spans_intersect_trivially(FieldMatrix.zeros(F3, 2, 1), FieldMatrix.zeros(F3, 3, 1))


def test_serialization_round_trip():
    M = FieldMatrix.from_rows(F5, [(1, 2, 3), (4, 0, 1)])
    assert M.dumps() == "1 2 3\n4 0 1\n"
    assert FieldMatrix.loads(F5, M.dumps()) == M
    with pytest.raises(FieldError):
        FieldMatrix.loads(F5, "7 1\n")


def matrices(q, max_rows=3, max_cols=3):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(0, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, q - 1), min_size=c, max_size=c),
                               min_size=r, max_size=r).map(lambda rows: FieldMatrix(PrimeField(q), tuple(map(tuple, rows)), c))
        )
    )


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda q: st.tuples(matrices(q), matrices(q))))
def test_spans_match_brute_force(pair):
    B, F = pair
    if B.shape[0] != F.shape[0]:
        F = FieldMatrix.zeros(B.field, B.shape[0], F.ncols)
    q = B.field.q
    common = span(B.columns(), q) & span(F.columns(), q)
    brute = common <= {(0,) * B.shape[0]}
    assert spans_intersect_trivially(B, F) == brute
    assert rank(B.hstack(F)) <= rank(B) + rank(F)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]).flatmap(
    lambda q: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.integers(0, q - 1), min_size=n * n, max_size=n * n).map(
            lambda xs: FieldMatrix(PrimeField(q), tuple(tuple(xs[i * n:(i + 1) * n]) for i in range(n)), n)))))
def test_inverse_two_sided(M):
    n = M.shape[0]
    if rank(M) < n:
        with pytest.raises(SingularMatrixError):
            invert(M)
        return
    inv = invert(M)
    I = FieldMatrix.identity(M.field, n)
    assert M @ inv == I and inv @ M == I
    assert rank(inv) == n


def test_rank_matches_enumeration_small():
    # rank = log_q of the number of vectors in the row span
    for rows in itertools.product(itertools.product(range(3), repeat=2), repeat=2):
        M = FieldMatrix.from_rows(F3, rows)
        size = len(span(M.transpose().columns(), 3))
        assert 3 ** rank(M) == size


def test_null_space():
    M = FieldMatrix.from_rows(F5, [(1, 2, 3)])
    N = null_space(M)
    assert N.shape == (3, 2)
    assert M @ N == FieldMatrix.zeros(F5, 1, 2)
