import itertools

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from slnc.bounds import class_subspace_keys, enumerate_E_r_cut
from slnc.errors import (
    DecodeError,
    DimensionError,
    FieldTooSmallError,
    InstanceTooLargeError,
    LevelError,
)
from slnc.gf import FieldMatrix, PrimeField, rank
from slnc.lnc import construct_lnc, from_kernels, min_sink_capacity
from slnc.netmodel import gen_combination
from slnc.secure import (
    SecureCode,
    _first_outside,
    _Subspace,
    build_secure_code,
    choose_secure_basis,
    construct_secure_code,
    decode,
    encode,
    load_secure_code,
    render_secure_code,
    verify_secure_condition,
    verify_security_exhaustive,
)
from oracles import observation_counter, span
from strategies import dags

F2 = PrimeField(2)


@pytest.fixture
def parallel_code(parallel2):
    lnc = from_kernels(parallel2, F2, 2, {"e1": (1, 0), "e2": (0, 1)})
    return SecureCode(lnc, 1, 1, FieldMatrix.from_columns(F2, [(1, 1), (1, 0)], 2))


@pytest.fixture
def parallel_plain(parallel2):
    lnc = from_kernels(parallel2, F2, 2, {"e1": (1, 0), "e2": (0, 1)})
    return SecureCode(lnc, 1, 1, FieldMatrix.identity(F2, 2))


@pytest.fixture(scope="module")
def comb32_secure5():
    return construct_secure_code(gen_combination(3, 2), 1, 1, PrimeField(5))


def _identity_cols(n):
    return [tuple(int(i == j) for i in range(n)) for j in range(n)]


# ---------------------------------------------------------------- basis choice

def test_basis_degenerate_cases(comb32):
    code = construct_lnc(comb32, 2, PrimeField(5))
    assert choose_secure_basis(code, 0, 2, class_subspace_keys(comb32, 2)) == _identity_cols(2)
    assert choose_secure_basis(code, 2, 0, []) == _identity_cols(2)
    with pytest.raises(LevelError):
        choose_secure_basis(code, 1, 0, [])


def test_basis_comb32_q5(comb32_secure5, comb32):
    sc = comb32_secure5.code
    assert sc.Q.rows == ((2, 1), (1, 0))
    assert verify_secure_condition(sc, enumerate_E_r_cut(comb32, 1)).ok
    b1 = sc.message_basis().column(0)
    for e in comb32.edge_ids:
        assert rank(FieldMatrix.from_columns(sc.field, [b1, sc.lnc.kernel(e)], 2)) == 2
    assert comb32_secure5.classes == 3


def test_basis_field_too_small(comb32):
    # over F_2 all three nonzero directions are used by kernels
    code = construct_lnc(comb32, 2, PrimeField(3))
    code2 = from_kernels(comb32, F2, 2, {e: tuple(x % 2 for x in f) for e, f in code.kernels.items()})
    with pytest.raises(FieldTooSmallError) as info:
        choose_secure_basis(code2, 1, 1, class_subspace_keys(comb32, 1))
    assert info.value.step == 1


def _colex_vectors(n, q):
    for v in itertools.product(range(q), repeat=n):
        yield tuple(reversed(v))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda q: st.tuples(
    st.just(q), st.integers(1, 3).flatmap(lambda n: st.tuples(
        st.just(n),
        st.lists(st.lists(st.tuples(*[st.integers(0, q - 1)] * n), max_size=n), max_size=4))))))
def test_first_outside_matches_brute_force(case):
    q, (n, families) = case
    subs = [_Subspace(vs, q, n) for vs in families]
    spans = [span(vs, q) | {(0,) * n} for vs in families]
    expected = next((v for v in _colex_vectors(n, q) if all(v not in s for s in spans)), None)
    assert _first_outside(subs, n, q) == expected


# ---------------------------------------------------------------- rank criterion

def test_verify_examples(parallel_code, parallel_plain):
    assert verify_secure_condition(parallel_code, [["e1"], ["e2"]]).ok
    assert verify_secure_condition(parallel_code, [[]]).ok
    bad = verify_secure_condition(parallel_plain, [["e2"], ["e1"]])
    assert not bad.ok and bad.counterexample == ("e1",)


def test_verify_omega_zero(comb32):
    lnc = construct_lnc(comb32, 2, PrimeField(3))
    sc = SecureCode(lnc, 0, 2, FieldMatrix.identity(lnc.field, 2))
    assert verify_secure_condition(sc, [[e] for e in comb32.edge_ids]).ok


def test_secure_code_validation(parallel_code):
    lnc = parallel_code.lnc
    with pytest.raises(LevelError):
        SecureCode(lnc, 1, 0, FieldMatrix.identity(F2, 2))
    with pytest.raises(DimensionError):
        SecureCode(lnc, 1, 1, FieldMatrix.identity(F2, 3))


# ---------------------------------------------------------------- encode / decode

def test_encode_zero(comb32_secure5):
    tx = encode(comb32_secure5.code, [0], [0])
    assert set(tx.symbols.values()) == {0}
    with pytest.raises(DimensionError):
        encode(comb32_secure5.code, [1, 2], [0])


def test_encode_without_precoding(comb32):
    lnc = construct_lnc(comb32, 2, PrimeField(5))
    sc = SecureCode(lnc, 2, 0, FieldMatrix.identity(lnc.field, 2))
    tx = encode(sc, [3, 4], [])
    for e, f in lnc.kernels.items():
        assert tx.symbols[e] == (3 * f[0] + 4 * f[1]) % 5


def test_parallel_edges_uniform(parallel_code):
    for m in (0, 1):
        for e in ("e1", "e2"):
            assert sorted(observation_counter(parallel_code, [e], (m,)).items()) == [((0,), 1), ((1,), 1)]


def test_round_trip_comb32_q3():
    net = gen_combination(3, 2)
    sc = construct_secure_code(net, 1, 1, PrimeField(3)).code
    for m, k in itertools.product(range(3), repeat=2):
        tx = encode(sc, [m], [k])
        for t in net.sinks:
            assert decode(sc, t, tx.symbols) == (m,)


def test_decode_errors(comb32_secure5, comb32):
    sc = comb32_secure5.code
    zeros = {e: 0 for e in comb32.edge_ids}
    assert decode(sc, "t2", zeros) == (0,)
    partial = dict(zeros)
    del partial["l1_1"]
    with pytest.raises(DecodeError):
        decode(sc, "t1", partial)
    with pytest.raises(DecodeError):
        decode(sc, "v1", zeros)


# ---------------------------------------------------------------- exhaustive oracle

def test_exhaustive_examples(parallel_code, parallel_plain, parallel2):
    assert verify_security_exhaustive(parallel_code, ["e1"])
    assert verify_security_exhaustive(parallel_code, ["e2"])
    assert not verify_security_exhaustive(parallel_plain, ["e1"])
    lnc = from_kernels(parallel2, F2, 2, {"e1": (1, 0), "e2": (0, 1)})
    plain = SecureCode(lnc, 2, 0, FieldMatrix.identity(F2, 2))
    assert verify_security_exhaustive(plain, [])


def test_exhaustive_guard():
    net = gen_combination(8, 6)
    lnc = construct_lnc(net, 6, PrimeField(59))
    sc = SecureCode(lnc, 3, 3, FieldMatrix.identity(lnc.field, 6))
    with pytest.raises(InstanceTooLargeError):
        verify_security_exhaustive(sc, ["u1"])


@st.composite
def small_secure_codes(draw):
    net = draw(dags(max_edges=10, dense=draw(st.integers(0, 3)) > 0))
    c_min = min_sink_capacity(net)
    q = draw(st.sampled_from([2, 3, 5, 7]))
    n = draw(st.integers(min(2, c_min), c_min))
    assume(q**n <= 10**4)
    # mostly split n so that both message and key are nonempty
    r = draw(st.integers(1, n - 1)) if n > 1 and draw(st.integers(0, 4)) else draw(st.integers(0, n))
    try:
        lnc = construct_lnc(net, n, PrimeField(q))
    except FieldTooSmallError:
        assume(False)
    rows = draw(st.lists(st.tuples(*[st.integers(0, q - 1)] * n), min_size=n, max_size=n))
    Q = FieldMatrix.from_rows(lnc.field, rows, n)
    assume(rank(Q) == n)
    return SecureCode(lnc, n - r, r, Q)


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(small_secure_codes())
def test_rank_criterion_matches_distribution(sc):
    edges = sc.lnc.net.edge_ids
    for size in range(0, min(sc.r, 3) + 1):
        for A in itertools.combinations(edges, size):
            assert verify_secure_condition(sc, [A]).ok == verify_security_exhaustive(sc, A)


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(small_secure_codes())
def test_exhaustive_matches_encode(sc):
    # the exhaustive verifier's shortcut agrees with counting real transmissions
    edges = sc.lnc.net.edge_ids
    A = edges[: max(1, sc.r)]
    views = {observation_counter(sc, A, m) == observation_counter(sc, A, (0,) * sc.omega)
             for m in itertools.product(range(sc.field.q), repeat=sc.omega)}
    assert verify_security_exhaustive(sc, A) == (views == {True})


@st.composite
def secure_instances(draw):
    net = draw(dags(max_edges=10, dense=draw(st.booleans())))
    c_min = min_sink_capacity(net)
    r = draw(st.integers(1, c_min))
    omega = draw(st.integers(0, c_min - r))
    q = draw(st.sampled_from([3, 5, 7]))
    return net, omega, r, PrimeField(q)


@settings(max_examples=200, deadline=None)
@given(secure_instances())
def test_construction_closed_downward(case):
    net, omega, r, field = case
    try:
        built = construct_secure_code(net, omega, r, field)
    except FieldTooSmallError:
        return
    sc = built.code
    ercut = enumerate_E_r_cut(net, r)
    assert verify_secure_condition(sc, ercut).ok
    small = [A for size in range(r + 1) for A in itertools.combinations(net.edge_ids, size)]
    assert verify_secure_condition(sc, small).ok
    if field.q ** (omega + r) <= 10**4 and omega:
        for A in small[:40]:
            assert verify_security_exhaustive(sc, A)
    for m in itertools.islice(itertools.product(range(field.q), repeat=omega), 5):
        for k in itertools.islice(itertools.product(range(field.q), repeat=r), 5):
            tx = encode(sc, m, k)
            for t in net.sinks:
                assert decode(sc, t, tx.symbols) == tuple(m)


# ---------------------------------------------------------------- serialization

def test_secure_code_round_trip(comb32_secure5, comb32):
    sc = comb32_secure5.code
    text = render_secure_code(sc)
    assert "omega 1\nsecurity 1\n" in text and text.endswith("Q\n2 1\n1 0\n")
    again = load_secure_code(text, comb32)
    assert again.Q == sc.Q and again.lnc.kernels == sc.lnc.kernels


def test_build_secure_code_matches_construction(comb32_secure5, comb32):
    lnc = comb32_secure5.code.lnc
    sc = build_secure_code(lnc, 1, 1, class_subspace_keys(comb32, 1))
    assert sc.Q == comb32_secure5.code.Q
