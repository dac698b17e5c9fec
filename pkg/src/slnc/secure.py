"""Secure pre-coding on top of a multicast code: basis choice, Q, encode/decode.

The source sends (m, k) Q^-1 through the multicast code, so edge e carries
(m, k) Q^-1 f_e.  Security against a wiretap set A holds when the span of
the first omega columns of Q meets the span of {f_e : e in A} only in zero.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .bounds import ercut_and_keys
from .cuts import DEFAULT_CAP
from .errors import (
    CodeError,
    DecodeError,
    DimensionError,
    FieldTooSmallError,
    InstanceTooLargeError,
    LevelError,
)
from .gf import FieldMatrix, PrimeField, invert, next_prime, null_space_rows, rank_of, row_reduce
from .lnc import (
    CODE_HEADER,
    LinearNetworkCode,
    Vector,
    _kernel_lines,
    _solve,
    construct_lnc,
    from_kernels,
    parse_code,
)
from .netmodel import ChannelSet, Network

EXHAUSTIVE_LIMIT = 10**7
_SEARCH_BUDGET = 10**7


@dataclass(frozen=True, eq=False)
class SecureCode:
    lnc: LinearNetworkCode
    omega: int
    r: int
    Q: FieldMatrix
    Qinv: FieldMatrix | None = None

    def __post_init__(self) -> None:
        n = self.lnc.n
        if self.omega < 0 or self.r < 0 or self.omega + self.r != n:
            raise LevelError(f"omega={self.omega} and r={self.r} must be nonnegative and sum to n={n}")
        if self.Q.shape != (n, n):
            raise DimensionError(f"Q must be {n}x{n}, got {self.Q.shape}")
        if self.Qinv is None:
            object.__setattr__(self, "Qinv", invert(self.Q))

    @property
    def field(self) -> PrimeField:
        return self.lnc.field

    @property
    def n(self) -> int:
        return self.lnc.n

    def message_basis(self) -> FieldMatrix:
        """The first omega columns of Q."""
        return FieldMatrix(self.field, tuple(row[: self.omega] for row in self.Q.rows), self.omega)

    def precoded_kernel(self, eid: str) -> Vector:
        """Q^-1 f_e: the kernel of e in the end-to-end secure code."""
        q = self.field.q
        f = self.lnc.kernel(eid)
        return tuple(sum(a * b for a, b in zip(row, f)) % q for row in self.Qinv.rows)


class Transmission(NamedTuple):
    message: Vector
    key: Vector
    symbols: dict[str, int]


class Verdict(NamedTuple):
    ok: bool
    counterexample: ChannelSet | None


def _projective(v: Vector, q: int) -> Vector | None:
    lead = next((x for x in v if x), 0)
    if not lead:
        return None
    inv = pow(lead, -1, q)
    return tuple(x * inv % q for x in v)


class _SpanCache:
    """Maps channel sets to the span of their kernels, shared by equal spans.

    Two sets whose kernels agree up to scalars span the same space, so the
    set of normalized kernels is a cheap key before doing any elimination.
    """

    def __init__(self, code: LinearNetworkCode) -> None:
        q = code.field.q
        self.q = q
        self.n = code.n
        self.norm = {e: _projective(f, q) for e, f in code.kernels.items()}
        self.kernels = code.kernels

    def key(self, A: Iterable[str]) -> frozenset[Vector]:
        norm = self.norm
        return frozenset(v for v in (norm[e] for e in A) if v is not None)


def _rref_key(vectors: Iterable[Sequence[int]], q: int, n: int) -> tuple[Vector, ...]:
    rows = [list(v) for v in vectors]
    if not rows:
        return ()
    pivots = row_reduce(rows, q, n)
    return tuple(tuple(rows[i]) for i in range(len(pivots)))


class _Subspace:
    """Membership test for a subspace of F_q^n, prepared for a coordinate-by-
    coordinate search that fixes coordinates n-1, n-2, ..., 0 in turn."""

    __slots__ = ("H", "left", "free_zero")

    def __init__(self, spanning: Sequence[Sequence[int]], q: int, n: int) -> None:
        # parity checks: v is in the subspace iff H v = 0
        H = null_space_rows(spanning, q, n) if spanning else [list(r) for r in _identity(n)]
        self.H = H
        self.left = []
        self.free_zero = []
        for depth in range(n + 1):
            nfree = n - depth
            cols = [[h[j] for h in H] for j in range(nfree)]  # H restricted to free coordinates, transposed
            # y with y . H_free = 0: the RHS H_fixed c must be orthogonal to all of them
            left = null_space_rows(cols, q, len(H)) if cols else [list(r) for r in _identity(len(H))]
            self.left.append(left)
            self.free_zero.append(all(not x for col in cols for x in col))


def _identity(n: int) -> list[tuple[int, ...]]:
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]


def _first_outside(subspaces: Sequence[_Subspace], n: int, q: int) -> Vector | None:
    """Smallest vector, comparing coordinates from the last one, lying in none
    of the subspaces.

    A search node fixes a suffix of coordinates, i.e. an affine region.  A
    subspace is dropped once it misses the region and prunes the node once it
    contains the whole region.  With fewer than q subspaces every region not
    contained in a single one still has a good point, so the search never
    backtracks except out of pruned children.
    """
    if any(not s.H for s in subspaces):
        return None
    budget = [_SEARCH_BUDGET]
    vec = [0] * n

    def visit(depth: int, active: list[tuple[_Subspace, list[int]]]) -> bool:
        budget[0] -= 1
        if budget[0] < 0:
            raise FieldTooSmallError("secure basis search budget exhausted")
        still = []
        for sub, rhs in active:
            if any(sum(y * x for y, x in zip(row, rhs)) % q for row in sub.left[depth]):
                continue  # misses this region
            if sub.free_zero[depth]:
                return False  # region lies inside the subspace
            still.append((sub, rhs))
        if not still:
            for j in range(n - depth):
                vec[j] = 0
            return True
        j = n - 1 - depth
        for v in range(q):
            vec[j] = v
            nxt = [(sub, [(a + v * h[j]) % q for a, h in zip(rhs, sub.H)]) for sub, rhs in still]
            if visit(depth + 1, nxt):
                return True
        return False

    start = [(s, [0] * len(s.H)) for s in subspaces]
    return tuple(vec) if visit(0, start) else None


def _key_spans(code: LinearNetworkCode, keys: Iterable[Sequence[str]]) -> list[list[Vector]]:
    cache = _SpanCache(code)
    q, n = code.field.q, code.n
    seen_kernels = {cache.key(C) for C in keys}
    spans = {_rref_key(vs, q, n) for vs in seen_kernels}
    return [list(s) for s in sorted(spans)]


def choose_secure_basis(code: LinearNetworkCode, omega: int, r: int,
                        keys: Iterable[Sequence[str]]) -> list[Vector]:
    """Greedy secure basis b_1..b_n.

    Each message vector b_i is the first candidate that keeps b_1..b_i
    independent and avoids span(b_1..b_{i-1}) + <f_e : e in C> for every key
    C.  The remaining r vectors complete a basis.  Candidates are ordered as
    tuples compared from the last coordinate, so with nothing to avoid the
    result is the standard basis.
    """
    n, q = code.n, code.field.q
    if omega < 0 or r < 0 or omega + r != n:
        raise LevelError(f"omega={omega} and r={r} must be nonnegative and sum to n={n}")
    spans = _key_spans(code, keys) if r else []
    chosen: list[Vector] = []
    for step in range(1, omega + 1):
        forbidden = {_rref_key(chosen + span, q, n) for span in spans} or {_rref_key(chosen, q, n)}
        subs = [_Subspace(list(basis), q, n) for basis in sorted(forbidden)]
        v = _first_outside(subs, n, q)
        if v is None:
            raise FieldTooSmallError(
                f"no secure vector b_{step} over F_{q} against {len(spans)} distinct wiretap spans; "
                f"retry with q >= {next_prime(max(q + 1, len(spans)))}",
                step=step,
            )
        chosen.append(v)
    while len(chosen) < n:
        v = _first_outside([_Subspace(chosen, q, n)], n, q)
        assert v is not None
        chosen.append(v)
    return chosen


def build_secure_code(code: LinearNetworkCode, omega: int, r: int,
                      keys: Iterable[Sequence[str]]) -> SecureCode:
    basis = choose_secure_basis(code, omega, r, keys)
    return SecureCode(code, omega, r, FieldMatrix.from_columns(code.field, basis, code.n))


def verify_secure_condition(sc: SecureCode, sets: Iterable[Sequence[str]]) -> Verdict:
    """Rank test rank([B | F_A]) = omega + rank(F_A) for every A.

    Sets are checked in lexicographic order and sets with identical kernel
    spans share one test, so the first failure reported is the smallest one.
    """
    q, omega = sc.field.q, sc.omega
    if omega == 0:
        return Verdict(True, None)
    B = [list(row) for row in sc.message_basis().columns()]
    cache = _SpanCache(sc.lnc)
    verdicts: dict[frozenset[Vector], bool] = {}
    for A in sorted(ChannelSet(A) for A in sets):
        key = cache.key(A)
        ok = verdicts.get(key)
        if ok is None:
            F = list(key)
            ok = rank_of(B + F, q) == omega + rank_of(F, q)
            verdicts[key] = ok
        if not ok:
            return Verdict(False, A)
    return Verdict(True, None)


def _vector(values: Sequence[int], length: int, q: int, what: str) -> Vector:
    if len(values) != length:
        raise DimensionError(f"{what} must have length {length}, got {len(values)}")
    return tuple(int(x) % q for x in values)


def encode(sc: SecureCode, m: Sequence[int], k: Sequence[int]) -> Transmission:
    q = sc.field.q
    m = _vector(m, sc.omega, q, "message")
    k = _vector(k, sc.r, q, "key")
    x = m + k
    y = [sum(x[i] * sc.Qinv.rows[i][j] for i in range(sc.n)) % q for j in range(sc.n)]
    symbols = {
        e: sum(a * b for a, b in zip(y, f)) % q for e, f in sc.lnc.kernels.items()
    }
    return Transmission(m, k, symbols)


def decode(sc: SecureCode, sink: str, obs: Mapping[str, int]) -> Vector:
    """Recover the message at a sink from the symbols on its in-edges."""
    net = sc.lnc.net
    if sink not in net.sinks:
        raise DecodeError(f"{sink!r} is not a sink")
    q, n = sc.field.q, sc.n
    ins = net.in_edges(sink)
    missing = [e for e in ins if e not in obs]
    if missing:
        raise DecodeError(f"missing observations on {missing}")
    # x G = y with G = Q^-1 F_In(sink); solve via G's rows as unknown coefficients
    G_rows = [[0] * len(ins) for _ in range(n)]
    for j, e in enumerate(ins):
        for i, x in enumerate(sc.precoded_kernel(e)):
            G_rows[i][j] = x
    if rank_of(G_rows, q) < n:
        raise DecodeError(f"sink {sink!r} has rank below {n}")
    y = tuple(int(obs[e]) % q for e in ins)
    x = _solve([tuple(row) for row in G_rows], y, q)
    if x is None:
        raise DecodeError(f"observations at {sink!r} are inconsistent with the code")
    return tuple(x[: sc.omega])


def verify_security_exhaustive(sc: SecureCode, A: Sequence[str]) -> bool:
    """Distributional check: the wiretap view of A under a uniform key has the
    same distribution for every message."""
    q, omega, r = sc.field.q, sc.omega, sc.r
    if q ** (omega + r) > EXHAUSTIVE_LIMIT:
        raise InstanceTooLargeError(f"q^(omega+r) = {q}^{omega + r} exceeds {EXHAUSTIVE_LIMIT}")
    A = ChannelSet(A)
    G = [sc.precoded_kernel(e) for e in A]  # one column per wiretapped edge

    def view(x: Sequence[int]) -> Vector:
        return tuple(sum(a * b for a, b in zip(x, g)) % q for g in G)

    key_part = Counter(view((0,) * omega + k) for k in itertools.product(range(q), repeat=r))
    reference = None
    for m in itertools.product(range(q), repeat=omega):
        shift = view(m + (0,) * r)
        dist = Counter({tuple((a + b) % q for a, b in zip(obs, shift)): c for obs, c in key_part.items()})
        if reference is None:
            reference = dist
        elif dist != reference:
            return False
    return True


# ---------------------------------------------------------------- text format


def render_secure_code(sc: SecureCode) -> str:
    lines = [CODE_HEADER, f"q {sc.field.q}", f"n {sc.n}", f"omega {sc.omega}", f"security {sc.r}"]
    lines.extend(_kernel_lines(sc.lnc))
    lines.append("Q")
    lines.extend(sc.Q.dumps().splitlines())
    return "\n".join(lines) + "\n"


def load_secure_code(text: str, net: Network) -> SecureCode:
    doc = parse_code(text)
    if doc.omega is None or doc.security is None or doc.Q is None:
        raise CodeError("code file lacks omega, security or Q")
    field = PrimeField(doc.q)
    code = from_kernels(net, field, doc.n, doc.kernels)
    return SecureCode(code, doc.omega, doc.security, FieldMatrix.from_rows(field, doc.Q, doc.n))


class Construction(NamedTuple):
    code: SecureCode
    wiretap_sets: int
    distinct_keys: int
    classes: int


def construct_secure_code(net: Network, omega: int, r: int, field: PrimeField, *,
                          cap: int = DEFAULT_CAP, workers: int = 1) -> Construction:
    """Multicast code, secure basis, and the mandatory rank post-check over E_r^cut."""
    if omega < 0 or r < 0 or omega + r < 1:
        raise LevelError(f"need omega, r >= 0 with omega + r >= 1, got {omega}, {r}")
    code = construct_lnc(net, omega + r, field)
    sets: list[ChannelSet] = []
    keys: list[ChannelSet] = []
    classes = 0
    if r:
        sets, keys, classes = ercut_and_keys(net, r, cap=cap, workers=workers)
    try:
        sc = build_secure_code(code, omega, r, keys)
    except FieldTooSmallError as exc:
        raise FieldTooSmallError(
            f"{exc} (common-cut classes: {classes})",
            step=exc.step,
        ) from None
    verdict = verify_secure_condition(sc, sets)
    if not verdict.ok:
        raise FieldTooSmallError(f"constructed code fails the secure condition on {verdict.counterexample}")
    return Construction(sc, len(sets), len(keys), classes)
