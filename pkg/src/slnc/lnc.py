"""Deterministic multicast linear network codes and code-dependent set analysis.

The construction follows the flow-path scheme: every sink tracks n
edge-disjoint source paths and a frontier of n channels whose global kernels
form a basis.  Edges are visited in topological order; an edge on some
tracked path takes the lexicographically smallest local coefficient tuple
that keeps every affected frontier a basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .cuts import edge_disjoint_paths
from .errors import CodeError, FieldTooSmallError, RateError, SNCError, UnknownEdgeError
from .gf import FieldMatrix, PrimeField, invert, next_prime, rank_of, row_reduce
from .netmodel import ChannelSet, Network, topological_order

CODE_HEADER = "snc-code v1"
_SEARCH_BUDGET = 10**6

Vector = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class LinearNetworkCode:
    net: Network
    n: int
    field: PrimeField
    kernels: dict[str, Vector]
    local: dict[str, Vector] = field(repr=False)

    def kernel(self, eid: str) -> Vector:
        try:
            return self.kernels[eid]
        except KeyError:
            raise UnknownEdgeError(f"unknown edge {eid!r}") from None

    def in_channels(self, eid: str) -> list[Vector]:
        """Global kernels feeding an edge: the imaginary source channels for
        edges leaving the source, otherwise the in-edges of its tail by id."""
        tail = self.net.edge(eid).tail
        if tail == self.net.source:
            return [_unit(i, self.n) for i in range(self.n)]
        return [self.kernels[f] for f in self.net.in_edges(tail)]


def _unit(i: int, n: int) -> Vector:
    return tuple(int(j == i) for j in range(n))


def _combine(coeffs: Sequence[int], vectors: Sequence[Vector], n: int, q: int) -> Vector:
    out = [0] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for i, x in enumerate(v):
                out[i] += c * x
    return tuple(x % q for x in out)


def _live_in_edges(net: Network, t: str) -> list[str]:
    # in-edges the source cannot reach carry nothing
    return [e for e in net.in_edges(t) if net.is_reachable(e)]


def sink_capacities(net: Network) -> dict[str, int]:
    from .cuts import mincut_capacity

    return {t: mincut_capacity(net, _live_in_edges(net, t)) for t in net.sinks}


def min_sink_capacity(net: Network) -> int:
    return min(sink_capacities(net).values())


def _smallest_avoiding(forms: list[tuple[list[int], str]], width: int, q: int) -> tuple[list[int], str | None]:
    """Lexicographically smallest tuple c with sum(a_j c_j) != 0 for every form.

    A form is decided once its last nonzero coefficient is assigned, which is
    where it gets checked.  When q exceeds the number of forms no backtracking
    ever happens.  Returns ``([], sink)`` on exhaustion.
    """
    by_last: list[list[int]] = [[] for _ in range(width)]
    for idx, (a, _) in enumerate(forms):
        last = max(j for j, x in enumerate(a) if x)
        by_last[last].append(idx)
    partial = [0] * len(forms)
    values = [0] * width
    budget = [_SEARCH_BUDGET]
    failed: list[str | None] = [None]

    def descend(j: int) -> bool:
        if j == width:
            return True
        for v in range(q):
            budget[0] -= 1
            if budget[0] < 0:
                return False
            ok = True
            for idx in by_last[j]:
                if (partial[idx] + forms[idx][0][j] * v) % q == 0:
                    ok = False
                    failed[0] = forms[idx][1]
                    break
            if not ok:
                continue
            values[j] = v
            for idx, (a, _) in enumerate(forms):
                partial[idx] += a[j] * v
            if descend(j + 1):
                return True
            for idx, (a, _) in enumerate(forms):
                partial[idx] -= a[j] * v
        values[j] = 0
        return False

    if descend(0):
        return values, None
    return [], failed[0]


def construct_lnc(net: Network, n: int, field: PrimeField) -> LinearNetworkCode:
    """Build an n-dimensional multicast code over ``field``."""
    if n < 1:
        raise RateError(f"dimension must be positive, got {n}")
    q = field.q
    caps = sink_capacities(net)
    c_min = min(caps.values())
    if n > c_min:
        raise RateError(f"dimension {n} exceeds the minimum sink cut capacity {c_min}")

    # (sink, position) of every tracked path through each edge
    through: dict[str, list[tuple[str, int]]] = {}
    frontier: dict[str, list[Vector]] = {}
    for t in net.sinks:
        paths = edge_disjoint_paths(net, _live_in_edges(net, t)).paths[:n]
        for pos, path in enumerate(paths):
            for eid in path:
                through.setdefault(eid, []).append((t, pos))
        frontier[t] = [_unit(i, n) for i in range(n)]
    inverse = {t: [list(_unit(i, n)) for i in range(n)] for t in net.sinks}

    kernels: dict[str, Vector] = {}
    local: dict[str, Vector] = {}
    code = LinearNetworkCode(net, n, field, kernels, local)
    for eid in topological_order(net):
        inputs = code.in_channels(eid)
        width = len(inputs)
        users = through.get(eid, [])
        if users:
            forms = []
            for t, pos in users:
                phi = inverse[t][pos]
                forms.append(([sum(a * b for a, b in zip(phi, g)) % q for g in inputs], t))
            coeffs, bad_sink = _smallest_avoiding(forms, width, q)
            if not coeffs:
                raise FieldTooSmallError(
                    f"no local coefficients for edge {eid!r} keep sink {bad_sink!r} decodable over "
                    f"F_{q}; {len(net.sinks)} sinks usually need q >= {len(net.sinks)} "
                    f"(try q={next_prime(q + 1)})",
                    edge=eid, sink=bad_sink,
                )
        else:
            coeffs = [0] * width
            nonzero = [j for j, g in enumerate(inputs) if any(g)]
            if nonzero:
                coeffs[nonzero[-1]] = 1
        f = _combine(coeffs, inputs, n, q)
        kernels[eid] = f
        local[eid] = tuple(coeffs)
        for t, pos in users:
            frontier[t][pos] = f
            basis = FieldMatrix.from_columns(field, frontier[t], n)
            inverse[t] = [list(row) for row in invert(basis).rows]

    return code


def from_kernels(net: Network, field: PrimeField, n: int, kernels: dict[str, Sequence[int]]) -> LinearNetworkCode:
    """Wrap explicit global kernels, deriving local coefficients.

    Raises CodeError if an edge's kernel is not a combination of its inputs,
    or some sink cannot decode.
    """
    q = field.q
    missing = set(net.edge_ids) - set(kernels)
    extra = set(kernels) - set(net.edge_ids)
    if missing or extra:
        raise CodeError(f"kernel table mismatch: missing {sorted(missing)[:5]}, unknown {sorted(extra)[:5]}")
    table: dict[str, Vector] = {}
    for eid, vec in kernels.items():
        if len(vec) != n:
            raise CodeError(f"kernel of {eid!r} has length {len(vec)}, expected {n}")
        table[eid] = tuple(int(x) % q for x in vec)
    code = LinearNetworkCode(net, n, field, table, {})
    for eid in net.edge_ids:
        inputs = code.in_channels(eid)
        coeffs = _solve(inputs, table[eid], q)
        if coeffs is None:
            raise CodeError(f"kernel of {eid!r} is not a combination of its input kernels")
        code.local[eid] = coeffs
    bad = [t for t in net.sinks if rank_of(kernel_matrix(code, net.in_edges(t)).rows, q) < n]
    if bad:
        raise CodeError(f"sinks {bad[:5]} cannot decode")
    return code


def _solve(cols: list[Vector], target: Vector, q: int) -> Vector | None:
    n = len(target)
    width = len(cols)
    aug = [[cols[j][i] for j in range(width)] + [target[i]] for i in range(n)]
    pivots = row_reduce(aug, q, width + 1)
    if width in pivots:
        return None
    x = [0] * width
    for i, p in enumerate(pivots):
        x[p] = aug[i][width]
    return tuple(x)


def check_kernel_recursion(code: LinearNetworkCode) -> list[str]:
    """Edges whose stored kernel differs from the local-coefficient recursion."""
    bad = []
    for eid in topological_order(code.net):
        recomputed = _combine(code.local[eid], code.in_channels(eid), code.n, code.field.q)
        if recomputed != code.kernels[eid]:
            bad.append(eid)
    return bad


def kernel_matrix(code: LinearNetworkCode, A: Sequence[str]) -> FieldMatrix:
    """n x |A| matrix of global kernels, columns in edge-id order."""
    A = ChannelSet(A)
    return FieldMatrix.from_columns(code.field, [code.kernel(e) for e in A], code.n)


def enumerate_E_r(code: LinearNetworkCode, r: int) -> list[ChannelSet]:
    """All r-subsets of edges whose kernels are linearly independent.

    Exhaustive over C(|E|, r) subsets; meant for small networks.
    """
    if not 0 < r <= code.n:
        raise SNCError(f"level r={r} outside 1..{code.n}")
    q = code.field.q
    out = []
    for combo in itertools.combinations(code.net.edge_ids, r):
        if rank_of([code.kernels[e] for e in combo], q) == r:
            out.append(ChannelSet._trusted(combo))
    return out


# ---------------------------------------------------------------- text format


@dataclass
class CodeDocument:
    q: int
    n: int
    kernels: dict[str, Vector]
    omega: int | None = None
    security: int | None = None
    Q: list[list[int]] | None = None


def render_code(code: LinearNetworkCode) -> str:
    lines = [CODE_HEADER, f"q {code.field.q}", f"n {code.n}"]
    lines.extend(_kernel_lines(code))
    return "\n".join(lines) + "\n"


def _kernel_lines(code: LinearNetworkCode) -> Iterator[str]:
    for eid in code.net.edge_ids:
        yield "kernel " + eid + "".join(f" {x}" for x in code.kernels[eid])


def parse_code(text: str) -> CodeDocument:
    lines = [(no, ln.strip()) for no, ln in enumerate(text.splitlines(), start=1)]
    lines = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0][1] != CODE_HEADER:
        raise CodeError(f"expected header {CODE_HEADER!r}")
    header: dict[str, int] = {}
    kernels: dict[str, Vector] = {}
    Q: list[list[int]] | None = None
    it = iter(lines[1:])
    for no, ln in it:
        tokens = ln.split()
        kind = tokens[0]
        try:
            if kind in ("q", "n", "omega", "security"):
                if len(tokens) != 2 or kind in header:
                    raise CodeError(f"line {no}: bad {kind} declaration")
                header[kind] = int(tokens[1])
            elif kind == "kernel":
                if len(tokens) < 2 or tokens[1] in kernels:
                    raise CodeError(f"line {no}: bad kernel declaration")
                kernels[tokens[1]] = tuple(int(x) for x in tokens[2:])
            elif kind == "Q":
                if "n" not in header:
                    raise CodeError(f"line {no}: Q before n")
                Q = []
                for _ in range(header["n"]):
                    no, row = next(it)
                    Q.append([int(x) for x in row.split()])
            else:
                raise CodeError(f"line {no}: unknown declaration {kind!r}")
        except (ValueError, StopIteration):
            raise CodeError(f"line {no}: malformed {kind} declaration") from None
    for key in ("q", "n"):
        if key not in header:
            raise CodeError(f"missing {key} declaration")
    return CodeDocument(header["q"], header["n"], kernels, header.get("omega"),
                        header.get("security"), Q)


def load_code(text: str, net: Network) -> LinearNetworkCode:
    doc = parse_code(text)
    return from_kernels(net, PrimeField(doc.q), doc.n, doc.kernels)
