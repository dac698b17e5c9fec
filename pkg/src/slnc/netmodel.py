"""Acyclic unit-capacity network model, its text format, and generators.

Edges are identified by opaque strings.  Every deterministic ordering in the
package is the plain lexicographic order of those strings; internally an
edge's rank in that order doubles as its bit position in integer edge masks.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple

from .errors import (
    CycleError,
    NetworkError,
    ParseError,
    UnknownEdgeError,
    UnknownNodeError,
)

FORMAT_HEADER = "snc-network v1"


class Edge(NamedTuple):
    id: str
    tail: str
    head: str


class ChannelSet(tuple):
    """Strictly sorted tuple of edge ids.

    Unsorted input is canonicalized; repeated ids are rejected.  Membership in
    a particular network is checked by the operations that receive the set.
    """

    __slots__ = ()

    def __new__(cls, ids: Iterable[str] = ()) -> "ChannelSet":
        items = sorted(ids)
        for a, b in zip(items, items[1:]):
            if a == b:
                raise ValueError(f"duplicate edge id {a!r} in channel set")
        return super().__new__(cls, items)

    @classmethod
    def _trusted(cls, items: Iterable[str]) -> "ChannelSet":
        # caller guarantees strict sortedness
        return tuple.__new__(cls, items)

    def __str__(self) -> str:
        return " ".join(self)

    def __repr__(self) -> str:
        return f"ChannelSet({list(self)!r})"


def _check_token(kind: str, token: str) -> None:
    if not token or any(ch.isspace() for ch in token) or token.startswith("#"):
        raise NetworkError(f"invalid {kind} id {token!r}")


@dataclass(frozen=True)
class Network:
    """Single-source directed acyclic multigraph with unit-capacity edges.

    The constructor validates and canonicalizes: edges are stored sorted by
    id and sinks sorted, so two networks describing the same graph compare
    equal regardless of declaration order.
    """

    edges: tuple[Edge, ...]
    source: str
    sinks: tuple[str, ...]
    nodes: frozenset[str] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        edges = tuple(sorted((Edge(*e) for e in self.edges), key=lambda e: e.id))
        sinks = tuple(sorted(set(self.sinks)))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "sinks", sinks)

        _check_token("node", self.source)
        seen: set[str] = set()
        nodes: set[str] = set()
        for e in edges:
            _check_token("edge", e.id)
            _check_token("node", e.tail)
            _check_token("node", e.head)
            if e.id in seen:
                raise NetworkError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            if e.tail == e.head:
                raise NetworkError(f"edge {e.id!r} is a self-loop")
            if e.head == self.source:
                raise NetworkError(f"edge {e.id!r} enters the source {self.source!r}")
            nodes.add(e.tail)
            nodes.add(e.head)
        if not sinks:
            raise NetworkError("network needs at least one sink")
        for node in (self.source, *sinks):
            _check_token("node", node)
            if node not in nodes:
                raise UnknownNodeError(f"node {node!r} does not appear on any edge")
        if self.source in sinks:
            raise NetworkError("the source cannot be a sink")
        object.__setattr__(self, "nodes", frozenset(nodes))

        ix = self._index  # raises CycleError
        for t in sinks:
            if not ix.from_source >> ix.nidx[t] & 1:
                raise NetworkError(f"sink {t!r} is unreachable from the source")

    @cached_property
    def _index(self) -> "_Index":
        return _Index(self)

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return self._index.edge_ids

    def edge(self, eid: str) -> Edge:
        ix = self._index
        try:
            return self.edges[ix.eidx[eid]]
        except KeyError:
            raise UnknownEdgeError(f"unknown edge {eid!r}") from None

    def in_edges(self, node: str) -> tuple[str, ...]:
        ix = self._index
        return tuple(ix.edge_ids[i] for i in ix.in_edges[ix.nidx[node]])

    def out_edges(self, node: str) -> tuple[str, ...]:
        ix = self._index
        return tuple(ix.edge_ids[i] for i in ix.out_edges[ix.nidx[node]])

    def channel_set(self, ids: Iterable[str]) -> ChannelSet:
        cs = ChannelSet(ids)
        for eid in cs:
            if eid not in self._index.eidx:
                raise UnknownEdgeError(f"unknown edge {eid!r}")
        return cs

    def is_reachable(self, eid: str) -> bool:
        ix = self._index
        self.edge(eid)
        return bool(ix.from_source >> ix.tail[ix.eidx[eid]] & 1)


class _Index:
    """Integer-indexed view of a network used by the hot loops."""

    def __init__(self, net: Network) -> None:
        self.edge_ids: tuple[str, ...] = tuple(e.id for e in net.edges)
        self.eidx = {eid: i for i, eid in enumerate(self.edge_ids)}
        self.node_ids: tuple[str, ...] = tuple(sorted(net.nodes))
        self.nidx = {v: i for i, v in enumerate(self.node_ids)}
        nv = len(self.node_ids)
        self.src = self.nidx[net.source]
        self.tail = [self.nidx[e.tail] for e in net.edges]
        self.head = [self.nidx[e.head] for e in net.edges]
        self.out_edges: list[list[int]] = [[] for _ in range(nv)]
        self.in_edges: list[list[int]] = [[] for _ in range(nv)]
        for i, (t, h) in enumerate(zip(self.tail, self.head)):
            self.out_edges[t].append(i)
            self.in_edges[h].append(i)

        indeg = [len(x) for x in self.in_edges]
        ready = [v for v in range(nv) if indeg[v] == 0]
        order: list[int] = []
        while ready:
            v = ready.pop()
            order.append(v)
            for i in self.out_edges[v]:
                h = self.head[i]
                indeg[h] -= 1
                if indeg[h] == 0:
                    ready.append(h)
        if len(order) != nv:
            stuck = sorted(self.node_ids[v] for v in range(nv) if indeg[v] > 0)
            raise CycleError(f"network contains a directed cycle through {stuck[:5]}")
        self.node_order = order

        # node_reach[v]: bitmask of nodes reachable from v, v included
        reach = [0] * nv
        for v in reversed(order):
            m = 1 << v
            for i in self.out_edges[v]:
                m |= reach[self.head[i]]
            reach[v] = m
        self.node_reach = reach
        self.from_source = reach[self.src]

        # anc[e]: edges lying on some source path into tail(e)
        ne = len(self.edge_ids)
        into = [0] * nv
        for v in order:
            m = 0
            for i in self.in_edges[v]:
                if self.from_source >> self.tail[i] & 1:
                    m |= into[self.tail[i]] | (1 << i)
            into[v] = m
        self.into_node = into
        self.anc = [into[self.tail[i]] for i in range(ne)]
        self.reachable_edges = [i for i in range(ne) if self.from_source >> self.tail[i] & 1]

    def mask(self, ids: Iterable[str]) -> int:
        m = 0
        try:
            for eid in ids:
                m |= 1 << self.eidx[eid]
        except KeyError as exc:
            raise UnknownEdgeError(f"unknown edge {exc.args[0]!r}") from None
        return m

    def to_set(self, mask: int) -> ChannelSet:
        ids = self.edge_ids
        out = []
        while mask:
            low = mask & -mask
            out.append(ids[low.bit_length() - 1])
            mask ^= low
        return ChannelSet._trusted(out)


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------- file format


def render_network(net: Network) -> str:
    lines = [FORMAT_HEADER, f"source {net.source}", "sinks " + " ".join(net.sinks)]
    lines.extend(f"edge {e.id} {e.tail} {e.head}" for e in net.edges)
    return "\n".join(lines) + "\n"


def load_network(text: bytes | str) -> Network:
    """Parse an ``snc-network v1`` document."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(1, f"not UTF-8: {exc}") from None
    source: str | None = None
    sinks: list[str] | None = None
    edges: list[Edge] = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if not header_seen:
            if line.strip() != FORMAT_HEADER:
                raise ParseError(lineno, f"expected header {FORMAT_HEADER!r}")
            header_seen = True
            continue
        tokens = line.split(" ")
        if any(not tok for tok in tokens):
            raise ParseError(lineno, "tokens must be separated by single spaces")
        kind, args = tokens[0], tokens[1:]
        if kind == "source":
            if len(args) != 1:
                raise ParseError(lineno, "source takes exactly one node id")
            if source is not None:
                raise ParseError(lineno, "source declared twice")
            source = args[0]
        elif kind == "sinks":
            if not args:
                raise ParseError(lineno, "sinks needs at least one node id")
            if sinks is not None:
                raise ParseError(lineno, "sinks declared twice")
            if len(set(args)) != len(args):
                raise ParseError(lineno, "repeated sink id")
            sinks = args
        elif kind == "edge":
            if len(args) != 3:
                raise ParseError(lineno, "edge takes <edge-id> <tail> <head>")
            edges.append(Edge(*args))
        else:
            raise ParseError(lineno, f"unknown declaration {kind!r}")
    if not header_seen:
        raise ParseError(1, "empty document")
    if source is None:
        raise ParseError(lineno, "missing source declaration")
    if sinks is None:
        raise ParseError(lineno, "missing sinks declaration")
    return Network(tuple(edges), source, tuple(sinks))


# ---------------------------------------------------------------- generators


def gen_combination(N: int, k: int) -> Network:
    """Combination network: source, N relays, one sink per k-subset of relays.

    Upper edges are ``u<i>`` (source to relay ``v<i>``); sinks ``t<j>`` follow
    the lexicographic order of their relay subsets and receive lower edges
    ``l<i>_<j>`` from each chosen relay.
    """
    if N < 1 or k < 1:
        raise ValueError("N and k must be positive")
    if k > N:
        raise ValueError(f"k={k} exceeds N={N}")
    edges = [Edge(f"u{i}", "s", f"v{i}") for i in range(1, N + 1)]
    sinks = []
    for j, subset in enumerate(itertools.combinations(range(1, N + 1), k), start=1):
        sinks.append(f"t{j}")
        edges.extend(Edge(f"l{i}_{j}", f"v{i}", f"t{j}") for i in subset)
    return Network(tuple(edges), "s", tuple(sinks))


def gen_path(length: int) -> Network:
    """Chain s -> n1 -> ... -> t with edges e1..e<length>."""
    if length < 1:
        raise ValueError("length must be positive")
    names = ["s"] + [f"n{i}" for i in range(1, length)] + ["t"]
    edges = [Edge(f"e{i + 1}", names[i], names[i + 1]) for i in range(length)]
    return Network(tuple(edges), "s", ("t",))


# ---------------------------------------------------------------- order


def topological_order(net: Network) -> tuple[str, ...]:
    """Edges ordered so every edge follows all edges that can reach it.

    Among edges that are simultaneously ready the smallest id goes first.
    """
    ix = net._index
    pending = [len(ix.in_edges[ix.tail[i]]) for i in range(len(ix.edge_ids))]
    heap = [i for i, p in enumerate(pending) if p == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        i = heapq.heappop(heap)
        out.append(ix.edge_ids[i])
        for j in ix.out_edges[ix.head[i]]:
            pending[j] -= 1
            if pending[j] == 0:
                heapq.heappush(heap, j)
    return tuple(out)


def precedes(net: Network, e1: str, e2: str) -> bool:
    """The reflexive edge order: e1 == e2, or a path leads from e1 into e2."""
    ix = net._index
    for eid in (e1, e2):
        if eid not in ix.eidx:
            raise UnknownEdgeError(f"unknown edge {eid!r}")
    if e1 == e2:
        return True
    i, j = ix.eidx[e1], ix.eidx[e2]
    return bool(ix.node_reach[ix.head[i]] >> ix.tail[j] & 1)
