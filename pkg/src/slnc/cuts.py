"""Minimum cuts between the source and a channel set.

A channel set A is turned into a single target by rerouting every edge of A
into a fresh node t_A (the edge keeps its tail).  Cuts are reported in the
original edge ids, so a rerouted edge shows up as the A edge it replaced.

Only the edges that lie on some source path into a tail of A can matter, so
all flow work runs on that ancestor subgraph.  For layered networks such as
combination networks it has a handful of edges, which is what makes it
feasible to run hundreds of thousands of max-flow calls in pure Python.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .errors import (
    AlignmentError,
    EmptySetError,
    EnumerationCapError,
    UnreachableEdgeError,
)
from .netmodel import ChannelSet, Edge, Network, _Index, iter_bits, precedes

DEFAULT_CAP = 10**6

_T = -1  # node index of the auxiliary target t_A


@dataclass(frozen=True)
class PathSystem:
    target: ChannelSet
    paths: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class MinCutFamily:
    target: ChannelSet
    cuts: tuple[ChannelSet, ...]

    def __len__(self) -> int:
        return len(self.cuts)

    def __contains__(self, item: object) -> bool:
        return item in self.cuts


class Augmentation(NamedTuple):
    network: Network
    target: str
    replaces: Mapping[str, str]  # replacement edge id -> original edge of A


class _Flow:
    """Unit-capacity max flow on the ancestor subgraph of one target set."""

    __slots__ = ("tails", "heads", "orig", "flow", "value", "out", "inn", "src")

    def __init__(self, ix: _Index, a_mask: int, priority: Sequence[int] | None = None) -> None:
        rel = a_mask
        for i in iter_bits(a_mask):
            rel |= ix.anc[i]
        order = list(iter_bits(rel))
        if priority is not None:
            order.sort(key=priority.__getitem__)
        tails, heads = [], []
        out: dict[int, list[int]] = {}
        inn: dict[int, list[int]] = {}
        for k, i in enumerate(order):
            t = ix.tail[i]
            h = _T if a_mask >> i & 1 else ix.head[i]
            tails.append(t)
            heads.append(h)
            out.setdefault(t, []).append(k)
            inn.setdefault(h, []).append(k)
        self.tails, self.heads, self.orig = tails, heads, order
        self.out, self.inn = out, inn
        self.src = s = ix.src
        flow = [0] * len(order)
        self.flow = flow

        value = 0
        while True:
            parent: dict[int, tuple[int, int]] = {s: (-1, 0)}
            queue = [s]
            found = False
            for u in queue:
                for k in out.get(u, ()):
                    if not flow[k]:
                        v = heads[k]
                        if v not in parent:
                            parent[v] = (k, 1)
                            if v == _T:
                                found = True
                                break
                            queue.append(v)
                if found:
                    break
                for k in inn.get(u, ()):
                    if flow[k]:
                        v = tails[k]
                        if v not in parent:
                            parent[v] = (k, 0)
                            queue.append(v)
            if not found:
                break
            v = _T
            while v != s:
                k, fwd = parent[v]
                flow[k] = fwd
                v = tails[k] if fwd else heads[k]
            value += 1
        self.value = value

    def paths(self) -> list[list[int]]:
        used = [False] * len(self.flow)
        result = []
        for k0 in self.out.get(self.src, ()):
            if not self.flow[k0]:
                continue
            used[k0] = True
            path = [self.orig[k0]]
            u = self.heads[k0]
            while u != _T:
                for k in self.out[u]:
                    if self.flow[k] and not used[k]:
                        used[k] = True
                        path.append(self.orig[k])
                        u = self.heads[k]
                        break
                else:  # pragma: no cover - conservation guarantees a successor
                    raise AssertionError("flow conservation violated")
            result.append(path)
        return result

    def min_cut_masks(self, cap: int = DEFAULT_CAP) -> list[int]:
        """Every minimum cut, as original-edge masks, in no particular order.

        Source sides of minimum cuts are exactly the residual-closed node sets
        containing the source and not t_A.  The closures are enumerated by
        branching on one undecided node at a time: including it forces its
        residual descendants in, excluding it forces its residual ancestors
        out, and both branches always extend to at least one closure.
        """
        tails, heads, flow = self.tails, self.heads, self.flow
        s = self.src
        fw = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for k in self.out.get(u, ()):
                v = heads[k]
                if v not in fw:
                    fw.add(v)
                    stack.append(v)
        if _T not in fw:
            return [0]
        bw = {_T}
        stack = [_T]
        while stack:
            v = stack.pop()
            for k in self.inn.get(v, ()):
                u = tails[k]
                if u not in bw:
                    bw.add(u)
                    stack.append(u)
        keep = sorted(fw & bw)
        loc = {v: n for n, v in enumerate(keep)}
        L = len(keep)
        res: list[list[int]] = [[] for _ in range(L)]
        rres: list[list[int]] = [[] for _ in range(L)]
        edges = []
        for k in range(len(tails)):
            a, b = loc.get(tails[k]), loc.get(heads[k])
            if a is None or b is None:
                continue
            edges.append((a, b, 1 << self.orig[k]))
            if flow[k]:
                res[b].append(a)
                rres[a].append(b)
            else:
                res[a].append(b)
                rres[b].append(a)

        def closure(start: int, adj: list[list[int]]) -> int:
            m = 1 << start
            st = [start]
            while st:
                u = st.pop()
                for v in adj[u]:
                    if not m >> v & 1:
                        m |= 1 << v
                        st.append(v)
            return m

        desc = [closure(v, res) for v in range(L)]
        ancr = [closure(v, rres) for v in range(L)]
        must_in = desc[loc[s]]
        must_out = ancr[loc[_T]]
        free = ((1 << L) - 1) & ~must_in & ~must_out

        found: set[int] = set()
        work = [(must_in, must_out)]
        while work:
            inside, outside = work.pop()
            undecided = free & ~(inside | outside)
            if undecided:
                v = (undecided & -undecided).bit_length() - 1
                work.append((inside, outside | ancr[v]))
                work.append((inside | desc[v], outside))
                continue
            cut = 0
            for a, b, bit in edges:
                if inside >> a & 1 and not inside >> b & 1:
                    cut |= bit
            if cut not in found:
                found.add(cut)
                if len(found) > cap:
                    raise EnumerationCapError(cap, len(found))
        return list(found)


def _target_mask(net: Network, A: Sequence[str]) -> int:
    ix = net._index
    m = ix.mask(A)
    if not m:
        raise EmptySetError("target channel set is empty")
    for i in iter_bits(m):
        if not ix.from_source >> ix.tail[i] & 1:
            raise UnreachableEdgeError(f"edge {ix.edge_ids[i]!r} is unreachable from the source")
    return m


def _priority(net: Network, order: Sequence[str] | None) -> list[int] | None:
    if order is None:
        return None
    ix = net._index
    rank = [len(order)] * len(ix.edge_ids)
    for pos, eid in enumerate(order):
        rank[ix.mask([eid]).bit_length() - 1] = pos
    return rank


def augment_for_set(net: Network, A: Sequence[str]) -> Augmentation:
    """Materialize the rerouted network with its new target node."""
    _target_mask(net, A)
    A = ChannelSet(A)
    target = "t_A"
    while target in net.nodes:
        target += "'"
    taken = set(net.edge_ids)
    replaces = {}
    edges = [e for e in net.edges if e.id not in A]
    for eid in A:
        new = eid + "'"
        while new in taken:
            new += "'"
        taken.add(new)
        replaces[new] = eid
        edges.append(Edge(new, net.edge(eid).tail, target))
    return Augmentation(Network(tuple(edges), net.source, (target,)), target, replaces)


def mincut_capacity(net: Network, A: Sequence[str]) -> int:
    return _Flow(net._index, _target_mask(net, A)).value


def edge_disjoint_paths(net: Network, A: Sequence[str], *,
                        explore_order: Sequence[str] | None = None) -> PathSystem:
    """Maximum set of edge-disjoint source paths, each ending on an edge of A.

    Augmenting searches scan edges by id unless ``explore_order`` gives a
    different priority (edges missing from it go last).
    """
    ix = net._index
    flow = _Flow(ix, _target_mask(net, A), _priority(net, explore_order))
    paths = tuple(tuple(ix.edge_ids[i] for i in p) for p in flow.paths())
    return PathSystem(net.channel_set(A), paths)


def is_cut(net: Network, C: Sequence[str], A: Sequence[str]) -> bool:
    """Whether removing C separates the source from every edge of A.

    Independent of the flow code: a plain reachability sweep in the network
    with C and A removed, then a check that no surviving A edge has a tail the
    source can still reach.
    """
    ix = net._index
    c_mask = ix.mask(C)
    a_mask = ix.mask(A)
    blocked = c_mask | a_mask
    seen = 1 << ix.src
    stack = [ix.src]
    while stack:
        u = stack.pop()
        for i in ix.out_edges[u]:
            if blocked >> i & 1:
                continue
            h = ix.head[i]
            if not seen >> h & 1:
                seen |= 1 << h
                stack.append(h)
    for i in iter_bits(a_mask & ~c_mask):
        if seen >> ix.tail[i] & 1:
            return False
    return True


def enumerate_min_cuts(net: Network, A: Sequence[str], cap: int = DEFAULT_CAP) -> MinCutFamily:
    ix = net._index
    flow = _Flow(ix, _target_mask(net, A))
    cuts = sorted(ix.to_set(m) for m in flow.min_cut_masks(cap))
    return MinCutFamily(net.channel_set(A), tuple(cuts))


def _pick_on_path(cut: Sequence[str], path: Sequence[str], which: str) -> str:
    hits = [e for e in path if e in cut]
    if len(hits) != 1:
        raise AlignmentError(f"{which} meets path {' '.join(path)} in {len(hits)} edges")
    return hits[0]


def min_cut_meet(net: Network, ps: PathSystem, C1: Sequence[str], C2: Sequence[str]) -> ChannelSet:
    """Per path, keep whichever of the two cut edges comes first."""
    C1, C2 = net.channel_set(C1), net.channel_set(C2)
    r = len(ps.paths)
    if len(C1) != r or len(C2) != r:
        raise AlignmentError(f"cuts of sizes {len(C1)}, {len(C2)} against {r} paths")
    chosen = []
    for path in ps.paths:
        e1 = _pick_on_path(C1, path, "first cut")
        e2 = _pick_on_path(C2, path, "second cut")
        chosen.append(e1 if precedes(net, e1, e2) else e2)
    meet = ChannelSet(chosen)
    assert len(meet) == r and is_cut(net, meet, ps.target), "meet is not a minimum cut"
    return meet
