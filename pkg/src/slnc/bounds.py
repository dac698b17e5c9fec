"""Topological field-size bounds: E_r^cut, its common-cut classes, and the report.

E_r^cut is scanned over size-r subsets of reachable edges in lexicographic
order.  The scan can be split across worker processes by the position of the
smallest edge of each subset; results are concatenated in task order, so the
output never depends on the worker count.

Classes are formed by union-find over canonical cut keys: two sets land in
the same bucket whenever they share a minimum cut.  That bucket relation is
the transitive closure of "shares a minimum cut", and because sharing a
minimum cut is itself transitive on E_r^cut the buckets are exactly its
equivalence classes.
"""

from __future__ import annotations

import itertools
import multiprocessing
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Sequence

from .cuts import DEFAULT_CAP, _Flow
from .errors import LevelError
from .lnc import min_sink_capacity
from .netmodel import ChannelSet, Network, _Index

_Scan = list[tuple[int, tuple[int, ...]]]

_worker_index: _Index | None = None


def _init_worker(net: Network) -> None:
    global _worker_index
    _worker_index = net._index


def _scan_first(ix: _Index, pos: int, r: int, want_cuts: bool, cap: int) -> _Scan:
    edges = ix.reachable_edges
    first = edges[pos]
    head_bit = 1 << first
    out: _Scan = []
    for rest in itertools.combinations(edges[pos + 1:], r - 1):
        mask = head_bit
        for i in rest:
            mask |= 1 << i
        flow = _Flow(ix, mask)
        if flow.value == r:
            out.append((mask, tuple(flow.min_cut_masks(cap)) if want_cuts else ()))
    return out


def _scan_task(args: tuple[int, int, bool, int]) -> _Scan:
    assert _worker_index is not None
    return _scan_first(_worker_index, *args)


def _check_level(net: Network, r: int) -> int:
    c_min = min_sink_capacity(net)
    if not 1 <= r <= c_min:
        raise LevelError(f"security level r={r} outside 1..{c_min}")
    return c_min


def _scan(net: Network, r: int, want_cuts: bool, cap: int = DEFAULT_CAP, workers: int = 1) -> _Scan:
    ix = net._index
    positions = range(len(ix.reachable_edges) - r + 1)
    if workers <= 1:
        chunks = [_scan_first(ix, p, r, want_cuts, cap) for p in positions]
    else:
        methods = multiprocessing.get_all_start_methods()
        ctx = multiprocessing.get_context("fork" if "fork" in methods else "spawn")
        with ProcessPoolExecutor(workers, mp_context=ctx, initializer=_init_worker,
                                 initargs=(net,)) as pool:
            chunks = list(pool.map(_scan_task, [(p, r, want_cuts, cap) for p in positions]))
    return [item for chunk in chunks for item in chunk]


def enumerate_E_r_cut(net: Network, r: int, *, workers: int = 1) -> list[ChannelSet]:
    """All r-sets A of reachable edges with mincut(s, A) = r, in lexicographic order."""
    _check_level(net, r)
    ix = net._index
    return [ix.to_set(mask) for mask, _ in _scan(net, r, False, workers=workers)]


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller index as root so roots are class representatives
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _classify(scan: _Scan) -> tuple[list[int], dict[int, int], Counter[int]]:
    """Union-find over shared cut keys.

    Returns the root of every scanned set, the owning set of each cut key,
    and how many sets carry each key.
    """
    uf = _UnionFind(len(scan))
    owner: dict[int, int] = {}
    uses: Counter[int] = Counter()
    for a, (_, cuts) in enumerate(scan):
        for key in cuts:
            uses[key] += 1
            b = owner.setdefault(key, a)
            if b != a:
                uf.union(a, b)
    return [uf.find(a) for a in range(len(scan))], owner, uses


@dataclass(frozen=True)
class ClassPartition:
    r: int
    classes: tuple[tuple[ChannelSet, ...], ...]
    witness_cuts: tuple[tuple[ChannelSet, ...], ...]  # cuts shared by >= 2 members, per class
    representatives: tuple[ChannelSet, ...]

    def __len__(self) -> int:
        return len(self.classes)


def _partition(net: Network, r: int, scan: _Scan) -> ClassPartition:
    ix = net._index
    roots, owner, uses = _classify(scan)
    members: dict[int, list[ChannelSet]] = {}
    for (mask, _), root in zip(scan, roots):
        members.setdefault(root, []).append(ix.to_set(mask))
    witnesses: dict[int, list[int]] = {root: [] for root in members}
    for key, a in owner.items():
        if uses[key] > 1:
            witnesses[roots[a]].append(key)
    order = sorted(members)  # roots are minimal indices, i.e. lexicographic representatives
    return ClassPartition(
        r=r,
        classes=tuple(tuple(members[root]) for root in order),
        witness_cuts=tuple(tuple(sorted(ix.to_set(k) for k in witnesses[root])) for root in order),
        representatives=tuple(members[root][0] for root in order),
    )


def equivalence_classes(net: Network, r: int, *, cap: int = DEFAULT_CAP, workers: int = 1) -> ClassPartition:
    _check_level(net, r)
    return _partition(net, r, _scan(net, r, True, cap, workers))


def class_subspace_keys(net: Network, r: int, *, cap: int = DEFAULT_CAP, workers: int = 1) -> list[ChannelSet]:
    """Every distinct minimum cut of every member of E_r^cut, sorted."""
    _check_level(net, r)
    keys = {key for _, cuts in _scan(net, r, True, cap, workers) for key in cuts}
    ix = net._index
    return sorted(ix.to_set(k) for k in keys)


def source_layer_profile(net: Network, sets: Sequence[Sequence[str]]) -> dict[int, int]:
    """Count sets by how many of their edges leave the source."""
    upper = set(net.out_edges(net.source))
    counts = Counter(sum(e in upper for e in A) for A in sets)
    return dict(sorted(counts.items(), reverse=True))


@dataclass(frozen=True)
class BoundsReport:
    edges: int
    sinks: int
    c_min: int
    r: int
    binom: int
    ercut: int
    classes: int
    rouayheb1: int
    rouayheb2: int
    silva_base: int
    silva_exponent: int
    layer_profile: dict[int, int]

    @property
    def silva_value(self) -> int:
        return self.silva_base ** self.silva_exponent

    def key_values(self) -> list[tuple[str, str]]:
        kv = [
            ("edges", self.edges), ("sinks", self.sinks), ("cmin", self.c_min), ("r", self.r),
            ("binom", self.binom), ("ercut", self.ercut), ("classes", self.classes),
            ("rouayheb1", self.rouayheb1), ("rouayheb2", self.rouayheb2),
            ("silva", f"{self.silva_base}^{self.silva_exponent}"), ("silva_value", self.silva_value),
        ]
        kv.extend((f"ercut_src{j}", n) for j, n in self.layer_profile.items())
        return [(k, str(v)) for k, v in kv]

    def render_kv(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.key_values())

    def render_table(self) -> str:
        rows = [
            ("channels |E|", self.edges),
            ("sinks |T|", self.sinks),
            ("min sink cut C_min", self.c_min),
            ("security level r", self.r),
            ("C(|E|, r)", self.binom),
            ("|E_r^cut|", self.ercut),
            ("common-cut classes", self.classes),
            ("C(|E|-1, r-1) + |T|", self.rouayheb1),
            ("C(2 C_min^3 |T|^2 - 1, r-1) + |T|", self.rouayheb2),
            ("|T|^C_min (packet reference)", f"{self.silva_base}^{self.silva_exponent} ({self.silva_value})"),
        ]
        rows.extend((f"  E_r^cut sets with {j} source edges", n) for j, n in self.layer_profile.items())
        width = max(len(label) for label, _ in rows)
        return "".join(f"{label.ljust(width)}  {value}\n" for label, value in rows)


def bound_report(net: Network, r: int, *, cap: int = DEFAULT_CAP, workers: int = 1) -> BoundsReport:
    c_min = _check_level(net, r)
    scan = _scan(net, r, True, cap, workers)
    roots, _, _ = _classify(scan)
    ix = net._index
    E, T = len(net.edges), len(net.sinks)
    return BoundsReport(
        edges=E,
        sinks=T,
        c_min=c_min,
        r=r,
        binom=comb(E, r),
        ercut=len(scan),
        classes=len(set(roots)),
        rouayheb1=comb(E - 1, r - 1) + T,
        rouayheb2=comb(2 * c_min**3 * T**2 - 1, r - 1) + T,
        silva_base=T,
        silva_exponent=c_min,
        layer_profile=source_layer_profile(net, [ix.to_set(m) for m, _ in scan]),
    )


def ercut_and_keys(net: Network, r: int, *, cap: int = DEFAULT_CAP,
                   workers: int = 1) -> tuple[list[ChannelSet], list[ChannelSet], int]:
    """E_r^cut, the distinct minimum cuts of its members, and the class count,
    all from one scan."""
    _check_level(net, r)
    ix = net._index
    scan = _scan(net, r, True, cap, workers)
    roots, owner, _ = _classify(scan)
    return ([ix.to_set(m) for m, _ in scan], sorted(ix.to_set(k) for k in owner),
            len(set(roots)))
