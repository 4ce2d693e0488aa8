"""Exhaustive, duplicate-free generators for the object families we count.

Everything here is desk-scale brute force with exact integers; these streams
are the ground truth against which every closed formula and every bijection
in the package is checked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .maps_core import (
    DisjointSets,
    PolygonGluing,
    RootedMap,
    euler_data,
)


@dataclass
class CountTable:
    """Finite mapping from integer tuples to exact nonnegative integers.

    Missing keys count as zero.
    """

    by_key: dict = field(default_factory=dict)

    def __getitem__(self, key) -> int:
        return self.by_key.get(tuple(key), 0)

    def __setitem__(self, key, value: int) -> None:
        self.by_key[tuple(key)] = value

    def add(self, key, value: int = 1) -> None:
        key = tuple(key)
        self.by_key[key] = self.by_key.get(key, 0) + value

    def items(self):
        return sorted(self.by_key.items())

    def total(self) -> int:
        return sum(self.by_key.values())

    def merge(self, other: "CountTable") -> None:
        for key, value in other.by_key.items():
            self.add(key, value)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CountTable):
            return NotImplemented
        a = {k: v for k, v in self.by_key.items() if v}
        b = {k: v for k, v in other.by_key.items() if v}
        return a == b


def _matchings(elements):
    """All perfect matchings of the list ``elements`` as lists of pairs."""
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for i, other in enumerate(rest):
        tail = rest[:i] + rest[i + 1:]
        for sub in _matchings(tail):
            yield [(first, other)] + sub


def gen_unicellular(n: int, orientable_only: bool = False, *, first_partner=None):
    """Stream every rooted unicellular map with ``n`` edges as a gluing.

    Produces each gluing exactly once: ``(2n-1)!!`` orientable gluings, or
    ``2^n (2n-1)!!`` in total.  ``first_partner`` optionally restricts the
    stream to gluings where side 0 is matched with that side, which
    partitions the search space for parallel runs.
    """
    if n < 1:
        raise ValueError("need at least one edge")
    sides = list(range(2 * n))
    twist_choices = (False,) if orientable_only else (False, True)
    for partner in sides[1:] if first_partner is None else [first_partner]:
        rest = [s for s in sides[1:] if s != partner]
        for sub in _matchings(rest):
            pairs = [(0, partner)] + sub
            for twists in itertools.product(twist_choices, repeat=n):
                yield PolygonGluing(n, tuple(pairs), twists)


def _vertex_count(n, pairs, twist_mask):
    """Corner-identification vertex count without building objects."""
    nn = 2 * n
    parent = list(range(nn))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    for k, (a, b) in enumerate(pairs):
        if twist_mask >> k & 1:
            union(a, b)
            union((a + 1) % nn, (b + 1) % nn)
        else:
            union(a, (b + 1) % nn)
            union((a + 1) % nn, b)
    return sum(1 for x in range(nn) if find(x) == x)


def vertex_profile(n: int, orientable_only: bool = False) -> CountTable:
    """Count gluings with ``n`` edges by vertex number: key ``(n, v)``.

    With ``orientable_only`` this is the table of one-face maps on orientable
    surfaces; without, the table over all (locally orientable) surfaces.
    """
    if n < 1:
        raise ValueError("need at least one edge")
    table = CountTable()
    sides = list(range(1, 2 * n))
    masks = (0,) if orientable_only else range(1 << n)
    for partner in sides:
        rest = [s for s in sides if s != partner]
        for sub in _matchings(rest):
            pairs = [(0, partner)] + sub
            for mask in masks:
                table.add((n, _vertex_count(n, pairs, mask)))
    return table


def gen_rooted_orientable_maps(e: int):
    """Stream one canonical representative per rooted-isomorphism class of
    rooted maps with ``e`` edges on orientable surfaces, all genera.

    Maps are built directly in canonical form (half-edge labels equal to the
    first-visit order of the root traversal), so no dedupe pass is needed.
    """
    if e < 1:
        raise ValueError("need at least one edge")
    n = 2 * e
    sigma = [-1] * n
    alpha = [-1] * n
    sigma_used = [False] * n

    def rec(event: int, k: int):
        if event == 2 * n:
            yield RootedMap(tuple(sigma), tuple(alpha), 0)
            return
        h, kind = divmod(event, 2)
        if h >= k:
            return  # traversal closed early: disconnected
        if kind == 0:  # examine alpha[h]
            if alpha[h] >= 0:
                yield from rec(event + 1, k)
                return
            for j in range(k):
                if alpha[j] < 0 and j != h:
                    alpha[h], alpha[j] = j, h
                    yield from rec(event + 1, k)
                    alpha[h] = alpha[j] = -1
            if k < n:
                alpha[h], alpha[k] = k, h
                yield from rec(event + 1, k + 1)
                alpha[h] = alpha[k] = -1
        else:  # choose sigma[h]
            for j in range(k):
                if not sigma_used[j]:
                    sigma[h] = j
                    sigma_used[j] = True
                    yield from rec(event + 1, k)
                    sigma_used[j] = False
            sigma[h] = -1
            if k < n:
                sigma[h] = k
                sigma_used[k] = True
                yield from rec(event + 1, k + 1)
                sigma_used[k] = False
                sigma[h] = -1

    yield from rec(0, 1)


def planar_census(max_edges: int, cache_dir=None) -> CountTable:
    """Counts of rooted planar maps by (vertices, faces): key ``(q, r)``.

    Covers all ``q + r - 2 <= max_edges``, including the single vertex map
    at ``(1, 1)``.  When ``cache_dir`` is given the table is persisted there
    and reloaded on later calls (rebuilt if the stored hash does not match).
    """
    if max_edges < 1:
        raise ValueError("max_edges must be at least 1")
    if cache_dir is not None:
        from .cache import load_census, store_census
        cached = load_census(cache_dir, "planar-pqr", {"max_edges": max_edges})
        if cached is not None:
            return cached
    table = CountTable()
    table[(1, 1)] = 1
    for e in range(1, max_edges + 1):
        for m in gen_rooted_orientable_maps(e):
            v, _, f, genus = euler_data(m)
            if genus == 0:
                table.add((v, f))
    if cache_dir is not None:
        store_census(cache_dir, "planar-pqr", {"max_edges": max_edges}, table)
    return table


def spanning_edge_subsets(m: RootedMap):
    """Edge subsets of ``m`` forming spanning trees, as frozensets of edge
    ids (minimum half-edge per edge)."""
    edges = [min(c) for c in m.edges()]
    vertex_of = {}
    for cyc in m.vertices():
        v = min(cyc)
        for h in cyc:
            vertex_of[h] = v
    verts = sorted({vertex_of[h] for h in range(m.half_edge_count)})
    index = {v: i for i, v in enumerate(verts)}
    out = []
    need = len(verts) - 1
    for subset in itertools.combinations(edges, need):
        ds = DisjointSets(len(verts))
        ok = True
        for eid in subset:
            a = index[vertex_of[eid]]
            b = index[vertex_of[m.alpha[eid]]]
            if ds.find(a) == ds.find(b):
                ok = False
                break
            ds.union(a, b)
        if ok:
            out.append(frozenset(subset))
    return out


def gen_tree_rooted_maps(n: int, q: int):
    """Stream all (rooted orientable map with ``n`` edges and vertex set
    ``[q]``, marked spanning tree) triples.

    Yields tuples ``(map, vertex_labels, tree)`` where ``vertex_labels`` maps
    each vertex id (minimum half-edge of its sigma-orbit) to a label in
    ``1..q`` bijectively, and ``tree`` is a frozenset of edge ids.
    """
    if not 1 <= q <= n + 1:
        raise ValueError("need 1 <= q <= n+1")
    for m in gen_rooted_orientable_maps(n):
        verts = [min(c) for c in m.vertices()]
        if len(verts) != q:
            continue
        trees = spanning_edge_subsets(m)
        for perm in itertools.permutations(range(1, q + 1)):
            labels = dict(zip(verts, perm))
            for tree in trees:
                yield m, labels, tree


def surjection_count(v: int, q: int) -> int:
    """Number of surjections from a ``v``-set onto a ``q``-set."""
    from math import comb

    if v < 0 or q < 0:
        raise ValueError("arguments must be nonnegative")
    return sum((-1) ** j * comb(q, j) * (q - j) ** v for j in range(q + 1))
