"""Closure and opening between near-Eulerian trees and plane maps.

A near-Eulerian tree is a rooted plane tree where some edges are oriented
toward the root vertex and some dangling half-edges (buds, ingoing or
outgoing) are inserted in the rotations, subject to every vertex having as
many ingoing as outgoing half-edges.  The closure joins each outgoing bud
to an ingoing bud by a new edge in the unique non-crossing way compatible
with the embedding, producing a plane map (a planar rooted map with a
marked outer face).  The opening inverts this: repeatedly cut, for each
inner face at dual distance 1 from the outer face, its breakable edge (the
outer-incident edge that follows the component of the root vertex around
the face), until only the outer face remains.

Everything is combinatorial: plane maps are rotation systems of genus 0
with a distinguished face, and "counterclockwise" is fixed once and for
all by the three convention flags below.  The flags were pinned by running
the exhaustive round-trip tests over all small instances; flipping any of
them (mirror conventions) breaks the round trips, except for the global
mirror image which is an equally valid but different normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

from .maps_core import DisjointSets, RootedMap, euler_data, trace_faces

# Chirality conventions, calibrated and frozen; see module docstring.
# OPEN_OUT: in face-walk order, outgoing buds open and ingoing buds close
# the non-crossing matching (False means the reverse).
# LEFT_OWN: the face on the reference side of a half-edge h, directed away
# from its vertex, is the face whose orbit contains h (False: the mate's).
# BREAK_AFTER: the breakable edge is the outer-incident edge crossed right
# after walking the root-component stretch of the face (False: before).
# OUTER_AT_IN: the infinite face of a closure lies on the orbit of the
# ingoing bud of the outermost arches (False: the outgoing bud).
# This is the unique combination (out of 16) for which both round trips
# succeed on every instance; all were checked exhaustively up to 8 slots.
OPEN_OUT = True
LEFT_OWN = False
BREAK_AFTER = True
OUTER_AT_IN = False


@dataclass(frozen=True)
class NearEulerianTree:
    """Rooted plane tree with buds and a partial orientation.

    Slots ``0..s-1`` are the rotation items: tree half-edges and buds.
    ``sigma`` is the rotation, ``mate[i]`` the paired slot of a tree
    half-edge and -1 for buds, ``out_buds`` the outgoing buds (the other
    buds are ingoing), ``tails`` the tail slots of the oriented tree edges
    (each must sit on the child side, so the edge points toward the root).
    """

    sigma: tuple
    mate: tuple
    out_buds: frozenset
    tails: frozenset
    root: int = 0

    def __post_init__(self):
        sigma = tuple(self.sigma)
        mate = tuple(self.mate)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "mate", mate)
        object.__setattr__(self, "out_buds", frozenset(self.out_buds))
        object.__setattr__(self, "tails", frozenset(self.tails))
        s = len(sigma)
        if s == 0:
            raise ValueError("need at least one slot")
        if sorted(sigma) != list(range(s)) or len(mate) != s:
            raise ValueError("sigma must be a permutation of the slots")
        if not 0 <= self.root < s:
            raise ValueError("root slot out of range")
        buds = set()
        for i, j in enumerate(mate):
            if j == -1:
                buds.add(i)
            elif not (0 <= j < s) or mate[j] != i or j == i:
                raise ValueError("mate is not an involution with -1 buds")
        if not self.out_buds <= buds:
            raise ValueError("out_buds must be bud slots")
        # vertices are the sigma-orbits; edges must form a spanning tree
        vertex = self._vertex_of()
        nv = len(set(vertex))
        edges = {(i, mate[i]) for i in range(s) if 0 <= mate[i] and i < mate[i]}
        if len(edges) != nv - 1:
            raise ValueError("slot pairing does not form a tree")
        ds = DisjointSets(s)
        for a, b in edges:
            if ds.find(vertex[a]) == ds.find(vertex[b]):
                raise ValueError("slot pairing does not form a tree")
            ds.union(vertex[a], vertex[b])
        # orientation: tails on tree half-edges, toward the root
        if not all(0 <= self.mate[t] for t in self.tails):
            raise ValueError("tails must be tree half-edges")
        if any(self.mate[t] in self.tails for t in self.tails):
            raise ValueError("edge oriented both ways")
        root_v = vertex[self.root]
        depth = self._depths(vertex, edges, root_v)
        for t in self.tails:
            if depth[vertex[t]] <= depth[vertex[self.mate[t]]]:
                raise ValueError("oriented edge points away from the root")
        # balance: per vertex, ingoing items match outgoing items
        flow: dict[int, int] = {}
        for b in buds:
            flow[vertex[b]] = flow.get(vertex[b], 0) + (
                1 if b in self.out_buds else -1)
        for t in self.tails:
            flow[vertex[t]] = flow.get(vertex[t], 0) + 1
            h = self.mate[t]
            flow[vertex[h]] = flow.get(vertex[h], 0) - 1
        if any(flow.values()):
            raise ValueError("near-Eulerian balance fails at a vertex")

    def _vertex_of(self):
        s = len(self.sigma)
        vertex = [-1] * s
        for start in range(s):
            if vertex[start] >= 0:
                continue
            orbit = [start]
            x = self.sigma[start]
            while x != start:
                orbit.append(x)
                x = self.sigma[x]
            m = min(orbit)
            for y in orbit:
                vertex[y] = m
        return vertex

    def _depths(self, vertex, edges, root_v):
        adj: dict[int, list] = {}
        for a, b in edges:
            adj.setdefault(vertex[a], []).append(vertex[b])
            adj.setdefault(vertex[b], []).append(vertex[a])
        depth = {root_v: 0}
        queue = [root_v]
        while queue:
            v = queue.pop(0)
            for w in adj.get(v, ()):
                if w not in depth:
                    depth[w] = depth[v] + 1
                    queue.append(w)
        return depth

    @property
    def in_buds(self) -> frozenset:
        return frozenset(i for i, j in enumerate(self.mate)
                         if j == -1 and i not in self.out_buds)

    @property
    def external_weight(self) -> int:
        return len(self.out_buds)


@dataclass(frozen=True)
class PlaneMap:
    """A rooted planar map with a marked outer face.

    ``outer`` is the minimum half-edge of the marked face's orbit.
    """

    m: RootedMap
    outer: int

    def __post_init__(self):
        v, e, f, genus = euler_data(self.m)
        if genus != 0:
            raise ValueError("plane maps must have genus 0")
        if self.outer not in {min(c) for c in trace_faces(self.m)}:
            raise ValueError("outer is not a face identifier")


# ---------------------------------------------------------------------------
# Generic slot-level machinery (shared with the psi construction, which
# operates on submaps of larger maps)
# ---------------------------------------------------------------------------


def slot_faces(sigma: dict, mate: dict) -> list:
    """Face orbits of a slot system: next slot is ``sigma[mate[x]]`` along
    an edge and ``sigma[x]`` at a bud."""
    def nxt(x):
        m = mate[x]
        return sigma[m] if m >= 0 else sigma[x]

    seen = set()
    out = []
    for start in sigma:
        if start in seen:
            continue
        orbit = [start]
        seen.add(start)
        x = nxt(start)
        while x != start:
            orbit.append(x)
            seen.add(x)
            x = nxt(x)
        out.append(tuple(orbit))
    return out


def slot_vertices(sigma: dict) -> dict:
    """slot -> vertex representative (minimum slot of its sigma orbit)."""
    vertex = {}
    for start in sigma:
        if start in vertex:
            continue
        orbit = [start]
        x = sigma[start]
        while x != start:
            orbit.append(x)
            x = sigma[x]
        rep = min(orbit)
        for y in orbit:
            vertex[y] = rep
    return vertex


def match_buds(bud_walk: list) -> list:
    """Non-crossing matching of buds in cyclic face-walk order.

    ``bud_walk`` lists ``(slot, is_out)`` pairs; outgoing buds open and
    ingoing buds close (or the reverse, under the mirror convention).
    Returns ``(out_slot, in_slot)`` pairs.
    """
    items = list(bud_walk)
    pairs = []
    while items:
        n = len(items)
        done = False
        for i in range(n):
            slot, is_out = items[i]
            nslot, nis_out = items[(i + 1) % n]
            if is_out == OPEN_OUT and nis_out != OPEN_OUT:
                out_slot = slot if is_out else nslot
                in_slot = nslot if is_out else slot
                pairs.append((out_slot, in_slot))
                for k in sorted(((i + 1) % n, i), reverse=True):
                    items.pop(k)
                done = True
                break
        if not done:
            raise ValueError("buds cannot be matched")
    return pairs


def close_slots(sigma: dict, mate: dict, out_buds: set, root: int):
    """Join the buds of a one-face slot system; returns the completed mate
    map, the closure pairs and the outer face representative."""
    faces = slot_faces(sigma, mate)
    if len(faces) != 1:
        raise ValueError("closure needs a single face")
    walk = faces[0]
    start = walk.index(root)
    walk = walk[start:] + walk[:start]
    buds = [(x, x in out_buds) for x in walk if mate[x] < 0]
    pairs = match_buds(buds)
    full = dict(mate)
    for o, i in pairs:
        full[o] = i
        full[i] = o
    closed_faces = slot_faces(sigma, full)
    if pairs:
        # each closure edge covers the stretch of the tree contour from
        # its outgoing to its ingoing bud; only the arches whose stretch
        # is not contained in another one border the infinite face
        pos = {x: k for k, (x, _) in enumerate(buds)}
        nb = len(buds)
        spans = {(o, i): (pos[i] - pos[o]) % nb for o, i in pairs}

        def contains(a, b):
            sa = spans[a]
            return ((pos[b[0]] - pos[a[0]]) % nb < sa
                    and (pos[b[1]] - pos[a[0]]) % nb <= sa)

        outermost = [a for a in pairs
                     if not any(b != a and contains(b, a) for b in pairs)]
        face_of = {x: f for f in closed_faces for x in f}
        side = 1 if OUTER_AT_IN else 0
        outer_orbits = {face_of[a[side]] for a in outermost}
        if len(outer_orbits) != 1:
            raise ValueError("closure edges disagree on the outer face")
        outer = min(outer_orbits.pop())
    else:
        assert len(closed_faces) == 1
        outer = min(closed_faces[0])
    return full, pairs, outer


def slot_dual_distances(sigma: dict, mate: dict, outer: int) -> dict:
    """Dual distance from the outer face, per face representative."""
    faces = slot_faces(sigma, mate)
    face_of = {x: min(f) for f in faces for x in f}
    adj: dict[int, set] = {min(f): set() for f in faces}
    for x, mx in mate.items():
        if mx >= 0:
            adj[face_of[x]].add(face_of[mx])
            adj[face_of[mx]].add(face_of[x])
    start = face_of[outer]
    dist = {start: 0}
    queue = [start]
    while queue:
        f = queue.pop(0)
        for g in adj[f]:
            if g not in dist:
                dist[g] = dist[f] + 1
                queue.append(g)
    if len(dist) != len(faces):
        raise ValueError("dual graph is disconnected")
    return dist


def orientation_tails(sigma: dict, mate: dict, outer: int) -> set:
    """Dual-distance orientation: tail slots of the oriented edges (the
    larger-distance face lies on the fixed reference side)."""
    faces = slot_faces(sigma, mate)
    face_of = {x: min(f) for f in faces for x in f}
    dist = slot_dual_distances(sigma, mate, outer)
    tails = set()
    for x, mx in mate.items():
        if mx < 0 or mx < x:
            continue
        da, db = dist[face_of[x]], dist[face_of[mx]]
        if da == db:
            continue
        if LEFT_OWN:
            tails.add(x if da > db else mx)
        else:
            tails.add(mx if da > db else x)
    return tails


def _breakable_round(sigma: dict, mm: dict, vertex: dict, root: int,
                     outer: int, full_tails: set):
    """Breakable edge of every current distance-1 face, as a list of
    ``(face_rep, tail_slot, head_slot)``; empty when no inner face is
    left.  The tail direction is taken from ``full_tails``."""
    faces = slot_faces(sigma, mm)
    face_of = {x: min(f) for f in faces for x in f}
    orbit_of = {min(f): f for f in faces}
    dist = slot_dual_distances(sigma, mm, outer)
    ones = [f for f, d in dist.items() if d == 1]
    if not ones:
        if any(dist.values()):
            raise ValueError("opening is stuck")
        return []
    outer_rep = face_of[outer]
    round_cuts = []
    for f in ones:
        orbit = orbit_of[f]
        eslots = [x for x in orbit
                  if mm[x] >= 0 and face_of[mm[x]] == outer_rep]
        if not eslots:
            raise ValueError("distance-1 face without outer edges")
        # components after deleting the outer-incident edges of f
        verts = sorted(set(vertex.values()))
        index = {v: i for i, v in enumerate(verts)}
        ds = DisjointSets(len(verts))
        cut_set = {x for x in eslots} | {mm[x] for x in eslots}
        for x, mx in mm.items():
            if mx >= 0 and x < mx and x not in cut_set:
                ds.union(index[vertex[x]], index[vertex[mx]])
        root_comp = ds.find(index[vertex[root]])

        def next_slot(x):
            m = mm[x]
            return sigma[m] if m >= 0 else sigma[x]

        chosen = []
        for x in eslots:
            probe = vertex[next_slot(x)] if BREAK_AFTER else vertex[x]
            if ds.find(index[probe]) == root_comp:
                chosen.append(x)
        if len(chosen) != 1:
            raise ValueError("breakable edge is not unique")
        b = chosen[0]
        # the breakable edge separates f (distance 1) from the outer
        # face, so it is oriented; cut it into an out and an in bud
        tail = b if b in full_tails else mm[b]
        if tail not in full_tails:
            raise ValueError("breakable edge is not oriented")
        round_cuts.append((f, tail, mm[tail]))
    return round_cuts


def open_slots(sigma: dict, mate: dict, root: int, outer: int):
    """Iteratively cut the breakable edges until only the outer face is
    left.  Returns ``(tree_mate, tails, cuts)`` where ``cuts`` is a list
    of ``(face_rep, out_slot, in_slot)`` with ``face_rep`` identifying the
    inner face (its minimum slot) whose breakable edge was cut."""
    vertex = slot_vertices(sigma)
    full_tails = orientation_tails(sigma, mate, outer)
    mm = dict(mate)
    cuts = []
    while True:
        round_cuts = _breakable_round(sigma, mm, vertex, root,
                                      outer, full_tails)
        if not round_cuts:
            break
        for f, t, h in round_cuts:
            mm[t] = -1
            mm[h] = -1
            cuts.append((f, t, h))
    tails = {t for t in full_tails if mm[t] >= 0}
    return mm, tails, cuts


# ---------------------------------------------------------------------------
# Public wrappers on whole objects
# ---------------------------------------------------------------------------


def _slot_system(p: PlaneMap):
    s = p.m.half_edge_count
    sigma = {i: p.m.sigma[i] for i in range(s)}
    mate = {i: p.m.alpha[i] for i in range(s)}
    return sigma, mate


def dual_distances(p: PlaneMap) -> dict:
    """Dual distance of every face (keyed by its minimum half-edge) from
    the outer face."""
    sigma, mate = _slot_system(p)
    return slot_dual_distances(sigma, mate, p.outer)


def dual_distance_orientation(p: PlaneMap) -> frozenset:
    """Tail half-edges of the dual-distance orientation: exactly the
    edges whose two sides have different dual distances are oriented."""
    sigma, mate = _slot_system(p)
    return frozenset(orientation_tails(sigma, mate, p.outer))


def breakable_edges(p: PlaneMap) -> frozenset:
    """One breakable edge (as an edge id) per face at dual distance 1;
    empty when the outer face is the only face."""
    sigma, mate = _slot_system(p)
    vertex = slot_vertices(sigma)
    tails = orientation_tails(sigma, mate, p.outer)
    cuts = _breakable_round(sigma, dict(mate), vertex, p.m.root,
                            p.outer, tails)
    return frozenset(min(t, h) for _, t, h in cuts)


def closure_gamma(t: NearEulerianTree) -> PlaneMap:
    """Close a near-Eulerian tree into a plane map on the same slots."""
    s = len(t.sigma)
    sigma = {i: t.sigma[i] for i in range(s)}
    mate = {i: t.mate[i] for i in range(s)}
    full, pairs, outer = close_slots(sigma, mate, set(t.out_buds), t.root)
    alpha = tuple(full[i] for i in range(s))
    m = RootedMap(t.sigma, alpha, t.root)
    return PlaneMap(m, outer)


def opening_delta(p: PlaneMap) -> NearEulerianTree:
    """Open a plane map into a near-Eulerian tree on the same slots."""
    s = p.m.half_edge_count
    sigma = {i: p.m.sigma[i] for i in range(s)}
    mate = {i: p.m.alpha[i] for i in range(s)}
    tree_mate, tails, cuts = open_slots(sigma, mate, p.m.root, p.outer)
    mate_t = tuple(tree_mate[i] for i in range(s))
    out_buds = frozenset(t for _, t, _ in cuts)
    return NearEulerianTree(p.m.sigma, mate_t, out_buds,
                            frozenset(tails), p.m.root)


def gen_near_eulerian_trees(max_slots: int):
    """All near-Eulerian trees with at most ``max_slots`` rotation items."""
    for shape in _tree_shapes(max_slots):
        yield from _decorate(shape)


def _tree_shapes(budget: int):
    """Nested shapes: a vertex is a tuple of items, each item either 'bud'
    or a child vertex tuple.  The root tuple must be nonempty."""
    def vertices(size):
        # all vertex tuples using exactly `size` slots at this vertex's
        # items (an edge to a child uses 2 slots: one here, one there)
        yield from _vertex_tuples(size)

    def _vertex_tuples(size):
        if size == 0:
            yield ()
            return
        for first_cost in (1, 2):
            if first_cost > size:
                continue
            if first_cost == 1:
                for rest in _vertex_tuples(size - 1):
                    yield ("bud",) + rest
            else:
                # child edge: 1 slot here + 1 slot at the child + child items
                for sub in range(0, size - 2 + 1):
                    for child in _vertex_tuples(sub):
                        for rest in _vertex_tuples(size - 2 - sub):
                            yield (child,) + rest

    for total in range(1, budget + 1):
        yield from vertices(total)


def _decorate(shape):
    """Assign bud directions and edge orientations to a shape, keeping
    only the balanced, root-compatible results."""
    import itertools

    buds = []
    edges = []

    def scan(vertex, path):
        for i, item in enumerate(vertex):
            if item == "bud":
                buds.append(path + (i,))
            else:
                edges.append(path + (i,))
                scan(item, path + (i,))

    scan(shape, ())
    for bud_dirs in itertools.product((0, 1), repeat=len(buds)):
        for edge_dirs in itertools.product((0, 1), repeat=len(edges)):
            t = _build(shape, dict(zip(buds, bud_dirs)),
                       dict(zip(edges, edge_dirs)))
            if t is not None:
                yield t


def _build(shape, bud_dirs, edge_dirs):
    sigma = []
    mate = []
    out_buds = set()
    tails = set()

    def alloc():
        sigma.append(None)
        mate.append(-2)
        return len(sigma) - 1

    def place(vertex, path, parent_slot):
        own = [] if parent_slot is None else [parent_slot]
        for i, item in enumerate(vertex):
            s = alloc()
            own.append(s)
            if item == "bud":
                mate[s] = -1
                if bud_dirs[path + (i,)]:
                    out_buds.add(s)
            else:
                child = alloc()
                mate[s] = child
                mate[child] = s
                if edge_dirs[path + (i,)]:
                    tails.add(child)  # tail at the child: toward the root
                place(item, path + (i,), child)
        for k, s in enumerate(own):
            sigma[s] = own[(k + 1) % len(own)]

    place(shape, (), None)
    try:
        return NearEulerianTree(tuple(sigma), tuple(mate),
                                frozenset(out_buds), frozenset(tails), 0)
    except ValueError:
        return None


def gen_plane_maps(max_edges: int):
    """All plane maps with 1..max_edges edges (each planar rooted map once
    per choice of marked face)."""
    from .enumeration import gen_rooted_orientable_maps

    for e in range(1, max_edges + 1):
        for m in gen_rooted_orientable_maps(e):
            if euler_data(m)[3] != 0:
                continue
            for f in trace_faces(m):
                yield PlaneMap(m, min(f))
