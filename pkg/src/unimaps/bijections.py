"""Correspondences between colored one-face maps and tree-rooted maps.

The pipeline has two stages.  ``xi`` (in :mod:`unimaps.tours`) turns a
colored one-face map into a bi-Eulerian tour of its color graph.  ``theta``
here relates such tours to tree-rooted maps on orientable surfaces that
carry a compatible balanced orientation: every tour with ``w`` edges
repeated in the same direction has exactly ``2^w`` preimages, all of
external weight ``w``.  Composing the two gives the surjection ``upsilon``
from oriented tree-rooted maps onto colored one-face maps on general
surfaces, which restricts to a bijection ``phi`` on the orientable ones
(where ``w = 0`` and the orientation is empty).

The tour is decomposed BEST-style: the arcs used last to leave each vertex
form a spanning tree toward the origin, and the remaining departures give,
at each vertex, the rotation of half-edges.  Copies of an arc that are
indistinguishable (the two arcs of a loop, or of an edge repeated in the
same direction) are matched to half-edges through a fixed pairing: at each
vertex the ingoing half-edges of oriented edges, sorted by edge label,
are paired with the oriented edges leaving the vertex, also sorted by
label.  This pairing depends only on labels, so the whole construction is
invariant under relabelling of half-edges.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .maps_core import (
    ColoredUnicellularMap,
    DisjointSets,
    RootedMap,
    canonical_relabelling,
)
from .tours import (
    BiEulerianTour,
    Digraph,
    EdgeLabelledGraph,
    best_compose,
    best_decompose,
    xi,
    xi_inverse,
)


@dataclass(frozen=True)
class OrientedTreeRootedMap:
    """Rooted orientable map with labelled vertices and edges, a marked
    spanning tree, and a compatible balanced orientation.

    ``vertex_labels[i]`` is the label in ``1..q`` of the i-th vertex (in
    by-minimum-half-edge order) and ``edge_labels[k]`` the label in ``1..n``
    of the k-th edge.  ``tree`` holds the edge ids (minimum half-edge per
    edge) of the spanning tree.  ``orientation`` holds one half-edge per
    oriented edge, the *tail*; the edge points away from the tail's vertex.
    Balance requires every vertex to head as many oriented edges as it
    tails; compatibility requires oriented tree edges to point toward the
    root vertex.  A plain tree-rooted map is the ``orientation == {}``
    case.
    """

    m: RootedMap
    vertex_labels: tuple
    edge_labels: tuple
    tree: frozenset
    orientation: frozenset = frozenset()

    def __post_init__(self):
        m = self.m
        object.__setattr__(self, "vertex_labels", tuple(self.vertex_labels))
        object.__setattr__(self, "edge_labels", tuple(self.edge_labels))
        object.__setattr__(self, "tree", frozenset(self.tree))
        object.__setattr__(self, "orientation", frozenset(self.orientation))
        verts = m.vertices()
        edges = m.edges()
        q, n = len(verts), len(edges)
        if sorted(self.vertex_labels) != list(range(1, q + 1)):
            raise ValueError("vertex labels must be a permutation of 1..q")
        if sorted(self.edge_labels) != list(range(1, n + 1)):
            raise ValueError("edge labels must be a permutation of 1..n")
        eids = [min(c) for c in edges]
        if not self.tree <= set(eids):
            raise ValueError("tree contains unknown edges")
        # spanning tree check
        vindex = {min(c): i for i, c in enumerate(verts)}
        vid = {}
        for i, c in enumerate(verts):
            for h in c:
                vid[h] = i
        if len(self.tree) != q - 1:
            raise ValueError("tree has the wrong number of edges")
        ds = DisjointSets(q)
        for eid in self.tree:
            a, b = vid[eid], vid[m.alpha[eid]]
            if ds.find(a) == ds.find(b):
                raise ValueError("tree edges contain a cycle")
            ds.union(a, b)
        # orientation: one tail per edge, balanced
        tails = {}
        for h in self.orientation:
            eid = m.edge_of(h)
            if eid in tails:
                raise ValueError("edge oriented twice")
            tails[eid] = h
        flow = [0] * q
        for h in tails.values():
            flow[vid[h]] += 1
            flow[vid[m.alpha[h]]] -= 1
        if any(flow):
            raise ValueError("orientation is not balanced")
        # compatibility: oriented tree edges point toward the root vertex
        root_v = vid[m.root]
        parent = self._parents(vid, root_v)
        for eid, h in tails.items():
            if eid in self.tree and parent[vid[h]] != (vid[m.alpha[h]], eid):
                raise ValueError("oriented tree edge points away from root")

    def _parents(self, vid, root_v):
        """parent[v] = (parent vertex, tree edge id), None at the root."""
        m = self.m
        adj: dict[int, list] = {}
        for eid in self.tree:
            a, b = vid[eid], vid[m.alpha[eid]]
            adj.setdefault(a, []).append((b, eid))
            adj.setdefault(b, []).append((a, eid))
        parent = {root_v: None}
        stack = [root_v]
        while stack:
            v = stack.pop()
            for w, eid in adj.get(v, ()):
                if w not in parent:
                    parent[w] = (v, eid)
                    stack.append(w)
        return parent

    @property
    def external_weight(self) -> int:
        return sum(1 for h in self.orientation
                   if self.m.edge_of(h) not in self.tree)

    @property
    def q(self) -> int:
        return len(self.vertex_labels)

    @property
    def n(self) -> int:
        return len(self.edge_labels)

    def canonical_key(self) -> tuple:
        """Hashable form invariant under half-edge relabelling."""
        perm = canonical_relabelling(self.m)
        m2 = self.m.relabelled(perm)
        old_verts = self.m.vertices()
        old_edges = self.m.edges()
        vl = {min(perm[h] for h in c): lab
              for c, lab in zip(old_verts, self.vertex_labels)}
        el = {min(perm[h] for h in c): lab
              for c, lab in zip(old_edges, self.edge_labels)}
        verts2 = tuple(vl[min(c)] for c in m2.vertices())
        edges2 = tuple(el[min(c)] for c in m2.edges())
        tree2 = frozenset(min(perm[eid], perm[self.m.alpha[eid]])
                          for eid in self.tree)
        orient2 = tuple(sorted(perm[h] for h in self.orientation))
        return (m2.sigma, m2.alpha, m2.root, verts2, edges2, tree2, orient2)


def _structure(t: OrientedTreeRootedMap):
    """Shared bookkeeping for theta: indices, labels, tails, sequences."""
    m = t.m
    verts = m.vertices()
    edges = m.edges()
    vid = {}
    for i, c in enumerate(verts):
        for h in c:
            vid[h] = i
    vlabel = [0] * m.half_edge_count
    for i, c in enumerate(verts):
        for h in c:
            vlabel[h] = t.vertex_labels[i]
    elabel = [0] * m.half_edge_count
    for k, c in enumerate(edges):
        for h in c:
            elabel[h] = t.edge_labels[k]
    tail_of = {}
    for h in t.orientation:
        tail_of[elabel[h]] = h
    return m, verts, edges, vid, vlabel, elabel, tail_of


def theta(t: OrientedTreeRootedMap) -> tuple:
    """Map an oriented tree-rooted map to its graph and bi-Eulerian tour."""
    m, verts, edges, vid, vlabel, elabel, tail_of = _structure(t)
    n, q = len(edges), len(verts)
    ends = [None] * n
    for c in edges:
        h = min(c)
        ends[elabel[h] - 1] = tuple(sorted((vlabel[h], vlabel[m.alpha[h]])))
    graph = EdgeLabelledGraph(q, tuple(ends))

    root_v = vid[m.root]
    parent = t._parents(vid, root_v)

    # parent half-edge at each non-root vertex: the half-edge of the tree
    # edge to the parent lying on the child side
    parent_he = {}
    for i in range(q):
        if i == root_v:
            continue
        _, eid = parent[i]
        parent_he[i] = eid if vid[eid] == i else m.alpha[eid]

    # per-vertex half-edge sequences
    seqs = {}
    for i, c in enumerate(verts):
        d = len(c)
        if i == root_v:
            h = m.root
            seq = []
            for _ in range(d):
                seq.append(h)
                h = m.sigma[h]
        else:
            h = m.sigma[parent_he[i]]
            seq = []
            for _ in range(d - 1):
                seq.append(h)
                h = m.sigma[h]
        seqs[i] = seq

    # arc table: arcs 2k, 2k+1 belong to the edge labelled k+1
    arcs = [None] * (2 * n)
    arc_of_he = {}
    for k in range(n):
        lab = k + 1
        u, v = ends[k]
        if lab in tail_of:
            th = tail_of[lab]
            pair = (vlabel[th], vlabel[m.alpha[th]])
            arcs[2 * k] = arcs[2 * k + 1] = pair
        elif u == v:
            arcs[2 * k] = arcs[2 * k + 1] = (u, u)
        else:
            c = edges[[elabel[min(cc)] for cc in edges].index(lab)]
            for h in c:
                a = 2 * k if vlabel[h] == u else 2 * k + 1
                arcs[a] = (vlabel[h], vlabel[m.alpha[h]])
                arc_of_he[h] = a

    # label-sorted pairing of ingoing half-edges with outgoing oriented
    # edges at each vertex
    pi_of_head = {}
    for i in range(q):
        heads = sorted(lab for lab, th in tail_of.items()
                       if vid[m.alpha[th]] == i)
        tails = sorted(lab for lab, th in tail_of.items() if vid[th] == i)
        assert len(heads) == len(tails)
        for hl, tl in zip(heads, tails):
            pi_of_head[m.alpha[tail_of[hl]]] = tl

    # emit the departure orders; copies of indistinguishable arcs are
    # numbered in order of use (tree copies of oriented edges come last
    # at their vertex, so they get the higher id)
    copy_count = [0] * n
    tree_arc = {}
    for i in range(q):
        if i == root_v:
            continue
        _, eid = parent[i]
        lab = elabel[eid]
        if lab in tail_of:
            tree_arc[t.vertex_labels[i]] = 2 * (lab - 1) + 1
        else:
            tree_arc[t.vertex_labels[i]] = arc_of_he[parent_he[i]]

    tau = {}
    for i in range(q):
        out = []
        for h in seqs[i]:
            lab = elabel[h]
            if lab in tail_of:
                th = tail_of[lab]
                e = lab if h == th else pi_of_head[h]
                k = e - 1
                if e in tail_of and m.edge_of(tail_of[e]) in t.tree:
                    a = 2 * k  # the tree holds the other copy
                else:
                    a = 2 * k + copy_count[k]
                    copy_count[k] += 1
                out.append(a)
            elif graph.is_loop(lab):
                k = lab - 1
                out.append(2 * k + copy_count[k])
                copy_count[k] += 1
            else:
                out.append(arc_of_he[h])
        tau[t.vertex_labels[i]] = tuple(out)

    digraph = Digraph(q, tuple(arcs))
    origin = t.vertex_labels[root_v]
    seq = best_compose(digraph, origin, tree_arc, tau)

    steps = []
    uses = [0] * n
    for a in seq:
        k = a // 2
        lab = k + 1
        u, v = ends[k]
        if lab in tail_of:
            d = 0 if (u == v or arcs[a][0] == u) else 1
        elif u == v:
            d = 0 if uses[k] == 0 else 1
        else:
            d = 0 if a == 2 * k else 1
        uses[k] += 1
        steps.append((lab, d))
    return graph, BiEulerianTour(graph, origin, tuple(steps))


def theta_fiber(graph: EdgeLabelledGraph, tour: BiEulerianTour) -> tuple:
    """All preimages of a tour under theta: exactly ``2^w`` oriented
    tree-rooted maps, where ``w`` is the number of edges the tour repeats
    in the same direction."""
    n, q = graph.n, graph.q
    oriented = tour.oriented_edges()

    # direction of each oriented edge, from the tour
    tail_color = {}
    for k, (lab, d) in enumerate(tour.steps):
        if lab in oriented and lab not in tail_color:
            u, v = graph.endpoints(lab)
            tail_color[lab] = u if (u == v or d == 0) else v

    arcs = [None] * (2 * n)
    for k in range(n):
        lab = k + 1
        u, v = graph.endpoints(lab)
        if lab in oriented:
            t = tail_color[lab]
            h = u + v - t
            arcs[2 * k] = arcs[2 * k + 1] = (t, h)
        elif u == v:
            arcs[2 * k] = arcs[2 * k + 1] = (u, u)
        else:
            arcs[2 * k] = (u, v)
            arcs[2 * k + 1] = (v, u)

    # tour steps -> arc ids (first use of an indistinguishable pair gets
    # the even id)
    uses = [0] * n
    seq = []
    for lab, d in tour.steps:
        k = lab - 1
        if lab in oriented or graph.is_loop(lab):
            seq.append(2 * k + uses[k])
        else:
            seq.append(2 * k if d == 0 else 2 * k + 1)
        uses[k] += 1
    digraph = Digraph(q, tuple(arcs))
    origin, tree, tau = best_decompose(digraph, seq)
    tree_labels = frozenset(a // 2 + 1 for a in tree.values())

    # half-edge allocation: edge labelled k+1 owns half-edges 2k, 2k+1
    # with 2k at the smaller endpoint (at the tail for oriented edges)
    he_at = {}   # (label, color) -> half-edge, for non-loop edges
    tail_he = {}
    for k in range(n):
        lab = k + 1
        u, v = graph.endpoints(lab)
        if lab in oriented:
            t = tail_color[lab]
            tail_he[lab] = 2 * k
            if u != v:
                he_at[(lab, t)] = 2 * k
                he_at[(lab, u + v - t)] = 2 * k + 1
        elif u != v:
            he_at[(lab, u)] = 2 * k
            he_at[(lab, v)] = 2 * k + 1

    # label-sorted pairing at each color: r-th ingoing oriented edge is
    # matched with the r-th outgoing one; the head half-edge of the edge
    # labelled k+1 is 2k+1 by the allocation above
    matched_head_he = {}  # outgoing oriented edge -> ingoing half-edge
    for c in range(1, q + 1):
        heads = sorted(lab for lab in oriented
                       if arcs[2 * (lab - 1)][1] == c)
        tails = sorted(lab for lab in oriented if tail_color[lab] == c)
        if len(heads) != len(tails):
            raise ValueError("tour orientation is not balanced")
        for hl, tl in zip(heads, tails):
            matched_head_he[tl] = 2 * (hl - 1) + 1

    # slots per color; fixed fills plus one binary choice per oriented
    # non-tree edge
    slot_hes = {}
    choices = []  # (color, pos_a, pos_b, he_a, he_b)
    for c in range(1, q + 1):
        arcs_here = list(tau.get(c, ()))
        if c != origin:
            arcs_here.append(tree[c])
        fills = [None] * len(arcs_here)
        loop_seen = {}
        pending = {}
        for pos, a in enumerate(arcs_here):
            k = a // 2
            lab = k + 1
            u, v = graph.endpoints(lab)
            tree_slot = c != origin and pos == len(arcs_here) - 1
            if lab in oriented:
                if tree_slot:
                    fills[pos] = tail_he[lab]  # the branch toward the root
                else:
                    pending.setdefault(lab, []).append(pos)
            elif u == v:
                i = loop_seen.get(lab, 0)
                loop_seen[lab] = i + 1
                fills[pos] = 2 * k + i
            else:
                fills[pos] = he_at[(lab, c)]
        for lab, positions in pending.items():
            if lab in tree_labels:
                # the tree holds one copy; the remaining slot takes the
                # matched ingoing half-edge
                assert len(positions) == 1
                fills[positions[0]] = matched_head_he[lab]
            else:
                assert len(positions) == 2
                pa, pb = positions
                choices.append((c, pa, pb, tail_he[lab], matched_head_he[lab]))
        slot_hes[c] = fills

    w = len(choices)
    out = []
    for assignment in itertools.product((0, 1), repeat=w):
        fills = {c: list(v) for c, v in slot_hes.items()}
        for bit, (c, pa, pb, ha, hb) in zip(assignment, choices):
            if bit:
                ha, hb = hb, ha
            fills[c][pa] = ha
            fills[c][pb] = hb
        sigma = [0] * (2 * n)
        for c, cycle in fills.items():
            for i, h in enumerate(cycle):
                sigma[h] = cycle[(i + 1) % len(cycle)]
        alpha = [0] * (2 * n)
        for k in range(n):
            alpha[2 * k] = 2 * k + 1
            alpha[2 * k + 1] = 2 * k
        root = fills[origin][0]
        m = RootedMap(tuple(sigma), tuple(alpha), root)
        color_of_he = {}
        for c, cycle in fills.items():
            for h in cycle:
                color_of_he[h] = c
        vertex_labels = tuple(color_of_he[min(cyc)] for cyc in m.vertices())
        edge_labels = tuple(min(cyc) // 2 + 1 for cyc in m.edges())
        tree_ids = frozenset(2 * (lab - 1) for lab in tree_labels)
        orientation = frozenset(tail_he[lab] for lab in oriented)
        out.append(OrientedTreeRootedMap(
            m, vertex_labels, edge_labels, tree_ids, orientation))
    return tuple(out)


def upsilon(t: OrientedTreeRootedMap) -> ColoredUnicellularMap:
    """The colored one-face map whose face tour is theta of ``t``."""
    graph, tour = theta(t)
    return xi_inverse(graph, tour)


def upsilon_fiber(u: ColoredUnicellularMap) -> tuple:
    """All oriented tree-rooted maps mapping to ``u``: ``2^w`` of them,
    with ``w = 0`` exactly when ``u`` is orientable."""
    graph, tour = xi(u)
    return theta_fiber(graph, tour)


def phi(u: ColoredUnicellularMap) -> OrientedTreeRootedMap:
    """Bijection from orientable colored one-face maps to tree-rooted maps
    (empty orientation)."""
    if not u.gluing.orientable:
        raise ValueError("phi is defined on orientable maps only")
    fiber = upsilon_fiber(u)
    assert len(fiber) == 1 and not fiber[0].orientation
    return fiber[0]


def phi_inverse(t: OrientedTreeRootedMap) -> ColoredUnicellularMap:
    if t.orientation:
        raise ValueError("phi inverse needs an empty orientation")
    return upsilon(t)


def gen_oriented_tree_rooted_maps(n: int, weight: int = None):
    """Stream all oriented tree-rooted maps with ``n`` edges (every vertex
    labelling, edge labelling, spanning tree and compatible balanced
    orientation), optionally restricted to one external weight."""
    from .enumeration import gen_rooted_orientable_maps, spanning_edge_subsets

    for m in gen_rooted_orientable_maps(n):
        verts = m.vertices()
        q = len(verts)
        vid = {}
        for i, c in enumerate(verts):
            for h in c:
                vid[h] = i
        eids = [min(c) for c in m.edges()]
        trees = spanning_edge_subsets(m)
        orientations = _balanced_orientations(m, vid, q, eids)
        for tree in trees:
            for orient in orientations:
                try:
                    t = OrientedTreeRootedMap(
                        m, tuple(range(1, q + 1)), tuple(range(1, n + 1)),
                        tree, orient)
                except ValueError:
                    continue
                if weight is not None and t.external_weight != weight:
                    continue
                for vperm in itertools.permutations(range(1, q + 1)):
                    for eperm in itertools.permutations(range(1, n + 1)):
                        yield OrientedTreeRootedMap(
                            m, vperm, eperm, tree, orient)


def _balanced_orientations(m: RootedMap, vid, q: int, eids):
    """All balanced partial orientations of ``m`` as tail half-edge sets."""
    out = []
    for subset in _subsets(eids):
        for tails in itertools.product(*[(h, m.alpha[h]) for h in subset]):
            flow = [0] * q
            for h in tails:
                flow[vid[h]] += 1
                flow[vid[m.alpha[h]]] -= 1
            if not any(flow):
                out.append(frozenset(tails))
    return sorted(set(out), key=sorted)


def _subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


# ---------------------------------------------------------------------------
# Externally-labelled planar-rooted maps and the surjection psi
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExternallyLabelledPlanarRootedMap:
    """Rooted orientable map with labelled vertices and edges, a marked
    spanning planar submap, and a labelling of the submap's faces.

    ``submap`` holds the edge ids of a connected spanning submap whose
    inherited rotation system has genus 0.  ``face_labels`` assigns the
    labels ``1..r`` to the ``r`` faces of the submap, listed by minimum
    half-edge; the face labelled ``r`` plays the role of the outer face.
    """

    m: RootedMap
    vertex_labels: tuple
    edge_labels: tuple
    submap: frozenset
    face_labels: tuple

    def __post_init__(self):
        m = self.m
        object.__setattr__(self, "vertex_labels", tuple(self.vertex_labels))
        object.__setattr__(self, "edge_labels", tuple(self.edge_labels))
        object.__setattr__(self, "submap", frozenset(self.submap))
        object.__setattr__(self, "face_labels", tuple(self.face_labels))
        verts = m.vertices()
        edges = m.edges()
        q, n = len(verts), len(edges)
        if sorted(self.vertex_labels) != list(range(1, q + 1)):
            raise ValueError("vertex labels must be a permutation of 1..q")
        if sorted(self.edge_labels) != list(range(1, n + 1)):
            raise ValueError("edge labels must be a permutation of 1..n")
        eids = {min(c) for c in edges}
        if not self.submap <= eids:
            raise ValueError("submap contains unknown edges")
        # spanning and connected
        vid = {}
        for i, c in enumerate(verts):
            for h in c:
                vid[h] = i
        ds = DisjointSets(q)
        touched = set()
        for eid in self.submap:
            ds.union(vid[eid], vid[m.alpha[eid]])
            touched.add(vid[eid])
            touched.add(vid[m.alpha[eid]])
        if self.submap:
            if touched != set(range(q)) or len(ds.classes()) != 1:
                raise ValueError("submap is not spanning and connected")
        elif q != 1:
            raise ValueError("submap is not spanning and connected")
        # planarity of the inherited rotation system
        faces = self._submap_faces()
        n_sub = len(self.submap)
        if q - n_sub + len(faces) != 2:
            raise ValueError("submap is not planar")
        if sorted(self.face_labels) != list(range(1, len(faces) + 1)):
            raise ValueError("face labels must be a permutation of 1..r")

    def _sub_system(self):
        slots = {h for h in range(self.m.half_edge_count)
                 if self.m.edge_of(h) in self.submap}
        return _project(self.m, slots)

    def _submap_faces(self):
        return _submap_faces_of(self.m, self.submap)

    @property
    def q(self) -> int:
        return len(self.vertex_labels)

    @property
    def n(self) -> int:
        return len(self.edge_labels)

    @property
    def r(self) -> int:
        return len(self.face_labels)

    @property
    def external_weight(self) -> int:
        return self.r - 1

    def canonical_key(self) -> tuple:
        perm = canonical_relabelling(self.m)
        m2 = self.m.relabelled(perm)
        vl = {min(perm[h] for h in c): lab
              for c, lab in zip(self.m.vertices(), self.vertex_labels)}
        el = {min(perm[h] for h in c): lab
              for c, lab in zip(self.m.edges(), self.edge_labels)}
        verts2 = tuple(vl[min(c)] for c in m2.vertices())
        edges2 = tuple(el[min(c)] for c in m2.edges())
        sub2 = frozenset(min(perm[eid], perm[self.m.alpha[eid]])
                         for eid in self.submap)
        faces2 = tuple(sorted(
            (min((perm[x] for x in f), default=-1), lab)
            for f, lab in zip(self._submap_faces(), self.face_labels)))
        return (m2.sigma, m2.alpha, m2.root, verts2, edges2, sub2, faces2)


def _project(m: RootedMap, slots: set):
    """Rotation and pairing induced by ``m`` on a subset of half-edges."""
    sigma = {}
    for h in slots:
        x = m.sigma[h]
        while x not in slots:
            x = m.sigma[x]
        sigma[h] = x
    mate = {h: m.alpha[h] for h in slots}
    return sigma, mate


def _submap_faces_of(m: RootedMap, submap: frozenset):
    """Faces of a spanning submap, ordered by minimum half-edge; for the
    empty submap (single vertex) a single synthetic empty face."""
    from .planar_closure import slot_faces

    if not submap:
        return [()]
    slots = {h for h in range(m.half_edge_count) if m.edge_of(h) in submap}
    sigma, mate = _project(m, slots)
    return sorted(slot_faces(sigma, mate), key=min)


def _canonical_inner_faces(m: RootedMap, faces, outer_rep: int):
    """Inner submap faces in the order induced by the canonical
    relabelling of the whole map (invariant under half-edge renaming)."""
    perm = canonical_relabelling(m)
    inner = [f for f in faces if f and min(f) != outer_rep]
    return sorted(inner, key=lambda f: min(perm[x] for x in f))


def psi(p: ExternallyLabelledPlanarRootedMap) -> ColoredUnicellularMap:
    """Map an externally-labelled planar-rooted map to a colored one-face
    map.  The face labelled ``r`` is taken as the outer face; opening the
    submap recovers a near-Eulerian tree whose cut edges are re-joined
    according to the remaining labels, giving a compatibly-oriented
    tree-rooted map, whose tour is then read off."""
    from .planar_closure import open_slots

    m = p.m
    elabel = [0] * m.half_edge_count
    for c, lab in zip(m.edges(), p.edge_labels):
        for h in c:
            elabel[h] = lab
    faces = p._submap_faces()
    r = len(faces)
    if r == 1:
        t = OrientedTreeRootedMap(m, p.vertex_labels, p.edge_labels,
                                  p.submap, frozenset())
        return upsilon(t)
    sigma_sub, mate_sub = p._sub_system()
    label_of_rep = {min(f): lab for f, lab in zip(faces, p.face_labels)}
    outer_rep = next(min(f) for f in faces if label_of_rep[min(f)] == r)
    verts = m.vertices()
    vid = {h: i for i, c in enumerate(verts) for h in c}
    root_sub = min(h for h in sigma_sub if vid[h] == vid[m.root])
    tree_mate, tails, cuts = open_slots(sigma_sub, mate_sub,
                                        root_sub, outer_rep)
    # cut bookkeeping: inner face -> (out slot, in slot)
    buds_of_rep = {f: (o, i) for f, o, i in cuts}
    inner = _canonical_inner_faces(m, faces, outer_rep)
    by_index = {k + 1: f for k, f in enumerate(inner)}
    # re-join the buds: the face labelled j sends its outgoing bud to the
    # ingoing bud of the j-th inner face in canonical order
    alpha = list(m.alpha)
    out_slots = set()
    for f in inner:
        o, _ = buds_of_rep[min(f)]
        g = by_index[label_of_rep[min(f)]]
        _, i = buds_of_rep[min(g)]
        alpha[o] = i
        alpha[i] = o
        out_slots.add(o)
    m2 = RootedMap(m.sigma, tuple(alpha), m.root)
    new_label = {}
    for c in m2.edges():
        h = min(c)
        if alpha[h] == m.alpha[h]:
            new_label[h] = elabel[h]
        else:
            o = h if h in out_slots else alpha[h]
            new_label[h] = elabel[o]
    edge_labels = tuple(new_label[min(c)] for c in m2.edges())
    tree = frozenset(eid for eid in p.submap if tree_mate[eid] >= 0)
    orientation = frozenset(tails) | out_slots
    t = OrientedTreeRootedMap(m2, p.vertex_labels, edge_labels,
                              tree, orientation)
    return upsilon(t)


def psi_fiber(u: ColoredUnicellularMap) -> tuple:
    """All preimages of ``u`` under psi: exactly ``2^w`` externally
    labelled planar-rooted maps whose submaps have ``w + 1`` faces."""
    from .planar_closure import close_slots, open_slots, slot_faces

    out = []
    for t in upsilon_fiber(u):
        m = t.m
        elabel = [0] * m.half_edge_count
        for c, lab in zip(m.edges(), t.edge_labels):
            for h in c:
                elabel[h] = lab
        cut_edges = [m.edge_of(h) for h in t.orientation
                     if m.edge_of(h) not in t.tree]
        if not cut_edges:
            out.append(ExternallyLabelledPlanarRootedMap(
                m, t.vertex_labels, t.edge_labels, t.tree, (1,)))
            continue
        tail_of_edge = {m.edge_of(h): h for h in t.orientation}
        # near-Eulerian tree inside the map: tree half-edges plus the buds
        # of the cut oriented edges
        slots = set()
        for eid in t.tree:
            slots.add(eid)
            slots.add(m.alpha[eid])
        buds = {}
        for eid in cut_edges:
            o = tail_of_edge[eid]
            buds[o] = True
            buds[m.alpha[o]] = False
            slots.add(o)
            slots.add(m.alpha[o])
        sigma_sub = {}
        for h in slots:
            x = m.sigma[h]
            while x not in slots:
                x = m.sigma[x]
            sigma_sub[h] = x
        mate_sub = {h: (m.alpha[h] if h not in buds else -1) for h in slots}
        verts = m.vertices()
        vid = {h: i for i, c in enumerate(verts) for h in c}
        root_sub = min(h for h in slots if vid[h] == vid[m.root])
        out_buds = {h for h, is_out in buds.items() if is_out}
        full, pairs, outer_rep = close_slots(sigma_sub, mate_sub,
                                             out_buds, root_sub)
        # the closed submap inside the big map
        alpha = list(m.alpha)
        for o, i in pairs:
            alpha[o] = i
            alpha[i] = o
        m2 = RootedMap(m.sigma, tuple(alpha), m.root)
        submap = frozenset(min(h, full[h]) for h in slots)
        # association inner face -> closure pair, by re-opening
        tree_mate, _, cuts = open_slots(sigma_sub, full, root_sub, outer_rep)
        assert {h for h in slots if tree_mate[h] == -1} == set(buds), \
            "re-opening disagrees with the cutting"
        out_slot_of_rep = {f: o for f, o, i in cuts}
        in_face_of_slot = {i: f for f, o, i in cuts}
        faces = sorted(slot_faces(sigma_sub, full), key=min)
        inner = _canonical_inner_faces(m2, faces, outer_rep)
        index_of_rep = {min(f): k + 1 for k, f in enumerate(inner)}
        # labels: the face whose outgoing bud originally matched the
        # ingoing bud of inner face G gets G's canonical index
        label_of_rep = {}
        for f in inner:
            o = out_slot_of_rep[min(f)]
            partner_face = in_face_of_slot[m.alpha[o]]
            label_of_rep[min(f)] = index_of_rep[partner_face]
        w = len(inner)
        face_labels = tuple(
            label_of_rep.get(min(f), w + 1) for f in faces)
        new_label = {}
        for c in m2.edges():
            h = min(c)
            if alpha[h] == m.alpha[h]:
                new_label[h] = elabel[h]
            else:
                o = h if h in out_buds else alpha[h]
                new_label[h] = elabel[o]
        edge_labels = tuple(new_label[min(c)] for c in m2.edges())
        out.append(ExternallyLabelledPlanarRootedMap(
            m2, t.vertex_labels, edge_labels, submap, face_labels))
    return tuple(out)


def gen_externally_labelled_maps(n: int):
    """Stream every externally-labelled planar-rooted map with n edges."""
    from .enumeration import gen_rooted_orientable_maps

    for m in gen_rooted_orientable_maps(n):
        q = len(m.vertices())
        eids = [min(c) for c in m.edges()]
        for sub in _subsets(eids):
            r = len(_submap_faces_of(m, frozenset(sub)))
            try:
                ExternallyLabelledPlanarRootedMap(
                    m, tuple(range(1, q + 1)), tuple(range(1, n + 1)),
                    frozenset(sub), tuple(range(1, r + 1)))
            except ValueError:
                continue
            for vperm in itertools.permutations(range(1, q + 1)):
                for eperm in itertools.permutations(range(1, n + 1)):
                    for fperm in itertools.permutations(range(1, r + 1)):
                        yield ExternallyLabelledPlanarRootedMap(
                            m, vperm, eperm, frozenset(sub), fperm)
