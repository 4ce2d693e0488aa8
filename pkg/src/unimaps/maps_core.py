"""Core data model: rooted maps on orientable surfaces and polygon gluings.

A rooted map on an orientable surface is encoded as a pair of permutations on
half-edge indices ``0 .. 2m-1``: a rotation ``sigma`` (counterclockwise order
of half-edges around each vertex) and a fixed-point-free involution ``alpha``
(the edge pairing), together with a distinguished root half-edge.  Vertices
are the orbits of ``sigma``, edges the orbits of ``alpha`` and faces the
orbits of ``h -> sigma[alpha[h]]``.

Unicellular maps on *general* (locally orientable) surfaces are encoded
instead as gluings of a rooted ``2n``-gon: a perfect matching of the polygon
sides together with a twist flag per matched pair.  An untwisted pair glues
the two sides into a cylinder, a twisted pair into a Moebius band.

Corner identification rule used by :func:`glue_polygon`: the polygon boundary
is oriented into a directed cycle starting at the root side, side ``k``
running from corner ``k`` to corner ``k+1`` (mod ``2n``).  Gluing sides
``i, j`` untwisted identifies corner ``i`` with corner ``j+1`` and corner
``i+1`` with corner ``j``; twisted identifies corner ``i`` with corner ``j``
and corner ``i+1`` with corner ``j+1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class DisjointSets:
    """Array-backed union-find on ``0 .. n-1``."""

    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if rx > ry:
                rx, ry = ry, rx
            self.parent[ry] = rx

    def classes(self) -> list[list[int]]:
        """Equivalence classes as sorted lists, ordered by minimum element."""
        groups: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            groups.setdefault(self.find(x), []).append(x)
        return [groups[r] for r in sorted(groups)]


def _check_permutation(perm, n, name):
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise ValueError(f"{name} is not a permutation of 0..{n - 1}")


@dataclass(frozen=True)
class RootedMap:
    """A rooted map on an orientable surface as a rotation system.

    ``sigma`` and ``alpha`` are stored as tuples mapping a half-edge index to
    its image.  ``alpha`` must be a fixed-point-free involution and the group
    generated by ``sigma`` and ``alpha`` must act transitively on half-edges.
    """

    sigma: tuple
    alpha: tuple
    root: int = 0

    def __post_init__(self):
        n = len(self.sigma)
        if n == 0 or n % 2:
            raise ValueError("half-edge count must be even and positive")
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "alpha", tuple(self.alpha))
        _check_permutation(self.sigma, n, "sigma")
        _check_permutation(self.alpha, n, "alpha")
        for h in range(n):
            if self.alpha[h] == h or self.alpha[self.alpha[h]] != h:
                raise ValueError("alpha is not a fixed-point-free involution")
        if not 0 <= self.root < n:
            raise ValueError("root out of range")
        # connectivity
        seen = [False] * n
        stack = [self.root]
        seen[self.root] = True
        count = 1
        while stack:
            h = stack.pop()
            for nb in (self.alpha[h], self.sigma[h]):
                if not seen[nb]:
                    seen[nb] = True
                    count += 1
                    stack.append(nb)
        if count != n:
            raise ValueError("map is not connected")

    @property
    def half_edge_count(self) -> int:
        return len(self.sigma)

    def vertices(self) -> list[tuple]:
        """Orbits of sigma, each cycle starting at its minimum, sorted."""
        return _orbits(self.sigma)

    def edges(self) -> list[tuple]:
        return _orbits(self.alpha)

    def edge_of(self, h: int) -> int:
        """Edge identifier of half-edge ``h`` (the smaller half-edge index)."""
        return min(h, self.alpha[h])

    def vertex_of(self, h: int) -> int:
        """Vertex identifier of half-edge ``h`` (minimum of its sigma-orbit)."""
        m = h
        x = self.sigma[h]
        while x != h:
            if x < m:
                m = x
            x = self.sigma[x]
        return m

    def relabelled(self, perm) -> "RootedMap":
        """Conjugate by the half-edge relabelling ``h -> perm[h]``."""
        n = len(self.sigma)
        sigma = [0] * n
        alpha = [0] * n
        for h in range(n):
            sigma[perm[h]] = perm[self.sigma[h]]
            alpha[perm[h]] = perm[self.alpha[h]]
        return RootedMap(tuple(sigma), tuple(alpha), perm[self.root])


def _orbits(perm) -> list[tuple]:
    n = len(perm)
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        x = perm[start]
        while x != start:
            seen[x] = True
            cyc.append(x)
            x = perm[x]
        out.append(tuple(cyc))
    return out


def face_permutation(m: RootedMap) -> tuple:
    """The permutation ``h -> sigma[alpha[h]]`` whose orbits are the faces."""
    return tuple(m.sigma[m.alpha[h]] for h in range(m.half_edge_count))


def trace_faces(m: RootedMap) -> list[tuple]:
    """Faces of ``m`` as cyclic half-edge sequences (orbits of sigma∘alpha)."""
    return _orbits(face_permutation(m))


def euler_data(m: RootedMap) -> tuple:
    """Return ``(V, E, F, genus)`` with ``V - E + F = 2 - 2 genus``."""
    v = len(m.vertices())
    e = m.half_edge_count // 2
    f = len(trace_faces(m))
    chi = v - e + f
    assert chi % 2 == 0, "odd Euler characteristic on an orientable map"
    genus = (2 - chi) // 2
    assert genus >= 0
    return v, e, f, genus


def canonical_relabelling(m: RootedMap) -> list[int]:
    """First-visit relabelling: traverse from the root, examining
    ``alpha[h]`` then ``sigma[h]`` for each visited half-edge in visit order.
    """
    n = m.half_edge_count
    new = [-1] * n
    order = [m.root]
    new[m.root] = 0
    i = 0
    while i < len(order):
        h = order[i]
        for nb in (m.alpha[h], m.sigma[h]):
            if new[nb] < 0:
                new[nb] = len(order)
                order.append(nb)
        i += 1
    return new


def canonicalize(m: RootedMap) -> RootedMap:
    """Canonical representative of the rooted-isomorphism class of ``m``.

    Half-edges are relabelled in first-visit order of the traversal from the
    root, so the root becomes 0.  Two rooted maps are isomorphic as rooted
    maps iff their canonical forms are identical.
    """
    return m.relabelled(canonical_relabelling(m))


# ---------------------------------------------------------------------------
# Polygon gluings (general surfaces)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolygonGluing:
    """A perfect matching of the ``2n`` sides of a rooted ``2n``-gon with a
    twist flag per pair.  Side 0 is the root side."""

    n: int
    pairs: tuple  # ((a, b), ...) with a < b, sorted by a
    twists: tuple  # bool per pair

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one edge")
        pairs = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "twists", tuple(bool(t) for t in self.twists))
        if len(pairs) != self.n or len(self.twists) != self.n:
            raise ValueError("need exactly n pairs and n twist flags")
        seen = set()
        for a, b in pairs:
            seen.update((a, b))
        if seen != set(range(2 * self.n)) or any(a == b for a, b in pairs):
            raise ValueError("pairs do not form a perfect matching of the sides")

    @property
    def orientable(self) -> bool:
        return not any(self.twists)

    def side_pair(self, side: int) -> tuple:
        for k, (a, b) in enumerate(self.pairs):
            if side in (a, b):
                return k, (a, b)
        raise ValueError("side out of range")


@dataclass(frozen=True)
class GluedSkeleton:
    """Vertex classes of a glued polygon: a partition of the 2n corners."""

    vertex_classes: tuple  # tuple of sorted corner tuples, ordered by min
    orientable: bool

    @property
    def vertex_count(self) -> int:
        return len(self.vertex_classes)


def glue_polygon(g: PolygonGluing) -> GluedSkeleton:
    """Identify the polygon corners according to the gluing."""
    nn = 2 * g.n
    ds = DisjointSets(nn)
    for (a, b), twist in zip(g.pairs, g.twists):
        if twist:
            ds.union(a, b)
            ds.union((a + 1) % nn, (b + 1) % nn)
        else:
            ds.union(a, (b + 1) % nn)
            ds.union((a + 1) % nn, b)
    classes = tuple(tuple(c) for c in ds.classes())
    return GluedSkeleton(classes, g.orientable)


@dataclass(frozen=True)
class ColoredUnicellularMap:
    """A polygon gluing with vertex classes colored using every color in
    ``1..q`` and (internally) edge labels ``1..n`` on the glued pairs.

    ``colors[k]`` is the color of the k-th vertex class of the skeleton (in
    the canonical by-minimum-corner order); ``edge_labels[k]`` labels the k-th
    pair of the gluing.  The default edge labelling is ``1..n`` in pair order.
    """

    gluing: PolygonGluing
    colors: tuple
    q: int
    edge_labels: tuple = None

    def __post_init__(self):
        skel = glue_polygon(self.gluing)
        object.__setattr__(self, "colors", tuple(self.colors))
        if len(self.colors) != skel.vertex_count:
            raise ValueError("need one color per vertex class")
        if set(self.colors) != set(range(1, self.q + 1)):
            raise ValueError("coloring must use every color in 1..q")
        if self.edge_labels is None:
            object.__setattr__(self, "edge_labels",
                               tuple(range(1, self.gluing.n + 1)))
        else:
            object.__setattr__(self, "edge_labels", tuple(self.edge_labels))
        if sorted(self.edge_labels) != list(range(1, self.gluing.n + 1)):
            raise ValueError("edge labels must be a permutation of 1..n")

    @property
    def skeleton(self) -> GluedSkeleton:
        return glue_polygon(self.gluing)

    def corner_color(self, corner: int) -> int:
        for k, cls in enumerate(self.skeleton.vertex_classes):
            if corner in cls:
                return self.colors[k]
        raise ValueError("corner out of range")

    def stripped(self) -> "ColoredUnicellularMap":
        """Forget edge labels (reset them to the canonical 1..n order)."""
        return ColoredUnicellularMap(self.gluing, self.colors, self.q)
