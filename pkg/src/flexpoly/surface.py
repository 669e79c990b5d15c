"""Labeled simplicial surfaces and the surgery used to assemble polyhedra.

Faces carry orientation as ordered triples of vertex indices; edges are always
derived from faces. Vertex indices are 0-based internally and 1-based in every
serialized form.
"""
from __future__ import annotations

import json
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class SurfaceError(ValueError):
    """Invalid combinatorial input or a surgery step that cannot be carried out."""


Face = tuple[int, int, int]
Edge = tuple[int, int]


def _edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class SimplicialSurface:
    labels: tuple[str, ...]
    faces: tuple[Face, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {lab: i for i, lab in enumerate(self.labels)}
        if len(index) != len(self.labels):
            raise SurfaceError("vertex labels must be unique")
        object.__setattr__(self, "_index", index)

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        seen = {}
        for f in self.faces:
            for k in range(3):
                seen.setdefault(_edge(f[k], f[(k + 1) % 3]), None)
        return tuple(sorted(seen))

    @cached_property
    def edge_faces(self) -> dict[Edge, list[int]]:
        table = defaultdict(list)
        for fi, f in enumerate(self.faces):
            for k in range(3):
                table[_edge(f[k], f[(k + 1) % 3])].append(fi)
        return dict(table)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise SurfaceError(f"no vertex labeled {label!r}") from None

    def has_vertex(self, label: str) -> bool:
        return label in self._index

    def face_labels(self) -> list[tuple[str, str, str]]:
        return [tuple(self.labels[i] for i in f) for f in self.faces]

    def find_face(self, triple: Sequence[str]) -> int:
        """Index of the face whose vertex set equals ``triple`` (orientation ignored)."""
        want = frozenset(self.index(lab) for lab in triple)
        for fi, f in enumerate(self.faces):
            if frozenset(f) == want:
                return fi
        raise SurfaceError(f"face {tuple(triple)} not present")

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def boundary_edges(self) -> list[Edge]:
        return [e for e, fs in self.edge_faces.items() if len(fs) == 1]

    def directed_boundary(self) -> dict[int, int]:
        """Boundary as a successor map, following face orientation."""
        succ = {}
        for e in self.boundary_edges():
            f = self.faces[self.edge_faces[e][0]]
            for k in range(3):
                i, j = f[k], f[(k + 1) % 3]
                if _edge(i, j) == e:
                    if i in succ:
                        raise SurfaceError("boundary is not a simple cycle")
                    succ[i] = j
        return succ

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.labels),
            "faces": [[i + 1 for i in f] for f in self.faces],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "SimplicialSurface":
        labels = tuple(data["vertices"])
        faces = []
        for f in data["faces"]:
            if len(f) != 3:
                raise SurfaceError(f"face {f} is not a triangle")
            idx = tuple(int(i) - 1 for i in f)
            if min(idx) < 0 or max(idx) >= len(labels):
                raise SurfaceError(f"face {f} references a missing vertex")
            faces.append(idx)
        return _checked(labels, faces)

    @classmethod
    def from_json(cls, text: str) -> "SimplicialSurface":
        return cls.from_dict(json.loads(text))


def _checked(labels: Sequence[str], faces: Iterable[Face]) -> SimplicialSurface:
    seen = set()
    out = []
    for f in faces:
        f = tuple(int(i) for i in f)
        if len(set(f)) != 3:
            raise SurfaceError(f"degenerate face {[labels[i] for i in f]}")
        key = frozenset(f)
        if key in seen:
            raise SurfaceError(f"duplicate face {[labels[i] for i in f]}")
        seen.add(key)
        out.append(f)
    return SimplicialSurface(tuple(labels), tuple(out))


def build_surface(faces: Iterable[Sequence[str]], order: Sequence[str] | None = None) -> SimplicialSurface:
    """Build a surface from labeled, oriented vertex triples.

    Vertices are enumerated in order of first appearance unless ``order`` is
    given, in which case it must list every label exactly once.
    """
    faces = [tuple(f) for f in faces]
    for f in faces:
        if len(f) != 3:
            raise SurfaceError(f"face {f} is not a triple")
        if len(set(f)) != 3:
            raise SurfaceError(f"degenerate face {f}")
    if order is None:
        labels = list(dict.fromkeys(lab for f in faces for lab in f))
    else:
        labels = list(order)
        used = {lab for f in faces for lab in f}
        if set(labels) != used or len(labels) != len(used):
            raise SurfaceError("explicit vertex order must list each used label once")
    index = {lab: i for i, lab in enumerate(labels)}
    return _checked(labels, [tuple(index[lab] for lab in f) for f in faces])


def reorder(S: SimplicialSurface, order: Sequence[str]) -> SimplicialSurface:
    return build_surface(S.face_labels(), order=order)


def remove_faces(S: SimplicialSurface, triples: Iterable[Sequence[str]]) -> SimplicialSurface:
    drop = {S.find_face(t) for t in triples}
    kept = [f for fi, f in enumerate(S.faces) if fi not in drop]
    used = sorted({i for f in kept for i in f})
    remap = {old: new for new, old in enumerate(used)}
    return _checked([S.labels[i] for i in used], [tuple(remap[i] for i in f) for f in kept])


def flip(S: SimplicialSurface) -> SimplicialSurface:
    return SimplicialSurface(S.labels, tuple((f[0], f[2], f[1]) for f in S.faces))


# ---------------------------------------------------------------- validation

@dataclass
class SphereReport:
    n_vertices: int
    n_edges: int
    n_faces: int
    euler: int
    boundary_edges: list
    nonmanifold_edges: list
    bad_links: list
    connected: bool
    orientable: bool
    oriented: bool

    @property
    def closed(self) -> bool:
        return not self.boundary_edges and not self.nonmanifold_edges

    @property
    def manifold(self) -> bool:
        return not self.nonmanifold_edges and not self.bad_links

    @property
    def passes(self) -> bool:
        return self.closed and self.manifold and self.orientable and self.connected and self.euler == 2

    def failures(self) -> list[str]:
        out = []
        if self.boundary_edges:
            out.append(f"{len(self.boundary_edges)} boundary edges")
        if self.nonmanifold_edges:
            out.append(f"{len(self.nonmanifold_edges)} non-manifold edges")
        if self.bad_links:
            out.append(f"vertex links not a single cycle at {self.bad_links}")
        if not self.connected:
            out.append("surface not connected")
        if not self.orientable:
            out.append("not orientable")
        if self.euler != 2:
            out.append(f"Euler characteristic {self.euler} != 2")
        return out


def _link_is_cycle(S: SimplicialSurface, v: int) -> bool:
    adj = defaultdict(list)
    for f in S.faces:
        if v in f:
            k = f.index(v)
            a, b = f[(k + 1) % 3], f[(k + 2) % 3]
            adj[a].append(b)
            adj[b].append(a)
    if not adj or any(len(nb) != 2 for nb in adj.values()):
        return False
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)


def _orientation_signs(S: SimplicialSurface) -> tuple[bool, list[int] | None]:
    """BFS over face adjacency assigning a flip sign per face.

    Returns (stored orientation already consistent, signs or None when no
    consistent orientation exists).
    """
    sign = [0] * S.n_faces
    consistent = True
    for seed in range(S.n_faces):
        if sign[seed]:
            continue
        sign[seed] = 1
        queue = deque([seed])
        while queue:
            fi = queue.popleft()
            f = S.faces[fi]
            for k in range(3):
                i, j = f[k], f[(k + 1) % 3]
                for gi in S.edge_faces[_edge(i, j)]:
                    if gi == fi:
                        continue
                    g = S.faces[gi]
                    same_dir = any(g[m] == i and g[(m + 1) % 3] == j for m in range(3))
                    if same_dir:
                        consistent = False
                    want = -sign[fi] if same_dir else sign[fi]
                    if sign[gi] == 0:
                        sign[gi] = want
                        queue.append(gi)
                    elif sign[gi] != want:
                        return False, None
    return consistent, sign


def validate_closed_sphere(S: SimplicialSurface) -> SphereReport:
    counts = {e: len(fs) for e, fs in S.edge_faces.items()}
    boundary = [e for e, c in counts.items() if c == 1]
    nonmanifold = [e for e, c in counts.items() if c > 2]
    bad_links = [S.labels[v] for v in range(S.n_vertices) if not _link_is_cycle(S, v)]

    comp = {0} if S.n_vertices else set()
    nbrs = defaultdict(set)
    for i, j in S.edges:
        nbrs[i].add(j)
        nbrs[j].add(i)
    stack = list(comp)
    while stack:
        for w in nbrs[stack.pop()]:
            if w not in comp:
                comp.add(w)
                stack.append(w)
    connected = len(comp) == S.n_vertices

    if nonmanifold:
        oriented, orientable = False, False
    else:
        oriented, signs = _orientation_signs(S)
        orientable = signs is not None
        oriented = oriented and orientable
    return SphereReport(
        n_vertices=S.n_vertices,
        n_edges=S.n_edges,
        n_faces=S.n_faces,
        euler=S.euler_characteristic(),
        boundary_edges=[(S.labels[i], S.labels[j]) for i, j in boundary],
        nonmanifold_edges=[(S.labels[i], S.labels[j]) for i, j in nonmanifold],
        bad_links=bad_links,
        connected=connected,
        orientable=orientable,
        oriented=oriented,
    )


def orient_consistently(S: SimplicialSurface) -> SimplicialSurface:
    """Flip faces so that every interior edge is traversed in opposite directions.

    The face listed first keeps its orientation.
    """
    _, signs = _orientation_signs(S)
    if signs is None:
        raise SurfaceError("surface is not orientable")
    faces = tuple(f if s > 0 else (f[0], f[2], f[1]) for f, s in zip(S.faces, signs))
    return SimplicialSurface(S.labels, faces)


# ------------------------------------------------------------------- surgery

def _cyclic_order_matches(cycle: Sequence[str], triple: Sequence[str]) -> bool | None:
    """True/False if the triple appears in ``cycle`` in the same/reversed cyclic order."""
    pos = [cycle.index(t) for t in triple]
    n = len(cycle)
    fwd = ((pos[1] - pos[0]) % n) + ((pos[2] - pos[1]) % n) + ((pos[0] - pos[2]) % n)
    return fwd == n


def retriangulate_fan(
    S: SimplicialSurface,
    face: Sequence[str],
    apex: str,
    boundary: Sequence[str],
) -> SimplicialSurface:
    """Replace ``face`` by the fan of triangles from ``apex`` along a polygon.

    ``boundary`` is the closed polygon (listed once around, either direction)
    bounding the region that replaces the face; it contains the face's three
    vertices and may introduce new ones. The fan is oriented like the
    replaced face.
    """
    boundary = list(boundary)
    if len(set(boundary)) != len(boundary) or len(boundary) < 3:
        raise SurfaceError(f"boundary {boundary} is not a simple polygon")
    if apex not in boundary:
        raise SurfaceError(f"apex {apex!r} is not on the boundary")
    fi = S.find_face(face)
    oriented = [S.labels[i] for i in S.faces[fi]]
    if not set(oriented) <= set(boundary):
        raise SurfaceError(f"boundary {boundary} does not contain face {tuple(face)}")
    if not _cyclic_order_matches(boundary, oriented):
        boundary = boundary[::-1]
    k = boundary.index(apex)
    ring = boundary[k:] + boundary[:k]
    fan = [(apex, ring[i], ring[i + 1]) for i in range(1, len(ring) - 1)]

    triples = [t for gi, t in enumerate(S.face_labels()) if gi != fi]
    triples[fi:fi] = fan
    out = build_surface(triples, order=list(S.labels) + [b for b in boundary if not S.has_vertex(b)])
    _check_directions(out)
    return out


def _check_directions(S: SimplicialSurface) -> None:
    directed = Counter()
    for f in S.faces:
        for k in range(3):
            directed[(f[k], f[(k + 1) % 3])] += 1
    clash = [e for e, c in directed.items() if c > 1]
    if clash:
        i, j = clash[0]
        raise SurfaceError(f"orientation conflict along edge {S.labels[i]}-{S.labels[j]}")


def boundary_cycle(S: SimplicialSurface) -> list[str]:
    """The boundary as one simple cycle of labels, following face orientation."""
    succ = S.directed_boundary()
    if not succ:
        return []
    start = min(succ)
    cycle = [start]
    while True:
        nxt = succ.get(cycle[-1])
        if nxt is None:
            raise SurfaceError("boundary is not closed")
        if nxt == start:
            break
        if nxt in cycle:
            raise SurfaceError("boundary is not a simple cycle")
        cycle.append(nxt)
    if len(cycle) != len(succ):
        raise SurfaceError("boundary has more than one component")
    return [S.labels[i] for i in cycle]


def glue_complexes(
    S1: SimplicialSurface,
    S2: SimplicialSurface,
    identification: Mapping[str, str] | None = None,
) -> SimplicialSurface:
    """Glue two surfaces along their boundary cycles.

    ``identification`` maps labels of ``S2`` onto labels of ``S1``; by default
    boundary vertices are matched by equal labels. ``S2`` is flipped when its
    orientation disagrees with ``S1`` along the seam.
    """
    c1 = boundary_cycle(S1)
    c2 = boundary_cycle(S2)
    if len(c1) != len(c2):
        raise SurfaceError(f"boundary length mismatch: {len(c1)} vs {len(c2)}")
    ident = dict(identification) if identification is not None else {lab: lab for lab in c2}
    mapped = [ident.get(lab, lab) for lab in c2]
    if set(mapped) != set(c1):
        raise SurfaceError(f"boundaries do not match: {c1} vs {mapped}")
    interior2 = [lab for lab in S2.labels if lab not in ident]
    clash = set(interior2) & set(S1.labels)
    if clash:
        raise SurfaceError(f"labels {sorted(clash)} occur in both surfaces off the seam")

    n = len(c1)
    e1 = {(c1[i], c1[(i + 1) % n]) for i in range(n)}
    e2 = {(mapped[i], mapped[(i + 1) % n]) for i in range(n)}
    rev1 = {(b, a) for a, b in e1}
    if e2 == e1:
        S2 = flip(S2)
    elif e2 != rev1:
        raise SurfaceError("boundary cycles visit the matched vertices in different orders")

    triples = S1.face_labels() + [tuple(ident.get(lab, lab) for lab in t) for t in S2.face_labels()]
    out = build_surface(triples, order=list(S1.labels) + interior2)
    bad = [e for e, fs in out.edge_faces.items() if len(fs) > 2]
    if bad:
        i, j = bad[0]
        raise SurfaceError(f"gluing produced non-manifold edge {out.labels[i]}-{out.labels[j]}")
    _check_directions(out)
    return out


def combinatorially_equivalent(
    S1: SimplicialSurface,
    S2: SimplicialSurface,
    pairing: Mapping[str, str] | None = None,
) -> bool:
    """Whether a vertex correspondence carries faces of S1 bijectively onto faces of S2.

    The correspondence defaults to matching canonical indices.
    """
    if S1.n_vertices != S2.n_vertices or S1.n_faces != S2.n_faces:
        return False
    if pairing is None:
        vmap = list(range(S1.n_vertices))
    else:
        if set(pairing) != set(S1.labels) or len(set(pairing.values())) != S1.n_vertices:
            return False
        try:
            vmap = [S2.index(pairing[lab]) for lab in S1.labels]
        except SurfaceError:
            return False
    faces2 = {frozenset(f) for f in S2.faces}
    image = {frozenset(vmap[i] for i in f) for f in S1.faces}
    return image == faces2
