"""Euclidean primitives and the embedded polyhedron type.

Points are length-3 float arrays. Angles are in radians.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .surface import SimplicialSurface, validate_closed_sphere

TWO_PI = 2.0 * np.pi


class GeometryError(ValueError):
    pass


def _as_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (3,) or not np.all(np.isfinite(p)):
        raise GeometryError(f"not a finite 3D point: {p!r}")
    return p


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def diameter(points) -> float:
    pts = np.asarray(points, dtype=float)
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d**2).sum(-1)).max())


@dataclass(frozen=True)
class EmbeddedPolyhedron:
    """A simplicial surface together with one point per vertex.

    ``coords[i]`` is the image of vertex ``surface.labels[i]``. Adjacent faces
    may be coplanar and the image may self-intersect; only collinear face
    vertices are rejected.
    """

    surface: SimplicialSurface
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.shape != (self.surface.n_vertices, 3):
            raise GeometryError(f"expected {self.surface.n_vertices}x3 coordinates, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise GeometryError("non-finite coordinate")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        bad = self.degenerate_faces()
        if bad:
            raise GeometryError(f"degenerate (collinear) faces: {bad}")

    def __getitem__(self, label: str) -> np.ndarray:
        return self.coords[self.surface.index(label)]

    @property
    def labels(self) -> tuple[str, ...]:
        return self.surface.labels

    def points(self, labels: Sequence[str]) -> np.ndarray:
        return np.array([self[lab] for lab in labels])

    def with_coords(self, coords) -> "EmbeddedPolyhedron":
        return EmbeddedPolyhedron(self.surface, np.asarray(coords, dtype=float).reshape(-1, 3))

    def replace(self, **moved) -> "EmbeddedPolyhedron":
        c = self.coords.copy()
        for lab, p in moved.items():
            c[self.surface.index(lab)] = p
        return self.with_coords(c)

    def diameter(self) -> float:
        return diameter(self.coords)

    def edge_lengths(self) -> np.ndarray:
        e = np.array(self.surface.edges)
        return np.linalg.norm(self.coords[e[:, 0]] - self.coords[e[:, 1]], axis=1)

    def face_areas(self) -> np.ndarray:
        f = np.array(self.surface.faces)
        p0, p1, p2 = self.coords[f[:, 0]], self.coords[f[:, 1]], self.coords[f[:, 2]]
        return 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)

    def degenerate_faces(self, rel_tol: float = 1e-12) -> list:
        if self.surface.n_faces == 0:
            return []
        scale = max(self.diameter(), 1e-300)
        areas = self.face_areas()
        labels = self.surface.face_labels()
        return [labels[i] for i in np.flatnonzero(areas <= rel_tol * scale**2)]

    def flipped(self) -> "EmbeddedPolyhedron":
        faces = tuple((f[0], f[2], f[1]) for f in self.surface.faces)
        return EmbeddedPolyhedron(SimplicialSurface(self.surface.labels, faces), self.coords)


# ------------------------------------------------------------------ circles

def circumcircle(a, b, c) -> tuple[np.ndarray, float]:
    """Center and radius of the circle through three points, in their plane."""
    a, b, c = _as_point(a), _as_point(b), _as_point(c)
    u, v = b - a, c - a
    w = np.cross(u, v)
    ww = w @ w
    if ww <= (1e-14 * max(u @ u, v @ v)) ** 2:
        raise GeometryError("collinear points have no circumcircle")
    center = a + (np.cross(w, u) * (v @ v) + np.cross(v, w) * (u @ u)) / (2.0 * ww)
    return center, float(np.linalg.norm(center - a))


# ---------------------------------------------------------------- dihedrals

@dataclass(frozen=True)
class DihedralSample:
    """Angle between two half-planes sharing an edge.

    ``angle`` is the unoriented measure in [0, pi]; ``sector`` is the
    rotation in [0, 2pi) that carries the first half-plane onto the second,
    right-handed about the axis direction.
    """

    angle: float
    sector: float


def _perp(e0, e, w):
    v = w - e0
    v = v - (v @ e) * e
    n = np.linalg.norm(v)
    if n <= 1e-14 * max(np.linalg.norm(w - e0), 1.0):
        raise GeometryError("wing lies on the edge line")
    return v / n


def dihedral(e0, e1, wing_a, wing_b, axis=None) -> DihedralSample:
    e0, e1, wing_a, wing_b = map(_as_point, (e0, e1, wing_a, wing_b))
    e = _unit(e1 - e0 if axis is None else _as_point(axis))
    va, vb = _perp(e0, e, wing_a), _perp(e0, e, wing_b)
    sector = float(np.arctan2(np.cross(va, vb) @ e, va @ vb)) % TWO_PI
    angle = float(np.arctan2(np.linalg.norm(np.cross(va, vb)), va @ vb))
    return DihedralSample(angle=angle, sector=sector)


def half_plane_angle(e0, direction, frame_ref, wing) -> float:
    """Polar angle of ``wing`` about the oriented line, measured from ``frame_ref``."""
    e = _unit(np.asarray(direction, dtype=float))
    r = _perp(e0, e, np.asarray(frame_ref, dtype=float))
    w = _perp(e0, e, np.asarray(wing, dtype=float))
    return float(np.arctan2(np.cross(r, w) @ e, r @ w)) % TWO_PI


# -------------------------------------------------------------- congruence

def distance_matrix(points) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    return np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)


def labeled_congruent(X, Y, tol: float) -> bool:
    """Whether two labeled point lists agree up to an isometry (reflections included)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise GeometryError(f"point lists differ in length: {X.shape} vs {Y.shape}")
    return bool(np.max(np.abs(distance_matrix(X) - distance_matrix(Y)), initial=0.0) <= tol)


# ------------------------------------------------------- global invariants

def _require_closed(P: EmbeddedPolyhedron):
    rep = validate_closed_sphere(P.surface)
    if not (rep.closed and rep.oriented):
        raise GeometryError("closed, consistently oriented surface required: " + "; ".join(rep.failures() or ["inconsistent orientation"]))


def signed_volume(P: EmbeddedPolyhedron, check: bool = True) -> float:
    if check:
        _require_closed(P)
    f = np.array(P.surface.faces)
    c = P.coords - P.coords.mean(axis=0)
    return float(np.einsum("ij,ij->i", c[f[:, 0]], np.cross(c[f[:, 1]], c[f[:, 2]])).sum() / 6.0)


def _edge_wings(S) -> tuple[list, np.ndarray]:
    """Edges of ``S`` with (tail, head, wing1, wing2), the edge oriented as in its first face."""
    keys, rows = [], []
    for (i, j), fs in S.edge_faces.items():
        if len(fs) != 2:
            raise GeometryError(f"edge {S.labels[i]}-{S.labels[j]} is not shared by two faces")
        f1, f2 = S.faces[fs[0]], S.faces[fs[1]]
        k = f1.index(i)
        a, b = (i, j) if f1[(k + 1) % 3] == j else (j, i)
        w1 = next(v for v in f1 if v not in (a, b))
        w2 = next(v for v in f2 if v not in (a, b))
        keys.append((min(i, j), max(i, j)))
        rows.append((a, b, w1, w2))
    return keys, np.array(rows, dtype=int).reshape(-1, 4)


def edge_sectors(P: EmbeddedPolyhedron) -> dict:
    """Interior dihedral sector in (0, 2pi) at every edge of a closed oriented surface.

    The interior is the side opposite to the right-hand normals of the faces.
    """
    keys, idx = _edge_wings(P.surface)
    X = P.coords
    e0 = X[idx[:, 0]]
    e = X[idx[:, 1]] - e0
    e /= np.linalg.norm(e, axis=1, keepdims=True)
    va, vb = X[idx[:, 2]] - e0, X[idx[:, 3]] - e0
    va -= np.einsum("ij,ij->i", va, e)[:, None] * e
    vb -= np.einsum("ij,ij->i", vb, e)[:, None] * e
    na, nb = np.linalg.norm(va, axis=1), np.linalg.norm(vb, axis=1)
    if np.any(np.minimum(na, nb) <= 1e-14):
        raise GeometryError("wing lies on the edge line")
    sec = np.arctan2(np.einsum("ij,ij->i", np.cross(va, vb), e), np.einsum("ij,ij->i", va, vb)) % TWO_PI
    return {k: float((TWO_PI - s) % TWO_PI) for k, s in zip(keys, sec)}


def integral_mean_curvature(P: EmbeddedPolyhedron, check: bool = True) -> float:
    """Half the sum over edges of length times (pi - interior dihedral sector)."""
    if check:
        _require_closed(P)
    sectors = edge_sectors(P)
    total = 0.0
    for (i, j), theta in sectors.items():
        total += np.linalg.norm(P.coords[i] - P.coords[j]) * (np.pi - theta)
    return 0.5 * float(total)


# ---------------------------------------------------------------- predicates

def _coplanar_scale(points) -> float:
    return 1e-9 * max(diameter(points), 1e-300)


def half_plane_side(line_p0, line_p1, reference, query, tol: float | None = None) -> str:
    """Classify ``query`` against the line in the plane spanned with ``reference``.

    Returns "same", "opposite" or "on-line".
    """
    p0, p1, ref, q = map(_as_point, (line_p0, line_p1, reference, query))
    tol = _coplanar_scale([p0, p1, ref, q]) if tol is None else tol
    e = _unit(p1 - p0)
    n = np.cross(e, ref - p0)
    if np.linalg.norm(n) <= tol:
        raise GeometryError("reference lies on the line")
    n = _unit(n)
    if abs((q - p0) @ n) > tol:
        raise GeometryError("query is not in the plane of the line and the reference")
    side_ref = np.cross(e, ref - p0) @ n
    side_q = np.cross(e, q - p0) @ n
    if abs(side_q) <= tol:
        return "on-line"
    return "same" if side_q * side_ref > 0 else "opposite"


def point_in_triangle(p, tri, tol: float | None = None) -> bool:
    """Strict interior test for a point coplanar with the triangle."""
    p = _as_point(p)
    A, B, C = (_as_point(t) for t in tri)
    tol = _coplanar_scale([A, B, C, p]) if tol is None else tol
    n = np.cross(B - A, C - A)
    nn = np.linalg.norm(n)
    if nn <= tol**2:
        raise GeometryError("degenerate triangle")
    n = n / nn
    if abs((p - A) @ n) > tol:
        raise GeometryError("point is not in the plane of the triangle")
    for P0, P1 in ((A, B), (B, C), (C, A)):
        # signed distance of p from edge line, positive towards the interior
        d = np.cross(P1 - P0, p - P0) @ n / np.linalg.norm(P1 - P0)
        if d <= tol:
            return False
    return True


def rotation_about_line(point, direction, angle: float) -> np.ndarray:
    """4x4 homogeneous matrix of the rotation about an oriented line."""
    e = _unit(np.asarray(direction, dtype=float))
    K = np.array([[0, -e[2], e[1]], [e[2], 0, -e[0]], [-e[1], e[0], 0]])
    R = np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)
    M = np.eye(4)
    M[:3, :3] = R
    M[:3, 3] = point - R @ point
    return M


def apply_affine(M: np.ndarray, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    return pts @ M[:3, :3].T + M[:3, 3]


def homothety(center, k: float) -> np.ndarray:
    M = np.eye(4)
    M[:3, :3] *= k
    M[:3, 3] = (1 - k) * np.asarray(center, dtype=float)
    return M
