import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from flexpoly.bricard import CFG0, build_bricard, build_planar_quad
from flexpoly.geometry import (EmbeddedPolyhedron, GeometryError, circumcircle, dihedral, edge_sectors,
                               half_plane_side, integral_mean_curvature, labeled_congruent,
                               point_in_triangle, signed_volume)
from flexpoly.surface import build_surface

from oracles import dihedral_from_face_angles, random_rotation, volume_from_origin

ALPHA_S = 0.295296343103273  # derived: face-angle oracle on B(s) for CFG0

CUBE_V = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=float)
CUBE_QUADS = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]


def cube():
    faces = []
    for a, b, c, d in CUBE_QUADS:
        faces += [(str(a), str(b), str(c)), (str(a), str(c), str(d))]
    S = build_surface(faces, order=[str(i) for i in range(8)])
    Q = EmbeddedPolyhedron(S, CUBE_V)
    return Q if signed_volume(Q) > 0 else Q.flipped()


def regular_tetrahedron():
    X = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(8)
    S = build_surface([("0", "1", "2"), ("0", "2", "3"), ("0", "3", "1"), ("1", "3", "2")], order="0123")
    Q = EmbeddedPolyhedron(S, X)
    return Q if signed_volume(Q) > 0 else Q.flipped()


def test_circumcircle_examples():
    O, r = circumcircle([1, 0, 0], [0, 1, 0], [-1, 0, 0])
    assert np.allclose(O, 0, atol=1e-15) and r == pytest.approx(1.0, abs=1e-15)
    _, r = circumcircle([0, 0, 0], [1, 0, 0], [0.5, np.sqrt(3) / 2, 0])
    assert r == pytest.approx(1 / np.sqrt(3), abs=1e-14)
    quad = build_planar_quad(CFG0, 2.0)
    O, r = circumcircle(quad.a, quad.b, quad.c)
    assert r == pytest.approx(2.0, abs=1e-12) and np.allclose(O, 0, atol=1e-12)


def test_circumcircle_collinear():
    with pytest.raises(GeometryError):
        circumcircle([0, 0, 0], [1, 0, 0], [2, 0, 0])


def test_regular_tetrahedron_dihedral():
    X = regular_tetrahedron().coords
    for i, j, k, l in [(0, 1, 2, 3), (2, 3, 0, 1), (1, 3, 0, 2)]:
        assert dihedral(X[i], X[j], X[k], X[l]).angle == pytest.approx(np.arccos(1 / 3), abs=1e-14)


def test_dihedral_extremes():
    e0, e1 = [0, 0, 0], [0, 0, 1]
    assert dihedral(e0, e1, [1, 0, 0.3], [2, 0, -1]).angle == pytest.approx(0.0, abs=1e-15)
    assert dihedral(e0, e1, [1, 0, 0], [-1, 0, 0.5]).angle == pytest.approx(np.pi, abs=1e-15)
    s = dihedral(e0, e1, [1, 0, 0], [0, 1, 0])
    assert s.angle == pytest.approx(np.pi / 2) and s.sector == pytest.approx(np.pi / 2)
    assert dihedral(e0, e1, [0, 1, 0], [1, 0, 0]).sector == pytest.approx(3 * np.pi / 2)


def test_dihedral_wing_on_edge():
    with pytest.raises(GeometryError):
        dihedral([0, 0, 0], [0, 0, 1], [0, 0, 2], [1, 0, 0])


def test_alpha_s_regression():
    B = build_bricard(CFG0, CFG0.s)
    got = dihedral(B["a"], B["q"], B["b"], B["d"]).angle
    assert got == pytest.approx(dihedral_from_face_angles(B["a"], B["q"], B["b"], B["d"]), abs=1e-12)
    assert got == pytest.approx(ALPHA_S, abs=1e-12)


def test_labeled_congruence():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((6, 3))
    R = random_rotation(rng)
    assert labeled_congruent(X, X @ R.T + [1, 2, 3], 1e-12)
    assert labeled_congruent(X, X * [1, 1, -1], 1e-12)
    Y = X.copy()
    Y[0] += 1e-3
    assert not labeled_congruent(X, Y, 1e-8)
    assert not labeled_congruent(X, X[::-1], 1e-8)


def test_cube_volume_and_mean_curvature():
    Q = cube()
    assert signed_volume(Q) == pytest.approx(1.0, abs=1e-14)
    assert signed_volume(Q.flipped()) == pytest.approx(-1.0, abs=1e-14)
    # diagonal edges of the split squares are flat and contribute nothing
    assert integral_mean_curvature(Q) == pytest.approx(3 * np.pi, abs=1e-13)


def test_tetrahedron_mean_curvature():
    Q = regular_tetrahedron()
    ell = np.linalg.norm(Q.coords[0] - Q.coords[1])
    Q = Q.with_coords(Q.coords / ell)
    assert integral_mean_curvature(Q) == pytest.approx(3 * (np.pi - np.arccos(1 / 3)), abs=1e-13)


def test_interior_sectors_of_convex_solid():
    sec = edge_sectors(regular_tetrahedron())
    assert all(v == pytest.approx(np.arccos(1 / 3)) for v in sec.values())
    sec = edge_sectors(regular_tetrahedron().flipped())
    assert all(v == pytest.approx(2 * np.pi - np.arccos(1 / 3)) for v in sec.values())


def test_open_surface_rejected():
    Q = cube()
    S = build_surface(Q.surface.face_labels()[1:], order=Q.labels)
    with pytest.raises(GeometryError):
        signed_volume(EmbeddedPolyhedron(S, Q.coords))


def test_coplanar_adjacent_faces_allowed(con):
    # abp, bcp, cdp, dap are coplanar in B(s); nothing is flagged
    assert con.B_s.degenerate_faces() == []
    assert con.P.degenerate_faces() == []


def test_collinear_face_rejected():
    S = build_surface([("a", "b", "c"), ("a", "c", "d"), ("a", "d", "b"), ("b", "d", "c")])
    X = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 1]], dtype=float)
    with pytest.raises(GeometryError):
        EmbeddedPolyhedron(S, X)


def test_half_plane_side():
    p0, p1, ref = np.zeros(3), np.array([0, 0, 1.0]), np.array([1.0, 0, 0.4])
    assert half_plane_side(p0, p1, ref, ref) == "same"
    assert half_plane_side(p0, p1, ref, [-1.0, 0, 0.2]) == "opposite"
    assert half_plane_side(p0, p1, ref, [0, 0, 3.0]) == "on-line"


def test_x_opposite_d(con):
    B, pts = con.B_s, con.points
    assert half_plane_side(B["a"], B["q"], B["d"], pts.x) == "opposite"
    assert half_plane_side(B["a"], B["q"], B["b"], pts.u) == "opposite"


def test_point_in_triangle():
    tri = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
    assert point_in_triangle(tri.mean(axis=0), tri)
    assert not point_in_triangle(tri[0], tri)
    assert not point_in_triangle([0.5, 0.5, 0], tri)


def test_primed_vertices_inside_faces(con):
    P = con.P
    assert point_in_triangle(P["b'"], [P["m"], P["n"], P["u"]])
    assert point_in_triangle(P["d'"], [P["m"], P["n"], P["x"]])


finite = st.floats(-3, 3, allow_nan=False)
points = arrays(np.float64, (4, 3), elements=finite)


@given(points, st.integers(0, 2**32 - 1), st.floats(0.2, 5))
@settings(max_examples=60)
def test_dihedral_invariant_under_similarity(X, seed, scale):
    e0, e1, wa, wb = X
    assume(np.linalg.norm(e1 - e0) > 0.1)
    e = (e1 - e0) / np.linalg.norm(e1 - e0)
    for w in (wa, wb):
        v = w - e0
        assume(np.linalg.norm(v - (v @ e) * e) > 0.1)
    R = random_rotation(np.random.default_rng(seed))
    Y = scale * X @ R.T + 0.5
    a, b = dihedral(*X), dihedral(*Y)
    assert a.angle == pytest.approx(b.angle, abs=1e-9)
    assert a.sector == pytest.approx(b.sector, abs=1e-9) or abs(abs(a.sector - b.sector) - 2 * np.pi) < 1e-9
    assert a.angle == pytest.approx(dihedral_from_face_angles(e0, e1, wa, wb), abs=1e-6)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25)
def test_volume_rigid_motion_and_origin(seed):
    rng = np.random.default_rng(seed)
    Q = cube()
    Y = Q.coords @ random_rotation(rng).T + rng.standard_normal(3) * 10
    Q2 = Q.with_coords(Y)
    assert signed_volume(Q2) == pytest.approx(1.0, abs=1e-10)
    assert volume_from_origin(Y, Q.surface.faces) == pytest.approx(1.0, abs=1e-9)
    assert integral_mean_curvature(Q2) == pytest.approx(3 * np.pi, abs=1e-10)


@given(arrays(np.float64, (3, 3), elements=finite))
@settings(max_examples=60)
def test_circumcircle_equidistant(X):
    a, b, c = X
    n = np.cross(b - a, c - a)
    assume(np.linalg.norm(n) > 1e-2 * max(1.0, np.linalg.norm(b - a) * np.linalg.norm(c - a)))
    O, r = circumcircle(a, b, c)
    for p in X:
        assert np.linalg.norm(p - O) == pytest.approx(r, rel=1e-9)
    assert abs((O - a) @ n) <= 1e-9 * np.linalg.norm(n) * max(1.0, r)
