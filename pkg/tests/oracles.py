"""Independent reference computations used to derive and check frozen constants.

Nothing here calls into the package's geometry kernels: dihedrals come from
face angles (spherical law of cosines), volumes from a different origin,
derivatives from finite differences.
"""
import numpy as np


def angle_at(v, p, q):
    """Planar angle at v in triangle (v, p, q)."""
    a, b = np.asarray(p, float) - v, np.asarray(q, float) - v
    return float(np.arccos(np.clip(a @ b / np.linalg.norm(a) / np.linalg.norm(b), -1, 1)))


def dihedral_from_face_angles(e0, e1, w1, w2):
    """Dihedral at edge e0e1 from the three face angles at e0."""
    e0 = np.asarray(e0, float)
    A = angle_at(e0, e1, w1)
    B = angle_at(e0, e1, w2)
    C = angle_at(e0, w1, w2)
    c = (np.cos(C) - np.cos(A) * np.cos(B)) / (np.sin(A) * np.sin(B))
    return float(np.arccos(np.clip(c, -1, 1)))


def volume_from_origin(coords, faces):
    """Sum of signed tetra volumes against the coordinate origin."""
    X = np.asarray(coords, float)
    return float(sum(np.linalg.det(np.array([X[i], X[j], X[k]])) for i, j, k in faces) / 6.0)


def fd_rigidity_matrix(coords, edges, h=1e-6):
    """Central finite differences of squared edge lengths."""
    X = np.asarray(coords, float)
    e = np.array(edges)

    def sq(Y):
        return np.sum((Y[e[:, 0]] - Y[e[:, 1]]) ** 2, axis=1)

    cols = []
    for k in range(X.size):
        d = np.zeros(X.size)
        d[k] = h
        D = d.reshape(X.shape)
        cols.append((sq(X + D) - sq(X - D)) / (2 * h))
    return np.array(cols).T


def random_rotation(rng):
    Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q


def bricard_coords(l_ab, l_bc, s, t, r):
    """B(r) from the chord-angle description alone (a, b, c, d, p, q)."""
    th1, th2 = 2 * np.arcsin(l_ab / (2 * r)), 2 * np.arcsin(l_bc / (2 * r))
    phi_a = np.pi / 2 + (th1 + th2) / 2
    pts = [phi_a, phi_a - th1, phi_a - th1 - th2]
    a, b, c = ([r * np.cos(f), r * np.sin(f), 0.0] for f in pts)
    d = [-b[0], b[1], 0.0]
    p = [0.0, 0.0, np.sqrt(s * s - r * r)]
    q = [0.0, 0.0, -np.sqrt(t * t - r * r)]
    return np.array([a, b, c, d, p, q])


def face_count_P():
    """(V, E, F) of P by hand: C(s) has 8 - 2 + 2*4 + 2*3 = 20 faces on 6 + 6 vertices.

    P drops faces mnu, mnx of C, adds two 4-triangle fans and keeps 6 of the
    8 faces of B'(s); it gains the six primed vertices.
    """
    F_C, V_C = 8 - 2 + 2 * 4 + 2 * 3, 6 + 6
    F = F_C - 2 + 2 * 4 + (8 - 2)
    V = V_C + 6
    return V, 3 * F // 2, F
