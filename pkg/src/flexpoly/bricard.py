"""Bricard octahedra of the second type over a symmetric planar four-bar linkage.

The linkage a-b-c-d has |ab| = |cd| and |bc| = |da|, with d the mirror image of
b across the perpendicular bisector of ac, so the four joints stay on one
circle of radius r about O (placed at the origin, in the plane z = 0). Over O
sit the apexes p (height sqrt(s^2 - r^2), above) and q (depth sqrt(t^2 - r^2),
below), which keeps every p-edge at length s and every q-edge at length t
while r varies.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .geometry import EmbeddedPolyhedron, GeometryError, dihedral, edge_sectors
from .path import FlexPath
from .surface import build_surface

OCTA_LABELS = ("a", "b", "c", "d", "p", "q")
_FACES = [
    ("a", "b", "p"), ("b", "c", "p"), ("c", "d", "p"), ("d", "a", "p"),
    ("b", "a", "q"), ("c", "b", "q"), ("d", "c", "q"), ("a", "d", "q"),
]


class BricardError(ValueError):
    pass


@dataclass(frozen=True)
class BricardConfig:
    l_ab: float = 2.0
    l_bc: float = 3.0
    s: float = 2.0
    t: float = 3.0
    r0: float = 2.0

    def __post_init__(self):
        for name in ("l_ab", "l_bc", "s", "t", "r0"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise BricardError(f"{name} must be a positive number, got {v}")
        if not self.t > self.s >= self.r0:
            raise BricardError(f"need t > s >= r0, got t={self.t}, s={self.s}, r0={self.r0}")
        if 2 * self.r0 < max(self.l_ab, self.l_bc):
            raise BricardError("bars ab, bc do not fit a circle of radius r0")
        if np.isclose(self.l_ab, self.l_bc, rtol=1e-12, atol=0.0):
            raise BricardError("l_ab == l_bc (rhombus linkage) is not supported")

    def scaled(self, k: float) -> "BricardConfig":
        return BricardConfig(self.l_ab * k, self.l_bc * k, self.s * k, self.t * k, self.r0 * k)


CFG0 = BricardConfig()


@dataclass(frozen=True)
class PlanarQuad:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    O: np.ndarray
    r: float


def _segment_distance(p, a, b) -> float:
    ab = b - a
    t = np.clip((p - a) @ ab / (ab @ ab), 0.0, 1.0)
    return float(np.linalg.norm(a + t * ab - p))


def check_conditions(quad: PlanarQuad, rel_tol: float = 1e-9) -> list[str]:
    """Genericity conditions on the linkage; returns the violated ones."""
    a, b, c, d, O, r = quad.a, quad.b, quad.c, quad.d, quad.O, quad.r
    tol = rel_tol * r
    bad = []
    for x, y, z in combinations((a, b, c, d), 3):
        u, v = y - x, z - x
        if abs(u[0] * v[1] - u[1] * v[0]) <= tol * max(np.linalg.norm(u), np.linalg.norm(v)):
            bad.append("(a) three of a, b, c, d are collinear")
            break
    for name, (x, y) in (("ab", (a, b)), ("cd", (c, d))):
        if _segment_distance(O, x, y) <= tol:
            bad.append(f"(b) chord {name} passes through the circumcenter")
    u, v = d - a, c - b
    if abs(u[0] * v[1] - u[1] * v[0]) <= rel_tol * np.linalg.norm(u) * np.linalg.norm(v):
        bad.append("(b) lines ad and bc are parallel")
    return bad


def build_planar_quad(cfg: BricardConfig, r: float) -> PlanarQuad:
    """The linkage with circumradius r, symmetric about the y axis.

    a and c sit at polar angles pi/2 +- (theta_ab + theta_bc)/2 and b lies on the
    arc between them, theta_ab away from a; d = b reflected in the y axis.
    """
    if not r > 0:
        raise BricardError(f"radius must be positive, got {r}")
    if 2 * r < max(cfg.l_ab, cfg.l_bc) * (1 - 1e-15):
        raise BricardError(f"chord longer than the diameter at r={r}")
    th_ab = 2 * np.arcsin(min(cfg.l_ab / (2 * r), 1.0))
    th_bc = 2 * np.arcsin(min(cfg.l_bc / (2 * r), 1.0))
    half = 0.5 * (th_ab + th_bc)

    def on_circle(phi):
        return np.array([r * np.cos(phi), r * np.sin(phi), 0.0])

    a = on_circle(np.pi / 2 + half)
    b = on_circle(np.pi / 2 + half - th_ab)
    c = on_circle(np.pi / 2 - half)
    d = np.array([-b[0], b[1], 0.0])
    quad = PlanarQuad(a, b, c, d, np.zeros(3), float(r))
    bad = check_conditions(quad)
    if bad:
        raise BricardError(f"linkage at r={r} violates " + "; ".join(bad))
    return quad


def octahedron_surface():
    return build_surface(_FACES, order=OCTA_LABELS)


def _apex_heights(cfg: BricardConfig, r: float, s: float) -> tuple[float, float]:
    if r > s:
        raise BricardError(f"r={r} exceeds s={s}; apex p would not be real")
    if r > cfg.t:
        raise BricardError(f"r={r} exceeds t={cfg.t}; apex q would not be real")
    return float(np.sqrt(s**2 - r**2)), float(np.sqrt(cfg.t**2 - r**2))


def build_bricard(cfg: BricardConfig, r: float, s_apex: float | None = None) -> EmbeddedPolyhedron:
    """B(r), oriented so that its interior dihedral sector at edge aq is alpha(r) < pi.

    ``s_apex`` replaces s as the length of the four p-edges (the lifted apex of P_n).
    """
    quad = build_planar_quad(cfg, r)
    hp, hq = _apex_heights(cfg, r, cfg.s if s_apex is None else s_apex)
    p = quad.O + np.array([0.0, 0.0, hp])
    q = quad.O - np.array([0.0, 0.0, hq])
    coords = np.array([quad.a, quad.b, quad.c, quad.d, p, q])
    P = EmbeddedPolyhedron(octahedron_surface(), coords)
    i_a, i_q = 0, 5
    if edge_sectors(P)[(i_a, i_q)] > np.pi:
        P = P.flipped()
    return P


def alpha_of(P: EmbeddedPolyhedron, labels=("a", "b", "d", "q")) -> float:
    """Dihedral at edge aq between the half-planes through b and d."""
    a, b, d, q = (P[x] for x in labels)
    return dihedral(a, q, b, d).angle


def beta_of(P: EmbeddedPolyhedron, labels=("d", "a", "c", "q")) -> float:
    """Dihedral at edge dq between the half-planes through a and c."""
    d, a, c, q = (P[x] for x in labels)
    return dihedral(d, q, a, c).angle


@dataclass(frozen=True)
class FlexInterval:
    s: float
    epsilon: float
    step: float

    @property
    def left(self) -> float:
        return self.s - self.epsilon

    def contains(self, r: float, slack: float = 0.0) -> bool:
        return self.left < r <= self.s + slack

    def samples(self, n: int = 101) -> np.ndarray:
        """``n`` increasing values of r in (s - epsilon, s], ending at s."""
        if n < 1:
            raise BricardError("need at least one sample")
        return np.linspace(self.left, self.s, n + 1)[1:]


def _usable(cfg: BricardConfig, r: float) -> bool:
    try:
        build_bricard(cfg, r)
    except (BricardError, GeometryError):
        return False
    return True


def flex_interval(cfg: BricardConfig, step: float | None = None, max_width: float | None = None) -> FlexInterval:
    """Scan r downward from s until the linkage conditions or nondegeneracy fail."""
    step = 1e-3 * cfg.s if step is None else step
    if not _usable(cfg, cfg.s):
        raise BricardError("configuration unusable at r = s")
    limit = cfg.s if max_width is None else min(cfg.s, max_width)
    j = 1
    while j * step < limit and _usable(cfg, cfg.s - j * step):
        j += 1
    # open at the last usable scan point: samples never fall past it
    eps = limit if j * step >= limit else (j - 1) * step
    if eps <= 0:
        raise BricardError("flex interval is empty at the scan resolution")
    return FlexInterval(s=cfg.s, epsilon=float(eps), step=float(step))


def _check_in_interval(cfg, r, interval):
    if interval is not None and not interval.contains(r):
        raise BricardError(f"r={r} outside the flex interval ({interval.left}, {interval.s}]")


def alpha(cfg: BricardConfig, r: float, interval: FlexInterval | None = None) -> float:
    _check_in_interval(cfg, r, interval)
    return alpha_of(build_bricard(cfg, r))


def beta(cfg: BricardConfig, r: float, interval: FlexInterval | None = None) -> float:
    _check_in_interval(cfg, r, interval)
    return beta_of(build_bricard(cfg, r))


def flex_path_B(cfg: BricardConfig, interval: FlexInterval, n_samples: int = 101) -> FlexPath:
    rs = interval.samples(n_samples)
    polys = [build_bricard(cfg, r) for r in rs]
    return FlexPath(
        surface=polys[0].surface,
        params=rs,
        configs=[P.coords for P in polys],
        label="r",
        meta={"family": "B"},
    )
