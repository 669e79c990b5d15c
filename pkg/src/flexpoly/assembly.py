"""Blistered octahedron C(r), the shrunken rotated copy B'(s), and the polyhedra P, P_n.

Vertex enumeration of P (0-based here, 1-based in files)::

    a b c d p q | m n y x u v | a' b' c' d' p' q'

The two tetrahedral blisters mnxy and mnuv are kept rigid by storing their
vertices in a frame attached to the host faces abq and adq and replaying the
frame for every r.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bricard import (
    OCTA_LABELS,
    BricardConfig,
    BricardError,
    FlexInterval,
    alpha_of,
    build_bricard,
    flex_interval,
)
from .geometry import (
    EmbeddedPolyhedron,
    GeometryError,
    apply_affine,
    circumcircle,
    dihedral,
    half_plane_angle,
    half_plane_side,
    homothety,
    point_in_triangle,
    rotation_about_line,
    signed_volume,
)
from .path import FlexPath
from .surface import (
    SimplicialSurface,
    build_surface,
    glue_complexes,
    orient_consistently,
    remove_faces,
    reorder,
    retriangulate_fan,
    validate_closed_sphere,
)

AUX_LABELS = ("m", "n", "y", "x", "u", "v")
PRIMED = tuple(lab + "'" for lab in OCTA_LABELS)
C_ORDER = OCTA_LABELS + AUX_LABELS
P_ORDER = C_ORDER + PRIMED
TWO_PI = 2.0 * np.pi


class AssemblyError(ValueError):
    pass


class ContainmentError(AssemblyError):
    """B'(s) does not sit inside the cut faces; the usual remedy is a smaller k."""


class SectorOverlapError(AssemblyError):
    pass


def _unit(v):
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class AuxPlacement:
    """Where the auxiliary points go on B(s).

    m, n sit at fractions ``t_m`` < ``t_n`` of the way from a to q. y and v
    are given by barycentric weights on (a, b, q) and (a, d, q). x and u are
    given as (fraction along aq of the foot point, distance from line aq),
    x in plane adq away from d, u in plane abq away from b. ``k`` is the
    homothety factor for B'(s); ``None`` picks it automatically.
    """

    t_m: float = 0.40
    t_n: float = 0.60
    bary_y: tuple = (0.2, 0.2, 0.6)
    bary_v: tuple = (0.2, 0.2, 0.6)
    off_x: tuple = (0.5, 0.4)
    off_u: tuple = (0.5, 0.4)
    k: float | None = None

    def __post_init__(self):
        if not 0.0 < self.t_m < self.t_n < 1.0:
            raise AssemblyError(f"need 0 < t_m < t_n < 1 (m, n interior to aq), got {self.t_m}, {self.t_n}")
        for name in ("bary_y", "bary_v"):
            w = np.asarray(getattr(self, name), dtype=float)
            if w.shape != (3,) or np.any(w <= 0) or not np.isclose(w.sum(), 1.0):
                raise AssemblyError(f"{name} must be three positive weights summing to 1 (strictly interior), got {tuple(w)}")
        for name in ("off_x", "off_u"):
            f, dist = getattr(self, name)
            if not dist > 0:
                raise AssemblyError(f"{name} needs a positive distance from line aq")
        if self.k is not None and not 0.0 < self.k < 1.0:
            raise AssemblyError(f"k must lie in (0, 1), got {self.k}")


@dataclass(frozen=True)
class AuxPoints:
    m: np.ndarray
    n: np.ndarray
    y: np.ndarray
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def as_dict(self):
        return {lab: getattr(self, lab) for lab in AUX_LABELS}


def _off_line(a, q, away_from, foot_t, dist):
    foot = a + foot_t * (q - a)
    e = _unit(q - a)
    h = away_from - a
    h = _unit(h - (h @ e) * e)
    return foot - dist * h


def place_aux(B_s: EmbeddedPolyhedron, aux: AuxPlacement) -> AuxPoints:
    a, b, d, q = (B_s[lab] for lab in ("a", "b", "d", "q"))
    m = a + aux.t_m * (q - a)
    n = a + aux.t_n * (q - a)
    wy, wv = np.asarray(aux.bary_y), np.asarray(aux.bary_v)
    y = wy[0] * a + wy[1] * b + wy[2] * q
    v = wv[0] * a + wv[1] * d + wv[2] * q
    x = _off_line(a, q, d, *aux.off_x)
    u = _off_line(a, q, b, *aux.off_u)
    pts = AuxPoints(m=m, n=n, y=y, x=x, u=u, v=v, w=0.5 * (m + n))

    problems = []
    if not point_in_triangle(y, (a, b, q)):
        problems.append("y is not strictly inside face abq")
    if not point_in_triangle(v, (a, d, q)):
        problems.append("v is not strictly inside face adq")
    if half_plane_side(a, q, d, x) != "opposite":
        problems.append("x is not on the non-d side of line aq in plane adq")
    if half_plane_side(a, q, b, u) != "opposite":
        problems.append("u is not on the non-b side of line aq in plane abq")
    if problems:
        raise AssemblyError("; ".join(problems))
    return pts


# ------------------------------------------------------------------- C(s)

def _host_frame(a, q, wing, origin):
    e1 = _unit(q - a)
    h = wing - a
    e2 = _unit(h - (h @ e1) * e1)
    return origin, np.column_stack([e1, e2, np.cross(e1, e2)])


@dataclass(frozen=True)
class BlisterFrame:
    """Rigid blisters mnxy (riding on face abq) and mnuv (riding on face adq)."""

    t_m: float
    local_abq: dict  # label -> coordinates in the abq frame
    local_adq: dict
    edge_sq: dict = field(default_factory=dict)  # tetra -> 6 squared distances at r = s

    def place(self, B_r: EmbeddedPolyhedron) -> dict:
        a, b, d, q = (B_r[lab] for lab in ("a", "b", "d", "q"))
        m = a + self.t_m * (q - a)
        out = {}
        for local, wing in ((self.local_abq, b), (self.local_adq, d)):
            origin, R = _host_frame(a, q, wing, m)
            for lab, L in local.items():
                out[lab] = origin + R @ L
        return out


def _tetra_sq(pts):
    labs = sorted(pts)
    return {(i, j): float(np.sum((pts[i] - pts[j]) ** 2)) for k, i in enumerate(labs) for j in labs[k + 1:]}


def c_surface() -> SimplicialSurface:
    """Combinatorics of C: B with both hexagon fans and both blister caps."""
    from .bricard import octahedron_surface

    S = octahedron_surface()
    S = retriangulate_fan(S, ("a", "b", "q"), "y", ["a", "b", "q", "n", "y", "m"])
    S = retriangulate_fan(S, ("a", "d", "q"), "v", ["a", "d", "q", "n", "v", "m"])
    caps = orient_consistently(build_surface([
        ("m", "n", "x"), ("m", "x", "y"), ("n", "y", "x"),
        ("m", "u", "n"), ("m", "v", "u"), ("n", "u", "v"),
    ]))
    return reorder(glue_complexes(S, caps), C_ORDER)


def build_C(B_s: EmbeddedPolyhedron, aux: AuxPlacement) -> tuple[EmbeddedPolyhedron, BlisterFrame]:
    pts = place_aux(B_s, aux)
    S = c_surface()
    named = {lab: B_s[lab] for lab in OCTA_LABELS} | pts.as_dict()
    C = EmbeddedPolyhedron(S, np.array([named[lab] for lab in S.labels]))
    rep = validate_closed_sphere(S)
    if not rep.passes:
        raise AssemblyError("C(s) is not a closed sphere: " + "; ".join(rep.failures()))
    if signed_volume(C) < 0:
        C = C.flipped()

    a, b, d, q = (B_s[lab] for lab in ("a", "b", "d", "q"))
    o1, R1 = _host_frame(a, q, b, pts.m)
    o2, R2 = _host_frame(a, q, d, pts.m)
    local_abq = {lab: R1.T @ (named[lab] - o1) for lab in ("n", "x", "y")}
    local_adq = {lab: R2.T @ (named[lab] - o2) for lab in ("u", "v")}
    frame = BlisterFrame(
        t_m=aux.t_m,
        local_abq=local_abq,
        local_adq=local_adq,
        edge_sq={
            "mnxy": _tetra_sq({lab: named[lab] for lab in "mnxy"}),
            "mnuv": _tetra_sq({lab: named[lab] for lab in "mnuv"}),
        },
    )
    return C, frame


def transport_C(C_s: EmbeddedPolyhedron, blisters: BlisterFrame, cfg: BricardConfig, r: float,
                interval: FlexInterval | None = None, s_apex: float | None = None) -> EmbeddedPolyhedron:
    """C(r): octahedral vertices as in B(r), blisters carried by their host faces."""
    if interval is not None and not interval.contains(r):
        raise AssemblyError(f"r={r} outside the flex interval ({interval.left}, {interval.s}]")
    B_r = build_bricard(cfg, r, s_apex)
    named = {lab: B_r[lab] for lab in OCTA_LABELS} | blisters.place(B_r)
    a, q = B_r["a"], B_r["q"]
    named["m"] = a + blisters.t_m * (q - a)
    return C_s.with_coords([named[lab] for lab in C_s.labels])


def gamma_of(C: EmbeddedPolyhedron) -> float:
    """Dihedral of the tetrahedron mnux at edge mn."""
    return dihedral(C["m"], C["n"], C["u"], C["x"]).angle


def flex_path_C(C_s, blisters, cfg, interval: FlexInterval, n_samples: int = 101) -> FlexPath:
    rs = interval.samples(n_samples)
    configs = [transport_C(C_s, blisters, cfg, r).coords for r in rs]
    return FlexPath(C_s.surface, rs, configs, label="r", meta={"family": "C"})


# ------------------------------------------------------------------ B'(s)

def _transform(pts: AuxPoints, k: float) -> np.ndarray:
    return rotation_about_line(pts.m, pts.n - pts.m, np.pi) @ homothety(pts.w, k)


def build_B_prime(B_s: EmbeddedPolyhedron, pts: AuxPoints, k: float, check: bool = True) -> EmbeddedPolyhedron:
    """Image of B(s) under the homothety about w by k followed by the half-turn about mn."""
    coords = apply_affine(_transform(pts, k), B_s.coords)
    S = B_s.surface
    primed = SimplicialSurface(tuple(lab + "'" for lab in S.labels), S.faces)
    Bp = EmbeddedPolyhedron(primed, coords)
    if check:
        bad = containment_failures(Bp, pts)
        if bad:
            raise ContainmentError(f"k={k}: " + "; ".join(bad) + " -- diminish k")
    return Bp


def containment_failures(Bp: EmbeddedPolyhedron, pts: AuxPoints) -> list[str]:
    ap, bp, dp, qp = (Bp[lab] for lab in ("a'", "b'", "d'", "q'"))
    m, n, w = pts.m, pts.n, pts.w
    e = n - m
    L2 = e @ e
    bad = []
    ta, tw, tq = ((ap - m) @ e / L2, (w - m) @ e / L2, (qp - m) @ e / L2)
    off = max(np.linalg.norm(ap - m - ta * e), np.linalg.norm(qp - m - tq * e))
    if off > 1e-9 * np.sqrt(L2) or not 0.0 < ta < tw < tq < 1.0:
        bad.append("h_k(aq) is not inside segment mn")
    try:
        if not point_in_triangle(dp, (m, n, pts.x)):
            bad.append("d' is not inside face mnx")
        if not point_in_triangle(bp, (m, n, pts.u)):
            bad.append("b' is not inside face mnu")
        if not point_in_triangle(bp, (pts.u, ap, qp)):
            bad.append("cut region of mnu is not star-shaped from u")
        if not point_in_triangle(dp, (pts.x, ap, qp)):
            bad.append("cut region of mnx is not star-shaped from x")
    except GeometryError as exc:
        bad.append(str(exc))
    return bad


def choose_k(B_s: EmbeddedPolyhedron, pts: AuxPoints, start: float = 0.5, floor: float = 1e-6) -> float:
    """Halve k from ``start`` until every containment holds, then halve once more."""
    k = start
    while containment_failures(build_B_prime(B_s, pts, k, check=False), pts):
        k *= 0.5
        if k < floor:
            raise ContainmentError("no admissible k found; check the auxiliary placement")
    return 0.5 * k


# ---------------------------------------------------------------------- P

def p_surface(C_surface: SimplicialSurface, Bp_surface: SimplicialSurface) -> SimplicialSurface:
    S = retriangulate_fan(C_surface, ("m", "n", "u"), "u", ["u", "m", "a'", "b'", "q'", "n"])
    S = retriangulate_fan(S, ("m", "n", "x"), "x", ["x", "m", "a'", "d'", "q'", "n"])
    cap = remove_faces(Bp_surface, [("a'", "b'", "q'"), ("a'", "d'", "q'")])
    return reorder(glue_complexes(S, cap), P_ORDER)


@dataclass(frozen=True)
class SectorData:
    sectors: dict  # "i".."iv" -> radians
    total: float
    gaps: dict  # shared boundary half-plane -> angular mismatch

    @property
    def max_gap(self) -> float:
        return max(self.gaps.values())

    def partition_ok(self, tol: float = 1e-9) -> bool:
        return self.max_gap <= tol and abs(self.total - TWO_PI) <= tol


def sector_data(Q: EmbeddedPolyhedron) -> SectorData:
    """The four dihedral sectors around line mn at w.

    (i) tetrahedron mnxy, (ii) B' at a'q', (iii) tetrahedron mnuv, (iv) B at aq,
    each measured counterclockwise in the sense that makes (iv) the
    octahedron's interior wedge. ``gaps`` measures how far consecutive sectors
    are from sharing their boundary half-planes.
    """
    get = Q.__getitem__
    m, n = get("m"), get("n")
    e = n - m
    ref = get("b")

    def ang(p0, p1, wing):
        return half_plane_angle(p0, p1 - p0 if (p1 - p0) @ e > 0 else p0 - p1, ref, wing)

    th = {
        "b": ang(get("a"), get("q"), get("b")),
        "d": ang(get("a"), get("q"), get("d")),
        "v": ang(m, n, get("v")),
        "u": ang(m, n, get("u")),
        "b'": ang(get("a'"), get("q'"), get("b'")),
        "d'": ang(get("a'"), get("q'"), get("d'")),
        "x": ang(m, n, get("x")),
        "y": ang(m, n, get("y")),
    }
    if (th["d"] - th["b"]) % TWO_PI > np.pi:
        th = {k: (-v) % TWO_PI for k, v in th.items()}

    def ccw(p, q):
        return (th[q] - th[p]) % TWO_PI

    def gap(p, q):
        g = (th[q] - th[p]) % TWO_PI
        return min(g, TWO_PI - g)

    sectors = {"i": ccw("x", "y"), "ii": ccw("b'", "d'"), "iii": ccw("v", "u"), "iv": ccw("b", "d")}
    gaps = {"d|v": gap("d", "v"), "u|b'": gap("u", "b'"), "d'|x": gap("d'", "x"), "y|b": gap("y", "b")}
    return SectorData(sectors=sectors, total=float(sum(sectors.values())), gaps=gaps)


def build_P(C_s: EmbeddedPolyhedron, Bp: EmbeddedPolyhedron, tol: float = 1e-9) -> EmbeddedPolyhedron:
    S = p_surface(C_s.surface, Bp.surface)
    named = {lab: C_s[lab] for lab in C_s.labels} | {lab: Bp[lab] for lab in Bp.labels}
    P = EmbeddedPolyhedron(S, np.array([named[lab] for lab in S.labels]))
    rep = validate_closed_sphere(S)
    if not rep.passes:
        raise AssemblyError("P is not a closed sphere: " + "; ".join(rep.failures()))
    if signed_volume(P) < 0:
        P = P.flipped()
    sd = sector_data(P)
    if not sd.partition_ok(tol):
        raise SectorOverlapError(
            f"sectors at w do not partition the circle (sum {sd.total:.12f}, gaps {sd.gaps})"
        )
    return P


def pn_height(s: float, n: int) -> float:
    """Height of p_n over the base plane: sqrt((s + 1/n)^2 - s^2) without cancellation."""
    return float(np.sqrt(2.0 * s / n + 1.0 / n**2))


def build_Pn(P: EmbeddedPolyhedron, n: int, cfg: BricardConfig) -> EmbeddedPolyhedron:
    """P with vertex p lifted off the base plane so that its four edges have length s + 1/n."""
    if int(n) != n or n < 1:
        raise AssemblyError(f"n must be a positive integer, got {n}")
    a, b, c = P["a"], P["b"], P["c"]
    O, _ = circumcircle(a, b, c)
    normal = _unit(np.cross(b - a, c - a))
    if normal[2] < 0:
        normal = -normal
    coords = P.coords.copy()
    ip = P.surface.index("p")
    coords[ip] = O + pn_height(cfg.s, n) * normal
    labels = tuple("p_n" if lab == "p" else lab for lab in P.labels)
    return EmbeddedPolyhedron(SimplicialSurface(labels, P.surface.faces), coords)


def apex(Q: EmbeddedPolyhedron) -> str:
    return "p_n" if Q.surface.has_vertex("p_n") else "p"


# ----------------------------------------------------------------- bundle

@dataclass(frozen=True)
class Construction:
    cfg: BricardConfig
    aux: AuxPlacement
    interval: FlexInterval
    B_s: EmbeddedPolyhedron
    points: AuxPoints
    C_s: EmbeddedPolyhedron
    blisters: BlisterFrame
    k: float
    B_prime: EmbeddedPolyhedron
    P: EmbeddedPolyhedron

    def Pn(self, n: int) -> EmbeddedPolyhedron:
        return build_Pn(self.P, n, self.cfg)

    def C(self, r: float) -> EmbeddedPolyhedron:
        return transport_C(self.C_s, self.blisters, self.cfg, r, self.interval)

    def B(self, r: float) -> EmbeddedPolyhedron:
        return build_bricard(self.cfg, r)


def construct(cfg: BricardConfig = BricardConfig(), aux: AuxPlacement = AuxPlacement(),
              interval: FlexInterval | None = None) -> Construction:
    try:
        B_s = build_bricard(cfg, cfg.s)
    except BricardError as exc:
        raise AssemblyError(str(exc)) from exc
    interval = flex_interval(cfg) if interval is None else interval
    C_s, blisters = build_C(B_s, aux)
    pts = place_aux(B_s, aux)
    k = choose_k(B_s, pts) if aux.k is None else aux.k
    Bp = build_B_prime(B_s, pts, k)
    P = build_P(C_s, Bp)
    return Construction(cfg, aux, interval, B_s, pts, C_s, blisters, k, Bp, P)


# ------------------------------------------------------------- flex of P_n

def _frame(a, q, wing):
    e1 = _unit(q - a)
    h = wing - a
    e2 = _unit(h - (h @ e1) * e1)
    return np.column_stack([e1, e2, np.cross(e1, e2)])


def _alpha_beyond(cfg: BricardConfig, r: float) -> float:
    # alpha does not depend on the apex p, so any admissible apex edge will do
    return alpha_of(build_bricard(cfg, r, max(r, cfg.s)))


def _sector_partner(cfg: BricardConfig, s_n: float, target: float) -> float:
    """r in [s, s_n] with alpha(r) = target (alpha decreases in r there)."""
    from scipy.optimize import brentq

    hi = min(s_n, cfg.t) * (1 - 1e-12)
    lo_val, hi_val = _alpha_beyond(cfg, cfg.s) - target, _alpha_beyond(cfg, hi) - target
    if lo_val * hi_val > 0:
        raise AssemblyError("sector (iv) cannot close the circle: r would leave [s, s + 1/n]")
    return float(brentq(lambda r: _alpha_beyond(cfg, r) - target, cfg.s, hi, xtol=1e-15, rtol=1e-15))


def pn_zeta_limit(con: Construction, n: int) -> float:
    """Largest apex height of B' for which the octahedron B can still close the sectors."""
    from scipy.optimize import brentq

    cfg = con.cfg
    hi = min(cfg.s + 1.0 / n, cfg.t) * (1 - 1e-12)
    budget = 2 * alpha_of(con.B_s) - _alpha_beyond(cfg, hi)
    lo = con.interval.left + con.interval.step

    def g(rho):
        return alpha_of(build_bricard(cfg, rho)) - budget

    rho = brentq(g, lo, cfg.s) if g(lo) > 0 else lo
    return float(con.k * np.sqrt(cfg.s**2 - rho**2))


def pn_configuration(con: Construction, n: int, zeta: float) -> EmbeddedPolyhedron:
    """P_n flexed so that p' sits at signed height ``zeta`` over the base plane of B'."""
    cfg, k = con.cfg, con.k
    s_n = cfg.s + 1.0 / n
    rho = float(np.sqrt(cfg.s**2 - (zeta / k) ** 2))
    B1 = build_bricard(cfg, rho)
    if zeta < 0:
        B1 = B1.replace(p=B1["p"] * np.array([1.0, 1.0, -1.0]))
    r = cfg.s if zeta == 0 else _sector_partner(cfg, s_n, 2 * alpha_of(con.B_s) - alpha_of(B1))
    C = transport_C(con.C_s, con.blisters, cfg, r, s_apex=s_n)
    named = {lab: C[lab] for lab in C.labels}
    m, n_pt = named["m"], named["n"]
    e = _unit(n_pt - m)
    P = con.P
    a_new = m + np.linalg.norm(P["a'"] - P["m"]) * e
    q_new = a_new + k * cfg.t * e
    R_t = _frame(a_new, q_new, named["u"])
    R_c = _frame(B1["a"], B1["q"], B1["b"])
    for lab in OCTA_LABELS:
        named[lab + "'"] = a_new + k * (R_t @ (R_c.T @ (B1[lab] - B1["a"])))
    labels = tuple("p" if lab == "p_n" else lab for lab in P.labels)
    coords = np.array([named[lab] for lab in labels])
    return build_Pn(P, n, cfg).with_coords(coords)


def flex_path_Pn(con: Construction, n: int, n_samples: int = 201, span: float = 0.9) -> FlexPath:
    """Closed-form flex of P_n: B' driven by its apex height, B closing the sectors around mn."""
    zmax = span * pn_zeta_limit(con, n)
    zetas = np.linspace(0.0, zmax, n_samples)
    configs = [pn_configuration(con, n, z).coords for z in zetas]
    return FlexPath(build_Pn(con.P, n, con.cfg).surface, zetas, configs, label="zeta", meta={"family": f"P_{n}"})
