"""Edge-length constraints: rigidity matrix, infinitesimal flexes, continuation, certificates.

Configurations are handled as flat vectors x = phi(Q) with vertex i in slots
3i, 3i+1, 3i+2. Rigid motions are removed by pinning six coordinates: one
vertex fully, a second one in two coordinates and a third in one.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .bricard import BricardConfig, BricardError, alpha_of, build_bricard, flex_interval
from .geometry import (
    EmbeddedPolyhedron,
    GeometryError,
    circumcircle,
    dihedral,
    edge_sectors,
    integral_mean_curvature,
    labeled_congruent,
    signed_volume,
)
from .path import FlexPath

RANK_RTOL = 1e-8
OBSTRUCTION_EXPONENT = 1.8


class RigidityError(ValueError):
    pass


def phi(Q: EmbeddedPolyhedron) -> np.ndarray:
    return Q.coords.ravel().copy()


def unflatten(x, n_vertices: int | None = None) -> np.ndarray:
    x = np.asarray(x)
    if n_vertices is not None and x.size != 3 * n_vertices:
        raise RigidityError(f"expected {3 * n_vertices} coordinates, got {x.size}")
    return x.reshape(-1, 3)


# ------------------------------------------------------------ constraints

def rigidity_matrix(coords, edges) -> np.ndarray:
    X = np.asarray(coords, dtype=float).reshape(-1, 3)
    E = np.asarray(edges, dtype=int).reshape(-1, 2)
    R = np.zeros((len(E), X.size))
    d = X[E[:, 0]] - X[E[:, 1]]
    rows = np.arange(len(E))
    for c in range(3):
        R[rows, 3 * E[:, 0] + c] = 2 * d[:, c]
        R[rows, 3 * E[:, 1] + c] = -2 * d[:, c]
    return R


def rigid_motion_basis(coords) -> np.ndarray:
    """Orthonormal columns spanning translations and linearized rotations."""
    X = np.asarray(coords, dtype=float).reshape(-1, 3)
    c = X - X.mean(axis=0)
    cols = []
    for k in range(3):
        t = np.zeros_like(X)
        t[:, k] = 1.0
        cols.append(t.ravel())
    for k in range(3):
        w = np.zeros(3)
        w[k] = 1.0
        cols.append(np.cross(w, c).ravel())
    U, S, _ = np.linalg.svd(np.array(cols).T, full_matrices=False)
    return U[:, S > 1e-12 * S[0]]


def _pin_pattern(X, triple):
    i, j, k = triple
    e = X[j] - X[i]
    nrm = np.cross(e, X[k] - X[i])
    if np.linalg.norm(nrm) <= 1e-12 * np.linalg.norm(e) ** 2:
        raise RigidityError("pinned vertices must not be collinear")
    big = int(np.argmax(np.abs(e)))
    return [3 * i, 3 * i + 1, 3 * i + 2] + [3 * j + c for c in range(3) if c != big] + [3 * k + int(np.argmax(np.abs(nrm)))]


@dataclass(frozen=True)
class ConstraintSystem:
    """Squared edge lengths to preserve plus a six-coordinate pin."""

    n_vertices: int
    edges: np.ndarray
    targets: np.ndarray
    pinned: tuple
    labels: tuple = ()

    @classmethod
    def from_polyhedron(cls, Q: EmbeddedPolyhedron, pin=None, drop=()) -> "ConstraintSystem":
        S = Q.surface
        dropped = {tuple(sorted((S.index(a), S.index(b)))) for a, b in drop}
        missing = dropped - set(S.edges)
        if missing:
            raise RigidityError(f"cannot drop non-edges {sorted(missing)}")
        edges = np.array([e for e in S.edges if e not in dropped], dtype=int)
        X = Q.coords
        targets = np.sum((X[edges[:, 0]] - X[edges[:, 1]]) ** 2, axis=1)
        if pin is None:
            triple = _default_pin(X)
        else:
            triple = tuple(S.index(p) if isinstance(p, str) else int(p) for p in pin)
        return cls(S.n_vertices, edges, targets, tuple(_pin_pattern(X, triple)), S.labels)

    @property
    def free(self) -> np.ndarray:
        return np.setdiff1d(np.arange(3 * self.n_vertices), self.pinned)

    def residual(self, x) -> np.ndarray:
        X = np.asarray(x).reshape(-1, 3)
        d = X[self.edges[:, 0]] - X[self.edges[:, 1]]
        return np.sum(d * d, axis=1) - self.targets.astype(X.dtype)

    def jacobian(self, x) -> np.ndarray:
        return rigidity_matrix(np.asarray(x, dtype=float), self.edges)

    def gauge(self, direction, x) -> np.ndarray:
        """Subtract the rigid motion that makes the pinned components of ``direction`` vanish."""
        Qb = rigid_motion_basis(x)
        c = np.linalg.solve(Qb[list(self.pinned)], np.asarray(direction)[list(self.pinned)])
        out = direction - Qb @ c
        out[list(self.pinned)] = 0.0
        return out


def _default_pin(X):
    n = len(X)
    for k in range(2, n):
        if np.linalg.norm(np.cross(X[1] - X[0], X[k] - X[0])) > 1e-6 * np.linalg.norm(X[1] - X[0]) ** 2:
            return (0, 1, k)
    raise RigidityError("all vertices collinear")


# -------------------------------------------------------- flex space (SVD)

@dataclass(frozen=True)
class FlexSpace:
    rank: int
    dim: int
    basis: np.ndarray  # (dim, 3v), orthonormal, orthogonal to rigid motions
    singular_values: np.ndarray
    warnings: tuple = ()


def flex_space(Q, system: ConstraintSystem | None = None, tol: float = RANK_RTOL) -> FlexSpace:
    X = Q.coords if isinstance(Q, EmbeddedPolyhedron) else np.asarray(Q, dtype=float).reshape(-1, 3)
    edges = system.edges if system is not None else np.array(Q.surface.edges)
    R = rigidity_matrix(X, edges)
    _, S, Vt = np.linalg.svd(R)
    thr = tol * S[0]
    rank = int(np.sum(S > thr))
    notes = tuple(
        f"singular value {s:.3e} within a factor 10 of the rank threshold {thr:.3e}"
        for s in S if thr / 10 < s <= thr * 10
    )
    for msg in notes:
        warnings.warn(msg, stacklevel=2)
    kernel = Vt[rank:].T
    Qb = rigid_motion_basis(X)
    K = kernel - Qb @ (Qb.T @ kernel)
    U, s, _ = np.linalg.svd(K, full_matrices=False)
    dim = X.size - 6 - rank
    basis = U[:, :dim].T if dim > 0 else np.zeros((0, X.size))
    if dim > 0 and s[dim - 1] < 0.5:
        raise RigidityError("kernel does not contain the rigid motions; configuration degenerate")
    return FlexSpace(rank, dim, basis, S, notes)


# ------------------------------------------------------------- corrector

def correct(system: ConstraintSystem, x0, tangent=None, tol: float = 1e-11, max_iter: int = 50,
            extended: bool = False) -> tuple[np.ndarray, float, int]:
    """Damped Gauss-Newton (Levenberg) on squared-length residuals over the free coordinates.

    With ``tangent`` the update stays orthogonal to it, i.e. on the
    pseudo-arclength hyperplane through ``x0``. With ``extended`` the iterate
    and residuals are kept in long double, the Jacobian in double.
    Returns (x, max |residual|, iterations).
    """
    dtype = np.longdouble if extended else float
    x = np.array(x0, dtype=dtype)
    free = system.free
    tf = None if tangent is None else np.asarray(tangent, dtype=float)[free]
    if tf is not None:
        tf = tf / np.linalg.norm(tf)

    def full_res(x):
        r = system.residual(x)
        return r if tf is None else np.append(r, 0.0)

    r = full_res(x)
    cost = float(np.sum(r.astype(float) ** 2))
    mu = None
    it = 0
    for it in range(1, max_iter + 1):
        if float(np.max(np.abs(r))) < tol:
            return x, float(np.max(np.abs(r))), it - 1
        A = system.jacobian(x)[:, free]
        if tf is not None:
            A = np.vstack([A, tf])
        H = A.T @ A
        g = A.T @ r.astype(float)
        if mu is None:
            mu = 1e-9 * float(np.max(np.diag(H)))
        for _ in range(30):
            dx = np.linalg.solve(H + mu * np.eye(len(free)), -g)
            if tf is not None:
                dx -= (dx @ tf) * tf
            xt = x.copy()
            xt[free] += dx.astype(dtype)
            rt = full_res(xt)
            ct = float(np.sum(rt.astype(float) ** 2))
            if ct < cost or ct == 0.0:
                x, r, cost = xt, rt, ct
                mu = max(mu / 3.0, 1e-15 * float(np.max(np.diag(H))))
                break
            mu *= 4.0
        else:
            break
    return x, float(np.max(np.abs(r))), it


# ---------------------------------------------------------- continuation

@dataclass(frozen=True)
class Obstruction:
    """The corrector stalls at a positive residual that shrinks like h^p."""

    direction: int
    hs: tuple
    floors: tuple
    exponent: float

    @property
    def obstructed(self) -> bool:
        return all(f > 0 for f in self.floors) and self.exponent >= OBSTRUCTION_EXPONENT

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "h": list(self.hs),
            "floor": list(self.floors),
            "exponent": self.exponent,
            "obstructed": self.obstructed,
        }


def residual_floor(system, x, t, h, max_iter: int = 1000) -> float:
    """Residual at which least squares stalls on the slice through x + h t.

    The slice is orthogonal to t and to the rigid motions at x, so the value
    does not depend on the pinned frame. Runs in long double: at the
    singular configurations of interest the floors drop below
    double-precision resolution of the squared lengths.
    """
    x = np.asarray(x, dtype=float)
    Qb = rigid_motion_basis(x)
    t = np.asarray(t, dtype=float)
    t = t - Qb @ (Qb.T @ t)
    t /= np.linalg.norm(t)
    M = np.column_stack([Qb, t])
    N = np.linalg.svd(M, full_matrices=True)[0][:, M.shape[1]:]
    y = (x + h * t).astype(np.longdouble)
    r = system.residual(y)
    cost = float(np.sum(r.astype(float) ** 2))
    mu = None
    for _ in range(max_iter):
        A = system.jacobian(y) @ N
        H = A.T @ A
        g = A.T @ r.astype(float)
        if mu is None:
            mu = 1e-9 * float(np.max(np.diag(H)))
        for _ in range(30):
            yt = y + (N @ np.linalg.solve(H + mu * np.eye(len(H)), -g)).astype(np.longdouble)
            rt = system.residual(yt)
            ct = float(np.sum(rt.astype(float) ** 2))
            if ct < cost:
                y, r, cost = yt, rt, ct
                mu = max(mu / 3.0, 1e-15 * float(np.max(np.diag(H))))
                break
            mu *= 4.0
        else:
            break
    return float(np.max(np.abs(r)))


def obstruction(system, x, t, h, direction: int = 0, n_levels: int = 3) -> Obstruction:
    hs = tuple(h / 2**j for j in range(n_levels))
    floors = tuple(residual_floor(system, x, t, hh) for hh in hs)
    if min(floors) <= 0:
        p = 0.0
    else:
        p = float(np.polyfit(np.log(hs), np.log(floors), 1)[0])
    return Obstruction(direction, hs, floors, p)


def continue_flex(Q: EmbeddedPolyhedron, system: ConstraintSystem, direction, h: float = 1e-3,
                  max_steps: int = 200, tol: float = 1e-11, max_iter: int = 50,
                  direction_index: int = 0) -> FlexPath | Obstruction:
    """Predictor-corrector continuation starting along ``direction``.

    The first predictor uses ``direction`` (gauge-fixed to the pin), later ones
    the secant. A failing step is retried with h halved up to four times. If
    the very first step cannot be corrected the result is an Obstruction with
    residual floors at h, h/2, h/4; a later failure returns the partial path
    flagged ``complete = False``.
    """
    x = phi(Q)
    t = system.gauge(np.asarray(direction, dtype=float), x)
    if np.linalg.norm(t) == 0:
        raise RigidityError("direction is a rigid motion")
    t /= np.linalg.norm(t)
    configs, params = [x.reshape(-1, 3).copy()], [0.0]
    arclength = 0.0
    for step in range(max_steps):
        hh = h
        for _ in range(5):
            xn, res, _ = correct(system, x + hh * t, tangent=t, tol=tol, max_iter=max_iter)
            if res < tol:
                break
            hh /= 2
        else:
            if step == 0:
                return obstruction(system, x, t, h, direction_index)
            break
        dx = xn - x
        arclength += float(np.linalg.norm(dx))
        t = dx / np.linalg.norm(dx)
        x = xn
        configs.append(x.reshape(-1, 3).copy())
        params.append(arclength)
    return FlexPath(
        Q.surface, np.array(params), configs, label="arclength",
        meta={"complete": len(configs) == max_steps + 1, "h": h, "tol": tol},
    )


# --------------------------------------------------------------- checks

def bellows_check(path: FlexPath) -> tuple[float, float]:
    """Relative drift of signed volume and integral mean curvature along a path.

    Interior dihedral sectors are unwrapped along the path, since a folded
    edge sits at 0 = 2 pi. Drifts are normalized by max(|V0|, l^3) and
    max(|M0|, l) with l the mean edge length, so zero-volume families stay
    meaningful.
    """
    polys = path.polyhedra()
    vols = np.array([signed_volume(Q) for Q in polys])
    keys = list(path.surface.edges)
    theta = np.unwrap(np.array([[edge_sectors(Q)[e] for e in keys] for Q in polys]), axis=0)
    lengths = np.array([Q.edge_lengths() for Q in polys])
    mics = 0.5 * np.sum(lengths * (np.pi - theta), axis=1)
    ell = float(np.mean(lengths[0]))
    dv = float(np.max(np.abs(vols - vols[0])) / max(abs(vols[0]), ell**3))
    dm = float(np.max(np.abs(mics - mics[0])) / max(abs(mics[0]), ell))
    return dv, dm


def dihedral_table(path: FlexPath) -> np.ndarray:
    """Unsigned dihedral angle at every edge (columns) for every sample (rows)."""
    S = path.surface
    rows = []
    for X in path.configs:
        row = []
        for (i, j), fs in S.edge_faces.items():
            w = [next(v for v in S.faces[f] if v not in (i, j)) for f in fs]
            row.append(dihedral(X[i], X[j], X[w[0]], X[w[1]]).angle)
        rows.append(row)
    return np.array(rows)


def convergence_check(P: EmbeddedPolyhedron, ns, build) -> list[dict]:
    """Distances ||phi(P_n) - phi(P)|| for each n; ``build(n)`` returns P_n."""
    from .surface import combinatorially_equivalent

    x = phi(P)
    table = []
    for n in ns:
        Pn = build(n)
        if Pn.surface.n_vertices != P.surface.n_vertices:
            raise RigidityError("enumeration mismatch between P and P_n")
        pairing = {a: b for a, b in zip(P.labels, Pn.labels)}
        table.append({
            "n": int(n),
            "distance": float(np.linalg.norm(phi(Pn) - x)),
            "equivalent": bool(combinatorially_equivalent(P.surface, Pn.surface, pairing)),
        })
    return table


# ------------------------------------------------------------------ Lemma

OCTA = ("a", "b", "c", "d", "p", "q")


def ac_distance(cfg: BricardConfig, r: float) -> float:
    B = build_bricard(cfg, r)
    return float(np.linalg.norm(B["a"] - B["c"]))


def lemma_congruence_check(Q: EmbeddedPolyhedron, reference: EmbeddedPolyhedron, cfg: BricardConfig,
                           interval, tol: float | None = None, edge_tol: float = 1e-9) -> tuple[float, bool]:
    """Find r* with |ac|_Q = |ac|_B(r*) and test {a,b,c,d,p,q}_Q against B(r*).

    ``reference`` supplies the edge-length targets Q must meet within ``edge_tol``.
    ``tol`` defaults to 1e-8 times the diameter of Q.
    """
    if Q.labels != reference.labels:
        raise RigidityError("Q and the reference polyhedron use different enumerations")
    drift = float(np.max(np.abs(Q.edge_lengths() - reference.edge_lengths())))
    if drift > edge_tol:
        raise RigidityError(f"precondition violated: edge lengths differ from the reference by {drift:.3e}")
    tol = 1e-8 * Q.diameter() if tol is None else tol
    target = float(np.linalg.norm(Q["a"] - Q["c"]))
    lo = interval.left + 1e-9 * interval.s
    f_lo, f_hi = ac_distance(cfg, lo) - target, ac_distance(cfg, interval.s) - target
    if abs(f_hi) <= tol:
        r_star = interval.s
    elif f_lo * f_hi > 0:
        raise RigidityError(f"|ac| = {target} is not realized on the flex interval")
    else:
        r_star = float(brentq(lambda r: ac_distance(cfg, r) - target, lo, interval.s, xtol=1e-15, rtol=1e-15))
    B = build_bricard(cfg, r_star)
    ok = labeled_congruent(Q.points(OCTA), B.points(OCTA), tol)
    return r_star, ok


def project_perturbation(P: EmbeddedPolyhedron, system: ConstraintSystem, rng, radius: float,
                         tol: float = 1e-16, max_iter: int = 200) -> EmbeddedPolyhedron:
    """Perturb the free coordinates of P and pull back onto the edge-length constraints."""
    x = phi(P)
    free = system.free
    d = rng.standard_normal(len(free))
    x[free] += radius * d / np.linalg.norm(d)
    xn, res, _ = correct(system, x, tol=tol, max_iter=max_iter, extended=True)
    return P.with_coords(np.asarray(xn, dtype=float))


# ------------------------------------------------------------ certificates

@dataclass
class RigidityReport:
    rank: int
    flex_dim: int
    verdict: str
    sectors: dict = field(default_factory=dict)
    sector_sum: float | None = None
    residual_floors: list = field(default_factory=list)
    bellows: dict = field(default_factory=dict)
    convergence: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    path: FlexPath | None = None

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "flex_dim": self.flex_dim,
            "verdict": self.verdict,
            "sectors": dict(self.sectors),
            "sector_sum": self.sector_sum,
            "residual_floors": list(self.residual_floors),
            "bellows": dict(self.bellows),
            "convergence": list(self.convergence),
            "failures": list(self.failures),
            "details": dict(self.details),
        }


def _flex_ok(path: FlexPath, drift_tol, angle_tol, cong_tol):
    problems = []
    if not path.meta.get("complete", True):
        problems.append(f"continuation stopped after {len(path) - 1} steps")
    drift = path.edge_drift()
    if drift >= drift_tol:
        problems.append(f"edge drift {drift:.3e} >= {drift_tol}")
    D = dihedral_table(path)
    change = float(np.max(np.abs(D - D[0])))
    if change <= angle_tol:
        problems.append(f"largest dihedral change {change:.3e} <= {angle_tol}")
    pairs = path.congruent_pairs(cong_tol)
    if pairs:
        problems.append(f"{len(pairs)} pairs of labeled-congruent configurations")
    return problems, {"edge_drift": drift, "dihedral_change": change, "steps": len(path) - 1}


def path_residual(path: FlexPath, system: ConstraintSystem) -> float:
    """Largest squared-length residual of any sample against the system's targets."""
    return float(max(np.max(np.abs(system.residual(X.ravel()))) for X in path.configs))


def certify_flexible(Q: EmbeddedPolyhedron, system: ConstraintSystem | None = None, h: float = 1e-3,
                     max_steps: int = 200, drift_tol: float = 1e-9, angle_tol: float = 1e-3,
                     candidates=(), tol: float = 1e-11, bellows_tol: float = 1e-8) -> RigidityReport:
    """Look for a certified flex: any candidate paths first, then continuation along each flex direction.

    A candidate (e.g. a closed-form family) must start at Q and meet the
    edge-length targets within ``tol`` at every sample. Any path must also keep
    volume and mean curvature within ``bellows_tol``; continuation that creeps
    along a shallow valley of the residual fails there even when its edge
    drift is small.
    """
    system = ConstraintSystem.from_polyhedron(Q) if system is None else system
    fs = flex_space(Q, system)
    rep = RigidityReport(rank=fs.rank, flex_dim=fs.dim, verdict="inconclusive")
    cong_tol = 1e-8 * Q.diameter()

    def paths():
        for j, path in enumerate(candidates):
            if np.max(np.abs(path.configs[0] - Q.coords)) > 1e-9 * Q.diameter():
                rep.failures.append(f"candidate {j}: does not start at the configuration")
                continue
            res = path_residual(path, system)
            if res >= tol:
                rep.failures.append(f"candidate {j}: edge residual {res:.3e}")
                continue
            yield f"candidate {j}", path
        for i, v in enumerate(fs.basis):
            out = continue_flex(Q, system, v, h=h, max_steps=max_steps, tol=tol, direction_index=i)
            if isinstance(out, Obstruction):
                rep.residual_floors.append(out.to_dict())
                rep.failures.append(f"direction {i}: obstructed")
                continue
            yield f"direction {i}", out

    if fs.dim == 0 and not candidates:
        rep.failures.append("no nontrivial infinitesimal flex")
    for name, path in paths():
        problems, info = _flex_ok(path, drift_tol, angle_tol, cong_tol)
        rep.details[name] = info
        if problems:
            rep.failures.extend(f"{name}: {p}" for p in problems)
            continue
        dv, dm = bellows_check(path)
        info.update(volume_drift=dv, mic_drift=dm)
        if max(dv, dm) >= bellows_tol:
            rep.failures.append(f"{name}: volume/mean-curvature drift {max(dv, dm):.3e} >= {bellows_tol}")
            continue
        rep.bellows = {"volume_drift": dv, "mic_drift": dm}
        rep.verdict = "flexible"
        rep.details["source"] = name
        rep.path = path
        return rep
    return rep


def octahedron_family(Q: EmbeddedPolyhedron, labels) -> tuple[BricardConfig, float]:
    """Bricard parameters read off the current positions of a, b, c, d, p, q (in ``labels``)."""
    a, b, c, d, p, q = (Q[lab] for lab in labels)
    _, r = circumcircle(a, b, c)
    l_ab, l_bc = np.linalg.norm(a - b), np.linalg.norm(b - c)
    s_eff, t_eff = np.linalg.norm(a - p), np.linalg.norm(a - q)
    return BricardConfig(float(l_ab), float(l_bc), float(s_eff), float(t_eff), float(min(r, s_eff))), float(r)


def monotonicity_failures(Q: EmbeddedPolyhedron, labels, current_alpha: float, n_samples: int = 200,
                          tol: float = 1e-9) -> tuple[list[str], float | None]:
    """Check that the octahedron sits at the extremal point r = s of its family.

    Returns (failures, minimum of alpha over the sampled family).
    """
    tag = labels[0]
    try:
        cfg, r = octahedron_family(Q, labels)
        interval = flex_interval(cfg, step=cfg.s / 500)
    except (BricardError, GeometryError) as exc:
        return [f"octahedron {tag}: family not reconstructible ({exc})"], None
    rs = interval.samples(n_samples)
    alphas = np.array([alpha_of(build_bricard(cfg, x)) for x in rs])
    a_min = float(alphas.min())
    bad = []
    if abs(r - cfg.s) > tol * cfg.s:
        bad.append(f"octahedron {tag}: circumradius {r:.12g} differs from apex edge {cfg.s:.12g}")
    if not np.all(alphas[:-1] > alphas[-1]):
        bad.append(f"octahedron {tag}: alpha is not minimal at r = s on the sampled family")
    if abs(current_alpha - a_min) > tol:
        bad.append(f"octahedron {tag}: current dihedral {current_alpha:.12g} is not the family minimum {a_min:.12g}")
    return bad, a_min


def first_order_sector_variation(Q: EmbeddedPolyhedron, basis, eps: float = 1e-6) -> float:
    """Largest central-difference derivative of sectors (i), (iii) along the flex basis."""
    from .assembly import sector_data

    worst = 0.0
    for v in basis:
        dX = v.reshape(-1, 3)
        plus = sector_data(Q.with_coords(Q.coords + eps * dX)).sectors
        minus = sector_data(Q.with_coords(Q.coords - eps * dX)).sectors
        for key in ("i", "iii"):
            worst = max(worst, abs(plus[key] - minus[key]) / (2 * eps))
    return worst


def certify_rigid_evidence(P: EmbeddedPolyhedron, system: ConstraintSystem | None = None,
                           hs=(1e-3, 5e-4, 2.5e-4), tol: float = 1e-9) -> RigidityReport:
    """Rigidity evidence: obstruction of all flexes plus the sector-monotonicity argument.

    (1) every flex-space direction is obstructed with residual floor ~ h^p, p >= 1.8;
    (2) sectors (i), (iii) are the blister dihedrals and do not vary to first
        order, (ii) and (iv) equal the minimum of alpha on their families, and
        the sectors sum to 2 pi;
    (3) both octahedra sit at their extremal point r = s, where alpha is minimal.
    """
    from .assembly import apex, sector_data

    system = ConstraintSystem.from_polyhedron(P) if system is None else system
    fs = flex_space(P, system)
    sd = sector_data(P)
    rep = RigidityReport(rank=fs.rank, flex_dim=fs.dim, verdict="inconclusive",
                         sectors=dict(sd.sectors), sector_sum=sd.total)

    item1 = []
    x = phi(P)
    cong_tol = 1e-8 * P.diameter()
    for i, v in enumerate(fs.basis):
        t = system.gauge(v, x)
        t /= np.linalg.norm(t)
        ob = obstruction(system, x, t, hs[0], i, n_levels=len(hs))
        rep.residual_floors.append(ob.to_dict())
        if not ob.obstructed:
            item1.append(f"direction {i} not obstructed (exponent {ob.exponent:.3f})")
        out = continue_flex(P, system, v, h=hs[0], direction_index=i)
        steps = 0 if isinstance(out, Obstruction) else len(out) - 1
        rep.details[f"direction_{i}_steps"] = steps
        if not isinstance(out, Obstruction) and not _flex_ok(out, 1e-9, 1e-3, cong_tol)[0]:
            item1.append(f"direction {i} continues to a certified flex")

    item2 = []
    blister = {
        "i": dihedral(P["m"], P["n"], P["x"], P["y"]).angle,
        "iii": dihedral(P["m"], P["n"], P["u"], P["v"]).angle,
    }
    for key, val in blister.items():
        if abs(sd.sectors[key] - val) > tol:
            item2.append(f"sector ({key}) differs from its blister dihedral")
    if fs.dim:
        var = first_order_sector_variation(P, fs.basis)
        rep.details["blister_sector_variation"] = var
        if var > 1e-6:
            item2.append(f"sectors (i)/(iii) vary at first order along the flex space (rate {var:.3e})")
    if abs(sd.total - 2 * np.pi) > tol:
        item2.append(f"sector sum {sd.total:.12f} differs from 2 pi")

    item3 = []
    families = {
        "iv": ("a", "b", "c", "d", apex(P), "q"),
        "ii": ("a'", "b'", "c'", "d'", "p'", "q'"),
    }
    minima = {}
    for key, labels in families.items():
        bad, a_min = monotonicity_failures(P, labels, sd.sectors[key], tol=tol)
        minima[key] = a_min
        item3.extend(b for b in bad if "not the family minimum" not in b)
        if a_min is None or abs(sd.sectors[key] - a_min) > tol:
            item2.append(f"sector ({key}) is not the minimum of alpha on its family")
    rep.details["family_minima"] = minima

    for name, items in (("(1)", item1), ("(2)", item2), ("(3)", item3)):
        rep.failures.extend(f"item {name}: {msg}" for msg in items)
    if not rep.failures:
        rep.verdict = "rigid-evidence"
    return rep


def ablation_system(P: EmbeddedPolyhedron, pin=None) -> ConstraintSystem:
    """P's constraints with edges xy and uv removed: each blister becomes a hinged quad."""
    return ConstraintSystem.from_polyhedron(P, pin=pin, drop=[("x", "y"), ("u", "v")])
