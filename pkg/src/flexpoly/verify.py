"""The acceptance pipeline: ten numbered checks over B(r), C(r), P and P_n.

Each check returns a ``CriterionResult``; ``run_verification`` bundles them
into a JSON-ready report that depends only on the configuration.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .assembly import (Construction, construct, flex_path_C, flex_path_Pn, gamma_of,
                       pn_height, sector_data)
from .bricard import alpha_of, build_bricard, flex_path_B
from .config import RunConfig
from .geometry import circumcircle
from .rigidity import (ConstraintSystem, RigidityError, ablation_system, bellows_check,
                       certify_flexible, certify_rigid_evidence, continue_flex, convergence_check,
                       flex_space, lemma_congruence_check, project_perturbation, rigidity_matrix)
from .surface import validate_closed_sphere

NAMES = {
    1: "sphere validity",
    2: "Bricard flexibility",
    3: "angle extremum",
    4: "sector partition",
    5: "bellows invariants",
    6: "flexibility of P_n",
    7: "rigidity evidence for P",
    8: "Lemma check",
    9: "convergence",
    10: "oracle cross-checks",
}


def _clean(obj):
    """Plain JSON types with numpy scalars and arrays converted."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


@dataclass
class CriterionResult:
    number: int
    passed: bool
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def name(self) -> str:
        return NAMES[self.number]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        why = "" if self.passed else ": " + "; ".join(self.failures[:3])
        return f"[{status}] criterion {self.number} ({self.name}){why}"

    def to_dict(self) -> dict:
        return _clean({"criterion": self.number, "name": self.name, "passed": self.passed,
                       "failures": self.failures, "details": self.details})


def _result(number, failures, details) -> CriterionResult:
    return CriterionResult(number, not failures, details, failures)


class Context:
    """Lazily built fixtures shared between the checks."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    @cached_property
    def con(self) -> Construction:
        return construct(self.cfg.bricard, self.cfg.aux)

    @cached_property
    def rs(self) -> np.ndarray:
        return self.con.interval.samples(self.cfg.grid)

    @cached_property
    def path_B(self):
        return flex_path_B(self.con.cfg, self.con.interval, self.cfg.grid)

    @cached_property
    def path_C(self):
        return flex_path_C(self.con.C_s, self.con.blisters, self.con.cfg, self.con.interval, self.cfg.grid)

    @cached_property
    def flex_reports(self) -> dict:
        out = {}
        for n in self.cfg.n_list:
            cand = flex_path_Pn(self.con, n, self.cfg.path_samples)
            out[n] = certify_flexible(self.con.Pn(n), drift_tol=self.cfg.tol_flex_drift,
                                      angle_tol=self.cfg.tol_dihedral, candidates=[cand],
                                      bellows_tol=self.cfg.tol_bellows)
        return out


# ------------------------------------------------------------------ checks

def criterion_1(ctx: Context) -> CriterionResult:
    con, failures = ctx.con, []
    fixtures = {"P": con.P}
    fixtures.update({f"P_{n}": con.Pn(n) for n in ctx.cfg.n_list})
    for r in ctx.rs[:: max(1, len(ctx.rs) // 10)].tolist() + [con.cfg.s]:
        fixtures[f"B({r:.6g})"] = con.B(r)
        fixtures[f"C({r:.6g})"] = con.C(r)
    counts = {}
    for name, Q in fixtures.items():
        rep = validate_closed_sphere(Q.surface)
        if not rep.passes:
            failures.append(f"{name}: " + "; ".join(rep.failures()))
        counts[name] = [rep.n_vertices, rep.n_edges, rep.n_faces]
    if counts["P"] != [18, 48, 32]:
        failures.append(f"P has (V, E, F) = {tuple(counts['P'])}, expected (18, 48, 32)")
    return _result(1, failures, {"counts": counts})


def criterion_2(ctx: Context) -> CriterionResult:
    path, failures = ctx.path_B, []
    drift = path.edge_drift()
    alphas = np.array([alpha_of(Q) for Q in path.polyhedra()])
    variation = float(alphas.max() - alphas.min())
    ranks = {}
    for i in range(0, len(path) - 1, max(1, (len(path) - 1) // 10)):
        Q = path.polyhedron(i)
        ranks[f"{path.params[i]:.6g}"] = flex_space(Q).rank
    if len(path) < 100:
        failures.append(f"only {len(path)} samples")
    if drift >= ctx.cfg.tol_edge:
        failures.append(f"edge drift {drift:.3e} >= {ctx.cfg.tol_edge}")
    if variation < ctx.cfg.tol_dihedral:
        failures.append(f"dihedral at aq varies by {variation:.3e} only")
    if any(rk != 11 for rk in ranks.values()):
        failures.append(f"rigidity-matrix ranks {sorted(set(ranks.values()))} at interior samples, expected 11")
    return _result(2, failures, {"samples": len(path), "edge_drift": drift,
                                 "alpha_variation": variation, "ranks": ranks})


def criterion_3(ctx: Context) -> CriterionResult:
    con, tol, failures = ctx.con, ctx.cfg.tol_angle, []
    a_s = alpha_of(con.B_s)
    rs = ctx.rs[:-1]
    alphas = np.array([alpha_of(con.B(r)) for r in rs])
    gammas = np.array([gamma_of(con.C(r)) for r in rs])
    if not np.all(alphas > a_s):
        failures.append(f"alpha(r) <= alpha(s) at {int(np.sum(alphas <= a_s))} samples with r < s")
    dev = float(np.max(np.abs(gammas - alphas)))
    if dev > tol:
        failures.append(f"gamma(r) differs from alpha(r) by up to {dev:.3e}")
    # the identity the transported C actually satisfies (unsigned angles)
    reflected = float(np.max(np.abs(gammas - np.abs(2 * a_s - alphas))))
    return _result(3, failures, {"alpha_s": a_s, "min_alpha_below_s": float(alphas.min()),
                                 "gamma_minus_alpha": dev, "gamma_vs_reflected_alpha": reflected})


def criterion_4(ctx: Context) -> CriterionResult:
    sd, tol, failures = sector_data(ctx.con.P), ctx.cfg.tol_angle, []
    a_s = alpha_of(ctx.con.B_s)
    if abs(sd.total - 2 * np.pi) > tol:
        failures.append(f"sector sum {sd.total!r} differs from 2 pi")
    for key in ("ii", "iv"):
        if abs(sd.sectors[key] - a_s) > tol:
            failures.append(f"sector ({key}) = {sd.sectors[key]!r}, alpha(s) = {a_s!r}")
    return _result(4, failures, {"sectors": sd.sectors, "sum": sd.total, "alpha_s": a_s})


def criterion_5(ctx: Context) -> CriterionResult:
    tol, failures, drifts = ctx.cfg.tol_bellows, [], {}
    paths = {"B": ctx.path_B, "C": ctx.path_C}
    for n, rep in ctx.flex_reports.items():
        if rep.path is None:
            failures.append(f"P_{n}: no certified flex path")
        else:
            paths[f"P_{n}"] = rep.path
    for name, path in paths.items():
        dv, dm = bellows_check(path)
        drifts[name] = {"volume_drift": dv, "mic_drift": dm}
        if max(dv, dm) >= tol:
            failures.append(f"{name}: volume drift {dv:.3e}, mean-curvature drift {dm:.3e}")
    return _result(5, failures, drifts)


def criterion_6(ctx: Context) -> CriterionResult:
    failures, details = [], {}
    for n, rep in ctx.flex_reports.items():
        details[f"P_{n}"] = {"verdict": rep.verdict, "rank": rep.rank, "flex_dim": rep.flex_dim,
                             "source": rep.details.get("source"),
                             "path": rep.details.get(rep.details.get("source"), {})}
        if rep.verdict != "flexible":
            failures.append(f"P_{n}: {rep.verdict} ({'; '.join(rep.failures[:2])})")
    return _result(6, failures, details)


def criterion_7(ctx: Context) -> CriterionResult:
    P, failures = ctx.con.P, []
    rep = certify_rigid_evidence(P, tol=ctx.cfg.tol_angle)
    abl = certify_rigid_evidence(P, system=ablation_system(P), tol=ctx.cfg.tol_angle)
    if rep.verdict != "rigid-evidence":
        failures.extend(rep.failures[:3] or [f"verdict {rep.verdict}"])
    if abl.verdict == "rigid-evidence":
        failures.append("ablation fixture passes the rigidity certificate")
    return _result(7, failures, {"P": rep.to_dict(), "ablation": {"verdict": abl.verdict, "rank": abl.rank,
                                                                   "flex_dim": abl.flex_dim,
                                                                   "failures": abl.failures}})


def criterion_8(ctx: Context, max_attempts: int | None = None) -> CriterionResult:
    cfg, con, P = ctx.cfg, ctx.con, ctx.con.P
    system = ConstraintSystem.from_polyhedron(P)
    rng = np.random.default_rng(cfg.seed)
    max_attempts = 5 * cfg.lemma_samples if max_attempts is None else max_attempts
    tol = cfg.tol_lemma * P.diameter()
    samples, rejected = [], 0
    for _ in range(max_attempts):
        if len(samples) == cfg.lemma_samples:
            break
        Q = project_perturbation(P, system, rng, cfg.lemma_radius * P.diameter())
        try:
            r_star, ok = lemma_congruence_check(Q, P, con.cfg, con.interval, tol=tol)
        except RigidityError:
            rejected += 1
            continue
        samples.append({"r_star": r_star, "congruent": ok})
    failures = []
    if len(samples) < cfg.lemma_samples:
        failures.append(f"only {len(samples)} projected perturbations met the edge-length precondition")
    bad = [i for i, s in enumerate(samples) if not s["congruent"]]
    if bad:
        failures.append(f"{len(bad)} of {len(samples)} projected perturbations not congruent to B(r*)")
    r_identity, ok_identity = lemma_congruence_check(P, P, con.cfg, con.interval, tol=tol)
    if not ok_identity:
        failures.append("P itself fails the Lemma check")
    return _result(8, failures, {"samples": samples, "rejected": rejected, "tol": tol,
                                 "identity": {"r_star": r_identity, "congruent": ok_identity}})


def criterion_9(ctx: Context) -> CriterionResult:
    con, tol, failures = ctx.con, ctx.cfg.tol_convergence, []
    s = con.cfg.s
    table = convergence_check(con.P, sorted(ctx.cfg.convergence_n), con.Pn)
    for row in table:
        n = row["n"]
        row["expected"] = float(np.sqrt(2 * s / n + 1 / n**2))
        if abs(row["distance"] - row["expected"]) > tol:
            failures.append(f"n={n}: distance {row['distance']!r}, expected {row['expected']!r}")
        if not row["equivalent"]:
            failures.append(f"n={n}: P_n not combinatorially equivalent to P")
    d = [row["distance"] for row in table]
    if any(b >= a for a, b in zip(d, d[1:])):
        failures.append("distances are not strictly decreasing in n")
    return _result(9, failures, {"table": table, "apex_height_n1": pn_height(s, 1)})


def _rows_vs_differences(Q, rng, steps=(1e-3, 5e-4)) -> tuple[float, float]:
    """Rigidity-matrix directional derivative against central differences of edge lengths.

    Uses d(l^2) = 2 l dl; returns the max error at each step.
    """
    X = Q.coords
    R = rigidity_matrix(X, Q.surface.edges)
    e = np.array(Q.surface.edges)

    def lengths(Y):
        return np.linalg.norm(Y[e[:, 0]] - Y[e[:, 1]], axis=1)

    d = rng.standard_normal(X.shape)
    d /= np.linalg.norm(d)
    exact = R @ d.ravel()
    errs = []
    for h in steps:
        fd = 2 * lengths(X) * (lengths(X + h * d) - lengths(X - h * d)) / (2 * h)
        errs.append(float(np.max(np.abs(fd - exact))))
    return errs[0], errs[1]


def criterion_10(ctx: Context, n_perturbations: int = 10) -> CriterionResult:
    con, failures = ctx.con, []
    rng = np.random.default_rng(ctx.cfg.seed)
    ratios, errs = [], []
    for Q in (con.P, con.B(float(ctx.rs[len(ctx.rs) // 2]))):
        for _ in range(n_perturbations):
            e1, e2 = _rows_vs_differences(Q, rng)
            errs.append(e1)
            ratios.append(e1 / e2 if e2 > 0 else np.inf)
    # second-order error: halving the step quarters it
    if not all(3.5 < q < 4.5 for q in ratios):
        failures.append(f"finite-difference error ratios {min(ratios):.3f}..{max(ratios):.3f}, expected 4")
    r0 = float(ctx.rs[len(ctx.rs) // 2])
    B = con.B(r0)
    system = ConstraintSystem.from_polyhedron(B)
    fs = flex_space(B, system)
    path = continue_flex(B, system, fs.basis[0], h=1e-3, max_steps=200)
    curve_err, r_range = np.inf, None
    if hasattr(path, "configs"):
        rs, diffs = [], []
        for Q in path.polyhedra():
            _, r = circumcircle(Q["a"], Q["b"], Q["c"])
            if con.interval.contains(r, slack=1e-12):
                rs.append(r)
                diffs.append(abs(alpha_of(Q) - alpha_of(build_bricard(con.cfg, min(r, con.cfg.s)))))
        curve_err = float(max(diffs)) if diffs else np.inf
        r_range = [float(min(rs)), float(max(rs))] if rs else None
        if not path.meta.get("complete", True):
            failures.append("continuation on B stopped early")
    else:
        failures.append("continuation on B obstructed")
    if curve_err > ctx.cfg.tol_oracle:
        failures.append(f"continued dihedral-vs-r curve deviates by {curve_err:.3e}")
    return _result(10, failures, {"fd_error_max": max(errs), "fd_ratio_range": [min(ratios), max(ratios)],
                                  "continuation_alpha_error": curve_err, "continuation_r_range": r_range})


CHECKS = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def run_verification(cfg: RunConfig, only=None) -> dict:
    ctx = Context(cfg)
    results = [CHECKS[i](ctx) for i in sorted(only or CHECKS)]
    failed = [r.number for r in results if not r.passed]
    return {
        "config": cfg.as_dict(),
        "passed": not failed,
        "first_failure": failed[0] if failed else None,
        "failed": failed,
        "criteria": [r.to_dict() for r in results],
        "lines": [r.line() for r in results],
    }


def report_json(report: dict) -> str:
    return json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"
