import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flexpoly.assembly import (PRIMED, AssemblyError, AuxPlacement, ContainmentError, build_B_prime,
                               build_C, choose_k, flex_path_C, flex_path_Pn, gamma_of, pn_configuration,
                               pn_zeta_limit, sector_data, transport_C)
from flexpoly.bricard import CFG0, OCTA_LABELS, alpha_of
from flexpoly.geometry import dihedral, signed_volume
from flexpoly.rigidity import bellows_check, phi
from flexpoly.surface import validate_closed_sphere

from oracles import volume_from_origin

ALPHA_S = 0.295296343103273
K_DEFAULT = 0.03125       # derived: halving from 0.5 first passes at 0.0625, halved once for margin
VOL_P = 0.0104389         # derived: origin-based volume oracle on C(s); B'(s) adds none


def test_aux_validation():
    with pytest.raises(AssemblyError):
        AuxPlacement(t_m=0.0)
    with pytest.raises(AssemblyError):
        AuxPlacement(bary_y=(0.5, 0.5, 0.0))
    with pytest.raises(AssemblyError):
        AuxPlacement(off_x=(0.5, 0.0))
    with pytest.raises(AssemblyError):
        AuxPlacement(k=1.5)


def test_aux_points_on_their_faces(con):
    B, pts = con.B_s, con.points
    aq = B["q"] - B["a"]
    for p in (pts.m, pts.n):
        f = (p - B["a"]) @ aq / (aq @ aq)
        assert 0 < f < 1
        assert np.linalg.norm(np.cross(p - B["a"], aq)) < 1e-12
    for p, w in ((pts.y, "b"), (pts.x, "d"), (pts.v, "d"), (pts.u, "b")):
        n = np.cross(aq, B[w] - B["a"])
        assert abs((p - B["a"]) @ n) < 1e-12 * np.linalg.norm(n)


def test_c_counts(con):
    rep = validate_closed_sphere(con.C_s.surface)
    assert (rep.n_vertices, rep.n_edges, rep.n_faces) == (12, 30, 20)
    assert rep.passes and rep.euler == 2


def test_blister_dihedral_is_alpha_s(con):
    C = con.C_s
    assert dihedral(C["m"], C["n"], C["u"], C["x"]).angle == pytest.approx(ALPHA_S, abs=1e-10)
    assert gamma_of(C) == pytest.approx(alpha_of(con.B_s), abs=1e-10)


def test_ux_not_an_edge(con):
    S = con.C_s.surface
    assert (min(S.index("u"), S.index("x")), max(S.index("u"), S.index("x"))) not in S.edges


def test_transport_identity_at_s(con):
    C = transport_C(con.C_s, con.blisters, CFG0, CFG0.s, con.interval)
    assert np.max(np.abs(C.coords - con.C_s.coords)) < 1e-12


def test_transport_drift_and_bellows(con):
    path = flex_path_C(con.C_s, con.blisters, CFG0, con.interval, 101)
    assert path.edge_drift() < 1e-10
    dv, dm = bellows_check(path)
    assert dv < 1e-8 and dm < 1e-8
    assert path.congruent_pairs(1e-8) == []


def test_blisters_ride_rigidly(con):
    ref = None
    for r in con.interval.samples(11):
        C = con.C(r)
        ang = (dihedral(C["m"], C["n"], C["x"], C["y"]).angle, dihedral(C["m"], C["n"], C["u"], C["v"]).angle)
        ref = ang if ref is None else ref
        assert ang == pytest.approx(ref, abs=1e-12)


def test_gamma_is_reflected_alpha(con):
    # the transported C satisfies gamma(r) = |2 alpha(s) - alpha(r)|
    a_s = alpha_of(con.B_s)
    for r in con.interval.samples(25):
        assert gamma_of(con.C(r)) == pytest.approx(abs(2 * a_s - alpha_of(con.B(r))), abs=1e-12)


@pytest.mark.xfail(strict=True, reason="gamma(r) = alpha(r) does not hold for the transported C; see the decision log")
def test_gamma_equals_alpha_claim(con):
    for r in con.interval.samples(25):
        assert gamma_of(con.C(r)) == pytest.approx(alpha_of(con.B(r)), abs=1e-9)


def test_b_prime_scaling(con):
    Bp, k = con.B_prime, con.k
    assert k == K_DEFAULT
    assert np.linalg.norm(Bp["a'"] - Bp["p'"]) == pytest.approx(k * CFG0.s, abs=1e-12)
    assert np.linalg.norm(Bp["a'"] - Bp["q'"]) == pytest.approx(k * CFG0.t, abs=1e-12)
    assert dihedral(Bp["a'"], Bp["q'"], Bp["b'"], Bp["d'"]).angle == pytest.approx(ALPHA_S, abs=1e-12)


def test_b_prime_dihedrals_match_b(con):
    B, Bp = con.B_s, con.B_prime
    for (i, j), fs in B.surface.edge_faces.items():
        w = [next(v for v in B.surface.faces[f] if v not in (i, j)) for f in fs]
        lab = [OCTA_LABELS[x] for x in (i, j, *w)]
        a = dihedral(*(B[x] for x in lab)).angle
        b = dihedral(*(Bp[x + "'"] for x in lab)).angle
        assert a == pytest.approx(b, abs=1e-12)


def test_containment_and_k(con):
    with pytest.raises(ContainmentError, match="diminish k"):
        build_B_prime(con.B_s, con.points, 0.9)
    build_B_prime(con.B_s, con.points, 0.05)
    assert choose_k(con.B_s, con.points) == K_DEFAULT


def test_p_counts_and_sectors(con):
    P = con.P
    rep = validate_closed_sphere(P.surface)
    assert (rep.n_vertices, rep.n_edges, rep.n_faces) == (18, 48, 32)
    sd = sector_data(P)
    assert sd.total == pytest.approx(2 * np.pi, abs=1e-9)
    assert sd.sectors["ii"] == pytest.approx(ALPHA_S, abs=1e-9)
    assert sd.sectors["iv"] == pytest.approx(ALPHA_S, abs=1e-9)
    assert sd.partition_ok()
    assert sd.sectors["i"] == pytest.approx(dihedral(P["m"], P["n"], P["x"], P["y"]).angle, abs=1e-12)
    assert sd.sectors["iii"] == pytest.approx(dihedral(P["m"], P["n"], P["u"], P["v"]).angle, abs=1e-12)


def test_p_volume(con):
    P = con.P
    v = signed_volume(P)
    assert v == pytest.approx(volume_from_origin(P.coords, P.surface.faces), abs=1e-13)
    assert v == pytest.approx(signed_volume(con.C_s), abs=1e-13)
    assert v == pytest.approx(VOL_P, abs=1e-7)


@pytest.mark.parametrize("n", [1, 10, 100])
def test_pn(con, n):
    Pn = con.Pn(n)
    s = CFG0.s
    for v in "abcd":
        assert np.linalg.norm(Pn[v] - Pn["p_n"]) == pytest.approx(s + 1 / n, abs=1e-12)
    diff = (phi(Pn) - phi(con.P)).reshape(-1, 3)
    moved = np.flatnonzero(np.linalg.norm(diff, axis=1))
    assert list(moved) == [Pn.surface.index("p_n")]
    assert np.linalg.norm(diff) == pytest.approx(np.sqrt(2 * s / n + 1 / n**2), abs=1e-12)
    assert validate_closed_sphere(Pn.surface).passes


@pytest.mark.parametrize("n", [1, 10, 100])
def test_pn_flex_family(con, n):
    path = flex_path_Pn(con, n, 41)
    assert np.max(np.abs(path.configs[0] - con.Pn(n).coords)) < 1e-12
    assert path.edge_drift() < 1e-12
    sec = [sector_data(Q).sectors for Q in path.polyhedra()]
    ii = np.array([s["ii"] for s in sec])
    iv = np.array([s["iv"] for s in sec])
    assert np.all(np.diff(iv) < 0) and np.all(np.diff(ii) > 0)
    assert np.allclose(ii + iv, 2 * ALPHA_S, atol=1e-12)
    for s in sec:
        assert sum(s.values()) == pytest.approx(2 * np.pi, abs=1e-12)


@given(st.floats(0.0, 0.9))
@settings(max_examples=15, deadline=None)
def test_pn_configuration_keeps_lengths(con, frac):
    n = 10
    Q = pn_configuration(con, n, frac * pn_zeta_limit(con, n))
    assert np.max(np.abs(Q.edge_lengths() - con.Pn(n).edge_lengths())) < 1e-12


def test_primed_labels(con):
    assert all(con.P.surface.has_vertex(lab) for lab in PRIMED)
    assert not con.P.surface.has_vertex("w")
