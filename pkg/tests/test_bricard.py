import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flexpoly.bricard import (CFG0, BricardConfig, BricardError, alpha, beta, build_bricard,
                              build_planar_quad, check_conditions, flex_interval, flex_path_B)
from flexpoly.geometry import circumcircle, labeled_congruent, signed_volume
from flexpoly.rigidity import bellows_check, flex_space

from oracles import bricard_coords, dihedral_from_face_angles

ALPHA_S = 0.295296343103273  # derived: face-angle oracle on B(s)
EPSILON = 0.5                # derived: downward scan at step 1e-3 s; the bc chord becomes a diameter at r = 1.5
OCTA = ("a", "b", "c", "d", "p", "q")


@pytest.fixture(scope="module")
def interval():
    return flex_interval(CFG0)


def test_config_validation():
    with pytest.raises(BricardError):
        BricardConfig(t=2.0)
    with pytest.raises(BricardError):
        BricardConfig(s=1.5, r0=2.0)
    with pytest.raises(BricardError):
        BricardConfig(l_bc=4.5)
    with pytest.raises(BricardError):
        BricardConfig(l_ab=3.0, l_bc=3.0)
    with pytest.raises(BricardError):
        BricardConfig(l_ab=-1.0)


def test_planar_quad_cfg0():
    quad = build_planar_quad(CFG0, 2.0)
    a, b, c, d = quad.a, quad.b, quad.c, quad.d
    assert np.linalg.norm(a - d) == pytest.approx(3.0, abs=1e-12)
    assert np.linalg.norm(c - d) == pytest.approx(2.0, abs=1e-12)
    assert np.linalg.norm(a - b) == pytest.approx(2.0, abs=1e-12)
    assert np.linalg.norm(b - c) == pytest.approx(3.0, abs=1e-12)
    # d mirrors b across the perpendicular bisector of ac
    u = (c - a) / np.linalg.norm(c - a)
    mid_bd, mid_ac = (b + d) / 2, (a + c) / 2
    assert (mid_bd - mid_ac) @ u == pytest.approx(0.0, abs=1e-12)
    assert np.cross(d - b, u)[2] == pytest.approx(0.0, abs=1e-12)
    for v in (a, b, c, d):
        assert np.linalg.norm(v) == pytest.approx(2.0, abs=1e-12)
    assert check_conditions(quad) == []


def test_chord_through_center_rejected():
    # ab is the longest chord here, a diameter at r = 1.5
    cfg = BricardConfig(l_ab=3.0, l_bc=2.0)
    with pytest.raises(BricardError, match=r"\(b\)"):
        build_planar_quad(cfg, 1.5)


def test_apex_in_base_plane_at_s():
    B = build_bricard(CFG0, 2.0)
    assert B["p"][2] == 0.0
    assert B["q"][2] < 0


def test_edge_lengths_at_199():
    B = build_bricard(CFG0, 1.99)
    for v in "abcd":
        assert np.linalg.norm(B[v] - B["p"]) == pytest.approx(2.0, abs=1e-12)
        assert np.linalg.norm(B[v] - B["q"]) == pytest.approx(3.0, abs=1e-12)


def test_matches_independent_coordinates():
    for r in (1.6, 1.8, 1.99, 2.0):
        X = bricard_coords(2.0, 3.0, 2.0, 3.0, r)
        assert labeled_congruent(build_bricard(CFG0, r).points(OCTA), X, 1e-12)


def test_r_beyond_s_rejected():
    with pytest.raises(BricardError):
        build_bricard(CFG0, 2.5)


def test_flex_interval_regression(interval):
    assert interval.epsilon >= 0.05
    assert interval.epsilon == pytest.approx(EPSILON, abs=interval.step)
    halved = flex_interval(CFG0, step=interval.step / 2)
    assert abs(halved.epsilon - interval.epsilon) <= interval.step


def test_interval_samples(interval):
    rs = interval.samples(101)
    assert len(rs) == 101 and rs[-1] == CFG0.s
    assert np.all(np.diff(rs) > 0) and rs[0] > interval.left


def test_alpha_minimal_at_s(interval):
    a_s = alpha(CFG0, CFG0.s)
    assert a_s == pytest.approx(ALPHA_S, abs=1e-12)
    rs = interval.samples(200)[:-1]
    assert all(alpha(CFG0, r, interval) > a_s for r in rs)
    b_s = beta(CFG0, CFG0.s)
    assert all(beta(CFG0, r, interval) < b_s for r in rs)


def test_alpha_outside_interval(interval):
    with pytest.raises(BricardError):
        alpha(CFG0, interval.left - 0.1, interval)


def test_alpha_matches_face_angle_oracle(interval):
    for r in interval.samples(7):
        B = build_bricard(CFG0, r)
        assert alpha(CFG0, r) == pytest.approx(dihedral_from_face_angles(B["a"], B["q"], B["b"], B["d"]), abs=1e-12)
        assert beta(CFG0, r) == pytest.approx(dihedral_from_face_angles(B["d"], B["q"], B["a"], B["c"]), abs=1e-12)


@given(st.floats(0.05, 20))
@settings(max_examples=30)
def test_alpha_scale_invariant(k):
    for r in (1.7, 2.0):
        assert alpha(CFG0.scaled(k), r * k) == pytest.approx(alpha(CFG0, r), abs=1e-11)


@given(st.floats(1.5005, 2.0))
@settings(max_examples=40)
def test_circumcircle_round_trip(r):
    B = build_bricard(CFG0, r)
    O, rr = circumcircle(B["a"], B["b"], B["c"])
    assert rr == pytest.approx(r, abs=1e-12)
    assert np.allclose(O, 0.0, atol=1e-12)


def test_flex_path_B(interval):
    path = flex_path_B(CFG0, interval, 101)
    assert path.edge_drift() < 1e-10
    dv, dm = bellows_check(path)
    assert dv < 1e-8 and dm < 1e-8
    assert path.congruent_pairs(1e-8) == []
    assert path.max_step() < 0.2


def test_zero_volume():
    # a Bricard octahedron of this type encloses zero signed volume
    for r in (1.7, 2.0):
        assert abs(signed_volume(build_bricard(CFG0, r))) < 1e-12


def test_rank_interior(interval):
    for r in interval.samples(6)[:-1]:
        fs = flex_space(build_bricard(CFG0, r))
        assert fs.rank == 11 and fs.dim == 1
