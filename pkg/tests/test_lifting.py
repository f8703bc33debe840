import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homotopykit import (AntipodalDegenerate, CosetMap, GroupMap, NonConvergent, PrimaryMismatch,
                         build_s3)
from homotopykit.fixtures import (hopf_map, quaternion_power_map, random_gauge_map,
                                  torus_degree_map)
from homotopykit.invariants import secondary_invariant
from homotopykit.lie import dagger, is_special_unitary
from homotopykit.lifting import (construct_lift, homotopy_verdict, is_nullhomotopic,
                                 pointwise_transporter, u_phi_distance)
from homotopykit.maps import flag_projection, resample
from oracles import bloch_projector, exp_oracle, quaternion_rotation, random_skew_traceless


def test_transporter_north_to_equator():
    p = bloch_projector([0, 0, 1])
    q = bloch_projector([1, 0, 0])
    g = pointwise_transporter(p, q)
    assert np.allclose(g, quaternion_rotation([0, 1, 0], np.pi / 2), atol=1e-14)
    assert np.real(np.trace(g)) > 0
    assert np.allclose(g @ p @ dagger(g), q, atol=1e-14)


def test_transporter_identity_and_antipodal():
    p = bloch_projector([0, 0, 1])
    assert np.allclose(pointwise_transporter(p, p), np.eye(2))
    with pytest.raises(AntipodalDegenerate):
        pointwise_transporter(p, bloch_projector([0, 0, -1]))


@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
@settings(max_examples=50, deadline=None)
def test_transporter_random_flags(seed, n):
    rng = np.random.default_rng(seed)
    g0 = exp_oracle(random_skew_traceless(rng, n, 2.0))
    g1 = g0 @ exp_oracle(random_skew_traceless(rng, n, 0.8))
    E = np.zeros((n, n, n), dtype=complex)
    E[np.arange(n), np.arange(n), np.arange(n)] = 1
    p = g0[None] @ E @ dagger(g0)[None]
    q = g1[None] @ E @ dagger(g1)[None]
    g = pointwise_transporter(p, q)
    assert is_special_unitary(g)
    assert np.allclose(g[None] @ p @ dagger(g)[None], q, atol=1e-10)


@pytest.fixture(scope="module")
def mesh():
    return build_s3(3)


def test_lift_of_identical_maps(mesh):
    phi = hopf_map(mesh, 1)
    res = construct_lift(phi, phi)
    assert np.allclose(res.u.values[0], np.eye(2))
    assert res.residual == 0.0 and res.edge_gap == 0.0


def test_gauge_translate_lift(mesh):
    phi = hopf_map(mesh, 1)
    w = random_gauge_map(mesh, 0)
    res = construct_lift(phi, phi.act(w))
    assert res.residual <= 1e-8
    assert np.max(u_phi_distance(res.u, phi, phi.act(w))) <= 1e-8
    assert secondary_invariant(res.u).value == (0,)
    assert res.energy <= res.initial_energy + 1e-12


def test_hopf_lift_detects_degree(mesh):
    res = construct_lift(hopf_map(mesh, 1), hopf_map(mesh, 2))
    sec = secondary_invariant(res.u)
    assert sec.value == (1,)
    assert sec.raw[0] == pytest.approx(1.0, abs=0.01)


def test_primary_mismatch(t3_8):
    with pytest.raises(PrimaryMismatch) as err:
        construct_lift(torus_degree_map(t3_8, 1), torus_degree_map(t3_8, 2))
    assert np.array_equal(err.value.difference, [[0, 0], [0, 0], [-1, 1]])


def test_antipodal_vertex_is_repaired():
    # Bloch vector tilted by pi (1 + x . x0) / 2 about y: antipodal only at vertex 0
    c = build_s3(2)
    x = c.vertices
    alpha = np.pi * (1 + x @ x[0]) / 2
    n = np.stack([np.sin(alpha), np.zeros_like(alpha), np.cos(alpha)], axis=1)
    psi = CosetMap(c, np.array([bloch_projector(v) for v in n]))
    res = construct_lift(CosetMap.constant(c, 2), psi)
    assert res.repaired_vertices == (0,)
    assert res.residual <= 1e-8


def test_antipodal_everywhere_fails():
    c = build_s3(1)
    phi = CosetMap.constant(c, 2)
    psi = CosetMap(c, np.array(phi.values[0])[:, ::-1])
    with pytest.raises(AntipodalDegenerate):
        construct_lift(phi, psi)


def test_edge_gap_bound_enforced(mesh):
    with pytest.raises(NonConvergent):
        construct_lift(hopf_map(mesh, 1), hopf_map(mesh, 2), edge_gap_bound=0.01)


# ------------------------------------------------------------------ verdicts

def test_confirmation_catches_coarse_aliasing():
    # on level 2 the lift rounds to 0, one subdivision later to 1
    c = build_s3(2)
    a, b = hopf_map(c, 1), hopf_map(c, 2)
    assert homotopy_verdict(a, b, confirm=False).coset == [0]
    v = homotopy_verdict(a, b)
    assert v.tag == "Inconclusive" and v.confirmed_on is None
    assert "confirmation failed" in v.reason or "changed under subdivision" in v.reason


def test_verdict_tags(mesh, t3_8):
    assert homotopy_verdict(hopf_map(mesh, 1), hopf_map(mesh, 1)).tag == "Homotopic"
    v = homotopy_verdict(hopf_map(mesh, 1), hopf_map(mesh, 2))
    assert v.tag == "NotHomotopic" and v.coset == [1]
    assert v.to_dict()["confirmed_on"] == build_s3(4).id
    v = homotopy_verdict(torus_degree_map(t3_8, 1), torus_degree_map(t3_8, 2))
    assert v.tag == "NotTwoHomotopic"
    assert v.to_dict()["verdict"] == "NotTwoHomotopic"


def test_verdict_symmetry_and_translation(mesh):
    a, b = hopf_map(mesh, 1), hopf_map(mesh, 2)
    v1 = homotopy_verdict(a, b)
    v2 = homotopy_verdict(b, a, confirm=False)
    assert v1.tag == v2.tag == "NotHomotopic"
    assert v1.secondary.value == tuple(-x for x in v2.secondary.value)
    w = random_gauge_map(mesh, 5)
    v3 = homotopy_verdict(a.act(w), b.act(w), confirm=False)
    assert v3.tag == v1.tag and v3.secondary.value == v1.secondary.value


def test_torus_stabilizers_give_zero_lattice():
    # stabilizers of a full flag are torus valued, so their degrees vanish
    c = build_s3(2)
    phi = CosetMap.constant(c, 2)
    diag = np.zeros((c.n_vertices, 2, 2), dtype=complex)
    diag[:, 0, 0] = diag[:, 1, 1] = 1
    diag[:, 0, 0] = np.exp(1j * np.pi * c.vertices[:, 0])
    diag[:, 1, 1] = np.conj(diag[:, 0, 0])
    w = GroupMap(c, diag)
    v = homotopy_verdict(phi, phi, [w])
    assert v.tag == "Homotopic" and v.lattice.is_zero


def test_inconclusive_when_lift_is_under_resolved(mesh):
    v = homotopy_verdict(CosetMap.constant(mesh, 2), flag_projection(quaternion_power_map(mesh, 2)),
                         max_subdivisions=0)
    assert v.tag == "Inconclusive" and v.refinements == 0
    assert v.reason.startswith("NonConvergent")
    assert v.to_dict()["mesh"] == mesh.id


def test_antipodal_everywhere_is_inconclusive_after_refinement():
    c = build_s3(0)
    phi = CosetMap.constant(c, 2)
    psi = CosetMap(c, np.array(phi.values[0])[:, ::-1])
    v = homotopy_verdict(phi, psi, max_subdivisions=1)
    assert v.tag == "Inconclusive" and v.refinements == 1
    assert v.reason.startswith("AntipodalDegenerate")


def test_is_nullhomotopic(mesh):
    assert is_nullhomotopic(random_gauge_map(mesh, 3))
    assert not is_nullhomotopic(quaternion_power_map(mesh, 1))


@pytest.mark.slow
def test_power_two_flag_lift_resolves_at_level_4(s3_l4):
    # the same input that is Inconclusive at level 3
    res = construct_lift(CosetMap.constant(s3_l4, 2), flag_projection(quaternion_power_map(s3_l4, 2)))
    sec = secondary_invariant(res.u)
    assert sec.value == (2,) and res.residual <= 1e-8


@pytest.mark.slow
def test_verdict_refines_under_resolved_lift(mesh):
    # confirming this on level 5 would take minutes
    v = homotopy_verdict(CosetMap.constant(mesh, 2), flag_projection(quaternion_power_map(mesh, 2)),
                         confirm=False)
    assert v.tag == "NotHomotopic" and v.coset == [2]
    assert v.refinements == 1 and v.to_dict()["refinements"] == 1


@pytest.mark.slow
def test_warm_start_from_coarse_lift(mesh, s3_l4):
    a, b = hopf_map(s3_l4, 1), hopf_map(s3_l4, 2)
    coarse = construct_lift(hopf_map(mesh, 1), hopf_map(mesh, 2))
    cold = construct_lift(a, b)
    warm = construct_lift(a, b, initial=resample(coarse.u, s3_l4))
    assert warm.iterations < cold.iterations / 2
    assert warm.residual <= 1e-8
    assert secondary_invariant(warm.u).value == secondary_invariant(cold.u).value == (1,)
