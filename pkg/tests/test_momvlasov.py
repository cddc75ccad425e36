"""Momentum-Vlasov layer: musical maps, J_LP, evolution, split, intertwining."""

import numpy as np
import pytest

from momentpair.corpus import Lcg64, random_phase_decaying, random_phase_polyp
from momentpair.gridcore import GridFn, PhaseGrid, SpatialGrid, moment_quad, quad_qp
from momentpair.kinetic import VlasovParams, decompose_f, phase_bracket, vlasov_rhs_f
from momentpair.momvlasov import (
    GaugeError,
    GridHamField,
    OneFormGrid,
    PairingMismatchError,
    div_sharp,
    hamfield_of,
    intertwine_check,
    j_lp_apply,
    matched_momvlasov_rhs,
    momvlasov_rhs,
    pairing_direct,
    pairing_ham,
    representative,
    sharp,
    split_pi,
    vlasov_hamfields,
)


def make_grid(Nq=64, Np=256, Pmax=8.0):
    return PhaseGrid(SpatialGrid(2.0 * np.pi, Nq), Pmax, Np)


def gaussian_oneform(grid, amp=0.2, sigma=1.0, pdeg=0.4):
    q, p = grid.meshes()
    env = np.exp(-0.5 * (p / sigma) ** 2)
    return OneFormGrid(
        GridFn(grid, amp * np.sin(q) * (1.0 + pdeg * p) * env),
        GridFn(grid, amp * np.cos(q) * (1.0 - 0.5 * pdeg * p) * env),
    )


def test_sharp_examples():
    grid = make_grid(Nq=32, Np=64)
    q, p = grid.meshes()
    Pi = OneFormGrid(GridFn.zeros(grid), GridFn(grid, q))  # "q dp"
    vq, vp = sharp(Pi)
    assert np.array_equal(vq.values, q) and vp.max_abs() == 0.0
    Pi = OneFormGrid(GridFn(grid, p), GridFn.zeros(grid))  # "p dq"
    vq, vp = sharp(Pi)
    assert vq.max_abs() == 0.0 and np.array_equal(vp.values, -p)
    vq, vp = sharp(OneFormGrid.zeros(grid))
    assert vq.max_abs() == 0.0 and vp.max_abs() == 0.0


def test_div_sharp_examples():
    grid = make_grid(Nq=32, Np=64)
    q, p = grid.meshes()
    # p dq -> -1 (ddp of linear p is exact)
    Pi = OneFormGrid(GridFn(grid, p), GridFn.zeros(grid))
    assert np.max(np.abs(div_sharp(Pi).values + 1.0)) < 1e-12
    # periodic analogue of the linear example: sin(q) dp -> cos(q)
    Pi = OneFormGrid(GridFn.zeros(grid), GridFn(grid, np.sin(q)))
    assert np.max(np.abs(div_sharp(Pi).values - np.cos(q))) < 1e-12
    assert div_sharp(OneFormGrid.zeros(grid)).max_abs() == 0.0


def test_div_sharp_nonzero_on_corpus():
    rng = Lcg64(60)
    grid = make_grid(Nq=32, Np=128)
    for _ in range(10):
        Pi = OneFormGrid(
            random_phase_decaying(rng, grid, 2, 1),
            random_phase_decaying(rng, grid, 2, 1),
        )
        if Pi.max_abs() > 1e-12:
            assert div_sharp(Pi).max_abs() > 1e-12


def test_pairing_constant_h_vanishes():
    grid = make_grid(Nq=32, Np=128)
    Pi = gaussian_oneform(grid)
    const = GridHamField(GridFn.zeros(grid), GridFn.zeros(grid),
                         GridFn(grid, np.full((32, 128), 7.0)))
    assert abs(pairing_ham(Pi, const)) < 1e-12


def test_pairing_zero_form():
    grid = make_grid(Nq=32, Np=128)
    h = random_phase_polyp(Lcg64(61), grid, 2, 2)
    assert pairing_ham(OneFormGrid.zeros(grid), hamfield_of(h)) == 0.0


def test_pairing_two_sides_agree_nontrivially():
    # Pi = sin(q) G(p) dq against h = sin(q) p: direct = (L/2) int G dp
    grid = make_grid(Nq=64, Np=256)
    q, p = grid.meshes()
    G = np.exp(-0.5 * p**2)
    Pi = OneFormGrid(GridFn(grid, np.sin(q) * G), GridFn.zeros(grid))
    h = GridFn(grid, np.sin(q) * p)
    val = pairing_ham(Pi, hamfield_of(h))
    ref = 0.5 * grid.spatial.L * np.sqrt(2.0 * np.pi)
    assert val == pytest.approx(ref, rel=1e-8)


def test_pairing_detects_nonperiodic_misconfiguration():
    # the sawtooth "q dp" is not periodic; on the periodic grid both sides
    # of the pairing identity collapse to zero instead of the open-box value
    # L * Pmax^3/3, so the cross-check accepts it while the box integral is
    # recovered analytically.  A one-form that fails to decay in p, however,
    # must trip the mismatch guard.
    grid = make_grid(Nq=32, Np=128)
    q, p = grid.meshes()
    Pi = OneFormGrid(GridFn.zeros(grid), GridFn(grid, q))
    h = GridFn(grid, np.broadcast_to(p**2 / 2.0, (32, 128)).copy())
    assert abs(pairing_ham(Pi, hamfield_of(h))) < 1e-9
    Pi_bad = OneFormGrid(GridFn(grid, np.broadcast_to(p, (32, 128)).copy()),
                         GridFn.zeros(grid))
    with pytest.raises(PairingMismatchError):
        pairing_ham(Pi_bad, hamfield_of(h))


def test_jlp_zero_cases():
    grid = make_grid(Nq=32, Np=128)
    Pi = gaussian_oneform(grid)
    zero_field = GridHamField(GridFn.zeros(grid), GridFn.zeros(grid))
    out = j_lp_apply(Pi, zero_field)
    assert out.max_abs() == 0.0
    h = random_phase_polyp(Lcg64(62), grid, 2, 2)
    out = j_lp_apply(OneFormGrid.zeros(grid), hamfield_of(h))
    assert out.max_abs() == 0.0


def test_jlp_adjointness_corpus():
    rng = Lcg64(63)
    grid = make_grid(Nq=64, Np=128, Pmax=10.0)
    worst = 0.0
    for _ in range(50):
        Pi = OneFormGrid(
            random_phase_decaying(rng, grid, 2, 2),
            random_phase_decaying(rng, grid, 2, 2),
        )
        h = random_phase_polyp(rng, grid, 2, 2)
        g = random_phase_polyp(rng, grid, 2, 2)
        lhs = pairing_direct(j_lp_apply(Pi, hamfield_of(h)), hamfield_of(g))
        rhs = pairing_direct(Pi, hamfield_of(phase_bracket(g, h)))
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0))
    assert worst <= 1e-8


def test_momvlasov_uniform_constants():
    grid = make_grid(Nq=32, Np=128)
    c1, c2 = 0.7, -0.3
    Pi = OneFormGrid(GridFn(grid, np.full((32, 128), c1)), GridFn(grid, np.full((32, 128), c2)))
    params = VlasovParams(m=2.0, field_mode="prescribed")
    out = momvlasov_rhs(Pi, params)
    assert out.Pi_q.max_abs() < 1e-12
    assert np.max(np.abs(out.Pi_p.values + c1 / 2.0)) < 1e-12


def test_momvlasov_zero():
    grid = make_grid(Nq=32, Np=128)
    params = VlasovParams(field_mode="prescribed")
    assert momvlasov_rhs(OneFormGrid.zeros(grid), params).max_abs() == 0.0


def test_momvlasov_equals_jlp_oracle():
    grid = make_grid()
    Pi = gaussian_oneform(grid)
    phi = GridFn(grid.spatial, 0.1 * np.cos(grid.spatial.nodes))
    params = VlasovParams(m=1.0, e=1.0, field_mode="prescribed", prescribed_phi=phi)
    from momentpair.kinetic import hamiltonian_grid

    Xh = hamfield_of(hamiltonian_grid(grid, phi, params))
    via_j = j_lp_apply(Pi, Xh)
    direct = momvlasov_rhs(Pi, params, phi)
    scale = max(direct.max_abs(), 1.0)
    assert (via_j - direct).max_abs() <= 1e-10 * scale


def test_representative_and_gauge_error():
    grid = make_grid(Nq=32, Np=128)
    q, p = grid.meshes()
    target = GridFn(grid, np.cos(q) * np.exp(-0.5 * p**2))
    rep = representative(target)
    assert rep.Pi_q.max_abs() == 0.0
    assert (div_sharp(rep) - target).max_abs() <= 1e-10
    with pytest.raises(GaugeError):
        representative(GridFn(grid, np.exp(-0.5 * p**2) * np.ones_like(q)))


def test_split_pi_contract():
    grid = make_grid()
    Pi = gaussian_oneform(grid, sigma=0.8)
    K = 4
    Pi_s, Pi_n, residual = split_pi(Pi, K)
    recon = div_sharp(Pi_s) + div_sharp(Pi_n) + div_sharp(residual) - div_sharp(Pi)
    assert recon.max_abs() <= 1e-10
    for j in (2, 3, 4):
        assert np.max(np.abs(moment_quad(div_sharp(Pi_s), j).values)) <= 1e-7
    for j in (0, 1):
        assert np.max(np.abs(moment_quad(div_sharp(Pi_n), j).values)) <= 1e-7


def test_split_pi_zero():
    grid = make_grid(Nq=32, Np=128)
    Pi_s, Pi_n, residual = split_pi(OneFormGrid.zeros(grid), 3)
    assert Pi_s.max_abs() == 0.0 and Pi_n.max_abs() == 0.0 and residual.max_abs() == 0.0


def test_matched_momvlasov_zero_slots():
    grid = make_grid(Nq=32, Np=128)
    Pi = gaussian_oneform(grid)
    Pi_s, Pi_n, resid = split_pi(Pi, 3)
    d_s, d_n = matched_momvlasov_rhs(Pi_s, Pi_n + resid, {}, 3)
    assert d_s.max_abs() == 0.0 and d_n.max_abs() == 0.0


def test_matched_momvlasov_recombination():
    grid = make_grid()
    Pi = gaussian_oneform(grid, sigma=0.8)
    phi = GridFn(grid.spatial, 0.1 * np.cos(grid.spatial.nodes))
    params = VlasovParams(m=1.0, e=1.0, field_mode="prescribed", prescribed_phi=phi)
    K = 4
    Pi_s, Pi_n, resid = split_pi(Pi, K)
    block_n = Pi_n + resid
    slots = vlasov_hamfields(grid, phi, params)
    d_s, d_n = matched_momvlasov_rhs(Pi_s, block_n, slots, K)
    total = momvlasov_rhs(Pi_s + block_n, params, phi)
    lhs = div_sharp(d_s) + div_sharp(d_n)
    rhs = div_sharp(total)
    scale = max(rhs.max_abs(), 1.0)
    assert (lhs - rhs).max_abs() <= 1e-6 * scale


def test_matched_momvlasov_fluid_branch():
    # moment block empty and only the degree-0 slot: the whole flow is the
    # fluid-block coadjoint action
    grid = make_grid(Nq=32, Np=128)
    Pi = gaussian_oneform(grid, pdeg=0.0)
    phi = GridFn(grid.spatial, 0.1 * np.cos(grid.spatial.nodes))
    params = VlasovParams(field_mode="prescribed", prescribed_phi=phi)
    Pi_s, Pi_n, resid = split_pi(Pi, 3)
    slots = {0: vlasov_hamfields(grid, phi, params)[0]}
    d_s, d_n = matched_momvlasov_rhs(Pi_s, OneFormGrid.zeros(grid), slots, 3)
    combined = d_s + d_n
    ref = j_lp_apply(Pi_s, slots[0]) * (-1.0)
    assert (combined - ref).max_abs() <= 1e-12 * max(ref.max_abs(), 1.0)


def test_intertwine_criterion_resolution():
    grid = make_grid(Nq=64, Np=256, Pmax=6.0)
    Pi = gaussian_oneform(grid, pdeg=0.5)
    phi = GridFn(grid.spatial, 0.1 * np.cos(grid.spatial.nodes))
    params = VlasovParams(field_mode="prescribed", prescribed_phi=phi)
    err = intertwine_check(Pi, params, phi)
    assert err <= 1e-5


def test_intertwine_zero_form():
    grid = make_grid(Nq=32, Np=128)
    params = VlasovParams(field_mode="prescribed")
    assert intertwine_check(OneFormGrid.zeros(grid), params) == 0.0


def test_intertwine_refinement_order():
    errs = []
    for factor in (1, 2):
        grid = make_grid(Nq=64 * factor, Np=256 * factor, Pmax=6.0)
        Pi = gaussian_oneform(grid, pdeg=0.5)
        phi = GridFn(grid.spatial, 0.1 * np.cos(grid.spatial.nodes))
        params = VlasovParams(field_mode="prescribed", prescribed_phi=phi)
        errs.append(intertwine_check(Pi, params, phi))
    order = np.log2(errs[0] / errs[1])
    assert order >= 3.0


def test_momvlasov_self_consistent_mode():
    grid = make_grid(Nq=32, Np=128)
    Pi = gaussian_oneform(grid)
    params = VlasovParams(field_mode="self_consistent", background=None)
    out = momvlasov_rhs(Pi, params)
    assert np.all(np.isfinite(out.Pi_q.values)) and np.all(np.isfinite(out.Pi_p.values))
