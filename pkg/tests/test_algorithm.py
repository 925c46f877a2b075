"""Policy unit tests: depth pricing, branch selection, noiseless loop."""

import math

import numpy as np
import pytest

from raes import (
    FactoredEllipsoid,
    RaesConfig,
    RejectedCut,
    compute_alpha,
    initial_state,
    oriented_axis,
    perfect_user,
    raes_step,
    recommended_t0,
    run_aes,
    run_raes,
    unit_ball,
    volume_ratio,
)
from raes.algorithm import beta_scale


E1_5 = np.array([1.0, 0.0, 0.0, 0.0, 0.0])


def test_config_validation():
    with pytest.raises(ValueError):
        RaesConfig(t_horizon=0, t0=0)
    with pytest.raises(ValueError):
        RaesConfig(t_horizon=10, t0=11)
    with pytest.raises(ValueError):
        RaesConfig(t_horizon=10, t0=5, k=1.0)
    with pytest.raises(ValueError):
        RaesConfig(t_horizon=10, t0=5, delta=1.0)
    with pytest.raises(ValueError):
        RaesConfig(t_horizon=10, t0=5, c=-0.1)
    with pytest.raises(ValueError):
        RaesConfig(t_horizon=10, t0=5, gamma=0.5)
    with pytest.raises(ValueError):
        RaesConfig(t_horizon=10, t0=5, lambda0=0.0)
    with pytest.raises(ValueError):
        RaesConfig(t_horizon=10, t0=5, m=0.0)
    with pytest.raises(ValueError):
        RaesConfig(t_horizon=10, t0=0, union_bound=True)


def test_initial_state():
    cfg = RaesConfig(t_horizon=10, t0=5, lambda0=3.0)
    state = initial_state(cfg, 4)
    assert np.array_equal(state.gram_est, 3.0 * np.eye(4))
    assert np.array_equal(state.ellipsoid.spectrum, np.ones(4))
    assert state.round == 0
    with pytest.raises(ValueError):
        initial_state(cfg, 1)


def test_beta_scale():
    cfg = RaesConfig(t_horizon=10, t0=5, c=2.0, gamma=0.5 - 1e-9)
    assert beta_scale(cfg, 4) == pytest.approx(4.0, rel=1e-6)


def test_compute_alpha_frozen_unit_state():
    # d=5, fresh state, unit antipodal pair along e1, delta=0.1:
    # slack = 2 + 2 sqrt(ln 10), width 1.
    cfg = RaesConfig(t_horizon=100, t0=100)
    state = initial_state(cfg, 5)
    alpha = compute_alpha(state, cfg, -E1_5, E1_5, E1_5, 0.0)
    assert alpha == pytest.approx(-5.034854258770293, rel=1e-14)
    assert alpha == pytest.approx(-(2.0 + 2.0 * math.sqrt(math.log(10.0))), rel=1e-14)


def test_compute_alpha_frozen_wide_axis():
    # Same duel against an ellipsoid stretched to 100 along e1: the width
    # grows tenfold and the certified depth shrinks tenfold.
    cfg = RaesConfig(t_horizon=100, t0=100)
    state = initial_state(cfg, 5)
    state.ellipsoid = FactoredEllipsoid(
        basis=np.eye(5),
        spectrum=np.array([100.0, 1.0, 1.0, 1.0, 1.0]),
        center_coords=np.zeros(5),
    )
    alpha = compute_alpha(state, cfg, -E1_5, E1_5, E1_5, 0.0)
    assert alpha == pytest.approx(-0.5034854258770294, rel=1e-14)


def test_compute_alpha_zero_for_unperturbed_user():
    cfg = RaesConfig(t_horizon=100, t0=100, c=0.0)
    state = initial_state(cfg, 5)
    assert compute_alpha(state, cfg, -E1_5, E1_5, E1_5, 0.0) == 0.0


def test_compute_alpha_union_bound_widens_slack():
    cfg = RaesConfig(t_horizon=100, t0=10, union_bound=True)
    state = initial_state(cfg, 5)
    alpha = compute_alpha(state, cfg, -E1_5, E1_5, E1_5, 0.0)
    assert alpha == pytest.approx(-(2.0 + 2.0 * math.sqrt(math.log(100.0))), rel=1e-14)


def test_compute_alpha_covering_slack_term():
    cfg = RaesConfig(t_horizon=100, t0=100, c=0.0)
    state = initial_state(cfg, 5)
    assert compute_alpha(state, cfg, -E1_5, E1_5, E1_5, 0.05) == pytest.approx(-0.1)


def test_compute_alpha_sharpens_with_gram_mass():
    cfg = RaesConfig(t_horizon=100, t0=100)
    state = initial_state(cfg, 5)
    thin = compute_alpha(state, cfg, -E1_5, E1_5, E1_5, 0.0)
    state.gram_est = 400.0 * np.eye(5)
    rich = compute_alpha(state, cfg, -E1_5, E1_5, E1_5, 0.0)
    assert rich == pytest.approx(thin / 20.0, rel=1e-12)
    assert rich > thin


def test_explore_branch_uses_gram_extreme_axes():
    # A thin Gram estimate prices the duel far below -1/(k d), so the round
    # explores along the estimate's top and bottom axes with 0.8/0.6 weights.
    cfg = RaesConfig(t_horizon=10, t0=10)
    state = initial_state(cfg, 2)
    state.gram_est = np.diag([3.0, 1.0])
    user = perfect_user(np.array([1.0, 0.0]))
    out = raes_step(state, cfg, unit_ball(2), user)
    assert out.branch == "explore"
    assert state.n_explores == 1 and state.n_cuts == 0
    assert out.alpha < -1.0 / (cfg.k * 2)
    assert np.allclose(out.pair[0], [0.8, 0.6], atol=1e-12)
    assert np.allclose(out.pair[1], [0.8, -0.6], atol=1e-12)


def test_cut_branch_keeps_the_winner_halfspace():
    # Unperturbed pricing gives a central cut; the user who knows theta = e1
    # wins the +e1 arm, so the surviving half is the positive side.
    cfg = RaesConfig(t_horizon=10, t0=10, c=0.0)
    state = initial_state(cfg, 2)
    user = perfect_user(np.array([1.0, 0.0]))
    out = raes_step(state, cfg, unit_ball(2), user)
    assert out.branch == "cut"
    assert state.n_cuts == 1
    assert out.alpha == 0.0
    assert np.array_equal(out.pair[0], [-1.0, 0.0])
    assert np.array_equal(out.pair[1], [1.0, 0.0])
    assert out.choice.index == 1
    assert np.allclose(state.ellipsoid.center, [1.0 / 3.0, 0.0], atol=1e-12)
    assert state.ellipsoid.contains(np.array([1.0, 0.0]), tol=1e-9)
    # The chosen arm entered both the user's and the system's statistics.
    assert state.gram_est[0, 0] == pytest.approx(2.0)
    assert user.gram[0, 0] == pytest.approx(2.0)


def test_cut_pair_separation_follows_m():
    cfg = RaesConfig(t_horizon=10, t0=10, c=0.0, m=1.0)
    state = initial_state(cfg, 2)
    user = perfect_user(np.array([1.0, 0.0]))
    out = raes_step(state, cfg, unit_ball(2), user)
    assert out.branch == "cut"
    assert np.allclose(out.pair[0], [-0.5, 0.0])
    assert np.allclose(out.pair[1], [0.5, 0.0])


def test_rejected_cut_downgrades_to_explore(monkeypatch):
    def refuse(self, normal_coords, offset):
        raise RejectedCut("forced")

    monkeypatch.setattr(FactoredEllipsoid, "plane_cut", refuse)
    cfg = RaesConfig(t_horizon=10, t0=10, c=0.0)
    state = initial_state(cfg, 2)
    user = perfect_user(np.array([1.0, 0.0]))
    out = raes_step(state, cfg, unit_ball(2), user)
    assert out.branch == "explore"
    assert state.n_cuts == 0 and state.n_explores == 1
    # The duel pair was already on the table when the geometry refused.
    assert np.array_equal(out.pair[1], [1.0, 0.0])
    assert np.array_equal(state.ellipsoid.spectrum, np.ones(2))


def test_exploit_branch_plays_the_long_axis_twice():
    cfg = RaesConfig(t_horizon=10, t0=0)
    state = initial_state(cfg, 3)
    user = perfect_user(np.array([0.0, 1.0, 0.0]))
    out = raes_step(state, cfg, unit_ball(3), user)
    assert out.branch == "exploit"
    assert state.n_exploits == 1
    assert math.isnan(out.alpha)
    assert np.array_equal(out.pair[0], out.pair[1])
    assert np.array_equal(out.pair[0], [1.0, 0.0, 0.0])


def test_oriented_axis_signs():
    assert np.array_equal(oriented_axis(FactoredEllipsoid.unit(3)), [1.0, 0.0, 0.0])
    flipped = FactoredEllipsoid(
        basis=np.eye(3), spectrum=np.ones(3), center_coords=np.array([-0.2, 0.0, 0.0])
    )
    assert np.array_equal(oriented_axis(flipped), [-1.0, 0.0, 0.0])


def test_run_raes_trace_and_counters():
    theta = np.array([0.6, 0.8])
    cfg = RaesConfig(t_horizon=60, t0=40, c=0.0)
    trace = run_raes(cfg, unit_ball(2), perfect_user(theta))
    assert trace.algo == "raes"
    assert trace.seed == -1
    assert trace.rounds.size == 60
    assert len(trace.branches) == 60
    assert trace.branches[:40] == ["cut"] * 40
    assert set(trace.branches[40:]) == {"exploit"}
    assert np.all(trace.inst_regret >= -1e-9)
    assert np.allclose(np.cumsum(trace.inst_regret), trace.cum_regret)
    # Exploit rounds recommend one arm twice; with the target pinned down
    # to rounding the late regret is essentially zero.
    assert trace.cum_regret[-1] - trace.cum_regret[40] < 1e-6


def test_run_raes_rejects_dimension_mismatch():
    cfg = RaesConfig(t_horizon=5, t0=5)
    with pytest.raises(ValueError, match="dimension"):
        run_raes(cfg, unit_ball(3), perfect_user(np.array([1.0, 0.0])))


def test_run_aes_zero_rounds():
    res = run_aes(4, 0, perfect_user(np.array([0.0, 0.0, 0.0, 1.0])))
    assert np.array_equal(res.estimate, [1.0, 0.0, 0.0, 0.0])
    assert np.array_equal(res.ellipsoid.spectrum, np.ones(4))
    with pytest.raises(ValueError):
        run_aes(1, 5, perfect_user(np.array([1.0, 0.0])))
    with pytest.raises(ValueError):
        run_aes(3, -1, perfect_user(np.array([1.0, 0.0, 0.0])))


def test_run_aes_converges_to_theta():
    rng = np.random.default_rng(31)
    theta = rng.standard_normal(3)
    theta /= np.linalg.norm(theta)
    res = run_aes(3, 200, perfect_user(theta))
    assert np.linalg.norm(res.estimate - theta) < 5e-3
    assert res.ellipsoid.contains(theta, tol=1e-9)


def test_run_aes_on_round_sees_every_central_cut():
    theta = np.array([0.28, -0.96, 0.0])
    seen = []

    def watch(t, e):
        seen.append((t, float(np.sum(np.log(e.spectrum)))))

    run_aes(3, 50, perfect_user(theta), on_round=watch)
    assert [t for t, _ in seen] == list(range(1, 51))
    drops = np.diff([0.0] + [ld for _, ld in seen])
    want = 2.0 * math.log(volume_ratio(0.0, 3))
    assert np.allclose(drops, want, rtol=1e-9)


def test_recommended_t0_frozen():
    got = recommended_t0(
        c=1.0, k=1.05, smooth_l=1.0, d0=1.0, d1=1.0,
        eps0=0.0, gamma=0.0, delta=0.1, d=5, t_horizon=10000,
    )
    assert got == pytest.approx(242802.46980805005, rel=1e-12)
    with pytest.raises(ValueError, match="eps0"):
        recommended_t0(
            c=1.0, k=1.05, smooth_l=1.0, d0=1.0, d1=1.0,
            eps0=0.1, gamma=0.0, delta=0.1, d=5, t_horizon=10000,
        )


def test_recommended_t0_scales_with_horizon():
    kw = dict(c=1.0, k=1.05, smooth_l=1.0, d0=1.0, d1=1.0,
              eps0=0.0, delta=0.1, d=5)
    base = recommended_t0(gamma=0.0, t_horizon=10000, **kw)
    assert recommended_t0(gamma=0.0, t_horizon=40000, **kw) == pytest.approx(2.0 * base)
    assert recommended_t0(gamma=0.25, t_horizon=10000, **kw) == pytest.approx(10.0 * base)
