"""Baseline unit tests: the optimist core, Dbgd, Doubler, Sparring."""

import numpy as np
import pytest

from raes import Dbgd, Doubler, Oful, Sparring, dbgd_params, perfect_user, unit_ball
from raes.actions import sample_unit_sphere


THETA2 = np.array([0.6, 0.8])


def test_oful_validation():
    with pytest.raises(ValueError):
        Oful(2, reg=0.0)


def test_oful_one_step_ridge():
    o = Oful(2, reg=1.0)
    o.update(np.array([1.0, 0.0]), 1.0)
    assert np.array_equal(o.gram, np.diag([2.0, 1.0]))
    assert np.array_equal(o.theta_hat, [0.5, 0.0])


def test_oful_zero_width_is_greedy():
    o = Oful(2, reg=1.0, width_scale=0.0)
    o.update(np.array([1.0, 0.0]), 1.0)
    arm = o.select(unit_ball(2), 3, np.random.default_rng(1))
    assert np.allclose(arm, [1.0, 0.0])


def test_oful_width_prefers_unexplored_axis():
    # With a cold estimate the bonus alone decides, and the thin Gram axis
    # has ten times the width of the heavy one.
    o = Oful(2, reg=1.0, width_scale=1.0)
    o.gram = np.diag([100.0, 1.0])
    arm = o.select(unit_ball(2), 1, np.random.default_rng(0))
    assert np.allclose(arm, [0.0, 1.0])


def test_oful_net_sets_score_every_point():
    from raes import ActionSet, ActionSetParams

    params = ActionSetParams(d0=1.0, d1=1.0, smooth_l=1.0, eps0=0.5)
    pts = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    net = ActionSet(kind="net", dim=2, params=params, net_points=pts)
    o = Oful(2, width_scale=0.0)
    o.update(np.array([1.0, 0.0]), -1.0)
    arm = o.select(net, 1, np.random.default_rng(0))
    assert np.array_equal(arm, [-1.0, 0.0])


def test_oful_select_deterministic_for_fixed_seed():
    a = Oful(3).select(unit_ball(3), 1, np.random.default_rng(5))
    b = Oful(3).select(unit_ball(3), 1, np.random.default_rng(5))
    assert np.array_equal(a, b)


def test_dbgd_validation_and_params():
    with pytest.raises(ValueError):
        Dbgd(2, step_explore=0.0, step_update=0.1)
    with pytest.raises(ValueError):
        Dbgd(2, step_explore=0.1, step_update=-1.0)
    assert dbgd_params(5, 10000) == pytest.approx((0.044721359549995794, 0.01), rel=1e-12)


def test_dbgd_moves_only_when_the_probe_wins():
    # Replay the probe draw with a twin generator to predict the update.
    theta = np.array([1.0, 0.0])
    se, su = dbgd_params(2, 100)
    for seed in range(6):
        pol = Dbgd(2, se, su)
        user = perfect_user(theta)
        u = sample_unit_sphere(2, np.random.default_rng(seed))
        pair, choice = pol.step(unit_ball(2), user, 1, np.random.default_rng(seed))
        assert np.array_equal(pair[0], [0.0, 0.0])
        assert np.allclose(pair[1], se * u)
        if float(theta @ (se * u)) > 1e-12:
            assert choice.index == 1
            assert np.allclose(pol.w, su * u)
        elif float(theta @ (se * u)) < -1e-12:
            assert choice.index == 0
            assert np.array_equal(pol.w, [0.0, 0.0])


def test_dbgd_stays_inside_the_ball():
    pol = Dbgd(2, step_explore=0.9, step_update=0.9)
    user = perfect_user(THETA2)
    rng = np.random.default_rng(3)
    ball = unit_ball(2)
    for t in range(1, 40):
        pair, _ = pol.step(ball, user, t, rng)
        assert np.linalg.norm(pair[1]) <= 1.0 + 1e-12
        assert np.linalg.norm(pol.w) <= 1.0 + 1e-12


def test_doubler_epoch_boundaries():
    # Epoch lengths double, so the epoch counter ticks after rounds 1, 3,
    # 7 and 15, and each new left pool is the previous epoch's rights.
    user = perfect_user(THETA2)
    dbl = Doubler(2)
    rng = np.random.default_rng(7)
    ball = unit_ball(2)
    assert np.array_equal(dbl.left_pool[0], [0.0, 0.0])
    epochs = []
    rights = []
    for t in range(1, 16):
        pair, _ = dbl.step(ball, user, t, rng)
        rights.append(pair[1])
        epochs.append(dbl.epoch)
        assert np.linalg.norm(pair[1]) <= 1.0 + 1e-12
    assert epochs == [1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3, 4]
    assert len(dbl.left_pool) == 8
    for kept, saw in zip(dbl.left_pool, rights[7:15]):
        assert np.array_equal(kept, saw)


def test_doubler_first_left_arm_is_origin():
    user = perfect_user(THETA2)
    dbl = Doubler(2)
    pair, choice = dbl.step(unit_ball(2), user, 1, np.random.default_rng(0))
    assert np.array_equal(pair[0], [0.0, 0.0])
    # A greedy user never prefers the zero-utility origin to a positive arm.
    if float(THETA2 @ pair[1]) > 1e-12:
        assert choice.index == 1


def test_sparring_round_one_ties():
    # Identical priors scoring one shared candidate pool pick the same arm.
    user = perfect_user(THETA2)
    sp = Sparring(2)
    pair, _ = sp.step(unit_ball(2), user, 1, np.random.default_rng(5))
    assert np.array_equal(pair[0], pair[1])


def test_sparring_sides_diverge_with_feedback():
    user = perfect_user(THETA2)
    sp = Sparring(2)
    rng = np.random.default_rng(6)
    ball = unit_ball(2)
    diverged = False
    for t in range(1, 12):
        pair, _ = sp.step(ball, user, t, rng)
        if not np.array_equal(pair[0], pair[1]):
            diverged = True
    assert diverged


def test_duel_feedback_is_binary():
    # The optimist inside Doubler is fed only {0, 1} win labels, never the
    # user's numeric reward; its moment vector is a 0/1-weighted arm sum.
    user = perfect_user(THETA2)
    dbl = Doubler(2)
    pair, choice = dbl.step(unit_ball(2), user, 1, np.random.default_rng(0))
    want = pair[1] if choice.index == 1 else np.zeros(2)
    assert np.array_equal(dbl.learner.moment, want)
    assert user.t == 1
