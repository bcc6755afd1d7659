import numpy as np
import pytest
from hypothesis import given, strategies as st

from triadic.burst import (BaselineDistribution, BurstPoint, FixedThreshold, RollingThreshold,
                           SpamPlan, baseline, flag_bursts, inject_spam, kl_divergence, nrmse,
                           parse_policy, smooth)
from triadic.oracle import exact_distribution
from triadic.stream import UU, ActivityWindow, SocialActivity, SocialGraph, build_multigraph
from triadic.synth import powerlaw_social, social_window

simplex = st.integers(2, 12).flatmap(
    lambda k: st.lists(st.floats(0, 1), min_size=k, max_size=k).filter(lambda v: sum(v) > 0))


def test_baseline_examples():
    np.testing.assert_allclose(baseline([[0.2, 0.8]]).theta_base, [0.2, 0.8])
    np.testing.assert_allclose(baseline([[1, 0], [0, 1]], eps=0).theta_base, [0.5, 0.5])
    b = baseline([[1, 0]], eps=1e-6).theta_base
    np.testing.assert_allclose(b, np.array([1, 1e-6]) / (1 + 1e-6))
    with pytest.raises(ValueError):
        baseline([])
    with pytest.raises(ValueError):
        baseline([[1, 0], [1, 0, 0]])


def test_kl_examples():
    assert kl_divergence([0.3, 0.7], [0.3, 0.7]) == 0.0
    expected = 0.5 * np.log(0.5 / 0.9) + 0.5 * np.log(0.5 / 0.1)
    assert kl_divergence([0.5, 0.5], [0.9, 0.1]) == pytest.approx(expected, abs=1e-8)
    assert expected == pytest.approx(0.5108, abs=1e-4)
    base = BaselineDistribution(np.array([0.5, 0.5]), [0], 1e-9)
    assert kl_divergence(base, [0.9, 0.1]) == pytest.approx(expected, abs=1e-8)
    with pytest.raises(ValueError):
        kl_divergence([1.0], [0.5, 0.5])


@given(simplex, st.randoms())
def test_kl_nonnegative_and_zero_on_equal(v, r):
    a = np.array(v) / sum(v)
    b = np.array([r.random() + 1e-3 for _ in v])
    b /= b.sum()
    assert kl_divergence(a, b) >= 0
    assert kl_divergence(a, a) == pytest.approx(0.0, abs=1e-12)


def test_smooth_rejects_bad_input():
    with pytest.raises(ValueError):
        smooth([])
    with pytest.raises(ValueError):
        smooth([-0.1, 1.1])


def _series(kls):
    return [BurstPoint(i, k) for i, k in enumerate(kls)]


def test_fixed_policy():
    flags = [p.flagged for p in flag_bursts(_series([0.01, 0.5]), FixedThreshold(0.1))]
    assert flags == [False, True]


def test_rolling_policy():
    assert not any(p.flagged for p in flag_bursts(_series([0.02] * 20), RollingThreshold(7, 3)))
    rng = np.random.default_rng(0)
    kls = list(0.02 + 0.001 * rng.standard_normal(15)) + [0.2]
    out = flag_bursts(_series(kls), RollingThreshold(7, 3))
    assert out[-1].flagged and not any(p.flagged for p in out[7:-1])
    # shorter history than the rolling window falls back to tau
    assert [p.flagged for p in flag_bursts(_series([0.01, 0.5]), RollingThreshold(7, 3, 0.1))] \
        == [False, True]


def test_parse_policy():
    assert parse_policy("fixed:0.2") == FixedThreshold(0.2)
    assert parse_policy("rolling:7:3") == RollingThreshold(7, 3.0)
    for bad in ("fixed:x", "rolling:7", "other"):
        with pytest.raises(ValueError):
            parse_policy(bad)


def test_nrmse_examples():
    np.testing.assert_allclose(nrmse([[0.2, 0.8]] * 3, [0.2, 0.8]), [0, 0])
    assert nrmse([[0.4], [0.6]], [0.5])[0] == pytest.approx(0.2)
    assert np.isnan(nrmse([[0.1, 0.9]], [0.0, 1.0])[0])
    with pytest.raises(ValueError):
        nrmse(np.zeros((0, 2)), [0.5, 0.5])


def _window():
    g = powerlaw_social(300, 3, 0.5, seed=1)
    acts = social_window(g, 1500, np.random.default_rng(1), 0, 1000)
    social = SocialGraph.from_edges([(f"u{a}", f"u{b}") for a, b in g.edges()], directed=False)
    return ActivityWindow(0, 0, 1000, acts), social


def test_inject_spam_shapes():
    w, social = _window()
    same = inject_spam(w, SpamPlan("random", 0), social)
    assert same.activities == w.activities
    r = inject_spam(w, SpamPlan("random", 200, seed=2), social)
    spam = [a for a in r.activities if a.source == "uspammer"]
    assert len(spam) == 200 and len({a.target for a in spam}) == 200
    assert all(w.start <= a.timestamp < w.end for a in spam)
    f = inject_spam(w, SpamPlan("random-friend", 200, seed=2), social)
    spam = [a for a in f.activities if a.source == "uspammer"]
    assert len(spam) == 200
    with pytest.raises(ValueError):
        SpamPlan("random", -1)
    with pytest.raises(ValueError):
        inject_spam(w, SpamPlan("random-friend", 4), SocialGraph())


def test_planted_triangles_move_kl_more_than_random_spam():
    w, social = _window()
    base = exact_distribution(build_multigraph(w, UU), n_override=400).truncated(20)
    users = sorted(social.users)
    kl_tri, kl_spam = [], []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        b = 30
        extra = []
        for k in range(b):
            x, y, z = (users[i] for i in rng.choice(len(users), 3, replace=False))
            extra += [SocialActivity(UU, x, y, 500), SocialActivity(UU, y, z, 500),
                      SocialActivity(UU, x, z, 500)]
        tri = ActivityWindow(0, 0, 1000, sorted(w.activities + extra, key=lambda a: a.timestamp))
        spam = inject_spam(w, SpamPlan("random", 3 * b, seed=seed), social)
        d_tri = exact_distribution(build_multigraph(tri, UU), n_override=400).truncated(20)
        d_spam = exact_distribution(build_multigraph(spam, UU), n_override=400).truncated(20)
        kl_tri.append(kl_divergence(base, d_tri))
        kl_spam.append(kl_divergence(base, d_spam))
    assert np.median(kl_tri) > np.median(kl_spam)
