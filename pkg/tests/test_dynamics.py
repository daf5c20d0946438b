import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from felix import Q_MAX, SocialGraph, generalized_weights, make_complete, make_er, solve_happiness
from felix.dynamics import (
    DynamicsConfig,
    InitSpec,
    Trajectory,
    project_rows,
    run,
    solve_state,
    step_generalized,
    step_selective,
    summarize,
)
from felix.games import FixedPayoffs, PrisonersDilemma
from felix.games.two_player import two_player_weights


def _pair_state(q1, q2, c=0.5):
    g = make_complete(2)
    return g, solve_state(g, PrisonersDilemma(c), two_player_weights(q1, q2), np.array([q1, q2]))


def test_mixed_rule_single_step_by_hand():
    q1, q2, c = 0.3, 0.6, 0.5
    g, state = _pair_state(q1, q2, c)
    # with thresholds 0.45 and 0.4 player 2 cooperates and player 1 defects
    assert tuple(state.s) == (0.0, 1.0)
    pi = np.array([1.0, -c])
    d = 1 - q1 * q2
    u2 = ((1 - q2) * pi[1] + q2 * (1 - q1) * pi[0]) / d
    g1 = (u2 - pi[0]) / d  # b_11 = 1 / (1 - q1 q2), single neighbor
    new = step_generalized(state, g, PrisonersDilemma(c), DynamicsConfig(rule="mixed"))
    assert new.q[0] == pytest.approx(0.99 * q1 + 0.01 * g1, abs=1e-15)


def test_ascent_rule_single_step_by_hand():
    g, state = _pair_state(0.3, 0.6)
    grad = (state.u[1] - state.pi[0]) * (1 / (1 - 0.18))
    new = step_generalized(state, g, PrisonersDilemma(0.5), DynamicsConfig(rule="ascent", lam=0.05))
    assert new.q[0] == pytest.approx(0.3 + 0.05 * grad, abs=1e-15)


@pytest.mark.parametrize("rule", ["mixed", "ascent"])
def test_selective_step_equals_generalized_step_on_two_nodes(rule):
    game = PrisonersDilemma(0.5)
    cfg_g = DynamicsConfig(rule=rule, lam=0.1)
    cfg_s = DynamicsConfig(rule=rule, lam=0.1, mode="selective")
    for q1, q2 in ((0.3, 0.6), (0.9, 0.1), (0.0, 0.0), (0.7, 0.7)):
        g, state = _pair_state(q1, q2)
        a = step_generalized(state, g, game, cfg_g)
        b = step_selective(state, g, game, cfg_s)
        assert b.q == pytest.approx(a.q, abs=1e-15)
        assert np.array_equal(a.s, b.s)


def test_zero_gradient_at_zero_care_keeps_state():
    g = make_complete(5)
    for rule in ("mixed", "ascent"):
        traj = run(g, PrisonersDilemma(0.5), np.zeros(5), DynamicsConfig(rule=rule))
        assert traj.status == "converged"
        assert np.all(traj.q == 0)


def test_no_steps_gives_static_run():
    g = make_complete(3)
    traj = run(g, PrisonersDilemma(0.5), np.full(3, 0.5), DynamicsConfig(max_steps=0))
    assert traj.status == "static" and traj.converged and traj.steps == 0
    assert traj.q.shape == (1, 3)


def test_config_validation():
    with pytest.raises(ValueError):
        DynamicsConfig(lam=0)
    with pytest.raises(ValueError):
        DynamicsConfig(rule="euler")
    with pytest.raises(ValueError):
        DynamicsConfig(mode="both")
    with pytest.raises(ValueError):
        InitSpec("uniform", low=0.8, high=0.2)


def test_init_kinds():
    rng = np.random.default_rng(0)
    assert np.array_equal(InitSpec("constant", value=0.2).sample(3), [0.2] * 3)
    q = InitSpec("single_seed", value=0.6, node=2).sample(4)
    assert np.array_equal(q, [0, 0, 0.6, 0])
    q = InitSpec("uniform", low=0.25, high=0.75).sample(100, rng)
    assert q.min() >= 0.25 and q.max() < 0.75
    assert InitSpec("constant", value=1.0).sample(2)[0] == Q_MAX
    with pytest.raises(ValueError):
        InitSpec("explicit", values=(0.1, 0.2)).sample(3)


def test_project_rows_respects_constraints():
    A = make_complete(3).adjacency
    P = np.array([[0.0, 0.8, 0.6], [-0.2, 0.0, 0.1], [0.3, 0.3, 0.5]])
    out = project_rows(P, A, 0.9)
    assert np.all(out >= 0) and np.all(out.sum(axis=1) <= 0.9 + 1e-15)
    assert out[2, 2] == 0
    assert out[0, 1] / out[0, 2] == pytest.approx(0.8 / 0.6)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), lam=st.sampled_from([0.05, 0.5, 1.0]), mode=st.sampled_from(["generalized", "selective"]))
def test_projection_keeps_every_step_admissible(seed, lam, mode):
    rng = np.random.default_rng(seed)
    g = make_er(8, 3.0, rng)
    cfg = DynamicsConfig(lam=lam, mode=mode, max_steps=40, rule="ascent")
    traj = run(g, PrisonersDilemma(1.0), InitSpec("uniform", low=0, high=1), cfg, rng)
    assert np.all(traj.q >= 0) and np.all(traj.q <= Q_MAX)
    if mode == "selective":
        assert np.all(traj.weights >= 0) and np.all(traj.weights.sum(axis=1) <= Q_MAX + 1e-15)


def test_runs_are_deterministic():
    def once():
        rng = np.random.default_rng(123)
        g = make_er(20, 4.3, rng)
        return run(g, PrisonersDilemma(1.0), InitSpec("uniform", low=0.25, high=0.75), DynamicsConfig(max_steps=300), rng)

    a, b = once(), once()
    for name in ("q", "s", "pi", "u"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_converged_ascent_has_stationary_clipped_gradient():
    rng = np.random.default_rng(2)
    n = 10
    w = rng.uniform(0, 3, n)
    g = make_complete(n)
    cfg = DynamicsConfig(lam=0.05, rule="ascent")
    traj = run(g, FixedPayoffs(w), InitSpec("uniform", low=0.25, high=0.75), cfg, rng)
    assert traj.status == "converged"
    q = traj.final_q
    sol = solve_happiness(g, generalized_weights(g, q), w)
    from felix import generalized_gradients

    grad = generalized_gradients(g, w, sol.u, sol.b_diag)
    slack = cfg.tol / cfg.lam
    interior = (q > 0) & (q < cfg.q_max)
    assert np.all(np.abs(grad[interior]) <= slack)
    assert np.all(grad[q == 0] <= slack)
    assert np.all(grad[q == cfg.q_max] >= -slack)


def test_selective_weights_grow_towards_happier_neighbors():
    rng = np.random.default_rng(5)
    g = make_er(8, 4.0, rng)
    game = FixedPayoffs(rng.uniform(0, 3, 8))
    P = generalized_weights(g, np.full(8, 0.3))
    state = solve_state(g, game, P, np.full(8, 0.3))
    new = step_selective(state, g, game, DynamicsConfig(mode="selective", lam=1e-3))
    for i, j in g.edges:
        for a, b in ((i, j), (j, i)):
            diff = state.u[b] - state.pi[a]
            if abs(diff) > 1e-12:
                assert np.sign(new.weights[a, b] - P[a, b]) == np.sign(diff)


def test_selective_runs_end_on_the_constraint_boundary():
    rng = np.random.default_rng(11)
    g = make_er(8, 4.0, rng)
    game = FixedPayoffs(rng.uniform(0, 3, 8))
    cfg = DynamicsConfig(mode="selective", lam=0.2, max_steps=20_000)
    traj = run(g, game, np.full(8, 0.3), cfg)
    assert traj.status == "converged"
    P = traj.weights
    for i in range(g.n):
        nbrs = g.neighbors(i)
        if nbrs.size == 0:
            continue
        row = P[i, nbrs]
        on_cap = abs(row.sum() - cfg.q_max) < 1e-9
        has_zero = np.any(row == 0)
        assert on_cap or has_zero


def test_isolated_nodes_keep_their_prosociality():
    g = SocialGraph(3, [(0, 1)])
    traj = run(g, PrisonersDilemma(0.5), np.array([0.5, 0.5, 0.4]), DynamicsConfig(max_steps=50))
    assert np.all(traj.q[:, 2] == 0.4)
    assert list(traj.isolated) == [2]


# -- summaries ----------------------------------------------------------------


def _traj(q, s, pi):
    q, s, pi = (np.atleast_2d(np.asarray(x, dtype=float)) for x in (q, s, pi))
    return Trajectory(q, s, pi, pi, True, 0, "static", np.array([], dtype=int))


def test_summary_of_all_defect():
    rows = summarize(_traj(np.zeros(4), np.zeros(4), np.zeros(4)))
    assert (rows.mean_s[0], rows.mean_pi[0], rows.std_pi[0]) == (0, 0, 0)


def test_summary_uses_population_std():
    rows = summarize(_traj([0.2, 0.4], [1, 0], [1, 3]))
    assert rows.mean_pi[0] == 2 and rows.std_pi[0] == 1
    assert rows.mean_q[0] == pytest.approx(0.3) and rows.mean_s[0] == 0.5


def test_summary_recomputes_bit_exactly():
    rng = np.random.default_rng(0)
    g = make_complete(6)
    traj = run(g, PrisonersDilemma(1.0), InitSpec("uniform", low=0.25, high=0.75), DynamicsConfig(max_steps=50), rng)
    rows = traj.summary()
    assert np.array_equal(rows.mean_pi, traj.pi.mean(axis=1))
    assert np.array_equal(rows.std_pi, np.sqrt(((traj.pi - traj.pi.mean(axis=1, keepdims=True)) ** 2).mean(axis=1)))


def test_summary_rejects_empty_trajectory():
    with pytest.raises(ValueError):
        summarize(Trajectory(np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2)), False, 0, "x", np.array([])))
