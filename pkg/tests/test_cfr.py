import numpy as np
import pytest

from oracles import random_point, regret, tree_expected_u1
from tbsolve.cfr import CFR, counterfactual_losses
from tbsolve.selfplay import RunConfig, run
from tbsolve.treeplex import (Treeplex, behavioral_to_sequence, is_member, pure_strategies,
                              sequence_to_behavioral, simplex_treeplex, uniform_strategy)


def random_behavioral(tp, rng):
    return sequence_to_behavioral(tp, random_point(tp, rng))


def test_single_infoset():
    tp = simplex_treeplex(2)
    local, V = counterfactual_losses(tp, [1, .5, .5], [0, 1, 3])
    np.testing.assert_allclose(local[1:], [1, 3])
    np.testing.assert_allclose(V, [2])


def test_zero_loss(shapes, rng):
    for tp in shapes.values():
        local, V = counterfactual_losses(tp, random_behavioral(tp, rng), np.zeros(tp.dim))
        assert not local.any() and not V.any()


def test_chain_value_propagates_once():
    # root infoset {1, 2}; sequence 1 leads to infoset {3, 4, 5}
    tp = Treeplex.from_parents([0, 1], [2, 3])
    b = np.array([1, 0.4, 0.6, 0.2, 0.3, 0.5])
    loss = np.array([0.0, 1.0, 2.0, 10.0, 20.0, 30.0])
    local, V = counterfactual_losses(tp, b, loss)
    leaf_value = 0.2 * 10 + 0.3 * 20 + 0.5 * 30
    assert V[1] == pytest.approx(leaf_value)
    np.testing.assert_allclose(local[1:3], [1.0 + leaf_value, 2.0])
    x = behavioral_to_sequence(tp, b)
    assert V[0] == pytest.approx(x @ loss - loss[0])


def test_values_equal_sequence_form_loss(shapes, rng):
    for tp in shapes.values():
        b = random_behavioral(tp, rng)
        loss = rng.normal(size=tp.dim)
        _, V = counterfactual_losses(tp, b, loss)
        x = behavioral_to_sequence(tp, b)
        assert V[tp.root_infosets].sum() == pytest.approx(x @ loss - loss[0])


def test_behavioral_to_sequence(shapes, rng):
    for tp in shapes.values():
        u = np.ones(tp.dim)
        u[1:] = 1.0 / tp.num_actions[tp.seq_infoset[1:]]
        np.testing.assert_allclose(behavioral_to_sequence(tp, u), uniform_strategy(tp))
        for v in pure_strategies(tp)[:5]:
            assert set(np.unique(behavioral_to_sequence(tp, sequence_to_behavioral(tp, v)))) <= {0, 1}
        assert is_member(tp, behavioral_to_sequence(tp, random_behavioral(tp, rng)))


def test_kuhn_expected_loss_matches_tree_walk(kuhn_game, rng):
    g = kuhn_game
    X = np.array([random_point(g.treeplex_x, rng) for _ in range(20)])
    Y = np.array([random_point(g.treeplex_y, rng) for _ in range(20)])
    walk = tree_expected_u1(g.tree, g.treeplex_x, g.treeplex_y, X, Y)
    for k in range(20):
        assert g.value(X[k], Y[k]) == pytest.approx(-walk[k], abs=1e-12)


def test_first_iterate_uniform(shapes):
    for tp in shapes.values():
        for predictive in (False, True):
            np.testing.assert_allclose(CFR(tp, predictive).next_strategy(), uniform_strategy(tp))


@pytest.mark.parametrize("predictive", [False, True])
def test_infoset_stepsize_invariance(shapes, rng, predictive):
    for tp in shapes.values():
        losses = [rng.normal(size=tp.dim) for _ in range(60)]
        etas = rng.choice([0.1, 1.0, 10.0], size=tp.num_infosets)
        runs = [CFR(tp, predictive), CFR(tp, predictive, stepsizes=etas),
                CFR(tp, predictive, stepsizes=np.full(tp.num_infosets, 3.7))]
        for loss in losses:
            xs = [r.next_strategy() for r in runs]
            for x in xs[1:]:
                assert np.max(np.abs(x - xs[0])) <= 1e-10
            for r in runs:
                r.observe_loss(loss)
                assert np.all(r.R >= 0)


def test_behavioral_sums_to_one(shapes, rng):
    tp = shapes["random-d4"]
    rm = CFR(tp, predictive=True)
    for _ in range(20):
        rm.next_strategy()
        sums = np.bincount(tp.seq_infoset[1:], rm.behavioral[1:])
        np.testing.assert_allclose(sums, 1.0)
        rm.observe_loss(rng.normal(size=tp.dim))


def test_laminar_regret_bound(shapes, rng):
    for name in ("two-level", "kuhn", "random-d2"):
        tp = shapes[name]
        rm = CFR(tp)
        T = 40
        xs, losses = [], []
        local_reg = []  # per round: local losses and decisions
        for _ in range(T):
            x = rm.next_strategy()
            b = rm.behavioral.copy()
            loss = rng.normal(size=tp.dim)
            rm.observe_loss(loss)
            xs.append(x)
            losses.append(loss)
            local_reg.append((b, rm.local_loss.copy()))
        realized = regret(tp, xs, losses)
        bound = -np.inf
        for v in pure_strategies(tp):
            bh = sequence_to_behavioral(tp, v)
            total = 0.0
            for j, rec in enumerate(tp.infosets):
                s = slice(rec.first_seq, rec.last_seq + 1)
                reg_j = sum((b[s] - bh[s]) @ L[s] for b, L in local_reg)
                total += v[rec.parent] * reg_j
            bound = max(bound, total)
        assert realized <= bound + 1e-9


def test_kuhn_cfr_plus_converges(kuhn_game):
    res = run(kuhn_game, RunConfig("cfr+", 1000, alternation=True, weighting="linear"))
    assert res.records[-1].gap_avg <= 1e-3
