import numpy as np
import pytest

from oracles import random_point, regret
from tbsolve.games import Decision, Terminal, goofspiel, kuhn, to_sequence_form
from tbsolve.selfplay import (ALGORITHMS, ConfigError, RunConfig, RunningAverage, duality_gap,
                              run, theory_eta, weighted_average)
from tbsolve.treeplex import is_member, pure_strategies, uniform_strategy


def matching_pennies():
    heads = Decision(2, "p2", ["h", "t"], [Terminal(1), Terminal(-1)])
    tails = Decision(2, "p2", ["h", "t"], [Terminal(-1), Terminal(1)])
    return to_sequence_form(Decision(1, "p1", ["h", "t"], [heads, tails]), "pennies")


@pytest.mark.parametrize("algo", sorted(ALGORITHMS))
def test_one_iteration_is_uniform(kuhn_game, algo):
    eta = 0.5 if ALGORITHMS[algo][0] else None
    for alt in (False, True):
        res = run(kuhn_game, RunConfig(algo, 1, alternation=alt, eta=eta))
        np.testing.assert_allclose(res.x_avg, uniform_strategy(kuhn_game.treeplex_x), atol=1e-12)
        if not alt:
            np.testing.assert_allclose(res.y_avg, uniform_strategy(kuhn_game.treeplex_y),
                                       atol=1e-12)
        assert len(res.records) == 1


def test_matching_pennies_cfr():
    g = matching_pennies()
    res = run(g, RunConfig("cfr+", 500, alternation=True, weighting="linear"))
    assert res.records[-1].gap_avg <= 0.05


def test_record_cadence(kuhn_game):
    res = run(kuhn_game, RunConfig("cfr+", 95, gap_every=10))
    its = [r.iteration for r in res.records]
    assert its == [1] + list(range(10, 91, 10)) + [95]
    assert all(r.gap_avg >= -1e-9 and r.gap_last >= -1e-9 for r in res.records)
    assert all(b.elapsed_s >= a.elapsed_s for a, b in zip(res.records, res.records[1:]))


def test_target_gap_stops_early(kuhn_game):
    res = run(kuhn_game, RunConfig("pcfr+", 5000, weighting="quadratic", target_gap=1e-3))
    assert res.iterations < 5000
    assert res.records[-1].gap_avg <= 1e-3


def test_on_iterate_callback(kuhn_game):
    seen = []
    run(kuhn_game, RunConfig("ptb+", 5), on_iterate=lambda t, x, y: seen.append(t))
    assert seen == [1, 2, 3, 4, 5]


def test_config_errors(kuhn_game):
    bad = [RunConfig("nope"), RunConfig("ptb+", 0), RunConfig("sc-pomd", 10),
           RunConfig("adagrad-tb+", 10, eta="theory"), RunConfig("ptb+", weighting="cubic"),
           RunConfig("smooth-ptb+", eta=1.0, r0=0.0), RunConfig("sc-pomd", eta=-1.0)]
    for cfg in bad:
        with pytest.raises(ConfigError):
            run(kuhn_game, cfg)


def test_gap_zero_at_equilibrium():
    g = matching_pennies()
    x = np.array([1.0, 0.5, 0.5])
    y = np.array([1.0, 0.5, 0.5])
    assert duality_gap(g, x, y) == pytest.approx(0.0, abs=1e-15)


def test_gap_nonnegative(kuhn_game, rng):
    for _ in range(100):
        x = random_point(kuhn_game.treeplex_x, rng)
        y = random_point(kuhn_game.treeplex_y, rng)
        assert duality_gap(kuhn_game, x, y) >= -1e-12


def test_gap_rejects_infeasible(kuhn_game):
    with pytest.raises(ValueError):
        duality_gap(kuhn_game, np.zeros(13), uniform_strategy(kuhn_game.treeplex_y))


def test_gap_of_uniform_brute_force(kuhn_game):
    g = kuhn_game
    x = uniform_strategy(g.treeplex_x)
    y = uniform_strategy(g.treeplex_y)
    best_y = max(x @ (g.M @ v) for v in pure_strategies(g.treeplex_y))
    best_x = min(u @ (g.M @ y) for u in pure_strategies(g.treeplex_x))
    assert duality_gap(g, x, y) == pytest.approx(best_y - best_x, abs=1e-12)


def test_weighted_average_examples(rng, kuhn_game):
    x = rng.normal(size=4)
    for w in ("uniform", "linear", "quadratic"):
        np.testing.assert_allclose(weighted_average([x, x, x], w), x)
    x1, x2 = rng.normal(size=3), rng.normal(size=3)
    np.testing.assert_allclose(weighted_average([x1, x2], "linear"), (x1 + 2 * x2) / 3)
    np.testing.assert_allclose(weighted_average([x1, x2], "quadratic"), (x1 + 4 * x2) / 5)
    tp = kuhn_game.treeplex_x
    pts = [random_point(tp, rng) for _ in range(30)]
    for w in ("uniform", "linear", "quadratic"):
        assert is_member(tp, weighted_average(pts, w), 1e-9)
    with pytest.raises(ValueError):
        weighted_average([])


def test_running_weights_increase():
    avg = RunningAverage("quadratic")
    totals = []
    for _ in range(5):
        avg.add(np.zeros(2))
        totals.append(avg.total)
    assert np.all(np.diff(totals) > 0)


@pytest.mark.parametrize("game", [kuhn(), goofspiel(3)], ids=["kuhn", "goofspiel3"])
@pytest.mark.parametrize("algo", ["ptb+", "cfr+"])
def test_folk_theorem_simultaneous(game, algo):
    T = 200
    xs, ys = [], []
    res = run(game, RunConfig(algo, T, alternation=False, weighting="uniform", gap_every=T),
              on_iterate=lambda t, x, y: (xs.append(x.copy()), ys.append(y.copy())))
    reg_x = regret(game.treeplex_x, xs, [game.loss_x(y) for y in ys])
    reg_y = regret(game.treeplex_y, ys, [game.loss_y(x) for x in xs])
    assert res.records[-1].gap_avg == pytest.approx((reg_x + reg_y) / T, abs=1e-9)


def test_theory_eta_formula(kuhn_game):
    eta = theory_eta(kuhn_game, 0.1)
    d = 13
    om = kuhn_game.treeplex_x.omega
    assert eta == pytest.approx(0.1 / (np.sqrt(8 * d * om ** 3) * kuhn_game.matrix_norm()))
