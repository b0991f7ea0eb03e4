"""Self-play loops, iterate averaging and the duality gap."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .cfr import CFR
from .games.game import Game
from .minimizers import (DEFAULT_DELTA, DEFAULT_R0, SCPOMD, AdaGradTBPlus, AdamTBPlus, PTBPlus,
                         SmoothPTBPlus, TBPlus)
from .treeplex import Treeplex, best_response, is_member

ETA_GRID = (0.05, 0.1, 0.5, 1.0, 2.0, 5.0)
WEIGHTINGS = ("uniform", "linear", "quadratic")

# algorithm id -> (needs eta, stepsize invariant)
ALGORITHMS = {
    "cfr+": (False, True),
    "pcfr+": (False, True),
    "tb+": (False, True),
    "ptb+": (False, True),
    "smooth-ptb+": (True, False),
    "adagrad-tb+": (True, False),
    "adam-tb+": (True, False),
    "sc-pomd": (True, False),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    algorithm: str = "ptb+"
    iterations: int = 1000
    alternation: bool = True
    weighting: str = "uniform"
    eta: float | str | None = None
    r0: float = DEFAULT_R0
    gap_every: int = 10
    seed: int = 0
    delta: float = DEFAULT_DELTA
    beta1: float = 0.9
    beta2: float = 0.999
    target_gap: float | None = None

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; "
                              f"choose from {', '.join(ALGORITHMS)}")
        if not isinstance(self.iterations, int) or self.iterations < 1:
            raise ConfigError("iterations must be a positive integer")
        if self.gap_every < 1:
            raise ConfigError("gap_every must be a positive integer")
        if self.weighting not in WEIGHTINGS:
            raise ConfigError(f"unknown weighting {self.weighting!r}; choose from {WEIGHTINGS}")
        needs_eta, _ = ALGORITHMS[self.algorithm]
        if needs_eta:
            if self.eta is None:
                grid = ", ".join(f"{e:g}" for e in ETA_GRID)
                raise ConfigError(f"--eta is required for {self.algorithm} "
                                  f"(suggested grid: {{{grid}}})")
            if self.eta == "theory" and self.algorithm != "smooth-ptb+":
                raise ConfigError("--eta theory is only defined for smooth-ptb+")
            if self.eta != "theory" and not (isinstance(self.eta, (int, float)) and self.eta > 0):
                raise ConfigError(f"eta must be positive, got {self.eta}")
        if self.algorithm == "smooth-ptb+" and not (self.r0 and self.r0 > 0):
            raise ConfigError("smooth-ptb+ needs r0 > 0")


@dataclass
class RunRecord:
    iteration: int
    gap_avg: float
    gap_last: float
    elapsed_s: float


@dataclass
class RunResult:
    records: list
    x_avg: np.ndarray
    y_avg: np.ndarray
    x_last: np.ndarray
    y_last: np.ndarray
    iterations: int
    eta: float | None = None
    extra: dict = field(default_factory=dict)


def duality_gap(game: Game, x, y, check: bool = True, tol: float = 1e-7) -> float:
    """max_y' <x, M y'> - min_x' <x', M y>."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if check:
        if not is_member(game.treeplex_x, x, tol):
            raise ValueError("x is not a feasible strategy")
        if not is_member(game.treeplex_y, y, tol):
            raise ValueError("y is not a feasible strategy")
    _, vy = best_response(game.treeplex_y, game.loss_y(x))
    _, vx = best_response(game.treeplex_x, game.loss_x(y))
    return float(-vy - vx)


def weight(t: int, weighting: str) -> float:
    if weighting == "uniform":
        return 1.0
    if weighting == "linear":
        return float(t)
    if weighting == "quadratic":
        return float(t) * t
    raise ValueError(f"unknown weighting {weighting!r}")


class RunningAverage:
    """Incremental weighted mean with weights 1, t or t^2."""

    def __init__(self, weighting: str = "uniform"):
        weight(1, weighting)
        self.weighting = weighting
        self.total = 0.0
        self.mean = None
        self.t = 0

    def add(self, x) -> np.ndarray:
        self.t += 1
        w = weight(self.t, self.weighting)
        self.total += w
        x = np.asarray(x, dtype=float)
        if self.mean is None:
            self.mean = x.copy()
        else:
            self.mean += (w / self.total) * (x - self.mean)
        return self.mean


def weighted_average(iterates: Iterable, weighting: str = "uniform") -> np.ndarray:
    avg = RunningAverage(weighting)
    for x in iterates:
        avg.add(x)
    if avg.mean is None:
        raise ValueError("empty iterate stream")
    return avg.mean


def omega_hat(game: Game) -> float:
    return max(game.treeplex_x.omega, game.treeplex_y.omega)


def theory_eta(game: Game, r0: float = DEFAULT_R0) -> float:
    """R0 / (sqrt(8 d Omega^3) ||M||) with d = max(n1, n2) + 1."""
    d = max(game.treeplex_x.num_sequences, game.treeplex_y.num_sequences) + 1
    w = omega_hat(game)
    return r0 / (math.sqrt(8.0 * d * w ** 3) * game.matrix_norm())


def make_minimizer(tp: Treeplex, cfg: RunConfig, eta: float | None):
    a = cfg.algorithm
    if a == "cfr+":
        return CFR(tp, predictive=False)
    if a == "pcfr+":
        return CFR(tp, predictive=True)
    if a == "tb+":
        return TBPlus(tp)
    if a == "ptb+":
        return PTBPlus(tp)
    if a == "smooth-ptb+":
        return SmoothPTBPlus(tp, eta, cfg.r0)
    if a == "adagrad-tb+":
        return AdaGradTBPlus(tp, eta, cfg.delta)
    if a == "adam-tb+":
        return AdamTBPlus(tp, eta, cfg.delta, cfg.beta1, cfg.beta2)
    if a == "sc-pomd":
        return SCPOMD(tp, eta)
    raise ConfigError(f"unknown algorithm {a!r}")


def resolve_eta(game: Game, cfg: RunConfig) -> float | None:
    if cfg.eta == "theory":
        return theory_eta(game, cfg.r0)
    if cfg.eta is None:
        return None
    return float(cfg.eta)


def run(game: Game, cfg: RunConfig, on_iterate: Callable | None = None,
        clock: Callable[[], float] = time.perf_counter) -> RunResult:
    """Self-play of one algorithm against itself.

    Without alternation both players commit to x_t and y_t before seeing any
    loss.  With alternation the y-player sees the loss -M^T x_t before
    choosing y_t.  ``on_iterate(t, x_t, y_t)`` is called every iteration.
    Gaps are recorded at t = 1, every ``gap_every`` iterations and at the end.
    """
    cfg.validate()
    eta = resolve_eta(game, cfg)
    X = make_minimizer(game.treeplex_x, cfg, eta)
    Y = make_minimizer(game.treeplex_y, cfg, eta)
    avg_x = RunningAverage(cfg.weighting)
    avg_y = RunningAverage(cfg.weighting)
    records = []
    start = clock()
    T = cfg.iterations
    x = y = None
    if cfg.alternation:
        # the y-player's opening decision only exists to receive -M^T x_1
        Y.next_strategy()
    for t in range(1, T + 1):
        if cfg.alternation:
            x = X.next_strategy()
            Y.observe_loss(game.loss_y(x))
            y = Y.next_strategy()
            X.observe_loss(game.loss_x(y))
        else:
            x = X.next_strategy()
            y = Y.next_strategy()
            X.observe_loss(game.loss_x(y))
            Y.observe_loss(game.loss_y(x))
        avg_x.add(x)
        avg_y.add(y)
        if on_iterate is not None:
            on_iterate(t, x, y)
        if t == 1 or t % cfg.gap_every == 0 or t == T:
            g_avg = duality_gap(game, avg_x.mean, avg_y.mean, check=False)
            g_last = duality_gap(game, x, y, check=False)
            records.append(RunRecord(t, g_avg, g_last, clock() - start))
            if cfg.target_gap is not None and g_avg <= cfg.target_gap:
                break
    return RunResult(records, avg_x.mean, avg_y.mean, x, y, t, eta)
