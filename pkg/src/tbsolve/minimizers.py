"""Regret minimizers over treeplexes and simplexes.

Treeplex-level minimizers share one interface::

    x = rm.next_strategy(prediction=None)   # decision for this round
    rm.observe_loss(loss)                   # feedback for that decision

The Blackwell family wraps a *cone* regret minimizer (something that
produces points of cone(T)) and turns it into a treeplex regret minimizer
via ``x = R / R[0]``, feeding the inner minimizer ``f(x, loss)``.
"""
from __future__ import annotations

import logging

import numpy as np

from .dykstra import dykstra_project
from .projection import project
from .treeplex import Treeplex, f_transform, g_transform, is_cone_member, uniform_strategy

log = logging.getLogger(__name__)

DEFAULT_R0 = 0.1
DEFAULT_DELTA = 1e-6


class ContractError(RuntimeError):
    """An inner minimizer broke its promise to stay inside cone(T)."""


def _check_eta(eta):
    if eta is None or not np.isfinite(eta) or eta <= 0:
        raise ValueError(f"stepsize must be a positive number, got {eta}")
    return float(eta)


def normalize_cone_point(tp: Treeplex, R: np.ndarray) -> np.ndarray:
    """R / <R, a>, with the uniform strategy for the apex."""
    if R[0] <= 0:
        return uniform_strategy(tp)
    return R / R[0]


# ---------------------------------------------------------------------------
# cone regret minimizers


class ConePOMD:
    """Predictive online mirror descent over cone(T) (or the stable region).

    With ``kind="stable"`` every iterate satisfies ``R[0] >= r0``.
    """

    def __init__(self, tp: Treeplex, eta: float = 1.0, kind: str = "cone",
                 r0: float | None = None, init: np.ndarray | None = None):
        self.tp = tp
        self.eta = _check_eta(eta)
        self.kind = kind
        self.r0 = r0
        if kind == "stable" and (r0 is None or r0 <= 0):
            raise ValueError(f"stable region needs r0 > 0, got {r0}")
        self.R_hat = np.zeros(tp.dim) if init is None else np.array(init, dtype=float)
        self.R = None

    def _proj(self, v):
        return project(self.tp, v, self.kind, r0=self.r0)

    def next_decision(self, prediction=None) -> np.ndarray:
        if prediction is None and self.kind == "cone":
            # R_hat is already in the cone and projecting it is the identity
            self.R = self.R_hat.copy()
        else:
            m = 0.0 if prediction is None else prediction
            self.R = self._proj(self.R_hat - self.eta * m)
        return self.R

    def observe(self, f: np.ndarray) -> None:
        self.R_hat = self._proj(self.R_hat - self.eta * f)


class ConeAdaGrad:
    """Diagonal AdaGrad over cone(T) with per-coordinate weighted projections."""

    def __init__(self, tp: Treeplex, eta: float, delta: float = DEFAULT_DELTA):
        self.tp = tp
        self.eta = _check_eta(eta)
        if delta <= 0:
            raise ValueError("delta must be positive")
        self.delta = float(delta)
        self.R = np.zeros(tp.dim)
        self.s = np.zeros(tp.dim)
        self.H = None

    def next_decision(self, prediction=None) -> np.ndarray:
        return self.R

    def _weighted_step(self, direction: np.ndarray) -> None:
        H = np.sqrt(self.s_hat()) + self.delta
        self.H = H
        target = self.R - self.eta * direction / H
        try:
            R = project(self.tp, target, "cone", weights=H)
        except (ValueError, FloatingPointError) as exc:  # pragma: no cover - oracle fallback
            log.warning("weighted projection failed (%s); using the Dykstra oracle", exc)
            R = dykstra_project(self.tp, target, "cone", weights=H)
        self.R = R

    def s_hat(self) -> np.ndarray:
        return self.s

    def observe(self, f: np.ndarray) -> None:
        self.s = self.s + f * f
        self._weighted_step(f)


class ConeAdam(ConeAdaGrad):
    """Adam-style moments, bias corrected before forming the metric."""

    def __init__(self, tp: Treeplex, eta: float, delta: float = DEFAULT_DELTA,
                 beta1: float = 0.9, beta2: float = 0.999):
        super().__init__(tp, eta, delta)
        if not (0 <= beta1 < 1 and 0 <= beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        self.beta1, self.beta2 = float(beta1), float(beta2)
        self.g = np.zeros(tp.dim)
        self.t = 0

    def s_hat(self) -> np.ndarray:
        return self.s / (1.0 - self.beta2 ** self.t)

    def g_hat(self) -> np.ndarray:
        return self.g / (1.0 - self.beta1 ** self.t)

    def observe(self, f: np.ndarray) -> None:
        self.t += 1
        self.s = self.beta2 * self.s + (1.0 - self.beta2) * f * f
        self.g = self.beta1 * self.g + (1.0 - self.beta1) * f
        self._weighted_step(self.g_hat())


# ---------------------------------------------------------------------------
# treeplex regret minimizers


class TreeplexMinimizer:
    """Common bookkeeping: the treeplex, the last decision and the last loss."""

    stepsize_invariant = False

    def __init__(self, tp: Treeplex):
        self.tp = tp
        self.x = None
        self.last_loss = None

    def next_strategy(self, prediction=None) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def observe_loss(self, loss) -> None:  # pragma: no cover - interface
        raise NotImplementedError


class BlackwellTreeplex(TreeplexMinimizer):
    """Blackwell approachability on the treeplex around a cone minimizer.

    ``predictive=True`` passes the previous ``f(x, loss)`` as the
    prediction for the next round (zero on the first round).
    """

    contract_tol = 1e-7

    def __init__(self, tp: Treeplex, inner, predictive: bool = False):
        super().__init__(tp)
        self.inner = inner
        self.predictive = predictive
        self.last_f = None
        self.R = None

    def next_strategy(self, prediction=None) -> np.ndarray:
        if prediction is None and self.predictive:
            prediction = self.last_f
        R = self.inner.next_decision(prediction)
        scale = max(1.0, float(np.max(np.abs(R))))
        if not is_cone_member(self.tp, R, self.contract_tol * scale):
            raise ContractError("inner minimizer returned a point outside cone(T)")
        self.R = R
        self.x = normalize_cone_point(self.tp, R)
        return self.x

    def observe_loss(self, loss) -> None:
        if self.x is None:
            raise RuntimeError("observe_loss called before next_strategy")
        loss = self.tp.check_vector(loss, "loss")
        f = f_transform(self.x, loss)
        self.inner.observe(f)
        self.last_f = f
        self.last_loss = loss


class PTBPlus(BlackwellTreeplex):
    """Predictive treeplex Blackwell+; ``predictive=False`` gives plain TB+."""

    stepsize_invariant = True

    def __init__(self, tp: Treeplex, eta: float = 1.0, predictive: bool = True):
        super().__init__(tp, ConePOMD(tp, eta, "cone"), predictive)

    @property
    def R_hat(self):
        return self.inner.R_hat


class TBPlus(PTBPlus):
    def __init__(self, tp: Treeplex, eta: float = 1.0):
        super().__init__(tp, eta, predictive=False)


class SmoothPTBPlus(BlackwellTreeplex):
    """PTB+ with both projections onto the stable region {R in cone(T), R[0] >= r0}.

    ``init="uniform"`` starts from ``r0 * uniform`` so that the first
    decision is the uniform strategy; ``init="zero"`` starts from the origin.
    """

    def __init__(self, tp: Treeplex, eta: float, r0: float = DEFAULT_R0,
                 predictive: bool = True, init: str = "uniform"):
        if r0 is None or r0 <= 0:
            raise ValueError(f"r0 must be positive, got {r0}")
        if init == "uniform":
            start = r0 * uniform_strategy(tp)
        elif init == "zero":
            start = np.zeros(tp.dim)
        else:
            raise ValueError(f"unknown init {init!r}")
        super().__init__(tp, ConePOMD(tp, eta, "stable", r0=r0, init=start), predictive)
        self.r0 = r0

    @property
    def R_hat(self):
        return self.inner.R_hat


class AdaGradTBPlus(BlackwellTreeplex):
    def __init__(self, tp: Treeplex, eta: float, delta: float = DEFAULT_DELTA):
        super().__init__(tp, ConeAdaGrad(tp, eta, delta), predictive=False)


class AdamTBPlus(BlackwellTreeplex):
    def __init__(self, tp: Treeplex, eta: float, delta: float = DEFAULT_DELTA,
                 beta1: float = 0.9, beta2: float = 0.999):
        super().__init__(tp, ConeAdam(tp, eta, delta, beta1, beta2), predictive=False)


class SCPOMD(TreeplexMinimizer):
    """Single-call predictive OMD directly on the treeplex, started at uniform."""

    def __init__(self, tp: Treeplex, eta: float, x0: np.ndarray | None = None):
        super().__init__(tp)
        self.eta = _check_eta(eta)
        self.prev = uniform_strategy(tp) if x0 is None else tp.check_vector(x0, "x0").copy()
        self.l1 = np.zeros(tp.dim)  # loss of the previous round
        self.l2 = np.zeros(tp.dim)  # loss two rounds back

    def next_strategy(self, prediction=None) -> np.ndarray:
        step = 2.0 * self.l1 - self.l2
        if not np.any(step):
            self.x = self.prev.copy()
        else:
            self.x = project(self.tp, self.prev - self.eta * step, "treeplex")
        return self.x

    def observe_loss(self, loss) -> None:
        loss = self.tp.check_vector(loss, "loss")
        self.l2, self.l1 = self.l1, loss
        self.prev = self.x
        self.last_loss = loss


# ---------------------------------------------------------------------------
# simplex regret minimizers


def rm_decision(R: np.ndarray) -> np.ndarray:
    total = R.sum()
    if total <= 0:
        return np.full(R.size, 1.0 / R.size)
    return R / total


class RMPlus:
    """Regret matching+ on a simplex with ``k`` actions."""

    stepsize_invariant = True

    def __init__(self, k: int, eta: float = 1.0):
        self.k = int(k)
        self.eta = _check_eta(eta)
        self.R = np.zeros(self.k)
        self.x = None

    def next_strategy(self, prediction=None) -> np.ndarray:
        self.x = rm_decision(self.R)
        return self.x

    def observe_loss(self, loss) -> None:
        g = g_transform(self.x, loss)
        self.R = np.maximum(0.0, self.R - self.eta * g)


class PRMPlus(RMPlus):
    """Predictive RM+; the default prediction reuses the previous round."""

    def __init__(self, k: int, eta: float = 1.0):
        super().__init__(k, eta)
        self.prev_g = np.zeros(self.k)
        self.R_hat = None

    def next_strategy(self, prediction=None) -> np.ndarray:
        g = self.prev_g if prediction is None else g_transform_pred(prediction, self.k)
        self.R_hat = np.maximum(0.0, self.R - self.eta * g)
        self.x = rm_decision(self.R_hat)
        return self.x

    def observe_loss(self, loss) -> None:
        g = g_transform(self.x, loss)
        self.R = np.maximum(0.0, self.R - self.eta * g)
        self.prev_g = g


def g_transform_pred(prediction, k: int) -> np.ndarray:
    p = np.asarray(prediction, dtype=float)
    if p.shape != (k,):
        raise ValueError(f"prediction has shape {p.shape}, expected ({k},)")
    return p
