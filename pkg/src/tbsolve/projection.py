"""Exact projection onto cone(T), the stable region and the treeplex itself.

The squared distance from ``y`` to ``t*Z`` (Z a treeplex below some
sequence) is a convex function of the scale ``t``; its derivative is a
strictly increasing piecewise-linear function.  Those derivatives compose
nicely: at an infoset the derivative is the inverse of the sum of the
inverses of the per-action derivatives, and below a sequence the
derivatives of the child infosets simply add up.  Each of them is kept as

    zeta + alpha0 * t + sum_s alpha_s * max(0, t - beta_s)

(see :class:`SmplFn`).  A bottom-up pass builds all of them, a 1-d root
search fixes the scale of the empty sequence, and a top-down pass inverts
the derivatives to recover the minimizer.

The diagonal metric sum_i w_i (x_i - y_i)^2 fits the same recursion: the
action derivative just becomes ``w_a (s - y_a) + sum of child derivatives``.

Everything is vectorized per height level of the treeplex.  The layout of
all piece arrays depends only on the structure, so it is computed once per
treeplex and cached.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .treeplex import Treeplex

MERGE_TOL = 1e-12
KINDS = ("cone", "stable", "treeplex")


@dataclass
class SmplFn:
    """Standard representation of a strictly increasing piecewise-linear function.

    The function lives on ``[lower, inf)``.  Breakpoints are kept sorted and
    strictly increasing; breakpoints closer than ``MERGE_TOL`` are merged by
    summing their increments.
    """
    zeta: float
    alpha0: float
    breakpoints: np.ndarray = field(default_factory=lambda: np.zeros(0))
    increments: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lower: float = 0.0

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float).ravel()
        a = np.asarray(self.increments, dtype=float).ravel()
        if b.shape != a.shape:
            raise ValueError("breakpoints and increments must have the same length")
        order = np.argsort(b, kind="stable")
        b, a = b[order], a[order]
        if b.size > 1:
            new_group = np.r_[True, np.diff(b) > MERGE_TOL]
            starts = np.flatnonzero(new_group)
            b = b[starts]
            a = np.add.reduceat(a, starts)
        self.breakpoints, self.increments = b, a
        self.zeta, self.alpha0 = float(self.zeta), float(self.alpha0)

    def __call__(self, t):
        return smpl_eval(self, t)

    @property
    def num_pieces(self) -> int:
        return int(self.breakpoints.size)

    def slopes(self) -> np.ndarray:
        """Slope before the first breakpoint, then after each breakpoint."""
        return self.alpha0 + np.r_[0.0, np.cumsum(self.increments)]

    def knots(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(knot positions, values, slope to the right) starting at ``lower``."""
        inside = self.breakpoints > self.lower
        b = np.r_[self.lower, self.breakpoints[inside]]
        s = self.slopes()
        first = int(np.count_nonzero(~inside))
        right = s[first:]
        # values by walking the pieces: v_k = v_{k-1} + slope * (b_k - b_{k-1})
        v0 = smpl_eval(self, self.lower)
        vals = v0 + np.r_[0.0, np.cumsum(right[:-1] * np.diff(b))]
        return b, vals, right

    def is_strictly_increasing(self) -> bool:
        _, _, right = self.knots()
        return bool(np.all(right > 0))

    def root(self) -> float:
        return smpl_root(self)

    def __add__(self, other: "SmplFn") -> "SmplFn":
        return SmplFn(self.zeta + other.zeta, self.alpha0 + other.alpha0,
                      np.r_[self.breakpoints, other.breakpoints],
                      np.r_[self.increments, other.increments],
                      max(self.lower, other.lower))


def smpl_eval(f: SmplFn, t):
    t = np.asarray(t, dtype=float)
    hinge = np.maximum(0.0, t[..., None] - f.breakpoints) @ f.increments
    out = f.zeta + f.alpha0 * t + hinge
    return float(out) if out.ndim == 0 else out


def smpl_root(f: SmplFn) -> float:
    """Unique zero of ``f`` on its domain.

    Scans the knots for the first nonnegative value, then solves on that
    linear piece.  Raises ``ValueError`` when ``f`` is positive at the left
    end of the domain (the caller should have branched on that case).
    """
    b, v, right = f.knots()
    if v[0] > 0:
        raise ValueError(f"function is positive on its whole domain (f({f.lower}) = {v[0]})")
    if v[0] == 0:
        return float(b[0])
    k = int(np.searchsorted(v >= 0, True))
    if k == v.size:
        k = v.size - 1
    else:
        k -= 1
    slope = right[k]
    if slope <= 0:
        raise ValueError("function is not strictly increasing near its root")
    return float(b[k] - v[k] / slope)


def _seg_cumsum(x: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Cumulative sums restarting at each index in ``starts`` (which begins with 0).

    The running total is knocked back to roughly zero at every segment
    start, so the roundoff error stays relative to one segment.
    """
    if x.size == 0:
        return x.copy()
    z = x.copy()
    if starts.size > 1:
        totals = np.add.reduceat(x, starts)
        z[starts[1:]] -= totals[:-1]
    return np.cumsum(z)


def _shift_within(x: np.ndarray, starts: np.ndarray, fill: np.ndarray) -> np.ndarray:
    """x[k-1] inside each segment; ``fill`` (one per segment) at the starts."""
    out = np.empty_like(x)
    out[1:] = x[:-1]
    out[starts] = fill
    return out


def _group_starts(owner: np.ndarray) -> np.ndarray:
    if owner.size == 0:
        return np.zeros(0, dtype=np.intp)
    return np.flatnonzero(np.r_[True, owner[1:] != owner[:-1]])


class _LevelPlan:
    """Static index layout for one height level."""

    def __init__(self, tp: Treeplex, lev, lam_off: np.ndarray, lam_len: np.ndarray,
                 lam_base: int):
        self.inf = lev.infosets
        self.parents = lev.parents
        self.seqs = lev.seqs
        self.seq_owner = lev.owner
        J, P = len(lev.infosets), len(lev.seqs)
        self.J, self.P = J, P

        child_inf, child_pos = [], []
        for p, s in enumerate(lev.seqs):
            for c in tp.children[s]:
                child_inf.append(c)
                child_pos.append(p)
        self.child_inf = np.array(child_inf, dtype=np.intp)
        self.child_pos = np.array(child_pos, dtype=np.intp)

        src, own = [], []
        for c, p in zip(child_inf, child_pos):
            src.append(np.arange(lam_off[c], lam_off[c] + lam_len[c]))
            own.append(np.full(lam_len[c], p))
        self.child_src = np.concatenate(src).astype(np.intp) if src else np.zeros(0, np.intp)
        self.child_owner = np.concatenate(own).astype(np.intp) if own else np.zeros(0, np.intp)
        # knots of a single child are already sorted; only merges need a sort
        self.merge_children = bool(np.any(np.bincount(self.child_pos, minlength=P) > 1))
        self.g_starts = _group_starts(self.child_owner)
        self.g_first_owner = self.child_owner[self.g_starts]

        G = np.bincount(self.child_owner, minlength=P)
        goff = np.r_[0, np.cumsum(G)[:-1]]
        self.origin = np.arange(P) + goff
        self.piece_pos = np.arange(self.child_owner.size) + self.child_owner + 1
        E = P + self.child_owner.size
        self.ext_pos = np.repeat(np.arange(P), 1 + G)
        self.ext_inf = self.seq_owner[self.ext_pos]
        E_j = np.bincount(self.ext_inf, minlength=J)
        self.E_starts = np.r_[0, np.cumsum(E_j)[:-1]].astype(np.intp)
        self.L = E_j - 1
        nonstart = np.ones(E, dtype=bool)
        nonstart[self.E_starts] = False
        self.nonstart = nonstart
        self.lam_write = (lam_base + np.arange(E) - self.ext_inf - 1)[nonstart]
        self.lam_rng = slice(lam_base, lam_base + int(self.L.sum()))
        self.lam_owner = np.repeat(np.arange(J), self.L)


class _Plan:
    def __init__(self, tp: Treeplex):
        m = tp.num_infosets
        lam_len = np.zeros(m, dtype=np.intp)
        lam_off = np.zeros(m, dtype=np.intp)
        self.levels = []
        base = 0
        for lev in tp.levels:
            # piece counts of this level depend only on already-planned children
            for j in lev.infosets:
                total = 0
                for s in tp.infosets[j].sequences:
                    total += 1 + sum(int(lam_len[c]) for c in tp.children[s])
                lam_len[j] = total - 1
            offs = np.r_[0, np.cumsum(lam_len[lev.infosets])[:-1]] + base
            lam_off[lev.infosets] = offs
            plan = _LevelPlan(tp, lev, lam_off, lam_len, base)
            self.levels.append(plan)
            base += int(lam_len[lev.infosets].sum())
        self.total_pieces = base
        self.lam_off, self.lam_len = lam_off, lam_len
        self.root_inf = tp.root_infosets
        self.root_src = (np.concatenate([np.arange(lam_off[j], lam_off[j] + lam_len[j])
                                         for j in self.root_inf]).astype(np.intp)
                         if len(self.root_inf) else np.zeros(0, np.intp))
        self.m = m
        self.dim = tp.dim


def _plan(tp: Treeplex) -> _Plan:
    plan = tp._cache.get("projection")
    if plan is None:
        plan = tp._cache["projection"] = _Plan(tp)
    return plan


class _Pass:
    """Result of the upward pass: every infoset's derivative plus the action data."""

    def __init__(self, plan: _Plan, y: np.ndarray, w: np.ndarray):
        self.plan = plan
        self.lam_zeta = np.zeros(plan.m)
        self.lam_alpha0 = np.zeros(plan.m)
        self.lam_beta = np.zeros(plan.total_pieces)
        self.lam_inc = np.zeros(plan.total_pieces)
        self.ext = []
        for lp in plan.levels:
            self.ext.append(self._level(lp, y, w))

    def _level(self, lp: _LevelPlan, y, w):
        ws, ys = w[lp.seqs], y[lp.seqs]
        zeta = -ws * ys
        alpha = ws.copy()
        if lp.child_inf.size:
            zeta += np.bincount(lp.child_pos, self.lam_zeta[lp.child_inf], lp.P)
            alpha += np.bincount(lp.child_pos, self.lam_alpha0[lp.child_inf], lp.P)
        E = lp.P + lp.child_owner.size
        ext_v = np.empty(E)
        ext_c = np.empty(E)
        ext_v[lp.origin] = zeta
        ext_c[lp.origin] = 1.0 / alpha
        if lp.child_src.size:
            # knot form of each action derivative g_a
            b = self.lam_beta[lp.child_src]
            inc = self.lam_inc[lp.child_src]
            if lp.merge_children:
                order = np.lexsort((b, lp.child_owner))
                b, inc = b[order], inc[order]
            own = lp.child_owner
            sigma = alpha[own] + _seg_cumsum(inc, lp.g_starts)
            sigma_prev = _shift_within(sigma, lp.g_starts, alpha[lp.g_first_owner])
            b_prev = _shift_within(b, lp.g_starts, 0.0)
            v = zeta[own] + _seg_cumsum(sigma_prev * (b - b_prev), lp.g_starts)
            # the inverse of g_a, clipped at zero, written in standard form
            ext_v[lp.piece_pos] = v
            ext_c[lp.piece_pos] = 1.0 / sigma - 1.0 / sigma_prev

        # infoset derivative: invert the sum of the clipped inverses
        order = np.lexsort((ext_v, lp.ext_inf))
        sv, sc = ext_v[order], ext_c[order]
        C = _seg_cumsum(sc, lp.E_starts)
        C_prev = _shift_within(C, lp.E_starts, 1.0)
        dv = sv - _shift_within(sv, lp.E_starts, sv[lp.E_starts])
        T = _seg_cumsum(C_prev * dv, lp.E_starts)
        self.lam_zeta[lp.inf] = sv[lp.E_starts]
        self.lam_alpha0[lp.inf] = 1.0 / C[lp.E_starts]
        self.lam_beta[lp.lam_write] = T[lp.nonstart]
        self.lam_inc[lp.lam_write] = (1.0 / C - 1.0 / C_prev)[lp.nonstart]
        return ext_v, ext_c

    def root_fn(self, w0: float = 0.0, y0: float = 0.0, lower: float = 0.0) -> SmplFn:
        p = self.plan
        return SmplFn(float(self.lam_zeta[p.root_inf].sum()) - w0 * y0,
                      float(self.lam_alpha0[p.root_inf].sum()) + w0,
                      self.lam_beta[p.root_src], self.lam_inc[p.root_src], lower)

    def recover(self, t: float) -> np.ndarray:
        p = self.plan
        x = np.zeros(p.dim)
        x[0] = t
        for lp, (ext_v, ext_c) in zip(reversed(p.levels), reversed(self.ext)):
            mass = x[lp.parents]
            r = lp.lam_rng
            mu = self.lam_zeta[lp.inf] + self.lam_alpha0[lp.inf] * mass
            if lp.lam_owner.size:
                mu += np.bincount(lp.lam_owner, self.lam_inc[r] *
                                  np.maximum(0.0, mass[lp.lam_owner] - self.lam_beta[r]), lp.J)
            xs = np.bincount(lp.ext_pos, ext_c * np.maximum(0.0, mu[lp.ext_inf] - ext_v), lp.P)
            np.maximum(xs, 0.0, out=xs)
            # restore exact flow conservation lost to roundoff
            tot = np.bincount(lp.seq_owner, xs, lp.J)
            counts = np.bincount(lp.seq_owner, minlength=lp.J)
            safe = tot > 0
            scale = np.where(safe, mass / np.where(safe, tot, 1.0), 0.0)
            fill = np.where(safe, 0.0, mass / counts)
            xs = xs * scale[lp.seq_owner] + fill[lp.seq_owner]
            x[lp.seqs] = xs
        return x


def _check_weights(tp: Treeplex, weights) -> np.ndarray:
    if weights is None:
        return np.ones(tp.dim)
    w = np.asarray(weights, dtype=float)
    if w.ndim == 0:
        w = np.full(tp.dim, float(w))
    if w.shape != (tp.dim,):
        raise ValueError(f"weights have shape {w.shape}, expected ({tp.dim},)")
    if not np.all(w > 0):
        raise ValueError("weights must be strictly positive")
    return w


def lambda_build(tp: Treeplex, y, weights=None) -> SmplFn:
    """Derivative in ``t`` of 0.5 * min_{z in tZ} sum_i w_i (z_i - y_i)^2.

    ``Z`` is the part of the treeplex below the empty sequence (coordinate 0
    of ``y`` and ``weights`` is not used).
    """
    y = tp.check_vector(y, "y")
    w = _check_weights(tp, weights)
    return _Pass(_plan(tp), y, w).root_fn()


def project(tp: Treeplex, y, kind: str = "cone", r0: float | None = None,
            weights=None) -> np.ndarray:
    """Projection of ``y`` in the metric sum_i w_i (x_i - y_i)^2.

    ``kind`` is ``"cone"`` for cone(T), ``"stable"`` for the part of the
    cone with x_0 >= r0, or ``"treeplex"`` for T itself.
    """
    y = tp.check_vector(y, "y")
    w = _check_weights(tp, weights)
    if kind not in KINDS:
        raise ValueError(f"unknown projection kind {kind!r}; expected one of {KINDS}")
    if kind == "stable":
        if r0 is None or not r0 > 0:
            raise ValueError(f"stable projection needs r0 > 0, got {r0}")
    ps = _Pass(_plan(tp), y, w)
    if kind == "treeplex":
        return ps.recover(1.0)
    lower = float(r0) if kind == "stable" else 0.0
    lam = ps.root_fn(w[0], y[0], lower)
    if smpl_eval(lam, lower) >= 0:
        if kind == "cone":
            return np.zeros(tp.dim)
        return ps.recover(lower)
    return ps.recover(smpl_root(lam))
