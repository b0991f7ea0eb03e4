"""Counterfactual regret minimization with RM+ / predictive RM+ at every infoset.

Local regrets live in one flat array aligned with the sequences, so every
infoset's regret vector is a contiguous slice.  All per-infoset work is done
level by level with numpy segment reductions.
"""
from __future__ import annotations

import numpy as np

from .minimizers import TreeplexMinimizer
from .treeplex import Treeplex, behavioral_to_sequence


def _seg_sum(tp: Treeplex, v: np.ndarray) -> np.ndarray:
    """Per-infoset sums of a sequence-aligned vector."""
    return np.bincount(tp.seq_infoset[1:], weights=v[1:], minlength=tp.num_infosets)


def counterfactual_losses(tp: Treeplex, behavioral, loss) -> tuple[np.ndarray, np.ndarray]:
    """Local losses (sequence aligned, entry 0 unused) and infoset values.

    local[(j,a)] = loss[(j,a)] + sum of the values of the infosets below (j,a)
    V[j]         = sum_a behavioral[(j,a)] * local[(j,a)]
    """
    b = tp.check_vector(behavioral, "behavioral")
    loss = tp.check_vector(loss, "loss")
    below = np.zeros(tp.dim)
    local = np.zeros(tp.dim)
    V = np.zeros(tp.num_infosets)
    for lev in tp.levels:
        local[lev.seqs] = loss[lev.seqs] + below[lev.seqs]
        vals = np.bincount(lev.owner, weights=b[lev.seqs] * local[lev.seqs],
                           minlength=len(lev.infosets))
        V[lev.infosets] = vals
        below += np.bincount(lev.parents, weights=vals, minlength=tp.dim)
    return local, V


class CFR(TreeplexMinimizer):
    """CFR+ (``predictive=False``) or PCFR+ (``predictive=True``).

    ``stepsizes`` is an optional per-infoset array; the decisions do not
    depend on it, which is what the tests check.
    """

    stepsize_invariant = True

    def __init__(self, tp: Treeplex, predictive: bool = False, stepsizes=None):
        super().__init__(tp)
        self.predictive = predictive
        if stepsizes is None:
            eta = np.ones(tp.num_infosets)
        else:
            eta = np.asarray(stepsizes, dtype=float)
            if eta.shape != (tp.num_infosets,) or not np.all(eta > 0):
                raise ValueError("stepsizes must be a positive array with one entry per infoset")
        self.eta_seq = np.zeros(tp.dim)
        self.eta_seq[1:] = eta[tp.seq_infoset[1:]]
        self.R = np.zeros(tp.dim)
        self.prev_g = np.zeros(tp.dim)
        self.behavioral = None
        self.local_loss = None
        self.local_values = None

    def _decide(self, R: np.ndarray) -> np.ndarray:
        tot = _seg_sum(self.tp, R)
        inf = self.tp.seq_infoset[1:]
        b = np.empty(self.tp.dim)
        b[0] = 1.0
        pos = tot[inf] > 0
        b[1:] = np.where(pos, R[1:] / np.where(pos, tot[inf], 1.0),
                         1.0 / self.tp.num_actions[inf])
        return b

    def next_strategy(self, prediction=None) -> np.ndarray:
        if self.predictive:
            g = self.prev_g if prediction is None else np.asarray(prediction, dtype=float)
            self.R_hat = np.maximum(0.0, self.R - self.eta_seq * g)
            self.behavioral = self._decide(self.R_hat)
        else:
            self.behavioral = self._decide(self.R)
        self.x = behavioral_to_sequence(self.tp, self.behavioral)
        return self.x

    def observe_loss(self, loss) -> None:
        if self.behavioral is None:
            raise RuntimeError("observe_loss called before next_strategy")
        local, V = counterfactual_losses(self.tp, self.behavioral, loss)
        g = np.zeros(self.tp.dim)
        g[1:] = local[1:] - V[self.tp.seq_infoset[1:]]
        self.R = np.maximum(0.0, self.R - self.eta_seq * g)
        self.prev_g = g
        self.local_loss, self.local_values = local, V
        self.last_loss = np.asarray(loss, dtype=float)


def cfr_plus(tp: Treeplex, stepsizes=None) -> CFR:
    return CFR(tp, predictive=False, stepsizes=stepsizes)


def pcfr_plus(tp: Treeplex, stepsizes=None) -> CFR:
    return CFR(tp, predictive=True, stepsizes=stepsizes)
