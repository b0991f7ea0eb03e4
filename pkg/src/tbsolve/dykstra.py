"""Dykstra's alternating projection, used as an independent oracle.

Slow and simple on purpose: it alternates an explicit weighted
least-squares projection onto the flow subspace with a clamp onto the
orthant and never looks at the tree structure beyond the constraint matrix.
"""
from __future__ import annotations

import numpy as np

from .treeplex import Treeplex


def flow_matrix(tp: Treeplex, fix_root: bool) -> tuple[np.ndarray, np.ndarray]:
    rows = tp.num_infosets + (1 if fix_root else 0)
    B = np.zeros((rows, tp.dim))
    for j, rec in enumerate(tp.infosets):
        B[j, rec.first_seq:rec.last_seq + 1] = 1.0
        B[j, rec.parent] -= 1.0
    c = np.zeros(rows)
    if fix_root:
        B[-1, 0] = 1.0
        c[-1] = 1.0
    return B, c


def dykstra_project(tp: Treeplex, y, kind: str = "cone", r0: float | None = None,
                    weights=None, sweeps: int = 20000, tol: float = 1e-12) -> np.ndarray:
    """Weighted projection onto cone(T), the stable region or T.

    ``y`` may be a single vector or a batch of shape ``(k, n+1)``; the batch
    version runs the sweeps on all rows at once and stops when every row
    has settled.
    """
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    Y = np.atleast_2d(y)
    if Y.shape[1] != tp.dim:
        raise ValueError(f"y has dimension {Y.shape[1]}, expected {tp.dim}")
    w = np.ones(tp.dim) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (tp.dim,) or not np.all(w > 0):
        raise ValueError("weights must be a positive vector of length n+1")
    if kind not in ("cone", "stable", "treeplex"):
        raise ValueError(f"unknown projection kind {kind!r}")
    if kind == "stable" and (r0 is None or r0 <= 0):
        raise ValueError("stable projection needs r0 > 0")

    B, c = flow_matrix(tp, fix_root=(kind == "treeplex"))
    winv = 1.0 / w
    BW = B * winv
    K = np.linalg.solve(BW @ B.T, BW).T  # W^-1 B^T (B W^-1 B^T)^-1, transposed layout

    lower = np.zeros(tp.dim)
    if kind == "stable":
        lower[0] = r0

    def affine(Z):
        return Z - (Z @ B.T - c) @ K.T

    X = Y.copy()
    Pinc = np.zeros_like(X)
    Qinc = np.zeros_like(X)
    for _ in range(int(sweeps)):
        U = affine(X + Pinc)
        Pinc = X + Pinc - U
        Xn = np.maximum(U + Qinc, lower)
        Qinc = U + Qinc - Xn
        moved = np.max(np.abs(Xn - X))
        X = Xn
        if moved < tol:
            break
    return X[0] if single else X
