"""Two-player zero-sum games in sequence form."""
from __future__ import annotations

import numpy as np
from scipy import sparse

from ..treeplex import Treeplex


class Game:
    """Treeplexes of both players plus the loss matrix M of the x-player.

    The x-player receives loss ``M @ y`` and the y-player ``-M.T @ x``;
    ``<x, M y>`` is the expected payoff of the y-player.
    """

    def __init__(self, treeplex_x: Treeplex, treeplex_y: Treeplex, triplets, name: str = "game",
                 tree=None):
        self.treeplex_x = treeplex_x
        self.treeplex_y = treeplex_y
        self.name = name
        self.tree = tree
        rows, cols, vals = _unpack(triplets)
        shape = (treeplex_x.dim, treeplex_y.dim)
        if rows.size:
            if rows.min() < 0 or rows.max() >= shape[0]:
                raise ValueError("payoff row index out of range")
            if cols.min() < 0 or cols.max() >= shape[1]:
                raise ValueError("payoff column index out of range")
            keys = rows * shape[1] + cols
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate (row, column) pair in payoff triplets")
        self.M = sparse.csr_matrix((vals, (rows, cols)), shape=shape)
        self.MT = self.M.T.tocsr()

    @property
    def nnz(self) -> int:
        return int(self.M.nnz)

    def triplets(self) -> list[tuple[int, int, float]]:
        coo = self.M.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(int(coo.row[k]), int(coo.col[k]), float(coo.data[k])) for k in order]

    def loss_x(self, y) -> np.ndarray:
        return self.M @ np.asarray(y, dtype=float)

    def loss_y(self, x) -> np.ndarray:
        return -(self.MT @ np.asarray(x, dtype=float))

    def value(self, x, y) -> float:
        """<x, M y>: expected loss of the x-player."""
        return float(np.asarray(x, dtype=float) @ (self.M @ np.asarray(y, dtype=float)))

    def matrix_norm(self) -> float:
        """Largest l2 norm of a row or a column of M."""
        sq = self.M.multiply(self.M)
        rows = np.sqrt(np.asarray(sq.sum(axis=1)).ravel())
        cols = np.sqrt(np.asarray(sq.sum(axis=0)).ravel())
        return float(max(rows.max(initial=0.0), cols.max(initial=0.0)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Game):
            return NotImplemented
        return (self.name == other.name and self.treeplex_x == other.treeplex_x
                and self.treeplex_y == other.treeplex_y and self.triplets() == other.triplets())

    __hash__ = None

    def __repr__(self) -> str:
        return f"Game({self.name!r}, x={self.treeplex_x!r}, y={self.treeplex_y!r}, nnz={self.nnz})"


def _unpack(triplets):
    if sparse.issparse(triplets):
        coo = triplets.tocoo()
        return coo.row.astype(np.intp), coo.col.astype(np.intp), coo.data.astype(float)
    t = list(triplets)
    if not t:
        return np.zeros(0, np.intp), np.zeros(0, np.intp), np.zeros(0)
    arr = np.asarray(t, dtype=float)
    rows, cols = arr[:, 0], arr[:, 1]
    if np.any(rows != np.round(rows)) or np.any(cols != np.round(cols)):
        raise ValueError("payoff indices must be integers")
    return rows.astype(np.intp), cols.astype(np.intp), arr[:, 2]
