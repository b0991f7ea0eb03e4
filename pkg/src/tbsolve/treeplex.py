"""Sequence-form strategy polytopes (treeplexes).

A treeplex over ``n`` sequences lives in ``R^(n+1)``; coordinate 0 is the
empty sequence.  Each infoset owns a contiguous block of sequence indices
and points at the sequence that leads to it.  Infosets are listed in
topological order (every parent sequence belongs to an earlier infoset).

All vector operations here are vectorized per *height level*: infosets of
equal height never depend on each other, so a bottom-up pass is one numpy
sweep per level.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class TreeplexError(ValueError):
    """Structural violation in a treeplex description."""

    def __init__(self, message: str, infoset: int | None = None):
        if infoset is not None:
            message = f"infoset {infoset}: {message}"
        super().__init__(message)
        self.infoset = infoset


@dataclass(frozen=True)
class InfosetRecord:
    parent: int
    first_seq: int
    last_seq: int
    label: str | None = None

    @property
    def num_actions(self) -> int:
        return self.last_seq - self.first_seq + 1

    @property
    def sequences(self) -> range:
        return range(self.first_seq, self.last_seq + 1)


def validate(infosets: "Treeplex | Sequence[InfosetRecord]") -> None:
    """Raise :class:`TreeplexError` on the first violated invariant.

    Checks, per infoset in list order: nonempty action range, ranges inside
    ``1..n`` and pairwise disjoint, then that each parent is the empty
    sequence or a sequence of an *earlier* infoset, and finally that the
    ranges cover every sequence.
    """
    if isinstance(infosets, Treeplex):
        infosets = infosets.infosets
    infosets = list(infosets)
    if not infosets:
        return
    for j, rec in enumerate(infosets):
        if rec.last_seq < rec.first_seq:
            raise TreeplexError("empty action set", j)
        if rec.first_seq < 1:
            raise TreeplexError(
                f"sequence range [{rec.first_seq}, {rec.last_seq}] overlaps the empty sequence", j)
    n = max(rec.last_seq for rec in infosets)
    owner = np.full(n + 1, -1, dtype=np.intp)
    for j, rec in enumerate(infosets):
        block = owner[rec.first_seq:rec.last_seq + 1]
        if np.any(block >= 0):
            other = int(block[block >= 0][0])
            raise TreeplexError(f"overlapping sequence ranges with infoset {other}", j)
        block[:] = j
    for j, rec in enumerate(infosets):
        p = rec.parent
        if p == 0:
            continue
        if p < 0 or p > n:
            raise TreeplexError(f"dangling parent sequence {p} (sequences are 0..{n})", j)
        if owner[p] < 0:
            raise TreeplexError(f"dangling parent sequence {p} (not owned by any infoset)", j)
        if owner[p] >= j:
            raise TreeplexError(
                f"cyclic parent reference: parent sequence {p} belongs to infoset {owner[p]}", j)
    missing = np.flatnonzero(owner[1:] < 0)
    if missing.size:
        raise TreeplexError(f"sequence {int(missing[0]) + 1} is not assigned to any infoset")


@dataclass(frozen=True)
class _Level:
    """Infosets of one height, with their sequences laid out contiguously."""
    infosets: np.ndarray   # (J,) infoset ids
    parents: np.ndarray    # (J,) parent sequence of each infoset
    seqs: np.ndarray       # (P,) sequences, grouped by infoset
    starts: np.ndarray     # (J,) offsets of each infoset's block in ``seqs``
    owner: np.ndarray      # (P,) local infoset index of each position
    counts: np.ndarray     # (J,) number of actions


class Treeplex:
    """Immutable treeplex; build with :meth:`from_parents` or from records."""

    def __init__(self, infosets: Iterable[InfosetRecord]):
        recs = tuple(infosets)
        validate(recs)
        self.infosets = recs
        self.num_infosets = len(recs)
        self.num_sequences = max((r.last_seq for r in recs), default=0)
        self.dim = self.num_sequences + 1

        m, n = self.num_infosets, self.num_sequences
        self.parent = np.array([r.parent for r in recs], dtype=np.intp)
        self.first = np.array([r.first_seq for r in recs], dtype=np.intp)
        self.last = np.array([r.last_seq for r in recs], dtype=np.intp)
        self.num_actions = self.last - self.first + 1
        self.seq_infoset = np.full(n + 1, -1, dtype=np.intp)
        for j, r in enumerate(recs):
            self.seq_infoset[r.first_seq:r.last_seq + 1] = j

        children: list[list[int]] = [[] for _ in range(n + 1)]
        for j, r in enumerate(recs):
            children[r.parent].append(j)
        self.children = tuple(tuple(c) for c in children)
        self.root_infosets = np.array(self.children[0], dtype=np.intp)
        self.num_leaf_sequences = sum(1 for s in range(1, n + 1) if not children[s])

        height = np.zeros(m, dtype=np.intp)
        for j in range(m - 1, -1, -1):
            h = 0
            for s in recs[j].sequences:
                for c in children[s]:
                    h = max(h, height[c])
            height[j] = h + 1
        self.height = height

        obs_depth = np.zeros(m, dtype=np.intp)
        for j, r in enumerate(recs):
            above = 0 if r.parent == 0 else obs_depth[self.seq_infoset[r.parent]]
            observed = 1 if len(children[r.parent]) > 1 else 0
            obs_depth[j] = above + 1 + observed
        self.depth = int(obs_depth.max()) if m else 0

        self.seq_order = (np.concatenate([np.arange(r.first_seq, r.last_seq + 1) for r in recs])
                          if m else np.zeros(0, dtype=np.intp))
        self.infoset_starts = np.concatenate([[0], np.cumsum(self.num_actions)[:-1]]).astype(np.intp) \
            if m else np.zeros(0, dtype=np.intp)
        self.levels = tuple(self._make_level(np.flatnonzero(height == h))
                            for h in range(1, int(height.max(initial=0)) + 1))
        self._cache: dict = {}

    def _make_level(self, ids: np.ndarray) -> _Level:
        counts = self.num_actions[ids]
        seqs = np.concatenate([np.arange(self.first[j], self.last[j] + 1) for j in ids])
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(np.intp)
        owner = np.repeat(np.arange(len(ids)), counts)
        return _Level(ids, self.parent[ids], seqs.astype(np.intp), starts, owner, counts)

    @classmethod
    def from_parents(cls, parents: Sequence[int], num_actions: Sequence[int],
                     labels: Sequence[str | None] | None = None) -> "Treeplex":
        """Contiguous layout: infoset ``j`` gets the next ``num_actions[j]`` indices."""
        recs, nxt = [], 1
        for j, (p, k) in enumerate(zip(parents, num_actions)):
            label = labels[j] if labels is not None else None
            recs.append(InfosetRecord(int(p), nxt, nxt + int(k) - 1, label))
            nxt += int(k)
        return cls(recs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Treeplex) and self.infosets == other.infosets

    def __hash__(self) -> int:
        return hash(self.infosets)

    def __repr__(self) -> str:
        return (f"Treeplex(n={self.num_sequences}, m={self.num_infosets}, "
                f"l={self.num_leaf_sequences}, d={self.depth})")

    def check_vector(self, v, name: str = "vector") -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"{name} has shape {v.shape}, expected ({self.dim},)")
        return v

    @cached_property
    def omega(self) -> float:
        """max ||x||_2 over the treeplex.

        Vertices are 0/1 vectors, so ||x||^2 = <x, 1> there and the maximum
        of the convex norm is a linear maximization over vertices.
        """
        _, val = best_response(self, -np.ones(self.dim))
        return float(np.sqrt(-val))


def simplex_treeplex(k: int) -> Treeplex:
    """The treeplex {1} x Delta^k: one root infoset with ``k`` actions."""
    return Treeplex.from_parents([0], [k])


def random_treeplex(rng: np.random.Generator, depth: int, max_actions: int = 3,
                    max_children: int = 2, max_sequences: int = 60) -> Treeplex:
    """Random treeplex of exactly ``depth`` levels of infosets (for tests and benchmarks)."""
    parents: list[int] = []
    actions: list[int] = []
    nxt = 1

    def add(parent: int, level: int) -> None:
        nonlocal nxt
        k = int(rng.integers(1 if level else 2, max_actions + 1))
        # keep one sequence per level still needed by the forced chain
        room = max_sequences - (depth - 1 - level) - nxt + 1
        k = max(1, min(k, room))
        parents.append(parent)
        actions.append(k)
        seqs = range(nxt, nxt + k)
        nxt += k
        if level + 1 >= depth:
            return
        for s in seqs:
            # the first sequence of the first infoset keeps the chain going
            forced = level + 1 < depth and s == seqs[0]
            c = int(rng.integers(0, max_children + 1))
            if forced:
                c = max(c, 1)
            for _ in range(c):
                if not forced and nxt + (depth - 1 - level) > max_sequences:
                    return
                add(s, level + 1)
                forced = False

    for _ in range(int(rng.integers(1, 3))):
        if nxt + depth > max_sequences:
            break
        add(0, 0)
    return Treeplex.from_parents(parents, actions)


def _segment_sums(tp: Treeplex, x: np.ndarray) -> np.ndarray:
    if tp.num_infosets == 0:
        return np.zeros(0)
    return np.add.reduceat(x[tp.seq_order], tp.infoset_starts)


def is_cone_member(tp: Treeplex, R, tol: float = DEFAULT_TOL) -> bool:
    """R >= 0 and flow conservation at every infoset (no constraint on R[0])."""
    R = tp.check_vector(R, "R")
    if np.any(R < -tol):
        return False
    return bool(np.all(np.abs(_segment_sums(tp, R) - R[tp.parent]) <= tol))


def is_member(tp: Treeplex, x, tol: float = DEFAULT_TOL) -> bool:
    x = tp.check_vector(x, "x")
    return abs(x[0] - 1.0) <= tol and is_cone_member(tp, x, tol)


def uniform_strategy(tp: Treeplex) -> np.ndarray:
    x = np.zeros(tp.dim)
    x[0] = 1.0
    for lev in reversed(tp.levels):
        x[lev.seqs] = (x[lev.parents] / lev.counts)[lev.owner]
    return x


def behavioral_to_sequence(tp: Treeplex, behavioral) -> np.ndarray:
    """Sequence-form image of a behavioral profile.

    ``behavioral`` is a flat length-``n+1`` array whose block for infoset j
    holds that infoset's action distribution (entry 0 is ignored).
    """
    b = tp.check_vector(behavioral, "behavioral")
    x = np.zeros(tp.dim)
    x[0] = 1.0
    for lev in reversed(tp.levels):
        x[lev.seqs] = x[lev.parents][lev.owner] * b[lev.seqs]
    return x


def sequence_to_behavioral(tp: Treeplex, x) -> np.ndarray:
    """Inverse of :func:`behavioral_to_sequence`; unreached infosets get uniform."""
    x = tp.check_vector(x, "x")
    b = np.zeros(tp.dim)
    b[0] = 1.0
    for lev in tp.levels:
        mass = x[lev.parents][lev.owner]
        uni = (1.0 / lev.counts)[lev.owner]
        with np.errstate(invalid="ignore", divide="ignore"):
            b[lev.seqs] = np.where(mass > 0, x[lev.seqs] / np.where(mass > 0, mass, 1.0), uni)
    return b


def f_transform(x, loss) -> np.ndarray:
    """loss - <x, loss> a with a = e_0: only coordinate 0 changes."""
    x = np.asarray(x, dtype=float)
    loss = np.asarray(loss, dtype=float)
    if x.shape != loss.shape:
        raise ValueError(f"dimension mismatch: x {x.shape} vs loss {loss.shape}")
    out = loss.copy()
    out[0] -= float(x @ loss)
    return out


def g_transform(x, loss) -> np.ndarray:
    """loss - <x, loss> 1 for a point on the simplex."""
    x = np.asarray(x, dtype=float)
    loss = np.asarray(loss, dtype=float)
    if x.shape != loss.shape:
        raise ValueError(f"dimension mismatch: x {x.shape} vs loss {loss.shape}")
    return loss - float(x @ loss)


def best_response(tp: Treeplex, loss) -> tuple[np.ndarray, float]:
    """argmin over the treeplex of <x, loss>, as a vertex, and its value.

    Bottom-up dynamic program; ties go to the lowest action index.
    """
    loss = tp.check_vector(loss, "loss")
    below = np.zeros(tp.dim)
    choice = []
    for lev in tp.levels:
        cost = loss[lev.seqs] + below[lev.seqs]
        best = np.minimum.reduceat(cost, lev.starts)
        pos = np.arange(cost.size)
        hit = np.where(cost == best[lev.owner], pos, cost.size)
        choice.append(lev.seqs[np.minimum.reduceat(hit, lev.starts)])
        below += np.bincount(lev.parents, weights=best, minlength=tp.dim)
    x = np.zeros(tp.dim)
    x[0] = 1.0
    for lev, pick in zip(reversed(tp.levels), reversed(choice)):
        x[pick] = x[lev.parents]
    return x, float(loss[0] + below[0])


def pure_strategies(tp: Treeplex) -> list[np.ndarray]:
    """Enumerate every vertex of the treeplex (exponential; small trees only)."""
    def expand(j: int) -> list[dict[int, float]]:
        out = []
        for s in tp.infosets[j].sequences:
            partial = [{s: 1.0}]
            for c in tp.children[s]:
                partial = [{**p, **q} for p in partial for q in expand(c)]
            out.extend(partial)
        return out

    combos: list[dict[int, float]] = [{}]
    for j in tp.root_infosets:
        combos = [{**p, **q} for p in combos for q in expand(int(j))]
    verts = []
    for c in combos:
        v = np.zeros(tp.dim)
        v[0] = 1.0
        for s, val in c.items():
            v[s] = val
        verts.append(v)
    return verts
