"""Explicit game trees and their conversion to sequence form."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..treeplex import InfosetRecord, Treeplex
from .game import Game


@dataclass
class Terminal:
    u1: float  # payoff of player 1


@dataclass
class Chance:
    outcomes: list  # list of (probability, node)


@dataclass
class Decision:
    player: int          # 1 or 2
    key: str             # information set identifier, unique per player
    actions: list        # action names
    children: list = field(default_factory=list)


Node = Union[Terminal, Chance, Decision]


class _Builder:
    def __init__(self, player: int):
        self.player = player
        self.index: dict[str, int] = {}
        self.records: list[InfosetRecord] = []
        self.next_seq = 1

    def infoset(self, node: Decision, parent_seq: int) -> int:
        j = self.index.get(node.key)
        if j is None:
            k = len(node.actions)
            if k == 0:
                raise ValueError(f"infoset {node.key!r} has no actions")
            j = len(self.records)
            self.index[node.key] = j
            self.records.append(InfosetRecord(parent_seq, self.next_seq, self.next_seq + k - 1,
                                              node.key))
            self.next_seq += k
        rec = self.records[j]
        if rec.parent != parent_seq or rec.num_actions != len(node.actions):
            raise ValueError(f"infoset {node.key!r} violates perfect recall")
        return rec.first_seq


def to_sequence_form(root: Node, name: str = "game") -> Game:
    """Walk the tree depth-first; chance probabilities are folded into M.

    Infosets are numbered in order of first visit, which is a topological
    order because a parent sequence is always met before its children.
    """
    builders = {1: _Builder(1), 2: _Builder(2)}
    entries: dict[tuple[int, int], float] = {}
    stack = [(root, 0, 0, 1.0)]
    while stack:
        node, s1, s2, p = stack.pop()
        if isinstance(node, Terminal):
            if p * node.u1 != 0:
                key = (s1, s2)
                entries[key] = entries.get(key, 0.0) - p * node.u1
            else:
                entries.setdefault((s1, s2), 0.0)
        elif isinstance(node, Chance):
            for prob, child in reversed(node.outcomes):
                stack.append((child, s1, s2, p * prob))
        elif isinstance(node, Decision):
            b = builders[node.player]
            first = b.infoset(node, s1 if node.player == 1 else s2)
            for a in reversed(range(len(node.actions))):
                child = node.children[a]
                if node.player == 1:
                    stack.append((child, first + a, s2, p))
                else:
                    stack.append((child, s1, first + a, p))
        else:
            raise TypeError(f"unknown node type {type(node).__name__}")
    triplets = [(i, j, v) for (i, j), v in entries.items() if v != 0.0]
    tx = Treeplex(builders[1].records)
    ty = Treeplex(builders[2].records)
    return Game(tx, ty, triplets, name, tree=root)


def count_leaves(root: Node) -> int:
    stack, n = [root], 0
    while stack:
        node = stack.pop()
        if isinstance(node, Terminal):
            n += 1
        elif isinstance(node, Chance):
            stack.extend(c for _, c in node.outcomes)
        else:
            stack.extend(node.children)
    return n
