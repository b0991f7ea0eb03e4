"""Three-card Kuhn poker."""
from __future__ import annotations

from itertools import permutations

from .efg import Chance, Decision, Terminal, to_sequence_form
from .game import Game

CARDS = ("J", "Q", "K")


def kuhn_tree():
    """Ante 1, one bet of size 1; player 1 acts first.

    Histories: c = check, b = bet, f = fold, k = call.
    """
    deals = []
    for c1, c2 in permutations(range(3), 2):
        win = 1 if c1 > c2 else -1
        n1, n2 = CARDS[c1], CARDS[c2]
        node = Decision(1, f"{n1}:", ["check", "bet"], [
            Decision(2, f"{n2}:c", ["check", "bet"], [
                Terminal(win),
                Decision(1, f"{n1}:cb", ["fold", "call"], [Terminal(-1), Terminal(2 * win)]),
            ]),
            Decision(2, f"{n2}:b", ["fold", "call"], [Terminal(1), Terminal(2 * win)]),
        ])
        deals.append((1.0 / 6.0, node))
    return Chance(deals)


def kuhn() -> Game:
    return to_sequence_form(kuhn_tree(), "kuhn")
