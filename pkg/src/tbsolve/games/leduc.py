"""Small Leduc-style hold'em with a configurable deck."""
from __future__ import annotations

from .efg import Chance, Decision, Terminal, to_sequence_form
from .game import Game

ANTE = 1
RAISE_SIZES = (2, 4)
MAX_CARDS = 6


def _check_params(ranks: int, suits: int, raise_caps: int) -> None:
    if ranks < 1 or suits < 1:
        raise ValueError("ranks and suits must be positive")
    if ranks * suits > MAX_CARDS:
        raise ValueError(f"a deck of {ranks * suits} cards exceeds the limit of {MAX_CARDS}")
    if ranks * suits < 3:
        raise ValueError("the deck needs at least 3 cards (two private, one public)")
    if not 0 <= raise_caps <= 3:
        raise ValueError("raise cap must be between 0 and 3")


def showdown_winner(r1: int, r2: int, pub: int) -> int:
    """+1 if player 1 wins, -1 if player 2 wins, 0 on a tie."""
    if r1 == pub and r2 != pub:
        return 1
    if r2 == pub and r1 != pub:
        return -1
    return (r1 > r2) - (r1 < r2)


class _Round:
    """Builds one betting round; ``finish(contrib, history)`` continues the game."""

    def __init__(self, rnd, cap, r1, r2, pub, finish):
        self.size = RAISE_SIZES[rnd]
        self.cap = cap
        self.cards = {1: r1, 2: r2}
        self.board = "" if pub is None else str(pub)
        self.finish = finish

    def node(self, history, round_hist, contrib, raises, player):
        other = 3 - player
        key = f"{self.cards[player]}|{self.board}|{history}{round_hist}"
        names, kids = [], []
        if contrib[0] != contrib[1]:
            names.append("fold")
            lost = contrib[player - 1]
            kids.append(Terminal(-lost if player == 1 else lost))
            names.append("call")
            called = (max(contrib),) * 2
            kids.append(self.finish(called, history + round_hist + "c"))
        else:
            names.append("check")
            if round_hist:
                kids.append(self.finish(contrib, history + round_hist + "k"))
            else:
                kids.append(self.node(history, "k", contrib, raises, other))
        if raises < self.cap:
            names.append("raise")
            raised = list(contrib)
            raised[player - 1] = contrib[other - 1] + self.size
            kids.append(self.node(history, round_hist + "r", tuple(raised), raises + 1, other))
        return Decision(player, key, names, kids)


def leduc_tree(ranks: int = 3, suits: int = 2, raise_caps: int = 2):
    """Ante 1; raises of 2 in the first round and 4 in the second.

    Player 1 opens both rounds.  A pair with the public card wins, then the
    higher private rank; equal ranks split the pot.
    """
    _check_params(ranks, suits, raise_caps)
    deck = [r for r in range(ranks) for _ in range(suits)]
    n = len(deck)
    deals = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            r1, r2 = deck[i], deck[j]
            rest = [k for k in range(n) if k not in (i, j)]

            def second(contrib, history, r1=r1, r2=r2, rest=rest):
                outcomes = []
                for k in rest:
                    pub = deck[k]

                    def showdown(c, _h, pub=pub):
                        return Terminal(showdown_winner(r1, r2, pub) * c[0])

                    rnd = _Round(1, raise_caps, r1, r2, pub, showdown)
                    outcomes.append((1.0 / len(rest), rnd.node(history + "/", "", contrib, 0, 1)))
                return Chance(outcomes)

            first = _Round(0, raise_caps, r1, r2, None, second)
            deals.append((1.0 / (n * (n - 1)), first.node("", "", (ANTE, ANTE), 0, 1)))
    return Chance(deals)


def leduc(ranks: int = 3, suits: int = 2, raise_caps: int = 2) -> Game:
    return to_sequence_form(leduc_tree(ranks, suits, raise_caps),
                            f"leduc:{ranks},{suits},{raise_caps}")
