"""Goofspiel with ``k`` cards per suit, a random prize order and hidden bids."""
from __future__ import annotations

from .efg import Chance, Decision, Terminal, to_sequence_form
from .game import Game

MAX_CARDS = 4


def goofspiel_tree(k: int):
    """Each round a prize is revealed; player 1 then player 2 bids a card.

    Neither player sees the other's bid, only whether they won, lost or
    tied the round.  The higher bid takes the prize, a tie discards it.
    The last round involves no choice and is resolved automatically.
    Infoset keys are written from the acting player's point of view, so the
    two players' keys coincide in symmetric situations.
    """
    if not 2 <= k <= MAX_CARDS:
        raise ValueError(f"goofspiel needs 2 <= k <= {MAX_CARDS}, got {k}")
    cards = tuple(range(1, k + 1))

    def outcome(b1, b2):
        return "w" if b1 > b2 else ("l" if b1 < b2 else "t")

    flip = {"w": "l", "l": "w", "t": "t"}

    def view(prizes, bids, results):
        return ",".join(f"{p}{b}{r}" for p, b, r in zip(prizes, bids, results))

    def round_(prizes_left, h1, h2, prizes, res1, score):
        if len(prizes_left) == 1:
            # forced final round
            last1 = [c for c in cards if c not in h1][0]
            last2 = [c for c in cards if c not in h2][0]
            p = prizes_left[0]
            s = score + (p if last1 > last2 else (-p if last1 < last2 else 0))
            return Terminal(float(s))
        outcomes = []
        for p in prizes_left:
            rest = tuple(q for q in prizes_left if q != p)
            seen = prizes + (p,)
            hand1 = [c for c in cards if c not in h1]
            hand2 = [c for c in cards if c not in h2]
            kids1 = []
            for b1 in hand1:
                kids2 = []
                for b2 in hand2:
                    r = outcome(b1, b2)
                    gain = p if r == "w" else (-p if r == "l" else 0)
                    kids2.append(round_(rest, h1 + (b1,), h2 + (b2,), seen, res1 + (r,),
                                        score + gain))
                key2 = view(prizes, h2, tuple(flip[r] for r in res1)) + f"|{p}"
                kids1.append(Decision(2, key2, [f"bid{b}" for b in hand2], kids2))
            key1 = view(prizes, h1, res1) + f"|{p}"
            outcomes.append((1.0 / len(prizes_left), Decision(1, key1, [f"bid{b}" for b in hand1],
                                                              kids1)))
        return Chance(outcomes)

    return round_(cards, (), (), (), (), 0)


def goofspiel(k: int = 3) -> Game:
    return to_sequence_form(goofspiel_tree(k), f"goofspiel:{k}")
