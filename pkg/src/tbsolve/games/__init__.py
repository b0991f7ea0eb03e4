"""Benchmark games and the game file format."""
from .efg import Chance, Decision, Terminal, to_sequence_form
from .game import Game
from .goofspiel import goofspiel, goofspiel_tree
from .io import FORMAT, GameFormatError, load, loads, save
from .kuhn import kuhn, kuhn_tree
from .leduc import leduc, leduc_tree

__all__ = ["Chance", "Decision", "FORMAT", "Game", "GameFormatError", "Terminal", "goofspiel",
           "goofspiel_tree", "kuhn", "kuhn_tree", "leduc", "leduc_tree", "load", "loads",
           "save", "to_sequence_form", "parse_game_spec"]


def parse_game_spec(spec: str) -> Game:
    """``kuhn``, ``goofspiel:K``, ``leduc:R,S,C`` or a path to an efgjson file."""
    name, _, arg = spec.partition(":")
    if name == "kuhn" and not arg:
        return kuhn()
    if name == "goofspiel":
        try:
            k = int(arg) if arg else 3
        except ValueError:
            raise ValueError(f"bad goofspiel parameter {arg!r}; expected goofspiel:K") from None
        return goofspiel(k)
    if name == "leduc":
        if not arg:
            return leduc()
        try:
            r, s, c = (int(v) for v in arg.split(","))
        except ValueError:
            raise ValueError(f"bad leduc parameters {arg!r}; expected leduc:R,S,C") from None
        return leduc(r, s, c)
    import os
    if os.path.exists(spec):
        return load(spec)
    raise ValueError(f"unknown game {spec!r} (builtins: kuhn, goofspiel:K, leduc:R,S,C, or a file)")
