"""Reading and writing games in the ``efgjson/1`` format (see docs/format.md)."""
from __future__ import annotations

import json
import math
from pathlib import Path

from ..treeplex import InfosetRecord, Treeplex, TreeplexError
from .game import Game

FORMAT = "efgjson/1"


class GameFormatError(ValueError):
    """Malformed game file; the message says where."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None,
                 field: str | None = None):
        where = []
        if path:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field}")
        super().__init__(f"{': '.join(where)}: {message}" if where else message)
        self.line, self.field = line, field


def _treeplex_to_json(tp: Treeplex) -> dict:
    out = []
    for rec in tp.infosets:
        d = {"parent": rec.parent, "first_seq": rec.first_seq, "last_seq": rec.last_seq}
        if rec.label is not None:
            d["label"] = rec.label
        out.append(d)
    return {"infosets": out}


def game_to_json(game: Game) -> dict:
    return {
        "format": FORMAT,
        "name": game.name,
        "treeplex_x": _treeplex_to_json(game.treeplex_x),
        "treeplex_y": _treeplex_to_json(game.treeplex_y),
        "payoff_triplets": [[i, j, v] for i, j, v in game.triplets()],
    }


def save(game: Game, path) -> None:
    doc = game_to_json(game)
    lines = ["{",
             f'  "format": {json.dumps(doc["format"])},',
             f'  "name": {json.dumps(doc["name"])},']
    for side in ("treeplex_x", "treeplex_y"):
        lines.append(f'  "{side}": {{"infosets": [')
        recs = doc[side]["infosets"]
        for k, rec in enumerate(recs):
            lines.append("    " + json.dumps(rec) + ("," if k + 1 < len(recs) else ""))
        lines.append("  ]},")
    lines.append('  "payoff_triplets": [')
    trip = doc["payoff_triplets"]
    for k, t in enumerate(trip):
        lines.append("    " + json.dumps(t) + ("," if k + 1 < len(trip) else ""))
    lines.append("  ]")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n")


def _int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise GameFormatError(f"expected an integer, got {value!r}", field=field)
    return value


def _treeplex_from_json(obj, field: str) -> Treeplex:
    if not isinstance(obj, dict) or "infosets" not in obj:
        raise GameFormatError("expected an object with an 'infosets' list", field=field)
    infs = obj["infosets"]
    if not isinstance(infs, list):
        raise GameFormatError("'infosets' must be a list", field=f"{field}.infosets")
    recs = []
    for k, rec in enumerate(infs):
        f = f"{field}.infosets[{k}]"
        if not isinstance(rec, dict):
            raise GameFormatError("expected an object", field=f)
        for key in ("parent", "first_seq", "last_seq"):
            if key not in rec:
                raise GameFormatError(f"missing key {key!r}", field=f)
        label = rec.get("label")
        if label is not None and not isinstance(label, str):
            raise GameFormatError("label must be a string", field=f"{f}.label")
        recs.append(InfosetRecord(_int(rec["parent"], f"{f}.parent"),
                                  _int(rec["first_seq"], f"{f}.first_seq"),
                                  _int(rec["last_seq"], f"{f}.last_seq"), label))
    try:
        return Treeplex(recs)
    except TreeplexError as exc:
        sub = f"{field}.infosets[{exc.infoset}]" if exc.infoset is not None else field
        err = GameFormatError(f"invalid treeplex: {exc}", field=sub)
        err.infoset = exc.infoset
        raise err from exc


def game_from_json(doc) -> Game:
    if not isinstance(doc, dict):
        raise GameFormatError("top level must be a JSON object")
    fmt = doc.get("format")
    if fmt != FORMAT:
        raise GameFormatError(f"unsupported format {fmt!r}, expected {FORMAT!r}", field="format")
    for key in ("treeplex_x", "treeplex_y", "payoff_triplets"):
        if key not in doc:
            raise GameFormatError(f"missing key {key!r}")
    name = doc.get("name", "game")
    if not isinstance(name, str):
        raise GameFormatError("name must be a string", field="name")
    tx = _treeplex_from_json(doc["treeplex_x"], "treeplex_x")
    ty = _treeplex_from_json(doc["treeplex_y"], "treeplex_y")
    trip = doc["payoff_triplets"]
    if not isinstance(trip, list):
        raise GameFormatError("must be a list", field="payoff_triplets")
    seen = set()
    entries = []
    for k, t in enumerate(trip):
        f = f"payoff_triplets[{k}]"
        if not isinstance(t, list) or len(t) != 3:
            raise GameFormatError("expected [row, column, value]", field=f)
        i, j = _int(t[0], f + "[0]"), _int(t[1], f + "[1]")
        v = t[2]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise GameFormatError(f"expected a finite number, got {v!r}", field=f + "[2]")
        if not 0 <= i < tx.dim:
            raise GameFormatError(f"row {i} out of range 0..{tx.dim - 1}", field=f + "[0]")
        if not 0 <= j < ty.dim:
            raise GameFormatError(f"column {j} out of range 0..{ty.dim - 1}", field=f + "[1]")
        if (i, j) in seen:
            raise GameFormatError(f"duplicate entry ({i}, {j})", field=f)
        seen.add((i, j))
        entries.append((i, j, float(v)))
    return Game(tx, ty, entries, name)


def loads(text: str, path: str | None = None) -> Game:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"JSON parse error: {exc.msg} (column {exc.colno})",
                              path=path, line=exc.lineno) from exc
    try:
        return game_from_json(doc)
    except GameFormatError as exc:
        if path:
            err = GameFormatError(str(exc), path=path)
            err.field = exc.field
            err.infoset = getattr(exc, "infoset", None)
            raise err from exc
        raise


def load(path) -> Game:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise GameFormatError(f"cannot read file: {exc.strerror}", path=str(p)) from exc
    return loads(text, str(p))
