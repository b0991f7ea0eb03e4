"""Command-line interface: ``tbsolve {solve,sweep,project,bestresp,info}``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .dykstra import dykstra_project
from .games import GameFormatError, parse_game_spec
from .minimizers import DEFAULT_R0
from .projection import KINDS, project
from .selfplay import ALGORITHMS, ETA_GRID, WEIGHTINGS, ConfigError, RunConfig, run
from .treeplex import TreeplexError, best_response

CSV_HEADER = "iter,gap_avg,gap_last,elapsed_s"
SWEEP_HEADER = "row,eta,gap_avg,gap_last,elapsed_s"


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _eta(text: str):
    if text == "theory":
        return text
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid eta {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("eta must be positive")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tbsolve", description="Treeplex Blackwell solvers for zero-sum games.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def game_arg(sp):
        sp.add_argument("--game", required=True,
                        help="kuhn, goofspiel:K, leduc:R,S,C or an efgjson file")

    def run_args(sp):
        game_arg(sp)
        sp.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
        sp.add_argument("--iters", type=_positive_int, default=1000)
        sp.add_argument("--alt", action="store_true", help="alternating self-play")
        sp.add_argument("--weights", choices=WEIGHTINGS, default="uniform")
        sp.add_argument("--r0", type=float, default=DEFAULT_R0)
        sp.add_argument("--gap-every", type=_positive_int, default=10)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--no-time", action="store_true",
                        help="write 0 for elapsed_s so output is byte-stable")
        sp.add_argument("--output", "-o", help="write CSV here instead of stdout")

    s = sub.add_parser("solve", help="run self-play and write a convergence CSV")
    run_args(s)
    s.add_argument("--eta", type=_eta, help="stepsize (or 'theory' for smooth-ptb+)")

    sw = sub.add_parser("sweep", help="run the stepsize grid and report the best")
    run_args(sw)

    pr = sub.add_parser("project", help="project a vector onto cone(T), stable region or T")
    game_arg(pr)
    pr.add_argument("--player", type=int, choices=(1, 2), default=1)
    pr.add_argument("--kind", choices=KINDS, default="cone")
    pr.add_argument("--r0", type=float, default=DEFAULT_R0)
    pr.add_argument("--vector", required=True, help="JSON file holding an array of length n+1")
    pr.add_argument("--weights", help="JSON file with positive weights")
    pr.add_argument("--check", action="store_true", help="compare with the Dykstra oracle")

    br = sub.add_parser("bestresp", help="best response to a loss vector")
    game_arg(br)
    br.add_argument("--player", type=int, choices=(1, 2), default=1)
    br.add_argument("--loss", required=True, help="JSON file holding an array of length n+1")

    inf = sub.add_parser("info", help="print treeplex sizes")
    game_arg(inf)
    return p


def _load_game(spec):
    try:
        return parse_game_spec(spec)
    except (GameFormatError, TreeplexError, ValueError) as exc:
        raise CliError(str(exc)) from exc


def _load_vector(path, name):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {name} file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed {name} file {path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in data):
        raise CliError(f"malformed {name} file {path}: expected a JSON array of numbers")
    return np.asarray(data, dtype=float)


def _fmt(v: float) -> str:
    return repr(float(v))


def _config(args, eta) -> RunConfig:
    return RunConfig(algorithm=args.algo, iterations=args.iters, alternation=args.alt,
                     weighting=args.weights, eta=eta, r0=args.r0, gap_every=args.gap_every,
                     seed=args.seed)


def _write(args, text: str, out) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_solve(args, out):
    game = _load_game(args.game)
    cfg = _config(args, args.eta)
    try:
        cfg.validate()
    except ConfigError as exc:
        raise CliError(str(exc)) from exc
    res = run(game, cfg)
    lines = [CSV_HEADER]
    for r in res.records:
        el = 0.0 if args.no_time else r.elapsed_s
        lines.append(f"{r.iteration},{_fmt(r.gap_avg)},{_fmt(r.gap_last)},{el:.6f}")
    _write(args, "\n".join(lines) + "\n", out)


def _sweep_point(job):
    spec, cfg = job
    game = parse_game_spec(spec)
    res = run(game, cfg)
    last = res.records[-1]
    return last.gap_avg, last.gap_last, last.elapsed_s


def _threads() -> int:
    raw = os.environ.get("TBSOLVE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"TBSOLVE_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise CliError("TBSOLVE_THREADS must be at least 1")
    return n


def cmd_sweep(args, out):
    needs_eta, invariant = ALGORITHMS[args.algo]
    if invariant:
        raise CliError(f"{args.algo} is stepsize invariant: every grid point gives the same "
                       "iterates, so a sweep is pointless")
    _load_game(args.game)
    jobs = []
    for eta in ETA_GRID:
        cfg = _config(args, eta)
        cfg.validate()
        jobs.append((args.game, cfg))
    workers = min(_threads(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    lines = [SWEEP_HEADER]
    for eta, (ga, gl, el) in zip(ETA_GRID, results):
        el = 0.0 if args.no_time else el
        lines.append(f"result,{eta:g},{_fmt(ga)},{_fmt(gl)},{el:.6f}")
    best = min(range(len(results)), key=lambda k: results[k][0])
    ga, gl, el = results[best]
    el = 0.0 if args.no_time else el
    lines.append(f"best_eta,{ETA_GRID[best]:g},{_fmt(ga)},{_fmt(gl)},{el:.6f}")
    _write(args, "\n".join(lines) + "\n", out)


def _player_tp(game, player):
    return game.treeplex_x if player == 1 else game.treeplex_y


def cmd_project(args, out):
    game = _load_game(args.game)
    tp = _player_tp(game, args.player)
    y = _load_vector(args.vector, "vector")
    if y.shape != (tp.dim,):
        raise CliError(f"dimension mismatch: vector has length {y.size}, expected {tp.dim}")
    w = None
    if args.weights:
        w = _load_vector(args.weights, "weights")
        if w.shape != (tp.dim,):
            raise CliError(f"dimension mismatch: weights have length {w.size}, expected {tp.dim}")
    try:
        p = project(tp, y, args.kind, r0=args.r0, weights=w)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    out.write(json.dumps([float(v) for v in p]) + "\n")
    if args.check:
        q = dykstra_project(tp, y, args.kind, r0=args.r0, weights=w)
        out.write(f"oracle_delta {float(np.max(np.abs(p - q))):.3e}\n")


def cmd_bestresp(args, out):
    game = _load_game(args.game)
    tp = _player_tp(game, args.player)
    loss = _load_vector(args.loss, "loss")
    if loss.shape != (tp.dim,):
        raise CliError(f"dimension mismatch: loss has length {loss.size}, expected {tp.dim}")
    x, val = best_response(tp, loss)
    out.write(json.dumps([float(v) for v in x]) + "\n")
    out.write(f"value {val!r}\n")


def cmd_info(args, out):
    game = _load_game(args.game)
    out.write(f"game {game.name}\n")
    for label, tp in (("player1", game.treeplex_x), ("player2", game.treeplex_y)):
        out.write(f"{label} n={tp.num_sequences} m={tp.num_infosets} "
                  f"l={tp.num_leaf_sequences} d={tp.depth} omega={tp.omega:.6f}\n")
    out.write(f"nnz={game.nnz}\n")


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "project": cmd_project,
            "bestresp": cmd_bestresp, "info": cmd_info}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise CliError("a subcommand is required (solve, sweep, project, bestresp, info)")
        COMMANDS[args.command](args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
