"""Blackwell approachability solvers for two-player zero-sum extensive-form games."""
from .cfr import CFR, counterfactual_losses
from .dykstra import dykstra_project
from .games import Game, goofspiel, kuhn, leduc, load, save
from .minimizers import (SCPOMD, AdaGradTBPlus, AdamTBPlus, BlackwellTreeplex, ContractError,
                         PRMPlus, PTBPlus, RMPlus, SmoothPTBPlus, TBPlus)
from .projection import SmplFn, lambda_build, project, smpl_eval, smpl_root
from .selfplay import RunConfig, RunRecord, duality_gap, run, theory_eta, weighted_average
from .treeplex import (InfosetRecord, Treeplex, TreeplexError, behavioral_to_sequence,
                       best_response, f_transform, g_transform, is_cone_member, is_member,
                       uniform_strategy, validate)

__version__ = "0.1.0"

__all__ = [
    "AdaGradTBPlus", "AdamTBPlus", "BlackwellTreeplex", "CFR", "ContractError", "InfosetRecord",
    "PRMPlus", "PTBPlus", "RMPlus", "RunConfig", "RunRecord", "SCPOMD", "SmoothPTBPlus",
    "SmplFn", "TBPlus", "Treeplex", "TreeplexError", "behavioral_to_sequence", "best_response",
    "counterfactual_losses", "duality_gap", "dykstra_project", "f_transform", "g_transform",
    "Game", "goofspiel", "kuhn", "leduc", "load", "save",
    "is_cone_member", "is_member", "lambda_build", "project", "run", "smpl_eval", "smpl_root",
    "theory_eta", "uniform_strategy", "validate", "weighted_average",
]
