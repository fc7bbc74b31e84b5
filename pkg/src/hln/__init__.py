"""Compile a small biological-process notation to reaction networks and
channel-based process systems, and simulate them stochastically or with
mass-action ODEs."""

from .analysis import compare, enumerate_ctmc, find_conservation
from .frontend import Action, ActionKind, HlnSyntaxError, Process, format_program, parse_program
from .models import gprotein_hln, gprotein_network
from .ode import OdeConfig, build_ode, integrate
from .pi import ProcessSystem, pi_transitions, reachable_reactions
from .reactions import (
    Reaction,
    ReactionNetwork,
    State,
    apply,
    conserved_check,
    propensity,
    scale_rate_to_discrete,
)
from .ssa import SsaConfig, ensemble, simulate, simulate_pi
from .translate import to_pi, to_reactions

__all__ = [
    "Action", "ActionKind", "HlnSyntaxError", "Process", "format_program", "parse_program",
    "Reaction", "ReactionNetwork", "State", "apply", "conserved_check", "propensity",
    "scale_rate_to_discrete", "ProcessSystem", "pi_transitions", "reachable_reactions",
    "to_pi", "to_reactions", "SsaConfig", "simulate", "simulate_pi", "ensemble",
    "OdeConfig", "build_ode", "integrate", "compare", "enumerate_ctmc", "find_conservation",
    "gprotein_network", "gprotein_hln",
]
