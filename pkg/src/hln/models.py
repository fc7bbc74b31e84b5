"""Built-in G-protein cycle models.

``gprotein`` is the full reaction network including receptor synthesis
(``null -> R``); ``gprotein-hln`` is the seven-action program, which has no
way to express synthesis.  Rates are the discrete values for a 1e-12 L
reaction volume.
"""

from __future__ import annotations

from dataclasses import dataclass

from .frontend import Process, parse_program
from .reactions import Reaction, ReactionNetwork, State
from .translate import to_reactions

INITIAL = {"L": 602200, "R": 10000, "RL": 0, "G": 7000, "Gd": 3000, "Gbg": 3000, "Ga": 0}

GPROTEIN_HLN = """\
bind(Gd, Gbg, G, 1.0);
bind(R, L, RL, 3.32e-6);
activateAnddissociate(G, RL, Ga, Gbg, 1.0e-5);
dissociate(RL, R, L, 0.01);
hydrolyze(Ga, Gd, 0.11);
degrade(R, 4e-4);
degrade(RL, 4e-3)
"""

SYNTHESIS = Reaction.of([], ["R"], 4.0)


@dataclass(frozen=True)
class BuiltinModel:
    name: str
    network: ReactionNetwork
    initial: State
    t_end: float = 600.0
    hln_source: str | None = None

    def __post_init__(self):
        if self.initial.species != self.network.species:
            raise ValueError("initial state does not match network species")

    @property
    def process(self) -> Process | None:
        return parse_program(self.hln_source) if self.hln_source is not None else None


def gprotein_network() -> BuiltinModel:
    reactions = (
        Reaction.of(["L", "R"], ["RL"], 3.32e-6),
        Reaction.of(["RL"], ["L", "R"], 0.01),
        Reaction.of(["Gd", "Gbg"], ["G"], 1.0),
        Reaction.of(["G", "RL"], ["Ga", "Gbg", "RL"], 1e-5),
        Reaction.of(["R"], [], 4e-4),
        SYNTHESIS,
        Reaction.of(["RL"], [], 4e-3),
        Reaction.of(["Ga"], ["Gd"], 0.11),
    )
    net = ReactionNetwork(tuple(INITIAL), reactions)
    return BuiltinModel("gprotein", net, net.state(INITIAL))


def gprotein_hln() -> BuiltinModel:
    net = to_reactions(parse_program(GPROTEIN_HLN))
    return BuiltinModel("gprotein-hln", net, net.state(INITIAL), hln_source=GPROTEIN_HLN)


BUILTINS = {
    "gprotein": gprotein_network,
    "gprotein-hln": gprotein_hln,
}


def builtin(name: str) -> BuiltinModel:
    """Look up ``name`` with or without the ``builtin:`` prefix."""
    key = name.removeprefix("builtin:")
    try:
        return BUILTINS[key]()
    except KeyError:
        raise KeyError(f"unknown builtin model {name!r}; choose from {sorted(BUILTINS)}") from None
