"""Compile a high-level program into a reaction network or a process system.

Both translations are homomorphic: each action is translated on its own and
the results are unioned.  Identical reactions collapse under the union, and
``to_pi`` drops the same duplicate actions so that the process system and
the reaction network always generate the same Markov chain.
"""

from __future__ import annotations

from .frontend import Action, ActionKind, Process
from .pi import Branch, Channel, Delay, ProcessSystem, Recv, Send, SpeciesAutomaton
from .reactions import Reaction, ReactionNetwork, multiset

K = ActionKind


def reaction_of(action: Action) -> Reaction:
    ops, r = action.operands, action.rate
    if action.kind in (K.BIND, K.DIMERIZE):
        a, b, c = ops
        return Reaction.of([a, b], [c], r)
    if action.kind in (K.ACTIVATE, K.PHOSPHORYLATE):
        a, b, c = ops
        return Reaction.of([a, b], [c, b], r)
    if action.kind is K.ACTIVATE_AND_DISSOCIATE:
        a, b, c, d = ops
        return Reaction.of([a, b], [c, d, b], r)
    if action.kind is K.DISSOCIATE:
        a, b, c = ops
        return Reaction.of([a], [b, c], r)
    if action.kind is K.HYDROLYZE:
        a, b = ops
        return Reaction.of([a], [b], r)
    if action.kind is K.DEGRADE:
        (a,) = ops
        return Reaction.of([a], [], r)
    raise AssertionError(action.kind)


def _unique_actions(p: Process) -> list[tuple[int, Action, Reaction]]:
    seen = set()
    out = []
    for i, action in enumerate(p.actions):
        reaction = reaction_of(action)
        if reaction in seen:
            continue
        seen.add(reaction)
        out.append((i, action, reaction))
    return out


def to_reactions(p: Process) -> ReactionNetwork:
    return ReactionNetwork(tuple(p.species()), tuple(r for _, _, r in _unique_actions(p)))


def channel_name(index: int) -> str:
    return f"ch{index}"


def _branches(index: int, action: Action) -> tuple[list[tuple[str, Branch]], Channel | None]:
    ops, r = action.operands, action.rate
    ch = channel_name(index)

    def br(prefix, *cont):
        return Branch(prefix, multiset(cont), index)

    if action.kind in (K.BIND, K.DIMERIZE):
        a, b, c = ops
        return [(a, br(Send(ch), c)), (b, br(Recv(ch)))], Channel(ch, r)
    if action.kind in (K.ACTIVATE, K.PHOSPHORYLATE):
        a, b, c = ops
        return [(a, br(Send(ch), c)), (b, br(Recv(ch), b))], Channel(ch, r)
    if action.kind is K.ACTIVATE_AND_DISSOCIATE:
        # the activated species receives; the activator sends and persists
        a, b, c, d = ops
        return [(a, br(Recv(ch), c, d)), (b, br(Send(ch), b))], Channel(ch, r)
    if action.kind is K.DISSOCIATE:
        a, b, c = ops
        return [(a, br(Delay(r), b, c))], None
    if action.kind is K.HYDROLYZE:
        a, b = ops
        return [(a, br(Delay(r), b))], None
    if action.kind is K.DEGRADE:
        (a,) = ops
        return [(a, br(Delay(r)))], None
    raise AssertionError(action.kind)


def to_pi(p: Process) -> ProcessSystem:
    branches: dict[str, list[Branch]] = {name: [] for name in p.species()}
    channels = []
    for i, action, _ in _unique_actions(p):
        pieces, channel = _branches(i, action)
        if channel is not None:
            channels.append(channel)
        for name, b in pieces:
            branches[name].append(b)
    automata = tuple(SpeciesAutomaton(n, tuple(bs)) for n, bs in branches.items())
    return ProcessSystem(tuple(channels), automata)
