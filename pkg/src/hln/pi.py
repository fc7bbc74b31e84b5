"""Channel-based stochastic process systems.

Each species is an automaton: a stochastic choice over branches guarded by
a delay, a send ``!ch`` or a receive ``?ch``.  A delay fires on its own; a
send and a receive on the same channel fire together as a handshake.
Messages carry no payload.  After firing, a molecule is replaced by the
multiset of species in its branch continuation.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Mapping, NamedTuple, Union

from .reactions import Multiset, Reaction, ReactionNetwork, State, multiset


@dataclass(frozen=True)
class Delay:
    rate: float


@dataclass(frozen=True)
class Send:
    channel: str


@dataclass(frozen=True)
class Recv:
    channel: str


Prefix = Union[Delay, Send, Recv]


@dataclass(frozen=True)
class Channel:
    name: str
    rate: float


@dataclass(frozen=True)
class Branch:
    """A guarded choice branch.

    ``origin`` is an ordering hint (the index of the source action when the
    system was compiled from a program); it fixes the order in which
    transitions are enumerated and has no semantic effect.
    """

    prefix: Prefix
    continuation: Multiset = ()
    origin: int | None = None


@dataclass(frozen=True)
class SpeciesAutomaton:
    name: str
    branches: tuple[Branch, ...] = ()


@dataclass(frozen=True)
class ProcessSystem:
    channels: tuple[Channel, ...]
    automata: tuple[SpeciesAutomaton, ...]
    initial: State | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "automata", tuple(self.automata))
        names = [a.name for a in self.automata]
        if len(set(names)) != len(names):
            raise ValueError("duplicate automaton names")
        chan_names = [c.name for c in self.channels]
        if len(set(chan_names)) != len(chan_names):
            raise ValueError("duplicate channel names")
        for c in self.channels:
            if not (math.isfinite(c.rate) and c.rate > 0):
                raise ValueError(f"channel {c.name} needs a positive rate")
        declared, chans = set(names), set(chan_names)
        for a in self.automata:
            for b in a.branches:
                if isinstance(b.prefix, Delay):
                    if not (math.isfinite(b.prefix.rate) and b.prefix.rate > 0):
                        raise ValueError(f"delay in {a.name} needs a positive rate")
                elif b.prefix.channel not in chans:
                    raise ValueError(f"{a.name} uses undeclared channel {b.prefix.channel}")
                missing = {n for n, _ in b.continuation} - declared
                if missing:
                    raise ValueError(f"{a.name} continues as undeclared {sorted(missing)}")
        if self.initial is None:
            object.__setattr__(self, "initial", State.of(names))
        elif self.initial.species != tuple(names):
            raise ValueError("initial state must range over the automata in order")

    @property
    def species(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.automata)

    def channel_rate(self, name: str) -> float:
        for c in self.channels:
            if c.name == name:
                return c.rate
        raise KeyError(name)

    def with_initial(self, counts: Mapping[str, int]) -> ProcessSystem:
        return ProcessSystem(self.channels, self.automata, State.of(self.species, counts))

    def to_dict(self) -> dict:
        def branch(b: Branch) -> dict:
            if isinstance(b.prefix, Delay):
                d = {"prefix": "delay", "rate": b.prefix.rate}
            else:
                kind = "send" if isinstance(b.prefix, Send) else "recv"
                d = {"prefix": kind, "channel": b.prefix.channel}
            d["continuation"] = dict(b.continuation)
            if b.origin is not None:
                d["origin"] = b.origin
            return d

        return {
            "channels": [{"name": c.name, "rate": c.rate} for c in self.channels],
            "automata": [
                {"name": a.name, "branches": [branch(b) for b in a.branches]}
                for a in self.automata
            ],
            "initial": self.initial.as_dict(),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Mapping) -> ProcessSystem:
        def branch(d: Mapping) -> Branch:
            kind = d["prefix"]
            if kind == "delay":
                prefix: Prefix = Delay(float(d["rate"]))
            elif kind == "send":
                prefix = Send(d["channel"])
            elif kind == "recv":
                prefix = Recv(d["channel"])
            else:
                raise ValueError(f"unknown prefix {kind!r}")
            return Branch(prefix, multiset(d.get("continuation", {})), d.get("origin"))

        automata = tuple(
            SpeciesAutomaton(a["name"], tuple(branch(b) for b in a["branches"]))
            for a in data["automata"]
        )
        channels = tuple(Channel(c["name"], float(c["rate"])) for c in data["channels"])
        initial = None
        if data.get("initial"):
            initial = State.of([a.name for a in automata], data["initial"])
        return cls(channels, automata, initial)

    @classmethod
    def from_json(cls, text: str) -> ProcessSystem:
        return cls.from_dict(json.loads(text))


class Interaction(NamedTuple):
    """A state-independent transition schema of a process system."""

    label: str
    rate: float
    consumed: tuple[str, ...]  # one name for a delay, two for a handshake
    produced: Multiset


def interactions(sys: ProcessSystem) -> list[Interaction]:
    """Every delay branch and every sender/receiver branch pair, in firing order.

    Order is by branch ``origin`` where present, then by enumeration order
    (delays automaton by automaton, then handshakes channel by channel).
    """
    keyed = []
    seq = 0

    def key(*origins):
        known = [o for o in origins if o is not None]
        return (min(known) if len(known) == len(origins) else math.inf, seq)

    for a in sys.automata:
        for i, b in enumerate(a.branches):
            if isinstance(b.prefix, Delay):
                label = f"{a.name}:delay@{b.prefix.rate!r}#{i}"
                keyed.append((key(b.origin), Interaction(label, b.prefix.rate, (a.name,), b.continuation)))
                seq += 1
    for ch in sys.channels:
        senders = [(a.name, b) for a in sys.automata for b in a.branches
                   if isinstance(b.prefix, Send) and b.prefix.channel == ch.name]
        receivers = [(a.name, b) for a in sys.automata for b in a.branches
                     if isinstance(b.prefix, Recv) and b.prefix.channel == ch.name]
        for x, bx in senders:
            for y, by in receivers:
                produced = Counter(dict(bx.continuation))
                produced.update(dict(by.continuation))
                label = f"{ch.name}:{x}!{y}?"
                keyed.append((key(bx.origin, by.origin),
                              Interaction(label, ch.rate, (x, y), tuple(produced.items()))))
                seq += 1
    keyed.sort(key=lambda kv: kv[0])
    return [it for _, it in keyed]


class Transition(NamedTuple):
    label: str
    propensity: float
    next: State


def pi_transitions(sys: ProcessSystem, state: State) -> list[Transition]:
    """Enabled transitions of ``sys`` from ``state`` (zero propensities omitted)."""
    out = []
    for it in interactions(sys):
        if len(it.consumed) == 1:
            pairs = state[it.consumed[0]]
        else:
            x, y = it.consumed
            nx, ny = state[x], state[y]
            # a molecule cannot handshake with itself
            pairs = nx * ny if x != y else nx * (nx - 1) // 2
        if pairs == 0:
            continue
        delta: Counter[str] = Counter()
        for name in it.consumed:
            delta[name] -= 1
        for name, n in it.produced:
            delta[name] += n
        out.append(Transition(it.label, it.rate * pairs, state.replace(delta)))
    return out


def reachable_reactions(sys: ProcessSystem) -> ReactionNetwork:
    """The reaction network generating the same Markov chain as ``sys``."""
    reactions = []
    for it in interactions(sys):
        produced = [n for n, k in it.produced for _ in range(k)]
        reactions.append(Reaction.of(it.consumed, produced, it.rate))
    return ReactionNetwork(sys.species, tuple(reactions))


def _proc(ms: Multiset) -> str:
    names = [f"{n}()" for n, k in ms for _ in range(k)]
    if not names:
        return "()"
    if len(names) == 1:
        return names[0]
    return "( " + " | ".join(names) + " )"


def pretty(sys: ProcessSystem) -> str:
    """SPiM-like listing of the system, for documentation."""
    lines = [f"new {c.name}@{c.rate!r}:chan" for c in sys.channels]
    if lines:
        lines.append("")
    for i, a in enumerate(sys.automata):
        head = "let" if i == 0 else "and"
        alts = []
        for b in a.branches:
            if isinstance(b.prefix, Delay):
                guard = f"delay@{b.prefix.rate!r}"
            elif isinstance(b.prefix, Send):
                guard = f"!{b.prefix.channel}()"
            else:
                guard = f"?{b.prefix.channel}()"
            alts.append(f"{guard}; {_proc(b.continuation)}")
        if not alts:
            body = "()"
        elif len(alts) == 1:
            body = f"( {alts[0]} )"
        else:
            body = "( do " + " or ".join(alts) + " )"
        lines.append(f"{head} {a.name}() = {body}")
    counts = [(n, c) for n, c in sys.initial.as_dict().items() if c]
    if counts:
        lines.append("")
        lines.extend(f"run {c} of {n}()" for n, c in counts)
    return "\n".join(lines)


def iter_branches(sys: ProcessSystem) -> Iterator[tuple[str, Branch]]:
    for a in sys.automata:
        for b in a.branches:
            yield a.name, b
