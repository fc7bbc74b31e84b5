"""Chemical reaction network representation.

Reactions are irreversible and carry discrete (per-molecule or per-pair)
rate constants; a reversible step is stored as two reactions.  States are
integer copy numbers over the network's species, in declaration order.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

AVOGADRO = 6.022e23


class UnderflowError(ValueError):
    """A reaction fired without enough reactant molecules."""


class Kind(Enum):
    MASS_ACTION = "MassAction"
    ZEROTH_ORDER = "ZerothOrder"


Multiset = tuple[tuple[str, int], ...]


def multiset(names: Iterable[str] | Mapping[str, int]) -> Multiset:
    """Order-preserving multiset of species names."""
    if isinstance(names, Mapping):
        counts = {k: int(v) for k, v in names.items() if v}
    else:
        counts = dict(Counter(names))
    if any(v < 0 for v in counts.values()):
        raise ValueError("negative multiplicity")
    return tuple(counts.items())


def _side(ms: Multiset) -> str:
    if not ms:
        return "null"
    terms = []
    for name, n in ms:
        terms.extend([name] * n)
    return " + ".join(terms)


@dataclass(frozen=True, eq=False)
class Reaction:
    """An irreversible reaction.

    Equality is multiset equality on both sides plus rate and kind; the
    textual order of reactants and products is kept only for display.
    """

    reactants: Multiset
    products: Multiset
    rate: float
    kind: Kind = Kind.MASS_ACTION

    def __post_init__(self):
        order = sum(n for _, n in self.reactants)
        if order > 2:
            raise ValueError(f"at most two reactant molecules allowed, got {order}")
        if self.kind is Kind.MASS_ACTION and order == 0:
            raise ValueError("mass-action reaction needs at least one reactant")
        if self.kind is Kind.ZEROTH_ORDER and order != 0:
            raise ValueError("zeroth-order reaction cannot have reactants")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be positive and finite, got {self.rate!r}")

    @classmethod
    def of(cls, reactants: Iterable[str], products: Iterable[str], rate: float) -> Reaction:
        """Build from name lists; an empty reactant list makes it zeroth order."""
        lhs = multiset(reactants)
        kind = Kind.MASS_ACTION if lhs else Kind.ZEROTH_ORDER
        return cls(lhs, multiset(products), float(rate), kind)

    def key(self):
        return (
            tuple(sorted(self.reactants)),
            tuple(sorted(self.products)),
            self.rate,
            self.kind,
        )

    def __eq__(self, other):
        if not isinstance(other, Reaction):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @property
    def order(self) -> int:
        return sum(n for _, n in self.reactants)

    def net_change(self) -> dict[str, int]:
        delta: Counter[str] = Counter()
        for name, n in self.reactants:
            delta[name] -= n
        for name, n in self.products:
            delta[name] += n
        return {k: v for k, v in delta.items() if v}

    def species(self) -> list[str]:
        return list(dict.fromkeys(n for n, _ in self.reactants + self.products))

    def __str__(self) -> str:
        return f"{_side(self.reactants)} -> {_side(self.products)} @ {self.rate!r}"


@dataclass(frozen=True)
class State:
    species: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.species) != len(self.counts):
            raise ValueError("state length does not match species count")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative copy number")

    @classmethod
    def of(cls, species: Sequence[str], counts: Mapping[str, int] | None = None) -> State:
        """State over ``species``; names missing from ``counts`` start at 0."""
        counts = counts or {}
        unknown = set(counts) - set(species)
        if unknown:
            raise KeyError(f"unknown species: {sorted(unknown)}")
        return cls(tuple(species), tuple(int(counts.get(s, 0)) for s in species))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.species)}

    def __getitem__(self, name: str) -> int:
        return self.counts[self._index[name]]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.species, self.counts))

    def replace(self, delta: Mapping[str, int]) -> State:
        counts = list(self.counts)
        for name, d in delta.items():
            counts[self._index[name]] += d
        return State(self.species, tuple(counts))


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        if len(set(self.species)) != len(self.species):
            raise ValueError("duplicate species")
        known = set(self.species)
        for r in self.reactions:
            missing = set(r.species()) - known
            if missing:
                raise ValueError(f"reaction {r} uses undeclared species {sorted(missing)}")

    @classmethod
    def from_reactions(cls, reactions: Iterable[Reaction], species: Sequence[str] = ()) -> ReactionNetwork:
        """Network whose species are ``species`` followed by any others in first-mention order."""
        reactions = tuple(reactions)
        names = dict.fromkeys(species)
        for r in reactions:
            names.update(dict.fromkeys(r.species()))
        return cls(tuple(names), reactions)

    def index(self, name: str) -> int:
        return self.species.index(name)

    def state(self, counts: Mapping[str, int] | None = None) -> State:
        return State.of(self.species, counts)

    def stoichiometry(self) -> np.ndarray:
        """Net stoichiometry matrix, species x reactions."""
        m = np.zeros((len(self.species), len(self.reactions)), dtype=np.int64)
        idx = {s: i for i, s in enumerate(self.species)}
        for j, r in enumerate(self.reactions):
            for name, d in r.net_change().items():
                m[idx[name], j] = d
        return m

    def without(self, reaction: Reaction) -> ReactionNetwork:
        return ReactionNetwork(self.species, tuple(r for r in self.reactions if r != reaction))

    def to_dict(self) -> dict:
        return {
            "species": list(self.species),
            "reactions": [
                {
                    "reactants": dict(r.reactants),
                    "products": dict(r.products),
                    "rate": r.rate,
                    "kind": r.kind.value,
                }
                for r in self.reactions
            ],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Mapping) -> ReactionNetwork:
        reactions = [
            Reaction(
                multiset(r["reactants"]),
                multiset(r["products"]),
                float(r["rate"]),
                Kind(r.get("kind", "MassAction")),
            )
            for r in data["reactions"]
        ]
        return cls(tuple(data["species"]), tuple(reactions))

    @classmethod
    def from_json(cls, text: str) -> ReactionNetwork:
        return cls.from_dict(json.loads(text))

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.reactions)


def combinations(reaction: Reaction, state: State) -> int:
    """Number of distinct reactant combinations available in ``state``."""
    total = 1
    for name, n in reaction.reactants:
        count = state[name]
        if n == 1:
            total *= count
        else:  # n == 2: unordered pairs of one species
            total *= count * (count - 1) // 2
    return total


def propensity(reaction: Reaction, state: State) -> float:
    return reaction.rate * combinations(reaction, state)


def apply(reaction: Reaction, state: State) -> State:
    """Fire ``reaction`` once."""
    for name, n in reaction.reactants:
        if state[name] < n:
            raise UnderflowError(f"cannot fire {reaction}: {name}={state[name]}")
    return state.replace(reaction.net_change())


def scale_rate_to_discrete(k: float, volume: float, order: int = 2) -> float:
    """Convert a macroscopic rate constant to a discrete per-pair rate.

    Only bimolecular constants (M^-1 s^-1) depend on the volume; first and
    zeroth order constants are returned unchanged.
    """
    if not (k > 0 and volume > 0):
        raise ValueError("rate constant and volume must be positive")
    if order == 2:
        return k / (AVOGADRO * volume)
    if order in (0, 1):
        return k
    raise ValueError(f"unsupported reaction order {order}")


def conserved_check(net: ReactionNetwork, weights: Sequence[int], s0: State, s1: State) -> bool:
    if len(weights) != len(net.species):
        raise ValueError("weight vector length does not match species count")
    w = [int(x) for x in weights]
    return sum(a * b for a, b in zip(w, s0.counts)) == sum(a * b for a, b in zip(w, s1.counts))
