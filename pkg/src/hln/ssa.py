"""Gillespie direct-method simulation.

Both a :class:`ReactionNetwork` and a :class:`ProcessSystem` are lowered to
the same event table (rate, reactant indices, state change) and run by one
compiled scheduler, so the two backends give bit-identical trajectories
when their events come out in the same order.

Random numbers come from ``numpy.random.default_rng(seed)`` (PCG64), two
uniforms per firing: the first for the waiting time, the second to pick the
event.  Ensemble run ``i`` uses seed ``seed + i``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import NamedTuple, TextIO

import numba
import numpy as np

from .pi import ProcessSystem, interactions
from .reactions import ReactionNetwork, State

ZEROTH, UNI, BI, HOMO = 0, 1, 2, 3

_CHUNK = 1 << 16  # uniforms per refill; must be even


@dataclass(frozen=True)
class SsaConfig:
    t_end: float
    sample_count: int = 601
    seed: int = 0
    runs: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError("t_end must be positive")
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.sample_count)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


@dataclass
class Trajectory:
    species: tuple[str, ...]
    times: np.ndarray
    states: np.ndarray  # samples x species; int64 counts or float amounts

    def __getitem__(self, name: str) -> np.ndarray:
        return self.states[:, self.species.index(name)]

    def write_csv(self, out: TextIO) -> None:
        out.write("time," + ",".join(self.species) + "\n")
        for t, row in zip(self.times, self.states.tolist()):
            out.write(",".join([_fmt(t), *map(_fmt, row)]) + "\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


@dataclass
class EnsembleStats:
    species: tuple[str, ...]
    times: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    runs: int

    def mean_of(self, name: str) -> np.ndarray:
        return self.mean[:, self.species.index(name)]

    def write_csv(self, out: TextIO) -> None:
        cols = [f"{s}_{stat}" for s in self.species for stat in ("mean", "std")]
        out.write("time," + ",".join(cols) + "\n")
        for k, t in enumerate(self.times):
            cells = [_fmt(t)]
            for j in range(len(self.species)):
                cells += [_fmt(self.mean[k, j]), _fmt(self.std[k, j])]
            out.write(",".join(cells) + "\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


class EventTable(NamedTuple):
    species: tuple[str, ...]
    rates: np.ndarray
    kinds: np.ndarray
    first: np.ndarray
    second: np.ndarray
    delta: np.ndarray


def _table(species, events) -> EventTable:
    """``events``: iterable of (rate, consumed names, net change dict)."""
    index = {s: i for i, s in enumerate(species)}
    events = list(events)
    n = len(events)
    rates = np.zeros(n)
    kinds = np.zeros(n, dtype=np.int64)
    first = np.zeros(n, dtype=np.int64)
    second = np.zeros(n, dtype=np.int64)
    delta = np.zeros((n, len(species)), dtype=np.int64)
    for e, (rate, consumed, change) in enumerate(events):
        rates[e] = rate
        if len(consumed) == 0:
            kinds[e] = ZEROTH
        elif len(consumed) == 1:
            kinds[e] = UNI
            first[e] = index[consumed[0]]
        else:
            a, b = consumed
            kinds[e] = HOMO if a == b else BI
            first[e], second[e] = index[a], index[b]
        for name, d in change.items():
            delta[e, index[name]] += d
    return EventTable(tuple(species), rates, kinds, first, second, delta)


def network_events(net: ReactionNetwork) -> EventTable:
    def consumed(r):
        return tuple(name for name, n in r.reactants for _ in range(n))

    return _table(net.species, ((r.rate, consumed(r), r.net_change()) for r in net.reactions))


def pi_events(sys: ProcessSystem) -> EventTable:
    def change(it):
        d: dict[str, int] = {}
        for name in it.consumed:
            d[name] = d.get(name, 0) - 1
        for name, k in it.produced:
            d[name] = d.get(name, 0) + k
        return d

    return _table(sys.species, ((it.rate, it.consumed, change(it)) for it in interactions(sys)))


@numba.njit(cache=True, nogil=True)
def _ssa_kernel(x, t, k, times, out, rates, kinds, first, second, delta, uniforms):
    """Advance until the grid is filled or ``uniforms`` runs out.

    Returns ``(t, k, used)``; ``x`` and ``out`` are updated in place.
    """
    n_ev = rates.shape[0]
    n_t = times.shape[0]
    props = np.empty(n_ev)
    pos = 0
    while k < n_t:
        a0 = 0.0
        for e in range(n_ev):
            kind = kinds[e]
            if kind == 0:
                c = 1
            elif kind == 1:
                c = x[first[e]]
            elif kind == 2:
                c = x[first[e]] * x[second[e]]
            else:
                n = x[first[e]]
                c = n * (n - 1) // 2
            props[e] = rates[e] * c
            a0 += props[e]
        if a0 == 0.0:
            while k < n_t:
                out[k, :] = x
                k += 1
            break
        if pos + 2 > uniforms.shape[0]:
            break
        u1 = uniforms[pos]
        u2 = uniforms[pos + 1]
        pos += 2
        t_next = t - math.log(1.0 - u1) / a0
        while k < n_t and times[k] < t_next:
            out[k, :] = x
            k += 1
        if k == n_t:
            break
        target = u2 * a0
        acc = 0.0
        chosen = -1
        for e in range(n_ev):
            if props[e] > 0.0:
                chosen = e
                acc += props[e]
                if target < acc:
                    break
        for j in range(x.shape[0]):
            x[j] += delta[chosen, j]
        t = t_next
    return t, k, pos


def run_events(table: EventTable, counts, times: np.ndarray, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = np.array(counts, dtype=np.int64)
    out = np.zeros((len(times), len(table.species)), dtype=np.int64)
    t, k = 0.0, 0
    times = np.ascontiguousarray(times, dtype=np.float64)
    while k < len(times):
        uniforms = rng.random(_CHUNK)
        t, k, _ = _ssa_kernel(x, t, k, times, out, table.rates, table.kinds,
                              table.first, table.second, table.delta, uniforms)
    return out


def simulate(net: ReactionNetwork, s0: State, cfg: SsaConfig) -> Trajectory:
    if s0.species != net.species:
        raise ValueError("initial state does not match network species")
    times = cfg.times
    states = run_events(network_events(net), s0.counts, times, cfg.seed)
    return Trajectory(net.species, times, states)


def simulate_pi(sys: ProcessSystem, cfg: SsaConfig) -> Trajectory:
    times = cfg.times
    states = run_events(pi_events(sys), sys.initial.counts, times, cfg.seed)
    return Trajectory(sys.species, times, states)


def _stats(species, times, runs: list[np.ndarray]) -> EnsembleStats:
    stack = np.stack(runs).astype(np.float64)
    mean = stack.mean(axis=0)
    std = stack.std(axis=0, ddof=1) if len(runs) > 1 else np.zeros_like(mean)
    return EnsembleStats(tuple(species), times, mean, std, len(runs))


def ensemble(net: ReactionNetwork, s0: State, cfg: SsaConfig) -> EnsembleStats:
    if s0.species != net.species:
        raise ValueError("initial state does not match network species")
    table = network_events(net)
    times = cfg.times
    runs = [run_events(table, s0.counts, times, cfg.seed + i) for i in range(cfg.runs)]
    return _stats(net.species, times, runs)


def ensemble_pi(sys: ProcessSystem, cfg: SsaConfig) -> EnsembleStats:
    table = pi_events(sys)
    times = cfg.times
    runs = [run_events(table, sys.initial.counts, times, cfg.seed + i) for i in range(cfg.runs)]
    return _stats(sys.species, times, runs)
