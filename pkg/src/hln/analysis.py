"""Cross-checks between the backends.

* :func:`enumerate_ctmc` builds the full reachable Markov chain of a small
  network by breadth-first search, so two networks can be compared as
  labelled graphs.
* :func:`compare` measures how far an SSA ensemble mean is from an ODE
  trajectory.
* :func:`find_conservation` returns an exact integer basis of the linear
  conservation laws of a network.
"""

from __future__ import annotations

import io
import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import sympy

from .reactions import ReactionNetwork, State, apply, propensity
from .ssa import EnsembleStats, Trajectory


class StateSpaceExplosion(RuntimeError):
    pass


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class CtmcGraph:
    species: tuple[str, ...]
    states: tuple[State, ...]
    edges: tuple[tuple[State, State, float], ...]

    def canonical(self):
        """Content-based form: states by count vector, edges as a multiset."""
        states = frozenset(s.counts for s in self.states)
        edges = Counter((a.counts, b.counts, rate) for a, b, rate in self.edges)
        return self.species, states, frozenset(edges.items())

    def __eq__(self, other):
        if not isinstance(other, CtmcGraph):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def exit_rate(self, state: State) -> float:
        return math.fsum(rate for a, _, rate in self.edges if a == state)

    def jump_probabilities(self, state: State) -> dict[tuple[int, ...], float]:
        """Probability that the next firing from ``state`` lands in each target."""
        total = self.exit_rate(state)
        out: dict[tuple[int, ...], float] = {}
        for a, b, rate in self.edges:
            if a == state:
                out[b.counts] = out.get(b.counts, 0.0) + rate / total
        return out


def enumerate_ctmc(net: ReactionNetwork, s0: State, max_states: int = 10_000) -> CtmcGraph:
    if s0.species != net.species:
        raise ValueError("initial state does not match network species")
    seen = {s0.counts: s0}
    order = [s0]
    edges = []
    queue = deque([s0])
    while queue:
        s = queue.popleft()
        for r in net.reactions:
            a = propensity(r, s)
            if a == 0:
                continue
            nxt = apply(r, s)
            if nxt.counts not in seen:
                if len(seen) >= max_states:
                    raise StateSpaceExplosion(f"more than {max_states} reachable states")
                seen[nxt.counts] = nxt
                order.append(nxt)
                queue.append(nxt)
            edges.append((s, seen[nxt.counts], a))
    return CtmcGraph(net.species, tuple(order), tuple(edges))


@dataclass
class ComparisonReport:
    species: tuple[str, ...]
    times: np.ndarray
    ssa_mean: np.ndarray
    ode: np.ndarray
    deviation: np.ndarray  # samples x species
    included: np.ndarray  # cells that count towards the summary
    threshold: float

    @property
    def max_deviation(self) -> float:
        if not self.included.any():
            return 0.0
        return float(self.deviation[self.included].max())

    def worst(self) -> tuple[str, float, float] | None:
        if not self.included.any():
            return None
        masked = np.where(self.included, self.deviation, -1.0)
        k, j = np.unravel_index(np.argmax(masked), masked.shape)
        return self.species[j], float(self.times[k]), float(self.deviation[k, j])

    def passed(self, bound: float) -> bool:
        return self.max_deviation <= bound

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("time,species,ssa_mean,ode,deviation,included\n")
        for k, t in enumerate(self.times):
            for j, name in enumerate(self.species):
                buf.write(
                    f"{float(t)!r},{name},{float(self.ssa_mean[k, j])!r},"
                    f"{float(self.ode[k, j])!r},{float(self.deviation[k, j])!r},"
                    f"{int(self.included[k, j])}\n"
                )
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"threshold: {self.threshold:g} molecules"]
        for j, name in enumerate(self.species):
            mask = self.included[:, j]
            if mask.any():
                lines.append(f"  {name:>6}: max deviation {self.deviation[mask, j].max():.4f}"
                             f" over {int(mask.sum())} points")
            else:
                lines.append(f"  {name:>6}: below threshold, excluded")
        worst = self.worst()
        if worst is not None:
            name, t, d = worst
            lines.append(f"worst: {name} at t={t:g} ({d:.4f})")
        lines.append(f"max deviation: {self.max_deviation:.4f}")
        return "\n".join(lines)


def compare(ssa: EnsembleStats, ode: Trajectory, threshold_count: float,
            at: Sequence[float] | None = None) -> ComparisonReport:
    """Relative deviation ``|mean - ode| / max(ode, threshold_count)``.

    Cells where the ODE value is below ``threshold_count`` are reported but
    left out of the summary.  ``at`` restricts the summary to those grid
    times.
    """
    if tuple(ssa.species) != tuple(ode.species):
        raise GridMismatchError("species order differs")
    if ssa.times.shape != ode.times.shape or not np.allclose(ssa.times, ode.times, rtol=0, atol=1e-9):
        raise GridMismatchError("sample grids differ")
    mean = np.asarray(ssa.mean, dtype=np.float64)
    ref = np.asarray(ode.states, dtype=np.float64)
    deviation = np.abs(mean - ref) / np.maximum(ref, threshold_count)
    included = ref >= threshold_count
    if at is not None:
        rows = np.zeros(len(ode.times), dtype=bool)
        for t in at:
            hits = np.flatnonzero(np.isclose(ode.times, t, rtol=0, atol=1e-9))
            if hits.size == 0:
                raise GridMismatchError(f"time {t} is not on the sample grid")
            rows[hits] = True
        included &= rows[:, None]
    return ComparisonReport(tuple(ode.species), ode.times, mean, ref, deviation, included,
                            threshold_count)


def find_conservation(net: ReactionNetwork) -> list[tuple[int, ...]]:
    """Integer basis of ``{w : w . (net change of r) = 0 for every reaction r}``.

    Computed exactly over the rationals; each vector is scaled to coprime
    integers with a positive leading entry.
    """
    n = len(net.species)
    if not net.reactions:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    stoich = sympy.Matrix(net.stoichiometry().tolist())
    basis = []
    for vec in stoich.T.nullspace():
        denom = math.lcm(*[int(sympy.fraction(x)[1]) for x in vec])
        basis.append(_normalise([int(x * denom) for x in vec]))
    return _readable(basis)


def _normalise(vec) -> tuple[int, ...]:
    g = math.gcd(*vec)
    vec = [x // g for x in vec]
    if next(x for x in vec if x) < 0:
        vec = [-x for x in vec]
    return tuple(vec)


def _readable(basis: list[tuple[int, ...]], span: int = 2) -> list[tuple[int, ...]]:
    """Swap in nonnegative, small-support vectors where that keeps a basis.

    Only small combinations of the original basis are searched; vectors
    that cannot be replaced are kept as they are.
    """
    dim = len(basis)
    if dim == 0 or dim > 4:
        return basis
    b = np.array(basis, dtype=np.int64)
    candidates = set()
    for coeffs in itertools.product(range(-span, span + 1), repeat=dim):
        v = np.array(coeffs) @ b
        if v.any() and (v >= 0).all():
            candidates.add(_normalise(v.tolist()))
    ranked = sorted(candidates, key=lambda v: (sum(1 for x in v if x), sum(v), [-x for x in v]))
    chosen: list[tuple[int, ...]] = []
    for v in ranked:
        if np.linalg.matrix_rank(np.array(chosen + [v])) == len(chosen) + 1:
            chosen.append(v)
        if len(chosen) == dim:
            return chosen
    for v in basis:
        if len(chosen) == dim:
            break
        if np.linalg.matrix_rank(np.array(chosen + [v])) == len(chosen) + 1:
            chosen.append(v)
    return chosen


def in_span(vector: Sequence[int], basis: Sequence[Sequence[int]]) -> bool:
    """Whether ``vector`` is a rational combination of ``basis``."""
    if not basis:
        return not any(vector)
    m = sympy.Matrix([list(b) for b in basis])
    return m.rank() == m.col_join(sympy.Matrix([list(vector)])).rank()


def stoichiometry_orthogonal(net: ReactionNetwork, weights: Sequence[int]) -> bool:
    w = np.asarray(weights, dtype=np.int64)
    return not np.any(w @ net.stoichiometry())
