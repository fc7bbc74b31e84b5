import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hln.analysis import (
    GridMismatchError,
    StateSpaceExplosion,
    compare,
    enumerate_ctmc,
    find_conservation,
    in_span,
    stoichiometry_orthogonal,
)
from hln.models import gprotein_network
from hln.reactions import Reaction, ReactionNetwork, apply, conserved_check, propensity
from hln.ssa import EnsembleStats, Trajectory
from hln.translate import to_reactions

from programs import programs


def test_single_firing_graph():
    net = ReactionNetwork.from_reactions([Reaction.of(["A", "B"], ["C"], 0.5)])
    g = enumerate_ctmc(net, net.state({"A": 1, "B": 1}))
    assert len(g.states) == 2
    assert [(a.counts, b.counts, k) for a, b, k in g.edges] == [((1, 1, 0), (0, 0, 1), 0.5)]


def test_gprotein_two_state_chain():
    full = gprotein_network().network
    keep = [Reaction.of(["Gd", "Gbg"], ["G"], 1.0), Reaction.of(["Ga"], ["Gd"], 0.11)]
    assert all(r in full.reactions for r in keep)
    net = ReactionNetwork(full.species, tuple(keep))
    g = enumerate_ctmc(net, net.state({"Gd": 1, "Gbg": 1}))
    assert len(g.states) == 2 and len(g.edges) == 1
    assert g.exit_rate(g.states[0]) == 1.0
    assert g.exit_rate(g.states[1]) == 0.0


def test_explosion_guard():
    net = ReactionNetwork.from_reactions([Reaction.of([], ["A"], 1.0)])
    with pytest.raises(StateSpaceExplosion):
        enumerate_ctmc(net, net.state({}), max_states=50)


def test_jump_probabilities():
    net = ReactionNetwork.from_reactions([Reaction.of(["A"], ["B"], 1.0), Reaction.of(["A"], ["C"], 3.0)])
    g = enumerate_ctmc(net, net.state({"A": 1}))
    assert g.jump_probabilities(g.states[0]) == {(0, 1, 0): 0.25, (0, 0, 1): 0.75}


def test_graph_equality_by_content():
    r = [Reaction.of(["A", "B"], ["C"], 1.0), Reaction.of(["C"], ["A", "B"], 2.0), Reaction.of(["A"], [], 0.5)]
    a = ReactionNetwork(("A", "B", "C"), tuple(r))
    b = ReactionNetwork(("A", "B", "C"), tuple(reversed(r)))
    s = {"A": 2, "B": 1, "C": 1}
    ga, gb = enumerate_ctmc(a, a.state(s)), enumerate_ctmc(b, b.state(s))
    assert ga.states != gb.states or ga.edges != gb.edges
    assert ga == gb and hash(ga) == hash(gb)
    c = ReactionNetwork(("A", "B", "C"), tuple(r[:2]))
    assert enumerate_ctmc(c, c.state(s)) != ga


@settings(max_examples=100, deadline=None)
@given(programs(max_actions=6), st.randoms(use_true_random=False))
def test_graph_independent_of_reaction_order(p, rnd):
    net = to_reactions(p)
    shuffled = list(net.reactions)
    rnd.shuffle(shuffled)
    other = ReactionNetwork(net.species, tuple(shuffled))
    s0 = net.state({name: rnd.randint(0, 1) for name in net.species})
    try:
        g = enumerate_ctmc(net, s0, 2000)
    except StateSpaceExplosion:
        return
    assert enumerate_ctmc(other, other.state(s0.as_dict()), 2000) == g


def grid(values, species=("A", "B"), times=(0.0, 1.0, 2.0)):
    return np.array(times), np.array(values, dtype=float).reshape(len(times), len(species))


def test_compare_identical_inputs():
    times, x = grid([[1000, 600], [900, 400], [800, 300]])
    ode = Trajectory(("A", "B"), times, x)
    stats = EnsembleStats(("A", "B"), times, x.copy(), np.zeros_like(x), 5)
    report = compare(stats, ode, 500)
    assert np.all(report.deviation == 0) and report.max_deviation == 0 and report.passed(0.0)
    assert report.included.tolist() == [[True, True], [True, False], [True, False]]


def test_compare_threshold_and_checkpoints():
    times, ode_x = grid([[1000, 100], [1000, 100], [1000, 100]])
    mean = ode_x + [[0, 80], [50, 80], [100, 80]]
    report = compare(EnsembleStats(("A", "B"), times, mean, mean * 0, 2), Trajectory(("A", "B"), times, ode_x), 500)
    # B is below threshold: reported, deviation against the floor, not summarised
    assert report.deviation[0, 1] == pytest.approx(80 / 500)
    assert report.max_deviation == pytest.approx(0.1)
    assert report.worst() == ("A", 2.0, pytest.approx(0.1))
    at_one = compare(EnsembleStats(("A", "B"), times, mean, mean * 0, 2), Trajectory(("A", "B"), times, ode_x),
                     500, at=[1.0])
    assert at_one.max_deviation == pytest.approx(0.05)
    rows = report.to_csv().splitlines()
    assert rows[0] == "time,species,ssa_mean,ode,deviation,included"
    assert rows[2] == "0.0,B,180.0,100.0,0.16,0"
    assert "worst: A at t=2" in report.summary()


def test_compare_mismatches():
    times, x = grid([[1, 2], [3, 4], [5, 6]])
    ode = Trajectory(("A", "B"), times, x)
    with pytest.raises(GridMismatchError):
        compare(EnsembleStats(("B", "A"), times, x, x, 1), ode, 1)
    with pytest.raises(GridMismatchError):
        compare(EnsembleStats(("A", "B"), times + 0.5, x, x, 1), ode, 1)
    with pytest.raises(GridMismatchError):
        compare(EnsembleStats(("A", "B"), times, x, x, 1), ode, 1, at=[0.5])


def test_gprotein_conservation_laws():
    net = gprotein_network().network
    laws = find_conservation(net)
    assert len(laws) == 2
    index = {s: i for i, s in enumerate(net.species)}

    def vec(*names):
        return tuple(int(s in names) for s in net.species)

    assert in_span(vec("G", "Ga", "Gd"), laws)
    assert in_span(vec("G", "Gbg"), laws)
    assert set(laws) == {vec("G", "Ga", "Gd"), vec("G", "Gbg")}
    # R is fed by synthesis and cannot appear in any law
    assert all(w[index["R"]] == 0 for w in laws)


def test_trivial_conservation():
    assert find_conservation(ReactionNetwork(("A", "B"), ())) == [(1, 0), (0, 1)]
    assert find_conservation(ReactionNetwork.from_reactions([Reaction.of(["A"], ["B"], 1.0)])) == [(1, 1)]
    assert find_conservation(ReactionNetwork.from_reactions([Reaction.of([], ["A"], 1.0)])) == []


@settings(max_examples=150, deadline=None)
@given(programs())
def test_laws_pass_conserved_check(p):
    net = to_reactions(p)
    laws = find_conservation(net)
    rng = random.Random(len(net.reactions))
    for w in laws:
        assert stoichiometry_orthogonal(net, w)
        for r in net.reactions:
            s = net.state({name: rng.randint(2, 4) for name in net.species})
            if propensity(r, s) > 0:
                assert conserved_check(net, w, s, apply(r, s))
    # a basis: full rank, and its size matches the null-space dimension
    s = net.stoichiometry()
    assert len(laws) == len(net.species) - (np.linalg.matrix_rank(s) if s.size else 0)
    if laws:
        assert np.linalg.matrix_rank(np.array(laws)) == len(laws)
