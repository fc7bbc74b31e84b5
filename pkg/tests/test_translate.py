from collections import Counter

from hypothesis import given, settings

from hln.frontend import Process, parse_program
from hln.models import GPROTEIN_HLN
from hln.pi import Channel, Delay, Recv, Send, reachable_reactions
from hln.reactions import Reaction
from hln.translate import channel_name, reaction_of, to_pi, to_reactions

from programs import actions, programs


def test_gprotein_reactions_golden():
    net = to_reactions(parse_program(GPROTEIN_HLN))
    assert list(net.reactions) == [
        Reaction.of(["Gd", "Gbg"], ["G"], 1.0),
        Reaction.of(["R", "L"], ["RL"], 3.32e-6),
        Reaction.of(["G", "RL"], ["Ga", "Gbg", "RL"], 1e-5),
        Reaction.of(["RL"], ["R", "L"], 0.01),
        Reaction.of(["Ga"], ["Gd"], 0.11),
        Reaction.of(["R"], [], 4e-4),
        Reaction.of(["RL"], [], 4e-3),
    ]
    assert set(net.species) == {"Gd", "Gbg", "G", "R", "L", "RL", "Ga"}


def test_empty_program():
    assert to_reactions(Process()).reactions == ()
    sys = to_pi(Process())
    assert sys.channels == () and sys.automata == ()


def test_duplicates_collapse():
    p = parse_program("bind(a, b, c, 1.0); bind(a, b, c, 1.0)")
    assert to_reactions(p).reactions == (Reaction.of(["a", "b"], ["c"], 1.0),)
    assert len(to_pi(p).channels) == 1
    swapped = parse_program("bind(a, b, c, 1.0); bind(b, a, c, 1.0)")
    assert len(to_reactions(swapped).reactions) == 1
    assert len(to_pi(swapped).channels) == 1


def test_bind_process_shape():
    sys = to_pi(parse_program("bind(Gd, Gbg, G, 1.0)"))
    assert sys.channels == (Channel("ch0", 1.0),)
    gd, gbg, g = sys.automata
    assert (gd.name, gbg.name, g.name) == ("Gd", "Gbg", "G")
    (b,) = gd.branches
    assert b.prefix == Send("ch0") and b.continuation == (("G", 1),)
    (b,) = gbg.branches
    assert b.prefix == Recv("ch0") and b.continuation == ()
    assert g.branches == ()


def test_gprotein_process_shape():
    sys = to_pi(parse_program(GPROTEIN_HLN))
    by_name = {a.name: a for a in sys.automata}
    rl = by_name["RL"]
    assert len(rl.branches) == 3
    shapes = {(type(b.prefix).__name__, getattr(b.prefix, "rate", None), dict(b.continuation).get("R", 0),
               dict(b.continuation).get("RL", 0)) for b in rl.branches}
    assert shapes == {("Delay", 0.01, 1, 0), ("Delay", 4e-3, 0, 0), ("Send", None, 0, 1)}
    (g,) = by_name["G"].branches
    assert isinstance(g.prefix, Recv) and dict(g.continuation) == {"Ga": 1, "Gbg": 1}
    assert {c.name: c.rate for c in sys.channels} == {"ch0": 1.0, "ch1": 3.32e-6, "ch2": 1e-5}
    assert [b.prefix for b in by_name["Ga"].branches] == [Delay(0.11)]


def test_channel_names_follow_action_index():
    p = parse_program("degrade(x, 1.0); bind(a, b, c, 2.0); activate(a, e, f, 3.0)")
    assert [c.name for c in to_pi(p).channels] == [channel_name(1), channel_name(2)] == ["ch1", "ch2"]


def test_synonyms():
    for x, y in [("bind", "dimerize"), ("activate", "phosphorylate")]:
        px, py = parse_program(f"{x}(a, b, c, 2.0)"), parse_program(f"{y}(a, b, c, 2.0)")
        assert to_reactions(px) == to_reactions(py)
        assert to_pi(px) == to_pi(py)


def test_activate_keeps_catalyst():
    assert reaction_of(parse_program("activate(a, b, c, 1.0)").actions[0]) == \
        Reaction.of(["a", "b"], ["b", "c"], 1.0)


@settings(max_examples=300, deadline=None)
@given(programs())
def test_commuting_square(p):
    assert Counter(reachable_reactions(to_pi(p)).reactions) == Counter(to_reactions(p).reactions)


@settings(max_examples=200, deadline=None)
@given(actions(), programs())
def test_homomorphism(a, p):
    whole = to_reactions(Process((a,) + p.actions))
    parts = set(to_reactions(Process((a,))).reactions) | set(to_reactions(p).reactions)
    assert set(whole.reactions) == parts
    assert len(whole.reactions) == len(parts)
