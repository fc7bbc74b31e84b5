import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from hln.analysis import find_conservation
from hln.models import gprotein_network
from hln.ode import IntegrationError, OdeConfig, build_ode, integrate
from hln.reactions import Reaction, ReactionNetwork
from hln.translate import to_reactions

from programs import programs

GP = gprotein_network()


def mass_action_field(net, x):
    """Reference right-hand side written directly from the reaction list."""
    dx = np.zeros(len(net.species))
    for r in net.reactions:
        flux = r.rate
        for name, m in r.reactants:
            flux *= x[net.index(name)] ** m / math.factorial(m)
        for name, d in r.net_change().items():
            dx[net.index(name)] += d * flux
    return dx


def test_decay_closed_form():
    net = ReactionNetwork.from_reactions([Reaction.of(["A"], [], 1.0)])
    traj = integrate(build_ode(net), [1.0], OdeConfig(1.0, 11))
    assert traj["A"][-1] == pytest.approx(math.exp(-1.0), abs=1e-5)
    assert np.allclose(traj["A"], np.exp(-traj.times), atol=1e-6)


def test_gprotein_conservation():
    traj = integrate(build_ode(GP.network), GP.initial.counts, OdeConfig(600.0, 601))
    assert np.abs(traj["G"] + traj["Gbg"] - 10_000).max() < 1e-3
    assert np.abs(traj["G"] + traj["Gd"] + traj["Ga"] - 10_000).max() < 1e-3
    assert np.allclose(traj["Gbg"], 10_000 - traj["G"], atol=1e-3)


def test_gprotein_terms():
    sys = build_ode(GP.network)
    x = dict(L=5e5, R=9000.0, RL=300.0, G=6000.0, Gd=2000.0, Gbg=4000.0, Ga=1000.0)
    dx = dict(zip(sys.species, sys(0.0, [x[s] for s in sys.species])))
    assert dx["G"] == pytest.approx(1.0 * x["Gd"] * x["Gbg"] - 1e-5 * x["G"] * x["RL"])
    assert dx["R"] == pytest.approx(-3.32e-6 * x["L"] * x["R"] + 0.01 * x["RL"] - 4e-4 * x["R"] + 4.0)
    assert dx["Ga"] == pytest.approx(1e-5 * x["G"] * x["RL"] - 0.11 * x["Ga"])


def test_listing():
    text = build_ode(GP.network).listing()
    assert "d[G]/dt = 1.0*[Gd]*[Gbg] - 1e-05*[G]*[RL]" in text
    assert "+ 4.0" in text.splitlines()[1]


def test_empty_network():
    net = ReactionNetwork(("X", "Y"), ())
    sys = build_ode(net)
    assert np.all(sys(0.0, [3.0, 4.0]) == 0)
    traj = integrate(sys, [3.0, 4.0], OdeConfig(5.0, 6))
    assert np.all(traj.states == [3.0, 4.0])


def test_homodimer_flux():
    # flux k*A^2/2, matching the n(n-1)/2 pair count for large n
    net = ReactionNetwork.from_reactions([Reaction.of(["A", "A"], ["B"], 2.0)])
    assert build_ode(net)(0.0, [3.0, 0.0]).tolist() == [-18.0, 9.0]


def test_matches_lsoda():
    sys = build_ode(GP.network)
    cfg = OdeConfig(600.0, 61)
    traj = integrate(sys, GP.initial.counts, cfg)
    ref = solve_ivp(sys, (0.0, 600.0), np.array(GP.initial.counts, dtype=float), method="LSODA",
                    t_eval=cfg.times, rtol=1e-10, atol=1e-8)
    assert ref.success
    scale = np.maximum(np.abs(ref.y.T), 1.0)
    assert np.max(np.abs(traj.states - ref.y.T) / scale) < 1e-4


def test_tolerance_convergence():
    sys = build_ode(GP.network)
    a = integrate(sys, GP.initial.counts, OdeConfig(600.0, 61))
    b = integrate(sys, GP.initial.counts, OdeConfig(600.0, 61, rel_tol=5e-7, abs_tol=5e-9))
    assert np.max(np.abs(a.states - b.states) / np.maximum(np.abs(b.states), 1.0)) < 1e-3


def test_negative_and_mismatched_input():
    sys = build_ode(GP.network)
    bad = list(GP.initial.counts)
    bad[0] = -1
    with pytest.raises(ValueError):
        integrate(sys, bad, OdeConfig(1.0))
    with pytest.raises(ValueError):
        integrate(sys, [1.0], OdeConfig(1.0))


def test_blow_up_reports_failure():
    net = ReactionNetwork.from_reactions([Reaction.of(["A", "A"], ["A", "A", "A"], 1.0)])
    with pytest.raises(IntegrationError):
        integrate(build_ode(net), [2.0], OdeConfig(2.0, 3))


@pytest.mark.parametrize("kwargs", [dict(t_end=-1.0), dict(t_end=1.0, sample_count=1),
                                    dict(t_end=1.0, rel_tol=0.0)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        OdeConfig(**kwargs)


amounts = st.floats(min_value=0.0, max_value=1e4, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(programs(), st.lists(amounts, min_size=6, max_size=6))
def test_field_matches_reference(p, values):
    net = to_reactions(p)
    x = np.array(values[:len(net.species)])
    assert np.allclose(build_ode(net)(0.0, x), mass_action_field(net, x), rtol=1e-12, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(amounts, min_size=7, max_size=7))
def test_conservation_laws_orthogonal_to_field(values):
    sys = build_ode(GP.network)
    f = sys(0.0, values)
    for w in find_conservation(GP.network):
        scale = max(1.0, float(np.abs(np.array(w) * f).max()))
        assert abs(float(np.dot(w, f))) <= 1e-9 * scale
