"""Command-line interface.

    hln compile  INPUT --emit reactions|pi [--out PATH]
    hln simulate MODEL --method ssa|ssa-pi|ode [--t-end T] [--samples N]
                       [--seed S] [--runs R] [--out PATH]
    hln compare  MODEL [--runs N] [--threshold C] [--bound B] [--out PATH]
    hln validate MODEL [--max-states N]

MODEL and INPUT are ``builtin:gprotein``, ``builtin:gprotein-hln`` or a path
to a ``.hln`` file (initial counts via repeated ``--init NAME=COUNT``).
Exit status: 0 success, 1 failed check or bad input, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import StateSpaceExplosion, compare, enumerate_ctmc, find_conservation
from .frontend import HlnSyntaxError, Process, parse_program
from .models import BUILTINS, builtin
from .ode import OdeConfig, build_ode, integrate
from .pi import ProcessSystem, reachable_reactions
from .reactions import ReactionNetwork, State, conserved_check
from .ssa import SsaConfig, ensemble, ensemble_pi, simulate, simulate_pi
from .translate import to_pi, to_reactions

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


@dataclass
class Model:
    name: str
    network: ReactionNetwork
    initial: State
    t_end: float
    process: Process | None

    def system(self) -> ProcessSystem:
        if self.process is None:
            raise UsageError(f"{self.name} has no high-level program; no process system available")
        return to_pi(self.process).with_initial(self.initial.as_dict())


def _parse_init(items: list[str]) -> dict[str, int]:
    counts = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--init expects NAME=COUNT, got {item!r}")
        try:
            counts[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"--init count for {name!r} is not an integer") from None
        if counts[name.strip()] < 0:
            raise UsageError(f"--init count for {name!r} is negative")
    return counts


def load_model(source: str, init: list[str] | None = None) -> Model:
    if source.startswith("builtin:"):
        try:
            m = builtin(source)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        initial = m.initial
        if init:
            counts = {**m.initial.as_dict(), **_parse_init(init)}
            initial = _state(m.network, counts)
        return Model(source, m.network, initial, m.t_end, m.process)
    path = Path(source)
    if not path.exists():
        raise UsageError(f"no such model or file: {source} (builtins: "
                         + ", ".join(f"builtin:{k}" for k in BUILTINS) + ")")
    try:
        process = parse_program(path.read_text(encoding="utf-8"))
    except HlnSyntaxError as exc:
        raise InputError(f"{path}:{exc}") from None
    net = to_reactions(process)
    return Model(source, net, _state(net, _parse_init(init)), 600.0, process)


def _state(net: ReactionNetwork, counts: dict[str, int]) -> State:
    try:
        return net.state(counts)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_compile(args) -> int:
    model = load_model(args.input, args.init)
    if args.emit == "reactions":
        text = model.network.to_json()
    else:
        text = model.system().to_json()
    _emit(text + "\n", args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = load_model(args.model, args.init)
    t_end = args.t_end if args.t_end is not None else model.t_end
    if args.method == "ode":
        cfg = OdeConfig(t_end, args.samples)
        traj = integrate(build_ode(model.network), model.initial.counts, cfg)
        _emit(traj.to_csv(), args.out)
        return EXIT_OK
    cfg = SsaConfig(t_end, args.samples, args.seed, args.runs)
    if args.method == "ssa-pi":
        system = model.system()
        result = ensemble_pi(system, cfg) if args.runs > 1 else simulate_pi(system, cfg)
    else:
        if args.runs > 1:
            result = ensemble(model.network, model.initial, cfg)
        else:
            result = simulate(model.network, model.initial, cfg)
    _emit(result.to_csv(), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    model = load_model(args.model, args.init)
    t_end = args.t_end if args.t_end is not None else model.t_end
    stats = ensemble(model.network, model.initial, SsaConfig(t_end, args.samples, args.seed, args.runs))
    ode = integrate(build_ode(model.network), model.initial.counts, OdeConfig(t_end, args.samples))
    at = None
    if args.checkpoints:
        at = list(np.linspace(0.0, t_end, args.checkpoints + 1)[1:])
    report = compare(stats, ode, args.threshold, at=at)
    if args.out:
        Path(args.out).write_text(report.to_csv(), encoding="utf-8")
    print(f"{model.name}: {args.runs} SSA runs vs ODE")
    print(report.summary())
    ok = report.passed(args.bound)
    print(f"{'PASS' if ok else 'FAIL'} (bound {args.bound:g})")
    return EXIT_OK if ok else EXIT_FAIL


def _formula(species, weights) -> str:
    terms = []
    for name, w in zip(species, weights):
        if w == 0:
            continue
        coeff = "" if abs(w) == 1 else f"{abs(w)}*"
        sign = "-" if w < 0 else "+"
        terms.append(f"{sign} {coeff}{name}")
    return " ".join(terms).removeprefix("+ ")


def cmd_validate(args) -> int:
    model = load_model(args.model, args.init)
    net = model.network
    ok = True
    print(f"{model.name}: {len(net.species)} species, {len(net.reactions)} reactions")
    laws = find_conservation(net)
    print("conserved quantities:")
    if not laws:
        print("  (none)")
    for w in laws:
        total = sum(a * b for a, b in zip(w, model.initial.counts))
        # each law must survive one firing of every reaction that can fire
        exact = all(
            conserved_check(net, w, s, s.replace(r.net_change()))
            for r in net.reactions
            for s in [_enabled_state(net, r)]
        )
        ok &= exact
        print(f"  {_formula(net.species, w)} = {total}" + ("" if exact else "  [NOT CONSERVED]"))

    if model.process is None:
        print("CTMC equivalence: skipped (no high-level program for this model)")
    else:
        small = State(net.species, tuple(min(c, 1) for c in model.initial.counts))
        pi_net = reachable_reactions(to_pi(model.process))
        try:
            g_rx = enumerate_ctmc(net, small, args.max_states)
            g_pi = enumerate_ctmc(pi_net, State.of(pi_net.species, small.as_dict()), args.max_states)
        except StateSpaceExplosion as exc:
            print(f"CTMC equivalence: FAIL ({exc})")
            return EXIT_FAIL
        same = g_rx == g_pi
        ok &= same
        print(f"CTMC equivalence on down-scaled state {small.as_dict()}: "
              f"{len(g_rx.states)} states, {len(g_rx.edges)} edges -> "
              f"{'equal' if same else 'DIFFERENT'}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def _enabled_state(net: ReactionNetwork, reaction) -> State:
    return net.state({name: n for name, n in reaction.reactants})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hln", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def model_arg(p, name="model"):
        p.add_argument(name)
        p.add_argument("--init", action="append", metavar="NAME=COUNT",
                       help="initial count (repeatable)")

    p = sub.add_parser("compile", help="translate a program to reactions or a process system")
    model_arg(p, "input")
    p.add_argument("--emit", choices=["reactions", "pi"], required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="run SSA or ODE and write CSV")
    model_arg(p)
    p.add_argument("--method", choices=["ssa", "ssa-pi", "ode"], default="ssa")
    p.add_argument("--t-end", type=float)
    p.add_argument("--samples", type=int, default=601)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="SSA ensemble mean vs ODE")
    model_arg(p)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--threshold", type=float, default=500.0)
    p.add_argument("--bound", type=float, default=0.05)
    p.add_argument("--t-end", type=float)
    p.add_argument("--samples", type=int, default=601)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoints", type=int, default=10,
                   help="summarise at this many evenly spaced times (0: every sample)")
    p.add_argument("--out", help="write the per-cell report as CSV")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="conservation laws and CTMC equivalence")
    model_arg(p)
    p.add_argument("--max-states", type=int, default=100_000)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hln: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"hln: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"hln: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
