"""Command-line front end.

Exit status is 0 on success, 1 when the computed verdict is negative (a
schema fails, a task is unsolvable, no obstruction) and 2 on bad input.
Model arguments take a file path or ``builtin:NAME`` for the gallery models
and ``builtin:binary3`` / ``builtin:binary3-nocrash`` for input models.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from . import gallery
from .axioms import SYSTEMS, check_schema, default_pool
from .dot import export_dot
from .dynamics import CommunicationPattern, iterate_update, parse_pattern_spec
from .formula import FormulaSyntaxError, parse_formula
from .kripke import PartialEpistemicModel, frame_properties, kappa, sigma
from .serialization import (
    KRIPKE_FORMAT,
    DocumentError,
    dumps_kripke,
    dumps_model,
    load_pattern,
    loads_kripke,
    loads_model,
)
from .simplicial import ModelError, SimplicialChecker, SimplicialModel, facets, is_maximal, is_minimal
from .tasks import (
    TaskInstance,
    alive_all_obstruction,
    binary_input_model,
    check_obstruction,
    consensus_task,
    find_decision_map_with_stats,
    identity_task,
    is_morphism,
    rv1_obstruction,
    sv1_obstruction,
)


class InputError(Exception):
    pass


class Output:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def text(self, line: str) -> None:
        if self.fmt == "text":
            print(line, file=self.stream)

    def record(self, **fields) -> None:
        if self.fmt == "records":
            print(json.dumps(fields, sort_keys=True, default=str), file=self.stream)


# --------------------------------------------------------------------------
# loading

BUILTIN_INPUTS = {
    "binary3": lambda: binary_input_model(("a", "b", "c"), True),
    "binary3-nocrash": lambda: binary_input_model(("a", "b", "c"), False),
    "binary2": lambda: binary_input_model(("a", "b"), True),
}


def _read(ref: str) -> str:
    try:
        return Path(ref).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {ref}: {exc.strerror}") from None


def load_any(ref: str):
    """A simplicial or Kripke model from a file or a builtin name."""
    if ref.startswith("builtin:"):
        name = ref[len("builtin:"):]
        if name in gallery.MODELS:
            return gallery.MODELS[name]()
        if name in gallery.FRAMES:
            return gallery.FRAMES[name]()
        if name in BUILTIN_INPUTS:
            return BUILTIN_INPUTS[name]()
        raise InputError(f"unknown builtin model {name!r}")
    text = _read(ref)
    try:
        fmt = json.loads(text).get("format")
    except (ValueError, AttributeError):
        fmt = None
    if fmt == KRIPKE_FORMAT:
        return loads_kripke(text, ref)
    return loads_model(text, ref)


def load_simplicial(ref: str) -> SimplicialModel:
    m = load_any(ref)
    if isinstance(m, PartialEpistemicModel):
        raise InputError(f"{ref} is a Kripke model; convert it first")
    return m


def load_pattern_arg(spec: str, agents: Sequence[str]) -> CommunicationPattern:
    path = Path(spec)
    if path.suffix == ".pattern" or path.exists():
        p = load_pattern(path)
        if set(p.agents) != set(agents):
            raise InputError("pattern and model disagree on the agent set")
        return p
    return parse_pattern_spec(spec, agents)


# --------------------------------------------------------------------------
# subcommands

def cmd_eval(args, out: Output) -> int:
    m = load_any(args.model)
    formula = parse_formula(args.formula, agents=m.agents, props=m.props)
    if isinstance(m, PartialEpistemicModel):
        from .kripke import KripkeChecker

        checker = KripkeChecker(m, mode=args.mode)
        worlds = [args.world] if args.world else list(m.worlds)
        for w in worlds:
            if w not in m.worlds:
                raise InputError(f"unknown world {w!r}")
        results = [(w, checker.holds(w, formula)) for w in worlds]
    else:
        checker = SimplicialChecker(m, mode=args.mode)
        worlds = [m.world(args.world)] if args.world else list(m.worlds)
        results = [(m.name_of(w), checker.holds(w, formula)) for w in worlds]
    for name, val in results:
        if args.world:
            out.text("true" if val else "false")
        else:
            out.text(f"{name}: {'true' if val else 'false'}")
        out.record(world=name, formula=str(formula), value=val)
    return 0


def cmd_axioms(args, out: Output) -> int:
    m = load_simplicial(args.model)
    pool = default_pool(m, modal=not args.no_modal_pool)
    checker = SimplicialChecker(m)
    ok = True
    out.text(f"{'schema':<8} {'instances':>9}  verdict  first counterexample")
    for name in SYSTEMS[args.system]:
        rep = check_schema(m, name, pool, checker=checker)
        ok &= rep.valid
        cex = ""
        if rep.counterexample:
            params, w = rep.counterexample
            cex = f"{m.name_of(w)}: " + ", ".join(_param(p) for p in params)
        out.text(f"{name:<8} {rep.instances:>9}  {'valid' if rep.valid else 'FAIL':<7}  {cex}")
        out.record(
            schema=name,
            instances=rep.instances,
            valid=rep.valid,
            world=m.name_of(rep.counterexample[1]) if rep.counterexample else None,
            parameters=[_param(p) for p in rep.counterexample[0]] if rep.counterexample else None,
        )
    return 0 if ok else 1


def _param(p) -> str:
    if isinstance(p, tuple):
        return "{" + ",".join(p) + "}"
    return str(p)


def cmd_convert(args, out: Output) -> int:
    m = load_any(args.model)
    if args.to == "kripke":
        if isinstance(m, PartialEpistemicModel):
            raise InputError("model is already a Kripke model")
        text = dumps_kripke(kappa(m))
    else:
        if isinstance(m, SimplicialModel):
            raise InputError("model is already simplicial")
        try:
            text = dumps_model(sigma(m).model)
        except ModelError as exc:
            raise InputError(str(exc)) from None
    _emit(text, args.output, out)
    return 0


def _emit(text: str, path: Optional[str], out: Output) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
        out.text(f"wrote {path}")
    else:
        out.stream.write(text)


def cmd_update(args, out: Output) -> int:
    m = load_simplicial(args.model)
    pattern = load_pattern_arg(args.pattern, m.agents)
    res = iterate_update(m, pattern, args.rounds)
    if args.count_worlds:
        out.text(str(len(res.model.worlds)))
        out.record(worlds=len(res.model.worlds), merged=len(res.merged))
        return 0
    _emit(dumps_model(res.model), args.output, out)
    return 0


TASKS = {
    "sv1": lambda i: consensus_task(i, "SV1"),
    "rv1": lambda i: consensus_task(i, "RV1"),
    "identity": identity_task,
}


def _instance(args) -> TaskInstance:
    i = load_simplicial(args.input)
    if not i.local:
        raise InputError("the input model must be local")
    pattern = load_pattern_arg(args.pattern, i.agents)
    upd = iterate_update(i, pattern, args.rounds)
    t, tp = TASKS[args.task](i)
    return TaskInstance(i, upd.model, upd.projection, t, tp)


def cmd_solve(args, out: Output) -> int:
    inst = _instance(args)
    delta, stats = find_decision_map_with_stats(inst)
    if delta is None:
        out.text("UNSOLVABLE")
        out.text(
            f"protocol: {stats.protocol_worlds} worlds, {stats.protocol_vertices} vertices; "
            f"search: {stats.nodes} nodes, {stats.backtracks} backtracks"
        )
        out.record(solvable=False, **vars(stats))
        return 1
    check = is_morphism(delta, inst.protocol, inst.task)
    out.text("SOLVABLE")
    for v in sorted(delta):
        out.text(f"  {v} -> {delta[v]}")
    out.record(solvable=True, verified=bool(check), decision_map=delta)
    return 0


BUILTIN_FORMULAS: dict = {
    "sv1": sv1_obstruction,
    "rv1": rv1_obstruction,
    "alive": alive_all_obstruction,
}


def cmd_obstruct(args, out: Output) -> int:
    inst = _instance(args)
    if args.builtin:
        fn = BUILTIN_FORMULAS[args.builtin]
        phi = fn(inst.input.agents, 0) | fn(inst.input.agents, 1)
    else:
        text = args.expr if args.expr is not None else _read(args.formula)
        phi = parse_formula(text.strip(), agents=inst.input.agents, props=inst.input.props)
    rep = check_obstruction(inst, phi)
    for line in rep.lines():
        out.text(line)
    out.record(
        formula=str(phi),
        guarded=rep.guarded,
        valid_on_task=rep.valid_on_task,
        task_counterexample=rep.task_counterexample,
        protocol_falsifier=rep.protocol_falsifier,
        established=rep.established,
    )
    return 0 if rep.established else 1


def cmd_export_dot(args, out: Output) -> int:
    m = load_simplicial(args.model)
    _emit(export_dot(m), args.output, out)
    return 0


def cmd_info(args, out: Output) -> int:
    m = load_any(args.model)
    if isinstance(m, PartialEpistemicModel):
        rep = frame_properties(m)
        info = {
            "kind": "kripke",
            "agents": len(m.agents),
            "worlds": len(m.worlds),
            "proper": rep.proper,
            "no_empty_world": rep.no_empty_world,
            "minimal": rep.minimal,
            "maximal": rep.maximal,
        }
    else:
        info = {
            "kind": "simplicial",
            "agents": len(m.agents),
            "vertices": len(m.vertices),
            "worlds": len(m.worlds),
            "facets": len(facets(m)),
            "simplexes": len(m.simplexes),
            "local": m.local,
            "minimal": is_minimal(m),
            "maximal": is_maximal(m),
        }
    for k, v in info.items():
        out.text(f"{k}: {str(v).lower() if isinstance(v, bool) else v}")
    out.record(**info)
    return 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "records"], default=argparse.SUPPRESS)
    parser = argparse.ArgumentParser(
        prog="simplex-logic", description=__doc__.splitlines()[0], parents=[common]
    )
    sub = parser.add_subparsers(dest="command", required=True)
    add = sub.add_parser

    def sub_parser(name, **kw):
        return add(name, parents=[common], **kw)

    sub.add_parser = sub_parser

    p = sub.add_parser("eval", help="evaluate a formula")
    p.add_argument("--model", required=True)
    p.add_argument("--world")
    p.add_argument("--formula", required=True)
    p.add_argument("--mode", choices=["vertex", "face"], default="vertex")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("axioms", help="check axiom schemas")
    p.add_argument("--model", required=True)
    p.add_argument("--system", choices=sorted(SYSTEMS), default="sc")
    p.add_argument("--no-modal-pool", action="store_true")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("convert", help="convert between simplicial and Kripke models")
    p.add_argument("--model", required=True)
    p.add_argument("--to", choices=["kripke", "simplicial"], required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("update", help="product update with a communication pattern")
    p.add_argument("--model", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--count-worlds", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_update)

    for name, func, help_ in (
        ("solve", cmd_solve, "decide task solvability"),
        ("obstruct", cmd_obstruct, "check a logical obstruction"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--input", default="builtin:binary3")
        p.add_argument("--pattern", default="detectable:f=1")
        p.add_argument("--rounds", type=int, default=1)
        p.add_argument("--task", choices=sorted(TASKS), default="sv1")
        p.set_defaults(func=func)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--formula", help="file holding the formula")
    src.add_argument("--expr", help="formula text")
    src.add_argument("--builtin", choices=sorted(BUILTIN_FORMULAS))

    p = sub.add_parser("export-dot", help="write a Graphviz rendering")
    p.add_argument("--model", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("info", help="print model statistics")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_info)
    return parser


def run(argv: Optional[Sequence[str]] = None, stream=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    out = Output(getattr(args, "format", "text"), stream)
    try:
        return args.func(args, out)
    except (InputError, DocumentError, ModelError, FormulaSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
