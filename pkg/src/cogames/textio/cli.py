"""Command line front end.

Exit codes: 0 holds or success, 1 fails, 2 unknown, 64 usage error or an
input the command cannot handle, 65 parse error.  Results go to stdout,
diagnostics to stderr.  ``--format json`` output validates against
``schema/cli-output.schema.json``.
"""
from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import sys

from .. import gallery
from ..arena import EQUALITY, INDIFFERENCE, INT_LEQ, RELATION, Payoff
from ..core import (Assigned, DifferAt, DivergenceDetected, FuelExhausted, GameSystem,
                    bisim_bounded, bisim_exact, game_of, uassign, unfold_game, with_pref)
from ..equilibrium import TieRule, backward_induction, check_spe, choice_key
from ..errors import GameError, ParseError
from ..escalation import MEMORYLESS, BoundedMemory, EscalationReport, check_escalation
from ..finiteness import (is_always_convergent, is_convergent, is_finite_game,
                          is_finite_history_game, is_finitely_broad)
from ..verdict import Status, Verdict
from .dsl import parse_any, to_dsl
from .render import export_prefix_json, ref_text, render_ascii, render_dot, tree_to_obj

EXIT = {"holds": 0, "ok": 0, "fails": 1, "unknown": 2, "usage": 64, "parse": 65}
PREFS = {"leq": INT_LEQ, "eq": EQUALITY, "indiff": INDIFFERENCE, "order": RELATION}
CHECKS = {
    "finite": lambda s, a: is_finite_game(s),
    "broad": lambda s, a: is_finitely_broad(s),
    "finite-history": lambda s, a: is_finite_history_game(s),
    "convergent": lambda s, a: is_convergent(s, a.fuel),
    "always-convergent": lambda s, a: is_always_convergent(s, a.fuel),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT["usage"])


def jsonable(x):
    """Plain JSON data for results, witnesses and traces."""
    if isinstance(x, Payoff):
        return x.as_dict()
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, Verdict):
        return {"status": x.status.value, "reason": x.reason, "witness": jsonable(x.witness),
                "data": jsonable(x.data)}
    if isinstance(x, GameSystem):
        return {"system": x.name or str(x)}
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        out = {"type": type(x).__name__}
        for f in dataclasses.fields(x):
            out[f.name] = jsonable(getattr(x, f.name))
        return out
    if isinstance(x, dict):
        return {str(ref_text(k)): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


def _load(args):
    systems = []
    for path in args.files:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read {path}: {e.strerror}") from None
        try:
            s = parse_any(text)
        except ParseError as e:
            e.path = path
            raise
        systems.append(s if s.name else _named(s, path))
    for name in args.example or ():
        try:
            systems.append(gallery.build(name))
        except KeyError as e:
            raise UsageError(e.args[0]) from None
    if args.pref_override:
        systems = [with_pref(s, PREFS[args.pref_override]) for s in systems]
    return systems


def _named(s, name):
    object.__setattr__(s, "name", name)
    return s


def _one(args):
    systems = _load(args)
    if len(systems) != 1:
        raise UsageError(f"{args.command} takes exactly one game (got {len(systems)})")
    return systems[0]


def _profile(args):
    s = _one(args)
    if not getattr(s, "is_profile", False):
        raise UsageError(f"{s.name or 'input'} is a game, not a strategy profile")
    return s


def _samples(args):
    return None if args.exhaustive else args.nat_samples


def _result(command, status, reason="", witness=None, data=None, text=None):
    return {"command": command, "status": status, "exit_code": EXIT[status], "reason": reason,
            "witness": witness, "data": data, "_text": text}


def _verdict(command, v: Verdict, extra=None):
    return _result(command, v.status.value, v.reason, jsonable(v.witness),
                   jsonable(v.data if extra is None else extra))


def cmd_parse(args):
    s = _one(args)
    kind = "profile" if getattr(s, "is_profile", False) else "game"
    return _result("parse", "ok", f"{kind} with {len(s.census)} states",
                   data={"kind": kind, "states": len(s.census), "dsl": to_dsl(s)}, text=to_dsl(s))


def cmd_unfold(args):
    s = _one(args)
    if args.format == "dot":
        return _result("unfold", "ok", text=render_dot(s, args.depth, _samples(args)))
    tree = unfold_game(s, args.depth, _samples(args))
    return _result("unfold", "ok", data=tree_to_obj(tree), text=render_ascii(s, args.depth, _samples(args)))


def cmd_render(args):
    s = _one(args)
    fmt = args.format
    if fmt == "dsl":
        return _result("render", "ok", text=to_dsl(s))
    if fmt == "dot":
        return _result("render", "ok", text=render_dot(s, args.depth, _samples(args)))
    if fmt == "json":
        return _result("render", "ok", data=json.loads(export_prefix_json(s, args.depth, _samples(args))))
    return _result("render", "ok", text=render_ascii(s, args.depth, _samples(args)))


def cmd_eq(args):
    systems = _load(args)
    if len(systems) != 2:
        raise UsageError(f"eq takes exactly two games (got {len(systems)})")
    g1, g2 = systems
    if g1.is_profile != g2.is_profile:
        raise UsageError("eq compares two games or two profiles, not one of each")
    if not args.bounded and g1.has_census and g2.has_census:
        same = bisim_exact(g1, g2)
        return _result("eq", "holds" if same else "fails",
                       "bisimilar" if same else "not bisimilar", data={"method": "exact"})
    r = bisim_bounded(g1, g2, args.depth, _samples(args))
    if isinstance(r, DifferAt):
        return _result("eq", "fails", f"differ at {list(r.path)}: {r.reason}",
                       witness=jsonable(list(r.path)), data={"method": "bounded"})
    return _result("eq", "unknown", f"equal up to depth {r.depth}", witness=r.depth,
                   data={"method": "bounded"})


def cmd_uassign(args):
    s = _profile(args)
    r = uassign(s, args.fuel)
    if isinstance(r, Assigned):
        return _result("uassign", "holds", f"payoff {r.payoff}", data=jsonable(r.payoff))
    if isinstance(r, DivergenceDetected):
        return _result("uassign", "fails", f"diverges with period {r.period}", witness=jsonable(r))
    assert isinstance(r, FuelExhausted)
    return _result("uassign", "unknown", f"no leaf within {args.fuel} moves", witness=args.fuel)


def cmd_check(args):
    s = _one(args)
    if args.property in ("convergent", "always-convergent") and not getattr(s, "is_profile", False):
        raise UsageError(f"check {args.property} needs a strategy profile")
    return _verdict(f"check {args.property}", CHECKS[args.property](s, args))


def _choices_text(s):
    return ", ".join(f"/{'/'.join(map(str, pos))}={c}" for pos, c in choice_key(s))


def cmd_solve(args):
    g = game_of(_one(args))
    sols = backward_induction(g, TieRule(args.tie))
    if not isinstance(sols, list):
        sols = [sols]
    data = [{"/" + "/".join(map(str, pos)): c for pos, c in choice_key(s)} for s in sols]
    text = "".join(f"spe {i}: {_choices_text(s)}\n" for i, s in enumerate(sols))
    return _result("solve", "ok", f"{len(sols)} subgame perfect equilibria", data=data, text=text)


def cmd_check_spe(args):
    s = _profile(args)
    v = check_spe(s)
    steps = len(v.data) if v.status is Status.HOLDS else None
    return _verdict("check-spe", v, extra={"certificate_steps": steps} if steps is not None else None)


def cmd_check_escalation(args):
    s = _profile(args)
    wc = MEMORYLESS if args.memory == 0 else BoundedMemory(args.memory)
    r = check_escalation(s, wc)
    if not isinstance(r, EscalationReport):
        return _result("check-escalation", "fails", r.reason)
    witnesses = []
    lines = [f"escalation: lasso period {r.period}, witnesses verified: {r.verified}"]
    for w in r.witnesses:
        key = {ref_text(ref): w.profile.unfold(ref).chosen
               for ref in w.profile.census if not w.profile.unfold(ref).is_leaf}
        witnesses.append({"state": ref_text(w.ref), "head": jsonable(w.head), "choices": jsonable(key),
                          "certificate_steps": len(w.certificate)})
        lines.append(f"  at {ref_text(w.ref)} choose {w.head}: SPE witness "
                     + ", ".join(f"{k}={v}" for k, v in sorted(key.items()))
                     + f" ({len(w.certificate)} certificate steps)")
    status = "holds" if r.verified else "fails"
    reason = f"divergent with period {r.period} along good choices"
    if not r.verified:
        reason += "; a witness failed verification"
    return _result("check-escalation", status, reason, witness=jsonable(r.lasso),
                   data={"period": r.period, "verified": r.verified, "witnesses": witnesses},
                   text="\n".join(lines) + "\n")


def cmd_examples(args):
    entries = [gallery.GALLERY[n] for n in gallery.GALLERY]
    data = [{"name": e.name, "description": e.description,
             "facts": {k: {"status": st, "note": note} for k, (st, note) in e.facts.items()}}
            for e in entries]
    width = max(len(e.name) for e in entries)
    text = "".join(f"{e.name:<{width}}  {e.description}\n" for e in entries)
    return _result("examples", "ok", f"{len(entries)} entries", data=data, text=text)


def build_parser():
    p = _Parser(prog="cogames", description="Analyses of finite and infinite extensive games.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, sources=True, formats=("text", "json")):
        sp = sub.add_parser(name)
        sp.set_defaults(fn=fn)
        if sources:
            sp.add_argument("files", nargs="*", help="game documents (.game)")
            sp.add_argument("--example", action="append", help="gallery entry; repeatable")
            sp.add_argument("--pref-override", choices=sorted(PREFS))
        sp.add_argument("--format", choices=formats, default="text")
        sp.add_argument("--fuel", type=_positive, default=10_000)
        sp.add_argument("--depth", type=_nonnegative, default=16)
        sp.add_argument("--nat-samples", type=_positive, default=8)
        sp.add_argument("--exhaustive", action="store_true",
                        help="refuse to sample naturals-indexed branching")
        sp.add_argument("--tie", choices=("first", "all"), default="first")
        return sp

    add("parse", cmd_parse)
    add("unfold", cmd_unfold, formats=("text", "json", "dot"))
    add("render", cmd_render, formats=("text", "json", "dot", "dsl"))
    add("eq", cmd_eq).add_argument("--bounded", action="store_true")
    add("uassign", cmd_uassign)
    add("check", cmd_check).add_argument("property", choices=sorted(CHECKS))
    add("solve", cmd_solve)
    add("check-spe", cmd_check_spe)
    add("check-escalation", cmd_check_escalation).add_argument(
        "--memory", type=int, choices=(0, 1, 2, 3), default=0,
        help="memory states allowed in witnesses; 0 means memoryless")
    add("examples", cmd_examples, sources=False)
    return p


def _positive(s):
    n = int(s)
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _nonnegative(s):
    n = int(s)
    if n < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return n


def _emit(res, fmt, out):
    if fmt == "json":
        doc = {k: v for k, v in res.items() if k != "_text"}
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return
    text = res["_text"]
    if text is None or res["status"] != "ok":
        out.write(f"{res['status']}: {res['reason']}\n" if res["reason"] else f"{res['status']}\n")
        if res["witness"] is not None:
            out.write(f"witness: {json.dumps(res['witness'], sort_keys=True)}\n")
    if text is not None:
        out.write(text)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT["usage"]
    fmt = args.format
    try:
        res = args.fn(args)
    except ParseError as e:
        where = getattr(e, "path", "<input>")
        res = _result(args.command, "parse", f"{where}:{e.line}:{e.column}: {e.message}",
                      witness={"file": where, "line": e.line, "column": e.column})
        print(f"parse error: {res['reason']}", file=err)
    except UsageError as e:
        res = _result(args.command, "usage", str(e))
        print(f"error: {e}", file=err)
    except GameError as e:
        res = _result(args.command, "usage", f"{type(e).__name__}: {e}")
        print(f"error: {res['reason']}", file=err)
    if fmt == "json":
        _emit(res, "json", out)
    elif res["status"] not in ("parse", "usage"):
        _emit(res, "text", out)
    return res["exit_code"]


if __name__ == "__main__":
    raise SystemExit(main())
