"""Deterministic renderings of prefix trees: text, Graphviz and JSON.

Every position gets the id ``ref@path`` where ``path`` is the label path
from the root, so ids are stable across runs and unique within a tree.
A node whose naturals-indexed branching was sampled shows an ellipsis
child.
"""
from __future__ import annotations

import json

from ..core import DEFAULT_NAT_SAMPLES, Continuation, PLeaf, PNode, unfold_game

ELLIPSIS = "..."


def ref_text(ref) -> str:
    if isinstance(ref, tuple):
        return ".".join(ref_text(x) for x in ref) if ref else "()"
    return str(ref)


def label_text(label) -> str:
    if isinstance(label, tuple):
        return "(" + ", ".join(map(str, label)) + ")"
    return str(label)


def position_id(ref, path) -> str:
    return f"{ref_text(ref)}@/" + "/".join(label_text(c) for c in path)


def _json_label(label):
    if isinstance(label, tuple):
        return [_json_label(c) for c in label]
    return label


def tree_to_obj(tree, path=()):
    """Plain JSON-ready structure for a prefix tree."""
    if isinstance(tree, PLeaf):
        return {"kind": "leaf", "id": position_id(tree.ref, path), "ref": ref_text(tree.ref),
                "payoff": tree.payoff.as_dict()}
    if isinstance(tree, Continuation):
        return {"kind": "continuation", "id": position_id(tree.ref, path), "ref": ref_text(tree.ref)}
    return {
        "kind": "node",
        "id": position_id(tree.ref, path),
        "ref": ref_text(tree.ref),
        "agent": tree.agent,
        "chosen": _json_label(tree.chosen),
        "elided": tree.elided,
        "children": [{"label": _json_label(c), "tree": tree_to_obj(t, path + (c,))}
                     for c, t in tree.children],
    }


def export_prefix_json(system, depth, nat_samples=DEFAULT_NAT_SAMPLES) -> str:
    tree = unfold_game(system, depth, nat_samples)
    doc = {"system": system.name or None, "depth": depth, "nat_samples": nat_samples,
           "tree": tree_to_obj(tree)}
    return json.dumps(doc, indent=2, sort_keys=True, default=str)


def _node_text(tree):
    if isinstance(tree, PLeaf):
        return f"leaf {tree.payoff}"
    if isinstance(tree, Continuation):
        return "..."
    who = tree.agent if tree.agent is not None else "joint"
    return f"node {who}"


def render_ascii(system, depth, nat_samples=DEFAULT_NAT_SAMPLES) -> str:
    """Indented outline; a ``*`` marks the chosen branch of a profile."""
    tree = unfold_game(system, depth, nat_samples)
    lines = [f"{_node_text(tree)}  [{position_id(tree.ref, ())}]"]

    def walk(t, path, indent):
        if not isinstance(t, PNode):
            return
        for c, sub in t.children:
            mark = "*" if t.chosen is not None and c == t.chosen else "-"
            lines.append(f"{indent}{mark} {label_text(c)} -> {_node_text(sub)}  "
                         f"[{position_id(sub.ref, path + (c,))}]")
            walk(sub, path + (c,), indent + "    ")
        if t.elided:
            lines.append(f"{indent}- {ELLIPSIS}")

    walk(tree, (), "  ")
    return "\n".join(lines) + "\n"


def _dot_escape(s):
    return s.replace("\\", "\\\\").replace('"', '\\"')


def render_dot(system, depth, nat_samples=DEFAULT_NAT_SAMPLES) -> str:
    tree = unfold_game(system, depth, nat_samples)
    out = ["digraph prefix {", "  node [fontname=monospace];"]

    def emit(t, path):
        pid = _dot_escape(position_id(t.ref, path))
        shape = "box" if isinstance(t, PLeaf) else "plaintext" if isinstance(t, Continuation) else "ellipse"
        out.append(f'  "{pid}" [label="{_dot_escape(_node_text(t))}", shape={shape}];')
        if not isinstance(t, PNode):
            return
        for c, sub in t.children:
            cid = _dot_escape(position_id(sub.ref, path + (c,)))
            style = ", style=bold" if t.chosen is not None and c == t.chosen else ""
            emit(sub, path + (c,))
            out.append(f'  "{pid}" -> "{cid}" [label="{_dot_escape(label_text(c))}"{style}];')
        if t.elided:
            eid = f"{pid}/{ELLIPSIS}"
            out.append(f'  "{eid}" [label="{ELLIPSIS}", shape=plaintext];')
            out.append(f'  "{pid}" -> "{eid}" [style=dashed];')

    emit(tree, ())
    out.append("}")
    return "\n".join(out) + "\n"
