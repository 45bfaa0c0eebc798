"""Finite trees and ground tree rewriting.

Trees are nested pairs ``(symbol, children)``.  A ground rewriting rule
replaces any subtree equal to its left-hand side by its right-hand side; a
right-hand side of ``None`` deletes the matched subtree (only meaningful
for leaf left-hand sides with a parent, which is how a branch shrinks).
The rules of a system generate a labeled graph on trees, which
:func:`expand` materializes up to a size or depth budget.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DEFAULT_CAPS, ResourceLimitError, SpecError
from ..lts import LabelAlphabet, LabeledTransitionSystem


def node(symbol, *children):
    return (symbol, tuple(children))


def leaf(symbol):
    return (symbol, ())


def chain(symbols, bottom=None):
    """Unary chain ``symbols[0](symbols[1](...))``, optionally ending in a
    given subtree."""
    out = bottom
    for sym in reversed(list(symbols)):
        out = (sym, (out,) if out is not None else ())
    if out is None:
        raise SpecError("chain needs at least one symbol or a bottom tree")
    return out


def tree_to_text(t):
    sym, kids = t
    if not kids:
        return sym
    return sym + "(" + ",".join(tree_to_text(k) for k in kids) + ")"


def parse_tree(text):
    pos = [0]

    def error(msg):
        raise SpecError(f"{msg} at offset {pos[0]} in tree {text!r}")

    def ident():
        start = pos[0]
        while pos[0] < len(text) and (text[pos[0]].isalnum()
                                      or text[pos[0]] == "_"):
            pos[0] += 1
        if pos[0] == start:
            error("expected a symbol")
        return text[start:pos[0]]

    def tree():
        sym = ident()
        kids = []
        if pos[0] < len(text) and text[pos[0]] == "(":
            pos[0] += 1
            kids.append(tree())
            while pos[0] < len(text) and text[pos[0]] == ",":
                pos[0] += 1
                kids.append(tree())
            if pos[0] >= len(text) or text[pos[0]] != ")":
                error("expected ')'")
            pos[0] += 1
        return (sym, tuple(kids))

    out = tree()
    if pos[0] != len(text):
        error("trailing characters")
    return out


@dataclass(frozen=True)
class Rule:
    lhs: tuple
    label: str
    rhs: object  # tree, or None to delete the matched leaf

    def __post_init__(self):
        if self.rhs is None and self.lhs[1]:
            raise SpecError("only leaf subtrees can be deleted")


@dataclass(frozen=True)
class GTRS:
    """Ground tree rewriting system: rules plus a start tree."""

    rules: tuple
    start: tuple


def successors(tree, rules):
    """All one-step rewrites of ``tree``: (label, new tree) pairs.

    A deletion rule never applies at the root (the result would not be a
    tree)."""
    def rec(t):
        out = []
        for r in rules:
            if t == r.lhs:
                out.append((r.label, r.rhs))
        sym, kids = t
        for idx, kid in enumerate(kids):
            for lab, rep in rec(kid):
                if rep is None:
                    new_kids = kids[:idx] + kids[idx + 1:]
                else:
                    new_kids = kids[:idx] + (rep,) + kids[idx + 1:]
                out.append((lab, (sym, new_kids)))
        return out

    return [(lab, rep) for lab, rep in rec(tree) if rep is not None]


def tree_to_json(t):
    sym, kids = t
    return [sym] + [tree_to_json(k) for k in kids]


def tree_from_json(doc):
    if not doc or not isinstance(doc[0], str):
        raise SpecError(f"not a tree: {doc!r}")
    return (doc[0], tuple(tree_from_json(k) for k in doc[1:]))


def gtrs_to_json(system):
    arities = {}

    def walk(t):
        sym, kids = t
        if arities.setdefault(sym, len(kids)) != len(kids):
            arities[sym] = max(arities[sym], len(kids))
        for k in kids:
            walk(k)

    for r in system.rules:
        walk(r.lhs)
        if r.rhs is not None:
            walk(r.rhs)
    walk(system.start)
    return {
        "ranked_alphabet": dict(sorted(arities.items())),
        "labels": sorted({r.label for r in system.rules}),
        "rules": [{"lhs": tree_to_json(r.lhs), "label": r.label,
                   "rhs": None if r.rhs is None else tree_to_json(r.rhs)}
                  for r in system.rules],
        "init": tree_to_json(system.start),
    }


def gtrs_from_json(doc):
    rules = tuple(Rule(tree_from_json(r["lhs"]), r["label"],
                       None if r.get("rhs") is None
                       else tree_from_json(r["rhs"]))
                  for r in doc["rules"])
    return GTRS(rules, tree_from_json(doc["init"]))


def expand(system, max_depth=None, max_vertices=None, caps=DEFAULT_CAPS,
           step=None, start=None, render=None, labels=()):
    """Breadth-first slice of the generated graph, as an explicit system.

    ``step`` overrides the successor function and ``start``/``render`` the
    initial state and vertex naming; together they let callers expand
    synchronized variants whose states are not bare trees.  Returns the
    explicit graph and the depth of each serialized vertex.
    """
    limit = max_vertices if max_vertices is not None else caps.expansion
    if step is None:
        step = lambda t: successors(t, system.rules)
    if render is None:
        render = tree_to_text
    if start is None:
        start = system.start
    name = {start: render(start)}
    depth = {name[start]: 0}
    frontier = [start]
    edges = {}
    labels = set(labels)
    while frontier:
        nxt = []
        for t in frontier:
            d = depth[name[t]]
            if max_depth is not None and d >= max_depth:
                continue
            for lab, t2 in step(t):
                labels.add(lab)
                if t2 not in name:
                    if len(name) >= limit:
                        raise ResourceLimitError(
                            "expansion", limit,
                            "tree rewriting expansion budget")
                    name[t2] = render(t2)
                    depth[name[t2]] = d + 1
                    nxt.append(t2)
                edges.setdefault(lab, set()).add((name[t], name[t2]))
        frontier = nxt
    alphabet = LabelAlphabet(0, frozenset(labels), frozenset())
    graph = LabeledTransitionSystem(frozenset(depth), edges, alphabet)
    return graph, depth
