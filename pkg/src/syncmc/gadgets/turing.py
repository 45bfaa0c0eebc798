"""Turing machines encoded as tree rewriting synchronized with a star.

A machine configuration ``a_1..a_k q b_l..b_1`` (head on ``b_l``) becomes a
binary tree: the left branch stores the tape left of the head top-down as
``X(a_1(...a_k))``, the right branch stores the rest as ``X(b_1(...b_l(q)))``.
Each machine step is simulated in two rewrites: first the right branch
applies the transition (guessing which letter ``a`` crosses the head
boundary) and then the left branch adds or removes that letter.  Labels
record the crossing letter, ``add``/``rem`` direction, and whether the
halting state was just entered; the left-branch rewrite carries the barred
copy of the letter.  Synchronizing the rewriting graph with a small star
graph, which after any unbarred label permits exactly its barred
counterpart, filters out mismatched guesses, so paths of the synchronized
product are exactly the valid runs.

Two details differ from naive transcription and are deliberate: deleting a
tape letter removes the leaf rather than rewriting it to an empty tree
(see ``trees.Rule``), and a left-moving transition applied to an empty
right branch keeps the ``X`` end marker above the rewritten part.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..errors import DEFAULT_CAPS, SpecError
from ..formulas import (And, Edge, Exists, Not, ReachSet, and_all, or_all)
from ..lts import LabelAlphabet, LabeledTransitionSystem
from .trees import GTRS, Rule, expand, leaf, node

_MARK = "X"
_DIRS = ("L", "R")


@dataclass(frozen=True)
class DTMSpec:
    """Deterministic single-tape Turing machine.

    ``delta`` maps (state, symbol) to (state, symbol, 'L'|'R').  The blank
    symbol is part of the alphabet.  No transitions may leave the halting
    state, and for the tree encoding to be usable the marker name 'X' must
    stay free.
    """

    states: frozenset
    alphabet: frozenset
    blank: str
    q0: str
    qf: str
    delta: dict

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        if self.blank not in self.alphabet:
            raise SpecError("the blank symbol must be in the alphabet")
        if self.q0 not in self.states or self.qf not in self.states:
            raise SpecError("initial and halting state must be states")
        if self.q0 == self.qf:
            raise SpecError("initial and halting state must differ")
        if self.states & self.alphabet:
            raise SpecError("states and tape symbols must be disjoint")
        if _MARK in self.states | self.alphabet:
            raise SpecError(f"the symbol {_MARK!r} is reserved for the "
                            "tree encoding")
        for (q, b), (p, c, d) in self.delta.items():
            if q == self.qf:
                raise SpecError("no transitions may leave the halting state")
            if q not in self.states or p not in self.states:
                raise SpecError(f"unknown state in transition ({q},{b})")
            if b not in self.alphabet or c not in self.alphabet:
                raise SpecError(f"unknown symbol in transition ({q},{b})")
            if d not in _DIRS:
                raise SpecError(f"bad direction {d!r}")


def machine_to_json(machine):
    return {
        "states": sorted(machine.states),
        "alphabet": sorted(machine.alphabet),
        "blank": machine.blank,
        "init": machine.q0,
        "halt": machine.qf,
        "delta": sorted([q, b, p, c, d]
                        for (q, b), (p, c, d) in machine.delta.items()),
    }


def machine_from_json(doc):
    delta = {(q, b): (p, c, d) for q, b, p, c, d in doc["delta"]}
    return DTMSpec(frozenset(doc["states"]), frozenset(doc["alphabet"]),
                   doc["blank"], doc["init"], doc["halt"], delta)


def run_machine(machine, max_steps, tape=()):
    """Direct simulation from the given tape (head at its first cell).

    Returns (halted, steps, configs) where configs are
    (state, left-of-head tuple, head-and-right tuple) snapshots with blank
    padding trimmed.
    """
    left = ()
    right = tuple(tape)
    state = machine.q0
    blank = machine.blank
    configs = [(state, left, right)]
    for step in range(max_steps):
        if state == machine.qf:
            return True, step, configs
        head = right[0] if right else blank
        key = (state, head)
        if key not in machine.delta:
            return False, step, configs
        state, written, direction = machine.delta[key]
        rest = right[1:]
        if direction == "R":
            left = left + (written,)
            right = rest
        else:
            moved = left[-1] if left else blank
            left = left[:-1]
            right = (moved, written) + rest
        while right and right[-1] == blank:
            right = right[:-1]
        while left and left[0] == blank:
            left = left[1:]
        configs.append((state, left, right))
    return state == machine.qf, max_steps, configs


def halts(machine, max_steps):
    halted, _, _ = run_machine(machine, max_steps)
    return halted


def sigma_label(direction, symbol, flag, barred=False):
    """Rule label as an identifier: direction add/rem, optionally barred
    symbol, halting flag top/bot."""
    d = "add" if direction == "+" else "rem"
    s = ("bar_" + symbol) if barred else symbol
    return f"{d}_{s}_{'top' if flag else 'bot'}"


def machine_labels(machine):
    """All rule labels: (direction, symbol, barred?, flag) combinations."""
    out = []
    for d in "+-":
        for a in sorted(machine.alphabet):
            for barred in (False, True):
                for flag in (False, True):
                    out.append(sigma_label(d, a, flag, barred))
    return out


def machine_to_gtrs(machine):
    """The rewriting system whose graph contains the machine's runs."""
    gamma = sorted(machine.alphabet)
    blank = machine.blank
    rules = []

    def flag_of(p):
        return p == machine.qf

    for (q, b), (p, c, d) in sorted(machine.delta.items()):
        flag = flag_of(p)
        if d == "L":
            for a in gamma:
                lab = sigma_label("-", a, flag)
                rules.append(Rule(node(b, leaf(q)), lab,
                                  node(c, node(a, leaf(p)))))
                if b == blank:
                    # Empty right branch: the rewritten part stays below
                    # the end marker.
                    rules.append(Rule(node(_MARK, leaf(q)), lab,
                                      node(_MARK,
                                           node(c, node(a, leaf(p))))))
        else:
            lab = sigma_label("+", c, flag)
            for a in gamma:
                rules.append(Rule(node(a, node(b, leaf(q))), lab,
                                  node(a, leaf(p))))
            if b == blank:
                rules.append(Rule(node(_MARK, leaf(q)), lab,
                                  node(_MARK, leaf(p))))

    # Left-branch bookkeeping, for either halting flag.
    for flag in (False, True):
        for a in gamma:
            lab = sigma_label("-", a, flag, barred=True)
            rules.append(Rule(leaf(a), lab, None))
            if a == blank:
                rules.append(Rule(leaf(_MARK), lab, leaf(_MARK)))
        for c in gamma:
            lab = sigma_label("+", c, flag, barred=True)
            for a in gamma:
                rules.append(Rule(leaf(a), lab, node(a, leaf(c))))
            if c == blank:
                rules.append(Rule(leaf(_MARK), lab, leaf(_MARK)))
            else:
                rules.append(Rule(leaf(_MARK), lab, node(_MARK, leaf(c))))

    start = node("root", leaf(_MARK), node(_MARK, leaf(machine.q0)))
    return GTRS(tuple(rules), start)


def star_graph(machine):
    """The filter component: a hub with one spoke per unbarred label; the
    unbarred label leads out, its barred counterpart leads back."""
    hub = "hub"
    vertices = {hub}
    edges = {}
    for d in "+-":
        for a in sorted(machine.alphabet):
            for flag in (False, True):
                out_lab = sigma_label(d, a, flag)
                back_lab = sigma_label(d, a, flag, barred=True)
                spoke = "w_" + out_lab
                vertices.add(spoke)
                edges[out_lab] = {(hub, spoke)}
                edges[back_lab] = {(spoke, hub)}
    alphabet = LabelAlphabet(0, frozenset(), frozenset(edges))
    return LabeledTransitionSystem(frozenset(vertices), edges, alphabet)


def sync_constraint_tuples(machine):
    """Every label synchronizes with itself across the two components."""
    return frozenset((lab, lab) for lab in machine_labels(machine))


def bounded_product(machine, max_depth, max_vertices=None,
                    caps=DEFAULT_CAPS):
    """Reachable slice of the synchronized product of the rewriting graph
    and the star, expanded directly (the raw rewriting graph branches far
    too much to build first).  Product edges keep the shared label."""
    gtrs = machine_to_gtrs(machine)
    star = star_graph(machine)
    from .trees import successors as tree_successors

    star_adj = {}
    for lab in star.labels:
        for u, v in star.edge_set(lab):
            star_adj.setdefault((u, lab), set()).add(v)

    def step(state):
        tree, h = state
        out = []
        for lab, tree2 in tree_successors(tree, gtrs.rules):
            for h2 in star_adj.get((h, lab), ()):
                out.append((lab, (tree2, h2)))
        return out

    from .trees import tree_to_text

    def render(state):
        return tree_to_text(state[0]) + "|" + state[1]

    graph, depth = expand(gtrs, max_depth=max_depth,
                          max_vertices=max_vertices, caps=caps, step=step,
                          start=(gtrs.start, "hub"), render=render,
                          labels=machine_labels(machine))
    return graph, depth, render((gtrs.start, "hub"))


def halting_formula(machine):
    """True on the (product) graph iff some source vertex without incoming
    edges reaches a barred halting-flag edge.

    The quantifier for the edge target sits inside the reachability
    conjunct rather than at the front; the two forms are equivalent and
    the inner one evaluates faster on explicit slices.
    """
    labels = machine_labels(machine)
    no_pred = Not(Exists("z0", or_all(
        [Edge(lab, "z0", "x") for lab in labels])))
    hit = or_all([Edge(sigma_label(d, a, True, barred=True), "z", "y")
                  for d in "+-" for a in sorted(machine.alphabet)])
    witness = Exists("z", And(ReachSet(frozenset(labels), "x", "z"),
                              Exists("y", hit)))
    return Exists("x", And(no_pred, witness))
