"""Two-stack machines split into an asynchronous product of two pushdowns.

A two-stack transition reads an input letter and pops/pushes on both
stacks at once.  Splitting the machine gives one pushdown per stack: the
first carries the transition under label ``(letter, transition)``, the
second under the barred copy.  In the asynchronous product of their
(height-bounded) configuration graphs, paths whose labels match the regex
``(sum over transitions: label . barred-label)*`` are exactly the runs of
the original machine, which is what the tests check against a direct
two-stack simulator.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DEFAULT_CAPS, SpecError
from ..formulas import (And, Edge, Equal, Exists, RAlt, RCat, RSym, RStar,
                        ReachRegex, and_all, exists_all, or_all)
from ..lts import (LabelAlphabet, LabeledTransitionSystem, ProductSpec,
                   SyncConstraint)


@dataclass(frozen=True)
class TwoPDASpec:
    """Two-stack pushdown machine.

    ``transitions`` is a tuple of (state, letter, pop1, pop2, push1,
    push2, next_state) with ``None`` entries for stack no-ops.  The final
    state must be a sink so final configurations are recognizable.
    """

    states: frozenset
    input_alphabet: frozenset
    stack_alphabet: frozenset
    q0: str
    final: str
    transitions: tuple

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "input_alphabet",
                           frozenset(self.input_alphabet))
        object.__setattr__(self, "stack_alphabet",
                           frozenset(self.stack_alphabet))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if self.q0 not in self.states or self.final not in self.states:
            raise SpecError("initial and final state must be states")
        for t in self.transitions:
            q, a, pop1, pop2, push1, push2, p = t
            if q not in self.states or p not in self.states:
                raise SpecError(f"unknown state in transition {t}")
            if a not in self.input_alphabet:
                raise SpecError(f"unknown input letter in transition {t}")
            for g in (pop1, pop2, push1, push2):
                if g is not None and g not in self.stack_alphabet:
                    raise SpecError(f"unknown stack symbol in {t}")
            if q == self.final:
                raise SpecError("the final state must be a sink")


def machine_to_json(machine):
    return {
        "states": sorted(machine.states),
        "input_alphabet": sorted(machine.input_alphabet),
        "stack_alphabet": sorted(machine.stack_alphabet),
        "init": machine.q0,
        "final": machine.final,
        "transitions": [list(t) for t in machine.transitions],
    }


def machine_from_json(doc):
    return TwoPDASpec(frozenset(doc["states"]),
                      frozenset(doc["input_alphabet"]),
                      frozenset(doc["stack_alphabet"]),
                      doc["init"], doc["final"],
                      tuple(tuple(t) for t in doc["transitions"]))


def transition_label(machine, index, barred=False):
    a = machine.transitions[index][1]
    base = f"{a}_t{index}"
    return ("bar_" + base) if barred else base


def config_vertex(state, stack):
    return state + "." + "".join(stack)


def _apply(stack, pop, push, bound):
    if pop is not None:
        if not stack or stack[-1] != pop:
            return None
        stack = stack[:-1]
    if push is not None:
        stack = stack + (push,)
    if len(stack) > bound:
        return None
    return stack


def _stacks_upto(alphabet, bound):
    out = [()]
    frontier = [()]
    for _ in range(bound):
        frontier = [s + (g,) for s in frontier for g in sorted(alphabet)]
        out.extend(frontier)
    return out


def pushdown_component(machine, side, height_bound, component_id):
    """Height-bounded configuration graph of one side of the split.

    ``side`` is 1 or 2; side 2 carries barred labels."""
    barred = side == 2
    edges = {}
    labels = set()
    for idx, t in enumerate(machine.transitions):
        labels.add(transition_label(machine, idx, barred))
    for idx, t in enumerate(machine.transitions):
        q, _a, pop1, pop2, push1, push2, p = t
        pop, push = (pop1, push1) if side == 1 else (pop2, push2)
        lab = transition_label(machine, idx, barred)
        pairs = set()
        for stack in _stacks_upto(machine.stack_alphabet, height_bound):
            new = _apply(stack, pop, push, height_bound)
            if new is not None:
                pairs.add((config_vertex(q, stack),
                           config_vertex(p, new)))
        edges[lab] = pairs
    vertices = {config_vertex(q, s)
                for q in sorted(machine.states)
                for s in _stacks_upto(machine.stack_alphabet, height_bound)}
    alphabet = LabelAlphabet(component_id, frozenset(labels), frozenset())
    return LabeledTransitionSystem(frozenset(vertices), edges, alphabet)


def split_machine(machine, height_bound):
    """Asynchronous product spec of the two bounded pushdown components."""
    comp1 = pushdown_component(machine, 1, height_bound, 1)
    comp2 = pushdown_component(machine, 2, height_bound, 2)
    return ProductSpec((comp1, comp2), SyncConstraint(frozenset()))


def pairing_regex(machine):
    """(sum over transitions of label . barred-label) starred."""
    alts = None
    for idx in range(len(machine.transitions)):
        piece = RCat(RSym(transition_label(machine, idx)),
                     RSym(transition_label(machine, idx, barred=True)))
        alts = piece if alts is None else RAlt(alts, piece)
    if alts is None:
        raise SpecError("the machine has no transitions")
    return RStar(alts)


def reach_formula(machine, x="x", y="y"):
    return ReachRegex(pairing_regex(machine), x, y)


def simulate(machine, start, height_bound, max_steps=None):
    """Configurations (state, stack1, stack2) reachable from ``start``
    inside the height bound, by direct search."""
    seen = {start}
    frontier = [start]
    steps = 0
    while frontier and (max_steps is None or steps < max_steps):
        nxt = []
        for (q, s1, s2) in frontier:
            for t in machine.transitions:
                tq, _a, pop1, pop2, push1, push2, p = t
                if tq != q:
                    continue
                n1 = _apply(s1, pop1, push1, height_bound)
                n2 = _apply(s2, pop2, push2, height_bound)
                if n1 is None or n2 is None:
                    continue
                cfg = (p, n1, n2)
                if cfg not in seen:
                    seen.add(cfg)
                    nxt.append(cfg)
        frontier = nxt
        steps += 1
    return seen


def product_vertex_of(config):
    """Product vertex name of a machine configuration."""
    q, s1, s2 = config
    return "(" + config_vertex(q, s1) + "," + config_vertex(q, s2) + ")"


def word_formula(machine, word, x="x", y="y"):
    """Pins the run that loads ``word``: an existential chain following,
    letter by letter, the unique loading transition and its barred
    counterpart."""
    state = machine.q0
    picks = []
    for letter in word:
        matches = [(idx, t) for idx, t in enumerate(machine.transitions)
                   if t[0] == state and t[1] == letter]
        if len(matches) != 1:
            raise SpecError(f"loading of {letter!r} from state {state} is "
                            "not deterministic")
        idx, t = matches[0]
        picks.append(idx)
        state = t[6]
    parts = []
    names = []
    cur = x
    for j, idx in enumerate(picks):
        mid = f"u{2 * j}"
        nxt = f"u{2 * j + 1}" if j + 1 < len(picks) else y
        if j + 1 < len(picks):
            names.extend([mid, nxt])
        else:
            names.append(mid)
        parts.append(Edge(transition_label(machine, idx), cur, mid))
        parts.append(Edge(transition_label(machine, idx, barred=True),
                          mid, nxt))
        cur = nxt
    if not parts:
        return Equal(x, y)
    return exists_all(names, and_all(parts))


def halting_run_formula(machine, word, x="x", y="y"):
    """From x, load the word, run freely under the pairing regex, and take
    one final paired step into y."""
    finals = [idx for idx, t in enumerate(machine.transitions)
              if t[6] == machine.final]
    last = or_all([
        Exists("z3", And(Edge(transition_label(machine, idx), "z2", "z3"),
                         Edge(transition_label(machine, idx, barred=True),
                              "z3", y)))
        for idx in finals])
    return exists_all(
        ["z1", "z2"],
        and_all([word_formula(machine, word, x, "z1"),
                 reach_formula(machine, "z1", "z2"),
                 last]))
