"""Shared builders for the test suite."""

import random

from syncmc.errors import Caps
from syncmc.lts import (EPS, LabelAlphabet, LabeledTransitionSystem,
                        ProductSpec, SyncConstraint)

TEST_CAPS = Caps(product_size=10**5, tuple_enum=10**8,
                 firing_sequences=10**4, sat_assignments=2**18,
                 expansion=100_000)


def component(i, vertices, edges, local=(), sync=()):
    """Small explicit component; edges is {label: {(u, v), ...}}."""
    return LabeledTransitionSystem(
        frozenset(vertices), {a: set(p) for a, p in edges.items()},
        LabelAlphabet(i, frozenset(local), frozenset(sync)))


def two_by_two_spec():
    """Two single-edge components, no synchronization: the smallest
    asynchronous product."""
    c1 = component(1, ["p", "pp"], {"a": {("p", "pp")}}, local=["a"])
    c2 = component(2, ["q", "qq"], {"b": {("q", "qq")}}, local=["b"])
    return ProductSpec((c1, c2), SyncConstraint(frozenset()))


def cycles_spec():
    """3-cycle times 2-cycle, asynchronous."""
    c1 = component(1, ["p0", "p1", "p2"],
                   {"a": {("p0", "p1"), ("p1", "p2"), ("p2", "p0")}},
                   local=["a"])
    c2 = component(2, ["q0", "q1"],
                   {"b": {("q0", "q1"), ("q1", "q0")}}, local=["b"])
    return ProductSpec((c1, c2), SyncConstraint(frozenset()))


def synced_spec():
    """Two components sharing one synchronizing tuple (a, b)."""
    c1 = component(1, ["p0", "p1"],
                   {"l1": {("p0", "p0")}, "a": {("p0", "p1")}},
                   local=["l1"], sync=["a"])
    c2 = component(2, ["q0", "q1"],
                   {"l2": {("q1", "q0")}, "b": {("q0", "q1")}},
                   local=["l2"], sync=["b"])
    return ProductSpec((c1, c2), SyncConstraint(frozenset({("a", "b")})))


def random_graph(rng, size=None, labels=("a", "b"), density=0.3):
    """Random explicit single-component graph for evaluator tests."""
    size = size if size is not None else rng.randint(2, 6)
    vertices = [f"v{i}" for i in range(size)]
    edges = {}
    for lab in labels:
        pairs = {(u, v) for u in vertices for v in vertices
                 if rng.random() < density}
        edges[lab] = pairs
    return LabeledTransitionSystem(
        frozenset(vertices), edges,
        LabelAlphabet(0, frozenset(labels), frozenset()))
