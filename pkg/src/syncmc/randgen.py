"""Seeded random systems and sentences for differential testing.

Everything is driven by a caller-provided ``random.Random`` so suites are
reproducible from a single seed.  Generated cases are kept desk-scale on
purpose: small components, at most two constraint tuples, each tuple with
at most three projection classes on its enabled vertices, and sentences of
modest quantifier depth with at most two reachability atoms.
"""

from __future__ import annotations

import random

from .composer import compose, profile_from_explicit
from .errors import Caps, ResourceLimitError, SpecError
from .formulas import (And, Edge, Equal, Exists, Forall, Implies, Not, Or,
                       ReachSet, TrueF)
from .lts import (EPS, LabelAlphabet, LabeledTransitionSystem, ProductSpec,
                  SyncConstraint, build_product, sim_classes)

_GEN_CAPS = Caps(product_size=2000, tuple_enum=10**7,
                 firing_sequences=3000, sat_assignments=2**16)


def random_spec(rng):
    """One random product spec; may still be rejected by random_case."""
    n = rng.choice([2, 3])
    comps = []
    for i in range(1, n + 1):
        size = rng.randint(2, 4)
        verts = [f"{chr(ord('p') + i - 1)}{j}" for j in range(size)]
        local = {f"l{i}{k}" for k in range(rng.randint(1, 2))}
        sync = {f"s{i}{k}" for k in range(rng.randint(1, 2))}
        edges = {}
        for lab in sorted(local | sync):
            pairs = set()
            for u in verts:
                for v in verts:
                    if rng.random() < 0.25:
                        pairs.add((u, v))
            edges[lab] = pairs
        comps.append(LabeledTransitionSystem(
            frozenset(verts), edges, LabelAlphabet(i, local, sync)))
    tuples = set()
    for _ in range(rng.randint(0, 2)):
        t = tuple(rng.choice([EPS] + sorted(g.alphabet.sync))
                  for g in comps)
        if any(x != EPS for x in t):
            tuples.add(t)
    return ProductSpec(tuple(comps), SyncConstraint(frozenset(tuples)))


def random_sentence(rng, spec, max_depth=2, max_reach=2):
    """A closed sentence over the product signature, in the reachability
    fragment the composer accepts."""
    labels = sorted(spec.product_labels)
    budget = {"reach": max_reach}

    def atom(scope):
        x = rng.choice(scope)
        y = rng.choice(scope)
        kinds = ["eq", "edge", "edge"]
        if budget["reach"] > 0:
            kinds += ["reach", "reach"]
        kind = rng.choice(kinds)
        if kind == "eq":
            return Equal(x, y)
        if kind == "edge":
            return Edge(rng.choice(labels), x, y)
        budget["reach"] -= 1
        k = rng.randint(1, min(4, len(labels)))
        return ReachSet(frozenset(rng.sample(labels, k)), x, y)

    def formula(depth, scope):
        roll = rng.random()
        if depth > 0 and roll < 0.45:
            var = f"v{len(scope)}"
            quant = Exists if rng.random() < 0.7 else Forall
            return quant(var, formula(depth - 1, scope + [var]))
        if depth > 0 and roll < 0.80:
            op = rng.choice([And, Or, Implies, Not])
            if op is Not:
                return Not(formula(depth - 1, scope))
            return op(formula(depth - 1, scope), formula(depth - 1, scope))
        return atom(scope)

    var = "v0"
    quant = Exists if rng.random() < 0.7 else Forall
    return quant(var, formula(max_depth, [var]))


def random_case(rng, max_product=600, max_index=3):
    """A (spec, sentence, product) triple that the composer demonstrably
    handles within tight caps.  Rejection-samples until one fits."""
    while True:
        spec = random_spec(rng)
        try:
            product = build_product(spec, _GEN_CAPS)
        except ResourceLimitError:
            continue
        if len(product.vertices) > max_product:
            continue
        if any(sim_classes(spec, {c}, _GEN_CAPS, product).index > max_index
               for c in spec.constraint):
            continue
        sentence = random_sentence(rng, spec)
        try:
            profile = profile_from_explicit(spec, _GEN_CAPS, product)
            compose(sentence, spec, profile, _GEN_CAPS)
        except (ResourceLimitError, SpecError):
            continue
        return spec, sentence, product


def iter_cases(seed, count, **kwargs):
    rng = random.Random(seed)
    for _ in range(count):
        yield random_case(rng, **kwargs)
