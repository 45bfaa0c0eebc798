"""Labeled transition systems, synchronization constraints and products.

A transition system is a finite directed graph with one edge relation per
label.  Labels of a component are partitioned into local labels (they move
only that component inside a product) and synchronizing labels (they fire
jointly, driven by a constraint tuple).  The reserved identifier ``eps``
marks "this component does not move" inside a constraint tuple.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import DEFAULT_CAPS, ResourceLimitError, SpecError

EPS = "eps"
_LABEL_RE = re.compile(r"[A-Za-z0-9_]+\Z")


def _check_label(name):
    if name == EPS:
        raise SpecError("'eps' is reserved and may not be used as a label")
    if not _LABEL_RE.match(name):
        raise SpecError(f"bad label identifier: {name!r}")


@dataclass(frozen=True)
class LabelAlphabet:
    """Partitioned label set of one component: local vs synchronizing."""

    component_id: int
    local: frozenset
    sync: frozenset

    def __post_init__(self):
        object.__setattr__(self, "local", frozenset(self.local))
        object.__setattr__(self, "sync", frozenset(self.sync))
        for name in self.local | self.sync:
            _check_label(name)
        overlap = self.local & self.sync
        if overlap:
            raise SpecError(f"labels both local and sync: {sorted(overlap)}")

    @property
    def all_labels(self):
        return self.local | self.sync


@dataclass(frozen=True)
class LabeledTransitionSystem:
    """Explicit finite labeled graph: vertex set plus per-label edge sets."""

    vertices: frozenset
    edges: dict
    alphabet: LabelAlphabet

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        clean = {}
        known = self.alphabet.all_labels
        for label, pairs in self.edges.items():
            if label not in known:
                raise SpecError(f"edge label {label!r} not in alphabet")
            pairs = frozenset(pairs)
            for u, v in pairs:
                if u not in self.vertices or v not in self.vertices:
                    raise SpecError(f"edge ({u!r},{v!r}) has endpoint "
                                    f"outside the vertex set")
            clean[label] = pairs
        object.__setattr__(self, "edges", clean)

    def edge_set(self, label):
        """Edge pairs for ``label``; ``eps`` is the identity relation."""
        if label == EPS:
            return frozenset((v, v) for v in self.vertices)
        return self.edges.get(label, frozenset())

    def successors(self, vertex, label):
        if label == EPS:
            return {vertex}
        return {w for (u, w) in self.edges.get(label, ()) if u == vertex}

    def predecessors(self, vertex, label):
        if label == EPS:
            return {vertex}
        return {u for (u, w) in self.edges.get(label, ()) if w == vertex}

    @property
    def labels(self):
        return self.alphabet.all_labels


@dataclass(frozen=True)
class SyncConstraint:
    """Set of n-tuples over (sync labels + eps); all-eps tuples rejected."""

    tuples: frozenset

    def __post_init__(self):
        tups = frozenset(tuple(t) for t in self.tuples)
        if not all(isinstance(x, str) for t in tups for x in t):
            raise SpecError("constraint tuple entries must be label strings")
        lengths = {len(t) for t in tups}
        if len(lengths) > 1:
            raise SpecError(f"constraint tuples of mixed arity: {lengths}")
        for t in tups:
            if all(x == EPS for x in t):
                raise SpecError(f"all-eps constraint tuple is not allowed")
        object.__setattr__(self, "tuples", tups)

    def __iter__(self):
        return iter(self.tuples)

    def __len__(self):
        return len(self.tuples)


def render_sync_label(c):
    """Canonical product label of a constraint tuple: ``(a,eps,b)``."""
    return "(" + ",".join(c) + ")"


def render_product_vertex(parts):
    """Canonical product vertex name: ``(p,q)``."""
    return "(" + ",".join(parts) + ")"


def split_product_vertex(name, n):
    """Inverse of :func:`render_product_vertex` for an n-component product.

    Splits on top-level commas so nested product names survive round trips.
    """
    if not (name.startswith("(") and name.endswith(")")):
        raise SpecError(f"not a product vertex name: {name!r}")
    inner = name[1:-1]
    parts, depth, cur = [], 0, []
    for ch in inner:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        cur.append(ch)
    parts.append("".join(cur))
    if len(parts) != n:
        raise SpecError(f"{name!r} does not split into {n} components")
    return tuple(parts)


@dataclass(frozen=True)
class ProductSpec:
    """A family of components plus the synchronization constraint."""

    components: tuple
    constraint: SyncConstraint

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise SpecError("a product needs at least one component")
        object.__setattr__(self, "components", comps)
        seen_local = set()
        for i, g in enumerate(comps, start=1):
            if not g.vertices:
                raise SpecError(f"component {i} has no vertices")
            if g.alphabet.component_id != i:
                raise SpecError(f"component {i} carries alphabet id "
                                f"{g.alphabet.component_id}")
            dup = seen_local & g.alphabet.local
            if dup:
                raise SpecError(f"local labels shared between components: "
                                f"{sorted(dup)}")
            seen_local |= g.alphabet.local
        for c in self.constraint:
            if len(c) != len(comps):
                raise SpecError(f"constraint tuple {c} has arity "
                                f"{len(c)} != {len(comps)}")
            for i, entry in enumerate(c):
                if entry == EPS:
                    continue
                if entry not in comps[i].alphabet.sync:
                    raise SpecError(f"tuple entry {entry!r} is not a sync "
                                    f"label of component {i + 1}")

    @property
    def n(self):
        return len(self.components)

    @property
    def local_labels(self):
        out = set()
        for g in self.components:
            out |= g.alphabet.local
        return frozenset(out)

    @property
    def sync_labels(self):
        """Rendered product labels of the constraint tuples."""
        return frozenset(render_sync_label(c) for c in self.constraint)

    @property
    def product_labels(self):
        return self.local_labels | self.sync_labels

    def tuple_for_label(self, label):
        for c in self.constraint:
            if render_sync_label(c) == label:
                return c
        return None


@dataclass(frozen=True)
class SyncClassIndex:
    """Partition of the enabled vertices of a tuple subset by projection."""

    subset: frozenset
    enabled_vertices: frozenset
    classes: dict
    index: int


def sync_components(c):
    """Component indices (1-based) where a constraint tuple really moves."""
    return frozenset(i for i, entry in enumerate(c, start=1) if entry != EPS)


def _product_vertices(spec, caps):
    size = 1
    for g in spec.components:
        size *= len(g.vertices)
    if size > caps.product_size:
        raise ResourceLimitError("product_size", caps.product_size,
                                 f"product would have {size} vertices")
    verts = [()]
    for g in spec.components:
        verts = [v + (w,) for v in verts for w in sorted(g.vertices)]
    return verts


def build_product(spec, caps=DEFAULT_CAPS):
    """Explicit synchronized product of the spec's components.

    Local labels move one coordinate; each constraint tuple becomes one
    product label firing simultaneous moves in its non-eps coordinates.
    """
    verts = _product_vertices(spec, caps)
    names = {v: render_product_vertex(v) for v in verts}
    edges = {}

    local, sync = set(), set()
    for i, g in enumerate(spec.components):
        for a in sorted(g.alphabet.local):
            local.add(a)
            pairs = set()
            for v in verts:
                for w_i in g.successors(v[i], a):
                    w = v[:i] + (w_i,) + v[i + 1:]
                    pairs.add((names[v], names[w]))
            edges[a] = pairs

    for c in spec.constraint:
        label = render_sync_label(c)
        sync.add(label)
        pairs = set()
        for v in verts:
            targets = [()]
            for i, g in enumerate(spec.components):
                step = sorted(g.successors(v[i], c[i]))
                if not step:
                    targets = []
                    break
                targets = [t + (w_i,) for t in targets for w_i in step]
            for t in targets:
                pairs.add((names[v], names[t]))
        edges[label] = pairs

    # Rendered sync-tuple labels contain parentheses, so they live outside
    # the [A-Za-z0-9_]+ identifier space; bypass the local-label validation
    # by declaring them on a permissive alphabet.
    alphabet = _ProductAlphabet(0, frozenset(local), frozenset(sync))
    return LabeledTransitionSystem(frozenset(names.values()), edges, alphabet)


class _ProductAlphabet(LabelAlphabet):
    """Alphabet of an explicit product; sync entries are rendered tuples."""

    def __post_init__(self):
        object.__setattr__(self, "local", frozenset(self.local))
        object.__setattr__(self, "sync", frozenset(self.sync))
        for name in self.local:
            _check_label(name)


def enabled_vertices(spec, subset, caps=DEFAULT_CAPS, product=None):
    """Product vertices with an outgoing c-edge for every tuple in subset."""
    subset = frozenset(tuple(c) for c in subset)
    if not subset:
        raise SpecError("enabled_vertices needs a nonempty tuple subset")
    g = product if product is not None else build_product(spec, caps)
    out = set(g.vertices)
    for c in subset:
        label = render_sync_label(c)
        sources = {u for (u, _) in g.edge_set(label)}
        out &= sources
    return frozenset(out)


def sim_classes(spec, subset, caps=DEFAULT_CAPS, product=None):
    """Partition the enabled vertices of ``subset`` by their projection to
    the synchronizing components, giving the equivalence-class index."""
    subset = frozenset(tuple(c) for c in subset)
    enabled = enabled_vertices(spec, subset, caps, product)
    xs = sorted(set().union(*[sync_components(c) for c in subset]))
    classes = {}
    for name in enabled:
        parts = split_product_vertex(name, spec.n)
        key = tuple(parts[i - 1] for i in xs)
        classes.setdefault(key, set()).add(name)
    classes = {k: frozenset(v) for k, v in classes.items()}
    return SyncClassIndex(subset=subset, enabled_vertices=enabled,
                          classes=classes, index=len(classes))


@dataclass(frozen=True)
class FiniteSyncReport:
    finitely_synchronized: bool
    per_tuple: dict = field(default_factory=dict)
    note: str = ""


def is_finitely_synchronized(spec, caps=DEFAULT_CAPS, declared=None):
    """Explicit finite specs are always finitely synchronized; the report
    carries the computed per-tuple class counts.  Gadget generators with an
    infinite side pass their declared profile through ``declared``."""
    if declared is not None:
        return declared
    product = build_product(spec, caps)
    per_tuple = {}
    for c in spec.constraint:
        per_tuple[c] = sim_classes(spec, {c}, caps, product).index
    note = "vacuous (no constraint tuples)" if not per_tuple else ""
    return FiniteSyncReport(True, per_tuple, note)


# ---------------------------------------------------------------------------
# System file format (JSON)

def spec_to_json(spec):
    comps = []
    for i, g in enumerate(spec.components, start=1):
        comps.append({
            "id": i,
            "vertices": sorted(g.vertices),
            "local": sorted(g.alphabet.local),
            "sync": sorted(g.alphabet.sync),
            "edges": [{"label": a, "from": u, "to": v}
                      for a in sorted(g.edges)
                      for (u, v) in sorted(g.edges[a])],
        })
    return {"components": comps,
            "constraint": [list(c) for c in sorted(spec.constraint)]}


def spec_from_json(doc):
    comps = []
    for entry in sorted(doc["components"], key=lambda e: e["id"]):
        # Materialized products carry rendered tuple labels like "(a,eps)"
        # in their sync set; those bypass the identifier check.
        cls = LabelAlphabet
        if any(not _LABEL_RE.match(lab) for lab in entry["sync"]):
            cls = _ProductAlphabet
        alphabet = cls(entry["id"], frozenset(entry["local"]),
                       frozenset(entry["sync"]))
        edges = {}
        for e in entry.get("edges", ()):
            edges.setdefault(e["label"], set()).add((e["from"], e["to"]))
        comps.append(LabeledTransitionSystem(frozenset(entry["vertices"]),
                                             edges, alphabet))
    constraint = SyncConstraint(frozenset(tuple(t)
                                          for t in doc.get("constraint", ())))
    return ProductSpec(tuple(comps), constraint)


def load_spec(path):
    with open(path, encoding="utf-8") as fh:
        return spec_from_json(json.load(fh))


def save_spec(spec, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec_to_json(spec), fh, indent=2, sort_keys=True)
        fh.write("\n")
