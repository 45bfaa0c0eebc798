"""Compositional translation of product formulas into per-component work.

Given a first-order formula with reachability over a synchronized product,
:func:`compose` produces per-component formula sets and a Boolean combiner
over atoms ``p_i(psi)`` meaning "psi holds in component i".  Evaluating the
combiner with each component checked separately agrees with evaluating the
original formula on the explicit product; :func:`verify_composition` checks
exactly that.

Reachability over a label set that includes synchronization tuples is
compiled by enumerating bounded firing sequences: which tuples fire, in
which order.  Each sequence becomes one disjunct whose component formulas
interleave local reachability stretches with the forced synchronizing
edges.  The length bound comes from the synchronization profile; for an
explicit product it is computed exactly as the largest number of
synchronizing edges needed on any cheapest connecting path.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import deque
from dataclasses import dataclass, field

from .boolcomb import (BAtom, BTrue, atoms_of, band, bnot, bool_to_text,
                       bor, dnf_terms, eval_bool)
from .errors import DEFAULT_CAPS, ResourceLimitError, SignatureError, SpecError
from .evaluator import Evaluator
from .formulas import (FO, FO_R, And, Edge, Equal, Exists, Not, Or,
                       ReachSet, TrueF, and_all, canonical_text, classify,
                       exists_all, free_vars, fresh_name, normalize,
                       rename_bound_apart, to_text)
from .lts import (EPS, build_product, render_sync_label, sim_classes,
                  split_product_vertex)


def formula_id(f):
    """Stable short identifier for a component formula."""
    digest = hashlib.sha1(canonical_text(f).encode("utf-8")).hexdigest()
    return "f" + digest[:10]


@dataclass
class SyncProfile:
    """Synchronization data the composer consumes.

    ``ind`` maps every nonempty subset of constraint tuples to its number
    of projection classes on the jointly enabled vertices.  For explicit
    products the profile also keeps the product graph, from which exact
    firing-length bounds are computed; purely declared profiles fall back
    to ``declared_bounds`` and a sum-of-indices default.
    """

    ind: dict
    declared_bounds: dict = field(default_factory=dict)
    m_counts: dict = field(default_factory=dict)
    product: object = None
    _bound_cache: dict = field(default_factory=dict)

    def ind_of(self, subset):
        subset = frozenset(tuple(c) for c in subset)
        try:
            return self.ind[subset]
        except KeyError:
            raise SpecError(f"profile has no index for subset "
                            f"{sorted(subset)}") from None

    def l_of(self, subset):
        """Sum of indices over proper nonempty subsets (reported alongside
        the composed form; the firing bound below supersedes it)."""
        subset = frozenset(tuple(c) for c in subset)
        total = 0
        items = sorted(subset)
        for r in range(1, len(items)):
            for combo in itertools.combinations(items, r):
                total += self.ind_of(frozenset(combo))
        return total

    def firing_bound(self, gamma, subset):
        """Upper bound on how many synchronizing edges a shortest witness
        path for Reach over ``gamma`` can need."""
        subset = frozenset(tuple(c) for c in subset)
        if self.product is not None:
            key = (frozenset(gamma), subset)
            hit = self._bound_cache.get(key)
            if hit is None:
                hit = _exact_firing_bound(self.product, gamma, subset)
                self._bound_cache[key] = hit
            return hit
        if subset in self.declared_bounds:
            return self.declared_bounds[subset]
        if len(subset) == 1:
            return self.ind_of(subset)
        total = self.ind_of(subset)
        items = sorted(subset)
        for r in range(1, len(items)):
            for combo in itertools.combinations(items, r):
                total += self.ind_of(frozenset(combo))
        return total

    def check_refinement(self):
        """Sanity property: the index of a subset never exceeds the product
        of its singleton indices."""
        for subset, value in self.ind.items():
            prod = 1
            for c in subset:
                prod *= self.ind[frozenset({c})]
            if value > prod:
                raise SpecError(
                    f"profile index {value} of {sorted(subset)} exceeds the "
                    f"product of its singleton indices ({prod})")


def _exact_firing_bound(product, gamma, subset):
    """Largest, over all connected vertex pairs, of the fewest
    synchronizing edges on any connecting path inside the ``gamma``
    restriction.  Zero/one-weight breadth-first search per source."""
    sync_labels = {render_sync_label(c) for c in subset}
    local_labels = set(gamma) - sync_labels
    adj = {v: [] for v in product.vertices}
    for lab in local_labels:
        for u, v in product.edge_set(lab):
            adj[u].append((v, 0))
    for lab in sync_labels:
        for u, v in product.edge_set(lab):
            adj[u].append((v, 1))
    bound = 0
    for source in product.vertices:
        dist = {source: 0}
        dq = deque([source])
        while dq:
            v = dq.popleft()
            d = dist[v]
            for w, cost in adj[v]:
                nd = d + cost
                if nd < dist.get(w, nd + 1):
                    dist[w] = nd
                    if cost:
                        dq.append(w)
                    else:
                        dq.appendleft(w)
        if dist:
            bound = max(bound, max(dist.values()))
    return bound


def profile_from_explicit(spec, caps=DEFAULT_CAPS, product=None):
    """Compute the full profile of an explicit spec (indices for every
    nonempty tuple subset).  Guarded to small constraint sets."""
    tuples = sorted(spec.constraint)
    if len(tuples) > 6:
        raise SpecError(f"explicit profiling is limited to 6 constraint "
                        f"tuples, got {len(tuples)}")
    if product is None:
        product = build_product(spec, caps)
    ind = {}
    for r in range(1, len(tuples) + 1):
        for combo in itertools.combinations(tuples, r):
            subset = frozenset(combo)
            ind[subset] = sim_classes(spec, subset, caps, product).index
    return SyncProfile(ind=ind, product=product)


@dataclass
class ComposedForm:
    """Per-component formula sets plus the Boolean combiner over them."""

    psi: tuple   # one dict per component: formula_id -> Formula
    alpha: object
    free: tuple

    def to_json(self):
        return {
            "psi": [[{"id": fid, "formula": to_text(f)}
                     for fid, f in sorted(sets.items())]
                    for sets in self.psi],
            "alpha": bool_to_text(self.alpha),
            "free": list(self.free),
        }


class _Composer:
    def __init__(self, spec, profile, caps):
        self.spec = spec
        self.profile = profile
        self.caps = caps
        self.psi = [dict() for _ in range(spec.n)]

    def atom(self, i, f):
        fid = formula_id(f)
        self.psi[i - 1][fid] = f
        return BAtom(i, fid)

    def all_components(self, make):
        return band(self.atom(i, make(i))
                    for i in range(1, self.spec.n + 1))

    def go(self, f):
        spec = self.spec
        if isinstance(f, TrueF):
            return BTrue()
        if isinstance(f, Equal):
            return self.all_components(lambda i: Equal(f.x, f.y))
        if isinstance(f, Edge):
            return self.edge_atom(f)
        if isinstance(f, ReachSet):
            return self.reach_atom(f)
        if isinstance(f, Not):
            return bnot(self.go(f.body))
        if isinstance(f, And):
            return band([self.go(f.left), self.go(f.right)])
        if isinstance(f, Or):
            return bor([self.go(f.left), self.go(f.right)])
        if isinstance(f, Exists):
            return self.exists(f)
        raise SpecError(f"composition does not handle {type(f).__name__} "
                        "nodes; normalize first")

    def edge_atom(self, f):
        spec = self.spec
        for i, g in enumerate(spec.components, start=1):
            if f.label in g.alphabet.local:
                local_i = i
                break
        else:
            local_i = None
        if local_i is not None:
            return band(
                self.atom(i, Edge(f.label, f.x, f.y) if i == local_i
                          else Equal(f.x, f.y))
                for i in range(1, spec.n + 1))
        c = spec.tuple_for_label(f.label)
        if c is None:
            raise SignatureError(f"label {f.label!r} is neither a local "
                                 "label nor a constraint tuple")
        return band(
            self.atom(i, Equal(f.x, f.y) if c[i - 1] == EPS
                      else Edge(c[i - 1], f.x, f.y))
            for i in range(1, spec.n + 1))

    def reach_atom(self, f):
        spec = self.spec
        gamma = frozenset(f.labels)
        unknown = gamma - spec.product_labels
        if unknown:
            raise SignatureError(f"Reach labels outside the product "
                                 f"signature: {sorted(unknown)}")
        subset = frozenset(c for c in spec.constraint
                           if render_sync_label(c) in gamma)
        local_parts = [gamma & g.alphabet.local for g in spec.components]

        def local_reach(i):
            return ReachSet(frozenset(local_parts[i - 1]), f.x, f.y)

        if not subset:
            return self.all_components(lambda i: local_reach(i))

        bound = self.profile.firing_bound(gamma, subset)
        tuples = sorted(subset)
        count = sum(len(tuples) ** r for r in range(bound + 1))
        if count > self.caps.firing_sequences:
            raise ResourceLimitError(
                "firing_sequences", self.caps.firing_sequences,
                f"{count} firing sequences for {len(tuples)} tuples up to "
                f"length {bound}")

        disjuncts = {}
        for length in range(bound + 1):
            for seq in itertools.product(tuples, repeat=length):
                per_comp = tuple(
                    self.sequence_formula(i, seq, local_parts[i - 1],
                                          f.x, f.y)
                    for i in range(1, spec.n + 1))
                key = tuple(canonical_text(p) for p in per_comp)
                disjuncts.setdefault(key, per_comp)
        self.profile.m_counts[subset] = len(disjuncts)
        return bor(
            band(self.atom(i, p) for i, p in enumerate(per_comp, start=1))
            for _, per_comp in sorted(disjuncts.items()))

    def sequence_formula(self, i, seq, local_labels, x, y):
        """Component i's view of one firing sequence: local stretches
        between its forced synchronizing letters; steps where the tuple has
        eps in coordinate i disappear."""
        letters = [c[i - 1] for c in seq if c[i - 1] != EPS]
        reach = lambda a, b: ReachSet(frozenset(local_labels), a, b)
        if not letters:
            return reach(x, y)
        taken = {x, y}
        zs, ws = [], []
        for j in range(len(letters)):
            z = fresh_name(f"h{2 * j + 1}", taken)
            taken.add(z)
            w = fresh_name(f"h{2 * j + 2}", taken)
            taken.add(w)
            zs.append(z)
            ws.append(w)
        parts = [reach(x, zs[0])]
        for j, letter in enumerate(letters):
            parts.append(Edge(letter, zs[j], ws[j]))
            if j + 1 < len(letters):
                parts.append(reach(ws[j], zs[j + 1]))
        parts.append(reach(ws[-1], y))
        bound_vars = [v for pair in zip(zs, ws) for v in pair]
        return exists_all(bound_vars, and_all(parts))

    def exists(self, f):
        alpha = self.go(f.body)
        terms = dnf_terms(alpha, self.caps.sat_assignments)
        disjuncts = []
        for term in terms:
            by_comp = {}
            for atom, value in term.items():
                lit = self.psi[atom.component - 1][atom.formula_id]
                if not value:
                    lit = Not(lit)
                by_comp.setdefault(atom.component, []).append(lit)
            conj = []
            for i, lits in sorted(by_comp.items()):
                lits.sort(key=canonical_text)
                conj.append(self.atom(i, Exists(f.var, and_all(lits))))
            disjuncts.append(band(conj))
        return bor(disjuncts)


def compose(formula, spec, profile=None, caps=DEFAULT_CAPS):
    """Translate a product formula into a ComposedForm.

    Accepts first-order formulas with reachability (family FO or FO(R));
    universal quantifiers and implications are normalized away first.
    """
    desc = classify(formula)
    if desc.family not in (FO, FO_R):
        raise SpecError(f"composition handles FO and FO(R) formulas, "
                        f"got {desc.family}")
    if profile is None:
        profile = profile_from_explicit(spec, caps)
    f = rename_bound_apart(normalize(formula))
    builder = _Composer(spec, profile, caps)
    alpha = builder.go(f)
    # Quantifier steps replace body atoms with new ones; drop formulas the
    # final combiner no longer mentions.
    live = atoms_of(alpha)
    psi = tuple(
        {fid: g for fid, g in sets.items() if BAtom(i, fid) in live}
        for i, sets in enumerate(builder.psi, start=1))
    return ComposedForm(psi=psi, alpha=alpha,
                        free=tuple(sorted(free_vars(formula))))


def eval_composed(spec, composed, assignment, caps=DEFAULT_CAPS,
                  evaluators=None):
    """Evaluate a composed form on product vertices by checking each
    component formula on its own component only."""
    comps = spec.components
    if evaluators is None:
        evaluators = [Evaluator(g, caps) for g in comps]
    proj = {}
    for var, val in assignment.items():
        parts = val if isinstance(val, tuple) \
            else split_product_vertex(val, len(comps))
        proj[var] = parts
    interp = {}
    for i, sets in enumerate(composed.psi, start=1):
        for fid, f in sets.items():
            env = {v: proj[v][i - 1] for v in free_vars(f)}
            interp[(i, fid)] = evaluators[i - 1].eval(f, env)
    return eval_bool(composed.alpha, interp)


@dataclass(frozen=True)
class VerificationReport:
    checked: int
    mismatches: tuple

    @property
    def agrees(self):
        return not self.mismatches


def verify_composition(spec, formula, caps=DEFAULT_CAPS, composed=None,
                       product=None, limit=None):
    """Check the composed form against direct evaluation on the explicit
    product, over every assignment of the free variables (lexicographic
    order, optionally truncated by ``limit``)."""
    if product is None:
        product = build_product(spec, caps)
    if composed is None:
        composed = compose(formula, spec,
                           profile_from_explicit(spec, caps, product), caps)
    ev = Evaluator(product, caps)
    comp_evs = [Evaluator(g, caps) for g in spec.components]
    fv = sorted(free_vars(formula))
    verts = sorted(product.vertices)
    checked = 0
    mismatches = []
    for combo in itertools.product(verts, repeat=len(fv)):
        assignment = dict(zip(fv, combo))
        direct = ev.eval(formula, assignment)
        split = eval_composed(spec, composed, assignment, caps, comp_evs)
        checked += 1
        if direct != split:
            mismatches.append((assignment, direct, split))
        if limit is not None and checked >= limit:
            break
    return VerificationReport(checked, tuple(mismatches))
