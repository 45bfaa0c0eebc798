"""Brute-force evaluation of formulas over explicit transition systems.

The evaluator is the ground truth everything else is tested against, so it
is written for clarity first; the only sophistication is memoization and a
small constraint solver used to enumerate TC successors without scanning
all tuples.
"""

from __future__ import annotations

import itertools

from .errors import DEFAULT_CAPS, ResourceLimitError, SignatureError
from .formulas import (And, Edge, Equal, Exists, FalseF, Forall, Implies,
                       Not, Or, RAlt, RCat, REmpty, REps, RStar, RSym,
                       ReachRegex, ReachSet, TC, TrueF, _flatten, free_vars,
                       regex_symbols)
from .lts import EPS


def check_signature(formula, labels):
    """Raise SignatureError if the formula mentions a label the graph does
    not carry.  ``eps`` always denotes the identity relation."""
    known = set(labels) | {EPS}

    def need(lab, where):
        if lab not in known:
            raise SignatureError(f"label {lab!r} in {where} is not part of "
                                 "the graph signature")

    def go(f):
        if isinstance(f, Edge):
            need(f.label, "an edge atom")
        elif isinstance(f, ReachSet):
            for lab in f.labels:
                need(lab, "a Reach label set")
        elif isinstance(f, ReachRegex):
            for lab in regex_symbols(f.regex):
                need(lab, "a Reach regex")
        elif isinstance(f, Not):
            go(f.body)
        elif isinstance(f, (And, Or, Implies)):
            go(f.left)
            go(f.right)
        elif isinstance(f, (Exists, Forall)):
            go(f.body)
        elif isinstance(f, TC):
            go(f.body)

    go(formula)


class _NFA:
    """Thompson construction; transitions are (symbol, target) lists with
    None for epsilon."""

    def __init__(self, regex):
        self.trans = []

        def new_state():
            self.trans.append([])
            return len(self.trans) - 1

        def build(r):
            s, t = new_state(), new_state()
            if isinstance(r, REmpty):
                pass
            elif isinstance(r, REps):
                self.trans[s].append((None, t))
            elif isinstance(r, RSym):
                self.trans[s].append((r.label, t))
            elif isinstance(r, RCat):
                s1, t1 = build(r.left)
                s2, t2 = build(r.right)
                self.trans[s].append((None, s1))
                self.trans[t1].append((None, s2))
                self.trans[t2].append((None, t))
            elif isinstance(r, RAlt):
                s1, t1 = build(r.left)
                s2, t2 = build(r.right)
                self.trans[s].append((None, s1))
                self.trans[s].append((None, s2))
                self.trans[t1].append((None, t))
                self.trans[t2].append((None, t))
            elif isinstance(r, RStar):
                s1, t1 = build(r.body)
                self.trans[s].append((None, s1))
                self.trans[s].append((None, t))
                self.trans[t1].append((None, s1))
                self.trans[t1].append((None, t))
            else:
                raise TypeError(f"not a regex node: {r!r}")
            return s, t

        self.start, self.accept = build(regex)
        self._closures = {}

    def closure(self, state):
        hit = self._closures.get(state)
        if hit is not None:
            return hit
        out = {state}
        stack = [state]
        while stack:
            q = stack.pop()
            for sym, q2 in self.trans[q]:
                if sym is None and q2 not in out:
                    out.add(q2)
                    stack.append(q2)
        out = frozenset(out)
        self._closures[state] = out
        return out


class Evaluator:
    """Evaluates formulas on one explicit graph, with caching that persists
    across queries so repeated evaluation (the common case in composition
    checks) stays cheap."""

    def __init__(self, graph, caps=DEFAULT_CAPS):
        self.graph = graph
        self.caps = caps
        self.vertices = sorted(graph.vertices)
        self._succ = {}
        self._pred = {}
        self._memo = {}
        self._pins = []
        self._reach_fwd = {}
        self._reach_bwd = {}
        self._tc_cache = {}
        self._tc_step = {}
        self._nfas = {}
        self._regex_fwd = {}
        self._checked = set()
        self._fv_order = {}

    # -- adjacency ---------------------------------------------------------

    def _adj(self, label, forward=True):
        store = self._succ if forward else self._pred
        hit = store.get(label)
        if hit is None:
            hit = {}
            for u, v in self.graph.edge_set(label):
                if forward:
                    hit.setdefault(u, []).append(v)
                else:
                    hit.setdefault(v, []).append(u)
            store[label] = hit
        return hit

    def succ(self, vertex, labels):
        out = set()
        for lab in labels:
            out.update(self._adj(lab).get(vertex, ()))
        return out

    def pred(self, vertex, labels):
        out = set()
        for lab in labels:
            out.update(self._adj(lab, forward=False).get(vertex, ()))
        return out

    def reach(self, labels, source, forward=True):
        """Reflexive-transitive image of one vertex under a label subset."""
        labels = frozenset(labels)
        cache = self._reach_fwd if forward else self._reach_bwd
        key = (labels, source)
        hit = cache.get(key)
        if hit is not None:
            return hit
        seen = {source}
        stack = [source]
        step = self.succ if forward else self.pred
        while stack:
            v = stack.pop()
            for w in step(v, labels):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        out = frozenset(seen)
        cache[key] = out
        return out

    # -- entry point ---------------------------------------------------------

    def eval(self, formula, assignment=None):
        assignment = dict(assignment or {})
        missing = free_vars(formula) - set(assignment)
        if missing:
            raise SignatureError(f"unassigned free variables: "
                                 f"{sorted(missing)}")
        for var, val in assignment.items():
            if val not in self.graph.vertices:
                raise SignatureError(f"assignment maps {var} to {val!r}, "
                                     "which is not a vertex")
        if id(formula) not in self._checked:
            check_signature(formula, self.graph.labels)
            self._checked.add(id(formula))
            self._pins.append(formula)
        return self._eval(formula, assignment)

    # -- recursive evaluation ------------------------------------------------

    def _eval(self, f, env):
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, Equal):
            return env[f.x] == env[f.y]
        if isinstance(f, Edge):
            return env[f.y] in self._adj(f.label).get(env[f.x], ())
        if isinstance(f, ReachSet):
            return env[f.y] in self.reach(f.labels, env[f.x])
        if isinstance(f, Not):
            return not self._eval(f.body, env)

        # The memo key orders the free variables once per formula; env
        # values are then read off in that fixed order.
        ent = self._fv_order.get(id(f))
        if ent is None or ent[0] is not f:
            ent = (f, tuple(sorted(free_vars(f))))
            self._fv_order[id(f)] = ent
        key = (id(f), tuple(env[v] for v in ent[1]))
        hit = self._memo.get(key)
        if hit is not None:
            return hit[1]
        self._pins.append(f)

        if isinstance(f, And):
            out = self._eval(f.left, env) and self._eval(f.right, env)
        elif isinstance(f, Or):
            out = self._eval(f.left, env) or self._eval(f.right, env)
        elif isinstance(f, Implies):
            out = (not self._eval(f.left, env)) or self._eval(f.right, env)
        elif isinstance(f, Exists):
            out = any(True for _ in self.solutions(f.body, env, [f.var]))
        elif isinstance(f, Forall):
            out = True
            env2 = dict(env)
            for w in self.vertices:
                env2[f.var] = w
                if not self._eval(f.body, env2):
                    out = False
                    break
        elif isinstance(f, ReachRegex):
            out = env[f.y] in self._regex_reachable(f.regex, env[f.x])
        elif isinstance(f, TC):
            src = tuple(env[v] for v in f.ss)
            tgt = tuple(env[v] for v in f.ts)
            out = tgt in self._tc_reachable(f, env, src)
        else:
            raise TypeError(f"not a formula node: {f!r}")

        self._memo[key] = (f, out)
        return out

    # -- regex reachability ----------------------------------------------------

    def _regex_reachable(self, regex, source):
        key = (id(regex), source)
        hit = self._regex_fwd.get(key)
        if hit is not None:
            return hit
        nfa = self._nfas.get(id(regex))
        if nfa is None:
            nfa = _NFA(regex)
            self._nfas[id(regex)] = nfa
            self._pins.append(regex)
        seen = {(source, q) for q in nfa.closure(nfa.start)}
        stack = list(seen)
        while stack:
            v, q = stack.pop()
            for sym, q2 in nfa.trans[q]:
                if sym is None:
                    continue
                for w in self._adj(sym).get(v, ()):
                    for q3 in nfa.closure(q2):
                        if (w, q3) not in seen:
                            seen.add((w, q3))
                            stack.append((w, q3))
        out = frozenset(v for (v, q) in seen if q == nfa.accept)
        self._regex_fwd[key] = out
        return out

    # -- transitive closure ------------------------------------------------------

    def _tc_reachable(self, f, env, src):
        """Tuples reachable from ``src`` in one or more body steps."""
        k = f.arity
        if len(self.vertices) ** k > self.caps.tuple_enum:
            raise ResourceLimitError(
                "tuple_enum", self.caps.tuple_enum,
                f"TC of arity {k} over {len(self.vertices)} vertices")
        params = sorted(free_vars(f.body) - set(f.xs) - set(f.ys))
        key = (id(f), tuple((p, env[p]) for p in params), src)
        hit = self._tc_cache.get(key)
        if hit is not None:
            return hit
        base_env = {p: env[p] for p in params}
        param_key = key[1]
        reached = set()
        frontier = [src]
        while frontier:
            cur = frontier.pop()
            # One-step successor sets are shared between searches from
            # different sources, which visit the same tuples.
            step_key = (id(f), param_key, cur)
            nxts = self._tc_step.get(step_key)
            if nxts is None:
                step_env = dict(base_env)
                for var, val in zip(f.xs, cur):
                    step_env[var] = val
                nxts = frozenset(
                    tuple(sol[v] for v in f.ys)
                    for sol in self.solutions(f.body, step_env, f.ys))
                self._tc_step[step_key] = nxts
            for nxt in nxts:
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        out = frozenset(reached)
        self._tc_cache[key] = out
        return out

    # -- constrained solution enumeration ------------------------------------------

    def solutions(self, f, env, want):
        """Assignments for the ``want`` variables satisfying ``f`` under
        ``env``.  Propagates through conjunctions, equalities, edges and
        reachability atoms; anything else falls back to enumeration."""
        want = [v for v in want if v not in env]
        if not want:
            if self._eval(f, env):
                yield {}
            return
        yield from self._solve(f, env, frozenset(want))

    def _solve(self, f, env, want):
        # Variables not free in f are unconstrained; drop them so the atom
        # cases below may assume their variables are genuinely wanted.
        # Solutions are then partial: callers treat absent variables as
        # ranging over all vertices.
        want = want & free_vars(f)
        if not want:
            if self._eval(f, env):
                yield {}
            return
        if isinstance(f, And):
            yield from self._solve_conj(list(_flatten(f, And)), env, want)
            return
        if isinstance(f, Or):
            seen = set()
            for branch in _flatten(f, Or):
                sub = free_vars(branch) & want
                rest = sorted(want - sub)
                for sol in self._solve_single(branch, env, sub):
                    for extra in itertools.product(self.vertices,
                                                   repeat=len(rest)):
                        full = dict(sol)
                        full.update(zip(rest, extra))
                        sig = tuple(sorted(full.items()))
                        if sig not in seen:
                            seen.add(sig)
                            yield full
            return
        yield from self._solve_single(f, env, want)

    def _solve_conj(self, conjuncts, env, want):
        if not want:
            if all(self._eval(c, env) for c in conjuncts):
                yield {}
            return
        # Evaluate fully bound conjuncts first; they only prune.
        pending = []
        for c in conjuncts:
            if free_vars(c) & want:
                pending.append(c)
            elif not self._eval(c, env):
                return
        if not pending:
            for extra in itertools.product(self.vertices, repeat=len(want)):
                yield dict(zip(sorted(want), extra))
            return
        best = min(pending, key=lambda c: len(free_vars(c) & want))
        rest = [c for c in pending if c is not best]
        sub = free_vars(best) & want
        for sol in self._solve_single(best, env, sub):
            env2 = dict(env)
            env2.update(sol)
            for more in self._solve_conj(rest, env2, want - sub):
                out = dict(sol)
                out.update(more)
                yield out

    def _solve_single(self, f, env, want):
        """Solutions of one non-conjunctive formula for exactly the vars in
        ``want`` (all unbound in env)."""
        if not want:
            if self._eval(f, env):
                yield {}
            return
        if isinstance(f, (And, Or)):
            yield from self._solve(f, env, want)
            return
        if isinstance(f, Equal):
            if f.x == f.y:
                for v in self.vertices:
                    yield {f.x: v}
            elif f.x in want and f.y in want:
                for v in self.vertices:
                    yield {f.x: v, f.y: v}
            elif f.x in want:
                yield {f.x: env[f.y]}
            else:
                yield {f.y: env[f.x]}
            return
        if isinstance(f, Edge):
            if f.x == f.y:
                for u, v in sorted(self.graph.edge_set(f.label)):
                    if u == v:
                        yield {f.x: u}
            elif f.x in want and f.y in want:
                for u, v in sorted(self.graph.edge_set(f.label)):
                    yield {f.x: u, f.y: v}
            elif f.x in want:
                for u in sorted(self._adj(f.label, forward=False)
                                .get(env[f.y], ())):
                    yield {f.x: u}
            else:
                for v in sorted(self._adj(f.label).get(env[f.x], ())):
                    yield {f.y: v}
            return
        if isinstance(f, ReachSet):
            if f.x == f.y:
                for v in self.vertices:
                    yield {f.x: v}
            elif f.x in want and f.y in want:
                for u in self.vertices:
                    for v in sorted(self.reach(f.labels, u)):
                        yield {f.x: u, f.y: v}
            elif f.y in want:
                for v in sorted(self.reach(f.labels, env[f.x])):
                    yield {f.y: v}
            else:
                for u in sorted(self.reach(f.labels, env[f.y],
                                           forward=False)):
                    yield {f.x: u}
            return
        if isinstance(f, ReachRegex) and f.x not in want and f.y in want \
                and f.x != f.y:
            for v in sorted(self._regex_reachable(f.regex, env[f.x])):
                yield {f.y: v}
            return
        if isinstance(f, Exists):
            # Solve for the inner variables too, then discard them.  A
            # quantified variable absent from the body is skipped; the
            # graph is nonempty, so the quantifier is then a no-op.
            inner = f
            bound = []
            while isinstance(inner, Exists) and inner.var not in env \
                    and inner.var not in want:
                bound.append(inner.var)
                inner = inner.body
            if bound:
                ask = (want | frozenset(bound)) & free_vars(inner)
                rest = sorted(want - ask)
                seen = set()
                for sol in self._solve(inner, env, ask):
                    proj = tuple(sorted((v, sol[v]) for v in want
                                        if v in sol))
                    if proj in seen:
                        continue
                    seen.add(proj)
                    for extra in itertools.product(self.vertices,
                                                   repeat=len(rest)):
                        full = dict(proj)
                        full.update(zip(rest, extra))
                        yield full
                return
        # Fallback: plain enumeration, relying on the memo to keep repeated
        # body evaluations cheap.
        names = sorted(want)
        env2 = dict(env)
        for combo in itertools.product(self.vertices, repeat=len(names)):
            env2.update(zip(names, combo))
            if self._eval(f, env2):
                yield dict(zip(names, combo))


# ---------------------------------------------------------------------------
# Convenience helpers


def evaluate(graph, formula, assignment=None, caps=DEFAULT_CAPS):
    """One-shot evaluation; build an Evaluator yourself to reuse caches."""
    return Evaluator(graph, caps).eval(formula, assignment)


def reach_set(graph, labels, sources, caps=DEFAULT_CAPS):
    """Vertices reachable from any of ``sources`` via labels in the set
    (reflexive-transitive)."""
    ev = Evaluator(graph, caps)
    out = set()
    for s in sources:
        out |= ev.reach(frozenset(labels), s)
    return frozenset(out)


def tc_base_relation(graph, tc, assignment=None, caps=DEFAULT_CAPS):
    """The single-step relation of a TC node, fully materialized."""
    ev = Evaluator(graph, caps)
    assignment = dict(assignment or {})
    k = tc.arity
    if len(ev.vertices) ** k > caps.tuple_enum:
        raise ResourceLimitError("tuple_enum", caps.tuple_enum,
                                 f"arity {k} over {len(ev.vertices)} "
                                 "vertices")
    params = sorted(free_vars(tc.body) - set(tc.xs) - set(tc.ys))
    base_env = {p: assignment[p] for p in params}
    pairs = set()
    for src in itertools.product(ev.vertices, repeat=k):
        env = dict(base_env)
        env.update(zip(tc.xs, src))
        for sol in ev.solutions(tc.body, env, tc.ys):
            pairs.add((src, tuple(sol[v] for v in tc.ys)))
    return pairs


def warshall_closure(pairs):
    """Transitive closure of a relation given as a set of pairs, by the
    classic triple loop.  Second, independent implementation used to check
    the search-based one."""
    elems = sorted({x for p in pairs for x in p})
    index = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    mat = [[False] * n for _ in range(n)]
    for a, b in pairs:
        mat[index[a]][index[b]] = True
    for m in range(n):
        row_m = mat[m]
        for i in range(n):
            if mat[i][m]:
                row_i = mat[i]
                for j in range(n):
                    if row_m[j]:
                        row_i[j] = True
    return {(elems[i], elems[j])
            for i in range(n) for j in range(n) if mat[i][j]}


def tc_relation(graph, tc, assignment=None, caps=DEFAULT_CAPS):
    """All pairs of the transitive closure (at least one step), computed by
    breadth-first search from every source tuple."""
    ev = Evaluator(graph, caps)
    assignment = dict(assignment or {})
    out = set()
    for src in itertools.product(ev.vertices, repeat=tc.arity):
        for tgt in ev._tc_reachable(tc, assignment, src):
            out.add((src, tgt))
    return out
