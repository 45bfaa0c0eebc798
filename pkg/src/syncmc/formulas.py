"""Formula ASTs for FO and its reachability / transitive-closure extensions.

One node family covers all four logics handled by the toolkit; which
fragment a formula lives in is computed by :func:`classify`, not encoded in
the types.  All nodes are immutable and hashable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import SpecError

# ---------------------------------------------------------------------------
# Regular expressions over edge labels


class Regex:
    """Base class for regular expression trees over label identifiers."""

    __slots__ = ()


@dataclass(frozen=True)
class REmpty(Regex):
    pass


@dataclass(frozen=True)
class REps(Regex):
    pass


@dataclass(frozen=True)
class RSym(Regex):
    label: str


@dataclass(frozen=True)
class RCat(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class RAlt(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class RStar(Regex):
    body: Regex


def regex_symbols(r):
    if isinstance(r, RSym):
        return {r.label}
    if isinstance(r, (RCat, RAlt)):
        return regex_symbols(r.left) | regex_symbols(r.right)
    if isinstance(r, RStar):
        return regex_symbols(r.body)
    return set()


def regex_to_text(r):
    def prec(node):
        if isinstance(node, (RSym, REps, REmpty, RStar)):
            return 3
        if isinstance(node, RCat):
            return 2
        return 1

    def go(node, outer):
        if isinstance(node, REmpty):
            s = "empty"
        elif isinstance(node, REps):
            s = "eps"
        elif isinstance(node, RSym):
            s = node.label
        elif isinstance(node, RStar):
            s = go(node.body, 3) + "*"
        elif isinstance(node, RCat):
            s = go(node.left, 2) + "." + go(node.right, 3)
        else:
            s = go(node.left, 1) + "+" + go(node.right, 2)
        if prec(node) < outer:
            return "(" + s + ")"
        return s

    return go(r, 0)


# ---------------------------------------------------------------------------
# Formula nodes


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Equal(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class Edge(Formula):
    label: str
    x: str
    y: str


@dataclass(frozen=True)
class ReachSet(Formula):
    """Reachability via any word over a label subset; reflexive."""

    labels: frozenset
    x: str
    y: str

    def __post_init__(self):
        object.__setattr__(self, "labels", frozenset(self.labels))


@dataclass(frozen=True)
class ReachRegex(Formula):
    """Reachability via a path whose label word matches a regex."""

    regex: Regex
    x: str
    y: str


@dataclass(frozen=True)
class TC(Formula):
    """Transitive closure of the relation defined by ``body`` on k-tuples.

    ``xs``/``ys`` are the bound tuples, ``ss``/``ts`` the applied ones.
    Bare TC demands at least one step; the Reach macro regains reflexivity
    through its x=y disjunct.
    """

    xs: tuple
    ys: tuple
    body: Formula
    ss: tuple
    ts: tuple

    def __post_init__(self):
        xs, ys = tuple(self.xs), tuple(self.ys)
        ss, ts = tuple(self.ss), tuple(self.ts)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "ss", ss)
        object.__setattr__(self, "ts", ts)
        k = len(xs)
        if k == 0 or len(ys) != k or len(ss) != k or len(ts) != k:
            raise SpecError("TC tuples must share a positive arity")
        if set(xs) & set(ys):
            raise SpecError("TC bound tuples must be disjoint")
        if len(set(xs)) != k or len(set(ys)) != k:
            raise SpecError("repeated variable inside a TC bound tuple")

    @property
    def arity(self):
        return len(self.xs)


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


def and_all(parts):
    """Right-nested conjunction of a sequence; TrueF for the empty one."""
    parts = list(parts)
    if not parts:
        return TrueF()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def or_all(parts):
    parts = list(parts)
    if not parts:
        return FalseF()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def exists_all(variables, body):
    for v in reversed(list(variables)):
        body = Exists(v, body)
    return body


# ---------------------------------------------------------------------------
# Free variables and substitution

_FREE_CACHE = {}


def free_vars(f):
    key = id(f)
    hit = _FREE_CACHE.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    if isinstance(f, (TrueF, FalseF)):
        out = frozenset()
    elif isinstance(f, Equal):
        out = frozenset({f.x, f.y})
    elif isinstance(f, (Edge, ReachSet, ReachRegex)):
        out = frozenset({f.x, f.y})
    elif isinstance(f, TC):
        out = (free_vars(f.body) - set(f.xs) - set(f.ys)) \
            | set(f.ss) | set(f.ts)
    elif isinstance(f, Not):
        out = free_vars(f.body)
    elif isinstance(f, (And, Or, Implies)):
        out = free_vars(f.left) | free_vars(f.right)
    elif isinstance(f, (Exists, Forall)):
        out = free_vars(f.body) - {f.var}
    else:
        raise TypeError(f"not a formula node: {f!r}")
    out = frozenset(out)
    _FREE_CACHE[key] = (f, out)
    return out


def fresh_name(base, taken):
    if base not in taken:
        return base
    for k in itertools.count(1):
        cand = f"{base}_{k}"
        if cand not in taken:
            return cand


def substitute(f, mapping):
    """Capture-avoiding variable-for-variable substitution.

    Binders whose variable would capture an incoming name are renamed.
    """
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return f
    return _subst(f, mapping)


def _subst(f, m):
    def var(v):
        return m.get(v, v)

    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Equal):
        return Equal(var(f.x), var(f.y))
    if isinstance(f, Edge):
        return Edge(f.label, var(f.x), var(f.y))
    if isinstance(f, ReachSet):
        return ReachSet(f.labels, var(f.x), var(f.y))
    if isinstance(f, ReachRegex):
        return ReachRegex(f.regex, var(f.x), var(f.y))
    if isinstance(f, Not):
        return Not(_subst(f.body, m))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_subst(f.left, m), _subst(f.right, m))
    if isinstance(f, (Exists, Forall)):
        live = {k: v for k, v in m.items() if k != f.var
                and k in free_vars(f.body)}
        if not live:
            return f
        image = set(live.values())
        if f.var in image:
            taken = image | free_vars(f.body) | set(live)
            nv = fresh_name(f.var, taken)
            body = _subst(f.body, {f.var: nv})
            return type(f)(nv, _subst(body, live))
        return type(f)(f.var, _subst(f.body, live))
    if isinstance(f, TC):
        bound = set(f.xs) | set(f.ys)
        live = {k: v for k, v in m.items()
                if k not in bound and k in free_vars(f.body)}
        image = set(live.values())
        body = f.body
        xs, ys = list(f.xs), list(f.ys)
        if bound & image:
            taken = image | free_vars(body) | bound | set(live)
            ren = {}
            for i, v in enumerate(xs):
                if v in image:
                    nv = fresh_name(v, taken)
                    taken.add(nv)
                    ren[v] = nv
                    xs[i] = nv
            for i, v in enumerate(ys):
                if v in image:
                    nv = fresh_name(v, taken)
                    taken.add(nv)
                    ren[v] = nv
                    ys[i] = nv
            body = _subst(body, ren)
        body = _subst(body, live) if live else body
        ss = tuple(var(v) for v in f.ss)
        ts = tuple(var(v) for v in f.ts)
        return TC(tuple(xs), tuple(ys), body, ss, ts)
    raise TypeError(f"not a formula node: {f!r}")


def rename_bound_apart(f, taken=None):
    """Rename every binder so that all bound names are globally distinct and
    disjoint from the free variables.  Used before composition."""
    taken = set(taken or ()) | set(free_vars(f))

    def go(node):
        if isinstance(node, (TrueF, FalseF, Equal, Edge, ReachSet,
                             ReachRegex)):
            return node
        if isinstance(node, Not):
            return Not(go(node.body))
        if isinstance(node, (And, Or, Implies)):
            return type(node)(go(node.left), go(node.right))
        if isinstance(node, (Exists, Forall)):
            nv = fresh_name(node.var, taken)
            taken.add(nv)
            body = substitute(node.body, {node.var: nv}) \
                if nv != node.var else node.body
            return type(node)(nv, go(body))
        if isinstance(node, TC):
            ren = {}
            for v in list(node.xs) + list(node.ys):
                nv = fresh_name(v, taken)
                taken.add(nv)
                ren[v] = nv
            body = substitute(node.body, ren)
            return TC(tuple(ren[v] for v in node.xs),
                      tuple(ren[v] for v in node.ys),
                      go(body), node.ss, node.ts)
        raise TypeError(f"not a formula node: {node!r}")

    return go(f)


# ---------------------------------------------------------------------------
# Printing

_PREC_QUANT = 0
_PREC_IMP = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4


def _labels_text(labels):
    return "{" + ",".join(sorted(labels)) + "}"


def to_text(f, _outer=-1):
    """Concrete syntax accepted back by the parser."""
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Equal):
        return f"{f.x} = {f.y}"
    if isinstance(f, Edge):
        return f"E {f.label} ({f.x},{f.y})"
    if isinstance(f, ReachSet):
        return f"Reach[{_labels_text(f.labels)}]({f.x},{f.y})"
    if isinstance(f, ReachRegex):
        return f"Reach[re: {regex_to_text(f.regex)}]({f.x},{f.y})"
    if isinstance(f, TC):
        return (f"TC[{','.join(f.xs)} ; {','.join(f.ys)} : "
                f"{to_text(f.body, -1)}]"
                f"({','.join(f.ss)} , {','.join(f.ts)})")
    if isinstance(f, Not):
        s = "!" + to_text(f.body, _PREC_NOT)
        return s if _outer <= _PREC_NOT else "(" + s + ")"
    if isinstance(f, And):
        # The parser is left-associative, so only the left child may repeat
        # the connective without parentheses.
        s = to_text(f.left, _PREC_AND) + " & " + to_text(f.right,
                                                         _PREC_AND + 1)
        return s if _outer <= _PREC_AND else "(" + s + ")"
    if isinstance(f, Or):
        s = to_text(f.left, _PREC_OR) + " | " + to_text(f.right,
                                                        _PREC_OR + 1)
        return s if _outer <= _PREC_OR else "(" + s + ")"
    if isinstance(f, Implies):
        s = to_text(f.left, _PREC_IMP + 1) + " -> " + to_text(f.right,
                                                              _PREC_IMP)
        return s if _outer <= _PREC_IMP else "(" + s + ")"
    if isinstance(f, (Exists, Forall)):
        kw = "exists" if isinstance(f, Exists) else "forall"
        s = f"{kw} {f.var}. {to_text(f.body, _PREC_QUANT)}"
        return s if _outer <= _PREC_QUANT else "(" + s + ")"
    raise TypeError(f"not a formula node: {f!r}")


_CANON_CACHE = {}


def canonical_text(f):
    """Deterministic text with commutative juncts sorted; used as formula
    identity for deduplication and atom naming."""
    key = id(f)
    hit = _CANON_CACHE.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    out = _canon(f, -1)
    _CANON_CACHE[key] = (f, out)
    return out


def _flatten(f, kind):
    if isinstance(f, kind):
        yield from _flatten(f.left, kind)
        yield from _flatten(f.right, kind)
    else:
        yield f


def _canon(f, outer):
    if isinstance(f, (And, Or)):
        kind = And if isinstance(f, And) else Or
        prec = _PREC_AND if kind is And else _PREC_OR
        sep = " & " if kind is And else " | "
        parts = sorted(_canon(p, prec + 1) for p in _flatten(f, kind))
        s = sep.join(parts)
        return s if outer <= prec else "(" + s + ")"
    if isinstance(f, Not):
        s = "!" + _canon(f.body, _PREC_NOT)
        return s if outer <= _PREC_NOT else "(" + s + ")"
    if isinstance(f, Implies):
        s = _canon(f.left, _PREC_IMP + 1) + " -> " + _canon(f.right,
                                                            _PREC_IMP)
        return s if outer <= _PREC_IMP else "(" + s + ")"
    if isinstance(f, (Exists, Forall)):
        kw = "exists" if isinstance(f, Exists) else "forall"
        s = f"{kw} {f.var}. {_canon(f.body, _PREC_QUANT)}"
        return s if outer <= _PREC_QUANT else "(" + s + ")"
    if isinstance(f, TC):
        return (f"TC[{','.join(f.xs)} ; {','.join(f.ys)} : "
                f"{_canon(f.body, -1)}]"
                f"({','.join(f.ss)} , {','.join(f.ts)})")
    return to_text(f, outer)


# ---------------------------------------------------------------------------
# Desugaring, normal forms


def reach_as_tc(labels, x, y, taken=()):
    """The TC pattern the Reach macro abbreviates."""
    taken = set(taken) | {x, y}
    u = fresh_name("u", taken)
    taken.add(u)
    v = fresh_name("v", taken)
    body = or_all([Equal(u, v)] + [Edge(a, u, v) for a in sorted(labels)])
    return TC((u,), (v,), body, (x,), (y,))


def desugar_reach(f):
    """Replace every ReachSet node by its TC form."""
    if isinstance(f, ReachSet):
        return reach_as_tc(f.labels, f.x, f.y)
    if isinstance(f, Not):
        return Not(desugar_reach(f.body))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(desugar_reach(f.left), desugar_reach(f.right))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, desugar_reach(f.body))
    if isinstance(f, TC):
        return TC(f.xs, f.ys, desugar_reach(f.body), f.ss, f.ts)
    return f


def match_reach_pattern(f):
    """If a TC node is exactly the Reach macro, return its label set."""
    if not isinstance(f, TC) or f.arity != 1:
        return None
    x, y = f.xs[0], f.ys[0]
    if free_vars(f.body) - {x, y}:
        return None
    labels = set()
    saw_eq = False
    for part in _flatten(f.body, Or):
        if isinstance(part, Equal) and {part.x, part.y} == {x, y}:
            saw_eq = True
        elif isinstance(part, Edge) and part.x == x and part.y == y:
            labels.add(part.label)
        else:
            return None
    if not saw_eq:
        return None
    return frozenset(labels)


def normalize(f):
    """Push the sugar out: forall -> !exists!, -> to !/|, false to !true.
    Reach-pattern TC nodes collapse back to ReachSet so the composer can
    match on them directly."""
    if isinstance(f, FalseF):
        return Not(TrueF())
    if isinstance(f, Forall):
        return Not(Exists(f.var, Not(normalize(f.body))))
    if isinstance(f, Implies):
        return Or(Not(normalize(f.left)), normalize(f.right))
    if isinstance(f, Not):
        return Not(normalize(f.body))
    if isinstance(f, (And, Or)):
        return type(f)(normalize(f.left), normalize(f.right))
    if isinstance(f, Exists):
        return Exists(f.var, normalize(f.body))
    if isinstance(f, TC):
        labels = match_reach_pattern(f)
        if labels is not None:
            return ReachSet(labels, f.ss[0], f.ts[0])
        return TC(f.xs, f.ys, normalize(f.body), f.ss, f.ts)
    return f


# ---------------------------------------------------------------------------
# Fragment classification

FO = "FO"
FO_R = "FO(R)"
FO_REG = "FO(Reg)"
FO_TC = "FO(TC)"


@dataclass(frozen=True)
class FragmentDescriptor:
    family: str
    max_tc_arity: int
    max_tc_nesting: int
    has_parameters: bool


def classify(f):
    """Compute (family, arity bound, nesting depth, parameter use).

    ReachSet counts as its arity-1, depth-1 TC pattern so classification is
    stable under desugaring.
    """
    state = {"general_tc": False, "regex": False, "reach": False,
             "arity": 0, "params": False}

    def depth(node):
        if isinstance(node, ReachSet):
            state["reach"] = True
            state["arity"] = max(state["arity"], 1)
            return 1
        if isinstance(node, ReachRegex):
            state["regex"] = True
            state["arity"] = max(state["arity"], 1)
            return 1
        if isinstance(node, TC):
            if free_vars(node.body) - set(node.xs) - set(node.ys):
                state["params"] = True
            if match_reach_pattern(node) is not None:
                state["reach"] = True
            else:
                state["general_tc"] = True
            state["arity"] = max(state["arity"], node.arity)
            return 1 + depth(node.body)
        if isinstance(node, Not):
            return depth(node.body)
        if isinstance(node, (And, Or, Implies)):
            return max(depth(node.left), depth(node.right))
        if isinstance(node, (Exists, Forall)):
            return depth(node.body)
        return 0

    nesting = depth(f)
    if state["general_tc"]:
        family = FO_TC
    elif state["regex"]:
        family = FO_REG
    elif state["reach"]:
        family = FO_R
    else:
        family = FO
    return FragmentDescriptor(family, state["arity"], nesting,
                              state["params"])
