"""Successor lines, their two-dimensional grid product, and arithmetic.

A line graph ``n0 -> n1 -> ... -> nL`` under a successor label is a finite
cut of the naturals.  The asynchronous product of two lines is a grid whose
point ``(a,b)`` is the vertex ``(na,nb)``; the naturals embed as the bottom
row.  This module provides:

* builders for lines and grids,
* definable arithmetic on a line: addition via a lockstep pairing closure
  and squaring via the closure of consecutive-squares pairs,
* first-order decoders on the grid (row and column projections, the swap
  between the bottom row and the left column, and the pairing combinator),
* the two translations between line formulas and grid formulas.  Going up,
  quantifiers are relativized to the bottom row and a closure over pairs
  becomes a closure over grid points through the pairing decoders.  Going
  down, every grid variable splits into two line variables and a closure
  over grid points doubles its arity.
"""

from __future__ import annotations

import itertools

from ..errors import SpecError
from ..formulas import (And, Edge, Equal, Exists, FalseF, Forall, Implies,
                        Not, Or, RSym, RAlt, RCat, RStar, ReachRegex,
                        ReachSet, TC, TrueF, and_all, exists_all, free_vars,
                        or_all)
from ..lts import (LabelAlphabet, LabeledTransitionSystem, ProductSpec,
                   SyncConstraint)


def nat_vertex(k):
    return f"n{k}"


def grid_vertex(i, j):
    return f"({nat_vertex(i)},{nat_vertex(j)})"


def line_graph(length, label="s", component_id=0):
    """Line with vertices n0..n<length> and successor edges."""
    if length < 0:
        raise SpecError("line length must be nonnegative")
    vertices = frozenset(nat_vertex(k) for k in range(length + 1))
    edges = {label: {(nat_vertex(k), nat_vertex(k + 1))
                     for k in range(length)}}
    alphabet = LabelAlphabet(component_id, frozenset({label}), frozenset())
    return LabeledTransitionSystem(vertices, edges, alphabet)


def grid_spec(width, height=None, labels=("s1", "s2")):
    """Asynchronous product spec of two lines; the explicit grid is its
    product."""
    if height is None:
        height = width
    comp1 = line_graph(width, labels[0], 1)
    comp2 = line_graph(height, labels[1], 2)
    return ProductSpec((comp1, comp2), SyncConstraint(frozenset()))


# ---------------------------------------------------------------------------
# Arithmetic on a line


def zero_formula(w, label="s"):
    return Not(Exists(_fresh_for((w,)), Edge(label, _fresh_for((w,)), w)))


def _fresh_for(names, base="w"):
    taken = set(names)
    k = 0
    cand = base
    while cand in taken:
        cand = f"{base}{k}"
        k += 1
    return cand


def plus_formula(x, y, z, label="s"):
    """Holds on a line iff z = x + y (within the line).

    The pairing closure advances a counter and the running sum in lockstep:
    from (0, x) it reaches exactly the pairs (k, x + k) with k >= 1, so it
    covers y >= 1 and a separate equality disjunct covers y = 0.
    """
    taken = {x, y, z}
    w = _fresh_for(taken)
    p1, p2, q1, q2 = (_fresh_for(taken | {w}, base)
                      for base in ("p1", "p2", "q1", "q2"))
    body = And(Edge(label, p1, q1), Edge(label, p2, q2))
    step = TC((p1, p2), (q1, q2), body, (w, x), (y, z))
    return Exists(w, And(zero_formula(w, label),
                         Or(And(Equal(w, y), Equal(x, z)), step)))


def square_trace_formula(z, y, label="s"):
    """Holds iff (z, y) = (k*k, (k+1)*(k+1)) for some k >= 0.

    One closure step maps (a, b) with b = a + d to (b, b + d + 2); starting
    from (0, 1) the reachable pairs are exactly consecutive squares, and the
    seed itself is the k = 0 case.
    """
    taken = {z, y}
    names = []
    for base in ("x1", "x2", "y1", "y2", "d", "d1", "d2", "a0", "a1"):
        names.append(_fresh_for(taken | set(names), base))
    x1, x2, y1, y2, d, d1, d2, w0, w1 = names
    body = and_all([
        Equal(y1, x2),
        exists_all([d, d1, d2], and_all([
            plus_formula(x1, d, x2, label),
            Edge(label, d, d1),
            Edge(label, d1, d2),
            plus_formula(x2, d2, y2, label),
        ])),
    ])
    step = TC((x1, x2), (y1, y2), body, (w0, w1), (z, y))
    seed = And(zero_formula(w0, label), Edge(label, w0, w1))
    witness = Or(And(Equal(w0, z), Equal(w1, y)), step)
    return exists_all([w0, w1], And(seed, witness))


def square_formula(x, y, label="s"):
    """Holds on a line iff y = x * x, for x >= 2.

    From a consecutive-squares pair (z1, y) the side is recovered as the x
    with z1 + 2x = y + 1.  For x in {0, 1} the recovery needs pairs below
    the seed step, so the formula is intentionally false there.
    """
    taken = {x, y}
    z1 = _fresh_for(taken, "b0")
    sv = _fresh_for(taken | {z1}, "b1")
    t2 = _fresh_for(taken | {z1, sv}, "b2")
    return Exists(z1, And(
        square_trace_formula(z1, y, label),
        exists_all([sv, t2], and_all([
            Edge(label, y, sv),
            plus_formula(x, x, t2, label),
            plus_formula(z1, t2, sv, label),
        ]))))


# ---------------------------------------------------------------------------
# Grid decoders


def bottom_formula(y, s2="s2"):
    w = _fresh_for((y,))
    return Not(Exists(w, Edge(s2, w, y)))


def left_formula(y, s1="s1"):
    w = _fresh_for((y,))
    return Not(Exists(w, Edge(s1, w, y)))


def row_projection_formula(x, y, s1="s1", s2="s2"):
    """y is the bottom-row point in the same column as x."""
    return And(bottom_formula(y, s2), ReachSet(frozenset({s2}), y, x))


def column_projection_formula(x, y, s1="s1", s2="s2"):
    """y is the left-column point in the same row as x."""
    return And(left_formula(y, s1), ReachSet(frozenset({s1}), y, x))


def swap_to_left_formula(x, y, s1="s1", s2="s2"):
    """Maps the bottom-row point (a, 0) = x to the left-column point
    (0, a) = y, stepping diagonally: one closure step goes from (c, d) to
    (c - 1, d + 1)."""
    z = _fresh_for((x, y), "z")
    u = _fresh_for((x, y, z), "u")
    v = _fresh_for((x, y, z, u), "v")
    body = Exists(z, And(Edge(s2, u, z), Edge(s1, v, z)))
    diag = TC((u,), (v,), body, (x,), (y,))
    return and_all([bottom_formula(x, s2), left_formula(y, s1),
                    Or(Equal(x, y), diag)])


def swap_to_bottom_formula(x, y, s1="s1", s2="s2"):
    """Inverse of the bottom-to-left swap: (0, a) = x to (a, 0) = y."""
    z = _fresh_for((x, y), "z")
    u = _fresh_for((x, y, z), "u")
    v = _fresh_for((x, y, z, u), "v")
    body = Exists(z, And(Edge(s1, u, z), Edge(s2, v, z)))
    diag = TC((u,), (v,), body, (x,), (y,))
    return and_all([left_formula(x, s1), bottom_formula(y, s2),
                    Or(Equal(x, y), diag)])


def combine_formula(x, y, z, s1="s1", s2="s2"):
    """z = (a, b) for the bottom-row point x = (a, 0) and the left-column
    point y = (0, b)."""
    return and_all([
        bottom_formula(x, s2), left_formula(y, s1),
        ReachSet(frozenset({s2}), x, z),
        ReachSet(frozenset({s1}), y, z),
    ])


def pair_encoding_formula(x1, x2, out, s1="s1", s2="s2"):
    """out is the grid point whose coordinates are the bottom-row points
    x1 and x2."""
    m = _fresh_for((x1, x2, out), base="m")
    return Exists(m, And(swap_to_left_formula(x2, m, s1, s2),
                         combine_formula(x1, m, out, s1, s2)))


def pair_decoding_formula(inp, u1, u2, s1="s1", s2="s2"):
    """u1 and u2 are the bottom-row points coding the coordinates of the
    grid point inp."""
    m = _fresh_for((inp, u1, u2), base="m")
    return And(row_projection_formula(inp, u1, s1, s2),
               Exists(m, And(column_projection_formula(inp, m, s1, s2),
                             swap_to_bottom_formula(m, u2, s1, s2))))


# ---------------------------------------------------------------------------
# Translations


def _all_var_names(f):
    out = set()

    def go(g):
        if isinstance(g, (Equal, Edge)):
            out.update((g.x, g.y))
        elif isinstance(g, (ReachSet, ReachRegex)):
            out.update((g.x, g.y))
        elif isinstance(g, Not):
            go(g.body)
        elif isinstance(g, (And, Or, Implies)):
            go(g.left)
            go(g.right)
        elif isinstance(g, (Exists, Forall)):
            out.add(g.var)
            go(g.body)
        elif isinstance(g, TC):
            out.update(g.xs)
            out.update(g.ys)
            out.update(g.ss)
            out.update(g.ts)
            go(g.body)

    go(f)
    return out


class _Gensym:
    def __init__(self, taken, base="g"):
        self.taken = set(taken)
        self.base = base
        self.k = 0

    def __call__(self):
        while True:
            cand = f"{self.base}{self.k}"
            self.k += 1
            if cand not in self.taken:
                self.taken.add(cand)
                return cand


def _rename_regex(r, mapping):
    if isinstance(r, RSym):
        if r.label not in mapping:
            raise SpecError(f"regex symbol {r.label!r} is not a line label")
        return RSym(mapping[r.label])
    if isinstance(r, RCat):
        return RCat(_rename_regex(r.left, mapping),
                    _rename_regex(r.right, mapping))
    if isinstance(r, RAlt):
        return RAlt(_rename_regex(r.left, mapping),
                    _rename_regex(r.right, mapping))
    if isinstance(r, RStar):
        return RStar(_rename_regex(r.body, mapping))
    return r


def line_to_grid(formula, line_label="s", s1="s1", s2="s2"):
    """Translate a line formula so that it holds on the grid of the
    bottom-row images of its arguments.

    Quantifiers are relativized to the bottom row.  A closure over single
    points keeps its shape; a closure over pairs becomes a closure over
    grid points that code the pairs, wrapped in the pairing encoders and
    decoders.
    """
    gensym = _Gensym(_all_var_names(formula))

    def bottom(v):
        return bottom_formula(v, s2)

    def check(label):
        if label != line_label:
            raise SpecError(f"label {label!r} is not the line label "
                            f"{line_label!r}")

    def go(f):
        if isinstance(f, (TrueF, FalseF, Equal)):
            return f
        if isinstance(f, Edge):
            check(f.label)
            return Edge(s1, f.x, f.y)
        if isinstance(f, ReachSet):
            for lab in f.labels:
                check(lab)
            return ReachSet(frozenset({s1}), f.x, f.y)
        if isinstance(f, ReachRegex):
            return ReachRegex(_rename_regex(f.regex, {line_label: s1}),
                              f.x, f.y)
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, And):
            return And(go(f.left), go(f.right))
        if isinstance(f, Or):
            return Or(go(f.left), go(f.right))
        if isinstance(f, Implies):
            return Implies(go(f.left), go(f.right))
        if isinstance(f, Exists):
            return Exists(f.var, And(bottom(f.var), go(f.body)))
        if isinstance(f, Forall):
            return Forall(f.var, Implies(bottom(f.var), go(f.body)))
        if isinstance(f, TC):
            if f.arity == 1:
                u, v = f.xs[0], f.ys[0]
                body = and_all([bottom(u), bottom(v), go(f.body)])
                return TC(f.xs, f.ys, body, f.ss, f.ts)
            if f.arity == 2:
                return pair_tc(f)
            raise SpecError("closures of arity above 2 have no grid "
                            "translation")
        raise TypeError(f"not a formula node: {f!r}")

    def pair_tc(f):
        cap_x, cap_y, cap_u, cap_v = (gensym() for _ in range(4))
        u1, u2 = f.xs
        v1, v2 = f.ys
        body = exists_all([u1, u2, v1, v2], and_all([
            pair_decoding_formula(cap_u, u1, u2, s1, s2),
            pair_decoding_formula(cap_v, v1, v2, s1, s2),
            go(f.body),
        ]))
        closure = TC((cap_u,), (cap_v,), body, (cap_x,), (cap_y,))
        x1, x2, y1, y2 = f.ss + f.ts
        return exists_all([cap_x, cap_y], and_all([
            pair_encoding_formula(x1, x2, cap_x, s1, s2),
            pair_encoding_formula(y1, y2, cap_y, s1, s2),
            closure,
        ]))

    return go(formula)


_COORD_SUFFIXES = ("_c1", "_c2")


def split_var(v, suffixes=_COORD_SUFFIXES):
    return v + suffixes[0], v + suffixes[1]


def grid_to_line(formula, s1="s1", s2="s2", line_label="s"):
    """Translate a grid formula to a line formula over split variables.

    Every grid variable v becomes the pair (v_c1, v_c2) of its coordinates;
    free variables of the result are the split images of the original free
    variables.  A closure of arity k becomes one of arity 2k.
    """
    names = _all_var_names(formula)
    for v in names:
        if v.endswith(_COORD_SUFFIXES[0]) or v.endswith(_COORD_SUFFIXES[1]):
            raise SpecError(f"variable {v!r} collides with the coordinate "
                            "suffixes")

    def both(v):
        return split_var(v)

    def go(f):
        if isinstance(f, (TrueF, FalseF)):
            return f
        if isinstance(f, Equal):
            x1, x2 = both(f.x)
            y1, y2 = both(f.y)
            return And(Equal(x1, y1), Equal(x2, y2))
        if isinstance(f, Edge):
            x1, x2 = both(f.x)
            y1, y2 = both(f.y)
            if f.label == s1:
                return And(Edge(line_label, x1, y1), Equal(x2, y2))
            if f.label == s2:
                return And(Equal(x1, y1), Edge(line_label, x2, y2))
            raise SpecError(f"label {f.label!r} is not a grid label")
        if isinstance(f, ReachSet):
            x1, x2 = both(f.x)
            y1, y2 = both(f.y)
            lab = frozenset({line_label})
            first = (ReachSet(lab, x1, y1) if s1 in f.labels
                     else Equal(x1, y1))
            second = (ReachSet(lab, x2, y2) if s2 in f.labels
                      else Equal(x2, y2))
            if not f.labels <= {s1, s2}:
                raise SpecError("reachability uses labels outside the grid")
            return And(first, second)
        if isinstance(f, ReachRegex):
            raise SpecError("regex reachability has no componentwise line "
                            "translation")
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, And):
            return And(go(f.left), go(f.right))
        if isinstance(f, Or):
            return Or(go(f.left), go(f.right))
        if isinstance(f, Implies):
            return Implies(go(f.left), go(f.right))
        if isinstance(f, Exists):
            v1, v2 = both(f.var)
            return Exists(v1, Exists(v2, go(f.body)))
        if isinstance(f, Forall):
            v1, v2 = both(f.var)
            return Forall(v1, Forall(v2, go(f.body)))
        if isinstance(f, TC):
            xs = tuple(itertools.chain.from_iterable(both(v) for v in f.xs))
            ys = tuple(itertools.chain.from_iterable(both(v) for v in f.ys))
            ss = tuple(itertools.chain.from_iterable(both(v) for v in f.ss))
            ts = tuple(itertools.chain.from_iterable(both(v) for v in f.ts))
            return TC(xs, ys, go(f.body), ss, ts)
        raise TypeError(f"not a formula node: {f!r}")

    return go(formula)
