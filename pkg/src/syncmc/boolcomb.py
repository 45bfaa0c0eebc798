"""Boolean combiners over component atoms.

A composed form pairs per-component formula sets with a Boolean combiner
whose atoms ``p_i(id)`` mean "formula ``id`` holds in component ``i`` under
the projected assignment".  Combiners are kept n-ary and hash-consed enough
for cheap structural work; nothing here knows about transition systems.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ResourceLimitError


class BoolExpr:
    __slots__ = ()


@dataclass(frozen=True)
class BTrue(BoolExpr):
    pass


@dataclass(frozen=True)
class BFalse(BoolExpr):
    pass


@dataclass(frozen=True)
class BAtom(BoolExpr):
    component: int
    formula_id: str


@dataclass(frozen=True)
class BNot(BoolExpr):
    body: BoolExpr


@dataclass(frozen=True)
class BAnd(BoolExpr):
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class BOr(BoolExpr):
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


def band(parts):
    flat = []
    for p in parts:
        if isinstance(p, BTrue):
            continue
        if isinstance(p, BFalse):
            return BFalse()
        if isinstance(p, BAnd):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return BTrue()
    if len(flat) == 1:
        return flat[0]
    return BAnd(tuple(flat))


def bor(parts):
    flat = []
    for p in parts:
        if isinstance(p, BFalse):
            continue
        if isinstance(p, BTrue):
            return BTrue()
        if isinstance(p, BOr):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return BFalse()
    if len(flat) == 1:
        return flat[0]
    return BOr(tuple(flat))


def bnot(e):
    if isinstance(e, BTrue):
        return BFalse()
    if isinstance(e, BFalse):
        return BTrue()
    if isinstance(e, BNot):
        return e.body
    return BNot(e)


def atoms_of(e):
    """All BAtom leaves, as a set."""
    out = set()

    def go(node):
        if isinstance(node, BAtom):
            out.add(node)
        elif isinstance(node, BNot):
            go(node.body)
        elif isinstance(node, (BAnd, BOr)):
            for p in node.parts:
                go(p)

    go(e)
    return out


def eval_bool(e, interp):
    """Evaluate under interp: a mapping from BAtom (or (component, id)
    pairs) to bool."""
    if isinstance(e, BTrue):
        return True
    if isinstance(e, BFalse):
        return False
    if isinstance(e, BAtom):
        if e in interp:
            return interp[e]
        return interp[(e.component, e.formula_id)]
    if isinstance(e, BNot):
        return not eval_bool(e.body, interp)
    if isinstance(e, BAnd):
        return all(eval_bool(p, interp) for p in e.parts)
    if isinstance(e, BOr):
        return any(eval_bool(p, interp) for p in e.parts)
    raise TypeError(f"not a Boolean expression: {e!r}")


def sat_assignments(e, universe=None, cap=2**20):
    """All total satisfying assignments over the given atom universe.

    Brute-force by design; this is the reference enumeration the smarter
    implicant route is checked against.  Raises ResourceLimitError when the
    universe would need more than ``cap`` assignments.
    """
    univ = sorted(universe if universe is not None else atoms_of(e),
                  key=lambda a: (a.component, a.formula_id))
    if 2 ** len(univ) > cap:
        raise ResourceLimitError("sat_assignments", cap,
                                 f"{len(univ)} atoms")
    out = []
    for mask in range(2 ** len(univ)):
        interp = {a: bool(mask >> j & 1) for j, a in enumerate(univ)}
        if eval_bool(e, interp):
            out.append(interp)
    return out


def _cofactor(e, atom, value):
    if isinstance(e, BAtom):
        if e == atom:
            return BTrue() if value else BFalse()
        return e
    if isinstance(e, BNot):
        return bnot(_cofactor(e.body, atom, value))
    if isinstance(e, BAnd):
        return band(_cofactor(p, atom, value) for p in e.parts)
    if isinstance(e, BOr):
        return bor(_cofactor(p, atom, value) for p in e.parts)
    return e


def implicant_terms(e, cap=2**20):
    """Partial assignments (atom -> bool dicts) whose union of total
    extensions is exactly the satisfying set of ``e``.

    Shannon expansion on occurring atoms only, so a disjunction of m
    conjunctions yields on the order of m terms rather than 2^atoms.  The
    cap bounds the number of expansion steps.
    """
    memo = {}
    steps = [0]

    def go(node):
        if node in memo:
            return memo[node]
        steps[0] += 1
        if steps[0] > cap:
            raise ResourceLimitError("sat_assignments", cap,
                                     "implicant expansion")
        if isinstance(node, BTrue):
            out = [dict()]
        elif isinstance(node, BFalse):
            out = []
        else:
            atom = min(atoms_of(node),
                       key=lambda a: (a.component, a.formula_id))
            pos = _cofactor(node, atom, True)
            neg = _cofactor(node, atom, False)
            if pos == neg:
                out = go(pos)
            else:
                out = []
                for value, branch in ((True, pos), (False, neg)):
                    for t in go(branch):
                        t2 = dict(t)
                        t2[atom] = value
                        out.append(t2)
        memo[node] = out
        return out

    return go(e)


def _literal(e):
    if isinstance(e, BAtom):
        return (e, True)
    if isinstance(e, BNot) and isinstance(e.body, BAtom):
        return (e.body, False)
    return None


def dnf_terms(e, cap=2**20):
    """Like implicant_terms, but with a fast path: when the expression is
    already a disjunction of literal conjunctions its terms are read off
    directly (any exact DNF is good enough for the callers)."""
    def term_of(conj):
        term = {}
        parts = conj.parts if isinstance(conj, BAnd) else (conj,)
        for p in parts:
            lit = _literal(p)
            if lit is None:
                return None
            atom, val = lit
            if term.get(atom, val) != val:
                return "contradiction"
            term[atom] = val
        return term

    if isinstance(e, BTrue):
        return [dict()]
    if isinstance(e, BFalse):
        return []
    disjuncts = e.parts if isinstance(e, BOr) else (e,)
    terms = []
    for d in disjuncts:
        t = term_of(d)
        if t is None:
            return implicant_terms(e, cap)
        if t != "contradiction":
            terms.append(t)
    if len(terms) > cap:
        raise ResourceLimitError("sat_assignments", cap, "DNF terms")
    return terms


def bool_to_text(e):
    """Readable rendering, used in the composed-form serialization."""
    def go(node, outer):
        if isinstance(node, BTrue):
            return "true"
        if isinstance(node, BFalse):
            return "false"
        if isinstance(node, BAtom):
            return f"p{node.component}({node.formula_id})"
        if isinstance(node, BNot):
            s = "!" + go(node.body, 3)
            return s if outer <= 3 else "(" + s + ")"
        if isinstance(node, BAnd):
            s = " & ".join(go(p, 3) for p in node.parts)
            return s if outer <= 2 else "(" + s + ")"
        if isinstance(node, BOr):
            s = " | ".join(go(p, 2) for p in node.parts)
            return s if outer <= 1 else "(" + s + ")"
        raise TypeError(f"not a Boolean expression: {node!r}")

    return go(e, 0)
