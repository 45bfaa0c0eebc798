"""Recursive-descent parser for the formula surface syntax.

Grammar sketch (precedence ! > & > | > ->, quantifiers reach as far right
as possible):

    formula  := implication
    impl     := or ('->' impl)?
    or       := and ('|' and)*
    and      := unary ('&' unary)*
    unary    := '!' unary | atom
    atom     := 'true' | 'false'
              | ('exists'|'forall') var '.' formula
              | 'E' label '(' var ',' var ')'
              | 'Reach' '[' labelset-or-regex ']' '(' var ',' var ')'
              | 'TC' '[' vars (';' vars)? ':' formula ']' '(' vars ')'
              | var '=' var
              | '(' formula ')'

Labels are identifiers or parenthesised tuples such as (a,eps,b), which is
how synchronization labels of a product are written.  When a TC variable
list carries no ';' it is split in half, so TC[u,v : ...](x,y) reads as
binding u against v.
"""

from __future__ import annotations

import re as _re

from .errors import FormulaSyntaxError
from .formulas import (Edge, Equal, Exists, FalseF, Forall, Implies, Not,
                       Or, And, RAlt, RCat, REps, RStar, RSym, ReachRegex,
                       ReachSet, TC, TrueF)

_TOKEN_RE = _re.compile(r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z0-9_]+)
  | (?P<arrow>->)
  | (?P<sym>[=(),;:.!&|*+\[\]{}])
""", _re.VERBOSE)

_KEYWORDS = {"true", "false", "exists", "forall", "E", "Reach", "TC", "re",
             "eps"}


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(src):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {src[pos]!r}",
                                     line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token("ident" if kind == "ident" else "sym",
                                 text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, src):
        self.tokens = _tokenize(src)
        self.i = 0

    # -- token helpers ----------------------------------------------------

    def peek(self, ahead=0):
        j = min(self.i + ahead, len(self.tokens) - 1)
        return self.tokens[j]

    def next(self):
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, text):
        return self.peek().text == text and self.peek().kind != "eof"

    def expect(self, text, what=None):
        tok = self.peek()
        if tok.kind == "eof" or tok.text != text:
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise FormulaSyntaxError(
                f"expected {what or text!r}, found {found}",
                tok.line, tok.col)
        return self.next()

    def error(self, message):
        tok = self.peek()
        raise FormulaSyntaxError(message, tok.line, tok.col)

    def ident(self, what="identifier"):
        tok = self.peek()
        if tok.kind != "ident":
            self.error(f"expected {what}")
        return self.next().text

    def variable(self):
        tok = self.peek()
        if tok.kind != "ident" or tok.text in _KEYWORDS:
            self.error("expected a variable name")
        return self.next().text

    # -- labels ------------------------------------------------------------

    def label(self):
        """A plain identifier or a tuple label like (a,eps,b)."""
        if self.at("("):
            self.next()
            parts = [self.ident("label component")]
            while self.at(","):
                self.next()
                parts.append(self.ident("label component"))
            self.expect(")")
            return "(" + ",".join(parts) + ")"
        return self.ident("label")

    # -- formulas ----------------------------------------------------------

    def formula(self):
        left = self.or_level()
        if self.at("->"):
            self.next()
            return Implies(left, self.formula())
        return left

    def or_level(self):
        out = self.and_level()
        while self.at("|"):
            self.next()
            out = Or(out, self.and_level())
        return out

    def and_level(self):
        out = self.unary()
        while self.at("&"):
            self.next()
            out = And(out, self.unary())
        return out

    def unary(self):
        if self.at("!"):
            self.next()
            return Not(self.unary())
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok.kind == "ident":
            if tok.text == "true":
                self.next()
                return TrueF()
            if tok.text == "false":
                self.next()
                return FalseF()
            if tok.text in ("exists", "forall"):
                self.next()
                var = self.variable()
                self.expect(".")
                body = self.formula()
                return (Exists if tok.text == "exists" else Forall)(var,
                                                                    body)
            if tok.text == "E":
                self.next()
                lab = self.label()
                self.expect("(")
                x = self.variable()
                self.expect(",")
                y = self.variable()
                self.expect(")")
                return Edge(lab, x, y)
            if tok.text == "Reach":
                return self.reach_atom()
            if tok.text == "TC":
                return self.tc_atom()
            # fall through: variable equality
            x = self.variable()
            self.expect("=", "'=' after variable")
            y = self.variable()
            return Equal(x, y)
        if self.at("("):
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        self.error("expected a formula")

    def reach_atom(self):
        self.next()  # Reach
        self.expect("[")
        if self.at("re"):
            self.next()
            self.expect(":")
            regex = self.regex()
            self.expect("]")
            self.expect("(")
            x = self.variable()
            self.expect(",")
            y = self.variable()
            self.expect(")")
            return ReachRegex(regex, x, y)
        self.expect("{", "a label set or 're:'")
        labels = set()
        if not self.at("}"):
            labels.add(self.label())
            while self.at(","):
                self.next()
                labels.add(self.label())
        self.expect("}")
        self.expect("]")
        self.expect("(")
        x = self.variable()
        self.expect(",")
        y = self.variable()
        self.expect(")")
        return ReachSet(frozenset(labels), x, y)

    def tc_atom(self):
        tok = self.next()  # TC
        self.expect("[")
        xs, ys = self.var_tuple_pair("]-bracketed TC binder", stop=":")
        self.expect(":")
        body = self.formula()
        self.expect("]")
        self.expect("(")
        ss, ts = self.var_tuple_pair("TC application", stop=")")
        self.expect(")")
        if not (len(xs) == len(ys) == len(ss) == len(ts)):
            raise FormulaSyntaxError(
                "TC variable tuples must all have the same length",
                tok.line, tok.col)
        return TC(tuple(xs), tuple(ys), body, tuple(ss), tuple(ts))

    def var_tuple_pair(self, what, stop):
        """Two variable tuples, either separated by ';' or written as one
        comma list of even length split down the middle."""
        first = [self.variable()]
        while self.at(","):
            self.next()
            first.append(self.variable())
        if self.at(";"):
            self.next()
            second = [self.variable()]
            while self.at(","):
                self.next()
                second.append(self.variable())
            return first, second
        if len(first) % 2 != 0:
            tok = self.peek()
            raise FormulaSyntaxError(
                f"cannot split an odd-length variable list in {what}; "
                "use ';' between the two tuples",
                tok.line, tok.col)
        half = len(first) // 2
        return first[:half], first[half:]

    # -- regexes -----------------------------------------------------------

    def regex(self):
        out = self.regex_cat()
        while self.at("+"):
            self.next()
            out = RAlt(out, self.regex_cat())
        return out

    def regex_cat(self):
        out = self.regex_star()
        while self.at("."):
            self.next()
            out = RCat(out, self.regex_star())
        return out

    def regex_star(self):
        out = self.regex_prim()
        while self.at("*"):
            self.next()
            out = RStar(out)
        return out

    def regex_prim(self):
        tok = self.peek()
        if tok.kind == "ident":
            if tok.text == "eps":
                self.next()
                return REps()
            return RSym(self.ident("label"))
        if self.at("("):
            # Could be a tuple label (a,eps,b) or a grouped regex; a tuple
            # is a comma-separated identifier list of length at least two.
            save = self.i
            try:
                lab = self.label()
                if "," in lab:
                    return RSym(lab)
            except FormulaSyntaxError:
                pass
            self.i = save
            self.next()
            inner = self.regex()
            self.expect(")")
            return inner
        self.error("expected a regex")


def parse_formula(src):
    """Parse one formula; raises FormulaSyntaxError with line/column info."""
    p = _Parser(src)
    out = p.formula()
    tok = p.peek()
    if tok.kind != "eof":
        raise FormulaSyntaxError(f"trailing input {tok.text!r}",
                                 tok.line, tok.col)
    return out
