"""Planar polynomial vector fields: parsing and sound evaluation.

Grammar (byte offsets reported on errors):

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' uint)?
    atom   := 'x' | 'y' | decimal | '(' expr ')' | '-' atom

Division and transcendental functions are deliberately absent; the systems
of interest are polynomial.  Expressions evaluate over plain numbers (or
anything supporting +, *, ** like numpy arrays), over intervals, and over
interval-coefficient polynomials in one parameter, which gives the tight
segment enclosures used by the edge checks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .interval import Interval


class ParseError(ValueError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (at offset {offset})")


_OPS = set("+-*^()")


def _tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            toks.append((c, c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                seen_dot = seen_dot or text[j] == "."
                j += 1
            lit = text[i:j]
            if lit == ".":
                raise ParseError("malformed number", i)
            toks.append(("num", lit, i))
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            name = text[i:j]
            if name not in ("x", "y"):
                raise ParseError(f"unknown identifier {name!r}", i)
            toks.append(("var", name, i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1] or 'end of input'!r}", tok[2])
        self.pos += 1
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "*":
            self.take()
            node = ("mul", node, self.factor())
        return node

    def factor(self):
        node = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "num" or "." in tok[1]:
                raise ParseError("exponent must be an unsigned integer", tok[2])
            self.take()
            node = ("pow", node, int(tok[1]))
        return node

    def atom(self):
        tok = self.peek()
        if tok[0] == "var":
            self.take()
            return ("var", tok[1])
        if tok[0] == "num":
            self.take()
            return ("num", tok[1])
        if tok[0] == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if tok[0] == "-":
            self.take()
            return ("neg", self.atom_or_factor())
        raise ParseError(f"expected an operand, found {tok[1] or 'end of input'!r}", tok[2])

    def atom_or_factor(self):
        # allow -x^2 to mean -(x^2)
        return self.factor()


def parse_expression(text):
    """Parse one expression into an AST."""
    return _Parser(text).parse()


@dataclass(frozen=True)
class VectorFieldExpr:
    fx: tuple
    fy: tuple
    text: str

    def eval_float(self, x, y):
        return eval_plain(self.fx, x, y), eval_plain(self.fy, x, y)

    def eval_interval(self, ix, iy):
        return eval_interval(self.fx, ix, iy), eval_interval(self.fy, ix, iy)


def parse_vector_field(text):
    """Parse a two-component field from text.

    Components are separated by a newline or ';'; '#' starts a comment.
    """
    parts = []
    for raw in text.replace(";", "\n").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            parts.append(line)
    if len(parts) != 2:
        raise ParseError(
            f"expected 2 field components, found {len(parts)}", 0
        )
    return VectorFieldExpr(
        fx=parse_expression(parts[0]),
        fy=parse_expression(parts[1]),
        text=text,
    )


# -- evaluation -----------------------------------------------------------


def eval_plain(node, x, y):
    """Evaluate over numbers, or anything with +, -, * and ** (numpy arrays)."""
    kind = node[0]
    if kind == "var":
        return x if node[1] == "x" else y
    if kind == "num":
        return float(node[1])
    if kind == "neg":
        return -eval_plain(node[1], x, y)
    if kind == "add":
        return eval_plain(node[1], x, y) + eval_plain(node[2], x, y)
    if kind == "sub":
        return eval_plain(node[1], x, y) - eval_plain(node[2], x, y)
    if kind == "mul":
        return eval_plain(node[1], x, y) * eval_plain(node[2], x, y)
    if kind == "pow":
        return eval_plain(node[1], x, y) ** node[2]
    raise ValueError(f"bad node {node!r}")


_DEC_CACHE = {}


def _decimal_interval(lit):
    iv = _DEC_CACHE.get(lit)
    if iv is None:
        iv = Interval.from_decimal(lit)
        _DEC_CACHE[lit] = iv
    return iv


def eval_interval(node, ix, iy):
    kind = node[0]
    if kind == "var":
        return ix if node[1] == "x" else iy
    if kind == "num":
        return _decimal_interval(node[1])
    if kind == "neg":
        return -eval_interval(node[1], ix, iy)
    if kind == "add":
        return eval_interval(node[1], ix, iy) + eval_interval(node[2], ix, iy)
    if kind == "sub":
        return eval_interval(node[1], ix, iy) - eval_interval(node[2], ix, iy)
    if kind == "mul":
        return eval_interval(node[1], ix, iy) * eval_interval(node[2], ix, iy)
    if kind == "pow":
        return eval_interval(node[1], ix, iy) ** node[2]
    raise ValueError(f"bad node {node!r}")


# interval-coefficient polynomials in one parameter t, as coefficient lists


def poly_const(iv):
    return [iv]

def poly_add(p, q):
    n = max(len(p), len(q))
    zero = Interval(0.0)
    out = []
    for i in range(n):
        a = p[i] if i < len(p) else zero
        b = q[i] if i < len(q) else zero
        out.append(a + b)
    return out

def poly_neg(p):
    return [-c for c in p]

def poly_mul(p, q):
    out = [Interval(0.0) for _ in range(len(p) + len(q) - 1)]
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out

def poly_pow(p, n):
    out = [Interval(1.0)]
    for _ in range(n):
        out = poly_mul(out, p)
    return out


def eval_poly1(node, px, py):
    """Evaluate the expression as a polynomial in one parameter.

    `px`, `py` are the coordinate polynomials (e.g. the affine parametrization
    of a segment); the result is a coefficient list of intervals.
    """
    kind = node[0]
    if kind == "var":
        return list(px) if node[1] == "x" else list(py)
    if kind == "num":
        return poly_const(_decimal_interval(node[1]))
    if kind == "neg":
        return poly_neg(eval_poly1(node[1], px, py))
    if kind == "add":
        return poly_add(eval_poly1(node[1], px, py), eval_poly1(node[2], px, py))
    if kind == "sub":
        return poly_add(
            eval_poly1(node[1], px, py), poly_neg(eval_poly1(node[2], px, py))
        )
    if kind == "mul":
        return poly_mul(eval_poly1(node[1], px, py), eval_poly1(node[2], px, py))
    if kind == "pow":
        return poly_pow(eval_poly1(node[1], px, py), node[2])
    raise ValueError(f"bad node {node!r}")


def poly_bound(p, t):
    """Interval Horner bound of the polynomial over an interval argument."""
    acc = Interval(0.0)
    for c in reversed(p):
        acc = acc * t + c
    return acc
