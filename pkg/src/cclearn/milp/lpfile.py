"""LP-format export and import.

Dialect: `Minimize`/`Maximize`, `Subject To`, `Bounds`, `Binary`, `End`
sections in that order; `\\` starts a comment; numbers printed with 17
significant digits; every variable gets an explicit Bounds line
(`lo <= x <= hi`, `x free`, or `x = v`, with `-inf`/`+inf` tokens for
one-sided bounds). Objectives may carry a constant term. Variables used
without a Bounds line default to [0, +inf).
"""

from __future__ import annotations

import math
import re

from .model import MilpError, MilpModel


class LpParseError(MilpError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


def _num(v: float) -> str:
    return f"{v:.17g}"


def _expr_terms(coefs: dict, constant: float = 0.0) -> str:
    parts = []
    for name, a in coefs.items():
        if a == 0.0:
            continue
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        term = name if mag == 1.0 else f"{_num(mag)} {name}"
        parts.append((sign, term))
    if constant != 0.0:
        parts.append(("-" if constant < 0 else "+", _num(abs(constant))))
    if not parts:
        return "0"
    first_sign, first_term = parts[0]
    out = (("- " if first_sign == "-" else "") + first_term)
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


def export_lp(model: MilpModel, path) -> None:
    """Write the model in the documented LP dialect (deterministic ordering)."""
    lines = ["\\ generated by cclearn"]
    obj = model.objective
    lines.append("Maximize" if obj.sense == "max" else "Minimize")
    lines.append(f" obj: {_expr_terms(obj.coefs, obj.constant)}")
    lines.append("Subject To")
    for con in model.constraints:
        lines.append(f" {con.name}: {_expr_terms(con.coefs)} {con.sense} {_num(con.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        lo, hi = v.lower, v.upper
        if lo == -math.inf and hi == math.inf:
            lines.append(f" {v.name} free")
        elif lo == hi:
            lines.append(f" {v.name} = {_num(lo)}")
        else:
            lo_s = "-inf" if lo == -math.inf else _num(lo)
            hi_s = "+inf" if hi == math.inf else _num(hi)
            lines.append(f" {lo_s} <= {v.name} <= {hi_s}")
    binaries = [v.name for v in model.variables if v.kind == "binary"]
    if binaries:
        lines.append("Binary")
        for name in binaries:
            lines.append(f" {name}")
    lines.append("End")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


_TOKEN_RE = re.compile(
    r"""(?P<num>[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?|\.[0-9]+(?:[eE][+-]?[0-9]+)?)
        |(?P<name>[A-Za-z_][A-Za-z0-9_.()\[\]]*)
        |(?P<op><=|>=|=<|=>|[+\-=:<>*])
        |(?P<junk>\S)""",
    re.VERBOSE,
)

_SECTION_WORDS = {
    "minimize": "objective-min", "minimise": "objective-min", "min": "objective-min",
    "maximize": "objective-max", "maximise": "objective-max", "max": "objective-max",
    "subject": "subject", "st": "subject", "s.t.": "subject",
    "bounds": "bounds", "bound": "bounds",
    "binary": "binary", "binaries": "binary", "bin": "binary",
    "end": "end",
}


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.line}:{self.col}"


def _tokenize(text: str) -> list:
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("\\", 1)[0]
        for m in _TOKEN_RE.finditer(line):
            kind = m.lastgroup
            tok = m.group()
            col = m.start() + 1
            if kind == "junk":
                raise LpParseError(f"unexpected character {tok!r}", lineno, col)
            if kind == "op" and tok in ("=<", "<"):
                tok = "<="
            elif kind == "op" and tok in ("=>", ">"):
                tok = ">="
            tokens.append(_Token(kind, tok, lineno, col))
    return tokens


def _section_of(tok: _Token, nxt: _Token | None):
    if tok.kind != "name":
        return None, 1
    word = tok.text.lower()
    if word == "subject" and nxt is not None and nxt.kind == "name" \
            and nxt.text.lower() == "to":
        return "subject", 2
    if word in ("subject",):
        return None, 1
    sec = _SECTION_WORDS.get(word)
    if sec == "subject":
        return "subject", 1
    if sec is not None:
        return sec, 1
    return None, 1


class _Parser:
    def __init__(self, tokens: list):
        self.toks = tokens
        self.pos = 0

    def peek(self) -> _Token | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> _Token | None:
        t = self.peek()
        if t is not None:
            self.pos += 1
        return t

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or (self.toks[-1] if self.toks else None)
        line, col = (tok.line, tok.col) if tok else (1, 1)
        raise LpParseError(message, line, col)

    def parse_expr(self, stop_ops=("<=", ">=", "=")):
        """Sum of [sign] [coef] [name] terms; returns (coefs, constant)."""
        coefs: dict = {}
        constant = 0.0
        sign = 1.0
        pending_coef = None
        saw_term = False
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == "op" and tok.text in stop_ops:
                break
            if tok.kind == "name":
                sec, _ = _section_of(tok, self.toks[self.pos + 1]
                                     if self.pos + 1 < len(self.toks) else None)
                if sec is not None and saw_term:
                    break
            self.next()
            if tok.kind == "op":
                if tok.text == "+":
                    if pending_coef is not None:
                        constant += sign * pending_coef
                        pending_coef = None
                    sign = 1.0
                elif tok.text == "-":
                    if pending_coef is not None:
                        constant += sign * pending_coef
                        pending_coef = None
                    sign = -sign
                elif tok.text == "*":
                    if pending_coef is None:
                        self.error("'*' without a preceding coefficient", tok)
                else:
                    self.error(f"unexpected operator {tok.text!r} in expression", tok)
            elif tok.kind == "num":
                if pending_coef is not None:
                    constant += sign * pending_coef
                pending_coef = float(tok.text)
                saw_term = True
            elif tok.kind == "name":
                coef = sign * (pending_coef if pending_coef is not None else 1.0)
                coefs[tok.text] = coefs.get(tok.text, 0.0) + coef
                pending_coef = None
                sign = 1.0
                saw_term = True
        if pending_coef is not None:
            constant += sign * pending_coef
        return coefs, constant

    def maybe_label(self) -> str | None:
        """`name :` prefix, if present."""
        tok = self.peek()
        if tok is not None and tok.kind == "name" and self.pos + 1 < len(self.toks):
            nxt = self.toks[self.pos + 1]
            if nxt.kind == "op" and nxt.text == ":":
                self.pos += 2
                return tok.text
        return None


def import_lp(path) -> MilpModel:
    """Parse a file in the documented dialect into a validated model."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    tokens = _tokenize(text)
    p = _Parser(tokens)

    obj_sense = None
    obj_coefs: dict = {}
    obj_const = 0.0
    rows: list[tuple] = []
    bounds: dict = {}
    binaries: list[str] = []
    saw_end = False

    tok = p.peek()
    sec, width = _section_of(tok, p.toks[p.pos + 1] if p.pos + 1 < len(p.toks) else None) \
        if tok else (None, 1)
    if sec not in ("objective-min", "objective-max"):
        p.error("file must start with Minimize or Maximize", tok)
    obj_sense = "min" if sec == "objective-min" else "max"
    p.pos += width

    p.maybe_label()
    obj_coefs, obj_const = p.parse_expr()

    tok = p.peek()
    sec, width = _section_of(tok, p.toks[p.pos + 1] if p.pos + 1 < len(p.toks) else None) \
        if tok else (None, 1)
    if sec != "subject":
        p.error("expected 'Subject To' section", tok)
    p.pos += width

    while True:
        tok = p.peek()
        if tok is None:
            p.error("unexpected end of file inside Subject To")
        sec, width = _section_of(tok, p.toks[p.pos + 1] if p.pos + 1 < len(p.toks) else None)
        if sec in ("bounds", "binary", "end"):
            break
        label = p.maybe_label() or f"c{len(rows)}"
        coefs, const = p.parse_expr()
        op = p.next()
        if op is None or op.kind != "op" or op.text not in ("<=", ">=", "="):
            p.error("expected constraint sense (<=, >=, =)", op or tok)
        rhs_tok = p.next()
        rhs_sign = 1.0
        if rhs_tok is not None and rhs_tok.kind == "op" and rhs_tok.text in ("+", "-"):
            rhs_sign = -1.0 if rhs_tok.text == "-" else 1.0
            rhs_tok = p.next()
        if rhs_tok is None or rhs_tok.kind != "num":
            p.error("expected numeric right-hand side", rhs_tok or op)
        rhs = rhs_sign * float(rhs_tok.text) - const
        rows.append((coefs, op.text, rhs, label))

    while True:
        tok = p.peek()
        if tok is None:
            p.error("missing End section")
        sec, width = _section_of(tok, p.toks[p.pos + 1] if p.pos + 1 < len(p.toks) else None)
        if sec == "bounds":
            p.pos += width
            while True:
                tok = p.peek()
                if tok is None:
                    p.error("unexpected end of file inside Bounds")
                sec2, w2 = _section_of(tok, p.toks[p.pos + 1]
                                       if p.pos + 1 < len(p.toks) else None)
                if sec2 in ("binary", "end"):
                    break
                lo, name, hi = _parse_bound_line(p)
                bounds[name] = (lo, hi)
        elif sec == "binary":
            p.pos += width
            while True:
                tok = p.peek()
                if tok is None:
                    p.error("unexpected end of file inside Binary")
                sec2, w2 = _section_of(tok, p.toks[p.pos + 1]
                                       if p.pos + 1 < len(p.toks) else None)
                if sec2 == "end" or sec2 == "bounds":
                    break
                if tok.kind != "name":
                    p.error("expected variable name in Binary section", tok)
                if tok.text in binaries:
                    p.error(f"duplicate variable {tok.text!r} in Binary section", tok)
                binaries.append(tok.text)
                p.next()
        elif sec == "end":
            p.pos += width
            saw_end = True
            break
        else:
            p.error("expected Bounds, Binary, or End section", tok)
    if not saw_end:
        p.error("missing End section")

    order: list[str] = []
    seen = set()
    for name in list(obj_coefs) + [n for coefs, *_ in rows for n in coefs] \
            + list(bounds) + binaries:
        if name not in seen:
            seen.add(name)
            order.append(name)

    model = MilpModel()
    binset = set(binaries)
    for name in order:
        lo, hi = bounds.get(name, (0.0, math.inf))
        if name in binset:
            if name not in bounds:
                lo, hi = 0.0, 1.0
            model.add_variable(name, "binary", lo, hi)
        else:
            model.add_variable(name, "continuous", lo, hi)
    for coefs, sense, rhs, label in rows:
        model.add_constraint(coefs, sense, rhs, label)
    model.set_objective(obj_sense, obj_coefs, obj_const)
    return model


def _parse_bound_value(p: _Parser):
    sign = 1.0
    tok = p.next()
    if tok is not None and tok.kind == "op" and tok.text in ("+", "-"):
        sign = -1.0 if tok.text == "-" else 1.0
        tok = p.next()
    if tok is None:
        p.error("expected bound value")
    if tok.kind == "name" and tok.text.lower() in ("inf", "infinity"):
        return sign * math.inf, tok
    if tok.kind == "num":
        return sign * float(tok.text), tok
    p.error("expected bound value", tok)


def _parse_bound_line(p: _Parser):
    """One of: `lo <= x <= hi`, `x <= hi`, `x >= lo`, `x = v`, `x free`."""
    tok = p.peek()
    if tok.kind == "name":
        nxt = p.toks[p.pos + 1] if p.pos + 1 < len(p.toks) else None
        if nxt is not None and nxt.kind == "name" and nxt.text.lower() == "free":
            p.pos += 2
            return -math.inf, tok.text, math.inf
        if nxt is not None and nxt.kind == "op" and nxt.text in ("<=", ">=", "="):
            name = tok.text
            p.pos += 2
            val, _ = _parse_bound_value(p)
            if nxt.text == "<=":
                return 0.0 if val >= 0 else -math.inf, name, val
            if nxt.text == ">=":
                return val, name, math.inf
            return val, name, val
    lo, lo_tok = _parse_bound_value(p)
    op = p.next()
    if op is None or op.kind != "op" or op.text != "<=":
        p.error("expected '<=' in bounds line", op or lo_tok)
    name_tok = p.next()
    if name_tok is None or name_tok.kind != "name":
        p.error("expected variable name in bounds line", name_tok or op)
    op2 = p.next()
    if op2 is None or op2.kind != "op" or op2.text != "<=":
        p.error("expected '<=' in bounds line", op2 or name_tok)
    hi, _ = _parse_bound_value(p)
    return lo, name_tok.text, hi
