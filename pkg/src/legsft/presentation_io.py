"""Plain-text presentation files and the element syntax.

File grammar (line oriented, ``#`` starts a comment)::

    n = 2
    components = 1
    chord a : degree 1, from 1, to 1
    d a = 0
    H 2 0 = s^2 hb^-1 [ ^a* x1* ]

Element syntax: terms ``[<rational> *] <word>`` joined by ``+``/``-``.
Letters are chord names, ``x<j>``, ``^<name>`` (hat), ``^<name>*`` or
``<name>*`` (hat dual), ``x<j>*``, ``s``/``s^k`` and ``hb``/``hb^k``.  A
leading ``!`` marks the excited letter and ``[ ... ]`` wraps a cyclic word.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebra_core import (
    AlgebraError,
    Element,
    Accumulator,
    Presentation,
    composable,
    normalize,
)
from .cyclic_spaces import canonical_key, tensor_type


class PresentationError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        loc = f"line {line}, col {col}: " if line else ""
        super().__init__(loc + message)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)(?![A-Za-z_])"
    r"|(?P<letter>!?\^?[A-Za-z_][A-Za-z0-9_]*(?:\^-?\d+)?\*?)"
    r"|(?P<op>[\[\]+\-*]))"
)


def _tokenize(text: str, col0: int = 1):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        while text[pos].isspace():
            pos += 1
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PresentationError(f"unexpected character {text[pos]!r}", 0, col0 + pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), col0 + m.start(kind)))
        pos = m.end()
    return out


def _letter(pres: Presentation, tok: str, col: int):
    """Returns (list of letters, excited flag)."""
    excited = tok.startswith("!")
    if excited:
        tok = tok[1:]
    m = re.fullmatch(r"(s|hb)(?:\^(-?\d+))?", tok)
    if m:
        if excited:
            raise PresentationError("sigma/hbar cannot be excited", 0, col)
        k = int(m.group(2) or 1)
        if m.group(1) == "s":
            letter = pres.sigma if k > 0 else pres.sigma_inv
        else:
            letter = pres.hbar if k > 0 else pres.hbar_inv
        return [letter] * abs(k), False
    try:
        m = re.fullmatch(r"x(\d+)(\*?)", tok)
        if m:
            j = int(m.group(1))
            return [pres.xdual(j) if m.group(2) else pres.x(j)], excited
        if tok.startswith("^"):
            name = tok[1:]
            if name.endswith("*"):
                return [pres.hatdual(name[:-1])], excited
            return [pres.hat(name)], excited
        if tok.endswith("*"):
            return [pres.hatdual(tok[:-1])], excited
        if excited:
            raise PresentationError(f"chord letter {tok!r} cannot be excited", 0, col)
        return [pres.chord(tok)], False
    except AlgebraError as exc:
        raise PresentationError(str(exc), 0, col) from None


def _infer_space(keys: list, cyclic: bool) -> str:
    if not keys:
        return "U_cyc" if cyclic else "A"
    types = [tensor_type(k) for k in keys]
    excited = [k[3] is not None for k in keys]
    if not cyclic:
        if all(t.p == t.q == 0 and t.s == t.h == 0 for t in types):
            return "A"
        if all(t.p == 0 and t.q == 1 and t.s == t.h == 0 for t in types):
            return "M"
        return "U"
    if all((t.p, t.q, t.s, t.h) == (0, 1, 0, 0) for t in types) and not any(excited):
        return "M_cyc"
    if all(t.balanced for t in types):
        if all((t.p, t.q) == (0, 1) for t in types):
            return "TauM_bal"
        if all((t.p, t.q) == (1, 0) for t in types):
            return "TauMStar_bal"
        return "ExcitedU_bal" if all(excited) else "TauU_bal"
    return "U_cyc"


def parse_element(text: str, pres: Presentation, space: Optional[str] = None, col0: int = 1) -> Element:
    toks = _tokenize(text, col0)
    if not toks:
        raise PresentationError("empty element", 0, col0)
    if len(toks) == 1 and toks[0][1] == "0":
        return Element.zero(space or "A")
    acc = Accumulator()
    any_cyclic = False
    i = 0
    sign = 1
    first = True
    while i < len(toks):
        kind, val, col = toks[i]
        if kind == "op" and val in "+-":
            sign = 1 if val == "+" else -1
            i += 1
        elif not first:
            raise PresentationError(f"expected '+' or '-' before {val!r}", 0, col)
        first = False
        coeff = Fraction(1)
        if i < len(toks) and toks[i][0] == "num":
            coeff = Fraction(toks[i][1])
            i += 1
            if i < len(toks) and toks[i][1] == "*":
                i += 1
        raw: list = []
        exc = None
        cyclic = False
        in_bracket = False
        while i < len(toks) and not (toks[i][0] == "op" and toks[i][1] in "+-"):
            kind, val, col = toks[i]
            if val == "[":
                if cyclic:
                    raise PresentationError("only one [ ... ] group per term", 0, col)
                cyclic = in_bracket = True
            elif val == "]":
                if not in_bracket:
                    raise PresentationError("unbalanced ']'", 0, col)
                in_bracket = False
            elif kind == "letter":
                letters, excited = _letter(pres, val, col)
                if excited:
                    if exc is not None:
                        raise PresentationError("two excited letters in one term", 0, col)
                    exc = len(raw)
                if cyclic and not in_bracket and not letters[0].is_scalar:
                    raise PresentationError("generators outside [ ... ] in a cyclic term", 0, col)
                raw.extend(letters)
            elif kind == "num" and val == "1" and not raw:
                pass
            else:
                raise PresentationError(f"unexpected token {val!r}", 0, col)
            i += 1
        if in_bracket:
            raise PresentationError("missing ']'", 0, col0 + len(text))
        any_cyclic = any_cyclic or cyclic
        c, s, h, w, e = normalize(raw, coeff * sign, exc)
        if cyclic:
            try:
                sg, ck = canonical_key((s, h, w, e))
            except AlgebraError as err:
                raise PresentationError(str(err), 0, col0) from None
            if sg:
                acc.add(ck, c * sg)
        else:
            if not composable(w):
                raise PresentationError("word is not composable: " + " ".join(map(str, w)), 0, col0)
            acc.add((s, h, w, e), c)
        sign = 1
    sp = space or _infer_space(list(acc.terms), any_cyclic)
    return acc.element(sp)


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_word(key: tuple, cyclic: bool) -> str:
    s, h, w, e = key
    parts = []
    if s:
        parts.append("s" if s == 1 else f"s^{s}")
    if h:
        parts.append("hb" if h == 1 else f"hb^{h}")
    letters = [("!" if i == e else "") + g.name for i, g in enumerate(w)]
    if cyclic:
        parts.append("[ " + " ".join(letters) + " ]" if letters else "[ ]")
    else:
        parts.extend(letters)
    return " ".join(parts) if parts else "1"


def format_element(el: Element) -> str:
    if el.is_zero():
        return "0"
    out = []
    for k, (key, c) in enumerate(el.items()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = format_word(key, el.cyclic)
        term = body if mag == 1 and body != "1" else f"{_fmt_coeff(mag)} * {body}"
        if k == 0:
            out.append(term if sign == "+" else "- " + term)
        else:
            out.append(f"{sign} {term}")
    return " ".join(out)


@dataclass
class PresentationFile:
    presentation: Presentation
    hamiltonians: dict = field(default_factory=dict)
    source: str = ""


_DIRECTIVE_N = re.compile(r"n\s*=\s*(-?\d+)\s*$")
_DIRECTIVE_M = re.compile(r"components\s*=\s*(\d+)\s*$")
_DIRECTIVE_CHORD = re.compile(
    r"chord\s+([A-Za-z_][A-Za-z0-9_]*)\s*:\s*degree\s+(-?\d+)\s*,\s*from\s+(\d+)\s*,\s*to\s+(\d+)\s*$"
)
_DIRECTIVE_D = re.compile(r"d\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")
_DIRECTIVE_H = re.compile(r"H\s+(\d+)\s+(\d+)\s*=\s*(.*)$")


def parse_presentation(text: str) -> PresentationFile:
    """Parse a presentation file; errors carry line and column."""
    n = None
    m = 1
    chords = []
    diffs = []
    hams = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.rstrip("\r")
        body = line.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        col = body.index(stripped[0]) + 1
        if mt := _DIRECTIVE_N.match(stripped):
            n = int(mt.group(1))
        elif mt := _DIRECTIVE_M.match(stripped):
            m = int(mt.group(1))
        elif mt := _DIRECTIVE_CHORD.match(stripped):
            chords.append((lineno, col, mt.group(1), int(mt.group(2)), int(mt.group(3)), int(mt.group(4))))
        elif mt := _DIRECTIVE_D.match(stripped):
            diffs.append((lineno, col + mt.start(2), mt.group(1), mt.group(2)))
        elif mt := _DIRECTIVE_H.match(stripped):
            hams.append((lineno, col + mt.start(3), int(mt.group(1)), int(mt.group(2)), mt.group(3)))
        else:
            raise PresentationError(f"unrecognized directive: {stripped}", lineno, col)
    if n is None:
        raise PresentationError("missing 'n = <int>' directive", 1, 1)
    try:
        pres = Presentation(n, m)
    except AlgebraError as exc:
        raise PresentationError(str(exc), 1, 1) from None
    for lineno, col, name, deg, src, tgt in chords:
        try:
            pres.add_chord(name, deg, src, tgt)
        except AlgebraError as exc:
            raise PresentationError(f"chord {name}: {exc}", lineno, col) from None
    seen = set()
    for lineno, col, name, body in diffs:
        if name in seen:
            raise PresentationError(f"d {name} given twice", lineno, col)
        seen.add(name)
        el = _parse_at(body, pres, "A", lineno, col)
        try:
            pres.set_differential(name, el)
        except AlgebraError as exc:
            raise PresentationError(str(exc), lineno, col) from None
    hamiltonians = {}
    for lineno, col, p, q, body in hams:
        hamiltonians[(p, q)] = (_parse_at(body, pres, None, lineno, col), lineno)
    return PresentationFile(pres, hamiltonians, text)


def _parse_at(body, pres, space, lineno, col):
    try:
        return parse_element(body, pres, space, col)
    except PresentationError as exc:
        raise PresentationError(str(exc).split(": ", 1)[-1] if exc.col else str(exc), lineno, exc.col or col) from None
    except AlgebraError as exc:
        raise PresentationError(str(exc), lineno, col) from None


def load_presentation(path) -> PresentationFile:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_presentation(fh.read())
