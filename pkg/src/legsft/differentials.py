"""The operator S and the differentials d, d_M and d_U.

All differentials here are derivations of (degree, j, t) multidegree
(-1, 0, 0), so passing a block of letters costs (-1)^(its degree).  Cyclic
inputs are differentiated on their stored representative and the result is
canonicalized again.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra_core import (
    CHORD,
    HAT,
    X,
    Accumulator,
    AlgebraError,
    Element,
    Presentation,
    composable,
    sign_of,
)
from .cyclic_spaces import canonical_key


def s_operator(pres: Presentation, el: Element) -> Element:
    """S: A -> M, replace each letter by its hat with the Koszul sign."""
    acc = Accumulator()
    for (s, h, w, e), c in el.terms.items():
        if s or h or e is not None or any(g.kind != CHORD for g in w):
            raise AlgebraError("S is defined on A")
        deg = 0
        for i, g in enumerate(w):
            acc.add((0, 0, w[:i] + (pres.hat(g.name),) + w[i + 1:], None), c * sign_of(deg))
            deg += g.degree
    return acc.element("M")


def _finish(acc: Accumulator, key, coeff, cyclic: bool) -> None:
    s, h, w, e = key
    if cyclic:
        sign, ck = canonical_key(key)
        if sign:
            acc.add(ck, coeff * sign)
    elif composable(w):
        acc.add(key, coeff)


def _derivation(pres: Presentation, el: Element, rule, space=None) -> Element:
    """Apply the derivation determined by ``rule(letter, is_excited)``.

    ``rule`` returns a list of ``(coeff, letters)`` replacing one letter, or
    an empty list when the letter is killed.  Replacement words are plain
    generators; an excited letter may only be replaced by a single letter.
    """
    acc = Accumulator()
    cyclic = el.cyclic
    for (s, h, w, e), c in el.terms.items():
        deg = s + h * (pres.n - 3)
        for i, g in enumerate(w):
            images = rule(g, i == e)
            for coeff, letters in images:
                letters = tuple(letters)
                if i == e:
                    if len(letters) != 1:
                        raise AlgebraError("cannot differentiate an excited letter into a word")
                    new_e = e
                elif e is not None and e > i:
                    new_e = e + len(letters) - 1
                else:
                    new_e = e
                key = (s, h, w[:i] + letters + w[i + 1:], new_e)
                _finish(acc, key, c * coeff * sign_of(deg), cyclic)
            deg += g.degree
    return acc.element(space or el.space)


def _d_rule(pres: Presentation):
    cache = {}

    def rule(g, excited):
        if g.kind != CHORD:
            return []
        if g.name not in cache:
            cache[g.name] = [(c, w) for (_, _, w, _), c in pres.d_of(g.name).terms.items()]
        return cache[g.name]

    return rule


def d_algebra(pres: Presentation, el: Element) -> Element:
    """The algebra differential extended by the Leibniz rule.

    Works on A and on non-cyclic words of U; letters other than chords are
    killed.  Idempotents (the empty word) go to zero.
    """
    for name in {g.name for k in el.terms for g in k[2] if g.kind == CHORD}:
        if name not in pres.differential:
            raise AlgebraError(f"no differential given for {name!r}")
    return _derivation(pres, el, _d_rule(pres))


def d_exterior(pres: Presentation, el: Element) -> Element:
    """Exterior differential on cyclic (excited or not) monomials."""
    return _derivation(pres, el, _d_rule(pres))


def _dm_rule(pres: Presentation):
    d_rule = _d_rule(pres)
    hats = {}

    def rule(g, excited):
        if g.kind == CHORD:
            return d_rule(g, excited)
        if g.kind == X:
            return []
        if g.kind != HAT:
            raise AlgebraError("d_M acts on words of M")
        if excited:
            raise AlgebraError("d_M acts on unexcited words")
        if g.name not in hats:
            a = pres.chord(g.name[1:])
            out = [(Fraction(1), (a, pres.x(a.right))), (Fraction(-1), (pres.x(a.left), a))]
            # the S(da) term enters with a minus sign; with a plus sign
            # d_M^2 = 2 (da x - x da) whenever da != 0
            sda = s_operator(pres, pres.d_of(a.name))
            out += [(-c, w) for (_, _, w, _), c in sda.terms.items()]
            hats[g.name] = out
        return hats[g.name]

    return rule


def d_M(pres: Presentation, el: Element) -> Element:
    """d_M on M (or M_diag) and on M^cyc.

    On a hat, d_M(c^) = c x_r - x_l c - S(dc) where l, r are the left and
    right components of c.
    """
    if el.space not in ("M", "M_diag", "M_cyc"):
        raise AlgebraError(f"d_M is defined on M and M^cyc, not {el.space}")
    return _derivation(pres, el, _dm_rule(pres))


def project_cyclic(el: Element) -> Element:
    """pi: M_diag -> M^cyc."""
    acc = Accumulator()
    for key, c in el.terms.items():
        _finish(acc, key, c, True)
    return acc.element("M_cyc")


def check_d_squared(pres: Presentation) -> dict:
    """Residual d(d c) for every chord (only non-zero entries)."""
    out = {}
    for name in pres.chord_names:
        dd = d_algebra(pres, pres.d_of(name))
        if dd:
            out[name] = dd
    return out


class PresentationInvalid(AlgebraError):
    """The presentation fails one of the validation identities."""


@dataclass(frozen=True)
class DifferentialContext:
    """A validated presentation together with H^1_1.

    Build with :meth:`build`; it checks d^2 = 0 on A first and the master
    equation dH + H*H = 0 at q = 1 second, so d_U is only ever used when
    it squares to zero.
    """

    presentation: Presentation
    h11: Element
    cutoff: int = 8

    @classmethod
    def build(cls, pres: Presentation, cutoff: int = 8, check: bool = True) -> "DifferentialContext":
        from .sft_operations import build_h1, master_residual

        if check:
            bad = check_d_squared(pres)
            if bad:
                name = sorted(bad)[0]
                raise PresentationInvalid(f"d(d {name}) = {bad[name]} is not zero")
        ham = build_h1(pres, 1)
        ctx = cls(pres, ham.h1[1], cutoff)
        if check:
            res = master_residual(pres, ham, 1)
            if res:
                raise PresentationInvalid(f"master equation at q=1 fails: residual {res}")
        return ctx

    @property
    def n(self) -> int:
        return self.presentation.n

    def d(self, el: Element) -> Element:
        return d_exterior(self.presentation, el) if el.cyclic else d_algebra(self.presentation, el)

    def d_M(self, el: Element) -> Element:
        return d_M(self.presentation, el)

    def d_U(self, el: Element) -> Element:
        from .sft_operations import bracket

        return d_exterior(self.presentation, el) + bracket(self.presentation, self.h11, el).with_space(el.space)

    def dirty(self, el: Element) -> bool:
        return el.max_length() > self.cutoff
