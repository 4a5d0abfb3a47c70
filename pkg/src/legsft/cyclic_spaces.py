"""Cyclic quotients, balanced subspaces, excitation and the maps beta.

A cyclic monomial is stored as ``sigma^s hbar^h [w]`` with the
sigma/hbar prefix outside the bracket.  With the Koszul form of
``algebra_core`` the prefix never contributes to rotation signs, so
rotating ``[a1 ... ak]`` to ``[a2 ... ak a1]`` costs ``(-1)^<a1, a2...ak>``.
The canonical representative is the rotation with the smallest
``(word, excited position)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra_core import (
    CHORD,
    DUAL_KINDS,
    EXCITABLE,
    LEG_KINDS,
    Accumulator,
    AlgebraError,
    Element,
    Gen,
    Monomial,
    Presentation,
    block_form,
    cyclically_composable,
    normalize,
    sign_of,
)


@dataclass(frozen=True)
class TensorType:
    p: int
    q: int
    s: int
    h: int

    @property
    def balanced(self) -> bool:
        return self.h == -1 and self.p - self.q - self.s == 0

    @property
    def st(self) -> int:
        return self.p + self.h

    @property
    def jp(self) -> int:
        return self.p + self.q + self.s


def tensor_type(key) -> TensorType:
    s, h, word = key[0], key[1], key[2]
    p = sum(1 for g in word if g.kind in DUAL_KINDS)
    q = sum(1 for g in word if g.kind in LEG_KINDS)
    return TensorType(p, q, s, h)


def rotate_key(key: tuple, r: int) -> tuple:
    """Rotate the word left by ``r`` letters; returns ``(sign, new_key)``."""
    s, h, w, e = key
    k = len(w)
    if not k:
        raise AlgebraError("cannot rotate an empty word")
    r %= k
    sign = sign_of(block_form(w[:r], w[r:]))
    new_e = None if e is None else (e - r) % k
    return sign, (s, h, w[r:] + w[:r], new_e)


def rotate_once(mono: Monomial) -> Monomial:
    sign, (s, h, w, e) = rotate_key(mono.key, 1)
    return Monomial(mono.coeff * sign, s, h, w, e)


def canonical_key(key: tuple):
    """``(sign, canonical_key)`` or ``(0, None)`` if the class vanishes."""
    s, h, w, e = key
    k = len(w)
    if k == 0:
        return 1, key
    if not cyclically_composable(w):
        raise AlgebraError("word is not cyclically composable: " + " ".join(map(str, w)))
    best = None
    best_sign = 0
    vanish = False
    for r in range(k):
        sign, rk = rotate_key(key, r)
        sort_key = (tuple(g.key for g in rk[2]), -1 if rk[3] is None else rk[3])
        if best is None or sort_key < best[0]:
            best = (sort_key, rk)
            best_sign = sign
            vanish = False
        elif sort_key == best[0] and sign != best_sign:
            vanish = True
    if vanish:
        return 0, None
    return best_sign, best[1]


def canonical_element(el: Element, space: Optional[str] = None) -> Element:
    acc = Accumulator()
    for key, c in el.terms.items():
        sign, ck = canonical_key(key)
        if sign:
            acc.add(ck, c * sign)
    return acc.element(space or el.space)


def canonicalize(mono: Monomial, space: str = "U_cyc") -> Element:
    acc = Accumulator()
    sign, ck = canonical_key(mono.key)
    if sign:
        acc.add(ck, mono.coeff * sign)
    return acc.element(space)


def cyclic_word(raw: Sequence[Gen], coeff=1, exc: Optional[int] = None, space: str = "U_cyc") -> Element:
    """The class of a raw letter sequence (sigma/hbar letters allowed
    anywhere; they are commuted to the prefix)."""
    c, s, h, w, e = normalize(raw, coeff, exc)
    if w and not cyclically_composable(w):
        raise AlgebraError("word is not cyclically composable: " + " ".join(map(str, w)))
    return canonicalize(Monomial(c, s, h, w, e), space)


def is_balanced(el: Element) -> bool:
    return all(tensor_type(k).balanced for k in el.terms)


def check_space(el: Element) -> None:
    """Raise if some term violates the structural constraints of its space."""
    for key in el.terms:
        s, h, w, e = key
        tt = tensor_type(key)
        sp = el.space
        if e is not None and w[e].kind not in EXCITABLE:
            raise AlgebraError("excited letter must be a hat, basepoint or dual")
        if sp == "A" and (s or h or e is not None or any(g.kind != CHORD for g in w)):
            raise AlgebraError("A-terms are words in chords")
        if sp in ("M", "M_diag", "M_cyc") and (s or h or e is not None or tt.p or tt.q != 1):
            raise AlgebraError(f"{sp}-terms have exactly one hat/basepoint letter")
        if sp in ("U_bal", "ExcitedU_bal", "TauM_bal", "TauMStar_bal", "TauU_bal") and not tt.balanced:
            raise AlgebraError(f"{sp}-terms must be balanced")
        if sp == "ExcitedU_bal" and e is None:
            raise AlgebraError("ExcitedU_bal terms carry an excited letter")
        if sp == "TauM_bal" and (tt.p, tt.q) != (0, 1):
            raise AlgebraError("TauM_bal terms have tensor type (0, 1)")
        if sp == "TauMStar_bal" and (tt.p, tt.q) != (1, 0):
            raise AlgebraError("TauMStar_bal terms have tensor type (1, 0)")


def excite(el: Element, space: str = "ExcitedU_bal") -> Element:
    """Sum of all excitations of every term."""
    acc = Accumulator()
    for (s, h, w, e), c in el.terms.items():
        if e is not None:
            raise AlgebraError("excite: input is already excited")
        for i, g in enumerate(w):
            if g.kind in EXCITABLE:
                sign, ck = canonical_key((s, h, w, i))
                if sign:
                    acc.add(ck, c * sign)
    return acc.element(space)


def forget_excitation(el: Element, space: str = "U_bal") -> Element:
    acc = Accumulator()
    for (s, h, w, e), c in el.terms.items():
        sign, ck = canonical_key((s, h, w, None))
        if sign:
            acc.add(ck, c * sign)
    return acc.element(space)


def excitation_count(key) -> int:
    return sum(1 for g in key[2] if g.kind in EXCITABLE)


def _append(pres: Presentation, el: Element, tail: list, space: str) -> Element:
    acc = Accumulator()
    for key, c in el.terms.items():
        raw, exc = pres.raw(key)
        cc, s, h, w, e = normalize(raw + tail, c, exc)
        sign, ck = canonical_key((s, h, w, e))
        if sign:
            acc.add(ck, cc * sign)
    return acc.element(space)


def beta(pres: Presentation, el: Element) -> Element:
    """X -> X hbar^-1 sigma^-1, from M^cyc to M^bal (degree shift 2-n)."""
    return _append(pres, el, [pres.hbar_inv, pres.sigma_inv], "TauM_bal")


def beta_inv(pres: Presentation, el: Element) -> Element:
    return _append(pres, forget_excitation(el, "TauM_bal"), [pres.sigma, pres.hbar], "M_cyc")


def beta_underline(pres: Presentation, el: Element) -> Element:
    return excite(beta(pres, el), "TauM_bal")


def beta_underline_inv(pres: Presentation, el: Element) -> Element:
    for (s, h, w, e) in el.terms:
        if e is None or w[e].kind not in LEG_KINDS:
            raise AlgebraError("beta_underline_inv expects excited M^bal terms")
    return beta_inv(pres, el)


def beta_product(pres: Presentation, el: Element) -> Element:
    """E(X sigma^-1 hbar^-1), the map conjugating the product to M^cyc.

    The factors come in the opposite order to beta, so the two maps differ
    by (-1)^(n-3).
    """
    return excite(_append(pres, el, [pres.sigma_inv, pres.hbar_inv], "TauM_bal"), "TauM_bal")


def beta_product_inv(pres: Presentation, el: Element) -> Element:
    for (s, h, w, e) in el.terms:
        if e is None or w[e].kind not in LEG_KINDS:
            raise AlgebraError("beta_product_inv expects excited M^bal terms")
    return _append(pres, forget_excitation(el, "TauM_bal"), [pres.hbar, pres.sigma], "M_cyc")


def theta_tail(pres: Presentation) -> list:
    return [pres.hbar_inv, pres.sigma_inv]
