"""Contractions of excited balanced monomials and the Hamiltonians H^1_q.

A contraction glues a dual letter ``u`` of X to a hat/basepoint letter ``v``
of Y.  Both words are rotated on the raw letter level (sigma/hbar letters
included) so that X reads ``X' u`` and Y reads ``v Y'``; the pairing value
u(v) contributes a sign and one hbar, and the glued word ``X' Y'`` is put
back into normal form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .algebra_core import (
    CHORD,
    DUAL_KINDS,
    HAT,
    HATDUAL,
    LEG_KINDS,
    X,
    XDUAL,
    Accumulator,
    AlgebraError,
    Element,
    Presentation,
    block_form,
    degree,
    normalize,
    sign_of,
)
from .cyclic_spaces import canonical_key, cyclic_word, excite, tensor_type
from .differentials import d_exterior, s_operator

# where the hbar produced by a contraction is inserted in the glued word
HBAR_AT_JUNCTION = True


def result_space(acc_terms) -> str:
    types = {(tensor_type(k).p, tensor_type(k).q) for k in acc_terms}
    if types == {(0, 1)}:
        return "TauM_bal"
    if types == {(1, 0)}:
        return "TauMStar_bal"
    return "TauU_bal"


def _finish(acc: Accumulator, space=None) -> Element:
    return acc.element(space or result_space(acc.terms))


# -- the operator S on cyclic words ---------------------------------------
def s_cyclic(pres: Presentation, el: Element, k: int = 1) -> Element:
    """Apply the cyclic operator S (chord c -> sigma^-1 c-hat in place) k times."""
    for _ in range(k):
        acc = Accumulator()
        for key, c in el.terms.items():
            raw, ex = pres.raw(key)
            for p, g in enumerate(raw):
                if g.kind != CHORD:
                    continue
                new = raw[:p] + [pres.sigma_inv, pres.hat(g.name)] + raw[p + 1:]
                new_ex = ex if ex is None or ex < p else ex + 1
                cc, s, h, w, e = normalize(new, c, new_ex)
                sign, ck = canonical_key((s, h, w, e))
                if sign:
                    acc.add(ck, cc * sign)
        el = acc.element(el.space)
    return el


# -- contraction ----------------------------------------------------------
def pairing(pres: Presentation, u, u_exc: bool, v, v_exc: bool) -> int:
    """Coefficient of hbar in u(v).

    Hat pairs give +1; basepoint pairs give +1 when the dual is excited
    and -1 when the basepoint is.
    """
    if u_exc == v_exc:
        return 0
    if u.kind == HATDUAL and v.kind == HAT:
        return SIGN_CONVENTION["hat"](pres.n) if u.order == v.order else 0
    if u.kind == XDUAL and v.kind == X and u.left == v.left:
        return SIGN_CONVENTION["dual_excited" if u_exc else "leg_excited"](pres.n)
    return 0


# per-row values of u(v) and the sign of the sigma^-1 [x x hbar^-1 x*]
# term of h^1_2; scripts/scan_conventions.py swaps these out
SIGN_CONVENTION = {
    "hat": lambda n: 1,
    "dual_excited": lambda n: 1,
    "leg_excited": lambda n: -1,
    "x_term": lambda n: -1,
}


def _glue(pres: Presentation, kx, ky, i: int, j: int, coeff, acc: Accumulator) -> None:
    """Add eps1 eps2 u(v) [X'_u Y'_v] for u = word(X)[i], v = word(Y)[j]."""
    wx, ex = kx[2], kx[3]
    wy, ey = ky[2], ky[3]
    val = pairing(pres, wx[i], ex == i, wy[j], ey == j)
    if not val:
        return
    rx, rex = pres.raw(kx)
    ry, rey = pres.raw(ky)
    iu = len(rx) - len(wx) + i
    jv = len(ry) - len(wy) + j
    left, right = rx[:iu], rx[iu + 1:]
    eps1 = sign_of(block_form(left + [rx[iu]], right))
    xp = right + left
    left2, right2 = ry[:jv], ry[jv + 1:]
    eps2 = sign_of(block_form(left2, ry[jv:]))
    yp = right2 + left2
    if rex is not None and rex != iu:
        exc = rex - iu - 1 if rex > iu else len(right) + rex
    elif rey is not None and rey != jv:
        off = rey - jv - 1 if rey > jv else len(right2) + rey
        exc = len(xp) + off
    else:
        exc = None
    if HBAR_AT_JUNCTION:
        raw = xp + [pres.hbar] + yp
        if exc is not None and exc >= len(xp):
            exc += 1
    else:
        raw = [pres.hbar] + xp + yp
        exc = None if exc is None else exc + 1
    c, s, h, w, e = normalize(raw, coeff * eps1 * eps2 * val, exc)
    if not w:
        return
    sign, ck = canonical_key((s, h, w, e))
    if sign:
        acc.add(ck, c * sign)


def _positions(word, kinds):
    return [i for i, g in enumerate(word) if g.kind in kinds]


def star(pres: Presentation, x: Element, y: Element) -> Element:
    acc = Accumulator()
    for kx, cx in x.items():
        duals = _positions(kx[2], DUAL_KINDS)
        if not duals:
            continue
        for ky, cy in y.items():
            for i in duals:
                for j in _positions(ky[2], LEG_KINDS):
                    _glue(pres, kx, ky, i, j, cx * cy, acc)
    return _finish(acc)


def leg_order(word) -> list:
    """Positions of the hat/basepoint letters, counted forward (cyclically)
    from the unique dual letter."""
    duals = _positions(word, DUAL_KINDS)
    if len(duals) != 1:
        raise AlgebraError("partial contraction needs exactly one dual letter")
    k = len(word)
    d = duals[0]
    return [(d + r) % k for r in range(1, k) if word[(d + r) % k].kind in LEG_KINDS]


def dual_order(word) -> list:
    """Positions of the dual letters, counted backward (cyclically) from the
    unique hat/basepoint letter."""
    legs = _positions(word, LEG_KINDS)
    if len(legs) != 1:
        raise AlgebraError("partial contraction needs exactly one hat/basepoint letter")
    k = len(word)
    l = legs[0]
    return [(l - r) % k for r in range(1, k) if word[(l - r) % k].kind in DUAL_KINDS]


def star_lower(pres: Presentation, x: Element, y: Element, j: int) -> Element:
    """X *_j Y: contract against the j-th leg of Y (Y of type (1, q))."""
    acc = Accumulator()
    for ky, cy in y.items():
        legs = leg_order(ky[2])
        if not 1 <= j <= len(legs):
            raise AlgebraError(f"leg index {j} out of range 1..{len(legs)}")
        jj = legs[j - 1]
        for kx, cx in x.items():
            for i in _positions(kx[2], DUAL_KINDS):
                _glue(pres, kx, ky, i, jj, cx * cy, acc)
    return _finish(acc)


def star_upper(pres: Presentation, x: Element, i: int, y: Element) -> Element:
    """X *^i Y: contract the i-th dual of X (X of type (p, 1))."""
    acc = Accumulator()
    for kx, cx in x.items():
        duals = dual_order(kx[2])
        if not 1 <= i <= len(duals):
            raise AlgebraError(f"dual index {i} out of range 1..{len(duals)}")
        ii = duals[i - 1]
        for ky, cy in y.items():
            for j in _positions(ky[2], LEG_KINDS):
                _glue(pres, kx, ky, ii, j, cx * cy, acc)
    return _finish(acc)


def parity(pres: Presentation, key) -> tuple:
    """(degree, st) of a monomial; st = p + h is the hbar/dual weight."""
    tt = tensor_type(key)
    return degree(key, pres.n), tt.p + tt.h


def koszul_sign(px: tuple, py: tuple) -> int:
    return sign_of(px[0] * py[0] + px[1] * py[1])


def _split_by_parity(pres: Presentation, el: Element) -> dict:
    out = {}
    for k, c in el.terms.items():
        out.setdefault(parity(pres, k), {})[k] = c
    return {d: Element(t, el.space) for d, t in out.items()}


def bracket(pres: Presentation, x: Element, y: Element) -> Element:
    """[X, Y] = X*Y - (-1)^{|X||Y| + st(X)st(Y)} Y*X, extended bilinearly.

    The st term vanishes when either argument has an odd number of dual
    letters (every Hamiltonian has one), so brackets with H agree with the
    plain degree sign; without it Jacobi fails on pairs like M^bal x M^bal.
    """
    acc = Accumulator()
    for px, xx in _split_by_parity(pres, x).items():
        for py, yy in _split_by_parity(pres, y).items():
            acc.add_element(star(pres, xx, yy))
            acc.add_element(star(pres, yy, xx), -koszul_sign(px, py))
    return _finish(acc)


# -- operations induced by elements of given tensor type -----------------
def op_down(pres: Presentation, x: Element, args) -> Element:
    """X^down(A_1, ..., A_p) = (...((X *^1 A_1) *^1 A_2) ...) *^1 A_p."""
    p = {tensor_type(k).p for k in x.terms}
    if x and (p != {len(args)} or {tensor_type(k).q for k in x.terms} != {1}):
        raise AlgebraError("op_down: X must have tensor type (p, 1) with p arguments")
    out = x
    for a in args:
        out = star_upper(pres, out, 1, a)
    return out


def op_up(pres: Presentation, y: Element, args) -> Element:
    """Y^up(B_1, ..., B_q) = B_q *_1 (... (B_2 *_1 (B_1 *_1 Y)))."""
    q = {tensor_type(k).q for k in y.terms}
    if y and (q != {len(args)} or {tensor_type(k).p for k in y.terms} != {1}):
        raise AlgebraError("op_up: Y must have tensor type (1, q) with q arguments")
    out = y
    for b in args:
        out = star_lower(pres, b, out, 1)
    return out


def _require_12(y: Element, name: str) -> None:
    if any((tensor_type(k).p, tensor_type(k).q) != (1, 2) for k in y.terms):
        raise AlgebraError(f"{name}: Y must have tensor type (1, 2)")


def op_updown(pres: Presentation, y: Element, a: Element, b: Element) -> Element:
    """Y^{up down}(X, Z) = (X *_1 Y) * Z with X dual, Z in M^bal."""
    _require_12(y, "op_updown")
    return star(pres, star_lower(pres, a, y, 1), b)


def op_downup(pres: Presentation, y: Element, a: Element, b: Element) -> Element:
    """Y^{down up}(Z, X) = (X *_2 Y) * Z with Z in M^bal, X dual."""
    _require_12(y, "op_downup")
    return star(pres, star_lower(pres, b, y, 2), a)


def op_circ(pres: Presentation, x: Element, y: Element) -> Element:
    if any((tensor_type(k).p, tensor_type(k).q) != (2, 0) for k in x.terms):
        raise AlgebraError("op_circ: X must have tensor type (2, 0)")
    return star(pres, x, y)


# -- Hamiltonians ---------------------------------------------------------
@dataclass
class HamiltonianData:
    h11_prime: Element
    h11_doubleprime: Element
    h1: dict
    user_higher: dict = field(default_factory=dict)
    q_max: int = 2

    @property
    def h20(self):
        return self.user_higher.get((2, 0))

    def h21(self, pres: Presentation):
        """H^2_1 = E(S(h^2_0))."""
        raw = self.user_higher.get("h20_raw")
        if raw is None:
            return None
        return excite(s_cyclic(pres, raw), "ExcitedU_bal")


def h11_parts(pres: Presentation):
    hb_inv = pres.hbar_inv
    prime = Accumulator()
    dprime = Accumulator()
    for c in pres.chords:
        dual = pres.hatdual(c.name)
        for (_, _, w, _), coeff in s_operator(pres, pres.d_of(c.name)).terms.items():
            # sign chosen to match d_M (see differentials.d_M)
            prime.add_element(cyclic_word(list(w) + [hb_inv, dual], -coeff))
        dprime.add_element(cyclic_word([c, pres.x(c.right), hb_inv, dual]))
        dprime.add_element(cyclic_word([pres.x(c.left), c, hb_inv, dual], -1))
    return prime.element("U_bal"), dprime.element("U_bal")


def lower_h1(pres: Presentation, q_max: int = 2) -> dict:
    """The unexcited h^1_q for q = 1..q_max."""
    prime, dprime = h11_parts(pres)
    out = {1: prime + dprime}
    if q_max >= 2:
        xs = Accumulator()
        for j in range(1, pres.m + 1):
            xs.add_element(cyclic_word([pres.sigma_inv, pres.x(j), pres.x(j), pres.hbar_inv, pres.xdual(j)]))
        sign = SIGN_CONVENTION["x_term"](pres.n)
        out[2] = s_cyclic(pres, prime) * Fraction(1, 2) + s_cyclic(pres, dprime) + xs.element("U_bal") * sign
    for q in range(3, q_max + 1):
        out[q] = s_cyclic(pres, out[1], q - 1) * Fraction(1, factorial(q))
    return out


def build_h1(pres: Presentation, q_max: int = 2) -> HamiltonianData:
    """H^1_q for q = 1..q_max (excited), together with both parts of h^1_1."""
    prime, dprime = h11_parts(pres)
    h = lower_h1(pres, q_max)
    H = {q: excite(v.with_space("U_bal"), "ExcitedU_bal") for q, v in h.items()}
    return HamiltonianData(prime, dprime, H, {}, q_max)


def validate_user_h(pres: Presentation, p: int, q: int, el: Element) -> Element:
    """Check a user-supplied H^p_q and return its excited form."""
    if el.is_zero():
        return Element.zero("ExcitedU_bal")
    for key in el.terms:
        tt = tensor_type(key)
        if not tt.balanced:
            raise AlgebraError(f"H {p} {q}: term is not balanced")
        if (tt.p, tt.q) != (p, q):
            raise AlgebraError(f"H {p} {q}: term has tensor type ({tt.p}, {tt.q})")
        if degree(key, pres.n) != -1:
            raise AlgebraError(f"H {p} {q}: term has degree {degree(key, pres.n)}, expected -1")
    excited = [k[3] is not None for k in el.terms]
    if all(excited):
        return el.with_space("ExcitedU_bal")
    if any(excited):
        raise AlgebraError(f"H {p} {q}: mix of excited and unexcited terms")
    return excite(el.with_space("U_bal"), "ExcitedU_bal")


def attach_h20(pres: Presentation, ham: HamiltonianData, h20: Element) -> HamiltonianData:
    """Store H^2_0 (and its unexcited form, needed for H^2_1)."""
    ham.user_higher[(2, 0)] = validate_user_h(pres, 2, 0, h20)
    if all(k[3] is None for k in h20.terms):
        ham.user_higher["h20_raw"] = h20.with_space("U_bal")
    return ham


def dot_part(y: Element, leg: int = 2) -> Element:
    """Terms of Y (type (1, q)) whose excited letter is its ``leg``-th leg."""
    acc = Accumulator()
    for key, c in y.terms.items():
        legs = leg_order(key[2])
        if key[3] is not None and len(legs) >= leg and legs[leg - 1] == key[3]:
            acc.add(key, c)
    return acc.element(y.space)


def master_residual(pres: Presentation, ham: HamiltonianData, q: int) -> Element:
    """dH_q + sum_{k=1}^q sum_{j=1}^k H_{q-k+1} *_j H_k."""
    h = ham.h1
    acc = Accumulator()
    acc.add_element(d_exterior(pres, h[q]))
    for k in range(1, q + 1):
        for j in range(1, k + 1):
            acc.add_element(star_lower(pres, h[q - k + 1], h[k], j))
    return acc.element("ExcitedU_bal")


def h20_residual(pres: Presentation, ham: HamiltonianData) -> Element:
    h20 = ham.h20
    if h20 is None:
        raise AlgebraError("H 2 0 is not given")
    return d_exterior(pres, h20) + bracket(pres, ham.h1[1], h20)


def h21_residual(pres: Presentation, ham: HamiltonianData) -> Element:
    h20 = ham.h20
    h21 = ham.h21(pres)
    if h20 is None or h21 is None:
        raise AlgebraError("H 2 0 is not given in unexcited form")
    h12 = ham.h1[2]
    return (
        d_exterior(pres, h21)
        + bracket(pres, ham.h1[1], h21)
        + star_lower(pres, h20, h12, 1)
        + star_lower(pres, h20, h12, 2)
    )


def check_master(pres: Presentation, ham: HamiltonianData, q_max: int) -> dict:
    """Residuals of every identity that can be evaluated; keys are labels."""
    out = {}
    for q in range(1, q_max + 1):
        if q in ham.h1:
            out[f"I_{q}"] = master_residual(pres, ham, q)
    if ham.h20 is not None:
        out["H20"] = h20_residual(pres, ham)
        if ham.h21(pres) is not None and 2 in ham.h1:
            out["H21"] = h21_residual(pres, ham)
    return out
