"""Products, the unit E, the map Phi and the BV-operator Delta.

Chain-level values are computed with the contraction calculus; tables
reduce them to the homology basis of a truncated complex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebra_core import LEG_KINDS, X, Accumulator, AlgebraError, Element, Presentation, degree, normalize, sign_of
from .cyclic_spaces import beta_inv, beta_product, beta_product_inv, canonical_key, excite, rotate_key
from .differentials import project_cyclic, s_operator
from .homology_engine import _TAGS, DirtyDegree, HomologyResult, TruncatedComplex, reduce_to_homology_basis
from .sft_operations import HamiltonianData, op_circ, op_downup, op_updown, star, star_lower, star_upper


def _homogeneous(pres: Presentation, el: Element) -> dict:
    out = {}
    for k, c in el.terms.items():
        out.setdefault(degree(k, pres.n), {})[k] = c
    return {d: Element(t, el.space) for d, t in out.items()}


def _bilinear(pres, x, y, fn, space) -> Element:
    """Apply ``fn(dx, xx, dy, yy)`` to homogeneous pieces and sum."""
    acc = Accumulator()
    for dx, xx in _homogeneous(pres, x).items():
        for dy, yy in _homogeneous(pres, y).items():
            acc.add_element(fn(dx, xx, dy, yy))
    return acc.element(space)


def _require_h20(ham: HamiltonianData) -> Element:
    if ham.h20 is None:
        raise AlgebraError("products need H 2 0; add an 'H 2 0 = ...' directive")
    return ham.h20


# -- the dual product ----------------------------------------------------
def unit_E(pres: Presentation) -> Element:
    """E = (-1)^(n-1) sum_i hbar^-1 x_i* sigma, excited on x_i*."""
    acc = Accumulator()
    for j in range(1, pres.m + 1):
        c, s, h, w, e = normalize([pres.hbar_inv, pres.xdual(j), pres.sigma], sign_of(pres.n - 1), 1)
        sign, ck = canonical_key((s, h, w, e))
        acc.add(ck, c * sign)
    return acc.element("TauMStar_bal")


def diamond(pres: Presentation, ham: HamiltonianData, x: Element, y: Element) -> Element:
    """X <> Y = (-1)^|X| Y * (X *_1 H^1_2)."""
    h12 = ham.h1[2]
    return _bilinear(
        pres, x, y, lambda dx, xx, dy, yy: star(pres, yy, star_lower(pres, xx, h12, 1)) * sign_of(dx),
        "TauMStar_bal",
    )


# -- the product on M^bal ------------------------------------------------
@dataclass
class ProductKernels:
    """H^2_0 *_1 H^1_2 and H^2_0 *_2 H^1_2, computed once per Hamiltonian."""

    k1: Element
    k2: Element

    @classmethod
    def build(cls, pres: Presentation, ham: HamiltonianData) -> "ProductKernels":
        h20 = _require_h20(ham)
        return cls(star_lower(pres, h20, ham.h1[2], 1), star_lower(pres, h20, ham.h1[2], 2))


def _kernels(pres, ham, kernels):
    return kernels if kernels is not None else ProductKernels.build(pres, ham)


def boxdot(pres: Presentation, ham: HamiltonianData, x: Element, y: Element, kernels=None) -> Element:
    """X [.] Y = ((H^2_0 *_1 H^1_2) *^1 X) * Y."""
    k = _kernels(pres, ham, kernels)
    return star(pres, star_upper(pres, k.k1, 1, x), y).with_space("TauM_bal")


def phi_map(pres: Presentation, ham: HamiltonianData, x: Element) -> Element:
    """Phi = (H^2_0)^circ: M^bal -> (M*)^bal."""
    return op_circ(pres, _require_h20(ham), x).with_space("TauMStar_bal")


def boxdot_variants(pres: Presentation, ham: HamiltonianData, x: Element, y: Element, kernels=None) -> dict:
    """The four expressions for the product that agree on homology.

    ``star1`` is the definition; ``star2`` uses the second leg; ``updown``
    and ``downup`` factor through Phi on the first or second argument.
    """
    k = _kernels(pres, ham, kernels)
    h12 = ham.h1[2]

    def one(dx, xx, dy, yy):
        return {
            "star1": star(pres, star_upper(pres, k.k1, 1, xx), yy),
            "star2": -star(pres, star_upper(pres, k.k2, 1, xx), yy),
            "updown": op_updown(pres, h12, phi_map(pres, ham, xx), yy) * sign_of(dx),
            "downup": op_downup(pres, h12, xx, phi_map(pres, ham, yy)) * sign_of(dx * dy + dx + 1),
        }

    out = {name: Accumulator() for name in ("star1", "star2", "updown", "downup")}
    for dx, xx in _homogeneous(pres, x).items():
        for dy, yy in _homogeneous(pres, y).items():
            for name, val in one(dx, xx, dy, yy).items():
                out[name].add_element(val)
    return {name: acc.element("TauM_bal") for name, acc in out.items()}


# -- the product on M^cyc ------------------------------------------------
def boxtimes(pres: Presentation, ham: HamiltonianData, x: Element, y: Element, kernels=None) -> Element:
    """X [x] Y = b^-1(b(X) [.] b(Y)) with b(X) = E(X sigma^-1 hbar^-1)."""
    z = boxdot(pres, ham, beta_product(pres, x), beta_product(pres, y), kernels)
    return beta_product_inv(pres, z) if z else Element.zero("M_cyc")


def boxtimes_explicit(pres: Presentation, ham: HamiltonianData, x: Element, y: Element, kernels=None) -> Element:
    """(-1)^((n-2)|Y|+n+1) ((K *^1 E(X)) * E(Y)) sigma^-1 hbar^-1, K = H^2_0 *_1 H^1_2.

    Equal to :func:`boxtimes`; the extra (-1)^n comes from moving the two
    sigma^-1 hbar^-1 factors out of the contractions.
    """
    k = _kernels(pres, ham, kernels)

    def one(dx, xx, dy, yy):
        z = star(pres, star_upper(pres, k.k1, 1, excite(xx, "U_cyc")), excite(yy, "U_cyc"))
        acc = Accumulator()
        for key, c in z.terms.items():
            raw, exc = pres.raw(key)
            cc, s, h, w, e = normalize(raw + [pres.sigma_inv, pres.hbar_inv], c, exc)
            sign, ck = canonical_key((s, h, w, None))
            if sign:
                acc.add(ck, cc * sign)
        return acc.element("M_cyc") * sign_of((pres.n - 2) * dy + pres.n + 1)

    return _bilinear(pres, x, y, one, "M_cyc")


# -- BV operator ----------------------------------------------------------
def bv_delta(pres: Presentation, x: Element) -> Element:
    """Delta[x w] = S(w) for a basepoint x, Delta[c^ w] = 0."""
    acc = Accumulator()
    for key, c in x.terms.items():
        w = key[2]
        legs = [i for i, g in enumerate(w) if g.kind in LEG_KINDS]
        if len(legs) != 1 or key[0] or key[1] or key[3] is not None:
            raise AlgebraError("Delta is defined on M^cyc")
        sign, (_, _, rw, _) = rotate_key(key, legs[0])
        if rw[0].kind != X or len(rw) == 1:
            continue
        sw = s_operator(pres, Element({(0, 0, rw[1:], None): Fraction(1)}, "A"))
        acc.add_element(project_cyclic(sw), c * sign)
    return acc.element("M_cyc")


def bv_chain_sign(complex_: TruncatedComplex) -> Optional[int]:
    """+1 if Delta d = d Delta, -1 if Delta d = -d Delta on every basis
    monomial of the complex (M^cyc only); None if neither holds."""
    if complex_.space != "mcyc":
        raise AlgebraError("Delta acts on M^cyc")
    pres = complex_.ctx.presentation
    signs = {1, -1}
    for keys in complex_.basis.values():
        for k in keys:
            el = Element({k: Fraction(1)}, "M_cyc")
            a = bv_delta(pres, complex_.ctx.d_M(el))
            b = complex_.ctx.d_M(bv_delta(pres, el))
            signs = {s for s in signs if a == b * s}
            if not signs:
                return None
    return 1 if 1 in signs else -1


# -- tables ---------------------------------------------------------------
OPS = ("boxtimes", "boxdot", "diamond")
OP_SPACE = {"boxtimes": "mcyc", "boxdot": "mbal", "diamond": "mstar"}


@dataclass
class ProductTable:
    op: str
    labels: list  # (degree, index) of each generator
    generators: list
    entries: dict = field(default_factory=dict)  # (a, b) -> coordinate dict or a refusal string
    degree_shift: int = 0

    def value(self, a: int, b: int):
        return self.entries[(a, b)]


def generators(h: HomologyResult, max_len: Optional[int] = None) -> list:
    out = []
    for d in sorted(h.dims):
        for i, el in enumerate(h.rep_elements(d)):
            if max_len is None or el.max_length() <= max_len:
                out.append(((d, i), el))
    return out


def coordinates(el: Element, c: TruncatedComplex, h: HomologyResult) -> dict:
    """Homology coordinates of a homogeneous cycle as ``{(degree, i): coeff}``."""
    if el.is_zero():
        return {}
    d = degree(next(iter(el.terms)), c.n)
    coords = reduce_to_homology_basis(el.with_space(_TAGS[c.space]), c, h)
    return {(d, i): v for i, v in enumerate(coords) if v}


def apply_op(op: str, pres: Presentation, ham: HamiltonianData, x: Element, y: Element, kernels=None) -> Element:
    if op == "boxtimes":
        return boxtimes(pres, ham, x, y, kernels)
    if op == "boxdot":
        return boxdot(pres, ham, x, y, kernels)
    if op == "diamond":
        return diamond(pres, ham, x, y)
    raise AlgebraError(f"unknown product {op!r}; use one of {', '.join(OPS)}")


def product_table(op: str, pres: Presentation, ham: HamiltonianData, c: TruncatedComplex, h: HomologyResult, max_len: Optional[int] = None) -> ProductTable:
    """Pairwise products of homology generators reduced to the basis.

    Entries whose product leaves the computed window or the cutoff are
    recorded as refusal strings rather than numbers.
    """
    gens = generators(h, max_len)
    kernels = ProductKernels.build(pres, ham) if op != "diamond" else None
    shift = {"boxtimes": -pres.n, "boxdot": -2, "diamond": 1}[op]
    table = ProductTable(op, [g[0] for g in gens], [g[1] for g in gens], {}, shift)
    for a, (la, xa) in enumerate(gens):
        for b, (lb, xb) in enumerate(gens):
            z = apply_op(op, pres, ham, xa, xb, kernels)
            d = la[0] + lb[0] + shift
            if z and {degree(k, pres.n) for k in z.terms} != {d}:
                raise AlgebraError(f"{op}: product lands outside degree {d}")
            if d not in h.dims:
                table.entries[(a, b)] = f"degree {d} outside the window"
                continue
            try:
                table.entries[(a, b)] = coordinates(z, c, h)
            except DirtyDegree as exc:
                table.entries[(a, b)] = str(exc)
            except AlgebraError as exc:
                table.entries[(a, b)] = f"not reducible at maxlen {c.cutoff}: {exc}"
    return table


def theta_one(pres: Presentation, el: Element) -> Element:
    """Render an M^bal element with theta = hbar^-1 sigma^-1 set to 1."""
    if el.space == "M_cyc" or el.is_zero():
        return el
    return beta_inv(pres, el)
