"""Homology of the truncated complexes (M^cyc, d_M) and (M^bal, d_U).

Words are truncated by their length, counted without basepoints (a
basepoint carries no action, and d_M trades a hat for a chord next to a
basepoint).  A degree is *dirty* when the truncated matrices there may
differ from the untruncated ones; homology refuses dirty degrees.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .algebra_core import X, XDUAL, AlgebraError, Element, Presentation, degree
from .cyclic_spaces import beta_underline, canonical_key
from .differentials import DifferentialContext
from .linalg import Echelon, kernel

SPACES = ("mcyc", "mbal", "mstar")
_TAGS = {"mcyc": "M_cyc", "mbal": "TauM_bal", "mstar": "TauMStar_bal"}
DEFAULT_SIZE_CAP = 20000


class DirtyDegree(AlgebraError):
    """Homology was requested in a degree the truncation cannot certify."""


class ComplexTooLarge(AlgebraError):
    pass


def word_length(key) -> int:
    return sum(1 for g in key[2] if g.kind not in (X, XDUAL))


def _length_can_drop(pres: Presentation) -> bool:
    return any(not k[2] for c in pres.chord_names for k in pres.d_of(c).terms)


def _words(pres: Presentation, heads, max_len: int, prefix, excite_head: bool, size_cap: int) -> list:
    chords = pres.chords
    seen = set()
    out = []
    for head in heads:
        base = 0 if head.kind in (X, XDUAL) else 1
        for k in range(0, max_len - base + 1):
            for tail in product(chords, repeat=k):
                w = (head,) + tail
                if w[-1].right != w[0].left or any(w[i].right != w[i + 1].left for i in range(k)):
                    continue
                sign, ck = canonical_key(prefix + (w, 0 if excite_head else None))
                if not sign or ck in seen:
                    continue
                seen.add(ck)
                out.append(ck)
                if len(out) > size_cap:
                    raise ComplexTooLarge(
                        f"more than {size_cap} basis monomials at maxlen {max_len}; lower --maxlen"
                    )
    return out


def mcyc_words(pres: Presentation, max_len: int, size_cap: int = DEFAULT_SIZE_CAP) -> list:
    """Canonical keys of M^cyc monomials of length <= max_len."""
    return _words(pres, pres.leg_letters(), max_len, (0, 0), False, size_cap)


def mstar_words(pres: Presentation, max_len: int, size_cap: int = DEFAULT_SIZE_CAP) -> list:
    """Canonical keys of excited (M*)^bal monomials sigma hbar^-1 [u* w]."""
    return _words(pres, pres.dual_letters(), max_len, (1, -1), True, size_cap)


@dataclass
class TruncatedComplex:
    ctx: DifferentialContext
    space: str
    cutoff: int
    window: tuple
    basis: dict  # degree -> list of canonical keys
    matrices: dict  # degree -> list of sparse columns (images of basis[degree] in basis[degree-1])
    dirty: set = field(default_factory=set)
    index: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.ctx.n

    def element(self, deg: int, vec: dict) -> Element:
        return Element({self.basis[deg][i]: c for i, c in vec.items() if c}, _TAGS[self.space])

    def vector(self, el: Element, deg: int) -> dict:
        idx = self.index.get(deg, {})
        out = {}
        for key, c in el.terms.items():
            if key not in idx:
                raise AlgebraError(f"term outside the truncated basis in degree {deg}")
            out[idx[key]] = c
        return out

    def differential(self, el: Element) -> Element:
        if self.space == "mcyc":
            return self.ctx.d_M(el)
        return self.ctx.d_U(el)


def _image(ctx, space, key):
    el = Element({key: Fraction(1)}, _TAGS[space])
    return ctx.d_M(el) if space == "mcyc" else ctx.d_U(el)


def build_complex(ctx: DifferentialContext, space: str, cutoff: int, window, size_cap: int = DEFAULT_SIZE_CAP) -> TruncatedComplex:
    if space not in SPACES:
        raise AlgebraError(f"unknown space {space!r}; use one of {', '.join(SPACES)}")
    pres = ctx.presentation
    lo, hi = window
    keys = (mstar_words if space == "mstar" else mcyc_words)(pres, cutoff, size_cap)
    if space == "mbal":
        mapped = []
        for k in keys:
            img = beta_underline(pres, Element({k: Fraction(1)}, "M_cyc"))
            mapped.extend(img.terms)
        keys = mapped
    basis: dict = {}
    for k in keys:
        basis.setdefault(degree(k, pres.n), []).append(k)
    degs = range(lo - 1, hi + 2)
    for d in degs:
        basis.setdefault(d, [])
    index = {d: {k: i for i, k in enumerate(b)} for d, b in basis.items()}
    matrices = {}
    escaped = set()
    for d in range(lo, hi + 2):
        cols = []
        for k in basis[d]:
            img = _image(ctx, space, k)
            col = {}
            for tk, c in img.terms.items():
                i = index.get(d - 1, {}).get(tk)
                if i is None:
                    escaped.add(d)
                    continue
                col[i] = c
            cols.append(col)
        matrices[d] = cols
    dirty = set()
    for d in range(lo, hi + 1):
        if d in escaped or d + 1 in escaped:
            dirty.add(d)
    words = mstar_words if space == "mstar" else mcyc_words
    shift = 2 - pres.n if space == "mbal" else 0
    longer = [k for k in words(pres, cutoff + 1, size_cap) if word_length(k) == cutoff + 1]
    if any(c.degree < 0 for c in pres.chords):
        # words of unbounded length share degrees with short ones
        dirty.update(range(lo, hi + 1))
    elif longer:
        # with chords of degree >= 0 every word longer than the cutoff has
        # degree at least that of some word of length cutoff + 1
        floor = min(degree(k, pres.n) for k in longer) + shift
        if _length_can_drop(pres):
            floor -= 1
        dirty.update(d for d in range(lo, hi + 1) if d >= floor)
    return TruncatedComplex(ctx, space, cutoff, (lo, hi), basis, matrices, dirty, index)


@dataclass
class HomologyResult:
    dims: dict
    representatives: dict  # degree -> list of sparse vectors in the chain basis
    dirty_degrees: set
    complex: TruncatedComplex
    _echelons: dict = field(default_factory=dict, repr=False)

    def rep_elements(self, deg: int) -> list:
        return [self.complex.element(deg, v) for v in self.representatives[deg]]


def _degree_homology(c: TruncatedComplex, d: int):
    cols = c.matrices[d]
    z = kernel(cols, len(c.basis[d]))
    ech = Echelon()
    for col in c.matrices.get(d + 1, []):
        ech.add(col, ("b", len(ech.rows)))
    nb = len(ech)
    reps = []
    for v in z:
        rem, _ = ech.reduce(v)
        if rem:
            reps.append(v)
            ech.add(v, ("r", len(reps) - 1))
    return reps, ech, nb


def homology(c: TruncatedComplex, degrees=None) -> HomologyResult:
    lo, hi = c.window
    wanted = list(range(lo, hi + 1)) if degrees is None else list(degrees)
    bad = sorted(set(wanted) & c.dirty)
    if bad:
        raise DirtyDegree(
            f"degrees {bad} are not closed under the differential at maxlen {c.cutoff}; raise --maxlen"
        )
    dims, reps, echs = {}, {}, {}
    for d in wanted:
        r, ech, _ = _degree_homology(c, d)
        dims[d] = len(r)
        reps[d] = r
        echs[d] = ech
    return HomologyResult(dims, reps, set(c.dirty), c, echs)


def homology_report(c: TruncatedComplex) -> dict:
    """Like :func:`homology` but records dirty degrees instead of raising."""
    lo, hi = c.window
    clean = [d for d in range(lo, hi + 1) if d not in c.dirty]
    return homology(c, clean)


def reduce_to_homology_basis(x: Element, c: TruncatedComplex, h: HomologyResult) -> list:
    """Coordinates of the class of the cycle ``x`` in the chosen representatives."""
    if x.is_zero():
        return []
    degs = {degree(k, c.n) for k in x.terms}
    if len(degs) != 1:
        raise AlgebraError("element is not homogeneous")
    d = degs.pop()
    if d in c.dirty:
        raise DirtyDegree(f"degree {d} is dirty at maxlen {c.cutoff}")
    if d not in h.dims:
        raise AlgebraError(f"degree {d} was not computed")
    if c.differential(x):
        raise AlgebraError("element is not a cycle")
    vec = c.vector(x, d)
    rem, combo = h._echelons[d].reduce(vec)
    if rem:
        raise AlgebraError("cycle not in the span of representatives and boundaries")
    out = [Fraction(0)] * h.dims[d]
    for tag, a in combo.items():
        if tag[0] == "r":
            out[tag[1]] += a
    return out
