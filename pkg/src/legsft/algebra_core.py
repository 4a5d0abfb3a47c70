"""Generators, graded words and the sigma/hbar normal form.

Every sign in the package comes from one symmetric form on letters,

    <a, b> = |a||b| + j(a) j(b) + t(a) t(b)   (mod 2),

where ``j`` marks the letters counted by ``jp`` (hats, basepoints, their
duals, sigma) and ``t`` the letters counted by ``st`` (duals, hbar).  The
cyclic rotation signs eps1*eps2*eps3 are exactly the Koszul signs of this
form, and so are the sigma commutation rules.  Using the same form for hbar
keeps the cyclic quotient consistent for odd ``n`` as well.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence

CHORD = "chord"
HAT = "hat"
X = "x"
HATDUAL = "hatdual"
XDUAL = "xdual"
SIGMA = "sigma"
HBAR = "hbar"

GENERATOR_KINDS = (CHORD, HAT, X, HATDUAL, XDUAL)
EXCITABLE = frozenset({HAT, X, HATDUAL, XDUAL})
# letters of M (one per monomial of M) and of M*
LEG_KINDS = frozenset({HAT, X})
DUAL_KINDS = frozenset({HATDUAL, XDUAL})

# canonical word order: basepoints and hats sort before chords so that
# M^cyc representatives read  [x a a ...]  /  [^a a ...]
KIND_RANK = {X: 0, HAT: 1, XDUAL: 2, HATDUAL: 3, CHORD: 4, SIGMA: 5, HBAR: 6}


class AlgebraError(ValueError):
    """Structural misuse of the algebra (bad word, bad space, bad input)."""


@dataclass(frozen=True)
class Gen:
    """One letter.  ``left``/``right`` are the component indices used for
    composability: ``(u, v)`` is composable iff ``u.right == v.left``."""

    kind: str
    name: str
    left: int
    right: int
    degree: int
    order: int = 0

    @property
    def j(self) -> int:
        return 1 if self.kind in EXCITABLE or self.kind == SIGMA else 0

    @property
    def t(self) -> int:
        return 1 if self.kind in DUAL_KINDS or self.kind == HBAR else 0

    @property
    def is_scalar(self) -> bool:
        return self.kind in (SIGMA, HBAR)

    @property
    def key(self) -> tuple:
        return (KIND_RANK[self.kind], self.order, self.name)

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"Gen({self.name})"


def form(a: Gen, b: Gen) -> int:
    """Parity of the Koszul pairing of two letters."""
    return (a.degree * b.degree + a.j * b.j + a.t * b.t) & 1


def block_form(left: Sequence[Gen], right: Sequence[Gen]) -> int:
    deg_l = sum(g.degree for g in left)
    deg_r = sum(g.degree for g in right)
    j_l = sum(g.j for g in left)
    j_r = sum(g.j for g in right)
    t_l = sum(g.t for g in left)
    t_r = sum(g.t for g in right)
    return (deg_l * deg_r + j_l * j_r + t_l * t_r) & 1


def sign_of(parity: int) -> int:
    return -1 if parity & 1 else 1


@dataclass(frozen=True)
class Monomial:
    """``coeff * sigma^s hbar^h w`` with an optional excited position in w."""

    coeff: Fraction
    s: int
    h: int
    word: tuple
    exc: Optional[int] = None

    @property
    def key(self) -> tuple:
        return (self.s, self.h, self.word, self.exc)


def key_sort(key: tuple) -> tuple:
    s, h, word, exc = key
    return (len(word), tuple(g.key for g in word), s, h, -1 if exc is None else exc)


CYCLIC_SPACES = frozenset(
    {"M_cyc", "U_cyc", "U_bal", "ExcitedU_bal", "TauM_bal", "TauMStar_bal", "TauU_bal"}
)
SPACES = CYCLIC_SPACES | {"A", "M", "M_diag", "U"}


class Element:
    """Finite formal sum of monomials living in one of the named spaces.

    Terms are kept in a dict from monomial key ``(s, h, word, exc)`` to a
    non-zero Fraction.  Elements are treated as immutable once built.
    """

    __slots__ = ("terms", "space")

    def __init__(self, terms: Optional[Mapping[tuple, Fraction]] = None, space: str = "U"):
        if space not in SPACES:
            raise AlgebraError(f"unknown space {space!r}")
        self.space = space
        self.terms: dict = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[k] = Fraction(c)

    @property
    def cyclic(self) -> bool:
        return self.space in CYCLIC_SPACES

    @classmethod
    def zero(cls, space: str = "U") -> "Element":
        return cls(None, space)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: key_sort(kv[0]))

    def monomials(self) -> Iterator[Monomial]:
        for (s, h, w, e), c in self.items():
            yield Monomial(c, s, h, w, e)

    def with_space(self, space: str) -> "Element":
        return Element(self.terms, space)

    def __add__(self, other: "Element") -> "Element":
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Element(out, self.space)

    def __neg__(self) -> "Element":
        return Element({k: -c for k, c in self.terms.items()}, self.space)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __mul__(self, scalar) -> "Element":
        scalar = Fraction(scalar)
        if not scalar:
            return Element.zero(self.space)
        return Element({k: c * scalar for k, c in self.terms.items()}, self.space)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Element):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def max_length(self) -> int:
        return max((len(k[2]) for k in self.terms), default=0)

    def __repr__(self) -> str:
        from .presentation_io import format_element

        return f"Element<{self.space}>({format_element(self)})"


class Accumulator:
    """Mutable sum used while building results; freeze with ``element``."""

    def __init__(self):
        self.terms: dict = {}

    def add(self, key: tuple, coeff) -> None:
        if not coeff:
            return
        v = self.terms.get(key, 0) + coeff
        if v:
            self.terms[key] = v
        else:
            del self.terms[key]

    def add_element(self, el: Element, scale=1) -> None:
        for k, c in el.terms.items():
            self.add(k, c * scale)

    def element(self, space: str) -> Element:
        return Element(self.terms, space)


def composable(word: Sequence[Gen]) -> bool:
    return all(word[i].right == word[i + 1].left for i in range(len(word) - 1))


def cyclically_composable(word: Sequence[Gen]) -> bool:
    return composable(word) and (not word or word[-1].right == word[0].left)


def degree(mono, n: int) -> int:
    """Degree of a monomial (or key): letters plus s*|sigma| + h*|hbar|."""
    if isinstance(mono, Monomial):
        s, h, word = mono.s, mono.h, mono.word
    else:
        s, h, word = mono[0], mono[1], mono[2]
    return sum(g.degree for g in word) + s + h * (n - 3)


def element_degree(el: Element, n: int) -> int:
    """Degree of a homogeneous element; zero elements have no degree."""
    degs = {degree(k, n) for k in el.terms}
    if len(degs) != 1:
        raise AlgebraError(f"element is not homogeneous (degrees {sorted(degs)})")
    return degs.pop()


def normalize(raw: Sequence[Gen], coeff=1, exc: Optional[int] = None):
    """Collect the sigma/hbar letters of a raw sequence into a prefix.

    ``exc`` indexes ``raw``.  Returns ``(coeff, s, h, word, exc)`` where the
    new ``exc`` indexes ``word``; the commutation signs are accumulated
    into ``coeff``.  Cancelling pairs sigma.sigma^-1 and hbar.hbar^-1 are
    removed without sign.
    """
    parity = 0
    gens: list = []
    sig_pow = 0
    hb_pow = 0
    sig_seen: list = []
    hb_seen: list = []
    new_exc = None
    for idx, g in enumerate(raw):
        if g.is_scalar:
            # move g left past all generators collected so far
            for prev in gens:
                parity ^= form(g, prev)
            if g.kind == SIGMA:
                # then left past the hbar letters already in the prefix block
                for hb in hb_seen:
                    parity ^= form(g, hb)
                sig_seen.append(g)
                sig_pow += 1 if g.degree > 0 else -1
            else:
                hb_seen.append(g)
                hb_pow += 1 if g.name == "hb" else -1
        else:
            if idx == exc:
                new_exc = len(gens)
            gens.append(g)
    if exc is not None and new_exc is None:
        raise AlgebraError("excited position points at a sigma/hbar letter")
    return Fraction(coeff) * sign_of(parity), sig_pow, hb_pow, tuple(gens), new_exc


class Presentation:
    """A DGA presentation: the integer ``n``, ``m`` components, Reeb chords
    with degrees and endpoints, and the differential of each chord."""

    def __init__(self, n: int, m: int = 1, chords: Iterable[tuple] = ()):
        if n < 2:
            raise AlgebraError("n must be >= 2")
        if m < 1:
            raise AlgebraError("need at least one component")
        self.n = n
        self.m = m
        self.chord_names: list = []
        self._chords: dict = {}
        self.differential: dict = {}
        self.sigma = Gen(SIGMA, "s", 0, 0, 1)
        self.sigma_inv = Gen(SIGMA, "s^-1", 0, 0, -1)
        self.hbar = Gen(HBAR, "hb", 0, 0, n - 3)
        self.hbar_inv = Gen(HBAR, "hb^-1", 0, 0, -(n - 3))
        for c in chords:
            self.add_chord(*c)

    # -- construction -------------------------------------------------
    def add_chord(self, name: str, deg: int, source: int, target: int) -> None:
        """Register chord ``name`` in C_{source,target}: its left index is
        ``source`` and its right index ``target``."""
        if name in self._chords or _looks_reserved(name):
            raise AlgebraError(f"chord name {name!r} is duplicated or reserved")
        for comp in (source, target):
            if not 1 <= comp <= self.m:
                raise AlgebraError(f"component {comp} out of range 1..{self.m}")
        self._chords[name] = (int(deg), source, target)
        self.chord_names.append(name)
        self.differential.setdefault(name, Element.zero("A"))

    def set_differential(self, name: str, image: Element) -> None:
        if name not in self._chords:
            raise AlgebraError(f"unknown chord {name!r}")
        c = self.chord(name)
        for (s, h, w, e), _ in image.terms.items():
            if s or h or e is not None or any(g.kind != CHORD for g in w):
                raise AlgebraError(f"d {name}: image must lie in A")
            if not w:
                if c.left != c.right or c.degree - 1 != 0:
                    raise AlgebraError(f"d {name}: constant term not allowed here")
                continue
            if not composable(w) or w[0].left != c.left or w[-1].right != c.right:
                raise AlgebraError(f"d {name}: term {' '.join(map(str, w))} has wrong endpoints")
            if sum(g.degree for g in w) != c.degree - 1:
                raise AlgebraError(
                    f"d {name}: term {' '.join(map(str, w))} has degree "
                    f"{sum(g.degree for g in w)}, expected {c.degree - 1}"
                )
        self.differential[name] = image.with_space("A")

    # -- letters ------------------------------------------------------
    def _index(self, name: str) -> int:
        try:
            return self.chord_names.index(name)
        except ValueError:
            raise AlgebraError(f"unknown chord {name!r}") from None

    def chord(self, name: str) -> Gen:
        deg, i, j = self._chords.get(name, (None, None, None))
        if deg is None:
            raise AlgebraError(f"unknown chord {name!r}")
        return Gen(CHORD, name, i, j, deg, self._index(name))

    def hat(self, name: str) -> Gen:
        c = self.chord(name)
        return Gen(HAT, "^" + name, c.left, c.right, c.degree + 1, c.order)

    def hatdual(self, name: str) -> Gen:
        c = self.chord(name)
        # dual letters carry reversed endpoints so that u* v glues
        return Gen(HATDUAL, "^" + name + "*", c.right, c.left, self.n - 3 - (c.degree + 1), c.order)

    def x(self, j: int) -> Gen:
        if not 1 <= j <= self.m:
            raise AlgebraError(f"basepoint x{j} out of range")
        return Gen(X, f"x{j}", j, j, 0, j)

    def xdual(self, j: int) -> Gen:
        if not 1 <= j <= self.m:
            raise AlgebraError(f"basepoint x{j}* out of range")
        return Gen(XDUAL, f"x{j}*", j, j, self.n - 3, j)

    @property
    def chords(self) -> list:
        return [self.chord(c) for c in self.chord_names]

    def leg_letters(self) -> list:
        return [self.x(j) for j in range(1, self.m + 1)] + [self.hat(c) for c in self.chord_names]

    def dual_letters(self) -> list:
        return [self.xdual(j) for j in range(1, self.m + 1)] + [
            self.hatdual(c) for c in self.chord_names
        ]

    def dual_of(self, g: Gen) -> Gen:
        if g.kind == X:
            return self.xdual(g.left)
        if g.kind == HAT:
            return self.hatdual(g.name[1:])
        raise AlgebraError(f"{g} has no dual")

    def theta(self) -> list:
        """theta = hbar^-1 sigma^-1 as a raw letter sequence."""
        return [self.hbar_inv, self.sigma_inv]

    def prefix(self, s: int, h: int) -> list:
        """sigma^s hbar^h as raw letters."""
        out = [self.sigma] * s if s >= 0 else [self.sigma_inv] * (-s)
        return out + ([self.hbar] * h if h >= 0 else [self.hbar_inv] * (-h))

    def raw(self, mono) -> tuple:
        """Monomial (or key) as ``(raw letters, excited index into raw)``."""
        if isinstance(mono, Monomial):
            s, h, word, exc = mono.key
        else:
            s, h, word, exc = mono
        pre = self.prefix(s, h)
        return pre + list(word), (None if exc is None else len(pre) + exc)

    def d_of(self, name: str) -> Element:
        return self.differential[name]

    def __repr__(self) -> str:
        return f"Presentation(n={self.n}, m={self.m}, chords={self.chord_names})"


def _looks_reserved(name: str) -> bool:
    if name in ("s", "hb", "d", "H", "n", "chord", "components"):
        return True
    if name.startswith("x") and name[1:].isdigit():
        return True
    return not name or not (name[0].isalpha() or name[0] == "_") or not name.replace("_", "a").isalnum()


def word_element(raw: Sequence[Gen], coeff=1, exc: Optional[int] = None, space: str = "U") -> Element:
    """Non-cyclic element from a raw letter sequence (sigma/hbar allowed)."""
    c, s, h, w, e = normalize(raw, coeff, exc)
    if not composable(w):
        return Element.zero(space)
    return Element({(s, h, w, e): c}, space)


def concat(x: Monomial, y: Monomial, pres: "Presentation") -> Element:
    """Tensor product over R of two monomials, with sigma/hbar renormalized."""
    if x.exc is not None and y.exc is not None:
        raise AlgebraError("a monomial has at most one excited letter")
    if x.word and y.word and x.word[-1].right != y.word[0].left:
        return Element.zero("U")
    raw, exc = pres.raw(x)
    raw2, exc2 = pres.raw(y)
    if exc2 is not None:
        exc = len(raw) + exc2
    return word_element(raw + raw2, x.coeff * y.coeff, exc, "U")
