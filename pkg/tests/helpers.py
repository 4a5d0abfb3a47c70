"""Shared fixtures data and random generators for the test suite."""
import itertools
import random
from fractions import Fraction

from legsft.algebra_core import Element, Presentation, composable
from legsft.cyclic_spaces import canonical_key
from legsft.differentials import check_d_squared
from legsft.presentation_io import parse_presentation
from legsft import sft_operations as so


def unknot_text(n: int) -> str:
    return (
        f"n = {n}\n"
        f"chord a : degree {n - 1}, from 1, to 1\n"
        "d a = 0\n"
        "H 2 0 = s^2 hb^-1 [ ^a* x1* ]\n"
    )


def unknot(n: int):
    """(presentation, Hamiltonian data with H^2_0 attached)."""
    pf = parse_presentation(unknot_text(n))
    pres = pf.presentation
    ham = so.build_h1(pres, 4)
    so.attach_h20(pres, ham, pf.hamiltonians[(2, 0)][0])
    return pres, ham


def random_presentation(rng: random.Random, n=None, m=None, k=None) -> Presentation:
    """Random presentation with d^2 = 0 and at least one non-zero differential.

    Chords get degrees 0..3; each chord's differential is a random sum of
    composable words of length 1 or 2 in the other chords with the right
    degree.  Candidates failing d^2 = 0 are rejected.
    """
    while True:
        n_ = n or rng.choice([2, 3, 4])
        m_ = m or rng.choice([1, 1, 2])
        k_ = k or rng.choice([2, 3])
        pres = Presentation(n_, m_)
        names = [f"c{i}" for i in range(k_)]
        for nm in names:
            pres.add_chord(nm, rng.randint(0, 3), rng.randint(1, m_), rng.randint(1, m_))
        for nm in names:
            c = pres.chord(nm)
            terms = {}
            for length in (1, 2):
                for w in itertools.product(pres.chords, repeat=length):
                    if c.name in [g.name for g in w]:
                        continue
                    if (
                        composable(w)
                        and w[0].left == c.left
                        and w[-1].right == c.right
                        and sum(g.degree for g in w) == c.degree - 1
                        and rng.random() < 0.5
                    ):
                        terms[(0, 0, tuple(w), None)] = Fraction(rng.choice([1, -1, 2]))
            pres.set_differential(nm, Element(terms, "A"))
        if not check_d_squared(pres) and any(pres.d_of(c) for c in names):
            return pres


def small_alphabet(rng: random.Random, pres: Presentation) -> list:
    """All chords plus one hat, its dual, one basepoint and its dual.

    A small alphabet makes contractions between random words likely.
    """
    c = rng.choice(pres.chords)
    j = rng.randint(1, pres.m)
    return list(pres.chords) + [pres.hat(c.name), pres.hatdual(c.name), pres.x(j), pres.xdual(j)]


def _random_cycle(rng, pres, letters, k):
    start = rng.randint(1, pres.m)
    cur, w = start, []
    for _ in range(k):
        opts = [g for g in letters if g.left == cur]
        if not opts:
            return None
        g = rng.choice(opts)
        w.append(g)
        cur = g.right
    return w if cur == start else None


def random_balanced(rng: random.Random, pres: Presentation, letters, max_len: int, excite=True) -> Element:
    """A random non-vanishing balanced monomial (hbar^-1, s = p - q)."""
    while True:
        w = _random_cycle(rng, pres, letters, rng.randint(1, max_len))
        if w is None:
            continue
        p = sum(g.kind in ("hatdual", "xdual") for g in w)
        q = sum(g.kind in ("hat", "x") for g in w)
        if p == 0:
            continue
        exc = rng.choice([i for i, g in enumerate(w) if g.kind != "chord"]) if excite else None
        sign, ck = canonical_key((p - q, -1, tuple(w), exc))
        if sign:
            return Element({ck: Fraction(sign)}, "ExcitedU_bal" if excite else "U_bal")


def random_mcyc(rng: random.Random, pres: Presentation, max_len: int) -> Element:
    """A random non-vanishing monomial of M^cyc: one hat or basepoint and chords."""
    while True:
        legs = pres.leg_letters()
        head = rng.choice(legs)
        tail = _random_path(rng, pres, head.right, head.left, rng.randint(0, max_len - 1))
        if tail is None:
            continue
        sign, ck = canonical_key((0, 0, (head,) + tuple(tail), None))
        if sign:
            return Element({ck: Fraction(sign)}, "M_cyc")


def _random_path(rng, pres, start, end, k):
    cur, w = start, []
    for _ in range(k):
        opts = [g for g in pres.chords if g.left == cur]
        if not opts:
            return None
        g = rng.choice(opts)
        w.append(g)
        cur = g.right
    return w if cur == end else None


def random_mstar(rng: random.Random, pres: Presentation, max_len: int) -> Element:
    """A random excited (M*)^bal monomial sigma hbar^-1 [u* w], u* excited."""
    while True:
        head = rng.choice(pres.dual_letters())
        tail = _random_path(rng, pres, head.right, head.left, rng.randint(0, max_len - 1))
        if tail is None:
            continue
        sign, ck = canonical_key((1, -1, (head,) + tuple(tail), 0))
        if sign:
            return Element({ck: Fraction(sign)}, "TauMStar_bal")
