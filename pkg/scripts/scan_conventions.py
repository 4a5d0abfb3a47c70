"""Scan the sixteen sign conventions for the basepoint pairing and h^1_2.

For each choice of the four signs in ``SIGN_CONVENTION`` and each n, prints
which identities fail on the unknot, whether the H^2_0 *_1 H^1_2-dot display
matches, and how many of a fixed sample of Y break the unit law.

    python3 scripts/scan_conventions.py [n ...]
"""
import itertools
import random
import sys

from legsft import invariant_ops as io
from legsft import sft_operations as so
from legsft.algebra_core import Element
from legsft.cyclic_spaces import canonical_key
from legsft.presentation_io import parse_element, parse_presentation

KEYS = ("hat", "dual_excited", "leg_excited", "x_term")


def unknot(n):
    pf = parse_presentation(
        f"n = {n}\nchord a : degree {n - 1}, from 1, to 1\nd a = 0\nH 2 0 = s^2 hb^-1 [ ^a* x1* ]\n"
    )
    pres = pf.presentation
    ham = so.build_h1(pres, 4)
    so.attach_h20(pres, ham, pf.hamiltonians[(2, 0)][0])
    return pres, ham


def sample_mstar(pres, count, seed=7):
    rng = random.Random(seed)
    a = pres.chords[0]
    out = []
    while len(out) < count:
        head = rng.choice(pres.dual_letters())
        word = (head,) + (a,) * rng.randint(0, 5)
        sign, key = canonical_key((1, -1, word, 0))
        if sign:
            out.append(Element({key: sign}, "TauMStar_bal"))
    return out


def scan_one(n, signs):
    so.SIGN_CONVENTION.update({k: (lambda v: lambda n: v)(v) for k, v in zip(KEYS, signs)})
    pres, ham = unknot(n)
    failed = [k for k, v in so.check_master(pres, ham, 4).items() if v]
    got = so.star_lower(pres, ham.h20, so.dot_part(ham.h1[2]), 1)
    sg = "+" if (n - 1) % 2 == 0 else "-"
    want = parse_element(f"- s [ !x1 ^a* hb^-1 x1* ] {sg} s [ !^a ^a* hb^-1 ^a* ] + s [ !x1 x1* hb^-1 ^a* ]", pres)
    if got != want:
        failed.append("display")
    e = io.unit_E(pres)
    ys = sample_mstar(pres, 40)
    unit_bad = sum(io.diamond(pres, ham, e, y) != y for y in ys)
    return failed, unit_bad, len(ys)


def main(argv):
    ns = [int(a) for a in argv] or [2, 3]
    saved = dict(so.SIGN_CONVENTION)
    print("n  " + " ".join(f"{k:>12}" for k in KEYS) + "  unit  failing")
    try:
        for n in ns:
            for signs in itertools.product((1, -1), repeat=4):
                failed, bad, total = scan_one(n, signs)
                cols = " ".join(f"{s:>12}" for s in signs)
                print(f"{n}  {cols}  {bad:>2}/{total}  {', '.join(failed) or '-'}", flush=True)
    finally:
        so.SIGN_CONVENTION.clear()
        so.SIGN_CONVENTION.update(saved)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
