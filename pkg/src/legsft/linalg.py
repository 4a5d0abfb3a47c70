"""Exact linear algebra over Q on sparse vectors.

A vector is a dict ``index -> Fraction`` without zero entries.  Elimination
is plain Gaussian with the smallest index as pivot, so all choices are
deterministic.
"""
from __future__ import annotations

from fractions import Fraction


def _axpy(y: dict, a, x: dict) -> dict:
    """Return y + a x."""
    out = dict(y)
    for k, v in x.items():
        w = out.get(k, 0) + a * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


class Echelon:
    """Incrementally built row-echelon basis of a subspace.

    Each stored row remembers how it was combined from the inserted
    vectors (``tags``), so membership tests can also return coordinates.
    """

    def __init__(self):
        self.rows: dict = {}  # pivot -> (row, combo)
        self.count = 0

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict):
        """Return ``(remainder, combo)`` with vec = remainder + sum combo[t] * input_t."""
        vec = dict(vec)
        combo: dict = {}
        while vec:
            p = min(vec)
            if p not in self.rows:
                # later pivots may still clear entries above p
                rest = {k: v for k, v in vec.items() if k != p}
                tail, tail_combo = self._reduce_tail(rest)
                tail[p] = vec[p]
                return tail, _axpy(combo, 1, tail_combo)
            row, rc = self.rows[p]
            a = vec[p] / row[p]
            vec = _axpy(vec, -a, row)
            combo = _axpy(combo, a, rc)
        return {}, combo

    def _reduce_tail(self, vec: dict):
        vec = dict(vec)
        combo: dict = {}
        for p in sorted(self.rows):
            if p in vec:
                row, rc = self.rows[p]
                a = vec[p] / row[p]
                vec = _axpy(vec, -a, row)
                combo = _axpy(combo, a, rc)
        return vec, combo

    def add(self, vec: dict, tag=None) -> bool:
        """Insert ``vec``; returns False if it was already in the span."""
        tag = self.count if tag is None else tag
        self.count += 1
        rem, combo = self.reduce(vec)
        if not rem:
            return False
        combo = _axpy({tag: Fraction(1)}, -1, combo)
        p = min(rem)
        self.rows[p] = (rem, combo)
        return True


def rank(columns) -> int:
    ech = Echelon()
    for c in columns:
        ech.add(c)
    return len(ech)


def kernel(columns, nsrc: int) -> list:
    """Basis of {v : sum_i v_i columns[i] = 0}, in reduced echelon form."""
    ech = Echelon()
    out = []
    for i in range(nsrc):
        col = columns[i]
        rem, combo = ech.reduce(col)
        if rem:
            ech.add(col, i)
        else:
            v = _axpy({i: Fraction(1)}, -1, combo)
            out.append(v)
    return rref(out)


def rref(vectors) -> list:
    """Reduced row echelon basis of the span, sorted by pivot."""
    rows: dict = {}
    for v in vectors:
        v = dict(v)
        for p in sorted(rows):
            if p in v:
                v = _axpy(v, -v[p], rows[p])
        if not v:
            continue
        p = min(v)
        v = {k: c / v[p] for k, c in v.items()}
        for q in list(rows):
            if p in rows[q]:
                rows[q] = _axpy(rows[q], -rows[q][p], v)
        rows[p] = v
    return [rows[p] for p in sorted(rows)]
