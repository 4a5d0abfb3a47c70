"""Command line front end.

Exit codes: 0 success, 1 mathematical failure (non-zero residual or a
refused dirty degree), 2 input error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .algebra_core import AlgebraError, Element
from .differentials import DifferentialContext, PresentationInvalid, check_d_squared, d_M
from .homology_engine import SPACES, ComplexTooLarge, DirtyDegree, build_complex, homology, mcyc_words
from .invariant_ops import OP_SPACE, OPS, apply_op, bv_chain_sign, bv_delta, coordinates, product_table, theta_one
from .presentation_io import PresentationError, format_element, load_presentation, parse_element
from .sft_operations import attach_h20, build_h1, check_master, validate_user_h

MACHINE_KEYS = """machine format: one record per line, tab-separated key/value pairs
  record=validate   check, status (ok|fail), residual
  record=homology   space, maxlen, degree, dim, rep (one record per representative: index, rep)
  record=dirty      space, maxlen, degree
  record=product    op, maxlen, x, y, value
  record=bv         maxlen, x, value, chain_sign
"""


class InputError(Exception):
    pass


@dataclass
class Report:
    """Ordered report records; rendered as text or tab-separated lines."""

    records: list = field(default_factory=list)
    failed: bool = False

    def add(self, kind: str, **fields) -> None:
        self.records.append((kind, fields))

    def render(self, fmt: str) -> str:
        lines = []
        for kind, fields in self.records:
            if fmt == "machine":
                parts = ["record", kind]
                for k, v in fields.items():
                    parts += [k, str(v)]
                lines.append("\t".join(parts))
            else:
                lines.append(_text_line(kind, fields))
        return "\n".join(lines) + ("\n" if lines else "")


def _text_line(kind: str, f: dict) -> str:
    if kind == "validate":
        tail = "" if f["status"] == "ok" else f"  residual: {f['residual']}"
        return f"{f['check']:<24} {f['status']}{tail}"
    if kind == "homology":
        return f"H_{f['degree']:<4} {f['space']} dim {f['dim']}  (maxlen {f['maxlen']})"
    if kind == "rep":
        return f"    [{f['index']}] {f['rep']}"
    if kind == "dirty":
        return f"H_{f['degree']:<4} {f['space']} refused: not closed at maxlen {f['maxlen']}"
    if kind == "product":
        return f"{f['x']}  {f['op']}  {f['y']}  =  {f['value']}   (maxlen {f['maxlen']})"
    if kind == "bv":
        return f"Delta {f['x']}  =  {f['value']}   (maxlen {f['maxlen']})"
    if kind == "note":
        return f["text"]
    return f"{kind}: {f}"


# -- input --------------------------------------------------------------
def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("legsft") / "data" / path
    if bundled.is_file():
        return Path(str(bundled))
    raise InputError(f"{path}: no such file (bundled inputs: unknot.dga, unknot_n3.dga)")


def _degrees(text: str):
    try:
        a, b = text.split("..")
        return int(a), int(b)
    except ValueError:
        raise InputError(f"--degrees expects a..b, got {text!r}") from None


def _load(args):
    try:
        pf = load_presentation(_resolve(args.file))
    except PresentationError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    return pf


def _context(pf, check=True):
    try:
        return DifferentialContext.build(pf.presentation, check=check)
    except PresentationInvalid as exc:
        raise InputError(str(exc)) from None


def _hamiltonians(pf, qmax: int, need_h20: bool):
    pres = pf.presentation
    ham = build_h1(pres, max(qmax, 2))
    if (2, 0) in pf.hamiltonians:
        el, line = pf.hamiltonians[(2, 0)]
        try:
            attach_h20(pres, ham, el)
        except AlgebraError as exc:
            raise InputError(f"line {line}: {exc}") from None
    elif need_h20:
        raise InputError("this command needs an 'H 2 0 = ...' directive")
    for (p, q), (el, line) in pf.hamiltonians.items():
        if (p, q) != (2, 0):
            try:
                ham.user_higher[(p, q)] = validate_user_h(pres, p, q, el)
            except AlgebraError as exc:
                raise InputError(f"line {line}: {exc}") from None
    return ham


def _render(pres, el, theta: str) -> str:
    if theta == "one":
        el = theta_one(pres, el)
    return format_element(el)


def _fmt_coords(coords: dict, names: dict) -> str:
    if isinstance(coords, str):
        return f"refused ({coords})"
    if not coords:
        return "0"
    out = []
    for k in sorted(coords):
        c = coords[k]
        mag = abs(c)
        term = names.get(k, str(k)) if mag == 1 else f"{mag} * {names.get(k, k)}"
        out.append(("- " if c < 0 else "+ ") + term)
    s = " ".join(out)
    return s[2:] if s.startswith("+ ") else s


# -- commands -----------------------------------------------------------
def cmd_validate(args, rep: Report) -> None:
    pf = _load(args)
    pres = pf.presentation
    bad = check_d_squared(pres)
    rep.add("validate", check="d^2 = 0 on A", status="fail" if bad else "ok",
            residual="; ".join(f"d(d {k}) = {format_element(v)}" for k, v in bad.items()))
    if bad:
        rep.failed = True
        return
    dm_bad = []
    for k in mcyc_words(pres, min(args.maxlen, 6)):
        el = Element({k: Fraction(1)}, "M_cyc")
        if d_M(pres, d_M(pres, el)):
            dm_bad.append(format_element(el))
    rep.add("validate", check=f"d_M^2 = 0 (maxlen {min(args.maxlen, 6)})", status="fail" if dm_bad else "ok",
            residual=", ".join(dm_bad[:3]))
    rep.failed |= bool(dm_bad)
    ham = _hamiltonians(pf, args.qmax, need_h20=False)
    for label, res in check_master(pres, ham, args.qmax).items():
        rep.add("validate", check=label, status="fail" if res else "ok", residual=format_element(res))
        rep.failed |= bool(res)


def _homology_records(ctx, space, maxlen, window, theta, rep: Report):
    c = build_complex(ctx, space, maxlen, window)
    clean = [d for d in range(window[0], window[1] + 1) if d not in c.dirty]
    h = homology(c, clean)
    for d in range(window[0], window[1] + 1):
        if d in c.dirty:
            rep.add("dirty", space=space, maxlen=maxlen, degree=d)
            rep.failed = True
            continue
        rep.add("homology", space=space, maxlen=maxlen, degree=d, dim=h.dims[d])
        for i, el in enumerate(h.rep_elements(d)):
            rep.add("rep", space=space, maxlen=maxlen, degree=d, index=i,
                    rep=_render(ctx.presentation, el, theta if space == "mbal" else "explicit"))
    return c, h


def cmd_homology(args, rep: Report) -> None:
    pf = _load(args)
    ctx = _context(pf)
    _homology_records(ctx, args.space, args.maxlen, _degrees(args.degrees), args.theta, rep)


def _names(pres, h, theta):
    return {(d, i): _render(pres, el, theta) for d in h.dims for i, el in enumerate(h.rep_elements(d))}


def cmd_product(args, rep: Report) -> None:
    pf = _load(args)
    ctx = _context(pf)
    pres = pf.presentation
    op = args.op
    ham = _hamiltonians(pf, 2, need_h20=op != "diamond")
    space = OP_SPACE[op]
    window = _degrees(args.degrees)
    c = build_complex(ctx, space, args.maxlen, window)
    h = homology(c, [d for d in range(window[0], window[1] + 1) if d not in c.dirty])
    names = _names(pres, h, args.theta)
    if args.x is not None or args.y is not None:
        if args.x is None or args.y is None:
            raise InputError("--x and --y go together")
        tag = c.element(0, {}).space
        try:
            x = parse_element(args.x, pres, tag)
            y = parse_element(args.y, pres, tag)
        except PresentationError as exc:
            raise InputError(str(exc)) from None
        z = apply_op(op, pres, ham, x, y)
        try:
            value = _fmt_coords(coordinates(z, c, h), names) if z else "0"
        except AlgebraError as exc:
            value = f"{_render(pres, z, args.theta)}  (chain level; {exc})"
        rep.add("product", op=op, maxlen=args.maxlen, x=_render(pres, x, args.theta),
                y=_render(pres, y, args.theta), value=value)
        return
    table = product_table(op, pres, ham, c, h, args.genlen)
    for (a, b), v in sorted(table.entries.items()):
        rep.add("product", op=op, maxlen=args.maxlen, x=names[table.labels[a]], y=names[table.labels[b]],
                value=_fmt_coords(v, names))


def cmd_bv(args, rep: Report) -> None:
    pf = _load(args)
    ctx = _context(pf)
    pres = pf.presentation
    window = _degrees(args.degrees)
    c = build_complex(ctx, "mcyc", args.maxlen, window)
    h = homology(c, [d for d in range(window[0], window[1] + 1) if d not in c.dirty])
    names = _names(pres, h, "explicit")
    sign = bv_chain_sign(c)
    for d in sorted(h.dims):
        for i, el in enumerate(h.rep_elements(d)):
            z = bv_delta(pres, el)
            try:
                value = _fmt_coords(coordinates(z, c, h), names) if z else "0"
            except AlgebraError as exc:
                value = f"refused ({exc})"
            rep.add("bv", maxlen=args.maxlen, x=names[(d, i)], value=value,
                    chain_sign="none" if sign is None else f"{sign:+d}")


def cmd_report(args, rep: Report) -> None:
    rep.add("note", text="# validation")
    cmd_validate(args, rep)
    pf = _load(args)
    ctx = _context(pf)
    for space in ("mcyc", "mbal"):
        rep.add("note", text=f"# homology {space}")
        lo, hi = _degrees(args.degrees)
        shift = 2 - pf.presentation.n if space == "mbal" else 0
        try:
            _homology_records(ctx, space, args.maxlen, (lo + shift, hi + shift), args.theta, rep)
        except DirtyDegree as exc:
            rep.add("note", text=str(exc))
    if (2, 0) in pf.hamiltonians:
        rep.add("note", text="# product boxtimes")
        args.op, args.x, args.y = "boxtimes", None, None
        cmd_product(args, rep)
    rep.add("note", text="# BV operator")
    cmd_bv(args, rep)


COMMANDS = {"validate": cmd_validate, "homology": cmd_homology, "product": cmd_product,
            "bv": cmd_bv, "report": cmd_report}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="presentation file (or a bundled name such as unknot.dga)")
    common.add_argument("--maxlen", type=int, default=8, help="word-length cutoff (basepoints not counted)")
    common.add_argument("--degrees", default="0..8", help="degree window a..b")
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--theta", choices=("one", "explicit"), default="one",
                        help="render M^bal classes with theta = hbar^-1 sigma^-1 set to 1")
    common.add_argument("--qmax", type=int, default=3, help="highest q for the identities I_q")
    p = argparse.ArgumentParser(prog="legsft", description=__doc__, epilog=MACHINE_KEYS,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="d^2 = 0, d_M^2 = 0 and the master equations")
    h = sub.add_parser("homology", parents=[common], help="homology with representatives")
    h.add_argument("--space", choices=SPACES, default="mcyc")
    pr = sub.add_parser("product", parents=[common], help="product tables or single products")
    pr.add_argument("--op", choices=OPS, default="boxtimes")
    pr.add_argument("--table", action="store_true", help="pairwise table over homology generators (default)")
    pr.add_argument("--x", help="first factor (element syntax)")
    pr.add_argument("--y", help="second factor (element syntax)")
    pr.add_argument("--genlen", type=int, default=None, help="only generators of at most this length")
    b = sub.add_parser("bv", parents=[common], help="the BV-operator on homology generators")
    b.add_argument("--table", action="store_true", help="table over homology generators (default)")
    r = sub.add_parser("report", parents=[common], help="everything above in one document")
    r.add_argument("--genlen", type=int, default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    rep = Report()
    try:
        COMMANDS[args.command](args, rep)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DirtyDegree, ComplexTooLarge) as exc:
        sys.stdout.write(rep.render(args.format))
        print(f"refused: {exc}", file=sys.stderr)
        return 1
    except AlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(rep.render(args.format))
    return 1 if rep.failed else 0


if __name__ == "__main__":
    sys.exit(main())
