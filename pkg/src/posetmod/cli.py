"""Command line front end.

Exit codes: 0 success, 1 validation failure (witness on stderr), 2 usage
error.  Outputs are deterministic for fixed inputs and seeds.
"""

from __future__ import annotations

import argparse
import sys

from . import io
from .encoding import SubdivisionError, isotypic_partition, uptight_encoding, verify_constant_subdivision
from .field import QQ, Field
from .filtration import FiltrationError, check_filtration, natural_encoding, persistent_homology
from .fringe import check_fringe, downset_resolution, fringe_presentation, materialize, upset_resolution
from .lattice import FinDetRegion
from .module import CommutativityError, FinDetModule
from .oracle import CapExceeded, oracle_hom
from .poset import CycleError, PosetRegion, hom_indicator
from .primary import DecompositionError, primary_decomposition


class Failure(Exception):
    """Validation failure reported with exit code 1."""

    def __init__(self, msg, witness=None):
        self.witness = witness
        super().__init__(msg)


def _field(args, default=None) -> Field:
    if args.field:
        try:
            return Field.from_name(args.field)
        except ValueError as exc:
            raise SystemExit(_usage(str(exc)))
    return default or QQ


def _usage(msg) -> int:
    print(f"usage error: {msg}", file=sys.stderr)
    return 2


def _load(path):
    try:
        return io.load_path(path)
    except FileNotFoundError:
        raise SystemExit(_usage(f"no such file {path}"))


def _write(args, payload):
    text = io.dumps(payload) if not isinstance(payload, str) else payload
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _with_field(d, args):
    if args.field and isinstance(d, dict):
        d = dict(d)
        d["field"] = args.field
    return d


def _load_module_or_encoding(args):
    """(module, encoding or None) from a module or encoding JSON file."""
    d = _with_field(_load(args.input), args)
    if "pi" in d and "H" in d:
        if args.field:
            d["H"] = _with_field(d["H"], args)
        enc = io.encoding_from_json(d)
        return enc.witness.target, enc
    return io.module_from_json(d), None


# subcommands


def cmd_phom(args):
    fil = io.filtration_from_json(_load(args.input))
    if args.encoding:
        enc = natural_encoding(fil, args.dim, _field(args), args.box_margin)
        _write(args, io.encoding_to_json(enc))
        return
    m = persistent_homology(fil, args.dim, _field(args), args.box_margin)
    _write(args, io.module_to_json(m))


def cmd_encode(args):
    m = io.module_from_json(_with_field(_load(args.input), args))
    if args.partition:
        part = io.partition_from_json(_load(args.partition), m.poset)
    else:
        part = isotypic_partition(m)
    try:
        s = verify_constant_subdivision(m, part)
    except SubdivisionError as exc:
        if args.partition:
            raise Failure(f"not a constant subdivision: {exc.reason}", exc.witness)
        s = verify_constant_subdivision(m, [[i] for i in range(len(m.poset))])
    enc = uptight_encoding(m, s)
    if not enc.verify():
        raise Failure("encoding witness is not an isomorphism")
    _write(args, io.encoding_to_json(enc))


def cmd_resolve(args):
    m, enc = _load_module_or_encoding(args)
    res = (upset_resolution if args.side == "upset" else downset_resolution)(m, enc, args.box_margin)
    if not res.is_exact():
        raise Failure("resolution is not exact")
    out = {"side": res.side, "field": m.field.name, "terms": [], "differentials": []}
    for t, labs in zip(res.terms, res.labels):
        out["terms"].append([{"region": _region_json(r), "label": io.label_to_json(lab)} for r, lab in zip(t, labs)])
    for k, mat in enumerate(res.matrices):
        src, tgt = (k + 1, k) if res.side == "upset" else (k, k + 1)
        out["differentials"].append({"source": src, "target": tgt,
                                     "entries": io._entries_to_json(m.field, mat)})
    _write(args, out)


def _region_json(r: PosetRegion):
    b = io._as_box_region(r)
    return io.box_region_to_json(b) if b is not None else io.region_to_json(r)


def cmd_fringe(args):
    m, enc = _load_module_or_encoding(args)
    phi = fringe_presentation(m, enc, args.box_margin)
    chk = check_fringe(phi, m, seed=args.seed)
    if not chk:
        raise Failure(f"fringe presentation failed: {chk.reason}", chk.witness)
    _write(args, io.fringe_to_json(phi))


def cmd_primary(args):
    m = io.module_from_json(_with_field(_load(args.input), args))
    if not isinstance(m, FinDetModule):
        raise SystemExit(_usage("primary needs a module on an integer box"))
    dec = primary_decomposition(m)
    _write(args, io.decomposition_to_json(dec))


def _as_poset_region(r):
    return io.box_region_as_poset_region(r) if isinstance(r, FinDetRegion) else r


def cmd_hom(args):
    if args.upset or args.downset:
        if not (args.upset and args.downset):
            raise SystemExit(_usage("--upset and --downset go together"))
        u = _as_poset_region(io.region_from_json(_load(args.upset)))
        d = _as_poset_region(io.region_from_json(_load(args.downset), u.poset))
        if isinstance(u, PosetRegion) and u.poset != d.poset:
            if u.poset.elements and isinstance(u.poset.elements[0], tuple):
                u, d = _common_box(u, d)
            else:
                raise Failure("upset and downset live on different posets")
        u = PosetRegion(u.poset, u.mask, "upset")
        d = PosetRegion(d.poset, d.mask, "downset")
        _write(args, f"{len(hom_indicator(u, d))}\n")
        return
    if not (args.source and args.target):
        raise SystemExit(_usage("give --upset/--downset or two module files"))
    f = _field(args)
    a = io.module_from_json(_load(args.source), field=f if args.field else None)
    b = io.module_from_json(_load(args.target), field=a.field)
    if a.poset != b.poset:
        raise Failure("modules live on different carriers")
    _write(args, f"{oracle_hom(a, b)}\n")


def _common_box(u, d):
    ru = FinDetRegion(*_box_of(u), u.mask.reshape(_shape(u)), u.kind, check=False)
    rd = FinDetRegion(*_box_of(d), d.mask.reshape(_shape(d)), d.kind, check=False)
    lo = tuple(min(a, b) for a, b in zip(ru.lo, rd.lo))
    hi = tuple(max(a, b) for a, b in zip(ru.hi, rd.hi))
    return io.box_region_as_poset_region(ru.resample(lo, hi)), io.box_region_as_poset_region(rd.resample(lo, hi))


def _box_of(r):
    els = r.poset.elements
    n = len(els[0])
    return tuple(min(e[k] for e in els) for k in range(n)), tuple(max(e[k] for e in els) for k in range(n))


def _shape(r):
    lo, hi = _box_of(r)
    return tuple(b - a + 1 for a, b in zip(lo, hi))


def cmd_verify(args):
    d = _load(args.input)
    if not isinstance(d, dict):
        raise io.FormatError("$", "expected an object")
    if "simplices" in d:
        check_filtration(io.filtration_from_json(d))
        kind = "filtration"
    elif "pi" in d and "H" in d:
        io.encoding_from_json(d)
        kind = "encoding"
    elif "source" in d and "comps" in d:
        io.morphism_from_json(d)
        kind = "morphism"
    elif "entries" in d and d.get("rows") and "b" in d["rows"][0]:
        io.monomial_matrix_from_json(d)
        kind = "monomial matrix"
    elif "entries" in d:
        phi = io.fringe_from_json(d)
        bad = next(((p, q) for p, q in phi.nonzero() if not (phi.rows[p] & phi.cols[q])), None)
        if bad is not None:
            raise Failure("support rule violated", bad)
        if phi.rows or phi.cols:
            materialize(phi.rows, phi.cols, phi.entries, phi.field).check()
        kind = "fringe presentation"
    elif "dims" in d:
        io.module_from_json(d)
        kind = "module"
    elif "elements" in d:
        io.poset_from_json(d)
        kind = "poset"
    elif "members" in d or "cells" in d:
        io.region_from_json(d)
        kind = "region"
    else:
        raise io.FormatError("$", "unrecognised document")
    _write(args, f"ok {kind}\n")


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="accepted for interface stability; runs single threaded")
    common.add_argument("--field", default=None, help="q (rationals, default) or p:PRIME")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--box-margin", type=int, default=1, help="layers added below the box of critical degrees")
    common.add_argument("-o", "--output", default=None, help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="posetmod", description="Modules over posets: encodings, "
                                "presentations, resolutions, primary decomposition.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("phom", parents=[common], help="persistent homology of a multifiltration")
    s.add_argument("input")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--encoding", action="store_true", help="emit the subcomplex encoding instead of the box module")
    s.set_defaults(func=cmd_phom)

    s = sub.add_parser("encode", parents=[common], help="uptight encoding of a module")
    s.add_argument("input")
    s.add_argument("--partition", default=None, help="constant subdivision as a list of blocks")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("resolve", parents=[common], help="upset or downset resolution")
    s.add_argument("input", help="module or encoding JSON")
    s.add_argument("--side", choices=["upset", "downset"], required=True)
    s.set_defaults(func=cmd_resolve)

    s = sub.add_parser("fringe", parents=[common], help="fringe presentation")
    s.add_argument("input", help="module or encoding JSON")
    s.set_defaults(func=cmd_fringe)

    s = sub.add_parser("primary", parents=[common], help="primary decomposition of a box module")
    s.add_argument("input")
    s.set_defaults(func=cmd_primary)

    s = sub.add_parser("hom", parents=[common], help="Hom dimension")
    s.add_argument("source", nargs="?", help="module JSON")
    s.add_argument("target", nargs="?", help="module JSON")
    s.add_argument("--upset", default=None, help="region JSON")
    s.add_argument("--downset", default=None, help="region JSON")
    s.set_defaults(func=cmd_hom)

    s = sub.add_parser("verify", parents=[common], help="validate any JSON document")
    s.add_argument("input")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.witness is not None:
            print(f"witness: {exc.witness!r}", file=sys.stderr)
        return 1
    except CommutativityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"witness: {exc.witness!r}", file=sys.stderr)
        return 1
    except io.FormatError as exc:
        print(f"error: malformed input at {exc}", file=sys.stderr)
        return 1
    except (SubdivisionError, DecompositionError, FiltrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"witness: {exc.witness!r}", file=sys.stderr)
        return 1
    except CycleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"witness: {exc.cycle!r}", file=sys.stderr)
        return 1
    except (CapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
