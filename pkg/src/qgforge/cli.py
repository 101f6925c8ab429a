"""Command-line interface.

Every subcommand prints a human report by default and a structured one with
``--json``. Exit codes: 0 success, 1 verification failures, 2 input or
validation errors, 3 capacity limits or exhausted search budgets.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .core import ElementSubset, FiniteMagma, is_left_quasigroup, is_right_quasigroup, one_sided_units
from .errors import CapacityError, ConsistencyError, PreconditionError, QGError, SearchExhausted
from .formats import canonical_json, format_magma_json, format_magma_text, load_factors, load_magma
from .identities import DEFAULT_N4_MAX_ORDER, run_identities, select_identities
from .products import (
    SkewFactors,
    SmashFactors,
    direct_product,
    probe_columns,
    skew_smashed_product,
    smashed_product,
    validate_skew_factors,
)
from .search import TARGETS, SearchTask, count_latin_squares, replay_witness, run_search
from .structure import fan_certificate, is_normal, quotient, structure_report

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


def _emit(args, doc: dict, text: str) -> None:
    if args.json:
        print(canonical_json({"schema_version": SCHEMA_VERSION, "command": args.command, **doc}))
    else:
        print(text.rstrip("\n"))


def _write_magma(path: Optional[str], m: FiniteMagma, metadata: dict, text_format: bool = False) -> None:
    if path is None:
        return
    body = format_magma_text(m) if text_format else format_magma_json(m, metadata=metadata)
    Path(path).write_text(body, encoding="utf-8")


def _fmt_set(xs) -> str:
    return "{" + ", ".join(str(x) for x in xs) + "}"


def _parse_elements(spec: str) -> list[int]:
    try:
        return [int(x) for x in spec.replace(" ", "").split(",") if x]
    except ValueError:
        raise PreconditionError(f"bad element list {spec!r}") from None


# -- subcommands ---------------------------------------------------------------

def cmd_analyze(args) -> int:
    m = load_magma(args.magma).magma
    rep = structure_report(m)
    cert = fan_certificate(m, rep)
    lu, ru = one_sided_units(m)
    doc = {
        "order": m.order,
        "left_quasigroup": is_left_quasigroup(m),
        "right_quasigroup": is_right_quasigroup(m),
        "unit": m.unit,
        "left_units": lu,
        "right_units": ru,
        "associative": m.is_associative(),
        "commutant": rep.com.sorted(),
        "left_nucleus": rep.n_l.sorted(),
        "middle_nucleus": rep.n_m.sorted(),
        "right_nucleus": rep.n_r.sorted(),
        "nucleus": rep.nucleus.sorted(),
        "center": rep.center.sorted(),
        "fan_quasigroup": cert is not None,
        "fan": cert.fan.sorted() if cert else None,
        "fan_normal": is_normal(m, cert.fan) if cert else None,
    }
    lines = [f"order {m.order}"]
    for key, val in doc.items():
        if key == "order":
            continue
        lines.append(f"{key:16} {_fmt_set(val) if isinstance(val, list) else val}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_product(args) -> int:
    mags = [load_magma(p).magma for p in args.magmas]
    m = direct_product(mags, max_order=args.max_order)
    meta = {"operation": "product", "inputs": [str(p) for p in args.magmas]}
    _write_magma(args.output, m, meta)
    doc = {"order": m.order, "factors": [x.order for x in mags], "output": args.output}
    if args.output is None:
        doc["table"] = m.rows()
        text = format_magma_text(m)
    else:
        text = f"order {m.order} product written to {args.output}"
    _emit(args, doc, text)
    return EXIT_OK


def _load_ab(args) -> tuple[FiniteMagma, FiniteMagma]:
    return load_magma(args.a).magma, load_magma(args.b).magma


def cmd_smash(args) -> int:
    A, B = _load_ab(args)
    f = load_factors(args.factors)
    if not isinstance(f, SmashFactors):
        raise PreconditionError("smash needs a factors file of kind 'smash'")
    m = smashed_product(A, B, f)
    probe = probe_columns(m, B.order)
    meta = {"operation": "smash", "inputs": [args.a, args.b], "factors": args.factors}
    _write_magma(args.output, m, meta)
    doc = {"order": m.order, "left_quasigroup": True, "probe": probe.to_dict(), "output": args.output}
    if args.output is None:
        doc["table"] = m.rows()
    lines = [f"order {m.order} left quasigroup",
             "right quasigroup" if probe.is_right_quasigroup else
             f"not a right quasigroup: column {tuple(probe.column)} hits {tuple(probe.target)} "
             f"{len(probe.solutions)} times"]
    if args.output is None:
        lines.append(format_magma_text(m))
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_skew_smash(args) -> int:
    A, B = _load_ab(args)
    f = load_factors(args.factors)
    if not isinstance(f, SkewFactors):
        raise PreconditionError("skew-smash needs a factors file of kind 'skew'")
    rep = validate_skew_factors(A, B, f)
    if not rep.ok:
        doc = {"valid": False, "validation": rep.to_dict()}
        lines = ["skew factors rejected"] + [
            f"  condition {v.equation} at {v.args}: expected {v.expected}, got {v.got}" for v in rep.violations]
        _emit(args, doc, "\n".join(lines))
        return EXIT_INPUT
    sp = skew_smashed_product(A, B, f)
    m = sp.magma
    meta = {"operation": "skew-smash", "inputs": [args.a, args.b], "factors": args.factors}
    _write_magma(args.output, m, meta)
    doc = {"valid": True, "order": m.order, "unit": m.unit, "fan": sp.certificate.fan.sorted(),
           "nucleus": sp.certificate.nucleus.sorted(), "nn_subgroup": sp.nn_subgroup.sorted(),
           "output": args.output}
    if args.output is None:
        doc["table"] = m.rows()
    lines = [f"order {m.order} fan quasigroup, unit {m.unit}",
             f"fan {_fmt_set(doc['fan'])}", f"nucleus {_fmt_set(doc['nucleus'])}"]
    if args.output is None:
        lines.append(format_magma_text(m))
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_quotient(args) -> int:
    m = load_magma(args.magma).magma
    elems = _parse_elements(args.subgroup)
    if any(not 0 <= x < m.order for x in elems):
        raise PreconditionError(f"subgroup elements must lie in 0..{m.order - 1}")
    q = quotient(m, ElementSubset.of(m.order, elems))
    meta = {"operation": "quotient", "inputs": [args.magma], "subgroup": sorted(set(elems))}
    _write_magma(args.output, q.quotient, meta)
    doc = {"order": q.quotient.order, "cosets": [list(c) for c in q.cosets],
           "projection": list(q.projection), "table": q.quotient.rows(), "output": args.output}
    lines = [f"quotient of order {q.quotient.order}"]
    lines += [f"  coset {i}: {_fmt_set(c)}" for i, c in enumerate(q.cosets)]
    lines.append(format_magma_text(q.quotient))
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    m = load_magma(args.magma).magma
    ids = select_identities(args.identities)
    cert = fan_certificate(m)
    basics = {"80a", "80b", "81a", "81b"}
    problems = []
    if cert is None and any(i not in basics for i in ids):
        problems.append("not a fan quasigroup; only identities 80-81 were run")
        ids = [i for i in ids if i in basics]
    reports = run_identities(m, cert, ids, n4_max_order=args.n4_max_order)
    failed = [r for r in reports if r.failure_count]
    doc = {"order": m.order, "fan_quasigroup": cert is not None, "problems": problems,
           "failed": [r.identity_id for r in failed], "reports": [r.to_dict() for r in reports]}
    lines = [f"order {m.order}"] + problems
    for r in reports:
        if r.skipped:
            status = f"skipped ({r.skipped})"
        elif r.ok:
            status = "ok"
        else:
            status = f"FAIL {r.failure_count}/{r.domain_size}, first {r.failures[0]}"
        lines.append(f"  {r.identity_id:5} {status}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_FAIL if failed or problems else EXIT_OK


def cmd_search(args) -> int:
    task = SearchTask(target=args.target, seed=args.seed, budget=args.budget,
                      order_a=args.order_a, order_b=args.order_b, order_n=args.order_n)
    res = run_search(task)
    if res.found and args.output:
        Path(args.output).write_text(canonical_json(res.witness) + "\n", encoding="utf-8")
    doc = res.to_dict()
    if args.output:
        doc["witness_file"] = args.output
    lines = [f"{res.target}: {res.status} after {res.candidates_tried} candidates"]
    if res.note:
        lines.append(res.note)
    lines += [f"  rejected ({k}): {v}" for k, v in sorted(res.rejections.items())]
    if res.found and not args.output:
        lines.append(canonical_json(res.witness))
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if res.found else EXIT_CAPACITY


def cmd_census(args) -> int:
    count = count_latin_squares(args.order, reduced=args.reduced)
    doc = {"order": args.order, "reduced": args.reduced, "count": count}
    _emit(args, doc, str(count))
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        witness = json.loads(Path(args.witness).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"invalid witness JSON: {exc}") from None
    ok = replay_witness(witness)
    doc = {"target": witness.get("target"), "verified": ok}
    _emit(args, doc, f"{witness.get('target')}: {'verified' if ok else 'NOT verified'}")
    return EXIT_OK if ok else EXIT_FAIL


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")

    p = argparse.ArgumentParser(prog="qgforge", description="Finite quasigroup constructions and checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", parents=[common], help="nuclei, center, fan, one-sided units")
    s.add_argument("magma")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("product", parents=[common], help="direct product of magmas")
    s.add_argument("magmas", nargs="+")
    s.add_argument("-o", "--output")
    s.add_argument("--max-order", type=int, default=2048)
    s.set_defaults(func=cmd_product)

    for name, func, help_ in (("smash", cmd_smash, "smashed product (left quasigroup)"),
                              ("skew-smash", cmd_skew_smash, "skew smashed product (fan quasigroup)")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("a")
        s.add_argument("b")
        s.add_argument("--factors", required=True)
        s.add_argument("-o", "--output")
        s.set_defaults(func=func)

    s = sub.add_parser("quotient", parents=[common], help="quotient by a normal subgroup")
    s.add_argument("magma")
    s.add_argument("--subgroup", required=True, help="comma-separated elements, e.g. 0,2")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_quotient)

    s = sub.add_parser("verify", parents=[common], help="run the identity suite")
    s.add_argument("magma")
    s.add_argument("--identities", default=None, help="e.g. 70-79,82-94,60-65,80-81 (default all)")
    s.add_argument("--n4-max-order", type=int, default=DEFAULT_N4_MAX_ORDER,
                   help="skip four-variable identities above this order")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", parents=[common], help="seeded witness search")
    s.add_argument("--target", required=True, choices=TARGETS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=1000)
    s.add_argument("--order-a", type=int, default=3)
    s.add_argument("--order-b", type=int, default=3)
    s.add_argument("--order-n", type=int, default=None, help="order of the shared cyclic N")
    s.add_argument("-o", "--output", help="write the witness here")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("census", parents=[common], help="count Latin squares")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--reduced", action="store_true")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("replay", parents=[common], help="re-verify a search witness")
    s.add_argument("witness")
    s.set_defaults(func=cmd_replay)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CapacityError, SearchExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (PreconditionError, ConsistencyError, QGError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
