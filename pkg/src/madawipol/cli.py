"""Command-line interface.

Exit codes: 0 for an affirmative verdict, 1 for a negative domain verdict
(doesn't fit, doesn't unify, untranslatable, config has violations), 2 for
usage and input errors.  `--json` switches any subcommand to a single JSON
object on stdout.

The working config comes from --config, else the MADAWIPOL_CONFIG environment
variable, else the built-in standard library.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .assembly import ArityMismatch, Unjoinable, translate_ads
from .forms import (
    InvalidConfig,
    UnmappedTypeConstructor,
    default_config,
    female_joint_form,
    load_config,
    male_fits_female,
    male_joint_form,
    type_form,
    validate_config,
)
from .render import CutPlane, cross_section_svg, mesh_export
from .textlang import TextLangError, parse_ads, parse_type, print_ads, print_type
from .typesys import UnknownConstructor, alpha_normalize, unify_fresh

ENV_CONFIG = "MADAWIPOL_CONFIG"


class _UsageError(Exception):
    pass


def _load_config(args):
    path = getattr(args, "config", None) or os.environ.get(ENV_CONFIG)
    if path is None:
        return default_config()
    try:
        return load_config(path)
    except (OSError, ValueError, InvalidConfig) as exc:
        raise _UsageError(f"cannot load config {path}: {exc}") from exc


def _parse_type_arg(text: str):
    try:
        return parse_type(text)
    except TextLangError as exc:
        raise _UsageError(f"bad type {text!r}: {exc}") from exc


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(human + "\n")


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


# -- subcommands -----------------------------------------------------------------

def _cmd_check_config(args) -> int:
    config = _load_config(args)
    violations = validate_config(config)
    payload = {
        "valid": not violations,
        "violations": [
            {"kind": v.kind, "subject": v.subject, "detail": v.detail}
            for v in violations
        ],
    }
    if violations:
        lines = [f"{v.kind}: {v.subject}: {v.detail}" for v in violations]
        _emit(args, payload, "\n".join(lines))
        return 1
    _emit(args, payload, "config ok")
    return 0


def _cmd_typeform(args) -> int:
    config = _load_config(args)
    t = _parse_type_arg(args.type)
    try:
        form = type_form(config, t)
    except (UnknownConstructor, UnmappedTypeConstructor) as exc:
        raise _UsageError(str(exc)) from exc
    poly = None
    if form.poly is not None:
        tr = form.poly.arg_transform
        poly = {
            "surfaceArea": _frac(form.poly.surface.area()),
            "transform": [_frac(v) for v in (tr.a, tr.b, tr.c, tr.d)],
        }
    payload = {
        "type": print_type(alpha_normalize(t)),
        "rigidArea": _frac(form.rigid.area()),
        "rigidRings": len(form.rigid.rings),
        "poly": poly,
    }
    human = [f"type:       {payload['type']}",
             f"rigid area: {payload['rigidArea']} ({payload['rigidRings']} rings)"]
    if poly is None:
        human.append("poly:       none (ground type)")
    else:
        human.append(f"poly:       surface area {poly['surfaceArea']}, "
                     f"transform {poly['transform']}")
    _emit(args, payload, "\n".join(human))
    return 0


def _cmd_fit(args) -> int:
    config = _load_config(args)
    male = _parse_type_arg(args.male)
    female = _parse_type_arg(args.female)
    try:
        fits = male_fits_female(config, type_form(config, male),
                                type_form(config, female))
    except (UnknownConstructor, UnmappedTypeConstructor) as exc:
        raise _UsageError(str(exc)) from exc
    payload = {
        "male": print_type(alpha_normalize(male)),
        "female": print_type(alpha_normalize(female)),
        "fits": fits,
    }
    _emit(args, payload, "fits" if fits else "does-not-fit")
    return 0 if fits else 1


def _cmd_unify(args) -> int:
    left = _parse_type_arg(args.left)
    right = _parse_type_arg(args.right)
    subst = unify_fresh(left, right)
    payload = {
        "left": print_type(left),
        "right": print_type(right),
        "unifiable": subst is not None,
        "unifier": None if subst is None
        else {var: print_type(t) for var, t in sorted(subst.items())},
    }
    if subst is None:
        _emit(args, payload, "NOT-UNIFIABLE")
        return 1
    lines = [f"{var} := {print_type(t)}" for var, t in sorted(subst.items())]
    _emit(args, payload, "\n".join(lines) if lines else "unifiable (no bindings)")
    return 0


def _cmd_translate(args) -> int:
    config = _load_config(args)
    try:
        term = parse_ads(args.ads)
    except TextLangError as exc:
        raise _UsageError(f"bad term: {exc}") from exc
    try:
        outcome = translate_ads(config, term)
    except (UnknownConstructor, ArityMismatch) as exc:
        raise _UsageError(str(exc)) from exc
    if isinstance(outcome, Unjoinable):
        payload = {
            "translated": False,
            "maleType": outcome.male_type,
            "femaleType": outcome.female_type,
            "at": outcome.at,
        }
        _emit(args, payload,
              f"UNJOINABLE: {outcome.at}: male {outcome.male_type} "
              f"vs female {outcome.female_type}")
        return 1
    snap = outcome.snapshot()
    terms = [print_ads(t) for t in outcome.read_back()]
    payload = {"translated": True, "terms": terms, **snap}
    human = [f"term:      {terms[0] if terms else '(empty)'}",
             f"instances: {len(snap['instances'])}",
             f"joins:     {len(snap['joins'])}"]
    for ref in sorted(snap["jointTypes"]):
        human.append(f"  {ref}: {snap['jointTypes'][ref]}")
    _emit(args, payload, "\n".join(human))
    return 0


def _cmd_render(args) -> int:
    config = _load_config(args)
    if (args.type is None) == (args.ads is None):
        raise _UsageError("give exactly one of --type or --ads")
    if args.type is not None:
        t = _parse_type_arg(args.type)
        try:
            form = type_form(config, t)
        except (UnknownConstructor, UnmappedTypeConstructor) as exc:
            raise _UsageError(str(exc)) from exc
        joint = (male_joint_form(config, form) if args.gender == "male"
                 else female_joint_form(config, form))
        if args.format == "svg":
            out = cross_section_svg(config, joint, CutPlane("y", Fraction(0)))
        else:
            out = mesh_export(joint)
    else:
        if args.format == "obj":
            raise _UsageError("obj export works on joint forms; use --type")
        try:
            term = parse_ads(args.ads)
        except TextLangError as exc:
            raise _UsageError(f"bad term: {exc}") from exc
        try:
            outcome = translate_ads(config, term)
        except (UnknownConstructor, ArityMismatch) as exc:
            raise _UsageError(str(exc)) from exc
        if isinstance(outcome, Unjoinable):
            sys.stderr.write(f"UNJOINABLE: {outcome.at}\n")
            return 1
        out = cross_section_svg(config, outcome)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    configs = None
    config_path = getattr(args, "config", None) or os.environ.get(ENV_CONFIG)
    if config_path:
        try:
            configs = {"custom": load_config(config_path)}
        except (OSError, ValueError, InvalidConfig) as exc:
            raise _UsageError(f"cannot load config {config_path}: {exc}") from exc
    serve(host=args.host, port=args.port, configs=configs)
    return 0


# -- wiring ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="madawipol",
        description="Types as blocks: compile data types to joint forms, "
                    "fit them, and assemble them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="path to a config JSON file "
                       f"(default: ${ENV_CONFIG} or the built-in library)")
        p.add_argument("--json", action="store_true", help="emit JSON")

    p = sub.add_parser("check-config", help="validate a config")
    common(p)
    p.set_defaults(func=_cmd_check_config)

    p = sub.add_parser("typeform", help="show the form a type compiles to")
    p.add_argument("type")
    common(p)
    p.set_defaults(func=_cmd_typeform)

    p = sub.add_parser("fit", help="does the male joint fit the female joint?")
    p.add_argument("--male", required=True, help="type of the male joint")
    p.add_argument("--female", required=True, help="type of the female joint")
    common(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("unify", help="do two types unify (fresh variables)?")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--json", action="store_true", help="emit JSON")
    p.set_defaults(func=_cmd_unify)

    p = sub.add_parser("translate", help="translate a term into an assembly")
    p.add_argument("--ads", required=True, help="the term, e.g. 'Cons True Nil'")
    common(p)
    p.set_defaults(func=_cmd_translate)

    p = sub.add_parser("render", help="render a joint form or an assembly")
    p.add_argument("--type", help="render this type's joint form")
    p.add_argument("--gender", choices=["male", "female"], default="male")
    p.add_argument("--ads", help="render the assembly of this term")
    p.add_argument("--format", choices=["svg", "obj"], default="svg")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_render, json=False)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--config")
    p.set_defaults(func=_cmd_serve, json=False)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
