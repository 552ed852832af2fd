"""Command-line front end.

Every subcommand reads one JSON request from --input (a path, or - for
stdin) and prints one JSON document (default) or a text rendering.  The
JSON output is byte-deterministic: keys are sorted and no timestamps or
environment data are embedded.  --seed is echoed back untouched so runs
can be tagged; no randomness is used anywhere.

Exit codes:
    0   success (including a verify run whose checks fail: the report is
        the deliverable)
    2   precondition or resource-cap failure
    3   insufficient series precision
    4   malformed input: JSON, schema, or expression syntax
"""

from __future__ import annotations

import argparse
import json
import sys

from .completion import (
    DEFAULT_PRECISION,
    DiscreteSeriesPlace,
    series_element_residue,
    series_element_value,
    uniformize_discrete_rational,
)
from .errors import (
    InputError,
    InsufficientPrecisionError,
    PreconditionError,
    ResourceError,
)
from .expr import parse_series
from .fields import BaseField
from .jsonio import (
    _get,
    _need,
    _parse_rf,
    parse_order,
    parse_place,
    parse_presentation,
    parse_system,
    system_to_json,
)
from .polyfield import ratfun_str
from .series import series_str
from .uniformize import verify
from .valuation import (
    MonomialPlace,
    abhyankar_report,
    residue_of,
    value_of_ratfun,
)
from .valuegroup import perron_positive_basis
from .uniformize import uniformize_abhyankar
from fractions import Fraction


def _load(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise InputError("the request must be a JSON object")
    return doc


def _element_text(doc) -> str:
    return _need(_get(doc, "element", ""), str, "element", "an expression string")


def _is_series_literal(text: str) -> bool:
    return "O(" in text.replace(" ", "")


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (result dict, text rendering)


def _cmd_value(doc, args):
    place = parse_place(_get(doc, "place", ""), "place", args.precision)
    text = _element_text(doc)
    if isinstance(place, MonomialPlace):
        f = _parse_rf(text, place.base, place.ambient_names, "element")
        v = value_of_ratfun(place, f)
        result = {
            "value": str(v),
            "coordinates": [str(c) for c in v.coords],
        }
        return result, f"value = {v}"
    if _is_series_literal(text):
        s = parse_series(text, place.base, place.uniformizer)
        v = s.known_order()
    else:
        f = _parse_rf(text, place.base, place.ambient_names, "element")
        v = series_element_value(place, f)
    return {"value": v}, f"value = {v}"


def _cmd_residue(doc, args):
    place = parse_place(_get(doc, "place", ""), "place", args.precision)
    text = _element_text(doc)
    if isinstance(place, MonomialPlace):
        f = _parse_rf(text, place.base, place.ambient_names, "element")
        r = residue_of(place, f)
        return {"residue": str(r)}, f"residue = {r}"
    if _is_series_literal(text):
        s = parse_series(text, place.base, place.uniformizer)
        r = s.residue()
    else:
        f = _parse_rf(text, place.base, place.ambient_names, "element")
        r = series_element_residue(place, f)
    rendered = place.base.scalar_str(r)
    return {"residue": rendered}, f"residue = {rendered}"


def _cmd_perron(doc, args):
    from .errors import SchemaError

    order = parse_order(_get(doc, "order", ""), "order")
    alphas_doc = _need(_get(doc, "alphas", ""), list, "alphas", "a list")
    alphas = []
    for i, row in enumerate(alphas_doc):
        _need(row, list, f"alphas[{i}]", "a coordinate list")
        coords = []
        for k, c in enumerate(row):
            if not isinstance(c, (int, str)) or isinstance(c, bool):
                raise SchemaError("expected an integer or rational string", f"alphas[{i}][{k}]")
            try:
                coords.append(Fraction(str(c)))
            except (ValueError, ZeroDivisionError):
                raise SchemaError(f"bad rational {c!r}", f"alphas[{i}][{k}]") from None
        alphas.append(order.element(coords))
    res = perron_positive_basis(order, alphas, max_steps=doc.get("max_steps"))
    result = {
        "basis": [[str(c) for c in el.coords] for el in res.basis],
        "change": [list(map(int, row)) for row in res.change],
        "coeffs": [list(map(int, row)) for row in res.coeffs],
        "valid": True,
    }
    lines = ["basis rows (coordinates):"]
    lines += [f"  {[str(c) for c in el.coords]}" for el in res.basis]
    lines.append("coefficients:")
    lines += [f"  {list(map(int, row))}" for row in res.coeffs]
    return result, "\n".join(lines)


def _cmd_uniformize(doc, args):
    place = parse_place(_get(doc, "place", ""), "place")
    if not isinstance(place, MonomialPlace):
        raise PreconditionError(
            "uniformize expects a monomial place; use discrete-uniformize "
            "for series places"
        )
    zetas_doc = _need(_get(doc, "zetas", ""), list, "zetas", "a list")
    zetas = [
        _parse_rf(z, place.base, place.ambient_names, f"zetas[{i}]")
        for i, z in enumerate(zetas_doc)
    ]
    system = uniformize_abhyankar(place, zetas, max_steps=doc.get("max_steps"))
    report = verify(system)
    result = {"system": system_to_json(system), "report": report.as_dict()}
    return result, _system_text(system) + "\n" + report.summary()


def _cmd_discrete_uniformize(doc, args):
    pres, doc_prec = parse_presentation(_get(doc, "presentation", ""), "presentation")
    precision = args.precision or doc_prec or DEFAULT_PRECISION
    zetas_doc = _need(_get(doc, "zetas", ""), list, "zetas", "a list")
    names = pres.ambient_names
    zetas = [
        _parse_rf(z, pres.base, names, f"zetas[{i}]") for i, z in enumerate(zetas_doc)
    ]
    system = uniformize_discrete_rational(pres, zetas, precision=precision)
    report = verify(system)
    result = {"system": system_to_json(system), "report": report.as_dict()}
    return result, _system_text(system) + "\n" + report.summary()


def _cmd_compose(doc, args):
    from .uniformize import compose

    outer = parse_system(_get(doc, "outer", ""), "outer")
    inner = parse_system(_get(doc, "inner", ""), "inner")
    system = compose(outer, inner)
    report = verify(system)
    result = {"system": system_to_json(system), "report": report.as_dict()}
    return result, _system_text(system) + "\n" + report.summary()


def _cmd_verify(doc, args):
    system = parse_system(_get(doc, "system", ""), "system")
    report = verify(system, precision=args.precision)
    return {"report": report.as_dict()}, report.summary()


def _cmd_report(doc, args):
    place = parse_place(_get(doc, "place", ""), "place")
    if isinstance(place, MonomialPlace):
        rep = abhyankar_report(place)
        result = {
            "transcendence_degree": rep.transcendence_degree,
            "rational_rank": rep.rational_rank,
            "residue_transcendence_degree": rep.residue_transcendence_degree,
            "is_abhyankar": rep.is_abhyankar,
        }
        text = (
            f"transcendence degree  {rep.transcendence_degree}\n"
            f"rational rank         {rep.rational_rank}\n"
            f"residue trdeg         {rep.residue_transcendence_degree}\n"
            f"equality holds:       {'yes' if rep.is_abhyankar else 'no'}"
        )
        return result, text
    # a discrete series place: value group Z, residue field K0
    result = {
        "transcendence_degree": 1,
        "rational_rank": 1,
        "residue_transcendence_degree": 0,
        "is_abhyankar": True,
    }
    return result, "discrete series place: rational rank 1, residue trdeg 0"


def _system_text(system) -> str:
    amb = list(system.place.ambient_names)
    names = system.var_names()
    lines = ["T elements:"]
    lines += [f"  t{i + 1} = {ratfun_str(f, amb)}" for i, f in enumerate(system.tvars)]
    lines.append("etas:")
    lines += [f"  X{j + 1} = {ratfun_str(f, amb)}" for j, f in enumerate(system.etas)]
    lines.append("rows:")
    from .polyfield import poly_str

    lines += [f"  f{j + 1} = {poly_str(f, names)}" for j, f in enumerate(system.fs)]
    if system.coeff_table:
        cn = list(system.coeff_field_names)
        lines.append("coefficients:")
        lines += [
            f"  c{k + 1} = {ratfun_str(f, cn)}" for k, f in enumerate(system.coeff_table)
        ]
    if system.zeta_indices:
        lines.append(f"requested elements at: {list(system.zeta_indices)}")
    return "\n".join(lines)


_HANDLERS = {
    "value": _cmd_value,
    "residue": _cmd_residue,
    "perron": _cmd_perron,
    "uniformize": _cmd_uniformize,
    "discrete-uniformize": _cmd_discrete_uniformize,
    "compose": _cmd_compose,
    "verify": _cmd_verify,
    "report": _cmd_report,
}

_HELP = {
    "value": "value of an element at the place",
    "residue": "residue of a valuation-ring element",
    "perron": "positive basis for value vectors with unimodular coefficients",
    "uniformize": "certificate for elements at a monomial place",
    "discrete-uniformize": "certificate pipeline through a series completion",
    "compose": "stack a relative certificate onto one for its coefficient field",
    "verify": "check a certificate and print the report",
    "report": "numerical invariants of a place",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="uniformizer",
        description="exact certificates for places of rational function fields",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, handler in _HANDLERS.items():
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument(
            "--input", required=True, help="path to a JSON request, or - for stdin"
        )
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument(
            "--seed",
            type=int,
            default=None,
            help="echoed into the output; no randomness is used",
        )
        p.add_argument(
            "--precision",
            type=int,
            default=None,
            help="series precision override where applicable",
        )
        p.set_defaults(handler=handler)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = _load(args.input)
        result, text = args.handler(doc, args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except InsufficientPrecisionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (PreconditionError, ResourceError, ZeroDivisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.format == "json":
        envelope = {"command": args.command, "seed": args.seed, "result": result}
        print(json.dumps(envelope, sort_keys=True, indent=2))
    else:
        print(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
