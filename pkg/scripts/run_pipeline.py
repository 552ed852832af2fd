"""Worked pipeline: certify elements of F(t, z) against a t-adic series place.

Builds the ground certificate for a field given by one algebraic generator
over K0(t), prints the verification summary, and optionally dumps the full
JSON certificate.  The default instance is F5(t, z) with z^2 = 1 + t and
z |-> 1, certifying z, z + t and (z - 1)/t.
"""

import argparse
import json
from dataclasses import dataclass, field

from uniformizer.completion import DiscretePresentation, uniformize_discrete_rational
from uniformizer.expr import parse_element
from uniformizer.fields import GF, QQ
from uniformizer.jsonio import system_to_json
from uniformizer.uniformize import verify


def parse_poly(text, base, names):
    rf = parse_element(text, base, names)
    if not rf.den.is_constant:
        raise ValueError("expected a polynomial, got a proper fraction")
    return rf.num.scale(base.inv(rf.den.constant_value()))


@dataclass
class PipelineConfig:
    p: int = 5                      # 0 means rationals
    min_poly: str = "X^2 - 1 - t"
    residue: int = 1
    zetas: list = field(default_factory=lambda: ["z", "z + t", "(z - 1)/t"])
    precision: int = 16


def run(cfg: PipelineConfig):
    base = QQ() if cfg.p == 0 else GF(cfg.p)
    pres = DiscretePresentation(
        base,
        min_poly=parse_poly(cfg.min_poly, base, ("t", "X")),
        residue=base.coerce(cfg.residue),
    )
    zetas = [parse_element(text, base, ("t", "z")) for text in cfg.zetas]
    system = uniformize_discrete_rational(pres, zetas, precision=cfg.precision)
    report = verify(system)
    return system, report


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=5, help="characteristic, 0 for the rationals")
    ap.add_argument("--min-poly", default="X^2 - 1 - t")
    ap.add_argument("--residue", type=int, default=1)
    ap.add_argument("--zeta", action="append", default=None, help="element to certify (repeatable)")
    ap.add_argument("--precision", type=int, default=16)
    ap.add_argument("--json", action="store_true", help="print the full certificate")
    args = ap.parse_args(argv)

    cfg = PipelineConfig(p=args.p, min_poly=args.min_poly, residue=args.residue, precision=args.precision)
    if args.zeta:
        cfg.zetas = args.zeta
    system, report = run(cfg)

    print(f"rows: {len(system.fs)}  etas: {len(system.etas)}  T-vars: {len(system.tvars)}")
    print(report.summary())
    if args.json:
        print(json.dumps(system_to_json(system), indent=2, sort_keys=True))
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
