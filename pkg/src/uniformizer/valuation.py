"""Monomial places on rational function fields K(x_1..x_rho, y_1..y_tau).

The x variables carry prescribed values (coordinates in an ordered group),
the y variables carry value zero and their residues ybar_j are independent
transcendentals over K.  The value of a polynomial is the minimum over its
terms of the term value; because the weights inside each block of the
group order are rationally independent, all terms attaining that minimum
share one x-exponent vector, and the residue of a unit is a rational
function in the ybar alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    NotAUnitError,
    NotInValuationRingError,
    PreconditionError,
    ValueOfZeroError,
)
from .fields import BaseField
from .polyfield import RationalFunction, SparsePoly, ratfun_str
from .valuegroup import GroupElement, GroupOrder, compare, rational_rank


@dataclass(frozen=True)
class MonomialPlace:
    base: BaseField
    order: GroupOrder
    tau: int = 0
    x_names: tuple[str, ...] = ()
    y_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.tau < 0:
            raise PreconditionError("tau must be non-negative")
        if self.order.ngens + self.tau < 1:
            raise PreconditionError("the field needs at least one generator")
        if not self.x_names:
            object.__setattr__(
                self, "x_names", tuple(f"x{i + 1}" for i in range(self.order.ngens))
            )
        if not self.y_names:
            object.__setattr__(
                self, "y_names", tuple(f"y{j + 1}" for j in range(self.tau))
            )
        if len(self.x_names) != self.order.ngens or len(self.y_names) != self.tau:
            raise PreconditionError("variable name counts do not match the place")
        names = self.x_names + self.y_names
        if len(set(names)) != len(names):
            raise PreconditionError("ambient variable names must be distinct")

    @property
    def rho(self) -> int:
        return self.order.ngens

    @property
    def nvars(self) -> int:
        return self.rho + self.tau

    @property
    def ambient_names(self) -> tuple[str, ...]:
        return self.x_names + self.y_names

    @property
    def residue_names(self) -> tuple[str, ...]:
        return tuple(f"{n}bar" for n in self.y_names)

    def term_value(self, exps) -> GroupElement:
        return self.order.element([Fraction(e) for e in exps[: self.rho]])

    def zero_value(self) -> GroupElement:
        return self.order.zero()


@dataclass(frozen=True)
class ResidueElement:
    """A residue written as a rational function in the ybar variables."""

    place: MonomialPlace
    rep: RationalFunction

    @property
    def is_zero(self) -> bool:
        return self.rep.is_zero

    @property
    def is_one(self) -> bool:
        one = RationalFunction.const(self.place.base, self.place.tau, 1)
        return self.rep == one

    def __str__(self):
        return ratfun_str(self.rep, self.place.residue_names)


def value_of_poly(place: MonomialPlace, f: SparsePoly) -> tuple[GroupElement, tuple]:
    """Value of a nonzero polynomial and its minimal-value terms."""
    if f.base != place.base or f.nvars != place.nvars:
        raise PreconditionError("polynomial does not live in the ambient ring")
    if f.is_zero:
        raise ValueOfZeroError("the zero polynomial has no value")
    best: GroupElement | None = None
    best_terms: list = []
    for e, c in f.terms:
        val = place.term_value(e)
        if best is None:
            best, best_terms = val, [(e, c)]
            continue
        s = compare(val, best)
        if s < 0:
            best, best_terms = val, [(e, c)]
        elif s == 0:
            best_terms.append((e, c))
    rho = place.rho
    heads = {e[:rho] for e, _ in best_terms}
    if len(heads) != 1:  # pragma: no cover - excluded by weight independence
        raise PreconditionError("minimal terms disagree on x-exponents")
    return best, tuple(best_terms)


def value_of_ratfun(place: MonomialPlace, f: RationalFunction) -> GroupElement:
    if f.is_zero:
        raise ValueOfZeroError("the zero element has no value")
    vn, _ = value_of_poly(place, f.num)
    vd, _ = value_of_poly(place, f.den)
    return vn - vd


def in_valuation_ring(place: MonomialPlace, f: RationalFunction) -> bool:
    if f.is_zero:
        return True
    return value_of_ratfun(place, f).sign() >= 0


def _residue_numerator(place: MonomialPlace, terms) -> SparsePoly:
    rho, tau = place.rho, place.tau
    return SparsePoly.make(place.base, tau, [(e[rho:], c) for e, c in terms])


def residue_of(place: MonomialPlace, f: RationalFunction) -> ResidueElement:
    """Residue of a unit of the valuation ring, in the ybar variables."""
    if f.is_zero:
        raise ValueOfZeroError("the zero element has no residue here: its value is not zero")
    vn, tn = value_of_poly(place, f.num)
    vd, td = value_of_poly(place, f.den)
    if compare(vn, vd) != 0:
        raise NotAUnitError(
            "element has nonzero value; only units have unit residues"
        )
    rep = RationalFunction.make(
        _residue_numerator(place, tn), _residue_numerator(place, td)
    )
    return ResidueElement(place, rep)


def residue_in_ring(place: MonomialPlace, f: RationalFunction) -> ResidueElement:
    """Residue of any element of the valuation ring (zero when v f > 0)."""
    if f.is_zero:
        return ResidueElement(place, RationalFunction.const(place.base, place.tau, 0))
    v = value_of_ratfun(place, f)
    s = v.sign()
    if s < 0:
        raise NotInValuationRingError("element has negative value")
    if s > 0:
        return ResidueElement(place, RationalFunction.const(place.base, place.tau, 0))
    return residue_of(place, f)


@dataclass(frozen=True)
class AbhyankarReport:
    transcendence_degree: int
    rational_rank: int
    residue_transcendence_degree: int
    is_abhyankar: bool


def abhyankar_report(place: MonomialPlace) -> AbhyankarReport:
    """Compare trdeg of the field against rational rank plus residue trdeg."""
    trdeg = place.rho + place.tau
    rr = rational_rank(place.order)
    return AbhyankarReport(
        transcendence_degree=trdeg,
        rational_rank=rr,
        residue_transcendence_degree=place.tau,
        is_abhyankar=(trdeg == rr + place.tau),
    )
