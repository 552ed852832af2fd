"""Triangular systems witnessing local uniformization, and their checker.

A triangular system over a valued field records a transcendence set T, a
list of algebraic elements eta with one witness polynomial f_i per eta,
and optionally a table of coefficient-field elements that the f_i may use
through dedicated c-variables.  The polynomial ring of the f_i (and of the
generation witnesses) is laid out as

    variables  0..s-1        the T elements,   rendered t1..ts
    variables  s..s+n-1      the eta slots,    rendered X1..Xn
    variables  s+n..s+n+nc-1 coefficient refs, rendered c1..cnc

``verify`` checks, over the system's place:
  (U1)  f_i uses only X_1..X_i among the X variables,
  (U2)  f_i(T, eta_1..eta_i) = 0,
  (U3)  the product of the diagonal partials  d f_i / d X_i  evaluated at
        (T, eta) is a unit: value zero and nonzero residue,
plus a generation check: every ambient generator of the field must equal
its recorded witness expression in the system variables (or literally be
one of the T or eta elements).

Over a monomial place all checks are exact rational-function identities;
over a truncated-series place identities hold to the tracked precision,
which the report carries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotInValuationRingError, PreconditionError
from .polyfield import (
    RationalFunction,
    SparsePoly,
    hasse_derivative,
    poly_str,
    ratfun_str,
    substitute,
)
from .valuation import (
    MonomialPlace,
    in_valuation_ring,
    residue_in_ring,
    value_of_poly,
    value_of_ratfun,
)
from .valuegroup import perron_positive_basis, unimodular_inverse


@dataclass(frozen=True)
class TriangularSystem:
    place: object
    tvars: tuple[RationalFunction, ...]
    etas: tuple[RationalFunction, ...]
    fs: tuple[SparsePoly, ...]
    coeff_field_names: tuple[str, ...] = ()
    coeff_table: tuple[RationalFunction, ...] = ()
    zeta_indices: tuple[int, ...] = ()
    witnesses: tuple[tuple[str, RationalFunction], ...] = ()

    def __post_init__(self):
        s, n, nc = len(self.tvars), len(self.etas), len(self.coeff_table)
        if len(self.fs) != n:
            raise PreconditionError("need exactly one row polynomial per eta")
        width = s + n + nc
        for i, f in enumerate(self.fs):
            if f.nvars != width:
                raise PreconditionError(
                    f"row {i + 1} has {f.nvars} variables, expected {width}"
                )
        ambient = set(ambient_names(self.place))
        for name, w in self.witnesses:
            if name not in ambient:
                raise PreconditionError(f"witness for unknown generator {name!r}")
            if w.nvars != width:
                raise PreconditionError(f"witness for {name!r} has the wrong width")
        for idx in self.zeta_indices:
            if not 0 <= idx < n:
                raise PreconditionError(f"requested index {idx} out of range")
        if self.coeff_table and not self.coeff_field_names:
            raise PreconditionError("coefficient table needs coefficient field names")
        for c in self.coeff_table:
            if c.nvars != len(self.coeff_field_names):
                raise PreconditionError("coefficient entry has the wrong width")

    @property
    def s(self) -> int:
        return len(self.tvars)

    @property
    def n(self) -> int:
        return len(self.etas)

    def var_names(self) -> list[str]:
        return (
            [f"t{i + 1}" for i in range(self.s)]
            + [f"X{j + 1}" for j in range(self.n)]
            + [f"c{k + 1}" for k in range(len(self.coeff_table))]
        )

    def witness_map(self) -> dict[str, RationalFunction]:
        return dict(self.witnesses)


def ambient_names(place) -> tuple[str, ...]:
    names = getattr(place, "ambient_names", None)
    if names is None:
        raise PreconditionError("place does not expose ambient generator names")
    return tuple(names)


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    u1: CheckResult
    u2: CheckResult
    u3: CheckResult
    generation: CheckResult
    diagonal_value: str
    diagonal_residue: str
    diagonal_entries: tuple[str, ...]
    precision: int | None = None

    @property
    def passed(self) -> bool:
        return all(
            c.passed for c in (self.u1, self.u2, self.u3, self.generation)
        )

    def as_dict(self) -> dict:
        def one(c: CheckResult) -> dict:
            return {"passed": c.passed, "detail": c.detail}

        return {
            "passed": self.passed,
            "u1": one(self.u1),
            "u2": one(self.u2),
            "u3": one(self.u3),
            "generation": one(self.generation),
            "diagonal": {
                "value": self.diagonal_value,
                "residue": self.diagonal_residue,
                "entries": list(self.diagonal_entries),
            },
            "precision": self.precision,
        }

    def summary(self) -> str:
        rows = [
            ("U1 triangular shape", self.u1),
            ("U2 rows vanish", self.u2),
            ("U3 unit Jacobian", self.u3),
            ("generation", self.generation),
        ]
        lines = []
        for label, c in rows:
            mark = "pass" if c.passed else "FAIL"
            lines.append(f"{label}: {mark}" + (f" ({c.detail})" if c.detail else ""))
        if self.precision is not None:
            lines.append(f"checked at series precision {self.precision}")
        return "\n".join(lines)


class MonomialContext:
    """Exact rational-function evaluation over a monomial place."""

    def __init__(self, place: MonomialPlace):
        self.place = place
        self.precision = None

    def ambient(self, rf: RationalFunction) -> RationalFunction:
        if rf.nvars != self.place.nvars or rf.base != self.place.base:
            raise PreconditionError("element does not live in the ambient field")
        return rf

    def coeff(self, rf: RationalFunction, names) -> RationalFunction:
        amb = ambient_names(self.place)
        try:
            mapping = [amb.index(n) for n in names]
        except ValueError as exc:
            raise PreconditionError(
                f"coefficient field name missing from the ambient field: {exc}"
            ) from None
        return rf.map_vars(mapping, self.place.nvars)

    def generator(self, i: int) -> RationalFunction:
        return RationalFunction.variable(self.place.base, self.place.nvars, i)

    def eval_poly(self, f: SparsePoly, args) -> RationalFunction:
        return substitute(f, args)

    def one(self) -> RationalFunction:
        return RationalFunction.const(self.place.base, self.place.nvars, 1)

    def mul(self, a, b):
        return a * b

    def sub(self, a, b):
        return a - b

    def div(self, a, b):
        return a / b

    def is_zero(self, a) -> bool:
        return a.is_zero

    def in_ring(self, a) -> bool:
        return in_valuation_ring(self.place, a)

    def value_sign(self, a) -> int:
        return value_of_ratfun(self.place, a).sign()

    def value_str(self, a) -> str:
        return str(value_of_ratfun(self.place, a))

    def residue_is_zero(self, a) -> bool:
        return residue_in_ring(self.place, a).is_zero

    def residue_str(self, a) -> str:
        return str(residue_in_ring(self.place, a))

    def describe(self, a) -> str:
        return ratfun_str(a, ambient_names(self.place))


def _context_for(place):
    if isinstance(place, MonomialPlace):
        return MonomialContext(place)
    maker = getattr(place, "make_context", None)
    if maker is None:
        raise PreconditionError("place cannot provide a verification context")
    return maker()


def verify(system: TriangularSystem, context=None, precision: int | None = None) -> VerificationReport:
    """Check (U1)-(U3) and generation; return a full report.

    Raises NotInValuationRingError if a listed element fails membership in
    the valuation ring, since such a system is malformed rather than merely
    failing a check.
    """
    ctx = context
    if ctx is None:
        if precision is not None and not isinstance(system.place, MonomialPlace):
            ctx = system.place.make_context(precision)
        else:
            ctx = _context_for(system.place)
    s, n = system.s, system.n

    ts = [ctx.ambient(rf) for rf in system.tvars]
    xs = [ctx.ambient(rf) for rf in system.etas]
    cs = [ctx.coeff(rf, system.coeff_field_names) for rf in system.coeff_table]
    for kind, elems in (("T", ts), ("eta", xs), ("coefficient", cs)):
        for i, el in enumerate(elems):
            if not ctx.in_ring(el):
                raise NotInValuationRingError(
                    f"{kind} element {i + 1} lies outside the valuation ring"
                )
    args = ts + xs + cs

    # U1: row i may only use X_1..X_i
    u1 = CheckResult(True)
    for i, f in enumerate(system.fs):
        for e, _ in f.terms:
            bad = next((j for j in range(i + 1, n) if e[s + j] > 0), None)
            if bad is not None:
                u1 = CheckResult(
                    False, f"row {i + 1} uses X{bad + 1}"
                )
                break
        if not u1.passed:
            break

    # U2: every row vanishes at (T, eta)
    u2 = CheckResult(True)
    for i, f in enumerate(system.fs):
        val = ctx.eval_poly(f, args)
        if not ctx.is_zero(val):
            u2 = CheckResult(False, f"row {i + 1} does not vanish")
            break

    # U3: the product of diagonal partials is a unit
    entries = []
    prod = ctx.one()
    for i, f in enumerate(system.fs):
        d = ctx.eval_poly(hasse_derivative(f, 1, var=s + i), args)
        entries.append(d)
        prod = ctx.mul(prod, d)
    if ctx.is_zero(prod):
        u3 = CheckResult(False, "diagonal product vanishes")
        dval, dres = "undefined", "0"
    else:
        sign = ctx.value_sign(prod)
        if sign != 0:
            u3 = CheckResult(False, "diagonal product has nonzero value")
            dval, dres = ctx.value_str(prod), "0" if sign > 0 else "undefined"
        else:
            dres = ctx.residue_str(prod)
            dval = ctx.value_str(prod)
            ok = not ctx.residue_is_zero(prod)
            u3 = CheckResult(ok, "" if ok else "diagonal residue is zero")
    entry_strs = tuple(
        "0" if ctx.is_zero(d)
        else (ctx.residue_str(d) if ctx.value_sign(d) == 0 else f"value {ctx.value_str(d)}")
        for d in entries
    )

    # generation: each ambient generator from T, eta, and witnesses;
    # coefficient-field generators are free in a relative system
    missing = []
    wmap = system.witness_map()
    names = ambient_names(system.place)
    for i, name in enumerate(names):
        if name in system.coeff_field_names:
            continue
        gen = ctx.generator(i)
        if name in wmap:
            try:
                wit = _eval_witness(ctx, wmap[name], args)
                if not ctx.is_zero(ctx.sub(wit, gen)):
                    missing.append(f"{name} (witness does not reproduce it)")
            except ZeroDivisionError:
                missing.append(f"{name} (witness denominator vanishes)")
            continue
        direct = any(_same_element(ctx, gen, el) for el in list(ts) + list(xs))
        if not direct:
            missing.append(f"{name} (no witness)")
    generation = CheckResult(not missing, "; ".join(missing))

    return VerificationReport(
        u1=u1,
        u2=u2,
        u3=u3,
        generation=generation,
        diagonal_value=dval,
        diagonal_residue=dres,
        diagonal_entries=entry_strs,
        precision=getattr(ctx, "precision", None),
    )


def _eval_witness(ctx, w: RationalFunction, args):
    num = ctx.eval_poly(w.num, args)
    den = ctx.eval_poly(w.den, args)
    if ctx.is_zero(den):
        raise ZeroDivisionError("witness denominator vanishes")
    return ctx.div(num, den)


def _same_element(ctx, a, b) -> bool:
    return ctx.is_zero(ctx.sub(a, b))


# ---------------------------------------------------------------------------
# Construction for monomial places


def uniformize_abhyankar(
    place: MonomialPlace, zetas, max_steps: int | None = None
) -> TriangularSystem:
    """Build a verified-shape system for the given valuation-ring elements.

    Each zeta is normalized by the minimal-value monomial of its
    denominator, the x-exponent offsets of all terms (which have
    non-negative value) are fed to the positive-basis reduction together
    with the unit vectors, and the resulting basis yields new monomial
    generators in which numerator and denominator become honest
    polynomials with unit denominator.  Row j is then
    den_j(T) * X_j - num_j(T).
    """
    zetas = list(zetas)
    rho, tau = place.rho, place.tau
    base = place.base
    for i, z in enumerate(zetas):
        if not isinstance(z, RationalFunction) or z.nvars != place.nvars or z.base != base:
            raise PreconditionError(f"element {i + 1} does not live in the ambient field")
        if not in_valuation_ring(place, z):
            raise PreconditionError(
                f"element {i + 1} lies outside the valuation ring"
            )

    # collect x-exponent offsets relative to each denominator's minimal monomial
    seen: dict[tuple[int, ...], None] = {}
    per_zeta: list[tuple] = []
    for z in zetas:
        if z.is_zero:
            per_zeta.append(None)
            continue
        _, dterms = value_of_poly(place, z.den)
        e0, c0 = dterms[-1]  # graded-lex smallest among the minimal-value terms
        mu0 = e0[:rho]
        offsets = []
        for e, _ in list(z.num.terms) + list(z.den.terms):
            xi = tuple(a - b for a, b in zip(e[:rho], mu0))
            offsets.append(xi)
            seen.setdefault(xi, None)
        per_zeta.append((mu0, c0))
    for i in range(rho):
        unit = tuple(int(i == j) for j in range(rho))
        seen.setdefault(unit, None)

    if rho == 0:
        row_of: dict[tuple, tuple] = {(): ()}
        basis: list[list[int]] = []
        basis_inv: list[list[int]] = []
    else:
        alphas = list(seen)
        result = perron_positive_basis(
            place.order, [place.order.element(a) for a in alphas], max_steps
        )
        row_of = {a: result.coeffs[i] for i, a in enumerate(alphas)}
        basis = [list(map(int, row)) for row in result.change]
        basis_inv = unimodular_inverse(basis)

    s = rho + tau
    n = len(zetas)
    width = s + n

    def rewrite(poly: SparsePoly, mu0, c0) -> SparsePoly:
        terms = []
        inv_c0 = base.inv(c0)
        for e, c in poly.terms:
            xi = tuple(a - b for a, b in zip(e[:rho], mu0))
            nu = row_of[xi]
            exps = tuple(nu) + tuple(e[rho:]) + (0,) * n
            terms.append((exps, base.mul(c, inv_c0)))
        return SparsePoly.make(base, width, terms)

    fs = []
    for j, z in enumerate(zetas):
        xj = SparsePoly.variable(base, width, s + j)
        if per_zeta[j] is None:
            fs.append(xj)
            continue
        mu0, c0 = per_zeta[j]
        den_poly = rewrite(z.den, mu0, c0)
        num_poly = rewrite(z.num, mu0, c0)
        fs.append(den_poly * xj - num_poly)

    tvars = [_x_monomial(place, row) for row in basis]
    tvars += [
        RationalFunction.variable(base, place.nvars, rho + j) for j in range(tau)
    ]
    witnesses = []
    for i in range(rho):
        witnesses.append((place.x_names[i], _t_monomial(base, width, rho, basis_inv, i)))

    return TriangularSystem(
        place=place,
        tvars=tuple(tvars),
        etas=tuple(zetas),
        fs=tuple(fs),
        zeta_indices=tuple(range(n)),
        witnesses=tuple(witnesses),
    )


def _x_monomial(place: MonomialPlace, exps) -> RationalFunction:
    """x^exps as a rational function, negative exponents in the denominator."""
    base = place.base
    num = [max(e, 0) for e in exps] + [0] * place.tau
    den = [max(-e, 0) for e in exps] + [0] * place.tau
    return RationalFunction.make(
        SparsePoly.make(base, place.nvars, [(tuple(num), 1)]),
        SparsePoly.make(base, place.nvars, [(tuple(den), 1)]),
    )


def _t_monomial(base, width: int, rho: int, basis_inv, i: int) -> RationalFunction:
    exps = [basis_inv[i][j] for j in range(rho)]
    num = [max(e, 0) for e in exps] + [0] * (width - rho)
    den = [max(-e, 0) for e in exps] + [0] * (width - rho)
    return RationalFunction.make(
        SparsePoly.make(base, width, [(tuple(num), 1)]),
        SparsePoly.make(base, width, [(tuple(den), 1)]),
    )


# ---------------------------------------------------------------------------
# Composition


def compose(outer: TriangularSystem, inner: TriangularSystem) -> TriangularSystem:
    """Stack a system over a coefficient field onto a system for that field.

    The outer system's coefficient entries must each equal one of the inner
    etas (as elements of the inner ambient field); its c-variables are then
    replaced by the matching inner X-variables.  The composed T lists the
    outer T first, the composed etas list the inner etas first, matching
    the variable layout.
    """
    if inner.coeff_table:
        raise PreconditionError("inner system must not use a coefficient table")
    inner_names = ambient_names(inner.place)
    if tuple(outer.coeff_field_names) != inner_names:
        raise PreconditionError(
            "outer coefficient field does not match the inner ambient field"
        )
    outer_names = ambient_names(outer.place)
    if not set(inner_names) <= set(outer_names):
        raise PreconditionError(
            "inner field generators must embed into the outer field"
        )

    match = []
    for k, c in enumerate(outer.coeff_table):
        j = next((j for j, h in enumerate(inner.etas) if h == c), None)
        if j is None:
            raise PreconditionError(
                f"coefficient {k + 1} = {ratfun_str(c, list(inner_names))} "
                "matches no inner eta"
            )
        match.append(j)

    s1, n1 = outer.s, outer.n
    s2, n2 = inner.s, inner.n
    s, n = s1 + s2, n2 + n1
    width = s + n

    inner_map = [s1 + i for i in range(s2)] + [s + j for j in range(n2)]
    outer_map = (
        list(range(s1))
        + [s + n2 + j for j in range(n1)]
        + [s + match[k] for k in range(len(outer.coeff_table))]
    )
    fs = [f.map_vars(inner_map, width) for f in inner.fs]
    fs += [f.map_vars(outer_map, width) for f in outer.fs]

    embed = [outer_names.index(nm) for nm in inner_names]
    lift = lambda rf: rf.map_vars(embed, len(outer_names))

    witnesses: dict[str, RationalFunction] = {}
    for name, w in inner.witnesses:
        witnesses[name] = w.map_vars(inner_map, width)
    for name, w in outer.witnesses:
        witnesses.setdefault(name, w.map_vars(outer_map, width))

    return TriangularSystem(
        place=outer.place,
        tvars=outer.tvars + tuple(lift(t) for t in inner.tvars),
        etas=tuple(lift(h) for h in inner.etas) + outer.etas,
        fs=tuple(fs),
        zeta_indices=tuple(n2 + i for i in outer.zeta_indices),
        witnesses=tuple(sorted(witnesses.items())),
    )
