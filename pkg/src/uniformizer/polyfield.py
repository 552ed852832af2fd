"""Sparse multivariate polynomials and rational functions in canonical form.

Polynomials store their terms as a tuple of (exponent tuple, coefficient)
pairs sorted in descending graded-lexicographic order with no zero
coefficients, so structural equality decides mathematical equality.
Rational functions keep numerator and denominator coprime; over the
rationals both are integer polynomials with no common integer content and
the denominator's graded-lex leading coefficient is positive, over a prime
field the denominator is monic.  Construction goes through ``make`` style
factories which enforce the canonical form.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .errors import PreconditionError
from .fields import BaseField, Scalar
from .valuegroup import int_det

Exps = tuple[int, ...]


def _grlex_key(e: Exps):
    return (sum(e), e)


@dataclass(frozen=True)
class SparsePoly:
    base: BaseField
    nvars: int
    terms: tuple[tuple[Exps, Scalar], ...]

    # -- construction -------------------------------------------------

    @staticmethod
    def make(base: BaseField, nvars: int, terms) -> "SparsePoly":
        acc: dict[Exps, Scalar] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise PreconditionError(f"bad exponent vector {e} for {nvars} variables")
            c = base.coerce(c)
            prev = acc.get(e)
            acc[e] = base.add(prev, c) if prev is not None else c
        cleaned = tuple(
            (e, c)
            for e, c in sorted(acc.items(), key=lambda t: _grlex_key(t[0]), reverse=True)
            if c != 0
        )
        return SparsePoly(base, nvars, cleaned)

    @staticmethod
    def zero(base: BaseField, nvars: int) -> "SparsePoly":
        return SparsePoly(base, nvars, ())

    @staticmethod
    def const(base: BaseField, nvars: int, c) -> "SparsePoly":
        return SparsePoly.make(base, nvars, [((0,) * nvars, c)])

    @staticmethod
    def variable(base: BaseField, nvars: int, i: int) -> "SparsePoly":
        e = [0] * nvars
        e[i] = 1
        return SparsePoly.make(base, nvars, [(tuple(e), base.one)])

    # -- queries -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e, _ in self.terms)

    def constant_value(self) -> Scalar:
        if self.is_zero:
            return self.base.zero
        if not self.is_constant:
            raise PreconditionError("polynomial is not constant")
        return self.terms[0][1]

    def total_degree(self) -> int:
        if self.is_zero:
            raise PreconditionError("degree of the zero polynomial")
        return sum(self.terms[0][0])

    def degree_in(self, var: int) -> int:
        if self.is_zero:
            raise PreconditionError("degree of the zero polynomial")
        return max(e[var] for e, _ in self.terms)

    def leading(self) -> tuple[Exps, Scalar]:
        if self.is_zero:
            raise PreconditionError("leading term of the zero polynomial")
        return self.terms[0]

    def coefficient(self, exps) -> Scalar:
        target = tuple(int(x) for x in exps)
        for e, c in self.terms:
            if e == target:
                return c
        return self.base.zero

    # -- arithmetic ----------------------------------------------------

    def _dict(self) -> dict[Exps, Scalar]:
        return dict(self.terms)

    def _check_mate(self, other: "SparsePoly"):
        if self.base != other.base or self.nvars != other.nvars:
            raise PreconditionError("polynomials live in different rings")

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        self._check_mate(other)
        return SparsePoly.make(self.base, self.nvars, list(self.terms) + list(other.terms))

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.base, self.nvars,
                          tuple((e, self.base.neg(c)) for e, c in self.terms))

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (-other)

    def __mul__(self, other: "SparsePoly") -> "SparsePoly":
        self._check_mate(other)
        base = self.base
        acc: dict[Exps, Scalar] = {}
        for ea, ca in self.terms:
            for eb, cb in other.terms:
                e = tuple(x + y for x, y in zip(ea, eb))
                c = base.mul(ca, cb)
                prev = acc.get(e)
                acc[e] = base.add(prev, c) if prev is not None else c
        return SparsePoly(base, self.nvars, tuple(
            (e, c)
            for e, c in sorted(acc.items(), key=lambda t: _grlex_key(t[0]), reverse=True)
            if c != 0
        ))

    def scale(self, c) -> "SparsePoly":
        c = self.base.coerce(c)
        if c == 0:
            return SparsePoly.zero(self.base, self.nvars)
        return SparsePoly(self.base, self.nvars,
                          tuple((e, self.base.mul(k, c)) for e, k in self.terms))

    def __pow__(self, n: int) -> "SparsePoly":
        if n < 0:
            raise PreconditionError("negative power of a polynomial")
        out = SparsePoly.const(self.base, self.nvars, self.base.one)
        square = self
        while n:
            if n & 1:
                out = out * square
            n >>= 1
            if n:
                square = square * square
        return out

    def evaluate(self, args) -> Scalar:
        args = [self.base.coerce(a) for a in args]
        if len(args) != self.nvars:
            raise PreconditionError("wrong number of evaluation points")
        base = self.base
        total = base.zero
        for e, c in self.terms:
            term = c
            for a, k in zip(args, e):
                for _ in range(k):
                    term = base.mul(term, a)
            total = base.add(total, term)
        return total

    def map_vars(self, mapping, new_nvars: int) -> "SparsePoly":
        """Reindex variables: old variable i becomes new variable mapping[i]."""
        if len(mapping) != self.nvars:
            raise PreconditionError("variable mapping has the wrong length")
        out = []
        for e, c in self.terms:
            ne = [0] * new_nvars
            for i, k in enumerate(e):
                if k:
                    ne[mapping[i]] += k
            out.append((tuple(ne), c))
        return SparsePoly.make(self.base, new_nvars, out)

    def __str__(self):
        return poly_str(self, default_names(self.nvars))


def default_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


def poly_str(f: SparsePoly, names) -> str:
    """Canonical text: graded-lex descending terms, explicit * and ^."""
    if f.is_zero:
        return "0"
    if len(names) != f.nvars:
        raise PreconditionError("wrong number of variable names")
    chunks = []
    for e, c in f.terms:
        mono = "*".join(
            names[i] if k == 1 else f"{names[i]}^{k}"
            for i, k in enumerate(e) if k
        )
        cs = f.base.scalar_str(c)
        negative = cs.startswith("-")
        body = cs[1:] if negative else cs
        if mono:
            body = mono if body == "1" else f"{body}*{mono}"
        chunks.append(("- " if negative else "+ ") + body)
    text = " ".join(chunks)
    return "-" + text[2:] if text.startswith("- ") else text[2:]


def hasse_derivative(f: SparsePoly, i: int, var: int = 0) -> SparsePoly:
    """i-th Hasse derivative in the given variable.

    The coefficient of x^n maps to binomial(n, i) * x^(n-i); over a prime
    field the binomial is reduced mod p, which keeps the Taylor expansion
    f(z) = sum_i f^[i](a) (z-a)^i valid in every characteristic.
    """
    if i < 0:
        raise PreconditionError("Hasse derivative order must be non-negative")
    if not 0 <= var < f.nvars:
        raise PreconditionError(f"no variable {var} in a {f.nvars}-variable ring")
    out = []
    for e, c in f.terms:
        if e[var] < i:
            continue
        coeff = f.base.mul(c, f.base.coerce(math.comb(e[var], i)))
        ne = list(e)
        ne[var] -= i
        out.append((tuple(ne), coeff))
    return SparsePoly.make(f.base, f.nvars, out)


# ---------------------------------------------------------------------------
# GCD machinery (primitive remainder sequences over the base field)


def _split_main(f: SparsePoly) -> dict[int, SparsePoly]:
    """View f as a univariate polynomial in variable 0 with SparsePoly coefficients."""
    buckets: dict[int, list] = {}
    for e, c in f.terms:
        buckets.setdefault(e[0], []).append((e[1:], c))
    return {
        d: SparsePoly.make(f.base, f.nvars - 1, pairs)
        for d, pairs in buckets.items()
    }


def _join_main(base: BaseField, nvars: int, coeffs: dict[int, SparsePoly]) -> SparsePoly:
    out = []
    for d, poly in coeffs.items():
        for e, c in poly.terms:
            out.append(((d,) + e, c))
    return SparsePoly.make(base, nvars, out)


def _gcd_univariate(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    base = f.base
    a = {e[0]: c for e, c in f.terms}
    b = {e[0]: c for e, c in g.terms}

    def remainder(top: dict, bot: dict) -> dict:
        top = dict(top)
        db = max(bot)
        lead_b = bot[db]
        while top and max(top) >= db:
            da = max(top)
            q = base.div(top[da], lead_b)
            for k, c in bot.items():
                idx = k + da - db
                val = base.sub(top.get(idx, base.zero), base.mul(q, c))
                if val == 0:
                    top.pop(idx, None)
                else:
                    top[idx] = val
        return top

    while b:
        a, b = b, remainder(a, b)
    lead = a[max(a)]
    return SparsePoly.make(base, 1, [((k,), base.div(c, lead)) for k, c in a.items()])


def poly_content(f: SparsePoly) -> SparsePoly:
    """GCD of the coefficients of f seen as univariate in variable 0."""
    coeffs = list(_split_main(f).values())
    return reduce(poly_gcd, coeffs) if coeffs else SparsePoly.zero(f.base, f.nvars - 1)


def _min_exps(f: SparsePoly) -> tuple[int, ...]:
    return tuple(min(e[i] for e, _ in f.terms) for i in range(f.nvars))


def _shift_down(f: SparsePoly, shift) -> SparsePoly:
    if not any(shift):
        return f
    return SparsePoly.make(
        f.base, f.nvars, [(tuple(a - b for a, b in zip(e, shift)), c) for e, c in f.terms]
    )


def _eval_except(f: SparsePoly, var: int, point) -> SparsePoly:
    """Substitute point into every variable but var, leaving a univariate poly."""
    base = f.base
    acc: dict[int, Scalar] = {}
    for e, c in f.terms:
        val = c
        pi = 0
        for j, exp in enumerate(e):
            if j == var:
                continue
            for _ in range(exp):
                val = base.mul(val, point[pi])
            pi += 1
        if val != 0:
            acc[e[var]] = base.add(acc.get(e[var], base.zero), val)
    return SparsePoly.make(base, 1, [((k,), v) for k, v in acc.items()])


def _sample_point(base: BaseField, rng, n: int):
    if base.is_rationals:
        return tuple(base.coerce(rng.randint(-9, 9)) for _ in range(n))
    return tuple(base.coerce(rng.randrange(base.characteristic)) for _ in range(n))


def _var_bound_zero(base: BaseField, f: SparsePoly, g: SparsePoly, var: int, rng) -> bool:
    for primary, other in ((f, g), (g, f)):
        d = primary.degree_in(var)
        lc = SparsePoly.make(
            base,
            primary.nvars - 1,
            [(e[:var] + e[var + 1 :], c) for e, c in primary.terms if e[var] == d],
        )
        for _ in range(4):
            point = _sample_point(base, rng, primary.nvars - 1)
            if lc.evaluate(point) == 0:
                continue
            u = _gcd_univariate(
                _eval_except(primary, var, point), _eval_except(other, var, point)
            )
            if u.is_constant:
                return True
    return False


def _certified_coprime(f: SparsePoly, g: SparsePoly) -> bool:
    """Certify gcd(f, g) constant through univariate specializations.

    Any common divisor keeps its degree in one variable when the others are
    specialized at a point where the leading coefficient survives, so a
    degree-0 specialized gcd in every variable proves the claim.  A False
    return is never wrong, only slower.
    """
    base = f.base
    rng = random.Random(0x5EED)
    for var in range(f.nvars):
        if f.degree_in(var) == 0 or g.degree_in(var) == 0:
            continue
        if not _var_bound_zero(base, f, g, var, rng):
            return False
    return True


def poly_gcd(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    """A greatest common divisor, monic-normalized when univariate.

    Multivariate recursion by primitive remainder sequences in variable 0,
    after stripping the common monomial factor and attempting a cheap
    coprimality certificate; any associate of the gcd serves the
    rational-function normalization, which rescales afterwards.
    """
    f._check_mate(g)
    base = f.base
    if f.is_zero:
        return g
    if g.is_zero:
        return f
    if f.nvars == 0:
        return SparsePoly.const(base, 0, base.one)
    if f.nvars == 1:
        return _gcd_univariate(f, g)

    sf, sg = _min_exps(f), _min_exps(g)
    mono = SparsePoly.make(base, f.nvars, [(tuple(min(a, b) for a, b in zip(sf, sg)), base.one)])
    f, g = _shift_down(f, sf), _shift_down(g, sg)
    if f.is_constant or g.is_constant or _certified_coprime(f, g):
        return mono

    cf, cg = poly_content(f), poly_content(g)
    cont = poly_gcd(cf, cg)
    a = _primitive_part(f, cf)
    b = _primitive_part(g, cg)
    while not b.is_zero:
        r = _pseudo_rem(a, b)
        if not r.is_zero:
            r = _primitive_part(r, poly_content(r))
        a, b = b, r
    lifted_cont = cont.map_vars(list(range(1, f.nvars)), f.nvars)
    return mono * lifted_cont * a


def _primitive_part(f: SparsePoly, content: SparsePoly) -> SparsePoly:
    if content.is_zero:
        return f
    coeffs = _split_main(f)
    out = {d: poly_divexact(c, content) for d, c in coeffs.items()}
    return _join_main(f.base, f.nvars, out)


def _pseudo_rem(a: SparsePoly, b: SparsePoly) -> SparsePoly:
    """Pseudo remainder of a by b in variable 0.

    Multiplies by powers of b's leading coefficient instead of dividing,
    so every step stays inside the polynomial ring; the leading terms
    cancel exactly, which forces the main-variable degree down each pass.
    """
    nv = a.nvars

    def lift(p: SparsePoly) -> SparsePoly:
        return p.map_vars(list(range(1, nv)), nv)

    cb = _split_main(b)
    db = max(cb)
    lead_b = lift(cb[db])
    r = a
    while not r.is_zero:
        cr = _split_main(r)
        dr = max(cr)
        if dr < db:
            break
        shift = SparsePoly.make(a.base, nv, [((dr - db,) + (0,) * (nv - 1), a.base.one)])
        r = lead_b * r - shift * lift(cr[dr]) * b
    return r


def poly_divexact(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    """Exact quotient f/g; raises if g does not divide f."""
    if g.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    base = f.base
    rem = f._dict()
    out: dict[Exps, Scalar] = {}
    ge, gc = g.leading()
    while rem:
        e = max(rem, key=_grlex_key)
        c = rem[e]
        qe = tuple(a - b for a, b in zip(e, ge))
        if any(x < 0 for x in qe):
            raise PreconditionError("polynomial division is not exact")
        qc = base.div(c, gc)
        out[qe] = base.add(out.get(qe, base.zero), qc)
        for te, tc in g.terms:
            key = tuple(a + b for a, b in zip(qe, te))
            val = base.sub(rem.get(key, base.zero), base.mul(qc, tc))
            if val == 0:
                rem.pop(key, None)
            else:
                rem[key] = val
    return SparsePoly.make(base, f.nvars, list(out.items()))


# ---------------------------------------------------------------------------
# Rational functions


@dataclass(frozen=True)
class RationalFunction:
    num: SparsePoly
    den: SparsePoly

    @staticmethod
    def make(num: SparsePoly, den: SparsePoly) -> "RationalFunction":
        num._check_mate(den)
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        base = num.base
        if num.is_zero:
            return RationalFunction(num, SparsePoly.const(base, num.nvars, base.one))
        g = poly_gcd(num, den)
        if not g.is_constant:
            num = poly_divexact(num, g)
            den = poly_divexact(den, g)
        if base.is_rationals:
            scale = Fraction(
                math.lcm(*(Fraction(c).denominator for _, c in num.terms + den.terms))
            )
            ni = [(e, Fraction(c) * scale) for e, c in num.terms]
            di = [(e, Fraction(c) * scale) for e, c in den.terms]
            content = math.gcd(*(int(c) for _, c in ni + di))
            lead_sign = 1 if di[0][1] > 0 else -1
            k = Fraction(lead_sign, content)
            num = SparsePoly.make(base, num.nvars, [(e, c * k) for e, c in ni])
            den = SparsePoly.make(base, num.nvars, [(e, c * k) for e, c in di])
        else:
            inv = base.inv(den.leading()[1])
            num = num.scale(inv)
            den = den.scale(inv)
        return RationalFunction(num, den)

    @staticmethod
    def from_poly(p: SparsePoly) -> "RationalFunction":
        return RationalFunction.make(p, SparsePoly.const(p.base, p.nvars, p.base.one))

    @staticmethod
    def const(base: BaseField, nvars: int, c) -> "RationalFunction":
        return RationalFunction.from_poly(SparsePoly.const(base, nvars, c))

    @staticmethod
    def variable(base: BaseField, nvars: int, i: int) -> "RationalFunction":
        return RationalFunction.from_poly(SparsePoly.variable(base, nvars, i))

    @property
    def base(self) -> BaseField:
        return self.num.base

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    def constant_value(self) -> Scalar:
        if not self.is_constant:
            raise PreconditionError("rational function is not constant")
        if self.num.is_zero:
            return self.base.zero
        return self.base.div(self.num.constant_value(), self.den.constant_value())

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.make(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.make(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction.make(self.num * other.den, self.den * other.num)

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            if self.is_zero:
                raise ZeroDivisionError("negative power of zero")
            return RationalFunction.make(self.den, self.num) ** (-n)
        out = RationalFunction.const(self.base, self.nvars, self.base.one)
        square = self
        while n:
            if n & 1:
                out = out * square
            n >>= 1
            if n:
                square = square * square
        return out

    def map_vars(self, mapping, new_nvars: int) -> "RationalFunction":
        return RationalFunction.make(
            self.num.map_vars(mapping, new_nvars), self.den.map_vars(mapping, new_nvars)
        )

    def evaluate(self, args) -> Scalar:
        d = self.den.evaluate(args)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.base.div(self.num.evaluate(args), d)

    def __str__(self):
        return ratfun_str(self, default_names(self.nvars))


def ratfun_str(f: RationalFunction, names) -> str:
    if f.den.is_constant and f.den.constant_value() == f.base.one:
        return poly_str(f.num, names)
    return f"({poly_str(f.num, names)})/({poly_str(f.den, names)})"


def substitute(f: SparsePoly, args) -> RationalFunction:
    """Evaluate f at rational-function arguments, one per variable."""
    args = list(args)
    if len(args) != f.nvars:
        raise PreconditionError("wrong number of substitution arguments")
    if not args:
        return RationalFunction.const(f.base, 0, f.constant_value() if not f.is_zero else 0)
    target_nvars = args[0].nvars
    base = f.base
    for a in args:
        if a.nvars != target_nvars or a.base != base:
            raise PreconditionError("substitution arguments live in different fields")
    if f.is_zero:
        return RationalFunction.const(base, target_nvars, 0)
    degs = [f.degree_in(i) for i in range(f.nvars)]
    num_acc = SparsePoly.zero(base, target_nvars)
    for e, c in f.terms:
        term = SparsePoly.const(base, target_nvars, c)
        for i, k in enumerate(e):
            term = term * (args[i].num ** k) * (args[i].den ** (degs[i] - k))
        num_acc = num_acc + term
    den_acc = SparsePoly.const(base, target_nvars, base.one)
    for i, d in enumerate(degs):
        den_acc = den_acc * (args[i].den ** d)
    return RationalFunction.make(num_acc, den_acc)


def substitute_ratfun(f: RationalFunction, args) -> RationalFunction:
    num = substitute(f.num, args)
    den = substitute(f.den, args)
    if den.is_zero:
        raise ZeroDivisionError("denominator vanishes under substitution")
    return num / den


def laurent_monomial_substitute(f: SparsePoly, matrix) -> RationalFunction:
    """Substitute x_i -> prod_j x'_j ** matrix[i][j] for the leading variables.

    ``matrix`` must be square, integer, and unimodular; it acts on the first
    len(matrix) variables of f, any remaining variables pass through.
    Negative result exponents go to the denominator.
    """
    k = len(matrix)
    if any(len(row) != k for row in matrix):
        raise PreconditionError("exponent matrix must be square")
    if f.nvars < k:
        raise PreconditionError("polynomial has fewer variables than the matrix")
    if int_det(matrix) not in (1, -1):
        raise PreconditionError("exponent matrix is not unimodular")
    new_terms: list[tuple[list[int], Scalar]] = []
    for e, c in f.terms:
        head = [sum(e[i] * matrix[i][j] for i in range(k)) for j in range(k)]
        new_terms.append((head + list(e[k:]), c))
    mins = [0] * f.nvars
    for vec, _ in new_terms:
        for j, x in enumerate(vec):
            mins[j] = min(mins[j], x)
    num = SparsePoly.make(
        f.base, f.nvars,
        [(tuple(x - m for x, m in zip(vec, mins)), c) for vec, c in new_terms],
    )
    den = SparsePoly.make(f.base, f.nvars, [(tuple(-m for m in mins), f.base.one)])
    return RationalFunction.make(num, den)
