"""Exact scalar arithmetic over the rationals and over prime fields.

Scalars are plain values: ``Fraction`` over the rationals, ``int`` in
``[0, p)`` over a prime field.  A ``BaseField`` instance supplies the
operations whose meaning depends on which field is intended, so polynomial
code can stay field-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import InputError, PreconditionError

Scalar = Union[Fraction, int]

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    # deterministic Miller-Rabin; the witness set covers all n < 3.3e24
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class BaseField:
    """The rationals when ``p`` is None, else the field with ``p`` elements."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or self.p >= 1 << 63:
                raise PreconditionError("characteristic must be a machine-word integer")
            if not _is_prime(self.p):
                raise PreconditionError(f"characteristic {self.p} is not prime")

    @property
    def is_rationals(self) -> bool:
        return self.p is None

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.p is None else 0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.p is None else 1

    def coerce(self, value) -> Scalar:
        """Bring an int, Fraction, or decimal/ratio string into canonical form."""
        if isinstance(value, str):
            value = parse_rational(value)
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise PreconditionError(f"cannot coerce {value!r} into the base field")
        if self.p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise PreconditionError(
                    f"denominator of {value} vanishes in characteristic {self.p}"
                )
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return value % self.p

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return (a + b) % self.p if self.p else a + b

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return (a - b) % self.p if self.p else a - b

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return (a * b) % self.p if self.p else a * b

    def neg(self, a: Scalar) -> Scalar:
        return -a % self.p if self.p else -a

    def inv(self, a: Scalar) -> Scalar:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / Fraction(a)
        return pow(a, -1, self.p)

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        return self.mul(a, self.inv(b))

    def scalar_str(self, a: Scalar) -> str:
        if self.p is None:
            f = Fraction(a)
            return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
        return str(a % self.p)

    def __str__(self):
        return "Q" if self.p is None else f"F{self.p}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` with optional sign; raise InputError otherwise."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


def QQ() -> BaseField:
    return BaseField(None)


def GF(p: int) -> BaseField:
    return BaseField(p)
