"""Finitely generated ordered abelian groups of real-lexicographic type.

A group order is a tuple of blocks; each block is a tuple of positive
``SurdScalar`` weights that are linearly independent over the rationals.
An element is an integer (or rational) coordinate vector split across the
blocks; its sign is decided lexicographically, block by block, where the
contribution of a block is the exact real number  sum(coord * weight).

Independence of the weights inside a block makes the per-block value map
injective on rational vectors, which several algorithms here rely on:
distinct basis rows always have distinct values, and the minimal-value row
in the Perron reduction is unique.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionError, InputError, PreconditionError, ResourceError
from .surd import SurdScalar

DEFAULT_MAX_PERRON_STEPS = 10_000
_ENV_CAP = "UNIFORMIZER_MAX_PERRON_STEPS"


def is_independent(weights) -> bool:
    """Whether the given SurdScalars are linearly independent over Q."""
    weights = list(weights)
    radicands = sorted({d for w in weights for _, d in w.terms})
    index = {d: i for i, d in enumerate(radicands)}
    rows = []
    for w in weights:
        row = [Fraction(0)] * len(radicands)
        for q, d in w.terms:
            row[index[d]] = q
        rows.append(row)
    return _row_rank(rows) == len(weights)


def _row_rank(rows) -> int:
    rows = [row[:] for row in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class GroupOrder:
    """Blocks of weights defining a lexicographic product of rank-1 groups."""

    blocks: tuple[tuple[SurdScalar, ...], ...]

    def __post_init__(self):
        for b, block in enumerate(self.blocks):
            if not block:
                raise PreconditionError(f"block {b} is empty")
            for w in block:
                if w.sign() != 1:
                    raise PreconditionError(f"weight {w} in block {b} is not positive")
            if not is_independent(block):
                raise PreconditionError(
                    f"weights in block {b} are linearly dependent over Q"
                )

    @property
    def ngens(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def nblocks(self) -> int:
        return len(self.blocks)

    def element(self, coords) -> "GroupElement":
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != self.ngens:
            raise DimensionError(
                f"expected {self.ngens} coordinates, got {len(coords)}"
            )
        return GroupElement(self, coords)

    def zero(self) -> "GroupElement":
        return GroupElement(self, (Fraction(0),) * self.ngens)

    def standard_basis(self, i: int) -> "GroupElement":
        coords = [Fraction(0)] * self.ngens
        coords[i] = Fraction(1)
        return GroupElement(self, tuple(coords))

    def block_values(self, coords) -> list[SurdScalar]:
        """Exact real contribution of each block for the given coordinates."""
        out, at = [], 0
        for block in self.blocks:
            acc = SurdScalar()
            for w in block:
                acc = acc + w.scale(coords[at])
                at += 1
            out.append(acc)
        return out


@dataclass(frozen=True)
class GroupElement:
    order: GroupOrder
    coords: tuple[Fraction, ...]

    def _need_same(self, other: "GroupElement"):
        if not isinstance(other, GroupElement) or other.order != self.order:
            raise DimensionError("elements belong to different ordered groups")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._need_same(other)
        return GroupElement(self.order, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._need_same(other)
        return GroupElement(self.order, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.order, tuple(-a for a in self.coords))

    def scale(self, n) -> "GroupElement":
        n = Fraction(n)
        return GroupElement(self.order, tuple(n * a for a in self.coords))

    def sign(self) -> int:
        for v in self.order.block_values(self.coords):
            s = v.sign()
            if s:
                return s
        return 0

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def __str__(self):
        vals = self.order.block_values(self.coords)
        body = ", ".join(str(v) for v in vals)
        return body if self.order.nblocks > 1 else body or "0"


def compare(a: GroupElement, b: GroupElement) -> int:
    """-1, 0, or 1 as a is below, equal to, or above b in the group order."""
    a._need_same(b)
    return (a - b).sign()


def rational_rank(order: GroupOrder) -> int:
    # weights are independent within each block, so the generators are free
    return order.ngens


@dataclass(frozen=True)
class ConvexDecomposition:
    """Split after the first k blocks: quotient on top, convex subgroup below."""

    order: GroupOrder
    k: int
    quotient: GroupOrder
    subgroup: GroupOrder

    def project_quotient(self, e: GroupElement) -> GroupElement:
        n = self.quotient.ngens
        return self.quotient.element(e.coords[:n])

    def project_subgroup(self, e: GroupElement) -> GroupElement:
        n = self.quotient.ngens
        return self.subgroup.element(e.coords[n:])


def convex_decompose(order: GroupOrder, k: int) -> ConvexDecomposition:
    """Decompose along the convex subgroup spanned by blocks k..end."""
    if not 0 <= k <= order.nblocks:
        raise PreconditionError(
            f"split index {k} out of range for {order.nblocks} blocks"
        )
    return ConvexDecomposition(
        order, k, GroupOrder(order.blocks[:k]), GroupOrder(order.blocks[k:])
    )


# ---------------------------------------------------------------------------
# Perron-style positive bases


@dataclass(frozen=True)
class PerronResult:
    """A positive basis together with the coordinates of the inputs.

    ``change`` holds the basis rows in the original generators, ``coeffs``
    holds one non-negative integer row per input alpha, so that
    alphas[i] == sum_j coeffs[i][j] * basis[j].  The output is not
    canonical; ``perron_is_valid`` is the contract.
    """

    basis: tuple[GroupElement, ...]
    coeffs: tuple[tuple[int, ...], ...]
    change: tuple[tuple[int, ...], ...]


def int_det(matrix) -> int:
    """Exact determinant of an integer matrix (Bareiss elimination)."""
    m = [list(map(int, row)) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def unimodular_inverse(matrix) -> list[list[int]]:
    """Inverse of an integer matrix with determinant +-1, as integers."""
    n = len(matrix)
    aug = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if pivot is None:
            raise PreconditionError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    out = []
    for i in range(n):
        row = []
        for j in range(n, 2 * n):
            if aug[i][j].denominator != 1:
                raise PreconditionError("matrix is not unimodular")
            row.append(int(aug[i][j]))
        out.append(row)
    return out


class _Budget:
    def __init__(self, steps: int):
        self.left = steps

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise _CapExceeded()


class _CapExceeded(Exception):
    pass


def _block_value(weights, row) -> SurdScalar:
    acc = SurdScalar()
    for w, c in zip(weights, row):
        acc = acc + w.scale(c)
    return acc


def _floor_ratio(num: SurdScalar, den: SurdScalar) -> int:
    """Largest integer q with q*den <= num, for positive num and den."""
    if (num - den).sign() < 0:
        return 0
    q = 1
    while (num - den.scale(2 * q)).sign() >= 0:
        q *= 2
    lo, hi = q, 2 * q  # den*lo <= num < den*hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if (num - den.scale(mid)).sign() >= 0:
            lo = mid
        else:
            hi = mid
    return lo


def _perron_single_block(weights, alphas, budget: _Budget):
    """Positive basis for one rank-1 block by floor-quotient reduction.

    Repeatedly subtracts the minimal-value basis row from the others until
    every input coordinate row is non-negative.  Values of distinct basis
    rows are always distinct (independent weights), so the minimal row is
    unique and every quotient is at least 1.
    """
    r = len(weights)
    basis = [[int(i == j) for j in range(r)] for i in range(r)]
    vals = [SurdScalar() + w for w in weights]
    coeffs = [list(map(int, a)) for a in alphas]
    if r == 1:
        # a single positive weight: non-negative value forces a non-negative
        # coordinate, so the identity basis already works
        if any(row[0] < 0 for row in coeffs):
            raise PreconditionError("negative coordinate on a single positive weight")
        return basis, coeffs
    while any(c < 0 for row in coeffs for c in row):
        m = 0
        for j in range(1, r):
            if (vals[j] - vals[m]).sign() < 0:
                m = j
        for j in range(r):
            if j == m:
                continue
            budget.spend()
            q = _floor_ratio(vals[j], vals[m])
            basis[j] = [a - q * b for a, b in zip(basis[j], basis[m])]
            vals[j] = vals[j] - vals[m].scale(q)
            for row in coeffs:
                row[m] += q * row[j]
    return basis, coeffs


def brute_force_positive_basis(weights, alphas, bound: int):
    """Exhaustive search for a valid basis with entries bounded by ``bound``.

    Independent of the reduction above; used as its fallback and as a test
    oracle.  Returns (basis_rows, coeff_rows) or None if no basis with the
    given entry bound exists.
    """
    r = len(weights)
    rows = []
    for v in itertools.product(range(-bound, bound + 1), repeat=r):
        if _block_value(weights, v).sign() == 1:
            rows.append(list(v))
    rows.sort(key=lambda v: (max(abs(c) for c in v), v))

    def extend(chosen):
        if len(chosen) == r:
            if int_det(chosen) not in (1, -1):
                return None
            inv = unimodular_inverse(chosen)
            coeffs = []
            for a in alphas:
                row = [sum(int(a[i]) * inv[i][j] for i in range(r)) for j in range(r)]
                if any(c < 0 for c in row):
                    return None
                coeffs.append(row)
            return [row[:] for row in chosen], coeffs
        for v in rows:
            if _row_rank([[Fraction(c) for c in row] for row in chosen + [v]]) == len(chosen) + 1:
                hit = extend(chosen + [v])
                if hit is not None:
                    return hit
        return None

    return extend([])


def _perron_block_guarded(weights, alphas, budget: _Budget):
    try:
        return _perron_single_block(weights, list(alphas), budget)
    except _CapExceeded:
        bound = 10 if len(weights) <= 2 else 2
        hit = brute_force_positive_basis(weights, alphas, bound)
        if hit is None:
            raise ResourceError(
                "positive-basis reduction exceeded its step cap and the bounded "
                f"search (entries up to {bound}) found no basis; raise "
                f"{_ENV_CAP} to allow more steps"
            ) from None
        return hit


def _perron_multi(blocks, alphas, budget: _Budget):
    width = sum(len(b) for b in blocks)
    if len(blocks) == 1:
        return _perron_block_guarded(blocks[0], alphas, budget)
    r1 = len(blocks[0])
    splus = [k for k, a in enumerate(alphas) if any(a[:r1])]
    s0 = [k for k, a in enumerate(alphas) if not any(a[:r1])]
    top, n_top = _perron_block_guarded(blocks[0], [alphas[k][:r1] for k in splus], budget)
    low, n_low = _perron_multi(blocks[1:], [alphas[k][r1:] for k in s0], budget)
    rest = width - r1
    low_inv = unimodular_inverse(low)
    low_sum = [sum(low[l][c] for l in range(rest)) for c in range(rest)]

    # Coordinates of the tails of the positive-block alphas on the lower basis.
    tails = []
    shift = 1
    for pos, k in enumerate(splus):
        tail = alphas[k][r1:]
        p = [sum(int(tail[i]) * low_inv[i][l] for i in range(rest)) for l in range(rest)]
        tails.append(p)
        worst = max((-c for c in p), default=0)
        shift = max(shift, 1 + worst)

    # Lower the lifted top rows far enough that every tail coordinate,
    # corrected by shift * (row sum of the top coefficients), is >= 0.
    basis = [top[j] + [-shift * c for c in low_sum] for j in range(r1)]
    basis += [[0] * r1 + low[l] for l in range(rest)]

    coeffs: list[list[int]] = [[] for _ in alphas]
    for pos, k in enumerate(splus):
        s = sum(n_top[pos])
        coeffs[k] = list(n_top[pos]) + [tails[pos][l] + shift * s for l in range(rest)]
    for pos, k in enumerate(s0):
        coeffs[k] = [0] * r1 + list(n_low[pos])
    return basis, coeffs


def _resolve_cap(max_steps: int | None) -> int:
    if max_steps is not None:
        return max_steps
    raw = os.environ.get(_ENV_CAP)
    if raw is None:
        return DEFAULT_MAX_PERRON_STEPS
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"{_ENV_CAP} must be an integer, got {raw!r}") from exc


def perron_positive_basis(order: GroupOrder, alphas, max_steps: int | None = None) -> PerronResult:
    """Basis of the group with positive rows expressing the alphas positively.

    Every alpha must be a non-negative integer vector element of ``order``.
    Returns rows forming a unimodular change of generators, each of positive
    value, such that each alpha is a non-negative integer combination of the
    rows.  Raises ResourceError when the step cap (argument, else the
    UNIFORMIZER_MAX_PERRON_STEPS environment variable, else 10000) is
    exhausted and the bounded fallback search fails.
    """
    alphas = list(alphas)
    vectors = []
    for a in alphas:
        if not isinstance(a, GroupElement):
            a = order.element(a)
        elif a.order != order:
            raise DimensionError("alpha belongs to a different ordered group")
        if any(c.denominator != 1 for c in a.coords):
            raise PreconditionError(f"alpha {a.coords} has non-integer coordinates")
        if a.sign() < 0:
            raise PreconditionError(f"alpha with value {a} is negative")
        vectors.append([int(c) for c in a.coords])

    budget = _Budget(_resolve_cap(max_steps))
    rows, coeffs = _perron_multi(order.blocks, vectors, budget)
    result = PerronResult(
        basis=tuple(order.element(row) for row in rows),
        coeffs=tuple(tuple(int(c) for c in row) for row in coeffs),
        change=tuple(tuple(int(c) for c in row) for row in rows),
    )
    if not perron_is_valid(order, alphas, result):
        raise ResourceError("reduction produced an invalid basis")  # pragma: no cover
    return result


def perron_is_valid(order: GroupOrder, alphas, result: PerronResult) -> bool:
    """Check the full contract of ``perron_positive_basis`` on a candidate."""
    n = order.ngens
    change = [list(row) for row in result.change]
    if len(change) != n or any(len(row) != n for row in change):
        return False
    if int_det(change) not in (1, -1):
        return False
    if len(result.basis) != n:
        return False
    for el, row in zip(result.basis, result.change):
        if el.order != order or tuple(el.coords) != tuple(Fraction(c) for c in row):
            return False
        if el.sign() != 1:
            return False
    if len(result.coeffs) != len(list(alphas)):
        return False
    for a, row in zip(alphas, result.coeffs):
        if len(row) != n or any((not isinstance(c, int)) or c < 0 for c in row):
            return False
        target = a if isinstance(a, GroupElement) else order.element(a)
        combo = order.zero()
        for c, b in zip(row, result.basis):
            combo = combo + b.scale(c)
        if combo.coords != target.coords:
            return False
    return True
