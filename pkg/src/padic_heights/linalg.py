"""Small dense linear algebra over Padic entries (Gaussian elimination)."""

from __future__ import annotations

from fractions import Fraction

from .errors import PadicDomainError
from .padic import Padic

Matrix = list[list[Padic]]


def identity(n: int, p: int, prec: int) -> Matrix:
    return [[Padic.from_rational(p, int(i == j), prec) for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[_dot(row, col) for col in bt] for row in a]


def matvec(a: Matrix, v: list) -> list:
    return [_dot(row, v) for row in a]


def _dot(u, v):
    total = None
    for x, y in zip(u, v):
        t = x * y
        total = t if total is None else total + t
    return total


def dot(u, v):
    return _dot(u, v)


def from_rationals(rows, p: int, prec: int) -> Matrix:
    return [[Padic.from_rational(p, Fraction(x), prec) for x in r] for r in rows]


def _eliminate(a: Matrix, rhs: list[list[Padic]]):
    """Row-reduce ``a`` in place with minimal-valuation pivots.

    Returns (pivot columns, sign of row permutation)."""
    n_rows, n_cols = len(a), len(a[0])
    sign = 1
    r = 0
    pivots = []
    for c in range(n_cols):
        best = None
        for i in range(r, n_rows):
            if not a[i][c].is_zero() and (best is None or a[i][c].val < a[best][c].val):
                best = i
        if best is None:
            continue
        if best != r:
            a[r], a[best] = a[best], a[r]
            rhs[r], rhs[best] = rhs[best], rhs[r]
            sign = -sign
        inv = a[r][c].inverse()
        for i in range(n_rows):
            if i == r or a[i][c].is_zero():
                continue
            factor = a[i][c] * inv
            a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
            rhs[i] = [x - factor * y for x, y in zip(rhs[i], rhs[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return pivots, sign


def solve_many(a: Matrix, b: Matrix) -> Matrix:
    """Solve a X = b for square invertible ``a``; ``b`` has one column per rhs."""
    n = len(a)
    a = [list(r) for r in a]
    rhs = [list(r) for r in b]
    pivots, _ = _eliminate(a, rhs)
    if len(pivots) < n:
        raise PadicDomainError("singular matrix at working precision")
    return [[x / a[i][i] for x in rhs[i]] for i in range(n)]


def solve(a: Matrix, b: list[Padic]) -> list[Padic]:
    return [r[0] for r in solve_many(a, [[x] for x in b])]


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    p = a[0][0].p
    prec = max(x.absprec for r in a for x in r)
    return solve_many(a, identity(n, p, max(prec, 1) + 5))


def det(a: Matrix) -> Padic:
    n = len(a)
    a = [list(r) for r in a]
    rhs = [[] for _ in range(n)]
    pivots, sign = _eliminate(a, rhs)
    p = a[0][0].p
    if len(pivots) < n:
        return Padic.zero(p, min(x.absprec for r in a for x in r))
    result = a[0][0] * sign
    for i in range(1, n):
        result = result * a[i][i]
    return result


def solve_consistent(a: Matrix, b: list[Padic]) -> list[Padic]:
    """Solve a possibly over-determined but consistent system.

    Free variables are set to zero; inconsistency raises."""
    n_rows, n_cols = len(a), len(a[0])
    a = [list(r) for r in a]
    rhs = [[x] for x in b]
    pivots, _ = _eliminate(a, rhs)
    for i in range(len(pivots), n_rows):
        if not rhs[i][0].is_zero():
            raise PadicDomainError("inconsistent linear system")
    p = b[0].p
    prec = max(x.absprec for x in b)
    x = [Padic.zero(p, prec + 10)] * n_cols
    for i, c in enumerate(pivots):
        x[c] = rhs[i][0] / a[i][c]
    return x
