import json
from fractions import Fraction

import pytest

from padic_heights.curve import CurveModel, Form, local_coords_line
from padic_heights.errors import NonOrdinaryError, WeierstrassDiscError
from padic_heights.frobenius import (FrobData, explicit_subspace, frobenius_matrix,
                                     frobenius_on_point, reduce_cohomology, unit_root_subspace)
from padic_heights.heights import cup_matrix
from padic_heights.linalg import det, matmul, solve, transpose
from padic_heights.padic import Padic, Qp, teichmuller

from conftest import GENUS1, GENUS2


# -- brute-force point counts --------------------------------------------------

def count_fp(f, p):
    n = 1
    for x in range(p):
        v = sum(c * x ** k for k, c in enumerate(f)) % p
        n += 1 if v == 0 else (2 if pow(v, (p - 1) // 2, p) == 1 else 0)
    return n


def count_fp2(f, p):
    """#C(F_{p^2}) with F_{p^2} = F_p[i]/(i^2 - r), r a non-residue."""
    r = next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1)

    def mul(a, b):
        return ((a[0] * b[0] + r * a[1] * b[1]) % p, (a[0] * b[1] + a[1] * b[0]) % p)

    n = 1
    for x0 in range(p):
        for x1 in range(p):
            x = (x0, x1)
            v, xk = (0, 0), (1, 0)
            for c in f:
                v = ((v[0] + c * xk[0]) % p, (v[1] + c * xk[1]) % p)
                xk = mul(xk, x)
            if v == (0, 0):
                n += 1
            else:
                norm = (v[0] * v[0] - r * v[1] * v[1]) % p
                n += 2 if pow(norm, (p - 1) // 2, p) == 1 else 0
    return n


def zeta_char_poly(f, p, g):
    """Coefficients (low first) of the reversed L-polynomial from point counts."""
    s1 = p + 1 - count_fp(f, p)
    if g == 1:
        return [p, -s1, 1]
    s2 = p * p + 1 - count_fp2(f, p)
    e2 = (s1 * s1 - s2) // 2
    return [p * p, -p * s1, e2, -s1, 1]


FROB_CASES = [(GENUS1, 7), (GENUS1, 13), (GENUS2, 11)]


@pytest.fixture(scope="module")
def frobs():
    out = {}
    for f, p in FROB_CASES:
        C = CurveModel(f, p, 16)
        out[(len(f), p)] = (C, frobenius_matrix(C, 8, use_cache=False))
    return out


def test_brute_force_counts_sanity():
    assert (count_fp(GENUS2, 11), count_fp2(GENUS2, 11)) == (16, 118)
    assert (count_fp(GENUS1, 13), count_fp(GENUS1, 7)) == (18, 8)
    # Hasse-Weil: y^2 = x^3 - 5x is supersingular at 7 (p = 3 mod 4)
    assert zeta_char_poly(GENUS1, 7, 1) == [7, 0, 1]


@pytest.mark.parametrize("f,p", FROB_CASES)
def test_char_poly_matches_point_counts(frobs, f, p):
    C, fd = frobs[(len(f), p)]
    cp = fd.char_poly()
    want = zeta_char_poly(f, p, C.g)
    for c, w in zip(cp, want):
        assert (c - w).add_bigoh(fd.prec - 2).is_zero(), (str(c), w)


@pytest.mark.parametrize("f,p", FROB_CASES)
def test_frobenius_invariants(frobs, f, p):
    C, fd = frobs[(len(f), p)]
    assert det(fd.M).val == C.g
    one = Padic.from_rational(p, 1, 30)
    MI = [[fd.M[i][j] - (one if i == j else 0) for j in range(2 * C.g)] for i in range(2 * C.g)]
    assert not det(MI).is_zero()
    # compatibility with the cup product: (Fa) u (Fb) = p (a u b)
    N = cup_matrix(C).padic(p, 30)
    lhs = matmul(matmul(fd.M, N), transpose(fd.M))
    for i in range(2 * C.g):
        for j in range(2 * C.g):
            assert (lhs[i][j] - N[i][j] * p).add_bigoh(fd.prec - 1).is_zero()


def test_frobenius_on_point():
    C = CurveModel(GENUS2, 11, 12)
    R = C.point(5, 30)
    fR = frobenius_on_point(C, R)
    assert (fR.x - Padic.from_rational(11, 5 ** 11, 12)).is_zero()
    assert fR.same_disc(R)
    # a Teichmueller point is fixed
    x = teichmuller(Qp(11, 12)(5))
    T = C.lift_x(x, sign_digit=R.y.residue())
    fT = frobenius_on_point(C, T)
    assert fT == T
    with pytest.raises(WeierstrassDiscError):
        frobenius_on_point(C, C.point(0, 0))


def _exact_series(fd, i, xt, yt):
    yinv = yt.inverse()
    total = None
    for s, h in fd.exact[i].items():
        term = h(xt) * (yt if s == -1 else yinv ** s)
        total = term if total is None else total + term
    return total


def test_defining_identity_as_series(frobs):
    """phi^* omega_i = d f_i + sum_j M_ij omega_j on the disc of (5, 30)."""
    C, fd = frobs[(len(GENUS2), 11)]
    p = 11
    R = C.point(5, 30)
    order, digits = 8, 6
    xt, yt = local_coords_line(C, R, Padic.from_rational(p, p, 16), order)
    xp = xt ** p
    Yt = C.f(xp).sqrt(pow(R.y.residue(), p, p))
    for i in range(2 * C.g):
        pull = (xp ** i) * xp.derivative() * Yt.inverse() * Fraction(1, 2)
        rhs = _exact_series(fd, i, xt, yt).derivative()
        for j in range(2 * C.g):
            rhs = rhs + Form.basis(C, j, 16).pullback(xt, yt) * fd.M[i][j]
        for k in range(order - 2):
            assert (pull.coefficient(k) - rhs.coefficient(k)).add_bigoh(digits).is_zero()


def test_reduce_cohomology_basis_and_exact():
    C = CurveModel(GENUS2, 11, 12)
    for i in range(4):
        coeffs, parts = reduce_cohomology(C, {1: [0] * i + [Fraction(1, 2)]}, 8)
        for j, c in enumerate(coeffs):
            assert (c - int(i == j)).is_zero()
    f = C.f_exact
    df = [k * c for k, c in enumerate(f)][1:]
    for k in range(0, 4):
        # d(x^k y) = (k x^(k-1) f + x^k f'/2) dx / y
        A = [Fraction(0)] * (len(f) + k + 1)
        for j, c in enumerate(f):
            if k:
                A[j + k - 1] += k * c
        for j, c in enumerate(df):
            A[j + k] += c / 2
        coeffs, _ = reduce_cohomology(C, {1: A}, 8)
        assert all(c.is_zero() for c in coeffs)


def test_reduce_cohomology_top_power_against_series():
    """x^(2g) dx/2y = sum c_i omega_i + dG, checked as series on a random disc."""
    C = CurveModel(GENUS2, 11, 16)
    coeffs, parts = reduce_cohomology(C, {1: [0, 0, 0, 0, Fraction(1, 2)]}, 10)
    fd = FrobData(11, 2, None, [parts], 10, 10, 0)
    Q = C.point(1, 6)
    xt, yt = local_coords_line(C, Q, Padic.from_rational(11, 1, 16), 10)
    lhs = Form.basis(C, 4, 16).pullback(xt, yt)
    rhs = _exact_series(fd, 0, xt, yt).derivative()
    for j in range(4):
        rhs = rhs + Form.basis(C, j, 16).pullback(xt, yt) * coeffs[j]
    for k in range(8):
        assert (lhs.coefficient(k) - rhs.coefficient(k)).add_bigoh(8).is_zero()


def test_unit_root_subspace(frobs):
    C, fd = frobs[(len(GENUS2), 11)]
    W = unit_root_subspace(fd)
    g, p = C.g, 11
    n = 6
    # complementarity determinant is a unit
    one = Padic.from_rational(p, 1, 30)
    zero = Padic.zero(p, 30)
    cols = [[one if i == j else zero for i in range(2 * g)] for j in range(g)] + W.vectors
    assert det(transpose(cols)).val == 0
    # Frobenius stability: F w lies in W
    F = fd.frob
    lower = [[W.vectors[c][r] for c in range(g)] for r in range(g, 2 * g)]
    for w in W.vectors:
        Fw = [sum((F[i][k] * w[k] for k in range(2 * g)), zero) for i in range(2 * g)]
        c = solve(lower, Fw[g:])
        for i in range(g):
            back = sum((W.vectors[k][i] * c[k] for k in range(g)), zero)
            assert (back - Fw[i]).add_bigoh(n).is_zero()
    # isotropic
    N = cup_matrix(C).padic(p, 30)
    a, b = W.vectors
    cupab = sum((a[i] * N[i][j] * b[j] for i in range(4) for j in range(4)), zero)
    assert cupab.add_bigoh(n).is_zero()


def test_genus1_omega1_policy(frobs):
    C, fd = frobs[(len(GENUS1), 13)]
    W = unit_root_subspace(fd, policy="g1-omega1")
    assert W.vectors[0][0].is_zero() and (W.vectors[0][1] - 1).is_zero()
    C2, fd2 = frobs[(len(GENUS2), 11)]
    with pytest.raises(NonOrdinaryError):
        unit_root_subspace(fd2, policy="g1-omega1")


def test_explicit_subspace_validation():
    C = CurveModel(GENUS2, 11, 10)
    W = explicit_subspace(C, [[0, 0, 1, 0], [0, 0, 0, 1]], 10)
    assert W.policy == "explicit"
    with pytest.raises(NonOrdinaryError):
        explicit_subspace(C, [[1, 0, 0, 0], [0, 1, 0, 0]], 10)


def test_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv("PADIC_HEIGHTS_CACHE", str(tmp_path))
    C = CurveModel(GENUS1, 7, 12)
    fd = frobenius_matrix(C, 6)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    again = frobenius_matrix(C, 6)
    assert again is not fd
    for r1, r2 in zip(fd.M, again.M):
        assert all(a.identical(b) for a, b in zip(r1, r2))
    assert json.dumps(again.to_json()) == json.dumps(fd.to_json())
