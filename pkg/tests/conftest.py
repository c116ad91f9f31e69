import pytest

from padic_heights.curve import AntisymDivisor
from padic_heights.heights import HeightContext
from padic_heights.padic import Padic, format_padic, parse_padic

# one "PASS/FAIL criterion k: ..." line per acceptance criterion, echoed in the summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


# y^2 = x^5 - 23x^3 + 18x^2 + 40x and y^2 = x^3 - 5x
GENUS2 = [0, 40, 18, -23, 0, 1]
GENUS1 = [0, -5, 0, 1]


def agrees(value: Padic, expected: str) -> bool:
    """value carries at least the digits of ``expected`` and matches them all."""
    want = parse_padic(expected)
    if value.absprec < want.absprec:
        return False
    return value.add_bigoh(want.absprec).identical(want)


def show(value: Padic, expected: str) -> str:
    want = parse_padic(expected)
    return f"got {format_padic(value.add_bigoh(max(want.absprec, value.val + 1)))}, want {expected}"


def pair(P):
    return AntisymDivisor([(P, 1)])


@pytest.fixture(scope="session")
def g2():
    return HeightContext.build(GENUS2, 11, 5)


@pytest.fixture(scope="session")
def g1():
    return HeightContext.build(GENUS1, 13, 5)


@pytest.fixture(scope="session")
def g2_points(g2):
    C = g2.C
    return {"P": C.point(-4, 24), "Q": C.point(1, 6), "R": C.point(5, 30), "S": C.point(-2, 12)}


def weierstrass_point(C, residue: int, t: int):
    """The point with y = t in the Weierstrass disc over x = residue mod p (v(t) >= 1)."""
    from padic_heights.curve import local_coords_weierstrass
    from padic_heights.polyseries import hensel_roots

    root = next(r for r in hensel_roots(C.f) if r.residue() == residue % C.p)
    xt, _ = local_coords_weierstrass(C, root, 3 * C.prec, C.prec)
    tt = Padic.from_rational(C.p, t, C.prec)
    return C.point(xt.evaluate(tt).add_bigoh(C.prec), tt)


def principal(C, pts):
    """div((y - b)/(y + b)) for b interpolating y through ``pts``, with b.

    The divisor is sum [(A) - (-A)] over the roots of f - b^2; None when
    those roots are not all in Q_p."""
    from padic_heights.curve import CurvePoint
    from padic_heights.errors import HeightError
    from padic_heights.polyseries import Poly, hensel_roots

    p, prec = C.p, C.prec
    one = Padic.from_rational(p, 1, prec)
    b = Poly([Padic.zero(p, prec)])
    for i, A in enumerate(pts):
        L = Poly([A.y])
        for j, B in enumerate(pts):
            if j != i:
                L = L * Poly([-B.x, one]) * (A.x - B.x).inverse()
        b = b + L
    h = C.f - b * b
    try:
        roots = hensel_roots(h.monic())
    except HeightError:
        return None
    if len(roots) != h.degree():
        return None
    return AntisymDivisor([(CurvePoint(r, b(r)), 1) for r in roots]), b


def rand_point(C, rng, weier=False):
    """A random Q_p-point, in a Weierstrass disc when ``weier``."""
    from padic_heights.errors import HeightError

    p = C.p
    roots = [r for r in range(p) if sum(c * r ** k for k, c in enumerate(C.f_exact)) % p == 0]
    while True:
        x = rng.choice(roots) + p * p * rng.randrange(1, p) if weier else rng.randrange(-50, 50)
        try:
            P = C.lift_x(Padic.from_rational(p, x, C.prec))
        except HeightError:
            continue
        if weier != C.is_weierstrass(P):
            continue
        return -P if rng.random() < 0.5 else P
