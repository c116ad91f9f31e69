"""Odd-degree hyperelliptic curves y^2 = f(x): points, local charts, divisors, forms."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import (BadReductionError, DiscMismatchError, SupportOverlapError,
                     ValidationError, WeierstrassDiscError)
from .padic import Padic, RingElement, sqrt
from .polyseries import (Poly, TruncatedSeries, crt_combine, fp_gcd, fp_roots, fp_trim,
                         hensel_factor, hensel_factor_all, hensel_roots)


class CurveModel:
    """y^2 = f(x) over Q_p with f monic of degree 2g+1 and good reduction at p."""

    def __init__(self, f: Sequence, p: int, prec: int = 20):
        if p < 3:
            raise ValidationError("p must be an odd prime")
        coeffs = list(f)
        self.p = p
        self.prec = prec
        if all(isinstance(c, (int, Fraction)) for c in coeffs):
            self.f_exact = [Fraction(c) for c in coeffs]
            self.f = Poly.from_rationals(p, self.f_exact, prec)
        else:
            self.f_exact = None
            self.f = Poly([c if isinstance(c, Padic) else Padic.from_rational(p, c, prec) for c in coeffs])
        deg = len(coeffs) - 1
        if deg < 3 or deg % 2 == 0:
            raise ValidationError(f"f must have odd degree >= 3, got {deg}")
        if not self.f.is_monic():
            raise ValidationError("f must be monic")
        if any(c.val < 0 for c in self.f.coeffs if not c.is_zero()):
            raise BadReductionError("f has non-integral coefficients at p")
        self.g = (deg - 1) // 2
        self.fbar = self.f.reduce_mod_p()
        dbar = fp_trim([(k * c) % p for k, c in enumerate(self.fbar)][1:])
        if len(fp_gcd(self.fbar, dbar, p)) > 1:
            raise BadReductionError("f mod p has a repeated root")
        self.df = self.f.derivative()
        self.weierstrass_residues = fp_roots(self.fbar, p)

    def at_precision(self, prec: int) -> CurveModel:
        if self.f_exact is None:
            return self
        return CurveModel(self.f_exact, self.p, prec)

    def key(self):
        return (self.p, tuple(str(c) for c in (self.f_exact or [str(c) for c in self.f.coeffs])))

    def __repr__(self):
        return f"CurveModel(y^2 = {self.f}, p={self.p}, g={self.g})"

    # -- points -------------------------------------------------------
    def point(self, x, y, check: bool = True) -> CurvePoint:
        K = lambda v: v if isinstance(v, (Padic, RingElement)) else Padic.from_rational(self.p, v, self.prec)
        P = CurvePoint(K(x), K(y))
        if check:
            r = P.y * P.y - self.f(P.x)
            if not r.is_zero():
                raise ValidationError(f"point ({x}, {y}) is not on the curve")
        return P

    def lift_x(self, x, sign_digit: int | None = None) -> CurvePoint:
        x = x if isinstance(x, Padic) else Padic.from_rational(self.p, x, self.prec)
        return CurvePoint(x, sqrt(self.f(x), sign_digit))

    def is_weierstrass(self, P: CurvePoint) -> bool:
        """Whether P lies in a Weierstrass residue disc (or is infinite)."""
        if P.infinite:
            return True
        if isinstance(P.x, Padic) and P.x.val < 0:
            return True
        return P.y_residue_is_zero()

    def weierstrass_factors(self) -> list[Poly]:
        """f split over Z_p into lifts of its F_p-irreducible factors."""
        return hensel_factor_all(self.f)

    def frev(self) -> Poly:
        return Poly(list(reversed(self.f.coeffs)))


class CurvePoint:
    __slots__ = ("x", "y", "infinite")

    def __init__(self, x=None, y=None, infinite: bool = False):
        self.x = x
        self.y = y
        self.infinite = infinite

    @property
    def p(self):
        return self.x.p if isinstance(self.x, Padic) else self.x.ring.p

    def __neg__(self) -> CurvePoint:
        return involution(self)

    def y_residue_is_zero(self) -> bool:
        if isinstance(self.y, Padic):
            return self.y.is_zero() or self.y.val >= 1
        return all(c.is_zero() or c.val >= 1 for c in self.y.coeffs)

    def residue(self):
        """(x mod p, y mod p) for a Q_p-point with integral coordinates."""
        if self.infinite or self.x.val < 0:
            return None
        return (self.x.residue(), self.y.residue())

    def same_disc(self, other: CurvePoint) -> bool:
        a, b = self.residue(), other.residue()
        return a is not None and a == b

    def __eq__(self, other):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        if self.infinite or other.infinite:
            return self.infinite and other.infinite
        return (self.x - other.x).is_zero() and (self.y - other.y).is_zero()

    __hash__ = None

    def __repr__(self):
        if self.infinite:
            return "CurvePoint(infinity)"
        return f"CurvePoint({self.x}, {self.y})"


INFINITY = CurvePoint(infinite=True)


def involution(P: CurvePoint) -> CurvePoint:
    if P.infinite:
        return P
    return CurvePoint(P.x, -P.y)


# ---------------------------------------------------------------------------
# local coordinates


def local_coords_interp(C: CurveModel, P: CurvePoint, Q: CurvePoint, order: int, prec: int | None = None):
    """x(t) = x(P) + t (x(Q) - x(P)), y(t) = sqrt(f(x(t))) with y(0) = y(P)."""
    if C.is_weierstrass(P) or C.is_weierstrass(Q):
        raise WeierstrassDiscError("linear interpolation needs non-Weierstrass discs")
    if not P.same_disc(Q):
        raise DiscMismatchError("points lie in different residue discs")
    return local_coords_line(C, P, Q.x - P.x, order, prec)


def local_coords_line(C: CurveModel, P: CurvePoint, delta: Padic, order: int, prec: int | None = None):
    """x(t) = x(P) + delta*t on the disc of a non-Weierstrass point P."""
    p = C.p
    if prec is None:
        prec = min(P.x.absprec, P.y.absprec)
    t = TruncatedSeries.gen(p, prec, order)
    xt = t * delta + P.x if not delta.is_zero() else TruncatedSeries.constant(P.x, order)
    yt = C.f(xt).sqrt(P.y.residue())
    return xt, yt


def local_coords_weierstrass(C: CurveModel, a_root, order: int, prec: int):
    """x(t) with f(x(t)) = t^2, x(0) = a_root; y(t) = t.

    ``a_root`` is a Padic or a RingElement (root over an unramified extension)."""
    p = C.p
    ring = a_root.ring if isinstance(a_root, RingElement) else None
    t = TruncatedSeries.gen(p, prec, order, ring)
    t2 = t * t
    dfa = C.df(a_root)
    inv = (dfa ** -1) if isinstance(dfa, RingElement) else dfa.inverse()
    xt = t2 * inv + a_root
    steps = max(order, 2).bit_length() + 1
    for _ in range(steps):
        xt = xt - (C.f(xt) - t2) * C.df(xt).inverse()
    return xt, t


class InfinityChart:
    """Expansions at infinity in t with t^2 = s f^rev(s), x = 1/s, y = t/s^(g+1)."""

    def __init__(self, C: CurveModel, order: int, prec: int):
        self.C = C
        g = C.g
        p = C.p
        t = TruncatedSeries.gen(p, prec, order + 2)
        t2 = t * t
        frev = C.frev()
        s = t2
        for _ in range(order // 2 + 2):
            s = (t2 * frev(s).inverse()).truncate(order + 2)
        self.s = s
        self.t = t
        self.ds = s.derivative()
        self.x = s.inverse()
        self.y = t * (s ** (g + 1)).inverse()
        self.dx = self.x.derivative()
        # s'/(2t) is a power series since s = t^2 * unit
        self._ds_over_2t = (self.ds.shift(-1) * Fraction(1, 2))

    def omega(self, i: int) -> TruncatedSeries:
        """Pullback of x^i dx/(2y) as a series in t (times dt)."""
        g = self.C.g
        e = g - 1 - i
        base = self._ds_over_2t if e == 0 else (self.s ** e if e > 0 else (self.s ** (-e)).inverse()) * self._ds_over_2t
        return -base

    def form(self, form: Form) -> TruncatedSeries:
        """Pullback of num(x)/den(x) dx/y."""
        num = form.num(self.x)
        den = form.den(self.x)
        if not isinstance(num, TruncatedSeries):
            num = TruncatedSeries.constant(num, self.x.order) * (self.x ** 0)
        if not isinstance(den, TruncatedSeries):
            return num * self.dx * self.y.inverse() / den
        return num * den.inverse() * self.dx * self.y.inverse()


def local_coords_infinity(C: CurveModel, order: int, prec: int) -> InfinityChart:
    return InfinityChart(C, order, prec)


# -- exact chart at infinity over Q (for the cup product matrix) -------------

def _q_mul(a, b, n):
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[:n - i]):
                out[i + j] += x * y
    return out


def _q_inv(a, n):
    """Inverse of a power series with nonzero constant term."""
    inv0 = 1 / a[0]
    out = [inv0] + [Fraction(0)] * (n - 1)
    for k in range(1, n):
        acc = sum((a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1)), Fraction(0))
        out[k] = -acc * inv0
    return out


def exact_omega_at_infinity(f: Sequence[Fraction], g: int, order: int) -> list[tuple[int, list[Fraction]]]:
    """Laurent expansions (start, coeffs) of x^i dx/(2y), i < 2g, at infinity over Q."""
    n = order + 4 * g + 4
    frev = list(reversed([Fraction(c) for c in f]))
    # s = t^2 w(t^2) with w = 1/frev(s); iterate on w as a series in u = t^2
    w = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for _ in range(n):
        s_u = [Fraction(0)] + w[:n - 1]  # s as a series in u
        fr = [Fraction(0)] * n
        power = [Fraction(1)] + [Fraction(0)] * (n - 1)
        for c in frev:
            fr = [a + c * b for a, b in zip(fr, power)]
            power = _q_mul(power, s_u, n)
        w = _q_inv(fr, n)
    # s(t) coefficients in t: s = sum w_k t^(2k+2)
    m = 2 * n
    s_t = [Fraction(0)] * m
    for k, c in enumerate(w):
        if 2 * k + 2 < m:
            s_t[2 * k + 2] = c
    # s'/(2t) as a power series in t
    ds2t = [Fraction(0)] * m
    for k in range(2, m):
        ds2t[k - 2] = k * s_t[k] / 2
    # s = t^2 * sw with sw a unit power series
    sw = s_t[2:] + [Fraction(0), Fraction(0)]
    out = []
    for i in range(2 * g):
        e = g - 1 - i
        if e >= 0:
            base = [Fraction(1)] + [Fraction(0)] * (m - 1)
            for _ in range(e):
                base = _q_mul(base, sw, m)
            start = 2 * e
        else:
            base = [Fraction(1)] + [Fraction(0)] * (m - 1)
            inv = _q_inv(sw, m)
            for _ in range(-e):
                base = _q_mul(base, inv, m)
            start = 2 * e
        series = [-c for c in _q_mul(base, ds2t, m)]
        out.append((start, series[:order + 4 * g + 4]))
    return out


# ---------------------------------------------------------------------------
# differential forms num(x)/den(x) dx/y


class Form:
    """The differential num(x)/den(x) dx/y with known simple poles.

    ``poles`` lists (point, residue) pairs; forms built from basis elements
    have none."""

    def __init__(self, num: Poly, den: Poly, poles: list | None = None):
        self.num = num
        self.den = den
        self.poles = poles or []

    @classmethod
    def basis(cls, C: CurveModel, i: int, prec: int) -> Form:
        p = C.p
        half = Padic.from_rational(p, Fraction(1, 2), prec)
        zero = Padic.zero(p, prec)
        one = Padic.from_rational(p, 1, prec)
        return cls(Poly([zero] * i + [half]), Poly([one]))

    def __add__(self, other: Form) -> Form:
        return Form(self.num * other.den + other.num * self.den, self.den * other.den,
                    self.poles + other.poles)

    def __neg__(self) -> Form:
        return Form(-self.num, self.den, [(P, -r) for P, r in self.poles])

    def __sub__(self, other: Form) -> Form:
        return self + (-other)

    def scale(self, c) -> Form:
        return Form(self.num * c, self.den, [(P, r * c) for P, r in self.poles])

    def minus_holomorphic(self, coeffs: Sequence[Padic]) -> Form:
        """self - sum_i coeffs[i] * x^i dx/(2y)."""
        half = Fraction(1, 2)
        poly = Poly([c * half for c in coeffs])
        return Form(self.num - self.den * poly, self.den, self.poles)

    def pullback(self, xt: TruncatedSeries, yt: TruncatedSeries) -> TruncatedSeries:
        """num(x(t))/den(x(t)) x'(t)/y(t) on a chart where den(x(t)) is invertible."""
        num = self.num(xt)
        den = self.den(xt)
        dx = xt.derivative()
        out = dx * yt.inverse()
        if isinstance(num, TruncatedSeries):
            out = out * num
        else:
            out = out.scale(num)
        if isinstance(den, TruncatedSeries):
            out = out * den.inverse()
        else:
            out = out.scale(den.inverse())
        return out

    def __repr__(self):
        return f"Form(({self.num}) / ({self.den}) dx/y)"


# ---------------------------------------------------------------------------
# divisors


class AntisymDivisor:
    """sum_i m_i [(P_i) - (-P_i)] with distinct x-coordinates and m_i > 0."""

    def __init__(self, terms: list[tuple[CurvePoint, int]]):
        merged: list[list] = []
        for P, m in terms:
            if P.infinite:
                raise ValidationError("antisymmetric divisors cannot involve infinity")
            if P.y_residue_is_zero() and (P.y.is_zero()):
                raise ValidationError("a Weierstrass point contributes nothing to D - w*D")
            for entry in merged:
                Q = entry[0]
                if (Q.x - P.x).is_zero():
                    if (Q.y - P.y).is_zero():
                        entry[1] += m
                    elif (Q.y + P.y).is_zero():
                        entry[1] -= m
                    else:
                        raise ValidationError("two points share x but are not negatives")
                    break
            else:
                merged.append([P, m])
        self.terms = []
        for P, m in merged:
            if m > 0:
                self.terms.append((P, m))
            elif m < 0:
                self.terms.append((involution(P), -m))

    @property
    def points(self):
        return [P for P, _ in self.terms]

    def is_empty(self) -> bool:
        return not self.terms

    def __add__(self, other: AntisymDivisor) -> AntisymDivisor:
        return AntisymDivisor(self.terms + other.terms)

    def __neg__(self) -> AntisymDivisor:
        return AntisymDivisor([(involution(P), m) for P, m in self.terms])

    def scale(self, k: int) -> AntisymDivisor:
        return AntisymDivisor([(P, k * m) for P, m in self.terms])

    def mumford(self) -> tuple[Poly, Poly]:
        """[a, b]: a = prod (x - x_i)^m_i, b interpolating y_i on the roots."""
        if not self.terms:
            raise ValidationError("empty divisor")
        P0 = self.terms[0][0]
        p = P0.p
        prec = min(min(P.x.absprec, P.y.absprec) for P in self.points)
        one = Padic.from_rational(p, 1, prec)
        a = Poly([one])
        b = Poly([Padic.zero(p, prec)])
        for P, m in self.terms:
            lin = Poly([-P.x, one])
            c = Poly([one])
            for _ in range(m):
                c = c * lin
            b = crt_combine(a, b, c, Poly([-P.y]))
            a = a * c
        return a, b

    def support_x(self):
        return [P.x for P in self.points]

    def __repr__(self):
        return "AntisymDivisor(" + " + ".join(f"{m}[{P} - w]" for P, m in self.terms) + ")"

    @classmethod
    def from_mumford(cls, C: CurveModel, a: Poly, b: Poly) -> AntisymDivisor:
        """Points of [a, b]; the roots of a must be simple modulo p."""
        roots = hensel_roots(a)
        if len(roots) != a.degree():
            raise ValidationError("a must split over Q_p with roots distinct mod p; give points instead")
        return cls([(CurvePoint(r, b(r)), 1) for r in roots])


class GeneralDivisor:
    """Degree-zero formal sum of Q_p-points."""

    def __init__(self, terms: list[tuple[CurvePoint, int]]):
        if sum(m for _, m in terms) != 0:
            raise ValidationError("divisor must have degree zero")
        if any(P.infinite for P, _ in terms):
            raise ValidationError("infinity is not allowed in the support")
        self.terms = [(P, m) for P, m in terms if m]

    @property
    def points(self):
        return [P for P, _ in self.terms]

    def __repr__(self):
        return "GeneralDivisor(" + " + ".join(f"{m}({P})" for P, m in self.terms) + ")"


class MumfordDivisor:
    """(a, b) representing sum of the points (x_i, b(x_i)) over roots of a, minus deg(a) infinity."""

    def __init__(self, a: Poly, b: Poly):
        if not a.is_monic():
            raise ValidationError("a must be monic")
        if b.degree() >= a.degree():
            b = b % a
        self.a = a
        self.b = b

    def points(self) -> list[CurvePoint]:
        roots = hensel_roots(self.a)
        if len(roots) != self.a.degree():
            raise ValidationError("a must split over Q_p with roots distinct mod p")
        return [CurvePoint(r, self.b(r)) for r in roots]


def decompose_pm(D1: MumfordDivisor, D2: MumfordDivisor):
    """(a, c) - the plus part is div(a/c) - and the minus part [a*c, e] for (a,b) - (c,d)."""
    a, b, c, d = D1.a, D1.b, D2.a, D2.b
    e = crt_combine(a, b, c, d)
    return (a, c), (a * c, e)


def general_from_mumford(C: CurveModel, D1: MumfordDivisor, D2: MumfordDivisor) -> GeneralDivisor:
    if D1.a.degree() != D2.a.degree():
        raise ValidationError("(a,b) - (c,d) needs deg a = deg c")
    return GeneralDivisor([(P, 1) for P in D1.points()] + [(P, -1) for P in D2.points()])


def minus_part(D: GeneralDivisor) -> AntisymDivisor:
    return AntisymDivisor([(P, m) for P, m in D.terms])


def plus_function(D: GeneralDivisor):
    """[(x_i, m_i)] describing the function prod (x - x_i)^m_i with divisor D + w*D."""
    return [(P.x, m) for P, m in D.terms]


def wnw_split(C: CurveModel, D: AntisymDivisor) -> tuple[AntisymDivisor, AntisymDivisor]:
    """Weierstrass-disc part and the rest."""
    w = [(P, m) for P, m in D.terms if C.is_weierstrass(P)]
    nw = [(P, m) for P, m in D.terms if not C.is_weierstrass(P)]
    return AntisymDivisor(w), AntisymDivisor(nw)


def wnw_split_mumford(C: CurveModel, a: Poly, b: Poly):
    """The polynomial form of the split: ([a_w, b mod a_w], [a_nw, b mod a_nw])."""
    aw, anw = hensel_factor(a, C.f)
    bw = b % aw if aw.degree() > 0 else Poly([Padic.zero(C.p, C.prec)])
    bnw = b % anw if anw.degree() > 0 else Poly([Padic.zero(C.p, C.prec)])
    return (aw, bw), (anw, bnw)


def third_kind_form(C: CurveModel, D: AntisymDivisor) -> Form:
    """A form with simple poles, residue divisor D, holomorphic at infinity.

    Built as sum_i m_i y_i dx / ((x - x_i) y); for a single pair this is the
    familiar a'(x) b(x) dx / (a(x) y)."""
    if D.is_empty():
        p = C.p
        return Form(Poly([Padic.zero(p, C.prec)]), Poly([Padic.from_rational(p, 1, C.prec)]))
    for P in D.points:
        if P.y.is_zero() or C.f(P.x).is_zero():
            raise SupportOverlapError("divisor meets a Weierstrass point")
    p = D.points[0].p
    prec = min(min(P.x.absprec, P.y.absprec) for P in D.points)
    one = Padic.from_rational(p, 1, prec)
    lins = [Poly([-P.x, one]) for P in D.points]
    den = Poly([one])
    for lin in lins:
        den = den * lin
    num = Poly([Padic.zero(p, prec)])
    for i, (P, m) in enumerate(D.terms):
        term = Poly([P.y * m])
        for j, lin in enumerate(lins):
            if j != i:
                term = term * lin
        num = num + term
    poles = []
    for P, m in D.terms:
        poles.append((P, m))
        poles.append((involution(P), -m))
    return Form(num, den, poles)


def check_disjoint(D1, D2):
    for P in D1.points:
        for Q in D2.points:
            if (P.x - Q.x).is_zero():
                raise SupportOverlapError("divisors have overlapping support", x=str(P.x))
