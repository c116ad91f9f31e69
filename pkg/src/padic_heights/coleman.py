"""Coleman integrals on odd hyperelliptic curves.

Three engines: tiny integrals inside one residue disc, integrals of the
basis forms between non-Weierstrass discs (through the Frobenius matrix),
and integrals of third-kind forms through Coleman reciprocity, whose local
input is a sum of residues over Weierstrass discs and pole discs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .curve import (CurveModel, CurvePoint, Form, involution, local_coords_line,
                    local_coords_weierstrass)
from .errors import DiscMismatchError, LogTermRequired, SupportOverlapError, WeierstrassDiscError
from .frobenius import FrobData, _binom_half, _floor_log, frobenius_on_point
from .linalg import det, solve
from .padic import IWASAWA, BranchSpec, Padic, QuotientRing, RingElement, log, ring_trace
from .polyseries import Poly, TruncatedSeries


@dataclass
class IntegralResult:
    """A Coleman integral with the precision its engine guarantees."""

    value: Padic
    precision: int
    log: list = field(default_factory=list)

    def __post_init__(self):
        self.value = self.value.add_bigoh(self.precision)

    def __add__(self, other):
        if isinstance(other, IntegralResult):
            return IntegralResult(self.value + other.value, min(self.precision, other.precision),
                                  self.log + other.log)
        return IntegralResult(self.value + other, self.precision, self.log)

    def __neg__(self):
        return IntegralResult(-self.value, self.precision, self.log)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> IntegralResult:
        v = self.value * c
        extra = c.val if isinstance(c, Padic) else 0
        return IntegralResult(v, self.precision + extra, self.log)


# ---------------------------------------------------------------------------
# precision bookkeeping


def tiny_precision(p: int, n: int, m: int) -> int:
    """Digits guaranteed by a tiny integral cut at t^m with n-digit endpoints."""
    return min(n, m + 1 - _floor_log(m + 1, p))


def tiny_order(p: int, n: int) -> int:
    """Smallest truncation m giving n digits."""
    m = n
    while m + 1 - _floor_log(m + 1, p) < n:
        m += 1
    return m


def basis_precision(p: int, n: int, m: int) -> int:
    """Digits of an integral of a basis form between non-Weierstrass discs."""
    return n - max(m, _floor_log(n, p))


def frobenius_defect(fd: FrobData) -> int:
    """v_p(det(M - I))."""
    n = 2 * fd.g
    one = Padic.from_rational(fd.p, 1, fd.prec + 5)
    A = [[fd.M[i][j] - (one if i == j else 0) for j in range(n)] for i in range(n)]
    return det(A).val


# ---------------------------------------------------------------------------
# tiny integrals


def _point_prec(*points) -> int:
    out = []
    for P in points:
        for c in (P.x, P.y):
            out.append(c.absprec if isinstance(c, Padic) else min(x.absprec for x in c.coeffs))
    return min(out)


def disc_expansion(C: CurveModel, form: Form, P: CurvePoint, order: int, prec: int) -> TruncatedSeries:
    """form pulled back to u = x - x(P) on the non-Weierstrass disc of P."""
    one = Padic.from_rational(C.p, 1, prec)
    xt, yt = local_coords_line(C, P, one, order + 1, prec)
    den0 = form.den(P.x)
    if den0.is_zero() or den0.val > 0:
        raise LogTermRequired("form has a pole in this disc; use in_disc_antiderivative")
    return form.pullback(xt, yt)


def sum_antiderivative(h: TruncatedSeries, delta, m: int):
    """sum_{k<m} h_k delta^(k+1)/(k+1) for a Padic or RingElement delta."""
    total = None
    power = delta
    for k in range(m):
        c = h.coefficient(k)
        if not c.is_zero():
            term = (power * c) / (k + 1)
            total = term if total is None else total + term
        power = power * delta
    return total


def tiny_integral(C: CurveModel, form: Form, P: CurvePoint, Q: CurvePoint, n: int | None = None
                  ) -> IntegralResult:
    """Integral of a form regular on the common non-Weierstrass disc of P and Q."""
    if C.is_weierstrass(P) or C.is_weierstrass(Q):
        raise WeierstrassDiscError("use the Weierstrass-disc antiderivative")
    if not P.same_disc(Q):
        raise DiscMismatchError("tiny integrals need endpoints in one residue disc")
    pts = _point_prec(P, Q)
    n = pts if n is None else min(n, pts)
    m = tiny_order(C.p, n)
    delta = Q.x - P.x
    if delta.is_zero():
        return IntegralResult(Padic.zero(C.p, n), n)
    h = disc_expansion(C, form, P, m, pts + 2)
    value = sum_antiderivative(h, delta, m)
    if value is None:
        value = Padic.zero(C.p, n)
    prec = tiny_precision(C.p, pts, m)
    return IntegralResult(value, min(prec, value.absprec), [("tiny", m)])


# ---------------------------------------------------------------------------
# integrals of basis forms (Frobenius method)


def basis_integrals(C: CurveModel, fd: FrobData, P: CurvePoint, Q: CurvePoint,
                    n: int | None = None) -> list[IntegralResult]:
    """(int_P^Q x^i dx/2y)_i for P, Q in non-Weierstrass discs."""
    if C.is_weierstrass(P) or C.is_weierstrass(Q):
        raise WeierstrassDiscError("basis integrals need non-Weierstrass endpoints")
    p, g = C.p, C.g
    pts = _point_prec(P, Q)
    n = min(pts, fd.prec) if n is None else min(n, pts, fd.prec)
    if (P.x - Q.x).is_zero() and (P.y - Q.y).is_zero():
        return [IntegralResult(Padic.zero(p, n), n) for _ in range(2 * g)]
    work = n + 4
    fP, fQ = frobenius_on_point(C, P), frobenius_on_point(C, Q)
    rhs = []
    logs = []
    for i in range(2 * g):
        w = Form.basis(C, i, work + 2)
        a = tiny_integral(C, w, P, fP, work)
        b = tiny_integral(C, w, fQ, Q, work)
        logs.append((a.precision, b.precision))
        rhs.append(fd.exact_value(i, P) - fd.exact_value(i, Q) - a.value - b.value)
    one = Padic.from_rational(p, 1, fd.prec + 5)
    A = [[fd.M[i][j] - (one if i == j else 0) for j in range(2 * g)] for i in range(2 * g)]
    m = det(A).val
    v = solve(A, rhs)
    prec = basis_precision(p, n, m)
    return [IntegralResult(x, min(prec, x.absprec), [("basis", m)]) for x in v]


def form_integral_from_basis(form_coeffs, integrals):
    total = None
    for c, I in zip(form_coeffs, integrals):
        t = I.scale(c)
        total = t if total is None else total + t
    return total


# ---------------------------------------------------------------------------
# expansions of the Frobenius pullback of a third-kind form


def _E_poly(C: CurveModel, prec: int) -> Poly:
    """E(x) = (f(x^p) - f(x)^p) / p with exact integer arithmetic."""
    p = C.p
    f = [Fraction(c) for c in C.f_exact]
    den = math.lcm(*(c.denominator for c in f))
    mod = p ** (prec + 2)
    fi = [c.numerator * pow(c.denominator, -1, mod) % mod for c in f]
    fxp = [0] * (p * (len(fi) - 1) + 1)
    for k, c in enumerate(fi):
        fxp[p * k] = c
    pw = [1]
    for _ in range(p):
        out = [0] * (len(pw) + len(fi) - 1)
        for i, a in enumerate(pw):
            for j, b in enumerate(fi):
                out[i + j] = (out[i + j] + a * b) % mod
        pw = out
    diff = [(a - b) % mod for a, b in zip(fxp + [0] * (len(pw) - len(fxp)), pw)]
    assert den % p != 0 and all(c % p == 0 for c in diff)
    return Poly([Padic.make(p, 0, c // p, prec + 1) for c in diff])


def frobenius_pullback_terms(C: CurveModel, K: int, prec: int):
    """(coefficient_k, E) with 1/phi(y) = sum_k coefficient_k E(x)^k y^(-p(2k+1))."""
    p = C.p
    E = _E_poly(C, prec)
    coeffs = [Padic.from_rational(p, Fraction(p) ** k * _binom_half(k), prec + k) for k in range(K)]
    return coeffs, E


# ---------------------------------------------------------------------------
# residue engine


def _power_sums_disc(x0: Padic, count: int) -> list[Padic]:
    """Power sums of z = r - x0 over the p roots r of r^p = x0, k < count.

    Summing over r = zeta^j r_0 kills every power r^i with p not dividing i,
    so PS_k = p * sum_{p | i} C(k, i) (-x0)^(k-i) x0^(i/p)."""
    p = x0.p
    out = []
    for k in range(count):
        acc = Padic.zero(p, x0.absprec + 1)
        for i in range(0, k + 1, p):
            acc = acc + math.comb(k, i) * (-x0) ** (k - i) * x0 ** (i // p)
        out.append(acc * p)
    return out


def pole_disc_contribution(C: CurveModel, beta: Form, P: CurvePoint, n: int) -> IntegralResult:
    """Sum of Res(alpha int beta) over the poles of alpha in the disc of P.

    alpha = phi^* nu - p nu for nu with residue +1 at P.  The poles are the
    p points A with x(A)^p = x(P) in the disc; each contributes the tiny
    integral of beta from P to A, and their sum is a trace computed from
    power sums of x(A) - x(P)."""
    p = C.p
    # terms h_k u^(k+1)/(k+1) with v(PS_{k+1}) >= (k+1)/p
    m = 1
    while True:
        worst = min((k + 1 + p - 1) // p - _floor_log(k + 1, p) for k in range(m, m + p * 4))
        if worst >= n + 1:
            break
        m += 1
    prec = _point_prec(P)
    h = disc_expansion(C, beta, P, m, prec + 2)
    ps = _power_sums_disc(P.x, m + 1)
    total = Padic.zero(p, n + 5)
    for k in range(m):
        c = h.coefficient(k)
        if not c.is_zero():
            total = total + c * ps[k + 1] / (k + 1)
    truncation = min((k + 1 + p - 1) // p - _floor_log(k + 1, p) for k in range(m, m + p * 4))
    digits = min(truncation, total.absprec, prec)
    return IntegralResult(total, digits, [("pole-disc", m)])


def weierstrass_roots(C: CurveModel, prec: int):
    """One generic root per F_p-irreducible factor of f: (root, ring or None)."""
    out = []
    for fac in C.weierstrass_factors():
        fac = Poly([c.add_bigoh(prec) if c.absprec > prec else c for c in fac.coeffs])
        if fac.degree() == 1:
            out.append((-fac.coeffs[0], None))
        else:
            ring = QuotientRing(fac.coeffs)
            out.append((ring.gen(prec), ring))
    return out


def weierstrass_residue(C: CurveModel, nu: Form, beta: Form, root, K: int, prec: int):
    """Res at the Weierstrass point (root, 0) of (phi^* nu) int beta, traced to Q_p.

    With y = t as parameter, phi^* nu = N(x^p)/D(x^p) p x^(p-1) x'(t) dt / phi(y)
    and 1/phi(y) = sum_k c_k E(x)^k t^(-p(2k+1)).  The residue of the k-th term
    is the coefficient of t^(p(2k+1)-1) in the regular series
    p x^(p-1) x' N(x^p)/D(x^p) E(x)^k G(t), where G is an antiderivative of beta."""
    p = C.p
    T = p * (2 * K - 1) + 1
    xt, t = local_coords_weierstrass(C, root, T, prec)
    ring = root.ring if isinstance(root, RingElement) else None
    dx = xt.derivative()
    xp = xt ** p
    num = nu.num(xp)
    den = nu.den(xp)
    base = (xt ** (p - 1)) * dx * p
    base = _times(base, num)
    base = _times(base, den, inverse=True)
    # beta = Nb(x)/Db(x) dx / y, with y = t: x'(t)/t is a power series
    bN = beta.num(xt)
    bD = beta.den(xt)
    bseries = _times(_times(dx.shift(-1), bN), bD, inverse=True)
    G = bseries.integral()
    H = base * G
    coeffs, E = frobenius_pullback_terms(C, K, prec)
    Ex = E(xt)
    total = None
    power = None
    for k in range(K):
        if k:
            power = Ex if power is None else power * Ex
            term_series = H * power
        else:
            term_series = H
        c = term_series.coefficient(p * (2 * k + 1) - 1) * coeffs[k]
        total = c if total is None else total + c
    if ring is not None:
        total = ring_trace(total)
    return total


def _times(series: TruncatedSeries, other, inverse: bool = False):
    if isinstance(other, TruncatedSeries):
        return series * (other.inverse() if inverse else other)
    if isinstance(other, RingElement):
        other = TruncatedSeries.constant(other, series.order, series.ring)
        return series * (other.inverse() if inverse else other)
    return series.scale(other.inverse() if inverse else other)


# ---------------------------------------------------------------------------
# antiderivatives on a single disc, poles allowed


def weierstrass_root_near(C: CurveModel, P: CurvePoint):
    """The Q_p-root a of f with P in the disc of (a, 0)."""
    for root, ring in weierstrass_roots(C, C.prec):
        if ring is None and (root - P.x).val >= 1:
            return root
    raise WeierstrassDiscError("no Q_p-rational Weierstrass point in this disc")


class DiscChart:
    """Parameter t on one residue disc with x(t), y(t) expansions.

    Weierstrass discs use t = y around (a, 0); other discs use t = x - x(c)
    around a marked point c."""

    def __init__(self, C: CurveModel, center, order: int, prec: int):
        self.C = C
        self.order = order
        if isinstance(center, CurvePoint):
            if C.is_weierstrass(center):
                self.weierstrass = True
                self.root = weierstrass_root_near(C, center)
            else:
                self.weierstrass = False
                self.mark = center
        else:
            self.weierstrass = True
            self.root = center
        if self.weierstrass:
            self.xt, self.yt = local_coords_weierstrass(C, self.root, order + 2, prec)
        else:
            one = Padic.from_rational(C.p, 1, prec)
            self.xt, self.yt = local_coords_line(C, self.mark, one, order + 2, prec)

    def contains(self, P: CurvePoint) -> bool:
        if P.infinite or P.x.val < 0:
            return False
        if self.weierstrass:
            return (P.x - self.root).val >= 1 and P.y_residue_is_zero()
        return P.same_disc(self.mark)

    def param(self, P: CurvePoint) -> Padic:
        if not self.contains(P):
            raise DiscMismatchError("point outside the chart's disc")
        return P.y if self.weierstrass else P.x - self.mark.x


class DiscAntiderivative:
    """sum_j r_j log(t - c_j) + F(t) for a form with simple poles c_j on the disc."""

    def __init__(self, chart: DiscChart, residues, regular: TruncatedSeries, branch: BranchSpec,
                 cap: int):
        self.chart = chart
        # digits guaranteed by the build; divided differences eat the extra guard digits
        self.cap = cap
        self.residues = residues
        self.F = regular.integral()
        self.branch = branch

    def __call__(self, P: CurvePoint, Q: CurvePoint, n: int | None = None) -> IntegralResult:
        """Integral from P to Q."""
        chart = self.chart
        p = chart.C.p
        t0, t1 = chart.param(P), chart.param(Q)
        if min(t0.val if not t0.is_zero() else 10 ** 6, t1.val if not t1.is_zero() else 10 ** 6) < 1:
            raise DiscMismatchError("endpoint outside the open disc")
        pts = _point_prec(P, Q)
        n = min(pts, self.cap) if n is None else min(n, pts, self.cap)
        total = self.F.evaluate(t1) - self.F.evaluate(t0)
        for c, r in self.residues:
            a, b = t1 - c, t0 - c
            if a.is_zero() or b.is_zero():
                raise SupportOverlapError("endpoint at a pole of the form")
            total = total + log(a / b, self.branch) * r
        prec = min(tiny_precision(p, pts, chart.order - 1), total.absprec, n)
        return IntegralResult(total, prec, [("in-disc", chart.order, len(self.residues))])


def in_disc_antiderivative(C: CurveModel, form: Form, center, branch: BranchSpec = IWASAWA,
                           n: int | None = None) -> DiscAntiderivative:
    """Naive antiderivative of ``form`` on the disc of ``center``.

    ``center`` is a point of the disc (or a Weierstrass root).  The poles of
    the form inside the disc are read from ``form.poles``; each must be
    simple.  Off the poles the form is h(t) dt with h = g / prod (t - c_j),
    and the regular part left after removing r_j / (t - c_j) is a power series
    obtained by exact synthetic division."""
    p = C.p
    prec = n if n is not None else C.prec
    order = tiny_order(p, prec) + 1
    # every division by (t - c) spends ceil(target / v(c)) trailing terms
    probe = DiscChart(C, center, 2, prec + 4)
    locs = []
    for A, r in form.poles:
        if probe.contains(A):
            c = probe.param(A)
            if not any((c - d).is_zero() for d in locs):
                locs.append(c)
    target = prec + 4
    spend = [-(-target // max(c.val, 1)) for c in locs]
    chart = DiscChart(C, center, order + 2 * sum(spend) + 2, prec + 4)
    inside = [(chart.param(A), r) for A, r in form.poles if chart.contains(A)]
    merged: list[list] = []
    for c, r in inside:
        for entry in merged:
            if (entry[0] - c).is_zero():
                entry[1] += r
                break
        else:
            merged.append([c, r])
    poles = [(c, r) for c, r in merged if r]
    locs = [c for c, _ in merged]
    spend = [-(-target // max(c.val, 1)) for c in locs]
    xt, yt = chart.xt, chart.yt
    dx = xt.derivative()
    if chart.weierstrass:
        base = dx.shift(-1)
    else:
        base = dx * yt.inverse()
    num = form.num(xt)
    base = _times(base, num)
    den = form.den(xt)
    if isinstance(den, TruncatedSeries):
        for c, k in zip(locs, spend):
            den = den.divided_difference(c, den.order - k)
        base = base.truncate(den.order) * den.inverse()
    else:
        base = base.scale(den.inverse())
    # base = g(t) = h(t) * prod (t - c_j) over every pole location in the disc
    g = base.as_power_series()
    for j, (c, r) in enumerate(merged):
        if not r:
            continue
        term = TruncatedSeries.constant(Padic.from_rational(p, r, prec + 4), g.order)
        for i, ci in enumerate(locs):
            if i != j:
                term = term * (TruncatedSeries.gen(p, prec + 4, g.order) - ci)
        g = g - term
    for c, k in zip(locs, spend):
        g = g.divided_difference(c, g.order - k)
    return DiscAntiderivative(chart, poles, g.truncate(order), branch, prec)


# ---------------------------------------------------------------------------
# residue sums for the reciprocity formula


@dataclass
class ResidueJob:
    """One disc whose residues of alpha int beta are summed.

    ``kind`` is "weierstrass" (center = root, ring = its residue extension or
    None) or "pole" (center = a rational pole P of nu, weight = Res_P nu); the
    pole locus of alpha there is cut out by u^p - x(P)."""

    kind: str
    center: object
    ring: QuotientRing | None = None
    order: int = 0
    weight: int = 1

    def label(self) -> str:
        if self.kind == "pole":
            x, y = self.center.residue()
            return f"pole disc ({x}, {y}) mod p"
        if self.ring is None:
            return f"weierstrass disc ({self.center.residue()}, 0) mod p"
        mod = [c.residue() for c in self.ring.modulus]
        return f"weierstrass discs over root of {mod} mod p"


def residue_jobs(C: CurveModel, nu: Form, n: int) -> list[ResidueJob]:
    """Weierstrass discs (one per F_p-irreducible factor of f) and pole discs of alpha."""
    p = C.p
    jobs = []
    for root, ring in weierstrass_roots(C, n + 4):
        if ring is None and root.is_zero() and nu.den(root).val == 0:
            # nu regular at (0, 0): the factor x^(p-1) of phi^* dx leaves no residue
            continue
        jobs.append(ResidueJob("weierstrass", root, ring, p * (2 * n - 1) + 1))
    for A, r in nu.poles:
        if C.is_weierstrass(A):
            raise SupportOverlapError("residue engine needs poles outside Weierstrass discs")
        jobs.append(ResidueJob("pole", A, None, 0, r))
    return jobs


def residue_sum(C: CurveModel, nu: Form, beta: Form, jobs: list[ResidueJob], n: int):
    """Sum over jobs of Res(alpha int beta), alpha = phi^* nu - p nu.

    Returns (IntegralResult, per-job breakdown)."""
    p = C.p
    total = IntegralResult(Padic.zero(p, n + 4), n + 4)
    breakdown = []
    for job in jobs:
        if job.kind == "pole":
            for B, _ in beta.poles:
                if B.same_disc(job.center):
                    raise SupportOverlapError("pole of beta inside a pole disc of alpha")
            part = pole_disc_contribution(C, beta, job.center, n).scale(job.weight)
        else:
            K = n
            value = weierstrass_residue(C, nu, beta, job.center, K, n + 4)
            T = p * (2 * K - 1) + 1
            digits = min(K - _floor_log(T, p), value.absprec)
            part = IntegralResult(value, digits, [("weierstrass", T)])
        breakdown.append((job.label(), part))
        total = total + part
    return total, breakdown


def cup(a, b, N):
    """a^T N b."""
    total = None
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            if not N[i][j]:
                continue
            t = ai * bj * N[i][j]
            total = t if total is None else total + t
    return total


def integrate_meromorphic(C: CurveModel, fd: FrobData, nu: Form, D2, psi_nu, psi_beta, N,
                          n: int, beta: Form | None = None, trace: list | None = None
                          ) -> IntegralResult:
    """int_{D2} nu for D2 = sum m_j [(R_j) - (-R_j)] by Coleman reciprocity.

    With alpha = phi^* nu - p nu and beta of residue divisor D2,
    (1 - p) int_{D2} nu = Psi(alpha) u Psi(beta) + sum Res(alpha int beta)
                          - sum_j m_j (int_{R_j}^{phi R_j} nu - int_{-R_j}^{phi(-R_j)} nu)."""
    from .curve import third_kind_form

    p, g = C.p, C.g
    if beta is None:
        beta = third_kind_form(C, D2)
    for A, _ in nu.poles:
        for R in D2.points:
            if A.same_disc(R) or A.same_disc(involution(R)):
                raise SupportOverlapError("divisor point shares a disc with a pole of the form")
    F = fd.frob
    Fpsi = [sum((F[i][j] * psi_nu[j] for j in range(2 * g)), Padic.zero(p, 10 ** 6))
            for i in range(2 * g)]
    psi_alpha = [a - b * p for a, b in zip(Fpsi, psi_nu)]
    cup_value = cup(psi_alpha, psi_beta, N)
    jobs = residue_jobs(C, nu, n)
    res, breakdown = residue_sum(C, nu, beta, jobs, n)
    corr = IntegralResult(Padic.zero(p, n + 4), n + 4)
    for R, m in D2.terms:
        for S, sign in ((R, 1), (involution(R), -1)):
            piece = tiny_integral(C, nu, S, frobenius_on_point(C, S), n + 2)
            corr = corr + piece.scale(sign * m)
    body = res + cup_value - corr
    value = body.value / (1 - p)
    prec = min(body.precision, cup_value.absprec)
    if trace is not None:
        trace.append(("psi(alpha)", psi_alpha))
        trace.append(("psi(alpha) cup psi(beta)", cup_value))
        for label, part in breakdown:
            trace.append((f"residues at {label}", part.value))
        trace.append(("tiny corrections", corr.value))
    return IntegralResult(value, prec, body.log + [("meromorphic", n)])
