"""Cup products, the Psi map and local heights at p.

A height is computed from the form omega_D = nu - eta attached to an
antisymmetric divisor D: nu has residue divisor D and eta is the holomorphic
correction that moves Psi(nu) into the chosen complement W.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .coleman import (IntegralResult, basis_integrals, frobenius_defect, in_disc_antiderivative,
                      integrate_meromorphic)
from .curve import (AntisymDivisor, CurveModel, Form, GeneralDivisor, InfinityChart,
                    check_disjoint, exact_omega_at_infinity, involution, minus_part,
                    plus_function, third_kind_form, wnw_split)
from .errors import NonOrdinaryError, ValidationError
from .frobenius import (FrobData, SubspaceW, explicit_subspace, frobenius_matrix,
                        unit_root_subspace)
from .linalg import solve
from .padic import IWASAWA, BranchSpec, Padic, log


# ---------------------------------------------------------------------------
# cup product


class CupMatrix:
    """N_ij = Res(omega_j int omega_i) at infinity, exact rationals."""

    def __init__(self, exact: list[list[Fraction]]):
        self.exact = exact

    def padic(self, p: int, prec: int) -> list[list[Padic]]:
        return [[Padic.from_rational(p, c, prec) for c in row] for row in self.exact]

    def __len__(self):
        return len(self.exact)

    def __repr__(self):
        rows = ["[" + ", ".join(str(c) for c in row) + "]" for row in self.exact]
        return "CupMatrix(" + ", ".join(rows) + ")"


def cup_matrix(C: CurveModel | list, g: int | None = None) -> CupMatrix:
    """Cup product matrix of the basis x^i dx/2y, computed from exact expansions at infinity.

    Accepts a CurveModel or a list of rational coefficients of f."""
    f = C.f_exact if isinstance(C, CurveModel) else [Fraction(c) for c in C]
    if g is None:
        g = (len(f) - 2) // 2
    series = exact_omega_at_infinity(f, g, 4 * g + 4)

    def antiderivative(s):
        start, coeffs = s
        return start + 1, [c / (start + k + 1) if c else Fraction(0) for k, c in enumerate(coeffs)]

    def residue(a, b):
        sa, ca = a
        sb, cb = b
        total = Fraction(0)
        for i, c in enumerate(ca):
            j = -1 - sa - i - sb
            if 0 <= j < len(cb):
                total += c * cb[j]
        return total

    n = 2 * g
    return CupMatrix([[residue(series[j], antiderivative(series[i])) for j in range(n)]
                      for i in range(n)])


def cup(a, b, N: CupMatrix):
    total = None
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            c = N.exact[i][j]
            if c:
                t = ai * bj * c
                total = t if total is None else total + t
    return total


# ---------------------------------------------------------------------------
# context


def working_precision(p: int, g: int, n: int, m: int) -> int:
    """Digits carried internally for n output digits; m = v_p(det(M - I))."""
    extra = 0
    while p ** extra < 2 * n * (2 * g + 1):
        extra += 1
    return n + m + extra + 2


@dataclass
class HeightContext:
    """Everything a height computation at p needs, built once per curve."""

    C: CurveModel
    n: int
    fd: FrobData
    N: CupMatrix
    W: SubspaceW
    branch: BranchSpec = IWASAWA
    n_work: int = 0
    defect: int = 0
    trace: list = field(default_factory=list)

    @classmethod
    def build(cls, f, p: int, n: int, policy="unit-root", branch: BranchSpec = IWASAWA,
              use_cache: bool = True, guard: int = 0) -> HeightContext:
        """``policy`` is "unit-root", "g1-omega1" or a 2g x g matrix of column vectors.

        ``guard`` adds digits to the working precision (used to check digit stability)."""
        g = (len(f) - 2) // 2
        # bootstrap pass for the Frobenius defect
        probe = CurveModel(f, p, n + 6)
        fd0 = frobenius_matrix(probe, n + 2, use_cache=use_cache)
        m = frobenius_defect(fd0)
        if m >= fd0.prec:
            raise NonOrdinaryError("M - I is not invertible at the probe precision")
        n_work = working_precision(p, g, n, m) + guard
        C = CurveModel(f, p, n_work + 6)
        fd = frobenius_matrix(C, n_work, use_cache=use_cache)
        m = frobenius_defect(fd)
        N = cup_matrix(C)
        if isinstance(policy, str):
            if policy == "unit-root":
                W = unit_root_subspace(fd, policy="unit-root")
            elif policy == "g1-omega1":
                W = unit_root_subspace(fd, policy="g1-omega1")
            else:
                raise ValidationError(f"unknown W policy {policy!r}")
        else:
            W = explicit_subspace(C, policy, n_work)
        ctx = cls(C, n, fd, N, W, branch, n_work, m)
        ctx.check_isotropic()
        return ctx

    @property
    def p(self) -> int:
        return self.C.p

    @property
    def g(self) -> int:
        return self.C.g

    def check_isotropic(self):
        vecs = self.W.vectors
        for a in vecs:
            for b in vecs:
                c = cup(a, b, self.N)
                if c is not None and c.val < self.n:
                    raise NonOrdinaryError("W is not isotropic for the cup product",
                                           valuation=c.val)

    def note(self, label, value):
        self.trace.append((label, value))


# ---------------------------------------------------------------------------
# Psi


def divisor_integrals(ctx: HeightContext, D: AntisymDivisor) -> list[IntegralResult]:
    """(int_D omega_i)_i for D = sum m [(P) - (-P)]."""
    C, p, g = ctx.C, ctx.p, ctx.g
    out = [IntegralResult(Padic.zero(p, ctx.n_work + 4), ctx.n_work + 4) for _ in range(2 * g)]
    for P, m in D.terms:
        if C.is_weierstrass(P):
            for i in range(2 * g):
                F = in_disc_antiderivative(C, Form.basis(C, i, ctx.n_work + 4), P, ctx.branch,
                                           ctx.n_work + 2)
                out[i] = out[i] + F(involution(P), P, ctx.n_work + 2).scale(m)
        else:
            vals = basis_integrals(C, ctx.fd, involution(P), P)
            for i in range(2 * g):
                out[i] = out[i] + vals[i].scale(m)
    return out


def psi(form: Form, D: AntisymDivisor, ctx: HeightContext) -> list[Padic]:
    """Psi of a form whose residue divisor is D, in the basis omega_0 .. omega_{2g-1}.

    s_i = int_D omega_i + Res_inf(form int omega_i) and Psi = N^{-1} s."""
    C, p, g = ctx.C, ctx.p, ctx.g
    prec = ctx.n_work + 4
    chart = InfinityChart(C, 4 * g + 6, prec)
    at_inf = chart.form(form)
    ints = divisor_integrals(ctx, D) if not D.is_empty() else None
    s = []
    for i in range(2 * g):
        G = chart.omega(i).integral()
        r = (at_inf * G).residue()
        s.append(r + ints[i].value if ints is not None else r)
    return solve(ctx.N.padic(p, prec), s)


def psi_in_basis(vec, ctx: HeightContext, power: int | None = None):
    """Coordinates of a class in {omega_0, .., omega_{g-1}, F^n omega_g, .., F^n omega_{2g-1}}."""
    from .linalg import identity, matmul, transpose

    g = ctx.g
    F = ctx.fd.frob
    n = ctx.n_work if power is None else power
    Fn = identity(2 * g, ctx.p, ctx.n_work + 4)
    for _ in range(n):
        Fn = matmul(F, Fn)
    cols = [[Padic.from_rational(ctx.p, int(i == j), ctx.n_work + 4) for i in range(2 * g)]
            for j in range(g)]
    cols += [[Fn[i][j] for i in range(2 * g)] for j in range(g, 2 * g)]
    return solve(transpose(cols), vec)


# ---------------------------------------------------------------------------
# omega_D


@dataclass
class OmegaD:
    """omega_D = nu - sum eta_i omega_i."""

    divisor: AntisymDivisor
    nu: Form
    psi_nu: list
    eta: list

    def form(self) -> Form:
        return self.nu.minus_holomorphic(self.eta)


def omega_D(D: AntisymDivisor, ctx: HeightContext) -> OmegaD:
    """nu = third-kind form of D; eta = projection of Psi(nu) on the holomorphic span along W."""
    from .linalg import transpose

    g, p = ctx.g, ctx.p
    nu = third_kind_form(ctx.C, D)
    v = psi(nu, D, ctx)
    prec = ctx.n_work + 4
    cols = [[Padic.from_rational(p, int(i == j), prec) for i in range(2 * g)] for j in range(g)]
    cols += [list(w) for w in ctx.W.vectors]
    coords = solve(transpose(cols), v)
    return OmegaD(D, nu, v, coords[:g])


# ---------------------------------------------------------------------------
# heights


def _in_disc_sum(ctx: HeightContext, form: Form, D: AntisymDivisor) -> IntegralResult:
    """sum m int_{-P}^{P} form over the (Weierstrass-disc) terms of D."""
    p = ctx.p
    total = IntegralResult(Padic.zero(p, ctx.n_work + 4), ctx.n_work + 4)
    for P, m in D.terms:
        F = in_disc_antiderivative(ctx.C, form, P, ctx.branch, ctx.n_work + 2)
        total = total + F(involution(P), P, ctx.n_work + 2).scale(m)
    return total


def _eta_integral(ctx: HeightContext, eta, D: AntisymDivisor) -> IntegralResult:
    ints = divisor_integrals(ctx, D)
    total = IntegralResult(Padic.zero(ctx.p, ctx.n_work + 4), ctx.n_work + 4)
    for c, I in zip(eta, ints):
        total = total + I.scale(c)
    return total


def height_antisym(D1: AntisymDivisor, D2: AntisymDivisor, ctx: HeightContext) -> IntegralResult:
    """Local height h_p(D1, D2) = int_{D2} omega_{D1} for antisymmetric divisors.

    Both divisors are split into Weierstrass-disc and other parts:
    h(D1, D2) = h(D1, D2w) + h(D2nw, D1w) + h(D1nw, D2nw), the middle term
    using symmetry of the pairing."""
    C, p = ctx.C, ctx.p
    check_disjoint(D1, D2)
    D1w, D1nw = wnw_split(C, D1)
    D2w, D2nw = wnw_split(C, D2)
    total = IntegralResult(Padic.zero(p, ctx.n_work + 4), ctx.n_work + 4)
    if not D2w.is_empty():
        om1 = omega_D(D1, ctx)
        part = _in_disc_sum(ctx, om1.form(), D2w)
        ctx.note("h(D1, D2 weierstrass part)", part.value)
        total = total + part
    if not D1w.is_empty() and not D2nw.is_empty():
        om2 = omega_D(D2nw, ctx)
        part = _in_disc_sum(ctx, om2.form(), D1w)
        ctx.note("h(D2 non-weierstrass part, D1 weierstrass part)", part.value)
        total = total + part
    if not D1nw.is_empty() and not D2nw.is_empty():
        om = omega_D(D1nw, ctx)
        beta = third_kind_form(C, D2nw)
        psi_beta = psi(beta, D2nw, ctx)
        steps = []
        I_nu = integrate_meromorphic(C, ctx.fd, om.nu, D2nw, om.psi_nu, psi_beta, ctx.N.exact,
                                     ctx.n_work, beta=beta, trace=steps)
        I_eta = _eta_integral(ctx, om.eta, D2nw)
        ctx.note("psi(nu)", om.psi_nu)
        for label, value in steps:
            ctx.note(label, value)
        ctx.note("int nu", I_nu.value)
        ctx.note("int eta", I_eta.value)
        total = total + I_nu - I_eta
    prec = min(total.precision, ctx.n)
    return IntegralResult(total.value, prec, total.log)


def plus_part_term(D1: GeneralDivisor, D2: GeneralDivisor, ctx: HeightContext) -> Padic:
    """(1/4) chi(F1(D2 + w D2)) with div F1 = D1 + w D1, i.e. (1/2) log prod F1(x_Q)^n_Q."""
    p = ctx.p
    F1 = plus_function(D1)
    prod = Padic.from_rational(p, 1, ctx.n_work + 4)
    for Q, nq in D2.terms:
        val = Padic.from_rational(p, 1, ctx.n_work + 4)
        for x, m in F1:
            diff = Q.x - x
            if diff.is_zero():
                raise ValidationError("plus parts share support")
            val = val * (diff ** m if m > 0 else diff.inverse() ** (-m))
        prod = prod * (val ** nq if nq > 0 else val.inverse() ** (-nq))
    return log(prod, ctx.branch) * Fraction(1, 2)


def height_general(D1: GeneralDivisor, D2: GeneralDivisor, ctx: HeightContext) -> IntegralResult:
    """h_p(D1, D2) = (1/4) h(D1+, D2+) + (1/4) h(D1-, D2-)."""
    p = ctx.p
    check_disjoint(D1, D2)
    plus = plus_part_term(D1, D2, ctx)
    minus = height_antisym(minus_part(D1), minus_part(D2), ctx)
    ctx.note("(1/4) h(D1+, D2+)", plus)
    ctx.note("(1/4) h(D1-, D2-)", minus.value * Fraction(1, 4))
    value = plus + minus.value * Fraction(1, 4)
    extra = 2 if p == 2 else 0
    prec = min(minus.precision - extra, plus.absprec, ctx.n)
    return IntegralResult(value, prec, minus.log)
