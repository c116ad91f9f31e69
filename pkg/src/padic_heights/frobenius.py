"""Frobenius on H^1_dR of y^2 = f(x) via Kedlaya's reduction.

The lift is x -> x^p, y -> y^p (1 + p E(x)/y^(2p))^(1/2) with
p E(x) = f(x^p) - f(x)^p.  Pulling back x^i dx/2y gives a finite sum of
A_s(x) dx / y^s once the binomial series is cut, and each level is pushed
down to s = 1 and then to degree < 2g with the usual exact-form relations.

Polynomials are held as integer blocks ``ints * p^val`` known to absolute
precision ``ap``; every division by a p-divisible integer lowers ``ap``, so
the reported precision is a bound rather than an estimate.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from fractions import Fraction
from pathlib import Path

from . import kernels
from .curve import CurveModel, CurvePoint
from .errors import NonOrdinaryError, PrecisionExhausted, WeierstrassDiscError
from .linalg import det, matmul, matvec, transpose
from .padic import Padic, format_padic, parse_padic, sqrt, vp
from .polyseries import Poly, fp_xgcd

CACHE_ENV = "PADIC_HEIGHTS_CACHE"


# -- integer polynomial helpers (coefficients low to high, reduced mod `mod`) --

def _trim(a):
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _add(a, b, mod):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, c in enumerate(b):
        out[k] = (out[k] + c) % mod
    return out


def _mul(a, b, mod):
    return kernels.conv_mod(a, b, mod)


def _divmod_monic(a, f, mod):
    """Quotient and remainder of ``a`` by the monic integer polynomial ``f``."""
    d = len(f) - 1
    r = [c % mod for c in a]
    if len(r) <= d:
        return [0], r + [0] * (d - len(r))
    q = [0] * (len(r) - d)
    for k in range(len(r) - 1 - d, -1, -1):
        c = r[k + d]
        if c:
            q[k] = c
            for j in range(d):
                r[k + j] = (r[k + j] - c * f[j]) % mod
        r[k + d] = 0
    return q, r[:d]


def _ints_mod(poly_exact, p, k):
    """Rational p-integral coefficients to integers modulo p^k."""
    mod = p ** k
    out = []
    for c in poly_exact:
        c = Fraction(c)
        if c.denominator % p == 0:
            raise PrecisionExhausted("coefficient is not p-integral")
        out.append(c.numerator * pow(c.denominator, -1, mod) % mod)
    return out


class _Block:
    """sum_k ints[k] x^k * p^val, known modulo p^ap."""

    __slots__ = ("ints", "val", "ap")

    def __init__(self, ints, val, ap):
        self.ints = ints
        self.val = val
        self.ap = ap

    @property
    def rel(self):
        return self.ap - self.val

    def plus(self, other: _Block, p: int) -> _Block:
        v = min(self.val, other.val)
        ap = min(self.ap, other.ap)
        mod = p ** max(ap - v, 0)
        a = [c * p ** (self.val - v) for c in self.ints] if self.val > v else self.ints
        b = [c * p ** (other.val - v) for c in other.ints] if other.val > v else other.ints
        return _Block(_add(a, b, mod) if mod > 1 else [0], v, ap)

    def to_padics(self, p: int) -> list[Padic]:
        rel = self.rel
        return [Padic.make(p, self.val, c, rel) for c in self.ints]


def _split(q: Fraction, p: int):
    """q = p^e * u with u a p-adic unit given as a Fraction."""
    e = vp(q.numerator, p) - vp(q.denominator, p)
    return e, q / Fraction(p) ** e


def _unit_mod(u: Fraction, mod: int) -> int:
    return u.numerator * pow(u.denominator, -1, mod) % mod


def _binom_half(k: int) -> Fraction:
    """binomial(-1/2, k)."""
    return Fraction((-1) ** k * math.comb(2 * k, k), 4 ** k)


def _floor_log(x: int, p: int) -> int:
    e = 0
    while p ** (e + 1) <= x:
        e += 1
    return e


class _Reducer:
    """Monsky-Washnitzer reduction for a fixed curve, modulo p^big."""

    def __init__(self, f_ints, p: int, g: int, big: int):
        self.p = p
        self.g = g
        self.big = big
        mod = p ** big
        self.f = [c % mod for c in f_ints]
        self.df = [(k * c) % mod for k, c in enumerate(self.f)][1:]
        self.b = self._inverse_df(mod)
        # d(x^m y) = (m x^(m-1) f + 1/2 x^m f') dx/y ; leading coeff (2m+2g+1)/2
        self.inv2 = pow(2, -1, mod)

    def _inverse_df(self, mod):
        """b with b f' = 1 mod f, lifted from F_p by Newton iteration."""
        p = self.p
        fb = [c % p for c in self.f]
        dfb = [c % p for c in self.df]
        _, s, _ = fp_xgcd(dfb, fb, p)
        b = list(s) or [0]
        prec = 1
        while prec < self.big:
            prec = min(2 * prec, self.big)
            m = p ** prec
            fm = [c % m for c in self.f]
            e = _divmod_monic(_mul(b, [c % m for c in self.df], m), fm, m)[1]
            two_minus = [(-c) % m for c in e]
            two_minus[0] = (two_minus[0] + 2) % m
            b = _divmod_monic(_mul(b, two_minus, m), fm, m)[1]
        return b

    def vertical(self, levels: dict[int, _Block], exact: dict[int, _Block]):
        """Push every level s >= 3 down to s = 1, recording exact parts."""
        p = self.p
        top = max(levels) if levels else 1
        for s in range(top, 2, -2):
            A = levels.pop(s, None)
            if A is None:
                continue
            rel = A.rel
            if rel <= 0:
                continue
            if rel > self.big:
                raise PrecisionExhausted("reduction modulus too small", rel=rel, big=self.big)
            mod = p ** rel
            f = [c % mod for c in self.f]
            df = [c % mod for c in self.df]
            b = [c % mod for c in self.b]
            _, Ar = _divmod_monic(A.ints, f, mod)
            _, S = _divmod_monic(_mul(Ar, b, mod), f, mod)
            diff = _add(A.ints, [(-c) % mod for c in _mul(S, df, mod)], mod)
            R, rem = _divmod_monic(diff, f, mod)
            assert not any(rem), "vertical reduction left a remainder"
            e, u = _split(Fraction(2, s - 2), p)
            uu = _unit_mod(u, mod)
            dS = [(k * c * uu) % mod for k, c in enumerate(S)][1:] or [0]
            lower = _Block(R, A.val, A.ap).plus(_Block(dS, A.val + e, A.ap + e), p)
            prev = levels.get(s - 2)
            levels[s - 2] = lower if prev is None else prev.plus(lower, p)
            h = _Block([(-c * uu) % mod for c in S], A.val + e, A.ap + e)
            prev = exact.get(s - 2)
            exact[s - 2] = h if prev is None else prev.plus(h, p)

    def horizontal(self, A: _Block):
        """Reduce A dx/y to degree < 2g; returns (remainder block, [(m, Padic c)])."""
        p, g = self.p, self.g
        ints = _trim(list(A.ints))
        val, ap = A.val, A.ap
        terms = []
        d = len(ints) - 1
        while d >= 2 * g:
            rel = ap - val
            if rel <= 0:
                ints = [0]
                break
            mod = p ** rel
            c = ints[d] % mod
            m = d - 2 * g
            if c:
                e, u = _split(Fraction(2 * m + 2 * g + 1, 2), p)
                if e:
                    scale = p ** e
                    ints = [x * scale for x in ints]
                    val -= e
                    ap -= e
                cu = c * _unit_mod(1 / u, mod) % mod
                terms.append((m, Padic.make(p, val, cu, rel)))
                # subtract cu * (m x^(m-1) f + 1/2 x^m f')
                for j, fc in enumerate(self.f):
                    if m:
                        k = m - 1 + j
                        ints[k] = (ints[k] - cu * m * fc) % mod
                for j, dc in enumerate(self.df):
                    k = m + j
                    ints[k] = (ints[k] - cu * dc * self.inv2) % mod
            ints = [x % mod for x in ints]
            ints[d] = 0
            _trim(ints)
            d = len(ints) - 1
        return _Block(ints, val, ap), terms


class FrobData:
    """phi^*(omega_i) = d f_i + sum_j M[i][j] omega_j.

    ``exact[i]`` maps s to a polynomial h with f_i containing h(x) y^(-s);
    the key -1 stands for the term h(x) y.
    """

    def __init__(self, p, g, M, exact, prec, n_work, terms, key=None):
        self.p = p
        self.g = g
        self.M = M
        self.exact = exact
        self.prec = prec
        self.n_work = n_work
        self.terms = terms
        self.key = key

    @property
    def frob(self):
        """Matrix of phi^* acting on coordinate vectors over the basis."""
        return transpose(self.M)

    def exact_value(self, i: int, P: CurvePoint):
        """f_i(P) for a finite point with invertible y."""
        y = P.y
        yinv = y ** -1 if not isinstance(y, Padic) else y.inverse()
        total = None
        for s, h in sorted(self.exact[i].items()):
            hx = h(P.x)
            term = hx * y if s == -1 else hx * (yinv ** s)
            total = term if total is None else total + term
        if total is None:
            return Padic.zero(self.p, self.prec)
        return total

    def char_poly(self) -> list[Padic]:
        """Coefficients of det(T - M), low degree first (Faddeev-LeVerrier)."""
        n = 2 * self.g
        A = self.M
        p = self.p
        prec = self.prec + 5
        one = Padic.from_rational(p, 1, prec)
        zero = Padic.zero(p, prec)
        ident = [[one if i == j else zero for j in range(n)] for i in range(n)]
        coeffs = [None] * (n + 1)
        coeffs[n] = one
        Mk = [[zero] * n for _ in range(n)]
        for k in range(1, n + 1):
            Mk = matmul(A, [[Mk[i][j] + (ident[i][j] * coeffs[n - k + 1]) for j in range(n)]
                            for i in range(n)])
            tr = Mk[0][0]
            for i in range(1, n):
                tr = tr + Mk[i][i]
            coeffs[n - k] = -tr / k
        return coeffs

    # -- serialisation ------------------------------------------------
    def to_json(self) -> dict:
        return {
            "p": self.p, "g": self.g, "prec": self.prec, "n_work": self.n_work, "terms": self.terms,
            "M": [[format_padic(c) for c in row] for row in self.M],
            "exact": [{str(s): [format_padic(c) for c in h.coeffs] for s, h in ex.items()}
                      for ex in self.exact],
        }

    @classmethod
    def from_json(cls, data: dict, key=None) -> FrobData:
        M = [[parse_padic(c) for c in row] for row in data["M"]]
        exact = [{int(s): Poly([parse_padic(c) for c in cs]) for s, cs in ex.items()}
                 for ex in data["exact"]]
        return cls(data["p"], data["g"], M, exact, data["prec"], data["n_work"], data["terms"], key)


def frobenius_on_point(C: CurveModel, P: CurvePoint) -> CurvePoint:
    """(x^p, sqrt(f(x^p))) with the root congruent to y mod p."""
    if P.infinite or C.is_weierstrass(P):
        raise WeierstrassDiscError("Frobenius lift is only used on non-Weierstrass discs")
    xp = P.x ** C.p
    return CurvePoint(xp, sqrt(C.f(xp), P.y.residue()))


def _plan(p: int, g: int, n_work: int):
    """Number of binomial terms and the internal modulus exponents."""
    def deg_at(k):
        return p * (2 * g) - 1 + k * p * (2 * g + 1)

    def loss(k):
        return _floor_log(p * (2 * k + 1), p) + _floor_log(2 * deg_at(k) + 2 * g + 1, p)

    K = 1
    while K + 1 - loss(K) < n_work + 1:
        K += 1
    smax = p * (2 * K - 1)
    vloss = sum(vp(s - 2, p) for s in range(3, smax + 1, 2))
    hloss = sum(vp(2 * m + 2 * g + 1, p) for m in range(0, deg_at(K) + 1))
    top = n_work + vloss + hloss + 4
    big = top + vloss + hloss + 4
    trunc = min(k + 1 - loss(k) for k in range(K, K + 4))
    return K, top, big, trunc


def frobenius_matrix(C: CurveModel, n_work: int, use_cache: bool = True) -> FrobData:
    """Matrix of phi^* on x^i dx/2y with the exact parts f_i, to about n_work digits."""
    if C.f_exact is None:
        raise PrecisionExhausted("Frobenius needs exact curve coefficients")
    key = _cache_key(C, n_work)
    if use_cache:
        cached = _cache_load(key)
        if cached is not None:
            return cached
    p, g = C.p, C.g
    K, top, big, trunc = _plan(p, g, n_work)
    red = _Reducer(_ints_mod(C.f_exact, p, big), p, g, big)
    mod = p ** (big + 1)
    f1 = _ints_mod(C.f_exact, p, big + 1)
    fxp = [0] * (p * (len(f1) - 1) + 1)
    for k, c in enumerate(f1):
        fxp[p * k] = c
    fp_pow = [1]
    for _ in range(p):
        fp_pow = _mul(fp_pow, f1, mod)
    diff = _add(fxp, [(-c) % mod for c in fp_pow], mod)
    assert all(c % p == 0 for c in diff)
    E = [c // p for c in diff]
    modb = p ** big
    E = [c % modb for c in E]
    Epows = [[1]]
    for _ in range(1, K):
        Epows.append(_mul(Epows[-1], E, modb))

    M, exact_parts = [], []
    for i in range(2 * g):
        levels: dict[int, _Block] = {}
        shift = p * (i + 1) - 1
        for k in range(K):
            coef = Fraction(p) ** (k + 1) * _binom_half(k) / 2
            e, u = _split(coef, p)
            rel = top - e
            m = p ** rel
            uu = _unit_mod(u, m)
            ints = [0] * shift + [(c * uu) % m for c in Epows[k]]
            levels[p * (2 * k + 1)] = _Block(ints, e, top)
        exact: dict[int, _Block] = {}
        red.vertical(levels, exact)
        rem, hterms = red.horizontal(levels.get(1, _Block([0], top, top)))
        row = []
        ints = rem.ints + [0] * (2 * g - len(rem.ints))
        for j in range(2 * g):
            c = Padic.make(p, rem.val, 2 * ints[j], rem.rel).add_bigoh(trunc)
            row.append(c)
        M.append(row)
        parts = {}
        for s, blk in exact.items():
            parts[s] = Poly([c.add_bigoh(trunc) for c in blk.to_padics(p)])
        if hterms:
            deg = max(m for m, _ in hterms)
            zero = Padic.zero(p, trunc)
            coeffs = [zero] * (deg + 1)
            for m, c in hterms:
                coeffs[m] = coeffs[m] + c.add_bigoh(trunc)
            parts[-1] = Poly(coeffs)
        exact_parts.append(parts)
    prec = min(c.absprec for row in M for c in row)
    fd = FrobData(p, g, M, exact_parts, prec, n_work, K, key)
    if use_cache:
        _cache_store(key, fd)
    return fd


def reduce_cohomology(C: CurveModel, form: dict[int, list], prec: int):
    """Reduce sum_s A_s(x) dx / y^s (s odd >= 1, rational A_s) to the basis.

    Returns (coefficient vector over x^i dx/2y, exact part as in FrobData)."""
    p, g = C.p, C.g
    top = prec
    smax = max(form)
    vloss = sum(vp(s - 2, p) for s in range(3, smax + 1, 2))
    dmax = max(len(a) for a in form.values()) + (smax // 2) * (2 * g + 1)
    hloss = sum(vp(2 * m + 2 * g + 1, p) for m in range(0, dmax + 1))
    top = prec + vloss + hloss + 2
    big = top + vloss + hloss + 4
    red = _Reducer(_ints_mod(C.f_exact, p, big), p, g, big)
    levels = {}
    for s, coeffs in form.items():
        if s < 1 or s % 2 == 0:
            raise ValueError("levels must be odd and positive")
        vals = [Fraction(c) for c in coeffs]
        e = min((vp(c.numerator, p) - vp(c.denominator, p) for c in vals if c), default=top)
        m = p ** (top - e)
        ints = [_unit_mod(c / Fraction(p) ** e, m) if c else 0 for c in vals]
        levels[s] = _Block(ints, e, top)
    exact: dict[int, _Block] = {}
    red.vertical(levels, exact)
    rem, hterms = red.horizontal(levels.get(1, _Block([0], top, top)))
    ints = rem.ints + [0] * (2 * g - len(rem.ints))
    coeffs = [Padic.make(p, rem.val, 2 * ints[j], rem.rel) for j in range(2 * g)]
    parts = {s: Poly(blk.to_padics(p)) for s, blk in exact.items()}
    if hterms:
        deg = max(m for m, _ in hterms)
        zero = Padic.zero(p, top)
        cs = [zero] * (deg + 1)
        for m, c in hterms:
            cs[m] = cs[m] + c
        parts[-1] = Poly(cs)
    return coeffs, parts


# -- unit-root subspace -------------------------------------------------------

class SubspaceW:
    """A g-dimensional complement to the holomorphic forms, as 2g-vectors."""

    def __init__(self, vectors: list[list[Padic]], policy: str):
        self.vectors = vectors
        self.policy = policy

    def matrix(self):
        """2g x g matrix with the spanning vectors as columns."""
        return transpose(self.vectors)


def unit_root_subspace(fd: FrobData, n: int | None = None, policy: str = "unit-root") -> SubspaceW:
    p, g = fd.p, fd.g
    prec = fd.prec + 5
    one = Padic.from_rational(p, 1, prec)
    zero = Padic.zero(p, prec)
    if policy == "g1-omega1":
        if g != 1:
            raise NonOrdinaryError("span{x dx/2y} is only a valid choice in genus 1")
        return SubspaceW([[zero, one]], policy)
    if policy != "unit-root":
        raise ValueError(f"unknown W policy {policy!r}")
    n = fd.prec if n is None else n
    F = fd.frob
    vecs = []
    for j in range(g, 2 * g):
        v = [one if k == j else zero for k in range(2 * g)]
        for _ in range(n):
            v = matvec(F, v)
        vecs.append(v)
    lower = [[vecs[c][r] for c in range(g)] for r in range(g, 2 * g)]
    d = det(lower)
    if d.is_zero() or d.val > 0:
        raise NonOrdinaryError("p is not ordinary for this curve; supply W explicitly")
    return SubspaceW(vecs, policy)


def explicit_subspace(C: CurveModel, columns, prec: int) -> SubspaceW:
    """W from a user-supplied 2g x g matrix of rationals (given column-major)."""
    vecs = [[Padic.from_rational(C.p, Fraction(x), prec) for x in col] for col in columns]
    g = C.g
    if len(vecs) != g or any(len(v) != 2 * g for v in vecs):
        raise ValueError("W must be given by g vectors of length 2g")
    lower = [[vecs[c][r] for c in range(g)] for r in range(g, 2 * g)]
    if det(lower).is_zero():
        raise NonOrdinaryError("supplied W is not complementary to the holomorphic forms")
    return SubspaceW(vecs, "explicit")


# -- cache --------------------------------------------------------------------

def _cache_key(C: CurveModel, n_work: int) -> str:
    raw = json.dumps([C.p, [str(c) for c in C.f_exact], n_work])
    return hashlib.sha256(raw.encode()).hexdigest()[:24]


def _cache_dir() -> Path | None:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def _cache_load(key: str) -> FrobData | None:
    d = _cache_dir()
    if d is None:
        return None
    path = d / f"frob-{key}.json"
    if not path.exists():
        return None
    return FrobData.from_json(json.loads(path.read_text()), key)


def _cache_store(key: str, fd: FrobData) -> None:
    d = _cache_dir()
    if d is None:
        return
    d.mkdir(parents=True, exist_ok=True)
    (d / f"frob-{key}.json").write_text(json.dumps(fd.to_json()))
