"""Polynomials over Q_p, truncated Laurent series, Hensel lifting and CRT.

:class:`Poly` is a short list of :class:`Padic` coefficients and is meant for
low-degree objects (the curve polynomial, Mumford pairs).  Heavy local
expansions use :class:`TruncatedSeries`, which stores all coefficients as
integers modulo ``p**prec`` sharing one valuation shift, so that products are a
single call into the convolution kernel.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import LogTermRequired, PadicDomainError, PrecisionExhausted, ValidationError
from .kernels import conv_mod
from .linalg import solve_consistent
from .padic import Padic, RingElement, sqrt_mod_p, vp

# ---------------------------------------------------------------------------
# polynomials over F_p (int lists, low to high)


def fp_trim(a: list[int]) -> list[int]:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a or [0]


def fp_divmod(a: list[int], b: list[int], p: int):
    a, b = fp_trim([x % p for x in a]), fp_trim([x % p for x in b])
    if b == [0]:
        raise ZeroDivisionError("division by zero polynomial mod p")
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] * inv % p
        q[k] = c
        if c:
            for j, y in enumerate(b):
                r[k + j] = (r[k + j] - c * y) % p
    return fp_trim(q), fp_trim(r[:len(b) - 1] or [0])


def fp_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return fp_trim(out)


def fp_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    """Monic gcd over F_p."""
    a, b = fp_trim([x % p for x in a]), fp_trim([x % p for x in b])
    while b != [0]:
        a, b = b, fp_divmod(a, b, p)[1]
    if a == [0]:
        return a
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def fp_xgcd(a: list[int], b: list[int], p: int):
    """(g, s, t) with s*a + t*b = g monic."""
    r0, r1 = fp_trim(a), fp_trim(b)
    s0, s1, t0, t1 = [1], [0], [0], [1]
    while r1 != [0]:
        q, r = fp_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, fp_sub(s0, fp_mul(q, s1, p), p)
        t0, t1 = t1, fp_sub(t0, fp_mul(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return ([x * inv % p for x in r0], [x * inv % p for x in s0], [x * inv % p for x in t0])


def fp_sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return fp_trim([(x - y) % p for x, y in zip(a, b)])


def fp_roots(a: list[int], p: int) -> list[int]:
    a = fp_trim(a)
    return [r for r in range(p) if _fp_eval(a, r, p) == 0]


def _fp_eval(a, x, p):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def fp_factor(a: list[int], p: int) -> list[tuple[list[int], int]]:
    """Monic irreducible factors over F_p with multiplicities (via sympy)."""
    from sympy import Poly as SymPoly, symbols

    x = symbols("x")
    sp = SymPoly(list(reversed(fp_trim(a))), x, modulus=p)
    _, factors = sp.factor_list()
    out = []
    for fac, e in factors:
        coeffs = [int(c) % p for c in reversed(fac.all_coeffs())]
        inv = pow(coeffs[-1], -1, p)
        out.append(([c * inv % p for c in coeffs], e))
    return out


# ---------------------------------------------------------------------------
# polynomials over Q_p


class Poly:
    """Dense polynomial with Padic (or RingElement) coefficients, low to high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = coeffs

    @classmethod
    def from_rationals(cls, p: int, coeffs, prec: int) -> Poly:
        return cls([Padic.from_rational(p, Fraction(c), prec) for c in coeffs])

    @property
    def p(self) -> int:
        c = self.coeffs[0]
        return c.p if isinstance(c, Padic) else c.ring.p

    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0].is_zero():
            return -1
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.degree() < 0

    def is_monic(self) -> bool:
        return (self.coeffs[-1] - 1).is_zero()

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else None

    def _zero(self):
        c = self.coeffs[0]
        return c - c

    def __add__(self, other: Poly) -> Poly:
        if not isinstance(other, Poly):
            other = Poly([self._zero() + other])
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for k in range(n):
            a = self.coeffs[k] if k < len(self.coeffs) else None
            b = other.coeffs[k] if k < len(other.coeffs) else None
            out.append(a + b if a is not None and b is not None else (a if b is None else b))
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other) -> Poly:
        if not isinstance(other, Poly):
            other = Poly([self._zero() + other])
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        out = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                t = a * b
                out[i + j] = t if out[i + j] is None else out[i + j] + t
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Poly:
        result = Poly([self._zero() + 1])
        for _ in range(e):
            result = result * self
        return result

    def divmod(self, other: Poly):
        """Long division; ``other`` must have an invertible leading coefficient."""
        db = other.degree()
        if db < 0:
            raise ZeroDivisionError("polynomial division by zero")
        lead_inv = other.coeffs[db].inverse()
        r = list(self.coeffs)
        if len(r) - 1 < db:
            return Poly([self._zero()]), Poly(r)
        q = [None] * (len(r) - db)
        for k in range(len(r) - 1 - db, -1, -1):
            c = r[k + db] * lead_inv
            q[k] = c
            for j in range(db + 1):
                r[k + j] = r[k + j] - c * other.coeffs[j]
        rem = r[:db] if db > 0 else [self._zero()]
        return Poly(q), Poly(rem)

    def __mod__(self, other: Poly) -> Poly:
        return self.divmod(other)[1]

    def __floordiv__(self, other: Poly) -> Poly:
        return self.divmod(other)[0]

    def derivative(self) -> Poly:
        if len(self.coeffs) == 1:
            return Poly([self._zero()])
        return Poly([c * k for k, c in enumerate(self.coeffs) if k > 0])

    def __call__(self, x):
        """Evaluate at a Padic, RingElement or TruncatedSeries (Horner)."""
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        return acc

    def monic(self) -> Poly:
        inv = self.coeffs[-1].inverse()
        return Poly([c * inv for c in self.coeffs])

    def reduce_mod_p(self) -> list[int]:
        return fp_trim([c.residue() for c in self.coeffs])

    def to_ints(self, k: int) -> list[int]:
        """Integer coefficients modulo p^k (requires integral coefficients)."""
        return [c.to_int_mod(k) for c in self.coeffs]

    def absprec(self) -> int:
        return min(c.absprec for c in self.coeffs)

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return "Poly(" + ", ".join(str(c) for c in self.coeffs) + ")"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q_p by Euclid, with zero-to-precision remainders treated as zero."""
    while not b.is_zero():
        a, b = b, a % b
    if a.is_zero():
        return a
    return a.monic()


def hensel_lift_factors(a: list[int], g0: list[int], h0: list[int], p: int, k: int):
    """Lift a = g0*h0 (mod p, coprime, g0 monic) to a = g*h mod p^k; ``a`` monic ints."""
    _, s, t = fp_xgcd(g0, h0, p)
    mod = p ** k
    g, h = list(g0), list(h0)
    # make h carry the leading coefficient of a (1)
    for j in range(1, k):
        pj = p ** j
        prod = _int_polymul(g, h)
        n = max(len(a), len(prod))
        e = [((a[i] if i < len(a) else 0) - (prod[i] if i < len(prod) else 0)) for i in range(n)]
        if any(x % pj for x in e):
            raise PrecisionExhausted("Hensel lifting lost exactness")
        e = fp_trim([(x // pj) % p for x in e])
        et = fp_mul(e, t, p)
        _, dg = fp_divmod(et, g0, p)
        dh, rem = fp_divmod(fp_sub(e, fp_mul(h0, dg, p), p), g0, p)
        if rem != [0]:
            raise PadicDomainError("inconsistent Hensel step")
        g = _int_polyadd(g, [pj * c for c in dg], mod)
        h = _int_polyadd(h, [pj * c for c in dh], mod)
    return g, h


def _int_polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _int_polyadd(a, b, mod):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % mod for i in range(n)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def hensel_factor(a: Poly, f: Poly) -> tuple[Poly, Poly]:
    """Split monic ``a`` as a_w * a_nw where a_w reduces onto the roots of f mod p."""
    if not a.is_monic():
        raise ValidationError("hensel_factor expects a monic polynomial")
    p = a.p
    prec = a.absprec()
    if prec < 1:
        raise PrecisionExhausted("no precision left in a")
    abar = a.reduce_mod_p()
    fbar = f.reduce_mod_p()
    aw, rest = [1], abar
    while True:
        g = fp_gcd(rest, fbar, p)
        if len(g) == 1:
            break
        aw = fp_mul(aw, g, p)
        rest = fp_divmod(rest, g, p)[0]
    if fp_gcd(aw, rest, p) != [1]:
        raise PadicDomainError("split of a mod p is not coprime")
    one = Padic.from_rational(p, 1, prec)
    if len(aw) == 1:
        return Poly([one]), a
    if len(rest) == 1:
        return a, Poly([one])
    gi, hi = hensel_lift_factors(a.to_ints(prec), aw, rest, p, prec)
    return (Poly([Padic.make(p, 0, c, prec) for c in gi]),
            Poly([Padic.make(p, 0, c, prec) for c in hi]))


def hensel_factor_all(a: Poly) -> list[Poly]:
    """Factor monic ``a`` (squarefree mod p) into lifts of its F_p-irreducible factors."""
    p = a.p
    prec = a.absprec()
    factors = fp_factor(a.reduce_mod_p(), p)
    if any(e > 1 for _, e in factors):
        raise PadicDomainError("polynomial is not squarefree mod p")
    out = []
    current = a.to_ints(prec)
    for i, (fac, _) in enumerate(factors):
        if i == len(factors) - 1:
            out.append(current)
            break
        rest = fp_divmod([c % p for c in current], fac, p)[0]
        g, current = hensel_lift_factors(current, fac, rest, p, prec)
        out.append(g)
    return [Poly([Padic.make(p, 0, c, prec) for c in g]) for g in out]


def hensel_roots(a: Poly) -> list[Padic]:
    """All roots in Z_p of ``a`` whose reductions are simple roots mod p."""
    p = a.p
    prec = a.absprec()
    abar = a.reduce_mod_p()
    dbar = fp_trim([(k * c) % p for k, c in enumerate(abar)][1:] or [0])
    roots = []
    for r0 in fp_roots(abar, p):
        if _fp_eval(dbar, r0, p) == 0:
            raise PadicDomainError("repeated root mod p", root=r0)
        x = Padic.from_rational(p, r0, prec)
        da = a.derivative()
        for _ in range(prec.bit_length() + 2):
            x = x - a(x) / da(x)
        roots.append(x.add_bigoh(prec))
    return roots


def crt_combine(a: Poly, b: Poly, c: Poly, d: Poly) -> Poly:
    """e with e = b mod a and e = -d mod c, of degree below deg lcm(a, c)."""
    g = poly_gcd(a, c)
    n = a.degree() + c.degree() - max(g.degree(), 0)
    p = a.p
    prec = min(x.absprec() for x in (a, b, c, d))
    one = Padic.from_rational(p, 1, prec)
    zero = Padic.zero(p, prec)
    rows_a = _reduction_matrix(a, n, one, zero)
    rows_c = _reduction_matrix(c, n, one, zero)
    target_a = _padded((b % a).coeffs if a.degree() > 0 else [], a.degree(), zero)
    target_c = _padded(((-d) % c).coeffs if c.degree() > 0 else [], c.degree(), zero)
    try:
        sol = solve_consistent(rows_a + rows_c, target_a + target_c)
    except PadicDomainError as exc:
        raise PadicDomainError("congruences disagree on a shared factor") from exc
    return Poly(sol if sol else [zero])


def _padded(coeffs, n, zero):
    coeffs = list(coeffs)[:n]
    return coeffs + [zero] * (n - len(coeffs))


def _reduction_matrix(m: Poly, n: int, one, zero):
    """Matrix of e -> e mod m on polynomials of degree < n."""
    dm = m.degree()
    if dm <= 0:
        return []
    cols = []
    for k in range(n):
        xk = Poly([zero] * k + [one])
        cols.append(_padded((xk % m).coeffs, dm, zero))
    return [[cols[k][i] for k in range(n)] for i in range(dm)]


# ---------------------------------------------------------------------------
# integer-block helpers


def block_from_padics(items: Sequence[Padic]):
    """Common (ints, val, prec) representation of a list of Padics."""
    p = items[0].p
    absprec = min(x.absprec for x in items)
    nonzero = [x.val for x in items if not x.is_zero()]
    val = min(nonzero) if nonzero else absprec
    val = min(val, absprec)
    prec = absprec - val
    mod = p ** prec
    ints = [0 if x.is_zero() else x.unit * p ** (x.val - val) % mod for x in items]
    return ints, val, prec


def _ring_reduce(slot: list[int], m: list[int], mod: int) -> list[int]:
    d = len(m) - 1
    slot = list(slot)
    for k in range(len(slot) - 1, d - 1, -1):
        c = slot[k] % mod
        if c:
            for j in range(d):
                slot[k - d + j] -= c * m[j]
    return [x % mod for x in slot[:d]] + [0] * max(0, d - len(slot))


def _ring_mul_int(a: list[int], b: list[int], m: list[int], mod: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _ring_reduce(prod, m, mod)


def _ring_inv_int(a: list[int], m: list[int], p: int, prec: int) -> list[int]:
    """Inverse of a ring unit given by integer coefficients, modulo p^prec."""
    d = len(m) - 1
    mod = p ** prec
    cols = []
    col = list(a)
    for _ in range(d):
        cols.append(col)
        col = _ring_reduce([0] + col, m, mod)
    mat = [[cols[j][i] % mod for j in range(d)] + [int(i == 0)] for i in range(d)]
    for c in range(d):
        piv = next((i for i in range(c, d) if mat[i][c] % p), None)
        if piv is None:
            raise PadicDomainError("ring element is not a unit")
        mat[c], mat[piv] = mat[piv], mat[c]
        inv = pow(mat[c][c], -1, mod)
        mat[c] = [x * inv % mod for x in mat[c]]
        for i in range(d):
            if i != c and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(x - f * y) % mod for x, y in zip(mat[i], mat[c])]
    return [mat[i][d] for i in range(d)]


def _content_val(ints: list[int], p: int, prec: int) -> int:
    """Smallest valuation among the integers, capped at prec."""
    best = prec
    for x in ints:
        if x:
            v = 0
            while x % p == 0 and v < best:
                x //= p
                v += 1
            best = min(best, v)
            if best == 0:
                return 0
    return best


# ---------------------------------------------------------------------------
# truncated Laurent series


class TruncatedSeries:
    """Laurent series ``p**val * sum c_k t**(start+k)`` known modulo t**order.

    Each integer coefficient (or block of ``d`` integers for ring
    coefficients) is known modulo ``p**prec``.  ``ring`` is a
    :class:`QuotientRing` or None for Q_p coefficients.
    """

    __slots__ = ("p", "ring", "c", "val", "prec", "start", "order")

    def __init__(self, p, c, val, prec, start, order, ring=None):
        self.p = p
        self.ring = ring
        self.c = c
        self.val = val
        self.prec = prec
        self.start = start
        self.order = order

    # -- construction -------------------------------------------------
    @property
    def d(self) -> int:
        return self.ring.degree if self.ring is not None else 1

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, start: int, order: int, ring=None) -> TruncatedSeries:
        """Series from Padic (or RingElement) coefficients of t^start, t^(start+1), ..."""
        coeffs = list(coeffs)[: order - start]
        flat = []
        for c in coeffs:
            if ring is None:
                flat.append(c)
            else:
                if isinstance(c, Padic):
                    c = ring.scalar(c)
                flat.extend(c.coeffs)
        d = ring.degree if ring is not None else 1
        p = flat[0].p if flat else None
        if not flat:
            raise ValueError("need at least one coefficient")
        ints, val, prec = block_from_padics(flat)
        ints += [0] * ((order - start) * d - len(ints))
        return cls(p, ints, val, prec, start, order, ring)

    @classmethod
    def gen(cls, p: int, prec: int, order: int, ring=None) -> TruncatedSeries:
        """The local parameter t."""
        d = ring.degree if ring is not None else 1
        c = [0] * ((order - 1) * d)
        if order > 1:
            c[0] = 1
        return cls(p, c, 0, prec, 1, order, ring)

    @classmethod
    def constant(cls, x, order: int, ring=None) -> TruncatedSeries:
        return cls.from_coeffs([x], 0, order, ring)

    def _modulus_ints(self, prec):
        return [c.to_int_mod(prec) for c in self.ring.modulus]

    # -- inspection ---------------------------------------------------
    def coefficient(self, k: int):
        """Coefficient of t^k as a Padic (or RingElement)."""
        if k >= self.order:
            raise PrecisionExhausted(f"coefficient t^{k} beyond truncation order {self.order}")
        d = self.d
        i = k - self.start
        if i < 0:
            ints = [0] * d
        else:
            ints = self.c[i * d:(i + 1) * d]
        vals = [Padic.make(self.p, self.val, x, self.prec) for x in ints]
        if self.ring is None:
            return vals[0]
        return RingElement(self.ring, vals)

    def coefficients(self) -> list:
        return [self.coefficient(k) for k in range(self.start, self.order)]

    def absprec(self) -> int:
        return self.val + self.prec

    def __repr__(self):
        terms = []
        for k in range(self.start, min(self.order, self.start + 6)):
            terms.append(f"({self.coefficient(k)})*t^{k}")
        return " + ".join(terms) + f" + O(t^{self.order})"

    # -- alignment ----------------------------------------------------
    def _scaled(self, val: int, prec: int) -> list[int]:
        """Coefficients re-expressed relative to p**val, modulo p**prec."""
        mod = self.p ** prec
        shift = self.val - val
        if shift == 0 and prec >= self.prec:
            return self.c if prec == self.prec else [x % mod for x in self.c]
        f = self.p ** shift
        return [x * f % mod for x in self.c]

    def _check(self, other):
        if other.p != self.p or (self.ring is None) != (other.ring is None) or (
                self.ring is not None and self.ring.degree != other.ring.degree):
            raise ValueError("incompatible series")

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return None
            q = Fraction(other)
            v = vp(q.numerator, self.p) - vp(q.denominator, self.p)
            x = Padic.from_rational(self.p, q, max(self.absprec() - v, 1))
            return TruncatedSeries.constant(x, self.order, self.ring)
        if isinstance(other, Padic):
            return TruncatedSeries.constant(other, self.order, self.ring)
        if isinstance(other, RingElement):
            return TruncatedSeries.constant(other, self.order, self.ring)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return self
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        d = self.d
        val = min(self.val, other.val)
        absprec = min(self.absprec(), other.absprec())
        prec = max(absprec - val, 0)
        start = min(self.start, other.start)
        order = min(self.order, other.order)
        if order <= start:
            return TruncatedSeries(self.p, [], val, prec, order, order, self.ring)
        mod = self.p ** prec
        out = [0] * ((order - start) * d)
        for s in (self, other):
            ints = s._scaled(val, prec)
            off = (s.start - start) * d
            n = min(len(ints), len(out) - off)
            for i in range(max(n, 0)):
                out[off + i] += ints[i]
        return TruncatedSeries(self.p, [x % mod for x in out], val, prec, start, order, self.ring)

    __radd__ = __add__

    def __neg__(self):
        mod = self.p ** self.prec
        return TruncatedSeries(self.p, [(-x) % mod for x in self.c], self.val, self.prec,
                               self.start, self.order, self.ring)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return self
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, x: Padic) -> TruncatedSeries:
        """Multiply by a Padic scalar."""
        if x.is_zero():
            return TruncatedSeries(self.p, [0] * len(self.c), self.val + x.val, 0,
                                   self.start, self.order, self.ring)
        prec = min(self.prec, x.prec)
        mod = self.p ** prec
        u = x.unit
        return TruncatedSeries(self.p, [y * u % mod for y in self.c], self.val + x.val, prec,
                               self.start, self.order, self.ring)

    def __mul__(self, other):
        if isinstance(other, Padic):
            return self.scale(other)
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.scale(Padic.zero(self.p, 10 ** 6))
            return self.scale(Padic.from_rational(self.p, other, self.prec + 2))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        start = self.start + other.start
        order = min(self.order + other.start, other.order + self.start)
        n = order - start
        prec = min(self.prec, other.prec)
        val = self.val + other.val
        if n <= 0:
            return TruncatedSeries(self.p, [], val, prec, start, start, self.ring)
        mod = self.p ** prec
        a = self._scaled(self.val, prec)
        b = other._scaled(other.val, prec)
        d = self.d
        if d == 1:
            out = conv_mod(a[:n], b[:n], mod, n)
        else:
            out = _ring_conv(a[:n * d], b[:n * d], self._modulus_ints(prec), mod, d, n)
        return TruncatedSeries(self.p, out, val, prec, start, order, self.ring)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        if result is None:
            return TruncatedSeries.constant(Padic.from_rational(self.p, 1, self.prec), self.order - self.start, self.ring)
        return result

    def __truediv__(self, other):
        if isinstance(other, (Padic, int, Fraction)):
            if not isinstance(other, Padic):
                other = Padic.from_rational(self.p, other, self.prec + 2)
            return self.scale(other.inverse())
        if isinstance(other, RingElement):
            return self * TruncatedSeries.constant(other, self.order, self.ring).inverse()
        return self * other.inverse()

    def shift(self, k: int) -> TruncatedSeries:
        """Multiply by t^k."""
        return TruncatedSeries(self.p, self.c, self.val, self.prec, self.start + k, self.order + k, self.ring)

    def truncate(self, order: int) -> TruncatedSeries:
        if order >= self.order:
            return self
        n = max(order - self.start, 0) * self.d
        return TruncatedSeries(self.p, self.c[:n], self.val, self.prec, min(self.start, order), order, self.ring)

    def as_power_series(self) -> TruncatedSeries:
        """Drop negative-exponent terms that vanish to precision."""
        if self.start >= 0:
            return self
        d = self.d
        k = -self.start * d
        if any(x % self.p ** self.prec for x in self.c[:k]):
            raise ValueError("series has a genuine pole at t = 0")
        return TruncatedSeries(self.p, self.c[k:], self.val, self.prec, 0, self.order, self.ring)

    def add_bigoh(self, absprec: int) -> TruncatedSeries:
        """Lower the coefficient precision to ``absprec`` (absolute)."""
        if absprec >= self.absprec():
            return self
        prec = max(absprec - self.val, 0)
        mod = self.p ** prec
        return TruncatedSeries(self.p, [x % mod for x in self.c], self.val, prec,
                               self.start, self.order, self.ring)

    def normalized(self) -> TruncatedSeries:
        """Strip the common power of p from the coefficients."""
        k = _content_val(self.c, self.p, self.prec)
        if k == 0 or k == self.prec:
            return self
        f = self.p ** k
        return TruncatedSeries(self.p, [x // f for x in self.c], self.val + k, self.prec - k,
                               self.start, self.order, self.ring)

    def _leading(self):
        """(exponent, ints) of the first coefficient that is not zero to precision."""
        d = self.d
        for i in range(self.order - self.start):
            block = self.c[i * d:(i + 1) * d]
            if any(block):
                return self.start + i, block
        raise PrecisionExhausted("series is zero to its precision")

    def inverse(self) -> TruncatedSeries:
        """Newton inversion; the leading coefficient must be a unit up to the content."""
        s = self.normalized()
        e, lead = s._leading()
        d, p = s.d, s.p
        if _content_val(lead, p, s.prec) != 0:
            raise PrecisionExhausted("leading coefficient is not a unit of the series content")
        n = s.order - e
        off = (e - s.start) * d
        a = s.c[off:]
        prec = s.prec
        mod = p ** prec
        if d == 1:
            b = [pow(lead[0], -1, mod)]
        else:
            m = s._modulus_ints(prec)
            b = _ring_inv_int(lead, m, p, prec)
        k = 1
        while k < n:
            k = min(2 * k, n)
            ab = s._mul_ints(a[:k * d], b, k, prec)
            two_minus = [(-x) % mod for x in ab]
            two_minus[0] = (two_minus[0] + 2) % mod
            b = s._mul_ints(b, two_minus, k, prec)
        return TruncatedSeries(p, b[:n * d], -s.val, prec, -e, -e + n, s.ring)

    def _mul_ints(self, a, b, n, prec):
        mod = self.p ** prec
        if self.d == 1:
            return conv_mod(a[:n], b[:n], mod, n)
        return _ring_conv(a[:n * self.d], b[:n * self.d], self._modulus_ints(prec), mod, self.d, n)

    def derivative(self) -> TruncatedSeries:
        d = self.d
        mod = self.p ** self.prec
        out = []
        for i in range(self.order - self.start):
            k = self.start + i
            out.extend((k * x) % mod for x in self.c[i * d:(i + 1) * d])
        return TruncatedSeries(self.p, out, self.val, self.prec, self.start - 1, self.order - 1, self.ring)

    def integral(self) -> TruncatedSeries:
        """Term-wise antiderivative with zero constant term."""
        d, p = self.d, self.p
        i_res = -1 - self.start
        if 0 <= i_res < self.order - self.start and any(self.c[i_res * d:(i_res + 1) * d]):
            raise LogTermRequired("t^-1 term present; use an antiderivative with log terms")
        exps = []
        emax = 0
        for i in range(self.order - self.start):
            k = self.start + i
            if k == -1:
                exps.append(None)
                continue
            e = vp(k + 1, p) if any(self.c[i * d:(i + 1) * d]) else 0
            exps.append(e)
            emax = max(emax, e)
        mod = p ** self.prec
        out = []
        for i, e in enumerate(exps):
            k = self.start + i
            block = self.c[i * d:(i + 1) * d]
            if e is None:
                out.extend([0] * d)
                continue
            unit = (k + 1) // p ** vp(k + 1, p)
            factor = p ** (emax - e) * pow(unit, -1, mod) % mod
            out.extend(x * factor % mod for x in block)
        return TruncatedSeries(p, out, self.val - emax, self.prec, self.start + 1, self.order + 1, self.ring)

    def residue(self):
        """Coefficient of t^-1."""
        return self.coefficient(-1)

    def valuation_t(self) -> int:
        return self._leading()[0]

    def sqrt(self, sign_digit: int | None = None) -> TruncatedSeries:
        """Square root over Q_p; leading coefficient root chosen by ``sign_digit``."""
        if self.ring is not None:
            raise ValueError("series square roots are only implemented over Q_p")
        s = self.normalized()
        e, lead = s._leading()
        p, prec = s.p, s.prec
        if e % 2 or s.val % 2:
            raise PadicDomainError("odd leading exponent or valuation in series sqrt")
        r0 = sqrt_mod_p(lead[0], p)
        if r0 is None:
            raise PadicDomainError("leading coefficient is not a square")
        mod = p ** prec
        n = s.order - e
        off = e - s.start
        a = s.c[off:off + n]
        from .padic import hensel_sqrt
        if sign_digit is not None:
            if (sign_digit - r0) % p and (sign_digit + r0) % p:
                raise PadicDomainError("sign digit is not a square root of the leading coefficient")
            r0 = sign_digit % p
        root0 = hensel_sqrt(lead[0], r0, p, prec)
        # inverse square root by Newton: r <- r + r(1 - a r^2)/2
        r = [pow(root0, -1, mod)]
        half = pow(2, -1, mod)
        k = 1
        while k < n:
            k = min(2 * k, n)
            r2 = conv_mod(r, r, mod, k)
            ar2 = conv_mod(a[:k], r2, mod, k)
            corr = [(-x) % mod for x in ar2]
            corr[0] = (corr[0] + 1) % mod
            rc = conv_mod(r, corr, mod, k)
            r = [((r[i] if i < len(r) else 0) + rc[i] * half) % mod for i in range(k)]
        root = conv_mod(a[:n], r, mod, n)
        return TruncatedSeries(p, root, s.val // 2, prec, e // 2, e // 2 + n, None)

    def evaluate(self, x):
        """Sum c_k x^k for a Padic or RingElement x (non-negative exponents only
        unless x is a unit); returns a Padic / RingElement with block precision."""
        if self.start < 0 and not isinstance(x, (Padic,)):
            raise ValueError("negative exponents need a Padic unit argument")
        acc = None
        for k in range(self.order - 1, self.start - 1, -1):
            c = self.coefficient(k)
            acc = c if acc is None else acc * x + c
        if acc is None:
            return Padic.zero(self.p, self.absprec())
        if self.start:
            acc = acc * (x ** self.start)
        return acc

    def evaluate_at_one(self) -> Padic:
        """Sum of all known coefficients (base ring only)."""
        mod = self.p ** self.prec
        return Padic.make(self.p, self.val, sum(self.c) % mod, self.prec)

    def divided_difference(self, c: Padic, order: int) -> TruncatedSeries:
        """(F(t) - F(c)) / (t - c) for a power series F and |c| < 1, to t^order.

        Coefficient j is sum_{k>j} F_k c^(k-1-j); the unknown tail costs
        v(c) * (self.order - order) digits, which caps the precision."""
        if self.start < 0:
            raise ValueError("divided difference needs a power series")
        if c.val < 1 and not c.is_zero():
            raise ValueError("divided difference point must be in the open unit disc")
        p, d = self.p, self.d
        vc = c.val if not c.is_zero() else c.absprec
        absprec = min(self.absprec(), self.val + vc * (self.order - order))
        prec = max(absprec - self.val, 0)
        mod = p ** prec
        ci = c.to_int_mod(prec) if not c.is_zero() else 0
        full = [0] * (self.start * d) + self.c
        length = self.order
        q = [0] * (length * d)
        # synthetic division from the top
        acc = [0] * d
        for j in range(length - 1, 0, -1):
            acc = [(acc[i] * ci + full[j * d + i]) % mod for i in range(d)]
            q[(j - 1) * d:j * d] = acc
        return TruncatedSeries(p, q[:order * d], self.val, prec, 0, order, self.ring)


def _ring_conv(a, b, m, mod, d, n):
    """Product of series with ring coefficients via Kronecker packing."""
    w = 2 * d - 1
    la, lb = len(a) // d, len(b) // d
    pa = [0] * (la * w)
    pb = [0] * (lb * w)
    for i in range(la):
        pa[i * w:i * w + d] = a[i * d:(i + 1) * d]
    for i in range(lb):
        pb[i * w:i * w + d] = b[i * d:(i + 1) * d]
    raw = conv_mod(pa, pb, mod, n * w)
    out = []
    for j in range(n):
        out.extend(_ring_reduce(raw[j * w:(j + 1) * w], m, mod))
    return out


def series_sqrt(s: TruncatedSeries, sign_hint: int | None = None) -> TruncatedSeries:
    return s.sqrt(sign_hint)


def formal_integrate(s: TruncatedSeries) -> TruncatedSeries:
    return s.integral()


def residue(s: TruncatedSeries):
    return s.residue()
