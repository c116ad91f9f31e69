"""Capped-precision arithmetic in Q_p and in quotient rings Q_p[u]/(m(u)).

A :class:`Padic` stores ``unit * p**val`` where ``unit`` is known modulo
``p**prec``.  A value with ``prec == 0`` is a zero known only to absolute
precision ``p**val``.  Precision is propagated conservatively: products keep
the smaller relative precision, sums keep the smaller absolute precision.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Sequence

from .errors import NonSquareError, PadicDomainError, ValidationError


def vp(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class Padic:
    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val: int, unit: int, prec: int):
        self.p = p
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- construction -------------------------------------------------
    @classmethod
    def zero(cls, p: int, absprec: int) -> Padic:
        return cls(p, absprec, 0, 0)

    @classmethod
    def make(cls, p: int, val: int, unit: int, prec: int) -> Padic:
        """Normalise ``unit * p**val`` with ``unit`` known mod ``p**prec``."""
        if prec <= 0:
            return cls(p, val + max(prec, 0), 0, 0)
        mod = p ** prec
        unit %= mod
        if unit == 0:
            return cls(p, val + prec, 0, 0)
        k = 0
        while unit % p == 0:
            unit //= p
            k += 1
        return cls(p, val + k, unit, prec - k)

    @classmethod
    def from_rational(cls, p: int, q, prec: int) -> Padic:
        """Exact rational (int or Fraction) to relative precision ``prec``.

        Zero becomes ``O(p^prec)``.
        """
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, prec)
        num, den = q.numerator, q.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        mod = p ** prec
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    # -- accessors ----------------------------------------------------
    @property
    def absprec(self) -> int:
        return self.val + self.prec

    def is_zero(self) -> bool:
        """True when the value is zero to its known precision."""
        return self.prec == 0

    def valuation(self) -> int:
        return self.val

    def lift(self) -> Fraction:
        """Rational representative with digits in [0, p)."""
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self) -> int:
        """Image in F_p; requires non-negative valuation."""
        if self.val < 0 and self.prec > 0:
            raise PadicDomainError("residue of a non-integral element")
        if self.prec == 0 or self.val > 0:
            return 0
        return self.unit % self.p

    def to_int_mod(self, k: int) -> int:
        """Integer representative modulo ``p**k`` (requires val >= 0)."""
        if self.prec == 0:
            return 0
        if self.val < 0:
            raise PadicDomainError("non-integral element")
        return self.unit * self.p ** self.val % self.p ** k

    def digits(self) -> list[int]:
        """Base-p digits of the unit part, least significant first."""
        out, u = [], self.unit
        for _ in range(self.prec):
            u, d = divmod(u, self.p)
            out.append(d)
        return out

    def add_bigoh(self, absprec: int) -> Padic:
        """Drop precision to at most ``absprec`` (absolute)."""
        if absprec >= self.absprec:
            return self
        if self.prec == 0 or absprec <= self.val:
            return Padic.zero(self.p, min(absprec, self.absprec))
        r = absprec - self.val
        return Padic(self.p, self.val, self.unit % self.p ** r, r)

    def identical(self, other: Padic) -> bool:
        """Representation equality: same digits, same precision."""
        return (self.p, self.val, self.unit, self.prec) == (other.p, other.val, other.unit, other.prec)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> Padic:
        if isinstance(other, Padic):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0:
                return Padic.zero(self.p, max(self.absprec, 0) + 10 ** 6)
            v = vp(q.numerator, self.p) - vp(q.denominator, self.p)
            rel = max(self.prec, self.absprec - v, 1)
            return Padic.from_rational(self.p, q, rel)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.prec == 0:
            return self.add_bigoh(other.absprec)
        if self.prec == 0:
            return other.add_bigoh(self.absprec)
        p = self.p
        absprec = min(self.absprec, other.absprec)
        v = min(self.val, other.val)
        if absprec <= v:
            return Padic.zero(p, absprec)
        u = self.unit * p ** (self.val - v) + other.unit * p ** (other.val - v)
        return Padic.make(p, v, u, absprec - v)

    __radd__ = __add__

    def __neg__(self):
        if self.prec == 0:
            return self
        return Padic(self.p, self.val, (-self.unit) % self.p ** self.prec, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.p
        if self.prec == 0 or other.prec == 0:
            if self.prec == 0 and other.prec == 0:
                return Padic.zero(p, self.val + other.val)
            if self.prec == 0:
                return Padic.zero(p, self.val + other.val)
            return Padic.zero(p, other.val + self.val)
        r = min(self.prec, other.prec)
        return Padic(p, self.val + other.val, self.unit * other.unit % p ** r, r)

    __rmul__ = __mul__

    def inverse(self) -> Padic:
        if self.prec == 0:
            raise PadicDomainError("division by an element indistinguishable from zero")
        mod = self.p ** self.prec
        return Padic(self.p, -self.val, pow(self.unit, -1, mod), self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return Padic.from_rational(self.p, 1, max(self.prec, 1))
        if self.prec == 0:
            return Padic.zero(self.p, self.val * e)
        mod = self.p ** self.prec
        return Padic(self.p, self.val * e, pow(self.unit, e, mod), self.prec)

    def __eq__(self, other):
        """Equality up to the smaller of the two precisions."""
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # -- printing -----------------------------------------------------
    def __str__(self) -> str:
        return format_padic(self)

    def __repr__(self) -> str:
        return f"Padic({format_padic(self)})"


def format_padic(x: Padic) -> str:
    """Render as ``d*p^e + ... + O(p^N)``, omitting zero digits."""
    p = x.p
    terms = []
    for i, d in enumerate(x.digits()):
        if d == 0:
            continue
        e = x.val + i
        if e == 0:
            terms.append(str(d))
            continue
        power = f"{p}" if e == 1 else f"{p}^{e}"
        terms.append(power if d == 1 else f"{d}*{power}")
    terms.append(f"O({p}" + ("" if x.absprec == 1 else f"^{x.absprec}") + ")")
    return " + ".join(terms)


_BIGOH = re.compile(r"^O\((\d+)(?:\^(-?\d+))?\)$")
_TERM = re.compile(r"^(?:(\d+)\*)?(\d+)(?:\^(-?\d+))?$")


def parse_padic(text: str) -> Padic:
    """Inverse of :func:`format_padic`."""
    parts = [t.strip() for t in text.strip().split("+")]
    m = _BIGOH.match(parts[-1]) if parts else None
    if not m:
        raise ValidationError(f"missing O(p^N) term in {text!r}")
    p = int(m.group(1))
    absprec = int(m.group(2)) if m.group(2) is not None else 1
    digits = {}
    for t in parts[:-1]:
        tm = _TERM.match(t)
        if not tm:
            raise ValidationError(f"cannot parse term {t!r}")
        coef, base, exp = tm.groups()
        if coef is None and exp is None:
            n = int(base)
            if n == p:
                d, e = 1, 1
            else:
                d, e = n, 0
        else:
            if int(base) != p:
                raise ValidationError(f"term {t!r} does not use prime {p}")
            d = int(coef) if coef is not None else 1
            e = int(exp) if exp is not None else 1
        if not 0 < d < p or e in digits or e >= absprec:
            raise ValidationError(f"bad digit in {t!r}")
        digits[e] = d
    if not digits:
        return Padic.zero(p, absprec)
    v = min(digits)
    unit = sum(d * p ** (e - v) for e, d in digits.items())
    return Padic(p, v, unit, absprec - v)


class Qp:
    """Conversion context: ``Qp(11, 8)(Fraction(1, 3))``."""

    def __init__(self, p: int, prec: int = 20):
        if p < 3 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise ValidationError(f"p must be an odd prime, got {p}")
        self.p = p
        self.prec = prec

    def __call__(self, x) -> Padic:
        if isinstance(x, Padic):
            return x
        if isinstance(x, str):
            if "O(" in x:
                return parse_padic(x)
            return Padic.from_rational(self.p, Fraction(x), self.prec)
        return Padic.from_rational(self.p, x, self.prec)

    def zero(self) -> Padic:
        return Padic.zero(self.p, self.prec)

    def one(self) -> Padic:
        return Padic.from_rational(self.p, 1, self.prec)


class BranchSpec:
    """Choice of log(p); ``None`` means the Iwasawa branch log(p) = 0."""

    def __init__(self, log_p: Padic | None = None):
        self.log_p = log_p

    def __repr__(self):
        return "BranchSpec(iwasawa)" if self.log_p is None else f"BranchSpec(log p = {self.log_p})"


IWASAWA = BranchSpec()


def _log_one_plus(z: int, p: int, r: int) -> int:
    """log(1 + z) mod p^r for an integer z divisible by p."""
    # largest k needed: k - floor(log_p k) >= r for all later terms
    kmax = r
    while kmax - int(math.log(kmax, p) + 1e-9) < r:
        kmax += 1
    extra = int(math.log(kmax, p) + 1e-9) + 1
    big = p ** (r + extra)
    mod = p ** r
    total = 0
    zk = 1
    for k in range(1, kmax + 1):
        zk = zk * z % big
        e, kk = 0, k
        while kk % p == 0:
            kk //= p
            e += 1
        term = (zk // p ** e) * pow(kk, -1, mod)
        total += term if k % 2 else -term
    return total % mod


def log(x: Padic, branch: BranchSpec = IWASAWA) -> Padic:
    """p-adic logarithm, extended to Q_p^x by the chosen value of log(p)."""
    if x.is_zero():
        raise PadicDomainError("log of zero")
    p, r = x.p, x.prec
    mod = p ** r
    w = pow(x.unit, p - 1, mod)
    lu = _log_one_plus((w - 1) % mod, p, r) * pow(p - 1, -1, mod) % mod
    result = Padic.make(p, 0, lu, r)
    if x.val and branch.log_p is not None:
        result = result + x.val * branch.log_p
    return result


def teichmuller(x: Padic) -> Padic:
    """The (p-1)-st root of unity congruent to ``x`` mod p."""
    if x.is_zero() or x.val != 0:
        raise PadicDomainError("teichmuller lift needs a unit")
    p, r = x.p, x.prec
    return Padic(p, 0, pow(x.unit, p ** (r - 1), p ** r), r)


def sqrt_mod_p(a: int, p: int) -> int | None:
    """Smallest square root of ``a`` mod p, or None (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return min(r, p - r)


def hensel_sqrt(a: int, r0: int, p: int, prec: int) -> int:
    """Lift a root ``r0`` of x^2 = a mod p to mod p^prec."""
    r, k = r0 % p, 1
    while k < prec:
        k = min(2 * k, prec)
        mod = p ** k
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    return r


def sqrt(x: Padic, sign_digit: int | None = None) -> Padic:
    """Square root; the first digit lies in [1, (p-1)/2] unless ``sign_digit`` picks it."""
    p = x.p
    if x.is_zero():
        return Padic.zero(p, x.val // 2)
    if x.val % 2:
        raise NonSquareError("odd valuation", valuation=x.val)
    r0 = sqrt_mod_p(x.unit, p)
    if r0 is None:
        raise NonSquareError("unit part is not a square mod p", residue=x.unit % p)
    if sign_digit is not None:
        sd = sign_digit % p
        if sd not in (r0, (p - r0) % p):
            raise NonSquareError("requested sign digit is not a root", digit=sign_digit)
        r0 = sd
    return Padic(p, x.val // 2, hensel_sqrt(x.unit, r0, p, x.prec), x.prec)


# ---------------------------------------------------------------------------
# quotient rings


class QuotientRing:
    """Q_p[u]/(m(u)) for a monic ``m`` given low-to-high as Padics."""

    def __init__(self, modulus: Sequence[Padic]):
        modulus = list(modulus)
        if len(modulus) < 2 or not (modulus[-1] - 1).is_zero():
            raise ValidationError("ring modulus must be monic of positive degree")
        self.p = modulus[0].p
        self.modulus = modulus
        self.degree = len(modulus) - 1
        self._traces = None

    def element(self, coeffs) -> RingElement:
        coeffs = list(coeffs)
        prec = min((c.absprec for c in coeffs if isinstance(c, Padic)), default=20)
        K = Qp(self.p, max(prec, 1))
        coeffs = [K(c) if not isinstance(c, Padic) else c for c in coeffs]
        return RingElement(self, _reduce_mod(coeffs, self.modulus))

    def scalar(self, c: Padic) -> RingElement:
        z = Padic.zero(self.p, c.absprec)
        return RingElement(self, [c] + [z] * (self.degree - 1))

    def gen(self, prec: int) -> RingElement:
        K = Qp(self.p, prec)
        if self.degree == 1:
            return RingElement(self, [-self.modulus[0]])
        return RingElement(self, [K(0), K(1)] + [K(0)] * (self.degree - 2))

    def power_traces(self, count: int) -> list[Padic]:
        """Power sums s_k of the roots of the modulus, k < count."""
        return power_sums(self.modulus, count)

    def __eq__(self, other):
        return isinstance(other, QuotientRing) and all(
            a.identical(b) for a, b in zip(self.modulus, other.modulus)) and self.degree == other.degree

    __hash__ = None


def power_sums(monic: Sequence[Padic], count: int) -> list[Padic]:
    """Newton's identities for the power sums of the roots of ``monic``."""
    d = len(monic) - 1
    p = monic[0].p
    prec = min(c.absprec for c in monic[:-1]) if d else 20
    sums = [Padic.from_rational(p, d, max(prec, 1))]
    for k in range(1, count):
        acc = Padic.zero(p, 10 ** 6)
        if k <= d:
            acc = acc + k * monic[d - k]
        for i in range(1, min(k - 1, d) + 1):
            acc = acc + monic[d - i] * sums[k - i]
        sums.append(-acc)
    return sums


def _reduce_mod(coeffs: list, modulus: list) -> list:
    d = len(modulus) - 1
    coeffs = list(coeffs)
    for k in range(len(coeffs) - 1, d - 1, -1):
        c = coeffs[k]
        if c.is_zero():
            continue
        for j in range(d):
            coeffs[k - d + j] = coeffs[k - d + j] - c * modulus[j]
    p = modulus[0].p
    if len(coeffs) < d:
        prec = min((c.absprec for c in coeffs), default=20)
        coeffs += [Padic.zero(p, prec)] * (d - len(coeffs))
    return coeffs[:d]


class RingElement:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: QuotientRing, coeffs: list[Padic]):
        self.ring = ring
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, RingElement):
            return other
        if isinstance(other, (Padic, int, Fraction)):
            c = self.coeffs[0]._coerce(other) if not isinstance(other, Padic) else other
            return self.ring.scalar(c)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ring, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Padic, int, Fraction)):
            return RingElement(self.ring, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self.ring.degree
        prod = [None] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                t = a * b
                prod[i + j] = t if prod[i + j] is None else prod[i + j] + t
        return RingElement(self.ring, _reduce_mod(prod, self.ring.modulus))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return ring_inverse(self) ** (-e)
        prec = min(c.absprec for c in self.coeffs)
        result = self.ring.scalar(Padic.from_rational(self.ring.p, 1, max(prec, 1)))
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (Padic, int, Fraction)):
            return RingElement(self.ring, [a / other for a in self.coeffs])
        return self * ring_inverse(other)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def valuation(self) -> int:
        """Content valuation: minimum valuation of the coefficients."""
        return min(c.val for c in self.coeffs)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return "RingElement[" + ", ".join(str(c) for c in self.coeffs) + "]"


def ring_trace(e: RingElement) -> Padic:
    """Trace of multiplication by ``e`` on Q_p[u]/(m)."""
    ring = e.ring
    sums = ring.power_traces(ring.degree)
    total = None
    for c, s in zip(e.coeffs, sums):
        t = c * s
        total = t if total is None else total + t
    return total


def _mult_matrix(e: RingElement) -> list[list[Padic]]:
    d = e.ring.degree
    prec = min(c.absprec for c in e.coeffs)
    col = e
    u = e.ring.gen(max(prec, 1))
    cols = []
    for _ in range(d):
        cols.append(col.coeffs)
        col = col * u
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def ring_inverse(e: RingElement) -> RingElement:
    from .linalg import solve

    d = e.ring.degree
    prec = min(c.absprec for c in e.coeffs)
    K = Qp(e.ring.p, max(prec - e.valuation(), 1))
    rhs = [K(1)] + [K(0)] * (d - 1)
    try:
        x = solve(_mult_matrix(e), rhs)
    except PadicDomainError as exc:
        raise PadicDomainError("ring element is not invertible") from exc
    return RingElement(e.ring, x)


def _residue_ring_elements(p: int, d: int):
    if p ** d > 200000:
        return None
    for n in range(p ** d):
        digits = []
        for _ in range(d):
            n, r = divmod(n, p)
            digits.append(r)
        yield digits


def ring_sqrt(e: RingElement) -> RingElement:
    """Square root by Newton iteration from a root in the residue ring."""
    ring, p, d = e.ring, e.ring.p, e.ring.degree
    v = e.valuation()
    if v % 2:
        raise NonSquareError("odd content valuation")
    unit = e / Padic.from_rational(p, Fraction(p) ** v, 50) if v else e
    prec = min(c.absprec for c in unit.coeffs)
    mbar = [c.residue() for c in ring.modulus]
    ebar = [c.residue() for c in unit.coeffs]
    start = None
    elements = _residue_ring_elements(p, d)
    if elements is None:
        raise NonSquareError("residue ring too large for the square-root search")
    for cand in elements:
        sq = _fp_mulmod(cand, cand, mbar, p)
        if sq == ebar and _fp_unit(_fp_mulmod([2], cand, mbar, p), mbar, p):
            start = cand
            break
    if start is None:
        raise NonSquareError("not a square in the residue ring")
    K = Qp(p, max(prec, 1))
    r = ring.element([K(c) for c in start])
    # each step at least doubles the number of correct digits in the maximal ideal
    steps = max(1, math.ceil(math.log2(max(prec, 1) * d + 1))) + 2
    for _ in range(steps):
        r = (r + unit * ring_inverse(r)) * Padic.from_rational(p, Fraction(1, 2), prec + 5)
    if v:
        r = r * Padic.from_rational(p, Fraction(p) ** (v // 2), prec + 5)
    return r


def _fp_mulmod(a, b, m, p):
    d = len(m) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            for j in range(d):
                prod[k - d + j] = (prod[k - d + j] - c * m[j]) % p
    prod = prod[:d] + [0] * max(0, d - len(prod))
    return prod


def _fp_unit(a, m, p):
    """Whether ``a`` is invertible in F_p[u]/(m)."""
    from .polyseries import fp_gcd

    g = fp_gcd(list(a), list(m), p)
    return len(g) == 1


def ring_log(e: RingElement, branch: BranchSpec = IWASAWA) -> RingElement:
    """Logarithm of an element whose content is a power of p times a unit."""
    ring, p, d = e.ring, e.ring.p, e.ring.degree
    v = e.valuation()
    unit = e / Padic.from_rational(p, Fraction(p) ** v, 50) if v else e
    if not _fp_unit([c.residue() for c in unit.coeffs], [c.residue() for c in ring.modulus], p):
        raise PadicDomainError("ring_log needs a unit up to a power of p")
    prec = min(c.absprec for c in unit.coeffs)
    # exponent of the unit group of the reduced residue ring
    n = 1
    for j in range(1, d + 1):
        n = n * (p ** j - 1) // math.gcd(n, p ** j - 1)
    z = unit ** n - 1
    nil, zk = 1, z
    while any(c.val < 1 and not c.is_zero() for c in zk.coeffs):
        zk = zk * z
        nil += 1
        if nil > d + 1:
            raise PadicDomainError("ring_log: residue is not unipotent")
    kmax = 1
    while kmax // nil - math.log(kmax, p) < prec + 1:
        kmax += 1
    total = z
    zk = z
    for k in range(2, kmax + 1):
        zk = zk * z
        term = zk / k
        total = total + term if k % 2 else total - term
    total = total / n
    if v and branch.log_p is not None:
        total = total + ring.scalar(v * branch.log_p)
    return total
