"""Exact coefficient arithmetic for the operator calculus.

Coefficients live in the commutative ring

    R = Q[g, (1+g^2)^(-1)][r] / (r^4 - (1+g^2)),

where ``g`` is the real coupling constant and ``r`` plays the role of
(1+g^2)^(1/4), so that quarter-power frequency factors are exact.  An
element is stored as four gamma-rational parts (one per residual power
r^0..r^3); each part is a rational polynomial in g whose denominator is a
power of (1+g^2).  The representation is canonical: parts are reduced so no
(1+g^2) factor divides the numerator while the denominator power is
positive, which makes equality a plain comparison.
"""

from __future__ import annotations

from fractions import Fraction

# gamma-polynomials are coefficient tuples, index = power of g
_BASE = (Fraction(1), Fraction(0), Fraction(1))  # 1 + g^2


def _trim(p):
    n = len(p)
    while n and not p[n - 1]:
        n -= 1
    return tuple(p[:n])


def _padd(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] += c
    return _trim(out)


def _pneg(p):
    return tuple(-c for c in p)


def _pmul(p, q):
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _trim(out)


def _pscale(p, c):
    if not c:
        return ()
    return _trim([a * c for a in p])


def _pdiv_base(p):
    """Divide by 1+g^2; returns (quotient, exact) with exact=False if a
    nonzero remainder exists."""
    rem = list(p)
    quo = [Fraction(0)] * max(len(p) - 2, 0)
    for i in range(len(rem) - 1, 1, -1):
        c = rem[i]
        if c:
            quo[i - 2] = c
            rem[i] = Fraction(0)
            rem[i - 2] -= c
    if any(rem[:2]) or any(rem[2:]):
        return (), False
    return _trim(quo), True


def _peval(p, g0: float) -> float:
    acc = 0.0
    for c in reversed(p):
        acc = acc * g0 + float(c)
    return acc


def _base_pow(k: int):
    out = (Fraction(1),)
    for _ in range(k):
        out = _pmul(out, _BASE)
    return out


def _part_reduce(num, dpow):
    num = _trim(num)
    if not num:
        return (), 0
    while dpow > 0:
        quo, exact = _pdiv_base(num)
        if not exact:
            break
        num, dpow = quo, dpow - 1
    return num, dpow


def _part_add(a, b):
    (n1, d1), (n2, d2) = a, b
    d = max(d1, d2)
    n = _padd(_pmul(n1, _base_pow(d - d1)), _pmul(n2, _base_pow(d - d2)))
    return _part_reduce(n, d)


def _part_mul(a, b):
    (n1, d1), (n2, d2) = a, b
    return _part_reduce(_pmul(n1, n2), d1 + d2)


_ZERO_PART = ((), 0)


class RingElem:
    """Immutable element of Q[g, (1+g^2)^(-1)][r] / (r^4 - (1+g^2))."""

    __slots__ = ("_parts",)

    def __init__(self, parts=None):
        if parts is None:
            parts = (_ZERO_PART,) * 4
        self._parts = tuple(parts)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls) -> "RingElem":
        return cls()

    @classmethod
    def one(cls) -> "RingElem":
        return cls.rational(1)

    @classmethod
    def rational(cls, q) -> "RingElem":
        q = Fraction(q)
        part = ((q,), 0) if q else _ZERO_PART
        return cls((part, _ZERO_PART, _ZERO_PART, _ZERO_PART))

    @classmethod
    def gamma(cls, power: int = 1) -> "RingElem":
        num = (Fraction(0),) * power + (Fraction(1),)
        return cls(((num, 0), _ZERO_PART, _ZERO_PART, _ZERO_PART))

    @classmethod
    def rho(cls, power: int = 1) -> "RingElem":
        """r^power for any integer power; r^(-1) is r^3/(1+g^2)."""
        m = power % 4
        carry = (power - m) // 4
        if carry >= 0:
            part = (_base_pow(carry), 0)
        else:
            part = ((Fraction(1),), -carry)
        parts = [_ZERO_PART] * 4
        parts[m] = part
        return cls(parts)

    @classmethod
    def omega(cls, power: int = 1) -> "RingElem":
        """(1+g^2)^(power/2), i.e. r^(2*power)."""
        return cls.rho(2 * power)

    # -- ring operations ------------------------------------------------

    def __add__(self, other) -> "RingElem":
        other = _as_ring(other)
        return RingElem(tuple(_part_add(a, b) for a, b in zip(self._parts, other._parts)))

    __radd__ = __add__

    def __neg__(self) -> "RingElem":
        return RingElem(tuple((_pneg(n), d) for n, d in self._parts))

    def __sub__(self, other) -> "RingElem":
        return self + (-_as_ring(other))

    def __rsub__(self, other) -> "RingElem":
        return _as_ring(other) + (-self)

    def __mul__(self, other) -> "RingElem":
        other = _as_ring(other)
        parts = [_ZERO_PART] * 4
        for i, a in enumerate(self._parts):
            if not a[0]:
                continue
            for j, b in enumerate(other._parts):
                if not b[0]:
                    continue
                prod = _part_mul(a, b)
                carry, m = divmod(i + j, 4)
                if carry:
                    prod = _part_reduce(_pmul(prod[0], _base_pow(carry)), prod[1])
                parts[m] = _part_add(parts[m], prod)
        return RingElem(parts)

    __rmul__ = __mul__

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return all(not n for n, _ in self._parts)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RingElem.rational(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        return self._parts == other._parts

    def __hash__(self):
        return hash(self._parts)

    def gamma_negated(self) -> "RingElem":
        """Substitute g -> -g (r is untouched: 1+g^2 is even in g)."""
        parts = []
        for n, d in self._parts:
            parts.append((tuple(-c if i % 2 else c for i, c in enumerate(n)), d))
        return RingElem(parts)

    def evaluate(self, gamma0: float) -> float:
        """Numeric value with r = (1+gamma0^2)^(1/4)."""
        base = 1.0 + gamma0 * gamma0
        quarter = base ** 0.25
        total = 0.0
        for r, (n, d) in enumerate(self._parts):
            if n:
                total += _peval(n, gamma0) / base**d * quarter**r
        return total

    def __repr__(self):
        chunks = []
        for r, (n, d) in enumerate(self._parts):
            if not n:
                continue
            poly = " + ".join(
                f"{c}" if i == 0 else (f"{c}*g" if i == 1 else f"{c}*g^{i}")
                for i, c in enumerate(n)
                if c
            )
            s = f"({poly})"
            if d:
                s += f"/(1+g^2)^{d}" if d > 1 else "/(1+g^2)"
            if r:
                s += f"*r^{r}" if r > 1 else "*r"
            chunks.append(s)
        return " + ".join(chunks) if chunks else "0"


def _as_ring(v) -> RingElem:
    if isinstance(v, RingElem):
        return v
    if isinstance(v, (int, Fraction)):
        return RingElem.rational(v)
    raise TypeError(f"cannot coerce {type(v).__name__} into RingElem")
