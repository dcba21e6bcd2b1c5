"""Elements of the cyclotomic field Q(zeta_N), used to test roots of unity as eigenvalues exactly.

Elements are coefficient tuples in powers of zeta, reduced modulo the N-th cyclotomic
polynomial. Q(i) embeds when 4 | N via i = zeta^(N/4).
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd

from gmpy2 import mpq

from .errors import ZeroDivision
from .scalar import Scalar


def _trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def _divmod(a, b):
    a, b = _trim(a), _trim(b)
    q = [mpq(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    while len(r) >= len(b) and r:
        s = len(r) - len(b)
        f = r[-1] / b[-1]
        q[s] = f
        for k, c in enumerate(b):
            r[k + s] -= f * c
        r = _trim(r)
    return _trim(q), r


def _mul(a, b):
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _sub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[k] if k < len(a) else 0) - (b[k] if k < len(b) else 0) for k in range(n)])


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    """Phi_n as integer-coefficient tuple, constant term first."""
    p = [mpq(-1)] + [mpq(0)] * (n - 1) + [mpq(1)]
    for d in range(1, n):
        if n % d == 0:
            p, r = _divmod(p, list(cyclotomic_poly(d)))
            assert not r
    return tuple(p)


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


class Cyclo:
    __slots__ = ("n", "c")

    def __init__(self, n: int, coeffs=()):
        self.n = n
        phi = cyclotomic_poly(n)
        c = _trim(mpq(x) for x in coeffs)
        if len(c) >= len(phi):
            _, c = _divmod(c, list(phi))
        self.c = tuple(c)

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> Cyclo:
        k %= n
        return cls(n, [0] * k + [1])

    @classmethod
    def from_scalar(cls, n: int, x) -> Cyclo:
        if n % 4:
            raise ValueError("Q(i) embeds only when 4 divides N")
        x = Scalar.coerce(x)
        coeffs = [x.re] + [0] * (n // 4 - 1) + [x.im] if x.im else [x.re]
        return cls(n, coeffs)

    def _lift(self, other) -> Cyclo:
        if isinstance(other, Cyclo):
            if other.n != self.n:
                raise ValueError("mixing different cyclotomic fields")
            return other
        if isinstance(other, Scalar):
            return Cyclo.from_scalar(self.n, other)
        return Cyclo(self.n, [other])

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.c), len(o.c))
        return Cyclo(self.n, [(self.c[k] if k < len(self.c) else 0) + (o.c[k] if k < len(o.c) else 0) for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.n, [-x for x in self.c])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        return Cyclo(self.n, _mul(list(self.c), list(o.c)))

    __rmul__ = __mul__

    def inverse(self) -> Cyclo:
        if not self.c:
            raise ZeroDivision("division by zero in Q(zeta)")
        # extended Euclid: s*self + t*phi = 1
        r0, r1 = list(cyclotomic_poly(self.n)), list(self.c)
        s0, s1 = [], [mpq(1)]
        while len(r1) > 1:
            q, r = _divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _sub(s0, _mul(q, s1))
        return Cyclo(self.n, [x / r1[0] for x in s1])

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        out = Cyclo(self.n, [mpq(1)])
        for _ in range(abs(k)):
            out = out * base
        return out

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash((self.n, self.c))

    def __complex__(self):
        import cmath

        z = cmath.exp(2j * cmath.pi / self.n)
        return complex(sum(float(x) * z**k for k, x in enumerate(self.c)))

    def __repr__(self):
        return f"Cyclo({self.n}, {[str(x) for x in self.c]})"
