"""Truncated Laurent series in hbar with exact coefficients and explicit validity windows.

A series is known modulo hbar**prec; ``prec=None`` means the value is an exact Laurent
polynomial. Products track precision like p-adic numbers:
    prec(a*b) = min(prec(a) + val(b), prec(b) + val(a)).
"""

from __future__ import annotations

from .errors import WindowUnderflow
from .scalar import ONE, ZERO, Scalar

DEFAULT_ORDER = 16


def _min_prec(*precs):
    live = [p for p in precs if p is not None]
    return min(live) if live else None


class HLaurent:
    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs=None, prec=None):
        if isinstance(coeffs, (list, tuple)):
            raise TypeError("use HLaurent.from_list for positional coefficients")
        clean = {}
        for k, c in (coeffs or {}).items():
            c = Scalar.coerce(c)
            if c and (prec is None or k < prec):
                clean[int(k)] = c
        self.coeffs = clean
        self.prec = prec

    @classmethod
    def from_list(cls, order_low: int, values, prec=None):
        return cls({order_low + j: v for j, v in enumerate(values)}, prec)

    @classmethod
    def constant(cls, c):
        return cls({0: c})

    @classmethod
    def hbar(cls, k: int = 1):
        return cls({k: ONE})

    # --- structure -------------------------------------------------------

    @property
    def order_low(self):
        """Lowest exponent with nonzero coefficient (the valuation); prec or +inf for zero."""
        if self.coeffs:
            return min(self.coeffs)
        return self.prec if self.prec is not None else float("inf")

    def is_exact(self) -> bool:
        return self.prec is None

    def coefficient(self, k: int) -> Scalar:
        if self.prec is not None and k >= self.prec:
            raise WindowUnderflow(f"coefficient of hbar^{k} lies outside the window (< {self.prec})")
        return self.coeffs.get(k, ZERO)

    def truncate(self, prec: int) -> HLaurent:
        return HLaurent(self.coeffs, _min_prec(self.prec, prec))

    def window(self):
        """(lowest exponent, precision) describing which coefficients are determined."""
        return self.order_low, self.prec

    # --- arithmetic ------------------------------------------------------

    @staticmethod
    def _lift(x):
        if isinstance(x, HLaurent):
            return x
        return HLaurent.constant(Scalar.coerce(x))

    def __add__(self, other):
        other = self._lift(other)
        prec = _min_prec(self.prec, other.prec)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, ZERO) + c
        return HLaurent(out, prec)

    __radd__ = __add__

    def __neg__(self):
        return HLaurent({k: -c for k, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        va, vb = self.order_low, other.order_low
        candidates = []
        if self.prec is not None:
            candidates.append(self.prec + vb)
        if other.prec is not None:
            candidates.append(other.prec + va)
        prec = min(candidates) if candidates else None
        if prec == float("inf"):
            prec = None
        out = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if prec is None or k < prec:
                    out[k] = out.get(k, ZERO) + a * b
        return HLaurent(out, prec)

    __rmul__ = __mul__

    def shift(self, k: int) -> HLaurent:
        """Multiply by hbar**k."""
        return HLaurent({e + k: c for e, c in self.coeffs.items()}, None if self.prec is None else self.prec + k)

    def euler(self) -> HLaurent:
        """hbar * d/dhbar."""
        return HLaurent({k: c * k for k, c in self.coeffs.items()}, self.prec)

    def inverse(self, order: int = DEFAULT_ORDER) -> HLaurent:
        """Multiplicative inverse valid to ``order`` coefficients beyond the leading one."""
        if not self.coeffs:
            raise WindowUnderflow("cannot invert a series with no known nonzero coefficient")
        v = min(self.coeffs)
        lead = self.coeffs[v]
        if len(self.coeffs) == 1 and self.prec is None:
            return HLaurent({-v: lead.inverse()})
        avail = order if self.prec is None else min(order, self.prec - v)
        inv_lead = lead.inverse()
        b = [inv_lead]
        for n in range(1, avail):
            s = ZERO
            for j in range(1, n + 1):
                s = s + self.coeffs.get(v + j, ZERO) * b[n - j]
            b.append(-s * inv_lead)
        return HLaurent({-v + j: c for j, c in enumerate(b)}, -v + avail)

    def __eq__(self, other):
        other = self._lift(other) if not isinstance(other, HLaurent) else other
        return self.coeffs == other.coeffs and self.prec == other.prec

    def agrees_with(self, other, upto=None) -> bool:
        """Coefficientwise equality on the common window (and below ``upto`` when given)."""
        other = self._lift(other)
        prec = _min_prec(self.prec, other.prec, upto)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            self.coeffs.get(k, ZERO) == other.coeffs.get(k, ZERO)
            for k in keys
            if prec is None or k < prec
        )

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.prec))

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(f"({c})*h^{k}" for k, c in sorted(self.coeffs.items()))
        tail = "" if self.prec is None else f" + O(h^{self.prec})"
        return f"HLaurent({body}{tail})"


def hlaurent_apply(op, v):
    """Matrix-vector product over truncated hbar-Laurent series.

    Returns the result vector; its ``window`` attribute is the tightest precision of its entries.
    Raises WindowUnderflow when an entry keeps no valid coefficient at or above its lowest
    contributing exponent.
    """
    rows = len(op)
    if rows and len(op[0]) != len(v):
        raise ValueError("dimension mismatch in hlaurent_apply")
    v = [HLaurent._lift(x) for x in v]
    out = []
    for r in range(rows):
        acc = HLaurent()
        floor = None
        for a, x in zip(op[r], v):
            a = HLaurent._lift(a)
            lo = a.order_low + x.order_low
            if a.coeffs and (x.coeffs or x.prec is not None):
                floor = lo if floor is None else min(floor, lo)
            acc = acc + a * x
        if acc.prec is not None and floor is not None and acc.prec <= floor:
            raise WindowUnderflow(f"row {r}: result valid to fewer than 1 coefficient")
        out.append(acc)
    return HVector(out)


class HVector(list):
    """List of HLaurent entries that also reports the common validity window."""

    @property
    def window(self):
        return _min_prec(*(x.prec for x in self))
