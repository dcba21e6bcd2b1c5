"""Quadratic forms over Q(i) and their Z/2 orientation torsors.

A torsor element is a square root of a target value. When the root lies in Q(i) it is
stored directly; otherwise it is kept as ``coeff * sqrt(radicand)`` relative to the formal
base point sqrt(radicand). Rational radicands are normalised to squarefree positive
integers, so products of formal roots of rationals are decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from . import linalg
from .errors import Degenerate, UndecidableSign, ZeroDivision
from .poly import Poly
from .scalar import I, ONE, Scalar, sqrt_in_field


@dataclass(frozen=True)
class QuadForm:
    """Symmetric matrix Q; the form is q(x) = x^T Q x."""

    matrix: tuple

    def __init__(self, matrix):
        rows = tuple(tuple(Scalar.coerce(x) for x in row) for row in matrix)
        if not linalg.is_symmetric([list(r) for r in rows]):
            raise ValueError("quadratic form matrix must be symmetric")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def sum_of_squares(cls, n: int) -> QuadForm:
        return cls(linalg.identity(n))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def rows(self):
        return [list(r) for r in self.matrix]

    def det(self) -> Scalar:
        return linalg.det(self.rows()) if self.dim else ONE

    @property
    def degenerate(self) -> bool:
        return not self.det()

    def __call__(self, v) -> Scalar:
        v = [Scalar.coerce(x) for x in v]
        return linalg.sum_products(v, linalg.matvec(self.rows(), v))

    def direct_sum(self, other: QuadForm) -> QuadForm:
        return QuadForm(linalg.block_diag(self.rows(), other.rows()))

    def as_poly(self, variables=None) -> Poly:
        """The potential x^T Q x."""
        variables = tuple(variables or [f"z{k + 1}" for k in range(self.dim)])
        if len(variables) != self.dim:
            raise ValueError("need one variable per dimension")
        terms = {}
        n = self.dim
        for a in range(n):
            for b in range(n):
                c = self.matrix[a][b]
                if c:
                    e = [0] * n
                    e[a] += 1
                    e[b] += 1
                    e = tuple(e)
                    terms[e] = terms.get(e, Scalar(0)) + c
        return Poly(variables, terms)

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.matrix) + "]"


def orientation_targets(q: QuadForm, basis_vol=1) -> Scalar:
    """q-norm of the top vector basis_vol * e_1 ^ ... ^ e_n: det(q) * basis_vol**2."""
    d = q.det()
    if not d:
        raise Degenerate("quadratic form is degenerate (det = 0)")
    v = Scalar.coerce(basis_vol)
    return d * v * v


# --- square-root representatives ------------------------------------------------


def _squarefree_split(m: int, limit: int = 10**6):
    """m = s**2 * k with k free of squares of primes below ``limit`` (best effort beyond)."""
    s, k = 1, m
    p = 2
    while p * p <= k and p < limit:
        while k % (p * p) == 0:
            k //= p * p
            s *= p
        p += 1 if p == 2 else 2
    return s, k


def _normalise(coeff: Scalar, rational_radicand: int, gaussian: tuple):
    gaussian = list(gaussian)
    out = []
    # pair-cancel identical Gaussian radicands: sqrt(b)*sqrt(b) = b
    gaussian.sort(key=lambda z: (z.re, z.im))
    k = 0
    while k < len(gaussian):
        if k + 1 < len(gaussian) and gaussian[k] == gaussian[k + 1]:
            coeff = coeff * gaussian[k]
            k += 2
        else:
            out.append(gaussian[k])
            k += 1
    return coeff, rational_radicand, tuple(out)


def _split_radicand(b: Scalar):
    """Return (coeff, squarefree positive int or 1, gaussian radicand or None) with sqrt(b) = coeff*sqrt(k)*sqrt(g)."""
    roots = sqrt_in_field(b)
    if roots is not None:
        return roots[0], 1, None
    if b.is_real:
        q = b.re
        coeff = ONE
        if q < 0:
            coeff, q = I, -q
        num, den = int(q.numerator), int(q.denominator)
        s, k = _squarefree_split(num * den)
        return coeff * Scalar(s) / den, k, None
    return ONE, 1, b


@dataclass(frozen=True)
class TorsorElement:
    """A chosen square root of ``target``: rep = coeff * sqrt(radicand) * prod(sqrt(g) for g in gaussian)."""

    target: Scalar
    coeff: Scalar
    radicand: int = 1
    gaussian: tuple = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        lhs = self.coeff * self.coeff * self.radicand
        for g in self.gaussian:
            lhs = lhs * g
        if lhs != self.target:
            raise ValueError(f"representative does not square to target {self.target}")

    @classmethod
    def base(cls, target, label="") -> TorsorElement:
        """The declared base point: the canonical root when it lies in Q(i), else the formal root."""
        t = Scalar.coerce(target)
        coeff, k, g = _split_radicand(t)
        return cls(t, coeff, k, () if g is None else (g,), label)

    @classmethod
    def from_rep(cls, rep, label="") -> TorsorElement:
        r = Scalar.coerce(rep)
        return cls(r * r, r, 1, (), label)

    @classmethod
    def unit(cls, label="") -> TorsorElement:
        return cls(ONE, ONE, 1, (), label)

    @property
    def rep(self) -> Scalar | None:
        """The representative when it lies in Q(i)."""
        if self.radicand == 1 and not self.gaussian:
            return self.coeff
        return None

    @property
    def symbolic(self) -> bool:
        return self.rep is None

    def flip(self) -> TorsorElement:
        return TorsorElement(self.target, -self.coeff, self.radicand, self.gaussian, self.label)

    def __neg__(self):
        return self.flip()

    def __mul__(self, other: TorsorElement) -> TorsorElement:
        return torsor_sum(self, other)

    def inverse(self) -> TorsorElement:
        if not self.target:
            raise ZeroDivision("zero target has no inverse")
        # 1/(c sqrt(k) prod sqrt(g)) = sqrt(k) prod sqrt(g) / (c k prod g)
        denom = self.coeff * self.radicand
        for g in self.gaussian:
            denom = denom * g
        return TorsorElement(1 / self.target, 1 / denom, self.radicand, self.gaussian, self.label)

    def __truediv__(self, other: TorsorElement) -> TorsorElement:
        return torsor_sum(self, other.inverse())

    def sign_relative_to(self, other: TorsorElement) -> int:
        """+1 or -1 with self = sign * other; both must lie in the same fibre."""
        if self.target != other.target:
            raise ValueError("elements lie in different fibres")
        if (self.radicand, self.gaussian) != (other.radicand, other.gaussian):
            raise UndecidableSign("representatives are expressed over different formal base points")
        ratio = self.coeff / other.coeff
        if ratio == 1:
            return 1
        if ratio == -1:
            return -1
        raise AssertionError("fibre elements differ by a non-sign factor")

    def sign(self) -> int:
        """Sign relative to the declared base point of the fibre."""
        return self.sign_relative_to(TorsorElement.base(self.target))

    def rep_text(self) -> str:
        parts = []
        if self.radicand != 1:
            parts.append(f"sqrt({self.radicand})")
        parts += [f"sqrt({g})" for g in self.gaussian]
        if not parts:
            return str(self.coeff)
        head = "" if self.coeff == 1 else ("-" if self.coeff == -1 else f"({self.coeff})*")
        return head + "*".join(parts)

    def to_json(self) -> dict:
        return {"target": str(self.target), "rep": None if self.rep is None else str(self.rep),
                "rep_text": self.rep_text(), "label": self.label}


def torsor_sum(a: TorsorElement, b: TorsorElement) -> TorsorElement:
    """P_{q1} (x) P_{q2} -> P_{q1 + q2}: targets multiply, representatives multiply."""
    k1, k2 = a.radicand, b.radicand
    g = gcd(k1, k2)
    coeff = a.coeff * b.coeff * g
    k = (k1 // g) * (k2 // g)
    coeff, k, gauss = _normalise(coeff, k, a.gaussian + b.gaussian)
    label = "*".join(x for x in (a.label, b.label) if x)
    return TorsorElement(a.target * b.target, coeff, k, gauss, label)


def torsor_product(elements, label="") -> TorsorElement:
    out = TorsorElement.unit(label)
    for e in elements:
        out = torsor_sum(out, e)
    return out


def torsor_fiber(target, label="") -> tuple[TorsorElement, TorsorElement]:
    """The two elements of the fibre over ``target`` (base point first)."""
    b = TorsorElement.base(target, label)
    return b, b.flip()


def orientation_torsor(q: QuadForm, basis_vol=1, label="P_q") -> TorsorElement:
    """Base point of P_q for the top vector basis_vol * e_1 ^ ... ^ e_n."""
    return TorsorElement.base(orientation_targets(q, basis_vol), label)


