"""Vanishing-cycle data of isolated singularities from the twisted de Rham operator.

The local Milnor algebra O_0/(df) is computed in the truncations Q(i)[x]/m^K: once
m^K lies in the Jacobian ideal (detected when K and K+1 give the same dimension, by
Nakayama) the truncation is exact. For quasi-homogeneous f the operator
hbar d/dhbar - f/hbar + 1/2 - lambda is diagonal on monomial classes x^a dx.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .errors import Degenerate, NotIsolated, NotQuasiHomogeneous, NotSingular
from .monodromy import MonodromyData, conjugate, reduce_to_g, tensor, twist_sign
from .poly import Poly, direct_sum, grlex_key, monomials_up_to
from .scalar import ONE, ZERO, Scalar, format_rational
from .torsor import QuadForm, TorsorElement, orientation_torsor

DEGREE_BOUND = 64
HALF = Fraction(1, 2)


# --- sparse elimination in Q(i)[x]/m^K ------------------------------------------


class _Echelon:
    """Row space of truncated products x^b * df_i, pivots at the grlex-largest monomial."""

    def __init__(self, partials, nvars, K):
        self.K = K
        self.monos = monomials_up_to(nvars, K - 1) if K > 0 else []
        self.index = {m: k for k, m in enumerate(self.monos)}
        self.pivots = {}
        for g in partials:
            for b in self.monos:
                row = {}
                for e, c in g.terms.items():
                    m = tuple(x + y for x, y in zip(e, b))
                    if sum(m) < K:
                        row[self.index[m]] = c
                if row:
                    self._insert(row)

    def _reduce(self, row):
        row = dict(row)
        done = set()
        while True:
            live = [c for c in row if c in self.pivots and c not in done]
            if not live:
                return row
            col = max(live)
            f = row[col]
            for c, v in self.pivots[col].items():
                s = row.get(c, ZERO) - f * v
                if s:
                    row[c] = s
                else:
                    row.pop(c, None)
            done.add(col)

    def _insert(self, row):
        row = self._reduce(row)
        if not row:
            return
        lead = max(row)
        inv = row[lead].inverse()
        self.pivots[lead] = {c: v * inv for c, v in row.items()}

    @property
    def quotient_dim(self):
        return len(self.monos) - len(self.pivots)


@dataclass(frozen=True, eq=False)
class MilnorAlgebra:
    f: Poly
    monomial_basis: tuple
    truncation: int
    _echelon: object = field(repr=False, default=None)

    @property
    def mu(self) -> int:
        return len(self.monomial_basis)

    def reduce(self, p: Poly):
        """Coordinates of the class of p in the monomial basis."""
        p = p.with_variables(self.f.variables) if p.variables != self.f.variables else p
        ech = self._echelon
        row = {ech.index[e]: c for e, c in p.terms.items() if sum(e) < ech.K}
        row = ech._reduce(row)
        return [row.get(ech.index[m], ZERO) for m in self.monomial_basis]


def milnor_algebra(f: Poly, degree_bound: int = DEGREE_BOUND) -> MilnorAlgebra:
    n = len(f.variables)
    partials = f.jacobian()
    for k, d in enumerate(partials):
        if d.constant_term():
            raise NotSingular(f"df/d{f.variables[k]} does not vanish at the origin")
    if n == 0:
        return MilnorAlgebra(f, ((),), 1, _Echelon([], 0, 1))

    def stable(K):
        return _Echelon(partials, n, K).quotient_dim == _Echelon(partials, n, K + 1).quotient_dim

    K = 1
    while not stable(K):
        if K >= degree_bound:
            raise NotIsolated(f"Milnor algebra did not stabilise below degree {degree_bound}; singularity not isolated")
        K = min(2 * K, degree_bound)
    lo, hi = K // 2 + 1, K
    while lo < hi:
        mid = (lo + hi) // 2
        if stable(mid):
            hi = mid
        else:
            lo = mid + 1
    ech = _Echelon(partials, n, hi)
    basis = tuple(m for k, m in enumerate(ech.monos) if k not in ech.pivots)
    return MilnorAlgebra(f, tuple(sorted(basis, key=grlex_key)), hi, ech)


def milnor_number(f: Poly, degree_bound: int = DEGREE_BOUND) -> int:
    return milnor_algebra(f, degree_bound).mu


# --- weights and spectrum --------------------------------------------------------


def qh_weights(f: Poly):
    """Positive weights w with <a, w> = 1 on the support of f (minimum-norm solution), or None."""
    if f.is_zero() or f.constant_term():
        return None
    A = [[Scalar(x) for x in e] for e in f.terms]
    _, pivots = linalg.rref(linalg.transpose(A))
    rows = [A[k] for k in pivots]
    G = linalg.matmul(rows, linalg.transpose(rows))
    y = linalg.matvec(linalg.inverse(G), [ONE] * len(rows))
    w = linalg.matvec(linalg.transpose(rows), y)
    if any(linalg.sum_products(a, w) != 1 for a in A):
        return None
    if any(not x.is_real or x.re <= 0 for x in w):
        return None
    return tuple(Fraction(int(x.re.numerator), int(x.re.denominator)) for x in w)


@dataclass(frozen=True)
class Spectrum:
    values: tuple
    nvars: int = 0

    def __init__(self, values, nvars: int = 0):
        object.__setattr__(self, "values", tuple(sorted(Fraction(v) for v in values)))
        object.__setattr__(self, "nvars", nvars)

    @property
    def mu(self) -> int:
        return len(self.values)

    def shift(self, s) -> Spectrum:
        return Spectrum([v + Fraction(s) for v in self.values], self.nvars)

    def is_symmetric(self) -> bool:
        return Spectrum([self.nvars - v for v in self.values], self.nvars) == self

    def to_json(self):
        return [format_rational(v) for v in self.values]


UNIT_SPECTRUM = Spectrum([Fraction(0)], 0)


def _require_qh(f: Poly):
    w = qh_weights(f)
    if w is None:
        raise NotQuasiHomogeneous("f admits no positive weights making it quasi-homogeneous")
    return w


def spectrum(f: Poly) -> Spectrum:
    """Weight formula: sum_i (a_i + 1) w_i over the Milnor basis monomials x^a."""
    w = _require_qh(f)
    alg = milnor_algebra(f)
    return Spectrum([sum((a + 1) * wi for a, wi in zip(e, w)) for e in alg.monomial_basis], len(f.variables))


def twisted_dr_operator(f: Poly, lam=HALF):
    """Matrix of hbar d/dhbar - f/hbar + 1/2 - lambda on the classes x^a dx.

    f x^a dx is written as df ^ eta through the Euler identity, and hbar^-1 df ^ eta is
    replaced by -d eta; the result is reduced against the Milnor basis.
    """
    w = _require_qh(f)
    alg = milnor_algebra(f)
    variables = f.variables
    partials = f.jacobian()
    shift = Scalar(HALF - Fraction(lam))
    cols = []
    for e in alg.monomial_basis:
        xa = Poly.monomial(e, variables)
        g = [Poly.var(v, variables) * xa * Scalar(wi) for v, wi in zip(variables, w)]
        lhs = Poly(variables)
        for gi, di in zip(g, partials):
            lhs = lhs + gi * di
        if lhs != f * xa:
            raise AssertionError("Euler identity failed on a basis monomial")
        d_eta = Poly(variables)
        for k, gi in enumerate(g):
            d_eta = d_eta + gi.diff(k)
        col = alg.reduce(d_eta)
        cols.append(col)
    D = linalg.transpose(cols) if cols else []
    for k in range(len(D)):
        D[k][k] = D[k][k] + shift
    return D


def vanishing_monodromy(f: Poly, convention: str = "standard") -> MonodromyData:
    """T = exp(-2 pi i D): exponent r = alpha mod 1 in G for each spectral value alpha."""
    sp = spectrum(f)
    m = MonodromyData([(reduce_to_g(a), [1]) for a in sp.values])
    return conjugate(m) if convention == "conjugate" else m


# --- PV data, Thom-Sebastiani, stabilization --------------------------------------


@dataclass(frozen=True)
class OrderParam:
    lam: Fraction = HALF

    def __init__(self, lam=HALF):
        object.__setattr__(self, "lam", Fraction(lam))


@dataclass(frozen=True)
class PVData:
    """(phi_f, (-1)^n T) with the raw monodromy kept so that untwisting is exact."""

    raw: MonodromyData
    ambient_dim: int
    twisted: bool = True
    torsor: TorsorElement | None = None
    spectrum: Spectrum | None = None
    tq_scales: tuple = ()

    @property
    def monodromy(self) -> MonodromyData:
        return twist_sign(self.raw, self.ambient_dim) if self.twisted else self.raw

    def untwist(self) -> MonodromyData:
        return self.raw

    def key(self):
        """Twisted data compared by stabilization invariance."""
        return self.monodromy, (None if self.torsor is None else self.torsor.target)

    def to_json(self) -> dict:
        out = {
            "ambient_dim": self.ambient_dim,
            "twisted": self.twisted,
            "raw_monodromy": self.raw.to_json(),
            "monodromy": self.monodromy.to_json(),
        }
        if self.torsor is not None:
            out["torsor"] = self.torsor.to_json()
        if self.spectrum is not None:
            out["spectrum"] = self.spectrum.to_json()
        if self.tq_scales:
            out["tq_scales"] = [format_rational(s) for s in self.tq_scales]
        return out


def pv_twist(m, n: int) -> PVData:
    """Multiply T by (-1)^n; applying it to a PVData again removes the twist."""
    if isinstance(m, PVData):
        return PVData(m.raw, m.ambient_dim, not m.twisted, m.torsor, m.spectrum, m.tq_scales)
    return PVData(m, n, True)


def pv_data(f: Poly, convention: str = "standard") -> PVData:
    return PVData(vanishing_monodromy(f, convention), len(f.variables), True, None, spectrum(f))


def thom_sebastiani(a, b):
    """f (+) g at data level: spectra add (Minkowski sum), monodromies tensor, torsors multiply."""
    if isinstance(a, Spectrum) and isinstance(b, Spectrum):
        return Spectrum([x + y for x in a.values for y in b.values], a.nvars + b.nvars)
    if isinstance(a, PVData) and isinstance(b, PVData):
        if a.twisted != b.twisted:
            raise ValueError("cannot combine twisted with untwisted data")
        if a.torsor is None or b.torsor is None:
            torsor = a.torsor or b.torsor
        else:
            torsor = a.torsor * b.torsor
        sp = thom_sebastiani(a.spectrum, b.spectrum) if a.spectrum and b.spectrum else None
        return PVData(tensor(a.raw, b.raw), a.ambient_dim + b.ambient_dim, a.twisted, torsor, sp,
                      a.tq_scales + b.tq_scales)
    if isinstance(a, Poly) and isinstance(b, Poly):
        return direct_sum(a, b)
    raise TypeError("thom_sebastiani needs two values of the same kind")


def tq_scale(q: QuadForm, lam=HALF) -> Fraction:
    """D-eigenvalue (dim q + 1)/2 - lambda on the generator pinning T_q."""
    if q.dim and q.degenerate:
        raise Degenerate("quadratic form is degenerate")
    lam = lam.lam if isinstance(lam, OrderParam) else Fraction(lam)
    return Fraction(q.dim + 1, 2) - lam


def stabilize(data: PVData, q: QuadForm, lam=HALF) -> PVData:
    """Pass from f to f (+) q; T_q is pinned with the base point alpha = 1."""
    if q.dim == 0:
        return data
    scale = tq_scale(q, lam)
    raw = twist_sign(data.raw, q.dim)
    pq = orientation_torsor(q, label="P_q")
    torsor = pq if data.torsor is None else data.torsor * pq
    sp = data.spectrum.shift(Fraction(q.dim, 2)) if data.spectrum is not None else None
    if sp is not None:
        sp = Spectrum(sp.values, sp.nvars + q.dim)
    return PVData(raw, data.ambient_dim + q.dim, data.twisted, torsor, sp, data.tq_scales + (scale,))


def sum_of_squares(n: int, prefix: str = "z") -> Poly:
    variables = tuple(f"{prefix}{k + 1}" for k in range(n))
    return QuadForm.sum_of_squares(n).as_poly(variables)
