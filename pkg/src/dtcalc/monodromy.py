"""Finite-dimensional Riemann-Hilbert dictionary.

A monodromy T with eigenvalue exp(-2*pi*i*r) is stored by its exponent r in the strip
G = (-1, 0] together with Jordan block sizes. RH^-1 sends T to the hbar-module with
D = M, the unique logarithm T = exp(-2*pi*i*M) whose eigenvalues lie in G.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, gcd

import numpy as np

from . import linalg
from .cyclotomic import Cyclo, euler_phi
from .errors import (
    NoAdmissibleLattice,
    NotQuasiUnipotent,
    SchemaError,
    SingularMatrix,
)
from .hlaurent import HLaurent, HVector, hlaurent_apply
from .scalar import ONE, Scalar, format_rational, parse_rational

NUMERIC_TOL = 1e-10


def reduce_to_g(x) -> Fraction:
    """The representative of x mod 1 in G = (-1, 0]."""
    x = Fraction(x)
    return x - ceil(x)


def in_g(r) -> bool:
    return -1 < r <= 0


def _canonical(blocks):
    merged = {}
    for r, sizes in blocks:
        r = Fraction(r)
        if not in_g(r):
            raise ValueError(f"exponent {r} outside G = (-1, 0]")
        for s in sizes:
            if int(s) < 1:
                raise ValueError("Jordan sizes must be positive")
        merged.setdefault(r, []).extend(int(s) for s in sizes)
    return tuple((r, tuple(sorted(merged[r], reverse=True))) for r in sorted(merged, reverse=True))


@dataclass(frozen=True)
class MonodromyData:
    """Quasi-unipotent automorphism in spectral form: ((exponent, jordan sizes), ...).

    Blocks are canonicalised (merged per exponent, sorted), so equality ignores input order.
    ``reconstruction`` optionally holds (P, J) with P J P^-1 = T over a cyclotomic field.
    """

    blocks: tuple
    reconstruction: object = field(default=None, compare=False, repr=False)

    def __init__(self, blocks, reconstruction=None):
        object.__setattr__(self, "blocks", _canonical(blocks))
        object.__setattr__(self, "reconstruction", reconstruction)

    @property
    def dim(self) -> int:
        return sum(sum(s) for _, s in self.blocks)

    def exponents(self):
        """Exponent multiset, one entry per dimension."""
        out = []
        for r, sizes in self.blocks:
            out += [r] * sum(sizes)
        return out

    def is_semisimple(self) -> bool:
        return all(s == 1 for _, sizes in self.blocks for s in sizes)

    def to_json(self) -> dict:
        return {"blocks": [{"exponent": format_rational(r), "jordan": list(s)} for r, s in self.blocks]}

    @classmethod
    def from_json(cls, obj, pointer="") -> MonodromyData:
        if not isinstance(obj, dict) or not isinstance(obj.get("blocks"), list):
            raise SchemaError("expected an object with a 'blocks' list", pointer)
        blocks = []
        for k, b in enumerate(obj["blocks"]):
            here = f"{pointer}/blocks/{k}"
            if not isinstance(b, dict) or "exponent" not in b or "jordan" not in b:
                raise SchemaError("block needs 'exponent' and 'jordan'", here)
            try:
                r = Fraction(str(parse_rational(str(b["exponent"]))))
            except Exception:
                raise SchemaError("exponent must be a rational string", here + "/exponent") from None
            if not in_g(r):
                raise SchemaError(f"exponent {format_rational(r)} outside G = (-1, 0]", here + "/exponent")
            sizes = b["jordan"]
            if not isinstance(sizes, list) or not sizes or not all(isinstance(s, int) and s >= 1 for s in sizes):
                raise SchemaError("jordan must be a nonempty list of positive integers", here + "/jordan")
            blocks.append((r, sizes))
        return cls(blocks)

    def __str__(self):
        return "; ".join(f"r={format_rational(r)} J={list(s)}" for r, s in self.blocks) or "(zero)"


# --- eigen decomposition ------------------------------------------------------


def _order_candidates(dim: int, bound: int | None):
    # a primitive k-th root of unity has degree >= phi(k)/2 over Q(i)
    top = bound if bound is not None else 8 * dim * dim + 4
    return [k for k in range(1, top + 1) if euler_phi(k) <= 2 * dim]


def _nullity(A) -> int:
    return len(A) - linalg.rank(A)


def _jordan_chains(N, sizes_needed):
    """Jordan chains for the nilpotent action N on its generalized kernel.

    Returns a list of chains, each [N^{s-1} v, ..., N v, v].
    """
    n = len(N)
    top = max(sizes_needed) if sizes_needed else 0
    powers = [linalg.identity(n, N[0][0] * 0 + 1)]
    for _ in range(top):
        powers.append(linalg.matmul(N, powers[-1]))
    kernels = [linalg.nullspace(P) for P in powers]
    chains = []
    for level in range(top, 0, -1):
        span = [list(v) for v in kernels[level - 1]]
        for ch in chains:
            if len(ch) >= level:
                span.append(ch[level - 1])
        base_rank = linalg.rank(span) if span else 0
        for v in kernels[level]:
            if linalg.rank(span + [v]) > base_rank:
                chain = [v]
                for _ in range(level - 1):
                    chain.insert(0, linalg.matvec(N, chain[0]))
                chains.append(chain)
                span.append(v)
                base_rank += 1
    return chains


def _exact_decompose(T, bound):
    n = len(T)
    chi = linalg.charpoly(T)
    found = []
    total = 0
    for k in _order_candidates(n, bound):
        N = 4 * k // gcd(4, k)
        chi_c = [Cyclo.from_scalar(N, c) for c in chi]
        for j in range(k):
            if gcd(j, k) != 1:
                continue
            zeta = Cyclo.zeta(N, j * (N // k))
            p = chi_c
            mult = 0
            while len(p) > 1 and not linalg.upoly_eval(p, zeta):
                p, _ = linalg.upoly_divmod(p, [-zeta, Cyclo(N, [1])])
                mult += 1
            if mult:
                found.append((k, j, N, mult))
                total += mult
        if total == n:
            break
    if total != n:
        raise NotQuasiUnipotent("some eigenvalue of T is not a root of unity within the order bound")
    return found


def _lcm(a, b):
    return a * b // gcd(a, b)


def eigen_decompose(T, assume_quasi_unipotent: bool = True, bound: int | None = None):
    """Spectral form of an invertible matrix T over Q(i).

    With ``assume_quasi_unipotent`` the computation is exact and a Jordan basis is recorded.
    Without it, a double-precision decomposition is returned as NumericMonodromy.
    """
    T = linalg.as_matrix(T)
    n = len(T)
    if any(len(row) != n for row in T):
        raise ValueError("T must be square")
    if n == 0:
        return MonodromyData([])
    if not linalg.det(T):
        raise SingularMatrix("monodromy must be invertible")
    if not assume_quasi_unipotent:
        return numeric_decompose(T)
    found = _exact_decompose(T, bound)
    N = 4
    for k, _, _, _ in found:
        N = _lcm(N, k)
    Tc = [[Cyclo.from_scalar(N, x) for x in row] for row in T]
    blocks, columns, jblocks = [], [], []
    for k, j, _, mult in found:
        zeta = Cyclo.zeta(N, j * (N // k))
        A = [[x - zeta if a == b else x for b, x in enumerate(row)] for a, row in enumerate(Tc)]
        nullities, P = [0], linalg.identity(n, Cyclo(N, [1]))
        while nullities[-1] < mult:
            P = linalg.matmul(A, P)
            nullities.append(_nullity(P))
        # number of blocks of size >= s is nullity(s) - nullity(s-1)
        at_least = [nullities[s] - nullities[s - 1] for s in range(1, len(nullities))] + [0]
        sizes = []
        for s in range(1, len(nullities)):
            sizes += [s] * (at_least[s - 1] - at_least[s])
        r = reduce_to_g(Fraction(-j, k))
        blocks.append((r, sizes))
        for chain in _jordan_chains(A, sizes):
            columns += chain
            jblocks.append((zeta, len(chain)))
    P = linalg.transpose(columns)
    J = linalg.zeros(n, n, Cyclo(N))
    off = 0
    for zeta, s in jblocks:
        for a in range(s):
            J[off + a][off + a] = zeta
            if a + 1 < s:
                J[off + a][off + a + 1] = Cyclo(N, [1])
        off += s
    if linalg.matmul(linalg.matmul(P, J), linalg.inverse(P)) != Tc:
        raise AssertionError("Jordan reconstruction failed")
    return MonodromyData(blocks, reconstruction=(N, P, J))


@dataclass(frozen=True)
class NumericMonodromy:
    """Floating-point spectral data for T that need not be quasi-unipotent."""

    blocks: tuple  # ((complex exponent, jordan sizes), ...)

    def to_json(self) -> dict:
        return {"numeric": True, "blocks": [
            {"exponent": [round(e.real, 12), round(e.imag, 12)], "jordan": list(s)} for e, s in self.blocks]}


def numeric_decompose(T, tol: float = NUMERIC_TOL) -> NumericMonodromy:
    A = np.array([[complex(x) for x in row] for row in T])
    n = len(A)
    clusters = []
    for lam in np.linalg.eigvals(A):
        for c in clusters:
            if abs(c[0] - lam) < max(tol, 1e-6):
                c.append(lam)
                break
        else:
            clusters.append([lam])
    blocks = []
    for c in clusters:
        lam = complex(np.mean(c))
        B = A - lam * np.eye(n)
        nullities, P = [0], np.eye(n)
        while nullities[-1] < len(c) and len(nullities) <= n:
            P = B @ P
            nullities.append(n - np.linalg.matrix_rank(P, tol=max(tol, 1e-8) * max(1.0, np.abs(P).max())))
        at_least = [nullities[s] - nullities[s - 1] for s in range(1, len(nullities))] + [0]
        sizes = []
        for s in range(1, len(nullities)):
            sizes += [s] * (at_least[s - 1] - at_least[s])
        r = complex(np.log(lam) / (-2j * np.pi))
        r = complex(r.real - ceil(r.real - 1e-12), r.imag)
        blocks.append((r, tuple(sorted(sizes, reverse=True))))
    blocks.sort(key=lambda b: (-b[0].real, b[0].imag))
    return NumericMonodromy(tuple(blocks))


# --- logarithm and RH^-1 --------------------------------------------------------


@dataclass(frozen=True)
class LogBlock:
    """M = r*Id + nilpotent on one Jordan block of T = zeta*(Id + zeta^-1 N).

    The nilpotent part is -1/(2 pi i) * sum_k coeff_k * exp(2 pi i r k) * N^k; ``series``
    lists (k, coeff_k, phase r*k mod 1 in [0, 1)).
    """

    exponent: Fraction
    size: int
    series: tuple

    def nilpotent_order(self) -> int:
        return self.size


def log_monodromy(m: MonodromyData):
    """Per-block logarithm with eigenvalues in G."""
    out = []
    for r, sizes in m.blocks:
        for s in sizes:
            series = tuple(
                (k, Fraction((-1) ** (k + 1), k), (r * k) % 1)
                for k in range(1, s)
            )
            out.append(LogBlock(r, s, series))
    return out


def exponent_matrix(m: MonodromyData):
    """Normal form of M: block diagonal r*Id + (ones on the superdiagonal)."""
    mats = []
    for r, sizes in m.blocks:
        for s in sizes:
            B = linalg.zeros(s, s)
            for a in range(s):
                B[a][a] = Scalar(r)
                if a + 1 < s:
                    B[a][a + 1] = ONE
            mats.append(B)
    return linalg.block_diag(*mats) if mats else []


@dataclass(frozen=True)
class DiffModule:
    """Free C((hbar))-module of finite rank with standard lattice and D(f v) = (hbar d/dhbar f) v + f D(v)."""

    rank: int
    D_matrix: tuple

    def __init__(self, D_matrix):
        rows = tuple(tuple(x if isinstance(x, HLaurent) else HLaurent.constant(x) for x in row) for row in D_matrix)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("D must be square")
        object.__setattr__(self, "rank", len(rows))
        object.__setattr__(self, "D_matrix", rows)

    def apply(self, v) -> HVector:
        v = [HLaurent._lift(x) for x in v]
        Dv = hlaurent_apply([list(r) for r in self.D_matrix], v)
        return HVector(a.euler() + b for a, b in zip(v, Dv))

    def constant_term(self):
        """D mod hbar on the standard lattice; fails if the lattice is not D-stable."""
        out = []
        for a, row in enumerate(self.D_matrix):
            new = []
            for b, x in enumerate(row):
                if x.coeffs and x.order_low < 0:
                    raise NoAdmissibleLattice(f"D entry ({a}, {b}) has a pole; standard lattice is not D-stable")
                new.append(x.coefficient(0))
            out.append(new)
        return out


def rh_inverse(m: MonodromyData) -> DiffModule:
    return DiffModule(exponent_matrix(m))


def _rational_roots(p):
    """Rational roots with multiplicity of a polynomial over Q(i) (constant term first)."""
    p = linalg.upoly_trim(p)
    re = linalg.upoly_trim([Scalar(c.re) for c in p])
    im = linalg.upoly_trim([Scalar(c.im) for c in p])
    g = linalg.upoly_gcd(re, im) if im else linalg.upoly_gcd(re, re)
    if len(g) <= 1:
        return {}
    sq = linalg.upoly_divmod(g, linalg.upoly_gcd(g, linalg.upoly_derivative(g)))[0] if len(g) > 2 else g
    coeffs = [float(c.re) for c in reversed(sq)]
    roots = {}
    for z in np.roots(coeffs) if len(coeffs) > 1 else []:
        if abs(z.imag) > 1e-6:
            continue
        for limit in (10**4, 10**8):
            cand = Fraction(float(z.real)).limit_denominator(limit)
            c = Scalar(cand.numerator) / cand.denominator
            if not linalg.upoly_eval(sq, c):
                mult, q = 0, p
                while len(q) > 1 and not linalg.upoly_eval(q, c):
                    q, _ = linalg.upoly_divmod(q, [-c, ONE])
                    mult += 1
                roots[cand] = mult
                break
    return roots


def lattice_reduce(d: DiffModule) -> MonodromyData:
    """Monodromy exp(-2 pi i (D mod hbar)) of a module with D-stable standard lattice."""
    M0 = d.constant_term()
    n = len(M0)
    if n == 0:
        return MonodromyData([])
    roots = _rational_roots(linalg.charpoly(M0))
    if sum(roots.values()) != n:
        raise NotQuasiUnipotent("D mod hbar has eigenvalues outside Q; monodromy is not quasi-unipotent")
    for r in roots:
        if not in_g(r):
            raise NoAdmissibleLattice(f"eigenvalue {format_rational(r)} of D mod hbar lies outside G = (-1, 0]")
    for r in roots:
        for s in roots:
            if r != s and (r - s).denominator == 1:
                raise NoAdmissibleLattice("eigenvalues of D mod hbar differ by a nonzero integer")
    blocks = []
    for r, mult in roots.items():
        rs = Scalar(r.numerator) / r.denominator
        A = [[x - rs if a == b else x for b, x in enumerate(row)] for a, row in enumerate(M0)]
        nullities, P = [0], linalg.identity(n)
        while nullities[-1] < mult:
            P = linalg.matmul(A, P)
            nullities.append(_nullity(P))
        at_least = [nullities[s] - nullities[s - 1] for s in range(1, len(nullities))] + [0]
        sizes = []
        for s in range(1, len(nullities)):
            sizes += [s] * (at_least[s - 1] - at_least[s])
        blocks.append((r, sizes))
    return MonodromyData(blocks)


# --- sign twists and tensor products ----------------------------------------------


def twist_sign(m: MonodromyData, power: int) -> MonodromyData:
    """Multiply T by (-1)^power: exponents shift by 1/2 mod 1 when power is odd."""
    if power % 2 == 0:
        return m
    return MonodromyData([(reduce_to_g(r + Fraction(1, 2)), s) for r, s in m.blocks])


def conjugate(m: MonodromyData) -> MonodromyData:
    """The complex-conjugate monodromy (opposite sign convention)."""
    return MonodromyData([(reduce_to_g(-r), s) for r, s in m.blocks])


def jordan_tensor(a: int, b: int):
    """Sizes of the Jordan decomposition of J_a (x) J_b (unipotent, characteristic 0)."""
    lo, hi = sorted((a, b))
    return [hi + lo - 1 - 2 * k for k in range(lo)]


def tensor(m1: MonodromyData, m2: MonodromyData) -> MonodromyData:
    blocks = []
    for r1, s1 in m1.blocks:
        for r2, s2 in m2.blocks:
            sizes = []
            for a in s1:
                for b in s2:
                    sizes += jordan_tensor(a, b)
            blocks.append((reduce_to_g(r1 + r2), sizes))
    return MonodromyData(blocks)


def eigenvalue_text(r) -> str:
    """exp(-2 pi i r) as text."""
    r = Fraction(r)
    if r == 0:
        return "1"
    if r == Fraction(-1, 2):
        return "-1"
    if r == Fraction(-1, 4):
        return "i"
    if r == Fraction(-3, 4):
        return "-i"
    return f"exp(2*pi*i*{format_rational(-r)})"
