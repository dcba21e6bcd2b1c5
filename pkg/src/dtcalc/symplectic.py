"""Symplectic vector spaces over Q(i), Lagrangian subspaces, chain maps and Maslov forms.

Conventions:
  * vectors are rows; omega(u, v) = u . Omega . v^T for the stored form matrix Omega;
  * a map between subspaces is the matrix acting on *column* coordinate vectors in the
    stored bases, with dual spaces carried by the dual basis;
  * ``standard_space(n)`` is L + L* with omega(x + eta, y + xi) = eta(y) - xi(x).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .errors import DimensionMismatch, NonTransverse, NotLagrangian, NotSymplectic, SingularMatrix
from .scalar import ONE, ZERO, Scalar
from .torsor import QuadForm


@dataclass(frozen=True, eq=False)
class SymplecticSpace:
    form: tuple

    def __init__(self, form):
        rows = tuple(tuple(Scalar.coerce(x) for x in row) for row in form)
        n = len(rows)
        if n == 0 or n % 2 or any(len(r) != n for r in rows):
            raise NotSymplectic("form must be a square matrix of even positive size")
        for i in range(n):
            for j in range(i, n):
                if rows[i][j] != -rows[j][i]:
                    raise NotSymplectic(f"form is not antisymmetric at entry ({i}, {j})")
        if not linalg.det([list(r) for r in rows]):
            raise NotSymplectic("form is degenerate")
        object.__setattr__(self, "form", rows)

    @property
    def dim(self) -> int:
        return len(self.form)

    @property
    def half(self) -> int:
        return self.dim // 2

    def omega(self, u, v) -> Scalar:
        acc = ZERO
        for i, ui in enumerate(u):
            if ui:
                row = self.form[i]
                for j, vj in enumerate(v):
                    if vj and row[j]:
                        acc = acc + ui * row[j] * vj
        return acc

    def gram(self, rows_a, rows_b):
        """Matrix of omega(a_i, b_j)."""
        return linalg.matmul(linalg.matmul([list(r) for r in rows_a], [list(r) for r in self.form]),
                             linalg.transpose([list(r) for r in rows_b]))

    def __eq__(self, other):
        return isinstance(other, SymplecticSpace) and self.form == other.form

    def __hash__(self):
        return hash(self.form)


def standard_space(n: int) -> SymplecticSpace:
    """L + L* in coordinates (x, eta) with omega(x + eta, y + xi) = eta(y) - xi(x)."""
    form = linalg.zeros(2 * n, 2 * n)
    for k in range(n):
        form[k][n + k] = -ONE
        form[n + k][k] = ONE
    return SymplecticSpace(form)


@dataclass(frozen=True, eq=False)
class LagrangianSubspace:
    space: SymplecticSpace
    basis: tuple
    name: str = ""

    def __init__(self, space: SymplecticSpace, basis, name: str = ""):
        rows = tuple(tuple(Scalar.coerce(x) for x in row) for row in basis)
        n = space.half
        if len(rows) != n or any(len(r) != space.dim for r in rows):
            raise NotLagrangian(f"basis must be {n} x {space.dim}")
        if linalg.rank([list(r) for r in rows]) != n:
            raise NotLagrangian("basis rows are linearly dependent")
        if not linalg.is_zero_matrix(space.gram(rows, rows)):
            raise NotLagrangian("subspace is not isotropic")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "basis", rows)
        object.__setattr__(self, "name", name)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def rows(self):
        return [list(r) for r in self.basis]

    def same_subspace(self, other: LagrangianSubspace) -> bool:
        return self.space == other.space and linalg.rank(self.rows() + other.rows()) == self.dim

    def __eq__(self, other):
        return isinstance(other, LagrangianSubspace) and self.space == other.space and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __str__(self):
        return self.name or f"span{[[str(x) for x in r] for r in self.basis]}"


def zero_section(n: int, space=None) -> LagrangianSubspace:
    space = space or standard_space(n)
    return LagrangianSubspace(space, [row + [ZERO] * n for row in linalg.identity(n)], "L")


def fiber(n: int, space=None) -> LagrangianSubspace:
    space = space or standard_space(n)
    return LagrangianSubspace(space, [[ZERO] * n + row for row in linalg.identity(n)], "L*")


def graph(A, space=None, name="") -> LagrangianSubspace:
    """{(l, A l)} in the standard space; Lagrangian iff A is symmetric."""
    A = linalg.as_matrix(A)
    n = len(A)
    space = space or standard_space(n)
    At = linalg.transpose(A)
    return LagrangianSubspace(space, [linalg.identity(n)[k] + At[k] for k in range(n)], name or "graph")


@dataclass(frozen=True)
class LagChainMap:
    source: LagrangianSubspace
    target: LagrangianSubspace
    matrix: tuple
    dual_flag: bool

    def rows(self):
        return [list(r) for r in self.matrix]

    def compose(self, first: LagChainMap) -> LagChainMap:
        """self o first."""
        return LagChainMap(first.source, self.target, _freeze(linalg.matmul(self.rows(), first.rows())), self.dual_flag)


def _freeze(M):
    return tuple(tuple(r) for r in M)


def _check_same_space(a: LagrangianSubspace, b: LagrangianSubspace):
    if a.space != b.space:
        raise DimensionMismatch("Lagrangian subspaces live in different symplectic spaces")


def is_transverse(a: LagrangianSubspace, b: LagrangianSubspace) -> bool:
    _check_same_space(a, b)
    return linalg.rank(a.rows() + b.rows()) == a.space.dim


def pairing_matrix(L1: LagrangianSubspace, L2: LagrangianSubspace):
    """Entries omega(v_i, w_j) for the stored bases."""
    _check_same_space(L1, L2)
    return L1.space.gram(L1.basis, L2.basis)


def pairing_map(L1: LagrangianSubspace, L2: LagrangianSubspace) -> LagChainMap:
    """f_{L1 L2}: L1 -> L2*, v |-> omega(v, -), in the dual basis of L2."""
    if not is_transverse(L1, L2):
        raise NonTransverse(f"{L1} and {L2} are not transverse")
    M = linalg.transpose(pairing_matrix(L1, L2))
    return LagChainMap(L1, L2, _freeze(M), True)


def chain_map(Ls) -> LagChainMap:
    """C(L_1, ..., L_n): alternating composite f_{L1L2}, f_{L3L2}^{-1}, f_{L3L4}, ...

    Even length lands in L_n* (dual_flag True), odd length in L_n.
    """
    Ls = list(Ls)
    if not Ls:
        raise ValueError("chain must contain at least one subspace")
    n = Ls[0].dim
    M = linalg.identity(n)
    for k in range(len(Ls) - 1):
        a, b = Ls[k], Ls[k + 1]
        _check_same_space(a, b)
        if not is_transverse(a, b):
            raise NonTransverse(f"consecutive pair ({k + 1}, {k + 2}) of the chain is not transverse")
        if k % 2 == 0:
            step = linalg.transpose(pairing_matrix(a, b))
        else:
            step = linalg.inverse(linalg.transpose(pairing_matrix(b, a)))
        M = linalg.matmul(step, M)
    return LagChainMap(Ls[0], Ls[-1], _freeze(M), len(Ls) % 2 == 0)


def maslov_form(L1: LagrangianSubspace, L2: LagrangianSubspace, L3: LagrangianSubspace) -> QuadForm:
    """The quadratic form on L1 whose polarisation is C(L1, L2, L3, L1): L1 -> L1*."""
    for a, b, tag in ((L1, L2, "(1, 2)"), (L2, L3, "(2, 3)"), (L3, L1, "(3, 1)")):
        if not is_transverse(a, b):
            raise NonTransverse(f"pair {tag} of the Maslov triple is not transverse")
    C = chain_map([L1, L2, L3, L1]).rows()
    if not linalg.is_symmetric(C):
        raise AssertionError("C(L1, L2, L3, L1) failed to be self-dual")
    return QuadForm(C)


def chain_composition_check(Ls, split_index: int) -> bool:
    """C(L_k..L_m) o C(L_1..L_k) == C(L_1..L_m) for odd 1-based ``split_index`` k."""
    Ls = list(Ls)
    if split_index % 2 == 0 or not 1 <= split_index <= len(Ls):
        raise ValueError("split index must be odd and within the chain")
    k = split_index
    first = chain_map(Ls[:k])
    second = chain_map(Ls[k - 1:])
    full = chain_map(Ls)
    return second.compose(first).matrix == full.matrix and second.dual_flag == full.dual_flag


def backtrack_deletion_check(Ls, index: int) -> bool:
    """For Ls[index-1] == Ls[index+1] (0-based), deleting Ls[index], Ls[index+1] leaves C unchanged."""
    Ls = list(Ls)
    if not 1 <= index <= len(Ls) - 2:
        raise ValueError("index must have a neighbour on both sides")
    if Ls[index - 1] != Ls[index + 1]:
        raise ValueError("chain does not go back and forth at this index")
    shorter = Ls[:index] + Ls[index + 2:]
    return chain_map(Ls).matrix == chain_map(shorter).matrix


def symplectic_volume(space: SymplecticSpace, basis) -> Scalar:
    """omega^n/n! on a basis listed in Darboux order (e_1, f_1, e_2, f_2, ...)."""
    G = space.gram(basis, basis)
    return pfaffian(G)


def pfaffian(A) -> Scalar:
    n = len(A)
    if n % 2:
        return ZERO
    if n == 0:
        return ONE
    M = [list(r) for r in linalg.as_matrix(A)]
    result = ONE
    for k in range(0, n - 1, 2):
        p = next((j for j in range(k + 1, n) if M[k][j]), None)
        if p is None:
            return ZERO
        if p != k + 1:
            for row in M:
                row[k + 1], row[p] = row[p], row[k + 1]
            M[k + 1], M[p] = M[p], M[k + 1]
            result = -result
        piv = M[k][k + 1]
        result = result * piv
        inv = piv.inverse()
        for i in range(k + 2, n):
            f = M[k][i] * inv
            g = M[k + 1][i] * inv
            if f or g:
                for j in range(n):
                    M[i][j] = M[i][j] - f * M[k + 1][j] + g * M[k][j]
                for j in range(n):
                    M[j][i] = M[j][i] - f * M[j][k + 1] + g * M[j][k]
    return result


def assert_invertible(M):
    if not linalg.det(M):
        raise SingularMatrix("matrix is not invertible")
