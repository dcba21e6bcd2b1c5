"""Critical charts, chart embeddings and the torsor bookkeeping that glues them.

Everything is evaluated pointwise at the origin of each chart. Generating functions
h(l, m) must have an invertible constant m-Hessian and a polynomial solution m(l) of
dh/dm = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .errors import (
    CocycleError,
    Degenerate,
    DimensionMismatch,
    EliminationFailed,
    NotExact,
    NotSingular,
    SingularHessian,
    ZeroDivision,
)
from .poly import Poly
from .scalar import ONE, ZERO, Scalar
from .symplectic import (
    LagrangianSubspace,
    chain_map,
    fiber,
    graph,
    maslov_form,
    pfaffian,
    standard_space,
    zero_section,
)
from .torsor import QuadForm, TorsorElement
from .vanishing import milnor_algebra

ELIMINATION_BOUND = 32


@dataclass(frozen=True, eq=False)
class CriticalChart:
    f: Poly
    mu: int

    @property
    def variables(self):
        return self.f.variables

    @property
    def critical_points(self):
        return [tuple(ZERO for _ in self.f.variables)]


def critical_chart(f: Poly) -> CriticalChart:
    """Chart (Crit f, U, f) at the origin; f must vanish there to second order and be isolated."""
    if f.constant_term():
        raise NotSingular("f does not vanish at the origin")
    return CriticalChart(f, milnor_algebra(f).mu)


def _origin(variables):
    return {v: ZERO for v in variables}


def _restrict(h: Poly, variables) -> Poly:
    """Re-express h in exactly ``variables``; unused extra variables are dropped."""
    used = {v for k, v in enumerate(h.variables) if any(e[k] for e in h.terms)}
    extra = sorted(used - set(variables))
    if extra:
        raise DimensionMismatch(f"h uses undeclared variables {extra}")
    keep = [k for k, v in enumerate(h.variables) if v in variables]
    trimmed = Poly([h.variables[k] for k in keep], {tuple(e[k] for k in keep): c for e, c in h.terms.items()})
    return trimmed.with_variables(variables)


def _hessian_at_origin(h: Poly, rows, cols):
    point = _origin(h.variables)
    return [[h.diff(a).diff(b).evaluate(point) for b in cols] for a in rows]


@dataclass(frozen=True, eq=False)
class ChartEmbedding:
    h: Poly
    l_vars: tuple
    m_vars: tuple
    elimination: dict
    f: Poly
    q_xi: QuadForm

    def to_json(self) -> dict:
        return {
            "f": self.f.render(),
            "elimination": {m: p.render() for m, p in self.elimination.items()},
            "q_xi": [[str(x) for x in row] for row in self.q_xi.matrix],
        }


def embedding_quadform(h: Poly, l_vars, m_vars, degree_bound: int = ELIMINATION_BOUND) -> ChartEmbedding:
    """Solve dh/dm = 0 for m = m(l), return f = h(l, m(l)) and the m-Hessian q_xi at the origin."""
    l_vars, m_vars = tuple(l_vars), tuple(m_vars)
    if set(l_vars) & set(m_vars):
        raise DimensionMismatch("l and m variables overlap")
    h = _restrict(h, l_vars + m_vars)
    H0 = _hessian_at_origin(h, m_vars, m_vars)
    if m_vars and not linalg.det(H0):
        raise SingularHessian("m-Hessian of h at the origin is singular")
    H0inv = linalg.inverse(H0) if m_vars else []
    grad = [h.diff(m) for m in m_vars]
    phi = {m: Poly(l_vars) for m in m_vars}
    for _ in range(degree_bound + 2):
        residual = [g.substitute(phi).with_variables(l_vars) for g in grad]
        step = {}
        for i, m in enumerate(m_vars):
            acc = Poly(l_vars)
            for j, r in enumerate(residual):
                if H0inv[i][j]:
                    acc = acc + r * H0inv[i][j]
            step[m] = (phi[m] - acc).truncate(degree_bound)
        if all(step[m] == phi[m] for m in m_vars):
            break
        phi = step
    residual = [g.substitute(phi) for g in grad]
    if any(not r.is_zero() for r in residual):
        raise EliminationFailed(f"dh/dm = 0 has no polynomial solution of degree <= {degree_bound}")
    f = h.substitute(phi).with_variables(l_vars) if m_vars else h
    return ChartEmbedding(h, l_vars, m_vars, phi, f, QuadForm(H0))


def chart_lagrangians(h: Poly, l_vars, m_vars):
    """(T_M, T_pi1, T_pi2) in T_S = T_M + T*_M at the origin.

    T_pi1 is the image of the vertical subspace of T*L under the local identification
    given by h when d2h/dl dm is invertible; otherwise it is read off directly as the
    graph of -d2h/dm dm.
    """
    l_vars, m_vars = tuple(l_vars), tuple(m_vars)
    k = len(m_vars)
    space = standard_space(k)
    Hmm = _hessian_at_origin(h, m_vars, m_vars)
    Hlm = _hessian_at_origin(h, l_vars, m_vars)
    T_M, T_pi2 = zero_section(k, space), fiber(k, space)
    if len(l_vars) == k and k and linalg.det(Hlm):
        A = linalg.inverse(Hlm)
        rows = []
        for a in range(k):
            # (0, xi = e_a) in T*L  ->  dl = 0, dm = A e_a  ->  (dm, -Hmm dm) in T*M
            dm = [A[i][a] for i in range(k)]
            rows.append(dm + [-x for x in linalg.matvec(Hmm, dm)])
        T_pi1 = LagrangianSubspace(space, rows, "T_pi1")
    else:
        T_pi1 = graph(linalg.neg(Hmm), space, "T_pi1")
    return T_M, T_pi1, T_pi2


def maslov_consistency(h: Poly, l_vars, m_vars, lagrangians=None) -> bool:
    """q_xi from the elimination equals q(T_M, T_pi1, T_pi2), exactly."""
    emb = embedding_quadform(h, l_vars, m_vars)
    if lagrangians is None:
        lagrangians = chart_lagrangians(h, l_vars, m_vars)
    T_M, T_pi1, T_pi2 = lagrangians
    if T_M.space.half != len(tuple(m_vars)):
        raise DimensionMismatch(f"Lagrangians live in dimension {T_M.space.dim}, expected {2 * len(tuple(m_vars))}")
    return maslov_form(T_M, T_pi1, T_pi2).matrix == emb.q_xi.matrix


# --- torsors on charts ----------------------------------------------------------------


def lambda_map(s: TorsorElement, u: TorsorElement, omega_target) -> TorsorElement:
    """s |-> u (x) sqrt(omega) / s."""
    if not s.target:
        raise ZeroDivision("s lies over the zero target")
    out = u * TorsorElement.base(omega_target) / s
    return TorsorElement(out.target, out.coeff, out.radicand, out.gaussian, "P_Xi")


CHART_KINDS = ("Q_L", "Q_M", "Q_LM", "P_Xi", "P_Upsilon")


def chart_torsor_target(kind: str, *vol_data) -> Scalar:
    """Target of the square-root condition at a point.

    Q_L: (pullback of omega_M, omega_L); Q_M: (pullback of omega_L, omega_M);
    Q_LM: (pullback of vol_S, omega_L, omega_M); P_Xi, P_Upsilon: (det q, basis volume).
    """
    vals = [Scalar.coerce(v) for v in vol_data]
    if kind in ("Q_L", "Q_M"):
        if len(vals) != 2:
            raise ValueError(f"{kind} needs two volume values")
        num, den = vals
    elif kind == "Q_LM":
        if len(vals) != 3:
            raise ValueError("Q_LM needs three volume values")
        num, den = vals[0], vals[1] * vals[2]
    elif kind in ("P_Xi", "P_Upsilon"):
        if len(vals) != 2:
            raise ValueError(f"{kind} needs det(q) and a basis volume")
        num, den = vals[0] * vals[1] * vals[1], ONE
    else:
        raise ValueError(f"unknown torsor kind {kind!r}")
    if not den:
        raise ZeroDivision("volume form vanishes in the denominator")
    if not num:
        raise Degenerate("volume form vanishes; target would be zero")
    return num / den


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    element: TorsorElement


def cocycle_check(transitions) -> int:
    """Sign of the product of transition representatives around a closed loop."""
    transitions = list(transitions)
    if not transitions:
        raise CocycleError("empty loop")
    for a, b in zip(transitions, transitions[1:] + transitions[:1]):
        if a.target != b.source:
            raise CocycleError(f"transition {a.source}->{a.target} is not followed by one starting at {a.target}")
    prod = TorsorElement.unit()
    for t in transitions:
        prod = prod * t.element
    if prod.target != 1:
        raise CocycleError(f"loop product lies over {prod.target}, not over 1")
    return prod.sign_relative_to(TorsorElement.unit())


def quadratic_loop(H1, H2, flip: int | None = None):
    """Three charts X0 = L, X1 = graph(-H1), X2 = graph(-H2) of T*L with common fibre F.

    Transitions are square roots of det C(X_a, F, X_b). The first two use the base point;
    the third is forced by the composition law and checked against its own determinant.
    ``flip`` negates one transition to simulate an inconsistent gluing.
    """
    H1, H2 = linalg.as_matrix(H1), linalg.as_matrix(H2)
    n = len(H1)
    space = standard_space(n)
    X = [zero_section(n, space), graph(linalg.neg(H1), space, "X1"), graph(linalg.neg(H2), space, "X2")]
    F = fiber(n, space)
    d01 = linalg.det(chain_map([X[0], F, X[1]]).rows())
    d12 = linalg.det(chain_map([X[1], F, X[2]]).rows())
    d20 = linalg.det(chain_map([X[2], F, X[0]]).rows())
    t01 = TorsorElement.base(d01, "X0->X1")
    t12 = TorsorElement.base(d12, "X1->X2")
    t20 = (t01 * t12).inverse()
    if t20.target != d20:
        raise AssertionError("composition law failed: det C(X2, F, X0) != 1/(det01 det12)")
    elements = [t01, t12, TorsorElement(t20.target, t20.coeff, t20.radicand, t20.gaussian, "X2->X0")]
    if flip is not None:
        elements[flip] = elements[flip].flip()
    names = ["X0", "X1", "X2"]
    return [Transition(names[k], names[(k + 1) % 3], elements[k]) for k in range(3)]


# --- clean intersections ------------------------------------------------------------


def _extend_to_basis(rows, dim):
    rows = [list(r) for r in rows]
    out = []
    r = linalg.rank(rows) if rows else 0
    for k in range(dim):
        e = [ONE if j == k else ZERO for j in range(dim)]
        if linalg.rank(rows + out + [e]) > r + len(out):
            out.append(e)
        if r + len(out) == dim:
            break
    return out


def _coords(basis_rows, v):
    """Coordinates of v in the span of basis_rows (exact solve)."""
    At = linalg.transpose([list(r) for r in basis_rows])
    aug = [row + [x] for row, x in zip(At, v)]
    R, piv = linalg.rref(aug)
    n = len(basis_rows)
    if n in piv:
        raise NotExact("vector does not lie in the subspace")
    x = [ZERO] * n
    for i, p in enumerate(piv):
        x[p] = R[i][n]
    return x


def clean_intersection_data(TL: LagrangianSubspace, TM: LagrangianSubspace, TLM_basis, g=None, h=None) -> Scalar:
    """Scalar of K_L (x) K_M -> K_{L cap M}^2 from 0 -> K -> T_L + T_M -> T_S -> K* -> 0.

    Maps: a(k) = (k, -k), b(x, y) = x + y, c(s) = omega(-, s) on K. With extensions g of
    a(K) and h of b(g), the value is vol_S(b(g), h) / (det(a(k), g) * det c(h)); vol_S is
    omega^n/n! read in the order (T_L-part, T_M-part), which makes a transverse pair give
    det omega(l_i, m_j). The result does not depend on g or h.
    """
    if TL.space != TM.space:
        raise DimensionMismatch("T_L and T_M live in different spaces")
    S = TL.space
    n, dim = S.half, S.dim
    K = [[Scalar.coerce(x) for x in row] for row in TLM_basis]
    c = len(K)
    inter = 2 * n - linalg.rank(TL.rows() + TM.rows())
    if c != inter:
        raise NotExact(f"declared dim(T_L cap T_M) = {c} but the intersection has dimension {inter}")
    if c and linalg.rank(K) != c:
        raise NotExact("basis of T_L cap T_M is linearly dependent")
    for k in K:
        if linalg.rank(TL.rows() + [k]) != n or linalg.rank(TM.rows() + [k]) != n:
            raise NotExact("declared intersection vector is not in both T_L and T_M")
    ak = [_coords(TL.basis, k) + [-x for x in _coords(TM.basis, k)] for k in K]
    g = linalg.as_matrix(g) if g is not None else _extend_to_basis(ak, 2 * n)
    det2 = linalg.det(ak + g)
    if not det2:
        raise NotExact("extension g does not complete a(K) to a basis")
    bg = []
    for row in g:
        x, y = row[:n], row[n:]
        v = [ZERO] * dim
        for coeff, base in zip(x + y, TL.rows() + TM.rows()):
            if coeff:
                v = [p + coeff * q for p, q in zip(v, base)]
        bg.append(v)
    h = linalg.as_matrix(h) if h is not None else _extend_to_basis(bg, dim)
    C = [[S.omega(k, hj) for k in K] for hj in h]
    det4 = linalg.det(C) if c else ONE
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    det3 = pfaffian(S.gram(bg + h, bg + h)) * sign
    if not det3 or not det4:
        raise NotExact("sequence is not exact for the given extensions")
    return det3 / (det2 * det4)
