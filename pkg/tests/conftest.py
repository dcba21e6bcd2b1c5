import random

import pytest
from hypothesis import strategies as st

from dtcalc import linalg
from dtcalc.scalar import Scalar
from dtcalc.symplectic import LagrangianSubspace, is_transverse, standard_space

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


small_ints = st.integers(min_value=-7, max_value=7)
rationals = st.builds(lambda p, q: Scalar(p) / q, st.integers(-20, 20), st.integers(1, 9))
scalars = st.builds(lambda a, b: a + b * Scalar(0, 1), rationals, rationals)


def rand_scalar(rng, span=4, gaussian=True):
    re = Scalar(rng.randint(-span, span)) / rng.randint(1, 3)
    if gaussian and rng.random() < 0.5:
        return re + Scalar(0, rng.randint(-span, span))
    return re


def rand_symmetric(rng, n, invertible=True, gaussian=True):
    while True:
        A = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                A[i][j] = A[j][i] = rand_scalar(rng, gaussian=gaussian)
        if not invertible or linalg.det(A):
            return A


def rand_invertible(rng, n):
    while True:
        G = [[rand_scalar(rng, 2) for _ in range(n)] for _ in range(n)]
        if linalg.det(G):
            return G


def rand_symplectic(rng, n):
    """Product of shears [[I, S], [0, I]], [[I, 0], [S, I]] and a block [[G, 0], [0, G^-T]]."""
    I = linalg.identity(n)
    Z = linalg.zeros(n, n)

    def blocks(a, b, c, d):
        return [ra + rb for ra, rb in zip(a, b)] + [rc + rd for rc, rd in zip(c, d)]

    S1, S2 = rand_symmetric(rng, n, False), rand_symmetric(rng, n, False)
    G = rand_invertible(rng, n)
    Gi = linalg.transpose(linalg.inverse(G))
    g = blocks(I, S1, Z, I)
    g = linalg.matmul(g, blocks(I, Z, S2, I))
    return linalg.matmul(g, blocks(G, Z, Z, Gi))


def rand_lagrangian(rng, space, name=""):
    n = space.half
    base = [row + [Scalar(0)] * n for row in linalg.identity(n)]
    rows = linalg.matmul(base, rand_symplectic(rng, n))
    rows = linalg.matmul(rand_invertible(rng, n), rows)
    return LagrangianSubspace(space, rows, name)


def rand_chain(rng, n, length):
    space = standard_space(n)
    chain = [rand_lagrangian(rng, space, "L1")]
    while len(chain) < length:
        L = rand_lagrangian(rng, space, f"L{len(chain) + 1}")
        if is_transverse(chain[-1], L):
            chain.append(L)
    return chain


@pytest.fixture
def rng():
    return random.Random(20240611)
