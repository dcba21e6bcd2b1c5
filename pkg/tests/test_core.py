from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtcalc import linalg
from dtcalc.errors import ParseError, WindowUnderflow, ZeroDivision
from dtcalc.hlaurent import HLaurent, hlaurent_apply
from dtcalc.parser import parse_poly
from dtcalc.poly import Poly, direct_sum, poly_jacobian
from dtcalc.scalar import I, ONE, ZERO, Scalar, parse_scalar, sqrt_in_field

from conftest import rand_scalar, scalars


# --- Scalar -------------------------------------------------------------------


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == ZERO
    if a:
        assert a * a.inverse() == ONE
        assert (b / a) * a == b


def test_division_by_zero_rejected():
    with pytest.raises(ZeroDivision):
        ONE / ZERO
    with pytest.raises(ZeroDivision):
        ZERO.inverse()


def test_rationals_embed():
    assert Scalar(3) == 3
    assert Scalar(Fraction(1, 2)) == Fraction(1, 2)
    assert hash(Scalar(5)) == hash(5)
    assert I * I == -1


@pytest.mark.parametrize("text,value", [
    ("3/2", Scalar(Fraction(3, 2))),
    ("1-2i", Scalar(1, -2)),
    ("-i", Scalar(0, -1)),
    ("1/2+3/4i", Scalar(Fraction(1, 2), Fraction(3, 4))),
    ("(1 - 2*i)", Scalar(1, -2)),
])
def test_parse_scalar(text, value):
    assert parse_scalar(text) == value


@given(scalars)
def test_scalar_text_round_trip(a):
    assert parse_scalar(str(a)) == a
    assert parse_scalar(a.expr()) == a


@pytest.mark.parametrize("target,roots", [
    (4, (2, -2)),
    (-1, (I, -I)),
    (Scalar(0, 2), (Scalar(1, 1), Scalar(-1, -1))),
    (Fraction(9, 4), (Fraction(3, 2), Fraction(-3, 2))),
])
def test_sqrt_in_field(target, roots):
    got = sqrt_in_field(target)
    assert got is not None and set(got) == {Scalar.coerce(r) for r in roots}
    assert got[0] * got[0] == target


def test_sqrt_outside_field():
    assert sqrt_in_field(2) is None
    assert sqrt_in_field(Scalar(1, 1)) is None


# --- parser ----------------------------------------------------------------------


def test_parse_examples():
    p = parse_poly("x^2")
    assert p.variables == ("x",) and p.terms == {(2,): 1}
    q = parse_poly("x^3 + y^3")
    assert len(q.terms) == 2 and q.variables == ("x", "y")
    r = parse_poly("(1/2)*x - i*y")
    assert r.coeff((1, 0)) == Fraction(1, 2)
    assert r.coeff((0, 1)) == Scalar(0, -1)


def test_variable_order():
    assert parse_poly("y + x").variables == ("y", "x")
    assert parse_poly("y + x", ["x", "y"]).variables == ("x", "y")
    with pytest.raises(ParseError):
        parse_poly("x + z", ["x", "y"])


def test_expansion():
    assert parse_poly("(x + y)^2") == parse_poly("x^2 + 2*x*y + y^2")
    assert parse_poly("(x - 1)*(x + 1)") == parse_poly("x^2 - 1")
    assert parse_poly("-(x)^2") == parse_poly("-x^2")


@pytest.mark.parametrize("text,offset", [("x +", 3), ("x ^ y", 4), ("(x", 2), ("x $ y", 2), ("1/0", 2)])
def test_syntax_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as exc:
        parse_poly(text)
    assert exc.value.offset == offset


def test_exponent_overflow():
    with pytest.raises(ParseError):
        parse_poly("x^2147483648")
    with pytest.raises(ParseError):
        parse_poly("x^100000")
    assert parse_poly("1^2147483647") == 1


@st.composite
def polys(draw):
    names = ("x", "y", "z")
    terms = {}
    for _ in range(draw(st.integers(0, 5))):
        e = tuple(draw(st.integers(0, 4)) for _ in names)
        terms[e] = draw(scalars)
    return Poly(names, terms)


@given(polys())
def test_render_round_trip(p):
    assert parse_poly(p.render(), p.variables) == p


@given(polys(), polys(), polys())
@settings(max_examples=40)
def test_poly_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert all(c for c in (a * b).terms.values())


def test_jacobian_examples():
    assert poly_jacobian(parse_poly("x^2")) == [parse_poly("2*x")]
    assert poly_jacobian(parse_poly("x^3 + y^3")) == [parse_poly("3*x^2"), parse_poly("3*y^2")]
    five = Poly(("x", "y"), {(0, 0): 5})
    assert all(d.is_zero() for d in poly_jacobian(five))


def test_direct_sum_renames():
    s = direct_sum(parse_poly("x^3"), parse_poly("x^2"))
    assert s.variables == ("x", "x_")
    assert s == parse_poly("x^3 + x_^2")


# --- hbar-Laurent series -------------------------------------------------------------


def test_identity_apply():
    v = [HLaurent({-1: 2, 3: 1}), HLaurent({0: Scalar(0, 1)})]
    Id = [[HLaurent.constant(1), HLaurent()], [HLaurent(), HLaurent.constant(1)]]
    assert list(hlaurent_apply(Id, v)) == v


def test_hbar_times_inverse():
    op = [[HLaurent.hbar(1)]]
    out = hlaurent_apply(op, [HLaurent.hbar(-1)])
    assert out[0] == HLaurent.constant(1)
    assert HLaurent.hbar(1) * HLaurent.hbar(1).inverse() == 1


def test_inverse_within_window():
    a = HLaurent({-1: 2, 0: 1, 2: 5})
    prod = a * a.inverse(order=10)
    assert prod.prec is not None
    assert prod.agrees_with(HLaurent.constant(1))


def _schoolbook(op, v):
    # expand every product term by term with plain dicts
    out = []
    for row in op:
        acc = {}
        for a, x in zip(row, v):
            for i, c in a.items():
                for j, d in x.items():
                    acc[i + j] = acc.get(i + j, 0) + c * d
        out.append({k: c for k, c in acc.items() if c})
    return out


def test_apply_matches_schoolbook(rng):
    for _ in range(25):
        op = [[{k: rand_scalar(rng) for k in range(rng.randint(0, 3))} for _ in range(2)] for _ in range(2)]
        v = [{k - 1: rand_scalar(rng) for k in range(rng.randint(1, 3))} for _ in range(2)]
        got = hlaurent_apply([[HLaurent(a) for a in row] for row in op], [HLaurent(x) for x in v])
        want = _schoolbook(op, v)
        assert [g.coeffs for g in got] == want
        assert got.window is None


def test_truncation_tracks_window():
    a = HLaurent({0: 1, 1: 1}, prec=4)
    b = HLaurent({-2: 1})
    prod = a * b
    assert prod.prec == 2 and prod.coefficient(-1) == 1
    with pytest.raises(WindowUnderflow):
        prod.coefficient(2)
    v = hlaurent_apply([[b]], [a])
    assert v.window == 2


def test_truncated_product_agrees_with_exact(rng):
    for _ in range(30):
        a = {k: rand_scalar(rng) for k in range(-1, 5)}
        b = {k: rand_scalar(rng) for k in range(0, 5)}
        exact = HLaurent(a) * HLaurent(b)
        trunc = HLaurent(a, prec=3) * HLaurent(b, prec=4)
        assert trunc.agrees_with(exact)


def test_window_underflow_on_apply():
    a = HLaurent({}, prec=0)
    with pytest.raises(WindowUnderflow):
        hlaurent_apply([[HLaurent({0: 1})]], [a])


# --- linear algebra -----------------------------------------------------------------


def test_charpoly_and_inverse(rng):
    for n in range(1, 5):
        A = [[rand_scalar(rng) for _ in range(n)] for _ in range(n)]
        chi = linalg.charpoly(A)
        # Cayley-Hamilton
        assert linalg.is_zero_matrix(linalg.poly_eval_matrix(chi, A))
        if linalg.det(A):
            assert linalg.matmul(A, linalg.inverse(A)) == linalg.identity(n)
