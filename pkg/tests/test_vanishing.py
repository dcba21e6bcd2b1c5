import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtcalc.errors import Degenerate, NotIsolated, NotQuasiHomogeneous, NotSingular
from dtcalc.monodromy import MonodromyData, eigenvalue_text, reduce_to_g, twist_sign
from dtcalc.parser import parse_poly
from dtcalc.poly import Poly, direct_sum
from dtcalc.scalar import Scalar
from dtcalc.torsor import QuadForm
from dtcalc.vanishing import (
    UNIT_SPECTRUM,
    OrderParam,
    Spectrum,
    milnor_algebra,
    milnor_number,
    pv_data,
    pv_twist,
    qh_weights,
    spectrum,
    stabilize,
    sum_of_squares,
    thom_sebastiani,
    tq_scale,
    twisted_dr_operator,
    vanishing_monodromy,
)

F = Fraction


def P(text, variables=None):
    return parse_poly(text, variables)


def diag(D):
    return [D[k][k] for k in range(len(D))]


def brieskorn_spectrum(exps):
    out = [F(0)]
    for k in exps:
        out = [s + F(a + 1, k) for s in out for a in range(k - 1)]
    return sorted(out)


# --- Milnor algebra --------------------------------------------------------------------


@pytest.mark.parametrize("text,basis", [
    ("x^2", [(0,)]),
    ("x^3 + y^3", [(0, 0), (0, 1), (1, 0), (1, 1)]),
    ("x*y", [(0, 0)]),
])
def test_milnor_examples(text, basis):
    alg = milnor_algebra(P(text))
    assert sorted(alg.monomial_basis) == basis
    assert alg.mu == len(basis)


def test_milnor_errors():
    with pytest.raises(NotSingular):
        milnor_algebra(P("x^2 + x"))
    with pytest.raises(NotIsolated):
        milnor_algebra(P("x^2*y"))
    with pytest.raises(NotIsolated):
        milnor_algebra(P("x^2", ["x", "y"]))


def test_local_not_global():
    # x^2 + x^3 has a second critical point at x = -2/3; only the origin counts
    assert milnor_number(P("x^2 + x^3")) == 1
    assert milnor_number(P("x^3 + y^4 + x^2*y^2")) == 6
    assert milnor_number(P("x^2 + y^2 + x*y^5")) == 1


def test_zero_variables():
    f = Poly((), {})
    assert milnor_algebra(f).mu == 1


@given(st.lists(st.integers(2, 6), min_size=1, max_size=3))
@settings(max_examples=30, deadline=None)
def test_brieskorn_mu(exps):
    names = ["x", "y", "z"][: len(exps)]
    f = P(" + ".join(f"{v}^{k}" for v, k in zip(names, exps)))
    mu = 1
    for k in exps:
        mu *= k - 1
    assert milnor_number(f) == mu


def test_reduce_idempotent_on_basis():
    alg = milnor_algebra(P("x^3 + y^4"))
    for k, m in enumerate(alg.monomial_basis):
        mono = Poly(alg.f.variables, {m: 1})
        coords = alg.reduce(mono)
        assert coords == [Scalar(1) if j == k else Scalar(0) for j in range(alg.mu)]
    # partial derivatives vanish in the quotient
    for d in alg.f.jacobian():
        assert not any(alg.reduce(d))
    assert not any(alg.reduce(P("x^2*y", ["x", "y"])))


def test_reduce_is_linear(rng):
    alg = milnor_algebra(P("x^3 + x*y^3"))
    for _ in range(10):
        a = Poly(("x", "y"), {(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(-3, 3)})
        b = Poly(("x", "y"), {(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(-3, 3)})
        assert alg.reduce(a + b) == [x + y for x, y in zip(alg.reduce(a), alg.reduce(b))]


# --- weights and spectrum --------------------------------------------------------------


def test_weights():
    assert qh_weights(P("x^3 + y^2")) == (F(1, 3), F(1, 2))
    assert qh_weights(P("x^2 + y^3 + x*y")) is None
    assert qh_weights(sum_of_squares(4)) == (F(1, 2),) * 4
    assert qh_weights(P("x^2*y + y^3")) == (F(1, 3), F(1, 3))
    assert qh_weights(P("x^3 + x*y^3")) == (F(1, 3), F(2, 9))


def test_spectrum_examples():
    for n in range(1, 5):
        assert spectrum(sum_of_squares(n)).values == (F(n, 2),)
    assert spectrum(P("x^3")).values == (F(1, 3), F(2, 3))
    assert spectrum(P("x^3 + y^3")).values == (F(2, 3), F(1), F(1), F(4, 3))
    with pytest.raises(NotQuasiHomogeneous):
        spectrum(P("x^2 + y^3 + x*y"))


@pytest.mark.parametrize("text", ["x^2 + y^3 + z^5", "x^3 + x*y^3", "x^2*y + y^4", "x^4 + y^4 + z^2", "x^3 + y^3 + z^3"])
def test_spectrum_symmetric(text):
    sp = spectrum(P(text))
    assert sp.is_symmetric()
    assert sp.mu == milnor_number(P(text))


def test_non_diagonal_qh_spectrum():
    # E7 = x^3 + x*y^3
    sp = spectrum(P("x^3 + x*y^3"))
    want = [F(e, 18) for e in (10, 14, 16, 18, 20, 22, 26)]
    assert list(sp.values) == want


def test_dr_operator_examples():
    assert diag(twisted_dr_operator(P("x^2"))) == [F(1, 2)]
    assert diag(twisted_dr_operator(P("x^3"))) == [F(1, 3), F(2, 3)]
    assert diag(twisted_dr_operator(P("x*y"))) == [1]
    D = twisted_dr_operator(P("x^3 + x*y^3"))
    assert all(not D[a][b] for a in range(len(D)) for b in range(len(D)) if a != b)


@given(st.lists(st.integers(2, 5), min_size=1, max_size=3), st.sampled_from([F(1, 2), F(1), F(0), F(3, 2)]))
@settings(max_examples=25, deadline=None)
def test_dr_matches_weight_formula(exps, lam):
    names = ["x", "y", "z"][: len(exps)]
    f = P(" + ".join(f"{v}^{k}" for v, k in zip(names, exps)))
    got = sorted(F(str(x.real_value())) for x in diag(twisted_dr_operator(f, lam)))
    assert got == [s + F(1, 2) - lam for s in brieskorn_spectrum(exps)]


def test_dr_independent_of_coefficients():
    # rescaling the monomials leaves the spectrum alone
    a = twisted_dr_operator(P("3*x^3 - 2*y^4"))
    b = twisted_dr_operator(P("x^3 + y^4"))
    assert sorted(map(str, diag(a))) == sorted(map(str, diag(b)))


# --- monodromy --------------------------------------------------------------------------


def test_monodromy_examples():
    assert [eigenvalue_text(r) for r in vanishing_monodromy(P("x^2")).exponents()] == ["-1"]
    for n in range(1, 6):
        m = vanishing_monodromy(sum_of_squares(n))
        assert m.dim == 1 and eigenvalue_text(m.exponents()[0]) == ("1" if n % 2 == 0 else "-1")
    m = vanishing_monodromy(P("x^3"))
    assert sorted(m.exponents()) == [F(-2, 3), F(-1, 3)]
    assert m.is_semisimple()


def test_conjugate_convention():
    a = vanishing_monodromy(P("x^3"))
    b = vanishing_monodromy(P("x^3"), "conjugate")
    assert sorted(a.exponents()) == sorted(b.exponents())  # {1/3, 2/3} is closed under negation
    c = vanishing_monodromy(P("x^4"), "conjugate")
    d = vanishing_monodromy(P("x^4"))
    assert c == d
    e = vanishing_monodromy(P("x^3 + y^4"))
    f = vanishing_monodromy(P("x^3 + y^4"), "conjugate")
    assert sorted(e.exponents()) == sorted(f.exponents())


def test_monodromy_matches_spectrum():
    # exp(-2 pi i r) = exp(-2 pi i alpha)
    for text in ("x^5", "x^3 + y^4", "x^2*y + y^4"):
        sp = spectrum(P(text))
        m = vanishing_monodromy(P(text))
        assert sorted(m.exponents()) == sorted(reduce_to_g(a) for a in sp.values)


# --- PV data, Thom-Sebastiani, stabilization ------------------------------------------------


def test_pv_twist():
    raw = vanishing_monodromy(P("x^2"))
    pv = pv_twist(raw, 1)
    assert [eigenvalue_text(r) for r in pv.monodromy.exponents()] == ["1"]
    assert pv_twist(raw, 2).monodromy == raw
    assert pv_twist(pv, 1).monodromy == raw
    assert pv.untwist() == raw


def test_thom_sebastiani_examples():
    s = thom_sebastiani(spectrum(P("x^3")), spectrum(P("y^3")))
    assert s == spectrum(P("x^3 + y^3"))
    sp = spectrum(P("x^3 + y^4"))
    assert thom_sebastiani(sp, UNIT_SPECTRUM) == sp


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_thom_sebastiani_random(seed):
    rng = random.Random(seed)
    f = P(f"{rng.randint(1, 3)}*x^{rng.randint(2, 5)} + y^{rng.randint(2, 4)}")
    g = P(f"z^{rng.randint(2, 5)} - {rng.randint(1, 4)}*w^2")
    fg = direct_sum(f, g)
    assert milnor_number(fg) == milnor_number(f) * milnor_number(g)
    assert spectrum(fg) == thom_sebastiani(spectrum(f), spectrum(g))
    tensor = thom_sebastiani(pv_data(f), pv_data(g))
    assert tensor.monodromy == pv_data(fg).monodromy
    assert tensor.raw == pv_data(fg).raw


def test_tq_scale():
    assert tq_scale(QuadForm([[1]]), F(1, 2)) == F(1, 2)
    assert tq_scale(QuadForm.sum_of_squares(2), 1) == F(1, 2)
    assert tq_scale(QuadForm([]), F(1, 2)) == 0
    with pytest.raises(Degenerate):
        tq_scale(QuadForm([[0]]))


def test_stabilize_examples():
    base = pv_data(P("x^3"))
    one = stabilize(base, QuadForm([[1]]))
    assert one.spectrum.values == (F(5, 6), F(7, 6))
    assert one.spectrum == spectrum(P("x^3 + z^2"))
    assert one.monodromy == base.monodromy
    assert one.raw == twist_sign(base.raw, 1)
    assert stabilize(base, QuadForm([])) == base
    with pytest.raises(Degenerate):
        stabilize(base, QuadForm([[0]]))


def test_stabilize_general_form():
    base = pv_data(P("x^4"))
    q = QuadForm([[2, 1], [1, 3]])
    s = stabilize(base, q, OrderParam(1))
    assert s.torsor.target == 5 and s.torsor.symbolic
    assert s.tq_scales == (F(1, 2),)
    assert s.monodromy == base.monodromy
    direct = pv_data(direct_sum(P("x^4"), q.as_poly(["u", "v"])))
    assert direct.spectrum == s.spectrum


def test_spectrum_json():
    assert Spectrum([F(2, 3), F(1, 3)], 1).to_json() == ["1/3", "2/3"]
    assert pv_data(P("x^2")).to_json()["monodromy"] == MonodromyData([(0, [1])]).to_json()
