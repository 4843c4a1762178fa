from fractions import Fraction
from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ksverify.fixtures import BUILTIN, load_fixture
from ksverify.ks_hodge import (
    CechCoverToy,
    KSError,
    RealLinearFunctional,
    cech_cocycle_check,
    cocycle,
    decompose_functional,
    fd_period_defect,
    hermitian_form,
    ks_pairing_matrix,
    random_rational_point,
    riemann_functional,
    standard_lemma_form,
    verify_ks_pairing,
    verify_lemma_app,
)
from ksverify.siegel import (
    SiegelPoint,
    period_basis,
    random_siegel_point,
    real_form,
    riemann_gram,
    standard_point,
)
from ksverify.twisted import TwistedPoint, build_twisted_lattice, twisted_gram

finite = st.floats(-10, 10, allow_nan=False)


def test_re_decomposition():
    f = RealLinearFunctional((1,), (0,))  # Re w
    lin, anti = decompose_functional(f)
    for w in (1 + 2j, -0.5 + 3j, 2j):
        assert abs(lin([w]) - w / 2) < 1e-15
        assert abs(anti([w]) - w.conjugate() / 2) < 1e-15
    assert lin.is_linear() and anti.is_antilinear()


def test_linear_functional_has_no_antilinear_part():
    f = RealLinearFunctional((2 - 1j, 0.5j), ((2 - 1j) * 1j, 0.5j * 1j))
    assert f.is_linear()
    _, anti = decompose_functional(f)
    assert all(x == 0 for x in anti.on_real + anti.on_imag)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(finite, finite, finite, finite), min_size=1, max_size=3))
def test_reconstruction_and_types(coeffs):
    f = RealLinearFunctional(tuple(complex(a, b) for a, b, _, _ in coeffs), tuple(complex(c, d) for _, _, c, d in coeffs))
    lin, anti = decompose_functional(f)
    rng = np.random.default_rng(len(coeffs))
    for _ in range(5):
        v = rng.normal(size=f.n) + 1j * rng.normal(size=f.n)
        assert abs(f(v) - (lin(v) + anti(v))) < 1e-14 * max(1, abs(f(v)))
        assert abs(lin(1j * v) - 1j * lin(v)) < 1e-13 * max(1, abs(lin(v)))
        assert abs(anti(1j * v) + 1j * anti(v)) < 1e-13 * max(1, abs(anti(v)))


def test_lemma_standard_case_by_hand():
    e = standard_lemma_form()
    # on C = R^2 with basis (1, i): E(i, 1) = 1 > 0, and H(x, y) = x conj(y)
    assert e[1, 0] == 1 and e[0, 1] == -1
    h = hermitian_form(e)
    assert abs(h[0, 0] - 1) < 1e-15
    res = verify_lemma_app(e, np.random.default_rng(0), 50)
    assert res["defect"] < 1e-14 and res["positive"]


def test_lemma_zero_vector():
    e = standard_lemma_form()
    res = verify_lemma_app(e, np.random.default_rng(0), 1)  # only z = 0
    assert res["defect"] == 0 and res["witness"] is None


def test_lemma_random_siegel_r2():
    rng = np.random.default_rng(5)
    gram = [[float(x) for x in row] for row in riemann_gram(2).gram]
    for _ in range(10):
        z = random_siegel_point(rng, 2)
        e = -real_form(period_basis(z, 1), gram)
        res = verify_lemma_app(e, rng, 50)
        assert res["defect"] < 1e-12 and res["positive"] and res["hermitian_defect"] < 1e-12


@pytest.mark.parametrize("name", BUILTIN)
def test_lemma_twisted_fixture(name):
    fx = load_fixture(name)
    rng = np.random.default_rng(9)
    lat = build_twisted_lattice(fx.order, fx.mu, TwistedPoint((0.2 + 1.4j,) * fx.g), multiplier=fx.lattice_multiplier)
    gram = [[float(x) for x in row] for row in twisted_gram(lat.elements, fx.mu)]
    res = verify_lemma_app(real_form(lat.basis, gram), rng, 50)
    assert res["defect"] < 1e-12 and res["positive"]


def test_ks_pairing_r1():
    b = ks_pairing_matrix(standard_point(1), 0, 0)
    assert b == [[(Fraction(-1), Fraction(0))]]


def _symbolic_pairing(point, i, k):
    """Oracle: differentiate symbolic period vectors with sympy and pair with E."""
    r = point.r
    zs = sympy.Matrix(r, r, lambda a, c: sympy.Symbol(f"z{min(a, c)}{max(a, c)}"))
    gram = sympy.Matrix(riemann_gram(r).gram)
    t = sympy.Symbol("t")
    dz = sympy.zeros(r, r)
    dz[i, k] = dz[k, i] = 1
    moved = zs + t * dz
    subs = {zs[a, c]: sympy.Rational(str(point.X[0][a][c])) + sympy.I * sympy.Rational(str(point.Y[0][a][c]))
            for a in range(r) for c in range(r)}
    out = sympy.zeros(r, r)
    for j in range(r):
        for l in range(r):
            pj = sympy.Matrix([moved[a, j] for a in range(r)] + [int(a == j) for a in range(r)])
            pl = sympy.Matrix([zs[a, l] for a in range(r)] + [int(a == l) for a in range(r)])
            dpj = pj.diff(t)
            out[j, l] = sympy.expand((dpj.T * gram * pl)[0, 0]).subs(subs)
    return out


def test_ks_pairing_r2_pattern_against_symbolic_oracle():
    point = random_rational_point(np.random.default_rng(3), 2)
    b = ks_pairing_matrix(point, 0, 1)
    assert [[c for c in row] for row in b] == [[(0, 0), (-1, 0)], [(-1, 0), (0, 0)]]
    ref = _symbolic_pairing(point, 0, 1)
    assert ref == sympy.Matrix([[0, -1], [-1, 0]])


@pytest.mark.parametrize("r", [1, 2, 3])
def test_ks_pairing_all_directions(r):
    rng = np.random.default_rng(40 + r)
    for _ in range(4):
        point = random_rational_point(rng, r)
        for i in range(r):
            for k in range(i, r):
                assert verify_ks_pairing(point, i, k) == []
                b = ks_pairing_matrix(point, i, k)
                ref = _symbolic_pairing(point, i, k)
                assert all(sympy.Rational(str(b[j][l][0])) + sympy.I * sympy.Rational(str(b[j][l][1])) == ref[j, l]
                           for j in range(r) for l in range(r))
                assert fd_period_defect(point, i, k) < 1e-8


def test_ks_pairing_needs_exact_point():
    with pytest.raises(KSError):
        ks_pairing_matrix(SiegelPoint.from_complex([[[1j]]]), 0, 0)


def test_random_rational_point_is_valid():
    rng = np.random.default_rng(0)
    for r in (1, 2, 3):
        p = random_rational_point(rng, r)
        assert p.exact and p.r == r


def _brute_offsets(cover):
    out = {}
    for t, u in enumerate(cover.boxes):
        for s, v in enumerate(cover.boxes):
            hits = [c for c in product(range(-2, 3), repeat=2)
                    if all(max(u[d][0] + c[d], v[d][0]) < min(u[d][1] + c[d], v[d][1]) for d in range(2))]
            assert len(hits) <= 1
            if hits:
                out[(t, s)] = hits[0]
    return out


def test_cech_offsets_against_brute_force():
    cover = CechCoverToy(3)
    assert cover.offsets == _brute_offsets(cover)
    assert len(cover.boxes) == 9


def test_cech_zero_and_riemann_functional():
    cover = CechCoverToy(3)
    zero = cech_cocycle_check(cover, (0, 0))
    assert zero["failures"] == [] and all(v == 0 for v in cocycle(cover, (0, 0)).values())
    alpha = riemann_functional((Fraction(1, 3), Fraction(2, 7)))
    res = cech_cocycle_check(cover, alpha, riemann_functional((Fraction(-1, 2), Fraction(5, 3))))
    assert res["triples"] > 0 and res["failures"] == [] and res["additive"]


def test_cech_complex_valued_alpha():
    cover = CechCoverToy(4)
    alpha = (complex(1, 2), complex(-3, 0.5))
    assert cech_cocycle_check(cover, alpha, (1j, 1))["failures"] == []


def test_cech_inadmissible_covers_rejected():
    with pytest.raises(KSError, match="inadmissible"):
        CechCoverToy(2)
    with pytest.raises(KSError, match="inject"):
        CechCoverToy(1)
    with pytest.raises(KSError):
        CechCoverToy(0)
