from math import pi

import numpy as np
import pytest
import sympy

from ksverify.fixtures import BUILTIN, load_fixture
from ksverify.quatalg import QuaternionError
from ksverify.twisted import (
    TwistedError,
    TwistedPoint,
    build_twisted_lattice,
    dual_index,
    faltings_norm_sq_twisted,
    hodge_constant,
    petersson_norm_twisted,
    random_twisted_point,
    riemann_axioms_twisted,
    riemann_form_exact_checks,
    riemann_form_twisted,
    verify_bare_order_volume,
    verify_twisted_main,
    verify_twisted_volume,
)

FIXTURES = {name: load_fixture(name) for name in BUILTIN}


def lattice(name, tau):
    fx = FIXTURES[name]
    return build_twisted_lattice(fx.order, fx.mu, TwistedPoint(tau), multiplier=fx.lattice_multiplier)


def sympy_covolume(order_rows, gen_i, gen_j, tau):
    """Oracle: exact 4x4 determinant of the realified vectors beta (tau, 1)^t.

    ``gen_i``/``gen_j`` are any sympy 2x2 matrices satisfying the algebra relations.
    """
    one = sympy.eye(2)
    basis = [one, gen_i, gen_j, gen_i * gen_j]
    vec = sympy.Matrix([tau, 1])
    rows = []
    for coeffs in order_rows:
        m = sum((sympy.Rational(str(c)) * b for c, b in zip(coeffs, basis)), sympy.zeros(2, 2))
        v = m * vec
        rows.append([sympy.re(v[0]), sympy.re(v[1]), sympy.im(v[0]), sympy.im(v[1])])
    return sympy.nsimplify(sympy.simplify(abs(sympy.Matrix(rows).det())))


DIVISION_ROWS = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], ["1/2", "1/2", "1/2", "1/2"]]


@pytest.mark.parametrize("tau,expected", [(sympy.I, 6), (sympy.Rational(1, 2) + 2 * sympy.I, 24)])
def test_division_covolume_against_sympy_oracle(tau, expected):
    i = sympy.Matrix([[0, -1], [1, 0]])
    j = sympy.Matrix([[sympy.sqrt(3), 0], [0, -sympy.sqrt(3)]])
    assert i * i == -sympy.eye(2) and j * j == 3 * sympy.eye(2) and i * j == -j * i
    assert sympy_covolume(DIVISION_ROWS, i, j, tau) == expected
    lat = lattice("division_q6", (complex(tau),))
    assert abs(float(lat.covolume()) - expected) < 1e-12 * expected


def test_split_q_covolume_against_sympy_oracle():
    i = sympy.Matrix([[1, 0], [0, -1]])
    j = sympy.Matrix([[0, 1], [1, 0]])
    rows = [[str(x) for x in r] for r in FIXTURES["split_q"].order.lattice.basis]
    assert sympy_covolume(rows, i, j, sympy.I) == 1
    assert abs(float(lattice("split_q", (1j,)).covolume()) - 1) < 1e-30


@pytest.mark.parametrize("name", BUILTIN)
def test_covolume_scales_by_t_to_the_2g(name):
    g = FIXTURES[name].g
    base = lattice(name, (1.3j,) * g).covolume()
    scaled = lattice(name, (2.6j,) * g).covolume()
    assert abs(float(scaled / base) - 2 ** (2 * g)) < 1e-12


@pytest.mark.parametrize("name", BUILTIN)
def test_volume_and_main_identity_on_random_points(name):
    fx = FIXTURES[name]
    rng = np.random.default_rng(7)
    for _ in range(50):
        lat = lattice(name, random_twisted_point(rng, fx.g).tau)
        assert verify_twisted_volume(lat, fx.d_B) < 1e-10
        assert verify_twisted_main(lat, fx.d_B) < 1e-10


def test_main_identity_closed_form_at_i():
    lat = lattice("split_q", (1j,))
    assert abs(float(faltings_norm_sq_twisted(lat)) - 1 / pi**2) < 1e-15
    assert petersson_norm_twisted(TwistedPoint((1j,))) == 2
    assert abs(hodge_constant(FIXTURES["split_q"].d_B, 1) * 4 - 1 / pi**2) < 1e-15
    assert verify_twisted_main(lat, FIXTURES["split_q"].d_B) < 1e-12


@pytest.mark.parametrize("name", BUILTIN)
def test_riemann_form_exact(name):
    fx = FIXTURES[name]
    lat = lattice(name, (1j,) * fx.g)
    ex = riemann_form_exact_checks(list(lat.elements), fx.mu)
    assert ex["alternating"] and ex["integral"] and abs(ex["det"]) == 1
    rng = np.random.default_rng(0)
    for _ in range(20):
        coeffs = rng.integers(-5, 6, 4 * fx.g)
        beta = fx.algebra.from_qvector([int(c) for c in coeffs])
        assert riemann_form_twisted(beta, beta, fx.mu) == 0


@pytest.mark.parametrize("name", BUILTIN)
def test_riemann_axioms_positive(name):
    fx = FIXTURES[name]
    rng = np.random.default_rng(1)
    for _ in range(10):
        lat = lattice(name, random_twisted_point(rng, fx.g).tau)
        res = riemann_axioms_twisted(lat, fx.mu, rng, 100)
        assert res["orientation"] == 1 and not res["sign_flipped"]
        assert res["compat_defect"] < 1e-10
        assert res["min_margin"] > 0


def test_sign_flip_by_negating_mu():
    fx = FIXTURES["division_q6"]
    lat = lattice("division_q6", (0.3 + 1.1j,))
    res = riemann_axioms_twisted(lat, -fx.mu, np.random.default_rng(2), 50)
    assert res["orientation"] == -1 and res["sign_flipped"]
    assert res["mu"] == [str(c) for c in fx.mu.qvector()]
    assert res["min_margin"] > 0


def test_dual_index_division_fixture():
    assert dual_index(FIXTURES["division_q6"].order) == 36
    assert dual_index(FIXTURES["split_q"].order) == 1


def test_bare_order_volume_real_quadratic():
    fx = FIXTURES["split_qsqrt2"]
    vol, res = verify_bare_order_volume(fx.order, fx.mu, TwistedPoint((1j, 1j)), fx.d_B)
    assert abs(vol - 64) < 1e-12 and res < 1e-12


def test_errors():
    with pytest.raises(TwistedError):
        TwistedPoint((1 - 1j,))
    fx = FIXTURES["split_qsqrt2"]
    with pytest.raises(TwistedError, match="places"):
        build_twisted_lattice(fx.order, fx.mu, TwistedPoint((1j,)))
    with pytest.raises(QuaternionError):
        build_twisted_lattice(fx.order, fx.algebra(1), TwistedPoint((1j, 1j)))
    fq = FIXTURES["split_q"]
    with pytest.raises(TwistedError, match="multiplier"):
        build_twisted_lattice(fq.order, fq.mu, TwistedPoint((1j,)), multiplier=fq.algebra(0))
