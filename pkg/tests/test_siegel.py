from fractions import Fraction
from math import pi

import mpmath
import numpy as np
import pytest

from ksverify.siegel import (
    SiegelError,
    SiegelPoint,
    SymplecticMatrix,
    act,
    covolume_crosscheck,
    faltings_norm_sq,
    period_basis,
    period_lattice,
    petersson_norm_siegel,
    random_siegel_point,
    riemann_axioms,
    riemann_form_exact_checks,
    riemann_form_siegel,
    riemann_gram,
    standard_point,
    symplectic_j,
    verify_siegel_main,
)
from ksverify.zlattice import covolume


def random_symplectic(rng, r):
    """Product of elementary symplectic generators: [[I,S],[0,I]], [[A,0],[0,A^-T]] and J."""
    m = np.eye(2 * r)
    for _ in range(3):
        s = rng.uniform(-1, 1, (r, r))
        s = s + s.T
        up = np.block([[np.eye(r), s], [np.zeros((r, r)), np.eye(r)]])
        a = np.eye(r) + 0.3 * rng.uniform(-1, 1, (r, r))
        diag = np.block([[a, np.zeros((r, r))], [np.zeros((r, r)), np.linalg.inv(a).T]])
        m = m @ up @ diag @ symplectic_j(r)
    return SymplecticMatrix(m)


def test_symplectic_validation():
    SymplecticMatrix(symplectic_j(2))
    with pytest.raises(SiegelError):
        SymplecticMatrix(2 * np.eye(2))


def test_point_validation():
    with pytest.raises(SiegelError, match="symmetric"):
        SiegelPoint(([[0, 1], [0, 0]],), ([[1, 0], [0, 1]],))
    with pytest.raises(SiegelError, match="positive definite"):
        SiegelPoint(([[0]],), ([[-1]],))
    assert standard_point(2).exact


def test_act_identity_and_fixed_point():
    rng = np.random.default_rng(1)
    z = random_siegel_point(rng, 2)
    w = act(SymplecticMatrix(np.eye(4)), z)
    assert np.abs(w.Z() - z.Z()).max() < 1e-14
    for r in (1, 2, 3):
        w = act(SymplecticMatrix(symplectic_j(r)), standard_point(r))
        assert np.abs(w.Z() - 1j * np.eye(r)).max() < 1e-14


def test_act_singular_denominator():
    # a point numerically on the boundary makes C Z + D singular
    gamma = SymplecticMatrix(symplectic_j(1))
    with pytest.raises(SiegelError):
        act(gamma, SiegelPoint.from_complex([[[1e-300j]]]))


@pytest.mark.parametrize("r", [1, 2, 3])
def test_act_is_group_action(r):
    rng = np.random.default_rng(10 + r)
    for _ in range(20):
        z = random_siegel_point(rng, r)
        g1, g2 = random_symplectic(rng, r), random_symplectic(rng, r)
        lhs = act(g1 @ g2, z).Z()
        rhs = act(g1, act(g2, z)).Z()
        assert np.abs(lhs - rhs).max() < 1e-10 * max(1, np.abs(lhs).max())


def test_riemann_form_examples():
    e1, zero = [1], [0]
    assert riemann_form_siegel(e1 + zero, zero + e1) == -1
    assert riemann_form_siegel([1, 2, 3, 4], [1, 2, 3, 4]) == 0
    g = riemann_gram(3)
    ex = riemann_form_exact_checks(3)
    assert ex == {"alternating": True, "integral": True, "det": 1}
    assert g.gram[0][3] == -1 and g.gram[3][0] == 1


@pytest.mark.parametrize("r,g", [(1, 1), (2, 1), (3, 1), (1, 2)])
def test_riemann_axioms_random(r, g):
    rng = np.random.default_rng(r * 10 + g)
    for _ in range(10):
        for res in riemann_axioms(random_siegel_point(rng, r, g), rng, 100):
            assert res["orientation"] == -1
            assert res["compat_defect"] < 1e-10
            assert res["min_margin"] > 0


def test_riemann_axioms_standard_point_is_standard_hermitian():
    res = riemann_axioms(standard_point(2), np.random.default_rng(0), 50)[0]
    assert res["compat_defect"] == 0
    assert abs(res["min_eigen_margin"] - 1) < 1e-15


def test_faltings_examples():
    assert abs(faltings_norm_sq(standard_point(1)) - 1 / pi) < 1e-15
    assert abs(faltings_norm_sq(standard_point(2)) - 1 / pi**2) < 1e-15


def test_petersson_examples_and_homogeneity():
    assert petersson_norm_siegel(standard_point(1)) == 2
    assert petersson_norm_siegel(standard_point(2)) == 8
    rng = np.random.default_rng(3)
    for r, g in ((2, 1), (1, 2), (3, 1)):
        z = random_siegel_point(rng, r, g)
        t = 1.7
        scaled = SiegelPoint(z.X, tuple(t * y for y in z.Y))
        ratio = petersson_norm_siegel(scaled) / petersson_norm_siegel(z)
        assert abs(ratio - t ** (g * r * (r + 1) / 2)) < 1e-12 * ratio


def _mp_covolume(point):
    """Oracle: 50-digit determinant of the block-diagonal period basis."""
    with mpmath.workdps(50):
        total = mpmath.mpf(1)
        for place in range(1, point.g + 1):
            b = period_basis(point, place)
            total *= abs(mpmath.det(mpmath.matrix(b.tolist())))
        return float(total)


@pytest.mark.parametrize("r,g", [(1, 1), (2, 1), (3, 1), (1, 2)])
def test_covolume_matches_det_y_and_mp_oracle(r, g):
    rng = np.random.default_rng(100 + r + g)
    for _ in range(25):
        z = random_siegel_point(rng, r, g)
        vol = covolume(period_lattice(z))
        assert abs(vol - _mp_covolume(z)) < 1e-12 * vol
        assert covolume_crosscheck(z) < 1e-10


def test_faltings_cross_check_detects_embedding_bug(monkeypatch):
    import ksverify.siegel as s

    monkeypatch.setattr(s, "covolume", lambda lat: 2 * covolume(lat))
    with pytest.raises(SiegelError, match="cross-check"):
        s.faltings_norm_sq(standard_point(1))


@pytest.mark.parametrize("r", [1, 2, 3])
def test_main_identity_standard_point(r):
    assert verify_siegel_main(standard_point(r)) < 1e-12


def test_main_identity_two_places():
    z = SiegelPoint.from_complex([[[1j]], [[2j]]])
    assert verify_siegel_main(z) < 1e-10
    exact = standard_point(1, 2, [1, 2])
    assert verify_siegel_main(exact) < 1e-12
    assert exact.det_Y() == [1.0, 2.0]


def test_main_identity_random_r2():
    rng = np.random.default_rng(2024)
    worst = max(verify_siegel_main(random_siegel_point(rng, 2)) for _ in range(100))
    assert worst < 1e-10


def test_rational_point_is_exact():
    z = SiegelPoint(([[Fraction(1, 3)]],), ([[Fraction(5, 4)]],))
    assert z.exact
    assert abs(faltings_norm_sq(z) - 1.25 / pi) < 1e-15
