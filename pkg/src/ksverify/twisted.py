"""Twisted Hilbert case: lattices ``O_B (tau, 1)^t`` in ``C^{2g}``.

A basis element ``beta`` of the order maps to ``sigma(beta) (tau_1, 1, ..., tau_g, 1)^t``
with ``sigma = (sigma_1, ..., sigma_g)`` the archimedean splittings.  ``C^{2g}`` is
realised as ``R^{4g}`` via ``v -> (Re v, Im v)``.  The Riemann form is
``E(beta, beta') = Tr_{F/Q} trd(mu^{-1} beta beta'^*)``.

Some orders need a right multiplier ``x`` (a fixture field) so that ``E`` is
unimodular on ``O_B x``; ``E`` on ``beta x`` is then ``Tr(nrd(x) trd(mu^{-1} beta beta'^*))``.
"""

from dataclasses import dataclass
from math import pi

import mpmath
import numpy as np

from . import _ratmat as rm
from .quatalg import check_mu, split, trace_pairing_form
from .siegel import form_axioms, real_form
from .zlattice import IntegerLattice, dual, index


class TwistedError(ValueError):
    pass


@dataclass(frozen=True)
class TwistedPoint:
    tau: tuple

    def __post_init__(self):
        t = tuple(complex(x) for x in self.tau)
        if not t:
            raise TwistedError("need at least one place")
        for i, x in enumerate(t, 1):
            if not x.imag > 0:
                raise TwistedError(f"Im(tau_{i}) = {x.imag} is not positive")
        object.__setattr__(self, "tau", t)

    @property
    def g(self):
        return len(self.tau)

    def im_product(self):
        return float(np.prod([t.imag for t in self.tau]))


def random_twisted_point(rng, g):
    re = rng.uniform(-1, 1, g)
    im = np.exp(rng.uniform(-1, 1, g))
    return TwistedPoint(tuple(complex(a, b) for a, b in zip(re, im)))


@dataclass(frozen=True)
class TwistedLattice:
    order: object
    point: TwistedPoint
    elements: tuple
    basis_mp: object
    lattice: IntegerLattice
    digits: int

    @property
    def basis(self):
        return self.lattice.basis

    def covolume(self):
        with mpmath.workdps(self.digits):
            return abs(mpmath.det(self.basis_mp))


def embed_element(beta, point, digits):
    """Real coordinates of ``sigma(beta)(tau_1, 1, ..., tau_g, 1)^t``."""
    g = point.g
    re, im = [], []
    with mpmath.workdps(digits + 10):
        for place in range(1, g + 1):
            m = split(beta, place, digits)
            t = mpmath.mpc(point.tau[place - 1].real, point.tau[place - 1].imag)
            for row in range(2):
                v = m[row, 0] * t + m[row, 1]
                re.append(v.real)
                im.append(v.imag)
    return re + im


def build_twisted_lattice(order, mu, point, digits=None, multiplier=None):
    alg = order.algebra
    f = alg.base
    digits = f._check_digits(digits)
    if point.g != f.degree:
        raise TwistedError(f"point has {point.g} places, field has degree {f.degree}")
    check_mu(mu)
    elements = order.basis_elements()
    if multiplier is not None:
        if multiplier.nrd().is_zero():
            raise TwistedError("lattice multiplier is not invertible")
        elements = [b * multiplier for b in elements]
    rows = [embed_element(b, point, digits) for b in elements]
    with mpmath.workdps(digits):
        mp = mpmath.matrix(rows)
        vol = abs(mpmath.det(mp))
        scale = mpmath.fprod(mpmath.norm(mpmath.matrix(r)) for r in rows)
        if vol <= scale * mpmath.mpf(10) ** (-min(digits, 30) // 2):
            raise TwistedError("embedded basis is numerically singular")
    basis = np.array([[float(x) for x in r] for r in rows])
    return TwistedLattice(order, point, tuple(elements), mp, IntegerLattice(basis), digits)


def riemann_form_twisted(beta, beta2, mu):
    """``Tr_{F/Q}(trd(mu^{-1} beta beta'^*))``, exact."""
    return (mu.inverse() * beta * beta2.conj()).trd().trace()


def twisted_gram(elements, mu):
    return [[riemann_form_twisted(u, v, mu) for v in elements] for u in elements]


def riemann_form_exact_checks(elements, mu):
    """Exact alternation, integrality and determinant of ``E`` on a basis."""
    gram = twisted_gram(elements, mu)
    n = len(gram)
    return {
        "alternating": all(gram[i][j] == -gram[j][i] for i in range(n) for j in range(n)),
        "integral": rm.is_integral(gram),
        "det": rm.det(gram),
    }


def riemann_axioms_twisted(lat, mu, rng, samples=100):
    """Compatibility and positivity of ``E`` extended to ``C^{2g}``.

    If ``-E`` is the positive form the sign of ``mu`` is flipped and the flip
    recorded; an indefinite ``E`` yields orientation 0.
    """
    gram = [[float(x) for x in row] for row in twisted_gram(lat.elements, mu)]
    e = real_form(lat.basis, gram)
    res = form_axioms(e, rng, samples)
    res["sign_flipped"] = res["orientation"] == -1
    res["mu"] = [str(c) for c in (-mu if res["sign_flipped"] else mu).qvector()]
    return res


def faltings_norm_sq_twisted(lat):
    with mpmath.workdps(lat.digits):
        return lat.covolume() / mpmath.pi ** (2 * lat.point.g)


def petersson_norm_twisted(point):
    return 2 ** point.g * point.im_product()


def _nm(d_b):
    return abs(d_b.norm())


def _mpq(x):
    return mpmath.mpf(x.numerator) / x.denominator


def verify_twisted_volume(lat, d_b):
    """Relative gap between ``covolume`` and ``|Nm(d_B)| prod Im(tau_i)^2``."""
    with mpmath.workdps(lat.digits):
        expected = _mpq(_nm(d_b))
        expected *= mpmath.fprod(mpmath.mpf(t.imag) ** 2 for t in lat.point.tau)
        return float(abs(lat.covolume() - expected) / expected)


def verify_twisted_main(lat, d_b):
    """Relative residual of ``||.||_Fal^2 = (|Nm d_B| / |2 pi i|^{2g}) ||.||_Pet^2``."""
    g = lat.point.g
    with mpmath.workdps(lat.digits):
        lhs = faltings_norm_sq_twisted(lat)
        nm = _nm(d_b)
        pet = mpmath.mpf(2) ** g * mpmath.fprod(mpmath.mpf(t.imag) for t in lat.point.tau)
        rhs = _mpq(nm) / (2 * mpmath.pi) ** (2 * g) * pet**2
        return float(abs(lhs - rhs) / rhs)


def verify_bare_order_volume(order, mu, point, d_b, digits=None):
    """``covolume(sigma(O)(tau, 1)^t)`` against ``d_F^2 |Nm d_B| prod Im(tau_i)^2``.

    Without a multiplier the lattice is the order itself; its covolume carries
    the field discriminant factor ``d_F^2``.
    """
    lat = build_twisted_lattice(order, mu, point, digits)
    d_f = order.algebra.base.discriminant
    with mpmath.workdps(lat.digits):
        expected = _mpq(d_f) ** 2 * _mpq(_nm(d_b))
        expected *= mpmath.fprod(mpmath.mpf(t.imag) ** 2 for t in point.tau)
        vol = lat.covolume()
        return float(vol), float(abs(vol - expected) / expected)


def dual_index(order):
    """``[O^# : O]`` for the trace pairing ``Tr trd(x y^*)``, via Smith normal form."""
    form = trace_pairing_form(order.algebra, symmetry="symmetric")
    return index(order.lattice, dual(order.lattice, form))


def hodge_constant(d_b, g):
    """``|Nm(d_B)| / |2 pi i|^{2g}``: the absolute value of the twisted constant."""
    return float(_nm(d_b)) / (2 * pi) ** (2 * g)
