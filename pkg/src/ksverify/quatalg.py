"""Quaternion algebras ``(a, b / F)`` over a totally real field.

Elements are ``x + y i + z j + w ij`` with ``i^2 = a``, ``j^2 = b`` and
``ij = -ji``.  A Z-basis of an order lives in ``Q^{4g}``: the four quaternion
coordinates, each written in the integral-basis coordinates of ``F``.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import mpmath
import sympy

from . import _ratmat as rm
from .exactnum import FractionalIdeal, codifferent, embed
from .zlattice import IntegerLattice, PairingForm


class QuaternionError(ValueError):
    pass


class QuaternionAlgebra:
    def __init__(self, base, a, b, name=None):
        self.base = base
        self.a = base(a)
        self.b = base(b)
        if self.a.is_zero() or self.b.is_zero():
            raise QuaternionError("structure constants a and b must be nonzero")
        self.name = name

    def __repr__(self):
        return f"QuaternionAlgebra(a={self.a}, b={self.b}, name={self.name!r})"

    def __call__(self, *coords):
        if len(coords) == 1 and isinstance(coords[0], QuatElement):
            return coords[0]
        if len(coords) == 1:
            coords = (coords[0], 0, 0, 0)
        return QuatElement(self, tuple(self.base(c) for c in coords))

    def gens(self):
        return self(0, 1, 0, 0), self(0, 0, 1, 0), self(0, 0, 0, 1)

    @property
    def dim_q(self):
        return 4 * self.base.degree

    def from_qvector(self, v):
        g = self.base.degree
        v = [rm.frac(c) for c in v]
        return QuatElement(self, tuple(self.base.element(v[q * g:(q + 1) * g]) for q in range(4)))

    def standard_basis(self):
        """Basis of ``B`` over Q matching the ``Q^{4g}`` coordinates."""
        n = self.dim_q
        return [self.from_qvector([int(i == k) for i in range(n)]) for k in range(n)]

    def split_places(self, digits=None):
        """Places where ``B (x) R`` is ``M_2(R)``."""
        return [
            i
            for i in range(1, self.base.degree + 1)
            if embed(self.a, i, digits) > 0 or embed(self.b, i, digits) > 0
        ]

    def is_totally_indefinite(self):
        return len(self.split_places()) == self.base.degree


@dataclass(frozen=True)
class QuatElement:
    algebra: QuaternionAlgebra
    coords: tuple

    def _coerce(self, other):
        if isinstance(other, QuatElement):
            return other
        return self.algebra(other)

    def __add__(self, other):
        o = self._coerce(other)
        return QuatElement(self.algebra, tuple(p + q for p, q in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return QuatElement(self.algebra, tuple(-p for p in self.coords))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        a, b = self.algebra.a, self.algebra.b
        x1, y1, z1, w1 = self.coords
        x2, y2, z2, w2 = o.coords
        ab = a * b
        return QuatElement(
            self.algebra,
            (
                x1 * x2 + a * y1 * y2 + b * z1 * z2 - ab * w1 * w2,
                x1 * y2 + y1 * x2 - b * z1 * w2 + b * w1 * z2,
                x1 * z2 + z1 * x2 + a * y1 * w2 - a * w1 * y2,
                x1 * w2 + w1 * x2 + y1 * z2 - z1 * y2,
            ),
        )

    def __rmul__(self, other):
        return self._coerce(other) * self

    def conj(self):
        x, y, z, w = self.coords
        return QuatElement(self.algebra, (x, -y, -z, -w))

    def trd(self):
        return 2 * self.coords[0]

    def nrd(self):
        a, b = self.algebra.a, self.algebra.b
        x, y, z, w = self.coords
        return x * x - a * y * y - b * z * z + a * b * w * w

    def inverse(self):
        n = self.nrd()
        if n.is_zero():
            raise ZeroDivisionError("element has reduced norm zero")
        return self.conj() * n.inverse()

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __eq__(self, other):
        if not isinstance(other, QuatElement):
            try:
                other = self.algebra(other)
            except (ValueError, TypeError):
                return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def is_scalar(self):
        return all(c.is_zero() for c in self.coords[1:])

    def is_pure(self):
        return self.coords[0].is_zero()

    def scalar_part(self):
        return self.coords[0]

    def qvector(self):
        return [c for p in self.coords for c in p.coords]

    def __repr__(self):
        return "QuatElement(" + ", ".join(str([str(c) for c in p.coords]) for p in self.coords) + ")"


def conj_trd_nrd(beta):
    return beta.conj(), beta.trd(), beta.nrd()


def split(beta, place, digits=None):
    """``sigma_place(beta)`` in ``M_2(R)`` as a 2x2 ``mpmath.matrix``.

    With ``s = sqrt(sigma(a))``: ``i -> [[s, 0], [0, -s]]``, ``j -> [[0, b], [1, 0]]``.
    When ``sigma(a) <= 0 < sigma(b)`` the roles of ``i`` and ``j`` are swapped.
    """
    alg = beta.algebra
    f = alg.base
    digits = f._check_digits(digits)
    sa = embed(alg.a, place, digits)
    sb = embed(alg.b, place, digits)
    x, y, z, w = (embed(c, place, digits) for c in beta.coords)
    with mpmath.workdps(digits + 10):
        if sa > 0:
            r = mpmath.sqrt(sa)
            return mpmath.matrix([[x + y * r, z * sb + w * r * sb], [z - w * r, x - y * r]])
        if sb > 0:
            r = mpmath.sqrt(sb)
            return mpmath.matrix([[x + z * r, y * sa - w * sa * r], [y + w * r, x - z * r]])
    raise QuaternionError(f"algebra not split at place {place}")


def split_numpy(beta, place, digits=None):
    import numpy as np

    m = split(beta, place, digits)
    return np.array([[float(m[0, 0]), float(m[0, 1])], [float(m[1, 0]), float(m[1, 1])]])


def check_mu(mu):
    """Validate the polarization element: invertible, ``mu^2`` central and totally negative."""
    if mu.nrd().is_zero():
        raise QuaternionError("mu is not invertible")
    sq = mu * mu
    if not sq.is_scalar():
        raise QuaternionError("mu^2 is not in F")
    m2 = sq.scalar_part()
    bad = [i for i, v in enumerate(m2.embeddings(), 1) if v >= 0]
    if bad:
        raise QuaternionError(f"mu^2 is not totally negative (sigma_{bad[0]}(mu^2) >= 0)")
    return m2


def mu_involution(beta, mu):
    """The positive involution ``beta -> mu^{-1} beta^* mu``."""
    check_mu(mu)
    return mu.inverse() * beta.conj() * mu


class QuatOrder:
    """An order given by a Z-basis of ``4g`` vectors in ``Q^{4g}``."""

    def __init__(self, algebra, zbasis, name=None):
        self.algebra = algebra
        self.name = name
        rows = [[rm.frac(c) for c in r] for r in zbasis]
        n = algebra.dim_q
        if len(rows) != n or any(len(r) != n for r in rows):
            raise QuaternionError(f"order basis must consist of {n} vectors of length {n}")
        self.lattice = IntegerLattice(rows)
        if not self.contains(algebra(1)):
            raise QuaternionError("order does not contain 1")
        els = self.basis_elements()
        for u in els:
            for v in els:
                if not self.contains(u * v):
                    raise QuaternionError(f"order basis is not closed under multiplication: {u} * {v}")

    def basis_elements(self):
        return [self.algebra.from_qvector(r) for r in self.lattice.basis]

    def contains(self, beta):
        return beta.qvector() in self.lattice

    def __contains__(self, beta):
        return self.contains(beta)

    def with_basis(self, rows):
        return QuatOrder(self.algebra, rows, self.name)


def trace_gram(elements, twist=None):
    """``Tr_{F/Q}(trd(t u v^*))`` on a list of elements (``t = 1`` by default)."""
    out = []
    for u in elements:
        tu = u if twist is None else twist * u
        out.append([(tu * v.conj()).trd().trace() for v in elements])
    return out


def trace_pairing_form(algebra, twist=None, symmetry="general"):
    """The pairing ``(u, v) -> Tr trd(t u v^*)`` on ``Q^{4g}`` coordinates."""
    return PairingForm(trace_gram(algebra.standard_basis(), twist), symmetry)


def reduced_discriminant(order):
    """``Nm_{F/Q}(d_B)`` of an order, as a positive integer.

    Uses ``|det Tr(trd(b_i b_j))| = d_F^4 * Nm(d(O))^2`` for a Z-basis ``b``.
    """
    els = order.basis_elements()
    gram = [[(u * v).trd().trace() for v in els] for u in els]
    d = abs(rm.det(gram))
    d_f = order.algebra.base.discriminant
    sq = d / d_f**4
    if sq.denominator != 1 or isqrt(sq.numerator) ** 2 != sq.numerator:
        raise QuaternionError(
            f"order data inconsistent: |det trace Gram| / d_F^4 = {sq} is not a perfect square"
        )
    return isqrt(sq.numerator)


def scaled_unimodular_lattice(order, a_pure):
    """Rescale the order so that ``Tr trd(a u v^*)`` becomes unimodular.

    With ``l`` the O_F-ideal generated by ``trd(a u v^*)`` over basis pairs,
    returns ``(L, psi, l)`` with ``L = l^{-1} D^{-1} O`` (``D^{-1}`` the
    codifferent) and ``psi`` the pairing on ``Q^{4g}`` coordinates.
    """
    alg = order.algebra
    f = alg.base
    a_pure = alg(a_pure)
    if not a_pure.is_pure() or a_pure.is_scalar():
        raise QuaternionError("a_pure must be a nonzero pure quaternion (trd = 0)")
    els = order.basis_elements()
    values = [(a_pure * u * v.conj()).trd() for u in els for v in els]
    ell = FractionalIdeal.generated_by(f, [v for v in values if not v.is_zero()])
    scale = ell.inverse() * codifferent(f)
    gens = [(u * c).qvector() for c in scale.elements() for u in els]
    lat = IntegerLattice.from_generators(gens)
    psi = trace_pairing_form(alg, a_pure, "alternating")
    return lat, psi, ell


# ---------------------------------------------------------------------------
# Hilbert symbols over Q: an independent route to the discriminant


def _split_p(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


def _squarefree_integer(x):
    x = Fraction(x)
    return x.numerator * x.denominator


def hilbert_symbol(a, b, p):
    """``(a, b)_p`` for nonzero rationals ``a``, ``b`` and a prime ``p`` (or ``-1`` for R)."""
    a, b = _squarefree_integer(a), _squarefree_integer(b)
    if p == -1:
        return -1 if a < 0 and b < 0 else 1
    al, u = _split_p(a, p)
    be, v = _split_p(b, p)
    if p == 2:
        eps = lambda t: ((t - 1) // 2) % 2
        omega = lambda t: ((t * t - 1) // 8) % 2
        e = eps(u) * eps(v) + al * omega(v) + be * omega(u)
        return -1 if e % 2 else 1
    leg = lambda t: sympy.legendre_symbol(t % p, p)
    e = (al * be * ((p - 1) // 2)) % 2
    s = (-1) ** e * leg(u) ** be * leg(v) ** al
    return int(s)


def ramified_primes(a, b):
    """Finite primes where ``(a, b / Q)`` ramifies."""
    a, b = _squarefree_integer(a), _squarefree_integer(b)
    candidates = {2} | set(sympy.primefactors(abs(a))) | set(sympy.primefactors(abs(b)))
    return sorted(p for p in candidates if hilbert_symbol(a, b, p) == -1)


def rational_discriminant(a, b):
    out = 1
    for p in ramified_primes(a, b):
        out *= p
    return out
