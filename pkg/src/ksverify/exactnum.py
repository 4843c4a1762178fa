"""Exact arithmetic in a totally real number field.

A field is given by a monic integer minimal polynomial together with a
Z-basis of its ring of integers (rows of ``integral_basis`` are power-basis
coordinates).  Elements carry rational coordinates with respect to that
integral basis.  Real embeddings are the real roots of the minimal
polynomial sorted ascending, isolated exactly with a Sturm sequence and then
refined with ``mpmath`` to the requested number of digits.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import mpmath

from . import _ratmat as rm
from .zlattice import IntegerLattice, PairingForm, covolume, dual

DEFAULT_DIGITS = 40


class FieldError(ValueError):
    pass


class PrecisionError(FieldError):
    pass


# ---------------------------------------------------------------------------
# polynomials with Fraction coefficients, lowest degree first


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _polyrem(a, b):
    a = _trim(a)
    b = _trim(b)
    while len(a) >= len(b):
        q = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] -= q * c
        a = _trim(a)
    return a


def _polyval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _sturm_chain(p):
    p = [Fraction(c) for c in p]
    dp = [i * c for i, c in enumerate(p)][1:]
    chain = [p, dp]
    while True:
        r = _polyrem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _sign_changes(chain, x):
    signs = [s for s in (_polyval(q, x) for q in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def isolate_real_roots(poly):
    """Disjoint rational intervals ``(lo, hi]``, one per real root, ascending."""
    chain = _sturm_chain(poly)
    bound = 1 + max(abs(Fraction(c) / poly[-1]) for c in poly[:-1])
    out = []

    def split(lo, hi, count):
        if count == 0:
            return
        if count == 1:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        left = _sign_changes(chain, lo) - _sign_changes(chain, mid)
        split(lo, mid, left)
        split(mid, hi, count - left)

    lo, hi = -bound, bound
    split(lo, hi, _sign_changes(chain, lo) - _sign_changes(chain, hi))
    return out


# ---------------------------------------------------------------------------


class TotallyRealField:
    """``F = Q[x]/(min_poly)`` with a fixed integral basis and ordered places."""

    def __init__(self, min_poly, integral_basis=None, digits=DEFAULT_DIGITS, name=None):
        poly = [int(c) for c in min_poly]
        if poly[-1] != 1:
            raise FieldError("minimal polynomial must be monic (coefficients lowest degree first)")
        self.min_poly = tuple(poly)
        self.degree = g = len(poly) - 1
        if integral_basis is None:
            integral_basis = rm.identity(g)
        ib = rm.to_frac_matrix(integral_basis)
        if len(ib) != g or any(len(r) != g for r in ib):
            raise FieldError(f"integral basis must be {g}x{g}")
        if rm.det(ib) == 0:
            raise FieldError("integral basis matrix is singular")
        self.integral_basis = tuple(tuple(r) for r in ib)
        self._ib_inv = rm.inverse(ib)
        self.digits = int(digits)
        self.name = name
        self._intervals = isolate_real_roots(poly)
        if len(self._intervals) != g:
            raise FieldError(f"minimal polynomial has {len(self._intervals)} real roots, expected {g}")
        self._mult = self._structure_constants()
        self._roots = {}

    @classmethod
    def rationals(cls, digits=DEFAULT_DIGITS):
        return cls([0, 1], [[1]], digits=digits, name="Q")

    def __repr__(self):
        return f"TotallyRealField({list(self.min_poly)}, name={self.name!r})"

    def __eq__(self, other):
        return (
            isinstance(other, TotallyRealField)
            and self.min_poly == other.min_poly
            and self.integral_basis == other.integral_basis
        )

    def __hash__(self):
        return hash((self.min_poly, self.integral_basis))

    # -- coordinates ---------------------------------------------------------

    def _reduce(self, p):
        return (_polyrem(p, [Fraction(c) for c in self.min_poly]) + [Fraction(0)] * self.degree)[: self.degree]

    def _to_power(self, coords):
        return rm.vecmat(list(coords), [list(r) for r in self.integral_basis])

    def _from_power(self, pb):
        return rm.vecmat(list(pb), self._ib_inv)

    def _structure_constants(self):
        g = self.degree
        ib = self.integral_basis
        table = [[None] * g for _ in range(g)]
        for k in range(g):
            for l in range(g):
                prod = [Fraction(0)] * (2 * g - 1)
                for i in range(g):
                    for j in range(g):
                        prod[i + j] += ib[k][i] * ib[l][j]
                table[k][l] = self._from_power(self._reduce(prod))
        return table

    # -- constructors ----------------------------------------------------------

    def element(self, coords):
        return FieldElement(self, tuple(rm.frac(c) for c in coords))

    def from_power_basis(self, pb):
        pb = [rm.frac(c) for c in pb] + [Fraction(0)] * self.degree
        return self.element(self._from_power(pb[: self.degree]))

    def __call__(self, x):
        if isinstance(x, FieldElement):
            if x.field != self:
                raise FieldError("element belongs to a different field")
            return x
        if isinstance(x, (list, tuple)):
            return self.element(x)
        return self.from_power_basis([x])

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def gen(self):
        """The root ``theta`` of the minimal polynomial."""
        return self.from_power_basis([0, 1])

    def integral_basis_elements(self):
        g = self.degree
        return [self.element([int(i == k) for i in range(g)]) for k in range(g)]

    # -- embeddings ------------------------------------------------------------

    def root(self, place, digits=None):
        digits = self._check_digits(digits)
        key = (place, digits)
        if key not in self._roots:
            lo, hi = self._intervals[place - 1]
            with mpmath.workdps(digits + 10):
                f = lambda t: _polyval(self.min_poly, t)
                a, b = mpmath.mpf(lo.numerator) / lo.denominator, mpmath.mpf(hi.numerator) / hi.denominator
                fa = f(a)
                if f(b) == 0:
                    self._roots[key] = b
                else:
                    eps = mpmath.mpf(10) ** (-(digits + 5))
                    while b - a > eps:
                        m = (a + b) / 2
                        fm = f(m)
                        if fm == 0:
                            a = b = m
                            break
                        if (fm > 0) == (fa > 0):
                            a, fa = m, fm
                        else:
                            b = m
                    self._roots[key] = (a + b) / 2
        return self._roots[key]

    def _check_digits(self, digits):
        if digits is None:
            return self.digits
        if digits > self.digits:
            raise PrecisionError(f"requested {digits} digits, field is configured for at most {self.digits}")
        return int(digits)

    # -- lattices attached to F ------------------------------------------------

    @cached_property
    def trace_form(self):
        """Trace pairing ``Tr(xy)`` on integral-basis coordinates."""
        basis = self.integral_basis_elements()
        return PairingForm([[(u * v).trace() for v in basis] for u in basis], "symmetric")

    @cached_property
    def ring_of_integers(self):
        return FractionalIdeal(self, rm.identity(self.degree))

    @cached_property
    def discriminant(self):
        return abs(rm.det([list(r) for r in self.trace_form.gram]))


@dataclass(frozen=True)
class FieldElement:
    field: TotallyRealField
    coords: tuple

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other
        return self.field(other)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        g = self.field.degree
        table = self.field._mult
        out = [Fraction(0)] * g
        for k, a in enumerate(self.coords):
            if not a:
                continue
            for l, b in enumerate(o.coords):
                if b:
                    ab = a * b
                    for m, c in enumerate(table[k][l]):
                        out[m] += ab * c
        return FieldElement(self.field, tuple(out))

    __rmul__ = __mul__

    def mult_matrix(self):
        """Row ``l`` holds the coordinates of ``self * omega_l``."""
        return [list((self * w).coords) for w in self.field.integral_basis_elements()]

    def trace(self):
        m = self.mult_matrix()
        return sum((m[i][i] for i in range(len(m))), Fraction(0))

    def norm(self):
        return rm.det(self.mult_matrix())

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        # x * y = 1  <=>  coords(y) @ mult_matrix(x) = coords(1)
        target = self.field.one().coords
        return FieldElement(self.field, tuple(rm.solve_left(list(target), self.mult_matrix())))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (FieldError, TypeError, ValueError):
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        return hash(self.coords)

    def is_zero(self):
        return not any(self.coords)

    def is_rational(self):
        pb = self.power_coords()
        return not any(pb[1:])

    def is_integral(self):
        return all(c.denominator == 1 for c in self.coords)

    def power_coords(self):
        return self.field._to_power(self.coords)

    def embed(self, place, digits=None):
        return embed(self, place, digits)

    def embeddings(self, digits=None):
        return [embed(self, i, digits) for i in range(1, self.field.degree + 1)]

    def __repr__(self):
        return f"FieldElement({[str(c) for c in self.coords]})"


def embed(x, place, digits=None):
    """``sigma_place(x)`` as an ``mpmath.mpf`` accurate to ``digits`` digits."""
    f = x.field
    if not 1 <= place <= f.degree:
        raise FieldError(f"place must be in 1..{f.degree}, got {place}")
    digits = f._check_digits(digits)
    theta = f.root(place, digits)
    with mpmath.workdps(digits + 10):
        val = mpmath.mpf(0)
        for c in reversed(x.power_coords()):
            val = val * theta + mpmath.mpf(c.numerator) / c.denominator
    return val


def trace_norm(x):
    return x.trace(), x.norm()


# ---------------------------------------------------------------------------


class FractionalIdeal:
    """A full-rank O_F-stable lattice in F, stored by its HNF Z-basis."""

    def __init__(self, field, zbasis):
        self.field = field
        g = field.degree
        rows = [[rm.frac(c) for c in r] for r in zbasis]
        if not rows or rm.rank(rows) < g:
            raise FieldError("ideal generators do not span a full-rank lattice (zero ideal?)")
        self.lattice = IntegerLattice.from_generators(rows)
        for w in field.integral_basis_elements():
            for b in self.lattice.basis:
                v = (field.element(b) * w).coords
                if v not in self.lattice:
                    raise FieldError("Z-span is not stable under multiplication by O_F")

    @classmethod
    def generated_by(cls, field, elements):
        """The O_F-ideal generated by a list of field elements."""
        els = [field(e) for e in elements]
        rows = [list((e * w).coords) for e in els for w in field.integral_basis_elements()]
        return cls(field, rows)

    @property
    def zbasis(self):
        return self.lattice.hnf()

    def elements(self):
        return [self.field.element(r) for r in self.zbasis]

    def __eq__(self, other):
        return isinstance(other, FractionalIdeal) and self.field == other.field and self.zbasis == other.zbasis

    def __hash__(self):
        return hash(self.zbasis)

    def __mul__(self, other):
        if isinstance(other, FieldElement) or not isinstance(other, FractionalIdeal):
            x = self.field(other)
            return FractionalIdeal(self.field, [list((e * x).coords) for e in self.elements()])
        rows = [list((a * b).coords) for a in self.elements() for b in other.elements()]
        return FractionalIdeal(self.field, rows)

    __rmul__ = __mul__

    def inverse(self):
        # I^{-1} = {x : x I in O_F} is the trace dual of I * codifferent
        return FractionalIdeal(self.field, dual((self * codifferent(self.field)).lattice, self.field.trace_form).basis)

    def __truediv__(self, other):
        return self * other.inverse()

    def norm(self):
        """Absolute norm ``[O_F : I]`` (a positive rational)."""
        return covolume(self.lattice)

    def contains(self, x):
        return self.field(x).coords in self.lattice

    def __contains__(self, x):
        return self.contains(x)

    def __repr__(self):
        return f"FractionalIdeal({[[str(c) for c in r] for r in self.zbasis]})"


def codifferent(field):
    """Dual of O_F under the trace pairing."""
    lat = dual(field.ring_of_integers.lattice, field.trace_form)
    return FractionalIdeal(field, lat.basis)


def ideal_ops(i, j):
    """Product, inverse of the first argument and equality of two ideals."""
    return {"product": i * j, "inverse": i.inverse(), "equal": i == j}
