"""Full-rank Z-lattices with a bilinear pairing.

Bases are stored row-wise.  A lattice whose basis is made of ``Fraction``
entries is *exact*: covolume, dual and index are computed without rounding
and equality is equality of Hermite normal forms.  A lattice built from a
float ``numpy`` array is *real*; it carries a precision tag and only supports
the numerical operations (covolume, dual).

Hermite normal form convention: lower triangular, positive pivots, and every
entry below a pivot reduced into ``[0, pivot)``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

import numpy as np

from . import _ratmat as rm


class LatticeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer normal forms


def hnf_with_transform(a):
    """Row Hermite normal form of an integer matrix.

    Returns ``(H, U)`` where ``U`` is unimodular (``len(a)`` square) and
    ``U @ a`` equals ``H`` stacked on top of zero rows.  ``H`` has one row per
    pivot, ordered by pivot column; a row's pivot is its last nonzero entry.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    rows = [[int(x) for x in row] for row in a]
    trans = [[int(i == j) for j in range(m)] for i in range(m)]
    active = list(range(m))
    pivots = []  # (column, row index)

    def sub(i, k, q):
        if q:
            rows[i] = [x - q * y for x, y in zip(rows[i], rows[k])]
            trans[i] = [x - q * y for x, y in zip(trans[i], trans[k])]

    for c in range(n - 1, -1, -1):
        while True:
            nz = [i for i in active if rows[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(rows[i][c]))
            for i in nz:
                if i != p:
                    sub(i, p, rows[i][c] // rows[p][c])
            if all(rows[i][c] == 0 for i in active if i != p):
                if rows[p][c] < 0:
                    rows[p] = [-x for x in rows[p]]
                    trans[p] = [-x for x in trans[p]]
                active.remove(p)
                pivots.append((c, p))
                break
    pivots.sort()
    pivot_col = {i: c for c, i in pivots}
    order = [i for _, i in pivots]
    for pos, i in enumerate(order):
        for k in reversed(order[:pos]):
            ck = pivot_col[k]
            sub(i, k, rows[i][ck] // rows[k][ck])
    h = [rows[i] for i in order]
    u = [trans[i] for i in order] + [trans[i] for i in active]
    return h, u


def hnf(a):
    return hnf_with_transform(a)[0]


def snf_with_transform(a):
    """Smith normal form ``D = U @ a @ V`` with unimodular ``U`` and ``V``.

    ``D`` is diagonal (rectangular allowed) with nonnegative entries and each
    diagonal entry divides the next.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [[int(x) for x in row] for row in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(i, k, q):  # row_i -= q * row_k
        d[i] = [x - q * y for x, y in zip(d[i], d[k])]
        u[i] = [x - q * y for x, y in zip(u[i], u[k])]

    def col_op(j, k, q):  # col_j -= q * col_k
        for r in d:
            r[j] -= q * r[k]
        for r in v:
            r[j] -= q * r[k]

    def swap_rows(i, k):
        d[i], d[k] = d[k], d[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for r in d:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
            if not entries:
                return d, u, v
            _, i0, j0 = min(entries)
            swap_rows(t, i0)
            swap_cols(t, j0)
            p = d[t][t]
            done = True
            for i in range(t + 1, m):
                if d[i][t]:
                    row_op(i, t, d[i][t] // p)
                    done = done and d[i][t] == 0
            for j in range(t + 1, n):
                if d[t][j]:
                    col_op(j, t, d[t][j] // p)
                    done = done and d[t][j] == 0
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % p),
                None,
            )
            if bad is None:
                break
            row_op(t, bad, -1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return d, u, v


def smith_diagonal(a):
    d = snf_with_transform(a)[0]
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def hnf_snf(m):
    """Both normal forms of an integer matrix, with their transforms."""
    h, hu = hnf_with_transform(m)
    d, u, v = snf_with_transform(m)
    return {"hnf": h, "hnf_transform": hu, "snf": d, "snf_left": u, "snf_right": v}


def kernel_mod(a, modulus):
    """Z-basis (HNF) of ``{x in Z^n : a @ x == 0 mod modulus}``."""
    k = len(a)
    n = len(a[0])
    # columns of [a | modulus*I]; kernel vectors of that matrix project to the answer
    big = [list(map(int, row)) + [modulus * int(i == j) for j in range(k)] for i, row in enumerate(a)]
    h, u = hnf_with_transform(rm.transpose(big))
    kernel = [row[:n] for row in u[len(h):]]
    return hnf(kernel + [[modulus * int(i == j) for j in range(n)] for i in range(n)])


# ---------------------------------------------------------------------------
# lattices and pairings


def _rational_hnf(rows):
    d = rm.common_denominator(rows)
    h = hnf([[int(x * d) for x in row] for row in rows])
    return tuple(tuple(Fraction(x, d) for x in row) for row in h)


@dataclass(frozen=True)
class IntegerLattice:
    """A full-rank lattice; rows of ``basis`` are the basis vectors."""

    basis: object
    precision: int | None = None
    _hnf: tuple | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.basis, np.ndarray) and self.basis.dtype != object:
            b = np.asarray(self.basis, dtype=float)
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise LatticeError(f"basis must be square, got shape {b.shape}")
            object.__setattr__(self, "basis", b)
            if self.precision is None:
                object.__setattr__(self, "precision", 15)
            if abs(np.linalg.det(b)) == 0.0:
                raise LatticeError("basis is rank deficient")
            return
        b = tuple(tuple(rm.frac(x) for x in row) for row in self.basis)
        if any(len(row) != len(b) for row in b):
            raise LatticeError("basis must be square")
        if rm.det([list(r) for r in b]) == 0:
            raise LatticeError("basis is rank deficient")
        object.__setattr__(self, "basis", b)

    @classmethod
    def from_generators(cls, rows):
        """Lattice spanned by a (possibly redundant) set of rational vectors."""
        h = _rational_hnf([[rm.frac(x) for x in row] for row in rows])
        if not h or len(h) != len(h[0]):
            raise LatticeError("generators do not span a full-rank lattice")
        lat = cls(h)
        object.__setattr__(lat, "_hnf", h)
        return lat

    @property
    def exact(self):
        return not isinstance(self.basis, np.ndarray)

    @property
    def ambient_dim(self):
        return len(self.basis)

    def matrix(self):
        return [list(r) for r in self.basis]

    def hnf(self):
        if not self.exact:
            raise LatticeError("HNF is defined for exact lattices only")
        if self._hnf is None:
            object.__setattr__(self, "_hnf", _rational_hnf(self.basis))
        return self._hnf

    def coordinates(self, v):
        return rm.solve_left([rm.frac(x) for x in v], self.matrix())

    def __contains__(self, v):
        return all(c.denominator == 1 for c in self.coordinates(v))

    def __eq__(self, other):
        if not isinstance(other, IntegerLattice):
            return NotImplemented
        if self.exact and other.exact:
            return self.hnf() == other.hnf()
        return False

    def __hash__(self):
        return hash(self.hnf()) if self.exact else id(self)

    def scaled(self, c):
        c = rm.frac(c)
        return IntegerLattice([[c * x for x in row] for row in self.basis])


@dataclass(frozen=True)
class PairingForm:
    """Bilinear form ``P(x, y) = x @ gram @ y^T`` on the ambient space."""

    gram: tuple
    symmetry: str = "general"

    def __post_init__(self):
        g = tuple(tuple(rm.frac(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if self.symmetry == "symmetric":
            ok = all(g[i][j] == g[j][i] for i in range(n) for j in range(n))
        elif self.symmetry == "alternating":
            ok = all(g[i][j] == -g[j][i] for i in range(n) for j in range(n))
        elif self.symmetry == "general":
            ok = True
        else:
            raise ValueError(f"unknown symmetry type {self.symmetry!r}")
        if not ok:
            raise LatticeError(f"gram matrix is not {self.symmetry}")

    @classmethod
    def dot(cls, n):
        return cls(rm.identity(n), "symmetric")

    def __call__(self, x, y):
        n = len(self.gram)
        return sum(
            (rm.frac(x[i]) * self.gram[i][j] * rm.frac(y[j]) for i in range(n) for j in range(n)),
            Fraction(0),
        )

    def gram_on(self, lattice):
        b = lattice.matrix()
        return rm.matmul(rm.matmul(b, [list(r) for r in self.gram]), rm.transpose(b))


def covolume(lat):
    """``|det(basis)|``; exact for rational bases."""
    if lat.exact:
        return abs(rm.det(lat.matrix()))
    return float(abs(np.linalg.det(lat.basis)))


def dual(lat, pairing):
    """``{x : P(x, l) in Z for every l in lat}``."""
    if lat.exact:
        g = [list(r) for r in pairing.gram]
        m = rm.matmul(g, rm.transpose(lat.matrix()))
        if rm.det(m) == 0:
            raise LatticeError("pairing is degenerate")
        return IntegerLattice(rm.inverse(m))
    g = np.array([[float(x) for x in r] for r in pairing.gram])
    m = g @ lat.basis.T
    if abs(np.linalg.det(m)) == 0.0:
        raise LatticeError("pairing is degenerate")
    return IntegerLattice(np.linalg.inv(m), precision=lat.precision)


def index(sub, sup):
    """``[sup : sub]`` for exact lattices with ``sub`` contained in ``sup``.

    The determinant ratio is cross-checked against the product of Smith
    elementary divisors of the change-of-basis matrix.
    """
    inv = rm.inverse(sup.matrix())
    change = rm.matmul(sub.matrix(), inv)
    for row, v in zip(change, sub.basis):
        if any(c.denominator != 1 for c in row):
            raise LatticeError(f"sublattice vector {[str(x) for x in v]} is not in the superlattice")
    by_det = covolume(sub) / covolume(sup)
    divisors = smith_diagonal([[int(c) for c in row] for row in change])
    by_snf = prod(divisors)
    if by_det != by_snf:
        raise LatticeError(f"index mismatch: determinant gives {by_det}, Smith form gives {by_snf}")
    return int(by_snf)
