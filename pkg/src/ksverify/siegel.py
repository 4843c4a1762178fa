"""Siegel upper half space, period lattices and the Faltings/Petersson comparison.

A point of ``H_r^g`` is a tuple of ``g`` symmetric matrices ``Z_i = X_i + i Y_i``.
The period lattice at one place is ``Z^r . Z + Z^r`` inside ``C^r``; we realise
``C^r`` as ``R^{2r}`` via ``v -> (Re v, Im v)`` and stack the places block
diagonally.  Numerics are float64 throughout; exact (Fraction) entries are kept
when supplied so that the Kodaira-Spencer pairing can be checked exactly.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import pi

import numpy as np

from . import _ratmat as rm
from .zlattice import IntegerLattice, PairingForm, covolume


class SiegelError(ValueError):
    pass


def _as_matrix(m):
    if isinstance(m, np.ndarray):
        return m
    rows = [list(r) for r in m]
    if all(isinstance(x, (int, Fraction)) for r in rows for x in r):
        return [[Fraction(x) for x in r] for r in rows]
    return np.array(rows, dtype=float)


def _is_exact(m):
    return not isinstance(m, np.ndarray)


def _to_float(m):
    if isinstance(m, np.ndarray):
        return m
    return np.array([[float(x) for x in r] for r in m])


@dataclass(frozen=True)
class SiegelPoint:
    """``g`` points of ``H_r`` given by real and imaginary parts."""

    X: tuple
    Y: tuple
    tol: float = 1e-12

    def __post_init__(self):
        xs = tuple(_as_matrix(x) for x in self.X)
        ys = tuple(_as_matrix(y) for y in self.Y)
        if len(xs) != len(ys) or not xs:
            raise SiegelError("need one real and one imaginary part per place")
        r = len(ys[0])
        for place, (x, y) in enumerate(zip(xs, ys), 1):
            for name, m in (("X", x), ("Y", y)):
                if len(m) != r or any(len(row) != r for row in m):
                    raise SiegelError(f"{name}_{place} is not {r}x{r}")
                if _is_exact(m):
                    sym = all(m[a][b] == m[b][a] for a in range(r) for b in range(r))
                else:
                    sym = np.allclose(m, m.T, rtol=0, atol=self.tol * max(1.0, np.abs(m).max()))
                if not sym:
                    raise SiegelError(f"{name}_{place} is not symmetric")
            try:
                np.linalg.cholesky(_to_float(y))
            except np.linalg.LinAlgError:
                raise SiegelError(f"Y_{place} is not positive definite") from None
        object.__setattr__(self, "X", xs)
        object.__setattr__(self, "Y", ys)

    @classmethod
    def from_complex(cls, zs):
        zs = [np.asarray(z, dtype=complex) for z in zs]
        return cls(tuple(z.real.copy() for z in zs), tuple(z.imag.copy() for z in zs))

    @property
    def r(self):
        return len(self.Y[0])

    @property
    def g(self):
        return len(self.Y)

    @property
    def exact(self):
        return all(_is_exact(m) for m in self.X + self.Y)

    def Z(self, place=1):
        return _to_float(self.X[place - 1]) + 1j * _to_float(self.Y[place - 1])

    def det_Y(self):
        return [float(np.linalg.det(_to_float(y))) for y in self.Y]


def random_siegel_point(rng, r, g=1, eps=1e-3):
    """``Y = M M^T + eps I`` and symmetric ``X``, entries of ``M`` and ``X`` uniform in [-1, 1]."""
    xs, ys = [], []
    for _ in range(g):
        m = rng.uniform(-1, 1, (r, r))
        x = rng.uniform(-1, 1, (r, r))
        xs.append(np.triu(x) + np.triu(x, 1).T)
        ys.append(m @ m.T + eps * np.eye(r))
    return SiegelPoint(tuple(xs), tuple(ys))


def standard_point(r, g=1, scales=None):
    """``Z_i = i * s_i * I_r`` with exact entries."""
    scales = scales or [1] * g
    zero = [[Fraction(0)] * r for _ in range(r)]
    ys = [[[Fraction(s) * (a == b) for b in range(r)] for a in range(r)] for s in scales]
    return SiegelPoint(tuple(zero for _ in scales), tuple(ys))


# ---------------------------------------------------------------------------
# symplectic action


def symplectic_j(r):
    j = np.zeros((2 * r, 2 * r))
    j[:r, r:] = np.eye(r)
    j[r:, :r] = -np.eye(r)
    return j


@dataclass(frozen=True)
class SymplecticMatrix:
    M: object
    tol: float = 1e-10

    def __post_init__(self):
        m = np.array(self.M, dtype=float)
        n = m.shape[0]
        if m.shape != (n, n) or n % 2:
            raise SiegelError("symplectic matrix must be 2r x 2r")
        j = symplectic_j(n // 2)
        defect = np.abs(m.T @ j @ m - j).max()
        if defect > self.tol * max(1.0, np.abs(m).max() ** 2):
            raise SiegelError(f"M^T J M != J (defect {defect:.2e})")
        object.__setattr__(self, "M", m)

    @property
    def blocks(self):
        r = self.M.shape[0] // 2
        m = self.M
        return m[:r, :r], m[:r, r:], m[r:, :r], m[r:, r:]

    def __matmul__(self, other):
        return SymplecticMatrix(self.M @ other.M)


def act(gamma, point, place=1):
    """``(A Z + B)(C Z + D)^{-1}`` at one place; other places are unchanged."""
    a, b, c, d = gamma.blocks
    z = point.Z(place)
    den = c @ z + d
    if abs(np.linalg.det(den)) < 1e-14 * max(1.0, np.abs(den).max() ** len(den)):
        raise SiegelError("C Z + D is singular")
    w = (a @ z + b) @ np.linalg.inv(den)
    w = (w + w.T) / 2
    xs = [_to_float(x) for x in point.X]
    ys = [_to_float(y) for y in point.Y]
    xs[place - 1], ys[place - 1] = w.real, w.imag
    return SiegelPoint(tuple(xs), tuple(ys))


# ---------------------------------------------------------------------------
# Riemann form and period lattice


def riemann_form_siegel(u, v):
    """``E(a Z + b, a' Z + b') = -a.b' + a'.b`` on lattice coordinates ``(a, b)``."""
    n = len(u)
    if n != len(v) or n % 2:
        raise SiegelError("coordinates must be (alpha, beta) pairs of equal length")
    r = n // 2
    a, b = u[:r], u[r:]
    a2, b2 = v[:r], v[r:]
    return -sum(x * y for x, y in zip(a, b2)) + sum(x * y for x, y in zip(a2, b))


def riemann_gram(r):
    """Gram matrix of ``E`` on ``Z^{2r}`` (alternating, determinant 1)."""
    n = 2 * r
    basis = [[int(i == j) for j in range(n)] for i in range(n)]
    return PairingForm([[riemann_form_siegel(u, v) for v in basis] for u in basis], "alternating")


def period_basis(point, place):
    """Real ``2r x 2r`` basis at one place: rows ``(Re Z_k, Im Z_k)`` then ``(e_k, 0)``."""
    r = point.r
    x, y = _to_float(point.X[place - 1]), _to_float(point.Y[place - 1])
    top = np.hstack([x, y])
    bottom = np.hstack([np.eye(r), np.zeros((r, r))])
    return np.vstack([top, bottom])


def period_lattice(point):
    """Block-diagonal real basis of the period lattice over all places."""
    r, g = point.r, point.g
    n = 2 * r
    basis = np.zeros((g * n, g * n))
    for i in range(g):
        basis[i * n:(i + 1) * n, i * n:(i + 1) * n] = period_basis(point, i + 1)
    return IntegerLattice(basis)


def complex_structure(n):
    """Multiplication by ``i`` on row vectors ``(Re, Im)`` of ``C^n``."""
    return symplectic_j(n)


def real_form(basis, gram):
    """Real-bilinear extension: ``E(x, y) = x B^{-1} G B^{-T} y^T``."""
    binv = np.linalg.inv(basis)
    return binv @ np.asarray(gram, dtype=float) @ binv.T


def form_axioms(e_real, rng, samples=100):
    """Compatibility and positivity of a real alternating form on ``C^n``.

    The orientation ``s`` is the sign making ``s E(ix, x)`` positive; the
    returned margins refer to ``s E``.
    """
    n = e_real.shape[0] // 2
    jc = complex_structure(n)
    scale = np.abs(e_real).max()
    compat = np.abs(jc @ e_real @ jc.T - e_real).max() / scale
    sym = jc @ e_real
    sym = (sym + sym.T) / 2
    eig = np.linalg.eigvalsh(sym)
    if eig.min() > 0:
        orientation = 1
    elif eig.max() < 0:
        orientation = -1
    else:
        orientation = 0
    s = orientation or 1
    vs = rng.normal(size=(samples, 2 * n))
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)
    vals = s * np.einsum("ki,ij,kj->k", vs @ jc, e_real, vs) / scale
    worst = int(np.argmin(vals))
    return {
        "orientation": orientation,
        "compat_defect": float(compat),
        "min_margin": float(vals.min()),
        "min_eigen_margin": float(s * (eig.min() if s > 0 else eig.max()) / scale),
        "witness": vs[worst].tolist(),
    }


def riemann_axioms(point, rng, samples=100):
    """Check ``E(ix, iy) = E(x, y)`` and positivity at every place.

    With ``E`` as defined above and ``C^r`` identified with ``Lambda (x) R``
    through the period basis, ``E(ix, x)`` comes out negative; the reported
    orientation is therefore ``-1`` and margins are for ``-E``.
    """
    gram = [list(map(float, row)) for row in riemann_gram(point.r).gram]
    out = []
    for place in range(1, point.g + 1):
        e = real_form(period_basis(point, place), gram)
        res = form_axioms(e, rng, samples)
        res["place"] = place
        out.append(res)
    return out


# ---------------------------------------------------------------------------
# metrics


def faltings_norm_sq(point, rtol=1e-10):
    """``prod det(Y_i) / pi^{gr}``, cross-checked against the period-lattice covolume."""
    r, g = point.r, point.g
    analytic = float(np.prod(point.det_Y())) / pi ** (g * r)
    vol = covolume(period_lattice(point))
    by_lattice = (2 * pi) ** (-g * r) * 2 ** (g * r) * vol
    if abs(by_lattice - analytic) > rtol * analytic:
        raise SiegelError(
            f"covolume cross-check failed: det Y route {analytic!r}, lattice route {by_lattice!r}"
        )
    return analytic


def covolume_crosscheck(point):
    """Relative gap between ``prod det(Y_i)`` and the embedded-lattice covolume."""
    analytic = float(np.prod(point.det_Y()))
    vol = covolume(period_lattice(point))
    return abs(vol - analytic) / analytic


def petersson_norm_siegel(point):
    """``2^{gr(r+1)/2} prod det(Y_i)^{(r+1)/2}`` for the frame ``d tau``."""
    r, g = point.r, point.g
    return 2 ** (g * r * (r + 1) / 2) * float(np.prod([d ** ((r + 1) / 2) for d in point.det_Y()]))


def verify_siegel_main(point):
    """Relative residual of ``||.||_Fal^{r+1} = |2 pi i|^{-gr(r+1)/2} ||.||_Pet``."""
    r, g = point.r, point.g
    lhs = faltings_norm_sq(point) ** ((r + 1) / 2)
    rhs = (2 * pi) ** (-g * r * (r + 1) / 2) * petersson_norm_siegel(point)
    return abs(lhs - rhs) / rhs


def riemann_form_exact_checks(r):
    """Alternating, integral and unimodular on ``Z^{2r}``, all exact."""
    g = riemann_gram(r)
    m = [list(row) for row in g.gram]
    n = len(m)
    return {
        "alternating": all(m[i][j] == -m[j][i] for i in range(n) for j in range(n)),
        "integral": rm.is_integral(m),
        "det": rm.det(m),
    }
