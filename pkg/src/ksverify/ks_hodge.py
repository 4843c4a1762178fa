"""Finite-dimensional shadows of the Kodaira-Spencer computation.

* The antilinear projection of a real-linear functional on ``C^n`` and the
  identity ``anti(E(z, .)) = -(i/2) H(z, .)`` for a Riemann form ``E`` with
  Hermitian form ``H(x, y) = E(ix, y) + i E(x, y)`` (linear in ``x``).
* The pairing of period vectors ``P_j = (Z_{*j}, e_j)`` under ``E``, whose
  derivative along a symmetric direction ``dZ`` is ``-dZ``.
* A toy Cech cover of ``C / (Z + tau Z)`` by boxes, in lattice coordinates.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, floor

import numpy as np

from .siegel import (
    SiegelPoint,
    complex_structure,
    real_form,
    riemann_form_siegel,
    riemann_gram,
)


class KSError(ValueError):
    pass


# ---------------------------------------------------------------------------
# real-linear functionals


@dataclass(frozen=True)
class RealLinearFunctional:
    """``f(v) = sum_k Re(v_k) f(e_k) + Im(v_k) f(i e_k)`` with complex values."""

    on_real: tuple
    on_imag: tuple

    def __post_init__(self):
        object.__setattr__(self, "on_real", tuple(complex(x) for x in self.on_real))
        object.__setattr__(self, "on_imag", tuple(complex(x) for x in self.on_imag))
        if len(self.on_real) != len(self.on_imag):
            raise KSError("need values on e_k and on i e_k for every k")

    @property
    def n(self):
        return len(self.on_real)

    def __call__(self, v):
        v = np.asarray(v, dtype=complex)
        return complex(np.dot(v.real, self.on_real) + np.dot(v.imag, self.on_imag))

    def __add__(self, other):
        return RealLinearFunctional(
            tuple(a + b for a, b in zip(self.on_real, other.on_real)),
            tuple(a + b for a, b in zip(self.on_imag, other.on_imag)),
        )

    def is_linear(self):
        return all(b == 1j * a for a, b in zip(self.on_real, self.on_imag))

    def is_antilinear(self):
        return all(b == -1j * a for a, b in zip(self.on_real, self.on_imag))


def decompose_functional(f):
    """Split ``f`` into complex-linear and conjugate-linear parts.

    ``f_lin(v) = (f(v) - i f(iv)) / 2`` and ``f_anti(v) = (f(v) + i f(iv)) / 2``.
    Since ``f(i e_k)`` is the stored imaginary coefficient and
    ``f(i . i e_k) = -f(e_k)``, both parts are read off coefficientwise.
    """
    lin_re, lin_im, anti_re, anti_im = [], [], [], []
    for a, b in zip(f.on_real, f.on_imag):
        lin_re.append((a - 1j * b) / 2)
        lin_im.append((b + 1j * a) / 2)
        anti_re.append((a + 1j * b) / 2)
        anti_im.append((b - 1j * a) / 2)
    return RealLinearFunctional(lin_re, lin_im), RealLinearFunctional(anti_re, anti_im)


def functional_from_form(e_real, z):
    """``E(z, .)`` for a real form on ``R^{2n} = C^n`` and a real row vector ``z``."""
    n = e_real.shape[0] // 2
    row = np.asarray(z, dtype=float) @ e_real
    return RealLinearFunctional(row[:n], row[n:])


def _realify(v):
    v = np.asarray(v, dtype=complex)
    return np.concatenate([v.real, v.imag])


def _complexify(x):
    n = len(x) // 2
    return x[:n] + 1j * x[n:]


def hermitian_form(e_real):
    """``H(x, y) = E(ix, y) + i E(x, y)`` as a complex ``n x n`` matrix with ``H(x, y) = x^T M conj(y)``."""
    n = e_real.shape[0] // 2
    jc = complex_structure(n)
    basis = np.eye(2 * n)
    m = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            x, y = basis[a], basis[b]
            m[a, b] = (x @ jc) @ e_real @ y + 1j * (x @ e_real @ y)
    return m


def verify_lemma_app(e_real, rng, samples=50):
    """Check ``H`` Hermitian positive and ``anti(E(z, .)) = -(i/2) H(z, .)`` on samples.

    ``e_real`` must already be oriented so that ``E(ix, x) > 0``.  Returns a
    dict with the maximal defect (relative to ``max |E|``) and positivity data.
    """
    n = e_real.shape[0] // 2
    jc = complex_structure(n)
    scale = float(np.abs(e_real).max())
    h = hermitian_form(e_real)
    herm = float(np.abs(h - h.conj().T).max()) / scale
    eig = np.linalg.eigvalsh((h + h.conj().T) / 2)
    positive = bool(eig.min() > 0)
    probes = np.eye(2 * n)
    defect = 0.0
    witness = None
    zs = rng.normal(size=(samples, 2 * n))
    zs[0] = 0.0
    for z in zs:
        _, anti = decompose_functional(functional_from_form(e_real, z))
        for v in probes:
            lhs = anti(_complexify(v))
            rhs = -0.5j * ((z @ jc) @ e_real @ v + 1j * (z @ e_real @ v))
            d = abs(lhs - rhs) / scale
            if d > defect:
                defect, witness = d, z.tolist()
    return {
        "defect": defect,
        "hermitian_defect": herm,
        "positive": positive,
        "min_eigenvalue": float(eig.min()) / scale,
        "witness": witness,
    }


def standard_lemma_form():
    """``Lambda = Z + iZ`` with ``E((a, b), (a', b')) = -ab' + a'b``, oriented positively."""
    basis = np.array([[0.0, 1.0], [1.0, 0.0]])
    gram = [[float(riemann_form_siegel(u, v)) for v in ([1, 0], [0, 1])] for u in ([1, 0], [0, 1])]
    return -real_form(basis, gram)


# ---------------------------------------------------------------------------
# Kodaira-Spencer pairing on period vectors


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def period_vector(point, j, place=1):
    """``P_j = (Z_{1j}, ..., Z_{rj}, e_j)`` with entries as (re, im) pairs."""
    r = point.r
    x, y = point.X[place - 1], point.Y[place - 1]
    zero, one = Fraction(0), Fraction(1)
    top = [(x[k][j], y[k][j]) for k in range(r)]
    bottom = [(one if k == j else zero, zero) for k in range(r)]
    return top + bottom


def direction(r, i, k):
    """Symmetric direction ``E_ik + E_ki`` (or ``E_ii``) as an exact matrix."""
    return [[Fraction(int((a, b) in {(i, k), (k, i)})) for b in range(r)] for a in range(r)]


def period_derivative(r, j, dz):
    """``dP_j = (dZ_{*j}, 0)`` exactly."""
    zero = Fraction(0)
    return [(dz[k][j], zero) for k in range(r)] + [(zero, zero)] * r


def complex_bilinear(u, v, gram):
    total = (Fraction(0), Fraction(0))
    n = len(u)
    for a in range(n):
        for b in range(n):
            if gram[a][b]:
                total = _cadd(total, _cmul(_cmul(u[a], (gram[a][b], Fraction(0))), v[b]))
    return total


def ks_pairing_matrix(point, i, k, place=1):
    """``B(j, l) = E_C(dP_j, P_l)`` along ``dZ = E_ik + E_ki``."""
    if not point.exact:
        raise KSError("exact pairing needs a SiegelPoint with rational entries")
    r = point.r
    gram = riemann_gram(r).gram
    dz = direction(r, i, k)
    periods = [period_vector(point, l, place) for l in range(r)]
    return [[complex_bilinear(period_derivative(r, j, dz), periods[l], gram) for l in range(r)] for j in range(r)]


def verify_ks_pairing(point, i, k, place=1):
    """Exact check ``B(j, l) = B(l, j) = -dZ_{jl}``; returns offending entries."""
    b = ks_pairing_matrix(point, i, k, place)
    dz = direction(point.r, i, k)
    bad = []
    for j in range(point.r):
        for l in range(point.r):
            want = (-dz[j][l], Fraction(0))
            if b[j][l] != want or b[j][l] != b[l][j]:
                bad.append({"j": j + 1, "l": l + 1, "got": [str(c) for c in b[j][l]], "want": [str(c) for c in want]})
    return bad


def fd_period_defect(point, i, k, h=1e-6, place=1):
    """Finite-difference ``(P_j(Z + h dZ) - P_j(Z)) / h`` against the exact ``dP_j``."""
    r = point.r
    z = point.Z(place)
    dz = np.array([[float(c) for c in row] for row in direction(r, i, k)])
    worst = 0.0
    for j in range(r):
        p0 = np.concatenate([z[:, j], np.eye(r)[j]])
        p1 = np.concatenate([(z + h * dz)[:, j], np.eye(r)[j]])
        exact = np.concatenate([dz[:, j], np.zeros(r)])
        worst = max(worst, float(np.abs((p1 - p0) / h - exact).max()))
    return worst


def random_rational_point(rng, r, denominator=8):
    """A SiegelPoint with rational entries; ``Y`` is diagonally dominant hence positive."""
    x = [[Fraction(0)] * r for _ in range(r)]
    y = [[Fraction(0)] * r for _ in range(r)]
    for a in range(r):
        for b in range(a, r):
            x[a][b] = x[b][a] = Fraction(int(rng.integers(-denominator, denominator + 1)), denominator)
            if a != b:
                y[a][b] = y[b][a] = Fraction(int(rng.integers(-denominator, denominator + 1)), denominator)
    for a in range(r):
        off = sum(abs(y[a][b]) for b in range(r) if b != a)
        y[a][a] = off + Fraction(int(rng.integers(1, denominator + 1)), denominator)
    return SiegelPoint((x,), (y,))


# ---------------------------------------------------------------------------
# toy Cech cover of a one-dimensional torus


def _box_diff(u, v):
    """The open box ``v - u``."""
    return tuple((v[d][0] - u[d][1], v[d][1] - u[d][0]) for d in range(2))


def _lattice_points(box):
    ranges = []
    for lo, hi in box:
        first = floor(lo) + 1
        last = ceil(hi) - 1
        ranges.append(range(first, last + 1))
    return [tuple(p) for p in product(*ranges)]


def _meets(*boxes):
    return all(max(b[d][0] for b in boxes) < min(b[d][1] for b in boxes) for d in range(2))


def _shift(box, c):
    return tuple((box[d][0] + c[d], box[d][1] + c[d]) for d in range(2))


@dataclass
class CechCoverToy:
    """``N x N`` open boxes of side ``1/N + 2 delta`` in lattice coordinates.

    A point ``(s, t)`` stands for ``s + t tau``; the lattice is ``Z^2``.
    ``offsets[(t, t')]`` is the unique ``c`` in ``Z^2`` with ``U_t + c`` meeting ``U_t'``.
    """

    grid: int
    delta: Fraction = Fraction(1, 100)
    boxes: list = field(init=False)
    offsets: dict = field(init=False)

    def __post_init__(self):
        n = self.grid
        d = Fraction(self.delta)
        if n < 1 or d <= 0:
            raise KSError("grid must be positive and delta > 0")
        self.boxes = [
            ((Fraction(a, n) - d, Fraction(a + 1, n) + d), (Fraction(b, n) - d, Fraction(b + 1, n) + d))
            for a in range(n)
            for b in range(n)
        ]
        for t, u in enumerate(self.boxes):
            if any(hi - lo >= 1 for lo, hi in u):
                raise KSError(f"chart {t} does not inject into the torus")
        self.offsets = {}
        for t, u in enumerate(self.boxes):
            for s, v in enumerate(self.boxes):
                pts = _lattice_points(_box_diff(u, v))
                if len(pts) > 1:
                    raise KSError(f"inadmissible cover: U_{s} - U_{t} contains lattice points {pts[0]} and {pts[1]}")
                if pts:
                    self.offsets[(t, s)] = pts[0]

    def triples(self):
        """Index triples with a common point ``z``, ``z + c_{tt'}``, ``z + c_{tt'} + c_{t't''}``."""
        out = []
        m = len(self.boxes)
        for t in range(m):
            for s in range(m):
                if (t, s) not in self.offsets:
                    continue
                c1 = self.offsets[(t, s)]
                for q in range(m):
                    if (s, q) not in self.offsets:
                        continue
                    c2 = self.offsets[(s, q)]
                    back = (-(c1[0] + c2[0]), -(c1[1] + c2[1]))
                    if _meets(self.boxes[t], _shift(self.boxes[s], (-c1[0], -c1[1])), _shift(self.boxes[q], back)):
                        out.append((t, s, q))
        return out


def cocycle(cover, alpha):
    """``delta(alpha)_{t, t'} = alpha(c_{t, t'})`` for ``alpha`` given on the basis ``(1, tau)``."""
    a1, a2 = alpha
    return {k: c[0] * a1 + c[1] * a2 for k, c in cover.offsets.items()}


def cech_cocycle_check(cover, alpha, alpha2=None):
    """Exact cocycle identity on all triple overlaps and additivity in ``alpha``."""
    delta = cocycle(cover, alpha)
    failures = []
    triples = cover.triples()
    for t, s, q in triples:
        if (t, q) not in delta or delta[(t, q)] != delta[(t, s)] + delta[(s, q)]:
            failures.append((t, s, q))
    additive = True
    if alpha2 is not None:
        d2 = cocycle(cover, alpha2)
        dsum = cocycle(cover, (alpha[0] + alpha2[0], alpha[1] + alpha2[1]))
        additive = all(dsum[k] == delta[k] + d2[k] for k in delta)
    return {"triples": len(triples), "failures": failures, "additive": additive}


def riemann_functional(z0):
    """``alpha = E(z0, .)`` on the basis ``(1, tau)`` for ``z0 = s + t tau`` with rational ``(s, t)``.

    In lattice coordinates ``(alpha, beta)`` the basis vectors are ``tau = (1, 0)`` and ``1 = (0, 1)``.
    """
    s, t = (Fraction(x) for x in z0)
    z = [t, s]
    return (riemann_form_siegel(z, [0, 1]), riemann_form_siegel(z, [1, 0]))
