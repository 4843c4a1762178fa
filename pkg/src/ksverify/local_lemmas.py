"""Local Hom-module lemmas over truncated rings, exactly.

Bad prime: ``W = (Z/p^k)[u]/(u^2 - c)`` models the unramified quadratic
extension, ``varpi = p``.  A module with ``O_D``-action is ``W x + W y`` where
``e_1, e_2`` project onto ``x, y``, a scalar ``w`` of the quadratic extension
acts as ``diag(w, conj w)`` and ``j x = a y``, ``j y = b x``.  ``T = (varpi, 1)``
and ``T' = (1, varpi)``.

Good prime: ``R = Z/p^k``, ``O = M_2(R)`` acting on column vectors.

Everything is a Z-module of finite index in some ``Z^n``; submodules are
compared by Hermite normal form after adding ``p^k Z^n``.
"""

from dataclasses import dataclass

import sympy

from .zlattice import hnf, kernel_mod


class LocalError(ValueError):
    pass


# ---------------------------------------------------------------------------
# the truncated unramified ring


@dataclass(frozen=True)
class TruncatedUnramified:
    p: int
    k: int
    c: int = None

    def __post_init__(self):
        p, k = self.p, self.k
        if p == 2 or not sympy.isprime(p):
            raise LocalError("p must be an odd prime")
        if k < 1:
            raise LocalError("truncation level k must be at least 1")
        c = self.c
        if c is None:
            c = next(x for x in range(2, p) if sympy.legendre_symbol(x, p) == -1)
        if sympy.legendre_symbol(c % p, p) != -1:
            raise LocalError(f"u^2 - {c} is reducible mod {p}")
        object.__setattr__(self, "c", c)

    @property
    def modulus(self):
        return self.p**self.k

    @property
    def varpi(self):
        return (self.p % self.modulus, 0)

    def el(self, a0, a1=0):
        m = self.modulus
        return (a0 % m, a1 % m)

    def add(self, x, y):
        return self.el(x[0] + y[0], x[1] + y[1])

    def mul(self, x, y):
        return self.el(x[0] * y[0] + self.c * x[1] * y[1], x[0] * y[1] + x[1] * y[0])

    def conj(self, x):
        return self.el(x[0], -x[1])

    def norm(self, x):
        return self.mul(x, self.conj(x))

    def is_unit(self, x):
        return (x[0] * x[0] - self.c * x[1] * x[1]) % self.p != 0

    def basis(self):
        return [self.el(1), self.el(0, 1)]

    def mult_matrix(self, x):
        """Z-matrix of ``w -> x w`` on coordinates (rows are images of 1, u)."""
        return [list(self.mul(x, b)) for b in self.basis()]


@dataclass(frozen=True)
class LocalDModule:
    ring: TruncatedUnramified
    a: tuple
    b: tuple
    name: str = ""

    def __post_init__(self):
        w = self.ring
        if w.mul(self.a, self.b) != w.varpi:
            raise LocalError(f"module {self.name}: a*b != varpi")
        if w.is_unit(self.a) == w.is_unit(self.b):
            raise LocalError(f"module {self.name}: exactly one of a, b must be a unit")

    def j_matrix(self):
        """``j`` as a 2x2 W-matrix on coordinates (x, y); columns are images."""
        z = self.ring.el(0)
        return [[z, self.b], [self.a, z]]


def _w_matmul(w, m1, m2):
    out = [[w.el(0)] * 2 for _ in range(2)]
    for r in range(2):
        for c in range(2):
            acc = w.el(0)
            for t in range(2):
                acc = w.add(acc, w.mul(m1[r][t], m2[t][c]))
            out[r][c] = acc
    return out


def scalar_action(w, x):
    z = w.el(0)
    return [[x, z], [z, w.conj(x)]]


def idempotents(w):
    one, z = w.el(1), w.el(0)
    return [[one, z], [z, z]], [[z, z], [z, one]]


def check_relations(module):
    """``j^2 = varpi``, ``j w = conj(w) j``, ``j e_1 = e_2 j`` and the determinant of scalars."""
    w = module.ring
    j = module.j_matrix()
    out = {}
    vp = [[w.varpi, w.el(0)], [w.el(0), w.varpi]]
    out["j_squared"] = _w_matmul(w, j, j) == vp
    u = w.el(0, 1)
    out["j_semilinear"] = _w_matmul(w, j, scalar_action(w, u)) == _w_matmul(w, scalar_action(w, w.conj(u)), j)
    e1, e2 = idempotents(w)
    out["j_swaps_idempotents"] = _w_matmul(w, j, e1) == _w_matmul(w, e2, j)
    x = w.el(2, 1)
    s = scalar_action(w, x)
    det = w.add(w.mul(s[0][0], s[1][1]), w.mul(w.el(-1), w.mul(s[0][1], s[1][0])))
    out["scalar_det_is_norm"] = det == w.norm(x)
    return out


# ---------------------------------------------------------------------------
# Hom modules by linear algebra over Z/p^k


def _unknown_index(r, c, part):
    return 4 * r + 2 * c + part


def _equivariance_rows(w, phi_ops):
    """Linear conditions ``phi A' - A phi = 0`` as rows over Z, for (A', A) pairs.

    ``phi`` is a 2x2 W-matrix with 8 Z-unknowns ``phi[r][c] = x + y u``.
    """
    rows = []
    for a_src, a_tgt in phi_ops:
        for r in range(2):
            for c in range(2):
                for part in range(2):
                    row = [0] * 8
                    # (phi A')[r][c] = sum_t phi[r][t] A'[t][c]
                    for t in range(2):
                        m = w.mult_matrix(a_src[t][c])
                        for q in range(2):
                            row[_unknown_index(r, t, q)] += m[q][part]
                    # (A phi)[r][c] = sum_t A[r][t] phi[t][c]
                    for t in range(2):
                        m = w.mult_matrix(a_tgt[r][t])
                        for q in range(2):
                            row[_unknown_index(t, c, q)] -= m[q][part]
                    rows.append(row)
    return rows


def hom_module(src, tgt):
    """Z-basis (HNF, containing ``p^k Z^8``) of ``Hom_{O_D}(src, tgt)``.

    Elements are flattened 2x2 W-matrices ``phi`` acting on columns
    ``(x-coefficient, y-coefficient)``.
    """
    w = src.ring
    if tgt.ring != w:
        raise LocalError("modules over different rings")
    e1, e2 = idempotents(w)
    u = w.el(0, 1)
    ops = [
        (e1, e1),
        (e2, e2),
        (scalar_action(w, u), scalar_action(w, u)),
        (src.j_matrix(), tgt.j_matrix()),
    ]
    return kernel_mod(_equivariance_rows(w, ops), w.modulus)


def _phi(w, vec):
    return [[w.el(vec[_unknown_index(r, c, 0)], vec[_unknown_index(r, c, 1)]) for c in range(2)] for r in range(2)]


def _span(rows, n, modulus):
    return hnf([list(r) for r in rows] + [[modulus * int(i == j) for j in range(n)] for i in range(n)])


def expected_hom_bad(w):
    """``{x' -> s x, y' -> varpi s y : s in W}`` as a Z-module of flattened matrices."""
    rows = []
    for s in w.basis():
        vec = [0] * 8
        ps = w.mul(w.varpi, s)
        for q in range(2):
            vec[_unknown_index(0, 0, q)] = s[q]
            vec[_unknown_index(1, 1, q)] = ps[q]
        rows.append(vec)
    return _span(rows, 8, w.modulus)


def _apply(w, phi, v):
    return [w.add(w.mul(phi[r][0], v[0]), w.mul(phi[r][1], v[1])) for r in range(2)]


def _flatten(v):
    return [v[0][0], v[0][1], v[1][0], v[1][1]]


def evaluation_image(hom, w):
    """W-span of ``phi(m)`` for ``phi`` in Hom and ``m`` in the source basis."""
    one, z = w.el(1), w.el(0)
    gens = []
    for vec in hom:
        phi = _phi(w, vec)
        for m in ([one, z], [z, one]):
            img = _apply(w, phi, m)
            for s in w.basis():
                gens.append(_flatten([w.mul(s, img[0]), w.mul(s, img[1])]))
    return _span(gens, 4, w.modulus)


def determinant_image(hom, w):
    """Ideal of W spanned by ``phi_1(x') ^ phi_2(y')`` coefficients on ``x ^ y``."""
    one, z = w.el(1), w.el(0)
    gens = []
    phis = [_phi(w, v) for v in hom]
    for p1 in phis:
        for p2 in phis:
            fx = _apply(w, p1, [one, z])
            fy = _apply(w, p2, [z, one])
            d = w.add(w.mul(fx[0], fy[1]), w.mul(w.el(-1), w.mul(fx[1], fy[0])))
            for s in w.basis():
                gens.append(list(w.mul(s, d)))
    return _span(gens, 2, w.modulus)


def ideal_hnf(w, x):
    return _span([list(w.mul(x, s)) for s in w.basis()], 2, w.modulus)


def _module_hnf(w, coeff_x, coeff_y):
    gens = []
    for s in w.basis():
        gens.append(_flatten([w.mul(s, coeff_x), w.el(0)]))
        gens.append(_flatten([w.el(0), w.mul(s, coeff_y)]))
    return _span(gens, 4, w.modulus)


def classify_modules(p, k):
    """The two modules ``T = (varpi, 1)``, ``T' = (1, varpi)`` and a non-isomorphism witness."""
    w = TruncatedUnramified(p, k)
    one = w.el(1)
    t = LocalDModule(w, w.varpi, one, "T")
    t2 = LocalDModule(w, one, w.varpi, "T'")
    # rank mod p of j restricted to e_1 M -> e_2 M (multiplication by a on W)
    surj = {m.name: w.is_unit(m.a) for m in (t, t2)}
    # every Hom(T, T') has its x -> x' coefficient in varpi W, so no isomorphism exists
    hom = hom_module(t, t2)
    nonunit = all(not w.is_unit(_phi(w, v)[0][0]) for v in hom)
    return t, t2, {"e1_to_e2_surjective": surj, "no_isomorphism": nonunit}


def verify_bad_prime(p, k):
    if k < 2:
        raise LocalError("bad-prime check needs k >= 2 so that varpi det T is nonzero and proper")
    t, t2, witness = classify_modules(p, k)
    w = t.ring
    hom = hom_module(t2, t)
    hom_ok = hom == expected_hom_bad(w)
    image = evaluation_image(hom, w)
    image_ok = image == _module_hnf(w, w.el(1), w.varpi)
    det_img = determinant_image(hom, w)
    det_target = ideal_hnf(w, w.varpi)
    det_ok = det_img == det_target
    not_full = det_img != ideal_hnf(w, w.el(1))
    not_sq = det_img != ideal_hnf(w, w.mul(w.varpi, w.varpi))
    self_image = evaluation_image(hom_module(t, t), w) == _module_hnf(w, w.el(1), w.el(1))
    return {
        "p": p,
        "k": k,
        "c": w.c,
        "relations": {m.name: check_relations(m) for m in (t, t2)},
        "hom_equals_expected": hom_ok,
        "image_equals_x_plus_varpi_y": image_ok,
        "det_image_equals_varpi": det_ok,
        "det_image_not_unit_ideal": not_full,
        "det_image_not_varpi_squared": not_sq,
        "identity_image_full": self_image,
        "classification": witness,
        "hom_hnf": hom,
        "det_image_hnf": det_img,
        "ok": all([hom_ok, image_ok, det_ok, not_full, not_sq, self_image])
        and witness["no_isomorphism"]
        and witness["e1_to_e2_surjective"] == {"T": False, "T'": True},
    }


# ---------------------------------------------------------------------------
# good prime


def _r_matmul(m1, m2, mod):
    return [[sum(m1[r][t] * m2[t][c] for t in range(2)) % mod for c in range(2)] for r in range(2)]


def good_prime_hom(mod):
    """Z-basis of ``Hom_{M_2(R)}(R^2, R^2)``: matrices commuting with the generators."""
    gens = [[[1, 0], [0, 0]], [[0, 1], [0, 0]], [[0, 0], [1, 0]], [[0, 0], [0, 1]]]
    rows = []
    for g in gens:
        for r in range(2):
            for c in range(2):
                row = [0] * 4
                for t in range(2):
                    row[2 * r + t] += g[t][c]
                    row[2 * t + c] -= g[r][t]
                rows.append(row)
    return kernel_mod(rows, mod)


def verify_good_prime(p, k):
    """``Hom(T', T) = R``, ``epsilon`` swaps ``e_1 T`` and ``e_2 T``, and ``N (x) N (x) det T' -> det T`` has index 1."""
    if not sympy.isprime(p):
        raise LocalError("p must be prime")
    mod = p**k
    e1, e2 = [[1, 0], [0, 0]], [[0, 0], [0, 1]]
    eps = [[0, 1], [1, 0]]
    swaps = _r_matmul(_r_matmul(eps, e1, mod), eps, mod) == e2
    hom = good_prime_hom(mod)
    scalar = hnf([[1, 0, 0, 1]] + [[mod * int(i == j) for j in range(4)] for i in range(4)])
    hom_ok = hom == scalar
    rank_e1 = 1
    dets = []
    for v1 in hom:
        for v2 in hom:
            f1 = [[v1[0], v1[1]], [v1[2], v1[3]]]
            f2 = [[v2[0], v2[1]], [v2[2], v2[3]]]
            c1 = [f1[0][0], f1[1][0]]
            c2 = [f2[0][1], f2[1][1]]
            dets.append([(c1[0] * c2[1] - c1[1] * c2[0]) % mod])
    img = hnf(dets + [[mod]])
    idx = img[0][0]
    return {
        "p": p,
        "k": k,
        "epsilon_swaps": swaps,
        "hom_is_scalar": hom_ok,
        "hom_rank": 1 if hom_ok else None,
        "e1T_rank": rank_e1,
        "index": idx,
        "ok": swaps and hom_ok and idx == 1,
    }
