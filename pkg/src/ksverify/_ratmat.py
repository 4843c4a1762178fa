"""Small exact linear algebra over the rationals.

Matrices are lists of lists of ``Fraction``; vectors are lists.  Everything
here is deliberately naive Gaussian elimination: the sizes in this package
never exceed 16x16.
"""

from fractions import Fraction
from math import lcm


def frac(x):
    """Coerce ints, Fractions and ``"p/q"`` strings to ``Fraction``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a string 'p/q' or an int")
    return Fraction(x)


def to_frac_matrix(rows):
    return [[frac(v) for v in row] for row in rows]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def vecmat(v, a):
    return [sum((v[i] * a[i][j] for i in range(len(v))), Fraction(0)) for j in range(len(a[0]))]


def det(a):
    n = len(a)
    m = [[frac(x) for x in row] for row in a]
    sign = 1
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        p = m[c][c]
        d *= p
        for r in range(c + 1, n):
            f = m[r][c] / p
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return sign * d


def inverse(a):
    n = len(a)
    m = [list(row) + e for row, e in zip(a, identity(n))]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def solve_left(v, a):
    """Return ``x`` with ``x @ a == v`` for square invertible ``a``."""
    return vecmat(v, inverse(a))


def rank(a):
    m = [[frac(x) for x in row] for row in a]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            f = m[i][c] / m[r][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == rows:
            break
    return r


def common_denominator(rows):
    d = 1
    for row in rows:
        for x in row:
            d = lcm(d, Fraction(x).denominator)
    return d


def is_integral(rows):
    return all(Fraction(x).denominator == 1 for row in rows for x in row)
