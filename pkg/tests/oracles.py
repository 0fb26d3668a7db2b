"""Independent reference computations used to derive frozen test values.

None of these call into the package's arithmetic; they use brute force or sympy.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd

import sympy


def strip_squares(n: int) -> int:
    """Squarefree part by trial division (independent of the package factoring)."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    out, d = 1, 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e % 2:
            out *= d
        d += 1
    return sign * out * n


def is_padic_square(n: int, p: int, prec: int) -> bool | None:
    """Whether the nonzero integer n (known mod p^prec) is a square in Q_p; None if undecided."""
    if n % p**prec == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    if v % 2:
        return False
    need = 3 if p == 2 else 1
    if prec - v < need:
        return None
    if p == 2:
        return n % 8 == 1
    return pow(n % p, (p - 1) // 2, p) == 1


def hilbert_bruteforce(a: int, b: int, p: int | None) -> int:
    """+1 iff a x^2 + b y^2 takes a nonzero square value in Q_p (p=None: the reals)."""
    if p is None:
        return 1 if (a > 0 or b > 0) else -1
    a, b = strip_squares(a), strip_squares(b)
    prec = {2: 10, 3: 7, 5: 5, 7: 4}.get(p, 3)
    m = p**prec
    # z^2 = a x^2 + b y^2 is isotropic iff a x^2 + b y^2 is a nonzero square for some primitive (x, y)
    for t in range(m):
        for x, y in ((1, t), (t * p % m, 1)):
            val = (a * x * x + b * y * y) % m
            if val and is_padic_square(val, p, prec):
                return 1
    return -1


def char_quintic_sympy(g1, g2):
    """det(mu*G1 + nu*G2) as a sympy polynomial in mu, nu."""
    mu, nu = sympy.symbols("mu nu")
    m = sympy.Matrix(5, 5, lambda i, j: mu * sympy.Rational(g1[i][j]) + nu * sympy.Rational(g2[i][j]))
    return sympy.Poly(sympy.expand(m.det()), mu, nu)


def rank4_class_sympy(g) -> int:
    """Squarefree class of the product of nonzero eigen-pivots of a rank-4 Gram matrix (via sympy LDL on a complement)."""
    m = sympy.Matrix(5, 5, lambda i, j: sympy.Rational(g[i][j]))
    ker = m.nullspace()
    assert len(ker) == 1
    k = ker[0]
    # complete the kernel vector to a basis with standard vectors and restrict to the complement
    for drop in range(5):
        if k[drop] != 0:
            break
    basis = [sympy.Matrix([int(i == j) for i in range(5)]) for j in range(5) if j != drop]
    b = sympy.Matrix.hstack(*basis)
    r = b.T * m * b
    det = r.det()
    assert det != 0
    det = sympy.Rational(det)
    return strip_squares(int(det.p * det.q))


def points_bruteforce(q1, q2, H: int) -> set[tuple]:
    """All primitive sign-normalized integer points with max |x_i| <= H, by full enumeration."""
    out = set()
    rng = range(-H, H + 1)
    for x in itertools.product(rng, repeat=5):
        if not any(x):
            continue
        g = 0
        for v in x:
            g = gcd(g, v)
        if g != 1:
            continue
        if next(v for v in x if v) < 0:
            continue
        if q1(x) == 0 and q2(x) == 0:
            out.add(x)
    return out


def frac(x) -> Fraction:
    return Fraction(x)


def primitive_solutions_mod(forms, p: int, k: int) -> int:
    """Count primitive x mod p^k with every form vanishing mod p^k.

    ``forms`` are dicts {(i, j): c} of integer monomial coefficients (i <= j).
    Exhaustive over (p^k)^5 residues, vectorized over the last four coordinates.
    """
    import numpy as np

    m = p**k
    grid = np.indices((m,) * 4).reshape(4, -1).astype(np.int64)
    count = 0
    for x0 in range(m):
        xs = [np.full(grid.shape[1], x0, dtype=np.int64)] + [grid[i] for i in range(4)]
        ok = np.ones(grid.shape[1], dtype=bool)
        for f in forms:
            val = np.zeros(grid.shape[1], dtype=np.int64)
            for (i, j), c in f.items():
                val = (val + c * (xs[i] * xs[j] % m)) % m
            ok &= val == 0
        prim = np.zeros(grid.shape[1], dtype=bool)
        for x in xs:
            prim |= x % p != 0
        count += int(np.count_nonzero(ok & prim))
    return count
