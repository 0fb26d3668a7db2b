"""Pencils of quadratic forms in five variables over Q.

The characteristic form of a pencil ``(q1, q2)`` is the binary quintic
``det(mu*M1 + nu*M2)``; its zero scheme S_X in P^1 controls smoothness,
the rank-4 members and diagonalizability of the base locus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

import mpmath

from . import linalg
from .arith import SquareClass, divisors_of, squarefree_part
from .linalg import Matrix
from .polyexpr import Poly, parse_poly

N = 5
MONOMIALS: tuple[tuple[int, int], ...] = tuple((i, j) for i in range(N) for j in range(i, N))


class ConeOrDegenerate(ValueError):
    """The characteristic form vanishes identically."""


class PencilDomainError(ValueError):
    pass


class NotSplit(Exception):
    """S_X has non-rational points, so no simultaneous diagonalization over Q exists."""


@dataclass(frozen=True)
class QuadForm5:
    """Quadratic form ``x^T G x`` in T0..T4 with symmetric rational Gram matrix."""

    gram: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        g = tuple(tuple(Fraction(x) for x in row) for row in self.gram)
        if len(g) != N or any(len(r) != N for r in g):
            raise PencilDomainError("Gram matrix must be 5x5")
        if any(g[i][j] != g[j][i] for i in range(N) for j in range(N)):
            raise PencilDomainError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence) -> "QuadForm5":
        """Build from the 15 coefficients of T0^2, T0T1, ..., T4^2 (i <= j order)."""
        if len(coeffs) != len(MONOMIALS):
            raise PencilDomainError(f"expected 15 coefficients, got {len(coeffs)}")
        g = [[Fraction(0)] * N for _ in range(N)]
        for (i, j), c in zip(MONOMIALS, coeffs):
            c = Fraction(c)
            if i == j:
                g[i][i] = c
            else:
                g[i][j] = g[j][i] = c / 2
        return cls(tuple(map(tuple, g)))

    @classmethod
    def from_poly(cls, p: Poly) -> "QuadForm5":
        coeffs = [Fraction(0)] * len(MONOMIALS)
        index = {m: k for k, m in enumerate(MONOMIALS)}
        for mono, c in p.items():
            if sum(mono) != 2:
                raise PencilDomainError("expression is not a quadratic form")
            idx = [i for i, e in enumerate(mono) for _ in range(e)]
            coeffs[index[(idx[0], idx[1])]] += c
        return cls.from_coeffs(coeffs)

    @classmethod
    def parse(cls, text: str) -> "QuadForm5":
        return cls.from_poly(parse_poly(text))

    @classmethod
    def diagonal(cls, entries: Sequence) -> "QuadForm5":
        return cls(tuple(tuple(Fraction(entries[i]) if i == j else Fraction(0) for j in range(N)) for i in range(N)))

    @property
    def matrix(self) -> Matrix:
        return [list(r) for r in self.gram]

    def coeffs(self) -> list[Fraction]:
        return [self.gram[i][j] * (1 if i == j else 2) for i, j in MONOMIALS]

    def integer_coeffs(self) -> list[int]:
        """Primitive integral rescaling of the monomial coefficients."""
        cs = self.coeffs()
        den = lcm(*(c.denominator for c in cs))
        ints = [int(c * den) for c in cs]
        g = 0
        for x in ints:
            g = gcd(g, x)
        return [x // g for x in ints] if g else ints

    def __call__(self, x: Sequence) -> Fraction:
        x = [Fraction(v) for v in x]
        return sum((self.gram[i][j] * x[i] * x[j] for i in range(N) for j in range(N)), Fraction(0))

    def transform(self, p: Matrix) -> "QuadForm5":
        """Gram matrix ``P^T G P`` (substitute x = P y)."""
        return QuadForm5(tuple(map(tuple, linalg.congruent(self.matrix, p))))

    def rank(self) -> int:
        return linalg.rank(self.matrix)

    def scaled(self, c) -> "QuadForm5":
        c = Fraction(c)
        return QuadForm5(tuple(tuple(c * x for x in r) for r in self.gram))

    def __add__(self, other: "QuadForm5") -> "QuadForm5":
        return QuadForm5(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.gram, other.gram)))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.gram for x in r)

    def variables(self) -> set[int]:
        return {i for i in range(N) if any(self.gram[i][j] != 0 for j in range(N))}


@dataclass(frozen=True)
class Pencil:
    q1: QuadForm5
    q2: QuadForm5

    def __post_init__(self):
        if self.q1.is_zero() and self.q2.is_zero():
            raise PencilDomainError("both forms are zero")

    def member(self, point: tuple[Fraction, Fraction]) -> QuadForm5:
        mu, nu = point
        return self.q1.scaled(mu) + self.q2.scaled(nu)

    def recombine(self, m: Sequence[Sequence]) -> "Pencil":
        """New basis ``(a q1 + b q2, c q1 + d q2)`` for ``m = [[a, b], [c, d]]``."""
        (a, b), (c, d) = m
        return Pencil(self.member((a, b)), self.member((c, d)))

    def transform(self, p: Matrix) -> "Pencil":
        return Pencil(self.q1.transform(p), self.q2.transform(p))

    def contains(self, x: Sequence) -> bool:
        return self.q1(x) == 0 and self.q2(x) == 0


# --------------------------------------------------------------------------
# univariate helpers (coefficient lists, lowest degree first)


def _trim(p: list[Fraction]) -> list[Fraction]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _peval(p: Sequence[Fraction], t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * t + c
    return acc


def _pdivmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        f = r[-1] / b[-1]
        q[k] = f
        for i, c in enumerate(b):
            r[i + k] -= f * c
        r = _trim(r)
    return _trim(q), r


def _pgcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return [c / a[-1] for c in a] if a else a


def _pderiv(a: list[Fraction]) -> list[Fraction]:
    return _trim([i * c for i, c in enumerate(a)][1:])


def squarefree_decomposition(f: list[Fraction]) -> list[list[Fraction]]:
    """Yun's algorithm: returns [g1, g2, ...] with f = c * prod g_i^i, g_i squarefree."""
    f = _trim(f)
    if len(f) <= 1:
        return []
    out = []
    a = _pgcd(f, _pderiv(f))
    b = _pdivmod(f, a)[0]
    c = _pdivmod(_pderiv(f), a)[0]
    d = _trim([x - y for x, y in itertools.zip_longest(c, _pderiv(b), fillvalue=Fraction(0))])
    while len(b) > 1:
        a = _pgcd(b, d)
        out.append([x / a[-1] for x in a] if a else a)
        b = _pdivmod(b, a)[0]
        c = _pdivmod(d, a)[0]
        d = _trim([x - y for x, y in itertools.zip_longest(c, _pderiv(b), fillvalue=Fraction(0))])
    while out and len(out[-1]) <= 1:
        out.pop()
    return out


def _rational_roots(h: list[Fraction]) -> list[Fraction]:
    """Rational roots of a squarefree polynomial (numeric isolation + exact check)."""
    h = _trim(h)
    if len(h) <= 1:
        return []
    den = lcm(*(c.denominator for c in h))
    ints = [int(c * den) for c in h]
    found: list[Fraction] = []
    if ints[0] == 0:
        found.append(Fraction(0))
        while ints[0] == 0:
            ints = ints[1:]
        if len(ints) <= 1:
            return found
    lead = abs(ints[-1])
    try:
        with mpmath.workdps(60):
            approx = mpmath.polyroots(list(reversed(ints)), maxsteps=400, extraprec=400)
    except mpmath.libmp.NoConvergence:
        import numpy as np

        approx = list(np.roots(list(reversed([float(c) for c in ints]))))
    poly = [Fraction(c) for c in ints]
    for z in approx:
        if abs(mpmath.im(z)) > 1e-6 * (1 + abs(z)):
            continue
        t = mpmath.re(z)
        best = Fraction(mpmath.nstr(t, 50, strip_zeros=False)).limit_denominator(lead)
        cands = [best] + [Fraction(int(mpmath.nint(t * s)), s) for s in divisors_of(lead)]
        for cand in cands:
            # the candidate must be the root this approximation points at
            if abs(cand - Fraction(mpmath.nstr(t, 30))) > Fraction(1, 10**6) * (1 + abs(cand)):
                continue
            if cand not in found and _peval(poly, cand) == 0:
                found.append(cand)
                break
    return sorted(found)


# --------------------------------------------------------------------------
# the characteristic quintic and S_X


@dataclass(frozen=True)
class CharQuintic:
    """``sum_k coeffs[k] * mu^k * nu^(5-k)``."""

    coeffs: tuple[Fraction, ...]

    def __call__(self, mu, nu) -> Fraction:
        mu, nu = Fraction(mu), Fraction(nu)
        return sum((c * mu**k * nu ** (5 - k) for k, c in enumerate(self.coeffs)), Fraction(0))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)


SchemePoint = tuple[Fraction, Fraction]
INF_POINT: SchemePoint = (Fraction(1), Fraction(0))


def normalize_point(mu, nu) -> SchemePoint:
    mu, nu = Fraction(mu), Fraction(nu)
    if nu == 0:
        if mu == 0:
            raise PencilDomainError("(0:0) is not a point of P^1")
        return INF_POINT
    return (mu / nu, Fraction(1))


@dataclass
class SchemeSX:
    rational_points: list[tuple[SchemePoint, int]]
    quadratic_factors: list[tuple[tuple[Fraction, Fraction, Fraction], SquareClass, int]] = field(default_factory=list)
    residual: list[tuple[tuple[Fraction, ...], int]] = field(default_factory=list)

    @property
    def reduced(self) -> bool:
        return (
            all(m == 1 for _, m in self.rational_points)
            and all(m == 1 for *_, m in self.quadratic_factors)
            and all(m == 1 for _, m in self.residual)
        )

    @property
    def split(self) -> bool:
        return self.reduced and len(self.rational_points) == 5

    @property
    def points(self) -> list[SchemePoint]:
        return [s for s, _ in self.rational_points]

    def degree(self) -> int:
        return (
            sum(m for _, m in self.rational_points)
            + sum(2 * m for *_, m in self.quadratic_factors)
            + sum((len(c) - 1) * m for c, m in self.residual)
        )


def char_form(p: Pencil) -> CharQuintic:
    m1, m2 = p.q1.matrix, p.q2.matrix
    # sample det(t*M1 + M2) at t = 0..5 and interpolate
    values = []
    for t in range(6):
        m = [[t * a + b for a, b in zip(r1, r2)] for r1, r2 in zip(m1, m2)]
        values.append(linalg.det(m))
    vander = [[Fraction(t) ** k for k in range(6)] for t in range(6)]
    coeffs = linalg.matvec(linalg.inverse(vander), values)
    c = CharQuintic(tuple(coeffs))
    if c.is_zero():
        raise ConeOrDegenerate("det(mu*Q1 + nu*Q2) vanishes identically")
    return c


def is_cone(p: Pencil) -> bool:
    """True iff the two Gram matrices have a common kernel vector."""
    return linalg.rank(p.q1.matrix + p.q2.matrix) < N


def scheme_points(c: CharQuintic) -> SchemeSX:
    if c.is_zero():
        raise ConeOrDegenerate("zero characteristic form")
    f = _trim(list(c.coeffs))
    out = SchemeSX(rational_points=[])
    inf_mult = 5 - (len(f) - 1)
    for i, g in enumerate(squarefree_decomposition(f), start=1):
        if len(g) <= 1:
            continue
        rest = g
        for r in _rational_roots(g):
            out.rational_points.append(((r, Fraction(1)), i))
            rest = _pdivmod(rest, [-r, Fraction(1)])[0]
        if len(rest) == 3:
            c0, c1, c2 = rest
            # homogeneous a mu^2 + b mu nu + c nu^2 with a=c2, b=c1, c=c0
            out.quadratic_factors.append(((c2, c1, c0), SquareClass.of(c1 * c1 - 4 * c2 * c0), i))
        elif len(rest) > 3:
            out.residual.append((tuple(rest), i))
    if inf_mult:
        out.rational_points.append((INF_POINT, inf_mult))
    return out


def is_nonsingular_dp4(p: Pencil) -> bool:
    if is_cone(p):
        return False
    try:
        c = char_form(p)
    except ConeOrDegenerate:
        return False
    return scheme_points(c).reduced


def rank_at(p: Pencil, s: SchemePoint) -> int:
    m = p.member(s)
    if linalg.det(m.matrix) != 0:
        raise PencilDomainError(f"{s} is not a root of the characteristic form")
    return m.rank()


# --------------------------------------------------------------------------
# diagonalization and discriminants


def lagrange_diagonalize(gram: Matrix, order: Optional[Sequence[int]] = None) -> tuple[Matrix, list[Fraction]]:
    """Congruence-diagonalize a symmetric matrix: returns (P, d) with P^T G P = diag(d)."""
    n = len(gram)
    g = [row[:] for row in gram]
    p = linalg.identity(n)
    order = list(order) if order is not None else list(range(n))
    remaining = list(order)
    diag_order: list[int] = []

    def col_op(dst: int, src: int, f: Fraction):
        # e_dst <- e_dst + f * e_src, applied as congruence
        for r in range(n):
            g[r][dst] += f * g[r][src]
        for c in range(n):
            g[dst][c] += f * g[src][c]
        for r in range(n):
            p[r][dst] += f * p[r][src]

    while remaining:
        piv = next((i for i in remaining if g[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in remaining for j in remaining if i != j and g[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            col_op(i, j, Fraction(1))
            piv = i
        for m in remaining:
            if m != piv and g[piv][m] != 0:
                col_op(m, piv, -g[piv][m] / g[piv][piv])
        remaining.remove(piv)
        diag_order.append(piv)
    return p, [g[i][i] for i in range(n)]


def rank4_discriminant(q: QuadForm5, order: Optional[Sequence[int]] = None) -> SquareClass:
    if q.rank() != 4:
        raise PencilDomainError(f"form has rank {q.rank()}, expected 4")
    _, d = lagrange_diagonalize(q.matrix, order)
    prod = Fraction(1)
    for x in d:
        if x != 0:
            prod *= x
    return SquareClass.of(prod)


def kernel_vector(q: QuadForm5) -> list[int]:
    ker = linalg.nullspace(q.matrix)
    if len(ker) != 1:
        raise PencilDomainError("expected a one-dimensional kernel")
    return linalg.primitive_integer_vector(ker[0])


@dataclass
class Diagonalization:
    basis: Matrix  # columns are the cusp vectors
    a: list[Fraction]
    b: list[Fraction]
    points: list[SchemePoint]


def simultaneous_diagonalize(p: Pencil) -> Diagonalization:
    if not is_nonsingular_dp4(p):
        raise PencilDomainError("pencil is singular")
    sx = scheme_points(char_form(p))
    if not sx.split:
        raise NotSplit("S_X is not split over Q")
    cols = [kernel_vector(p.member(s)) for s in sx.points]
    basis = [[Fraction(cols[j][i]) for j in range(N)] for i in range(N)]
    d1 = linalg.congruent(p.q1.matrix, basis)
    d2 = linalg.congruent(p.q2.matrix, basis)
    return Diagonalization(basis, [d1[i][i] for i in range(N)], [d2[i][i] for i in range(N)], sx.points)


def discriminants(p: Pencil) -> list[tuple[SchemePoint, SquareClass]]:
    """Rank-4 discriminant class at every rational point of S_X (all five when split)."""
    if not is_nonsingular_dp4(p):
        raise PencilDomainError("pencil is singular")
    sx = scheme_points(char_form(p))
    return [(s, rank4_discriminant(p.member(s))) for s in sx.points]


def discriminant_vector(p: Pencil) -> list[SquareClass]:
    d = discriminants(p)
    if len(d) != 5:
        raise NotSplit("discriminant vector needs a split S_X")
    return [c for _, c in d]


def product_class(classes: Sequence[SquareClass]) -> SquareClass:
    prod = 1
    for c in classes:
        prod *= c.value
    return SquareClass(squarefree_part(prod))
