"""Rational points of bounded naive height."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Optional, Sequence

import numpy as np

from ..pencil import MONOMIALS, QuadForm5
from ..surface import Surface


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class ProjPoint:
    """Coprime integer coordinates with first nonzero entry positive."""

    coords: tuple[int, int, int, int, int]

    @classmethod
    def of(cls, xs: Sequence) -> "ProjPoint":
        fr = [Fraction(x) for x in xs]
        if len(fr) != 5 or all(x == 0 for x in fr):
            raise ValueError("need five coordinates, not all zero")
        den = lcm(*(x.denominator for x in fr))
        ints = [int(x * den) for x in fr]
        g = 0
        for x in ints:
            g = gcd(g, x)
        ints = [x // g for x in ints]
        if next(x for x in ints if x) < 0:
            ints = [-x for x in ints]
        return cls(tuple(ints))

    @property
    def height(self) -> int:
        return max(map(abs, self.coords))

    def __iter__(self):
        return iter(self.coords)

    def __str__(self) -> str:
        return " ".join(map(str, self.coords))


def _int_coeffs(q: QuadForm5) -> dict[tuple[int, int], int]:
    return {m: c for m, c in zip(MONOMIALS, q.integer_coeffs()) if c}


@dataclass(frozen=True)
class PrivateShape:
    """Form ``k`` equals ``c_k * x_{priv_k}^2 + F_k(free)`` and the other form avoids ``priv_k``."""

    free: tuple[int, int, int]
    priv: tuple[int, int]
    lead: tuple[int, int]
    rest: tuple[dict, dict]  # monomial coefficients over the free variables


def private_shape(surface: Surface) -> Optional[PrivateShape]:
    forms = [_int_coeffs(surface.pencil.q1), _int_coeffs(surface.pencil.q2)]

    def only_square(f, a):
        return f.get((a, a), 0) != 0 and all(a not in m for m in f if m != (a, a))

    def absent(f, a):
        return all(a not in m for m in f)

    for a, b in itertools.permutations(range(5), 2):
        if only_square(forms[0], a) and absent(forms[1], a) and only_square(forms[1], b) and absent(forms[0], b):
            free = tuple(i for i in range(5) if i not in (a, b))
            rest = tuple({m: c for m, c in f.items() if m != (v, v)} for f, v in zip(forms, (a, b)))
            return PrivateShape(free, (a, b), (forms[0][(a, a)], forms[1][(b, b)]), rest)
    return None


def _slice_values(rest: dict, free: Sequence[int], u: int, V: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Evaluate sum c_m x^m with x_free = (u, V, W), broadcasting V against W."""
    f0, f1, f2 = free
    vals = {f0: np.int64(u), f1: V, f2: W}
    out = np.zeros(np.broadcast_shapes(V.shape, W.shape), dtype=np.int64)
    for (i, j), c in rest.items():
        out = out + np.int64(c) * vals[i] * vals[j]
    return out


def _roots(target: np.ndarray, lead: int, H: int):
    """Indices (flattened) and roots r with ``lead * r^2 = target`` and 0 <= r <= H."""
    flat = target.ravel()
    idx = np.flatnonzero((flat * np.sign(lead) >= 0) & (flat % lead == 0))
    s = flat[idx] // lead
    keep = s <= H * H
    idx, s = idx[keep], s[keep]
    r = np.rint(np.sqrt(s.astype(np.float64))).astype(np.int64)
    keep = r * r == s
    return idx[keep], r[keep]


def _scan_chunk(args) -> list[tuple[int, ...]]:
    shape, H, outer = args
    rng = np.arange(-H, H + 1, dtype=np.int64)
    n = rng.size
    V, W = rng.reshape(-1, 1), rng.reshape(1, -1)
    a, b = shape.priv
    hits = []
    for u in outer:
        t1 = -_slice_values(shape.rest[0], shape.free, u, V, W)
        idx, r1 = _roots(t1, shape.lead[0], H)
        if idx.size == 0:
            continue
        vs, ws = rng[idx // n], rng[idx % n]
        t2 = -_slice_values(shape.rest[1], shape.free, u, vs, ws)
        idx2, r2 = _roots(t2, shape.lead[1], H)
        for k, rb in zip(idx2, r2):
            x = [0] * 5
            x[shape.free[0]], x[shape.free[1]], x[shape.free[2]] = u, int(vs[k]), int(ws[k])
            ra = int(r1[k])
            for sa in {ra, -ra}:
                for sb in {int(rb), -int(rb)}:
                    y = list(x)
                    y[a], y[b] = sa, sb
                    if any(y):
                        hits.append(tuple(y))
    return hits


def _normalize(hits) -> set[ProjPoint]:
    out = set()
    for y in hits:
        g = 0
        for v in y:
            g = gcd(g, v)
        if g == 1:
            out.add(ProjPoint.of(y))
    return out


def search_rational_points(surface: Surface, H: int, jobs: int = 1, budget: int = 2 * 10**6) -> list[ProjPoint]:
    """All points of X(Q) with coprime integer coordinates of max-norm at most H."""
    if H < 0:
        raise ValueError("height bound must be nonnegative")
    if H == 0:
        return []
    shape = private_shape(surface)
    if shape is None:
        return _search_fallback(surface, H, budget)
    coeff_max = max(abs(c) for part in shape.rest for c in part.values()) if any(shape.rest) else 1
    if 6 * coeff_max * H * H >= 2**62:
        raise BudgetExceeded("coefficients too large for 64-bit enumeration at this height")
    outer = list(range(0, H + 1))
    if jobs <= 1:
        hits = _scan_chunk((shape, H, outer))
    else:
        chunks = [outer[i::jobs * 4] for i in range(jobs * 4)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            hits = [h for part in pool.map(_scan_chunk, [(shape, H, c) for c in chunks]) for h in part]
    pts = _normalize(hits)
    q1, q2 = surface.pencil.q1, surface.pencil.q2
    return sorted(p for p in pts if q1(p.coords) == 0 and q2(p.coords) == 0)


def _search_fallback(surface: Surface, H: int, budget: int) -> list[ProjPoint]:
    """Loop over four coordinates and solve a quadratic for the fifth."""
    if (2 * H + 1) ** 4 > budget:
        raise BudgetExceeded(f"{(2 * H + 1) ** 4} candidates exceed the budget {budget}")
    p = surface.pencil
    form, v = None, None
    for f in (p.q1, p.q2, p.q1 + p.q2, p.q1 + p.q2.scaled(-1), p.q1 + p.q2.scaled(2)):
        v = next((i for i in range(5) if f.gram[i][i] != 0), None)
        if v is not None:
            form = f
            break
    if form is None:
        raise BudgetExceeded("no pencil member has a diagonal term")
    others = [i for i in range(5) if i != v]
    g = form.gram
    out = set()
    for ys in itertools.product(range(-H, H + 1), repeat=4):
        a = g[v][v]
        b = 2 * sum(g[v][i] * y for i, y in zip(others, ys))
        c = sum(g[i][j] * yi * yj for i, yi in zip(others, ys) for j, yj in zip(others, ys))
        disc = b * b - 4 * a * c
        if disc < 0:
            continue
        num, den = disc.numerator * disc.denominator, disc.denominator
        r = isqrt(num)
        if r * r != num:
            continue
        sq = Fraction(r, den)
        for root in {(-b + sq) / (2 * a), (-b - sq) / (2 * a)}:
            if root.denominator != 1 or abs(root) > H:
                continue
            x = [0] * 5
            for i, y in zip(others, ys):
                x[i] = y
            x[v] = int(root)
            if any(x) and p.contains(x):
                gg = 0
                for t in x:
                    gg = gcd(gg, t)
                if gg == 1:
                    out.add(ProjPoint.of(x))
    return sorted(out)
