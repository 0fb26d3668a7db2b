"""Real points: emptiness, component structure and sample points."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .. import linalg
from ..arith import INFINITY, hilbert
from ..brauer import BrauerClassRep, EvalValue, QUOTIENT_CHOICES
from ..pencil import NotSplit, Pencil, char_form, discriminants, simultaneous_diagonalize
from ..surface import Surface
from .points import private_shape

TOL = 1e-9
DPS = 50


class NoRealPoints(Exception):
    def __init__(self, member):
        super().__init__(f"pencil member {member} is definite")
        self.member = member


@dataclass(frozen=True)
class RealPoint:
    """A real point given by rational coordinates plus square roots of rational radicands.

    ``coords[i]`` is either a Fraction or a pair ``(sign, radicand)`` meaning
    ``sign * sqrt(radicand)``; purely numeric points store floats.
    """

    coords: tuple

    def numeric(self) -> list:
        out = []
        with mpmath.workdps(DPS):
            for c in self.coords:
                if isinstance(c, tuple):
                    s, r = c
                    out.append(s * mpmath.sqrt(mpmath.mpf(r.numerator) / r.denominator))
                elif isinstance(c, Fraction):
                    out.append(mpmath.mpf(c.numerator) / c.denominator)
                else:
                    out.append(mpmath.mpf(c))
        return out

    def __str__(self) -> str:
        parts = []
        for c in self.coords:
            if isinstance(c, tuple):
                s, r = c
                parts.append(("-" if s < 0 else "") + f"sqrt({r})" if r else "0")
            else:
                parts.append(str(c))
        return "(" + " : ".join(parts) + ")"


@dataclass
class RealAnalysis:
    component_count: Optional[int]
    separating_function: str
    samples: list = field(default_factory=list)  # (RealPoint, EvalValue | None, label)
    arcs: list = field(default_factory=list)  # (lo, hi, values) for the ratio analysis
    method: str = ""

    @property
    def sample_values(self) -> set:
        return {v for _, v, _ in self.samples if v is not None}


# --------------------------------------------------------------------------
# definiteness


def _definite(m) -> bool:
    n = len(m)
    minors = [linalg.det([row[:k] for row in m[:k]]) for k in range(1, n + 1)]
    pos = all(d > 0 for d in minors)
    neg = all((d > 0) if k % 2 == 0 else (d < 0) for k, d in enumerate(minors, start=1))
    return pos or neg


def definite_member(p: Pencil) -> Optional[tuple[Fraction, Fraction]]:
    """A definite member of the pencil, tested once on every interval between real roots."""
    cf = char_form(p)
    coeffs = [float(c) for c in cf.coeffs]
    # roots in t = mu/nu of sum coeffs[k] t^k
    poly = list(reversed(coeffs))
    while poly and poly[0] == 0:
        poly = poly[1:]
    roots = sorted(r.real for r in np.roots(poly) if abs(r.imag) < 1e-7) if len(poly) > 1 else []
    tests = [Fraction(0)]
    if roots:
        tests += [Fraction(roots[0]).limit_denominator(10**6) - 1, Fraction(roots[-1]).limit_denominator(10**6) + 1]
        tests += [Fraction((a + b) / 2).limit_denominator(10**6) for a, b in zip(roots, roots[1:])]
    members = [(t, Fraction(1)) for t in tests] + [(Fraction(1), Fraction(0))]
    for mu, nu in members:
        if _definite(p.member((mu, nu)).matrix):
            return (mu, nu)
    return None


# --------------------------------------------------------------------------
# sampling


def _sign(x) -> int:
    return 0 if abs(x) < mpmath.mpf(10) ** (-(DPS - 10)) else (1 if x > 0 else -1)


def evaluate_real(c: BrauerClassRep, pt: RealPoint) -> Optional[EvalValue]:
    """ev at the real place from the sign of a defined quotient."""
    x = pt.numeric()
    rows = c.presentation.rows
    for i, j in QUOTIENT_CHOICES:
        with mpmath.workdps(DPS):
            num = sum(mpmath.mpf(a.numerator) / a.denominator * v for a, v in zip(rows[0][i], x))
            den = sum(mpmath.mpf(a.numerator) / a.denominator * v for a, v in zip(rows[1][j], x))
        sn, sd = _sign(num), _sign(den)
        if sn and sd:
            return EvalValue.ZERO if hilbert(sn * sd, c.D, INFINITY) == 1 else EvalValue.HALF
    return None


def _private_sample(shape, free_vals: Sequence[Fraction], signs=(1, 1)) -> Optional[RealPoint]:
    m = dict(zip(shape.free, free_vals))
    out: list = [None] * 5
    for i, v in m.items():
        out[i] = Fraction(v)
    for k, (priv, lead, rest) in enumerate(zip(shape.priv, shape.lead, shape.rest)):
        val = sum(c * m[i] * m[j] for (i, j), c in rest.items())
        rad = Fraction(-val, lead)
        if rad < 0:
            return None
        out[priv] = (signs[k], rad)
    if all((c == 0) if isinstance(c, Fraction) else c[1] == 0 for c in out):
        return None
    return RealPoint(tuple(out))


def _numeric_sample(p: Pencil, free_vals: Sequence[float]) -> list[RealPoint]:
    """Fix T0, T1, T2 and solve the two conics in (T3, T4) through a resultant."""
    g1, g2 = (np.array([[float(x) for x in r] for r in q.gram]) for q in (p.q1, p.q2))
    a = np.array(list(free_vals) + [0.0, 0.0])

    def coeffs(g):
        # q(a + u e3 + v e4) = A u^2 + 2B uv + C v^2 + 2(D u + E v) + F
        return (g[3, 3], g[3, 4], g[4, 4], g[3] @ a, g[4] @ a, a @ g @ a)

    out = []
    c1, c2 = coeffs(g1), coeffs(g2)
    # quadratics in v with coefficients polynomial in u (numpy poly1d)
    def in_v(c):
        A, B, C, D, E, F = c
        return (np.poly1d([C]), np.poly1d([2 * B, 2 * E]), np.poly1d([A, 2 * D, F]))

    a2, a1, a0 = in_v(c1)
    b2, b1, b0 = in_v(c2)
    res = (a2 * b0 - a0 * b2) ** 2 - (a2 * b1 - a1 * b2) * (a1 * b0 - a0 * b1)
    if res.order < 1 or not np.any(res.coeffs):
        return out
    for u in np.roots(res.coeffs):
        if abs(u.imag) > 1e-9:
            continue
        u = u.real
        qa = [a2(u), a1(u), a0(u)]
        for v in np.roots(qa if abs(qa[0]) > 1e-12 else qa[1:]):
            if abs(v.imag) > 1e-9:
                continue
            x = list(free_vals) + [u, v.real]
            if abs(np.array(x) @ g1 @ np.array(x)) < TOL and abs(np.array(x) @ g2 @ np.array(x)) < TOL:
                out.append(RealPoint(tuple(float(t) for t in x)))
    return out


def sample_real_points(surface: Surface, count: int = 200, seed: int = 0, ratio=None) -> list[RealPoint]:
    """Seeded random real points; exact radicand form when the surface has private variables."""
    rng = random.Random(seed)
    shape = private_shape(surface)
    pts = []
    for _ in range(count):
        vals = [Fraction(rng.randint(-1000, 1000), rng.randint(1, 1000)) for _ in range(3)]
        if ratio is not None:
            (i, j), r = ratio
            if shape is None or i not in shape.free or j not in shape.free:
                return pts
            m = dict(zip(shape.free, vals))
            m[i], m[j] = Fraction(r), Fraction(1)
            vals = [m[f] for f in shape.free]
        if shape is not None:
            for signs in ((1, 1), (1, -1)):
                pt = _private_sample(shape, vals, signs)
                if pt is not None:
                    pts.append(pt)
        else:
            pts += _numeric_sample(surface.pencil, [float(v) for v in vals])
    return pts


# --------------------------------------------------------------------------
# component analysis


def _ratio_structure(c: BrauerClassRep):
    """Express l11, l12, l21, l22 through two coordinates (T_i, T_j) if possible."""
    rows = c.presentation.rows
    forms = [rows[0][0], rows[0][1], rows[1][0], rows[1][1]]
    support = sorted({k for f in forms for k in range(5) if f[k] != 0})
    if len(support) != 2:
        return None
    i, j = support
    return (i, j), [(f[i], f[j]) for f in forms]


def _binary_sign(form, r) -> int:
    """Sign of a*r + b at a finite ratio r, or of a at r = infinity (None)."""
    a, b = form
    v = a if r is None else a * r + b
    return (v > 0) - (v < 0)


def ratio_arcs(c: BrauerClassRep):
    """Feasible ratio arcs on P^1(R) and the ev values over each, for D < 0."""
    st = _ratio_structure(c)
    if st is None or c.D > 0:
        return None
    (i, j), forms = st
    crit = sorted({Fraction(-b, a) for a, b in forms if a != 0})
    # sample points: critical values and midpoints, plus beyond the ends and infinity
    pts: list = []
    ext = [crit[0] - 1] + [x for pair in zip(crit, [(a + b) / 2 for a, b in zip(crit, crit[1:])] + [None]) for x in pair if x is not None] + [crit[-1] + 1] if crit else [Fraction(0)]
    pts = ext + [None]

    def feasible(r):
        s = [_binary_sign(f, r) for f in forms]
        return s[0] * s[1] >= 0 and s[2] * s[3] >= 0

    def value(r):
        s = [_binary_sign(f, r) for f in forms]
        for a, b in ((0, 2), (0, 3), (1, 2), (1, 3)):
            if s[a] and s[b]:
                return EvalValue.ZERO if s[a] * s[b] > 0 else EvalValue.HALF
        return None

    flags = [feasible(r) for r in pts]
    n = len(pts)
    # cyclic order on P^1: the finite samples then infinity, wrapping around
    arcs = []
    start = next((k for k in range(n) if not flags[k]), None)
    if start is None:
        return (i, j), [(None, None, {value(r) for r in pts if value(r) is not None})]
    k = (start + 1) % n
    cur = []
    for _ in range(n):
        if flags[k]:
            cur.append(pts[k])
        elif cur:
            arcs.append(cur)
            cur = []
        k = (k + 1) % n
    if cur:
        arcs.append(cur)
    out = []
    for arc in arcs:
        vals = {value(r) for r in arc if value(r) is not None}
        out.append((arc[0], arc[-1], vals))
    return (i, j), out


def _fmt_ratio(r) -> str:
    return "inf" if r is None else str(r)


def real_analysis(surface: Surface, c: Optional[BrauerClassRep] = None, samples: int = 200, seed: int = 0) -> RealAnalysis:
    member = definite_member(surface.pencil)
    if member is not None:
        raise NoRealPoints(member)
    pts = sample_real_points(surface, samples, seed)
    result = RealAnalysis(None, "unknown", method="sampling")
    arcs = ratio_arcs(c) if c is not None else None
    if arcs is not None:
        (i, j), arc_list = arcs
        result.component_count = len(arc_list)
        result.arcs = arc_list
        result.separating_function = "; ".join(
            f"T{i}/T{j} in [{_fmt_ratio(lo)}, {_fmt_ratio(hi)}]" for lo, hi, _ in arc_list
        )
        result.method = "ratio intervals"
        for lo, hi, _ in arc_list:
            if lo is not None and hi is not None:
                mid = (lo + hi) / 2
            elif lo is not None:
                mid = lo + 1
            else:
                mid = (hi or Fraction(0)) - 1
            pts += sample_real_points(surface, 20, seed + 1, ratio=((i, j), mid))
    else:
        try:
            diag = simultaneous_diagonalize(surface.pencil)
            classes = [cl for _, cl in discriminants(surface.pencil)]
            negatives = [k for k, cl in enumerate(classes) if cl.value < 0]
            if len(negatives) == 4:
                result.component_count = 2
                result.separating_function = _distinguished(diag)
            else:
                result.component_count = 1
                result.separating_function = f"{len(negatives)} negative rank-4 discriminants"
            result.method = "discriminant signs"
        except (NotSplit, ValueError):
            pass
    seen = {}
    for pt in pts:
        v = evaluate_real(c, pt) if c is not None else None
        key = v
        if key not in seen:
            seen[key] = pt
            result.samples.append((pt, v, "sample"))
    return result


def _distinguished(diag) -> str:
    """Sign pair of the distinguished variables of two negative-discriminant members."""
    a, b = diag.a, diag.b
    dist = []
    for k, (mu, nu) in enumerate(diag.points):
        coeffs = [mu * ai + nu * bi for ai, bi in zip(a, b)]
        coeffs = [x for idx, x in enumerate(coeffs) if idx != k]
        idxs = [idx for idx in range(5) if idx != k]
        neg = [idx for idx, x in zip(idxs, coeffs) if x < 0]
        pos = [idx for idx, x in zip(idxs, coeffs) if x > 0]
        if len(neg) == 1:
            dist.append(neg[0])
        elif len(pos) == 1:
            dist.append(pos[0])
    pair = sorted(set(dist))[:2]
    if len(pair) < 2:
        return "sign of a distinguished coordinate ratio"
    return f"sign of y{pair[0]}/y{pair[1]} in diagonal coordinates"
