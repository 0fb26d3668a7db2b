"""p-adic points: residue-class search with Hensel certificates, and the image
of the local evaluation map at a prime."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

import numpy as np

from .. import linalg
from ..arith import Place, hilbert, valuation
from ..brauer import BrauerClassRep, EvalValue, Indeterminate, QUOTIENT_CHOICES, eval_at_rational_point, is_split_at
from ..pencil import MONOMIALS
from ..surface import Surface

DEFAULT_BUDGET = 200_000
LEVEL_CAP = 10**7  # residue vectors enumerated at the first level


def _vp(n: int, p: int, cap: int) -> int:
    """Valuation of an integer known modulo p**cap (cap if it vanishes there)."""
    n %= p**cap
    if n == 0:
        return cap
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class IntSystem:
    """The two defining forms with primitive integer monomial coefficients."""

    def __init__(self, surface: Surface):
        self.forms = [
            [(i, j, c) for (i, j), c in zip(MONOMIALS, q.integer_coeffs()) if c]
            for q in (surface.pencil.q1, surface.pencil.q2)
        ]

    def values(self, x: Sequence[int]) -> tuple[int, int]:
        return tuple(sum(c * x[i] * x[j] for i, j, c in f) for f in self.forms)

    def jacobian(self, x: Sequence[int]) -> list[list[int]]:
        rows = []
        for f in self.forms:
            g = [0] * 5
            for i, j, c in f:
                if i == j:
                    g[i] += 2 * c * x[i]
                else:
                    g[i] += c * x[j]
                    g[j] += c * x[i]
            rows.append(g)
        return rows

    def hensel(self, x: Sequence[int], p: int, k: int) -> tuple[int, tuple[int, int]]:
        """Smallest valuation (capped at k) of a 2x2 Jacobian minor, with its columns."""
        J = self.jacobian(x)
        best = (k, (0, 1))
        for a, b in itertools.combinations(range(5), 2):
            m = J[0][a] * J[1][b] - J[0][b] * J[1][a]
            t = _vp(m, p, k)
            if t < best[0]:
                best = (t, (a, b))
                if t == 0:
                    break
        return best


@dataclass(frozen=True)
class PadicPointApprox:
    """Residues mod p^k of a primitive solution; a true p-adic point agrees to p^(k-t)."""

    p: int
    k: int
    coords: tuple[int, ...]
    minor: tuple[int, int]
    t: int

    @property
    def exact_precision(self) -> int:
        return self.k - self.t

    def check(self, system: IntSystem) -> bool:
        pk = self.p**self.k
        if all(c % self.p == 0 for c in self.coords):
            return False
        if any(v % pk for v in system.values(self.coords)):
            return False
        t, _ = system.hensel(self.coords, self.p, self.k)
        return t == self.t and self.k >= 2 * self.t + 1


def newton_lift(approx: PadicPointApprox, system: IntSystem, levels: int = 2) -> PadicPointApprox:
    """Newton iteration on the certifying minor until the forms vanish mod p^(k+levels)."""
    p, target = approx.p, approx.k + levels
    a, b = approx.minor
    x = list(approx.coords)
    for _ in range(4 * levels + 8):
        F = system.values(x)
        if all(v % p**target == 0 for v in F):
            break
        J = system.jacobian(x)
        m = [[J[0][a], J[0][b]], [J[1][a], J[1][b]]]
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        t = valuation(det, p)
        unit = det // p**t
        mod = p ** (target + t + 2)
        adj_f = [m[1][1] * F[0] - m[0][1] * F[1], -m[1][0] * F[0] + m[0][0] * F[1]]
        if any(v % p**t for v in adj_f):
            raise ArithmeticError("Newton step left the certified region")
        inv = pow(unit, -1, mod)
        delta = [(-(v // p**t) * inv) % mod for v in adj_f]
        x[a] = (x[a] + delta[0]) % mod
        x[b] = (x[b] + delta[1]) % mod
    else:
        raise ArithmeticError("Newton iteration did not converge")
    pk = p**target
    x = [v % pk for v in x]
    t, minor = system.hensel(x, p, target)
    return PadicPointApprox(p, target, tuple(x), minor, t)


# --------------------------------------------------------------------------
# residue-class tree


def _level_one(system: IntSystem, p: int, chart: int) -> list[tuple[int, ...]]:
    free = list(range(chart + 1, 5))
    if p ** len(free) > LEVEL_CAP:
        raise OverflowError(f"{p}^{len(free)} residue vectors exceed the enumeration cap")
    grids = np.meshgrid(*[np.arange(p, dtype=np.int64)] * len(free), indexing="ij") if free else []
    shape = grids[0].shape if free else ()
    coords = []
    for i in range(5):
        if i < chart:
            coords.append(np.zeros(shape, dtype=np.int64))
        elif i == chart:
            coords.append(np.ones(shape, dtype=np.int64))
        else:
            coords.append(grids[free.index(i)])
    mask = np.ones(shape, dtype=bool)
    for f in system.forms:
        val = np.zeros(shape, dtype=np.int64)
        for i, j, c in f:
            val = (val + (c % p) * coords[i] % p * coords[j]) % p
        mask &= val == 0
    if not free:
        return [tuple(int(v) for v in coords)] if bool(mask) else []
    stacked = np.stack([np.broadcast_to(v, shape) for v in coords], axis=-1)[mask]
    return [tuple(int(v) for v in row) for row in stacked]


def _children(system: IntSystem, p: int, x: Sequence[int], k: int, chart: int) -> list[tuple[int, ...]]:
    pk = p**k
    F = system.values(x)
    rhs = [(-(v // pk)) % p for v in F]
    J = system.jacobian(x)
    cols = [i for i in range(5) if i != chart]
    A = [[row[i] % p for i in cols] for row in J]
    sol = linalg.solve_affine_mod_p(A, rhs, p)
    if sol is None:
        return []
    part, ker = sol
    out = []
    for coeffs in itertools.product(range(p), repeat=len(ker)):
        z = list(part)
        for a, v in zip(coeffs, ker):
            if a:
                z = [(zi + a * vi) % p for zi, vi in zip(z, v)]
        full = list(x)
        for i, zi in zip(cols, z):
            full[i] += pk * zi
        out.append(tuple(full))
    return out


@dataclass
class _Node:
    x: tuple[int, ...]
    k: int
    chart: int


@dataclass(frozen=True)
class Soluble:
    point: PadicPointApprox


@dataclass(frozen=True)
class Insoluble:
    depth: int  # deepest level with a surviving residue; nothing survives mod p^(depth+1)


@dataclass(frozen=True)
class Budget:
    detail: str = ""


def _roots(system: IntSystem, p: int) -> Iterable[_Node]:
    for chart in range(5):
        for x in _level_one(system, p, chart):
            yield _Node(x, 1, chart)


def padic_solubility(surface: Surface, p: int, budget: int = DEFAULT_BUDGET, max_depth: int = 12):
    """Soluble with a certified approximation, Insoluble when every residue branch dies, or Budget."""
    system = IntSystem(surface)
    try:
        frontier = list(_roots(system, p))
    except OverflowError as exc:
        return Budget(str(exc))
    used, depth = 0, 1
    while frontier:
        nxt = []
        for node in frontier:
            used += 1
            if used > budget:
                return Budget(f"node budget {budget} exhausted")
            t, minor = system.hensel(node.x, p, node.k)
            if node.k >= 2 * t + 1:
                pk = p**node.k
                return Soluble(PadicPointApprox(p, node.k, tuple(v % pk for v in node.x), minor, t))
            if node.k < max_depth:
                nxt += [_Node(y, node.k + 1, node.chart) for y in _children(system, p, node.x, node.k, node.chart)]
        if not nxt and any(n.k >= max_depth for n in frontier):
            return Budget(f"depth cap {max_depth} reached")
        frontier = nxt
        depth += 1
    return Insoluble(depth - 1)


# --------------------------------------------------------------------------
# evaluation image


def _integral_form(l: Sequence[Fraction]) -> tuple[Fraction, list[int]]:
    den = lcm(*(Fraction(c).denominator for c in l))
    ints = [int(Fraction(c) * den) for c in l]
    from math import gcd

    g = 0
    for v in ints:
        g = gcd(g, v)
    g = g or 1
    return Fraction(g, den), [v // g for v in ints]


class _Evaluator:
    def __init__(self, c: BrauerClassRep, p: int):
        self.c, self.p = c, p
        rows = c.presentation.rows
        self.need = 3 if p == 2 else 1
        self.choices = []
        for i, j in QUOTIENT_CHOICES:
            s1, l1 = _integral_form(rows[0][i])
            s2, l2 = _integral_form(rows[1][j])
            self.choices.append((s1 / s2, l1, l2))

    def decide(self, x: Sequence[int], prec: int) -> Optional[EvalValue]:
        p = self.p
        pk = p**prec
        for const, l1, l2 in self.choices:
            n = sum(a * b for a, b in zip(l1, x)) % pk
            d = sum(a * b for a, b in zip(l2, x)) % pk
            v1, v2 = _vp(n, p, prec), _vp(d, p, prec)
            if prec - v1 < self.need or prec - v2 < self.need:
                continue
            q = const * Fraction(n, d)
            return EvalValue.ZERO if hilbert(q, self.c.D, Place(p)) == 1 else EvalValue.HALF
        return None


@dataclass
class ImageResult:
    p: int
    values: frozenset  # certified by a point
    possible: frozenset  # upper bound from the explored tree
    determinate: bool
    evidence: dict = field(default_factory=dict)
    nodes: int = 0
    depth: int = 0
    reason: str = ""


def _certify(system, ev, p, node: _Node, k_dec: int, value, limit: int, max_depth: int):
    """Depth-first search below a decided node for a Hensel-certified point inside it."""
    stack = [node]
    used = 0
    while stack and used < limit:
        n = stack.pop()
        used += 1
        t, minor = system.hensel(n.x, p, n.k)
        if n.k >= 2 * t + 1 and n.k - t >= k_dec:
            pk = p**n.k
            approx = PadicPointApprox(p, n.k, tuple(v % pk for v in n.x), minor, t)
            got = ev.decide(approx.coords, approx.exact_precision)
            if got is not None and (value is None or got == value):
                return approx, used
        if n.k < max_depth:
            stack += [_Node(y, n.k + 1, n.chart) for y in _children(system, p, n.x, n.k, n.chart)]
    return None, used


def eval_image_at_p(
    c: BrauerClassRep,
    surface: Surface,
    p: int,
    budget: int = DEFAULT_BUDGET,
    max_depth: Optional[int] = None,
    seeds: Sequence[Sequence[int]] = (),
) -> ImageResult:
    """Image of ev at p: certified values, an upper bound, and whether the two agree."""
    place = Place(p)
    max_depth = max_depth or (14 if p == 2 else 9)
    certified: dict = {}
    for pt in seeds:
        try:
            certified.setdefault(eval_at_rational_point(c, pt, place), ("rational point", tuple(pt)))
        except ArithmeticError:
            pass
    if is_split_at(c.D, place):
        sol = padic_solubility(surface, p, budget)
        if isinstance(sol, Soluble):
            certified.setdefault(EvalValue.ZERO, ("p-adic point", sol.point))
        vals = frozenset(certified)
        return ImageResult(p, vals, frozenset({EvalValue.ZERO}), vals == {EvalValue.ZERO}, certified, reason="split")
    system = IntSystem(surface)
    ev = _Evaluator(c, p)
    try:
        frontier = list(_roots(system, p))
    except OverflowError as exc:
        return ImageResult(p, frozenset(certified), frozenset({EvalValue.ZERO, EvalValue.HALF}), False, certified, reason=str(exc))
    possible: set = set()
    pending: dict = {}
    used, depth, complete = 0, 1, True
    both = {EvalValue.ZERO, EvalValue.HALF}
    while frontier and set(certified) != both:
        nxt = []
        for node in frontier:
            used += 1
            if used > budget:
                complete = False
                break
            val = ev.decide(node.x, node.k)
            if val is not None:
                possible.add(val)
                if val not in certified:
                    t, minor = system.hensel(node.x, p, node.k)
                    if node.k >= 2 * t + 1 and ev.decide(node.x, node.k - t) == val:
                        pk = p**node.k
                        certified[val] = ("p-adic point", PadicPointApprox(p, node.k, tuple(v % pk for v in node.x), minor, t))
                    else:
                        pending.setdefault(val, []).append(node)
                continue
            if node.k >= max_depth:
                complete = False
                continue
            nxt += [_Node(y, node.k + 1, node.chart) for y in _children(system, p, node.x, node.k, node.chart)]
        if not complete:
            break
        frontier = nxt
        depth += 1
    if frontier and set(certified) != both:
        complete = False
    for val, nodes in pending.items():
        for node in nodes:
            if val in certified or used > budget:
                break
            approx, n = _certify(system, ev, p, node, node.k, val, max(1000, (budget - used) // 4), max_depth + 4)
            used += n
            if approx is not None:
                certified[val] = ("p-adic point", approx)
    vals = frozenset(certified)
    if vals == both:
        return ImageResult(p, vals, vals, True, certified, used, depth, "both values attained")
    poss = frozenset(possible | set(certified)) if complete else frozenset(both)
    return ImageResult(p, vals, poss, complete and poss == vals, certified, used, depth,
                       "exhaustive" if complete else "budget or depth cap reached")


def approximation_near(
    c: BrauerClassRep, surface: Surface, p: int, x: Sequence[int], k: int, limit: int = DEFAULT_BUDGET
) -> tuple[PadicPointApprox, EvalValue]:
    """A certified p-adic point congruent to ``x`` mod p^k, with its evaluation.

    ``x`` must solve both equations mod p^k with a unit first coordinate.
    """
    system = IntSystem(surface)
    pk = p**k
    x = tuple(int(v) % pk for v in x)
    if x[0] % p == 0:
        raise ValueError("first coordinate must be a p-adic unit")
    inv = pow(x[0], -1, pk)
    x = tuple(v * inv % pk for v in x)
    if any(v % pk for v in system.values(x)):
        raise ValueError(f"{x} does not solve the equations mod {p}^{k}")
    ev = _Evaluator(c, p)
    approx, _ = _certify(system, ev, p, _Node(x, k, 0), k, None, limit, k + 12)
    if approx is None:
        raise Indeterminate(f"no certified point found below {x} mod {p}^{k}")
    return approx, ev.decide(approx.coords, approx.exact_precision)
