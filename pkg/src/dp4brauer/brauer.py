"""The quaternion Brauer class attached to a two-row presentation, its local
evaluation, Brauer groups of split pencils, and constancy/witness criteria."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from math import isqrt, lcm
from typing import Optional, Sequence, Union

from . import linalg
from .arith import (
    ArithmeticDomainError,
    Place,
    SquareClass,
    factorize,
    hilbert,
    hilbert_vector,
    legendre,
    squarefree_part,
)
from .pencil import (
    Pencil,
    PencilDomainError,
    SchemePoint,
    discriminants,
    kernel_vector,
    lagrange_diagonalize,
    QuadForm5,
)
from .surface import FamilyParams, SDPresentation, Surface, eval_linear, linear_form


class Indeterminate(ArithmeticDomainError):
    """Every quotient l_1i/l_2j is undefined at the given point."""


class Unsupported(ValueError):
    pass


class EvalValue(IntEnum):
    """An element of {0, 1/2} in Q/Z, stored in half units."""

    ZERO = 0
    HALF = 1

    def __str__(self) -> str:
        return "0" if self is EvalValue.ZERO else "1/2"

    def __add__(self, other):  # addition in (1/2)Z/Z
        return EvalValue((int(self) + int(other)) % 2)


QUOTIENT_CHOICES = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class BrauerClassRep:
    presentation: SDPresentation
    quotient_choice: tuple[int, int] = (0, 0)

    @property
    def D(self) -> int:
        return self.presentation.D

    def quotient(self, x: Sequence, choice: tuple[int, int]) -> Optional[Fraction]:
        i, j = choice
        num = eval_linear(self.presentation.rows[0][i], x)
        den = eval_linear(self.presentation.rows[1][j], x)
        if num == 0 or den == 0:
            return None
        return num / den

    def quotients(self, x: Sequence) -> dict[tuple[int, int], Fraction]:
        """All defined quotients at ``x``, preferred choice first."""
        order = [self.quotient_choice] + [c for c in QUOTIENT_CHOICES if c != self.quotient_choice]
        out = {}
        for c in order:
            q = self.quotient(x, c)
            if q is not None:
                out[c] = q
        return out


def build_presentation_family(fp: FamilyParams) -> SDPresentation:
    """Rows ``-A_i(T0-T_i) * (T0+T_i) = T3^2 - D_i T4^2`` with D_1 = D and D_2 = B^2 D."""
    D, A1, A2, B = fp.as_tuple()
    if squarefree_part(D) == 1:
        raise PencilDomainError("D must be a non-square")
    if squarefree_part(D) != D:
        raise PencilDomainError("D must be squarefree")
    t3 = linear_form([0, 0, 0, 1, 0])
    t4 = linear_form([0, 0, 0, 0, 1])
    row1 = (linear_form([-A1, A1, 0, 0, 0]), linear_form([1, 1, 0, 0, 0]), t3, t4)
    row2 = (linear_form([-A2, 0, A2, 0, 0]), linear_form([1, 0, 1, 0, 0]), t3, t4)
    return SDPresentation(D, (row1, row2), (Fraction(D), Fraction(B * B * D)))


def eval_at_rational_point(c: BrauerClassRep, x: Sequence, place: Place) -> EvalValue:
    qs = c.quotients(x)
    if not qs:
        raise Indeterminate(f"no quotient l1i/l2j is defined at {tuple(x)}")
    q = next(iter(qs.values()))
    return EvalValue.ZERO if hilbert(q, c.D, place) == 1 else EvalValue.HALF


# --------------------------------------------------------------------------
# Brauer group of a split pencil


@dataclass(frozen=True)
class BrauerGroup:
    rank: int
    generators: tuple[tuple[int, ...], ...]
    kernel: tuple[tuple[int, ...], ...] = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return 2**self.rank


def _class_bits(classes: Sequence[SquareClass]) -> list[list[int]]:
    primes = sorted({p for c in classes for p in factorize(c.value)})
    return [[int(c.value < 0)] + [int(c.value % p == 0) for p in primes] for c in classes]


def _span(vectors: Sequence[tuple[int, ...]], n: int) -> set[tuple[int, ...]]:
    out = {(0,) * n}
    for v in vectors:
        out |= {tuple(a ^ b for a, b in zip(u, v)) for u in out}
    return out


def br_group_diagonal(classes: Sequence[SquareClass]) -> BrauerGroup:
    """Br(X)/Br(Q) as ker(o)/T for the five discriminant classes of a split pencil."""
    if len(classes) != 5 or any(not isinstance(c, SquareClass) for c in classes):
        raise PencilDomainError("need exactly five square classes")
    prod = 1
    for c in classes:
        prod *= c.value
    if squarefree_part(prod) != 1:
        raise PencilDomainError("the five discriminants of a pencil multiply to a square")
    bits = _class_bits(classes)
    kernel = sorted(
        (v for v in itertools.product((0, 1), repeat=5)
         if all(sum(vi * b[k] for vi, b in zip(v, bits)) % 2 == 0 for k in range(len(bits[0])))),
        key=lambda v: (sum(v), tuple(-x for x in v)),
    )
    trivial = [(1,) * 5] + [tuple(int(i == j) for j in range(5)) for i, c in enumerate(classes) if c.is_trivial]
    t_span = _span(trivial, 5)
    cosets: dict[frozenset, tuple[int, ...]] = {}
    for v in kernel:
        coset = frozenset(tuple(a ^ b for a, b in zip(v, t)) for t in t_span)
        if (0,) * 5 in coset or coset in cosets:
            continue
        # representative of smallest support, favouring pairs
        cosets[coset] = min(coset, key=lambda u: (sum(u) if sum(u) >= 2 else 9, tuple(-x for x in u)))
    kdim = len(kernel).bit_length() - 1
    tdim = len(t_span).bit_length() - 1
    gens = tuple(sorted(tuple(i for i, b in enumerate(rep) if b) for rep in cosets.values()))
    return BrauerGroup(kdim - tdim, gens, tuple(kernel))


def order4_criterion(p: Pencil) -> bool:
    """Three rational degenerate members with one common non-square discriminant class."""
    counts: dict[int, int] = {}
    for _, cls in discriminants(p):
        if not cls.is_trivial:
            counts[cls.value] = counts.get(cls.value, 0) + 1
    return any(n >= 3 for n in counts.values())


def triviality_criterion(classes: Sequence[SquareClass]) -> bool:
    if len(classes) != 5:
        raise PencilDomainError("need five square classes")
    if classes[0] != classes[1] or classes[0].is_trivial:
        raise PencilDomainError("the first two classes must agree and be non-square")
    return all(c.is_trivial for c in classes[2:])


# --------------------------------------------------------------------------
# presentations for general pencils


def _binary_isotropic(coeffs: Sequence[Fraction], bound: int) -> Optional[list[int]]:
    """Small nonzero integer zero of a diagonal form sum c_i y_i^2, or None."""
    den = lcm(*(c.denominator for c in coeffs))
    ints = [int(c * den) for c in coeffs]
    *head_c, last = ints
    heads = sorted(itertools.product(range(-bound, bound + 1), repeat=len(head_c)), key=lambda h: max(map(abs, h)))
    for head in heads:
        s = sum(a * y * y for a, y in zip(head_c, head))
        if last == 0:
            if s == 0 and any(head):
                return list(head) + [1]
            continue
        if (-s) % last:
            continue
        t = -s // last
        r = isqrt(t) if t >= 0 else -1
        if r >= 0 and r * r == t and (any(head) or r):
            return list(head) + [r]
    return None


def _split_rank4(q: QuadForm5, bound: int = 12):
    """Write q = c * (l1*l2 - l3^2 + d*l4^2); returns (c, (l1, l2, l3, l4), d) or None."""
    k = [Fraction(x) for x in kernel_vector(q)]
    g = q.matrix
    basis, diag = lagrange_diagonalize(g)
    nz = [i for i, a in enumerate(diag) if a != 0]
    if len(nz) != 4:
        return None
    y = _binary_isotropic([diag[i] for i in nz], bound)
    if y is None:
        return None
    cols = linalg.transpose(basis)
    v = [sum((yi * cols[i][r] for yi, i in zip(y, nz)), Fraction(0)) for r in range(5)]

    def bil(a, b):
        return sum((a[r] * g[r][s] * b[s] for r in range(5) for s in range(5)), Fraction(0))

    w = next(e for e in linalg.identity(5) if bil(v, e) != 0)
    bvw = bil(v, w)
    w = [wi - q(w) / (2 * bvw) * vi for wi, vi in zip(w, v)]
    # orthogonal complement of the hyperbolic plane, modulo the kernel
    perp = linalg.nullspace([linalg.matvec(g, v), linalg.matvec(g, w)])
    # complete k to a basis of perp and diagonalize there
    sub = [k] + [u for u in perp if linalg.rank([k, u]) == 2][:1]
    for u in perp:
        if len(sub) == 3:
            break
        if linalg.rank(sub + [u]) == len(sub) + 1:
            sub.append(u)
    u1, u2 = sub[1], sub[2]
    a11, a12, a22 = bil(u1, u1), bil(u1, u2), bil(u2, u2)
    if a11 == 0:
        if a22 != 0:
            u1, u2, a11, a22 = u2, u1, a22, a11
        else:
            u1 = [x + y for x, y in zip(u1, u2)]
            a11, a12 = bil(u1, u1), bil(u1, u2)
    u2 = [y - a12 / a11 * x for x, y in zip(u1, u2)]
    alpha, beta = a11, bil(u2, u2)
    frame = linalg.transpose([v, w, u1, u2, k])
    coords = linalg.inverse(frame)  # rows: coordinate functionals a, b, y1, y2, kernel
    # q = 2*bvw*a*b + alpha*y1^2 + beta*y2^2 = -alpha * ((-2 bvw/alpha) a b - y1^2 + (-beta/alpha) y2^2)
    l1 = tuple(-2 * bvw / alpha * x for x in coords[0])
    rows = (l1, tuple(coords[1]), tuple(coords[2]), tuple(coords[3]))
    return -alpha, rows, -beta / alpha


def derive_presentation(p: Pencil, bound: int = 12) -> Optional[SDPresentation]:
    """Presentation from two rational degenerate members with equal non-square class."""
    disc = discriminants(p)
    by_class: dict[int, list[SchemePoint]] = {}
    for pt, cls in disc:
        if not cls.is_trivial:
            by_class.setdefault(cls.value, []).append(pt)
    for D, pts in sorted(by_class.items(), key=lambda kv: (abs(kv[0]), kv[0])):
        if len(pts) < 2:
            continue
        rows, discs = [], []
        for pt in pts[:2]:
            split = _split_rank4(p.member(pt), bound)
            if split is None:
                break
            _, r, d = split
            rows.append(r)
            discs.append(d)
        else:
            return SDPresentation(D, tuple(rows), (discs[0], discs[1]))
    return None


# --------------------------------------------------------------------------
# constancy and witnesses


@dataclass(frozen=True)
class ProvedConstant:
    reason: str  # certificate kind tag
    detail: str = ""


@dataclass(frozen=True)
class ProvedWorking:
    reason: str
    detail: str = ""
    evidence: tuple = ()


@dataclass(frozen=True)
class Unknown:
    detail: str = ""


Verdict = Union[ProvedConstant, ProvedWorking, Unknown]


def primitive_gram(q: QuadForm5) -> list[list[int]]:
    """Integer matrix 2*G for the primitive integral rescaling of q."""
    c = q.integer_coeffs()
    from .pencil import MONOMIALS

    m = [[0] * 5 for _ in range(5)]
    for (i, j), a in zip(MONOMIALS, c):
        if i == j:
            m[i][i] = 2 * a
        else:
            m[i][j] = m[j][i] = a
    return m


def has_good_reduction(pres: SDPresentation, p: int) -> bool:
    """Both row forms keep rank 4 modulo the odd prime p."""
    return p != 2 and all(linalg.rank_mod_p(primitive_gram(pres.row_form(i)), p) == 4 for i in (0, 1))


def is_split_at(D: int, place: Place) -> bool:
    """Whether D is a square in Q_v (D squarefree, not 1)."""
    if place.is_infinite:
        return D > 0
    p = place.p
    if D % p == 0:
        return False
    if p == 2:
        return D % 8 == 1
    return legendre(D, p) == 1


def ramified_congruence(fp: FamilyParams, p: int) -> bool:
    D, A1, A2, B = fp.as_tuple()
    return (
        p != 2
        and squarefree_part(D) == D
        and D % p == 0
        and B % p != 0
        and A1 % p != 0
        and legendre(-A1, p) == 1
        and (A1 - A2) % p == 0
    )


def constancy_certificate(c: BrauerClassRep, surface: Surface, place: Place) -> Union[ProvedConstant, Unknown]:
    pres = c.presentation
    if not place.is_infinite and has_good_reduction(pres, place.p):
        return ProvedConstant("good-reduction", f"both row forms have rank 4 mod {place.p}")
    if is_split_at(c.D, place):
        return ProvedConstant("split", f"{place} splits in Q(sqrt({c.D}))")
    if surface.family is not None and not place.is_infinite and ramified_congruence(surface.family, place.p):
        return ProvedConstant("ramified-congruence", f"(-A1/{place.p}) = 1 and A1 = A2 mod {place.p}")
    return Unknown("no constancy certificate applies")


@dataclass(frozen=True)
class SignAutomorphism:
    flips: tuple[bool, bool, bool, bool, bool]

    def __post_init__(self):
        if len(self.flips) != 5:
            raise ValueError("need five flips")
        # normal form modulo the global flip: T0 unflipped
        if self.flips[0]:
            object.__setattr__(self, "flips", tuple(not f for f in self.flips))

    @classmethod
    def of(cls, *indices: int) -> "SignAutomorphism":
        return cls(tuple(i in indices for i in range(5)))

    def apply(self, x: Sequence) -> tuple:
        return tuple(-a if f else a for a, f in zip(x, self.flips))

    @staticmethod
    def all() -> list["SignAutomorphism"]:
        return [SignAutomorphism((False,) + bits) for bits in itertools.product((False, True), repeat=4)]

    def __str__(self) -> str:
        idx = [f"T{i}" for i, f in enumerate(self.flips) if f]
        return "flip " + ",".join(idx) if idx else "identity"


WITNESS_GENERATORS = (SignAutomorphism.of(1), SignAutomorphism.of(2), SignAutomorphism.of(1, 2))


@dataclass(frozen=True)
class WitnessComponent:
    sigma: SignAutomorphism
    multiplier: SquareClass
    components: frozenset


def witness_components(c: BrauerClassRep, surface: Surface, sigma: SignAutomorphism) -> WitnessComponent:
    if surface.family is None:
        raise Unsupported("witness multipliers are only known for family surfaces")
    D, A1, A2, _ = surface.family.as_tuple()
    f = [int(b) for b in sigma.flips]
    # T0+T1 -> +-(T0-T1) costs a factor -A1 modulo norms; T3, T4 flips are free
    m = Fraction(1)
    if f[0] ^ f[1]:
        m *= -A1
    if f[0] ^ f[2]:
        m *= -A2
    mult = SquareClass.of(m)
    return WitnessComponent(sigma, mult, hilbert_vector(mult.value, c.D))


def nonconstancy_by_witness(c: BrauerClassRep, surface: Surface, place: Place) -> Union[ProvedWorking, Unknown]:
    """A sign flip whose multiplier has Hilbert symbol -1 at ``place`` proves non-constancy.

    The flip changes the evaluation at every local point where both the point
    and its image avoid the indeterminacy; points with x0 = 1 and x3, x4 close
    to 0 (x1, x2 solving the row equations) always exist locally.
    """
    if surface.family is None:
        return Unknown("not a family surface")
    for sigma in WITNESS_GENERATORS:
        wc = witness_components(c, surface, sigma)
        if place in wc.components:
            return ProvedWorking("witness", f"{sigma} rescales by {wc.multiplier.value}", (str(sigma),))
    return Unknown("no sign automorphism witnesses non-constancy")
