"""Surfaces: a pencil plus optional quaternion presentation and family parameters.

Text format (one item per line, ``#`` starts a comment)::

    Q1: <quadratic expression in T0..T4>   or   Q1: c1 c2 ... c15
    Q2: ...
    L1: l11 ; l12 ; l13 ; l14 ; D1          (optional presentation row)
    L2: l21 ; l22 ; l23 ; l24 ; D2
    family: D A1 A2 B                        (optional, defines everything)
    name: free text

The 15 coefficients are those of T0^2, T0T1, T0T2, T0T3, T0T4, T1^2, T1T2,
T1T3, T1T4, T2^2, T2T3, T2T4, T3^2, T3T4, T4^2. A presentation row encodes
the equation ``l1*l2 = l3^2 - Dk*l4^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .arith import SquareClass, is_square, squarefree_part
from .pencil import MONOMIALS, Pencil, PencilDomainError, QuadForm5
from .polyexpr import format_poly, parse_poly

LinearForm = tuple[Fraction, ...]


class SurfaceFormatError(ValueError):
    pass


def linear_form(coeffs: Sequence) -> LinearForm:
    lf = tuple(Fraction(c) for c in coeffs)
    if len(lf) != 5:
        raise SurfaceFormatError("linear forms need 5 coefficients")
    return lf


def parse_linear(text: str) -> LinearForm:
    p = parse_poly(text)
    out = [Fraction(0)] * 5
    for mono, c in p.items():
        if sum(mono) != 1:
            raise SurfaceFormatError(f"{text!r} is not a linear form")
        out[mono.index(1)] = c
    return tuple(out)


def eval_linear(l: LinearForm, x: Sequence) -> Fraction:
    return sum((a * Fraction(b) for a, b in zip(l, x)), Fraction(0))


def format_linear(l: LinearForm) -> str:
    return format_poly({tuple(int(i == k) for i in range(5)): c for k, c in enumerate(l) if c})


def product_form(l: LinearForm, m: LinearForm) -> QuadForm5:
    g = [[(l[i] * m[j] + m[i] * l[j]) / 2 for j in range(5)] for i in range(5)]
    return QuadForm5(tuple(map(tuple, g)))


@dataclass(frozen=True)
class FamilyParams:
    D: int
    A1: int
    A2: int
    B: int

    def __post_init__(self):
        if 0 in (self.D, self.A1, self.A2, self.B):
            raise PencilDomainError("family parameters must be nonzero")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.D, self.A1, self.A2, self.B)


@dataclass(frozen=True)
class SDPresentation:
    """Two rows ``l_i1 * l_i2 = l_i3^2 - D_i * l_i4^2`` with D_1, D_2 in one square class."""

    D: int
    rows: tuple[tuple[LinearForm, LinearForm, LinearForm, LinearForm], ...]
    row_discs: tuple[Fraction, Fraction]

    def __post_init__(self):
        if squarefree_part(self.D) != self.D:
            raise PencilDomainError("D must be a squarefree integer")
        if self.D == 1:
            raise PencilDomainError("D must be a non-square")
        for d in self.row_discs:
            if not is_square(Fraction(d) / self.D):
                raise PencilDomainError(f"row discriminant {d} is not in the class of {self.D}")

    def row_form(self, i: int) -> QuadForm5:
        """``l1*l2 - l3^2 + D_i*l4^2`` for row ``i`` in {0, 1}."""
        l1, l2, l3, l4 = self.rows[i]
        return product_form(l1, l2) + product_form(l3, l3).scaled(-1) + product_form(l4, l4).scaled(self.row_discs[i])

    def pencil(self) -> Pencil:
        return Pencil(self.row_form(0), self.row_form(1))

    @property
    def square_class(self) -> SquareClass:
        return SquareClass(self.D)


def spans_same_pencil(a: Pencil, b: Pencil) -> bool:
    rows = [f.coeffs() for f in (a.q1, a.q2)]
    r = linalg.rank(rows)
    return r == 2 and all(linalg.rank(rows + [f.coeffs()]) == 2 for f in (b.q1, b.q2))


@dataclass(frozen=True)
class Surface:
    pencil: Pencil
    presentation: Optional[SDPresentation] = None
    family: Optional[FamilyParams] = None
    name: str = ""

    def __post_init__(self):
        if self.presentation is not None and not spans_same_pencil(self.pencil, self.presentation.pencil()):
            raise PencilDomainError("presentation does not define the given surface")

    def contains(self, x: Sequence) -> bool:
        return self.pencil.contains(x)

    def with_presentation(self, pres: SDPresentation) -> "Surface":
        return Surface(self.pencil, pres, self.family, self.name)

    # ---- text format -------------------------------------------------

    def to_text(self) -> str:
        lines = []
        if self.name:
            lines.append(f"name: {self.name}")
        if self.family is not None:
            lines.append("family: " + " ".join(str(x) for x in self.family.as_tuple()))
        lines.append("Q1: " + _format_form(self.pencil.q1))
        lines.append("Q2: " + _format_form(self.pencil.q2))
        if self.presentation is not None:
            for k, (row, d) in enumerate(zip(self.presentation.rows, self.presentation.row_discs), start=1):
                lines.append(f"L{k}: " + " ; ".join(format_linear(l) for l in row) + f" ; {d}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Surface":
        fields: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise SurfaceFormatError(f"line {lineno}: expected 'key: value'")
            key, value = (s.strip() for s in line.split(":", 1))
            key = key.lower()
            if key not in ("q1", "q2", "l1", "l2", "family", "name"):
                raise SurfaceFormatError(f"line {lineno}: unknown key {key!r}")
            fields[key] = value
        name = fields.get("name", "")
        if "family" in fields:
            from .construct import family_surface

            try:
                params = FamilyParams(*(int(t) for t in fields["family"].split()))
            except (TypeError, ValueError) as exc:
                raise SurfaceFormatError("family needs four nonzero integers D A1 A2 B") from exc
            surf = family_surface(params)
            surf = Surface(surf.pencil, surf.presentation, surf.family, name)
            if "q1" in fields and "q2" in fields:
                given = Pencil(_parse_form(fields["q1"]), _parse_form(fields["q2"]))
                if not spans_same_pencil(given, surf.pencil):
                    raise SurfaceFormatError("Q1/Q2 do not match the family parameters")
            return surf
        pres = None
        if "l1" in fields and "l2" in fields:
            rows, discs = [], []
            for key in ("l1", "l2"):
                parts = [s.strip() for s in fields[key].split(";")]
                if len(parts) != 5:
                    raise SurfaceFormatError(f"{key.upper()} needs four linear forms and a discriminant")
                rows.append(tuple(parse_linear(s) for s in parts[:4]))
                discs.append(Fraction(parts[4]))
            D = squarefree_part(discs[0])
            pres = SDPresentation(D, tuple(rows), (discs[0], discs[1]))
        if "q1" in fields and "q2" in fields:
            pencil = Pencil(_parse_form(fields["q1"]), _parse_form(fields["q2"]))
        elif pres is not None:
            pencil = pres.pencil()
        else:
            raise SurfaceFormatError("need Q1 and Q2, or L1 and L2, or family")
        return cls(pencil, pres, None, name)


def _parse_form(text: str) -> QuadForm5:
    tokens = text.split()
    if len(tokens) == len(MONOMIALS):
        try:
            return QuadForm5.from_coeffs([Fraction(t) for t in tokens])
        except ValueError:
            pass
    return QuadForm5.parse(text)


def _format_form(q: QuadForm5) -> str:
    poly = {}
    for (i, j), c in zip(MONOMIALS, q.coeffs()):
        if c:
            e = [0] * 5
            e[i] += 1
            e[j] += 1
            poly[tuple(e)] = c
    return format_poly(poly)
