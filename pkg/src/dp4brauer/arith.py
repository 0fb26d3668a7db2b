"""Exact number-theoretic primitives over Q.

Scalars are :class:`fractions.Fraction`; square classes are represented by
their unique squarefree integer representative (sign kept, ``1`` for squares).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Iterable, Optional, Union

from sympy import factorint as _factorint
from sympy import isprime as _isprime

Rat = Fraction
RatLike = Union[int, Fraction]


class ArithmeticDomainError(ValueError):
    """Raised when an arithmetic primitive is called outside its domain."""


class NotFound(LookupError):
    """A bounded search exhausted its range without a hit."""


def as_rat(x: RatLike) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# --------------------------------------------------------------------------
# places


@dataclass(frozen=True)
class Place:
    """A place of Q: ``p=None`` is the real place, otherwise a prime."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise ArithmeticDomainError(f"{self.p} is not prime")

    @property
    def is_infinite(self) -> bool:
        return self.p is None

    def sort_key(self):
        return (0, 0) if self.p is None else (1, self.p)

    def __lt__(self, other: "Place") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)

    def __repr__(self) -> str:
        return f"Place({self})"

    @classmethod
    def parse(cls, text: str) -> "Place":
        t = text.strip().lower()
        if t in ("inf", "infinity", "oo"):
            return INFINITY
        try:
            return cls(int(t))
        except ValueError as exc:
            raise ArithmeticDomainError(f"cannot parse place {text!r}") from exc


INFINITY = Place(None)


def place_set(places: Iterable[Place]) -> tuple[Place, ...]:
    """Sorted tuple without duplicates (the canonical PlaceSet)."""
    return tuple(sorted(set(places)))


# --------------------------------------------------------------------------
# factorization and square classes


def is_prime(n: int) -> bool:
    # sympy: deterministic below 2**64, BPSW above
    return n >= 2 and bool(_isprime(n))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``|n|`` (``{}`` for 1)."""
    n = abs(int(n))
    if n == 0:
        raise ArithmeticDomainError("cannot factor 0")
    return {int(p): int(e) for p, e in _factorint(n).items()}


def prime_factors(n: int) -> list[int]:
    return sorted(factorize(n))


def squarefree_part(x: RatLike) -> int:
    """Squarefree integer ``s`` with ``x = s * r**2`` for rational ``r``."""
    x = as_rat(x)
    if x == 0:
        raise ArithmeticDomainError("zero has no square class")
    n = x.numerator * x.denominator
    s = 1
    for p, e in factorize(n).items():
        if e % 2:
            s *= p
    return s if n > 0 else -s


def is_square(x: RatLike) -> bool:
    """Exact test whether a rational number is a square (0 counts)."""
    x = as_rat(x)
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return isqrt(n) ** 2 == n and isqrt(d) ** 2 == d


@dataclass(frozen=True)
class SquareClass:
    """Element of Q*/Q*^2, stored as a squarefree integer."""

    value: int

    def __post_init__(self):
        if self.value == 0:
            raise ArithmeticDomainError("square class of zero")
        if squarefree_part(self.value) != self.value:
            raise ArithmeticDomainError(f"{self.value} is not squarefree")

    @classmethod
    def of(cls, x: RatLike) -> "SquareClass":
        return cls(squarefree_part(x))

    @property
    def is_trivial(self) -> bool:
        return self.value == 1

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return SquareClass.of(self.value * other.value)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"SquareClass({self.value})"


def valuation(x: RatLike, p: int) -> int:
    x = as_rat(x)
    if x == 0:
        raise ArithmeticDomainError("valuation of zero")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


# --------------------------------------------------------------------------
# symbols


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p."""
    if p == 2 or not is_prime(p):
        raise ArithmeticDomainError(f"{p} is not an odd prime")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _split_p(x: Fraction, p: int) -> tuple[int, int]:
    """Write a nonzero rational as p**v * u and return (v, u) with u an integer unit.

    The unit is only meaningful modulo p (odd p) or modulo 8 (p = 2); the
    denominator's unit part is inverted modulo 8*p to keep ``u`` integral.
    """
    v = valuation(x, p)
    n, d = x.numerator, x.denominator
    if v > 0:
        n //= p**v
    elif v < 0:
        d //= p ** (-v)
    m = 8 if p == 2 else p
    return v, (n * pow(d, -1, m)) % m


def hilbert(a: RatLike, b: RatLike, place: Place) -> int:
    """Hilbert symbol (a, b)_v, equal to +1 iff z^2 = a x^2 + b y^2 is isotropic over Q_v."""
    a, b = as_rat(a), as_rat(b)
    if a == 0 or b == 0:
        raise ArithmeticDomainError("Hilbert symbol of zero")
    if place.is_infinite:
        return -1 if (a < 0 and b < 0) else 1
    p = place.p
    alpha, u = _split_p(a, p)
    beta, w = _split_p(b, p)
    if p != 2:
        sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
        return sign * legendre(u, p) ** (beta % 2) * legendre(w, p) ** (alpha % 2)
    # units taken mod 8: eps(u) = (u-1)/2, omega(u) = (u^2-1)/8, both mod 2
    eps_u, eps_w = ((u - 1) // 2) % 2, ((w - 1) // 2) % 2
    om_u, om_w = ((u * u - 1) // 8) % 2, ((w * w - 1) // 8) % 2
    e = eps_u * eps_w + alpha * om_w + beta * om_u
    return -1 if e % 2 else 1


def hilbert_vector(a: RatLike, b: RatLike) -> frozenset[Place]:
    """All places where (a, b)_v = -1; by reciprocity the set has even size."""
    a, b = as_rat(a), as_rat(b)
    if a == 0 or b == 0:
        raise ArithmeticDomainError("Hilbert symbol of zero")
    sa, sb = squarefree_part(a), squarefree_part(b)
    candidates = {INFINITY, Place(2)}
    candidates.update(Place(p) for p in factorize(sa * sb))
    return frozenset(v for v in candidates if hilbert(sa, sb, v) == -1)


# --------------------------------------------------------------------------
# congruences and prime search


def crt_combine(congruences: Iterable[tuple[int, int]]) -> tuple[int, int]:
    """Combine ``x = r_i (mod m_i)`` for pairwise coprime moduli."""
    r, m = 0, 1
    for ri, mi in congruences:
        if mi <= 0:
            raise ArithmeticDomainError(f"bad modulus {mi}")
        if gcd(m, mi) != 1:
            raise ArithmeticDomainError(f"moduli {m} and {mi} are not coprime")
        t = ((ri - r) * pow(m, -1, mi)) % mi if mi > 1 else 0
        r, m = r + m * t, m * mi
        r %= m
    return r, m


def prime_in_progression(
    residue: int,
    modulus: int,
    predicate: Callable[[int], bool] = lambda p: True,
    bound: int = 10**6,
) -> int:
    """Smallest prime ``p <= bound`` with ``p = residue (mod modulus)`` and ``predicate(p)``."""
    if gcd(residue, modulus) != 1:
        raise ArithmeticDomainError(f"gcd({residue}, {modulus}) != 1")
    start = residue % modulus
    if start == 0:
        start = modulus
    for n in range(start, bound + 1, modulus):
        if is_prime(n) and predicate(n):
            return n
    raise NotFound(f"no prime = {residue} mod {modulus} up to {bound}")


def divisors_of(n: int) -> list[int]:
    """Positive divisors of ``|n|`` in ascending order."""
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)
