"""Exact arithmetic kernel: rationals, prime fields, sparse multivariate polynomials.

Everything downstream is generic over these scalars.  No floating point is
used anywhere on certified paths.  Rationals are ``fractions.Fraction``
(always gcd-normalized with positive denominator, so equality is structural);
this module adds the prime-field scalar, the mod-p reduction morphism,
rational reconstruction from modular images, and a sparse polynomial type
large enough for symbolic Pfaffians (never more than a few dozen monomials).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Mapping, Sequence

Rational = Fraction

__all__ = [
    "Rational",
    "BadPrime",
    "ArityMismatch",
    "PrimeFieldElement",
    "MultiPoly",
    "is_prime",
    "reduce_mod",
    "poly_eval",
    "parse_rational",
    "format_rational",
    "reconstruct_rational",
]


class BadPrime(ValueError):
    """The requested modulus is unusable (not an odd prime, or divides a denominator)."""


class ArityMismatch(ValueError):
    """Evaluation point length does not match the polynomial's variable count."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def parse_rational(s: str) -> Fraction:
    """Parse "p/q" or "p" (decimal integer strings) into a normalized rational."""
    return Fraction(s.strip())


def format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class PrimeFieldElement:
    """An element of F_p, stored as the canonical representative in [0, p)."""

    value: int
    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p) or self.p < 3:
            raise BadPrime(f"modulus {self.p} is not an odd prime")
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> "PrimeFieldElement":
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise BadPrime(f"mixed moduli {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return PrimeFieldElement(other, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return PrimeFieldElement(self.value + o.value, self.p)

    __radd__ = __add__

    def __neg__(self):
        return PrimeFieldElement(-self.value, self.p)

    def __sub__(self, other):
        o = self._coerce(other)
        return PrimeFieldElement(self.value - o.value, self.p)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return PrimeFieldElement(self.value * o.value, self.p)

    __rmul__ = __mul__

    def inverse(self) -> "PrimeFieldElement":
        if self.value == 0:
            raise ZeroDivisionError("inverse of 0 in a prime field")
        return PrimeFieldElement(pow(self.value, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __bool__(self) -> bool:
        return self.value != 0


def reduce_mod(x: Fraction | int, p: int) -> PrimeFieldElement:
    """Reduce a rational mod p.  The reduction num * den^-1 is a ring morphism
    wherever it is defined; it fails exactly when p divides the denominator."""
    if not is_prime(p) or p < 3:
        raise BadPrime(f"modulus {p} is not an odd prime")
    x = Fraction(x)
    if x.denominator % p == 0:
        raise BadPrime(f"denominator of {x} is divisible by {p}")
    num = x.numerator % p
    den_inv = pow(x.denominator % p, p - 2, p)
    return PrimeFieldElement(num * den_inv % p, p)


def reconstruct_rational(residue: int, m: int) -> Fraction | None:
    """Rational reconstruction of a mod-m residue.

    Returns the unique n/d with |n|, d <= floor(sqrt(m/2)), gcd(d, m) = 1 and
    n = d * residue (mod m), or None when no such fraction exists.  Standard
    half-extended Euclid on (m, residue); callers must re-verify any lifted
    value exactly, the bound only guarantees uniqueness.
    """
    bound = isqrt(m // 2)
    if bound == 0:
        return None
    r0, r1 = m, residue % m
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    n, d = r1, t1
    if d < 0:
        n, d = -n, -d
    if d == 0 or d > bound or abs(n) > bound:
        return None
    if gcd(d, m) != 1 or gcd(abs(n), d) != 1:
        return None
    if (n - d * residue) % m != 0:
        return None
    return Fraction(n, d)


def reconstruct_vector(residues: Sequence[int], m: int) -> tuple[Fraction, ...] | None:
    out = []
    for r in residues:
        x = reconstruct_rational(int(r), m)
        if x is None:
            return None
        out.append(x)
    return tuple(out)


class MultiPoly:
    """Sparse multivariate polynomial with exact coefficients.

    Terms are a map from exponent tuples (one entry per variable) to nonzero
    rationals.  Dense representations never pay off here: the symbolic
    Pfaffian of a 6x6 matrix of linear forms has at most 15 matchings worth
    of monomials.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], Fraction] | None = None):
        self.nvars = int(nvars)
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exps, c in terms.items():
                c = Fraction(c)
                if c == 0:
                    continue
                if len(exps) != self.nvars:
                    raise ArityMismatch(f"exponent vector {exps} has wrong length")
                clean[tuple(int(e) for e in exps)] = c
        self.terms = clean

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars, {})

    @classmethod
    def constant(cls, c, nvars: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def variable(cls, i: int, nvars: int) -> "MultiPoly":
        exps = [0] * nvars
        exps[i] = 1
        return cls(nvars, {tuple(exps): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiPoly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def _check(self, other: "MultiPoly") -> None:
        if self.nvars != other.nvars:
            raise ArityMismatch("mixed variable counts")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, Fraction(0)) + c
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return MultiPoly(self.nvars, terms)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return MultiPoly(self.nvars, terms)

    __rmul__ = __mul__

    def scale(self, c) -> "MultiPoly":
        c = Fraction(c)
        if c == 0:
            return MultiPoly.zero(self.nvars)
        return MultiPoly(self.nvars, {e: k * c for e, k in self.terms.items()})

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return degree is None or degs == {degree}

    def eval(self, point: Sequence) -> Fraction | PrimeFieldElement:
        """Exact evaluation at a point of rationals or prime-field elements."""
        if len(point) != self.nvars:
            raise ArityMismatch(
                f"point has {len(point)} coordinates, polynomial has {self.nvars} variables"
            )
        if self.terms and all(isinstance(x, PrimeFieldElement) for x in point):
            zero = PrimeFieldElement(0, point[0].p)
        else:
            zero = Fraction(0)
        acc = zero
        for exps, c in self.terms.items():
            term = c
            for x, e in zip(point, exps):
                for _ in range(e):
                    term = term * x
            acc = acc + term
        return acc

    def coefficients_as_quadratic(self) -> dict[tuple[int, int], Fraction]:
        """Coefficient map {(i, j): c} (i <= j) of a homogeneous quadric."""
        out: dict[tuple[int, int], Fraction] = {}
        for exps, c in self.terms.items():
            support = [k for k, e in enumerate(exps) if e]
            if sum(exps) != 2:
                raise ValueError("not a quadric")
            if len(support) == 1:
                out[(support[0], support[0])] = c
            else:
                out[(support[0], support[1])] = c
        return out

    def to_json(self) -> dict:
        items = sorted(self.terms.items())
        return {
            "nvars": self.nvars,
            "terms": [{"exponents": list(e), "c": format_rational(c)} for e, c in items],
        }

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in sorted(self.terms.items()):
            mono = "*".join(
                f"X{k}" + (f"^{e}" if e > 1 else "") for k, e in enumerate(exps) if e
            )
            cs = format_rational(c)
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)


def poly_eval(f: MultiPoly, point: Sequence) -> Fraction | PrimeFieldElement:
    return f.eval(point)


def dot(u: Iterable, v: Iterable) -> Fraction:
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v)), Fraction(0))
