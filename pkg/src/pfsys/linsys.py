"""Linear systems of alternating forms: the symbolic Pfaffian cubic,
orthogonal complements, and intersection with the rank-2 locus.

A LinearSystem is an independent tuple of generators w_0, ..., w_n, i.e. a
6x6 skew matrix of linear forms in variables X_0, ..., X_n.  The intersection
of its projectivization with the rank-2 locus is probed by exhaustive
point counting over several prime fields; the counts are matched against the
signatures of the five geometric types that actually occur here (empty, two
points, a conic, two lines, two planes).  Count signatures are the certified
output; any mismatch is reported as "other" rather than guessed at.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import gfp, linalg
from .exterior import (
    DIM,
    PAIRS,
    AlternatingForm,
    BiVector,
    GroupElement,
    act,
    form_rank,
    pfaffian,
    pfaffian_generic,
    wedge_square,
)
from .scalars import MultiPoly, format_rational

DEFAULT_PRIMES: tuple[int, ...] = (5, 7, 11)


class LinearSystem:
    """An (n+1)-dimensional space of alternating forms with a chosen basis."""

    __slots__ = ("generators", "_echelon")

    def __init__(self, generators: Sequence[AlternatingForm]):
        gens = tuple(generators)
        if not gens:
            raise ValueError("a linear system needs at least one generator")
        if len(gens) > 15:
            raise ValueError("at most 15 independent forms exist")
        echelon, _ = linalg.rref([g.coeffs for g in gens])
        if len(echelon) != len(gens):
            raise ValueError("generators are linearly dependent")
        self.generators = gens
        self._echelon = echelon

    @property
    def dim(self) -> int:
        """Vector-space dimension n+1."""
        return len(self.generators)

    @property
    def projective_dim(self) -> int:
        return len(self.generators) - 1

    def echelon_basis(self) -> linalg.Matrix:
        return self._echelon

    def contains(self, omega: AlternatingForm) -> bool:
        return linalg.row_space_contains(self._echelon, omega.coeffs)

    def coordinates_of(self, omega: AlternatingForm) -> tuple[Fraction, ...] | None:
        """Coordinates of a form in the generator basis, or None if outside."""
        cols = list(zip(*[g.coeffs for g in self.generators]))
        sol = linalg.solve(cols, omega.coeffs)
        if sol is None:
            return None
        combo = self.combination(sol)
        return sol if combo == omega else None

    def combination(self, coeffs: Sequence) -> AlternatingForm:
        acc = AlternatingForm.zero()
        for c, g in zip(coeffs, self.generators):
            acc = acc + g.scale(c)
        return acc

    def same_span(self, other: "LinearSystem") -> bool:
        return self._echelon == other._echelon

    def transformed(self, g: GroupElement) -> "LinearSystem":
        return LinearSystem([act(g, w) for w in self.generators])

    def to_json(self) -> dict:
        return {"generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "LinearSystem":
        return cls([AlternatingForm.from_json(g) for g in data["generators"]])

    def __repr__(self) -> str:
        return f"LinearSystem({len(self.generators)} generators)"


@dataclass
class GrIntersectionReport:
    """Point counts of the rank <= 2 locus of P(A) over several prime fields,
    the candidate geometric type read off the count signature, and any
    exactly verified rational rank-2 sample points."""

    counts: dict[int, int]
    candidate_type: str
    sample_points: list[AlternatingForm] = field(default_factory=list)
    sample_coordinates: list[tuple[Fraction, ...]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "counts": {str(p): c for p, c in sorted(self.counts.items())},
            "type": self.candidate_type,
            "sample_points": [w.to_json() for w in self.sample_points],
            "sample_coordinates": [
                [format_rational(c) for c in coords] for coords in self.sample_coordinates
            ],
        }


def symbolic_matrix(A: LinearSystem) -> list[list[MultiPoly]]:
    """The 6x6 skew matrix of linear forms sum_k m_ij^k X_k."""
    n1 = A.dim
    mat = [[MultiPoly.zero(n1) for _ in range(DIM)] for _ in range(DIM)]
    for k, w in enumerate(A.generators):
        x = MultiPoly.variable(k, n1)
        for idx, (i, j) in enumerate(PAIRS):
            c = w.coeffs[idx]
            if c:
                term = x.scale(c)
                mat[i - 1][j - 1] = mat[i - 1][j - 1] + term
                mat[j - 1][i - 1] = mat[j - 1][i - 1] - term
    return mat


def pfaffian_cubic(A: LinearSystem) -> MultiPoly:
    """Pf of the symbolic matrix: a homogeneous cubic in X_0..X_n (or zero).

    Vanishing identically is exactly the condition that every member of the
    system has rank at most 4.
    """
    return pfaffian_generic(symbolic_matrix(A), MultiPoly.zero(A.dim))


def generic_rank(A: LinearSystem, rng: random.Random | None = None, samples: int = 50) -> int:
    """Rank of a generic member.

    Certified 6 iff the Pfaffian cubic is nonzero; when it vanishes, the rank
    is certified <= 4 and random sampling separates 4 from 2 (the rank <= 2
    locus is a proper closed subset, so a false 2 has probability zero).
    """
    if not pfaffian_cubic(A).is_zero():
        return 6
    rng = rng or random.Random(0)
    best = 0
    for _ in range(samples):
        coeffs = [Fraction(rng.randint(-9, 9)) for _ in range(A.dim)]
        w = A.combination(coeffs)
        if w.is_zero():
            continue
        best = max(best, form_rank(w))
        if best == 4:
            break
    return best


def orthogonal(A: LinearSystem) -> list[BiVector]:
    """RREF basis of the annihilator of A inside the bivector space."""
    null = linalg.nullspace([g.coeffs for g in A.generators], ncols=15)
    return [BiVector(row) for row in null]


def line_in_pfaffian(w1: AlternatingForm, w2: AlternatingForm) -> bool:
    """Whether the whole line through two independent forms has rank <= 4.

    Pf(s w1 + t w2) is a binary cubic; vanishing at 4 distinct projective
    points forces it to vanish identically.
    """
    if linalg.rank([w1.coeffs, w2.coeffs]) != 2:
        raise ValueError("forms are not independent")
    for s, t in ((1, 0), (0, 1), (1, 1), (1, 2)):
        w = w1.scale(s) + w2.scale(t)
        if pfaffian(w) != 0:
            return False
    return True


_TYPE_SIGNATURES = (
    ("empty", lambda p: 0),
    ("2-points", lambda p: 2),
    ("conic", lambda p: p + 1),
    ("2-lines", lambda p: 2 * (p + 1)),
    ("2-planes", lambda p: 2 * (p * p + p + 1)),
)


def classify_counts(counts: dict[int, int]) -> str:
    for name, f in _TYPE_SIGNATURES:
        if all(c == f(p) for p, c in counts.items()):
            return name
    return "other"


def gr_intersection(
    A: LinearSystem,
    primes: Sequence[int] = DEFAULT_PRIMES,
    max_samples: int = 8,
) -> GrIntersectionReport:
    """Exhaustively count rank <= 2 members of A over each prime field.

    Candidate rank-2 points found mod p are lifted by rational reconstruction
    and kept only when the lift verifies exactly (rank 2 over the rationals);
    unverifiable lifts are dropped, they never silently degrade the report.
    """
    counts: dict[int, int] = {}
    seen: set[tuple] = set()
    samples: list[AlternatingForm] = []
    coords_out: list[tuple[Fraction, ...]] = []
    for p in primes:
        gens_mod = gfp.generator_matrix_mod(A.generators, p)
        if gfp._rank_mod(gens_mod.copy(), p) != A.dim:
            raise gfp.BadPrime(f"generators become dependent mod {p}")
        count, hits = gfp.count_rank_le2_points(gens_mod, p)
        counts[p] = count
        for hit in hits:
            lifted = _lift_coordinates(hit, p)
            if lifted is None:
                continue
            w = A.combination(lifted)
            if w.is_zero() or form_rank(w) != 2:
                continue
            key = _projective_key(w)
            if key not in seen and len(samples) < max_samples:
                seen.add(key)
                samples.append(w)
                coords_out.append(lifted)
    return GrIntersectionReport(counts, classify_counts(counts), samples, coords_out)


def _lift_coordinates(vec: np.ndarray, p: int) -> tuple[Fraction, ...] | None:
    from .scalars import reconstruct_vector

    return reconstruct_vector([int(x) for x in vec], p)


def _projective_key(w: AlternatingForm) -> tuple:
    pivot = next(c for c in w.coeffs if c != 0)
    return tuple(c / pivot for c in w.coeffs)
