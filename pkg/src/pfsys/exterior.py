"""Exterior algebra of the fixed 6-dimensional space.

Alternating forms live in the second exterior power of the dual space and are
stored as 15 exact coefficients on the basis e_i ^ e_j, i < j, in the fixed
lexicographic pair order (1,2), (1,3), ..., (5,6).  Serialization and
structural equality depend on that order.  BiVectors are the dual picture
(coefficients on u_i ^ u_j, with u the basis dual to e); FourVectors hold
wedge squares.  All values are immutable and all operations pure, so anything
here can be shared freely across threads.

Conventions fixed once and used everywhere:

* the 6x6 matrix M of a form has M[i][j] = m_ij for i < j, and a group element
  g acts by M -> g M g^T;
* the Pfaffian sign is pinned by Pf(e1^e2 + e3^e4 + e5^e6) = +1;
* the identification of 4-forms with bivectors pairs against the volume form
  e1^...^e6 with coefficient +1.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import linalg
from .scalars import format_rational, parse_rational

DIM = 6

#: index pairs (1-based, i < j) in lexicographic order
PAIRS: tuple[tuple[int, int], ...] = tuple(
    (i, j) for i in range(1, DIM + 1) for j in range(i + 1, DIM + 1)
)
PAIR_INDEX = {pair: k for k, pair in enumerate(PAIRS)}

#: 4-element index subsets (1-based, increasing) in lexicographic order
QUADS: tuple[tuple[int, int, int, int], ...] = tuple(
    itertools.combinations(range(1, DIM + 1), 4)
)
QUAD_INDEX = {q: k for k, q in enumerate(QUADS)}


def _perm_sign(seq: Sequence[int]) -> int:
    inv = sum(
        1
        for a in range(len(seq))
        for b in range(a + 1, len(seq))
        if seq[a] > seq[b]
    )
    return -1 if inv % 2 else 1


# For each quad (a<b<c<d): the three pair splittings with their shuffle signs,
# so that (w ^ w)_{abcd} = 2 (w_ab w_cd - w_ac w_bd + w_ad w_bc).
_QUAD_SPLITS: list[tuple[tuple[int, int, int], ...]] = []
for _q in QUADS:
    a, b, c, d = _q
    _QUAD_SPLITS.append(
        (
            (PAIR_INDEX[(a, b)], PAIR_INDEX[(c, d)], 1),
            (PAIR_INDEX[(a, c)], PAIR_INDEX[(b, d)], -1),
            (PAIR_INDEX[(a, d)], PAIR_INDEX[(b, c)], 1),
        )
    )

# Hodge data: quad index -> (pair index of the complement, sign of the
# permutation (quad..., complement...) relative to (1,...,6)).
_HODGE: list[tuple[int, int]] = []
for _q in QUADS:
    comp = tuple(sorted(set(range(1, DIM + 1)) - set(_q)))
    _HODGE.append((PAIR_INDEX[comp], _perm_sign(_q + comp)))


class RankError(ValueError):
    """An operation required a specific rank that the input does not have."""


class _Coeffs15:
    """Shared container behavior for the three 15-coefficient tensor types."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        c = tuple(Fraction(x) for x in coeffs)
        if len(c) != 15:
            raise ValueError("expected 15 coefficients")
        self.coeffs = c

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.coeffs)

    def __eq__(self, other):
        return type(self) is type(other) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((type(self).__name__, self.coeffs))

    def _combine(self, other, op):
        if type(self) is not type(other):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        return type(self)(tuple(op(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return type(self)(tuple(-a for a in self.coeffs))

    def scale(self, c):
        c = Fraction(c)
        return type(self)(tuple(a * c for a in self.coeffs))

    def __rmul__(self, c):
        return self.scale(c)

    def __repr__(self):
        names = {"AlternatingForm": "e", "BiVector": "u"}
        sym = names.get(type(self).__name__)
        if sym is None:
            sym = "e"
            idx = QUADS
        else:
            idx = PAIRS
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "^".join(f"{sym}{i}" for i in idx[k])
            cs = format_rational(c)
            if cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append(f"-{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts) if parts else "0"


class AlternatingForm(_Coeffs15):
    """A skew-symmetric bilinear form on W, as coefficients on e_i ^ e_j."""

    @classmethod
    def zero(cls) -> "AlternatingForm":
        return cls((0,) * 15)

    @classmethod
    def basis(cls, i: int, j: int, c=1) -> "AlternatingForm":
        """c * e_i ^ e_j for 1-based i < j."""
        coeffs = [Fraction(0)] * 15
        coeffs[PAIR_INDEX[(i, j)]] = Fraction(c)
        return cls(coeffs)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, int, object]]) -> "AlternatingForm":
        coeffs = [Fraction(0)] * 15
        for i, j, c in terms:
            if not 1 <= i < j <= DIM:
                raise ValueError(f"bad index pair ({i}, {j})")
            coeffs[PAIR_INDEX[(i, j)]] += Fraction(c)
        return cls(coeffs)

    @classmethod
    def from_covectors(cls, x: Sequence, y: Sequence) -> "AlternatingForm":
        """The decomposable form x ^ y for covectors given in e-coordinates."""
        x = [Fraction(v) for v in x]
        y = [Fraction(v) for v in y]
        coeffs = [x[i - 1] * y[j - 1] - x[j - 1] * y[i - 1] for i, j in PAIRS]
        return cls(coeffs)

    @classmethod
    def from_matrix(cls, m: Sequence[Sequence]) -> "AlternatingForm":
        for i in range(DIM):
            if Fraction(m[i][i]) != 0:
                raise ValueError("matrix has a nonzero diagonal entry")
            for j in range(i + 1, DIM):
                if Fraction(m[i][j]) != -Fraction(m[j][i]):
                    raise ValueError("matrix is not skew-symmetric")
        return cls(tuple(Fraction(m[i - 1][j - 1]) for i, j in PAIRS))

    def matrix(self) -> linalg.Matrix:
        m = [[Fraction(0)] * DIM for _ in range(DIM)]
        for k, (i, j) in enumerate(PAIRS):
            m[i - 1][j - 1] = self.coeffs[k]
            m[j - 1][i - 1] = -self.coeffs[k]
        return tuple(tuple(row) for row in m)

    def __call__(self, u: Sequence, v: Sequence) -> Fraction:
        """Evaluate the bilinear form on two vectors of W (u-coordinates)."""
        u = [Fraction(x) for x in u]
        v = [Fraction(x) for x in v]
        total = Fraction(0)
        for k, (i, j) in enumerate(PAIRS):
            c = self.coeffs[k]
            if c:
                total += c * (u[i - 1] * v[j - 1] - u[j - 1] * v[i - 1])
        return total

    def apply(self, u: Sequence) -> tuple[Fraction, ...]:
        """The covector w(u, .) in e-coordinates."""
        u = [Fraction(x) for x in u]
        out = [Fraction(0)] * DIM
        for k, (i, j) in enumerate(PAIRS):
            c = self.coeffs[k]
            if c:
                out[j - 1] += c * u[i - 1]
                out[i - 1] -= c * u[j - 1]
        return tuple(out)

    def to_json(self) -> dict:
        terms = [
            {"i": i, "j": j, "c": format_rational(c)}
            for (i, j), c in zip(PAIRS, self.coeffs)
            if c != 0
        ]
        return {"terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "AlternatingForm":
        terms = []
        for t in data["terms"]:
            i, j = int(t["i"]), int(t["j"])
            if not 1 <= i < j <= DIM:
                raise ValueError(f"bad index pair ({i}, {j}); indices are 1-based with i < j")
            terms.append((i, j, parse_rational(t["c"])))
        return cls.from_terms(terms)


class BiVector(_Coeffs15):
    """An element of the second exterior power of W (u_i ^ u_j coefficients)."""

    @classmethod
    def basis(cls, i: int, j: int, c=1) -> "BiVector":
        coeffs = [Fraction(0)] * 15
        coeffs[PAIR_INDEX[(i, j)]] = Fraction(c)
        return cls(coeffs)

    @classmethod
    def from_vectors(cls, x: Sequence, y: Sequence) -> "BiVector":
        x = [Fraction(v) for v in x]
        y = [Fraction(v) for v in y]
        return cls([x[i - 1] * y[j - 1] - x[j - 1] * y[i - 1] for i, j in PAIRS])

    def pair(self, form: AlternatingForm) -> Fraction:
        """The perfect pairing with a form: sum of matching coefficients."""
        return sum(
            (a * b for a, b in zip(self.coeffs, form.coeffs)), Fraction(0)
        )

    def is_decomposable(self) -> bool:
        v = self.coeffs
        for split in _QUAD_SPLITS:
            if sum((v[p] * v[q] * s for p, q, s in split), Fraction(0)) != 0:
                return False
        return True

    def plane(self) -> "Subspace":
        """The 2-plane of W spanned by a decomposable bivector."""
        if self.is_zero() or not self.is_decomposable():
            raise RankError("bivector is not a nonzero decomposable tensor")
        m = [[Fraction(0)] * DIM for _ in range(DIM)]
        for k, (i, j) in enumerate(PAIRS):
            m[i - 1][j - 1] = self.coeffs[k]
            m[j - 1][i - 1] = -self.coeffs[k]
        rows, _ = linalg.rref(m)
        return Subspace("W", rows)


class FourVector(_Coeffs15):
    """An element of the fourth exterior power of the dual (e-wedge basis)."""

    def hodge_dual(self) -> BiVector:
        """Identification with a bivector via the +1-scaled volume form."""
        out = [Fraction(0)] * 15
        for k, c in enumerate(self.coeffs):
            pair_idx, sign = _HODGE[k]
            out[pair_idx] = sign * c
        return BiVector(out)


@dataclass(frozen=True)
class Subspace:
    """A subspace of W or of its dual, held as a reduced-echelon row basis.

    The echelon representative makes equality of subspaces structural
    equality.  ``ambient`` is the tag "W" or "W*".
    """

    ambient: str
    rows: linalg.Matrix

    def __init__(self, ambient: str, rows: Sequence[Sequence]):
        if ambient not in ("W", "W*"):
            raise ValueError("ambient must be 'W' or 'W*'")
        red, _ = linalg.rref([list(r) for r in rows]) if rows else ((), ())
        for r in red:
            if len(r) != DIM:
                raise ValueError("rows must have 6 coordinates")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "rows", red)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains_vector(self, v: Sequence) -> bool:
        return linalg.row_space_contains(self.rows, v)

    def contains(self, other: "Subspace") -> bool:
        if self.ambient != other.ambient:
            raise ValueError("mixed ambients")
        return all(self.contains_vector(r) for r in other.rows)

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise ValueError("mixed ambients")
        return Subspace(self.ambient, list(self.rows) + list(other.rows))

    def intersection(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise ValueError("mixed ambients")
        # x in both row spaces: null combinations of the stacked bases.
        a, b = list(self.rows), list(other.rows)
        if not a or not b:
            return Subspace(self.ambient, ())
        coeff_matrix = list(zip(*(a + b)))  # 6 x (|a|+|b|)
        null = linalg.nullspace(coeff_matrix, ncols=len(a) + len(b))
        vecs = []
        for comb in null:
            v = [Fraction(0)] * DIM
            for c, row in zip(comb[: len(a)], a):
                v = [x + c * y for x, y in zip(v, row)]
            vecs.append(v)
        return Subspace(self.ambient, vecs)

    def annihilator(self) -> "Subspace":
        """The annihilator in the dual space (covectors vanishing on self)."""
        other = "W*" if self.ambient == "W" else "W"
        if self.dim == 0:
            return Subspace(other, linalg.identity(DIM))
        return Subspace(other, linalg.nullspace(self.rows, ncols=DIM))

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient,
            "rows": [[format_rational(x) for x in row] for row in self.rows],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Subspace":
        return cls(
            data["ambient"],
            [[parse_rational(x) for x in row] for row in data["rows"]],
        )


@dataclass(frozen=True)
class GroupElement:
    """An invertible 6x6 matrix acting on forms by M -> g M g^T."""

    matrix: linalg.Matrix

    def __init__(self, matrix: Sequence[Sequence]):
        m = linalg.as_matrix(matrix)
        if len(m) != DIM or any(len(r) != DIM for r in m):
            raise ValueError("expected a 6x6 matrix")
        if linalg.det(m) == 0:
            raise ValueError("matrix is singular")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(linalg.identity(DIM))

    @classmethod
    def diagonal(cls, entries: Sequence) -> "GroupElement":
        return cls(
            tuple(
                tuple(Fraction(entries[i]) if i == j else Fraction(0) for j in range(DIM))
                for i in range(DIM)
            )
        )

    @classmethod
    def permutation(cls, sigma: Sequence[int]) -> "GroupElement":
        """Row i is e_{sigma(i)} (1-based), so acting relabels index i to sigma(i)."""
        return cls(
            tuple(
                tuple(Fraction(1 if j + 1 == sigma[i] else 0) for j in range(DIM))
                for i in range(DIM)
            )
        )

    def det(self) -> Fraction:
        return linalg.det(self.matrix)

    def inverse(self) -> "GroupElement":
        return GroupElement(linalg.inverse(self.matrix))

    def transpose(self) -> "GroupElement":
        return GroupElement(linalg.transpose(self.matrix))

    def compose(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(linalg.matmul(self.matrix, other.matrix))

    def to_json(self) -> dict:
        return {"matrix": [[format_rational(x) for x in row] for row in self.matrix]}

    @classmethod
    def from_json(cls, data: dict) -> "GroupElement":
        return cls([[parse_rational(x) for x in row] for row in data["matrix"]])


def random_unimodular(rng, spread: int = 2) -> GroupElement:
    """A random determinant-1 matrix, as a product of unit triangular factors.

    Entries stay small, which keeps downstream exact arithmetic cheap.
    """
    lower = [[Fraction(0)] * DIM for _ in range(DIM)]
    upper = [[Fraction(0)] * DIM for _ in range(DIM)]
    for i in range(DIM):
        lower[i][i] = Fraction(1)
        upper[i][i] = Fraction(1)
        for j in range(i):
            lower[i][j] = Fraction(rng.randint(-spread, spread))
        for j in range(i + 1, DIM):
            upper[i][j] = Fraction(rng.randint(-spread, spread))
    return GroupElement(linalg.matmul(lower, upper))


# ---------------------------------------------------------------------------
# operations


def form_rank(omega: AlternatingForm) -> int:
    """Rank of the form's matrix; always one of 0, 2, 4, 6."""
    return linalg.rank(omega.matrix())


def form_kernel(omega: AlternatingForm) -> Subspace:
    """{u : w(u, .) = 0}, a subspace of W of dimension 6 - rank."""
    return Subspace("W", linalg.nullspace(omega.matrix(), ncols=DIM))


def pfaffian(omega: AlternatingForm) -> Fraction:
    """Pfaffian via recursive cofactor expansion along the first row.

    Sign convention: Pf(e1^e2 + e3^e4 + e5^e6) = +1, and Pf(w)^2 = det(M_w).
    """
    m = omega.matrix()
    return _pfaffian_rec(m, list(range(DIM)))


def _pfaffian_rec(m, idx) -> Fraction:
    if not idx:
        return Fraction(1)
    first = idx[0]
    total = Fraction(0)
    for pos in range(1, len(idx)):
        entry = m[first][idx[pos]]
        if entry == 0:
            continue
        sign = -1 if pos % 2 == 0 else 1
        rest = [idx[k] for k in range(1, len(idx)) if k != pos]
        total += sign * entry * _pfaffian_rec(m, rest)
    return total


def pfaffian_generic(matrix, zero):
    """Pfaffian of a 6x6 skew matrix over any commutative ring.

    ``matrix`` is indexable as matrix[i][j]; entries must support + and *.
    Same expansion and sign convention as :func:`pfaffian`.
    """

    def rec(idx):
        if not idx:
            return None  # multiplicative identity handled by caller
        first = idx[0]
        total = zero
        for pos in range(1, len(idx)):
            entry = matrix[first][idx[pos]]
            rest = [idx[k] for k in range(1, len(idx)) if k != pos]
            sub = rec(rest)
            term = entry if sub is None else entry * sub
            if pos % 2 == 0:
                term = -term
            total = total + term
        return total

    result = rec(list(range(DIM)))
    return zero if result is None else result


def wedge_square(omega: AlternatingForm) -> FourVector:
    """w ^ w; zero exactly when rank(w) <= 2 (the Pluecker quadrics)."""
    v = omega.coeffs
    return FourVector(
        tuple(
            2 * sum((v[p] * v[q] * s for p, q, s in split), Fraction(0))
            for split in _QUAD_SPLITS
        )
    )


def wedge_product(a: AlternatingForm, b: AlternatingForm) -> FourVector:
    """The symmetric product a ^ b of two 2-forms."""
    x, y = a.coeffs, b.coeffs
    return FourVector(
        tuple(
            sum(
                ((x[p] * y[q] + x[q] * y[p]) * s for p, q, s in split),
                Fraction(0),
            )
            for split in _QUAD_SPLITS
        )
    )


def gauss_map(omega: AlternatingForm) -> BiVector:
    """Image of a rank-4 form under the Gauss map of the Pfaffian cubic.

    The wedge square, read as a bivector through the volume-form pairing.
    The result is decomposable and its 2-plane is the kernel of the form.
    """
    if form_rank(omega) != 4:
        raise RankError("Gauss map requires a form of rank exactly 4")
    return wedge_square(omega).hodge_dual()


def act(g: GroupElement, omega: AlternatingForm) -> AlternatingForm:
    """The form with matrix g M g^T."""
    m = linalg.matmul(linalg.matmul(g.matrix, omega.matrix()), linalg.transpose(g.matrix))
    return AlternatingForm.from_matrix(m)


def gr_tangent_space(omega: AlternatingForm) -> Callable[[AlternatingForm], bool]:
    """Membership predicate for the tangent space to the rank-2 locus at omega.

    For a rank-2 form with 2-plane L, a form theta is tangent exactly when its
    restriction to the 4-space annihilated by L vanishes: 6 scalar conditions.
    """
    if form_rank(omega) != 2:
        raise RankError("tangent space is defined at rank-2 points only")
    perp = linalg.nullspace(omega.matrix(), ncols=DIM)  # basis of L^perp in W

    def member(theta: AlternatingForm) -> bool:
        return all(
            theta(perp[a], perp[b]) == 0
            for a in range(len(perp))
            for b in range(a + 1, len(perp))
        )

    return member


def decomposable_plane(omega: AlternatingForm) -> Subspace:
    """The 2-plane of the dual space spanned by a rank-2 form."""
    if form_rank(omega) != 2:
        raise RankError("form does not have rank 2")
    red, _ = linalg.rref(omega.matrix())
    return Subspace("W*", red)


def proportional(a, b) -> bool:
    """True when two coefficient containers agree up to a nonzero scalar."""
    ca, cb = a.coeffs, b.coeffs
    if all(x == 0 for x in ca) or all(x == 0 for x in cb):
        return all(x == 0 for x in ca) and all(x == 0 for x in cb)
    pivot = next(k for k, x in enumerate(ca) if x != 0)
    if cb[pivot] == 0:
        return False
    ratio = ca[pivot] / cb[pivot]
    return all(x == ratio * y for x, y in zip(ca, cb))


def form_to_json_str(omega: AlternatingForm) -> str:
    return json.dumps(omega.to_json(), indent=2)
