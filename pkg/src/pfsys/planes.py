"""Constant-rank-4 planes and their four orbit types.

A plane here is a 3-generator linear system all of whose members have rank
exactly 4.  Up to the group action there are four of them; this module
certifies constant rank, sorts a plane into its orbit, and for the general
type recovers the defining datum (C, D, f): two complementary 3-spaces of
covectors and an isomorphism f between them such that the plane consists of
the tensors x ^ f(y) - y ^ f(x) with x, y in C.  That datum in turn yields an
exact change of basis carrying the plane to the fixed normal form pi_g.

Orbit labels:

* "general"    - no common kernel vector, kernels span everything, exactly
                 two totally isotropic 3-spaces (pi_g);
* "tangent"    - the plane sits inside a tangent space of the rank-2 locus,
                 equivalently a 4-dimensional totally isotropic subspace
                 exists (pi_t);
* "pencil"     - recognized by elimination of the other three (pi_p);
* "hyperplane" - all members kill a common vector (pi_5).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import gfp, linalg
from .exterior import (
    DIM,
    AlternatingForm,
    GroupElement,
    Subspace,
    act,
    form_kernel,
    form_rank,
)
from .linsys import DEFAULT_PRIMES, LinearSystem, pfaffian_cubic
from .scalars import reconstruct_vector


class NotCR4(ValueError):
    """The input is not a plane of constant rank 4."""


class NotGeneralType(ValueError):
    """The plane is constant rank 4 but not of general type."""


ORBIT_LABELS = ("general", "tangent", "pencil", "hyperplane", "not_cr4", "unrecognized")

PI_G_GENERATORS = (
    AlternatingForm.from_terms([(1, 4, 1), (2, 5, 1)]),
    AlternatingForm.from_terms([(1, 6, 1), (3, 5, 1)]),
    AlternatingForm.from_terms([(2, 6, 1), (3, 4, -1)]),
)

# Standard isomorphism C -> D of the normal form: e1 -> e5, e2 -> -e4,
# e3 -> -e6, expressed in the bases (e1, e2, e3) and (e4, e5, e6).
F_STD = linalg.as_matrix([[0, -1, 0], [1, 0, 0], [0, 0, -1]])


@dataclass
class CR4Evidence:
    constant_rank4: bool
    pfaffian_cubic_zero: bool
    fp_counts: dict[int, int]
    counterexample: AlternatingForm | None = None
    counterexample_rank: int | None = None

    def to_json(self) -> dict:
        out = {
            "constant_rank4": self.constant_rank4,
            "pfaffian_cubic_zero": self.pfaffian_cubic_zero,
            "fp_rank_le2_counts": {str(p): c for p, c in sorted(self.fp_counts.items())},
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json()
            out["counterexample_rank"] = self.counterexample_rank
        return out


@dataclass
class CDFDatum:
    """The (C, D, f) description of a general-type plane.

    ``c_basis`` and ``d_basis`` are row bases of the two complementary
    3-spaces of covectors; ``f`` maps c-coordinates to d-coordinates, so the
    covector image of x = sum_a x_a c_a is sum_k (f x)_k d_k.
    """

    C: Subspace
    D: Subspace
    c_basis: linalg.Matrix
    d_basis: linalg.Matrix
    f: linalg.Matrix
    isotropic_spaces: tuple[Subspace, Subspace]

    def apply_f(self, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Image in e-coordinates of a covector x (e-coordinates) in C."""
        coords = linalg.solve(linalg.transpose(self.c_basis), x)
        if coords is None:
            raise ValueError("covector is not in C")
        image_coords = linalg.matvec(self.f, coords)
        return linalg.matvec(linalg.transpose(self.d_basis), image_coords)

    def form_from_pair(self, x: Sequence, y: Sequence) -> AlternatingForm:
        """x ^ f(y) - y ^ f(x) for covectors x, y in C."""
        fx = self.apply_f([Fraction(v) for v in x])
        fy = self.apply_f([Fraction(v) for v in y])
        return AlternatingForm.from_covectors(x, fy) - AlternatingForm.from_covectors(y, fx)

    def to_json(self) -> dict:
        from .scalars import format_rational

        return {
            "C": self.C.to_json(),
            "D": self.D.to_json(),
            "f": [[format_rational(x) for x in row] for row in self.f],
        }


def is_constant_rank4(B: LinearSystem, primes: Sequence[int] = DEFAULT_PRIMES) -> tuple[bool, CR4Evidence]:
    """Decide constant rank 4, with evidence.

    Positive evidence: the Pfaffian cubic vanishes identically (rank <= 4
    everywhere, exact) and no rank <= 2 point exists over any of the given
    prime fields.  Negative evidence exhibits a member of rank 6 (exact) or a
    rational rank <= 2 member lifted from a modular hit.
    """
    if B.dim != 3:
        raise ValueError("constant-rank-4 certification expects 3 generators")
    cubic = pfaffian_cubic(B)
    if not cubic.is_zero():
        witness = _rank6_member(B)
        return False, CR4Evidence(False, False, {}, witness, form_rank(witness))
    counts: dict[int, int] = {}
    for p in primes:
        gens_mod = gfp.generator_matrix_mod(B.generators, p)
        count, hits = gfp.count_rank_le2_points(gens_mod, p)
        counts[p] = count
        if count:
            for hit in hits:
                lifted = reconstruct_vector([int(x) for x in hit], p)
                if lifted is None:
                    continue
                w = B.combination(lifted)
                if not w.is_zero() and form_rank(w) <= 2:
                    return False, CR4Evidence(False, True, counts, w, form_rank(w))
            return False, CR4Evidence(False, True, counts)
    return True, CR4Evidence(True, True, counts)


def _rank6_member(B: LinearSystem) -> AlternatingForm:
    cubic = pfaffian_cubic(B)
    # scan tiny coefficient vectors until the cubic is nonzero
    span = 3
    for point in _small_points(B.dim, span):
        if cubic.eval(point) != 0:
            return B.combination(point)
    raise AssertionError("nonzero cubic with no small nonvanishing point")


def _small_points(n: int, span: int):
    from itertools import product

    for point in product(range(0, span), repeat=n):
        if any(point):
            yield tuple(Fraction(c) for c in point)
    for point in product(range(-span, span + 1), repeat=n):
        if any(point):
            yield tuple(Fraction(c) for c in point)


def common_kernel(B: LinearSystem) -> Subspace:
    """Vectors annihilated by every generator (stacked nullspace, exact)."""
    stacked = []
    for g in B.generators:
        stacked.extend(g.matrix())
    return Subspace("W", linalg.nullspace(stacked, ncols=DIM))


def kernel_span(B: LinearSystem) -> Subspace:
    """Span of the kernels of enough rank-4 members to saturate.

    Seven members with coefficient vectors the 0/1 patterns span the full
    quadratic (Veronese) image of the plane, so the union of their kernels
    already spans the intrinsic kernel span.
    """
    patterns = [
        (1, 0, 0), (0, 1, 0), (0, 0, 1),
        (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1),
    ]
    rows: list = []
    for c in patterns:
        w = B.combination([Fraction(x) for x in c])
        if form_rank(w) != 4:
            raise NotCR4("member of rank != 4 encountered while spanning kernels")
        rows.extend(form_kernel(w).rows)
    return Subspace("W", rows)


def _is_isotropic(B: LinearSystem, U: Subspace) -> bool:
    rows = U.rows
    return all(
        g(rows[a], rows[b]) == 0
        for g in B.generators
        for a in range(len(rows))
        for b in range(a + 1, len(rows))
    )


def classify_cr4_plane(B: LinearSystem, primes: Sequence[int] = DEFAULT_PRIMES) -> str:
    """Sort a constant-rank-4 plane into its orbit.

    Decision tree, every positive branch certified exactly.  A common kernel
    vector means hyperplane type.  Otherwise the saturated kernel span
    separates the rest: for tangent planes all member kernels lie in the
    4-dimensional isotropic subspace, so the span is that subspace; for
    pencil planes the kernels span a hyperplane; for general planes they
    span everything and the (C, D, f) recovery must succeed.
    """
    ok, ev = is_constant_rank4(B, primes)
    if not ok:
        raise NotCR4(f"not constant rank 4: {ev.to_json()}")
    if common_kernel(B).dim >= 1:
        return "hyperplane"
    span = kernel_span(B)
    if span.dim == 4 and _is_isotropic(B, span):
        return "tangent"
    if span.dim == 5:
        return "pencil"
    if span.dim == DIM:
        try:
            recover_cdf(B)
            return "general"
        except NotGeneralType:
            return "unrecognized"
    # no orbit of constant-rank-4 planes produces the remaining shapes
    return "unrecognized"


def isotropic_triples(B: LinearSystem) -> list[tuple[tuple[Fraction, ...], ...]]:
    """All triples (k0, k1, k2), k_i in ker(w_i), spanning a totally isotropic
    3-space, up to scaling each entry.

    Any 3-space isotropic for a rank-4 form meets its kernel, so for a
    constant-rank-4 plane whose kernels span everything this enumerates all
    isotropic 3-spaces.  Solved exactly chart by chart on the product of the
    three projectivized kernels; raises NotGeneralType when a chart system is
    not zero-dimensional (then the isotropic spaces are not finite in number).
    """
    kernels = [form_kernel(g) for g in B.generators[:3]]
    if any(k.dim != 2 for k in kernels):
        raise NotGeneralType("a generator has kernel dimension != 2")
    conditions = list(B.generators)
    return _solve_kernel_triples(kernels, conditions)


def _solve_kernel_triples(kernels, conditions) -> list[tuple[tuple[Fraction, ...], ...]]:
    import sympy

    solutions: list[tuple[tuple[Fraction, ...], ...]] = []
    seen: set = set()
    x0, x1, x2 = sympy.symbols("x0 x1 x2")
    symbols = (x0, x1, x2)
    # chart bit 0: k = v0 + x * v1 (affine); bit 1: k = v1 (the point at infinity)
    for chart in range(8):
        bits = [(chart >> i) & 1 for i in range(3)]
        vecs = []
        for i, k in enumerate(kernels):
            v0, v1 = k.rows
            if bits[i]:
                vecs.append(tuple(sympy.Rational(c) for c in v1))
            else:
                vecs.append(
                    tuple(
                        sympy.Rational(a) + symbols[i] * sympy.Rational(b)
                        for a, b in zip(v0, v1)
                    )
                )
        eqs = []
        for g in conditions:
            for a in range(3):
                for b in range(a + 1, 3):
                    expr = sympy.expand(_sym_pairing(g, vecs[a], vecs[b]))
                    if expr != 0:
                        eqs.append(expr)
        free = [symbols[i] for i in range(3) if not bits[i]]
        sols = _solve_zero_dim(eqs, free)
        for sol in sols:
            assignment = dict(zip(free, sol))
            triple = []
            for i, k in enumerate(kernels):
                v0, v1 = k.rows
                if bits[i]:
                    triple.append(tuple(Fraction(c) for c in v1))
                else:
                    t = Fraction(str(assignment[symbols[i]]))
                    triple.append(tuple(a + t * b for a, b in zip(v0, v1)))
            key = tuple(_proj_key(v) for v in triple)
            if key not in seen:
                seen.add(key)
                solutions.append(tuple(triple))
    return solutions


def _sym_pairing(g: AlternatingForm, u, v):
    import sympy

    from .exterior import PAIRS

    total = sympy.Integer(0)
    for k, (i, j) in enumerate(PAIRS):
        c = g.coeffs[k]
        if c:
            total += sympy.Rational(c) * (u[i - 1] * v[j - 1] - u[j - 1] * v[i - 1])
    return total


def _solve_zero_dim(eqs, free):
    """Rational solutions of a zero-dimensional polynomial system.

    Non-rational solutions are discarded (they cannot produce a rational
    subspace); a positive-dimensional system raises NotGeneralType.
    """
    import sympy

    if not free:
        return [()] if all(e == 0 for e in eqs) else []
    nonzero = [e for e in eqs if e != 0]
    if not nonzero:
        raise NotGeneralType("isotropic triples form a positive-dimensional family")
    try:
        raw = sympy.solve_poly_system(nonzero, *free, domain=sympy.QQ)
    except NotImplementedError as exc:
        raise NotGeneralType(f"chart system is not zero-dimensional: {exc}") from exc
    if raw is None:
        return []
    out = []
    for sol in raw:
        if all(getattr(v, "is_rational", False) for v in sol):
            out.append(tuple(sol))
    return out


def _proj_key(v: Sequence[Fraction]) -> tuple:
    pivot = next(x for x in v if x != 0)
    return tuple(x / pivot for x in v)


def recover_cdf(B: LinearSystem) -> CDFDatum:
    """Recover the (C, D, f) datum of a general-type plane.

    Steps: the three generator kernels must span everything; the isotropic
    triple system must have exactly two solutions U1, U2 (then C annihilates
    U2 and D annihilates U1); f is the one-dimensional solution space of the
    linear system asking x ^ f(y) - y ^ f(x) to stay inside the plane; the
    recovered datum is re-verified before being returned.
    """
    if B.dim != 3:
        raise NotGeneralType("expected 3 generators")
    if kernel_span(B).dim != DIM:
        raise NotGeneralType("generator kernels do not span the whole space")
    triples = isotropic_triples(B)
    spaces = []
    for triple in triples:
        U = Subspace("W", triple)
        if U.dim != 3:
            continue
        spaces.append(U)
    spaces = _dedupe(spaces)
    if len(spaces) != 2:
        raise NotGeneralType(f"{len(spaces)} isotropic 3-spaces, expected exactly 2")
    U1, U2 = spaces
    C = U2.annihilator()
    D = U1.annihilator()
    if C.sum(D).dim != DIM:
        raise NotGeneralType("annihilators are not complementary")
    f = _solve_f(B, C.rows, D.rows)
    datum = CDFDatum(C, D, C.rows, D.rows, f, (U1, U2))
    for a in range(3):
        for b in range(a + 1, 3):
            w = datum.form_from_pair(C.rows[a], C.rows[b])
            if not B.contains(w):
                raise NotGeneralType("recovered datum fails to reproduce the plane")
    return datum


def _dedupe(spaces: list[Subspace]) -> list[Subspace]:
    out: list[Subspace] = []
    for s in spaces:
        if all(s != t for t in out):
            out.append(s)
    return out


def _solve_f(B: LinearSystem, c_basis, d_basis) -> linalg.Matrix:
    """The matrix of f in the given bases, normalized to first nonzero = 1.

    Unknowns F[k][b] with f(c_b) = sum_k F[k][b] d_k; the conditions say each
    c_a ^ f(c_b) - c_b ^ f(c_a) lies in the plane.  The solution space must be
    exactly one-dimensional and consist of invertible matrices.
    """
    echelon = B.echelon_basis()
    complement_conditions = linalg.nullspace([list(r) for r in echelon], ncols=15)
    rows = []
    for a in range(3):
        for b in range(a + 1, 3):
            # coefficient of F[k][col] in the 15-vector of c_a^f(c_b)-c_b^f(c_a)
            row_block = []
            for k in range(3):
                for col in range(3):
                    contrib = AlternatingForm.zero()
                    if col == b:
                        contrib = contrib + AlternatingForm.from_covectors(c_basis[a], d_basis[k])
                    if col == a:
                        contrib = contrib - AlternatingForm.from_covectors(c_basis[b], d_basis[k])
                    row_block.append(contrib.coeffs)
            for cond in complement_conditions:
                rows.append(
                    tuple(
                        sum((x * y for x, y in zip(cond, entry)), Fraction(0))
                        for entry in row_block
                    )
                )
    null = linalg.nullspace(rows, ncols=9)
    if len(null) != 1:
        raise NotGeneralType(f"f-system solution space has dimension {len(null)}")
    flat = null[0]
    pivot = next(x for x in flat if x != 0)
    flat = tuple(x / pivot for x in flat)
    f = tuple(tuple(flat[3 * k + col] for col in range(3)) for k in range(3))
    if linalg.det(f) == 0:
        raise NotGeneralType("recovered f is singular")
    return f


def normalize_general_plane(B: LinearSystem) -> GroupElement:
    """A determinant-1 change of basis g with g . B equal to the pi_g span.

    Built from the recovered datum by sending a basis of C to e1, e2, e3 and
    its f-images to the standard images e5, -e4, -e6; the determinant is then
    fixed to 1 by a diagonal element of the normal form's stabilizer.
    """
    datum = recover_cdf(B)
    c_rows = datum.c_basis
    f_images = [datum.apply_f(row) for row in c_rows]
    v_cols = list(c_rows) + f_images
    vmat = linalg.transpose(v_cols)
    targets = [
        (1, 0, 0, 0, 0, 0),
        (0, 1, 0, 0, 0, 0),
        (0, 0, 1, 0, 0, 0),
        (0, 0, 0, 0, 1, 0),   # e5
        (0, 0, 0, -1, 0, 0),  # -e4
        (0, 0, 0, 0, 0, -1),  # -e6
    ]
    tmat = linalg.transpose([[Fraction(x) for x in t] for t in targets])
    g = linalg.matmul(tmat, linalg.inverse(vmat))
    q = Fraction(1) / linalg.det(g)
    # diag(1, 1, 1/q, q, q, 1) preserves the pi_g span and has determinant q
    stab = GroupElement.diagonal([1, 1, Fraction(1) / q, q, q, 1])
    result = GroupElement(linalg.matmul(stab.matrix, g))
    normalized = B.transformed(result)
    if not normalized.same_span(LinearSystem(PI_G_GENERATORS)):
        raise NotGeneralType("normalization failed to reach the normal form")
    if result.det() != 1:
        raise AssertionError("normalizer determinant is not 1")
    return result
