"""The degree-6 scroll attached to a general-type plane.

A general-type plane B determines a 9-dimensional space Lambda of forms (the
annihilator of the span of its Gauss image) and a threefold scroll Z inside
it: the union over the plane of the conics

    (t0 x + t1 f(x)) ^ (t0 y + t1 f(y)),    omega = x ^ f(y) - y ^ f(x),

which is exactly the rank <= 2 locus of Lambda.  This module builds the
datum, evaluates the fiber maps rho and psi, tests scroll membership through
the linear-plus-quadric characterization, and computes the dimension of the
space of quadrics cutting Z out of Lambda.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import gfp, linalg
from .exterior import (
    AlternatingForm,
    BiVector,
    Subspace,
    form_rank,
    wedge_product,
)
from .linsys import LinearSystem
from .planes import CDFDatum, NotGeneralType, recover_cdf
from .scalars import reduce_mod


class NotInPlane(ValueError):
    """The form does not belong to the scroll's base plane."""


@dataclass
class ScrollDatum:
    plane: LinearSystem
    cdf: CDFDatum
    gauss_span: list[BiVector]          # 6-dimensional span of the Gauss image
    lambda_basis: list[AlternatingForm]  # 9-dimensional orthogonal space
    _rho_matrix: linalg.Matrix           # plane coordinates -> wedge^2 C coordinates

    @classmethod
    def from_plane(cls, B: LinearSystem, cdf: CDFDatum | None = None) -> "ScrollDatum":
        if B.dim != 3:
            raise NotGeneralType("expected 3 generators")
        if cdf is None:
            cdf = recover_cdf(B)
        span_rows = []
        gens = B.generators
        for a in range(3):
            for b in range(a, 3):
                span_rows.append(wedge_product(gens[a], gens[b]).hodge_dual().coeffs)
        red, _ = linalg.rref(span_rows)
        if len(red) != 6:
            raise NotGeneralType("Gauss image span does not have dimension 6")
        gauss_span = [BiVector(r) for r in red]
        lam_rows = linalg.nullspace([list(r) for r in red], ncols=15)
        lambda_basis = [AlternatingForm(r) for r in lam_rows]
        # rho: invert the linear map wedge^2 C -> plane, x ^ y -> x^f(y)-y^f(x)
        c = cdf.c_basis
        images = []
        for a, b in ((0, 1), (0, 2), (1, 2)):
            w = cdf.form_from_pair(c[a], c[b])
            coords = B.coordinates_of(w)
            if coords is None:
                raise NotGeneralType("datum images leave the plane")
            images.append(coords)
        rho_matrix = linalg.inverse(linalg.transpose(images))
        return cls(B, cdf, gauss_span, lambda_basis, rho_matrix)

    def in_lambda(self, theta: AlternatingForm) -> bool:
        return all(b.pair(theta) == 0 for b in self.gauss_span)


def rho(datum: ScrollDatum, omega: AlternatingForm) -> AlternatingForm:
    """The decomposable 2-vector x ^ y over C with
    omega = x ^ f(y) - y ^ f(x), as a rank-2 tensor supported on C."""
    coords = datum.plane.coordinates_of(omega)
    if coords is None:
        raise NotInPlane("form is not a member of the base plane")
    xi = linalg.matvec(datum._rho_matrix, coords)
    c = datum.cdf.c_basis
    acc = AlternatingForm.zero()
    for coeff, (a, b) in zip(xi, ((0, 1), (0, 2), (1, 2))):
        if coeff:
            acc = acc + AlternatingForm.from_covectors(c[a], c[b]).scale(coeff)
    return acc


def _factor_decomposable(w: AlternatingForm) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Covectors x, y with x ^ y equal to the given rank-2 form, exactly."""
    plane = linalg.rref(w.matrix())[0]
    x, y = plane[0], plane[1]
    probe = AlternatingForm.from_covectors(x, y)
    pivot = next(k for k, c in enumerate(probe.coeffs) if c != 0)
    scale = w.coeffs[pivot] / probe.coeffs[pivot]
    x = tuple(scale * v for v in x)
    if AlternatingForm.from_covectors(x, y) != w:
        raise ValueError("form is not decomposable")
    return x, y


def psi(datum: ScrollDatum, omega: AlternatingForm, t: Sequence) -> AlternatingForm:
    """The rank-2 scroll point over (omega, [t0 : t1]).

    Expands to t0^2 (x ^ y) + t0 t1 omega + t1^2 (f(x) ^ f(y)), so the fiber
    is a conic through rho(omega) and its f-image.
    """
    t0, t1 = Fraction(t[0]), Fraction(t[1])
    if t0 == 0 and t1 == 0:
        raise ValueError("(0, 0) is not a point of the projective line")
    x, y = _factor_decomposable(rho(datum, omega))
    fx = datum.cdf.apply_f(x)
    fy = datum.cdf.apply_f(y)
    left = tuple(t0 * a + t1 * b for a, b in zip(x, fx))
    right = tuple(t0 * a + t1 * b for a, b in zip(y, fy))
    return AlternatingForm.from_covectors(left, right)


def conic_fiber(
    datum: ScrollDatum, omega: AlternatingForm, ts: Sequence[Sequence] | None = None, p: int | None = None
) -> list[AlternatingForm]:
    """Points of the conic fiber over omega.

    With ``p`` given, all p + 1 points of the fiber over F_p are returned
    (as forms with small integer parameter values lifted from the projective
    line over F_p); otherwise the forms at the supplied parameter values.
    """
    if (ts is None) == (p is None):
        raise ValueError("pass exactly one of ts or p")
    if p is not None:
        ts = [(1, k) for k in range(p)] + [(0, 1)]
    return [psi(datum, omega, t) for t in ts]


def z_membership(datum: ScrollDatum, theta: AlternatingForm) -> bool:
    """Scroll membership: inside Lambda and of rank <= 2.

    The scroll equals the rank <= 2 locus of Lambda, so the pairing test
    against the Gauss span plus the vanishing of the wedge square decide
    membership outright.
    """
    if not datum.in_lambda(theta):
        return False
    return form_rank(theta) <= 2


def restricted_quadric_system_dim(datum: ScrollDatum) -> int:
    """Projective dimension of the span of the 15 coordinate quadrics of the
    wedge square, restricted to Lambda.

    Writing a general member of Lambda as sum X_i theta_i over a basis, the
    wedge square expands into 15 quadrics in X_0..X_8; the answer is the rank
    of their coefficient matrix minus one, and it does not depend on the
    chosen basis of Lambda.
    """
    return quadric_span_rank(datum.lambda_basis) - 1


def quadric_span_rank(basis: Sequence[AlternatingForm]) -> int:
    """Rank of the span of the wedge-square coordinate quadrics on the span
    of the given forms."""
    n = len(basis)
    monomials = [(i, j) for i in range(n) for j in range(i, n)]
    mono_index = {m: k for k, m in enumerate(monomials)}
    rows = []
    for quad in range(15):
        row = [Fraction(0)] * len(monomials)
        for i in range(n):
            for j in range(i, n):
                prod = wedge_product(basis[i], basis[j]).coeffs[quad]
                # (sum X_i theta_i)^2 doubles the mixed terms
                coeff = prod if i == j else 2 * prod
                if coeff:
                    row[mono_index[(i, j)]] += coeff
        rows.append(tuple(row))
    return linalg.rank(rows)


def z_point_count(datum: ScrollDatum, p: int) -> int:
    """|Z(F_p)| by exhaustive enumeration of the projectivized Lambda."""
    coeff_rows = np.stack(
        [gfp.form_vector_mod(theta, p) for theta in datum.lambda_basis]
    )
    return gfp.count_projective_quadric_zeros(coeff_rows, len(datum.lambda_basis), p)


def z_image_count(datum: ScrollDatum, p: int) -> int:
    """|Z(F_p)| by enumerating the image of psi over the plane and the line.

    Independent of the Lambda-based count; also certifies injectivity of the
    parametrization over F_p when the two agree with (p^2+p+1)(p+1).
    """
    points: set[tuple] = set()
    for block in gfp.projective_reps(2, p):
        for coeffs in block:
            omega = datum.plane.combination([Fraction(int(c)) for c in coeffs])
            for t in [(1, k) for k in range(p)] + [(0, 1)]:
                w = psi(datum, omega, t)
                vec = tuple(reduce_mod(c, p).value for c in w.coeffs)
                pivot = next((v for v in vec if v), None)
                if pivot is None:
                    continue
                inv = pow(pivot, p - 2, p)
                points.add(tuple(v * inv % p for v in vec))
    return len(points)
