import random
from fractions import Fraction

import pytest

from conftest import random_form
from pfsys import linalg
from pfsys.catalog import builtin, random_pattern_system
from pfsys.exterior import (
    PAIRS,
    AlternatingForm,
    BiVector,
    act,
    form_rank,
    pfaffian,
    random_unimodular,
)
from pfsys.linsys import (
    LinearSystem,
    classify_counts,
    generic_rank,
    gr_intersection,
    line_in_pfaffian,
    orthogonal,
    pfaffian_cubic,
)
from pfsys.scalars import MultiPoly

SYMPLECTIC = AlternatingForm.from_terms([(1, 2, 1), (3, 4, 1), (5, 6, 1)])


def test_linear_system_requires_independence():
    w = AlternatingForm.basis(1, 2)
    with pytest.raises(ValueError):
        LinearSystem([w, w.scale(3)])


def test_pfaffian_cubic_examples():
    assert pfaffian_cubic(builtin("pi_g").system).is_zero()
    assert pfaffian_cubic(builtin("thm_dim3").system).is_zero()
    cubic = pfaffian_cubic(LinearSystem([SYMPLECTIC]))
    assert cubic == MultiPoly(1, {(3,): Fraction(1)})


def test_pfaffian_cubic_interpolates_scalar_pfaffian():
    # oracle: the symbolic cubic agrees with the scalar Pfaffian pointwise
    rng = random.Random(23)
    A = LinearSystem([random_form(rng, 3) for _ in range(3)])
    cubic = pfaffian_cubic(A)
    for _ in range(10):
        point = [Fraction(rng.randint(-5, 5)) for _ in range(3)]
        assert cubic.eval(point) == pfaffian(A.combination(point))


def test_generic_rank_examples(rng):
    assert generic_rank(builtin("pi_g").system, rng) == 4
    assert generic_rank(LinearSystem([AlternatingForm.basis(1, 2)]), rng) == 2
    pencil = LinearSystem([SYMPLECTIC, AlternatingForm.basis(1, 2)])
    # oracle: the Pfaffian of the pencil is the nonzero cubic s^2 (s + t)
    cubic = pfaffian_cubic(pencil)
    assert cubic == MultiPoly(2, {(3, 0): Fraction(1), (2, 1): Fraction(1)})
    assert generic_rank(pencil, rng) == 6


def test_orthogonal_examples():
    full = LinearSystem([AlternatingForm.basis(i, j) for i, j in PAIRS])
    assert orthogonal(full) == []
    one = LinearSystem([AlternatingForm.basis(1, 2)])
    basis = orthogonal(one)
    assert len(basis) == 14
    assert all(b.pair(AlternatingForm.basis(1, 2)) == 0 for b in basis)
    pg = builtin("pi_g").system
    basis = orthogonal(pg)
    assert len(basis) == 12
    span = [b.coeffs for b in basis]
    for i, j in ((1, 2), (2, 3), (1, 3)):
        assert linalg.row_space_contains(linalg.rref(span)[0], BiVector.basis(i, j).coeffs)


def test_orthogonal_dimension_and_pairing(rng):
    for n in (1, 3, 5):
        gens = []
        while len(gens) < n:
            w = random_form(rng, 3)
            try:
                LinearSystem(gens + [w])
            except ValueError:
                continue
            gens.append(w)
        A = LinearSystem(gens)
        basis = orthogonal(A)
        assert len(basis) + A.dim == 15
        assert all(b.pair(g) == 0 for b in basis for g in A.generators)


def test_line_in_pfaffian_examples():
    pg = builtin("pi_g").system
    assert line_in_pfaffian(pg.generators[0], pg.generators[1])
    assert not line_in_pfaffian(SYMPLECTIC, AlternatingForm.basis(1, 2))
    assert line_in_pfaffian(AlternatingForm.basis(1, 2), AlternatingForm.basis(1, 3))


def test_gr_intersection_signatures():
    assert gr_intersection(builtin("thm_dim3").system).counts == {5: 2, 7: 2, 11: 2}
    conic = gr_intersection(builtin("thm_dim4a").system)
    assert conic.counts == {5: 6, 7: 8, 11: 12} and conic.candidate_type == "conic"
    planes = gr_intersection(builtin("thm_dim5").system)
    assert planes.counts == {5: 62, 7: 114, 11: 266}
    assert planes.candidate_type == "2-planes"


def test_gr_intersection_sample_points_verify_exactly():
    report = gr_intersection(builtin("thm_dim3").system)
    assert report.sample_points, "expected at least one lifted rational point"
    for w, coords in zip(report.sample_points, report.sample_coordinates):
        assert form_rank(w) == 2
        assert builtin("thm_dim3").system.combination(coords) == w


def test_gr_intersection_samples_transport(rng):
    report = gr_intersection(builtin("thm_dim4a").system)
    for _ in range(5):
        g = random_unimodular(rng)
        for w in report.sample_points:
            assert form_rank(act(g, w)) == 2


def test_classify_counts_mismatch_reports_other():
    assert classify_counts({5: 2, 7: 3}) == "other"
    assert classify_counts({5: 0, 7: 0}) == "empty"


def test_pfaffian_cubic_transforms_by_determinant(rng):
    A = builtin("thm_dim4a").system
    for _ in range(100):
        g = random_unimodular(rng)
        lhs = pfaffian_cubic(A.transformed(g))
        rhs = pfaffian_cubic(A).scale(g.det())
        assert lhs == rhs


def test_unstable_patterns_live_in_pfaffian(rng):
    for s in (1, 2, 3):
        for _ in range(20):
            A = random_pattern_system(rng, s, "unstable")
            assert pfaffian_cubic(A).is_zero()
