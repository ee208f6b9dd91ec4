"""Exact computational toolkit for linear systems of skew-symmetric forms on
a 6-dimensional space: Pfaffians and rank strata, intersections with the
rank-2 locus, GIT stability decisions with certified witnesses, the
classification of constant-rank-4 planes, and the associated degree-6 scroll.
"""

from .exterior import (
    AlternatingForm,
    BiVector,
    FourVector,
    GroupElement,
    Subspace,
    act,
    form_kernel,
    form_rank,
    gauss_map,
    gr_tangent_space,
    pfaffian,
    wedge_square,
)
from .linsys import LinearSystem, gr_intersection, line_in_pfaffian, pfaffian_cubic
from .scalars import MultiPoly, PrimeFieldElement, Rational, reduce_mod
from .stability import DestabilizingWitness, OnePS, StabilityVerdict, decide_stability

__all__ = [
    "AlternatingForm",
    "BiVector",
    "FourVector",
    "GroupElement",
    "Subspace",
    "LinearSystem",
    "MultiPoly",
    "PrimeFieldElement",
    "Rational",
    "OnePS",
    "DestabilizingWitness",
    "StabilityVerdict",
    "act",
    "decide_stability",
    "form_kernel",
    "form_rank",
    "gauss_map",
    "gr_intersection",
    "gr_tangent_space",
    "line_in_pfaffian",
    "pfaffian",
    "pfaffian_cubic",
    "reduce_mod",
    "wedge_square",
]

__version__ = "0.1.0"
