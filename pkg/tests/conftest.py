import random
from fractions import Fraction

import pytest

from pfsys.exterior import AlternatingForm


@pytest.fixture
def rng():
    return random.Random(20240901)


def random_form(rng, span: int = 9) -> AlternatingForm:
    """A random integer form; entries uniform in [-span, span]."""
    return AlternatingForm([Fraction(rng.randint(-span, span)) for _ in range(15)])


def random_rank_le4_form(rng) -> AlternatingForm:
    """A random form of rank at most 4: a sum of two decomposables."""
    vecs = [[Fraction(rng.randint(-4, 4)) for _ in range(6)] for _ in range(4)]
    return AlternatingForm.from_covectors(vecs[0], vecs[1]) + AlternatingForm.from_covectors(
        vecs[2], vecs[3]
    )
