import random
from fractions import Fraction

import pytest

from pfsys.scalars import (
    ArityMismatch,
    BadPrime,
    MultiPoly,
    PrimeFieldElement,
    format_rational,
    parse_rational,
    poly_eval,
    reconstruct_rational,
    reduce_mod,
)


def brute_force_inverse(a: int, p: int) -> int:
    # independent oracle: exhaustive search
    return next(k for k in range(1, p) if (a * k) % p == 1)


def test_reduce_mod_examples():
    assert reduce_mod(Fraction(1, 2), 7).value == 4
    assert reduce_mod(Fraction(0), 5).value == 0
    inv3 = brute_force_inverse(3, 7)
    assert reduce_mod(Fraction(-1, 3), 7).value == (-inv3) % 7 == 2


def test_reduce_mod_bad_prime():
    with pytest.raises(BadPrime):
        reduce_mod(Fraction(1, 5), 5)
    with pytest.raises(BadPrime):
        reduce_mod(Fraction(1, 2), 9)


def test_reduce_mod_is_ring_morphism():
    rng = random.Random(7)
    for _ in range(300):
        p = rng.choice([5, 7, 11])
        a = Fraction(rng.randint(-20, 20), rng.choice([1, 2, 3, 4, 6]))
        b = Fraction(rng.randint(-20, 20), rng.choice([1, 2, 3, 4, 6]))
        c = Fraction(rng.randint(-20, 20), rng.choice([1, 2, 3, 4, 6]))
        if a.denominator % p == 0 or b.denominator % p == 0 or c.denominator % p == 0:
            continue
        lhs = reduce_mod(a * b + c, p)
        rhs = reduce_mod(a, p) * reduce_mod(b, p) + reduce_mod(c, p)
        assert lhs == rhs


def test_field_axioms_rationals_and_prime_field():
    rng = random.Random(11)
    for _ in range(1000):
        a, b, c = (Fraction(rng.randint(-99, 99), rng.randint(1, 30)) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        if a != 0:
            assert a * (1 / a) == 1
        p = rng.choice([5, 7, 11])
        x, y, z = (PrimeFieldElement(rng.randrange(p), p) for _ in range(3))
        assert (x + y) + z == x + (y + z)
        if x.value != 0:
            assert (x * x.inverse()).value == 1


def test_poly_eval_examples():
    f = MultiPoly.variable(0, 2) * MultiPoly.variable(1, 2)
    assert poly_eval(f, (Fraction(2), Fraction(3))) == 6
    zero = MultiPoly.zero(3)
    assert poly_eval(zero, (Fraction(1), Fraction(2), Fraction(3))) == 0
    x0, x1 = MultiPoly.variable(0, 2), MultiPoly.variable(1, 2)
    cubes = x0 * x0 * x0 - x1 * x1 * x1
    assert poly_eval(cubes, (Fraction(1), Fraction(1))) == 0
    with pytest.raises(ArityMismatch):
        poly_eval(f, (Fraction(1),))


def test_poly_arithmetic_and_homogeneity():
    x0, x1 = MultiPoly.variable(0, 2), MultiPoly.variable(1, 2)
    q = x0 * x1 + x1 * x1
    assert q.is_homogeneous(2)
    assert not (q + MultiPoly.constant(1, 2)).is_homogeneous()
    assert (q - q).is_zero()
    assert q.scale(0).is_zero()


def test_rational_serialization_roundtrip():
    for s in ("3/4", "-7", "0", "22/7"):
        assert format_rational(parse_rational(s)) == s


def test_rational_reconstruction_roundtrip():
    for p in (5, 7, 11, 101, 10007):
        bound = int((p // 2) ** 0.5)
        for num in range(-bound, bound + 1):
            for den in range(1, bound + 1):
                from math import gcd

                if gcd(abs(num), den) != 1 or den % p == 0:
                    continue
                residue = num * pow(den, p - 2, p) % p
                lifted = reconstruct_rational(residue, p)
                assert lifted == Fraction(num, den)


def test_rational_reconstruction_rejects_out_of_range():
    # 2 is not representable with numerator and denominator at most 1 mod 5
    assert reconstruct_rational(2, 5) is None
