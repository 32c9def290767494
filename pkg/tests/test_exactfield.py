import cmath
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from picard_modular.exactfield import (
    ONE,
    ZERO,
    ZETA,
    CycNum,
    NotRealError,
    PrecisionCapError,
    abs2,
    embed,
    format_cycnum,
    im_part,
    parse_cycnum,
    re_part,
    set_sign_precision,
    sign_real,
    to_interval,
    zeta_power,
)

ROOT = cmath.exp(2j * math.pi / 36)

coeff = st.one_of(st.integers(-5, 5), st.fractions(min_value=-3, max_value=3, max_denominator=6))
cycnums = st.lists(coeff, min_size=12, max_size=12).map(CycNum)


def close(a: CycNum, w: complex, tol: float = 1e-9) -> bool:
    return abs(complex(a) - w) < tol


def test_defining_relation():
    assert ZETA ** 12 == ZETA ** 6 - ONE
    assert ZETA ** 36 == ONE
    assert all(ZETA ** k != ONE for k in range(1, 36))
    assert zeta_power(-1) * ZETA == ONE


def test_powers_match_complex_embedding():
    for k in range(-40, 80):
        assert close(zeta_power(k), ROOT ** k)


@pytest.mark.parametrize("name, value", [
    ("omega", cmath.exp(2j * math.pi / 3)),
    ("i", 1j),
    ("sqrt3", math.sqrt(3)),
    ("zeta18", cmath.exp(1j * math.pi / 9)),
    ("zeta9", cmath.exp(2j * math.pi / 9)),
    ("zeta36", ROOT),
    ("sin_pi_9", math.sin(math.pi / 9)),
    ("cos_pi_9", math.cos(math.pi / 9)),
])
def test_named_constants(name, value):
    assert close(embed(name), value)


def test_constant_identities():
    w, i, s3 = embed("omega"), embed("i"), embed("sqrt3")
    assert w * w + w + 1 == ZERO
    assert i * i == -ONE
    assert s3 * s3 == CycNum.rational(3)
    assert embed("sin_pi_9") ** 2 + embed("cos_pi_9") ** 2 == ONE
    with pytest.raises(KeyError):
        embed("pi")


def test_norm_and_inverse():
    assert ZETA.norm() == 1
    two = CycNum.rational(2)
    assert two.norm() == 2 ** 12
    a = ONE + ZETA
    assert a * a.inverse() == ONE
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_galois():
    assert ZETA.galois(5) == zeta_power(5)
    with pytest.raises(ValueError):
        ZETA.galois(3)
    a, b = ONE + 2 * ZETA, ZETA ** 7 - Fraction(1, 3)
    assert (a * b).galois(11) == a.galois(11) * b.galois(11)


def test_real_imag_parts():
    a = parse_cycnum("3*z^5 - z + 1/2")
    v = complex(a)
    assert close(re_part(a), v.real)
    assert close(im_part(a), v.imag)
    assert close(abs2(a), abs(v) ** 2)
    assert re_part(a).conj() == re_part(a)


def test_interval_contains_value():
    rng = random.Random(3)
    for _ in range(50):
        a = CycNum([rng.randint(-9, 9) for _ in range(12)])
        for bits in (16, 64, 200):
            box = to_interval(a, bits)
            assert box.contains(complex(a), slack=1e-12)
            assert box.re_lo <= box.re_hi and box.im_lo <= box.im_hi
    assert to_interval(ONE + ZETA, 200).width < Fraction(1, 2 ** 190)


def test_interval_handles_negative_endpoints():
    # cos(100 deg) < 0: the enclosure must carry the sign
    a = parse_cycnum("2*z^10 - 2*z^8")
    box = to_interval(a, 64)
    assert box.re_hi < 0
    assert sign_real(a) == -1


def test_sign_real_basics():
    assert sign_real(ZERO) == 0
    assert sign_real(CycNum.rational(-2)) == -1
    assert sign_real(embed("sqrt3") - CycNum.rational(Fraction(173, 100))) == 1
    assert sign_real(embed("sqrt3") - CycNum.rational(Fraction(174, 100))) == -1
    with pytest.raises(NotRealError):
        sign_real(embed("i"))


def test_sign_real_tiny_gap_against_mpmath():
    # sqrt3 - p/q with a continued-fraction convergent: very close to zero
    p, q = 716035, 413403
    x = embed("sqrt3") - CycNum.rational(Fraction(p, q))
    with mpmath.workdps(50):
        want = 1 if mpmath.sqrt(3) - mpmath.mpf(p) / q > 0 else -1
    assert sign_real(x) == want


def test_precision_cap_and_setting():
    x = embed("sqrt3") - CycNum.rational(Fraction(716035, 413403))
    with pytest.raises(PrecisionCapError):
        sign_real(x, start_bits=16, max_bits=16)
    old = set_sign_precision(16, 16)
    try:
        with pytest.raises(PrecisionCapError):
            sign_real(x)
    finally:
        set_sign_precision(*old)
    assert sign_real(x) in (-1, 1)
    with pytest.raises(ValueError):
        set_sign_precision(8)


def test_text_round_trip():
    for text in ("0", "1", "-z^11 + 2/3*z^4 - 5", "z", "z^6 - 1"):
        assert format_cycnum(parse_cycnum(text)) == text
    assert parse_cycnum("z^12") == parse_cycnum("z^6 - 1")
    for bad in ("", "z^", "2**z", "q"):
        with pytest.raises(ValueError):
            parse_cycnum(bad)


@settings(max_examples=200, deadline=None)
@given(cycnums, cycnums, cycnums)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - b) + b == a
    assert hash(a + b) == hash(b + a)


@settings(max_examples=100, deadline=None)
@given(cycnums, cycnums)
def test_division_and_conjugation(a, b):
    if not a.is_zero():
        assert (b / a) * a == b
    assert (a * b).conj() == a.conj() * b.conj()
    assert a.conj().conj() == a
    assert close(a.conj(), complex(a).conjugate(), 1e-6)


@settings(max_examples=100, deadline=None)
@given(cycnums)
def test_sign_of_real_part_matches_float(a):
    x = a + a.conj()
    f = complex(x).real
    if abs(f) > 1e-9:
        assert sign_real(x) == (1 if f > 0 else -1)
    else:
        assert (sign_real(x) == 0) == x.is_zero()


@settings(max_examples=100, deadline=None)
@given(cycnums)
def test_text_round_trip_random(a):
    assert parse_cycnum(format_cycnum(a)) == a
