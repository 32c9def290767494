import math
import random
from fractions import Fraction

import pytest

from picard_modular.chgeom import (
    QINF,
    DegeneratePairError,
    FixesInfinityError,
    FordSide,
    HeisenbergPoint,
    HoroPoint,
    NonNegativeVectorError,
    PointAtInfinityError,
    PointClass,
    PositiveVectorError,
    ZeroVectorError,
    bergman_cosh2,
    classify_vector,
    common_complex_line,
    cosh_distance,
    cygan_dist4,
    dilation,
    ford_side,
    heis_inverse,
    heis_mul,
    heis_translation,
    herm,
    horo_coords,
    isometric_sphere,
    lift,
    named_point,
    on_geodesic_between,
    rotation,
    triple_product_is_real,
)
from picard_modular.exactfield import ONE, ZERO, CycNum, embed, sign_real
from picard_modular.group import eval_word, generator, is_h_unitary
from picard_modular.matrices import HERMITIAN, HVector, Matrix, proj_equal

Q = CycNum.rational


def float_herm(a, b) -> complex:
    # <a, b> = b^* H a with the antidiagonal form
    a, b = [complex(x) for x in a], [complex(x) for x in b]
    return a[0] * b[2].conjugate() + a[1] * b[1].conjugate() + a[2] * b[0].conjugate()


def rand_horo(rng, positive_height=True) -> HoroPoint:
    z = CycNum([rng.randint(-2, 2), rng.randint(-2, 2)] + [0] * 7 + [rng.randint(-1, 1)])
    t = Q(Fraction(rng.randint(-6, 6), rng.randint(1, 3)))
    u = Q(Fraction(rng.randint(1 if positive_height else 0, 5), rng.randint(1, 3)))
    return HoroPoint(z, t, u)


def test_form_is_antidiagonal():
    assert HERMITIAN == Matrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    rng = random.Random(1)
    for _ in range(30):
        a = HVector([CycNum([rng.randint(-3, 3) for _ in range(12)]) for _ in range(3)])
        b = HVector([CycNum([rng.randint(-3, 3) for _ in range(12)]) for _ in range(3)])
        assert abs(complex(herm(a, b)) - float_herm(a, b)) < 1e-8
        assert herm(a, b) == herm(b, a).conj()


def test_classify_vector():
    assert classify_vector(QINF) is PointClass.NULL
    assert classify_vector(HVector([0, 1, 0])) is PointClass.POSITIVE
    assert classify_vector(HVector([-1, 0, 1])) is PointClass.NEGATIVE
    with pytest.raises(ZeroVectorError):
        classify_vector(HVector([0, 0, 0]))


def test_named_points_are_negative():
    for name in ("z0", "z1", "z2", "z3", "w3", "w4", "w12"):
        assert classify_vector(named_point(name)) is PointClass.NEGATIVE, name
    assert classify_vector(named_point("qinf")) is PointClass.NULL
    for name in ("n1", "n2", "n3"):
        assert classify_vector(named_point(name)) is PointClass.POSITIVE
    with pytest.raises(KeyError):
        named_point("z9")


def test_lift_round_trip():
    rng = random.Random(2)
    for _ in range(40):
        p = rand_horo(rng, positive_height=False)
        assert horo_coords(lift(p)) == p
        v = lift(p)
        assert horo_coords(v.scale(embed("omega") + 3)) == p
        want = PointClass.NULL if p.u.is_zero() else PointClass.NEGATIVE
        assert classify_vector(v) is want


def test_horo_errors():
    with pytest.raises(PointAtInfinityError):
        horo_coords(QINF)
    with pytest.raises(PositiveVectorError):
        horo_coords(HVector([1, 0, 1]))
    with pytest.raises(ValueError):
        HoroPoint(ZERO, ZERO, Q(-1))
    with pytest.raises(ValueError):
        HeisenbergPoint(ZERO, embed("i"))


def test_heisenberg_group_law():
    rng = random.Random(3)
    pts = [HeisenbergPoint(rand_horo(rng).z, rand_horo(rng).t) for _ in range(6)]
    e = HeisenbergPoint(ZERO, ZERO)
    for p in pts:
        assert heis_mul(p, heis_inverse(p)) == e
        for q in pts:
            assert heis_translation(p) * heis_translation(q) == heis_translation(heis_mul(p, q))
            for r in pts[:2]:
                assert heis_mul(heis_mul(p, q), r) == heis_mul(p, heis_mul(q, r))


def test_translation_acts_by_left_multiplication():
    rng = random.Random(4)
    for _ in range(20):
        p = rand_horo(rng)
        h = HeisenbergPoint(rand_horo(rng).z, rand_horo(rng).t)
        moved = horo_coords(heis_translation(h) * lift(p))
        prod = heis_mul(h, HeisenbergPoint(p.z, p.t))
        assert (moved.z, moved.t, moved.u) == (prod.z, prod.t, p.u)
        assert is_h_unitary(heis_translation(h))


def test_rotation_and_dilation():
    w = embed("omega")
    r = rotation(w)
    assert is_h_unitary(r)
    p = HoroPoint(ONE, Q(2), Q(1))
    q = horo_coords(r * lift(p))
    assert (q.z, q.t, q.u) == (w, Q(2), Q(1))
    q = horo_coords(dilation(2) * lift(p))
    assert (q.z, q.t, q.u) == (2 * p.z, 4 * p.t, 4 * p.u)


def test_bergman_distance_oracle():
    # vertical geodesic: (0,0,u) points have cosh^2(d/2) = (u1+u2)^2 / (4 u1 u2)
    for u1, u2 in ((1, 1), (1, 4), (2, 9), (Fraction(1, 3), 5)):
        a = lift(HoroPoint(ZERO, ZERO, Q(u1)))
        b = lift(HoroPoint(ZERO, ZERO, Q(u2)))
        want = Fraction(u1 + u2) ** 2 / (4 * Fraction(u1) * u2)
        assert bergman_cosh2(a, b) == Q(want)
        d = abs(math.log(Fraction(u2) / Fraction(u1)))
        assert abs(float(complex(cosh_distance(a, b)).real) - math.cosh(d)) < 1e-9
    with pytest.raises(NonNegativeVectorError):
        bergman_cosh2(QINF, lift(HoroPoint(ZERO, ZERO, ONE)))


def test_bergman_invariance_under_generators():
    rng = random.Random(5)
    gens = [generator(n) for n in ("P", "Q", "R", "R1", "R2", "R3", "J")]
    for _ in range(15):
        u, v = lift(rand_horo(rng)), lift(rand_horo(rng))
        base = bergman_cosh2(u, v)
        assert sign_real(base - 1) >= 0
        for g in gens:
            assert bergman_cosh2(g * u, g * v) == base


def test_betweenness_on_vertical_geodesic():
    pts = [lift(HoroPoint(ZERO, ZERO, Q(u))) for u in (1, 2, 7)]
    assert on_geodesic_between(pts[0], pts[1], pts[2])
    assert not on_geodesic_between(pts[1], pts[0], pts[2])
    off = lift(HoroPoint(ONE, ZERO, Q(2)))
    assert not on_geodesic_between(pts[0], off, pts[2])
    assert on_geodesic_between(pts[0], pts[0], pts[2])


def test_complex_line_and_triple_product():
    z0, z3 = named_point("z0"), named_point("z3")
    polar = common_complex_line([z0, z3, QINF])
    assert proj_equal(polar, named_point("n1"))
    assert herm(z0, polar).is_zero() and herm(z3, polar).is_zero()
    assert common_complex_line([z0, named_point("z1"), QINF]) is None
    assert triple_product_is_real(z0, z3, named_point("z1"))
    # a generic triple: not in a common R-plane
    a = lift(HoroPoint(ZERO, ZERO, ONE))
    b = lift(HoroPoint(ONE, ZERO, ONE))
    c = lift(HoroPoint(embed("i"), ZERO, ONE))
    assert not triple_product_is_real(a, b, c)
    null = HVector([0, 0, 1])
    with pytest.raises(DegeneratePairError):
        triple_product_is_real(null, null, a)


def test_isometric_sphere_matches_cygan_metric():
    g = eval_word("R*P")
    data = isometric_sphere(g)
    assert data.radius4 == 4 / (g[2, 0] * g[2, 0].conj())
    centre = HoroPoint(data.center.z, data.center.t, ZERO)
    rng = random.Random(6)
    for _ in range(30):
        p = rand_horo(rng)
        side = ford_side(lift(p), g)
        s = sign_real(cygan_dist4(p, centre) - data.radius4)
        assert side is {1: FordSide.EXTERIOR, 0: FordSide.ON, -1: FordSide.INTERIOR}[s]


def test_ford_side_of_named_points():
    rp = eval_word("R*P")
    sides = {n: ford_side(named_point(n), rp) for n in ("z0", "z1", "z2", "z3")}
    assert sides["z0"] is sides["z1"] is sides["z2"] is FordSide.ON
    assert sides["z3"] is FordSide.EXTERIOR
    with pytest.raises(FixesInfinityError):
        ford_side(named_point("z0"), generator("P"))
    with pytest.raises(FixesInfinityError):
        isometric_sphere(generator("Q"))


def test_cygan_is_symmetric():
    rng = random.Random(7)
    for _ in range(20):
        p, q = rand_horo(rng), rand_horo(rng)
        assert cygan_dist4(p, q) == cygan_dist4(q, p)
        assert cygan_dist4(p, p) == ZERO
