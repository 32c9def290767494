import itertools
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from picard_modular.chgeom import named_point
from picard_modular.group import eval_word, generator, parse_word
from picard_modular.isotropy import (
    CapExceededError,
    MaxCosetsExceededError,
    Presentation,
    abelian_invariants,
    abelianization,
    center,
    center_indices,
    closure,
    common_fixed_point,
    cyclic_table,
    dihedral_table,
    direct_product,
    hom_check,
    iso_check,
    isotropy_table,
    matrix_group_vs_presentation,
    normal_closure,
    parse_presentation,
    quotient,
    smith_normal_form,
    subgroup_table,
    table_from_presentation,
    todd_coxeter,
)

GAMMA_Z0 = "gens: a b c; rels: a^6, b^6, c^12, a*b*a^-1*b^-1, c*a*c^-1*b^-1, a^5*b^5*c^-2"
Z0_IMAGES = {"a": "R1", "b": "R2*R3*R2^-1", "c": "R2*J^2"}
G_LITERAL = "gens: c1 c2 c3 h; rels: h^6 = c1*c2*c3, h^6, c1^2 = h^3, c2^2, c3^6"


def images(d):
    return {k: eval_word(v) for k, v in d.items()}


# -- small-group oracles ---------------------------------------------------------------------


def test_cyclic_and_dihedral_tables():
    c6 = cyclic_table(6)
    assert c6.order == 6 and c6.is_abelian()
    assert sorted(c6.order_profile()) == sorted([1, 6, 3, 2, 3, 6])
    d6 = dihedral_table(6)
    assert d6.order == 12 and not d6.is_abelian()
    assert d6.check_associativity()
    assert len(center_indices(d6)) == 2
    assert len(center_indices(dihedral_table(5))) == 1


def test_iso_check_distinguishes_small_groups():
    z2 = cyclic_table(2)
    assert iso_check(direct_product(z2, cyclic_table(3)), cyclic_table(6))
    assert not iso_check(direct_product(z2, z2), cyclic_table(4))
    assert iso_check(dihedral_table(3), table_from_presentation(parse_presentation("gens: a b; rels: a^3, b^2, b*a*b*a")))
    q8 = table_from_presentation(parse_presentation("gens: i j; rels: i^4, i^2*j^-2, j^-1*i*j*i"))
    assert q8.order == 8
    assert not iso_check(q8, dihedral_table(4))
    assert not iso_check(dihedral_table(6), direct_product(cyclic_table(2), cyclic_table(6)))


@pytest.mark.parametrize("text, order", [
    ("gens: a; rels: a^6", 6),
    ("gens: a b; rels: a^2, b^3, (a*b)^5", 60),  # A5
    ("gens: a b; rels: a^2, b^3, (a*b)^7, (a*b*a*b^-1)^4", 168),  # PSL(2,7)
    ("gens: a b; rels: a^8, a^4*b^-2, b^-1*a*b*a", 16),  # generalised quaternion
    ("gens: s t; rels: s*t*s = t*s*t, s^3", 24),
    ("gens: s t; rels: s*t*s = t*s*t, s^4", 96),
    ("gens: s t; rels: s*t*s = t*s*t, s^5", 600),
    ("gens: a b; rels: a^2, b^2, (a*b)^6", 12),
])
def test_todd_coxeter_known_orders(text, order):
    assert todd_coxeter(parse_presentation(text)).index == order


def test_todd_coxeter_over_subgroup():
    p = parse_presentation("gens: s t; rels: s*t*s = t*s*t, s^5")
    assert todd_coxeter(p, ["s"]).index == 120
    a5 = parse_presentation("gens: a b; rels: a^2, b^3, (a*b)^5")
    assert todd_coxeter(a5, ["b"]).index == 20


def test_todd_coxeter_cap():
    with pytest.raises(MaxCosetsExceededError):
        todd_coxeter(parse_presentation("gens: a b; rels: a^2, b^3"), (), max_cosets=500)
    with pytest.raises(ValueError):
        todd_coxeter(parse_presentation("gens: a; rels: a^2"), (), max_cosets=0)


def test_table_from_presentation_is_a_group():
    t = table_from_presentation(parse_presentation("gens: a b; rels: a^2, b^3, (a*b)^5"))
    assert t.order == 60 and t.check_associativity(samples=400)
    assert len(center_indices(t)) == 1


def test_presentation_parsing():
    p = parse_presentation("gens: x y; rels: x^2, x*y = y*x")
    assert p.generators == ("x", "y")
    assert len(p.relators) == 2
    assert str(p).startswith("gens: x y; rels:")
    for bad in ("x^2", "gens: ; rels: x", "gens: x x; rels: x"):
        with pytest.raises(ValueError):
            parse_presentation(bad)
    # free reduction on construction
    q = Presentation(("a",), (parse_word("a*a^-1*a^3", {"a"}),))
    assert q.letter_relators() == [[0, 0, 0]]


# -- Smith normal form: oracle via determinantal divisors ------------------------------------


def _det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(len(m)))


def _determinantal_snf(m):
    rows, cols = len(m), len(m[0])
    d_prev, out = 1, []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for ri in itertools.combinations(range(rows), k):
            for ci in itertools.combinations(range(cols), k):
                g = gcd(g, _det([[m[i][j] for j in ci] for i in ri]))
        if g == 0:
            break
        out.append(g // d_prev)
        d_prev = g
    return out


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r))))
def test_snf_matches_determinantal_divisors(m):
    assert smith_normal_form(m) == _determinantal_snf(m)


def test_snf_examples():
    assert smith_normal_form([[2, 0], [0, 6]]) == [2, 6]
    assert smith_normal_form([[4, 0], [0, 6]]) == [2, 12]
    assert smith_normal_form([[0, 0]]) == []


@pytest.mark.parametrize("text, torsion, rank", [
    ("gens: s t; rels: s^2, t^6, s*t*s^-1*t^-1", (2, 6), 0),
    ("gens: x y; rels: x^6, x*y*x*y^-1*x^-1*y^-1", (6,), 0),
    ("gens: a b; rels: a*b*a^-1*b^-1", (), 2),
    ("gens: a b; rels: a^2, b^3, (a*b)^5", (), 0),
    (GAMMA_Z0, (2, 6), 0),
])
def test_abelianization(text, torsion, rank):
    ab = abelianization(parse_presentation(text))
    assert (ab.torsion, ab.free_rank) == (torsion, rank)


def test_abelianization_string():
    assert str(abelianization(parse_presentation("gens: s t; rels: s^2, t^6, s*t*s^-1*t^-1"))) == "Z_2 + Z_6"
    assert str(abelianization(parse_presentation("gens: a; rels: a"))) == "0"


# -- matrix groups ----------------------------------------------------------------------------


@pytest.mark.parametrize("point, order", [("w3", 3), ("w4", 4), ("w12", 12), ("z0", 72)])
def test_isotropy_orders(point, order):
    t = isotropy_table(point)
    assert t.order == order
    assert common_fixed_point(t, named_point(point))
    assert t.elements[0].is_scalar()


def test_w12_group():
    t = isotropy_table("w12")
    assert t.is_abelian()
    assert iso_check(t, direct_product(cyclic_table(2), cyclic_table(6)))
    assert abelian_invariants(t) == (2, 6)


def test_w12_quotient_by_r():
    t = isotropy_table("w12")
    r_key = generator("R").projective_key()
    idx = next(i for i, g in enumerate(t.elements) if g.projective_key() == r_key)
    q = quotient(t, [idx])
    assert iso_check(q, cyclic_table(6))


def test_z0_center_and_quotient():
    t = isotropy_table("z0")
    c2_key = eval_word("(R2*J^2)^2").projective_key()
    c2 = next(i for i, g in enumerate(t.elements) if g.projective_key() == c2_key)
    cen = center_indices(t)
    assert len(cen) == 6
    assert sorted(t.generated_by([c2])) == cen
    assert center(t).order == 6 and center(t).is_abelian()
    q = quotient(t, [c2])
    assert q.order == 12 and not q.is_abelian()
    assert iso_check(q, dihedral_table(6))
    assert abelian_invariants(t) == (2, 6)
    assert normal_closure(t, [c2]) == frozenset(cen)


def test_z0_matches_presentation():
    p = parse_presentation(GAMMA_Z0)
    assert todd_coxeter(p).index == 72
    imgs = images(Z0_IMAGES)
    assert all(h.passed for h in hom_check(p, imgs))
    t = isotropy_table("z0")
    assert matrix_group_vs_presentation(t, p, imgs)
    assert iso_check(table_from_presentation(p), t)


def test_hom_check_detects_failure():
    p = parse_presentation("gens: g; rels: g^2")
    assert not hom_check(p, {"g": generator("P")})[0].passed
    with pytest.raises(KeyError):
        hom_check(p, {})
    # the swapped assignment of b and c breaks a relator
    bad = images({"a": "R1", "b": "R2*J^2", "c": "R2*R3*R2^-1"})
    assert not all(h.passed for h in hom_check(parse_presentation(GAMMA_Z0), bad))


def test_cusp_group_exceeds_cap():
    with pytest.raises(CapExceededError):
        isotropy_table("qinf", cap=500)
    with pytest.raises(KeyError):
        isotropy_table("z7")


def test_closure_independent_of_generator_order():
    gens = [eval_word(w) for w in ("R1", "R2*J^2", "R2*R3*R2^-1")]
    a = closure(gens)
    b = closure(list(reversed(gens)))
    assert [g.projective_key() for g in a.elements] == [g.projective_key() for g in b.elements]
    assert a.table == b.table


def test_subgroup_table():
    t = isotropy_table("z0")
    sub = subgroup_table(t, t.generated_by([t.generators[0]]))
    assert sub.order == 6


# -- the G presentation and the trefoil group --------------------------------------------------


def test_g_with_c2_c3_killed_is_z3():
    p = parse_presentation(G_LITERAL).with_relators(["c2", "c3"])
    t = table_from_presentation(p)
    assert t.order == 3 and iso_check(t, cyclic_table(3))


def test_g_with_central_h_is_gamma_z0():
    p = parse_presentation(G_LITERAL).with_relators([f"h*{x}*h^-1*{x}^-1" for x in ("c1", "c2", "c3")])
    t = table_from_presentation(p)
    assert t.order == 72
    assert iso_check(t, isotropy_table("z0"))


def test_g_literal_is_infinite():
    # killing c2 leaves <h, c1 | h^3, c1^2>: an infinite free product
    p = parse_presentation(G_LITERAL)
    quotient_presentation = p.with_relators(["c2"])
    with pytest.raises(MaxCosetsExceededError):
        todd_coxeter(quotient_presentation, (), max_cosets=5000)
    with pytest.raises(MaxCosetsExceededError):
        todd_coxeter(p, (), max_cosets=5000)


def test_trefoil_group():
    p = parse_presentation("gens: x y; rels: x^6, x*y*x = y*x*y")
    imgs = images({"x": "P*Q^-1", "y": "Q^-1*P"})
    assert all(h.passed for h in hom_check(p, imgs))
    assert abelianization(p).torsion == (6,)
    # infinite index over <x>: the group maps onto the (2,3,6) triangle group
    with pytest.raises(MaxCosetsExceededError):
        todd_coxeter(p, ["x"], max_cosets=5000)
    tri = parse_presentation("gens: x y; rels: x^6, x*y*x = y*x*y, (x*y)^3")
    with pytest.raises(MaxCosetsExceededError):
        todd_coxeter(tri, (), max_cosets=5000)
