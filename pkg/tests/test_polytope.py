import json

import pytest

from picard_modular.chgeom import FordSide, HoroPoint, ford_side, horo_coords, lift, named_point
from picard_modular.group import eval_word
from picard_modular.matrices import proj_equal
from picard_modular.polytope import (
    VERTEX_WORDS,
    build_dstar,
    export_json,
    face_orbits,
    ford_membership,
    ridge_cycles,
    side_pairings,
    validate_geometry,
    validate_side_pairing,
    verify_ridge_cycle,
)


@pytest.fixture(scope="module")
def lat():
    return build_dstar()


def test_face_counts(lat):
    assert lat.counts() == (13, 24, 17, 6, 1)
    assert len(VERTEX_WORDS) == 13


def test_euler_characteristic_of_the_boundary_sphere(lat):
    # the 3-faces bound a 4-ball: V - E + F - C = 0 for the boundary 3-sphere
    v, e, f, c, _ = lat.counts()
    assert v - e + f - c == 0


def test_faces_and_lookup(lat):
    r = lat.face_by_name("[qinf,z0,z2,(w4)]")
    assert r.dim == 2 and r.boundary == ("qinf", "z0", "w4", "z2")
    assert lat.ridge_containing(["z1", "z2", "w12"]).name == "[z1,z2,w12,(PJ(w4))]"
    with pytest.raises(KeyError):
        lat.ridge_containing(["qinf"])
    with pytest.raises(KeyError):
        lat.face_by_name("[nowhere]")
    top = lat.faces[4][0]
    assert len(lat.subfaces(top)) == sum(lat.counts())


def test_vertex_lifts_are_images_of_named_points(lat):
    assert proj_equal(lat.lift("P(w3)"), eval_word("P") * named_point("w3"))
    assert proj_equal(lat.lift("P^2J(w4)"), eval_word("P^2*J") * named_point("w4"))
    assert not lat.vertices["qinf"].finite


def test_geometry_checks(lat):
    results = {c.id: c for c in validate_geometry(lat)}
    for cid, c in results.items():
        if cid == "geometry.isometric-sphere-RP.z3":
            continue
        assert c.passed, (cid, c.detail)
    z3 = results["geometry.isometric-sphere-RP.z3"]
    assert not z3.passed and "-3" in z3.detail


def test_z3_lies_on_isometric_sphere_of_r():
    # I(R) = I((RP)^-1): all four finite vertices of the ideal tetrahedron lie on it
    for n in ("z0", "z1", "z2", "z3"):
        assert ford_side(named_point(n), eval_word("R")) is FordSide.ON
        assert ford_side(named_point(n), eval_word("(R*P)^-1")) is FordSide.ON


def test_perturbed_vertex_fails_betweenness(lat):
    h = horo_coords(lat.lift("w4"))
    moved = lat.with_lift("w4", lift(HoroPoint(h.z, h.t, h.u * 2)))
    res = {c.id: c for c in validate_geometry(moved)}
    assert not res["geometry.between.w4"].passed
    assert res["geometry.between.w12"].passed


def test_side_pairings(lat):
    sps = side_pairings(lat)
    assert [sp.word for sp in sps] == ["P", "P*Q^-1", "R"]
    for sp in sps:
        assert validate_side_pairing(sp, lat).passed
        for a, b in zip(sp.source_order, sp.target_order):
            assert proj_equal(sp.map * lat.lift(a), lat.lift(b))


def test_side_pairing_negative_control(lat):
    sp = side_pairings(lat)[0]
    swapped = type(sp)(sp.source, sp.target, "Q", sp.source_order, sp.target_order)
    res = validate_side_pairing(swapped, lat)
    assert not res.passed and "mismatched" in res.detail


@pytest.mark.parametrize("cid, order", [(1, 1), (2, 1), (3, 1), (4, 2), (5, 6)])
def test_ridge_cycles(lat, cid, order):
    r = verify_ridge_cycle(cid, lat)
    assert r.closes and r.stabilizes_setwise and r.fixes_pointwise
    assert all(a.ok for a in r.arrows)
    assert r.order == order
    assert r.ok


def test_ridge_cycle_words():
    cycles = ridge_cycles()
    assert sorted(cycles) == [1, 2, 3, 4, 5]
    assert cycles[4].words == ("R",)
    assert cycles[5].words == ("P*Q^-1",)
    assert len(cycles[2].arrows()) == 6


def test_face_orbit_table(lat):
    orbits = face_orbits(lat)
    assert tuple(len(orbits[d]) for d in range(5)) == (5, 5, 5, 3, 1)
    reps = {
        0: [{"qinf"}, {"z0"}, {"w3"}, {"w4"}, {"w12"}],
        1: [{"z0", "qinf"}, {"z0", "w12"}, {"z1", "w12"}, {"z0", "w4"}, {"w3", "w4"}],
        2: [{"z0", "w4", "z2", "qinf"}, {"z0", "w12", "z3", "qinf"}, {"z0", "w4", "w3", "J(w4)"},
            {"z0", "J(w4)", "z1", "w12"}, {"z1", "w12", "z2", "PJ(w4)"}],
        3: [{"qinf", "z0", "z1", "z2", "w3", "w4", "J(w4)", "PJ(w4)"},
            {"qinf", "z0", "z2", "z3", "w4", "P^2J(w4)", "w12"},
            {"w12", "z0", "z1", "z2", "w3", "w4", "J(w4)", "PJ(w4)"}],
    }
    for d, sets in reps.items():
        hits = []
        for s in sets:
            hits.append(next(i for i, c in enumerate(orbits[d]) if any(f.vertices == frozenset(s) for f in c)))
        assert sorted(hits) == list(range(len(orbits[d]))), d


def test_every_face_is_classified_once(lat):
    orbits = face_orbits(lat)
    for d in range(5):
        names = [f.name for c in orbits[d] for f in c]
        assert len(names) == len(set(names)) == lat.counts()[d]


def test_ford_membership():
    rep = ford_membership(named_point("z0"), ["R*P", "P"])
    assert rep.summary is FordSide.ON
    assert rep.skipped == ("P",)
    rep = ford_membership(named_point("z3"), ["R*P"])
    assert rep.summary is FordSide.EXTERIOR


def test_export_json_schema(lat):
    data = export_json(lat)
    text = json.dumps(data)
    back = json.loads(text)
    assert set(back) == {"vertices", "faces", "pairings", "cycles"}
    assert len(back["vertices"]) == 13
    assert [sum(1 for f in back["faces"] if f["dim"] == d) for d in range(5)] == [13, 24, 17, 6, 1]
    assert {p["word"] for p in back["pairings"]} == {"P", "P*Q^-1", "R"}
    assert [c["id"] for c in back["cycles"]] == [1, 2, 3, 4, 5]
    for f in back["faces"]:
        if f["dim"] == 2:
            assert len(f["subfaces"]) == len(f["boundary"])
