"""The verification ledger: every checkable claim as a list of CheckResults.

Each ``check_*`` function covers one category and is pure apart from the
precision setting of the sign oracle.  :func:`run` assembles a
:class:`~picard_modular.report.Report` for one category or all of them.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from . import __version__
from .chgeom import (
    FordSide,
    HoroPoint,
    NAMED_POINTS,
    bergman_cosh2,
    horo_coords,
    ford_side,
    lift,
    on_geodesic_between,
)
from .exactfield import ONE, ZERO, CycNum, PrecisionCapError, set_sign_precision, sign_real
from .group import (
    IsometryType,
    PRESENTATIONS,
    classify,
    eval_word,
    fixed_point_elliptic,
    fixes_projectively,
    generator,
    is_h_unitary,
    pu_equal,
    verify_presentation,
)
from .handles import build_theorem1, cw_euler_characteristic, euler_characteristic, pi1_presentation, validate
from .isotropy import (
    CapExceededError,
    MaxCosetsExceededError,
    abelian_invariants,
    abelianization,
    center_indices,
    common_fixed_point,
    cyclic_table,
    dihedral_table,
    direct_product,
    hom_check,
    iso_check,
    isotropy_table,
    matrix_group_vs_presentation,
    parse_presentation,
    quotient,
    table_from_presentation,
    todd_coxeter,
)
from .matrices import HVector, proj_equal
from .polytope import (
    build_dstar,
    face_orbits,
    ford_membership,
    side_pairings,
    validate_geometry,
    validate_side_pairing,
    verify_ridge_cycle,
)
from .report import CheckResult, Report, Status, check

GAMMA_Z0_TEXT = "gens: a b c; rels: a^6, b^6, c^12, a*b*a^-1*b^-1, c*a*c^-1*b^-1, a^5*b^5*c^-2"
GAMMA_Z0_IMAGES = {"a": "R1", "b": "R2*R3*R2^-1", "c": "R2*J^2"}
G_TEXT = "gens: c1 c2 c3 h; rels: h^6 = c1*c2*c3, h^6, c1^2 = h^3, c2^2, c3^6"
TREFOIL_TEXT = "gens: x y; rels: x^6, x*y*x*y^-1*x^-1*y^-1"
TREFOIL_IMAGES = {"x": "P*Q^-1", "y": "Q^-1*P"}
Z2Z6_TEXT = "gens: s t; rels: s^2, t^6, s*t*s^-1*t^-1"

CATEGORIES = ("relations", "fixed-points", "isotropy", "cycles", "orbits", "geometry", "handles", "properties")


def _pt(name: str) -> HVector:
    return NAMED_POINTS[name]


def _maps(word: str, a: str, b: str) -> bool:
    return proj_equal(eval_word(word) * _pt(a), _pt(b))


# -- relations ---------------------------------------------------------------------------------


def check_relations() -> list[CheckResult]:
    out = []
    for name in ("P", "Q", "R", "R1", "R2", "R3", "J"):
        out.append(check(f"relations.h-unitary.{name}", is_h_unitary(generator(name)), f"{name}^* H {name} = H"))
    for pid in PRESENTATIONS:
        for rc in verify_presentation(pid):
            out.append(check(f"relations.{pid}.{rc.label}", rc.passed, f"residual scalar {rc.residual}"))

    r2 = eval_word("J*R1*J^-1")
    out.append(check("relations.R2-word.RPQP^-2R", pu_equal(r2, eval_word("R*P*Q*P^-2*R")), "J R1 J^-1 ~ R P Q P^-2 R"))
    out.append(check("relations.R2-word-not.RPQ^-1P^-2R", not pu_equal(r2, eval_word("R*P*Q^-1*P^-2*R")),
                     "J R1 J^-1 is not ~ R P Q^-1 P^-2 R"))
    out.append(check("relations.R~(JR1^-1J)^2", pu_equal(eval_word("R"), eval_word("(J*R1^-1*J)^2")), ""))
    out.append(check("relations.R~(R3R1R2)^2", pu_equal(eval_word("R"), eval_word("(R3*R1*R2)^2")), ""))

    bullets = [
        ("reflection.1", _maps("R1", "z0", "z0") and _maps("R1", "z3", "z3") and _maps("R1", "qinf", "qinf")
         and _maps("R1", "z1", "z2"), "R1 fixes z0, z3, qinf and sends z1 to z2"),
        ("reflection.2", _maps("R2", "z1", "z1"), "R2 fixes z1"),
        ("reflection.3", _maps("R3", "z2", "z2") and _maps("R3", "qinf", "qinf"), "R3 fixes z2 and qinf"),
        ("reflection.4", _maps("R2*R3*R2^-1", "z0", "z0"), "R2 R3 R2^-1 fixes z0"),
        ("reflection.5", _maps("R3*R1*R3^-1", "z1", "z1") and _maps("R3*R1*R3^-1", "qinf", "qinf"),
         "R3 R1 R3^-1 fixes z1 and qinf"),
        ("reflection.6", _maps("R1*R2*R1^-1", "z2", "z2"), "R1 R2 R1^-1 fixes z2"),
        ("reflection.7", pu_equal(eval_word("R2*R3*R1*R3^-1"), eval_word("R3*R1*R3^-1*R2")),
         "R2 and R3 R1 R3^-1 commute"),
        ("reflection.8", _maps("R", "z0", "z3") and _maps("R", "z3", "z0") and _maps("R", "z1", "z1")
         and _maps("R", "z2", "z2"), "R swaps z0, z3 and fixes z1, z2"),
    ]
    out.extend(check(f"relations.{i}", ok, d) for i, ok, d in bullets)

    p = parse_presentation(TREFOIL_TEXT)
    images = {k: eval_word(v) for k, v in TREFOIL_IMAGES.items()}
    for hc in hom_check(p, images):
        out.append(check(f"relations.trefoil-hom.{hc.relator}", hc.passed, "x -> PQ^-1, y -> Q^-1P"))
    # candidate preimages of P and Q as words in x, y
    fp = eval_word("y^-1*x^-1", images)
    fq = eval_word("y^-1*x^-2", images)
    out.append(CheckResult(
        "relations.trefoil-inverse-convention", Status.INFO,
        f"y^-1 x^-1 ~ P: {pu_equal(fp, eval_word('P'))}; y^-1 x^-2 ~ Q: {pu_equal(fq, eval_word('Q'))}; "
        f"y^-1 x^-2 ~ P Q P^-1: {pu_equal(fq, eval_word('P*Q*P^-1'))} (left-to-right products)",
        witness={"f(P)": "y^-1*x^-1", "f(Q)": "y^-1*x^-2"}))
    return out


# -- fixed points ------------------------------------------------------------------------------


def check_fixed_points() -> list[CheckResult]:
    out = []
    w3 = fixed_point_elliptic(eval_word("J"))
    out.append(check("fixed-points.w3", proj_equal(w3, _pt("w3")), f"fixed point of J: {w3!r}"))
    w4 = fixed_point_elliptic(eval_word("R1*R2*R3"))
    out.append(check("fixed-points.w4", proj_equal(w4, _pt("w4")), f"fixed point of R1R2R3: {w4!r}"))
    for word in ("P*Q^-1", "R"):
        out.append(check(f"fixed-points.w12.{word}", fixes_projectively(eval_word(word), _pt("w12")),
                         f"{word} fixes w12 = (-1, 0, 1)"))
    out.append(check("fixed-points.between.w4", on_geodesic_between(_pt("z0"), _pt("w4"), _pt("z2")),
                     "w4 on the geodesic [z0, z2]"))
    out.append(check("fixed-points.between.w12", on_geodesic_between(_pt("z0"), _pt("w12"), _pt("z3")),
                     "w12 on the geodesic [z0, z3]"))
    for word, want in (("J", IsometryType.REGULAR_ELLIPTIC), ("R", IsometryType.SPECIAL_ELLIPTIC),
                       ("R1*R2*R3", IsometryType.REGULAR_ELLIPTIC), ("P", IsometryType.PARABOLIC),
                       ("Q", IsometryType.PARABOLIC), ("R1", IsometryType.SPECIAL_ELLIPTIC)):
        got = classify(eval_word(word))
        out.append(check(f"fixed-points.classify.{word}", got is want, f"{word} is {got.value}"))
    return out


# -- isotropy ------------------------------------------------------------------------------------


def check_isotropy(max_closure: int = 1000, max_cosets: int = 100_000) -> list[CheckResult]:
    out = []
    tables = {}
    for point, want in (("w3", 3), ("w4", 4), ("w12", 12), ("z0", 72)):
        t = isotropy_table(point, cap=max_closure)
        tables[point] = t
        out.append(check(f"isotropy.order.{point}", t.order == want, f"|Gamma_{point}| = {t.order}"))
        out.append(check(f"isotropy.fixes.{point}", common_fixed_point(t, _pt(point)),
                         f"every element fixes {point}"))
    w12 = tables["w12"]
    out.append(check("isotropy.w12.abelian", w12.is_abelian(), "PQ^-1 and R commute"))
    out.append(check("isotropy.w12.Z2xZ6", iso_check(w12, direct_product(cyclic_table(2), cyclic_table(6))),
                     f"abelian invariants {abelian_invariants(w12)}"))
    out.append(check("isotropy.w12.vs-presentation",
                     matrix_group_vs_presentation(w12, parse_presentation(Z2Z6_TEXT),
                                                  {"s": eval_word("R"), "t": eval_word("P*Q^-1")}, max_cosets),
                     "s -> R, t -> PQ^-1"))
    try:
        qt = isotropy_table("qinf", cap=max_closure)
        out.append(CheckResult("isotropy.qinf", Status.FAIL, f"cusp stabilizer closed at order {qt.order}"))
    except CapExceededError:
        out.append(CheckResult("isotropy.qinf", Status.INFO,
                               f"closure of <P, Q> exceeds {max_closure} elements (infinite cusp group)"))

    z0 = tables["z0"]
    c = eval_word("R2*J^2")
    c2 = (c * c).projective_key()
    c2_idx = next(i for i, g in enumerate(z0.elements) if g.projective_key() == c2)
    cen = center_indices(z0)
    out.append(check("isotropy.z0.center", len(cen) == 6 and sorted(z0.generated_by([c2_idx])) == cen,
                     f"|Z| = {len(cen)}; generated by (R2 J^2)^2"))
    q = quotient(z0, [c2_idx])
    out.append(check("isotropy.z0.quotient", q.order == 12 and not q.is_abelian(),
                     f"|Gamma_z0 / Z| = {q.order}, nonabelian"))
    out.append(check("isotropy.z0.quotient-dihedral", iso_check(q, dihedral_table(6)), "quotient is dihedral of order 12"))

    pz = parse_presentation(GAMMA_Z0_TEXT)
    ct = todd_coxeter(pz, (), max_cosets)
    out.append(check("isotropy.z0.todd-coxeter", ct.index == 72, f"{ct.index} cosets over the trivial subgroup"))
    images = {k: eval_word(v) for k, v in GAMMA_Z0_IMAGES.items()}
    hc = hom_check(pz, images)
    out.append(check("isotropy.z0.hom", all(h.passed for h in hc),
                     ", ".join(f"{h.relator}: {'ok' if h.passed else 'FAIL'}" for h in hc)))
    out.append(check("isotropy.z0.vs-presentation", matrix_group_vs_presentation(z0, pz, images, max_cosets),
                     "a -> R1, b -> R2R3R2^-1, c -> R2J^2"))
    out.append(check("isotropy.z0.abstract-iso", iso_check(table_from_presentation(pz, max_cosets), z0),
                     "enumerated abstract group is isomorphic to the matrix group"))

    g = parse_presentation(G_TEXT)
    small = todd_coxeter(g.with_relators(["c2", "c3"]), (), max_cosets)
    out.append(check("isotropy.G.c2=c3=1", small.index == 3, f"order {small.index}"))
    central = g.with_relators([f"h*{x}*h^-1*{x}^-1" for x in ("c1", "c2", "c3")])
    gc = table_from_presentation(central, max_cosets)
    out.append(check("isotropy.G.central-h", gc.order == 72 and iso_check(gc, z0),
                     f"with h central: order {gc.order}, isomorphic to Gamma_z0"))
    bound = min(max_cosets, 20_000)
    try:
        n = todd_coxeter(g, (), bound).index
        out.append(CheckResult("isotropy.G.literal", Status.INFO, f"literal presentation enumerates to {n}"))
    except MaxCosetsExceededError:
        out.append(CheckResult(
            "isotropy.G.literal", Status.INFO,
            f"literal presentation (h not declared central) does not close within {bound} cosets; "
            "setting c2 = 1 leaves <h, c1 | h^3, c1^2>, an infinite free product"))

    for pid, text, want in (("Z2+Z6", Z2Z6_TEXT, ((2, 6), 0)), ("trefoil", TREFOIL_TEXT, ((6,), 0))):
        ab = abelianization(parse_presentation(text))
        out.append(check(f"isotropy.abelianization.{pid}", (ab.torsion, ab.free_rank) == want, str(ab)))
    return out


# -- polytope ------------------------------------------------------------------------------------


def check_cycles() -> list[CheckResult]:
    lat = build_dstar()
    out = [validate_side_pairing(sp, lat) for sp in side_pairings(lat)]
    for cid in range(1, 6):
        r = verify_ridge_cycle(cid, lat)
        bad = [f"{a.source} -{a.word}-> {a.target} (offending {a.offending})" for a in r.arrows if not a.ok]
        detail = (f"T = {r.transformation_word}; order {r.order}; setwise {r.stabilizes_setwise}; "
                  f"pointwise {r.fixes_pointwise}")
        if bad:
            detail += "; mismatches: " + "; ".join(bad)
        out.append(check(f"cycles.{cid}", r.ok, detail, witness={"order": r.order}))
    return out


def check_orbits() -> list[CheckResult]:
    lat = build_dstar()
    orbits = face_orbits(lat)
    counts = tuple(len(orbits[d]) for d in range(5))
    out = [check("orbits.counts", counts == (5, 5, 5, 3, 1), f"classes per dimension {counts}",
                 witness={str(d): [[f.name for f in c] for c in orbits[d]] for d in range(5)})]

    def cls(name):
        return next(i for i, c in enumerate(orbits[1]) if any(set(f.vertices) == set(name) for f in c))

    out.append(check("orbits.z0w12-vs-z1w12", cls({"z0", "w12"}) != cls({"z1", "w12"}),
                     "[z0,w12] and [z1,w12] lie in different classes"))
    return out


def check_geometry() -> list[CheckResult]:
    lat = build_dstar()
    out = validate_geometry(lat)
    h = horo_coords(lat.lift("w4"))
    moved = lat.with_lift("w4", lift(HoroPoint(h.z, h.t, h.u * 2)))
    ctrl = next(c for c in validate_geometry(moved) if c.id == "geometry.between.w4")
    out.append(check("geometry.negative-control", not ctrl.passed, "perturbed w4 fails betweenness"))
    for n in ("z0", "z1", "z2", "z3"):
        side = ford_side(_pt(n), eval_word("R"))
        out.append(check(f"geometry.isometric-sphere-R.{n}", side is FordSide.ON,
                         f"{n} is {side.value} for I(R) = I((RP)^-1)"))
    rep = ford_membership(_pt("z0"), ["R*P"])
    out.append(check("geometry.ford.z0", rep.summary is FordSide.ON, f"z0 vs I(RP): {rep.summary.value}"))
    return out


def check_handles() -> list[CheckResult]:
    c = build_theorem1()
    out = [check("handles.count", len(c.attachments) == 10, f"{len(c.attachments)} attachments")]
    out.extend(validate(c))
    chi, cw = euler_characteristic(c), cw_euler_characteristic(c)
    out.append(check("handles.euler", chi == cw == 2, f"inclusion-exclusion {chi}, CW count {cw}"))
    pi = pi1_presentation(c)
    ab = abelianization(pi.presentation)
    out.append(check("handles.pi1-empty-words", ab.free_rank == len(pi.presentation.generators) == 1,
                     f"{pi.presentation}; abelianization {ab}"))
    return out


# -- property suites ------------------------------------------------------------------------------


def random_cycnum(rng: random.Random, spread: int = 3, rational: bool = True) -> CycNum:
    coeffs = []
    for _ in range(12):
        if rng.random() < 0.5:
            coeffs.append(0)
        elif rational and rng.random() < 0.2:
            coeffs.append(Fraction(rng.randint(-spread, spread), rng.randint(1, 4)))
        else:
            coeffs.append(rng.randint(-spread, spread))
    return CycNum(coeffs)


def property_field_axioms(cases: int = 1000, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    failures = []
    for k in range(cases):
        a, b, c = (random_cycnum(rng) for _ in range(3))
        ok = (a + b == b + a and a * b == b * a and (a + b) + c == a + (b + c) and (a * b) * c == a * (b * c)
              and a * (b + c) == a * b + a * c and a + ZERO == a and a * ONE == a and a - a == ZERO
              and (a * b).conj() == a.conj() * b.conj())
        if ok and not a.is_zero():
            ok = a * a.inverse() == ONE and (b / a) * a == b
        if not ok:
            failures.append(k)
    return check("properties.field-axioms", not failures, f"{cases} cases, seed {seed}, failures {failures[:5]}")


def property_sign_vs_float(cases: int = 1000, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    failures, near_zero = [], 0
    for k in range(cases):
        a = random_cycnum(rng)
        if k % 2:
            x = a + a.conj()
        else:
            x = a * a.conj() - CycNum.rational(rng.randint(0, 20))
        s = sign_real(x)
        f = complex(x).real
        if abs(f) < 1e-9:
            near_zero += 1
            if (s == 0) != x.is_zero():
                failures.append(k)
        elif s != (1 if f > 0 else -1):
            failures.append(k)
    return check("properties.sign-vs-float", not failures,
                 f"{cases} cases, seed {seed}, {near_zero} near zero, failures {failures[:5]}")


def random_negative(rng: random.Random) -> HVector:
    """A random point of complex hyperbolic space with field coordinates."""
    z = CycNum([rng.randint(-2, 2), rng.randint(-2, 2)] + [0] * 8 + [rng.randint(-1, 1)])
    t = CycNum.rational(Fraction(rng.randint(-6, 6), rng.randint(1, 3)))
    u = CycNum.rational(Fraction(rng.randint(1, 6), rng.randint(1, 3)))
    return lift(HoroPoint(z, t, u))


def property_bergman_invariance(cases: int = 100, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    gens = [generator(n) for n in ("P", "Q", "R", "R1", "R2", "R3", "J")]
    failures = []
    for k in range(cases):
        u, v = random_negative(rng), random_negative(rng)
        base = bergman_cosh2(u, v)
        if any(bergman_cosh2(g * u, g * v) != base for g in gens):
            failures.append(k)
    return check("properties.bergman-invariance", not failures,
                 f"{cases} pairs x {len(gens)} generators, seed {seed}, failures {failures[:5]}")


def check_properties(seed: int = 0, cases: int = 1000) -> list[CheckResult]:
    return [
        property_field_axioms(cases, seed),
        property_sign_vs_float(cases, seed),
        property_bergman_invariance(max(1, cases // 10), seed),
    ]


# -- assembly ----------------------------------------------------------------------------------------


def run(category: str = "all", max_closure: int = 1000, max_cosets: int = 100_000,
        precision_bits: int = 64, seed: int = 0, cases: int = 1000) -> Report:
    if category != "all" and category not in CATEGORIES:
        raise ValueError(f"unknown category {category!r}; choose from all, {', '.join(CATEGORIES)}")
    config = {"max_closure": max_closure, "max_cosets": max_cosets, "precision_bits": precision_bits,
              "seed": seed, "cases": cases}
    runners: dict[str, Callable[[], list[CheckResult]]] = {
        "relations": check_relations,
        "fixed-points": check_fixed_points,
        "isotropy": lambda: check_isotropy(max_closure, max_cosets),
        "cycles": check_cycles,
        "orbits": check_orbits,
        "geometry": check_geometry,
        "handles": check_handles,
        "properties": lambda: check_properties(seed, cases),
    }
    report = Report(__version__, config)
    old = set_sign_precision(precision_bits)
    try:
        for name in CATEGORIES:
            if category in ("all", name):
                try:
                    report.extend(runners[name]())
                except PrecisionCapError as exc:
                    report.add(CheckResult(f"{name}.precision", Status.FAIL, str(exc)))
    finally:
        set_sign_precision(*old)
    return report
