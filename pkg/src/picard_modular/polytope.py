"""The subdivided fundamental polyhedron D* of the Eisenstein-Picard group.

The face lattice is static data: 13 named vertices, 24 edges, 17 ridges, six
3-faces and the 4-cell.  Every vertex carries an exact lift computed from the
base points by the group words in its name, so side-pairings, ridge cycles and
face identifications are all checked by exact projective equality of lifts.
Faces are identified by their full set of named vertices (principal vertices
plus the subdivision vertices written in parentheses).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .chgeom import (
    FordSide,
    NAMED_POINTS,
    QINF,
    common_complex_line,
    ford_side,
    herm,
    on_geodesic_between,
    triple_product,
    triple_product_is_real,
)
from .exactfield import abs2
from .group import Word, eval_word, fixes_projectively, projective_order
from .matrices import HVector, Matrix, proj_equal
from .report import CheckResult, check

__all__ = [
    "NamedVertex",
    "Face",
    "FaceLattice",
    "SidePairing",
    "RidgeCycle",
    "ArrowResult",
    "RidgeCycleReport",
    "FordReport",
    "VERTEX_WORDS",
    "build_dstar",
    "validate_geometry",
    "side_pairings",
    "validate_side_pairing",
    "ridge_cycles",
    "verify_ridge_cycle",
    "face_orbits",
    "ford_membership",
    "export_json",
]

# name -> (word applied, base point)
VERTEX_WORDS: dict[str, tuple[str, str]] = {
    "qinf": ("Id", "qinf"),
    "z0": ("Id", "z0"),
    "z1": ("Id", "z1"),
    "z2": ("Id", "z2"),
    "z3": ("Id", "z3"),
    "w3": ("Id", "w3"),
    "P(w3)": ("P", "w3"),
    "w4": ("Id", "w4"),
    "J(w4)": ("J", "w4"),
    "PJ(w4)": ("P*J", "w4"),
    "P^2J(w4)": ("P^2*J", "w4"),
    "P(w4)": ("P", "w4"),
    "w12": ("Id", "w12"),
}


@dataclass(frozen=True)
class NamedVertex:
    name: str
    lift: HVector
    finite: bool


@dataclass(frozen=True)
class Face:
    dim: int
    principal: tuple[str, ...]
    decoration: tuple[str, ...] = ()
    boundary: tuple[str, ...] = ()  # cyclic vertex order, ridges only

    @property
    def vertices(self) -> frozenset[str]:
        return frozenset(self.principal) | frozenset(self.decoration)

    @property
    def key(self) -> tuple[int, frozenset[str]]:
        return (self.dim, self.vertices)

    @property
    def name(self) -> str:
        inner = ",".join(self.principal)
        if self.decoration:
            inner += ",(" + ",".join(self.decoration) + ")"
        return f"[{inner}]"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FaceLattice:
    vertices: dict[str, NamedVertex]
    faces: dict[int, tuple[Face, ...]]
    incidence: dict[tuple[int, frozenset[str]], frozenset[tuple[int, frozenset[str]]]]

    def face(self, dim: int, verts: Iterable[str]) -> Face | None:
        want = frozenset(verts)
        for f in self.faces[dim]:
            if f.vertices == want:
                return f
        return None

    def face_by_name(self, name: str) -> Face:
        for fs in self.faces.values():
            for f in fs:
                if f.name == name:
                    return f
        raise KeyError(name)

    def ridge_containing(self, verts: Iterable[str]) -> Face:
        want = frozenset(verts)
        hits = [f for f in self.faces[2] if want <= f.vertices]
        if len(hits) != 1:
            raise KeyError(f"{sorted(want)} lies in {len(hits)} ridges")
        return hits[0]

    def subfaces(self, f: Face) -> set[tuple[int, frozenset[str]]]:
        """All faces of f (including f itself), by key."""
        out = {f.key}
        stack = [f.key]
        while stack:
            k = stack.pop()
            for s in self.incidence.get(k, ()):
                if s not in out:
                    out.add(s)
                    stack.append(s)
        return out

    def by_key(self, key) -> Face:
        dim, verts = key
        f = self.face(dim, verts)
        assert f is not None
        return f

    def lift(self, name: str) -> HVector:
        return self.vertices[name].lift

    def with_lift(self, name: str, lift: HVector) -> "FaceLattice":
        """Copy with one vertex moved (for negative controls)."""
        vs = dict(self.vertices)
        old = vs[name]
        vs[name] = NamedVertex(name, lift, old.finite)
        return FaceLattice(vs, self.faces, self.incidence)

    def counts(self) -> tuple[int, ...]:
        return tuple(len(self.faces[d]) for d in range(5))


def _vertex_lifts() -> dict[str, NamedVertex]:
    out = {}
    for name, (word, base) in VERTEX_WORDS.items():
        lift = eval_word(word) * NAMED_POINTS[base]
        out[name] = NamedVertex(name, lift, name != "qinf")
    return out


# principal vertices and cyclic boundary of each ridge; the decoration is what
# the boundary has beyond the principal vertices
_RIDGES: list[tuple[tuple[str, ...], tuple[str, ...]]] = [
    (("qinf", "z0", "z1"), ("qinf", "z0", "J(w4)", "z1")),
    (("qinf", "z0", "z2"), ("qinf", "z0", "w4", "z2")),
    (("qinf", "z0", "z3"), ("qinf", "z0", "w12", "z3")),
    (("qinf", "z1", "z2"), ("qinf", "z1", "PJ(w4)", "z2")),
    (("qinf", "z1", "z3"), ("qinf", "z1", "P(w4)", "z3")),
    (("qinf", "z2", "z3"), ("qinf", "z2", "P^2J(w4)", "z3")),
    # quadrilaterals of the triangle [z0,z1,z2], permuted by J
    (("z0", "J(w4)", "w3", "w4"), ("z0", "J(w4)", "w3", "w4")),
    (("z1", "PJ(w4)", "w3", "J(w4)"), ("z1", "PJ(w4)", "w3", "J(w4)")),
    (("z2", "w4", "w3", "PJ(w4)"), ("z2", "w4", "w3", "PJ(w4)")),
    # their images under P in [z1,z2,z3]
    (("z1", "PJ(w4)", "P(w3)", "P(w4)"), ("z1", "PJ(w4)", "P(w3)", "P(w4)")),
    (("z2", "P^2J(w4)", "P(w3)", "PJ(w4)"), ("z2", "P^2J(w4)", "P(w3)", "PJ(w4)")),
    (("z3", "P(w4)", "P(w3)", "P^2J(w4)"), ("z3", "P(w4)", "P(w3)", "P^2J(w4)")),
    # halves of [z0,z2,z3] and [z0,z1,z3]
    (("z0", "z2", "w12"), ("z0", "w4", "z2", "w12")),
    (("z2", "z3", "w12"), ("z2", "P^2J(w4)", "z3", "w12")),
    (("z0", "z1", "w12"), ("z0", "J(w4)", "z1", "w12")),
    (("z1", "z3", "w12"), ("z1", "P(w4)", "z3", "w12")),
    # the mirror triangle of R
    (("z1", "z2", "w12"), ("z1", "PJ(w4)", "z2", "w12")),
]

_CELLS: list[tuple[tuple[str, ...], tuple[str, ...]]] = [
    (("qinf", "z0", "z1", "z2"), ("w3", "w4", "J(w4)", "PJ(w4)")),
    (("qinf", "z1", "z2", "z3"), ("P(w3)", "P(w4)", "PJ(w4)", "P^2J(w4)")),
    (("qinf", "z0", "z2", "z3"), ("w4", "P^2J(w4)", "w12")),
    (("qinf", "z0", "z1", "z3"), ("J(w4)", "P(w4)", "w12")),
    (("w12", "z0", "z1", "z2"), ("w3", "w4", "J(w4)", "PJ(w4)")),
    (("w12", "z3", "z1", "z2"), ("P(w3)", "P^2J(w4)", "P(w4)", "PJ(w4)")),
]


def build_dstar() -> FaceLattice:
    verts = _vertex_lifts()
    ridges = []
    edge_keys: dict[frozenset[str], Face] = {}
    incidence: dict = {}
    for principal, boundary in _RIDGES:
        deco = tuple(v for v in boundary if v not in principal)
        r = Face(2, principal, deco, boundary)
        ridges.append(r)
        sub = set()
        for a, b in zip(boundary, boundary[1:] + boundary[:1]):
            e = edge_keys.setdefault(frozenset((a, b)), Face(1, (a, b)))
            sub.add(e.key)
        incidence[r.key] = frozenset(sub)
    edges = tuple(sorted(edge_keys.values(), key=lambda f: sorted(f.vertices)))
    for e in edges:
        incidence[e.key] = frozenset((0, frozenset((v,))) for v in e.principal)
    points = tuple(Face(0, (v,)) for v in verts)

    cells = []
    for principal, deco in _CELLS:
        c = Face(3, principal, deco)
        cells.append(c)
        incidence[c.key] = frozenset(r.key for r in ridges if r.vertices <= c.vertices)
    top = Face(4, ("z0", "z1", "z2", "z3", "qinf"),
               tuple(v for v in verts if v not in ("z0", "z1", "z2", "z3", "qinf")))
    incidence[top.key] = frozenset(c.key for c in cells)
    lattice = FaceLattice(verts, {0: points, 1: edges, 2: tuple(ridges), 3: tuple(cells), 4: (top,)}, incidence)
    _check_lattice(lattice)
    return lattice


def _check_lattice(l: FaceLattice) -> None:
    keys = {f.key for fs in l.faces.values() for f in fs}
    for k, subs in l.incidence.items():
        for s in subs:
            if s not in keys:
                raise AssertionError(f"face {sorted(k[1])} has missing subface {sorted(s[1])}")
    for c in l.faces[3]:
        ridges = l.incidence[c.key]
        # each edge of a closed 3-cell lies on exactly two of its ridges
        edge_count: dict = {}
        for r in ridges:
            for e in l.incidence[r]:
                edge_count[e] = edge_count.get(e, 0) + 1
        if any(n != 2 for n in edge_count.values()):
            raise AssertionError(f"3-face {c} is not a closed surface")
    for r in l.faces[2]:
        owners = [c for c in l.faces[3] if r.key in l.incidence[c.key]]
        if len(owners) != 2:
            raise AssertionError(f"ridge {r} lies in {len(owners)} 3-faces")


# -- geometry ---------------------------------------------------------------------------


def validate_geometry(l: FaceLattice) -> list[CheckResult]:
    lift = l.lift
    out: list[CheckResult] = []

    for p, (a, b) in [
        ("w4", ("z0", "z2")),
        ("w12", ("z0", "z3")),
        ("J(w4)", ("z0", "z1")),
        ("PJ(w4)", ("z1", "z2")),
        ("P^2J(w4)", ("z2", "z3")),
        ("P(w4)", ("z1", "z3")),
    ]:
        ok = on_geodesic_between(lift(a), lift(p), lift(b))
        out.append(check(f"geometry.between.{p}", ok, f"{p} on the geodesic [{a},{b}]"))

    polar = common_complex_line([lift("z0"), lift("z3"), lift("qinf")])
    ok = polar is not None and proj_equal(polar, NAMED_POINTS["n1"])
    out.append(check("geometry.complex-line.z0-z3-qinf", ok,
                     f"polar of the complex line through z0, z3, qinf is {polar!r}; expected ~ n1"))

    for third in ("z1", "z2"):
        u, v, w = lift("z0"), lift("z3"), lift(third)
        ok = triple_product_is_real(u, v, w)
        t = triple_product(u, v, w)
        out.append(check(f"geometry.r-plane.z0-z3-{third}", ok,
                         f"triple product {t} (imaginary residual {t - t.conj()})"))

    r1 = eval_word("R1")
    src = [lift(n) for n in ("z0", "z3", "z1")]
    tgt = [lift(n) for n in ("z0", "z3", "z2")]
    images = [r1 * v for v in src]
    ok = all(any(proj_equal(g, t) for t in tgt) for g in images) and all(
        any(proj_equal(g, t) for g in images) for t in tgt)
    out.append(check("geometry.R1-maps-ridge", ok, "R1{z0,z3,z1} = {z0,z3,z2}"))

    rp = eval_word("R*P")
    ginv_q = eval_word("(R*P)^-1") * QINF
    for n in ("z0", "z1", "z2", "z3"):
        side = ford_side(lift(n), rp)
        residual = abs2(herm(lift(n), QINF)) - abs2(herm(lift(n), ginv_q))
        out.append(check(f"geometry.isometric-sphere-RP.{n}", side is FordSide.ON,
                         f"{n} is {side.value} for I(RP); residual |<p,qinf>|^2 - |<p,(RP)^-1 qinf>|^2 = {residual}"))

    r = eval_word("R")
    for n in ("z1", "z2", "w12"):
        out.append(check(f"geometry.R-fixes.{n}", fixes_projectively(r, lift(n)), f"R fixes {n}"))
    return out


# -- side-pairings ------------------------------------------------------------------------


@dataclass(frozen=True)
class SidePairing:
    source: Face
    target: Face
    word: str
    source_order: tuple[str, ...]  # vertex correspondence, position by position
    target_order: tuple[str, ...]

    @property
    def map(self) -> Matrix:
        return eval_word(self.word)


_PAIRINGS = [
    ("P",
     ("qinf", "z0", "z1", "z2", "w3", "w4", "J(w4)", "PJ(w4)"),
     ("qinf", "z1", "z2", "z3", "P(w3)", "P(w4)", "PJ(w4)", "P^2J(w4)")),
    ("P*Q^-1",
     ("qinf", "z0", "z2", "z3", "w4", "P^2J(w4)", "w12"),
     ("qinf", "z0", "z1", "z3", "J(w4)", "P(w4)", "w12")),
    ("R",
     ("w12", "z0", "z1", "z2", "w3", "w4", "J(w4)", "PJ(w4)"),
     ("w12", "z3", "z1", "z2", "P(w3)", "P^2J(w4)", "P(w4)", "PJ(w4)")),
]


def side_pairings(l: FaceLattice | None = None) -> list[SidePairing]:
    l = l or build_dstar()
    out = []
    for word, src, tgt in _PAIRINGS:
        s, t = l.face(3, src), l.face(3, tgt)
        if s is None or t is None:
            raise KeyError(f"side-pairing {word} refers to a face outside the lattice")
        out.append(SidePairing(s, t, word, src, tgt))
    return out


def validate_side_pairing(sp: SidePairing, l: FaceLattice) -> CheckResult:
    g = sp.map
    bad = [(a, b) for a, b in zip(sp.source_order, sp.target_order) if not proj_equal(g * l.lift(a), l.lift(b))]
    detail = f"{sp.word}: {sp.source.name} -> {sp.target.name}"
    if bad:
        detail += "; mismatched " + ", ".join(f"{a}->{b}" for a, b in bad)
    return check(f"pairing.{sp.word}", not bad, detail)


def _vertex_image(g: Matrix, name: str, l: FaceLattice) -> str | None:
    v = g * l.lift(name)
    for other in l.vertices.values():
        if proj_equal(v, other.lift):
            return other.name
    return None


# -- ridge cycles ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RidgeCycle:
    id: int
    ridges: tuple[tuple[str, ...], ...]  # written vertex lists, last equals first
    words: tuple[str, ...]

    def arrows(self):
        return list(zip(self.ridges[:-1], self.words, self.ridges[1:]))


_CYCLES = {
    1: ([("qinf", "z2", "z0", "w4"), ("qinf", "z3", "z1", "P(w4)"), ("qinf", "z3", "z2", "P^2J(w4)"),
         ("qinf", "z2", "z1", "PJ(w4)"), ("qinf", "z1", "z0", "J(w4)"), ("qinf", "z2", "z0", "w4")],
        ["P", "Q*P^-1", "P^-1", "P^-1", "Q*P^-1"]),
    2: ([("z2", "w4", "w3", "PJ(w4)"), ("z3", "P(w4)", "P(w3)", "P^2J(w4)"), ("z0", "J(w4)", "w3", "w4"),
         ("z1", "PJ(w4)", "P(w3)", "P(w4)"), ("z1", "PJ(w4)", "w3", "J(w4)"), ("z2", "P^2J(w4)", "P(w3)", "PJ(w4)"),
         ("z2", "w4", "w3", "PJ(w4)")],
        ["P", "R^-1", "P", "R^-1", "P", "R^-1"]),
    3: ([("z0", "w12", "z2", "w4"), ("z0", "w12", "z1", "J(w4)"), ("z3", "w12", "z1", "P(w4)"),
         ("z3", "w12", "z2", "P^2J(w4)"), ("z0", "w12", "z2", "w4")],
        ["P*Q^-1", "R", "Q*P^-1", "R^-1"]),
    4: ([("z1", "z2", "w12"), ("z1", "z2", "w12")], ["R"]),
    5: ([("qinf", "z0", "z3", "w12"), ("qinf", "z0", "z3", "w12")], ["P*Q^-1"]),
}


def ridge_cycles() -> dict[int, RidgeCycle]:
    return {i: RidgeCycle(i, tuple(tuple(r) for r in rs), tuple(ws)) for i, (rs, ws) in _CYCLES.items()}


@dataclass(frozen=True)
class ArrowResult:
    source: str
    word: str
    target: str
    ok: bool
    offending: str | None = None


@dataclass(frozen=True)
class RidgeCycleReport:
    id: int
    arrows: tuple[ArrowResult, ...]
    closes: bool
    transformation: Matrix
    transformation_word: str
    order: int | None
    stabilizes_setwise: bool
    fixes_pointwise: bool

    @property
    def ok(self) -> bool:
        return self.closes and self.stabilizes_setwise and self.order is not None


def verify_ridge_cycle(cid: int, l: FaceLattice | None = None) -> RidgeCycleReport:
    l = l or build_dstar()
    cyc = ridge_cycles()[cid]
    results = []
    for src, word, tgt in cyc.arrows():
        r_src, r_tgt = l.ridge_containing(src), l.ridge_containing(tgt)
        g = eval_word(word)
        offending = None
        images = set()
        for v in sorted(r_src.vertices):
            img = _vertex_image(g, v, l)
            if img is None or img not in r_tgt.vertices:
                offending = v
                break
            images.add(img)
        ok = offending is None and images == set(r_tgt.vertices)
        results.append(ArrowResult(r_src.name, word, r_tgt.name, ok, offending))
    closes = all(a.ok for a in results) and l.ridge_containing(cyc.ridges[0]) == l.ridge_containing(cyc.ridges[-1])
    # cycle transformation: apply g_1 first, so T = g_k ... g_1
    t_word = "*".join(f"({w})" for w in reversed(cyc.words))
    t = eval_word(t_word)
    start = l.ridge_containing(cyc.ridges[0])
    images = {_vertex_image(t, v, l) for v in start.vertices}
    stab = images == set(start.vertices)
    pointwise = all(fixes_projectively(t, l.lift(v)) for v in start.vertices)
    return RidgeCycleReport(cid, tuple(results), closes, t, t_word, projective_order(t), stab, pointwise)


# -- face orbits ----------------------------------------------------------------------------


def face_orbits(l: FaceLattice | None = None) -> dict[int, list[list[Face]]]:
    """Classes of faces under the groupoid generated by the side-pairings and their restrictions."""
    l = l or build_dstar()
    parent: dict = {f.key: f.key for fs in l.faces.values() for f in fs}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb, key=_sort_key)] = min(ra, rb, key=_sort_key)

    for sp in side_pairings(l):
        g = sp.map
        vmap = {v: _vertex_image(g, v, l) for v in sp.source.vertices}
        for key in l.subfaces(sp.source):
            dim, verts = key
            image = {vmap[v] for v in verts}
            if None in image:
                continue
            target = l.face(dim, image)
            if target is not None:
                union(key, target.key)

    classes: dict[int, dict] = {d: {} for d in range(5)}
    for fs in l.faces.values():
        for f in fs:
            classes[f.dim].setdefault(find(f.key), []).append(f)
    return {
        d: sorted((sorted(c, key=lambda f: _sort_key(f.key)) for c in groups.values()),
                  key=lambda c: _sort_key(c[0].key))
        for d, groups in classes.items()
    }


_NAME_ORDER = {n: i for i, n in enumerate(VERTEX_WORDS)}


def _sort_key(key) -> tuple:
    dim, verts = key
    return (dim, tuple(sorted(_NAME_ORDER[v] for v in verts)))


# -- Ford domain -----------------------------------------------------------------------------


@dataclass(frozen=True)
class FordReport:
    per_word: tuple[tuple[str, FordSide | None], ...]  # None = skipped (g fixes qinf)
    summary: FordSide
    skipped: tuple[str, ...] = ()


def ford_membership(p: HVector, words: Sequence[Word | str]) -> FordReport:
    per, skipped = [], []
    for w in words:
        g = eval_word(w)
        label = str(w)
        if g[2, 0].is_zero():
            per.append((label, None))
            skipped.append(label)
            continue
        per.append((label, ford_side(p, g)))
    sides = [s for _, s in per if s is not None]
    if FordSide.INTERIOR in sides:
        summary = FordSide.INTERIOR
    elif FordSide.ON in sides:
        summary = FordSide.ON
    else:
        summary = FordSide.EXTERIOR
    return FordReport(tuple(per), summary, tuple(skipped))


# -- export ------------------------------------------------------------------------------------


def export_json(l: FaceLattice | None = None) -> dict:
    """Plain-data dump of the lattice, pairings and cycles.

    Schema::

        {"vertices": [{"name", "lift": [3 field elements as text], "finite"}],
         "faces": [{"dim", "name", "principal", "decoration", "boundary", "subfaces": [names]}],
         "pairings": [{"word", "source", "target", "source_order", "target_order"}],
         "cycles": [{"id", "arrows": [{"source", "word", "target"}]}]}
    """
    l = l or build_dstar()
    faces = []
    for d in range(5):
        for f in l.faces[d]:
            faces.append({
                "dim": d,
                "name": f.name,
                "principal": list(f.principal),
                "decoration": list(f.decoration),
                "boundary": list(f.boundary),
                "subfaces": sorted(l.by_key(k).name for k in l.incidence.get(f.key, ())),
            })
    return {
        "vertices": [{"name": v.name, "lift": v.lift.to_text(), "finite": v.finite} for v in l.vertices.values()],
        "faces": faces,
        "pairings": [
            {"word": sp.word, "source": sp.source.name, "target": sp.target.name,
             "source_order": list(sp.source_order), "target_order": list(sp.target_order)}
            for sp in side_pairings(l)
        ],
        "cycles": [
            {"id": c.id, "arrows": [{"source": list(s), "word": w, "target": list(t)} for s, w, t in c.arrows()]}
            for c in ridge_cycles().values()
        ],
    }
