"""Orbifold handle decompositions and the five-step complex for the compact core.

A complex is an ordered list of attachments.  Each attachment names a handle
and the regions of it that are glued to handles attached earlier, together
with the cone order carried by each region.  :func:`validate` checks ordering,
cone-order matching and the existence of the singular loci used by gluings;
:func:`euler_characteristic` and :func:`pi1_presentation` compute invariants of
the underlying space.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping

from .chgeom import NAMED_POINTS
from .group import UnknownGeneratorError, Word, _nullspace, classify, eval_word, fixes_projectively, parse_word
from .isotropy import Presentation
from .matrices import Matrix
from .report import CheckResult, Status, check

__all__ = [
    "ConeOrbifold2D",
    "HandleKind",
    "HandleSpec",
    "Gluing",
    "Attachment",
    "HandleComplex",
    "UNION",
    "build_theorem1",
    "validate",
    "violations",
    "euler_characteristic",
    "cw_euler_characteristic",
    "pi1_presentation",
    "Pi1Data",
    "w4_reflection_evidence",
]

UNION = "*"  # gluing target meaning "the complex built so far"


@dataclass(frozen=True)
class ConeOrbifold2D:
    """F_n = D^2 / Z_n; n = 1 is a smooth disk."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("cone order must be >= 1")


class HandleKind(str, Enum):
    CLASSICAL = "classical"
    ORBIFOLD0 = "orbifold0"
    ORBIFOLD1 = "orbifold1"
    ORBIFOLD2 = "orbifold2"
    PANTS = "pants-product"


@dataclass(frozen=True)
class HandleSpec:
    name: str
    kind: HandleKind
    index: int  # handle index; the pants product sits with the 1-handles
    cone_order: int = 1
    link_label: str | None = None  # orbifold 0-handles only
    loci: tuple[int, ...] = ()  # cone orders of the singular loci on the link

    def __post_init__(self):
        if self.kind in (HandleKind.ORBIFOLD1, HandleKind.ORBIFOLD2, HandleKind.PANTS) and self.cone_order < 2:
            raise ValueError(f"{self.kind.value} handles need cone order >= 2")
        if self.kind is HandleKind.CLASSICAL and not 0 <= self.index <= 4:
            raise ValueError("classical handle index must be 0..4")


@dataclass(frozen=True)
class Gluing:
    target: str  # handle name or UNION
    region: str  # e.g. "S0 x D3", "D1 x F6", "S1 x F2", "S1 x D2"
    cone_order: int = 1
    euler: int = 1  # Euler characteristic of the gluing region


@dataclass(frozen=True)
class Attachment:
    handle: HandleSpec
    gluings: tuple[Gluing, ...] = ()
    step: int = 0


@dataclass(frozen=True)
class HandleComplex:
    attachments: tuple[Attachment, ...]

    @property
    def link_labels(self) -> dict[str, str]:
        return {a.handle.name: a.handle.link_label for a in self.attachments if a.handle.link_label}

    def handle(self, name: str) -> HandleSpec:
        for a in self.attachments:
            if a.handle.name == name:
                return a.handle
        raise KeyError(name)

    def replace_handle(self, name: str, **changes) -> "HandleComplex":
        out = []
        for a in self.attachments:
            if a.handle.name == name:
                h = replace(a.handle, **changes)
                gl = a.gluings
                if "cone_order" in changes:
                    gl = tuple(replace(g, cone_order=changes["cone_order"]) if g.cone_order > 1 else g for g in gl)
                a = Attachment(h, gl, a.step)
            out.append(a)
        return HandleComplex(tuple(out))

    def with_attachment(self, att: Attachment, position: int | None = None) -> "HandleComplex":
        items = list(self.attachments)
        items.insert(len(items) if position is None else position, att)
        return HandleComplex(tuple(items))


# -- the shipped handle complex ------------------------------------------------------------

H_W3 = "h(w3)"
H_W4 = "h(w4)"
H_W12 = "h(w12)"
H_Z0 = "h(z0)"
H_W3W4 = "h([w3,w4])"
H_Z0W12 = "h([z0,w12])"
H_PANTS = "h([z0,w4,w12])"
H_2A = "h([z0,w4,w3,J(w4)])"
H_2B = "h([z0,J(w4),z1,w12])"
H_3 = "h([w12,z0,z1,z2,(w3,w4,J(w4),PJ(w4))])"


def build_theorem1() -> HandleComplex:
    """The ten attachments of the five-step decomposition.

    h(w4) is given an order-2 singular locus: the square of the generator of its
    isotropy group is a complex reflection whose mirror passes through w4 (see
    :func:`w4_reflection_evidence`), and step 3 glues onto that locus.
    """
    zero = [
        HandleSpec(H_W3, HandleKind.ORBIFOLD0, 0, link_label="L(3,-1)", loci=()),
        HandleSpec(H_W4, HandleKind.ORBIFOLD0, 0, link_label="L(4,-1)", loci=(2,)),
        HandleSpec(H_W12, HandleKind.ORBIFOLD0, 0, link_label="S3-Hopf(2,6)", loci=(2, 6)),
        HandleSpec(H_Z0, HandleKind.ORBIFOLD0, 0, link_label="L(3,2)-base", loci=(2, 6)),
    ]
    atts = [Attachment(h, (), 1) for h in zero]
    atts.append(Attachment(
        HandleSpec(H_W3W4, HandleKind.CLASSICAL, 1),
        (Gluing(H_W3, "{-1} x D3", 1, 1), Gluing(H_W4, "{+1} x D3", 1, 1)), 2))
    atts.append(Attachment(
        HandleSpec(H_Z0W12, HandleKind.ORBIFOLD1, 1, cone_order=6),
        (Gluing(H_Z0, "{-1} x D1 x F6", 6, 1), Gluing(H_W12, "{+1} x D1 x F6", 6, 1)), 2))
    atts.append(Attachment(
        HandleSpec(H_PANTS, HandleKind.PANTS, 1, cone_order=2),
        (Gluing(H_W4, "S1 x F2", 2, 0), Gluing(H_W12, "S1 x F2", 2, 0), Gluing(H_Z0, "S1 x F2", 2, 0)), 3))
    for name in (H_2A, H_2B):
        atts.append(Attachment(HandleSpec(name, HandleKind.CLASSICAL, 2), (Gluing(UNION, "S1 x D2", 1, 0),), 4))
    atts.append(Attachment(HandleSpec(H_3, HandleKind.CLASSICAL, 3), (Gluing(UNION, "S2 x D1", 1, 2),), 5))
    return HandleComplex(tuple(atts))


# -- validation -------------------------------------------------------------------------------


def violations(c: HandleComplex) -> list[str]:
    out: list[str] = []
    seen: dict[str, HandleSpec] = {}
    prev_index = 0
    for pos, a in enumerate(c.attachments):
        h = a.handle
        if h.name in seen:
            out.append(f"duplicate handle {h.name}")
        if h.index < prev_index:
            out.append(f"{h.name} (index {h.index}) attached after an index-{prev_index} handle")
        prev_index = max(prev_index, h.index)
        if h.kind is HandleKind.PANTS and len(a.gluings) != 3:
            out.append(f"{h.name} must have exactly three S1 x F_n gluing regions, has {len(a.gluings)}")
        if h.index == 0 and a.gluings:
            out.append(f"0-handle {h.name} has gluing regions")
        if h.index > 0 and not a.gluings:
            out.append(f"{h.name} is not attached to anything")
        for g in a.gluings:
            if g.target == UNION:
                if not seen:
                    out.append(f"{h.name} glued to an empty complex")
                continue
            target = seen.get(g.target)
            if target is None:
                where = "later" if any(b.handle.name == g.target for b in c.attachments[pos:]) else "nowhere"
                out.append(f"{h.name} glued to {g.target}, which is attached {where}")
                continue
            if g.cone_order != h.cone_order:
                out.append(f"{h.name}: region {g.region} carries order {g.cone_order}, handle has {h.cone_order}")
            if g.cone_order > 1:
                if target.kind is not HandleKind.ORBIFOLD0:
                    out.append(f"{h.name}: order-{g.cone_order} region glued to non-0-handle {g.target}")
                elif g.cone_order not in target.loci:
                    loci = ", ".join(map(str, target.loci)) or "none"
                    out.append(
                        f"{h.name}: order-{g.cone_order} region needs a matching locus on {g.target} "
                        f"({target.link_label}; loci: {loci})")
        seen[h.name] = h
    if c.attachments and c.attachments[0].handle.index != 0:
        out.append("the first attachment is not a 0-handle")
    return out


def validate(c: HandleComplex) -> list[CheckResult]:
    v = violations(c)
    results = [check("handles.structure", not v, "no violations" if not v else "; ".join(v), witness=v or None)]
    results.append(_step2_note(c))
    ev = w4_reflection_evidence()
    results.append(CheckResult(
        "handles.w4-singular-locus", Status.INFO,
        "the generator of the isotropy group of w4 is " + ev["generator_type"]
        + ", but its square is " + ev["square_type"]
        + f" with a {ev['eigenspace_dim']}-dimensional eigenspace through w4 (a complex reflection "
        "whose mirror meets w4), so the link of h(w4) carries an order-2 singular circle",
        witness=ev))
    return results


def _step2_note(c: HandleComplex) -> CheckResult:
    try:
        att = next(a for a in c.attachments if a.handle.name == H_Z0W12)
    except StopIteration:
        return CheckResult("handles.step2-gluing-targets", Status.INFO, f"{H_Z0W12} not present")
    used = [g.target for g in att.gluings]
    return CheckResult(
        "handles.step2-gluing-targets", Status.INFO,
        f"the order-6 ends of the orbifold 1-handle {H_Z0W12} admit two readings of their targets: "
        f"{H_W4} with {H_W12}, or {H_Z0} with {H_W12}. The first is impossible because {H_W4} has no "
        f"order-6 locus. This complex glues to {' and '.join(used)}.",
        witness={"rejected_targets": [H_W4, H_W12], "accepted_targets": [H_Z0, H_W12], "used": used})


def w4_reflection_evidence() -> dict:
    """Exact evidence that the isotropy group of w4 contains a complex reflection."""
    g = eval_word("R1*R2*R3")
    g2 = g * g
    w4 = NAMED_POINTS["w4"]
    image = g2 * w4
    lam = image[2] / w4[2]
    eig = g2 - Matrix.scalar(lam)
    dim = len(_nullspace(eig))
    return {
        "generator": "R1*R2*R3",
        "generator_type": classify(g).value,
        "square_type": classify(g2).value,
        "square_fixes_w4": fixes_projectively(g2, w4),
        "eigenvalue_on_w4": str(lam),
        "eigenspace_dim": dim,
    }


# -- invariants -------------------------------------------------------------------------------


def _handle_euler(h: HandleSpec) -> int:
    # underlying spaces: cones, disks and D^k x F_n are contractible; pants x F_n ~ pants
    return -1 if h.kind is HandleKind.PANTS else 1


def euler_characteristic(c: HandleComplex) -> int:
    """chi of the underlying space by chi(Y u_A X) = chi(Y) + chi(X) - chi(A)."""
    chi = 0
    for a in c.attachments:
        chi += _handle_euler(a.handle) - sum(g.euler for g in a.gluings)
    return chi


def cw_euler_characteristic(c: HandleComplex) -> int:
    """Independent count from a CW model of the same complex.

    0-handles are points, 1-handles are edges, a pants product with its three
    boundary circles coned off into 0-handles is a 2-sphere through those three
    points (three edges, two triangles), k-handles glued to the union add a
    k-cell.
    """
    cells = [0, 0, 0, 0, 0]
    for a in c.attachments:
        h = a.handle
        if h.kind is HandleKind.PANTS:
            cells[1] += len(a.gluings)
            cells[2] += 2
        elif h.kind is HandleKind.ORBIFOLD0:
            cells[0] += 1
        else:
            cells[h.index] += 1
    return sum((-1) ** k * n for k, n in enumerate(cells))


@dataclass(frozen=True)
class Pi1Data:
    presentation: Presentation
    tree_edges: tuple[str, ...]
    edge_names: dict[str, tuple[str, str]]


def _short(name: str) -> str:
    if name.startswith("h(") and name.endswith(")"):
        name = name[2:-1]
    return "".join(ch if ch.isalnum() else "_" for ch in name).strip("_")


def pi1_presentation(c: HandleComplex, attaching_words: Mapping[str, str | Word] | None = None) -> Pi1Data:
    """Presentation of pi_1 of the underlying space.

    The 0-handles and 1-handles form a graph; a pants product adds a hub vertex
    joined to the three 0-handles it is glued to (its boundary loops die in the
    contractible 0-handles).  Generators are the edges outside a breadth-first
    spanning forest; each 2-handle contributes its attaching word as a relator;
    3-handles contribute nothing.
    """
    attaching_words = dict(attaching_words or {})
    vertices: list[str] = []
    edges: list[tuple[str, str, str]] = []
    two_handles: list[str] = []
    for a in c.attachments:
        h = a.handle
        if h.index == 0:
            vertices.append(h.name)
        elif h.kind is HandleKind.PANTS:
            hub = h.name + "#hub"
            vertices.append(hub)
            for g in a.gluings:
                edges.append((f"p_{_short(g.target)}", hub, g.target))
        elif h.index == 1:
            ends = [g.target for g in a.gluings]
            if len(ends) != 2:
                raise ValueError(f"1-handle {h.name} needs two ends")
            edges.append((f"e_{_short(ends[0])}_{_short(ends[1])}", ends[0], ends[1]))
        elif h.index == 2:
            two_handles.append(h.name)

    adj: dict[str, list[tuple[str, str]]] = {v: [] for v in vertices}
    for name, a, b in edges:
        adj[a].append((name, b))
        adj[b].append((name, a))
    tree: list[str] = []
    seen: set[str] = set()
    for root in vertices:
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        for v in queue:
            for name, w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    tree.append(name)
                    queue.append(w)
    gens = tuple(name for name, _, _ in edges if name not in tree)

    unknown = set(attaching_words) - set(two_handles)
    if unknown:
        raise KeyError(f"attaching words given for unknown 2-handles: {sorted(unknown)}")
    rels = []
    for name in two_handles:
        w = attaching_words.get(name, "")
        if isinstance(w, str):
            w = parse_word(w, gens) if w.strip() else Word(())
        else:
            bad = [g for g, _ in w if g not in gens]
            if bad:
                raise UnknownGeneratorError(f"unknown generator {bad[0]!r}; expected one of {list(gens)}")
        rels.append(w)
    return Pi1Data(Presentation(gens, tuple(rels)), tuple(tree), {n: (a, b) for n, a, b in edges})
