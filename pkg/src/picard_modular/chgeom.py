"""The complex hyperbolic plane in the Siegel model.

The Hermitian form is <z, w> = w^* H z with H the anti-diagonal matrix of
signature (2, 1). Every predicate here is exact: quantities are formed in
Q(zeta_36) and compared through :func:`~picard_modular.exactfield.sign_real`.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .exactfield import ONE, ZERO, CycNum, abs2, embed, im_part, re_part, sign_real
from .matrices import HERMITIAN, HVector, Matrix

__all__ = [
    "GeometryError",
    "ZeroVectorError",
    "PointAtInfinityError",
    "PositiveVectorError",
    "NonNegativeVectorError",
    "DegeneratePairError",
    "FixesInfinityError",
    "PointClass",
    "FordSide",
    "HeisenbergPoint",
    "HoroPoint",
    "IsometricSphereData",
    "herm",
    "classify_vector",
    "lift",
    "horo_coords",
    "heis_mul",
    "heis_inverse",
    "heis_translation",
    "rotation",
    "dilation",
    "bergman_cosh2",
    "cosh_distance",
    "on_geodesic_between",
    "common_complex_line",
    "triple_product",
    "triple_product_is_real",
    "cygan_dist4",
    "isometric_sphere",
    "ford_side",
    "QINF",
    "NAMED_POINTS",
    "named_point",
]


class GeometryError(ValueError):
    pass


class ZeroVectorError(GeometryError):
    pass


class PointAtInfinityError(GeometryError):
    pass


class PositiveVectorError(GeometryError):
    pass


class NonNegativeVectorError(GeometryError):
    pass


class DegeneratePairError(GeometryError):
    pass


class FixesInfinityError(GeometryError):
    pass


class PointClass(str, Enum):
    NEGATIVE = "negative"
    NULL = "null"
    POSITIVE = "positive"


class FordSide(str, Enum):
    INTERIOR = "interior"
    ON = "on"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class HeisenbergPoint:
    z: CycNum
    t: CycNum

    def __post_init__(self):
        if self.t.conj() != self.t:
            raise GeometryError("Heisenberg t-coordinate must be real")


@dataclass(frozen=True)
class HoroPoint:
    z: CycNum
    t: CycNum
    u: CycNum

    def __post_init__(self):
        if self.t.conj() != self.t or self.u.conj() != self.u:
            raise GeometryError("horospherical t and u must be real")
        if sign_real(self.u) < 0:
            raise GeometryError("horospherical height u must be >= 0")


@dataclass(frozen=True)
class IsometricSphereData:
    center: HeisenbergPoint
    radius4: CycNum  # r^4 = 4 / |g_31|^2, kept in the field


def herm(a: HVector, b: HVector) -> CycNum:
    """<a, b> = b^* H a."""
    return b[0].conj() * a[2] + b[1].conj() * a[1] + b[2].conj() * a[0]


def classify_vector(a: HVector) -> PointClass:
    if a.is_zero():
        raise ZeroVectorError("zero vector has no type")
    s = sign_real(herm(a, a))
    return PointClass.NEGATIVE if s < 0 else PointClass.NULL if s == 0 else PointClass.POSITIVE


_HALF = CycNum.rational(Fraction(1, 2))
_I = embed("i")


def lift(p: HoroPoint) -> HVector:
    first = (-abs2(p.z) - p.u + _I * p.t) * _HALF
    return HVector([first, p.z, ONE])


def horo_coords(a: HVector) -> HoroPoint:
    if a.is_zero():
        raise ZeroVectorError("zero vector")
    if a[2].is_zero():
        raise PointAtInfinityError("third entry is zero (the point q_inf or not in the closure)")
    if classify_vector(a) is PointClass.POSITIVE:
        raise PositiveVectorError("positive vectors are not points of the closed plane")
    inv = a[2].inverse()
    first, z = a[0] * inv, a[1] * inv
    t = 2 * im_part(first)
    u = -2 * re_part(first) - abs2(z)
    return HoroPoint(z, t, u)


def heis_mul(p: HeisenbergPoint, q: HeisenbergPoint) -> HeisenbergPoint:
    return HeisenbergPoint(p.z + q.z, p.t + q.t - 2 * im_part(p.z.conj() * q.z))


def heis_inverse(p: HeisenbergPoint) -> HeisenbergPoint:
    return HeisenbergPoint(-p.z, -p.t)


def heis_translation(p: HeisenbergPoint) -> Matrix:
    """Upper-triangular unipotent matrix realising left multiplication by p."""
    corner = (-abs2(p.z) + _I * p.t) * _HALF
    return Matrix([[ONE, -p.z.conj(), corner], [ZERO, ONE, p.z], [ZERO, ZERO, ONE]])


def rotation(e: CycNum) -> Matrix:
    """diag(1, e, 1); acts on the boundary as (z, t) -> (e z, t) when |e| = 1."""
    return Matrix.diag(ONE, e, ONE)


def dilation(lam) -> Matrix:
    lam = CycNum._coerce(lam)
    return Matrix.diag(lam, ONE, lam.inverse())


def _require_negative(*vs: HVector) -> None:
    for v in vs:
        if classify_vector(v) is not PointClass.NEGATIVE:
            raise NonNegativeVectorError(f"{v!r} is not a negative vector")


def bergman_cosh2(u: HVector, v: HVector) -> CycNum:
    """cosh^2(d(u, v)/2) for the Bergman metric; exact and real."""
    _require_negative(u, v)
    return herm(u, v) * herm(v, u) / (herm(u, u) * herm(v, v))


def cosh_distance(u: HVector, v: HVector) -> CycNum:
    return 2 * bergman_cosh2(u, v) - 1


def on_geodesic_between(u: HVector, p: HVector, v: HVector) -> bool:
    """Exact test of d(u, p) + d(p, v) = d(u, v) via the cosh addition law."""
    c_uv, c_up, c_pv = cosh_distance(u, v), cosh_distance(u, p), cosh_distance(p, v)
    lhs = c_uv - c_up * c_pv
    if lhs * lhs != (c_up * c_up - 1) * (c_pv * c_pv - 1):
        return False
    return sign_real(lhs) >= 0


def _rank(vectors: list[HVector]) -> int:
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = 3
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if not rows[r][col].is_zero()), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inverse()
        for r in range(len(rows)):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col] * inv
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _cross(a: HVector, b: HVector) -> HVector:
    return HVector([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def common_complex_line(pts: list[HVector]) -> HVector | None:
    """Polar vector of the complex line through ``pts``, or None if they span rank != 2."""
    if len(pts) < 2:
        raise ValueError("need at least two points")
    if _rank(list(pts)) != 2:
        return None
    basis = [p for p in pts]
    a = basis[0]
    b = next(p for p in basis[1:] if _rank([a, p]) == 2)
    # <x, n> = n^* H x = 0 for x in {a, b}  <=>  conj(n) . (H x) = 0
    return _cross(HERMITIAN * a, HERMITIAN * b).conj()


def triple_product(u: HVector, v: HVector, w: HVector) -> CycNum:
    return herm(u, v) * herm(v, w) * herm(w, u)


def triple_product_is_real(u: HVector, v: HVector, w: HVector) -> bool:
    for a, b in ((u, v), (v, w), (w, u)):
        if herm(a, b).is_zero():
            raise DegeneratePairError("Hermitian product of a pair vanishes")
    t = triple_product(u, v, w)
    return t.conj() == t


def _abs_real(x: CycNum) -> CycNum:
    return -x if sign_real(x) < 0 else x


def cygan_dist4(p: HoroPoint, q: HoroPoint) -> CycNum:
    """Fourth power of the extended Cygan distance."""
    a = abs2(p.z - q.z) + _abs_real(p.u - q.u)
    b = p.t - q.t + 2 * im_part(p.z * q.z.conj())
    return a * a + b * b


def isometric_sphere(g: Matrix) -> IsometricSphereData:
    g31, g32, g33 = g[2, 0], g[2, 1], g[2, 2]
    if g31.is_zero():
        raise FixesInfinityError("g fixes q_inf (g_31 = 0); no isometric sphere")
    c31 = g31.conj()
    center = HeisenbergPoint(g32.conj() / c31, 2 * im_part(g33.conj() / c31))
    return IsometricSphereData(center, 4 / abs2(g31))


QINF = HVector([1, 0, 0])


def ford_side(p: HVector, g: Matrix) -> FordSide:
    """Position of p relative to the isometric sphere I(g)."""
    if p.is_zero():
        raise ZeroVectorError("zero vector")
    if g[2, 0].is_zero():
        raise FixesInfinityError("g fixes q_inf (g_31 = 0)")
    ginv_qinf = HERMITIAN * (g.adjoint() * (HERMITIAN * QINF))  # g^{-1} = H g^* H for H-unitary g
    s = sign_real(abs2(herm(p, QINF)) - abs2(herm(p, ginv_qinf)))
    return FordSide.INTERIOR if s > 0 else FordSide.ON if s == 0 else FordSide.EXTERIOR


def _named_points() -> dict[str, HVector]:
    w = embed("omega")
    wb = w.conj()
    i = embed("i")
    s3 = embed("sqrt3")
    half = CycNum.rational(Fraction(1, 2))
    w3 = HVector([
        -embed("zeta18"),
        half - (s3 * half - 2 * embed("sin_pi_9")) * i,
        ONE,
    ])
    w4 = HVector([
        -s3 * half - i * half,
        half + (2 - s3) * i * half,
        ONE,
    ])
    return {
        "z0": HVector([wb, 0, 1]),
        "z1": HVector([-1, -w, 1]),
        "z2": HVector([-1, 1, 1]),
        "z3": HVector([w, 0, 1]),
        "qinf": QINF,
        "w3": w3,
        "w4": w4,
        "w12": HVector([-1, 0, 1]),
        "n1": HVector([0, 1, 0]),
        "n2": HVector([0, -w, 1]),
        "n3": HVector([-1, 1, 0]),
    }


NAMED_POINTS: dict[str, HVector] = _named_points()


def named_point(name: str) -> HVector:
    try:
        return NAMED_POINTS[name]
    except KeyError:
        raise KeyError(f"unknown point {name!r}; known: {', '.join(NAMED_POINTS)}") from None
