"""Exact 3-vectors and 3x3 matrices over Q(zeta_36).

Matrices act on column vectors from the left; a product ``g * h`` means
"apply h, then g".
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .exactfield import ONE, ZERO, CycNum, parse_cycnum

Entry = CycNum | int


def _c(x) -> CycNum:
    return x if isinstance(x, CycNum) else CycNum._coerce(x)


class HVector(tuple):
    """A column vector in C^3 with exact entries."""

    def __new__(cls, entries: Iterable[Entry]):
        entries = tuple(_c(x) for x in entries)
        if len(entries) != 3:
            raise ValueError("HVector needs exactly three entries")
        return super().__new__(cls, entries)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self)

    def scale(self, s) -> "HVector":
        s = _c(s)
        return HVector(x * s for x in self)

    def __add__(self, other):  # type: ignore[override]
        return HVector(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return HVector(a - b for a, b in zip(self, other))

    def conj(self) -> "HVector":
        return HVector(x.conj() for x in self)

    def normalized(self) -> "HVector":
        """Projective representative with first nonzero entry equal to 1."""
        for x in self:
            if not x.is_zero():
                inv = x.inverse()
                return HVector(y * inv for y in self)
        raise ValueError("zero vector has no projective class")

    def to_text(self) -> list[str]:
        return [str(x) for x in self]

    @classmethod
    def from_text(cls, items: Sequence[str]) -> "HVector":
        return cls(parse_cycnum(s) for s in items)

    def __repr__(self) -> str:
        return "HVector(" + ", ".join(f"'{x}'" for x in self) + ")"


def proj_equal(u: HVector, v: HVector) -> bool:
    """True iff u and v are nonzero multiples of each other."""
    if u.is_zero() or v.is_zero():
        return False
    # all 2x2 minors vanish
    for i in range(3):
        for j in range(i + 1, 3):
            if u[i] * v[j] != u[j] * v[i]:
                return False
    return True


class Matrix:
    """Exact 3x3 matrix; immutable."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Iterable[Iterable[Entry]]):
        rows = tuple(tuple(_c(x) for x in r) for r in rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("need a 3x3 matrix")
        self.rows = rows
        self._hash = None

    @classmethod
    def identity(cls) -> "Matrix":
        return cls([[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]])

    @classmethod
    def scalar(cls, s) -> "Matrix":
        s = _c(s)
        return cls([[s, ZERO, ZERO], [ZERO, s, ZERO], [ZERO, ZERO, s]])

    @classmethod
    def diag(cls, a, b, c) -> "Matrix":
        return cls([[a, ZERO, ZERO], [ZERO, b, ZERO], [ZERO, ZERO, c]])

    def __getitem__(self, ij: tuple[int, int]) -> CycNum:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __mul__(self, other):
        if isinstance(other, Matrix):
            a, b = self.rows, other.rows
            cols = list(zip(*b))
            return Matrix(
                [[a[i][0] * cols[j][0] + a[i][1] * cols[j][1] + a[i][2] * cols[j][2] for j in range(3)]
                 for i in range(3)]
            )
        if isinstance(other, HVector):
            return HVector(r[0] * other[0] + r[1] * other[1] + r[2] * other[2] for r in self.rows)
        s = _c(other)
        return Matrix([[x * s for x in r] for r in self.rows])

    def __rmul__(self, other):
        s = _c(other)
        return Matrix([[s * x for x in r] for r in self.rows])

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def adjoint(self) -> "Matrix":
        """Conjugate transpose."""
        return Matrix([[self.rows[j][i].conj() for j in range(3)] for i in range(3)])

    def transpose(self) -> "Matrix":
        return Matrix([[self.rows[j][i] for j in range(3)] for i in range(3)])

    def trace(self) -> CycNum:
        return self.rows[0][0] + self.rows[1][1] + self.rows[2][2]

    def det(self) -> CycNum:
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def cofactor_inverse(self) -> "Matrix":
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        det = self.det()
        if det.is_zero():
            raise ZeroDivisionError("singular matrix")
        adj = [
            [e * i - f * h, c * h - b * i, b * f - c * e],
            [f * g - d * i, a * i - c * g, c * d - a * f],
            [d * h - e * g, b * g - a * h, a * e - b * d],
        ]
        inv = det.inverse()
        return Matrix([[x * inv for x in r] for r in adj])

    def is_scalar(self) -> bool:
        r = self.rows
        off = all(r[i][j].is_zero() for i in range(3) for j in range(3) if i != j)
        return off and r[0][0] == r[1][1] == r[2][2] and not r[0][0].is_zero()

    def column(self, j: int) -> HVector:
        return HVector(self.rows[i][j] for i in range(3))

    def power(self, n: int) -> "Matrix":
        if n < 0:
            return self.cofactor_inverse().power(-n)
        result, base = Matrix.identity(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def projective_key(self) -> tuple:
        """Canonical key of the PU-class: scale so the first nonzero entry is 1."""
        flat = [x for r in self.rows for x in r]
        for x in flat:
            if not x.is_zero():
                inv = x.inverse()
                return tuple((y * inv).num + ((y * inv).den,) for y in flat)
        raise ValueError("zero matrix")

    def to_text(self) -> list[str]:
        return [str(x) for r in self.rows for x in r]

    @classmethod
    def from_text(cls, items: Sequence[str]) -> "Matrix":
        if len(items) != 9:
            raise ValueError("need nine entries, row-major")
        vals = [parse_cycnum(s) for s in items]
        return cls([vals[0:3], vals[3:6], vals[6:9]])

    def __repr__(self) -> str:
        return "Matrix(" + "; ".join(", ".join(str(x) for x in r) for r in self.rows) + ")"


HERMITIAN = Matrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
