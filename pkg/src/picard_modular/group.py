"""Exact matrix group machinery for PU(2,1; Z[omega]).

Words are read left to right and evaluated as matrix products, so the word
``R*P`` is the matrix R @ P (apply P first).  Projective equality is decided
by checking that g h^{-1} is a scalar matrix.

Word grammar (EBNF)::

    word := elem (('*' | whitespace) elem)*
    elem := atom ('^' signed_int)?
    atom := generator | '(' word ')'
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .chgeom import PointClass, classify_vector, herm
from .exactfield import ONE, ZERO, CycNum, abs2, embed, re_part, sign_real, zeta_power
from .matrices import HERMITIAN, HVector, Matrix, proj_equal

__all__ = [
    "Word",
    "WordSyntaxError",
    "UnknownGeneratorError",
    "GroupElt",
    "IsometryType",
    "GENERATOR_NAMES",
    "parse_word",
    "eval_word",
    "generator",
    "pu_equal",
    "is_identity",
    "inverse",
    "apply",
    "fixes_projectively",
    "complex_reflection",
    "classify",
    "fixed_point_elliptic",
    "projective_order",
    "is_h_unitary",
    "verify_presentation",
    "PRESENTATIONS",
    "RelatorCheck",
    "EigenvalueOutsideFieldError",
    "NoNegativeEigenvectorError",
]


class WordSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownGeneratorError(ValueError):
    pass


class EigenvalueOutsideFieldError(ArithmeticError):
    pass


class NoNegativeEigenvectorError(ArithmeticError):
    pass


class Word(tuple):
    """Sequence of (generator, exponent) pairs."""

    def __new__(cls, letters: Iterable[tuple[str, int]] = ()):
        return super().__new__(cls, tuple((str(g), int(e)) for g, e in letters))

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self))

    def __str__(self) -> str:
        if not self:
            return "Id"
        return "*".join(g if e == 1 else f"{g}^{e}" for g, e in self)


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>[+-]?\d+)|(?P<sym>[()*^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise WordSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    return tokens


def parse_word(text: str, generators: Iterable[str] | None = None) -> Word:
    """Parse ``text`` into a flat :class:`Word`.

    ``generators`` restricts the allowed names (default: the matrix generators
    P, Q, R, R1, R2, R3, J and Id).
    """
    allowed = set(GENERATOR_NAMES if generators is None else generators)
    tokens = _tokenize(text)
    idx = 0

    def peek():
        return tokens[idx] if idx < len(tokens) else None

    def parse_seq(stop_at_paren: bool) -> list[tuple[str, int]]:
        nonlocal idx
        out: list[tuple[str, int]] = []
        expect_elem = True
        while True:
            tok = peek()
            if tok is None or (tok[0] == "sym" and tok[1] == ")"):
                if expect_elem:
                    pos = tok[2] if tok else len(text)
                    raise WordSyntaxError("expected a generator or '('", pos)
                if tok is not None and not stop_at_paren:
                    raise WordSyntaxError("unbalanced ')'", tok[2])
                return out
            if tok[0] == "sym" and tok[1] == "*":
                if expect_elem:
                    raise WordSyntaxError("unexpected '*'", tok[2])
                idx += 1
                expect_elem = True
                continue
            out.extend(parse_elem())
            expect_elem = False

    def parse_elem() -> list[tuple[str, int]]:
        nonlocal idx
        tok = peek()
        if tok[0] == "name":
            idx += 1
            if tok[1] not in allowed:
                raise UnknownGeneratorError(f"unknown generator {tok[1]!r} at position {tok[2]}")
            atom = [] if tok[1] == "Id" else [(tok[1], 1)]
        elif tok[0] == "sym" and tok[1] == "(":
            idx += 1
            atom = parse_seq(stop_at_paren=True)
            close = peek()
            if close is None or close[1] != ")":
                raise WordSyntaxError("missing ')'", close[2] if close else len(text))
            idx += 1
        else:
            raise WordSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        tok = peek()
        if tok is not None and tok[0] == "sym" and tok[1] == "^":
            idx += 1
            num = peek()
            if num is None or num[0] != "int":
                raise WordSyntaxError("expected an integer exponent", num[2] if num else len(text))
            idx += 1
            k = int(num[1])
            if k == 0:
                return []
            if len(atom) == 1:
                return [(atom[0][0], atom[0][1] * k)]
            base = atom if k > 0 else [(g, -e) for g, e in reversed(atom)]
            return base * abs(k)
        return atom

    if not tokens:
        raise WordSyntaxError("empty word", 0)
    letters = parse_seq(stop_at_paren=False)
    return Word(letters)


class GroupElt(Matrix):
    """A matrix together with the word that produced it (if any)."""

    __slots__ = ("word",)

    def __init__(self, matrix: Matrix | Sequence, word: Word | None = None):
        super().__init__(matrix.rows if isinstance(matrix, Matrix) else matrix)
        self.word = word


def _base_generators() -> dict[str, Matrix]:
    w = embed("omega")
    P = Matrix([[1, 1, w], [0, w, -w], [0, 0, 1]])
    Q = Matrix([[1, 1, w], [0, -1, 1], [0, 0, 1]])
    R = Matrix([[0, 0, 1], [0, -1, 0], [1, 0, 0]])
    Pinv = inverse(P)
    R1 = Q * Pinv
    J = R * P
    Jinv = inverse(J)
    R2 = J * R1 * Jinv
    R3 = Pinv * Q
    return {"P": P, "Q": Q, "R": R, "R1": R1, "R2": R2, "R3": R3, "J": J, "Id": Matrix.identity()}


GENERATOR_NAMES = ("P", "Q", "R", "R1", "R2", "R3", "J", "Id")


def inverse(g: Matrix) -> Matrix:
    """H^{-1} g^* H; exact inverse for H-unitary g."""
    return HERMITIAN * g.adjoint() * HERMITIAN


_GENERATORS: dict[str, Matrix] = {}


def generator(name: str) -> Matrix:
    if not _GENERATORS:
        _GENERATORS.update(_base_generators())
    try:
        return _GENERATORS[name]
    except KeyError:
        raise UnknownGeneratorError(f"unknown generator {name!r}") from None


def eval_word(w: Word | str, images: Mapping[str, Matrix] | None = None) -> GroupElt:
    """Left-to-right product of generator matrices.

    ``images`` substitutes an arbitrary assignment of matrices to names
    (used for homomorphism checks); default is the matrix generators.
    """
    if isinstance(w, str):
        w = parse_word(w, generators=None if images is None else set(images) | {"Id"})
    acc = Matrix.identity()
    cache: dict[tuple[str, int], Matrix] = {}
    for name, e in w:
        key = (name, e)
        if key not in cache:
            if images is None:
                base = generator(name)
            else:
                try:
                    base = images[name]
                except KeyError:
                    raise UnknownGeneratorError(f"no image for generator {name!r}") from None
            cache[key] = base.power(e) if e >= 0 else _power_inverse(base, -e)
        acc = acc * cache[key]
    return GroupElt(acc, w)


def _power_inverse(g: Matrix, n: int) -> Matrix:
    inv = inverse(g) if is_h_unitary(g) else g.cofactor_inverse()
    return inv.power(n)


def is_h_unitary(g: Matrix) -> bool:
    return g.adjoint() * HERMITIAN * g == HERMITIAN


def pu_equal(g: Matrix, h: Matrix) -> bool:
    """True iff g and h agree in PU(2,1), i.e. g h^{-1} is a nonzero scalar."""
    hinv = inverse(h) if is_h_unitary(h) else h.cofactor_inverse()
    return (g * hinv).is_scalar()


def is_identity(g: Matrix) -> bool:
    return g.is_scalar()


def apply(g: Matrix, v: HVector) -> HVector:
    if v.is_zero():
        from .chgeom import ZeroVectorError

        raise ZeroVectorError("cannot apply to the zero vector")
    return g * v


def fixes_projectively(g: Matrix, v: HVector) -> bool:
    return proj_equal(apply(g, v), v)


def complex_reflection(n: HVector, k: int) -> Matrix:
    """Order-k complex reflection about the complex line with polar vector n.

    z -> z + (e^{2 pi i/k} - 1) <z, n>/<n, n> n
    """
    if k < 2 or 36 % k:
        raise ValueError(f"order {k} must be >= 2 and divide 36")
    if classify_vector(n) is not PointClass.POSITIVE:
        raise ValueError("polar vector must be positive")
    factor = (zeta_power(36 // k) - 1) / herm(n, n)
    cols = []
    for j in range(3):
        e = HVector([ONE if i == j else ZERO for i in range(3)])
        c = herm(e, n) * factor
        cols.append(e + n.scale(c))
    return Matrix([[cols[j][i] for j in range(3)] for i in range(3)])


class IsometryType(str, Enum):
    IDENTITY = "identity"
    REGULAR_ELLIPTIC = "regular-elliptic"
    SPECIAL_ELLIPTIC = "special-elliptic"
    PARABOLIC = "parabolic"
    LOXODROMIC = "loxodromic"


# -- polynomials over the field (low degree first) ---------------------------------


def _poly_trim(p: list[CycNum]) -> list[CycNum]:
    while p and p[-1].is_zero():
        p = p[:-1]
    return p


def _poly_divmod(a: list[CycNum], b: list[CycNum]) -> tuple[list[CycNum], list[CycNum]]:
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ZERO] * max(0, len(a) - len(b) + 1)
    lead_inv = b[-1].inverse()
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] * lead_inv
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] = a[i + shift] - c * bc
        a = _poly_trim(a)
    return q, a


def _poly_gcd(a: list[CycNum], b: list[CycNum]) -> list[CycNum]:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    inv = a[-1].inverse()
    return [c * inv for c in a]


def _poly_eval_matrix(p: list[CycNum], g: Matrix) -> Matrix:
    acc = Matrix.scalar(ZERO)
    for c in reversed(p):
        acc = acc * g + Matrix.scalar(c)
    return acc


def _charpoly(g: Matrix) -> list[CycNum]:
    tau = g.trace()
    sigma = (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]) + (g[0, 0] * g[2, 2] - g[0, 2] * g[2, 0]) + (
        g[1, 1] * g[2, 2] - g[1, 2] * g[2, 1])
    return [-g.det(), sigma, -tau, ONE]


def _is_diagonalizable(g: Matrix) -> bool:
    c = _charpoly(g)
    dc = [c[1], 2 * c[2], 3 * c[3]]
    sq, _ = _poly_divmod(c, _poly_gcd(c, dc))
    return all(x.is_zero() for r in _poly_eval_matrix(sq, g).rows for x in r)


def trace_discriminant(g: Matrix) -> CycNum:
    """Goldman's f(tau) for the determinant-one lift of g."""
    tau = g.trace()
    det = g.det()
    a2 = abs2(tau)
    return a2 * a2 - 8 * re_part(tau * tau * tau / det) + 18 * a2 - 27


def classify(g: Matrix) -> IsometryType:
    if g.is_scalar():
        return IsometryType.IDENTITY
    s = sign_real(trace_discriminant(g))
    if s < 0:
        return IsometryType.REGULAR_ELLIPTIC
    if s > 0:
        return IsometryType.LOXODROMIC
    return IsometryType.SPECIAL_ELLIPTIC if _is_diagonalizable(g) else IsometryType.PARABOLIC


def _nullspace(m: Matrix) -> list[HVector]:
    rows = [list(r) for r in m.rows]
    pivots = []
    r = 0
    for col in range(3):
        piv = next((i for i in range(r, 3) if not rows[i][col].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][col].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(3):
            if i != r and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(3) if c not in pivots]
    basis = []
    for fcol in free:
        v = [ZERO] * 3
        v[fcol] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fcol]
        basis.append(HVector(v))
    return basis


def _det_normalized(g: Matrix) -> Matrix | None:
    det = g.det()
    for m in range(36):
        if zeta_power(m) == det:
            if m % 3 == 0:
                return g * zeta_power(-m // 3)
            return None
    return None


def _negative_in_span(basis: list[HVector]) -> HVector | None:
    if len(basis) == 1:
        return basis[0] if classify_vector(basis[0]) is PointClass.NEGATIVE else None
    a, b = basis[0], basis[1]
    i = embed("i")
    for cand in (a, b, a + b, a - b, a + b.scale(i), a - b.scale(i), a + b.scale(2), a - b.scale(2)):
        if not cand.is_zero() and classify_vector(cand) is PointClass.NEGATIVE:
            return cand
    return None


def fixed_point_elliptic(g: Matrix) -> HVector:
    """A negative eigenvector of g, i.e. a fixed point inside the complex hyperbolic plane."""
    kind = classify(g)
    if kind not in (IsometryType.REGULAR_ELLIPTIC, IsometryType.SPECIAL_ELLIPTIC):
        raise ValueError(f"element is {kind.value}, not elliptic")
    candidates = [g]
    norm = _det_normalized(g)
    if norm is not None:
        candidates.insert(0, norm)
    found_eigen = False
    for h in candidates:
        for m in range(36):
            lam = zeta_power(m)
            ker = _nullspace(h - Matrix.scalar(lam))
            if not ker:
                continue
            found_eigen = True
            v = _negative_in_span(ker)
            if v is not None:
                v = v.scale(v[2].inverse()) if not v[2].is_zero() else v
                if not fixes_projectively(g, v):
                    raise AssertionError("eigenvector check failed")
                return v
    if not found_eigen:
        raise EigenvalueOutsideFieldError("no eigenvalue among the 36th roots of unity")
    raise NoNegativeEigenvectorError("no negative eigenvector found")


def projective_order(g: Matrix, cap: int = 1000) -> int | None:
    """Smallest n >= 1 with g^n scalar, or None if none up to ``cap``."""
    acc = g
    for n in range(1, cap + 1):
        if acc.is_scalar():
            return n
        acc = acc * g
    return None


# -- presentations -------------------------------------------------------------------

PRESENTATIONS: dict[str, list[tuple[str, str]]] = {
    "thm-1": [
        ("R^2", "R^2"),
        ("(QP^-1)^6", "(Q*P^-1)^6"),
        ("PQ^-1RQP^-1R", "P*Q^-1*R*Q*P^-1*R"),
        ("P^3Q^-2", "P^3*Q^-2"),
        ("(RP)^3", "(R*P)^3"),
    ],
    "thm-2": [
        ("R1^6", "R1^6"),
        ("R2^6", "R2^6"),
        ("R3^6", "R3^6"),
        ("R2R1R2=R1R2R1", "R2*R1*R2*(R1*R2*R1)^-1"),
        ("R3R2R3=R2R3R2", "R3*R2*R3*(R2*R3*R2)^-1"),
        ("R1R3R1=R3R1R3", "R1*R3*R1*(R3*R1*R3)^-1"),
        ("(R1R2R3)^4", "(R1*R2*R3)^4"),
        ("(R1R2R3)^-2R1R2=(R2R3R1)^-2R2R3", "(R1*R2*R3)^-2*R1*R2*((R2*R3*R1)^-2*R2*R3)^-1"),
    ],
    "thm-3": [
        ("J^3", "J^3"),
        ("R1^6", "R1^6"),
        ("(JR1^-1J)^4", "(J*R1^-1*J)^4"),
        ("R1(JR1^-1J)^2R1^-1(JR1^-1J)^-2", "R1*(J*R1^-1*J)^2*R1^-1*(J*R1^-1*J)^-2"),
    ],
    "gamma-infty": [
        ("(QP^-1)^6", "(Q*P^-1)^6"),
        ("P^3Q^-2", "P^3*Q^-2"),
    ],
}


@dataclass(frozen=True)
class RelatorCheck:
    label: str
    word: str
    passed: bool
    residual: CycNum | None  # the scalar when passed


def verify_presentation(pid: str) -> list[RelatorCheck]:
    try:
        rels = PRESENTATIONS[pid]
    except KeyError:
        raise KeyError(f"unknown presentation {pid!r}; known: {', '.join(PRESENTATIONS)}") from None
    out = []
    for label, text in rels:
        g = eval_word(parse_word(text))
        ok = g.is_scalar()
        out.append(RelatorCheck(label, text, ok, g[0, 0] if ok else None))
    return out
