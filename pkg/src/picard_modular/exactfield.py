"""Exact arithmetic in the cyclotomic field Q(zeta_36).

Elements are stored on the power basis 1, z, ..., z^11 where z = exp(2*pi*i/36)
and the minimal polynomial is Phi_36(x) = x^12 - x^6 + 1, i.e. z^12 = z^6 - 1.
Internally an element is a tuple of 12 integer numerators over one positive
common denominator, kept in lowest terms so equality is structural.

Real (conjugation-fixed) elements can be ordered through the distinguished
embedding z -> exp(2*pi*i/36); :func:`sign_real` decides signs exactly by
interval refinement.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Union

import mpmath

DEGREE = 12
ORDER = 36

__all__ = [
    "CycNum",
    "ComplexInterval",
    "FieldError",
    "NotRealError",
    "PrecisionCapError",
    "ZERO",
    "ONE",
    "ZETA",
    "embed",
    "zeta_power",
    "arith",
    "conj",
    "sign_real",
    "set_sign_precision",
    "to_interval",
    "parse_cycnum",
    "re_part",
    "im_part",
    "abs2",
    "DEFAULT_SIGN_START_BITS",
    "DEFAULT_SIGN_MAX_BITS",
]

DEFAULT_SIGN_START_BITS = 64
DEFAULT_SIGN_MAX_BITS = 4096


class FieldError(ArithmeticError):
    pass


class NotRealError(FieldError, ValueError):
    pass


class PrecisionCapError(FieldError):
    pass


def _reduce_poly(p: list[int]) -> list[int]:
    # fold z^k (k >= 12) using z^12 = z^6 - 1
    for k in range(len(p) - 1, DEGREE - 1, -1):
        c = p[k]
        if c:
            p[k - 6] += c
            p[k - 12] -= c
        p[k] = 0
    return p[:DEGREE]


def _normalize(num: Iterable[int], den: int) -> tuple[tuple[int, ...], int]:
    num = tuple(num)
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        num = tuple(-c for c in num)
        den = -den
    g = den
    for c in num:
        if c:
            g = gcd(g, c)
            if g == 1:
                break
    if g > 1:
        num = tuple(c // g for c in num)
        den //= g
    if not any(num):
        den = 1
    return num, den


Scalar = Union["CycNum", int, Fraction]


class CycNum:
    """An element of Q(zeta_36); immutable and hashable."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, coeffs: Iterable = (), den: int = 1):
        coeffs = list(coeffs)
        if len(coeffs) > DEGREE:
            raise ValueError("use CycNum.from_poly for unreduced input")
        fr = [Fraction(c) for c in coeffs] + [Fraction(0)] * (DEGREE - len(coeffs))
        common = 1
        for c in fr:
            common = common * c.denominator // gcd(common, c.denominator)
        num = [c.numerator * (common // c.denominator) for c in fr]
        self.num, self.den = _normalize(num, common * den)
        self._hash = None

    @classmethod
    def _raw(cls, num: tuple[int, ...], den: int) -> "CycNum":
        obj = object.__new__(cls)
        obj.num, obj.den = _normalize(num, den)
        obj._hash = None
        return obj

    @classmethod
    def from_poly(cls, coeffs: Iterable) -> "CycNum":
        """Build from coefficients of 1, z, z^2, ... of any length (reduced mod Phi_36)."""
        fr = [Fraction(c) for c in coeffs]
        common = 1
        for c in fr:
            common = common * c.denominator // gcd(common, c.denominator)
        p = [c.numerator * (common // c.denominator) for c in fr]
        p += [0] * max(0, DEGREE - len(p))
        return cls._raw(tuple(_reduce_poly(p)), common)

    @classmethod
    def rational(cls, q) -> "CycNum":
        q = Fraction(q)
        return cls._raw((q.numerator,) + (0,) * (DEGREE - 1), q.denominator)

    # -- basic access -------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycNum.rational(other)
        if not isinstance(other, CycNum):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- arithmetic ----------------------------------------------------
    @staticmethod
    def _coerce(x) -> "CycNum":
        if isinstance(x, CycNum):
            return x
        if isinstance(x, (int, Fraction)):
            return CycNum.rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to CycNum")

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        d = self.den * o.den // gcd(self.den, o.den)
        a, b = d // self.den, d // o.den
        return CycNum._raw(tuple(x * a + y * b for x, y in zip(self.num, o.num)), d)

    __radd__ = __add__

    def __neg__(self):
        return CycNum._raw(tuple(-c for c in self.num), self.den)

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return CycNum._raw(tuple(c * other for c in self.num), self.den)
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        p = [0] * (2 * DEGREE - 1)
        b_nz = [(j, y) for j, y in enumerate(o.num) if y]
        for i, x in enumerate(self.num):
            if x:
                for j, y in b_nz:
                    p[i + j] += x * y
        return CycNum._raw(tuple(_reduce_poly(p)), self.den * o.den)

    __rmul__ = __mul__

    def galois(self, k: int) -> "CycNum":
        """Apply the automorphism z -> z^k (k coprime to 36)."""
        if gcd(k, ORDER) != 1:
            raise ValueError(f"{k} is not a unit mod 36")
        p = [0] * DEGREE
        basis = _power_basis()
        for i, c in enumerate(self.num):
            if c:
                for j, b in enumerate(basis[(i * k) % ORDER]):
                    if b:
                        p[j] += c * b
        return CycNum._raw(tuple(p), self.den)

    def norm(self) -> Fraction:
        """Field norm down to Q."""
        prod = self
        for k in _units()[1:]:
            prod = prod * self.galois(k)
        assert prod.is_rational()
        return Fraction(prod.num[0], prod.den)

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_36)")
        others = CycNum.rational(1)
        for k in _units()[1:]:
            others = others * self.galois(k)
        n = self * others
        return others * Fraction(n.den, n.num[0])

    def __truediv__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if o.is_rational():
            if o.is_zero():
                raise ZeroDivisionError("division by zero in Q(zeta_36)")
            q = Fraction(o.num[0], o.den)
            return CycNum._raw(tuple(c * q.denominator for c in self.num), self.den * q.numerator)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "CycNum":
        return self.galois(ORDER - 1)

    # -- numerics --------------------------------------------------------
    def __complex__(self) -> complex:
        z = complex(mpmath.cos(2 * mpmath.pi / ORDER), mpmath.sin(2 * mpmath.pi / ORDER))
        return sum((float(Fraction(c, self.den)) * z**i for i, c in enumerate(self.num)), 0j)

    def __str__(self) -> str:
        return format_cycnum(self)

    def __repr__(self) -> str:
        return f"CycNum('{self}')"


@lru_cache(maxsize=None)
def _units() -> tuple[int, ...]:
    return tuple(k for k in range(1, ORDER) if gcd(k, ORDER) == 1)


@lru_cache(maxsize=None)
def _power_basis() -> tuple[tuple[int, ...], ...]:
    out = []
    for m in range(ORDER):
        p = [0] * (m + 1)
        p[m] = 1
        p += [0] * max(0, DEGREE - len(p))
        out.append(tuple(_reduce_poly(p)))
    return tuple(out)


def zeta_power(m: int) -> CycNum:
    """z^m for any integer m."""
    return CycNum._raw(_power_basis()[m % ORDER], 1)


ZERO = CycNum()
ONE = CycNum.rational(1)
ZETA = zeta_power(1)


def _named_constants() -> dict[str, CycNum]:
    i = zeta_power(9)
    sqrt3 = zeta_power(3) + zeta_power(-3)
    return {
        "omega": zeta_power(12),
        "i": i,
        "sqrt3": sqrt3,
        "zeta18": zeta_power(2),
        "zeta9": zeta_power(4),
        "zeta36": zeta_power(1),
        "sin_pi_9": (zeta_power(2) - zeta_power(-2)) / (2 * i),
        "cos_pi_9": (zeta_power(2) + zeta_power(-2)) / 2,
    }


_CONSTANTS = _named_constants()


def embed(name: str) -> CycNum:
    """Exact representative of a named constant.

    Names: ``omega`` (primitive cube root e^{2 pi i/3}), ``i``, ``sqrt3``,
    ``zeta18`` (= e^{pi i/9}), ``zeta9``, ``zeta36``, ``sin_pi_9``, ``cos_pi_9``.
    """
    try:
        return _CONSTANTS[name]
    except KeyError:
        raise KeyError(f"unknown constant {name!r}; known: {sorted(_CONSTANTS)}") from None


def arith(op: str, a: CycNum, b: CycNum | None = None) -> CycNum:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    raise ValueError(f"unknown operation {op!r}")


def conj(a: CycNum) -> CycNum:
    return a.conj()


_HALF = Fraction(1, 2)


def re_part(a: CycNum) -> CycNum:
    return (a + a.conj()) * CycNum.rational(_HALF)


def im_part(a: CycNum) -> CycNum:
    """Imaginary part as a real field element: (a - conj a) / (2i)."""
    return (a - a.conj()) / (2 * _CONSTANTS["i"])


def abs2(a: CycNum) -> CycNum:
    return a * a.conj()


# -- certified evaluation ------------------------------------------------------


@dataclass(frozen=True)
class ComplexInterval:
    """Rectangle [re_lo, re_hi] x [im_lo, im_hi] with dyadic rational corners."""

    re_lo: Fraction
    re_hi: Fraction
    im_lo: Fraction
    im_hi: Fraction
    bits: int

    def contains(self, w: complex, slack: float = 0.0) -> bool:
        return (
            float(self.re_lo) - slack <= w.real <= float(self.re_hi) + slack
            and float(self.im_lo) - slack <= w.imag <= float(self.im_hi) + slack
        )

    @property
    def width(self) -> Fraction:
        return max(self.re_hi - self.re_lo, self.im_hi - self.im_lo)


def _raw_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    v = Fraction(man) * (Fraction(2) ** exp)
    return -v if sign else v


def _endpoints(x) -> tuple[Fraction, Fraction]:
    lo, hi = x._mpi_
    return _raw_to_fraction(lo), _raw_to_fraction(hi)


@lru_cache(maxsize=64)
def _root_enclosures(bits: int) -> tuple[tuple[Fraction, Fraction, Fraction, Fraction], ...]:
    """Rigorous enclosures of cos and sin of 2*pi*k/36, k = 0..11."""
    out = []
    iv = mpmath.iv
    saved = iv.prec
    iv.prec = bits + 16
    try:
        for k in range(DEGREE):
            theta = iv.mpf(2 * k) * iv.pi / ORDER
            c = iv.cos(theta)
            s = iv.sin(theta)
            out.append(_endpoints(c) + _endpoints(s))
    finally:
        iv.prec = saved
    return tuple(out)


def _scaled(lo: Fraction, hi: Fraction, c: Fraction) -> tuple[Fraction, Fraction]:
    a, b = lo * c, hi * c
    return (a, b) if a <= b else (b, a)


def _round_out(lo: Fraction, hi: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    scale = 1 << bits
    lo_n = (lo.numerator * scale) // lo.denominator
    hi_n = -((-hi.numerator * scale) // hi.denominator)
    return Fraction(lo_n, scale), Fraction(hi_n, scale)


def to_interval(a: CycNum, bits: int = 64) -> ComplexInterval:
    """Enclosure of ``a`` under z -> exp(2 pi i/36) with corners on the 2^-bits grid."""
    if bits < 16:
        raise ValueError("precision must be at least 16 bits")
    encl = _root_enclosures(bits)
    re_lo = re_hi = im_lo = im_hi = Fraction(0)
    for k, n in enumerate(a.num):
        if not n:
            continue
        c = Fraction(n, a.den)
        cl, ch, sl, sh = encl[k]
        lo, hi = _scaled(cl, ch, c)
        re_lo += lo
        re_hi += hi
        lo, hi = _scaled(sl, sh, c)
        im_lo += lo
        im_hi += hi
    re_lo, re_hi = _round_out(re_lo, re_hi, bits)
    im_lo, im_hi = _round_out(im_lo, im_hi, bits)
    return ComplexInterval(re_lo, re_hi, im_lo, im_hi, bits)


_precision = {"start": DEFAULT_SIGN_START_BITS, "max": DEFAULT_SIGN_MAX_BITS}


def set_sign_precision(start_bits: int | None = None, max_bits: int | None = None) -> tuple[int, int]:
    """Change the default refinement schedule of :func:`sign_real`; returns the previous one."""
    old = (_precision["start"], _precision["max"])
    if start_bits is not None:
        if start_bits < 16:
            raise ValueError("precision must be at least 16 bits")
        _precision["start"] = start_bits
    if max_bits is not None:
        _precision["max"] = max_bits
    return old


def sign_real(a: CycNum, start_bits: int | None = None, max_bits: int | None = None) -> int:
    """Exact sign (-1, 0, +1) of a conjugation-fixed element.

    Refines an interval enclosure, doubling the precision from ``start_bits``
    until zero is excluded; exact zero is detected structurally first.
    """
    start_bits = _precision["start"] if start_bits is None else start_bits
    max_bits = _precision["max"] if max_bits is None else max_bits
    if a.conj() != a:
        raise NotRealError(f"{a} is not fixed by complex conjugation")
    if a.is_zero():
        return 0
    if a.is_rational():
        return 1 if a.num[0] > 0 else -1
    bits = start_bits
    while bits <= max_bits:
        box = to_interval(a, bits)
        if box.re_lo > 0:
            return 1
        if box.re_hi < 0:
            return -1
        bits *= 2
    raise PrecisionCapError(f"sign of {a} undecided at {max_bits} bits")


# -- text form -------------------------------------------------------------------


def format_cycnum(a: CycNum) -> str:
    terms = []
    for k in range(DEGREE - 1, -1, -1):
        c = Fraction(a.num[k], a.den)
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            mono = "z" if k == 1 else f"z^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


_TERM = re.compile(r"([+-]?)((?:\d+(?:/\d+)?)?)(\*?)(z(?:\^(\d+))?)?$")


def parse_cycnum(text: str) -> CycNum:
    """Parse a polynomial in ``z`` with rational coefficients (whitespace-insensitive)."""
    s = "".join(text.split())
    if not s:
        raise ValueError("empty CycNum text")
    pieces = re.findall(r"[+-]?[^+-]+", s)
    if "".join(pieces) != s:
        raise ValueError(f"malformed CycNum text: {text!r}")
    poly: dict[int, Fraction] = {}
    for piece in pieces:
        m = _TERM.match(piece)
        if not m or (not m.group(2) and not m.group(4)) or (m.group(3) and not (m.group(2) and m.group(4))):
            raise ValueError(f"malformed term {piece!r} in {text!r}")
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(1) == "-":
            coef = -coef
        k = 0
        if m.group(4):
            k = int(m.group(5)) if m.group(5) else 1
        poly[k] = poly.get(k, Fraction(0)) + coef
    coeffs = [Fraction(0)] * (max(poly) + 1)
    for k, c in poly.items():
        coeffs[k] = c
    return CycNum.from_poly(coeffs)
