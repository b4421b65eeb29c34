"""Exact arithmetic and ordering in the real quadratic fields Q(sqrt(2)) and Q(sqrt(3))."""

import re
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import total_ordering
from math import gcd, isqrt, lcm
from typing import Dict, Optional, Tuple, Union

SUPPORTED_DISCRIMINANTS = (2, 3)
MAX_DIGITS = 50

Number = Union["QuadRat", int, Fraction]


class FieldMismatchError(ValueError):
    """Numbers from different quadratic fields were combined."""


def _floor_root_multiple(q: int, d: int) -> int:
    """floor(q * sqrt(d)) for an integer q and a non-square d."""
    if q >= 0:
        return isqrt(q * q * d)
    return -isqrt(q * q * d) - 1


@total_ordering
class QuadRat:
    """The real number (p + q*sqrt(d))/r, always held in canonical form.

    Canonical form means r >= 1 and gcd(|p|, |q|, r) = 1, so two values are
    equal exactly when their fields are identical. Zero is (0, 0, 1).
    """

    __slots__ = ("p", "q", "r", "d")

    def __init__(self, p: int = 0, q: int = 0, r: int = 1, d: int = 2):
        if d not in SUPPORTED_DISCRIMINANTS:
            raise ValueError(
                f"Discriminant {d} is not supported. "
                f"Use one of {SUPPORTED_DISCRIMINANTS}."
            )
        p, q, r = int(p), int(q), int(r)
        if r == 0:
            raise ZeroDivisionError("QuadRat denominator must be nonzero.")
        if r < 0:
            p, q, r = -p, -q, -r
        g = gcd(gcd(p, q), r)
        if g > 1:
            p, q, r = p // g, q // g, r // g
        self.p = p
        self.q = q
        self.r = r
        self.d = d

    @classmethod
    def _new(cls, p: int, q: int, r: int, d: int) -> "QuadRat":
        # Internal constructor: python ints, r != 0, d already validated.
        if r < 0:
            p, q, r = -p, -q, -r
        g = gcd(gcd(p, q), r)
        if g > 1:
            p, q, r = p // g, q // g, r // g
        obj = object.__new__(cls)
        obj.p = p
        obj.q = q
        obj.r = r
        obj.d = d
        return obj

    @classmethod
    def from_fraction(cls, value: Union[int, Fraction], d: int) -> "QuadRat":
        value = Fraction(value)
        return cls(value.numerator, 0, value.denominator, d)

    @classmethod
    def root(cls, d: int) -> "QuadRat":
        """sqrt(d) itself."""
        return cls(0, 1, 1, d)

    @classmethod
    def from_dict(cls, entries: Dict[str, int]) -> "QuadRat":
        return cls(entries["p"], entries["q"], entries["r"], entries["d"])

    def to_dict(self) -> Dict[str, int]:
        return {"p": self.p, "q": self.q, "r": self.r, "d": self.d}

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return self.p, self.q, self.r, self.d

    # Coercion
    def _coerce(self, other) -> Optional["QuadRat"]:
        if isinstance(other, QuadRat):
            if other.d != self.d:
                raise FieldMismatchError(
                    f"Cannot combine Q(sqrt({self.d})) with Q(sqrt({other.d}))."
                )
            return other
        if isinstance(other, int):
            return QuadRat._new(other, 0, 1, self.d)
        if isinstance(other, Fraction):
            return QuadRat._new(other.numerator, 0, other.denominator, self.d)
        return None

    # Field operations
    def __add__(self, other: Number) -> "QuadRat":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.r == other.r:
            return QuadRat._new(self.p + other.p, self.q + other.q, self.r, self.d)
        return QuadRat._new(
            self.p * other.r + other.p * self.r,
            self.q * other.r + other.q * self.r,
            self.r * other.r,
            self.d,
        )

    __radd__ = __add__

    def __neg__(self) -> "QuadRat":
        return QuadRat._new(-self.p, -self.q, self.r, self.d)

    def __pos__(self) -> "QuadRat":
        return self

    def __sub__(self, other: Number) -> "QuadRat":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Number) -> "QuadRat":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: Number) -> "QuadRat":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QuadRat._new(
            self.p * other.p + self.d * self.q * other.q,
            self.p * other.q + self.q * other.p,
            self.r * other.r,
            self.d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadRat":
        """1/x = r(p - q sqrt d)/(p^2 - d q^2)."""
        if not self:
            raise ZeroDivisionError("QuadRat division by zero.")
        return QuadRat._new(
            self.r * self.p,
            -self.r * self.q,
            self.p * self.p - self.d * self.q * self.q,
            self.d,
        )

    def __truediv__(self, other: Number) -> "QuadRat":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: Number) -> "QuadRat":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "QuadRat":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** -exponent
        result = QuadRat._new(1, 0, 1, self.d)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate(self) -> "QuadRat":
        """Galois conjugate sqrt(d) -> -sqrt(d)."""
        return QuadRat._new(self.p, -self.q, self.r, self.d)

    # Predicates and ordering
    def sign(self) -> int:
        """Exact sign of p + q*sqrt(d) using integer comparisons only."""
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        if p >= 0 and q > 0:
            return 1
        if p <= 0 and q < 0:
            return -1
        # p and q have opposite signs: compare p^2 against d q^2.
        if p > 0:
            return 1 if p * p > self.d * q * q else -1
        return 1 if self.d * q * q > p * p else -1

    def __bool__(self) -> bool:
        return self.p != 0 or self.q != 0

    def __abs__(self) -> "QuadRat":
        return -self if self.sign() < 0 else self

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadRat):
            return (
                self.p == other.p
                and self.q == other.q
                and self.r == other.r
                and self.d == other.d
            )
        if isinstance(other, int):
            return self.q == 0 and self.r == 1 and self.p == other
        if isinstance(other, Fraction):
            return (
                self.q == 0
                and self.p == other.numerator
                and self.r == other.denominator
            )
        return NotImplemented

    def __hash__(self) -> int:
        if self.q == 0:
            return hash(Fraction(self.p, self.r))
        return hash((self.p, self.q, self.r, self.d))

    def __lt__(self, other: Number) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).sign() < 0

    @property
    def is_integral(self) -> bool:
        """True for algebraic integers; Z[sqrt(d)] is the full ring for d = 2, 3."""
        return self.r == 1

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    # Conversion
    def to_decimal(self, digits: int) -> str:
        """Decimal expansion rounded half away from zero at the last digit."""
        if not 0 <= digits <= MAX_DIGITS:
            raise ValueError(f"digits must lie in [0, {MAX_DIGITS}], got {digits}.")
        negative = self.sign() < 0
        p, q = (-self.p, -self.q) if negative else (self.p, self.q)
        scale = 2 * 10**digits
        # floor(2 * 10^digits * |x|); exact since q*sqrt(d) is irrational or 0.
        twice = (scale * p + _floor_root_multiple(scale * q, self.d)) // self.r
        rounded = (twice + 1) // 2
        whole, frac = divmod(rounded, 10**digits)
        sign = "-" if negative and rounded else ""
        if digits == 0:
            return f"{sign}{whole}"
        return f"{sign}{whole}.{frac:0{digits}d}"

    def __float__(self) -> float:
        if self.q == 0:
            return self.p / self.r
        # Enough working digits to survive cancellation between p and q*sqrt(d).
        precision = 30 + len(str(abs(self.p))) + len(str(abs(self.q))) + len(str(self.r))
        with localcontext() as ctx:
            ctx.prec = precision
            value = (Decimal(self.p) + Decimal(self.q) * Decimal(self.d).sqrt()) / Decimal(
                self.r
            )
        return float(value)

    # Text forms
    def __str__(self) -> str:
        if self.q == 0:
            return f"{self.p}" if self.r == 1 else f"{self.p}/{self.r}"
        root = f"{self.q}*sqrt({self.d})"
        body = root if self.p == 0 else f"{self.p}{self.q:+d}*sqrt({self.d})"
        if self.r == 1:
            return body
        return f"({body})/{self.r}"

    def __repr__(self) -> str:
        return f"QuadRat({self.p}, {self.q}, {self.r}, d={self.d})"

    def pretty(self) -> str:
        """Human-readable form as printed in tables, e.g. '32 - 16√2'."""
        if self.q == 0:
            return str(self)
        sign = "-" if self.q < 0 else "+"
        magnitude = "" if abs(self.q) == 1 else str(abs(self.q))
        body = f"{self.p} {sign} {magnitude}√{self.d}"
        if self.p == 0:
            body = f"{'-' if self.q < 0 else ''}{magnitude}√{self.d}"
        return body if self.r == 1 else f"({body})/{self.r}"

    @classmethod
    def parse(cls, text: str, d: Optional[int] = None) -> "QuadRat":
        """Parse 'p', 'p/r', 'q*sqrt(d)', 'p+q*sqrt(d)', '(p+q*sqrt(d))/r' and
        per-term denominators such as '-4+16*sqrt(3)/3'.

        :param text: the number to parse.
        :param d: the expected discriminant. Required if the text is rational.
        """
        cleaned = text.strip().replace(" ", "").replace("−", "-").replace("√", "sqrt")
        cleaned = re.sub(r"sqrt(\d)", r"sqrt(\1)", cleaned)
        denominator = 1
        outer = re.fullmatch(r"\(?(.+)\)/(\d+)", cleaned)
        # '-4+16*sqrt(3)/3' also ends in ')/3'; only a balanced body is an outer quotient.
        if outer is not None and outer.group(1).count("(") == outer.group(1).count(")"):
            cleaned, denominator = outer.group(1), int(outer.group(2))
        rational, irrational = Fraction(0), Fraction(0)
        found_d = None
        terms = re.findall(r"[+-]?[^+-]+", cleaned)
        if not terms or "".join(terms) != cleaned:
            raise ValueError(f"Cannot parse {text!r} as (p+q*sqrt(d))/r.")
        for term in terms:
            match = re.fullmatch(r"([+-]?)(\d*)(\*?sqrt\((\d+)\))?(?:/(\d+))?", term)
            if match is None or not (match.group(2) or match.group(3)):
                raise ValueError(f"Cannot parse {text!r} as (p+q*sqrt(d))/r.")
            value = Fraction(int(match.group(2) or "1"), int(match.group(5) or "1"))
            if match.group(1) == "-":
                value = -value
            if match.group(3):
                term_d = int(match.group(4))
                if found_d is not None and term_d != found_d:
                    raise FieldMismatchError(f"Mixed square roots in {text!r}.")
                found_d = term_d
                irrational += value
            else:
                rational += value
        if found_d is not None and d is not None and found_d != d:
            raise FieldMismatchError(f"{text!r} is not in Q(sqrt({d})).")
        field = found_d if found_d is not None else d
        if field is None:
            raise ValueError(f"No discriminant given for rational value {text!r}.")
        common = lcm(rational.denominator, irrational.denominator)
        return cls(
            rational.numerator * (common // rational.denominator),
            irrational.numerator * (common // irrational.denominator),
            common * denominator,
            field,
        )


def arith(a: QuadRat, b: QuadRat, op: str) -> QuadRat:
    """Field operation by name: one of add, sub, mul, div."""
    if a.d != b.d:
        raise FieldMismatchError(f"Cannot combine Q(sqrt({a.d})) with Q(sqrt({b.d})).")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"Unknown field operation {op!r}.")


def sign(a: QuadRat) -> int:
    return a.sign()


def compare(a: QuadRat, b: QuadRat) -> int:
    return (a - b).sign()


def to_float(a: QuadRat, digits: int) -> Tuple[str, float]:
    """Decimal string with `digits` places and the nearest binary float."""
    text = a.to_decimal(digits)
    return text, float(a)
