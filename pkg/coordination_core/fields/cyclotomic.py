"""The cyclotomic integers Z[xi_8] and Z[xi_12], their star map and embeddings.

Elements are stored by their coordinates in the power basis 1, xi, xi^2, xi^3,
which is a Z-basis of both rings since phi(8) = phi(12) = 4.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import numpy as np

from coordination_core.fields.quadfield import FieldMismatchError, QuadRat

Coords = Tuple[int, int, int, int]

# Bulk orbit keys pack four coordinates into one int64, 15 bits each.
_KEY_BITS = 15
_KEY_OFFSET = 1 << (_KEY_BITS - 1)


class Space(Enum):
    PHYSICAL = "physical"
    INTERNAL = "internal"


class RingMismatchError(ValueError):
    """Elements of Z[xi_8] and Z[xi_12] were combined."""


@dataclass(frozen=True)
class Ring:
    """Constants of one ring.

    :param n: order of the root of unity xi.
    :param d: discriminant of the real subfield Q(xi + 1/xi) = Q(sqrt(d)).
    :param star_power: the star map sends xi to xi**star_power.
    :param reduction: xi^4 as coordinates in the power basis.
    :param embedding: per basis element, numerators (x_p, x_q, y_p, y_q) of
        its physical image ((x_p + x_q sqrt d)/2, (y_p + y_q sqrt d)/2).
    :param inner: basis indices entering the internal x and y coordinates
        with coefficient +-1 and not entering the other internal coordinate.
    :param outer: the remaining two basis indices.
    """

    n: int
    d: int
    star_power: int
    reduction: Coords
    embedding: Tuple[Tuple[int, int, int, int], ...]
    inner: Tuple[int, int]
    outer: Tuple[int, int]


RINGS = {
    8: Ring(
        n=8,
        d=2,
        star_power=3,
        reduction=(-1, 0, 0, 0),  # xi^4 = -1
        embedding=((2, 0, 0, 0), (0, 1, 0, 1), (0, 0, 2, 0), (0, -1, 0, 1)),
        inner=(0, 2),
        outer=(1, 3),
    ),
    12: Ring(
        n=12,
        d=3,
        star_power=5,
        reduction=(-1, 0, 1, 0),  # xi^4 = xi^2 - 1
        embedding=((2, 0, 0, 0), (0, 1, 1, 0), (1, 0, 0, 1), (0, 0, 2, 0)),
        inner=(0, 3),
        outer=(1, 2),
    ),
}


def get_ring(n: int) -> Ring:
    try:
        return RINGS[n]
    except KeyError:
        raise ValueError(f"Only Z[xi_8] and Z[xi_12] are supported, not n={n}.") from None


def _multiply(u: Coords, v: Coords, reduction: Coords) -> Coords:
    product = [0] * 7
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                if b:
                    product[i + j] += a * b
    for degree in (6, 5, 4):
        c = product[degree]
        if c:
            product[degree] = 0
            for k, coefficient in enumerate(reduction):
                if coefficient:
                    product[degree - 4 + k] += c * coefficient
    return product[0], product[1], product[2], product[3]


def _apply(columns: Tuple[Coords, ...], coords: Coords) -> Coords:
    """Apply the linear map whose basis images are `columns`."""
    r0 = r1 = r2 = r3 = 0
    for a, column in zip(coords, columns):
        if a:
            r0 += a * column[0]
            r1 += a * column[1]
            r2 += a * column[2]
            r3 += a * column[3]
    return r0, r1, r2, r3


@lru_cache(maxsize=None)
def _powers(n: int) -> Tuple[Coords, ...]:
    ring = get_ring(n)
    xi = (0, 1, 0, 0)
    powers = [(1, 0, 0, 0)]
    for _ in range(n - 1):
        powers.append(_multiply(powers[-1], xi, ring.reduction))
    return tuple(powers)


@lru_cache(maxsize=None)
def _star_columns(n: int) -> Tuple[Coords, ...]:
    powers = _powers(n)
    m = get_ring(n).star_power
    return tuple(powers[(m * j) % n] for j in range(4))


@lru_cache(maxsize=None)
def _conjugate_columns(n: int) -> Tuple[Coords, ...]:
    powers = _powers(n)
    return tuple(powers[(-j) % n] for j in range(4))


@lru_cache(maxsize=None)
def _rotation_columns(n: int) -> Tuple[Coords, ...]:
    powers = _powers(n)
    return tuple(powers[j + 1] for j in range(4))


@lru_cache(maxsize=None)
def _embedding_table(n: int, space: Space) -> Tuple[Tuple[int, int, int, int], ...]:
    ring = get_ring(n)
    if space is Space.PHYSICAL:
        return ring.embedding
    table = []
    for column in _star_columns(n):
        table.append(tuple(sum(c * row[k] for c, row in zip(column, ring.embedding)) for k in range(4)))
    return tuple(table)


@lru_cache(maxsize=None)
def float_embedding_matrix(n: int) -> np.ndarray:
    """4x4 matrix mapping coordinates to (x, y, x*, y*) in floating point."""
    ring = get_ring(n)
    root = np.sqrt(ring.d)
    rows = np.zeros((4, 4))
    for offset, space in enumerate((Space.PHYSICAL, Space.INTERNAL)):
        for j, (xp, xq, yp, yq) in enumerate(_embedding_table(n, space)):
            rows[2 * offset, j] = (xp + xq * root) / 2
            rows[2 * offset + 1, j] = (yp + yq * root) / 2
    return rows


class PlanePoint:
    """A point of the physical or internal plane with exact coordinates."""

    __slots__ = ("x", "y")

    def __init__(self, x: QuadRat, y: QuadRat):
        if x.d != y.d:
            raise FieldMismatchError("PlanePoint coordinates must share one field.")
        self.x = x
        self.y = y

    @classmethod
    def rational(cls, x: Union[int, Fraction], y: Union[int, Fraction], d: int) -> "PlanePoint":
        return cls(QuadRat.from_fraction(x, d), QuadRat.from_fraction(y, d))

    @classmethod
    def origin(cls, d: int) -> "PlanePoint":
        return cls(QuadRat(0, 0, 1, d), QuadRat(0, 0, 1, d))

    @property
    def d(self) -> int:
        return self.x.d

    def __add__(self, other: "PlanePoint") -> "PlanePoint":
        return PlanePoint(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "PlanePoint") -> "PlanePoint":
        return PlanePoint(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "PlanePoint":
        return PlanePoint(-self.x, -self.y)

    def scale(self, factor: Union[QuadRat, int]) -> "PlanePoint":
        return PlanePoint(self.x * factor, self.y * factor)

    def dot(self, other: "PlanePoint") -> QuadRat:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "PlanePoint") -> QuadRat:
        return self.x * other.y - self.y * other.x

    def norm_sq(self) -> QuadRat:
        return self.dot(self)

    def key(self) -> Tuple[int, ...]:
        """Total order on canonical forms (not on values); used for deduplication."""
        return (self.x.p, self.x.q, self.x.r, self.y.p, self.y.q, self.y.r)

    def to_floats(self) -> Tuple[float, float]:
        return float(self.x), float(self.y)

    def to_list(self) -> List[List[int]]:
        return [list(self.x.as_tuple()), list(self.y.as_tuple())]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlanePoint):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self) -> int:
        return hash((self.x, self.y))

    def __repr__(self) -> str:
        return f"PlanePoint({self.x}, {self.y})"


class CycloInt:
    """a0 + a1 xi + a2 xi^2 + a3 xi^3 in Z[xi_n]."""

    __slots__ = ("coords", "n")

    def __init__(self, coords: Sequence[int], n: int = 8):
        get_ring(n)
        coords = tuple(int(c) for c in coords)
        if len(coords) != 4:
            raise ValueError(f"A CycloInt has 4 coordinates, got {len(coords)}.")
        self.coords = coords
        self.n = n

    @classmethod
    def _new(cls, coords: Coords, n: int) -> "CycloInt":
        obj = object.__new__(cls)
        obj.coords = coords
        obj.n = n
        return obj

    @classmethod
    def zero(cls, n: int) -> "CycloInt":
        return cls((0, 0, 0, 0), n)

    @classmethod
    def from_int(cls, value: int, n: int) -> "CycloInt":
        return cls((value, 0, 0, 0), n)

    @classmethod
    def xi_power(cls, j: int, n: int) -> "CycloInt":
        return cls._new(_powers(n)[j % n], n)

    @classmethod
    def parse(cls, text: str, n: int) -> "CycloInt":
        """Parse comma separated power-basis coordinates, e.g. '2,-1,0,1'."""
        parts = [part for part in text.replace(" ", "").split(",") if part]
        if len(parts) != 4:
            raise ValueError(f"Expected 4 comma separated coordinates, got {text!r}.")
        return cls([int(part) for part in parts], n)

    @property
    def ring(self) -> Ring:
        return RINGS[self.n]

    def _check(self, other: "CycloInt"):
        if other.n != self.n:
            raise RingMismatchError(f"Cannot combine Z[xi_{self.n}] with Z[xi_{other.n}].")

    def __add__(self, other: "CycloInt") -> "CycloInt":
        if not isinstance(other, CycloInt):
            return NotImplemented
        self._check(other)
        a, b = self.coords, other.coords
        return CycloInt._new((a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]), self.n)

    def __sub__(self, other: "CycloInt") -> "CycloInt":
        if not isinstance(other, CycloInt):
            return NotImplemented
        self._check(other)
        a, b = self.coords, other.coords
        return CycloInt._new((a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]), self.n)

    def __neg__(self) -> "CycloInt":
        a = self.coords
        return CycloInt._new((-a[0], -a[1], -a[2], -a[3]), self.n)

    def __mul__(self, other: Union["CycloInt", int]) -> "CycloInt":
        if isinstance(other, int):
            return CycloInt._new(tuple(other * a for a in self.coords), self.n)
        if not isinstance(other, CycloInt):
            return NotImplemented
        self._check(other)
        return CycloInt._new(_multiply(self.coords, other.coords, self.ring.reduction), self.n)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycloInt):
            return NotImplemented
        return self.n == other.n and self.coords == other.coords

    def __hash__(self) -> int:
        return hash((self.coords, self.n))

    def __bool__(self) -> bool:
        return any(self.coords)

    def __repr__(self) -> str:
        return f"CycloInt({list(self.coords)}, n={self.n})"

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.coords)

    def star(self) -> "CycloInt":
        """Algebraic conjugation xi -> xi^3 (n=8) or xi -> xi^5 (n=12)."""
        return CycloInt._new(_apply(_star_columns(self.n), self.coords), self.n)

    def conjugate(self) -> "CycloInt":
        """Complex conjugation xi -> 1/xi."""
        return CycloInt._new(_apply(_conjugate_columns(self.n), self.coords), self.n)

    def rotate(self, steps: int = 1) -> "CycloInt":
        """Multiply by xi**steps."""
        coords = self.coords
        columns = _rotation_columns(self.n)
        for _ in range(steps % self.n):
            coords = _apply(columns, coords)
        return CycloInt._new(coords, self.n)

    def embed(self, space: Space = Space.PHYSICAL) -> PlanePoint:
        d = self.ring.d
        xp = xq = yp = yq = 0
        for a, (bxp, bxq, byp, byq) in zip(self.coords, _embedding_table(self.n, space)):
            if a:
                xp += a * bxp
                xq += a * bxq
                yp += a * byp
                yq += a * byq
        return PlanePoint(QuadRat._new(xp, xq, 2, d), QuadRat._new(yp, yq, 2, d))

    def embed_floats(self) -> Tuple[float, float, float, float]:
        """(x, y, x*, y*) in floating point, for pre-classification only."""
        matrix = float_embedding_matrix(self.n)
        a0, a1, a2, a3 = self.coords
        return tuple(
            float(row[0] * a0 + row[1] * a1 + row[2] * a2 + row[3] * a3) for row in matrix
        )

    def norm_sq(self) -> QuadRat:
        """|z|^2 = z * conj(z); an element of Z[sqrt d]."""
        return self.embed(Space.PHYSICAL).norm_sq()

    def l1_norm(self) -> int:
        """Sum of absolute coordinates; the edge-step count on the Ammann-Beenker tiling."""
        if self.n != 8:
            raise ValueError(
                "The L1 step count is only meaningful on Z[xi_8], where the four "
                "edge directions form a Z-basis."
            )
        return sum(abs(a) for a in self.coords)

    def orbit(self) -> List["CycloInt"]:
        """Images under the dihedral group generated by xi and complex conjugation."""
        images = []
        rotation = _rotation_columns(self.n)
        conjugation = _conjugate_columns(self.n)
        coords = self.coords
        for _ in range(self.n):
            images.append(CycloInt._new(coords, self.n))
            images.append(CycloInt._new(_apply(conjugation, coords), self.n))
            coords = _apply(rotation, coords)
        return images

    def orbit_representative(self) -> "CycloInt":
        """Lexicographically smallest coordinate tuple over the dihedral orbit."""
        return CycloInt._new(min(image.coords for image in self.orbit()), self.n)


def ring_op(u: CycloInt, v: CycloInt, op: str) -> CycloInt:
    """Ring operation by name: one of add, sub, mul, neg (neg ignores v)."""
    if op == "neg":
        return -u
    if u.n != v.n:
        raise RingMismatchError(f"Cannot combine Z[xi_{u.n}] with Z[xi_{v.n}].")
    if op == "add":
        return u + v
    if op == "sub":
        return u - v
    if op == "mul":
        return u * v
    raise ValueError(f"Unknown ring operation {op!r}.")


def star(z: CycloInt) -> CycloInt:
    return z.star()


def embed(z: CycloInt, space: Space = Space.PHYSICAL) -> PlanePoint:
    return z.embed(space)


def norm_sq(z: CycloInt) -> QuadRat:
    return z.norm_sq()


def l1_norm(z: CycloInt) -> int:
    return z.l1_norm()


def _linear_map_matrix(columns: Tuple[Coords, ...]) -> np.ndarray:
    return np.array(columns, dtype=np.int64).T


def encode_keys(coords: np.ndarray) -> np.ndarray:
    """Pack an (N, 4) integer array into order-preserving int64 keys."""
    if coords.size and np.abs(coords).max() >= _KEY_OFFSET:
        raise ValueError("Coordinates too large to pack into orbit keys.")
    shifted = coords.astype(np.int64) + _KEY_OFFSET
    keys = np.zeros(coords.shape[0], dtype=np.int64)
    for column in range(4):
        keys = (keys << _KEY_BITS) | shifted[:, column]
    return keys


def decode_key(key: int) -> Coords:
    mask = (1 << _KEY_BITS) - 1
    key = int(key)
    return tuple(((key >> (_KEY_BITS * (3 - k))) & mask) - _KEY_OFFSET for k in range(4))


def orbit_keys(coords: np.ndarray, n: int) -> np.ndarray:
    """Key of the orbit representative of every row of an (N, 4) coordinate array.

    Agrees with CycloInt.orbit_representative: decode_key(key) gives its coordinates.
    """
    rotation = _linear_map_matrix(_rotation_columns(n))
    conjugation = _linear_map_matrix(_conjugate_columns(n))
    current = coords.astype(np.int64)
    best = encode_keys(current)
    for step in range(n):
        if step:
            best = np.minimum(best, encode_keys(current))
        best = np.minimum(best, encode_keys(current @ conjugation.T))
        current = current @ rotation.T
    return best
