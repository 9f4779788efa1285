"""Sparse linear array geometries composed of uniform sub-arrays.

All arrays live on a normalized integer grid (half-wavelength units).  An
array is an ordered concatenation of sub-ULAs, each described by a triple
(initial position, interspace, sensor count).  This module provides the
two closed-form designs built from three and four base-layer sub-ULAs
(``uf3bl`` and ``uf4bl``), the nested and coprime baselines, and the
elementary transforms (shift, dual) used throughout the coarray analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence


class InvalidGeometryError(ValueError):
    """Raised when sub-ULAs overlap or violate an array invariant."""


@dataclass(frozen=True)
class SubUla:
    """A uniform sub-array: ``initial + k * interspace`` for ``k < count``."""

    initial: int
    interspace: int
    count: int

    def __post_init__(self):
        if self.initial < 0:
            raise InvalidGeometryError(f"initial position must be >= 0, got {self.initial}")
        if self.interspace < 1:
            raise InvalidGeometryError(f"interspace must be >= 1, got {self.interspace}")
        if self.count < 1:
            raise InvalidGeometryError(f"sensor count must be >= 1, got {self.count}")

    @property
    def aperture(self) -> int:
        return self.interspace * (self.count - 1)

    @property
    def last(self) -> int:
        """Position of the final sensor."""
        return self.initial + self.aperture

    def positions(self) -> tuple[int, ...]:
        return tuple(self.initial + k * self.interspace for k in range(self.count))

    def prototype(self) -> "SubUla":
        """The same sub-ULA translated so its first sensor sits at 0."""
        return SubUla(0, self.interspace, self.count)


@dataclass(frozen=True)
class SparseArray:
    """An ordered, non-overlapping sequence of sub-ULAs.

    Adjacent sub-ULAs must be separated by a gap of at least one grid
    unit, which guarantees that all sensor positions are distinct.
    Freshly constructed geometries are normalized (first sensor at 0);
    :meth:`shift` may produce denormalized but otherwise valid arrays.
    """

    sub_ulas: tuple[SubUla, ...]

    def __post_init__(self):
        subs = tuple(self.sub_ulas)
        object.__setattr__(self, "sub_ulas", subs)
        if not subs:
            raise InvalidGeometryError("array needs at least one sub-ULA")
        for i in range(len(subs) - 1):
            gap = subs[i + 1].initial - subs[i].last
            if gap < 1:
                raise InvalidGeometryError(
                    f"sub-ULAs {i} and {i + 1} overlap: "
                    f"{subs[i]} ends at {subs[i].last}, {subs[i + 1]} starts at "
                    f"{subs[i + 1].initial}")

    @classmethod
    def from_positions(cls, positions: Iterable[int]) -> "SparseArray":
        """Segment a sorted position set into maximal uniform runs.

        Consecutive positions sharing a common difference are grouped into
        one sub-ULA; the segmentation is greedy left to right, so the
        result is deterministic and never overlapping.
        """
        pos = sorted(set(int(p) for p in positions))
        if not pos:
            raise InvalidGeometryError("empty position set")
        if pos[0] < 0:
            raise InvalidGeometryError("positions must be nonnegative")
        subs = []
        i = 0
        while i < len(pos):
            if i + 1 == len(pos):
                subs.append(SubUla(pos[i], 1, 1))
                break
            step = pos[i + 1] - pos[i]
            j = i + 1
            while j + 1 < len(pos) and pos[j + 1] - pos[j] == step:
                j += 1
            subs.append(SubUla(pos[i], step, j - i + 1))
            i = j + 1
        return cls(tuple(subs))

    @cached_property
    def positions(self) -> tuple[int, ...]:
        out = []
        for sub in self.sub_ulas:
            out.extend(sub.positions())
        return tuple(out)

    @property
    def gaps(self) -> tuple[int, ...]:
        return tuple(self.sub_ulas[i + 1].initial - self.sub_ulas[i].last
                     for i in range(len(self.sub_ulas) - 1))

    @property
    def sensor_count(self) -> int:
        return sum(sub.count for sub in self.sub_ulas)

    @property
    def aperture(self) -> int:
        return self.sub_ulas[-1].last - self.sub_ulas[0].initial

    @property
    def is_normalized(self) -> bool:
        return self.sub_ulas[0].initial == 0

    def shift(self, n: int) -> "SparseArray":
        """Translate every sub-ULA by ``n`` grid units (``n`` may be negative)."""
        if n == 0:
            return self
        if self.sub_ulas[0].initial + n < 0:
            raise InvalidGeometryError(f"shift by {n} moves the array below 0")
        return SparseArray(tuple(
            SubUla(s.initial + n, s.interspace, s.count) for s in self.sub_ulas))


def dual(positions: Sequence[int]) -> tuple[int, ...]:
    """Reflect a position set about its maximum and renormalize to 0.

    The dual array has the same difference coarray (and the same weight
    function) as the original; applying ``dual`` twice is the identity.
    """
    pos = sorted(set(int(p) for p in positions))
    if not pos:
        raise ValueError("empty position set")
    top = pos[-1]
    return tuple(top - p for p in reversed(pos))


def nested(n1: int, n2: int) -> SparseArray:
    """Two-level nested array: a dense inner ULA plus a sparse outer ULA.

    Positions are ``{0, ..., n1 - 1}`` united with
    ``{k * (n1 + 1) - 1 : k = 1..n2}``, giving ``n1 + n2`` distinct sensors.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError(f"nested levels must be positive, got ({n1}, {n2})")
    inner = SubUla(0, 1, n1)
    outer = SubUla(n1, n1 + 1, n2)
    return SparseArray((inner, outer))


def coprime(m: int, n: int) -> SparseArray:
    """Coprime array from the progressions ``m * k`` (k < n) and ``n * k`` (k < 2m).

    The two progressions coincide only at 0, so the array has
    ``2m + n - 1`` distinct sensors.
    """
    if m < 1 or n < 1 or m >= n:
        raise ValueError(f"need 1 <= m < n, got ({m}, {n})")
    if math.gcd(m, n) != 1:
        raise ValueError(f"({m}, {n}) are not coprime")
    pos = set(m * k for k in range(n)) | set(n * k for k in range(2 * m))
    if len(pos) != 2 * m + n - 1:
        raise InvalidGeometryError(
            f"coprime({m}, {n}) produced {len(pos)} positions, "
            f"expected {2 * m + n - 1}")
    return SparseArray.from_positions(pos)


@dataclass(frozen=True)
class DesignParams:
    """Resolved parameters of a three- or four-base-layer design."""

    total_sensors: int
    base_count: int
    transfer_count: int
    transfer_interspace: int


def optimal_params_3bl(n: int) -> DesignParams:
    """Parameter choice maximizing the consecutive coarray of the 3BL design.

    The closed form is ``N_b = (n - 5) // 6`` with ``N_t = n - 3 N_b - 4``
    and ``S_t = 3 N_b + 5``; it matches exhaustive integer maximization of
    ``3 N_b N_t + 5 N_t + 3 N_b - 1`` for every n >= 17.
    """
    if n < 17:
        raise ValueError(f"the 3BL design requires n >= 17, got {n}")
    nb = (n - 5) // 6
    nt = n - 3 * nb - 4
    return DesignParams(n, nb, nt, 3 * nb + 5)


def optimal_params_4bl(n: int) -> DesignParams:
    """Parameter choice maximizing the consecutive coarray of the 4BL design.

    ``N_b = (n - 8) // 8``, ``N_t = n - 4 N_b - 6``, ``S_t = 4 N_b + 7``.
    """
    if n < 32:
        raise ValueError(f"the 4BL design requires n >= 32, got {n}")
    nb = (n - 8) // 8
    nt = n - 4 * nb - 6
    return DesignParams(n, nb, nt, 4 * nb + 7)


def design_j_3bl(params: DesignParams) -> int:
    """Largest consecutive positive lag of the 3BL design."""
    nb, nt = params.base_count, params.transfer_count
    return 3 * nb * nt + 5 * nt + 3 * nb - 1


def design_j_4bl(params: DesignParams) -> int:
    """Largest consecutive positive lag of the 4BL design."""
    nb, nt = params.base_count, params.transfer_count
    return 4 * nb * nt + 7 * nt + 4 * nb + 12


def uf3bl(n: int) -> SparseArray:
    """Closed-form array with a base layer of three interspace-3 sub-ULAs.

    Six sub-ULAs in the order B3, A1, T, B3, A2, B3 with gaps
    ``(4, 2 + 3 N_b, 3, 4, 3)``.  Weights: w(1) = w(2) = 1 and
    w(3) = 3 N_b - 1.  Requires n >= 17.
    """
    p = optimal_params_3bl(n)
    nb, nt = p.base_count, p.transfer_count
    st = p.transfer_interspace
    c = 3 * nt * nb + 5 * nt
    subs = (
        SubUla(0, 3, nb),
        SubUla(3 * nb + 1, 1, 2),
        SubUla(6 * nb + 4, st, nt),
        SubUla(c + 3 * nb + 2, 3, nb),
        SubUla(c + 6 * nb + 3, 2, 2),
        SubUla(c + 6 * nb + 8, 3, nb),
    )
    return SparseArray(subs)


def uf4bl(n: int) -> SparseArray:
    """Closed-form array with a base layer of four interspace-4 sub-ULAs.

    Eight sub-ULAs in the order A3, B4, A1, B4, T, B4, A2, B4 with gaps
    ``(4, 5, 6, 8, 7, 3, 5)``.  Weights: w(1) = w(2) = 1, w(3) = 2,
    w(4) = 4 N_b - 3.  Requires n >= 32.
    """
    p = optimal_params_4bl(n)
    nb, nt = p.base_count, p.transfer_count
    st = p.transfer_interspace
    c = 4 * nt * nb + 7 * nt
    subs = (
        SubUla(0, 3, 2),
        SubUla(7, 4, nb),
        SubUla(4 * nb + 8, 1, 2),
        SubUla(4 * nb + 15, 4, nb),
        SubUla(8 * nb + 19, st, nt),
        SubUla(c + 4 * nb + 19, 4, nb),
        SubUla(c + 8 * nb + 18, 2, 2),
        SubUla(c + 8 * nb + 25, 4, nb),
    )
    return SparseArray(subs)
