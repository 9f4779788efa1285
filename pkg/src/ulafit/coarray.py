"""Lag-polynomial calculus for difference coarrays.

The central object is :class:`LagPolynomial`, an integer-lag to count map
that simultaneously represents a weight function and the coefficient view
of the array polynomial product ``P(x) * P(1/x)``.  On top of it sit the
coarray summary (:func:`report`), the decomposition of a multi-sub-ULA
array into self- and inter-difference coarrays (:func:`decompose`), the
near/transfer/far-end range partition (:func:`partition`), and a bounded
brute-force search for gap assignments meeting the relaxed consecutive-
range design criterion (:func:`search_gaps`).
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .geometry import SparseArray, SubUla


def _as_positions(array) -> tuple[int, ...]:
    if isinstance(array, SparseArray):
        return array.positions
    pos = tuple(sorted(set(int(p) for p in array)))
    if not pos:
        raise ValueError("empty position set")
    return pos


class LagPolynomial(Mapping):
    """Map from signed integer lag to a nonnegative pair count.

    Zero counts are dropped, so iteration and length reflect the support.
    Weight functions of full coarrays are symmetric (``w(n) == w(-n)``);
    a single inter-difference coarray is one-sided.
    """

    __slots__ = ("_counts",)

    def __init__(self, counts: Mapping[int, int] | Iterable[tuple[int, int]]):
        items = counts.items() if isinstance(counts, Mapping) else counts
        store = {}
        for lag, c in items:
            if c < 0:
                raise ValueError(f"negative count {c} at lag {lag}")
            if c:
                store[int(lag)] = int(c)
        self._counts = store

    @classmethod
    def from_differences(cls, positions: Iterable[int]) -> "LagPolynomial":
        """Weight function of a position set: counts of all ordered pairs."""
        pos = np.asarray(sorted(set(int(p) for p in positions)), dtype=np.int64)
        if pos.size == 0:
            raise ValueError("empty position set")
        diffs = (pos[:, None] - pos[None, :]).ravel()
        span = int(pos[-1] - pos[0])
        counts = np.bincount(diffs + span, minlength=2 * span + 1)
        return cls({lag - span: int(c) for lag, c in enumerate(counts) if c})

    def __getitem__(self, lag: int) -> int:
        return self._counts[lag]

    def __iter__(self):
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def weight(self, lag: int) -> int:
        return self._counts.get(lag, 0)

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._counts))

    def positive_support(self) -> frozenset[int]:
        """Lags with nonzero count, folded to absolute values."""
        return frozenset(abs(lag) for lag in self._counts)

    @property
    def is_symmetric(self) -> bool:
        return all(self.weight(-lag) == c for lag, c in self._counts.items())

    def __add__(self, other: "LagPolynomial") -> "LagPolynomial":
        total = Counter(self._counts)
        total.update(other._counts)
        return LagPolynomial(total)

    def __eq__(self, other) -> bool:
        if isinstance(other, LagPolynomial):
            return self._counts == other._counts
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{lag}: {c}" for lag, c in sorted(self._counts.items()))
        return f"LagPolynomial({{{body}}})"


def weight_function(positions) -> LagPolynomial:
    """Number of sensor pairs at every lag (``w(n) = |{(p, q): p - q = n}|``)."""
    return LagPolynomial.from_differences(_as_positions(positions))


@dataclass(frozen=True)
class CoarrayReport:
    """Summary of a difference coarray."""

    dof: int
    udof: int
    j_value: int
    hole_free: bool
    spatial_efficiency: Fraction
    first_weights: tuple[int, int, int, int]


def report(positions) -> CoarrayReport:
    """Coarray summary: DOF, largest consecutive lag J, uDOF = 2J + 1.

    The array is normalized before analysis, so ``hole_free`` and the
    spatial efficiency ``J / aperture`` are shift-invariant.  A single
    sensor yields J = 0, uDOF = 1, and efficiency 1 by convention.
    """
    pos = _as_positions(positions)
    pos = tuple(p - pos[0] for p in pos)
    wf = weight_function(pos)
    lags = set(wf)
    j = 0
    while j + 1 in lags:
        j += 1
    aperture = pos[-1]
    efficiency = Fraction(j, aperture) if aperture else Fraction(1)
    return CoarrayReport(
        dof=len(lags),
        udof=2 * j + 1,
        j_value=j,
        hole_free=(j == aperture),
        spatial_efficiency=efficiency,
        first_weights=tuple(wf.weight(k) for k in range(1, 5)),
    )


def sdca(sub: SubUla) -> LagPolynomial:
    """Self-difference coarray of one sub-ULA.

    ``w(m * S) = N - m`` for m in 0..N-1 (both signs), independent of the
    sub-ULA's initial position.
    """
    counts = {}
    for m in range(sub.count):
        counts[m * sub.interspace] = sub.count - m
        counts[-m * sub.interspace] = sub.count - m
    counts[0] = sub.count
    return LagPolynomial(counts)


def idca(a: SubUla, b: SubUla) -> LagPolynomial:
    """Inter-difference coarray: the multiset ``{q - p : q in b, p in a}``.

    When ``a`` precedes ``b`` all lags are positive and the smallest lag
    equals the gap between the two sub-ULAs.
    """
    counts = Counter()
    for q in b.positions():
        for p in a.positions():
            counts[q - p] += 1
    return LagPolynomial(counts)


@dataclass(frozen=True)
class CoarrayDecomposition:
    """Per-sub-ULA and per-ordered-pair pieces of a difference coarray.

    The coefficient-wise sum of all pieces equals the full weight
    function exactly.
    """

    sdcas: tuple[LagPolynomial, ...]
    idcas: dict[tuple[int, int], LagPolynomial]

    def total(self) -> LagPolynomial:
        out = LagPolynomial({})
        for poly in self.sdcas:
            out = out + poly
        for poly in self.idcas.values():
            out = out + poly
        return out


def decompose(array: SparseArray) -> CoarrayDecomposition:
    """Split the coarray of ``array`` into SDCAs and ordered IDCAs.

    ``idcas[(i, j)]`` holds the differences "sub-ULA j minus sub-ULA i",
    so an n-sub-ULA array yields n SDCAs and n * (n - 1) IDCAs.
    """
    subs = array.sub_ulas
    sdcas = tuple(sdca(sub) for sub in subs)
    idcas = {}
    for i in range(len(subs)):
        for j in range(len(subs)):
            if i != j:
                idcas[(i, j)] = idca(subs[i], subs[j])
    return CoarrayDecomposition(sdcas, idcas)


@dataclass(frozen=True)
class RangePartition:
    """Near-end, transfer, and far-end lag ranges (nonnegative side)."""

    ner: frozenset[int]
    tr: frozenset[int]
    fer: frozenset[int]


def partition(array: SparseArray, transfer_index: int) -> RangePartition:
    """Partition the positive coarray by the transfer sub-ULA.

    ``transfer_index`` is 0-based.  The transfer range collects the
    transfer SDCA and every IDCA involving it; the near-end range holds
    the remaining SDCAs plus IDCAs within the left and right groups; the
    far-end range holds IDCAs crossing from the left group to the right
    group.  The union of the three sets is the full nonnegative lag set.
    """
    subs = array.sub_ulas
    m = transfer_index
    if not 0 <= m < len(subs):
        raise IndexError(f"transfer index {m} out of range for {len(subs)} sub-ULAs")
    ner: set[int] = set()
    tr: set[int] = set()
    fer: set[int] = set()
    for i, sub in enumerate(subs):
        (tr if i == m else ner).update(sdca(sub).positive_support())
    for i in range(len(subs)):
        for j in range(i + 1, len(subs)):
            support = idca(subs[i], subs[j]).positive_support()
            if i == m or j == m:
                tr.update(support)
            elif j < m or i > m:
                ner.update(support)
            else:
                fer.update(support)
    return RangePartition(frozenset(ner), frozenset(tr), frozenset(fer))


def tilde_plus(a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
    """Coefficient-free polynomial sum: the union of two lag sets."""
    return frozenset(a) | frozenset(b)


def tilde_times(a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
    """Coefficient-free polynomial product: the sumset ``{x + y}``."""
    return frozenset(x + y for x in a for y in b)


def lower_bound_udof(n: int) -> int:
    """Design-level lower bound on uDOF for an n-sensor fitted array."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    beta = -1 if n % 2 else 0
    return (n * n + beta) // 2 + 1


class SearchBudgetExceededError(RuntimeError):
    """The bounded gap enumeration would exceed the configured node budget."""


_MAX_SUBS = 8
_MAX_GAP = 16


def search_gaps(prototypes: Sequence[tuple[int, int]], transfer_index: int,
                max_gap: int, node_budget: int = 10_000_000) -> list[tuple[int, ...]]:
    """Enumerate gap tuples meeting the relaxed consecutive-range criterion.

    ``prototypes`` lists (interspace, count) for each sub-ULA in sequence
    order.  A gap assignment ``g in [1, max_gap]^(k-1)`` is feasible when
    the resulting array's consecutive lag range covers ``[0, AP_t]``,
    where ``AP_t`` is the aperture of the transfer sub-ULA.  Results are
    returned in lexicographic order.

    Raises:
        SearchBudgetExceededError: when ``max_gap ** (k - 1)`` exceeds
            ``node_budget``.
        ValueError: for instances beyond the supported size (more than
            8 sub-ULAs or ``max_gap`` > 16).
    """
    protos = [(int(s), int(c)) for s, c in prototypes]
    if len(protos) < 2:
        raise ValueError("need at least two sub-ULAs")
    if len(protos) > _MAX_SUBS:
        raise ValueError(f"at most {_MAX_SUBS} sub-ULAs supported, got {len(protos)}")
    if not 1 <= max_gap <= _MAX_GAP:
        raise ValueError(f"max_gap must be in [1, {_MAX_GAP}], got {max_gap}")
    if not 0 <= transfer_index < len(protos):
        raise IndexError(f"transfer index {transfer_index} out of range")
    for s, c in protos:
        if s < 1 or c < 1:
            raise ValueError(f"invalid prototype ({s}, {c})")
    n_gaps = len(protos) - 1
    total = max_gap ** n_gaps
    if total > node_budget:
        raise SearchBudgetExceededError(
            f"{total} gap assignments exceed the node budget of {node_budget}")
    inter = np.array([s for s, _ in protos], dtype=np.int64)
    cnt = np.array([c for _, c in protos], dtype=np.int64)
    st, nt = protos[transfer_index]
    ap_t = st * (nt - 1)
    hits = _gap_search_kernel(inter, cnt, ap_t, max_gap, n_gaps)
    results = []
    for t in hits:
        gaps = []
        rem = int(t)
        for _ in range(n_gaps):
            gaps.append(rem % max_gap + 1)
            rem //= max_gap
        results.append(tuple(reversed(gaps)))
    return results


def _gap_search_py(inter, cnt, ap_t, max_gap, n_gaps):
    # Reference implementation; replaced by the numba-compiled version
    # below when numba is importable.
    n_subs = inter.size
    n = int(cnt.sum())
    pos = np.empty(n, np.int64)
    stamp = np.full(max(ap_t + 1, 1), -1, np.int64)
    gaps = np.empty(max(n_gaps, 1), np.int64)
    total = max_gap ** n_gaps
    out = np.empty(64, np.int64)
    n_out = 0
    for t in range(total):
        rem = t
        for j in range(n_gaps - 1, -1, -1):
            gaps[j] = rem % max_gap + 1
            rem //= max_gap
        off = 0
        idx = 0
        for s in range(n_subs):
            for k in range(cnt[s]):
                pos[idx] = off + k * inter[s]
                idx += 1
            off += inter[s] * (cnt[s] - 1)
            if s < n_gaps:
                off += gaps[s]
        for i in range(n):
            pi = pos[i]
            for j in range(i + 1, n):
                d = pos[j] - pi
                if d <= ap_t:
                    stamp[d] = t
        ok = True
        for lag in range(1, ap_t + 1):
            if stamp[lag] != t:
                ok = False
                break
        if ok:
            if n_out == out.size:
                grown = np.empty(out.size * 2, np.int64)
                grown[:n_out] = out[:n_out]
                out = grown
            out[n_out] = t
            n_out += 1
    return out[:n_out]


try:
    from numba import njit

    _gap_search_kernel = njit(cache=True)(_gap_search_py)
except ImportError:  # pragma: no cover
    _gap_search_kernel = _gap_search_py
