"""Return-time distributions, their supports, profiles, and correlation sums.

The normalized l-th return-time distribution d_l' is computed exactly by the
three-branch recursion on l (base cases l = 0, 1), with masses shifted by
amounts linear in the tower height h_k.  Support endpoints follow their own
recursion so that membership queries never materialize masses.  The centered
step-function profile of d_l' lives on the half-integer grid and is the
object the L1 estimates are about.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import tower
from .triadic import DomainError, TriadicSet

DEFAULT_MAX_L = 3 ** 12
DEFAULT_MAX_N = 3 ** 14


class SizeError(RuntimeError):
    """A requested index exceeds the configured resource cap."""


# ---------------------------------------------------------------------------
# balanced ternary

def balanced_ternary(l: int) -> tuple[int, ...]:
    """Digits a_i in {-1, 0, +1} with l = sum a_i * 3^i, low order first."""
    if l < 0:
        raise DomainError(f"l = {l} < 0")
    digits = []
    while l:
        r = (l + 1) % 3 - 1
        digits.append(r)
        l = (l - r) // 3
    return tuple(digits)


def compute_bl(l: int) -> int:
    """Support size b_l = 1 + sum |a_i| over the balanced ternary digits of l."""
    return 1 + sum(abs(d) for d in balanced_ternary(l))


# ---------------------------------------------------------------------------
# supports

class SupportIndex:
    """Monotone tables of support endpoints (s_l, t_l) for one stage k."""

    def __init__(self, k: int):
        self.k = k
        self.h = tower.height(k)
        self.s: list[int] = [0, self.h]
        self.t: list[int] = [0, self.h + 1]

    def ensure(self, l_max: int) -> None:
        h = self.h
        s, t = self.s, self.t
        for m in range(len(s), l_max + 1):
            q, r = divmod(m, 3)
            if r == 0:
                s.append(s[q] + 2 * q * h + q)
                t.append(t[q] + 2 * q * h + q)
            elif r == 1:
                s.append(min(s[q] + (2 * q + 1) * h + q, s[q + 1] + 2 * q * h + q))
                t.append(max(t[q] + (2 * q + 1) * h + q + 1, t[q + 1] + 2 * q * h + q))
            else:
                s.append(min(s[q] + (2 * q + 2) * h + q + 1, s[q + 1] + (2 * q + 1) * h + q))
                t.append(max(t[q] + (2 * q + 2) * h + q + 1, t[q + 1] + (2 * q + 1) * h + q + 1))

    def ensure_covering(self, n: int) -> None:
        """Grow the tables until s_l overtakes n."""
        while self.s[-1] <= n:
            self.ensure(2 * len(self.s))

    def bounds(self, l: int) -> tuple[int, int]:
        self.ensure(l)
        return self.s[l], self.t[l]


_support_indices: dict[int, SupportIndex] = {}


def support_index(k: int) -> SupportIndex:
    if k not in _support_indices:
        _support_indices[k] = SupportIndex(k)
    return _support_indices[k]


def support(k: int, l: int) -> tuple[int, int]:
    """Support interval [s_l, t_l] of d_l at stage k, via the endpoint recursion."""
    return support_index(k).bounds(l)


def find_Pn(k: int, n: int) -> list[int]:
    """All l with d_l(n) > 0.  The set is a contiguous run of indices."""
    if n < 0:
        raise DomainError(f"n = {n} < 0")
    idx = support_index(k)
    idx.ensure_covering(n)
    hi = bisect_right(idx.s, n) - 1
    lo = bisect_left(idx.t, n)
    return list(range(lo, hi + 1))


# ---------------------------------------------------------------------------
# mass recursion

@dataclass(frozen=True)
class ReturnDistribution:
    """Exact masses of the normalized distribution d_l' on [start, start+len-1].

    The un-normalized d_l is (2 / 3^(k+1)) times this.  All masses are
    positive; they sum to 1.
    """

    k: int
    l: int
    start: int
    masses: tuple[Fraction, ...]

    @property
    def end(self) -> int:
        return self.start + len(self.masses) - 1

    @property
    def support_size(self) -> int:
        return len(self.masses)

    def mass(self, n: int) -> Fraction:
        if self.start <= n <= self.end:
            return self.masses[n - self.start]
        return Fraction(0)

    def total(self) -> Fraction:
        return sum(self.masses, Fraction(0))


_dl_cache: dict[tuple[int, int], ReturnDistribution] = {}


def compute_dl(k: int, l: int, max_l: int = DEFAULT_MAX_L) -> ReturnDistribution:
    """d_l' at stage k by the memoized three-branch recursion."""
    if l < 0:
        raise DomainError(f"l = {l} < 0")
    if l > max_l:
        raise SizeError(f"l = {l} exceeds cap {max_l}")
    key = (k, l)
    if key in _dl_cache:
        return _dl_cache[key]
    h = tower.height(k)
    half = Fraction(1, 2)
    if l == 0:
        dist = ReturnDistribution(k, 0, 0, (Fraction(1),))
    elif l == 1:
        dist = ReturnDistribution(k, 1, h, (half, half))
    else:
        q, r = divmod(l, 3)
        if r == 0:
            prev = compute_dl(k, q, max_l)
            shift = 2 * q * h + q
            dist = ReturnDistribution(k, l, prev.start + shift, prev.masses)
        elif r == 1:
            pieces = [
                (compute_dl(k, q, max_l), (2 * q + 1) * h + q),
                (compute_dl(k, q, max_l), (2 * q + 1) * h + q + 1),
                (compute_dl(k, q + 1, max_l), 2 * q * h + q),
            ]
            dist = _combine(k, l, pieces)
        else:
            pieces = [
                (compute_dl(k, q, max_l), (2 * q + 2) * h + q + 1),
                (compute_dl(k, q + 1, max_l), (2 * q + 1) * h + q + 1),
                (compute_dl(k, q + 1, max_l), (2 * q + 1) * h + q),
            ]
            dist = _combine(k, l, pieces)
    _dl_cache[key] = dist
    return dist


def _combine(k: int, l: int, pieces: Sequence[tuple[ReturnDistribution, int]]) -> ReturnDistribution:
    third = Fraction(1, 3)
    lo = min(p.start + shift for p, shift in pieces)
    hi = max(p.end + shift for p, shift in pieces)
    acc = [Fraction(0)] * (hi - lo + 1)
    for p, shift in pieces:
        base = p.start + shift - lo
        for i, m in enumerate(p.masses):
            acc[base + i] += third * m
    return ReturnDistribution(k, l, lo, tuple(acc))


# ---------------------------------------------------------------------------
# correlations

def mu_Ak(k: int) -> Fraction:
    """Measure of the base cell A_k."""
    return Fraction(2, 3 ** (k + 1))


def autocorrelation(k: int, n: int, max_n: int = DEFAULT_MAX_N) -> Fraction:
    """mu(A_k intersect T^-n A_k), exactly, via the finite sum over P_n."""
    n = abs(n)
    if n > max_n:
        raise SizeError(f"n = {n} exceeds cap {max_n}")
    scale = mu_Ak(k)
    total = Fraction(0)
    for l in find_Pn(k, n):
        total += compute_dl(k, l).mass(n)
    return scale * total


def cell_correlation(cells_a: Iterable[int], cells_b: Iterable[int], k: int, n: int) -> Fraction:
    """mu(A intersect T^-n B) for A, B finite unions of stage-k tower cells.

    Cells are given by their level numbers m, i.e. A = union of T^m A_k.
    """
    h = tower.height(k)
    total = Fraction(0)
    for m1 in cells_a:
        if not 0 <= m1 < h:
            raise DomainError(f"cell {m1} outside stage-{k} tower")
        for m2 in cells_b:
            if not 0 <= m2 < h:
                raise DomainError(f"cell {m2} outside stage-{k} tower")
            total += autocorrelation(k, n - m2 + m1)
    return total


def approximate_by_cells(a: TriadicSet, k: int) -> tuple[list[int], Fraction]:
    """Best stage-k cell approximation: cells overlapping A in more than half
    a cell (ties included), and the exact symmetric-difference error."""
    h = tower.height(k)
    w = tower.cell_width(k)
    cells = []
    union = TriadicSet.empty()
    for m in range(h):
        cell = TriadicSet((tower.level_interval(k, m),))
        if 2 * a.intersection(cell).measure() >= w:
            cells.append(m)
            union = union.union(cell)
    error = a.symmetric_difference(union).measure()
    return cells, error


def cesaro(k: int, big_n: int, cells_a: Sequence[int] | None = None,
           cells_b: Sequence[int] | None = None) -> Fraction:
    """C_N = (1/N) sum_{n<N} |mu(A intersect T^-n B) - mu(A) mu(B)|, exact.

    With no cell lists, A = B = A_k.
    """
    if big_n < 1:
        raise DomainError(f"N = {big_n} < 1")
    if cells_a is None:
        cells_a = [0]
    if cells_b is None:
        cells_b = list(cells_a)
    w = mu_Ak(k)
    mu_a = w * len(cells_a)
    mu_b = w * len(cells_b)
    total = Fraction(0)
    for n in range(big_n):
        total += abs(cell_correlation(cells_a, cells_b, k, n) - mu_a * mu_b)
    return total / big_n


# ---------------------------------------------------------------------------
# profiles on the half-integer grid

@dataclass(frozen=True)
class Profile:
    """Centered step-function view of d_l' on half-width cells.

    Cell j covers [j/2, (j+1)/2); vals[i] is the value on cell start + i.
    Each mass of d_l' occupies two consecutive cells, so the profile of a
    b-point distribution has 2b cells and integral sum(vals)/2.
    """

    start: int
    vals: tuple[Fraction, ...]

    def value_at_cell(self, j: int) -> Fraction:
        i = j - self.start
        if 0 <= i < len(self.vals):
            return self.vals[i]
        return Fraction(0)

    @property
    def center_value(self) -> Fraction:
        """Value at x = 0, i.e. the peak for an even unimodal profile."""
        return self.value_at_cell(0)

    def shifted(self, half_steps: int) -> "Profile":
        """Profile of x -> value(x - half_steps/2)."""
        return Profile(self.start + half_steps, self.vals)

    def integral(self) -> Fraction:
        return sum(self.vals, Fraction(0)) / 2


def profile_D(k: int, l: int) -> Profile:
    """The even profile D_l: masses of d_l' re-centered about the origin."""
    dist = compute_dl(k, l)
    h = tower.height(k)
    start = 2 * dist.start - 1 - 2 * h * l - l
    vals = tuple(v for m in dist.masses for v in (m, m))
    return Profile(start, vals)


def profile_l1(p: Profile, q: Profile) -> Fraction:
    """Exact L1 distance between two profiles on the common half-grid."""
    lo = min(p.start, q.start)
    hi = max(p.start + len(p.vals), q.start + len(q.vals))
    total = Fraction(0)
    for j in range(lo, hi):
        total += abs(p.value_at_cell(j) - q.value_at_cell(j))
    return total / 2


def profile_envelope_gap(k: int, l: int, p: int) -> Fraction:
    """L1 norm of max - min over the family D_{l+j}(. - i/2), 0<=j<=2, -p<=i<=p."""
    family = [profile_D(k, l + j).shifted(i) for j in range(3) for i in range(-p, p + 1)]
    lo = min(f.start for f in family)
    hi = max(f.start + len(f.vals) for f in family)
    total = Fraction(0)
    for j in range(lo, hi):
        vals = [f.value_at_cell(j) for f in family]
        total += max(vals) - min(vals)
    return total / 2


def H_value(k: int, l: int) -> Fraction:
    """Peak height H_l = D_l(0)."""
    return profile_D(k, l).center_value
