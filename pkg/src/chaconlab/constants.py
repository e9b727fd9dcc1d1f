"""Frozen empirical constants with their defining sweeps.

The decay estimates for the profiles D_l involve constants that no closed
form provides.  They are fixed here once, by exact sweeps over an index
window, with 10% headroom, and the test suite re-runs the sweeps to confirm
the frozen values still dominate.  Squared forms are stored as exact
rationals so the inequalities H_l sqrt(b_l) <= C1 and the like can be
checked without square roots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .correlation import H_value, compute_bl, profile_D, profile_envelope_gap, profile_l1

HEADROOM = Fraction(121, 100)     # (1.1)^2, applied to squared maxima


@dataclass(frozen=True)
class FrozenConstants:
    """Frozen constants; *_sq fields are exact squares including headroom."""

    c1_sq: Fraction        # peak height:        H_l^2 b_l <= c1_sq
    c2_sq: Fraction        # successive L1 gap:  |D_{l+1}-D_l|_1^2 b_l <= c2_sq
    c3_sq: Fraction        # envelope L1 gap:    gap(l,p)^2 b_l / p^2 <= c3_sq
    c_star: float          # global count bound multiplier (binary64 check)
    sweep_l_bound: int     # c1, c2 swept over l < sweep_l_bound
    sweep_envelope_l: int  # c3 swept over l < sweep_envelope_l, p <= sweep_p
    sweep_p: int
    headroom_sq: Fraction


# Sweep results (exact):
#   max H_l^2 b_l            = 980/729 at l = 16   (l < 3^5)
#   max |D_{l+1}-D_l|^2 b_l  = 16/9    at l = 5    (l < 3^5)
#   max gap^2 b_l / p^2      = 605/36  at l = 16, p = 1  (l < 3^4, p <= 4)
#   count/bound ratios for the global set were all 0 on the verification
#   grid (bound overflow for linear growth, empty window for log growth),
#   so c_star is fixed at 1.0.
FROZEN = FrozenConstants(
    c1_sq=Fraction(980, 729) * HEADROOM,      # = 5929/3645
    c2_sq=Fraction(16, 9) * HEADROOM,         # = 484/225
    c3_sq=Fraction(605, 36) * HEADROOM,       # = 14641/720
    c_star=1.0,
    sweep_l_bound=3 ** 5,
    sweep_envelope_l=3 ** 4,
    sweep_p=4,
    headroom_sq=HEADROOM,
)


def sweep_c1_sq(l_bound: int) -> tuple[Fraction, int]:
    """Exact max of H_l^2 b_l over l < l_bound, with its argmax."""
    best, arg = Fraction(0), 0
    for l in range(l_bound):
        v = H_value(1, l) ** 2 * compute_bl(l)
        if v > best:
            best, arg = v, l
    return best, arg


def sweep_c2_sq(l_bound: int) -> tuple[Fraction, int]:
    """Exact max of |D_{l+1} - D_l|_1^2 b_l over l < l_bound."""
    best, arg = Fraction(0), 0
    for l in range(l_bound):
        v = profile_l1(profile_D(1, l + 1), profile_D(1, l)) ** 2 * compute_bl(l)
        if v > best:
            best, arg = v, l
    return best, arg


def sweep_c3_sq(l_bound: int, p_bound: int) -> tuple[Fraction, tuple[int, int]]:
    """Exact max of envelope_gap(l, p)^2 b_l / p^2 over the sweep window."""
    best, arg = Fraction(0), (0, 1)
    for l in range(l_bound):
        b = compute_bl(l)
        for p in range(1, p_bound + 1):
            g = profile_envelope_gap(1, l, p)
            v = g * g * b / (p * p)
            if v > best:
                best, arg = v, (l, p)
    return best, arg
