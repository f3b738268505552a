"""Comparable pairs, weights, and exact checkers for supersaturation-type inequalities.

All analytic quantities are :class:`fractions.Fraction`; nothing here uses
floating point.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import PreconditionError, UsageError, VerificationFailure
from .lattice import SetFamily, _bits, degrees, m_levels

ExactRational = Fraction


def rational_json(q: Fraction) -> dict:
    return {"num": str(q.numerator), "den": str(q.denominator)}


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"expected a rational like 1/6, got {text!r}") from None


# -- comparable pairs --------------------------------------------------------------

def comparable_pairs(fam: SetFamily) -> int:
    """Number of pairs F ⊊ G inside the family (sum of up-degrees)."""
    return sum(u.bit_count() for u in fam.up_masks)


def comparable_pairs_scan(fam: SetFamily) -> int:
    """Same count by a direct pairwise scan; an independent cross-check."""
    ms = fam.members
    total = 0
    for a in range(len(ms)):
        for b in range(a + 1, len(ms)):
            x, y = ms[a], ms[b]
            if x & y in (x, y):
                total += 1
    return total


def kleitman_required(n: int, size: int) -> int:
    """Minimum comparable pairs forced in a family of ``size`` sets over [n]."""
    return (n + 2) // 2 * max(0, size - math.comb(n, n // 2))


# -- weights ----------------------------------------------------------------------

def _check_k(k: int) -> None:
    if k < 2:
        raise UsageError(f"chain bound k must be >= 2, got {k}")


def weight(F, n: int, k: int) -> Fraction:
    """min(1/C(n,|F|), 1/C(n, floor((n-k)/2))); the second term caps sets far from the middle."""
    _check_k(k)
    size = _bits(F, n).bit_count()
    cap = math.comb(n, (n - k) // 2) if n >= k else 0
    return Fraction(1, max(math.comb(n, size), cap))


def weight_bounds_hold(n: int, k: int, size: int) -> bool:
    """1/C(n,n/2) <= w_k <= (1 + 2k^2/n)/C(n,n/2) for a set of the given size."""
    mid = math.comb(n, n // 2)
    w = weight((1 << size) - 1, n, k)
    return Fraction(1, mid) <= w <= (1 + Fraction(2 * k * k, n)) / mid


def family_weight(fam: SetFamily, k: int) -> Fraction:
    """Sum of member weights; for n >= 4k^2 also checks each member's two-sided weight bound."""
    _check_k(k)
    n = fam.n
    by_size: dict[int, int] = {}
    for s in fam.sizes:
        by_size[s] = by_size.get(s, 0) + 1
    if n >= 4 * k * k:
        for s in by_size:
            if not weight_bounds_hold(n, k, s):
                raise VerificationFailure(f"weight of a {s}-set at n={n}, k={k} escapes its bounds")
    return sum((c * weight((1 << s) - 1, n, k) for s, c in by_size.items()), Fraction(0))


# -- LYM-type sum -----------------------------------------------------------------

def lym_sum(fam: SetFamily) -> Fraction:
    """Sum over F of (1 - d+(F)/(n - |F|)) / C(n, |F|); at most 1 for families avoiding [n]."""
    n = fam.n
    full = (1 << n) - 1
    if full in fam:
        raise PreconditionError("the full ground set makes the sum undefined", witness=list(range(1, n + 1)))
    slack: dict[int, int] = {}
    for s, u in zip(fam.sizes, fam.up_masks):
        slack[s] = slack.get(s, 0) + (n - s) - u.bit_count()
    return sum((Fraction(v, math.comb(n, s) * (n - s)) for s, v in slack.items()), Fraction(0))


def _strict_superset_matrix(n: int) -> np.ndarray:
    s = np.arange(1 << n)
    return ((s[:, None] & s[None, :]) == s[:, None]) & (s[:, None] != s[None, :])


def lym_sums_batch(n: int, included: np.ndarray) -> list[Fraction]:
    """:func:`lym_sum` for many families at once.

    ``included`` is a boolean array (families x 2^n) of member indicators.
    Up-degrees come from one matrix product; the sum is formed exactly over
    the common denominator lcm_s C(n,s)(n-s).
    """
    included = np.asarray(included, dtype=bool)
    full = (1 << n) - 1
    if included[:, full].any():
        raise PreconditionError("the full ground set makes the sum undefined")
    up = included.astype(np.int64) @ _strict_superset_matrix(n).T.astype(np.int64)
    sizes = np.array([s.bit_count() for s in range(1 << n)])
    den = math.lcm(*(math.comb(n, s) * (n - s) for s in range(n)))
    scale = np.array([den // (math.comb(n, s) * (n - s)) if s < n else 0 for s in sizes], dtype=object)
    slack = (n - sizes)[None, :] - up
    numer = (np.where(included, slack, 0).astype(object) * scale[None, :]).sum(axis=1)
    return [Fraction(int(v), den) for v in numer]


# -- supersaturation and transference --------------------------------------------

@dataclass(frozen=True)
class SupersatReport:
    n: int
    k: int
    delta: Fraction
    family_weight: Fraction
    r: Fraction
    observed_pairs: int
    required_pairs: Fraction
    holds: bool
    hypothesis_met: bool
    constant: Fraction

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, val in out.items():
            if isinstance(val, Fraction):
                out[key] = rational_json(val)
        return out


def supersat_check(fam: SetFamily, k: int, delta, constant=1) -> SupersatReport:
    """Compare the comparable-pair count with (1/2 - delta) r n, where w_k(fam) = 1 + r / C(n, n/2).

    ``hypothesis_met`` reports whether n >= constant * delta^-3 * k^2; it is
    informational, the inequality itself is evaluated regardless.
    """
    delta = Fraction(delta)
    constant = Fraction(constant)
    if not 0 < delta < Fraction(1, 2):
        raise UsageError(f"delta must lie strictly between 0 and 1/2, got {delta}")
    n = fam.n
    w = family_weight(fam, k)
    r = (w - 1) * math.comb(n, n // 2)
    required = (Fraction(1, 2) - delta) * r * n
    observed = comparable_pairs(fam)
    return SupersatReport(
        n=n, k=k, delta=delta, family_weight=w, r=r, observed_pairs=observed,
        required_pairs=required, holds=observed >= required,
        hypothesis_met=n >= constant * k * k / delta**3, constant=constant,
    )


@dataclass(frozen=True)
class TransferenceReport:
    fired: bool
    size_lhs: Fraction
    size_rhs: int
    weight_lhs: Fraction
    weight_rhs: Fraction
    holds: bool | None  # None when the size hypothesis did not fire
    large_n: bool

    @property
    def outcome(self) -> str:
        if not self.fired:
            return "vacuous"
        return "holds" if self.holds else "fails"

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, val in out.items():
            if isinstance(val, Fraction):
                out[key] = rational_json(val)
        out["outcome"] = self.outcome
        return out


def transference_check(f0: SetFamily, others: Sequence[tuple[object, SetFamily]], k: int, t: int) -> TransferenceReport:
    """Size-to-weight transfer: if |f0| + sum a_i|F_i| >= m_{k-1} + t, check
    w(f0) + (1 + 2k^2/n) sum a_i w(F_i) >= k - 1 + t / C(n, n/2)."""
    _check_k(k)
    if t < 0:
        raise UsageError(f"t must be non-negative, got {t}")
    n = f0.n
    terms = []
    for alpha, fam in others:
        alpha = Fraction(alpha)
        if alpha <= 0:
            raise UsageError(f"weights alpha must be positive, got {alpha}")
        if fam.n != n:
            raise UsageError("all families must share one ground size")
        terms.append((alpha, fam))
    size_lhs = len(f0) + sum((a * len(fam) for a, fam in terms), Fraction(0))
    size_rhs = m_levels(n, k) + t
    fired = size_lhs >= size_rhs
    weight_lhs = family_weight(f0, k) + (1 + Fraction(2 * k * k, n)) * sum(
        (a * family_weight(fam, k) for a, fam in terms), Fraction(0))
    weight_rhs = k - 1 + Fraction(t, math.comb(n, n // 2))
    return TransferenceReport(
        fired=fired, size_lhs=size_lhs, size_rhs=size_rhs, weight_lhs=weight_lhs,
        weight_rhs=weight_rhs, holds=(weight_lhs >= weight_rhs) if fired else None,
        large_n=n >= 4 * k * k,
    )


# -- monochromatic-neighbourhood classification -----------------------------------

@dataclass(frozen=True)
class McClassification:
    b_mc: SetFamily
    a3: SetFamily
    a2: SetFamily
    a1: SetFamily


def _neighbours(f: int, fam: SetFamily) -> list[int]:
    return [g for g in fam.members if g != f and g & f in (f, g)]


def mc_classification(A: SetFamily, B: SetFamily, X: SetFamily, colouring) -> McClassification:
    """Split A and B by how monochromatic the A-neighbourhoods of B are.

    ``colouring`` maps masks to colours (a dict) or lists colours in A's
    order.  Thresholds against sqrt(n) compare d^2 with n.
    """
    n = A.n
    if B.n != n or X.n != n:
        raise UsageError("A, B and X must share one ground size")
    overlap = set(A.members) & set(B.members)
    if overlap:
        raise UsageError(f"A and B overlap in {len(overlap)} sets")
    if not set(X.members) <= set(B.members):
        raise UsageError("X must be a subfamily of B")
    if isinstance(colouring, Mapping):
        colour = {int(m): c for m, c in colouring.items()}
    else:
        cols = list(colouring)
        if len(cols) != len(A):
            raise UsageError("a sequence colouring must list one colour per member of A")
        colour = dict(zip(A.members, cols))
    missing = [a for a in A.members if a not in colour]
    if missing:
        raise UsageError(f"{len(missing)} members of A are uncoloured")
    mc = []
    for b in B.members:
        nb = _neighbours(b, A)
        if nb and len({colour[a] for a in nb}) == 1:
            mc.append(b)
    b_mc = SetFamily(n, mc)
    x_mc = SetFamily(n, [b for b in X.members if b in b_mc])
    a3, a2, a1 = [], [], []
    for a in A.members:
        if sum(degrees(a, X)) == 0:
            a3.append(a)
        d_mc = sum(degrees(a, b_mc))
        if d_mc * d_mc >= n and sum(degrees(a, x_mc)) == 0:
            a2.append(a)
        if d_mc * d_mc < n:
            a1.append(a)
    return McClassification(b_mc, SetFamily(n, a3), SetFamily(n, a2), SetFamily(n, a1))
