"""Searching for families with the most (r, k)-colourings.

Exhaustive search walks one representative per isomorphism class (n <= 4);
local search hill-climbs with single-set additions and removals.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constructions import middle_levels
from .counting import DEFAULT_BUDGET, count, count_backtrack, count_bruteforce
from .errors import CapabilityError, UsageError, VerificationFailure
from .lattice import (
    MAX_ALL_FAMILIES_N,
    SetFamily,
    _check_n,
    all_canonical_forms,
    canonical_form,
    family_from_membership,
    random_family,
)

MAX_LOCAL_N = 7


@dataclass(frozen=True)
class ClassRecord:
    canonical: int
    orbit: int
    size: int
    count: int


@dataclass
class SearchReport:
    n: int
    r: int
    k: int
    method: str
    best_count: int
    maximisers: list[int]  # canonical forms
    classes_examined: int
    seed: int | None = None
    classes: list[ClassRecord] = field(default_factory=list)
    crosschecked: int = 0
    evaluations: int = 0
    partial: bool = False
    note: str = ""

    def maximiser_families(self) -> list[SetFamily]:
        return [family_from_membership(self.n, m) for m in self.maximisers]

    def to_dict(self) -> dict:
        out = {
            "n": self.n, "r": self.r, "k": self.k, "method": self.method,
            "best": str(self.best_count),
            "maximisers": [{"canonical": hex(m), "sets": fam.sets()}
                           for m, fam in zip(self.maximisers, self.maximiser_families())],
            "classes_examined": self.classes_examined, "crosschecked": self.crosschecked,
            "evaluations": self.evaluations, "partial": self.partial, "note": self.note,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    def csv_rows(self) -> list[ClassRecord]:
        """All classes for n <= 3, the top 100 by count otherwise."""
        ranked = sorted(self.classes, key=lambda c: (-c.count, c.canonical))
        return ranked if self.n <= 3 else ranked[:100]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["canonical", "orbit_size", "family_size", "count"])
        rows = self.csv_rows() or [ClassRecord(m, 0, bin(m).count("1"), self.best_count) for m in self.maximisers]
        for c in rows:
            # orbit sizes are only known for exhaustive runs
            writer.writerow([hex(c.canonical), c.orbit or "", c.size, c.count])
        return buf.getvalue()


def _count_class(args) -> tuple[int, int, bool]:
    n, mask, r, k, budget = args
    fam = family_from_membership(n, mask)
    value = count(fam, r, k)
    checked = False
    if r ** len(fam) <= budget:
        if count_bruteforce(fam, r, k) != value:
            raise VerificationFailure(f"counters disagree on class {mask:#x}")
        checked = True
    return mask, value, checked


def exhaustive_search(n: int, r: int, k: int, crosscheck_budget: int = 2**16, workers: int = 1) -> SearchReport:
    """Exact maximum colouring count over all families on [n], one per isomorphism class."""
    _check_n(n)
    if n > MAX_ALL_FAMILIES_N:
        raise CapabilityError(f"exhaustive search covers n <= {MAX_ALL_FAMILIES_N}, got {n}")
    forms, orbits = np.unique(all_canonical_forms(n), return_counts=True)
    jobs = [(n, int(m), r, k, crosscheck_budget) for m in forms]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_count_class, jobs, chunksize=64))
    else:
        results = [_count_class(j) for j in jobs]
    classes = [ClassRecord(mask, int(orbit), bin(mask).count("1"), value)
               for (mask, value, _), orbit in zip(results, orbits)]
    best = max(c.count for c in classes)
    maximisers = [c.canonical for c in classes if c.count == best]
    for m in maximisers:
        fam = family_from_membership(n, m)
        recount = count_bruteforce(fam, r, k) if r ** len(fam) <= DEFAULT_BUDGET else count_backtrack(fam, r, k, symmetry=False)
        if recount != best:
            raise VerificationFailure(f"maximiser {m:#x} recounted as {recount}, expected {best}")
    return SearchReport(n, r, k, "exhaustive", best, maximisers, len(classes), classes=classes,
                        crosschecked=sum(1 for *_, c in results if c),
                        note="empirical small-n maximum")


def local_search(n: int, r: int, k: int, budget: int = 2000, seed: int = 0, start: str = "middle",
                 restarts: int = 3) -> SearchReport:
    """Hill-climb over add/remove-one-set moves; heuristic, with no optimality claim.

    ``budget`` caps the number of distinct families counted.  Restart 0 begins
    at ``start`` (``middle``: the k-1 middle levels, or ``random``); later
    restarts flip two random sets of the best family found so far.
    """
    _check_n(n)
    if n > MAX_LOCAL_N:
        raise CapabilityError(f"local search covers n <= {MAX_LOCAL_N}, got {n}")
    if start not in ("middle", "random"):
        raise UsageError(f"start must be 'middle' or 'random', got {start!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    cache: dict[int, int] = {}
    partial = False

    class Exhausted(Exception):
        pass

    def value(membership: int) -> int:
        if membership not in cache:
            if len(cache) >= budget:
                raise Exhausted
            cache[membership] = count(family_from_membership(n, membership), r, k)
        return cache[membership]

    if start == "middle":
        first = middle_levels(n, min(k - 1, n + 1)).membership
    else:
        first = random_family(n, 0.5, seed).membership
    best_mask, best_val = first, None
    try:
        best_val = value(first)
        current = first
        for attempt in range(restarts):
            if attempt:
                current = best_mask
                for s in rng.choice(1 << n, size=2, replace=False):
                    current ^= 1 << int(s)
            cur_val = value(current)
            while True:
                step = None
                for s in range(1 << n):
                    v = value(current ^ (1 << s))
                    if v > cur_val and (step is None or v > step[1]):
                        step = (s, v)
                if step is None:
                    break
                current ^= 1 << step[0]
                cur_val = step[1]
            if cur_val > best_val:
                best_mask, best_val = current, cur_val
    except Exhausted:
        partial = True
        top = max(cache.items(), key=lambda t: (t[1], -t[0]))
        if best_val is None or top[1] > best_val:
            best_mask, best_val = top
    if best_val is None:
        best_val = 0
    fam = family_from_membership(n, best_mask)
    canon = canonical_form(fam) if n <= 8 else best_mask
    return SearchReport(n, r, k, "local", best_val, [canon], len(cache), seed=seed,
                        evaluations=len(cache), partial=partial,
                        note="heuristic, no optimality claim" + ("; budget exhausted" if partial else ""))
