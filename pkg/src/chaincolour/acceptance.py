"""The acceptance sweep: one function per criterion, shared by the test-suite and ``chaincolour report``."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import constructions as cons
from .counting import count, count_backtrack, count_bruteforce, count_layered, is_valid
from .lattice import (
    SetFamily,
    all_canonical_forms,
    canonical_form,
    family_from_membership,
    height,
    level,
    m_levels,
)
from .partition import partition
from .search import exhaustive_search
from .supersaturation import (
    comparable_pairs,
    family_weight,
    kleitman_required,
    lym_sum,
    lym_sums_batch,
    transference_check,
)


@dataclass
class CriterionResult:
    number: int
    name: str
    checks: dict[str, bool]
    details: dict = field(default_factory=dict)
    seconds: float = 0.0
    limit: float | None = None

    @property
    def within_time(self) -> bool:
        return self.limit is None or self.seconds < self.limit

    @property
    def passed(self) -> bool:
        return all(self.checks.values()) and self.within_time

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [k for k, v in self.checks.items() if not v]
        if not self.within_time:
            failed.append(f"time {self.seconds:.1f}s >= {self.limit}s")
        extra = f" failed: {', '.join(failed)}" if failed else ""
        return f"[{status}] criterion {self.number}: {self.name} ({self.seconds:.1f}s){extra}"

    def to_dict(self, timing: bool = True) -> dict:
        out = {"number": self.number, "name": self.name, "passed": self.passed,
               "checks": self.checks, "details": self.details}
        if timing:
            out["seconds"] = round(self.seconds, 3)
            out["limit_seconds"] = self.limit
        return out


def _timed(number: int, name: str, limit: float | None):
    def wrap(fn):
        def run(*args, **kwargs) -> CriterionResult:
            start = time.perf_counter()
            checks, details = fn(*args, **kwargs)
            return CriterionResult(number, name, checks, details, time.perf_counter() - start, limit)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_small_family(rng: np.random.Generator, max_n: int = 4, max_size: int = 12) -> SetFamily:
    n = int(rng.integers(1, max_n + 1))
    size = int(rng.integers(1, min(max_size, 1 << n) + 1))
    members = sorted(int(s) for s in rng.choice(1 << n, size=size, replace=False))
    return SetFamily(n, members)


@_timed(1, "counting oracle equivalence", 60)
def oracle_equivalence(samples: int = 200, seed: int = 1):
    rng = _rng(seed)
    mismatches = []
    for i in range(samples):
        fam = random_small_family(rng)
        r = int(rng.integers(2, 5))
        k = int(rng.integers(2, 5))
        fast, slow = count(fam, r, k), count_bruteforce(fam, r, k)
        if fast != slow:
            mismatches.append({"sample": i, "sets": fam.sets(), "n": fam.n, "r": r, "k": k,
                               "auto": str(fast), "bruteforce": str(slow)})
    return {"auto equals bruteforce": not mismatches}, {"samples": samples, "mismatches": mismatches}


@_timed(2, "antichain identity", None)
def antichain_identity():
    bad = []
    for n in range(1, 7):
        lv = level(n, n // 2)
        for r in range(1, 5):
            expected = r ** len(lv)
            got = count(lv, r, 2, method="backtrack")
            brute = count_bruteforce(lv, r, 2) if expected <= 2**22 else got
            if not got == brute == expected:
                bad.append({"n": n, "r": r, "expected": str(expected), "got": str(got)})
    example = count(level(4, 2), 3, 2, method="backtrack")
    return {"all levels": not bad, "n=4 r=3 gives 729": example == 729}, {"mismatches": bad}


def _canon(fam: SetFamily) -> int:
    return canonical_form(fam)


@_timed(3, "two-colour tightness by exhaustive search", 300)
def two_colour_tightness():
    r3 = exhaustive_search(3, 2, 2)
    r4 = exhaustive_search(4, 2, 2)
    want3 = sorted({_canon(level(3, 1)), _canon(level(3, 2))})
    want4 = [_canon(level(4, 2))]
    checks = {
        "n=3 max is 8": r3.best_count == 8,
        "n=3 maximisers are the two middle levels": sorted(r3.maximisers) == want3,
        "n=4 max is 64": r4.best_count == 64,
        "n=4 unique maximiser is level 2": r4.maximisers == want4,
        "class orbit sizes sum to 2^(2^n)": sum(c.orbit for c in r3.classes) == 2**8
        and sum(c.orbit for c in r4.classes) == 2**16,
    }
    return checks, {"n3": r3.to_dict(), "n4": r4.to_dict()}


@_timed(4, "comparable-pair lower bound, exhaustive", 600)
def kleitman_exhaustive():
    violations = []
    examined = 0
    for n in range(1, 5):
        for mask in np.unique(all_canonical_forms(n)):
            fam = family_from_membership(n, int(mask))
            examined += 1
            if comparable_pairs(fam) < kleitman_required(n, len(fam)):
                violations.append({"n": n, "sets": fam.sets()})
    return {"zero violations": not violations}, {"classes": examined, "violations": violations}


@_timed(5, "LYM-type sum at most one", None)
def lym_sweep(random_samples: int = 10_000, seed: int = 5):
    violations = []
    exhaustive = 0
    for n in range(1, 4):
        full = (1 << n) - 1
        for membership in range(1 << (1 << n)):
            if membership >> full & 1:
                continue
            exhaustive += 1
            value = lym_sum(family_from_membership(n, membership))
            if value > 1:
                violations.append({"n": n, "membership": hex(membership), "sum": str(value)})
    rng = _rng(seed)
    agree = True
    sampled = 0
    for n in (4, 5):
        width = 1 << n
        p = rng.random(random_samples)
        included = rng.random((random_samples, width)) < p[:, None]
        included[:, width - 1] = False
        sums = lym_sums_batch(n, included)
        sampled += random_samples
        for row, value in enumerate(sums):
            if value > 1:
                violations.append({"n": n, "sets": np.flatnonzero(included[row]).tolist(), "sum": str(value)})
        for row in range(0, random_samples, 97):
            fam = SetFamily(n, np.flatnonzero(included[row]).tolist())
            agree &= lym_sum(fam) == sums[row]
    return ({"zero violations": not violations, "batch and direct sums agree": agree},
            {"exhaustive": exhaustive, "random": sampled, "violations": violations[:10]})


@_timed(6, "weights of middle levels and size-to-weight transfer", None)
def weight_checks(instances: int = 100, seed: int = 6):
    checks = {}
    for n, k in ((4, 2), (5, 3), (6, 3)):
        checks[f"weight of middle levels n={n} k={k} is k-1"] = (
            family_weight(cons.middle_levels(n, k - 1), k) == k - 1)
    rng = _rng(seed)
    failures = []
    vacuous = 0
    for i in range(instances):
        n = int(rng.integers(4, 7))
        k = int(rng.integers(2, 4))
        base = cons.middle_levels(n, k - 1)
        sizes = sorted(set(base.sizes))
        nxt = sizes[-1] + 1 if sizes[-1] < n else sizes[0] - 1
        pool = level(n, nxt).members
        t = int(rng.integers(0, min(5, len(pool)) + 1))
        extra = [int(x) for x in rng.choice(pool, size=t, replace=False)] if t else []
        split = int(rng.integers(0, t + 1))
        f0 = base.with_members(extra[:split])
        others = [(Fraction(1), SetFamily(n, extra[split:]))] if split < t else []
        rep = transference_check(f0, others, k, t)
        if not rep.fired:
            vacuous += 1
        elif not rep.holds:
            failures.append({"instance": i, "n": n, "k": k, "t": t})
    checks["transfer conclusion holds on every instance"] = not failures and vacuous == 0
    return checks, {"instances": instances, "failures": failures, "vacuous": vacuous}


def random_colourable_families(count_wanted: int, seed: int = 7):
    """Seeded families with n <= 4, k in {2, 3}, height <= 2k-2 (hence 2-colourable)."""
    rng = _rng(seed)
    out = []
    while len(out) < count_wanted:
        n = int(rng.integers(2, 5))
        k = int(rng.integers(2, 4))
        p = float(rng.random())
        keep = rng.random(1 << n) < p
        fam = SetFamily(n, np.flatnonzero(keep).tolist())
        if 0 < len(fam) <= 16 and height(fam) <= 2 * k - 2:
            out.append((fam, k))
    return out


@_timed(7, "partition engine structural contract", 600)
def partition_contract(samples: int = 500, seed: int = 7):
    checks: dict[str, bool] = {}
    details: dict = {}
    for n, k in ((4, 2), (5, 2), (5, 3)):
        fam = cons.middle_levels(n, k - 1)
        # a huge omega sends every non-bottom part to D, so the extremal shape needs a small omega
        res = partition(fam, k, omega=0)
        st = res.state
        empty = not (st.all_of("U") | st.all_of("D") | st.all_of("P") | st.R)
        levels_ok = sorted(sorted(set(fam.subfamily(st.ordered(st.A[i])).sizes)) for i in range(1, k)) == \
            sorted([s] for s in set(fam.sizes))
        label = f"middle n={n} k={k} omega=0"
        checks[f"{label}: U=D=P=R empty, A parts are the levels"] = empty and levels_ok
        checks[f"{label}: all Q and P pass"] = res.qualities.passed and res.properties.passed
    tallies = {"structure": [], "p1_default": [], "p1_small": [], "branch_default": [], "branch_small": []}
    fams = random_colourable_families(samples, seed)
    for idx, (fam, k) in enumerate(fams):
        exact = count(fam, 2, k)
        for omega in (None, 0, 1, 2):
            res = partition(fam, k, omega=omega, true_count=exact)
            regime = "default" if omega is None else "small"
            q_fail = res.qualities.failed()
            p_fail = [p for p in res.properties.failed() if p != "P1"]
            led = res.ledger
            scale_free = [name for name in ("step_fractions", "colour_steps") if not led.checks()[name].passed]
            if q_fail or p_fail or scale_free:
                tallies["structure"].append({"sample": idx, "omega": omega, "failed": q_fail + p_fail + scale_free})
            if not res.properties.checks["P1"].passed:
                tallies[f"p1_{regime}"].append({"sample": idx, "omega": omega, "sets": fam.sets(), "k": k,
                                                 "witness": res.properties.checks["P1"].witness})
            if not led.literal_branch_bound.passed:
                tallies[f"branch_{regime}"].append({"sample": idx, "omega": omega,
                                                    "witness": led.literal_branch_bound.witness})
    checks["random: Q1-Q9, P2-P5, left-neighbourhoods and step fractions pass (all omega)"] = not tallies["structure"]
    checks["random: P1 bound >= exact count (default omega)"] = not tallies["p1_default"]
    checks["random: P1 bound >= exact count (omega in 0,1,2)"] = not tallies["p1_small"]
    checks["random: every branch shrink <= (1/6) 2^(eps t) (default omega)"] = not tallies["branch_default"]
    checks["random: every branch shrink <= (1/6) 2^(eps t) (omega in 0,1,2)"] = not tallies["branch_small"]
    details["samples"] = len(fams)
    details["failure_counts"] = {key: len(v) for key, v in tallies.items()}
    details["first_failures"] = {key: v[:3] for key, v in tallies.items()}
    return checks, details


@_timed(8, "four colours beat the largest antichain", 120)
def four_colour_example():
    fam3 = cons.paired_four_colouring_family(3)
    exact3 = count_bruteforce(fam3, 4, 2)
    generated = list(cons.paired_four_colourings(3))
    all_valid = all(is_valid(fam3, c, 2) for c in generated)
    fam5 = cons.paired_four_colouring_family(5)
    layered = count_layered(fam5, 4, 2)
    backtrack = count_backtrack(fam5, 4, 2)
    distinct5 = cons.paired_construction_size(5)
    checks = {
        "n=3 exact count > 64": exact3 > 4**3,
        "n=3 every paired colouring is valid": all_valid,
        "n=3 distinct paired colourings match inclusion-exclusion": len(set(generated)) == cons.paired_construction_size(3),
        "n=5 layered equals backtrack": layered == backtrack,
        "n=5 count > 4^10": layered > 4**10,
        "n=5 paired construction <= exact count": distinct5 <= layered,
    }
    details = {"n3_exact": str(exact3), "n3_generated": len(generated), "n5_exact": str(layered),
               "n5_paired_distinct": str(distinct5)}
    return checks, details


@_timed(9, "three colours per level assignment", 60)
def level_assignment_checks(samples: int = 1000, seed: int = 9, n: int = 6):
    checks = {}
    details = {}
    for r, k in ((3, 2), (3, 4), (6, 2), (4, 4)):
        la = cons.level_assignment(r, k)
        fam = la.family(n)
        cols = la.sample_colourings(fam, samples, seed)
        valid = all(is_valid(fam, row.tolist(), k) for row in cols)
        checks[f"r={r} k={k} invariants"] = not la.check()
        checks[f"r={r} k={k} sampled colourings valid"] = valid
        details[f"{r},{k}"] = {"levels": [sorted(c) for c in la.colours_of_level], "family_size": len(fam)}
    return checks, details


DETERMINISM_COMMANDS = (
    ["count", "--n", "4", "--family", "random:0.5,11", "--r", "3", "--k", "2"],
    ["count", "--n", "5", "--family", "middle:2", "--r", "4", "--k", "2", "--method", "layered"],
    ["kleitman", "--n", "4", "--family", "random:0.6,3"],
    ["lym", "--n", "5", "--family", "random:0.4,8"],
    ["weight", "--n", "5", "--family", "middle:2", "--k", "3", "--delta", "1/6"],
    ["mirsky", "--n", "4", "--family", "random:0.5,2"],
    ["partition", "--n", "4", "--family", "random:0.5,7", "--k", "2", "--omega", "1", "--verify", "--trace"],
    ["search", "--n", "3", "--r", "2", "--k", "2", "--exhaustive"],
    ["search", "--n", "4", "--r", "3", "--k", "2", "--local", "--budget", "60", "--seed", "4"],
    ["search", "--n", "3", "--r", "2", "--k", "2", "--exhaustive", "--threads", "2"],
    ["construct", "--kind", "levels", "--r", "3", "--k", "4", "--n", "6", "--samples", "200", "--seed", "9"],
)


def _payload(argv: list[str]) -> tuple[int, str]:
    import io
    import json

    from .cli import run

    buf = io.StringIO()
    code = run(argv, out=buf, err=io.StringIO())
    data = json.loads(buf.getvalue())
    data.pop("wall_time")
    # worker count is a parameter, not part of the result
    data["parameters"].pop("threads", None)
    return code, json.dumps(data, sort_keys=True)


@_timed(10, "determinism of command payloads", None)
def determinism():
    checks = {}
    thread_free = {}
    for argv in DETERMINISM_COMMANDS:
        first, second = _payload(argv), _payload(argv)
        checks[" ".join(argv)] = first == second
        if argv[0] == "search" and "--exhaustive" in argv:
            thread_free.setdefault(tuple(a for a in argv if a not in ("--threads", "2")), []).append(first)
    checks["output independent of --threads"] = all(len(set(v)) == 1 for v in thread_free.values())
    return checks, {"commands": len(DETERMINISM_COMMANDS)}


ALL = (oracle_equivalence, antichain_identity, two_colour_tightness, kleitman_exhaustive, lym_sweep,
       weight_checks, partition_contract, four_colour_example, level_assignment_checks)


def run_all(quick: bool = False) -> list[CriterionResult]:
    out = []
    for fn in ALL:
        if quick and fn is partition_contract:
            out.append(fn(samples=60))
        elif quick and fn is lym_sweep:
            out.append(fn(random_samples=1000))
        else:
            out.append(fn())
    return out


def m_levels_table(max_n: int = 6) -> dict:
    return {f"{n},{k}": m_levels(n, k) for n in range(1, max_n + 1) for k in range(2, n + 2)}


__all__ = [fn.__name__ for fn in ALL] + ["CriterionResult", "determinism", "run_all",
                                         "random_colourable_families", "random_small_family", "m_levels_table"]
