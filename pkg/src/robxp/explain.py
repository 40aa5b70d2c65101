"""Abductive and contrastive explanations built on the adversarial-example oracle.

A set ``X`` of features is a weak AXp when pinning ``X`` to the instance
leaves no adversarial example in the ball; a set ``Y`` is a weak CXp when
freeing only ``Y`` still admits one.  Both predicates are monotone, so a
deletion scan (ascending feature index) yields subset-minimal sets with
one oracle call per candidate feature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .distance import DistanceSpec
from .errors import EmptyChangeError, NotApplicable, OracleUnknown
from .oracle import Solver
from .robustness import OracleStats, find_aex

AXP = "AXp"
CXP = "CXp"


@dataclass(frozen=True)
class Explanation:
    kind: str
    features: frozenset
    spec: DistanceSpec
    calls: int = field(default=0, compare=False)

    def __str__(self):
        items = ", ".join(str(i) for i in sorted(self.features))
        return f"{self.kind} {{{items}}} ({self.spec})"


@dataclass(frozen=True)
class ExplanationListing:
    axps: frozenset
    cxps: frozenset
    complete: bool
    calls: int = field(default=0, compare=False)
    reason: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "axps", frozenset(frozenset(s) for s in self.axps))
        object.__setattr__(self, "cxps", frozenset(frozenset(s) for s in self.cxps))

    def __len__(self):
        return len(self.axps) + len(self.cxps)


def _all(problem):
    return problem.features


def is_weak_axp(problem, X, spec, oracle=None, stats=None):
    return find_aex(problem, spec, frozenset(X), oracle=oracle, stats=stats) is None


def is_weak_cxp(problem, Y, spec, oracle=None, stats=None):
    return find_aex(problem, spec, _all(problem) - frozenset(Y), oracle=oracle, stats=stats) is not None


def find_axp(problem, spec, R=None, oracle=None, stats=None):
    """Subset-minimal weak AXp inside ``R`` (default: every feature)."""
    stats = stats if stats is not None else OracleStats()
    start = stats.calls
    R = _all(problem) if R is None else frozenset(R)
    if R != _all(problem) and not is_weak_axp(problem, R, spec, oracle, stats):
        raise ValueError(f"{sorted(R)} is not a weak AXp")
    S = set(R)
    for i in sorted(R):
        if is_weak_axp(problem, S - {i}, spec, oracle, stats):
            S.discard(i)
    return Explanation(AXP, frozenset(S), spec, stats.calls - start)


def find_cxp(problem, spec, R=None, oracle=None, stats=None, checked=False):
    """Subset-minimal weak CXp inside ``R`` (default: every feature).

    Raises ``ValueError`` when freeing ``R`` admits no adversarial example.
    """
    stats = stats if stats is not None else OracleStats()
    start = stats.calls
    R = _all(problem) if R is None else frozenset(R)
    if not checked and not is_weak_cxp(problem, R, spec, oracle, stats):
        raise ValueError(f"no adversarial example with features {sorted(R)} free")
    S = set(R)
    for i in sorted(R):
        if is_weak_cxp(problem, S - {i}, spec, oracle, stats):
            S.discard(i)
    return Explanation(CXP, frozenset(S), spec, stats.calls - start)


def plain_explanations(problem, kind, oracle=None):
    """Distance-unrestricted explanation: l0 with epsilon = m."""
    spec = DistanceSpec(0, problem.m)
    if kind.lower() == "axp":
        return find_axp(problem, spec, oracle=oracle)
    if kind.lower() == "cxp":
        return find_cxp(problem, spec, oracle=oracle)
    raise ValueError(f"kind must be 'axp' or 'cxp', not {kind!r}")


def _maximal_seed(m, blocks):
    """A subset-maximal set of features satisfying every block clause, or None."""
    n = m
    base = Solver(n, [list(c) for c in blocks])
    first = base.solve()
    if not first.sat:
        return None
    chosen = {i for i in range(1, m + 1) if first.model[i]}
    for i in range(1, m + 1):
        if i in chosen:
            continue
        trial = Solver(n, [list(c) for c in blocks]).solve(sorted(chosen | {i}))
        if trial.sat:
            chosen = {j for j in range(1, m + 1) if trial.model[j]}
    return frozenset(chosen)


def enumerate_explanations(problem, spec, limit=None, oracle=None):
    """All AXps and CXps, alternating between the two through seed sets.

    Seed ``S`` is a maximal set not yet excluded.  If pinning ``S`` is
    safe it shrinks to an AXp ``X`` and every superset of ``X`` is
    excluded; otherwise the free features contain a CXp ``Y`` and every
    set disjoint from ``Y`` is excluded.  Stops with ``complete=True``
    when no seed is left.
    """
    if limit is not None and limit < 1:
        raise ValueError("limit must be at least 1")
    m = problem.m
    everything = _all(problem)
    stats = OracleStats()
    axps, cxps, blocks = [], [], []
    try:
        while True:
            seed = _maximal_seed(m, blocks)
            if seed is None:
                return ExplanationListing(axps, cxps, True, stats.calls)
            if limit is not None and len(axps) + len(cxps) >= limit:
                return ExplanationListing(axps, cxps, False, stats.calls, "limit reached")
            if is_weak_axp(problem, seed, spec, oracle, stats):
                x = find_axp(problem, spec, seed, oracle, stats).features
                axps.append(x)
                blocks.append([-i for i in sorted(x)])
            else:
                y = find_cxp(problem, spec, everything - seed, oracle, stats, checked=True).features
                cxps.append(y)
                blocks.append(sorted(y))
    except OracleUnknown as exc:
        return ExplanationListing(axps, cxps, False, stats.calls, f"oracle unknown: {exc}")


def cxp_from_aex(v, aex):
    """Features (1-based) on which the adversarial example differs from ``v``."""
    if len(v) != len(aex):
        raise ValueError("points of different arity")
    changed = frozenset(i + 1 for i, (a, b) in enumerate(zip(v, aex)) if a != b)
    if not changed:
        raise EmptyChangeError("the adversarial example equals the instance")
    return changed


def minimal_hitting_sets(sets, universe=None):
    sets = [frozenset(s) for s in sets]
    universe = sorted(frozenset().union(*sets) if universe is None else universe)
    hitting = []
    for k in range(len(universe) + 1):
        for combo in itertools.combinations(universe, k):
            h = frozenset(combo)
            if all(h & s for s in sets) and not any(g <= h for g in hitting):
                hitting.append(h)
    return frozenset(hitting)


def check_mhs_duality(listing):
    """True iff the AXps are exactly the minimal hitting sets of the CXps and vice versa."""
    if not listing.complete:
        raise NotApplicable("duality only holds for complete listings")
    universe = frozenset().union(*listing.axps, *listing.cxps)
    return (
        minimal_hitting_sets(listing.cxps, universe) == listing.axps
        and minimal_hitting_sets(listing.axps, universe) == listing.cxps
    )


__all__ = [
    "AXP", "CXP", "Explanation", "ExplanationListing", "is_weak_axp", "is_weak_cxp", "find_axp",
    "find_cxp", "plain_explanations", "enumerate_explanations", "cxp_from_aex",
    "minimal_hitting_sets", "check_mhs_duality",
]
