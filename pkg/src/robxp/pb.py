"""Pseudo-Boolean constraints and their translation to clauses.

Literals are signed DIMACS integers.  A constraint is first normalized to
``sum a_i * l_i >= K`` with every ``a_i > 0`` and then translated by

* a single clause when ``K`` is reached by any one literal,
* the pairwise encoding for at-most-one over few literals,
* a sequential counter for cardinality constraints (all ``a_i`` equal),
* an interval-memoized BDD for genuinely weighted constraints.

Every translation introduces fresh variables through ``pool.new_var()``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .rational import ceil_div

RELATIONS = (">=", "<=", "=")
PAIRWISE_LIMIT = 6


@dataclass(frozen=True)
class PBConstraint:
    terms: tuple
    relation: str
    bound: int

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}")
        terms = tuple((int(a), int(l)) for a, l in self.terms)
        for _, lit in terms:
            if lit == 0:
                raise ValueError("literal 0 is not a variable")
        variables = [abs(l) for _, l in terms]
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable in PB constraint")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "bound", int(self.bound))

    @classmethod
    def build(cls, terms, relation, bound):
        """Like the constructor, but merges repeated variables first."""
        merged = {}
        for a, lit in terms:
            a = int(a)
            var = abs(lit)
            if lit < 0:
                # a * ~x == a - a * x
                bound -= a
                a = -a
            merged[var] = merged.get(var, 0) + a
        out = tuple((a, var) for var, a in sorted(merged.items()) if a != 0)
        return cls(out, relation, bound)

    def variables(self):
        return {abs(l) for _, l in self.terms}

    def lhs(self, assignment):
        return sum(a for a, l in self.terms if assignment.get(abs(l), False) == (l > 0))

    def satisfied(self, assignment):
        s = self.lhs(assignment)
        if self.relation == ">=":
            return s >= self.bound
        if self.relation == "<=":
            return s <= self.bound
        return s == self.bound


def at_least(lits, k):
    return PBConstraint(tuple((1, l) for l in lits), ">=", k)


def at_most(lits, k):
    return PBConstraint(tuple((1, l) for l in lits), "<=", k)


def normalize_geq(terms, bound):
    """Rewrite ``sum a*l >= bound`` with positive coefficients.

    Returns ``(terms, bound)``; coefficients are saturated at the bound and
    divided by their gcd.  ``bound <= 0`` means the constraint is trivially
    true, ``sum(a) < bound`` means it is unsatisfiable.
    """
    merged = {}
    for a, lit in terms:
        if a < 0:
            a, lit = -a, -lit
            bound += a
        if a == 0:
            continue
        var = abs(lit)
        if var in merged:
            b, other = merged[var]
            if other == lit:
                merged[var] = (a + b, lit)
            else:
                # a*l + b*~l == min(a,b) + |a-b| * (dominant literal)
                bound -= min(a, b)
                if a > b:
                    merged[var] = (a - b, lit)
                elif b > a:
                    merged[var] = (b - a, other)
                else:
                    del merged[var]
        else:
            merged[var] = (a, lit)
    out = [(a, lit) for a, lit in merged.values()]
    if bound <= 0:
        return [], bound
    out = [(min(a, bound), lit) for a, lit in out]
    g = 0
    for a, _ in out:
        g = math.gcd(g, a)
    if g > 1:
        out = [(a // g, lit) for a, lit in out]
        bound = ceil_div(bound, g)
    out.sort(key=lambda t: (-t[0], abs(t[1])))
    return out, bound


def geq_forms(constraint):
    """The constraint as a list of ``(terms, bound)`` pairs meaning ``>=``."""
    terms, rel, k = constraint.terms, constraint.relation, constraint.bound
    neg = [(-a, l) for a, l in terms]
    if rel == ">=":
        return [(list(terms), k)]
    if rel == "<=":
        return [(neg, -k)]
    return [(list(terms), k), (neg, -k)]


def pb_to_cnf(constraint, pool):
    """Clauses equisatisfiable with ``constraint`` (projected model count preserved)."""
    clauses = []
    for terms, bound in geq_forms(constraint):
        clauses.extend(_geq_to_cnf(terms, bound, pool))
    return clauses


def _geq_to_cnf(terms, bound, pool):
    terms, k = normalize_geq(terms, bound)
    if k <= 0:
        return []
    total = sum(a for a, _ in terms)
    if total < k:
        return [[]]
    lits = [l for _, l in terms]
    if all(a >= k for a, _ in terms):
        return [lits]
    if all(a == 1 for a, _ in terms):
        return _cardinality_geq(lits, k, pool)
    return _bdd_geq(terms, k, pool)


def _cardinality_geq(lits, k, pool):
    n = len(lits)
    if k >= n:
        return [[l] for l in lits]
    slack = n - k  # at most ``slack`` of the literals may be false
    if slack == 1 and n <= PAIRWISE_LIMIT:
        return pairwise_at_most_one([-l for l in lits])
    if slack <= k:
        return sequential_at_most([-l for l in lits], slack, pool)
    return sequential_at_least(lits, k, pool)


def pairwise_at_most_one(lits):
    return [[-a, -b] for i, a in enumerate(lits) for b in lits[i + 1:]]


def sequential_at_most(lits, u, pool):
    """Sequential counter for ``sum lits <= u`` (``1 <= u < len(lits)``).

    ``s[i][j]`` is forced true when at least ``j + 1`` of the first ``i + 1``
    literals are true.
    """
    n = len(lits)
    if u == 0:
        return [[-l] for l in lits]
    s = [[pool.new_var() for _ in range(u)] for _ in range(n - 1)]
    cl = [[-lits[0], s[0][0]]]
    cl.extend([-s[0][j]] for j in range(1, u))
    for i in range(1, n - 1):
        x = lits[i]
        cl.append([-x, s[i][0]])
        cl.append([-s[i - 1][0], s[i][0]])
        for j in range(1, u):
            cl.append([-x, -s[i - 1][j - 1], s[i][j]])
            cl.append([-s[i - 1][j], s[i][j]])
        cl.append([-x, -s[i - 1][u - 1]])
    cl.append([-lits[n - 1], -s[n - 2][u - 1]])
    return cl


def sequential_at_least(lits, k, pool):
    """Counter for ``sum lits >= k``: ``r[i][j]`` implies ``j + 1`` trues among the first ``i + 1``."""
    n = len(lits)
    r = [[pool.new_var() for _ in range(k)] for _ in range(n)]
    cl = []
    for i in range(n):
        for j in range(k):
            if j > i:
                cl.append([-r[i][j]])
                continue
            prev_same = r[i - 1][j] if i > 0 and j <= i - 1 else None
            prev_less = r[i - 1][j - 1] if i > 0 and j > 0 else None
            # r[i][j] -> r[i-1][j] or lits[i]
            c = [-r[i][j], lits[i]]
            if prev_same is not None:
                c.append(prev_same)
            cl.append(c)
            # r[i][j] -> r[i-1][j] or r[i-1][j-1]   (when j > 0)
            if j > 0:
                c = [-r[i][j], prev_less]
                if prev_same is not None:
                    c.append(prev_same)
                cl.append(c)
    cl.append([r[n - 1][k - 1]])
    return cl


_TRUE = "T"
_FALSE = "F"


def _bdd_geq(terms, k, pool):
    """Interval-memoized BDD for ``sum a_i l_i >= k``.

    Works on the equivalent ``sum a_i y_i <= K`` with ``y_i = ~l_i`` and
    ``K = sum(a) - k``.  Each internal node for selector ``y`` gets clauses
    ``~n | else`` and ``~n | ~y | then``; the root is asserted.
    """
    coefs = [a for a, _ in terms]
    ys = [-l for _, l in terms]
    n = len(coefs)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + coefs[i]
    levels = [([], []) for _ in range(n)]  # per level: sorted starts, (start, end, node)
    nodes = []  # (selector, then, else)

    def build(i, bound):
        if bound < 0:
            return -math.inf, -1, _FALSE
        if bound >= suffix[i]:
            return suffix[i], math.inf, _TRUE
        starts, entries = levels[i]
        pos = bisect.bisect_right(starts, bound) - 1
        if pos >= 0 and entries[pos][1] >= bound:
            return entries[pos]
        b0, g0, low = build(i + 1, bound)
        b1, g1, high = build(i + 1, bound - coefs[i])
        start = max(b0, b1 + coefs[i])
        end = min(g0, g1 + coefs[i])
        if low == high:
            node = low
        else:
            nodes.append((ys[i], high, low))
            node = len(nodes) - 1
        entry = (start, end, node)
        pos = bisect.bisect_left(starts, start)
        starts.insert(pos, start)
        entries.insert(pos, entry)
        return entry

    _, _, root = build(0, suffix[0] - k)
    if root == _TRUE:
        return []
    if root == _FALSE:
        return [[]]
    var = [pool.new_var() for _ in nodes]
    cl = []
    for idx, (y, high, low) in enumerate(nodes):
        me = var[idx]
        if low != _TRUE:
            cl.append([-me, var[low]])
        c = [-me, -y]
        if high != _FALSE:
            c.append(var[high])
        cl.append(c)
    cl.append([var[root]])
    return cl
