"""Propositional / pseudo-Boolean encodings of classifiers and robustness queries.

Feature values of one copy of the input (tag ``"x"`` or ``"y"``) are
represented as follows:

* :class:`~robxp.model.Binary` -- one variable, true for value 1;
* :class:`~robxp.model.Categorical` -- one-hot group with exactly-one;
* ordinal grids (integer ranges, quantized reals, and real intervals that a
  query quantizes around the instance) -- the grid index inside a window,
  written in binary, least significant bit first.

A window restricts an ordinal feature to a contiguous block of grid
indices.  Local queries use it to keep huge grids (``qs = 1e-6``) small:
under any l_p with p >= 1 a single coordinate moves at most epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .distance import feature_step
from .errors import DecodeError, EncodingUnsupported
from .model import BNN, Binary, Categorical, Linear, Lookup, Piecewise, RealInterval, is_grid
from .pb import PBConstraint, at_least, at_most, pb_to_cnf
from .rational import as_rational

DEFAULT_QS = Fraction(1, 10**6)


@dataclass
class FeatureVars:
    """Variables of one feature in one copy.

    For ``kind == "bits"`` the value is ``base + (offset + k) * step`` where
    ``k`` is the binary number spelled by ``vars`` and ``0 <= k < span``.
    ``offset`` is also the domain grid index of ``k == 0`` for grid domains.
    """

    kind: str
    vars: list
    domain: object
    base: Fraction = Fraction(0)
    step: Fraction = Fraction(1)
    offset: int = 0
    span: int = 1

    def value_of(self, k):
        return self.base + (self.offset + k) * self.step

    def index_of(self, value):
        """Window index of ``value`` or ``None`` when it is outside the window."""
        q = (as_rational(value) - self.base) / self.step - self.offset
        if q.denominator != 1 or not 0 <= q < self.span:
            return None
        return int(q)


class VarMap:
    """Variable pool plus the bookkeeping needed to decode models into points."""

    def __init__(self):
        self.top = 0
        self.features = {}  # (tag, feature index 0-based) -> FeatureVars
        self.classes = {}  # tag -> {label: literal}
        self.names = {}
        self._true = None

    def new_var(self, name=None):
        self.top += 1
        if name is not None:
            self.names[self.top] = name
        return self.top

    def tags(self):
        return sorted({tag for tag, _ in self.features})

    def feature(self, tag, i):
        return self.features[(tag, i)]

    def input_vars(self, tag):
        out = []
        for (t, i), fv in sorted(self.features.items()):
            if t == tag:
                out.extend(fv.vars)
        return out


@dataclass
class Formula:
    varmap: VarMap = field(default_factory=VarMap)
    clauses: list = field(default_factory=list)
    pb: list = field(default_factory=list)

    def add_clause(self, lits):
        self.clauses.append(list(lits))

    def add_pb(self, constraint):
        if constraint.terms or not _trivially_true(constraint):
            self.pb.append(constraint)

    def true_lit(self):
        vm = self.varmap
        if vm._true is None:
            vm._true = vm.new_var("true")
            self.add_clause([vm._true])
        return vm._true

    @property
    def n_vars(self):
        return self.varmap.top

    def to_cnf(self):
        """``(n_vars, clauses)`` with every PB constraint translated to clauses."""

        class _Pool:
            top = self.varmap.top

            def new_var(pool):
                pool.top += 1
                return pool.top

        pool = _Pool()
        clauses = [list(c) for c in self.clauses]
        for constraint in self.pb:
            clauses.extend(pb_to_cnf(constraint, pool))
        return pool.top, clauses

    def satisfied_by(self, assignment):
        """Check every clause and PB constraint against ``assignment`` (var -> bool)."""
        for clause in self.clauses:
            if not any(assignment.get(abs(l), False) == (l > 0) for l in clause):
                return False
        return all(c.satisfied(assignment) for c in self.pb)


def _trivially_true(constraint):
    return (
        (constraint.relation == ">=" and constraint.bound <= 0)
        or (constraint.relation == "<=" and constraint.bound >= 0)
        or (constraint.relation == "=" and constraint.bound == 0)
    )


# --------------------------------------------------------------------------
# small Tseitin helpers
# --------------------------------------------------------------------------


def _and(formula, lits):
    """Literal equivalent to the conjunction of ``lits``."""
    lits = list(lits)
    if not lits:
        return formula.true_lit()
    if len(lits) == 1:
        return lits[0]
    a = formula.varmap.new_var()
    for l in lits:
        formula.add_clause([-a, l])
    formula.add_clause([a] + [-l for l in lits])
    return a


def _or(formula, lits):
    lits = list(lits)
    if not lits:
        return -formula.true_lit()
    return -_and(formula, [-l for l in lits])


def _bits_needed(span):
    return max(0, (span - 1).bit_length())


def _rational_terms_to_int(terms, const):
    """Scale ``sum c*l + const`` (rational) to integers; returns (terms, const, scale)."""
    den = const.denominator
    for c, _ in terms:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return [(int(c * den), l) for c, l in terms if c != 0], const * den, den


def reify_geq(formula, terms, bound, lit=None):
    """Return a literal ``r`` with ``r <-> sum a*l >= bound`` (integer terms)."""
    lo = sum(a for a, _ in terms if a < 0)
    hi = sum(a for a, _ in terms if a > 0)
    if lo >= bound:
        r = formula.true_lit()
    elif hi < bound:
        r = -formula.true_lit()
    else:
        r = formula.varmap.new_var() if lit is None else lit
        # r -> sum >= bound
        formula.add_pb(PBConstraint.build(list(terms) + [(bound - lo, -r)], ">=", bound))
        # ~r -> sum <= bound - 1, i.e. -sum >= 1 - bound
        neg = [(-a, l) for a, l in terms]
        formula.add_pb(PBConstraint.build(neg + [(1 - bound + hi, r)], ">=", 1 - bound))
        return r
    if lit is not None:
        formula.add_clause([-lit, r])
        formula.add_clause([lit, -r])
        return lit
    return r


# --------------------------------------------------------------------------
# inputs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    """Grid description for one ordinal feature: ``base + (offset + k) * step``."""

    base: Fraction
    step: Fraction
    offset: int
    span: int


def domain_window(domain):
    if isinstance(domain, Binary):
        return None
    if is_grid(domain):
        return Window(domain.base, domain.step, 0, domain.levels)
    if isinstance(domain, RealInterval):
        raise EncodingUnsupported("continuous feature needs a quantization window")
    return None


def clip_window(domain, center, steps, qs=None):
    """Window of grid points within ``steps`` grid steps of ``center``.

    Real intervals are quantized on the grid ``center + j * qs``.
    ``steps=None`` means no distance bound (whole domain).
    """
    if isinstance(domain, RealInterval):
        if qs is None:
            raise EncodingUnsupported("continuous feature needs a quantization step")
        qs = as_rational(qs)
        lo_j = -steps if steps is not None else None
        hi_j = steps if steps is not None else None
        if domain.lo is not None:
            j = math.ceil((domain.lo - center) / qs)
            lo_j = j if lo_j is None else max(lo_j, j)
        if domain.hi is not None:
            j = math.floor((domain.hi - center) / qs)
            hi_j = j if hi_j is None else min(hi_j, j)
        if lo_j is None or hi_j is None:
            raise EncodingUnsupported("unbounded continuous feature without a distance bound")
        return Window(center, qs, lo_j, hi_j - lo_j + 1)
    if not is_grid(domain):
        return None
    k = domain.index_of(center)
    if steps is None:
        return Window(domain.base, domain.step, 0, domain.levels)
    lo = max(0, k - steps)
    hi = min(domain.levels - 1, k + steps)
    return Window(domain.base, domain.step, lo, hi - lo + 1)


def register_inputs(space, tag, formula, windows=None):
    """Create the variables of copy ``tag`` and their domain constraints."""
    windows = windows or {}
    vm = formula.varmap
    for i, d in enumerate(space.domains):
        key = (tag, i)
        if isinstance(d, Binary):
            fv = FeatureVars("bool", [vm.new_var(f"{tag}{i + 1}")], d)
        elif isinstance(d, Categorical):
            choices = [vm.new_var(f"{tag}{i + 1}={c}") for c in d.choices]
            formula.add_pb(at_least(choices, 1))
            formula.add_pb(at_most(choices, 1))
            fv = FeatureVars("onehot", choices, d)
        else:
            w = windows.get(i) or domain_window(d)
            nb = _bits_needed(w.span)
            fv = FeatureVars(
                "bits", [vm.new_var(f"{tag}{i + 1}.b{j}") for j in range(nb)], d,
                w.base, w.step, w.offset, w.span,
            )
            if fv.vars and w.span < (1 << len(fv.vars)):
                formula.add_pb(PBConstraint(tuple((1 << j, v) for j, v in enumerate(fv.vars)), "<=", w.span - 1))
        vm.features[key] = fv
    return [vm.features[(tag, i)] for i in range(space.m)]


def value_literals(fv, value):
    """Literals that together say "this feature equals ``value``" (None if impossible)."""
    if fv.kind == "bool":
        return [fv.vars[0] if value else -fv.vars[0]]
    if fv.kind == "onehot":
        idx = list(fv.domain.choices).index(fv.domain.normalize(value))
        return [fv.vars[idx]]
    k = fv.index_of(value)
    if k is None:
        return None
    return [v if (k >> j) & 1 else -v for j, v in enumerate(fv.vars)]


def _numeric_terms(fv):
    """Feature value as ``(rational terms, rational constant)``."""
    if fv.kind == "bool":
        return [(Fraction(1), fv.vars[0])], Fraction(0)
    if fv.kind == "onehot":
        try:
            terms = [(as_rational(c), v) for c, v in zip(fv.domain.choices, fv.vars)]
        except (TypeError, ValueError):
            raise EncodingUnsupported("arithmetic over non-numeric categorical values") from None
        return terms, Fraction(0)
    terms = [(fv.step * (1 << j), v) for j, v in enumerate(fv.vars)]
    return terms, fv.base + fv.offset * fv.step


def _linear_pb(fvs, weights, bias):
    """Integer ``(terms, bound)`` for ``weights . x - bias >= 0``."""
    terms, const = [], Fraction(0)
    for fv, w in zip(fvs, weights):
        if w == 0:
            continue
        t, c = _numeric_terms(fv)
        terms.extend((w * a, l) for a, l in t)
        const += w * c
    iterms, iconst, _ = _rational_terms_to_int(terms, const - bias)
    return iterms, -iconst


# --------------------------------------------------------------------------
# classifier bodies
# --------------------------------------------------------------------------


def encode_classifier(classifier, tag, formula, windows=None):
    """Encode ``classifier`` on copy ``tag``; returns ``{label: literal}``.

    Inputs of the copy are registered unless already present.  Exactly one
    class literal is true in every model.
    """
    vm = formula.varmap
    if (tag, 0) not in vm.features:
        register_inputs(classifier.space, tag, formula, windows)
    fvs = [vm.features[(tag, i)] for i in range(classifier.m)]
    out = _encode_body(classifier.body, classifier, fvs, formula)
    lits = {c: out.get(c, -formula.true_lit()) for c in range(classifier.n_classes)}
    distinct = {abs(l) for l in lits.values()}
    if len(distinct) == len(lits):
        formula.add_pb(at_least(list(lits.values()), 1))
        formula.add_pb(at_most(list(lits.values()), 1))
    vm.classes[tag] = lits
    return lits


def _encode_body(body, classifier, fvs, formula):
    if isinstance(body, Linear):
        terms, bound = _linear_pb(fvs, body.weights, body.bias)
        r = reify_geq(formula, terms, bound)
        neg, pos = body.labels
        if neg == pos:
            return {pos: formula.true_lit()}
        return {pos: r, neg: -r}
    if isinstance(body, Piecewise):
        return _encode_piecewise(body, classifier, fvs, formula)
    if isinstance(body, Lookup):
        return _encode_lookup(body, classifier, fvs, formula)
    if isinstance(body, BNN):
        return _encode_bnn(body, fvs, formula)
    raise EncodingUnsupported(f"no encoding for {type(body).__name__}")


def _encode_piecewise(body, classifier, fvs, formula):
    earlier = []  # negations of previous guards
    per_label = {}
    for guard, sub in body.branches:
        if guard is None:
            g = None
        else:
            terms, bound = _linear_pb(fvs, guard.weights, guard.bias)
            g = reify_geq(formula, terms, bound)
        sel = _and(formula, earlier + ([g] if g is not None else []))
        for label, lit in _encode_body(sub, classifier, fvs, formula).items():
            per_label.setdefault(label, []).append(_and(formula, [sel, lit]))
        if g is None:
            break
        earlier.append(-g)
    return {label: _or(formula, lits) for label, lits in per_label.items()}


def _encode_lookup(body, classifier, fvs, formula):
    groups = {}
    for point, label in sorted(body.table.items(), key=lambda kv: kv[0]):
        if label == body.default:
            continue
        lits = []
        for fv, value in zip(fvs, point):
            vl = value_literals(fv, value)
            if vl is None:
                lits = None
                break
            lits.extend(vl)
        if lits is not None:
            groups.setdefault(label, []).append(_and(formula, lits))
    out = {label: _or(formula, matches) for label, matches in groups.items()}
    out[body.default] = _and(formula, [-l for l in out.values()])
    return out


def _encode_bnn(body, fvs, formula):
    vm = formula.varmap
    # network inputs as (integer terms, integer constant) per input unit
    units = []
    for fv in fvs:
        if fv.kind == "bool":
            units.append(([(2, fv.vars[0])], -1))
        elif fv.kind == "bits":
            units.append(([(1 << j, v) for j, v in enumerate(fv.vars)], fv.offset))
        else:
            raise EncodingUnsupported("BNN over categorical features")
    for layer in body.hidden:
        nxt = []
        for row, t in zip(layer.weights, layer.thresholds):
            terms, const = _weighted_sum(units, row)
            h = reify_geq(formula, terms, int(t) - const)
            if isinstance(h, int) and abs(h) == vm._true:
                nxt.append(([], 1 if h > 0 else -1))
            else:
                nxt.append(([(2, h)], -1))
        units = nxt
    out = body.output
    k = out.n_out
    ge = {}
    for a in range(k):
        for b in range(a + 1, k):
            row = out.weights[a] - out.weights[b]
            terms, const = _weighted_sum(units, row)
            ge[(a, b)] = reify_geq(formula, terms, int(out.thresholds[a] - out.thresholds[b]) - const)
    lits = {}
    for c in range(k):
        parts = [ge[(c, b)] for b in range(c + 1, k)] + [-ge[(a, c)] for a in range(c)]
        lits[c] = _and(formula, parts)
    return lits


def _weighted_sum(units, row):
    terms, const = {}, 0
    for w, (t, c) in zip(row, units):
        w = int(w)
        if w == 0:
            continue
        const += w * c
        for a, l in t:
            terms[l] = terms.get(l, 0) + w * a
    return [(a, l) for l, a in terms.items() if a != 0], const


# --------------------------------------------------------------------------
# distance and fixed features
# --------------------------------------------------------------------------


def encode_fixed_features(formula, v, fixed, tag="x"):
    """Force the features in ``fixed`` (1-based indices) to their values in ``v``."""
    vm = formula.varmap
    for i in sorted(fixed):
        fv = vm.features[(tag, i - 1)]
        lits = value_literals(fv, v[i - 1])
        if lits is None:
            formula.add_clause([])
            continue
        for l in lits:
            formula.add_clause([l])


def _differs_literal(formula, fv, value):
    """Literal implied true whenever feature ``fv`` differs from constant ``value``."""
    lits = value_literals(fv, value)
    if lits is None:
        return formula.true_lit()
    if len(lits) == 0:
        return -formula.true_lit()
    if len(lits) == 1:
        return -lits[0]
    d = formula.varmap.new_var()
    for l in lits:
        formula.add_clause([l, d])
    return d


def _differs_pair(formula, fx, fy):
    """Literal implied true whenever the two copies of a feature differ."""
    d = formula.varmap.new_var()
    if fx.kind == "bool" or fx.kind == "bits":
        for a, b in zip(fx.vars, fy.vars):
            formula.add_clause([-a, b, d])
            formula.add_clause([a, -b, d])
    else:
        for a, b in zip(fx.vars, fy.vars):
            formula.add_clause([-a, b, d])
    return d


def _bits_sum(fv, sign=1):
    return [(sign * (1 << j), v) for j, v in enumerate(fv.vars)]


def encode_distance(formula, center, spec, tag="x"):
    """Constrain copy ``tag`` to the ball of ``spec`` around ``center``.

    ``center`` is either a point or the tag of another copy.
    """
    vm = formula.varmap
    m = len([k for k in vm.features if k[0] == tag])
    dual = isinstance(center, str)
    if spec.p == 0:
        if spec.budget >= m:
            return
        diffs = []
        for i in range(m):
            fx = vm.features[(tag, i)]
            if dual:
                diffs.append(_differs_pair(formula, fx, vm.features[(center, i)]))
            else:
                diffs.append(_differs_literal(formula, fx, center[i]))
        formula.add_pb(at_most(diffs, spec.budget))
        return
    if spec.p != math.inf:
        raise EncodingUnsupported(f"l{spec.p} balls have no propositional encoding here")
    for i in range(m):
        fx = vm.features[(tag, i)]
        steps = math.floor(spec.epsilon / _step_of(fx))
        if fx.kind in ("bool", "onehot"):
            if steps >= 1:
                continue
            if dual:
                fy = vm.features[(center, i)]
                for a, b in zip(fx.vars, fy.vars):
                    formula.add_clause([-a, b])
                    formula.add_clause([a, -b])
            else:
                for l in value_literals(fx, center[i]):
                    formula.add_clause([l])
            continue
        if dual:
            fy = vm.features[(center, i)]
            if steps >= fx.span - 1 and fx.offset == fy.offset:
                continue
            # (offset_x + kx) - (offset_y + ky) within [-steps, steps]
            diff = _bits_sum(fx) + _bits_sum(fy, -1)
            shift = fx.offset - fy.offset
            formula.add_pb(PBConstraint.build(diff, "<=", steps - shift))
            formula.add_pb(PBConstraint.build(diff, ">=", -steps - shift))
        else:
            kc = (as_rational(center[i]) - fx.base) / fx.step - fx.offset
            if kc.denominator != 1:
                raise EncodingUnsupported(f"center coordinate {i + 1} is off the feature grid")
            lo, hi = int(kc) - steps, int(kc) + steps
            if lo > 0:
                formula.add_pb(PBConstraint(tuple(_bits_sum(fx)), ">=", lo))
            if hi < fx.span - 1:
                formula.add_pb(PBConstraint(tuple(_bits_sum(fx)), "<=", hi))


def _step_of(fv):
    if fv.kind == "bits":
        return fv.step
    return feature_step(fv.domain)


# --------------------------------------------------------------------------
# decoding
# --------------------------------------------------------------------------


def decode(assignment, varmap, tag="x"):
    """Point of copy ``tag`` described by ``assignment`` (var -> bool)."""
    m = len([k for k in varmap.features if k[0] == tag])
    if m == 0:
        raise DecodeError(f"no input variables for copy {tag!r}")
    out = []
    for i in range(m):
        fv = varmap.features[(tag, i)]
        try:
            vals = [assignment[v] for v in fv.vars]
        except KeyError as exc:
            raise DecodeError(f"feature {i + 1}: variable {exc.args[0]} unassigned") from None
        if fv.kind == "bool":
            out.append(Fraction(int(vals[0])))
        elif fv.kind == "onehot":
            hot = [c for c, b in zip(fv.domain.choices, vals) if b]
            if len(hot) != 1:
                raise DecodeError(f"feature {i + 1}: {len(hot)} values selected in one-hot group")
            out.append(hot[0])
        else:
            k = sum(1 << j for j, b in enumerate(vals) if b)
            if k >= fv.span:
                raise DecodeError(f"feature {i + 1}: grid index {k} outside window of {fv.span}")
            out.append(fv.value_of(k))
    return tuple(out)


# --------------------------------------------------------------------------
# queries
# --------------------------------------------------------------------------


def query_windows(space, center, spec, fixed=frozenset(), qs=None):
    """Per-feature windows for a local query around ``center``."""
    windows = {}
    bounded = spec is not None and spec.p != 0
    for i, d in enumerate(space.domains):
        if isinstance(d, (Binary, Categorical)):
            continue
        if (i + 1) in fixed:
            windows[i] = clip_window(d, center[i], 0, qs)
            continue
        steps = None
        if bounded:
            step = as_rational(qs) if isinstance(d, RealInterval) else d.step
            if isinstance(d, RealInterval) and qs is None:
                raise EncodingUnsupported("continuous feature needs a quantization step")
            steps = math.floor(spec.epsilon / step)
        windows[i] = clip_window(d, center[i], steps, qs)
    return windows


def aex_query(problem, spec, fixed=frozenset(), qs=None):
    """Formula whose models are adversarial examples for ``problem``.

    ``spec=None`` drops the distance constraint (any differently labelled point).
    """
    clf = problem.classifier
    formula = Formula()
    windows = query_windows(clf.space, problem.v, spec, fixed, qs)
    register_inputs(clf.space, "x", formula, windows)
    lits = encode_classifier(clf, "x", formula)
    encode_fixed_features(formula, problem.v, fixed, "x")
    if spec is not None:
        encode_distance(formula, problem.v, spec, "x")
    formula.add_clause([-lits[problem.c]])
    return formula


def dual_query(classifier, spec):
    """Formula for two points within ``spec`` of each other with different labels."""
    if any(isinstance(d, RealInterval) for d in classifier.space.domains):
        raise EncodingUnsupported("dual-copy queries need discrete or quantized features")
    formula = Formula()
    for tag in ("x", "y"):
        register_inputs(classifier.space, tag, formula)
    ox = encode_classifier(classifier, "x", formula)
    oy = encode_classifier(classifier, "y", formula)
    encode_distance(formula, "y", spec, "x")
    for c in range(classifier.n_classes):
        formula.add_clause([-ox[c], -oy[c]])
    return formula


# --------------------------------------------------------------------------
# emission
# --------------------------------------------------------------------------


def cnf_text(formula):
    n, clauses = formula.to_cnf()
    lines = [f"p cnf {n} {len(clauses)}"]
    lines.extend(" ".join(map(str, c + [0])) for c in clauses)
    return "\n".join(lines) + "\n"


def _opb_line(terms, relation, bound):
    if relation == "<=":
        terms = [(-a, l) for a, l in terms]
        bound, relation = -bound, ">="
    out = []
    for a, lit in terms:
        if lit < 0:
            # a * ~x == a - a * x
            bound -= a
            a, lit = -a, -lit
        out.append(f"{a:+d} x{lit}")
    return " ".join(out) + f" {relation} {bound} ;"


def pb_text(formula):
    rows = []
    for clause in formula.clauses:
        rows.append(_opb_line([(1, l) for l in clause], ">=", 1))
    for c in formula.pb:
        rows.append(_opb_line(c.terms, c.relation, c.bound))
    head = f"* #variable= {formula.n_vars} #constraint= {len(rows)}"
    return "\n".join([head] + rows) + "\n"


def emit(formula, fmt, path=None):
    """Render ``formula`` as DIMACS CNF (``"cnf"``) or OPB (``"opb"``) text."""
    fmt = fmt.lower()
    if fmt in ("cnf", "dimacs", "cnf-text"):
        text = cnf_text(formula)
    elif fmt in ("opb", "pb", "pb-text"):
        text = pb_text(formula)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
