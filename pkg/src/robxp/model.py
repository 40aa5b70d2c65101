"""Feature spaces, classifier representations and instances.

A :class:`Classifier` couples a :class:`FeatureSpace` with a decision
function (``body``).  Four body kinds are supported:

* :class:`Linear` -- ``pos`` label iff ``w . x - b >= 0`` (non-strict).
* :class:`Piecewise` -- guarded branches, first matching guard wins.
* :class:`BNN` -- blocks of +-1 weights, integer thresholds, sign
  activations and an argmax output.
* :class:`Lookup` -- explicit table over discrete points plus a default.

Labels are class indices.  :data:`ABSTAIN` is representable so that
counterexample queries can exclude it, but none of the bodies above
ever returns it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import DimensionError, DomainError, TrivialClassifier
from .rational import as_rational


class _Abstain:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ABSTAIN"

    def __reduce__(self):
        return (_Abstain, ())


ABSTAIN = _Abstain()


# --------------------------------------------------------------------------
# Domains
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RealInterval:
    """Closed real interval; ``None`` bounds are infinite."""

    lo: Fraction | None = None
    hi: Fraction | None = None

    discrete = False

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", as_rational(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def normalize(self, value):
        value = as_rational(value)
        if (self.lo is not None and value < self.lo) or (self.hi is not None and value > self.hi):
            raise DomainError(f"{value} outside [{self.lo}, {self.hi}]")
        return value

    @property
    def bounded(self):
        return self.lo is not None and self.hi is not None


@dataclass(frozen=True)
class _Grid:
    """Ordinal discrete domain ``base + k * step`` for ``k = 0 .. levels-1``."""

    discrete = True

    @property
    def base(self):
        raise NotImplementedError

    @property
    def step(self):
        raise NotImplementedError

    @property
    def levels(self):
        raise NotImplementedError

    def value_at(self, k):
        return self.base + k * self.step

    def index_of(self, value):
        value = as_rational(value)
        k = (value - self.base) / self.step
        if k.denominator != 1 or not 0 <= k < self.levels:
            raise DomainError(f"{value} is not a point of {self}")
        return int(k)

    def normalize(self, value):
        return self.value_at(self.index_of(value))

    def values(self):
        return [self.value_at(k) for k in range(self.levels)]


@dataclass(frozen=True)
class IntegerRange(_Grid):
    lo: int
    hi: int

    def __post_init__(self):
        if int(self.lo) != self.lo or int(self.hi) != self.hi:
            raise ValueError("IntegerRange bounds must be integers")
        if self.lo > self.hi:
            raise ValueError(f"empty range [{self.lo}, {self.hi}]")
        object.__setattr__(self, "lo", int(self.lo))
        object.__setattr__(self, "hi", int(self.hi))

    base = property(lambda self: Fraction(self.lo))
    step = property(lambda self: Fraction(1))
    levels = property(lambda self: self.hi - self.lo + 1)


@dataclass(frozen=True)
class Binary(_Grid):
    base = Fraction(0)
    step = Fraction(1)
    levels = 2


@dataclass(frozen=True)
class QuantizedReal(_Grid):
    """Real interval restricted to the grid ``lo, lo+qs, ...`` (up to ``hi``)."""

    lo: Fraction
    hi: Fraction
    qs: Fraction

    def __post_init__(self):
        for name in ("lo", "hi", "qs"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.qs <= 0:
            raise ValueError("quantization step must be positive")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    base = property(lambda self: self.lo)
    step = property(lambda self: self.qs)
    levels = property(lambda self: math.floor((self.hi - self.lo) / self.qs) + 1)


@dataclass(frozen=True)
class Categorical:
    """Unordered finite domain; distinct values are at distance 1."""

    choices: tuple

    discrete = True

    def __post_init__(self):
        object.__setattr__(self, "choices", tuple(self.choices))
        if not self.choices:
            raise ValueError("categorical domain needs at least one value")
        if len(set(self.choices)) != len(self.choices):
            raise ValueError("duplicate categorical values")

    def normalize(self, value):
        if value in self.choices:
            return value
        # "1" from a CSV file should still match the categorical value 1
        for choice in self.choices:
            if str(choice) == str(value):
                return choice
        raise DomainError(f"{value!r} not in {self.choices}")

    def values(self):
        return list(self.choices)

    @property
    def levels(self):
        return len(self.choices)


Domain = RealInterval | IntegerRange | Binary | Categorical | QuantizedReal


def is_grid(domain):
    return isinstance(domain, _Grid)


@dataclass(frozen=True)
class FeatureSpace:
    domains: tuple
    names: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(self.domains))
        if not self.domains:
            raise ValueError("feature space needs at least one feature")
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"x{i + 1}" for i in range(len(self.domains))))
        else:
            object.__setattr__(self, "names", tuple(self.names))
            if len(self.names) != len(self.domains):
                raise ValueError("one name per feature required")

    def __len__(self):
        return len(self.domains)

    @property
    def m(self):
        return len(self.domains)

    @property
    def discrete(self):
        return all(d.discrete for d in self.domains)

    def normalize(self, point):
        """Return ``point`` with every coordinate in canonical (exact) form."""
        point = tuple(point)
        if len(point) != len(self.domains):
            raise DimensionError(f"expected {len(self.domains)} coordinates, got {len(point)}")
        out = []
        for i, (d, value) in enumerate(zip(self.domains, point)):
            try:
                out.append(d.normalize(value))
            except DomainError as exc:
                raise DomainError(f"feature {i + 1}: {exc}") from None
        return tuple(out)

    def contains(self, point):
        try:
            self.normalize(point)
        except (DomainError, DimensionError, ValueError):
            return False
        return True

    def size(self):
        """Number of points of a fully discrete space (``math.inf`` otherwise)."""
        if not self.discrete:
            return math.inf
        return math.prod(d.levels for d in self.domains)


# --------------------------------------------------------------------------
# Classifier bodies
# --------------------------------------------------------------------------


def _numeric(value):
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    raise DomainError(f"non-numeric value {value!r} fed to an arithmetic classifier")


@dataclass(frozen=True)
class Linear:
    """``labels[1]`` iff ``weights . x - bias >= 0``, else ``labels[0]``."""

    weights: tuple
    bias: Fraction
    labels: tuple = (0, 1)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(as_rational(w) for w in self.weights))
        object.__setattr__(self, "bias", as_rational(self.bias))
        object.__setattr__(self, "labels", tuple(int(c) for c in self.labels))
        if len(self.labels) != 2:
            raise ValueError("linear body maps to exactly two labels")

    def score(self, point):
        return sum((w * _numeric(x) for w, x in zip(self.weights, point)), Fraction(0)) - self.bias

    def evaluate(self, point):
        return self.labels[1] if self.score(point) >= 0 else self.labels[0]

    def check(self, space, n_classes):
        if len(self.weights) != space.m:
            raise ValueError(f"linear body has {len(self.weights)} weights for {space.m} features")
        _check_labels(self.labels, n_classes)


@dataclass(frozen=True)
class Guard:
    """Half-space predicate ``weights . x - bias >= 0``."""

    weights: tuple
    bias: Fraction

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(as_rational(w) for w in self.weights))
        object.__setattr__(self, "bias", as_rational(self.bias))

    def holds(self, point):
        return sum((w * _numeric(x) for w, x in zip(self.weights, point)), Fraction(0)) >= self.bias


@dataclass(frozen=True)
class Piecewise:
    """Ordered ``(guard, body)`` branches; a ``None`` guard always matches."""

    branches: tuple

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple((g, b) for g, b in self.branches))

    def evaluate(self, point):
        for guard, body in self.branches:
            if guard is None or guard.holds(point):
                return body.evaluate(point)
        raise DomainError("no piecewise guard matches the point")

    def check(self, space, n_classes):
        if not self.branches or self.branches[-1][0] is not None:
            # guards must cover the space; a trailing catch-all is the only
            # cover that is checkable without a solver
            raise ValueError("last piecewise branch must be unguarded (otherwise)")
        for guard, body in self.branches:
            if guard is not None and len(guard.weights) != space.m:
                raise ValueError("guard arity does not match feature space")
            if isinstance(body, BNN):
                raise ValueError("BNN bodies cannot be nested in a piecewise classifier")
            body.check(space, n_classes)


@dataclass(frozen=True, eq=False)
class BNNLayer:
    """One block: ``+-1`` weight matrix (rows = neurons) and integer thresholds.

    Hidden blocks output ``+1`` where ``W a >= t`` and ``-1`` elsewhere.
    The final block outputs integer class scores ``W a - t``.
    """

    weights: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.int64)
        t = np.asarray(self.thresholds, dtype=np.int64).reshape(-1)
        if w.ndim != 2:
            raise ValueError("layer weights must be a matrix")
        if not np.all(np.abs(w) == 1):
            raise ValueError("BNN weights must be +1 or -1")
        if t.shape[0] != w.shape[0]:
            raise ValueError("one threshold per neuron required")
        w.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "thresholds", t)

    @property
    def n_in(self):
        return self.weights.shape[1]

    @property
    def n_out(self):
        return self.weights.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, BNNLayer)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.thresholds, other.thresholds)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BNN:
    """Binarized network; the last layer is the argmax output block.

    Network inputs are integers derived from the features: a :class:`Binary`
    feature enters as ``-1``/``+1`` (for 0/1), an ordinal grid feature
    (integer range or quantized real) enters as its grid index.
    Argmax ties go to the lowest class index.
    """

    layers: tuple

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if len(self.layers) < 1:
            raise ValueError("BNN needs at least an output layer")
        for a, b in zip(self.layers, self.layers[1:]):
            if a.n_out != b.n_in:
                raise ValueError(f"layer dimensions do not chain ({a.n_out} -> {b.n_in})")

    @property
    def hidden(self):
        return self.layers[:-1]

    @property
    def output(self):
        return self.layers[-1]

    @property
    def n_neurons(self):
        return sum(layer.n_out for layer in self.layers)

    def inputs(self, point, space):
        out = []
        for d, x in zip(space.domains, point):
            if isinstance(d, Binary):
                out.append(1 if x else -1)
            else:
                out.append(d.index_of(x))
        return np.array(out, dtype=np.int64)

    def scores(self, point, space):
        a = self.inputs(point, space)
        for layer in self.hidden:
            a = np.where(layer.weights @ a >= layer.thresholds, 1, -1)
        return self.output.weights @ a - self.output.thresholds

    def evaluate(self, point, space):
        return int(np.argmax(self.scores(point, space)))

    def evaluate_batch(self, inputs):
        """Labels for a matrix of network inputs (one row per point)."""
        a = np.asarray(inputs, dtype=np.int64).T
        for layer in self.hidden:
            a = np.where(layer.weights @ a >= layer.thresholds[:, None], 1, -1)
        s = self.output.weights @ a - self.output.thresholds[:, None]
        return np.argmax(s, axis=0)

    def check(self, space, n_classes):
        if self.layers[0].n_in != space.m:
            raise ValueError(f"BNN takes {self.layers[0].n_in} inputs, space has {space.m} features")
        if self.output.n_out != n_classes:
            raise ValueError("BNN output width must equal the number of classes")
        for d in space.domains:
            if not (isinstance(d, Binary) or is_grid(d)):
                raise ValueError("BNN features must be binary or ordinal grids")

    def __eq__(self, other):
        return isinstance(other, BNN) and self.layers == other.layers

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Lookup:
    """Explicit label table over discrete points; unlisted points get ``default``."""

    table: Mapping
    default: int

    def __post_init__(self):
        object.__setattr__(self, "table", {tuple(k): int(v) for k, v in dict(self.table).items()})
        object.__setattr__(self, "default", int(self.default))

    def evaluate(self, point):
        return self.table.get(tuple(point), self.default)

    def check(self, space, n_classes):
        _check_labels([self.default, *self.table.values()], n_classes)
        for key in self.table:
            if not space.contains(key):
                raise ValueError(f"lookup key {key} is not a point of the space")

    def __eq__(self, other):
        return isinstance(other, Lookup) and self.table == other.table and self.default == other.default

    __hash__ = None


def _check_labels(labels, n_classes):
    for c in labels:
        if not 0 <= c < n_classes:
            raise ValueError(f"label {c} outside class set of size {n_classes}")


@dataclass(frozen=True, eq=False)
class Classifier:
    space: FeatureSpace
    classes: tuple
    body: Linear | Piecewise | BNN | Lookup

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if len(self.classes) < 2:
            raise ValueError("a classifier needs at least two classes")
        if isinstance(self.body, Lookup):
            # keys must be canonical so that lookups by normalized points hit
            table = {self.space.normalize(k): v for k, v in self.body.table.items()}
            object.__setattr__(self, "body", Lookup(table, self.body.default))
        self.body.check(self.space, len(self.classes))

    @property
    def m(self):
        return self.space.m

    @property
    def n_classes(self):
        return len(self.classes)

    def predict(self, points):
        return [evaluate(self, p) for p in points]

    def __eq__(self, other):
        return (
            isinstance(other, Classifier)
            and self.space == other.space
            and self.classes == other.classes
            and self.body == other.body
        )

    __hash__ = None


def evaluate(classifier, point):
    """Label of ``point``; raises :class:`DomainError` outside feature space."""
    point = classifier.space.normalize(point)
    return _evaluate_normalized(classifier, point)


def _evaluate_normalized(classifier, point):
    body = classifier.body
    if isinstance(body, BNN):
        return body.evaluate(point, classifier.space)
    return body.evaluate(point)


@dataclass(frozen=True)
class Instance:
    point: tuple
    label: object

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(self.point))


@dataclass(frozen=True, eq=False)
class ExplanationProblem:
    """A classifier together with an instance ``(v, c)`` where ``c = kappa(v)``."""

    classifier: Classifier
    instance: Instance

    def __post_init__(self):
        v = self.classifier.space.normalize(self.instance.point)
        c = _evaluate_normalized(self.classifier, v)
        if c != self.instance.label:
            raise ValueError(f"instance label {self.instance.label} disagrees with prediction {c}")
        object.__setattr__(self, "instance", Instance(v, c))

    @classmethod
    def at(cls, classifier, point):
        """Problem for ``point`` labelled with the classifier's own prediction."""
        return cls(classifier, Instance(point, evaluate(classifier, point)))

    @property
    def v(self):
        return self.instance.point

    @property
    def c(self):
        return self.instance.label

    @property
    def m(self):
        return self.classifier.m

    @property
    def features(self):
        return frozenset(range(1, self.m + 1))


# --------------------------------------------------------------------------
# Non-triviality
# --------------------------------------------------------------------------


def sample_point(space, rng, spread=1):
    """A random point of ``space``; unbounded reals are drawn near the origin."""
    out = []
    for d in space.domains:
        if isinstance(d, Categorical):
            out.append(d.choices[int(rng.integers(len(d.choices)))])
        elif is_grid(d):
            out.append(d.value_at(int(rng.integers(d.levels))))
        else:
            lo = d.lo if d.lo is not None else (d.hi - 2 * spread if d.hi is not None else -spread)
            hi = d.hi if d.hi is not None else lo + 2 * spread
            out.append(lo + (hi - lo) * Fraction(float(rng.random())))
    return tuple(out)


def is_nontrivial(classifier, search_budget=256, seed=0):
    """Witness pair ``(a, b)`` with different labels.

    Random sampling first; if every sample agrees, a complete oracle query
    asks for any point labelled differently from the first sample.
    Raises :class:`TrivialClassifier` when that query is unsatisfiable.
    """
    rng = np.random.default_rng(seed)
    space = classifier.space
    first = None
    for _ in range(max(1, search_budget)):
        p = space.normalize(sample_point(space, rng))
        label = _evaluate_normalized(classifier, p)
        if first is None:
            first = (p, label)
        elif label != first[1]:
            return first[0], p
    from .robustness import find_aex  # local import: robustness depends on this module

    problem = ExplanationProblem(classifier, Instance(*first))
    other = find_aex(problem, None, frozenset())
    if other is None:
        raise TrivialClassifier("every point of feature space receives the same label")
    return first[0], other
