"""Model files (JSON) and delimiter-separated datasets.

A model file looks like::

    {
      "format": "robxp-model", "version": 1,
      "classes": [0, 1],
      "features": [{"name": "x1", "type": "quantized", "lo": "0", "hi": "1", "qs": "0.25"}],
      "body": {"kind": "linear", "weights": ["0.93198992"], "bias": "0.64735516"}
    }

Feature ``type`` is one of ``real`` (``lo``/``hi`` optional), ``quantized``
(``lo``, ``hi``, ``qs``), ``integer`` (``lo``, ``hi``), ``binary`` and
``categorical`` (``values``).  Body ``kind`` is one of

* ``linear``: ``weights``, ``bias``, optional ``labels`` ``[neg, pos]``;
* ``piecewise``: ``branches``, a list of ``{"guard": {"weights", "bias"} | null, "body": {...}}``;
* ``bnn``: ``layers``, each ``{"weights": [[+-1, ...], ...], "thresholds": [...]}``;
* ``lookup``: ``table`` (list of ``{"point": [...], "label": k}``) and ``default``.

Rational parameters may be JSON numbers or strings such as ``"0.7"`` or
``"1/3"``; the writer always uses exact strings.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .errors import ParseError
from .model import (
    BNN, BNNLayer, Binary, Categorical, Classifier, FeatureSpace, Guard, IntegerRange, Linear, Lookup,
    Piecewise, QuantizedReal, RealInterval,
)
from .rational import as_rational, format_rational, format_value

FORMAT = "robxp-model"
VERSION = 1


class _Reader:
    def __init__(self, data):
        self.data = data

    def get(self, obj, key, path, kind=None, optional=False, default=None):
        if not isinstance(obj, dict):
            raise ParseError("expected an object", path)
        if key not in obj:
            if optional:
                return default
            raise ParseError(f"missing field {key!r}", path)
        value = obj[key]
        where = f"{path}.{key}"
        if kind is not None and not isinstance(value, kind):
            raise ParseError(f"expected {getattr(kind, '__name__', kind)}", where)
        return value

    def rational(self, value, where, optional=False):
        if value is None and optional:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise ParseError("expected a number or numeric string", where)
        try:
            return as_rational(value)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad number {value!r}", where) from None


def loads_model(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return model_from_dict(data)


def model_from_dict(data):
    r = _Reader(data)
    if not isinstance(data, dict):
        raise ParseError("model file must hold a JSON object", "$")
    if data.get("format", FORMAT) != FORMAT:
        raise ParseError(f"unknown format {data.get('format')!r}", "$.format")
    if data.get("version", VERSION) != VERSION:
        raise ParseError(f"unsupported version {data.get('version')!r}", "$.version")
    classes = r.get(data, "classes", "$", list)
    features = r.get(data, "features", "$", list)
    domains, names = [], []
    for k, f in enumerate(features):
        path = f"$.features[{k}]"
        domains.append(_domain(r, f, path))
        names.append(str(r.get(f, "name", path, optional=True, default=f"x{k + 1}")))
    body = _body(r, r.get(data, "body", "$", dict), "$.body")
    try:
        return Classifier(FeatureSpace(domains, names), tuple(classes), body)
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc), "$") from None


def _domain(r, f, path):
    kind = r.get(f, "type", path, str)
    try:
        if kind == "real":
            return RealInterval(
                r.rational(f.get("lo"), f"{path}.lo", optional=True),
                r.rational(f.get("hi"), f"{path}.hi", optional=True),
            )
        if kind == "quantized":
            return QuantizedReal(
                r.rational(r.get(f, "lo", path), f"{path}.lo"),
                r.rational(r.get(f, "hi", path), f"{path}.hi"),
                r.rational(r.get(f, "qs", path), f"{path}.qs"),
            )
        if kind == "integer":
            return IntegerRange(r.get(f, "lo", path, int), r.get(f, "hi", path, int))
        if kind == "binary":
            return Binary()
        if kind == "categorical":
            return Categorical(tuple(r.get(f, "values", path, list)))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), path) from None
    raise ParseError(f"unknown feature type {kind!r}", f"{path}.type")


def _vector(r, values, path):
    if not isinstance(values, list):
        raise ParseError("expected a list", path)
    return [r.rational(v, f"{path}[{k}]") for k, v in enumerate(values)]


def _body(r, b, path):
    kind = r.get(b, "kind", path, str)
    if kind == "linear":
        labels = r.get(b, "labels", path, list, optional=True, default=[0, 1])
        return Linear(
            _vector(r, r.get(b, "weights", path), f"{path}.weights"),
            r.rational(r.get(b, "bias", path), f"{path}.bias"),
            labels,
        )
    if kind == "piecewise":
        branches = []
        for k, br in enumerate(r.get(b, "branches", path, list)):
            bp = f"{path}.branches[{k}]"
            g = r.get(br, "guard", bp, optional=True)
            guard = None
            if g is not None:
                guard = Guard(
                    _vector(r, r.get(g, "weights", f"{bp}.guard"), f"{bp}.guard.weights"),
                    r.rational(r.get(g, "bias", f"{bp}.guard"), f"{bp}.guard.bias"),
                )
            branches.append((guard, _body(r, r.get(br, "body", bp, dict), f"{bp}.body")))
        return Piecewise(branches)
    if kind == "bnn":
        layers = []
        for k, layer in enumerate(r.get(b, "layers", path, list)):
            lp = f"{path}.layers[{k}]"
            try:
                layers.append(BNNLayer(r.get(layer, "weights", lp, list), r.get(layer, "thresholds", lp, list)))
            except (ValueError, TypeError) as exc:
                raise ParseError(str(exc), lp) from None
        try:
            return BNN(layers)
        except ValueError as exc:
            raise ParseError(str(exc), f"{path}.layers") from None
    if kind == "lookup":
        table = {}
        for k, row in enumerate(r.get(b, "table", path, list)):
            rp = f"{path}.table[{k}]"
            point = tuple(_cell(v) for v in r.get(row, "point", rp, list))
            table[point] = r.get(row, "label", rp, int)
        return Lookup(table, r.get(b, "default", path, int))
    raise ParseError(f"unknown body kind {kind!r}", f"{path}.kind")


def _cell(v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return as_rational(v)
    if isinstance(v, str):
        try:
            return as_rational(v)
        except (ValueError, ZeroDivisionError):
            return v
    return v


def load_model(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read model file: {exc.strerror}", str(path)) from None
    return loads_model(text)


# --------------------------------------------------------------------------
# writing
# --------------------------------------------------------------------------


def _num(x):
    return format_rational(x)


def _domain_dict(d, name):
    if isinstance(d, RealInterval):
        out = {"type": "real"}
        if d.lo is not None:
            out["lo"] = _num(d.lo)
        if d.hi is not None:
            out["hi"] = _num(d.hi)
    elif isinstance(d, QuantizedReal):
        out = {"type": "quantized", "lo": _num(d.lo), "hi": _num(d.hi), "qs": _num(d.qs)}
    elif isinstance(d, IntegerRange):
        out = {"type": "integer", "lo": d.lo, "hi": d.hi}
    elif isinstance(d, Binary):
        out = {"type": "binary"}
    elif isinstance(d, Categorical):
        out = {"type": "categorical", "values": [c if isinstance(c, (int, str)) else format_value(c) for c in d.choices]}
    else:
        raise TypeError(f"cannot serialize domain {d!r}")
    return {"name": name, **out}


def _body_dict(b):
    if isinstance(b, Linear):
        return {
            "kind": "linear",
            "weights": [_num(w) for w in b.weights],
            "bias": _num(b.bias),
            "labels": list(b.labels),
        }
    if isinstance(b, Piecewise):
        return {
            "kind": "piecewise",
            "branches": [
                {
                    "guard": None if g is None else {"weights": [_num(w) for w in g.weights], "bias": _num(g.bias)},
                    "body": _body_dict(sub),
                }
                for g, sub in b.branches
            ],
        }
    if isinstance(b, BNN):
        return {
            "kind": "bnn",
            "layers": [
                {"weights": layer.weights.tolist(), "thresholds": layer.thresholds.tolist()} for layer in b.layers
            ],
        }
    if isinstance(b, Lookup):
        return {
            "kind": "lookup",
            "table": [
                {"point": [format_value(x) for x in k], "label": v} for k, v in sorted(b.table.items(), key=repr)
            ],
            "default": b.default,
        }
    raise TypeError(f"cannot serialize body {b!r}")


def model_to_dict(classifier):
    space = classifier.space
    return {
        "format": FORMAT,
        "version": VERSION,
        "classes": list(classifier.classes),
        "features": [_domain_dict(d, n) for d, n in zip(space.domains, space.names)],
        "body": _body_dict(classifier.body),
    }


def dumps_model(classifier):
    return json.dumps(model_to_dict(classifier), indent=1) + "\n"


def save_model(classifier, path):
    Path(path).write_text(dumps_model(classifier))


# --------------------------------------------------------------------------
# datasets
# --------------------------------------------------------------------------


def load_dataset(path, label_column=-1, delimiter=None):
    """``(header, rows, labels)`` from a delimited file with a header row.

    ``label_column`` is a column name or index (default: last column).
    The delimiter is sniffed when not given.
    """
    text = Path(path).read_text()
    if not text.strip():
        raise ParseError("empty dataset", str(path))
    if delimiter is None:
        try:
            delimiter = csv.Sniffer().sniff(text.splitlines()[0], delimiters=",;\t ").delimiter
        except csv.Error:
            delimiter = ","
    reader = csv.reader(text.splitlines(), delimiter=delimiter)
    header = [h.strip() for h in next(reader)]
    if isinstance(label_column, str):
        if label_column not in header:
            raise ParseError(f"no column named {label_column!r}", f"{path}: line 1")
        label_idx = header.index(label_column)
    else:
        label_idx = label_column % len(header)
    rows, labels = [], []
    for lineno, raw in enumerate(reader, 2):
        if not raw or all(not c.strip() for c in raw):
            continue
        if len(raw) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(raw)}", f"{path}: line {lineno}")
        cells = [_cell(c.strip()) for c in raw]
        labels.append(cells[label_idx])
        rows.append(tuple(c for k, c in enumerate(cells) if k != label_idx))
    features = [h for k, h in enumerate(header) if k != label_idx]
    return features, rows, labels


__all__ = [
    "load_model", "save_model", "loads_model", "dumps_model", "model_to_dict", "model_from_dict",
    "load_dataset",
]
