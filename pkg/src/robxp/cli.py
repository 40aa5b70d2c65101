"""Command-line front end.

Exit codes: 0 robust / success, 10 not robust, 20 unknown (solver budget),
2 configuration error, 3 trivial (constant) classifier.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import modelio
from .distance import INF, DistanceSpec, distance, minimum_meaningful_epsilon, norm_name, within_ball
from .errors import (
    EncodingUnsupported, NotApplicable, OracleUnknown, ParseError, PrecisionError, RobxpError,
    TrivialClassifier,
)
from .explain import enumerate_explanations, find_axp, find_cxp
from .fixtures import KAPPA1_TRAINING, build_kappa1, build_kappa2, random_bnn
from .model import BNN, ExplanationProblem, Instance, evaluate
from .oracle import SOLVER_ENV
from .rational import as_rational, format_rational
from .robustness import (
    NoAExFound, OracleConfig, OracleStats, SamplingConfig, Status3, certify_demo,
    find_global_counterexample, find_transition_point, is_locally_robust, local_flip_threshold,
    uniform_points,
)

EXIT_OK = 0
EXIT_NOT_ROBUST = 10
EXIT_UNKNOWN = 20
EXIT_CONFIG = 2
EXIT_TRIVIAL = 3

TABLE_COLUMNS = ["model", "m", "K", "D", "#N", "p", "eps", "AEx", "time", "note"]


class ConfigError(Exception):
    pass


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, float) and obj == INF:
        return "inf"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in obj]
        return sorted(items, key=repr) if isinstance(obj, (set, frozenset)) else items
    return obj


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k not in ("time", "seconds")}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


def _coord_text(x):
    if not isinstance(x, Fraction):
        return str(x)
    text = format_rational(x)
    # long exact expansions (bisection points) are shown rounded; JSON keeps them exact
    return text if len(text) <= 20 else f"~{float(x):.12g}"


def _point_text(point):
    return "(" + ", ".join(_coord_text(x) for x in point) + ")"


def _set_text(s):
    return "{" + ", ".join(str(i) for i in sorted(s)) + "}"


def _load_classifier(spec, qs=None):
    if spec is None:
        raise ConfigError("--model is required")
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        builders = {"kappa1": build_kappa1, "kappa2": build_kappa2}
        if name not in builders:
            raise ConfigError(f"unknown built-in model {name!r} (kappa1, kappa2)")
        return builders[name](qs)
    try:
        return modelio.load_model(spec)
    except ParseError as exc:
        raise ConfigError(f"model {spec}: {exc}") from None


def _parse_point(text):
    out = []
    for cell in text.replace(";", ",").split(","):
        cell = cell.strip()
        if not cell:
            raise ConfigError(f"empty coordinate in --point {text!r}")
        try:
            out.append(as_rational(cell))
        except (ValueError, ZeroDivisionError):
            out.append(cell)
    return tuple(out)


def _instance(args, clf):
    if args.point is not None:
        point = _parse_point(args.point)
    elif args.dataset is not None:
        if args.row is None:
            raise ConfigError("--dataset needs --row")
        try:
            _, rows, _ = modelio.load_dataset(args.dataset, args.label_column)
        except (OSError, ParseError) as exc:
            raise ConfigError(f"dataset: {exc}") from None
        if not 0 <= args.row < len(rows):
            raise ConfigError(f"--row {args.row} outside dataset of {len(rows)} rows")
        point = rows[args.row]
    else:
        raise ConfigError("give --point or --dataset/--row")
    try:
        return ExplanationProblem.at(clf, point)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"instance: {exc}") from None


def _distance_spec(args, clf, require_positive=True):
    try:
        p = DistanceSpec(args.norm, 0).p
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.eps is None:
        raise ConfigError("--eps is required")
    if args.eps == "step":
        try:
            eps = minimum_meaningful_epsilon(clf.space, p)
        except NotApplicable as exc:
            raise ConfigError(f"--eps step: {exc}") from None
    else:
        try:
            eps = as_rational(args.eps)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad --eps {args.eps!r}") from None
    if eps < 0 or (require_positive and eps == 0):
        raise ConfigError("--eps must be positive")
    return DistanceSpec(p, eps)


def _oracle(args, backend="auto"):
    solver = None
    choice = getattr(args, "solver", "embedded") or "embedded"
    if choice == "external":
        solver = os.environ.get(SOLVER_ENV)
        if not solver:
            raise ConfigError(f"--solver external needs ${SOLVER_ENV}")
    elif choice.startswith("cmd:"):
        solver = choice[4:]
        if not solver:
            raise ConfigError("--solver cmd: needs a command")
    elif choice != "embedded":
        raise ConfigError(f"unknown --solver {choice!r}")
    qs = None
    if getattr(args, "qs", None) is not None:
        qs = as_rational(args.qs)
        if qs <= 0:
            raise ConfigError("--qs must be positive")
    return OracleConfig(
        backend=backend,
        qs=qs,
        solver=solver,
        max_conflicts=args.limit_conflicts,
        time_limit=args.limit_time,
    )


def _continuous(clf):
    return not clf.space.discrete


def _structure(clf):
    body = clf.body
    if isinstance(body, BNN):
        return len(body.hidden), body.n_neurons
    return 0, 0


class Output:
    """Collects one command's report and renders it in the requested format."""

    def __init__(self, args):
        self.fmt = args.format
        self.deterministic = args.deterministic
        self.out = args.out
        self.lines = []
        self.data = {}
        self.rows = []

    def say(self, text=""):
        self.lines.append(text)

    def render(self):
        if self.fmt == "json":
            data = _jsonable(self.data)
            if self.deterministic:
                data = _strip_timing(data)
            return json.dumps(data, sort_keys=True, indent=1) + "\n"
        if self.fmt == "csv":
            buf = io.StringIO()
            cols = self.columns
            if self.deterministic:
                cols = [c for c in cols if c != "time"]
            buf.write(",".join(cols) + "\n")
            for row in self.rows:
                buf.write(",".join(_csv_cell(row.get(c, "")) for c in cols) + "\n")
            return buf.getvalue()
        return "\n".join(self.lines) + "\n"

    columns = TABLE_COLUMNS

    def flush(self, stream):
        text = self.render()
        if self.out:
            Path(self.out).write_text(text)
        else:
            stream.write(text)


def _csv_cell(value):
    value = _jsonable(value)
    if isinstance(value, list):
        value = " ".join(str(v) for v in value)
    text = "" if value is None else str(value)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def _fmt_time(seconds, det):
    return "-" if det else f"{seconds:.3f}s"


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_robust(args, out):
    clf = _load_classifier(args.model, args.qs if args.quantize_model else None)
    problem = _instance(args, clf)
    spec = _distance_spec(args, clf)
    oracle = _oracle(args)
    t0 = time.perf_counter()
    verdict = is_locally_robust(problem, spec, oracle=oracle)
    elapsed = time.perf_counter() - t0
    report = {
        "command": "robust",
        "model": args.model,
        "point": list(problem.v),
        "label": problem.c,
        "norm": norm_name(spec.p),
        "eps": spec.epsilon,
        "verdict": verdict.status.value,
        "witness": None,
        "oracle": {"calls": verdict.stats.calls, "sat_calls": verdict.stats.sat_calls,
                   "conflicts": verdict.stats.conflicts},
        "time": elapsed,
    }
    if verdict.witness is not None:
        w = verdict.witness
        if evaluate(clf, w) == problem.c or not within_ball(w, problem.v, spec, clf.space):
            raise AssertionError("witness failed re-verification")
        report["witness"] = list(w)
        report["witness_label"] = evaluate(clf, w)
        report["distance"] = distance(w, problem.v, spec.p, clf.space) if spec.p != 2 else None
    if verdict.status is Status3.UNKNOWN:
        report["reason"] = verdict.reason
    cross = None
    if _continuous(clf) and spec.p in (0, INF):
        # the same query on the quantized grid, as a cross-check of the exact answer
        qs = oracle.qs or Fraction(1, 10**6)
        cross_oracle = OracleConfig("sat", qs, oracle.solver, oracle.fmt, oracle.max_conflicts, oracle.time_limit)
        cv = is_locally_robust(problem, spec, oracle=cross_oracle)
        cross = {"qs": qs, "verdict": cv.status.value, "agrees": cv.status is verdict.status}
        report["cross_check"] = cross
    out.data = report
    out.say(f"model {args.model}, instance {_point_text(problem.v)} -> class {problem.c}")
    out.say(f"ball {norm_name(spec.p)} <= {format_rational(spec.epsilon)}: {verdict.status.value}")
    if verdict.witness is not None:
        out.say(f"witness {_point_text(verdict.witness)} -> class {report['witness_label']} (verified)")
    if verdict.reason:
        out.say(f"reason: {verdict.reason}")
    if cross is not None:
        out.say(f"quantized cross-check (qs={format_rational(cross['qs'])}): {cross['verdict']}")
    out.say(f"oracle calls {verdict.stats.calls}, conflicts {verdict.stats.conflicts}, "
            f"time {_fmt_time(elapsed, args.deterministic)}")
    out.columns = ["model", "point", "norm", "eps", "verdict", "witness", "time"]
    out.rows = [{"model": args.model, "point": list(problem.v), "norm": norm_name(spec.p), "eps": spec.epsilon,
                 "verdict": verdict.status.value, "witness": report["witness"] or "", "time": f"{elapsed:.4f}"}]
    return {Status3.ROBUST: EXIT_OK, Status3.NOT_ROBUST: EXIT_NOT_ROBUST}.get(verdict.status, EXIT_UNKNOWN)


def global_row(clf, name, spec, oracle):
    """One Table-1 style row for ``clf``; raises on trivial classifiers."""
    depth, neurons = _structure(clf)
    row = {"model": name, "m": clf.m, "K": clf.n_classes, "D": depth, "#N": neurons,
           "p": norm_name(spec.p), "eps": spec.epsilon}
    stats = OracleStats()
    t0 = time.perf_counter()
    try:
        pair = find_global_counterexample(clf, spec, oracle, stats)
    except OracleUnknown as exc:
        row.update(AEx="Unknown", note=str(exc))
        pair = None
    else:
        row["AEx"] = "Yes" if pair is not None else "No"
    row["time"] = time.perf_counter() - t0
    row["conflicts"] = stats.conflicts
    if pair is not None:
        v, x = pair
        cv, cx = evaluate(clf, v), evaluate(clf, x)
        if cv == cx or not within_ball(x, v, spec, clf.space):
            raise AssertionError("counterexample failed re-verification")
        row.update(v=list(v), x=list(x), label_v=cv, label_x=cx)
        if spec.p != 2:
            row["distance"] = distance(v, x, spec.p, clf.space)
    return row


def cmd_global(args, out):
    clf = _load_classifier(args.model, args.qs if args.quantize_model else None)
    spec = _distance_spec(args, clf)
    oracle = _oracle(args)
    row = global_row(clf, args.model, spec, oracle)
    report = {"command": "global", **row}
    if "v" in row and _continuous(clf) and all(isinstance(a, Fraction) for a in row["v"]):
        report["transition_point"] = [(a + b) / 2 for a, b in zip(row["v"], row["x"])]
    out.data = report
    out.rows = [{**row, "time": f"{row['time']:.4f}"}]
    out.say(f"model {args.model}: m={row['m']} K={row['K']} D={row['D']} #N={row['#N']}")
    out.say(f"global query {norm_name(spec.p)} <= {format_rational(spec.epsilon)}: AEx={row['AEx']}")
    if "v" in row:
        out.say(f"  v = {_point_text(row['v'])} -> class {row['label_v']}")
        out.say(f"  x = {_point_text(row['x'])} -> class {row['label_x']} (verified)")
    if "transition_point" in report:
        out.say(f"  transition near {_point_text(report['transition_point'])}")
    out.say(f"time {_fmt_time(row['time'], args.deterministic)}")
    if row["AEx"] == "Unknown":
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_explain(args, out):
    clf = _load_classifier(args.model, args.qs if args.quantize_model else None)
    problem = _instance(args, clf)
    spec = _distance_spec(args, clf, require_positive=False)
    oracle = _oracle(args)
    stats = OracleStats()
    ctx = {"norm": norm_name(spec.p), "eps": spec.epsilon}
    report = {"command": f"explain-{args.kind}", "model": args.model, "point": list(problem.v),
              "label": problem.c, **ctx}
    code = EXIT_OK
    t0 = time.perf_counter()
    try:
        if args.kind == "axp":
            e = find_axp(problem, spec, oracle=oracle, stats=stats)
            report["explanations"] = [{"kind": e.kind, "features": sorted(e.features), "calls": e.calls, **ctx}]
            report["complete"] = True
        elif args.kind == "cxp":
            try:
                e = find_cxp(problem, spec, oracle=oracle, stats=stats)
                report["explanations"] = [{"kind": e.kind, "features": sorted(e.features), "calls": e.calls, **ctx}]
            except ValueError:
                report["explanations"] = []
                report["note"] = "no adversarial example in the ball, so no CXp"
            report["complete"] = True
        else:
            listing = enumerate_explanations(problem, spec, args.limit, oracle)
            stats.calls = listing.calls
            items = [{"kind": "AXp", "features": sorted(s), **ctx} for s in sorted(listing.axps, key=sorted)]
            items += [{"kind": "CXp", "features": sorted(s), **ctx} for s in sorted(listing.cxps, key=sorted)]
            report["explanations"] = items
            report["complete"] = listing.complete
            if listing.reason:
                report["note"] = listing.reason
            if listing.reason and listing.reason.startswith("oracle unknown"):
                code = EXIT_UNKNOWN
    except OracleUnknown as exc:
        report["explanations"] = []
        report["complete"] = False
        report["note"] = f"oracle unknown: {exc}"
        code = EXIT_UNKNOWN
    report["oracle_calls"] = stats.calls
    report["time"] = time.perf_counter() - t0
    out.data = report
    out.columns = ["kind", "features", "norm", "eps"]
    out.rows = report["explanations"]
    out.say(f"model {args.model}, instance {_point_text(problem.v)} -> class {problem.c}, "
            f"{norm_name(spec.p)} <= {format_rational(spec.epsilon)}")
    for item in report["explanations"]:
        out.say(f"  {item['kind']} {_set_text(item['features'])}")
    if not report["explanations"]:
        out.say("  (none)")
    if "note" in report:
        out.say(f"  note: {report['note']}")
    out.say(f"complete: {'yes' if report['complete'] else 'no'}; oracle calls {stats.calls}")
    return code


def cmd_demo(args, out):
    """Re-derive the running examples and the robustness refutations."""
    det = args.deterministic
    k1, k2 = build_kappa1(), build_kappa2()
    data = {"command": "demo"}
    say = out.say

    say("== first classifier: ITE(0.93198992*x1 - 0.64735516 >= 0, 1, 0)")
    acc = [(x, c, evaluate(k1, (x,))) for x, c in KAPPA1_TRAINING]
    data["training"] = [{"x": as_rational(x), "label": c, "predicted": p} for x, c, p in acc]
    say("training accuracy: %d/%d" % (sum(c == p for _, c, p in acc), len(acc)))

    z = find_transition_point(k1, (0.4,), (0.7,), Fraction(1, 10**9))[0]
    data["transition_point"] = z
    say(f"transition point between 0.4 and 0.7: {float(z):.8f}")

    E = ExplanationProblem(k1, Instance((0.7,), 1))
    flip = local_flip_threshold(E)
    data["flip_threshold"] = flip
    say(f"smallest l_inf radius with an adversarial example at 0.7: {float(flip):.8f}")
    local = {}
    for eps in ("0.1", "0.006", "0.005"):
        verdict = is_locally_robust(E, DistanceSpec(INF, eps))
        local[eps] = {"verdict": verdict.status.value, "witness": verdict.witness}
        extra = f", witness {_point_text(verdict.witness)}" if verdict.witness else ""
        say(f"  eps={eps}: {verdict.status.value}{extra}")
    data["local"] = local

    say("== second classifier at ((0, 1), 0)")
    E2 = ExplanationProblem(k2, Instance((0, 1), 0))
    expl = {}
    for label, spec in (("linf 0.5", DistanceSpec(INF, "0.5")), ("linf 0.7", DistanceSpec(INF, "0.7")),
                        ("l0 m", DistanceSpec(0, 2))):
        listing = enumerate_explanations(E2, spec)
        expl[label] = {"axps": [sorted(s) for s in listing.axps], "cxps": [sorted(s) for s in listing.cxps],
                       "complete": listing.complete}
        say(f"  {label}: AXps {[_set_text(s) for s in sorted(listing.axps, key=sorted)]}, "
            f"CXps {[_set_text(s) for s in sorted(listing.cxps, key=sorted)]}")
    data["explanations"] = expl

    say("== global robustness on the quantized first classifier (qs = 1e-6)")
    q1 = build_kappa1(qs=Fraction(1, 10**6))
    glob = {}
    for eps in ("0.0001", "0.01", "0.1"):
        t0 = time.perf_counter()
        v, x = find_global_counterexample(q1, DistanceSpec(INF, eps))
        glob[eps] = {"v": v, "x": x, "labels": [evaluate(q1, v), evaluate(q1, x)],
                     "time": time.perf_counter() - t0}
        say(f"  eps={eps}: {_point_text(v)} -> {evaluate(q1, v)}, {_point_text(x)} -> {evaluate(q1, x)} "
            f"({_fmt_time(glob[eps]['time'], det)})")
    data["global"] = glob

    say("== sampling versus complete reasoning (eps = 0.005 at the training points)")
    report = certify_demo(k1, DistanceSpec(INF, "0.005"), [(x,) for x, _ in KAPPA1_TRAINING],
                          SamplingConfig(n=200, seed=args.seed))
    rows = []
    for r in report.rows:
        sampled = "NoAExFound" if isinstance(r.sampled, NoAExFound) else "AExFound"
        rows.append({"point": r.point, "label": r.label, "sampled": sampled, "complete": r.complete.status.value})
        say(f"  {_point_text(r.point)}: sampled {sampled}, complete {r.complete.status.value}")
    data["certify"] = {"rows": rows, "counterexample": report.counterexample, "transition": report.transition}
    v, x = report.counterexample
    say(f"  yet {_point_text(v)} and {_point_text(x)} lie within 0.005 with different classes:")
    say("  no radius certifies the classifier everywhere")

    say("== uniform sampling at 1000 points of [0, 1], eps = 1e-4")
    pts = uniform_points(1000, 0, 1, seed=args.seed)
    big = certify_demo(k1, DistanceSpec(INF, "0.0001"), pts, SamplingConfig(n=20, seed=args.seed))
    n_clean = sum(isinstance(r.sampled, NoAExFound) for r in big.rows)
    n_robust = sum(r.complete.status is Status3.ROBUST for r in big.rows)
    data["sampling"] = {"points": len(pts), "sampled_no_aex": n_clean, "complete_robust": n_robust,
                        "counterexample": big.counterexample}
    say(f"  sampling found no AEx at {n_clean}/{len(pts)} points; complete check: {n_robust} robust")
    say(f"  counterexample pair {_point_text(big.counterexample[0])}, {_point_text(big.counterexample[1])}")
    out.data = data
    out.columns = ["point", "label", "sampled", "complete"]
    out.rows = rows
    return EXIT_OK


def cmd_bench(args, out):
    directory = Path(args.directory)
    if not directory.is_dir():
        raise ConfigError(f"{directory} is not a directory")
    oracle = _oracle(args)
    rows = []
    for path in sorted(directory.glob("*.json")):
        try:
            clf = modelio.load_model(path)
        except ParseError as exc:
            rows.append({"model": path.name, "AEx": "error", "note": str(exc)})
            continue
        for norm in args.norms:
            p = DistanceSpec(norm, 0).p
            try:
                eps = minimum_meaningful_epsilon(clf.space, p) if args.eps in (None, "step") else as_rational(args.eps)
                row = global_row(clf, path.name, DistanceSpec(p, eps), oracle)
            except (TrivialClassifier, RobxpError, ValueError) as exc:
                row = {"model": path.name, "p": norm_name(p), "AEx": "error", "note": f"{type(exc).__name__}: {exc}"}
            rows.append(row)
    out.data = {"command": "bench", "rows": rows}
    out.rows = [{**r, "time": f"{r['time']:.4f}" if "time" in r else ""} for r in rows]
    out.say("  ".join(c for c in TABLE_COLUMNS if c != "note"))
    for r in rows:
        eps = r.get("eps")
        t = _fmt_time(r["time"], args.deterministic) if "time" in r else "-"
        out.say("  ".join(str(x) for x in (r.get("model"), r.get("m", "-"), r.get("K", "-"), r.get("D", "-"),
                                          r.get("#N", "-"), r.get("p", "-"),
                                          format_rational(eps) if eps is not None else "-", r.get("AEx"), t)))
    return EXIT_OK


def cmd_gen_bnn(args, out):
    target = Path(args.out_dir)
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for seed in range(args.seed, args.seed + args.count):
        clf = random_bnn(seed, levels=args.levels)
        path = target / f"bnn_{seed:04d}.json"
        modelio.save_model(clf, path)
        written.append(str(path))
    out.data = {"command": "gen-bnn", "files": written}
    out.say("\n".join(written))
    out.columns = ["file"]
    out.rows = [{"file": w} for w in written]
    return EXIT_OK


def cmd_fixture(args, out):
    qs = as_rational(args.qs) if args.qs is not None else None
    clf = {"kappa1": build_kappa1, "kappa2": build_kappa2}[args.name](qs)
    text = modelio.dumps_model(clf)
    if args.out:
        Path(args.out).write_text(text)
        out.out = None
        out.say(f"wrote {args.out}")
        out.fmt = "human"
    else:
        out.lines = [text.rstrip("\n")]
        out.fmt = "human"
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _common(p, instance=True, query=True):
    p.add_argument("--model", help="model file, or builtin:kappa1 / builtin:kappa2")
    if instance:
        p.add_argument("--point", help="comma-separated instance values")
        p.add_argument("--dataset", help="delimited file with a header row")
        p.add_argument("--row", type=int, help="0-based data row of --dataset")
        p.add_argument("--label-column", default=-1, help="label column name or index (default: last)")
    if query:
        p.add_argument("--norm", default="linf", help="l0, l1, l2 or linf (default linf)")
        p.add_argument("--eps", help="ball radius; 'step' = smallest meaningful radius")
        p.add_argument("--quantize-model", action="store_true",
                       help="for built-in models, put features on the --qs grid")
    _runtime(p)


def _runtime(p):
    p.add_argument("--qs", help="quantization step for real features on the solver route")
    p.add_argument("--solver", default="embedded", help="embedded, external ($%s) or cmd:<command>" % SOLVER_ENV)
    p.add_argument("--limit-time", type=float, help="solver time limit per query (seconds)")
    p.add_argument("--limit-conflicts", type=int, help="solver conflict limit per query")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("human", "json", "csv"), default="human")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--deterministic", action="store_true", help="omit timings from the report")


def build_parser():
    parser = argparse.ArgumentParser(prog="robxp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("robust", help="decide local robustness at one instance")
    _common(p)
    p.set_defaults(func=cmd_robust)
    p = sub.add_parser("global", help="search a counterexample to global robustness")
    _common(p, instance=False)
    p.set_defaults(func=cmd_global)
    p = sub.add_parser("explain", help="abductive / contrastive explanations")
    p.add_argument("kind", choices=("axp", "cxp", "enumerate"))
    p.add_argument("--limit", type=int, help="stop enumeration after this many explanations")
    _common(p)
    p.set_defaults(func=cmd_explain)
    p = sub.add_parser("demo", help="re-derive the running examples")
    _runtime(p)
    p.set_defaults(func=cmd_demo)
    p = sub.add_parser("bench", help="global queries over a directory of models")
    p.add_argument("directory")
    p.add_argument("--norms", nargs="+", default=["l0", "linf"])
    p.add_argument("--eps", help="radius for every row (default: smallest meaningful radius)")
    _runtime(p)
    p.set_defaults(func=cmd_bench)
    p = sub.add_parser("gen-bnn", help="write seeded random BNN model files")
    p.add_argument("out_dir")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--levels", type=int, default=4, help="grid points per input feature")
    _runtime(p)
    p.set_defaults(func=cmd_gen_bnn)
    p = sub.add_parser("fixture", help="print a built-in model as a model file")
    p.add_argument("name", choices=("kappa1", "kappa2"))
    _runtime(p)
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    out = Output(args)
    try:
        code = args.func(args, out)
    except ConfigError as exc:
        print(f"robxp: {exc}", file=stderr)
        return EXIT_CONFIG
    except TrivialClassifier as exc:
        print(f"robxp: trivial classifier: {exc}", file=stderr)
        return EXIT_TRIVIAL
    except (EncodingUnsupported, NotApplicable, PrecisionError, ParseError, ValueError) as exc:
        print(f"robxp: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_CONFIG
    out.flush(stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
