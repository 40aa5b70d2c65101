"""Satisfiability back-ends.

:class:`Solver` is a small conflict-driven clause-learning solver (two
watched literals, first-UIP learning, VSIDS with index tie-breaking, phase
saving, Luby restarts).  PB constraints reach it already translated to
clauses.  :func:`solve_external` drives any solver that speaks the usual
``s``/``v`` output protocol over a DIMACS or OPB file.

Every satisfying assignment is checked against the original formula
before it is returned.  Running out of budget yields ``RESOURCE_OUT``,
never ``UNSAT``.
"""

from __future__ import annotations

import heapq
import os
import shlex
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .encode import Formula, emit
from .errors import BridgeError, ParseError
from .pb import PBConstraint

SOLVER_ENV = "ROBXP_SOLVER"


class Status(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    RESOURCE_OUT = "RESOURCE_OUT"


@dataclass
class SolveResult:
    status: Status
    model: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    @property
    def sat(self):
        return self.status is Status.SAT

    @property
    def unsat(self):
        return self.status is Status.UNSAT


def _luby(i):
    # i >= 1
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        if i >= (1 << (k - 1)):
            i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class Solver:
    """CDCL over DIMACS clauses (lists of non-zero signed ints)."""

    restart_base = 100
    var_decay = 0.95

    def __init__(self, n_vars, clauses):
        self.n = n = n_vars
        self.val = [0] * (2 * n + 2)  # per literal code: 1 true, -1 false, 0 free
        self.level = [0] * (n + 1)
        self.reason = [None] * (n + 1)
        self.activity = [0.0] * (n + 1)
        self.phase = [False] * (n + 1)
        self.seen = [False] * (n + 1)
        self.watches = [[] for _ in range(2 * n + 2)]
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.var_inc = 1.0
        self.heap = [(0.0, v) for v in range(1, n + 1)]
        self.heap_act = [0.0] * (n + 1)  # activity of each variable's live heap entry, None if absent
        self.heap_act[0] = None
        self.clauses = []
        self.learnts = []
        self.ok = True
        self.stats = {"conflicts": 0, "decisions": 0, "propagations": 0, "restarts": 0}
        for clause in clauses:
            if not self._add_input(clause):
                self.ok = False
                break
        if self.ok and self._propagate() is not None:
            self.ok = False

    @staticmethod
    def _code(lit):
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _add_input(self, clause):
        n = self.n
        codes = []
        for lit in clause:
            if lit > 0 and lit <= n:
                codes.append(2 * lit)
            elif lit < 0 and -lit <= n:
                codes.append(-2 * lit + 1)
            else:
                raise ValueError(f"literal {lit} out of range 1..{n}")
        if len(codes) > 1:
            seen = set(codes)
            if any(c ^ 1 in seen for c in codes):
                return True  # tautology
            if len(seen) != len(codes):
                codes = list(dict.fromkeys(codes))
        val = self.val
        codes = [c for c in codes if val[c] != -1]
        if any(val[c] == 1 for c in codes):
            return True
        if not codes:
            return False
        if len(codes) == 1:
            self._assign(codes[0], None)
            return True
        self.clauses.append(codes)
        self.watches[codes[0]].append(codes)
        self.watches[codes[1]].append(codes)
        return True

    def _assign(self, code, reason):
        v = code >> 1
        self.val[code] = 1
        self.val[code ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(code)

    def _propagate(self):
        val = self.val
        watches = self.watches
        trail = self.trail
        level = self.level
        reason = self.reason
        lvl = len(self.trail_lim)
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.stats["propagations"] += props
                        return c
                    v = first >> 1
                    val[first] = 1
                    val[first ^ 1] = -1
                    level[v] = lvl
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
        self.stats["propagations"] += props
        return None

    def _bump(self, v):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.n + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self._rebuild_heap()
        elif self.val[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))
            self.heap_act[v] = act[v]

    def _rebuild_heap(self):
        act, val = self.activity, self.val
        self.heap = [(-act[v], v) for v in range(1, self.n + 1) if val[2 * v] == 0]
        heapq.heapify(self.heap)
        self.heap_act = [None] * (self.n + 1)
        for _, v in self.heap:
            self.heap_act[v] = act[v]

    def _analyze(self, confl):
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        lvl = len(self.trail_lim)
        learnt = [0]
        path = 0
        idx = len(trail) - 1
        p = None
        to_clear = []
        while True:
            start = 0 if p is None else 1
            for k in range(start, len(confl)):
                q = confl[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    self._bump(v)
                    seen[v] = True
                    to_clear.append(v)
                    if level[v] >= lvl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            confl = reason[v]
            seen[v] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None or any(not seen[x >> 1] and level[x >> 1] > 0 for x in r[1:]):
                kept.append(q)
        for v in to_clear:
            seen[v] = False
        if len(kept) == 1:
            return kept, 0
        best = max(range(1, len(kept)), key=lambda k: level[kept[k] >> 1])
        kept[1], kept[best] = kept[best], kept[1]
        return kept, level[kept[1] >> 1]

    def _cancel_until(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        val, phase, act, heap, live = self.val, self.phase, self.activity, self.heap, self.heap_act
        for k in range(len(self.trail) - 1, stop - 1, -1):
            code = self.trail[k]
            v = code >> 1
            phase[v] = not (code & 1)
            val[code] = 0
            val[code ^ 1] = 0
            self.reason[v] = None
            if live[v] != act[v]:
                heapq.heappush(heap, (-act[v], v))
                live[v] = act[v]
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)
        if len(heap) > 8 * self.n + 64:
            self._rebuild_heap()

    def _pick(self):
        heap, val, live = self.heap, self.val, self.heap_act
        while heap:
            a, v = heapq.heappop(heap)
            if live[v] != -a:
                continue  # superseded entry
            live[v] = None
            if val[2 * v] == 0:
                return 2 * v + (0 if self.phase[v] else 1)
        return None

    def _reduce_db(self):
        locked = {id(self.reason[c[0] >> 1]) for c in self.learnts if self.val[c[0]] == 1}
        self.learnts.sort(key=len)
        keep = len(self.learnts) // 2
        survivors = [c for k, c in enumerate(self.learnts) if k < keep or len(c) <= 2 or id(c) in locked]
        self.learnts = survivors
        self.watches = [[] for _ in range(2 * self.n + 2)]
        for c in self.clauses:
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)
        for c in survivors:
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)

    def solve(self, assumptions=(), max_conflicts=None, time_limit=None):
        t0 = time.monotonic()
        if not self.ok:
            return self._result(Status.UNSAT, t0)
        assumptions = [self._code(a) for a in assumptions]
        max_learnts = max(1000, len(self.clauses) // 3)
        restart_no = 1
        budget = _luby(restart_no) * self.restart_base
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return self._result(Status.UNSAT, t0)
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self._assign(learnt[0], learnt)
                self.var_inc /= self.var_decay
                n_conf = self.stats["conflicts"]
                if max_conflicts is not None and n_conf >= max_conflicts:
                    self._cancel_until(0)
                    return self._result(Status.RESOURCE_OUT, t0)
                if time_limit is not None and n_conf % 64 == 0 and time.monotonic() - t0 > time_limit:
                    self._cancel_until(0)
                    return self._result(Status.RESOURCE_OUT, t0)
                continue
            if since_restart >= budget:
                self.stats["restarts"] += 1
                self._cancel_until(0)
                restart_no += 1
                budget = _luby(restart_no) * self.restart_base
                since_restart = 0
                if len(self.learnts) > max_learnts:
                    self._reduce_db()
                    max_learnts = int(max_learnts * 1.1)
                continue
            lvl = len(self.trail_lim)
            if lvl < len(assumptions):
                a = assumptions[lvl]
                if self.val[a] == -1:
                    self._cancel_until(0)
                    return self._result(Status.UNSAT, t0)
                self.trail_lim.append(len(self.trail))
                if self.val[a] == 0:
                    self._assign(a, None)
                continue
            nxt = self._pick()
            if nxt is None:
                model = {v: self.val[2 * v] == 1 for v in range(1, self.n + 1)}
                self._cancel_until(0)
                return self._result(Status.SAT, t0, model)
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._assign(nxt, None)

    def _result(self, status, t0, model=None):
        stats = dict(self.stats)
        stats["time"] = time.monotonic() - t0
        return SolveResult(status, model or {}, stats)


def solve_cnf(n_vars, clauses, assumptions=(), max_conflicts=None, time_limit=None):
    result = Solver(n_vars, clauses).solve(assumptions, max_conflicts, time_limit)
    if result.sat:
        for clause in clauses:
            if not any(result.model.get(abs(l), False) == (l > 0) for l in clause):
                raise AssertionError("solver returned a non-model")
    return result


def solve(formula, max_conflicts=None, time_limit=None, assumptions=()):
    """Decide ``formula`` with the embedded solver."""
    n, clauses = formula.to_cnf()
    result = solve_cnf(n, clauses, assumptions, max_conflicts, time_limit)
    if result.sat:
        if not formula.satisfied_by(result.model):
            raise AssertionError("model violates a PB constraint of the formula")
        result.model = {v: b for v, b in result.model.items() if v <= formula.n_vars}
    result.stats["vars"] = n
    result.stats["clauses"] = len(clauses)
    return result


# --------------------------------------------------------------------------
# external solvers
# --------------------------------------------------------------------------


def parse_solver_output(text, fmt="cnf"):
    """``(status, {var: bool})`` from ``s``/``v`` lines of solver output."""
    status = None
    model = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word in ("SATISFIABLE", "OPTIMUM FOUND"):
                status = Status.SAT
            elif word == "UNSATISFIABLE":
                status = Status.UNSAT
            elif word in ("UNKNOWN", "INDETERMINATE", "TIMEOUT", "MEMOUT"):
                status = Status.RESOURCE_OUT
            else:
                raise BridgeError(f"unrecognized status line {line!r}")
        elif line.startswith("v "):
            for tok in line[2:].split():
                if fmt == "cnf":
                    try:
                        lit = int(tok)
                    except ValueError:
                        raise BridgeError(f"bad value token {tok!r}") from None
                    if lit != 0:
                        model[abs(lit)] = lit > 0
                else:
                    neg = tok.startswith(("-", "~"))
                    name = tok.lstrip("-~")
                    if not name.startswith("x") or not name[1:].isdigit():
                        raise BridgeError(f"bad value token {tok!r}")
                    model[int(name[1:])] = not neg
    if status is None:
        raise BridgeError("solver printed no status line")
    return status, model


def default_external_command():
    """Solver command from the environment, else this package's own CLI front end."""
    cmd = os.environ.get(SOLVER_ENV)
    if cmd:
        return cmd
    return f"{shlex.quote(sys.executable)} -m robxp.solver"


def solve_external(formula, command=None, fmt="cnf", timeout=None):
    """Run an external solver on ``formula`` and re-check its answer.

    ``command`` is a shell-style string; the instance path is appended.
    Exit codes 10/20 (SAT/UNSAT) and 0 are accepted, anything else without
    a status line is a :class:`BridgeError`.
    """
    command = command or default_external_command()
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    if fmt == "cnf":
        n, clauses = formula.to_cnf()
        text = "p cnf %d %d\n" % (n, len(clauses)) + "".join(
            " ".join(map(str, c)) + " 0\n" for c in clauses
        )
    else:
        clauses = None
        text = emit(formula, "opb")
    t0 = time.monotonic()
    with tempfile.TemporaryDirectory(prefix="robxp-") as tmp:
        path = Path(tmp) / ("query.cnf" if fmt == "cnf" else "query.opb")
        path.write_text(text)
        try:
            proc = subprocess.run(argv + [str(path)], capture_output=True, text=True, timeout=timeout)
        except FileNotFoundError as exc:
            raise BridgeError(f"solver command not found: {exc}") from None
        except subprocess.TimeoutExpired:
            return SolveResult(Status.RESOURCE_OUT, {}, {"time": time.monotonic() - t0})
    try:
        status, model = parse_solver_output(proc.stdout, fmt)
    except BridgeError as exc:
        raise BridgeError(f"{exc} (exit code {proc.returncode}; stderr: {proc.stderr.strip()[:200]})") from None
    if proc.returncode not in (0, 10, 20):
        raise BridgeError(f"solver exited with code {proc.returncode}")
    stats = {"time": time.monotonic() - t0, "exit_code": proc.returncode}
    if status is not Status.SAT:
        return SolveResult(status, {}, stats)
    if clauses is not None:
        for clause in clauses:
            if not any(model.get(abs(l), False) == (l > 0) for l in clause):
                raise BridgeError("verification failed: reported model falsifies a clause")
    if not formula.satisfied_by(model):
        raise BridgeError("verification failed: reported model violates the formula")
    full = {v: model.get(v, False) for v in range(1, formula.n_vars + 1)}
    return SolveResult(Status.SAT, full, stats)


# --------------------------------------------------------------------------
# reading instance files (used by the command-line front end)
# --------------------------------------------------------------------------


def read_dimacs(text):
    n = None
    clauses, current = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("malformed header", f"line {lineno}")
            n = int(parts[2])
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", f"line {lineno}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    if n is None:
        raise ParseError("missing 'p cnf' header")
    return n, clauses


def read_opb(text):
    n = 0
    formula = Formula()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("*"):
            if "#variable=" in line:
                n = int(line.split("#variable=")[1].split()[0])
            continue
        if not line:
            continue
        if not line.endswith(";"):
            raise ParseError("constraint must end with ';'", f"line {lineno}")
        body = line[:-1].split()
        for rel in (">=", "<=", "="):
            if rel in body:
                k = body.index(rel)
                break
        else:
            raise ParseError("missing relation", f"line {lineno}")
        lhs, bound = body[:k], int(body[k + 1])
        terms = []
        for coef, var in zip(lhs[0::2], lhs[1::2]):
            lit = int(var.lstrip("~x"))
            terms.append((int(coef), -lit if var.startswith("~") else lit))
            n = max(n, lit)
        formula.add_pb(PBConstraint.build(terms, rel, bound))
    formula.varmap.top = n
    return formula


def main(argv=None):
    """Minimal DIMACS/OPB solver front end printing ``s``/``v`` lines."""
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m robxp.solver INSTANCE.cnf|INSTANCE.opb", file=sys.stderr)
        return 1
    text = Path(argv[0]).read_text()
    if argv[0].endswith(".opb") or text.lstrip().startswith("*"):
        formula = read_opb(text)
        res = solve(formula)
        lits = [f"x{v}" if b else f"-x{v}" for v, b in sorted(res.model.items())]
    else:
        n, clauses = read_dimacs(text)
        res = solve_cnf(n, clauses)
        lits = [str(v if b else -v) for v, b in sorted(res.model.items())] + ["0"]
    if res.sat:
        print("s SATISFIABLE")
        print("v " + " ".join(lits))
        return 10
    print("s UNSATISFIABLE")
    return 20


__all__ = [
    "Status", "SolveResult", "Solver", "solve", "solve_cnf", "solve_external",
    "parse_solver_output", "read_dimacs", "read_opb", "SOLVER_ENV",
]
