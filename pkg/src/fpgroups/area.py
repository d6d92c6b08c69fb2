"""Van Kampen area at desk scale.

``area_search`` runs uniform-cost search over freely reduced words: one
move replaces a subword s by t^-1 where s.t is a cyclic rotation of a
relator or its inverse (insertions are the empty-s case).  The first time
the empty word is popped, its cost is the exact area within the width
budget; budget trips downgrade the answer to a lower bound, never to a
guess.

The letter-elimination procedure for the five-generator Stallings group
lives in ``stallings``; this module wraps it as a word-problem decider
(eliminate a-letters, then decide the residual in the product of two free
groups) and provides the instrumented experiment drivers.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

from .errors import BudgetExceededError, ValidationError
from .presentations import Presentation
from .solvers import DirectProductSolver, FreeSolver
from .stallings import (
    RELATORS,
    ReductionTrace,
    TraceStep,
    is_single_application,
    reduce_word as stallings_reduce_raw,
    replay_trace,
    stallings_presentation,
)
from .growth import GrowthReport, classify_growth
from .words import Word, exponent_sum, invert_ints, reduce_ints


@dataclass(frozen=True)
class Budget:
    """Search budgets.  A None width follows the word: len(w) + width_slack."""

    max_len: int | None = None
    max_cells: int = 16
    max_states: int = 100_000
    width_slack: int = 4

    def width_for(self, word_len: int) -> int:
        return self.max_len if self.max_len is not None else word_len + self.width_slack

    def validate(self):
        if (self.max_len is not None and self.max_len < 1) or self.max_cells < 0 \
                or self.max_states < 1 or self.width_slack < 0:
            raise ValidationError(f"invalid search budget {self}")


@dataclass(frozen=True)
class AreaResult:
    status: str                 # "exact" | "at_least" | "not_trivial_within_budget"
    value: int | None           # cells for exact, bound for at_least
    expanded: int
    peak_len: int
    moves: tuple | None = None  # optional (rule, pos, removed, inserted) list

    @property
    def is_exact(self) -> bool:
        return self.status == "exact"

    def bound_value(self) -> int | None:
        """Exact value or lower bound, whichever is known."""
        return self.value


def _rotation_moves(pres: Presentation):
    """All (split prefix, replacement, rule id) move templates."""
    moves = []
    seen = set()
    for idx, r in enumerate(pres.relators):
        for sign, base in ((1, list(r.letters)), (-1, invert_ints(list(r.letters)))):
            doubled = base + base
            for k in range(len(base)):
                rho = tuple(doubled[k : k + len(base)])
                if (rho) in seen:
                    continue
                seen.add(rho)
                for cut in range(len(rho) + 1):
                    s = rho[:cut]
                    t_inv = tuple(invert_ints(rho[cut:]))
                    moves.append((s, t_inv, f"r{idx}"))
    return moves


def area_search(pres: Presentation, w: Word, budget: Budget = Budget(),
                want_moves: bool = False) -> AreaResult:
    """Minimal relator applications turning w into the empty word.

    Free reduction is folded into states (all states are reduced words),
    so the cost equals the 2-cell count of a van Kampen diagram within the
    width budget.  Deterministic for fixed inputs.
    """
    budget.validate()
    if w.alphabet.names != pres.alphabet.names:
        raise ValidationError("word is not over the presentation's alphabet")
    moves = _rotation_moves(pres)
    start = tuple(w.letters)
    max_len = budget.width_for(len(start))
    if len(start) > max_len:
        raise ValidationError(f"start word longer than the width budget {max_len}")
    dist: dict[tuple, int] = {start: 0}
    parent: dict[tuple, tuple] | None = {start: None} if want_moves else None
    heap: list[tuple[int, int, tuple]] = [(0, 0, start)]
    counter = 1
    expanded = 0
    peak = len(start)
    completed_below = 0  # all states with cost < this were expanded
    while heap:
        cost, _, state = heapq.heappop(heap)
        if cost > dist.get(state, -1):
            continue
        completed_below = max(completed_below, cost)
        if not state:
            return AreaResult("exact", cost, expanded, peak,
                              _collect_moves(parent, state) if want_moves else None)
        expanded += 1
        if expanded > budget.max_states:
            return AreaResult("at_least", cost, expanded, peak, None)
        if cost == budget.max_cells:
            continue  # neighbors would exceed the cell budget
        n = len(state)
        for s, t_inv, rule in moves:
            ls = len(s)
            limit = n - ls
            for i in range(limit + 1):
                if state[i : i + ls] != s:
                    continue
                new = reduce_ints(list(state[:i]) + list(t_inv) + list(state[i + ls :]))
                if len(new) > max_len:
                    continue
                key = tuple(new)
                nc = cost + 1
                if nc < dist.get(key, nc + 1):
                    dist[key] = nc
                    if parent is not None:
                        parent[key] = (state, rule, i, s, t_inv)
                    if len(key) > peak:
                        peak = len(key)
                    heapq.heappush(heap, (nc, counter, key))
                    counter += 1
    # frontier exhausted: every reachable word within the width budget was
    # tried up to the cell budget
    if completed_below >= budget.max_cells:
        return AreaResult("at_least", budget.max_cells + 1, expanded, peak, None)
    return AreaResult("not_trivial_within_budget", None, expanded, peak, None)


def _collect_moves(parent, state):
    out = []
    while parent[state] is not None:
        prev, rule, pos, s, t_inv = parent[state]
        out.append((rule, pos, s, t_inv))
        state = prev
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# the instrumented Stallings decision procedure

_H_SOLVER = None


def _h_solver() -> DirectProductSolver:
    global _H_SOLVER
    if _H_SOLVER is None:
        _H_SOLVER = DirectProductSolver([FreeSolver(["b", "c"]), FreeSolver(["d", "e"])])
    return _H_SOLVER


def stallings_reduce(w: Word, max_applications: int = 10**7) -> ReductionTrace:
    """Eliminate the a-letters of a word over a,b,c,d,e; see ``stallings``."""
    return stallings_reduce_raw(w, max_applications=max_applications)


def residual_in_product(residual: Word) -> bool:
    """Decide an a-free residual in gp{b,c} x gp{d,e}."""
    solver = _h_solver()
    letters = []
    for x in residual.letters:
        name = residual.alphabet.names[abs(x) - 1]
        if name == "a":
            return False
        g = solver.alphabet.index(name) + 1
        letters.append(g if x > 0 else -g)
    return solver.is_identity(Word(solver.alphabet, letters))


def stallings_is_trivial(w: Word, max_applications: int = 10**7) -> bool:
    """Word problem for the five-generator group.

    Nonzero exponent sum in any generator settles it immediately; then
    letter elimination plus the free-product-of-frees decision.
    """
    pres = stallings_presentation()
    if w.alphabet.names != pres.alphabet.names:
        raise ValidationError("word is not over the a,b,c,d,e alphabet")
    if any(exponent_sum(w, g) != 0 for g in pres.alphabet.names):
        return False
    trace = stallings_reduce_raw(w, max_applications=max_applications)
    if not trace.completed:
        return False
    return residual_in_product(trace.residual)


# ---------------------------------------------------------------------------
# experiment drivers

@dataclass(frozen=True)
class AreaExperimentRow:
    n: int
    length: int
    status: str
    value: int | None
    expanded: int
    peak_len: int


def area_experiment(pres: Presentation, family, n_values, budget: Budget,
                    triviality_solver=None):
    """Run area_search over family(n) for each n.

    ``family`` must yield words trivial in the group; when a solver is
    supplied each word is checked and a nontrivial one is a hard error.
    Returns (rows, GrowthReport-or-None); at_least rows are lower bounds
    only, and the growth fit is run on the known values when at least 8
    points exist.
    """
    rows = []
    for n in n_values:
        w = family(n)
        if triviality_solver is not None and not triviality_solver.is_identity(w):
            raise ValidationError(f"family word at n={n} is not trivial")
        result = area_search(pres, w, budget)
        rows.append(AreaExperimentRow(n, len(w), result.status, result.value,
                                      result.expanded, result.peak_len))
    curve = [(r.n, r.value) for r in rows if r.value is not None and r.n > 0]
    report = None
    if len(curve) >= 8:
        report = classify_growth(curve)
    return rows, report


@dataclass(frozen=True)
class StallingsExperimentRow:
    n: int
    applications: int
    peak_len: int
    trace_ok: bool


def stallings_experiment(words, verify_traces: bool = True):
    """Reduce each word, recording (length, relator applications).

    Returns (rows, fit) where fit is the log-log slope data of
    applications against word length over the distinct lengths.
    """
    rows = []
    for w in words:
        trace = stallings_reduce_raw(w)
        if not trace.completed:
            raise ValidationError("experiment family contains a stuck word")
        ok = replay_trace(w, trace) if verify_traces else True
        if not ok:
            raise ValidationError("trace replay failed")
        rows.append(StallingsExperimentRow(len(w), trace.relator_applications,
                                           trace.peak_len, ok))
    return rows


def loglog_slope(pairs) -> float:
    """Least-squares slope of log(y) against log(x), pooling duplicates."""
    import numpy as np

    xs, ys = [], []
    for x, y in pairs:
        if x > 1 and y > 0:
            xs.append(float(x))
            ys.append(float(y))
    if len(set(xs)) < 2:
        raise ValidationError("need at least two distinct lengths")
    coeffs = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(coeffs[0])


# ---------------------------------------------------------------------------
# trace serialization (JSON lines, one step per line)

def trace_to_jsonl(trace: ReductionTrace) -> str:
    lines = []
    for s in trace.steps:
        lines.append(json.dumps({
            "rule": s.rule,
            "pos": s.pos,
            "removed": list(s.removed),
            "inserted": list(s.inserted),
            "len_before": s.len_before,
            "len_after": s.len_after,
        }, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


def trace_from_jsonl(text: str) -> list[TraceStep]:
    steps = []
    for line in text.splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        steps.append(TraceStep(d["rule"], d["pos"], tuple(d["removed"]),
                               tuple(d["inserted"]), d["len_before"], d["len_after"]))
    return steps
