"""Instrumented letter-elimination for the five-generator group

    < a, b, c, d, e | a^b = a^c = a^d = a^e,
                      [c,d] = [d,b] = [e,c] = [e,b] = 1 >

viewed as an HNN extension of gp{b,c} x gp{d,e} whose stable letter a
commutes with the zero-exponent-sum subgroup.  ``reduce_word`` removes
every a-letter from a word representing the identity, recording one trace
step per relator application, and the step count grows at most cubically
in the word length.

Strategy per innermost matched pair a^eps h a^-eps with zero exponent sum:
sort h by commutations into its {b,c} and {d,e} parts, then push the left
a across letter by letter, carrying the accumulated conjugation as an
explicit power-of-one-letter shell (e while crossing {b,c} letters, b
while crossing {d,e}; the shell letter commutes with what it crosses).
Positive letters are absorbed with one conjugation relator and the fresh
conjugator is chain-shifted onto the shell; negative letters consume a
shell layer through the reversed moves; a deepening insertion handles the
sign the chain cannot absorb directly.  At the parts' boundary the shell
is rebuilt layer by layer on the other letter.  When the shell empties
the two a-letters cancel freely.

Every step is a genuine single application (replace alpha by beta where
alpha.beta^-1 is freely a rotation of a relator or its inverse) or a free
insertion/cancellation; ``replay_trace`` checks exactly that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BudgetExceededError, ValidationError
from .presentations import Presentation, example_catalog
from .words import Word, invert_ints, reduce_ints

A, B, C, D, E = 1, 2, 3, 4, 5
_NAMES = {1: "a", 2: "b", 3: "c", 4: "d", 5: "e"}

RELATOR_NAMES = ("a^b=a^c", "a^c=a^d", "a^d=a^e", "[c,d]", "[d,b]", "[e,c]", "[e,b]")
RELATORS: dict[str, tuple[int, ...]] = {
    "a^b=a^c": (-B, A, B, -C, -A, C),
    "a^c=a^d": (-C, A, C, -D, -A, D),
    "a^d=a^e": (-D, A, D, -E, -A, E),
    "[c,d]": (-C, -D, C, D),
    "[d,b]": (-D, -B, D, B),
    "[e,c]": (-E, -C, E, C),
    "[e,b]": (-E, -B, E, B),
}

# which conjugation relator links chain letters x and y = x+1
_CHAIN_RULE = {(B, C): "a^b=a^c", (C, D): "a^c=a^d", (D, E): "a^d=a^e"}
# commuting pairs {x, y} -> relator name
_COMM_RULE = {
    frozenset((C, D)): "[c,d]",
    frozenset((D, B)): "[d,b]",
    frozenset((E, C)): "[e,c]",
    frozenset((E, B)): "[e,b]",
}

FREE = "free"


@dataclass(frozen=True)
class TraceStep:
    rule: str          # relator name, or "free"
    pos: int
    removed: tuple[int, ...]
    inserted: tuple[int, ...]
    len_before: int
    len_after: int


@dataclass
class ReductionTrace:
    steps: list[TraceStep] = field(default_factory=list)
    relator_applications: int = 0
    residual: Word | None = None
    completed: bool = False
    stuck_reason: str | None = None
    peak_len: int = 0


def _rotations(letters: tuple[int, ...]) -> set[tuple[int, ...]]:
    out = set()
    for seq in (list(letters), invert_ints(letters)):
        doubled = seq + seq
        for i in range(len(seq)):
            out.add(tuple(doubled[i : i + len(seq)]))
    return out


_ROTATION_CACHE = {name: _rotations(r) for name, r in RELATORS.items()}


def is_single_application(rule: str, removed, inserted) -> bool:
    """alpha -> beta is one application of the named relator iff the
    cyclic reduction of alpha.beta^-1 is a rotation of it or its inverse."""
    if rule not in RELATORS:
        return False
    word = reduce_ints(list(removed) + invert_ints(list(inserted)))
    lo, hi = 0, len(word)
    while hi - lo >= 2 and word[lo] == -word[hi - 1]:
        lo += 1
        hi -= 1
    return tuple(word[lo:hi]) in _ROTATION_CACHE[rule]


class _Rewriter:
    """Word-with-trace; all mutation goes through the two emit methods."""

    def __init__(self, letters, max_applications: int):
        self.word: list[int] = list(letters)
        self.trace = ReductionTrace(peak_len=len(self.word))
        self.max_applications = max_applications

    def _record(self, rule, pos, removed, inserted):
        step = TraceStep(rule, pos, tuple(removed), tuple(inserted),
                         len(self.word), len(self.word) - len(removed) + len(inserted))
        self.word[pos : pos + len(removed)] = list(inserted)
        self.trace.steps.append(step)
        if len(self.word) > self.trace.peak_len:
            self.trace.peak_len = len(self.word)

    def apply(self, rule: str, pos: int, removed, inserted):
        assert tuple(self.word[pos : pos + len(removed)]) == tuple(removed), (
            rule, pos, removed, self.word[pos : pos + len(removed)])
        assert is_single_application(rule, removed, inserted), (rule, removed, inserted)
        self._record(rule, pos, removed, inserted)
        self.trace.relator_applications += 1
        if self.trace.relator_applications > self.max_applications:
            raise BudgetExceededError(
                f"relator application budget {self.max_applications} exhausted",
                partial=self.trace,
            )

    def free_insert(self, pos: int, letter: int):
        self._record(FREE, pos, (), (letter, -letter))

    def free_cancel(self, pos: int):
        x, y = self.word[pos], self.word[pos + 1]
        assert x == -y, (pos, x, y)
        self._record(FREE, pos, (x, y), ())

    def free_sweep(self, lo: int = 0):
        """Cancel adjacent inverse pairs left to right until reduced."""
        i = max(lo - 1, 0)
        while i < len(self.word) - 1:
            if self.word[i] == -self.word[i + 1]:
                self.free_cancel(i)
                i = max(i - 1, 0)
            else:
                i += 1

    # -- move helpers -----------------------------------------------------

    def commute(self, pos: int):
        """Swap the commuting letters at pos, pos+1 (one commutator)."""
        x, y = self.word[pos], self.word[pos + 1]
        rule = _COMM_RULE[frozenset((abs(x), abs(y)))]
        self.apply(rule, pos, (x, y), (y, x))

    def shift_core(self, pos: int, target: int):
        """[X a^eps x] at pos -> [Y a^eps y] along the chain to target."""
        x = -self.word[pos]
        assert x > 0 and self.word[pos + 2] == x
        while x != target:
            y = x + 1 if target > x else x - 1
            rule = _CHAIN_RULE[(min(x, y), max(x, y))]
            eps = self.word[pos + 1]
            self.apply(rule, pos, (-x, eps, x), (-y, eps, y))
            x = y

    def absorb_positive(self, pos: int, neighbor: int):
        """[a^eps x] at pos -> [x N^-1 a^eps N], N the chain neighbor."""
        eps, x = self.word[pos], self.word[pos + 1]
        rule = _CHAIN_RULE[(min(x, neighbor), max(x, neighbor))]
        self.apply(rule, pos, (eps, x), (x, -neighbor, eps, neighbor))

    def reversed_absorb(self, pos: int, x_neg: int):
        """[N^-1 a^eps N x^-1] at pos -> [x^-1 a^eps]."""
        n = -self.word[pos]
        eps = self.word[pos + 1]
        x = -x_neg
        rule = _CHAIN_RULE[(min(x, n), max(x, n))]
        self.apply(rule, pos, (-n, eps, n, x_neg), (x_neg, eps))


def _sigma(letters) -> int:
    return sum(1 if x > 0 else -1 for x in letters)


class _PinchEliminator:
    """Remove one innermost matched a-pair from the rewriter's word."""

    def __init__(self, rw: _Rewriter, i: int, j: int):
        self.rw = rw
        self.i = i          # index of a^eps; block occupies [bl, br)
        self.j = j          # index of a^-eps (shifts as we edit)
        self.bl = i
        self.br = i + 1
        self.depth = 0      # signed shell depth
        self.shell = E      # current shell letter

    # layout: word[bl:br] = shell-left + [a^eps] + shell-right
    #   depth q >= 0: shell-left = (-w)^q, shell-right = w^q
    #   depth q <  0: shell-left = w^|q|,  shell-right = (-w)^|q|

    def _commute_in(self):
        """Move the letter just right of the block to sit just right of a,
        swapping it across the right shell."""
        q = abs(self.depth)
        pos = self.br  # the incoming letter
        for _ in range(q):
            self.rw.commute(pos - 1)
            pos -= 1

    def _commute_out(self):
        """Move the letter just left of a out through the left shell."""
        q = abs(self.depth)
        pos = self.bl + q - 1  # letter sits right after the left shell
        for _ in range(q):
            self.rw.commute(pos)
            pos -= 1

    def _a_pos(self) -> int:
        return self.bl + abs(self.depth)

    def pass_letter(self):
        """Consume the letter at index br (guaranteed to commute with the
        shell letter); block depth changes by its sign."""
        rw = self.rw
        letter = rw.word[self.br]
        x = abs(letter)
        w = self.shell
        up = w == E  # e-shell climbs the chain upward, b-shell downward
        neighbor = x + 1 if up else x - 1
        if letter > 0:
            # [block x] -> [x deeper-block]: absorb with one conjugation
            # relator, chain the fresh conjugator onto the shell letter
            self._commute_in()
            apos = self._a_pos()
            rw.absorb_positive(apos, neighbor)
            rw.shift_core(apos + 1, w)
            if self.depth >= 0:
                self._commute_out()
                self.depth += 1
                self.bl += 1
                self.br += 3
            else:
                # negative depth: the fresh layer annihilates one shell
                # layer on each side once x has left the shell
                q1 = -self.depth
                pos = self.bl + q1
                for _ in range(q1):
                    rw.commute(pos - 1)
                    pos -= 1
                rw.free_cancel(self.bl + q1)      # w . w^-1 left seam
                rw.free_cancel(self.bl + q1 + 1)  # w . w^-1 right seam
                self.depth += 1
                self.bl += 1
                self.br -= 1
        else:
            if self.depth > 0:
                # shift the innermost layer to the neighbor core, then the
                # reversed absorb consumes it and emits x^-1 leftward
                apos = self._a_pos()
                self.rw.shift_core(apos - 1, neighbor)
                pos = self.br
                for _ in range(self.depth - 1):
                    rw.commute(pos - 1)
                    pos -= 1
                rw.reversed_absorb(apos - 1, letter)
                pos = self.bl + self.depth - 1
                for _ in range(self.depth - 1):
                    rw.commute(pos - 1)
                    pos -= 1
                self.depth -= 1
                self.bl += 1
                self.br -= 1
            else:
                # deepen: insert a shell pair around a, build the neighbor
                # core from the inserted layer, reversed-absorb, emit x^-1
                self._commute_in()
                apos = self._a_pos()
                q1 = -self.depth
                rw.free_insert(apos, w)        # [.. w w^-1 a x^-1 ..]
                rw.free_insert(apos + 3, w)    # [.. w w^-1 a w w^-1 x^-1 ..]
                rw.shift_core(apos + 1, neighbor)
                rw.commute(apos + 4)           # x^-1 past the trailing w^-1
                rw.reversed_absorb(apos + 1, letter)
                pos = apos
                for _ in range(q1 + 1):        # emit x^-1 through w^(q1+1)
                    rw.commute(pos)
                    pos -= 1
                self.depth -= 1
                self.bl += 1
                self.br += 3

    def convert_shell(self, new_shell: int):
        """Rebuild a positive-depth shell on the other commuting letter."""
        assert self.depth >= 0
        rw = self.rw
        old = self.shell
        for layer in range(self.depth):
            # innermost [old^-1 a^eps old] sits at a_pos-1 with the
            # remaining inner depth self.depth - layer - 1 ... compute from
            # current layout: converted layers live outside the old shell.
            inner_depth = self.depth - layer
            apos = self.bl + layer + inner_depth
            rw.shift_core(apos - 1, new_shell)
            # commute the fresh pair outward through the remaining old shell
            left = apos - 1
            for _ in range(inner_depth - 1):
                rw.commute(left - 1)
                left -= 1
            right = apos + 1
            for _ in range(inner_depth - 1):
                rw.commute(right)
                right += 1
        self.shell = new_shell


def _find_pinch(word: list[int]) -> tuple[int, int] | None:
    positions = [k for k, x in enumerate(word) if abs(x) == A]
    for p, q in zip(positions, positions[1:]):
        if word[p] == -word[q] and _sigma(word[p + 1 : q]) == 0:
            return p, q
    return None


def reduce_word(w: Word, max_applications: int = 10**7) -> ReductionTrace:
    """Eliminate all a-letters from ``w`` if matched pairs allow it.

    Returns the full trace; ``completed`` is False when no eliminable pair
    remains while a-letters are present (then the word is not the identity
    and the residual is returned as-is).
    """
    pres = stallings_presentation()
    if w.alphabet.names != pres.alphabet.names:
        raise ValidationError("word is not over the a,b,c,d,e alphabet")
    rw = _Rewriter(w.letters, max_applications)
    while True:
        if not any(abs(x) == A for x in rw.word):
            rw.trace.completed = True
            break
        pinch = _find_pinch(rw.word)
        if pinch is None:
            sums = {g: _sigma([x for x in rw.word if abs(x) == k])
                    for k, g in _NAMES.items()}
            if sums["a"] != 0:
                rw.trace.stuck_reason = f"exponent-sum obstruction: sigma_a = {sums['a']}"
            else:
                rw.trace.stuck_reason = "no matched a-pair with zero exponent sum"
            break
        _eliminate(rw, *pinch)
    rw.trace.residual = Word(pres.alphabet, rw.word)
    return rw.trace


def _eliminate(rw: _Rewriter, i: int, j: int):
    # sort the in-between letters: {b,c} first, then {d,e} -- or the other
    # way around when the {b,c} exponent sum is negative, so that the
    # shell conversion always happens at nonnegative depth
    word = rw.word
    bc_sigma = _sigma([x for x in word[i + 1 : j] if abs(x) in (B, C)])
    bc_first = bc_sigma >= 0
    j = _bubble_sort(rw, i + 1, j, bc_first)
    elim = _PinchEliminator(rw, i, j)
    elim.shell = E if bc_first else B
    first_family = (B, C) if bc_first else (D, E)
    while elim.br < elim.j and abs(rw.word[elim.br]) in first_family:
        before = len(rw.word)
        elim.pass_letter()
        elim.j += len(rw.word) - before
    if elim.br < elim.j:
        elim.convert_shell(B if bc_first else E)
        while elim.br < elim.j:
            before = len(rw.word)
            elim.pass_letter()
            elim.j += len(rw.word) - before
    assert elim.depth == 0, elim.depth
    # [.. a^eps a^-eps ..] cancels; then re-reduce (sorting and emission
    # can create cancellations anywhere left of the seam)
    rw.free_cancel(elim.bl)
    rw.free_sweep(0)


def _bubble_sort(rw: _Rewriter, lo: int, hi: int, bc_first: bool) -> int:
    """Stable-partition word[lo:hi] by commutator swaps; returns new hi."""
    first = (B, C) if bc_first else (D, E)
    changed = True
    while changed:
        changed = False
        for k in range(lo, hi - 1):
            x, y = abs(rw.word[k]), abs(rw.word[k + 1])
            if x not in first and y in first:
                rw.commute(k)
                changed = True
    return hi


def stallings_presentation() -> Presentation:
    return example_catalog("stallings_S_concise")


def replay_trace(start: Word, trace: ReductionTrace) -> bool:
    """Independent check: every step is a free move or a genuine single
    relator application, and the replay ends at the recorded residual."""
    word = list(start.letters)
    apps = 0
    for step in trace.steps:
        if tuple(word[step.pos : step.pos + len(step.removed)]) != step.removed:
            return False
        if len(word) != step.len_before:
            return False
        if step.rule == FREE:
            r, ins = step.removed, step.inserted
            ok_cancel = len(r) == 2 and not ins and r[0] == -r[1]
            ok_insert = not r and len(ins) == 2 and ins[0] == -ins[1]
            if not (ok_cancel or ok_insert):
                return False
        else:
            if not is_single_application(step.rule, step.removed, step.inserted):
                return False
            apps += 1
        word[step.pos : step.pos + len(step.removed)] = list(step.inserted)
        if len(word) != step.len_after:
            return False
    if apps != trace.relator_applications:
        return False
    return trace.residual is not None and tuple(word) == trace.residual.letters
