"""Compositional word-problem solvers.

Each solver decides identity for words over its own alphabet.  Product
solvers own the disjoint union of their factors' alphabets and route
letters by name, so a direct product is decided by projection, a free
product by syllable elimination, a split extension by collecting stable
letters, and small-cancellation presentations by Dehn reduction.  These
compose to decide exactly the product-of-simple-pieces groups that the
embedding constructions target.

Solvers are immutable after construction and safe to share; budgets are
accounted per call.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import AlphabetMismatchError, BudgetExceededError, ValidationError
from .presentations import Presentation, format_presentation, parse_presentation
from .smallcanc import DehnIndex, dehn_reduce
from .words import Alphabet, Word, format_word, parse_word, reduce_ints

DEFAULT_COLLECT_BUDGET = int(os.environ.get("FPG_COLLECT_BUDGET", 10**6))


class Solver:
    """Base interface: ``is_identity`` plus JSON config round-tripping."""

    kind = "abstract"
    alphabet: Alphabet

    def is_identity(self, w: Word) -> bool:
        raise NotImplementedError

    def config(self) -> dict:
        raise NotImplementedError

    def _check(self, w: Word) -> None:
        if w.alphabet.names != self.alphabet.names:
            raise AlphabetMismatchError(
                f"word over {w.alphabet!r}, solver over {self.alphabet!r}"
            )

    def word(self, text: str) -> Word:
        return parse_word(text, self.alphabet)


class FreeSolver(Solver):
    kind = "free"

    def __init__(self, alphabet):
        self.alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)

    def is_identity(self, w: Word) -> bool:
        self._check(w)
        return not w.letters

    def config(self) -> dict:
        return {"type": "free", "generators": list(self.alphabet.names)}


class FreeAbelianSolver(Solver):
    kind = "freeabelian"

    def __init__(self, alphabet):
        self.alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)

    def is_identity(self, w: Word) -> bool:
        self._check(w)
        sums = [0] * len(self.alphabet)
        for x in w.letters:
            sums[abs(x) - 1] += 1 if x > 0 else -1
        return not any(sums)

    def config(self) -> dict:
        return {"type": "freeabelian", "generators": list(self.alphabet.names)}


class _CompositeSolver(Solver):
    """Shared plumbing: factor alphabets partition the composite alphabet."""

    def __init__(self, factors):
        factors = list(factors)
        if not factors:
            raise ValidationError("at least one factor is required")
        names: list[str] = []
        for f in factors:
            names.extend(f.alphabet.names)
        if len(set(names)) != len(names):
            raise ValidationError("factor alphabets must be pairwise disjoint")
        self.alphabet = Alphabet(names)
        self.factors = tuple(factors)
        # composite letter index (1-based) -> (factor, letter in factor)
        route = [(0, 0)]
        for fi, f in enumerate(factors):
            for i in range(len(f.alphabet)):
                route.append((fi, i + 1))
        self._route = route

    def _split(self, w: Word) -> list[list[int]]:
        parts: list[list[int]] = [[] for _ in self.factors]
        route = self._route
        for x in w.letters:
            fi, g = route[abs(x)]
            parts[fi].append(g if x > 0 else -g)
        return parts

    def config(self) -> dict:
        return {"type": self.kind, "factors": [f.config() for f in self.factors]}


class DirectProductSolver(_CompositeSolver):
    kind = "direct"

    def is_identity(self, w: Word) -> bool:
        self._check(w)
        for fi, part in enumerate(self._split(w)):
            f = self.factors[fi]
            if not f.is_identity(Word(f.alphabet, part)):
                return False
        return True


class FreeProductSolver(_CompositeSolver):
    kind = "freeproduct"

    def syllable_normal_form(self, w: Word) -> list[tuple[int, Word]]:
        """Alternating syllables with no identity syllable; [] iff trivial.

        Maximal single-factor runs, with identity runs deleted and newly
        adjacent same-factor runs merged, to a fixpoint.
        """
        self._check(w)
        route = self._route
        runs: list[tuple[int, list[int]]] = []
        for x in w.letters:
            fi, g = route[abs(x)]
            fx = g if x > 0 else -g
            if runs and runs[-1][0] == fi:
                runs[-1][1].append(fx)
            else:
                runs.append((fi, [fx]))
        changed = True
        while changed:
            changed = False
            merged: list[tuple[int, list[int]]] = []
            for fi, letters in runs:
                f = self.factors[fi]
                if f.is_identity(Word(f.alphabet, letters)):
                    changed = True
                    continue
                if merged and merged[-1][0] == fi:
                    merged[-1][1].extend(letters)
                    merged[-1] = (fi, reduce_ints(merged[-1][1]))
                    changed = True
                else:
                    merged.append((fi, reduce_ints(letters)))
            runs = merged
        return [(fi, Word(self.factors[fi].alphabet, letters)) for fi, letters in runs]

    def is_identity(self, w: Word) -> bool:
        return not self.syllable_normal_form(w)


@dataclass(frozen=True)
class StableLetter:
    """One stable letter with both substitution directions.

    ``forward`` maps g to the word for t^-1 g t, ``backward`` to t g t^-1.
    Both are over the base alphabet and must cover every base generator.
    """

    name: str
    forward: dict[str, Word]
    backward: dict[str, Word]


class SplitExtensionSolver(Solver):
    kind = "splitextension"

    def __init__(self, base: Solver, stables, budget: int = DEFAULT_COLLECT_BUDGET):
        stables = list(stables)
        names = list(base.alphabet.names) + [s.name for s in stables]
        if len(set(names)) != len(names):
            raise ValidationError("stable letter names collide with the base alphabet")
        self.alphabet = Alphabet(names)
        self.base = base
        self.stables = tuple(stables)
        self.stable_alphabet = Alphabet([s.name for s in stables])
        self.budget = budget
        n_base = len(base.alphabet)
        self._n_base = n_base
        # substitution tables: per stable letter and direction, image of
        # each positive base letter as a letter tuple
        self._fwd: list[list[tuple[int, ...]]] = []
        self._bwd: list[list[tuple[int, ...]]] = []
        for s in stables:
            fwd_row, bwd_row = [()], [()]
            for g in base.alphabet.names:
                for table, mapping, direction in ((fwd_row, s.forward, "forward"),
                                                  (bwd_row, s.backward, "backward")):
                    if g not in mapping:
                        raise ValidationError(
                            f"stable letter {s.name!r} lacks a {direction} image for {g!r}"
                        )
                    img = mapping[g]
                    if img.alphabet.names != base.alphabet.names:
                        raise ValidationError(
                            f"substitution image for {g!r} is not over the base alphabet"
                        )
                    table.append(img.letters)
            self._fwd.append(fwd_row)
            self._bwd.append(bwd_row)
        self._verify_inverse_pairs()

    def _verify_inverse_pairs(self):
        for si, s in enumerate(self.stables):
            for g in range(1, self._n_base + 1):
                img = self._apply_row(self._fwd[si], self._bwd[si][g])
                img = reduce_ints(list(img) + [-g])
                if not self.base.is_identity(Word(self.base.alphabet, img)):
                    raise ValidationError(
                        f"substitutions for stable letter {s.name!r} are not mutually inverse"
                    )

    @staticmethod
    def _apply_row(row, letters):
        out: list[int] = []
        for x in letters:
            img = row[x] if x > 0 else [-y for y in reversed(row[-x])]
            for y in img:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return out

    def collect(self, w: Word) -> tuple[Word, Word]:
        """Push stable letters right: w = (base part) . (stable part).

        Returns the base word (all stable letters removed, substitutions
        applied) and the reduced stable-letter word.  Conjugation towers
        can expand exponentially; the per-call budget guards that.
        """
        self._check(w)
        budget = self.budget
        n_base = self._n_base
        # current conjugation map: image of each positive base letter under
        # conjugation by the stable prefix read so far
        current: list[tuple[int, ...]] | None = None  # None = identity map
        base_out: list[int] = []
        stable_out: list[int] = []
        for x in w.letters:
            idx = abs(x)
            if idx <= n_base:
                g = idx if x > 0 else -idx
                if current is None:
                    img = (g,)
                else:
                    img = current[g] if g > 0 else [-y for y in reversed(current[-g])]
                for y in img:
                    if base_out and base_out[-1] == -y:
                        base_out.pop()
                    else:
                        base_out.append(y)
                if len(base_out) > budget:
                    raise BudgetExceededError(
                        f"collected base word exceeds {budget} letters",
                        partial=(base_out[:64], stable_out),
                    )
            else:
                si = idx - n_base - 1
                step = self._bwd[si] if x > 0 else self._fwd[si]
                st = si + 1 if x > 0 else -(si + 1)
                if stable_out and stable_out[-1] == -st:
                    stable_out.pop()
                else:
                    stable_out.append(st)
                if current is None:
                    if any(step[g] != (g,) for g in range(1, n_base + 1)):
                        current = [()] + [tuple(step[g]) for g in range(1, n_base + 1)]
                else:
                    size = 0
                    composed = [()]
                    for g in range(1, n_base + 1):
                        img = tuple(self._apply_row(current, step[g]))
                        size += len(img)
                        if size > budget:
                            raise BudgetExceededError(
                                f"conjugation table exceeds {budget} letters",
                                partial=None,
                            )
                        composed.append(img)
                    current = composed
        return (
            Word._raw(self.base.alphabet, base_out),
            Word._raw(self.stable_alphabet, stable_out),
        )

    def is_identity(self, w: Word) -> bool:
        base_part, stable_part = self.collect(w)
        if stable_part.letters:
            return False
        return self.base.is_identity(base_part)

    def config(self) -> dict:
        return {
            "type": "splitextension",
            "base": self.base.config(),
            "budget": self.budget,
            "stables": [
                {
                    "name": s.name,
                    "forward": {g: format_word(s.forward[g]) for g in self.base.alphabet.names},
                    "backward": {g: format_word(s.backward[g]) for g in self.base.alphabet.names},
                }
                for s in self.stables
            ],
        }


class SmallCancellationSolver(Solver):
    kind = "smallcanc"

    def __init__(self, presentation: Presentation, require_metric: bool = True,
                 max_len: int = 10**7):
        self.alphabet = presentation.alphabet
        self.presentation = presentation
        self.index = DehnIndex(presentation)
        self.require_metric = require_metric
        self.max_len = max_len
        if require_metric:
            report = self.index.metric_report()
            if not report.satisfied:
                from .errors import CheckFailedError

                raise CheckFailedError(
                    f"presentation is not C'(1/6): max piece ratio {report.max_ratio}"
                )

    def is_identity(self, w: Word) -> bool:
        self._check(w)
        out = dehn_reduce(self.index, w, override_metric=not self.require_metric,
                          max_len=self.max_len)
        return not out.letters

    def config(self) -> dict:
        return {
            "type": "smallcanc",
            "require_metric": self.require_metric,
            "presentation": {"inline": format_presentation(self.presentation)},
        }


def syllable_normal_form(solver: FreeProductSolver, w: Word):
    if not isinstance(solver, FreeProductSolver):
        raise ValidationError("syllable normal form needs a free-product solver")
    return solver.syllable_normal_form(w)


def collect(solver: SplitExtensionSolver, w: Word):
    if not isinstance(solver, SplitExtensionSolver):
        raise ValidationError("collect needs a split-extension solver")
    return solver.collect(w)


def is_identity(solver: Solver, w: Word) -> bool:
    return solver.is_identity(w)


# ---------------------------------------------------------------------------
# JSON config round-trip

def solver_from_config(cfg: dict, base_dir=None) -> Solver:
    """Rebuild a solver from its JSON description.

    Presentations may be inline ({"inline": text}) or a path relative to
    ``base_dir``; embedding-package references dispatch to the
    homomorphisms module.
    """
    kind = cfg["type"]
    if kind == "free":
        return FreeSolver(cfg["generators"])
    if kind == "freeabelian":
        return FreeAbelianSolver(cfg["generators"])
    if kind in ("direct", "freeproduct"):
        factors = [solver_from_config(f, base_dir) for f in cfg["factors"]]
        return (DirectProductSolver if kind == "direct" else FreeProductSolver)(factors)
    if kind == "smallcanc":
        pres = _presentation_from_config(cfg["presentation"], base_dir)
        return SmallCancellationSolver(pres, require_metric=cfg.get("require_metric", True))
    if kind == "splitextension":
        base = solver_from_config(cfg["base"], base_dir)
        stables = []
        for s in cfg["stables"]:
            fwd = {g: parse_word(t, base.alphabet) for g, t in s["forward"].items()}
            bwd = {g: parse_word(t, base.alphabet) for g, t in s["backward"].items()}
            stables.append(StableLetter(s["name"], fwd, bwd))
        return SplitExtensionSolver(base, stables, budget=cfg.get("budget", DEFAULT_COLLECT_BUDGET))
    if kind == "embedding":
        from .homomorphisms import EmbeddingSolver, load_embedding

        return EmbeddingSolver(load_embedding(cfg["package"], base_dir))
    raise ValidationError(f"unknown solver config type {kind!r}")


def _presentation_from_config(spec, base_dir) -> Presentation:
    from pathlib import Path

    if isinstance(spec, str):
        path = Path(base_dir) / spec if base_dir else Path(spec)
        return parse_presentation(path.read_text(), label=path.stem)
    if isinstance(spec, dict) and "inline" in spec:
        return parse_presentation(spec["inline"])
    raise ValidationError("presentation config must be a path or {'inline': text}")
