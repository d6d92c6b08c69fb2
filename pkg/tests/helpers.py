"""Independent oracles and generators shared by the test suite.

Everything here is deliberately naive: quadratic scans, exhaustive
enumeration, direct substitution.  The point is that these routines share
no code path with the implementations they check.
"""

from __future__ import annotations

import random
from itertools import combinations

from fpgroups.presentations import Presentation
from fpgroups.words import Alphabet, Word


def invert_list(letters):
    return [-x for x in reversed(letters)]


def random_reduced_letters(rng: random.Random, n_gens: int, length: int) -> list[int]:
    out: list[int] = []
    while len(out) < length:
        x = rng.choice([s * g for g in range(1, n_gens + 1) for s in (1, -1)])
        if out and out[-1] == -x:
            continue
        out.append(x)
    return out


def random_word(rng: random.Random, alphabet: Alphabet, length: int) -> Word:
    return Word(alphabet, random_reduced_letters(rng, len(alphabet), length))


def random_raw_letters(rng: random.Random, n_gens: int, length: int) -> list[int]:
    """Unreduced sequences, biased toward adjacent cancellations."""
    out: list[int] = []
    for _ in range(length):
        if out and rng.random() < 0.4:
            out.append(-out[-1])
        else:
            g = rng.randint(1, n_gens)
            out.append(g if rng.random() < 0.5 else -g)
    return out


def reduce_random_order(rng: random.Random, letters: list[int]) -> list[int]:
    """Cancel adjacent inverse pairs in random order until none remain."""
    word = list(letters)
    while True:
        sites = [i for i in range(len(word) - 1) if word[i] == -word[i + 1]]
        if not sites:
            return word
        i = rng.choice(sites)
        del word[i : i + 2]


def common_prefix_len(u, v) -> int:
    n = min(len(u), len(v))
    for i in range(n):
        if u[i] != v[i]:
            return i
    return n


def pieces_bruteforce(pres: Presentation) -> dict[int, int]:
    """Longest piece contained in each relator, by scanning all pairs of
    rotation occurrences of all relators and their inverses.  A pair of
    occurrences counts unless it is a full-length match between equal
    rotation words (the cancellable-cell case)."""
    elements = []
    for i, r in enumerate(pres.relators):
        for sign in (1, -1):
            base = list(r.letters) if sign == 1 else invert_list(list(r.letters))
            for k in range(len(base)):
                elements.append((i, base[k:] + base[:k]))
    best = {i: 0 for i in range(len(pres.relators))}
    for (i1, w1), (i2, w2) in combinations(elements, 2):
        length = common_prefix_len(w1, w2)
        if w1 == w2:
            length = min(length, len(w1) - 1)
        if length > best[i1]:
            best[i1] = length
        if length > best[i2]:
            best[i2] = length
    return best


def random_presentation(rng: random.Random, max_gens=4, max_relators=3,
                        max_len=12) -> Presentation:
    """Random small presentation with nondegenerate cyclically reduced relators."""
    n_gens = rng.randint(1, max_gens)
    alphabet = Alphabet([f"g{i}" for i in range(n_gens)])
    relators = []
    seen = set()
    for _ in range(rng.randint(1, max_relators)):
        for _attempt in range(40):
            length = rng.randint(1, max_len)
            letters = random_reduced_letters(rng, n_gens, length)
            w = Word(alphabet, letters)
            if not w:
                continue
            core = w
            if core.letters and core.letters[0] == -core.letters[-1]:
                continue
            key = tuple(core.letters)
            if key in seen:
                continue
            seen.add(key)
            try:
                Presentation(alphabet, relators + [core])
            except Exception:
                continue
            relators.append(core)
            break
    if not relators:
        relators = [Word(alphabet, [1])]
    return Presentation(alphabet, relators, label="random")


def conjugated_relator_product(rng: random.Random, pres: Presentation,
                               n_factors: int, max_conj: int) -> Word:
    """A guaranteed-trivial word: product of conjugates of relators."""
    w = Word.identity(pres.alphabet)
    for _ in range(n_factors):
        r = rng.choice(pres.relators)
        if rng.random() < 0.5:
            r = ~r
        u = random_word(rng, pres.alphabet, rng.randint(0, max_conj))
        w = w * (u * r * ~u)
    return w
