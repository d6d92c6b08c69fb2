"""Free-group word algebra over finite named alphabets.

Words are stored freely reduced, always.  Internally a word is a tuple of
nonzero signed integers: ``+(i+1)`` is generator ``i``, ``-(i+1)`` its
inverse.  The signed-int encoding makes cancellation a single negation
test and keeps the hot kernels (reduction, substitution, scanning) cheap,
which matters because constructed relators reach ~1e5 letters.

The text grammar used everywhere a word appears in text form::

    word := item (SP item)* | ""      item := atom ("^" int)?
    atom := name | "(" word ")"       int  := "-"? [0-9]+

``^-1`` is inversion, ``^0`` gives the empty word, powers expand eagerly.
Formatting emits minimal parentheses and collapses runs: ``a a a -> a^3``.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator

from .errors import AlphabetMismatchError, WordSyntaxError

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class Alphabet:
    """Ordered list of distinct generator names.

    The order is stable and defines the canonical generator index used by
    every word over this alphabet.  Alphabets are immutable; renaming or
    extending produces a new alphabet.
    """

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        for name in names:
            if not _NAME_RE.fullmatch(name):
                raise ValueError(f"bad generator name: {name!r}")
        index = {name: i for i, name in enumerate(names)}
        if len(index) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        self.names = names
        self._index = index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlphabetMismatchError(f"unknown generator {name!r}") from None

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Alphabet({', '.join(self.names)})"

    def word(self, text: str) -> "Word":
        """Parse ``text`` into a word over this alphabet."""
        return parse_word(text, self)

    def gen(self, name: str) -> "Word":
        return Word(self, (self.index(name) + 1,))


# ---------------------------------------------------------------------------
# int-level kernels, shared by the heavier modules

def reduce_ints(letters: Iterable[int]) -> list[int]:
    """Freely reduce a sequence of signed letters (stack scan, linear)."""
    out: list[int] = []
    push = out.append
    pop = out.pop
    for x in letters:
        if out and out[-1] == -x:
            pop()
        else:
            push(x)
    return out


def invert_ints(letters) -> list[int]:
    return [-x for x in reversed(letters)]


def cyclic_reduce_ints(letters) -> tuple[list[int], list[int]]:
    """Return ``(core, conjugator)`` with word = conj . core . conj^-1."""
    lo, hi = 0, len(letters)
    while hi - lo >= 2 and letters[lo] == -letters[hi - 1]:
        lo += 1
        hi -= 1
    return list(letters[lo:hi]), list(letters[:lo])


class Word:
    """A freely reduced word over a fixed alphabet.

    Immutable; the empty word is the identity.  ``letters`` is the signed
    1-based encoding; ``pairs()`` gives the (generator index, sign) view.
    """

    __slots__ = ("alphabet", "letters", "_hash")

    def __init__(self, alphabet: Alphabet, letters: Iterable[int] = (), *, _reduced: bool = False):
        letters = tuple(letters) if _reduced else tuple(reduce_ints(letters))
        n = len(alphabet.names)
        for x in letters:
            if x == 0 or abs(x) > n:
                raise AlphabetMismatchError(f"letter {x} outside alphabet of size {n}")
        self.alphabet = alphabet
        self.letters = letters
        self._hash = None

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "Word":
        return cls(alphabet, (), _reduced=True)

    @classmethod
    def _raw(cls, alphabet: Alphabet, reduced_letters) -> "Word":
        w = object.__new__(cls)
        w.alphabet = alphabet
        w.letters = tuple(reduced_letters)
        w._hash = None
        return w

    def pairs(self) -> list[tuple[int, int]]:
        """(generator index, sign) view of the letters."""
        return [(abs(x) - 1, 1 if x > 0 else -1) for x in self.letters]

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Word)
            and self.letters == other.letters
            and self.alphabet.names == other.alphabet.names
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.alphabet.names, self.letters))
        return self._hash

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, n: int) -> "Word":
        base = self.letters if n >= 0 else tuple(invert_ints(self.letters))
        return Word(self.alphabet, base * abs(n))

    def conjugate(self, by: "Word") -> "Word":
        """``by . self . by^-1``"""
        return concat(concat(by, self), invert(by))

    def __repr__(self) -> str:
        return f"<{format_word(self) or '1'}>"

    def __str__(self) -> str:
        return format_word(self)


# ---------------------------------------------------------------------------
# the operation surface

def reduce(raw: Word | Iterable[int], alphabet: Alphabet | None = None) -> Word:
    """Freely reduce.  Idempotent; accepts a Word or a raw letter sequence."""
    if isinstance(raw, Word):
        return raw  # stored reduced
    if alphabet is None:
        raise ValueError("an alphabet is required to reduce a raw sequence")
    return Word(alphabet, raw)


def _require_same_alphabet(u: Word, v: Word) -> None:
    if u.alphabet.names != v.alphabet.names:
        raise AlphabetMismatchError(
            f"words over different alphabets: {u.alphabet!r} vs {v.alphabet!r}"
        )


def concat(u: Word, v: Word) -> Word:
    """Freely reduced product; |concat(u, v)| <= |u| + |v|."""
    _require_same_alphabet(u, v)
    a, b = list(u.letters), v.letters
    i = 0
    n = len(b)
    while a and i < n and a[-1] == -b[i]:
        a.pop()
        i += 1
    return Word._raw(u.alphabet, a + list(b[i:]))


def invert(w: Word) -> Word:
    return Word._raw(w.alphabet, invert_ints(w.letters))


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w = conj . core . conj^-1`` with the core cyclically reduced."""
    core, conj = cyclic_reduce_ints(w.letters)
    return Word._raw(w.alphabet, core), Word._raw(w.alphabet, conj)


def exponent_sum(w: Word, gen: str) -> int:
    """Signed count of occurrences of the generator ``gen`` in ``w``."""
    g = w.alphabet.index(gen) + 1
    return sum(1 if x == g else -1 for x in w.letters if abs(x) == g)


# ---------------------------------------------------------------------------
# text grammar

_TOKEN_RE = re.compile(
    r"(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<pow>\^-?[0-9]+)|(?P<open>\()|(?P<close>\))|(?P<ws>\s+)"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise WordSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    return tokens


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Parse the word grammar; raises WordSyntaxError with a position."""
    tokens = _tokenize(text)
    letters, end = _parse_items(tokens, 0, alphabet, depth=0)
    if end != len(tokens):
        raise WordSyntaxError("unbalanced ')'", tokens[end][2])
    return Word(alphabet, letters)


def _parse_items(tokens, i, alphabet, depth) -> tuple[list[int], int]:
    letters: list[int] = []
    while i < len(tokens):
        kind, value, pos = tokens[i]
        if kind == "name":
            atom = [alphabet.index(value) + 1]
            i += 1
        elif kind == "open":
            atom, i = _parse_items(tokens, i + 1, alphabet, depth + 1)
            if i >= len(tokens) or tokens[i][0] != "close":
                raise WordSyntaxError("missing ')'", pos)
            i += 1
        elif kind == "close":
            if depth == 0:
                raise WordSyntaxError("unbalanced ')'", pos)
            return letters, i
        else:
            raise WordSyntaxError(f"unexpected {value!r}", pos)
        if i < len(tokens) and tokens[i][0] == "pow":
            n = int(tokens[i][1][1:])
            i += 1
            if n < 0:
                atom = invert_ints(atom)
                n = -n
            atom = atom * n
        letters.extend(atom)
    return letters, i


def format_word(w: Word) -> str:
    """Canonical text form: runs collapsed (``a a a -> a^3``), '' for identity."""
    names = w.alphabet.names
    parts: list[str] = []
    letters = w.letters
    i = 0
    n = len(letters)
    while i < n:
        x = letters[i]
        j = i
        while j < n and letters[j] == x:
            j += 1
        run = j - i
        name = names[abs(x) - 1]
        exp = run if x > 0 else -run
        parts.append(name if exp == 1 else f"{name}^{exp}")
        i = j
    return " ".join(parts)
