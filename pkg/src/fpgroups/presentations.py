"""Finite presentations and the constructions built on them.

Constructors: free and direct products, doubles along a subgroup,
centralizing HNN extensions, split extensions by free groups acting by
conjugation, and the Rips small-cancellation construction.  A catalog of
fixed reference presentations (Stallings-type groups and friends) is kept
as golden data at the bottom.

Conventions that keep constructed output deterministic:

* second copies of generators get the suffix ``_bar``;
* an unmerged double lists generators as ``X`` then ``X_bar``;
* a merged double keeps the base order and slots each bar copy right
  after its original (shared subgroup letters appear once);
* relators are stored cyclically reduced and deduplicated up to rotation
  and inversion, in construction order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NameCollisionError, ValidationError, WordSyntaxError
from .words import Alphabet, Word, cyclic_reduce, invert, parse_word, format_word


def _least_rotation(seq: list[int]) -> tuple[int, ...]:
    """Booth's algorithm: lexicographically least rotation in O(n)."""
    n = len(seq)
    doubled = seq + seq
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = doubled[j]
        i = f[j - k - 1]
        while i != -1 and sj != doubled[k + i + 1]:
            if sj < doubled[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != doubled[k + i + 1]:
            if sj < doubled[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return tuple(doubled[k : k + n])


def _canonical_cyclic_key(letters: tuple[int, ...]) -> tuple[int, ...]:
    """Least rotation among all rotations of the word and of its inverse."""
    if not letters:
        return letters
    return min(
        _least_rotation(list(letters)),
        _least_rotation([-x for x in reversed(letters)]),
    )


class Presentation:
    """A finite presentation: alphabet, cyclically reduced relators, label.

    Relators that cyclically reduce to the empty word are rejected;
    duplicates up to rotation and inversion are dropped (first wins).
    """

    __slots__ = ("alphabet", "relators", "label")

    def __init__(self, alphabet: Alphabet, relators=(), label: str = ""):
        stored: list[Word] = []
        seen: set[tuple[int, ...]] = set()
        for r in relators:
            if isinstance(r, str):
                r = parse_word(r, alphabet)
            if r.alphabet.names != alphabet.names:
                raise ValidationError(f"relator {r!r} is not over {alphabet!r}")
            core, _ = cyclic_reduce(r)
            if not core:
                raise ValidationError(f"relator {r!r} is trivial after cyclic reduction")
            key = _canonical_cyclic_key(core.letters)
            if key in seen:
                continue
            seen.add(key)
            stored.append(core)
        self.alphabet = alphabet
        self.relators = tuple(stored)
        self.label = label

    @classmethod
    def free(cls, names, label: str = "") -> "Presentation":
        return cls(Alphabet(names), (), label=label or f"free({','.join(names)})")

    def parse(self, text: str) -> Word:
        return parse_word(text, self.alphabet)

    def relator_keys(self) -> frozenset[tuple[int, ...]]:
        """Relators as canonical cyclic keys; order-independent content."""
        return frozenset(_canonical_cyclic_key(r.letters) for r in self.relators)

    def total_relator_length(self) -> int:
        return sum(len(r) for r in self.relators)

    def relabel(self, mapping: dict[str, str], label: str | None = None) -> "Presentation":
        """Rename generators; mapping may cover a subset of the names."""
        new_names = tuple(mapping.get(n, n) for n in self.alphabet.names)
        alphabet = Alphabet(new_names)
        relators = [Word(alphabet, r.letters) for r in self.relators]
        return Presentation(alphabet, relators, label if label is not None else self.label)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Presentation)
            and self.alphabet == other.alphabet
            and self.relators == other.relators
        )

    def __hash__(self):
        return hash((self.alphabet, self.relators))

    def __repr__(self) -> str:
        gens = " ".join(self.alphabet.names)
        return f"<presentation [{gens}] with {len(self.relators)} relators ({self.label})>"


@dataclass(frozen=True)
class SubgroupSpec:
    """A finitely generated subgroup, given by nontrivial generator words."""

    generator_words: tuple[Word, ...]

    def __post_init__(self):
        if not self.generator_words:
            raise ValidationError("subgroup spec needs at least one generator word")
        for w in self.generator_words:
            if not w:
                raise ValidationError("trivial word in subgroup spec")

    @classmethod
    def over(cls, pres: Presentation, texts) -> "SubgroupSpec":
        return cls(tuple(pres.parse(t) for t in texts))

    def single_letters(self) -> list[str] | None:
        """Generator names if every word is a single positive letter, else None."""
        names = []
        for w in self.generator_words:
            if len(w.letters) != 1 or w.letters[0] < 0:
                return None
            names.append(w.alphabet.names[w.letters[0] - 1])
        return names


@dataclass(frozen=True)
class FreeAction:
    """Stable letters t_1..t_m acting by conjugation by words a_1..a_m."""

    stable_names: tuple[str, ...]
    conjugators: tuple[Word, ...]

    def __post_init__(self):
        if len(self.stable_names) != len(self.conjugators):
            raise ValidationError("one conjugator per stable letter is required")
        if len(set(self.stable_names)) != len(self.stable_names):
            raise ValidationError("duplicate stable letter names")

    @classmethod
    def over(cls, pres: Presentation, pairs) -> "FreeAction":
        names, conjs = [], []
        for name, text in pairs:
            names.append(name)
            conjs.append(pres.parse(text) if isinstance(text, str) else text)
        return cls(tuple(names), tuple(conjs))


BAR = "_bar"


def decorate(name: str, decoration: str = BAR) -> str:
    return name + decoration


def _combined_alphabet(first: tuple[str, ...], second: tuple[str, ...]) -> Alphabet:
    clashes = set(first) & set(second)
    if clashes:
        raise NameCollisionError(f"generator names collide: {sorted(clashes)}")
    return Alphabet(first + second)


def _relabel_word(w: Word, target: Alphabet, name_map: dict[str, str]) -> Word:
    src_names = w.alphabet.names
    table = [0] * (len(src_names) + 1)
    for i, n in enumerate(src_names):
        table[i + 1] = target.index(name_map.get(n, n)) + 1
    return Word(target, [table[x] if x > 0 else -table[-x] for x in w.letters])


def embed_word(w: Word, target: Alphabet) -> Word:
    """Reinterpret ``w`` over a larger alphabet containing the same names."""
    return _relabel_word(w, target, {})


def free_product(p1: Presentation, p2: Presentation, decoration: str = BAR) -> Presentation:
    """Disjoint-union presentation; p2's generators get ``decoration``."""
    second = tuple(decorate(n, decoration) for n in p2.alphabet.names)
    alphabet = _combined_alphabet(tuple(p1.alphabet.names), second)
    bar_map = {n: decorate(n, decoration) for n in p2.alphabet.names}
    relators = [embed_word(r, alphabet) for r in p1.relators]
    relators += [_relabel_word(r, alphabet, bar_map) for r in p2.relators]
    return Presentation(alphabet, relators, label=f"({p1.label})*({p2.label})")


def direct_product(p1: Presentation, p2: Presentation, decoration: str = BAR) -> Presentation:
    """Free product plus commutators [g, h] for g in p1, h in p2."""
    base = free_product(p1, p2, decoration)
    relators = list(base.relators)
    for g in p1.alphabet.names:
        gi = base.alphabet.index(g) + 1
        for h in p2.alphabet.names:
            hi = base.alphabet.index(decorate(h, decoration)) + 1
            relators.append(Word(base.alphabet, (-gi, -hi, gi, hi)))
    return Presentation(base.alphabet, relators, label=f"({p1.label})x({p2.label})")


def double(pres: Presentation, sub: SubgroupSpec, merge: bool = False,
           decoration: str = BAR) -> Presentation:
    """Two copies of ``pres`` glued along the subgroup ``sub``.

    Unmerged: generators X + X_bar, relators R + R_bar + {c c_bar^-1}.
    Merged (subgroup generators must be single letters): those letters are
    shared between the copies and the identification relators vanish.
    """
    for w in sub.generator_words:
        if w.alphabet.names != pres.alphabet.names:
            raise ValidationError("subgroup words are not over the presentation's alphabet")
    if not merge:
        second = tuple(decorate(n, decoration) for n in pres.alphabet.names)
        alphabet = _combined_alphabet(tuple(pres.alphabet.names), second)
        bar_map = {n: decorate(n, decoration) for n in pres.alphabet.names}
        relators = [embed_word(r, alphabet) for r in pres.relators]
        relators += [_relabel_word(r, alphabet, bar_map) for r in pres.relators]
        for c in sub.generator_words:
            cw = embed_word(c, alphabet)
            cbar = _relabel_word(c, alphabet, bar_map)
            relators.append(cw * ~cbar)
        return Presentation(alphabet, relators, label=f"double({pres.label})")

    shared = sub.single_letters()
    if shared is None:
        raise ValidationError("merged doubles need single-letter subgroup generators")
    shared_set = set(shared)
    names: list[str] = []
    bar_map: dict[str, str] = {}
    for n in pres.alphabet.names:
        names.append(n)
        if n not in shared_set:
            barred = decorate(n, decoration)
            if barred in pres.alphabet:
                raise NameCollisionError(f"{barred!r} collides with an existing generator")
            names.append(barred)
            bar_map[n] = barred
    alphabet = Alphabet(names)
    relators = [embed_word(r, alphabet) for r in pres.relators]
    relators += [_relabel_word(r, alphabet, bar_map) for r in pres.relators]
    return Presentation(alphabet, relators, label=f"double({pres.label},merged)")


def hnn_centralizing(pres: Presentation, sub: SubgroupSpec, stable_name: str) -> Presentation:
    """Add a stable letter commuting with every subgroup generator word."""
    if stable_name in pres.alphabet:
        raise NameCollisionError(f"stable letter {stable_name!r} already a generator")
    alphabet = Alphabet(tuple(pres.alphabet.names) + (stable_name,))
    s = alphabet.index(stable_name) + 1
    relators = [embed_word(r, alphabet) for r in pres.relators]
    for c in sub.generator_words:
        cw = embed_word(c, alphabet)
        sc = Word(alphabet, (-s,)) * cw * Word(alphabet, (s,))
        relators.append(sc * ~cw)
    return Presentation(alphabet, relators, label=f"hnn({pres.label};{stable_name})")


def semidirect_free(pres: Presentation, action: FreeAction,
                    decoration: str | None = None) -> Presentation:
    """Split extension by a free group: t_i^-1 g t_i = a_i^-1 g a_i.

    With ``decoration`` set (doubles), generators carrying that suffix are
    conjugated by the correspondingly decorated copy of a_i, matching the
    two-copy action used when extending a double.
    """
    for t in action.stable_names:
        if t in pres.alphabet:
            raise NameCollisionError(f"stable letter {t!r} already a generator")
    alphabet = Alphabet(tuple(pres.alphabet.names) + tuple(action.stable_names))
    relators = [embed_word(r, alphabet) for r in pres.relators]
    for t, conj in zip(action.stable_names, action.conjugators):
        ti = alphabet.index(t) + 1
        t_inv = Word(alphabet, (-ti,))
        t_pos = Word(alphabet, (ti,))
        plain = embed_word(conj, alphabet)
        barred = None
        if decoration is not None:
            bar_map = {}
            for n in conj.alphabet.names:
                b = decorate(n, decoration)
                bar_map[n] = b if b in alphabet else n
            barred = _relabel_word(conj, alphabet, bar_map)
        for g in pres.alphabet.names:
            a = plain
            if decoration is not None and g.endswith(decoration):
                a = barred
            gw = alphabet.gen(g)
            left = t_inv * gw * t_pos
            right = ~a * gw * a
            rel = left * ~right
            if rel:
                relators.append(rel)
    return Presentation(alphabet, relators, label=f"semidirect({pres.label})")


# ---------------------------------------------------------------------------
# Rips construction

def _block_word(alphabet: Alphabet, a: int, b: int, start: int, block: int) -> Word:
    """Product over j in [start, start+block) of (ab)^j for odd j, (ab^2)^j for even j."""
    letters: list[int] = []
    for j in range(start, start + block):
        unit = [a, b] if j % 2 == 1 else [a, b, b]
        letters.extend(unit * j)
    return Word(alphabet, letters, _reduced=True)


def rips(quotient: Presentation, start: int = 81, block: int = 80,
         kernel_names: tuple[str, str] = ("a", "b")) -> tuple[Presentation, SubgroupSpec]:
    """Small-cancellation group mapping onto ``quotient`` with 2-generated kernel.

    Output has |X|+2 generators and |R|+4|X| relators.  Right-hand words
    consume consecutive disjoint exponent blocks of length ``block``
    starting at ``start``; larger blocks give a smaller piece ratio.
    """
    if start < 1 or block < 1:
        raise ValidationError("start and block must be positive")
    ka, kb = kernel_names
    for n in (ka, kb):
        if n in quotient.alphabet:
            raise NameCollisionError(f"kernel name {n!r} collides with a quotient generator")
    alphabet = Alphabet(tuple(quotient.alphabet.names) + (ka, kb))
    a = alphabet.index(ka) + 1
    b = alphabet.index(kb) + 1
    relators: list[Word] = []
    m = start
    for r in quotient.relators:
        rhs = _block_word(alphabet, a, b, m, block)
        m += block
        relators.append(embed_word(r, alphabet) * ~rhs)
    for g in quotient.alphabet.names:
        x = alphabet.index(g) + 1
        for left in (
            (-x, a, x), (x, a, -x), (-x, b, x), (x, b, -x),
        ):
            rhs = _block_word(alphabet, a, b, m, block)
            m += block
            relators.append(Word(alphabet, left) * ~rhs)
    pres = Presentation(alphabet, relators, label=f"rips({quotient.label};{start},{block})")
    kernel = SubgroupSpec((alphabet.gen(ka), alphabet.gen(kb)))
    return pres, kernel


# ---------------------------------------------------------------------------
# text format:  'generators: ...' then one 'rel: ...' per line

def format_presentation(pres: Presentation) -> str:
    lines = ["generators: " + " ".join(pres.alphabet.names)]
    lines += ["rel: " + format_word(r) for r in pres.relators]
    return "\n".join(lines) + "\n"


def parse_presentation(text: str, label: str = "") -> Presentation:
    alphabet: Alphabet | None = None
    relators: list[Word] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("generators:"):
            if alphabet is not None:
                raise WordSyntaxError("duplicate generators line", lineno)
            alphabet = Alphabet(line[len("generators:"):].split())
        elif line.startswith("rel:"):
            if alphabet is None:
                raise WordSyntaxError("rel before generators line", lineno)
            body = line[len("rel:"):].strip()
            if "=" in body:
                lhs, rhs = body.split("=", 1)
                w = parse_word(lhs.strip(), alphabet) * ~parse_word(rhs.strip(), alphabet)
            else:
                w = parse_word(body, alphabet)
            relators.append(w)
        else:
            raise WordSyntaxError(f"unrecognized line: {line!r}", lineno)
    if alphabet is None:
        raise WordSyntaxError("missing generators line", 0)
    return Presentation(alphabet, relators, label=label)


def load_presentation(path, label: str | None = None) -> Presentation:
    from pathlib import Path

    p = Path(path)
    return parse_presentation(p.read_text(), label if label is not None else p.stem)


def save_presentation(pres: Presentation, path) -> None:
    from pathlib import Path

    Path(path).write_text(format_presentation(pres))


# ---------------------------------------------------------------------------
# catalog of fixed reference presentations (printed forms, golden data)

def _pres(gen_line: str, rels: list[str], label: str) -> Presentation:
    alphabet = Alphabet(gen_line.split())
    relators = []
    for item in rels:
        if "=" in item:
            lhs, rhs = item.split("=", 1)
            relators.append(parse_word(lhs.strip(), alphabet) * ~parse_word(rhs.strip(), alphabet))
        else:
            relators.append(parse_word(item, alphabet))
    return Presentation(alphabet, relators, label=label)


def _catalog() -> dict[str, Presentation]:
    cat: dict[str, Presentation] = {}

    # Double of the rank-3 free-by-cyclic group along its fibre, with both
    # stable letters acting by the same positive automorphism
    # a -> c, b -> ac, c -> bc.
    cat["example2_double"] = _pres(
        "a b c s s_bar",
        [
            "s^-1 a s = c", "s_bar^-1 a s_bar = c",
            "s^-1 b s = a c", "s_bar^-1 b s_bar = a c",
            "s^-1 c s = b c", "s_bar^-1 c s_bar = b c",
        ],
        "example2_double",
    )

    # Same base group, the ascending-HNN presentation itself.
    cat["example2_base"] = _pres(
        "a b c s",
        ["s^-1 a s = c", "s^-1 b s = a c", "s^-1 c s = b c"],
        "example2_base",
    )

    # Free-by-cyclic group with quadratically growing monodromy
    # x1 -> x1, x2 -> x2 x1, x3 -> x3 x2.
    cat["example4_base"] = _pres(
        "x1 x2 x3 t",
        ["t^-1 x1 t = x1", "t^-1 x2 t = x2 x1", "t^-1 x3 t = x3 x2"],
        "example4_base",
    )

    # Finitely presented split extension of the double of F(x,y) along the
    # normal closure of y; the stable letter acts by conjugation by x.
    cat["stallings_E"] = _pres(
        "x y x_bar y_bar s",
        [
            "s^-1 x s = x",
            "s^-1 y s = x^-1 y x",
            "s^-1 x_bar s = x_bar",
            "s^-1 y_bar s = x_bar^-1 y_bar x_bar",
            "x^-1 y x = x_bar^-1 y_bar x_bar",
        ],
        "stallings_E",
    )

    # Stallings' group: the double of E along its subgroup generated by
    # x, y, x_bar, y_bar, printed long form.
    cat["stallings_S_long"] = _pres(
        "x y x_bar y_bar s t",
        [
            "s^-1 x s = x",
            "s^-1 y s = x^-1 y x",
            "s^-1 x_bar s = x_bar",
            "s^-1 y_bar s = x_bar^-1 y_bar x_bar",
            "t^-1 x t = x",
            "t^-1 y t = x^-1 y x",
            "t^-1 x_bar t = x_bar",
            "t^-1 y_bar t = x_bar^-1 y_bar x_bar",
            "y = y_bar",
        ],
        "stallings_S_long",
    )

    # Stallings' group, concise five-generator form.
    cat["stallings_S_concise"] = _pres(
        "a b c d e",
        [
            "b^-1 a b = c^-1 a c",
            "c^-1 a c = d^-1 a d",
            "d^-1 a d = e^-1 a e",
            "c^-1 d^-1 c d",
            "d^-1 b^-1 d b",
            "e^-1 c^-1 e c",
            "e^-1 b^-1 e b",
        ],
        "stallings_S_concise",
    )

    return cat


_CATALOG_CACHE: dict[str, Presentation] | None = None


def example_catalog(name: str) -> Presentation:
    """Fixed reference presentations by name (see ``catalog_names``)."""
    global _CATALOG_CACHE
    if _CATALOG_CACHE is None:
        _CATALOG_CACHE = _catalog()
        # example1_double is large; built on demand below.
    if name == "example1_double":
        # Large (about 4e5 letters); built on demand from the constructors.
        if "example1_double" not in _CATALOG_CACHE:
            z = Presentation.free(["x"], label="Z")
            a, kernel = rips(z)
            d = double(a, kernel, merge=True)
            _CATALOG_CACHE["example1_double"] = Presentation(
                d.alphabet, d.relators, label="example1_double"
            )
        return _CATALOG_CACHE["example1_double"]
    try:
        return _CATALOG_CACHE[name]
    except KeyError:
        raise ValidationError(f"unknown catalog name {name!r}") from None


def catalog_names() -> list[str]:
    return [
        "example1_double", "example2_base", "example2_double",
        "example4_base", "stallings_E", "stallings_S_long", "stallings_S_concise",
    ]
