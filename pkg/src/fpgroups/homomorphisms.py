"""Homomorphisms between presented groups and the embedding builders.

The pattern behind every builder: a group built by doubling (or adding a
centralizing stable letter, or extending by a free group) maps (1) onto
the quotient side, where the glued subgroup dies, and (2) onto the base
group by folding the copies together.  The pair is injective, so deciding
a word in the constructed group reduces to deciding its two coordinates
in a product of simpler groups.

Target alphabets name the coordinates with suffixes (``_q``, ``_qbar``,
``_a``; stable letters keep their names), which is what makes deciding a
direct product by projection-deletion valid by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    AlphabetMismatchError,
    BudgetExceededError,
    CheckFailedError,
    ValidationError,
)
from .presentations import (
    BAR,
    FreeAction,
    Presentation,
    SubgroupSpec,
    double,
    format_presentation,
    hnn_centralizing,
    parse_presentation,
    semidirect_free,
)
from .solvers import (
    DirectProductSolver,
    FreeProductSolver,
    FreeSolver,
    Solver,
    SplitExtensionSolver,
    StableLetter,
    solver_from_config,
)
from .words import Alphabet, Word, format_word, parse_word

Q_SUFFIX = "_q"
QBAR_SUFFIX = "_qbar"
A_SUFFIX = "_a"


class Homomorphism:
    """Generator-image map from a presented source into a target alphabet."""

    __slots__ = ("source", "target_alphabet", "images", "label", "_table")

    def __init__(self, source: Presentation, target_alphabet: Alphabet,
                 images: dict[str, Word], label: str = ""):
        table: list[tuple[int, ...]] = [()]
        for g in source.alphabet.names:
            if g not in images:
                raise ValidationError(f"no image for generator {g!r}")
            img = images[g]
            if img.alphabet.names != target_alphabet.names:
                raise ValidationError(f"image of {g!r} is not over the target alphabet")
            table.append(img.letters)
        self.source = source
        self.target_alphabet = target_alphabet
        self.images = dict(images)
        self.label = label
        self._table = table

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def __repr__(self):
        return f"<hom {self.label or '?'}: {len(self.source.alphabet)} generators>"


def apply(h: Homomorphism, w: Word) -> Word:
    """Image of ``w``: substitute generator images and freely reduce."""
    if w.alphabet.names != h.source.alphabet.names:
        raise AlphabetMismatchError("word is not over the homomorphism's source alphabet")
    table = h._table
    out: list[int] = []
    for x in w.letters:
        img = table[x] if x > 0 else [-y for y in reversed(table[-x])]
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word._raw(h.target_alphabet, out)


def compose(outer: Homomorphism, inner: Homomorphism) -> Homomorphism:
    """outer after inner; inner's target alphabet must match outer's source."""
    if inner.target_alphabet.names != outer.source.alphabet.names:
        raise AlphabetMismatchError("homomorphisms do not compose")
    images = {g: apply(outer, img) for g, img in inner.images.items()}
    return Homomorphism(inner.source, outer.target_alphabet, images,
                        label=f"{outer.label}∘{inner.label}")


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    failures: tuple[tuple[Word, Word], ...]
    indeterminate: tuple[tuple[Word, str], ...] = ()


def verify_hom(h: Homomorphism, target_solver: Solver) -> VerifyReport:
    """Check that every source relator maps to the identity.

    A budget blowup while deciding one relator marks it indeterminate
    rather than failed.
    """
    if target_solver.alphabet.names != h.target_alphabet.names:
        raise AlphabetMismatchError("solver alphabet differs from the homomorphism target")
    failures = []
    indeterminate = []
    for r in h.source.relators:
        image = apply(h, r)
        try:
            if not target_solver.is_identity(image):
                failures.append((r, image))
        except BudgetExceededError as err:
            indeterminate.append((r, str(err)))
    return VerifyReport(not failures and not indeterminate, tuple(failures), tuple(indeterminate))


@dataclass
class EmbeddingPackage:
    """A verified embedding: source presentation, map, and target solver."""

    source: Presentation
    hom: Homomorphism
    target_solver: Solver
    provenance: str
    verified: bool = False


class EmbeddingSolver(Solver):
    """Adapter: decide source words through a verified embedding package."""

    kind = "embedding"

    def __init__(self, pkg: EmbeddingPackage):
        self.alphabet = pkg.source.alphabet
        self.package = pkg

    def is_identity(self, w: Word) -> bool:
        return is_trivial_via_embedding(self.package, w)

    def config(self) -> dict:
        return {"type": "embedding", "package": embedding_to_dict(self.package)}


def is_trivial_via_embedding(pkg: EmbeddingPackage, w: Word) -> bool:
    """Decide w in the source by deciding its image in the product target."""
    return pkg.target_solver.is_identity(apply(pkg.hom, w))


# ---------------------------------------------------------------------------
# relabeling support (order-preserving renames)

def relabel_solver(solver: Solver, mapping: dict[str, str]) -> Solver:
    """Rename a solver's generators; structure and indices are unchanged."""
    new_names = [mapping.get(n, n) for n in solver.alphabet.names]
    if isinstance(solver, (FreeSolver,)):
        return FreeSolver(new_names)
    from .solvers import DirectProductSolver as DP, FreeAbelianSolver, FreeProductSolver as FP
    from .solvers import SmallCancellationSolver, SplitExtensionSolver as SE

    if isinstance(solver, FreeAbelianSolver):
        return FreeAbelianSolver(new_names)
    if isinstance(solver, (DP, FP)):
        factors = [relabel_solver(f, mapping) for f in solver.factors]
        return type(solver)(factors)
    if isinstance(solver, SE):
        base = relabel_solver(solver.base, mapping)
        stables = []
        for s in solver.stables:
            fwd = {mapping.get(g, g): Word._raw(base.alphabet, w.letters)
                   for g, w in s.forward.items()}
            bwd = {mapping.get(g, g): Word._raw(base.alphabet, w.letters)
                   for g, w in s.backward.items()}
            stables.append(StableLetter(mapping.get(s.name, s.name), fwd, bwd))
        return SE(base, stables, budget=solver.budget)
    if isinstance(solver, SmallCancellationSolver):
        # same letters, new names: reuse the matching index as-is
        clone = object.__new__(SmallCancellationSolver)
        clone.alphabet = Alphabet(new_names)
        clone.presentation = solver.presentation.relabel(mapping)
        clone.index = solver.index
        clone.require_metric = solver.require_metric
        clone.max_len = solver.max_len
        return clone
    if isinstance(solver, EmbeddingSolver):
        pkg = solver.package
        source = pkg.source.relabel(mapping)
        images = {mapping.get(g, g): w for g, w in pkg.hom.images.items()}
        hom = Homomorphism(source, pkg.hom.target_alphabet, images, label=pkg.hom.label)
        return EmbeddingSolver(EmbeddingPackage(source, hom, pkg.target_solver,
                                                pkg.provenance, pkg.verified))
    raise ValidationError(f"cannot relabel solver of kind {solver.kind!r}")


# ---------------------------------------------------------------------------
# quotient data fed to the builders

@dataclass(frozen=True)
class QuotientData:
    """A decidable quotient of the base group.

    ``solver`` decides words over the quotient's own alphabet;
    ``gen_images`` sends every base generator to a quotient word (glued
    subgroup generators go to the identity).
    """

    solver: Solver
    gen_images: dict[str, Word]

    @classmethod
    def over(cls, base: Presentation, solver: Solver, images: dict[str, str]) -> "QuotientData":
        gen_images = {}
        for g in base.alphabet.names:
            if g not in images:
                raise ValidationError(f"quotient data lacks an image for {g!r}")
            gen_images[g] = parse_word(images[g], solver.alphabet)
        return cls(solver, gen_images)

    def image_letters(self, name: str) -> tuple[int, ...]:
        return self.gen_images[name].letters


def _suffix_map(names, suffix: str) -> dict[str, str]:
    return {n: n + suffix for n in names}


def _shift_letters(letters, offset: int) -> list[int]:
    return [x + offset if x > 0 else x - offset for x in letters]


def _strip_bar(name: str, decoration: str) -> tuple[str, bool]:
    if name.endswith(decoration):
        return name[: -len(decoration)], True
    return name, False


def _product_target(q_data: QuotientData, a_names, first_extra=(), with_qbar=True):
    """Target alphabet [Q_q | Q_qbar? | extras | A_a] with index offsets."""
    q_names = list(q_data.solver.alphabet.names)
    nq = len(q_names)
    names = [n + Q_SUFFIX for n in q_names]
    if with_qbar:
        names += [n + QBAR_SUFFIX for n in q_names]
    names += list(first_extra)
    names += [n + A_SUFFIX for n in a_names]
    if len(set(names)) != len(names):
        raise ValidationError(f"target coordinate names collide: {names}")
    alphabet = Alphabet(names)
    offsets = {
        "q": 0,
        "qbar": nq,
        "a": (2 * nq if with_qbar else nq) + len(tuple(first_extra)),
    }
    return alphabet, offsets


def _double_images(source: Presentation, q_data: QuotientData, a_names,
                   target: Alphabet, offsets, decoration: str) -> dict[str, Word]:
    a_index = {n: i + 1 for i, n in enumerate(a_names)}
    images = {}
    for g in source.alphabet.names:
        base, barred = _strip_bar(g, decoration)
        q_letters = _shift_letters(q_data.image_letters(base),
                                   offsets["qbar"] if barred else offsets["q"])
        a_letters = [a_index[base] + offsets["a"]]
        images[g] = Word(target, q_letters + a_letters)
    return images


def _finalize(pkg: EmbeddingPackage) -> EmbeddingPackage:
    report = verify_hom(pkg.hom, pkg.target_solver)
    if not report.ok:
        bad = report.failures[0] if report.failures else report.indeterminate[0]
        raise CheckFailedError(
            f"embedding verification failed for {pkg.provenance}: relator {bad[0]!s} -> {bad[1]!s}"
        )
    pkg.verified = True
    return pkg


def build_double_embedding(base: Presentation, sub: SubgroupSpec, q_data: QuotientData,
                           *, merge: bool | None = None, a_solver: Solver | None = None,
                           decoration: str = BAR) -> EmbeddingPackage:
    """Embed the double of ``base`` along ``sub`` into (Q * Q-copy) x base.

    Unbarred generators map to their quotient image (first free factor)
    times themselves; barred copies use the second free factor and fold
    onto the same base coordinate.  The subgroup must be normal with
    quotient as described by ``q_data``; a wrong quotient shows up as a
    relator verification failure.
    """
    if merge is None:
        merge = sub.single_letters() is not None
    source = double(base, sub, merge=merge, decoration=decoration)
    a_names = base.alphabet.names
    target, offsets = _product_target(q_data, a_names)
    images = _double_images(source, q_data, a_names, target, offsets, decoration)
    hom = Homomorphism(source, target, images, label=f"double-embedding({base.label})")

    q_solver = q_data.solver
    qq = relabel_solver(q_solver, _suffix_map(q_solver.alphabet.names, Q_SUFFIX))
    qqbar = relabel_solver(q_solver, _suffix_map(q_solver.alphabet.names, QBAR_SUFFIX))
    a_part = relabel_solver(a_solver or _default_base_solver(base),
                            _suffix_map(a_names, A_SUFFIX))
    solver = DirectProductSolver([FreeProductSolver([qq, qqbar]), a_part])
    return _finalize(EmbeddingPackage(source, hom, solver, provenance="double"))


def build_hnn_embedding(base: Presentation, sub: SubgroupSpec, stable_name: str,
                        q_data: QuotientData, *, a_solver: Solver | None = None) -> EmbeddingPackage:
    """Embed the centralizing HNN extension into (Q * <s>) x base.

    The stable letter maps to the generator of a new infinite-cyclic free
    factor on the quotient side and to the identity on the base side.
    """
    source = hnn_centralizing(base, sub, stable_name)
    a_names = base.alphabet.names
    target, offsets = _product_target(q_data, a_names,
                                      first_extra=(stable_name + Q_SUFFIX,),
                                      with_qbar=False)
    a_index = {n: i + 1 for i, n in enumerate(a_names)}
    s_letter = len(q_data.solver.alphabet) + 1
    images = {}
    for g in base.alphabet.names:
        q_letters = _shift_letters(q_data.image_letters(g), offsets["q"])
        images[g] = Word(target, q_letters + [a_index[g] + offsets["a"]])
    images[stable_name] = Word(target, [s_letter])
    hom = Homomorphism(source, target, images, label=f"hnn-embedding({base.label})")

    q_solver = q_data.solver
    qq = relabel_solver(q_solver, _suffix_map(q_solver.alphabet.names, Q_SUFFIX))
    s_free = FreeSolver([stable_name + Q_SUFFIX])
    # note: the second free-product factor is <s>, not a quotient copy
    a_part = relabel_solver(a_solver or _default_base_solver(base),
                            _suffix_map(a_names, A_SUFFIX))
    solver = DirectProductSolver([FreeProductSolver([qq, s_free]), a_part])
    return _finalize(EmbeddingPackage(source, hom, solver, provenance="hnn"))


def build_semidirect_embedding(base: Presentation, sub: SubgroupSpec, action: FreeAction,
                               q_data: QuotientData, *, a_solver: Solver | None = None,
                               merge: bool | None = None,
                               decoration: str = BAR) -> EmbeddingPackage:
    """Embed (double of base along sub) x| F_m into ((Q * Q) x| F_m) x base.

    Each stable letter acts on the double by conjugation by its conjugator
    word (decorated copy on the barred side); in the target it keeps its
    name, acts on the free product of quotient copies by the induced
    conjugations, and folds to its conjugator on the base coordinate.
    """
    if merge is None:
        merge = sub.single_letters() is not None
    doubled = double(base, sub, merge=merge, decoration=decoration)
    source = semidirect_free(doubled, action, decoration=decoration)
    a_names = base.alphabet.names
    target, offsets = _product_target(q_data, a_names, first_extra=action.stable_names)
    images = _double_images(doubled, q_data, a_names, target, offsets, decoration)
    a_index = {n: i + 1 for i, n in enumerate(a_names)}
    nq = len(q_data.solver.alphabet)
    for i, (t, conj) in enumerate(zip(action.stable_names, action.conjugators)):
        t_letter = 2 * nq + 1 + i
        conj_a = [a_index[conj.alphabet.names[abs(x) - 1]] + offsets["a"]
                  if x > 0 else -(a_index[conj.alphabet.names[-x - 1]] + offsets["a"])
                  for x in conj.letters]
        images[t] = Word(target, [t_letter] + conj_a)
    hom = Homomorphism(source, target, images, label=f"semidirect-embedding({base.label})")

    q_solver = q_data.solver
    qq = relabel_solver(q_solver, _suffix_map(q_solver.alphabet.names, Q_SUFFIX))
    qqbar = relabel_solver(q_solver, _suffix_map(q_solver.alphabet.names, QBAR_SUFFIX))
    free_part = FreeProductSolver([qq, qqbar])
    stables = []
    for t, conj in zip(action.stable_names, action.conjugators):
        q_img = Word(q_data.solver.alphabet, [
            y for x in conj.letters
            for y in (q_data.image_letters(conj.alphabet.names[abs(x) - 1])
                      if x > 0 else
                      [-z for z in reversed(q_data.image_letters(conj.alphabet.names[-x - 1]))])
        ])
        u_q = Word(free_part.alphabet, _shift_letters(q_img.letters, 0))
        u_qbar = Word(free_part.alphabet, _shift_letters(q_img.letters, nq))
        fwd, bwd = {}, {}
        for name in free_part.alphabet.names:
            g = free_part.alphabet.gen(name)
            u = u_q if name.endswith(Q_SUFFIX) else u_qbar
            fwd[name] = ~u * g * u
            bwd[name] = u * g * ~u
        stables.append(StableLetter(t, fwd, bwd))
    first = SplitExtensionSolver(free_part, stables)
    a_part = relabel_solver(a_solver or _default_base_solver(base),
                            _suffix_map(a_names, A_SUFFIX))
    solver = DirectProductSolver([first, a_part])
    return _finalize(EmbeddingPackage(source, hom, solver, provenance="semidirect"))


def _default_base_solver(base: Presentation) -> Solver:
    if base.relators:
        raise ValidationError(
            "base presentation has relators; pass a_solver explicitly"
        )
    return FreeSolver(base.alphabet)


# ---------------------------------------------------------------------------
# inner split extensions collapse to direct products

def semidirect_to_direct(extension: Presentation, stable_names, phi: dict[str, Word],
                         base_solver: Solver | None = None) -> Homomorphism:
    """Collapse an inner split extension onto a direct product.

    ``extension`` presents base x| F (stable letters named in
    ``stable_names``, everything else base); ``phi`` claims that each
    stable letter acts by conjugation by phi(w), a word over the base
    generators.  The returned map fixes the base and sends w to
    phi(w)·w; a relator verification failure means the action was not
    conjugation by phi.
    """
    stable_set = set(stable_names)
    base_names = tuple(n for n in extension.alphabet.names if n not in stable_set)
    base_alphabet = Alphabet(base_names)
    stable_names = tuple(stable_names)
    target = Alphabet(base_names + stable_names)
    base_pos = {n: i + 1 for i, n in enumerate(base_names)}
    images = {g: Word(target, [base_pos[g]]) for g in base_names}
    n_base = len(base_names)
    for i, t in enumerate(stable_names):
        img = phi[t]
        if img.alphabet.names != base_names:
            raise ValidationError(f"phi({t}) must be a word over the base generators")
        images[t] = Word(target, list(img.letters) + [n_base + 1 + i])
    hom = Homomorphism(extension, target, images, label=f"inner-collapse({extension.label})")
    solver = DirectProductSolver([
        base_solver or FreeSolver(base_alphabet),
        FreeSolver(stable_names),
    ])
    report = verify_hom(hom, solver)
    if not report.ok:
        r, img = report.failures[0]
        raise CheckFailedError(
            f"action is not conjugation by phi: relator {r!s} maps to {img!s}"
        )
    return hom


# ---------------------------------------------------------------------------
# injectivity probing

@dataclass(frozen=True)
class ProbeReport:
    nontrivial_checked: int
    trivial_checked: int
    hard_failures: tuple[Word, ...]   # nontrivial source word with trivial image
    trivial_failures: tuple[Word, ...]  # trivial source word with nontrivial image

    @property
    def ok(self) -> bool:
        return not self.hard_failures and not self.trivial_failures


def injectivity_probe(pkg: EmbeddingPackage, samples, nontrivial_oracle,
                      trivial_samples=()) -> ProbeReport:
    """Check the embedding on words of known status.

    ``samples``: words over the source alphabet; each is first screened by
    ``nontrivial_oracle`` (a callable; True means certified nontrivial in
    the source group) and must then have a nontrivial image.  A violation
    is a hard failure: it contradicts injectivity, which signals an
    implementation bug, never a property of the construction.
    ``trivial_samples`` are trivial-by-construction words whose images
    must be trivial.
    """
    hard = []
    checked = 0
    for w in samples:
        if not w or not nontrivial_oracle(w):
            continue
        checked += 1
        if is_trivial_via_embedding(pkg, w):
            hard.append(w)
    bad_trivial = []
    n_trivial = 0
    for w in trivial_samples:
        n_trivial += 1
        if not is_trivial_via_embedding(pkg, w):
            bad_trivial.append(w)
    return ProbeReport(checked, n_trivial, tuple(hard), tuple(bad_trivial))


# ---------------------------------------------------------------------------
# serialization

def embedding_to_dict(pkg: EmbeddingPackage) -> dict:
    return {
        "source": {"inline": format_presentation(pkg.source)},
        "images": {g: format_word(w) for g, w in pkg.hom.images.items()},
        "target": pkg.target_solver.config(),
        "verified": pkg.verified,
        "provenance": pkg.provenance,
        "label": pkg.hom.label,
    }


def save_embedding(pkg: EmbeddingPackage, path) -> None:
    Path(path).write_text(json.dumps(embedding_to_dict(pkg), indent=2, sort_keys=True) + "\n")


def embedding_from_dict(data: dict, base_dir=None) -> EmbeddingPackage:
    src_spec = data["source"]
    if isinstance(src_spec, str):
        p = Path(base_dir) / src_spec if base_dir else Path(src_spec)
        source = parse_presentation(p.read_text(), label=p.stem)
    else:
        source = parse_presentation(src_spec["inline"])
    solver = solver_from_config(data["target"], base_dir)
    images = {g: parse_word(t, solver.alphabet) for g, t in data["images"].items()}
    hom = Homomorphism(source, solver.alphabet, images, label=data.get("label", ""))
    pkg = EmbeddingPackage(source, hom, solver, data.get("provenance", "loaded"),
                           verified=False)
    report = verify_hom(hom, solver)
    if not report.ok:
        raise CheckFailedError("loaded embedding package fails relator verification")
    pkg.verified = True
    return pkg


def load_embedding(spec, base_dir=None) -> EmbeddingPackage:
    if isinstance(spec, dict):
        return embedding_from_dict(spec, base_dir)
    path = Path(base_dir) / spec if base_dir else Path(spec)
    return embedding_from_dict(json.loads(path.read_text()), base_dir=path.parent)
