"""Distortion and growth experiments for free-group automorphisms.

The central quantity: for a free-by-cyclic group built from an
automorphism phi, the intrinsic length of the conjugate t^-n c t^n inside
the fibre is |phi^n(c)| in the free basis, exactly.  Iterating the
automorphism and measuring lengths gives the distortion sequence; a
log/log-log tail fit classifies the growth as exponential, polynomial,
or bounded.

A bounded search for periodic conjugacy classes (phi^m(w) conjugate to w)
is included: free-group conjugacy is rotation equality of cyclic
reductions, so each candidate is checked exactly.  A returned witness is
proof; exhausting the bounds proves nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .words import Alphabet, Word, cyclic_reduce_ints, invert_ints, parse_word, reduce_ints


class FreeAutomorphism:
    """Generator images of a free-group endomorphism (invertible when the
    optional inverse images are supplied; that claim is verified on the
    generators at construction)."""

    __slots__ = ("alphabet", "images", "inverse_images", "_table", "_inv_table")

    def __init__(self, alphabet: Alphabet, images: dict[str, Word],
                 inverse_images: dict[str, Word] | None = None):
        self.alphabet = alphabet
        self.images = dict(images)
        self.inverse_images = dict(inverse_images) if inverse_images else None
        self._table = self._build_table(self.images)
        self._inv_table = self._build_table(self.inverse_images) if inverse_images else None
        if self._inv_table is not None:
            for g in range(1, len(alphabet) + 1):
                both = _apply_table(self._inv_table, self._table[g])
                if both != (g,):
                    name = alphabet.names[g - 1]
                    raise ValidationError(
                        f"inverse images do not invert the automorphism on {name!r}"
                    )
                both = _apply_table(self._table, self._inv_table[g])
                if both != (g,):
                    name = alphabet.names[g - 1]
                    raise ValidationError(
                        f"images do not invert the inverse images on {name!r}"
                    )

    @classmethod
    def over(cls, alphabet, images: dict[str, str],
             inverse_images: dict[str, str] | None = None) -> "FreeAutomorphism":
        alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
        imgs = {g: parse_word(t, alphabet) for g, t in images.items()}
        invs = None
        if inverse_images is not None:
            invs = {g: parse_word(t, alphabet) for g, t in inverse_images.items()}
        return cls(alphabet, imgs, invs)

    def _build_table(self, images):
        if images is None:
            return None
        table: list[tuple[int, ...]] = [()]
        for g in self.alphabet.names:
            if g not in images:
                raise ValidationError(f"no image for generator {g!r}")
            img = images[g]
            if img.alphabet.names != self.alphabet.names:
                raise ValidationError(f"image of {g!r} is over the wrong alphabet")
            table.append(img.letters)
        return table

    def is_positive(self) -> bool:
        """True when no generator image contains an inverse letter."""
        return all(all(x > 0 for x in row) for row in self._table[1:])

    def transition_matrix(self) -> np.ndarray:
        """occurrence counts: entry [i, j] = letters of generator i in image of j."""
        n = len(self.alphabet)
        m = np.zeros((n, n), dtype=object)
        for j in range(1, n + 1):
            for x in self._table[j]:
                m[abs(x) - 1, j - 1] += 1
        return m

    def __call__(self, w: Word, power: int = 1, max_len: int | None = None) -> Word:
        return iterate_aut(self, w, power, max_len=max_len)


def _apply_table(table, letters) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        img = table[x] if x > 0 else [-y for y in reversed(table[-x])]
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return tuple(out)


DEFAULT_ITERATE_BUDGET = 10**6


def iterate_aut(phi: FreeAutomorphism, w: Word, n: int,
                max_len: int | None = DEFAULT_ITERATE_BUDGET) -> Word:
    """phi^n(w) by repeated substitution, reducing after every step.

    Negative powers need inverse images.  Lengths are governed by the
    transition matrix, so exponential automorphisms exhaust the budget at
    moderate n; that raises rather than truncating.
    """
    if w.alphabet.names != phi.alphabet.names:
        raise ValidationError("word is not over the automorphism's alphabet")
    if n < 0:
        if phi._inv_table is None:
            raise ValidationError("negative powers need inverse images")
        table = phi._inv_table
        n = -n
    else:
        table = phi._table
    letters = w.letters
    for step in range(n):
        letters = _apply_table(table, letters)
        if max_len is not None and len(letters) > max_len:
            raise BudgetExceededError(
                f"iterate length {len(letters)} exceeds {max_len} at power {step + 1}",
                partial=step + 1,
            )
    return Word._raw(w.alphabet, letters)


def conjugate_distortion(phi: FreeAutomorphism, c: Word, n: int,
                         max_len: int | None = DEFAULT_ITERATE_BUDGET) -> int:
    """Intrinsic fibre length of the n-fold stable-letter conjugate of c.

    The fibre is free on the automorphism's alphabet, so this is exactly
    |phi^n(c)|.
    """
    return len(iterate_aut(phi, c, n, max_len=max_len))


def distortion_sequence(phi: FreeAutomorphism, c: Word, n_max: int,
                        max_len: int | None = DEFAULT_ITERATE_BUDGET):
    """[(n, length)] for n = 0..n_max; on budget blowup returns the partial
    sequence inside the raised error."""
    seq: list[tuple[int, int]] = []
    letters = c.letters
    seq.append((0, len(letters)))
    for n in range(1, n_max + 1):
        letters = _apply_table(phi._table, letters)
        if max_len is not None and len(letters) > max_len:
            raise BudgetExceededError(
                f"distortion sequence exceeds {max_len} letters at n={n}", partial=seq
            )
        seq.append((n, len(letters)))
    return seq


def length_matrix_oracle(phi: FreeAutomorphism, c: Word, n_max: int) -> list[int]:
    """Letter-count prediction |phi^n(c)| for positive automorphisms:
    powers of the transition matrix applied to c's occurrence vector.
    Exact only when no cancellation happens (positivity guarantees it for
    positive c; mixed signs may cancel)."""
    m = phi.transition_matrix()
    vec = np.zeros(len(phi.alphabet), dtype=object)
    for x in c.letters:
        vec[abs(x) - 1] += 1
    out = [int(vec.sum())]
    for _ in range(n_max):
        vec = m @ vec
        out.append(int(vec.sum()))
    return out


# ---------------------------------------------------------------------------
# growth classification

@dataclass(frozen=True)
class GrowthFit:
    slope: float
    intercept: float
    stderr: float
    residual_sum: float


@dataclass(frozen=True)
class GrowthReport:
    sequence: tuple[tuple[int, int], ...]
    classification: str            # "exponential" | "polynomial" | "bounded"
    base: float | None             # exponential growth base estimate
    base_interval: tuple[float, float] | None
    degree: float | None           # polynomial degree estimate
    degree_interval: tuple[float, float] | None
    diagnostics: dict


def _linear_fit(xs: np.ndarray, ys: np.ndarray) -> GrowthFit:
    n = len(xs)
    coeffs, residuals, *_ = np.polyfit(xs, ys, 1, full=True)
    slope, intercept = float(coeffs[0]), float(coeffs[1])
    rss = float(residuals[0]) if len(residuals) else 0.0
    dof = max(n - 2, 1)
    x_var = float(((xs - xs.mean()) ** 2).sum()) or 1.0
    stderr = (rss / dof / x_var) ** 0.5
    return GrowthFit(slope, intercept, stderr, rss)


def classify_growth(sequence) -> GrowthReport:
    """Fit the tail half of (n, length) data against exponential and
    polynomial models and keep the decisively better one.

    Exponential wins only when its residual sum is below half the
    polynomial fit's (the margin keeps polynomial data with mild convexity
    from flipping).  Degenerate data (constant tail, or too short) is
    ``bounded``.
    """
    seq = [(int(n), int(v)) for n, v in sequence]
    if len(seq) < 8:
        raise ValidationError("growth classification needs at least 8 points")
    if any(v < 0 for _, v in seq):
        raise ValidationError("lengths must be nonnegative")
    tail = seq[len(seq) // 2 :]
    ns = np.array([n for n, _ in tail], dtype=float)
    vs = np.array([v for _, v in tail], dtype=float)
    diagnostics: dict = {"tail_points": len(tail)}
    if (vs == vs[0]).all():
        return GrowthReport(tuple(seq), "bounded", None, None, None, None, diagnostics)
    if (vs <= 0).any() or (ns <= 0).any():
        # shift away from log singularities; tails of real data are positive
        keep = (vs > 0) & (ns > 0)
        ns, vs = ns[keep], vs[keep]
    log_v = np.log(vs)
    exp_fit = _linear_fit(ns, log_v)
    poly_fit = _linear_fit(np.log(ns), log_v)
    diagnostics["exp_rss"] = exp_fit.residual_sum
    diagnostics["poly_rss"] = poly_fit.residual_sum
    diagnostics["exp_r2"] = 1.0 - exp_fit.residual_sum / max(float(((log_v - log_v.mean()) ** 2).sum()), 1e-30)
    if exp_fit.residual_sum < 0.5 * poly_fit.residual_sum:
        base = float(np.exp(exp_fit.slope))
        half = 1.96 * exp_fit.stderr
        interval = (float(np.exp(exp_fit.slope - half)), float(np.exp(exp_fit.slope + half)))
        return GrowthReport(tuple(seq), "exponential", base, interval, None, None, diagnostics)
    degree = poly_fit.slope
    half = 1.96 * poly_fit.stderr
    if degree < 0.1:
        return GrowthReport(tuple(seq), "bounded", None, None, degree,
                            (degree - half, degree + half), diagnostics)
    return GrowthReport(tuple(seq), "polynomial", None, None, degree,
                        (degree - half, degree + half), diagnostics)


# ---------------------------------------------------------------------------
# periodic conjugacy classes

@dataclass(frozen=True)
class PeriodicWitness:
    word: Word
    power: int
    conjugator: Word


def _ordinal(x: int) -> int:
    # a < a^-1 < b < b^-1 < ...
    return 2 * (abs(x) - 1) + (0 if x > 0 else 1)


def _canonical_cyclic(letters: tuple[int, ...]) -> tuple[int, ...]:
    best = None
    best_key = None
    for seq in (list(letters), invert_ints(letters)):
        doubled = seq + seq
        for i in range(len(seq)):
            cand = tuple(doubled[i : i + len(seq)])
            key = tuple(_ordinal(x) for x in cand)
            if best_key is None or key < best_key:
                best, best_key = cand, key
    return best


def _conjugacy_witness(phi_w: Word, w: Word) -> Word | None:
    """v with phi_w = v^-1 w v, if the two are conjugate."""
    core1, conj1 = cyclic_reduce_ints(w.letters)        # w = p c1 p^-1
    core2, conj2 = cyclic_reduce_ints(phi_w.letters)    # phi_w = q c2 q^-1
    if len(core1) != len(core2):
        return None
    if not core1:
        return Word.identity(w.alphabet)
    doubled = core1 + core1
    for k in range(len(core1)):
        if doubled[k : k + len(core1)] == core2:
            # w = p c1 p^-1, phi_w = q (rho^-1 c1 rho) q^-1  =>  v = p rho q^-1
            rho = core1[:k]
            v = reduce_ints(conj1 + rho + invert_ints(conj2))
            return Word._raw(w.alphabet, v)
    return None


def detect_periodic_conjugacy(phi: FreeAutomorphism, max_m: int, max_len: int):
    """Search nontrivial cyclic words w, |w| <= max_len, and 1 <= m <= max_m
    for phi^m(w) conjugate to w.

    Enumeration is by canonical representatives under rotation and
    inversion, shortest first, then lexicographic, with m ascending
    inside.  Returns the first PeriodicWitness or None; None only means
    none-within-bounds.
    """
    if max_m < 1 or max_len < 1:
        raise ValidationError("bounds must be positive")
    n = len(phi.alphabet)
    letters_range = sorted(
        [g for g in range(1, n + 1)] + [-g for g in range(1, n + 1)], key=_ordinal
    )
    for length in range(1, max_len + 1):
        for raw in product(letters_range, repeat=length):
            if any(raw[i] == -raw[(i + 1) % length] for i in range(length)):
                continue  # not cyclically reduced
            if _canonical_cyclic(raw) != raw:
                continue  # not the class representative
            w = Word._raw(phi.alphabet, raw)
            image = w
            for m in range(1, max_m + 1):
                image = iterate_aut(phi, image, 1)
                v = _conjugacy_witness(image, w)
                if v is not None:
                    return PeriodicWitness(w, m, v)
    return None


# ---------------------------------------------------------------------------
# the doubled commutator-style test word

def double_test_word(c: Word, s_name: str, s_bar_name: str, n: int,
                     alphabet: Alphabet) -> Word:
    """s^-n c s^n sbar^-n c^-1 sbar^n over the double's alphabet.

    Trivial in the double: both conjugates land on the same fibre element.
    Its area under tight budgets probes the isoperimetric growth.
    """
    if n < 0:
        raise ValidationError("n must be nonnegative")
    s = alphabet.index(s_name) + 1
    sbar = alphabet.index(s_bar_name) + 1
    c_letters = [
        (alphabet.index(c.alphabet.names[abs(x) - 1]) + 1) * (1 if x > 0 else -1)
        for x in c.letters
    ]
    letters = (
        [-s] * n + c_letters + [s] * n
        + [-sbar] * n + invert_ints(c_letters) + [sbar] * n
    )
    return Word(alphabet, letters)


# named automorphisms used by the experiments and the CLI
AUTOMORPHISM_CATALOG: dict[str, dict] = {
    "example2": {
        "alphabet": ["a", "b", "c"],
        "images": {"a": "c", "b": "a c", "c": "b c"},
        "inverse_images": {"a": "b a^-1", "b": "c a^-1", "c": "a"},
    },
    "example4": {
        "alphabet": ["x1", "x2", "x3"],
        "images": {"x1": "x1", "x2": "x2 x1", "x3": "x3 x2"},
        "inverse_images": {"x1": "x1", "x2": "x2 x1^-1", "x3": "x3 x1 x2^-1"},
    },
}


def catalog_automorphism(name: str) -> FreeAutomorphism:
    try:
        spec = AUTOMORPHISM_CATALOG[name]
    except KeyError:
        raise ValidationError(f"unknown automorphism {name!r}") from None
    return FreeAutomorphism.over(spec["alphabet"], spec["images"], spec["inverse_images"])
