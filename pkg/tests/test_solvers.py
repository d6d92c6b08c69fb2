import random

import pytest

from fpgroups import (
    Alphabet,
    BudgetExceededError,
    DirectProductSolver,
    FreeAbelianSolver,
    FreeProductSolver,
    FreeSolver,
    FreeAction,
    Presentation,
    SplitExtensionSolver,
    StableLetter,
    ValidationError,
    Word,
    semidirect_free,
    solver_from_config,
)
from helpers import random_word


def free(*names):
    return FreeSolver(list(names))


class TestBasicSolvers:
    def test_free(self):
        s = free("x", "y")
        assert s.is_identity(s.word("x y y^-1 x^-1"))
        assert not s.is_identity(s.word("x y"))

    def test_free_abelian(self):
        s = FreeAbelianSolver(["a", "b"])
        assert s.is_identity(s.word("a b a^-1 b^-1"))
        assert not s.is_identity(s.word("a b a"))

    def test_alphabet_mismatch(self):
        s = free("x")
        with pytest.raises(Exception):
            s.is_identity(Word(Alphabet(["y"]), [1]))


class TestDirectProduct:
    def test_cross_commutator_is_trivial(self):
        s = DirectProductSolver([free("b", "c"), free("d", "e")])
        assert s.is_identity(s.word("c^-1 d^-1 c d"))
        assert not s.is_identity(s.word("b^-1 c^-1 b c"))

    def test_projection_matches_shuffle_equivalence(self):
        # brute force: words equal in F x F iff per-factor projections agree
        rng = random.Random(11)
        s = DirectProductSolver([free("a", "b"), free("u", "v")])
        for _ in range(500):
            w = random_word(rng, s.alphabet, rng.randint(0, 10))
            f1 = [x for x in w.letters if abs(x) <= 2]
            f2 = [x - (2 if x > 0 else -2) for x in w.letters if abs(x) > 2]
            expected = not Word(Alphabet(["a", "b"]), f1) and not Word(Alphabet(["u", "v"]), f2)
            assert s.is_identity(w) == expected

    def test_partition_violation(self):
        with pytest.raises(ValidationError):
            DirectProductSolver([free("a"), free("a")])


class TestFreeProduct:
    def test_distinct_factor_syllables_never_merge(self):
        s = FreeProductSolver([free("x"), free("x_bar")])
        assert not s.is_identity(s.word("x x_bar x^-1 x_bar^-1"))
        assert s.is_identity(s.word("x x_bar x_bar^-1 x^-1"))

    def test_syllable_normal_form_kills_dead_syllable(self):
        s = FreeProductSolver([FreeAbelianSolver(["a", "b"]), free("c")])
        nf = s.syllable_normal_form(s.word("a b a^-1 b^-1 c"))
        assert len(nf) == 1
        assert nf[0][0] == 1 and str(nf[0][1]) == "c"

    def test_empty_word(self):
        s = FreeProductSolver([free("x"), free("y")])
        assert s.syllable_normal_form(Word.identity(s.alphabet)) == []

    def test_merge_cascade(self):
        # u (dead) v with u, v in the same factor: merge then die
        s = FreeProductSolver([FreeAbelianSolver(["a", "b"]), free("c")])
        w = s.word("a b c c^-1 b^-1 a^-1")
        assert s.syllable_normal_form(w) == []
        assert s.is_identity(w)

    def test_alternating_nonidentity_syllables(self):
        rng = random.Random(12)
        s = FreeProductSolver([FreeAbelianSolver(["a", "b"]), free("c")])
        for _ in range(300):
            w = random_word(rng, s.alphabet, rng.randint(0, 16))
            nf = s.syllable_normal_form(w)
            for i, (fi, part) in enumerate(nf):
                assert not s.factors[fi].is_identity(part)
                if i:
                    assert nf[i - 1][0] != fi


def pv_maps(base_alphabet):
    fwd = {g: base_alphabet.word(t) for g, t in
           {"a": "c", "b": "a c", "c": "b c"}.items()}
    bwd = {g: base_alphabet.word(t) for g, t in
           {"a": "b a^-1", "b": "c a^-1", "c": "a"}.items()}
    return fwd, bwd


class TestSplitExtension:
    def test_trivial_action_is_a_direct_product(self):
        base = FreeProductSolver([free("x"), free("x_bar")])
        ident = {g: base.alphabet.gen(g) for g in base.alphabet.names}
        s = SplitExtensionSolver(base, [StableLetter("s", ident, ident)])
        assert s.is_identity(s.word("s^-1 x s x^-1"))
        assert not s.is_identity(s.word("s x"))

    def test_collect_conjugation_action(self):
        base = free("a")
        conj = {"a": base.alphabet.word("a")}
        s = SplitExtensionSolver(base, [StableLetter("t", conj, conj)])
        base_part, free_part = s.collect(s.word("t^-1 a t a^-1"))
        assert not base_part and not free_part
        assert s.is_identity(s.word("t^-1 a t a^-1"))

    def test_collect_noncommutative_conjugation(self):
        base = free("a", "b")
        fwd = {"a": base.word("a"), "b": base.word("a^-1 b a")}
        bwd = {"a": base.word("a"), "b": base.word("a b a^-1")}
        s = SplitExtensionSolver(base, [StableLetter("t", fwd, bwd)])
        w = s.word("t^-1 b t")
        base_part, free_part = s.collect(w)
        assert not free_part and str(base_part) == "a^-1 b a"
        assert not s.is_identity(w)
        assert s.is_identity(s.word("t^-1 b t a^-1 b^-1 a"))

    def test_mutual_inverse_verification(self):
        base = free("a", "b")
        fwd = {"a": base.word("a"), "b": base.word("a^-1 b a")}
        bad_bwd = {"a": base.word("a"), "b": base.word("b a")}
        with pytest.raises(ValidationError):
            SplitExtensionSolver(base, [StableLetter("t", fwd, bad_bwd)])

    def test_pv_relators_collect_to_identity(self):
        pres = Presentation.free(["a", "b", "c"])
        fwd, bwd = pv_maps(Alphabet(["a", "b", "c"]))
        solver = SplitExtensionSolver(free("a", "b", "c"), [StableLetter("s", fwd, bwd)])
        # relators of the corresponding split extension must die
        ext = Presentation(
            solver.alphabet,
            ["s^-1 a s c^-1", "s^-1 b s c^-1 a^-1", "s^-1 c s c^-1 b^-1"],
        )
        for r in ext.relators:
            assert solver.is_identity(r)

    def test_semidirect_free_relators_collect(self):
        rng = random.Random(17)
        base = Presentation.free(["x", "y"])
        for conj_text in ("x", "x y", "y^-1 x"):
            action = FreeAction.over(base, [("t", conj_text)])
            ext = semidirect_free(base, action)
            conj = base.parse(conj_text)
            fwd = {g: ~conj * base.alphabet.gen(g) * conj for g in base.alphabet.names}
            bwd = {g: conj * base.alphabet.gen(g) * ~conj for g in base.alphabet.names}
            solver = SplitExtensionSolver(free("x", "y"), [StableLetter("t", fwd, bwd)])
            for r in ext.relators:
                base_part, free_part = solver.collect(
                    Word(solver.alphabet, r.letters)
                )
                assert not base_part and not free_part

    def test_budget(self):
        base = free("a", "b", "c")
        fwd, bwd = pv_maps(base.alphabet)
        s = SplitExtensionSolver(base, [StableLetter("s", fwd, bwd)], budget=500)
        with pytest.raises(BudgetExceededError):
            s.collect(s.word("s^-20 a s^20"))


class TestRouteEquivalence:
    def test_two_routes_for_product_of_free_product_and_z(self):
        route_a = DirectProductSolver(
            [FreeProductSolver([free("x"), free("x_bar")]), free("s")]
        )
        base = FreeProductSolver([free("x"), free("x_bar")])
        ident = {g: base.alphabet.gen(g) for g in base.alphabet.names}
        route_b = SplitExtensionSolver(base, [StableLetter("s", ident, ident)])
        assert route_a.alphabet.names == route_b.alphabet.names
        rng = random.Random(42)
        for _ in range(2000):
            w = random_word(rng, route_a.alphabet, rng.randint(0, 60))
            assert route_a.is_identity(w) == route_b.is_identity(w)


class TestConfigRoundtrip:
    def test_composite_config(self):
        s = DirectProductSolver(
            [FreeProductSolver([free("x"), free("x_bar")]), FreeAbelianSolver(["u", "v"])]
        )
        clone = solver_from_config(s.config())
        rng = random.Random(9)
        for _ in range(200):
            w = random_word(rng, s.alphabet, rng.randint(0, 20))
            assert s.is_identity(w) == clone.is_identity(w)

    def test_split_extension_config(self):
        base = free("a", "b", "c")
        fwd, bwd = pv_maps(base.alphabet)
        s = SplitExtensionSolver(base, [StableLetter("s", fwd, bwd)])
        clone = solver_from_config(s.config())
        rng = random.Random(10)
        for _ in range(200):
            w = random_word(rng, s.alphabet, rng.randint(0, 24))
            assert s.is_identity(w) == clone.is_identity(w)
