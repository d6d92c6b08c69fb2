import random

import pytest

from fpgroups import Alphabet, BudgetExceededError, ValidationError, Word
from fpgroups.growth import (
    FreeAutomorphism,
    catalog_automorphism,
    classify_growth,
    conjugate_distortion,
    detect_periodic_conjugacy,
    distortion_sequence,
    double_test_word,
    iterate_aut,
    length_matrix_oracle,
)

PV = catalog_automorphism("example2")
QUAD = catalog_automorphism("example4")
TRIBONACCI_ROOT = 1.8392867552141612  # real root of x^3 = x^2 + x + 1


class TestIterate:
    def test_pv_substitution_chain(self):
        a = PV.alphabet.word("a")
        expected = ["a", "c", "b c", "a c b c"]
        for n, text in enumerate(expected):
            assert iterate_aut(PV, a, n) == PV.alphabet.word(text)

    def test_zero_power_identity(self):
        rng = random.Random(3)
        for _ in range(50):
            letters = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(10)]
            w = Word(PV.alphabet, letters)
            assert iterate_aut(PV, w, 0) == w

    def test_quadratic_example(self):
        x3 = QUAD.alphabet.word("x3")
        assert iterate_aut(QUAD, x3, 2) == QUAD.alphabet.word("x3 x2 x2 x1")

    def test_semigroup_law(self):
        rng = random.Random(4)
        for _ in range(60):
            letters = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(6)]
            w = Word(PV.alphabet, letters)
            m, n = rng.randint(0, 4), rng.randint(0, 4)
            assert iterate_aut(PV, w, m + n) == iterate_aut(PV, iterate_aut(PV, w, m), n)

    def test_negative_power_uses_inverse(self):
        w = PV.alphabet.word("a c b^-1")
        assert iterate_aut(PV, iterate_aut(PV, w, 3), -3) == w

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            iterate_aut(PV, PV.alphabet.word("a"), 200, max_len=10_000)

    def test_inverse_images_verified(self):
        with pytest.raises(ValidationError):
            FreeAutomorphism.over(["a", "b"], {"a": "a b", "b": "b"},
                                  {"a": "a", "b": "b"})


class TestDistortion:
    def test_tribonacci_lengths(self):
        a = PV.alphabet.word("a")
        seq = distortion_sequence(PV, a, 5)
        assert [v for _, v in seq] == [1, 1, 2, 4, 7, 13]

    def test_tribonacci_recurrence(self):
        a = PV.alphabet.word("a")
        vals = [v for _, v in distortion_sequence(PV, a, 25, max_len=10**7)]
        for n in range(3, len(vals)):
            assert vals[n] == vals[n - 1] + vals[n - 2] + vals[n - 3]

    def test_matrix_oracle_matches_positive_iteration(self):
        for phi, base, n_max in ((PV, "a", 25), (QUAD, "x3", 50)):
            c = phi.alphabet.word(base)
            oracle = length_matrix_oracle(phi, c, n_max)
            seq = [v for _, v in distortion_sequence(phi, c, n_max, max_len=10**7)]
            assert seq == oracle

    def test_quadratic_closed_form(self):
        x3 = QUAD.alphabet.word("x3")
        for n in range(0, 51):
            assert conjugate_distortion(QUAD, x3, n) == 1 + n + n * (n - 1) // 2
        assert conjugate_distortion(QUAD, x3, 4) == 11

    def test_identity_automorphism_constant(self):
        ident = FreeAutomorphism.over(["a", "b"], {"a": "a", "b": "b"})
        w = ident.alphabet.word("a b a")
        assert [v for _, v in distortion_sequence(ident, w, 10)] == [3] * 11

    def test_nondecreasing_for_positive(self):
        seq = [v for _, v in distortion_sequence(PV, PV.alphabet.word("b"), 20)]
        assert all(a <= b for a, b in zip(seq, seq[1:]))


class TestClassifyGrowth:
    def test_tribonacci_is_exponential_with_right_base(self):
        seq = distortion_sequence(PV, PV.alphabet.word("a"), 25, max_len=10**7)
        report = classify_growth(seq)
        assert report.classification == "exponential"
        assert 1.78 <= report.base <= 1.90
        lo, hi = report.base_interval
        assert lo <= TRIBONACCI_ROOT <= hi or abs(report.base - TRIBONACCI_ROOT) < 0.06

    def test_quadratic_is_polynomial_degree_two(self):
        seq = [(n, 1 + n + n * (n - 1) // 2) for n in range(0, 51)]
        report = classify_growth(seq)
        assert report.classification == "polynomial"
        assert 1.9 <= report.degree <= 2.1

    def test_constant_is_bounded(self):
        report = classify_growth([(n, 7) for n in range(12)])
        assert report.classification == "bounded"

    def test_scale_invariance(self):
        seq = distortion_sequence(PV, PV.alphabet.word("a"), 25, max_len=10**7)
        scaled = [(n, 17 * v) for n, v in seq]
        r1, r2 = classify_growth(seq), classify_growth(scaled)
        assert r1.classification == r2.classification == "exponential"
        assert abs(r1.base - r2.base) < 0.02

    def test_too_few_points(self):
        with pytest.raises(ValidationError):
            classify_growth([(0, 1), (1, 2)])


class TestPeriodicConjugacy:
    def test_identity_has_immediate_witness(self):
        ident = FreeAutomorphism.over(["a", "b"], {"a": "a", "b": "b"})
        witness = detect_periodic_conjugacy(ident, 3, 3)
        assert witness is not None and witness.power == 1
        assert len(witness.word) == 1

    def test_swap_automorphism(self):
        swap = FreeAutomorphism.over(["a", "b"], {"a": "b", "b": "a"},
                                     {"a": "b", "b": "a"})
        witness = detect_periodic_conjugacy(swap, 4, 4)
        assert witness is not None
        # first canonical word with a periodic class: the generator a,
        # fixed by the square of the swap
        assert str(witness.word) == "a" and witness.power == 2

    def test_witness_is_verified_exactly(self):
        phi = FreeAutomorphism.over(["a", "b"], {"a": "b a", "b": "a"},
                                    {"a": "b", "b": "a b^-1"})
        witness = detect_periodic_conjugacy(phi, 6, 4)
        if witness is None:
            return
        image = iterate_aut(phi, witness.word, witness.power)
        v = witness.conjugator
        assert ~v * witness.word * v == image

    def test_pv_has_no_small_periodic_class(self):
        assert detect_periodic_conjugacy(PV, 6, 6) is None


class TestDoubleTestWord:
    def test_zero_collapses(self):
        alphabet = Alphabet(["a", "b", "c", "s", "s_bar"])
        c = Alphabet(["a", "b", "c"]).word("a")
        w = double_test_word(c, "s", "s_bar", 0, alphabet)
        assert not w

    def test_shape(self):
        alphabet = Alphabet(["a", "b", "c", "s", "s_bar"])
        c = Alphabet(["a", "b", "c"]).word("a")
        w = double_test_word(c, "s", "s_bar", 2, alphabet)
        assert str(w) == "s^-2 a s^2 s_bar^-2 a^-1 s_bar^2"

    def test_trivial_in_the_double(self):
        from fpgroups import (FreeSolver, QuotientData, SubgroupSpec,
                              build_double_embedding, example_catalog,
                              is_trivial_via_embedding)
        from tests_support_pv import pv_base_solver  # local helper below

        base = example_catalog("example2_base")
        qd = QuotientData.over(base, FreeSolver(["s"]),
                               {"a": "", "b": "", "c": "", "s": "s"})
        pkg = build_double_embedding(base, SubgroupSpec.over(base, ["a", "b", "c"]),
                                     qd, a_solver=pv_base_solver())
        c = Alphabet(["a", "b", "c"]).word("a")
        for n in range(0, 4):
            w = double_test_word(c, "s", "s_bar", n, pkg.source.alphabet)
            assert is_trivial_via_embedding(pkg, w)
        # the fold image dies freely for every n
        fold_alphabet = Alphabet(["a", "b", "c", "s"])
        folded = double_test_word(c, "s", "s", 3, fold_alphabet)
        assert not folded
