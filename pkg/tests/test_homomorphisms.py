import random

import pytest

from fpgroups import (
    Alphabet,
    CheckFailedError,
    DirectProductSolver,
    EmbeddingSolver,
    FreeAction,
    FreeProductSolver,
    FreeSolver,
    Homomorphism,
    Presentation,
    QuotientData,
    SmallCancellationSolver,
    SplitExtensionSolver,
    StableLetter,
    SubgroupSpec,
    Word,
    apply,
    build_double_embedding,
    build_hnn_embedding,
    build_semidirect_embedding,
    compose,
    double,
    example_catalog,
    injectivity_probe,
    is_trivial_via_embedding,
    load_embedding,
    relabel_solver,
    rips,
    save_embedding,
    semidirect_free,
    semidirect_to_direct,
    verify_hom,
)
from helpers import conjugated_relator_product, random_word


def fold_hom(pres_double, base_names):
    """bar letters fold onto their originals"""
    target = Alphabet(base_names)
    images = {}
    for g in pres_double.alphabet.names:
        base = g[:-4] if g.endswith("_bar") else g
        images[g] = target.gen(base)
    return Homomorphism(pres_double, target, images, label="fold")


class TestApply:
    def test_fold_map(self):
        f = Presentation.free(["x", "a"])
        d = double(f, SubgroupSpec.over(f, ["a"]), merge=True)
        h = fold_hom(d, ("x", "a"))
        w = d.parse("x_bar^-1 a x_bar")
        assert str(apply(h, w)) == "x^-1 a x"

    def test_identity_hom(self):
        p = example_catalog("stallings_S_concise")
        h = Homomorphism(p, p.alphabet, {g: p.alphabet.gen(g) for g in p.alphabet.names})
        rng = random.Random(1)
        for _ in range(100):
            w = random_word(rng, p.alphabet, 12)
            assert apply(h, w) == w

    def test_kill_letters_then_reduce(self):
        f = Presentation.free(["x", "a"])
        target = Alphabet(["x"])
        h = Homomorphism(f, target, {"x": target.gen("x"), "a": Word.identity(target)})
        assert apply(h, f.parse("x^-1 a x")) == Word.identity(target)

    def test_multiplicative(self):
        f = Presentation.free(["x", "y"])
        target = Alphabet(["u"])
        h = Homomorphism(f, target, {"x": target.word("u u"), "y": target.word("u^-1")})
        rng = random.Random(2)
        for _ in range(200):
            u = random_word(rng, f.alphabet, 10)
            v = random_word(rng, f.alphabet, 10)
            assert apply(h, u * v) == apply(h, u) * apply(h, v)


class TestVerifyHom:
    def test_negative_control_corrupted_image(self):
        z2 = Presentation(Alphabet(["a", "b"]), ["a^-1 b^-1 a b"], label="Z2")
        target = Alphabet(["a", "b"])
        good = {"a": target.gen("a"), "b": target.gen("b")}
        solver = FreeSolver(target)  # free target: commutator survives
        rep = verify_hom(Homomorphism(z2, target, good), solver)
        assert not rep.ok and len(rep.failures) == 1

    def test_abelian_target_verifies(self):
        from fpgroups import FreeAbelianSolver

        z2 = Presentation(Alphabet(["a", "b"]), ["a^-1 b^-1 a b"], label="Z2")
        h = Homomorphism(z2, z2.alphabet, {g: z2.alphabet.gen(g) for g in ("a", "b")})
        assert verify_hom(h, FreeAbelianSolver(["a", "b"])).ok


def small_rips():
    p, kernel = rips(Presentation.free(["x"], label="Z"), start=21, block=20)
    return p, kernel


def rips_quotient_data(p):
    images = {g: "" for g in p.alphabet.names}
    images["x"] = "x"
    return QuotientData.over(p, FreeSolver(["x"]), images)


class TestDoubleEmbedding:
    def test_small_rips_double(self):
        p, kernel = small_rips()
        a_solver = SmallCancellationSolver(p)
        pkg = build_double_embedding(p, kernel, rips_quotient_data(p), a_solver=a_solver)
        assert pkg.verified
        assert pkg.source.alphabet.names == ("x", "x_bar", "a", "b")
        # both copies of a conjugation relator land on the same block word
        w = pkg.source.parse("x_bar^-1 a x_bar") * ~pkg.source.parse("x^-1 a x")
        assert is_trivial_via_embedding(pkg, w)
        assert not is_trivial_via_embedding(pkg, pkg.source.parse("x x_bar^-1"))
        assert not is_trivial_via_embedding(pkg, pkg.source.parse("a b a^-1 b^-1"))

    def test_example2_double(self):
        base = example_catalog("example2_base")
        a_solver = pv_base_solver()
        qd = QuotientData.over(base, FreeSolver(["s"]),
                               {"a": "", "b": "", "c": "", "s": "s"})
        pkg = build_double_embedding(base, SubgroupSpec.over(base, ["a", "b", "c"]),
                                     qd, a_solver=a_solver)
        assert pkg.verified
        assert pkg.source.relator_keys() == example_catalog("example2_double").relator_keys()
        assert not is_trivial_via_embedding(pkg, pkg.source.parse("s s_bar^-1"))
        assert is_trivial_via_embedding(
            pkg, pkg.source.parse("s^-1 a s s_bar^-1 a^-1 s_bar")
        )

    def test_degenerate_full_subgroup(self):
        f = Presentation.free(["a"])
        qd = QuotientData.over(f, FreeSolver([]), {"a": ""})
        pkg = build_double_embedding(f, SubgroupSpec.over(f, ["a"]), qd)
        # merged double of F(a) along itself is F(a) again: a a^-1 is trivial
        assert is_trivial_via_embedding(pkg, pkg.source.parse("a a^-1"))
        assert not is_trivial_via_embedding(pkg, pkg.source.parse("a"))


def pv_base_solver():
    base = FreeSolver(["a", "b", "c"])
    fwd = {g: base.alphabet.word(t) for g, t in
           {"a": "c", "b": "a c", "c": "b c"}.items()}
    bwd = {g: base.alphabet.word(t) for g, t in
           {"a": "b a^-1", "b": "c a^-1", "c": "a"}.items()}
    return SplitExtensionSolver(base, [StableLetter("s", fwd, bwd)])


class TestHnnEmbedding:
    def test_small_rips_hnn(self):
        p, kernel = small_rips()
        a_solver = SmallCancellationSolver(p)
        pkg = build_hnn_embedding(p, kernel, "s", rips_quotient_data(p), a_solver=a_solver)
        assert pkg.verified
        assert pkg.source.alphabet.names == ("x", "a", "b", "s")
        assert is_trivial_via_embedding(pkg, pkg.source.parse("s^-1 a s a^-1"))
        assert not is_trivial_via_embedding(pkg, pkg.source.parse("s^-1 x s x^-1"))

    def test_full_subgroup_gives_base_times_z(self):
        f = Presentation.free(["a"])
        qd = QuotientData.over(f, FreeSolver([]), {"a": ""})
        pkg = build_hnn_embedding(f, SubgroupSpec.over(f, ["a"]), "s", qd)
        assert is_trivial_via_embedding(pkg, pkg.source.parse("s^-1 a s a^-1"))
        assert not is_trivial_via_embedding(pkg, pkg.source.parse("s a"))

    def test_negative_control_wrong_stable_image(self):
        from fpgroups.homomorphisms import _product_target, _suffix_map

        p, kernel = small_rips()
        source = __import__("fpgroups").hnn_centralizing(p, kernel, "s")
        qd = rips_quotient_data(p)
        target, offsets = _product_target(qd, p.alphabet.names, first_extra=("s_q",),
                                          with_qbar=False)
        a_index = {n: i + 1 for i, n in enumerate(p.alphabet.names)}
        images = {}
        for g in p.alphabet.names:
            q = [x + offsets["q"] if x > 0 else x - offsets["q"] for x in qd.image_letters(g)]
            images[g] = Word(target, q + [a_index[g] + offsets["a"]])
        # wrong: stable letter folds to the kernel generator a instead of 1
        s_q_letter = len(qd.solver.alphabet) + 1
        images["s"] = Word(target, [s_q_letter, a_index["a"] + offsets["a"]])
        hom = Homomorphism(source, target, images)
        qq = relabel_solver(qd.solver, _suffix_map(qd.solver.alphabet.names, "_q"))
        solver = DirectProductSolver([
            FreeProductSolver([qq, FreeSolver(["s_q"])]),
            relabel_solver(SmallCancellationSolver(p), _suffix_map(p.alphabet.names, "_a")),
        ])
        rep = verify_hom(hom, solver)
        assert not rep.ok
        # the commutation relator with b is the visible witness
        assert any("b" in str(r) for r, _ in rep.failures)


def build_stallings_E_package():
    f = Presentation.free(["x", "y"], label="F2")
    c = SubgroupSpec.over(f, ["x^-1 y x"])
    action = FreeAction.over(f, [("s", "x")])
    qd = QuotientData.over(f, FreeSolver(["x"]), {"x": "x", "y": ""})
    return build_semidirect_embedding(f, c, action, qd)


def build_stallings_S_package():
    e_pkg = build_stallings_E_package()
    e_pres = e_pkg.source
    e_solver = EmbeddingSolver(e_pkg)
    g_spec = SubgroupSpec.over(e_pres, ["x", "y", "x_bar", "y_bar"])
    qd = QuotientData.over(
        e_pres, FreeSolver(["s"]),
        {"x": "", "y": "", "x_bar": "", "y_bar": "", "s": "s"},
    )
    return build_double_embedding(e_pres, g_spec, qd, a_solver=e_solver)


class TestSemidirectEmbedding:
    def test_stallings_E(self):
        pkg = build_stallings_E_package()
        assert pkg.verified
        assert pkg.source.relator_keys() == example_catalog("stallings_E").relator_keys()
        # y = y_bar holds in E although it is not a printed relator
        assert is_trivial_via_embedding(pkg, pkg.source.parse("y y_bar^-1"))
        assert not is_trivial_via_embedding(pkg, pkg.source.parse("x x_bar^-1"))

    def test_trivial_action_reduces_to_double_times_free(self):
        f = Presentation.free(["x", "y"])
        c = SubgroupSpec.over(f, ["y"])
        action = FreeAction.over(f, [("t", "")])
        qd = QuotientData.over(f, FreeSolver(["x"]), {"x": "x", "y": ""})
        pkg = build_semidirect_embedding(f, c, action, qd)
        assert pkg.verified
        assert pkg.source.alphabet.names == ("x", "x_bar", "y", "t")
        # the trivial action makes the extension a direct product with Z
        assert is_trivial_via_embedding(pkg, pkg.source.parse("t x t^-1 x^-1"))
        assert is_trivial_via_embedding(pkg, pkg.source.parse("t y t^-1 y^-1"))
        assert not is_trivial_via_embedding(pkg, pkg.source.parse("t x"))
        assert not is_trivial_via_embedding(pkg, pkg.source.parse("x x_bar^-1"))

    def test_stallings_S_chain(self):
        s_pkg = build_stallings_S_package()
        assert s_pkg.verified
        assert len(s_pkg.source.relators) == 9
        # a word trivial in S but not freely trivial
        w = s_pkg.source.parse("s^-1 y s s_bar^-1 y^-1 s_bar")
        assert is_trivial_via_embedding(s_pkg, w)
        assert not is_trivial_via_embedding(s_pkg, s_pkg.source.parse("s s_bar^-1"))

    def test_chain_flattened_agrees(self):
        s_pkg = build_stallings_S_package()
        # flatten: replace the embedded-E coordinate by E's own target,
        # suffixing every E-target coordinate with _a
        e_pkg = None
        a_part = s_pkg.target_solver.factors[1]
        assert isinstance(a_part, EmbeddingSolver)
        e_pkg = a_part.package
        suffix = {n: n + "__flat" for n in e_pkg.hom.target_alphabet.names}
        e_target_flat = [suffix[n] for n in e_pkg.hom.target_alphabet.names]
        flat_names = ["s_q", "s_qbar"] + e_target_flat
        flat = Alphabet(flat_names)
        lift = {}
        for g in s_pkg.hom.target_alphabet.names:
            if g in ("s_q", "s_qbar"):
                lift[g] = flat.gen(g)
            else:
                image = e_pkg.hom.images[g]
                lift[g] = Word(flat, [
                    (flat.index(suffix[image.alphabet.names[abs(x) - 1]]) + 1) * (1 if x > 0 else -1)
                    for x in image.letters
                ])
        carrier = Presentation(s_pkg.hom.target_alphabet, [], label="carrier")
        fold = Homomorphism(carrier, flat, lift, label="flatten")
        flat_hom = compose(fold, s_pkg.hom)
        flat_solver = DirectProductSolver([
            FreeProductSolver([FreeSolver(["s_q"]), FreeSolver(["s_qbar"])]),
            relabel_solver(e_pkg.target_solver, suffix),
        ])
        rep = verify_hom(flat_hom, flat_solver)
        assert rep.ok
        rng = random.Random(77)
        for _ in range(300):
            w = random_word(rng, s_pkg.source.alphabet, rng.randint(0, 24))
            via_chain = is_trivial_via_embedding(s_pkg, w)
            via_flat = flat_solver.is_identity(
                __import__("fpgroups").apply(flat_hom, w)
            )
            assert via_chain == via_flat


class TestSemidirectToDirect:
    def test_inner_action_collapses(self):
        f = Presentation.free(["a"])
        ext = semidirect_free(f, FreeAction.over(f, [("t", "a")]))
        hom = semidirect_to_direct(ext, ["t"], {"t": f.parse("a")})
        assert str(hom.images["t"]) == "a t"

    def test_trivial_action_is_relabeling(self):
        f = Presentation.free(["a", "b"])
        ext = semidirect_free(f, FreeAction.over(f, [("t", "")]))
        hom = semidirect_to_direct(ext, ["t"], {"t": Word.identity(f.alphabet)})
        assert str(hom.images["t"]) == "t"

    def test_non_inner_action_fails(self):
        # t inverts the generator: no conjugator can do that in a free group
        alphabet = Alphabet(["a", "t"])
        ext = Presentation(alphabet, ["t^-1 a t a"], label="flip")
        with pytest.raises(CheckFailedError):
            semidirect_to_direct(ext, ["t"], {"t": Word.identity(Alphabet(["a"]))})
        with pytest.raises(CheckFailedError):
            semidirect_to_direct(ext, ["t"], {"t": Alphabet(["a"]).word("a a")})


class TestInjectivityProbe:
    def test_small_rips_double_probe(self):
        p, kernel = small_rips()
        a_solver = SmallCancellationSolver(p)
        pkg = build_double_embedding(p, kernel, rips_quotient_data(p), a_solver=a_solver)
        rng = random.Random(123)
        kernel_alphabet = ("a", "b")
        samples = []
        for _ in range(200):
            letters = []
            for x in random_word(rng, Alphabet(["a", "b"]), rng.randint(1, 14)).letters:
                name = ("a", "b")[abs(x) - 1]
                g = pkg.source.alphabet.index(name) + 1
                letters.append(g if x > 0 else -g)
            samples.append(Word(pkg.source.alphabet, letters))

        def nontrivial_in_A(w):
            folded = Word(p.alphabet, [
                (p.alphabet.index(pkg.source.alphabet.names[abs(x) - 1].replace("_bar", "")) + 1)
                * (1 if x > 0 else -1)
                for x in w.letters
            ])
            return not a_solver.is_identity(folded)

        trivials = [conjugated_relator_product(rng, pkg.source, 2, 3) for _ in range(50)]
        report = injectivity_probe(pkg, samples, nontrivial_in_A, trivials)
        assert report.ok
        assert report.nontrivial_checked > 150
        assert report.trivial_checked == 50


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        base = example_catalog("example2_base")
        qd = QuotientData.over(base, FreeSolver(["s"]),
                               {"a": "", "b": "", "c": "", "s": "s"})
        pkg = build_double_embedding(base, SubgroupSpec.over(base, ["a", "b", "c"]),
                                     qd, a_solver=pv_base_solver())
        path = tmp_path / "e2.json"
        save_embedding(pkg, path)
        clone = load_embedding(path)
        assert clone.verified
        rng = random.Random(5)
        for _ in range(100):
            w = random_word(rng, pkg.source.alphabet, rng.randint(0, 20))
            assert is_trivial_via_embedding(pkg, w) == is_trivial_via_embedding(clone, w)
