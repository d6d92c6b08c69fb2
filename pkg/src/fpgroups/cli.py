"""Command-line front end.

Subcommands: ``construct`` (presentation builders), ``embed`` (canned
embedding packages), ``solve`` (word-problem verdicts), ``check``
(small-cancellation / embedding / injectivity reports), ``experiment``
(distortion, periodic-conjugacy, area, letter-elimination drivers).

Contract: exit 0 on success, 2 on parse errors, 3 on validation errors,
4 on exhausted budgets, 5 on failed checks.  Every command takes --json
for machine output; every written file gets a sibling ``.manifest.json``
with input hashes, the seed, and the package version.  All randomness
flows from --seed through ``random.Random``, so reruns are byte-stable.

Budget defaults can be overridden with the environment variables
FPG_COLLECT_BUDGET (split-extension collection letters) and
FPG_DEHN_MAX_LEN (Dehn reduction length cap).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import (
    BudgetExceededError,
    CheckFailedError,
    ToolkitError,
    ValidationError,
    WordSyntaxError,
)
from .presentations import (
    FreeAction,
    Presentation,
    SubgroupSpec,
    catalog_names,
    direct_product,
    double,
    example_catalog,
    free_product,
    hnn_centralizing,
    load_presentation,
    rips,
    save_presentation,
    semidirect_free,
)
from .smallcanc import check_metric
from .solvers import SmallCancellationSolver, FreeSolver, solver_from_config
from .homomorphisms import (
    QuotientData,
    build_double_embedding,
    build_hnn_embedding,
    build_semidirect_embedding,
    injectivity_probe,
    is_trivial_via_embedding,
    load_embedding,
    save_embedding,
    verify_hom,
)
from .growth import (
    catalog_automorphism,
    classify_growth,
    detect_periodic_conjugacy,
    distortion_sequence,
    double_test_word,
)
from .area import (
    Budget,
    area_experiment,
    loglog_slope,
    stallings_experiment,
    stallings_presentation,
)
from .words import Word, parse_word
from .stallings import reduce_word as stallings_reduce_word

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_BUDGET, EXIT_CHECK = 0, 2, 3, 4, 5


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Session:
    """Collects inputs/outputs so manifests can be written deterministically."""

    def __init__(self, argv, seed):
        self.argv = list(argv)
        self.seed = seed
        self.inputs: dict[str, str] = {}

    def read_presentation(self, path) -> Presentation:
        p = Path(path)
        self.inputs[str(p)] = _sha256(p)
        return load_presentation(p)

    def read_package(self, path):
        p = Path(path)
        self.inputs[str(p)] = _sha256(p)
        return load_embedding(p)

    def write(self, path, text: str):
        p = Path(path)
        p.write_text(text)
        manifest = {
            "command": self.argv,
            "inputs": self.inputs,
            "seed": self.seed,
            "version": __version__,
        }
        Path(str(p) + ".manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        )


def _emit(args, payload: dict, human: str | None = None):
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        print(human if human is not None else json.dumps(payload, indent=2, default=str))


# ---------------------------------------------------------------------------
# construct

def _sub_spec(pres: Presentation, text: str) -> SubgroupSpec:
    return SubgroupSpec.over(pres, [t.strip() for t in text.split(",") if t.strip()])


def cmd_construct(args, session: Session) -> int:
    kind = args.kind
    if kind == "rips":
        quotient = session.read_presentation(args.quotient)
        pres, kernel = rips(quotient, start=args.start, block=args.block)
        extra = {"kernel": [str(w) for w in kernel.generator_words]}
    elif kind == "double":
        base = session.read_presentation(args.input)
        pres = double(base, _sub_spec(base, args.sub), merge=args.merge)
        extra = {}
    elif kind == "hnn":
        base = session.read_presentation(args.input)
        pres = hnn_centralizing(base, _sub_spec(base, args.sub), args.stable)
        extra = {}
    elif kind == "semidirect":
        base = session.read_presentation(args.input)
        pairs = []
        for item in args.stable:
            name, _, conj = item.partition("=")
            pairs.append((name.strip(), conj.strip()))
        action = FreeAction.over(base, pairs)
        pres = semidirect_free(base, action, decoration=args.decoration)
        extra = {}
    elif kind in ("freeprod", "dirprod"):
        p1 = session.read_presentation(args.input)
        p2 = session.read_presentation(args.second)
        pres = (free_product if kind == "freeprod" else direct_product)(p1, p2)
        extra = {}
    elif kind == "catalog":
        pres = example_catalog(args.name)
        extra = {}
    else:  # pragma: no cover
        raise ValidationError(f"unknown construct kind {kind!r}")
    from .presentations import format_presentation

    session.write(args.output, format_presentation(pres))
    payload = {
        "kind": kind,
        "output": args.output,
        "generators": len(pres.alphabet),
        "relators": len(pres.relators),
        "total_relator_length": pres.total_relator_length(),
        **extra,
    }
    _emit(args, payload,
          f"wrote {args.output}: {len(pres.alphabet)} generators, "
          f"{len(pres.relators)} relators, total length {pres.total_relator_length()}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# embed

def _quotient_data(base: Presentation, spec: str) -> QuotientData:
    """'x,y' -> quotient free on x,y; every other generator dies."""
    keep = [t.strip() for t in spec.split(",") if t.strip()]
    solver = FreeSolver(keep)
    images = {g: (g if g in keep else "") for g in base.alphabet.names}
    return QuotientData.over(base, solver, images)


def _base_solver(args, base: Presentation, session: Session):
    if args.a_solver:
        p = Path(args.a_solver)
        session.inputs[str(p)] = _sha256(p)
        return solver_from_config(json.loads(p.read_text()), base_dir=p.parent)
    if not base.relators:
        return FreeSolver(base.alphabet)
    return SmallCancellationSolver(base)


def cmd_embed(args, session: Session) -> int:
    base = session.read_presentation(args.input)
    qd = _quotient_data(base, args.quotient_free)
    a_solver = _base_solver(args, base, session)
    if args.kind == "double":
        pkg = build_double_embedding(base, _sub_spec(base, args.sub), qd,
                                     a_solver=a_solver)
    elif args.kind == "hnn":
        pkg = build_hnn_embedding(base, _sub_spec(base, args.sub), args.stable, qd,
                                  a_solver=a_solver)
    else:
        pairs = []
        for item in args.stable_conj:
            name, _, conj = item.partition("=")
            pairs.append((name.strip(), conj.strip()))
        action = FreeAction.over(base, pairs)
        pkg = build_semidirect_embedding(base, _sub_spec(base, args.sub), action, qd,
                                         a_solver=a_solver)
    from .homomorphisms import embedding_to_dict

    session.write(args.output, json.dumps(embedding_to_dict(pkg), indent=2,
                                          sort_keys=True) + "\n")
    payload = {
        "kind": args.kind,
        "output": args.output,
        "verified": pkg.verified,
        "source_generators": list(pkg.source.alphabet.names),
        "target_generators": list(pkg.hom.target_alphabet.names),
    }
    _emit(args, payload, f"wrote verified embedding package {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve

def cmd_solve(args, session: Session) -> int:
    word_text = args.word
    if args.package:
        pkg = session.read_package(args.package)
        w = parse_word(word_text, pkg.source.alphabet)
        image = pkg.hom(w)
        trivial = pkg.target_solver.is_identity(image)
        payload = {"trivial": trivial, "route": "embedding",
                   "stats": {"length": len(w), "image_length": len(image)}}
    elif args.presentation:
        pres = session.read_presentation(args.presentation)
        if args.stallings or pres.relator_keys() == stallings_presentation().relator_keys():
            from .area import stallings_is_trivial

            w = parse_word(word_text, pres.alphabet)
            trace = stallings_reduce_word(w)
            from .area import residual_in_product

            trivial = trace.completed and residual_in_product(trace.residual)
            payload = {"trivial": trivial, "route": "product",
                       "stats": {"length": len(w),
                                 "relator_applications": trace.relator_applications,
                                 "residual_length": len(trace.residual)}}
        else:
            max_len = int(os.environ.get("FPG_DEHN_MAX_LEN", 10**7))
            solver = SmallCancellationSolver(pres, max_len=max_len)
            w = parse_word(word_text, pres.alphabet)
            from .smallcanc import dehn_reduce

            terminal = dehn_reduce(solver.index, w, max_len=max_len)
            payload = {"trivial": not len(terminal), "route": "dehn",
                       "stats": {"length": len(w), "terminal_length": len(terminal)}}
    else:
        p = Path(args.solver)
        session.inputs[str(p)] = _sha256(p)
        solver = solver_from_config(json.loads(p.read_text()), base_dir=p.parent)
        w = parse_word(word_text, solver.alphabet)
        payload = {"trivial": solver.is_identity(w), "route": "product",
                   "stats": {"length": len(w)}}
    _emit(args, payload,
          ("trivial" if payload["trivial"] else "nontrivial") + f" via {payload['route']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# check

def cmd_check(args, session: Session) -> int:
    if args.what == "smallcanc":
        pres = session.read_presentation(args.input)
        lam = Fraction(args.lam)
        report = check_metric(pres, lam)
        payload = {
            "satisfied": report.satisfied,
            "lambda": str(lam),
            "max_ratio": str(report.max_ratio),
            "per_relator": [
                {"length": s.relator_len, "max_piece": s.max_piece_len,
                 "ratio": str(s.ratio)}
                for s in report.pieces.per_relator
            ],
        }
        if report.witness is not None:
            wit = report.witness
            payload["witness"] = {
                "piece_length": len(wit.word),
                "piece": str(wit.word)[:200],
                "first": {"relator": wit.first.relator, "sign": wit.first.sign,
                          "rotation": wit.first.rotation},
                "second": {"relator": wit.second.relator, "sign": wit.second.sign,
                           "rotation": wit.second.rotation},
            }
        _emit(args, payload,
              f"C'({lam}): {'satisfied' if report.satisfied else 'NOT satisfied'} "
              f"(max piece ratio {report.max_ratio})")
        return EXIT_OK if report.satisfied else EXIT_CHECK
    if args.what == "embedding":
        pkg = session.read_package(args.input)  # load re-verifies
        report = verify_hom(pkg.hom, pkg.target_solver)
        payload = {
            "ok": report.ok,
            "relators": len(pkg.source.relators),
            "failures": [{"relator": str(r), "image": str(img)[:200]}
                         for r, img in report.failures],
        }
        _emit(args, payload, "all relators map to the identity" if report.ok
              else f"{len(report.failures)} relator(s) fail")
        return EXIT_OK if report.ok else EXIT_CHECK
    # injectivity probe
    pkg = session.read_package(args.input)
    rng = random.Random(args.seed)
    sub = [t.strip() for t in args.sub.split(",")] if args.sub else list(
        pkg.source.alphabet.names)
    alphabet = pkg.source.alphabet
    letters = [alphabet.index(n) + 1 for n in sub]
    samples = []
    for _ in range(args.count):
        length = rng.randint(1, args.max_len)
        out = []
        while len(out) < length:
            x = rng.choice(letters) * rng.choice((1, -1))
            if out and out[-1] == -x:
                continue
            out.append(x)
        samples.append(Word(alphabet, out))
    a_solver = pkg.target_solver.factors[-1]

    def nontrivial(w):
        return not a_solver.is_identity(_a_coordinate(pkg, w))

    trivials = []
    for _ in range(max(args.count // 10, 10)):
        w = Word.identity(alphabet)
        for _ in range(rng.randint(1, 3)):
            r = rng.choice(pkg.source.relators)
            u = Word(alphabet, [rng.choice(letters) * rng.choice((1, -1))
                                for _ in range(rng.randint(0, 3))])
            w = w * (u * r * ~u)
        trivials.append(w)
    report = injectivity_probe(pkg, samples, nontrivial, trivials)
    payload = {
        "ok": report.ok,
        "nontrivial_checked": report.nontrivial_checked,
        "trivial_checked": report.trivial_checked,
        "hard_failures": [str(w)[:100] for w in report.hard_failures],
        "trivial_failures": [str(w)[:100] for w in report.trivial_failures],
    }
    _emit(args, payload, f"probe {'ok' if report.ok else 'FAILED'}: "
          f"{report.nontrivial_checked} nontrivial + {report.trivial_checked} trivial words")
    return EXIT_OK if report.ok else EXIT_CHECK


def _a_coordinate(pkg, w):
    a_solver = pkg.target_solver.factors[-1]
    image = pkg.hom(w)
    letters = []
    for x in image.letters:
        name = image.alphabet.names[abs(x) - 1]
        if name in a_solver.alphabet:
            g = a_solver.alphabet.index(name) + 1
            letters.append(g if x > 0 else -g)
    return Word(a_solver.alphabet, letters)


# ---------------------------------------------------------------------------
# experiment

def _growth_payload(report):
    if report is None:
        return None
    return {
        "classification": report.classification,
        "base": report.base,
        "base_interval": report.base_interval,
        "degree": report.degree,
        "degree_interval": report.degree_interval,
        "diagnostics": report.diagnostics,
    }


def cmd_experiment(args, session: Session) -> int:
    rng = random.Random(args.seed)
    if args.what == "distortion":
        phi = catalog_automorphism(args.catalog)
        c = parse_word(args.base, phi.alphabet)
        seq = distortion_sequence(phi, c, args.n, max_len=args.max_word_len)
        report = classify_growth(seq)
        csv_text = _csv([("n", "length")] + [(n, v) for n, v in seq])
        payload = {"sequence": list(map(list, seq)), "growth": _growth_payload(report)}
    elif args.what == "periodic":
        phi = catalog_automorphism(args.catalog)
        witness = detect_periodic_conjugacy(phi, args.max_m, args.max_len)
        rows = [("max_m", "max_len", "found")]
        rows.append((args.max_m, args.max_len, witness is not None))
        csv_text = _csv(rows)
        payload = {
            "found": witness is not None,
            "note": "bounded search; absence within bounds proves nothing",
        }
        if witness is not None:
            payload["witness"] = {"word": str(witness.word), "power": witness.power,
                                  "conjugator": str(witness.conjugator)}
    elif args.what == "area":
        from .words import Alphabet

        pres = example_catalog(args.catalog)
        fibre = [n for n in pres.alphabet.names if not n.startswith("s")]
        c = parse_word(args.base, Alphabet(fibre))
        budget = Budget(max_cells=args.max_cells, max_states=args.max_states,
                        width_slack=2)
        rows, report = area_experiment(
            pres,
            lambda n: double_test_word(c, "s", "s_bar", n, pres.alphabet),
            range(1, args.n + 1),
            budget,
        )
        csv_text = _csv([("n", "length", "status", "value", "expanded", "peak_len")]
                        + [(r.n, r.length, r.status, r.value, r.expanded, r.peak_len)
                           for r in rows])
        payload = {
            "rows": [r.__dict__ for r in rows],
            "growth": _growth_payload(report),
            "note": "at_least rows are lower bounds only",
        }
    else:  # stallings
        pres = stallings_presentation()
        words = []
        while len(words) < args.count:
            w = Word.identity(pres.alphabet)
            for _ in range(rng.randint(1, 4)):
                r = pres.relators[rng.randrange(len(pres.relators))]
                if rng.random() < 0.5:
                    r = ~r
                u = Word(pres.alphabet, _random_letters(rng, len(pres.alphabet),
                                                        rng.randint(0, 6)))
                w = w * (u * r * ~u)
            if 4 <= len(w) <= args.n_max:
                words.append(w)
        rows = stallings_experiment(words)
        slope = loglog_slope([(r.n, max(r.applications, 1)) for r in rows])
        csv_text = _csv([("length", "applications", "peak_len")]
                        + [(r.n, r.applications, r.peak_len) for r in rows])
        payload = {"words": len(rows), "loglog_slope": slope,
                   "all_traces_valid": all(r.trace_ok for r in rows)}
    out = Path(args.output)
    session.write(out, csv_text)
    session.write(out.with_suffix(".json"), json.dumps(payload, indent=2,
                                                       sort_keys=True, default=str) + "\n")
    _emit(args, payload, f"wrote {out} and {out.with_suffix('.json')}")
    return EXIT_OK


def _random_letters(rng, n_gens, length):
    out = []
    while len(out) < length:
        x = rng.randint(1, n_gens) * rng.choice((1, -1))
        if out and out[-1] == -x:
            continue
        out.append(x)
    return out


def _csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpg", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build presentation files")
    cs = c.add_subparsers(dest="kind", required=True)
    p_rips = cs.add_parser("rips")
    p_rips.add_argument("--quotient", required=True)
    p_rips.add_argument("--start", type=int, default=81)
    p_rips.add_argument("--block", type=int, default=80)
    p_double = cs.add_parser("double")
    p_double.add_argument("--in", dest="input", required=True)
    p_double.add_argument("--sub", required=True, help="comma-separated subgroup words")
    p_double.add_argument("--merge", action="store_true")
    p_hnn = cs.add_parser("hnn")
    p_hnn.add_argument("--in", dest="input", required=True)
    p_hnn.add_argument("--sub", required=True)
    p_hnn.add_argument("--stable", default="s")
    p_semi = cs.add_parser("semidirect")
    p_semi.add_argument("--in", dest="input", required=True)
    p_semi.add_argument("--stable", action="append", required=True,
                        metavar="NAME=CONJUGATOR")
    p_semi.add_argument("--decoration", default=None)
    for kind in ("freeprod", "dirprod"):
        pp = cs.add_parser(kind)
        pp.add_argument("--in", dest="input", required=True)
        pp.add_argument("--with", dest="second", required=True)
    p_cat = cs.add_parser("catalog")
    p_cat.add_argument("name", choices=catalog_names())
    for sp in cs.choices.values():
        sp.add_argument("-o", "--output", required=True)
        sp.add_argument("--json", action="store_true")

    e = sub.add_parser("embed", help="build verified embedding packages")
    es = e.add_subparsers(dest="kind", required=True)
    for kind in ("double", "hnn", "semidirect"):
        pe = es.add_parser(kind)
        pe.add_argument("--in", dest="input", required=True)
        pe.add_argument("--sub", required=True)
        pe.add_argument("--quotient-free", required=True,
                        help="generators of the free quotient; the rest die")
        pe.add_argument("--a-solver", default=None,
                        help="solver config JSON for the base group")
        if kind == "hnn":
            pe.add_argument("--stable", default="s")
        if kind == "semidirect":
            pe.add_argument("--stable-conj", action="append", required=True,
                            metavar="NAME=CONJUGATOR")
        pe.add_argument("-o", "--output", required=True)
        pe.add_argument("--json", action="store_true")

    s = sub.add_parser("solve", help="decide whether a word is trivial")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--pres", dest="presentation")
    g.add_argument("--pkg", dest="package")
    g.add_argument("--solver", dest="solver")
    s.add_argument("-w", "--word", required=True)
    s.add_argument("--stallings", action="store_true",
                   help="force the letter-elimination route")
    s.add_argument("--json", action="store_true")

    k = sub.add_parser("check", help="verification reports")
    ks = k.add_subparsers(dest="what", required=True)
    k_sc = ks.add_parser("smallcanc")
    k_sc.add_argument("input")
    k_sc.add_argument("--lambda", dest="lam", default="1/6")
    k_emb = ks.add_parser("embedding")
    k_emb.add_argument("input")
    k_inj = ks.add_parser("injectivity")
    k_inj.add_argument("input")
    k_inj.add_argument("--sub", default=None)
    k_inj.add_argument("--count", type=int, default=200)
    k_inj.add_argument("--max-len", type=int, default=12)
    k_inj.add_argument("--seed", type=int, default=0)
    for sp in ks.choices.values():
        sp.add_argument("--json", action="store_true")

    x = sub.add_parser("experiment", help="measurement drivers (CSV + JSON)")
    xs = x.add_subparsers(dest="what", required=True)
    x_dist = xs.add_parser("distortion")
    x_dist.add_argument("--catalog", required=True)
    x_dist.add_argument("--base", required=True)
    x_dist.add_argument("--n", type=int, default=25)
    x_dist.add_argument("--max-word-len", type=int, default=10**7)
    x_per = xs.add_parser("periodic")
    x_per.add_argument("--catalog", required=True)
    x_per.add_argument("--max-m", type=int, default=6)
    x_per.add_argument("--max-len", type=int, default=6)
    x_area = xs.add_parser("area")
    x_area.add_argument("--catalog", default="example2_double")
    x_area.add_argument("--base", default="a")
    x_area.add_argument("--n", type=int, default=3)
    x_area.add_argument("--max-cells", type=int, default=4)
    x_area.add_argument("--max-states", type=int, default=4_000_000)
    x_st = xs.add_parser("stallings")
    x_st.add_argument("--count", type=int, default=200)
    x_st.add_argument("--n-max", type=int, default=60)
    for sp in xs.choices.values():
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("-o", "--output", required=True)
        sp.add_argument("--json", action="store_true")

    return parser


_HANDLERS = {
    "construct": cmd_construct,
    "embed": cmd_embed,
    "solve": cmd_solve,
    "check": cmd_check,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    session = Session(argv, getattr(args, "seed", None))
    try:
        return _HANDLERS[args.command](args, session)
    except WordSyntaxError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceededError as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        print(json.dumps({"verdict": "indeterminate", "reason": str(err)}))
        return EXIT_BUDGET
    except CheckFailedError as err:
        print(f"check failed: {err}", file=sys.stderr)
        return EXIT_CHECK
    except (ValidationError, ToolkitError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
