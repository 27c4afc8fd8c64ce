"""Command-line interface, algebra file format and JSON reports.

Exit codes: 0 pass, 1 check failure, 2 input error, 3 inconclusive,
4 pipeline budget error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from importlib import resources

from . import __version__
from .constructions import (FiniteAlgebra, affinize, builtin, commutator_algebra,
                            killing_form, loop_algebra)
from .core import (ASSOCIATIVE, LIE, Element, GeneratorInfo, InputError, Presentation,
                   check_conformal_associativity, check_conformal_jacobi,
                   check_quasi_symmetry, to_fraction, validate_presentation)
from .embed import (Bounds, HypothesisViolated, InconclusiveDegree, PipelineBudgetError,
                    build_enveloping, check_embedded_brackets, verify_embedding)
from .envelope import BudgetExceeded, Leaf, check_adconf, random_tree
from .locality import locality_function

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_BUDGET = 0, 1, 2, 3, 4
SCHEMA = "confalg.report/1"
ALGEBRA_SCHEMA = "confalg.algebra/1"
BUNDLED = ("sl2_loop", "mat2_loop", "affine_sl2", "heis3_loop",
           "abelian1", "abelian2", "abelian3")


# ---------------------------------------------------------------------------
# algebra files

def _frac_str(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else "%d/%d" % (c.numerator, c.denominator)


def _parse_frac(s, where):
    if not isinstance(s, (str, int)) or isinstance(s, bool):
        raise InputError("%s: coefficient must be a \"p/q\" string" % where)
    if isinstance(s, str) and any(ch in s for ch in ".eE"):
        raise InputError("%s: decimal coefficient %r not allowed" % (where, s))
    try:
        return to_fraction(s)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InputError("%s: bad coefficient %r" % (where, s)) from None


def _nonneg_int(x, where):
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise InputError("%s must be a nonnegative integer" % where)
    return x


def presentation_to_dict(p):
    """Canonical JSON-ready form: generators in order, sorted entries."""
    names = p.names
    return {
        "kind": p.kind,
        "generators": [{"name": g.name, "weight": g.weight, "torsion_order": g.torsion_order}
                       for g in p.generators],
        "locality": [{"left": names[i], "right": names[j], "n": N}
                     for (i, j), N in sorted(p.locality.items())],
        "products": [{"left": names[i], "right": names[j], "n": n,
                      "result": [{"coeff": _frac_str(c), "dpow": k, "gen": names[g]}
                                 for (g, k), c in val.items()]}
                     for (i, j, n), val in sorted(p.sc.items())],
    }


def presentation_from_dict(doc):
    """Parse an AlgebraFile document; raises InputError on malformed input."""
    if not isinstance(doc, dict):
        raise InputError("algebra file must be a JSON object")
    kind = doc.get("kind")
    if kind not in (LIE, ASSOCIATIVE):
        raise InputError("kind must be %r or %r" % (LIE, ASSOCIATIVE))
    gens = []
    for k, g in enumerate(doc.get("generators", [])):
        if not isinstance(g, dict) or not isinstance(g.get("name"), str):
            raise InputError("generator %d needs a name" % k)
        gens.append(GeneratorInfo(g["name"], _nonneg_int(g.get("weight", 0), "weight"),
                                  _nonneg_int(g.get("torsion_order", 0), "torsion_order")))
    index = {}
    for i, g in enumerate(gens):
        if g.name in index:
            raise InputError("duplicate generator %r" % g.name)
        index[g.name] = i

    def gi(name):
        if name not in index:
            raise InputError("unknown generator %r" % (name,))
        return index[name]

    locality = {}
    for ent in doc.get("locality", []):
        key = (gi(ent.get("left")), gi(ent.get("right")))
        if key in locality:
            raise InputError("locality for %s, %s given twice" % (ent["left"], ent["right"]))
        locality[key] = _nonneg_int(ent.get("n"), "locality n")
    sc = {}
    for ent in doc.get("products", []):
        i, j = gi(ent.get("left")), gi(ent.get("right"))
        n = _nonneg_int(ent.get("n"), "product n")
        where = "%s(%d)%s" % (ent["left"], n, ent["right"])
        if (i, j, n) in sc:
            raise InputError("%s given twice" % where)
        terms = {}
        for t in ent.get("result", []):
            key = (gi(t.get("gen")), _nonneg_int(t.get("dpow", 0), "dpow"))
            terms[key] = terms.get(key, 0) + _parse_frac(t.get("coeff"), where)
        sc[(i, j, n)] = Element(terms)
    return Presentation(kind, tuple(gens), locality, sc)


def finite_algebra_from_dict(doc):
    """{"kind", "names", "products": [{"left", "right", "result": [{"coeff", "gen"}]}],
    "form": [[...]] (optional)}"""
    if not isinstance(doc, dict) or not isinstance(doc.get("names"), list):
        raise InputError("finite algebra file needs a list of names")
    names = doc["names"]
    index = {n: i for i, n in enumerate(names)}
    if len(index) != len(names):
        raise InputError("duplicate basis names")
    sc = {}
    for ent in doc.get("products", []):
        try:
            i, j = index[ent["left"]], index[ent["right"]]
            row = {index[t["gen"]]: _parse_frac(t.get("coeff"), "product") for t in ent["result"]}
        except (KeyError, TypeError):
            raise InputError("bad product entry %r" % (ent,)) from None
        sc[(i, j)] = row
    form = doc.get("form")
    if form is not None:
        form = [[_parse_frac(x, "form") for x in row] for row in form]
    return FiniteAlgebra(tuple(names), sc, doc.get("kind", LIE), form).validate()


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        if path.startswith("bundled:"):
            name = path.split(":", 1)[1]
            if name not in BUNDLED:
                raise InputError("no bundled algebra %r (have: %s)" % (name, ", ".join(BUNDLED)))
            return json.loads(resources.files("confalg.data").joinpath(name + ".json").read_text())
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc)) from None
    except json.JSONDecodeError as exc:
        raise InputError("malformed JSON in %s: %s" % (path, exc)) from None


def load_presentation(path):
    """An AlgebraFile path, "-" for stdin, or "bundled:<name>"."""
    return presentation_from_dict(_read_json(path))


def bundled(name):
    return load_presentation("bundled:" + name)


def _finite_input(spec):
    if spec.endswith(".json") or spec == "-":
        return finite_algebra_from_dict(_read_json(spec))
    return builtin(spec)


# ---------------------------------------------------------------------------
# commands

def _report(args, result, passed, t0, status=None):
    doc = {
        "schema": SCHEMA,
        "version": __version__,
        "command": args.argv,
        "config": {k: v for k, v in sorted(vars(args).items())
                   if k not in ("func", "argv") and not callable(v)},
        "result": result,
        "passed": passed,
        "timings": {"total_s": round(time.perf_counter() - t0, 6)},
    }
    if status:
        doc["status"] = status
    text = dumps(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args):
    t0 = time.perf_counter()
    p = load_presentation(args.file)
    rep = validate_presentation(p, args.check_grading)
    _report(args, rep.to_dict(), rep.passed, t0)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_check(args):
    t0 = time.perf_counter()
    p = load_presentation(args.file)
    base = validate_presentation(p)
    if not base.passed:
        _report(args, base.to_dict(), False, t0)
        return EXIT_FAIL
    ax = args.axiom
    if ax == "assoc":
        rep = check_conformal_associativity(p, args.m_max, args.n_max, args.threads)
    elif ax == "jacobi":
        rep = check_conformal_jacobi(p, args.m_max, args.n_max, args.threads)
    elif ax in ("qs+", "qs-"):
        rep = check_quasi_symmetry(p, 1 if ax == "qs+" else -1, args.n_max, args.threads)
    else:
        lo, hi = args.window
        tails = None
        if args.random_tails:
            rng = random.Random(args.seed)
            tails = [Leaf(p.gen(g)) for g in range(p.rank)]
            tails += [random_tree(rng, p, 2, args.n_max) for _ in range(args.random_tails)]
        rep = check_adconf(p.with_kind(LIE) if p.kind != LIE else p,
                           args.m_max, args.n_max, (lo, hi), tails)
    _report(args, rep.to_dict(), rep.passed, t0)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_build(args):
    if args.construct == "commutator":
        p = load_presentation(args.input)
        if p.kind != ASSOCIATIVE:
            raise InputError("the commutator construction needs an associative presentation")
        out = commutator_algebra(p)
    else:
        g = _finite_input(args.input)
        if args.construct == "loop":
            out = loop_algebra(g, args.weight)
        else:
            if g.form is None and args.form != "killing":
                raise InputError("%s has no invariant form; pass --form killing" % args.input)
            form = killing_form(g) if args.form == "killing" else None
            out = affinize(g, form, args.central_name, args.weight, args.central_weight)
    rep = validate_presentation(out)
    if not rep.passed:
        raise InputError("constructed presentation does not validate: %s" % rep.witness())
    doc = dict(presentation_to_dict(out), schema=ALGEBRA_SCHEMA)
    text = dumps(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def cmd_locality(args):
    t0 = time.perf_counter()
    p = load_presentation(args.file)
    gens = args.gens.split(",") if args.gens else None
    lengths = args.length or [2, 3, 4]
    rows = [locality_function(p, gens, l, args.n_budget, args.method, args.threads)
            for l in lengths]
    exact = all(r.exact for r in rows)
    status = "exact" if exact else "inconclusive"
    _report(args, {"table": [r.to_dict() for r in rows]}, exact, t0, status)
    return EXIT_PASS if exact else EXIT_INCONCLUSIVE


def _parse_weights(spec, p):
    if spec == "default":
        return None
    try:
        ws = [int(x) for x in spec.split(",")]
    except ValueError:
        raise InputError("weights must be 'default' or comma-separated integers") from None
    if len(ws) == 1:
        ws = ws * p.rank
    return ws


def cmd_embed(args):
    t0 = time.perf_counter()
    p = load_presentation(args.file)
    if p.kind != LIE:
        raise InputError("embed needs a Lie presentation")
    bounds = Bounds(n_d=args.n_d, window=args.stab_window, max_span_dim=args.max_span_dim,
                    budget=args.budget)
    weights = _parse_weights(args.weights, p)
    try:
        env = build_enveloping(p, weights, args.r, bounds)
    except HypothesisViolated as exc:
        _report(args, {"hypothesis": {"ok": False, "witness": exc.witness,
                                      "weight": exc.weight, "message": str(exc)}}, False, t0)
        return EXIT_FAIL
    except (InconclusiveDegree, PipelineBudgetError, BudgetExceeded) as exc:
        _report(args, {"error": type(exc).__name__, "message": str(exc)}, False, t0,
                "budget")
        return EXIT_BUDGET
    try:
        rep = verify_embedding(env, args.window)
        result = rep.to_dict()
        passed = rep.passed
        if args.brackets:
            br = check_embedded_brackets(env)
            result["checks"]["brackets"] = br.to_dict()
            passed = passed and br.passed
    except (InconclusiveDegree, PipelineBudgetError, BudgetExceeded) as exc:
        _report(args, {"error": type(exc).__name__, "message": str(exc)}, False, t0,
                "budget")
        return EXIT_BUDGET
    result["hypothesis"] = env.ctx.scan.to_dict()
    _report(args, result, passed, t0)
    return EXIT_PASS if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing

def _window(s):
    try:
        lo, hi = (int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("window must be 'lo,hi'") from None
    return lo, hi


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker threads for scans")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized choices")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    ap = argparse.ArgumentParser(prog="confalg", description="Exact computations with conformal algebras.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="structural checks of an algebra file")
    s.add_argument("file")
    s.add_argument("--check-grading", action="store_true")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("check", parents=[common], help="check an identity on generators")
    s.add_argument("file")
    s.add_argument("--axiom", required=True, choices=["assoc", "jacobi", "qs+", "qs-", "adconf"])
    s.add_argument("--m-max", type=int, default=3)
    s.add_argument("--n-max", type=int, default=3)
    s.add_argument("--window", type=_window, default=(-3, 3),
                   help="coefficient window lo,hi for adconf")
    s.add_argument("--random-tails", type=int, default=0,
                   help="extra seeded random length-2 tails for adconf")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("build", parents=[common], help="construct a presentation")
    s.add_argument("--construct", required=True, choices=["loop", "affine", "commutator"])
    s.add_argument("input", help="built-in name (sl2, mat2, gl2, heis3, abelian:k), "
                                 "a finite algebra JSON file, or an algebra file for commutator")
    s.add_argument("--weight", type=int, default=0)
    s.add_argument("--central-name", default="c")
    s.add_argument("--central-weight", type=int, default=None)
    s.add_argument("--form", choices=["given", "killing"], default="given")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("locality", parents=[common], help="locality function S(l)")
    s.add_argument("file")
    s.add_argument("--length", type=int, action="append", help="repeatable; default 2,3,4")
    s.add_argument("--n-budget", type=int, default=None)
    s.add_argument("--gens", default=None, help="comma-separated generator names")
    s.add_argument("--method", choices=["span", "enumerate"], default="span")
    s.set_defaults(func=cmd_locality)

    s = sub.add_parser("embed", parents=[common], help="build A = U/I and verify the embedding")
    s.add_argument("file")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--weights", default="default",
                   help="'default' (file weights), one integer, or one per generator")
    s.add_argument("--window", type=int, default=3)
    s.add_argument("--n-d", type=int, default=8, help="D-powers scanned for degrees")
    s.add_argument("--stab-window", type=int, default=3)
    s.add_argument("--max-span-dim", type=int, default=400)
    s.add_argument("--budget", type=int, default=10 ** 6)
    s.add_argument("--brackets", action="store_true",
                   help="also compare brackets of L with the commutator in A")
    s.set_defaults(func=cmd_embed)
    return ap


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    args.argv = ["confalg"] + argv
    try:
        return args.func(args)
    except InputError as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except (BudgetExceeded, PipelineBudgetError) as exc:
        print("budget exceeded: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except InconclusiveDegree as exc:
        print("inconclusive: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
