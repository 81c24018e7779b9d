"""Command-line entry point: ``qbfcert <subcommand> ...``.

Exit codes: 10 true, 20 false, 0 check passed, 1 check failed,
2 usage or input error, 3 certificate too large to check.
"""

import argparse
import logging
import sys
import time

from .certs.model import Model, check_model, model_size, parse_model, write_model
from .certs.refutation import (RefutationProof, check_refutation, parse_refutation,
                               refutation_size, refutation_to_dot, write_refutation)
from .families import gen_iff_family, gen_random_qcnf
from .formula import parse_qdimacs, write_qdimacs
from .preprocess import TECHNIQUES, PrepConfig, preprocess_fixpoint
from .reconstruct import reconstruct
from .solve import dp_solve
from .trace import parse_trace, write_trace

EXIT_TRUE = 10
EXIT_FALSE = 20
EXIT_OK = 0
EXIT_INCORRECT = 1
EXIT_USAGE = 2
EXIT_UNCHECKED = 3

log = logging.getLogger("qbfcert")


class UsageError(Exception):
    pass


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def load_certificate(text):
    for line in text.splitlines():
        t = line.split()
        if not t or t[0] == "c":
            continue
        if t[:2] == ["r", "qbf-refutation"]:
            return parse_refutation(text)
        if t[:2] == ["m", "qbf-model"]:
            return parse_model(text)
        break
    raise UsageError("unrecognized certificate header")


def write_certificate(cert):
    return write_model(cert) if isinstance(cert, Model) else write_refutation(cert)


def certificate_size(cert):
    return model_size(cert) if isinstance(cert, Model) else refutation_size(cert)


def check_certificate(f, cert, max_enum):
    if isinstance(cert, Model):
        return check_model(f, cert, max_enum=max_enum)
    return check_refutation(f, cert)


def _techniques(s):
    if s in ("", "none"):
        return ()
    names = tuple(t.strip() for t in s.split(",") if t.strip())
    bad = [t for t in names if t not in TECHNIQUES]
    if bad:
        raise argparse.ArgumentTypeError("unknown technique(s): %s; choose from %s"
                                         % (", ".join(bad), ",".join(TECHNIQUES)))
    return names


def _config(a):
    return PrepConfig(a.techniques, a.ve_growth, a.max_rounds)


def _verdict_word(v):
    return {True: "TRUE", False: "FALSE", None: "UNKNOWN"}[v]


def _solve_result(res):
    """Verdict and certificate of the simplified formula."""
    if res.verdict is None:
        return dp_solve(res.formula)
    if res.verdict:
        return True, Model()
    return False, res.refutation


def cmd_gen(a):
    if a.family is not None:
        f = gen_iff_family(a.family)
    else:
        lo, hi = a.clause_len
        f = gen_random_qcnf(a.seed, a.vars, a.clauses, (lo, hi), a.universal_ratio)
    _write(a.out, write_qdimacs(f))
    return EXIT_OK


def cmd_prep(a):
    f = parse_qdimacs(_read(a.input))
    res = preprocess_fixpoint(f, _config(a))
    _write(a.out, write_qdimacs(res.formula))
    if a.trace:
        _write(a.trace, write_trace(res.trace))
    if a.cert and res.verdict is not None:
        _write(a.cert, write_certificate(_solve_result(res)[1]))
    print("c verdict %s after %d steps" % (_verdict_word(res.verdict), len(res.trace)),
          file=sys.stderr if a.out in (None, "-") else sys.stdout)
    return {True: EXIT_TRUE, False: EXIT_FALSE, None: EXIT_OK}[res.verdict]


def cmd_solve(a):
    f = parse_qdimacs(_read(a.input))
    verdict, cert = dp_solve(f)
    print(_verdict_word(verdict))
    if a.cert:
        _write(a.cert, write_certificate(cert))
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_reconstruct(a):
    f0 = parse_qdimacs(_read(a.input))
    tr = parse_trace(_read(a.trace))
    cert = load_certificate(_read(a.cert))
    out = reconstruct(f0, tr, cert, recheck=a.recheck_steps, max_enum=a.max_enum)
    _write(a.out, write_certificate(out))
    return EXIT_OK


def cmd_check(a):
    f = parse_qdimacs(_read(a.input))
    cert = load_certificate(_read(a.cert))
    res = check_certificate(f, cert, a.max_enum)
    print(res.describe())
    if res.ok:
        return EXIT_OK
    return EXIT_UNCHECKED if res.status == "too_large" else EXIT_INCORRECT


def cmd_pipeline(a):
    times = {}
    t = time.perf_counter()
    f0 = parse_qdimacs(_read(a.input))
    times["parse"] = time.perf_counter() - t
    t = time.perf_counter()
    res = preprocess_fixpoint(f0, _config(a))
    times["preprocess"] = time.perf_counter() - t
    t = time.perf_counter()
    verdict, cert = _solve_result(res)
    times["solve"] = time.perf_counter() - t
    t = time.perf_counter()
    full = reconstruct(f0, res.trace, cert, recheck=a.recheck_steps, max_enum=a.max_enum)
    times["reconstruct"] = time.perf_counter() - t
    t = time.perf_counter()
    chk = check_certificate(f0, full, a.max_enum)
    times["check"] = time.perf_counter() - t

    kind = "model" if verdict else "refutation"
    unit = "and-gates" if verdict else "resolution-steps"
    print(_verdict_word(verdict))
    print("c preprocessing: %d trace steps, early verdict %s"
          % (len(res.trace), _verdict_word(res.verdict)))
    print("c %s size for simplified formula: %d %s" % (kind, certificate_size(cert), unit))
    print("c %s size for original formula: %d %s" % (kind, certificate_size(full), unit))
    print("c check: %s" % chk.describe())
    for stage, secs in times.items():
        print("c time %s %.4f s" % (stage, secs))
    if a.trace:
        _write(a.trace, write_trace(res.trace))
    if a.cert:
        _write(a.cert, write_certificate(full))
    if a.dot:
        if isinstance(full, RefutationProof):
            _write(a.dot, refutation_to_dot(full))
        else:
            log.warning("--dot ignored: the certificate is a model, not a proof DAG")
    if chk.status == "too_large":
        return EXIT_UNCHECKED
    if not chk.ok:
        return EXIT_INCORRECT
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_dot(a):
    cert = load_certificate(_read(a.cert))
    if not isinstance(cert, RefutationProof):
        raise UsageError("dot needs a refutation certificate")
    _write(a.out, refutation_to_dot(cert))
    return EXIT_OK


def cmd_report(a):
    from .report import write_report

    paths = write_report(a.outdir, count=a.count, seed=a.seed, sizes=a.sizes)
    for p in paths:
        print(p)
    return EXIT_OK


def _pair(s):
    try:
        lo, hi = (int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO,HI") from None
    return lo, hi


def build_parser():
    p = argparse.ArgumentParser(prog="qbfcert", description="QBF preprocessing with certificate reconstruction")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def prep_flags(sp):
        sp.add_argument("--techniques", type=_techniques, default=TECHNIQUES,
                        help="comma list from %s (default: all, in that order)" % ",".join(TECHNIQUES))
        sp.add_argument("--ve-growth", type=int, default=0,
                        help="allowed clause-count increase per elimination (default 0)")
        sp.add_argument("--max-rounds", type=int, default=None, help="cap on fixpoint rounds")

    def enum_flag(sp):
        sp.add_argument("--max-enum", type=int, default=1 << 20,
                        help="largest number of universal assignments a model check enumerates")

    g = sub.add_parser("gen", help="write a QDIMACS instance")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", type=int, metavar="N", help="the iff family with N pairs")
    src.add_argument("--random", action="store_true", help="a seeded random instance")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--vars", type=int, default=10)
    g.add_argument("--clauses", type=int, default=20)
    g.add_argument("--clause-len", type=_pair, default=(2, 3), metavar="LO,HI")
    g.add_argument("--universal-ratio", type=float, default=0.4)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("prep", help="preprocess, writing the simplified formula and a trace")
    s.add_argument("input")
    prep_flags(s)
    s.add_argument("--out")
    s.add_argument("--trace")
    s.add_argument("--cert", help="certificate of the simplified formula, if decided early")
    s.set_defaults(func=cmd_prep)

    s = sub.add_parser("solve", help="solve with the elimination solver")
    s.add_argument("input")
    s.add_argument("--cert")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("reconstruct", help="lift a certificate back along a trace")
    s.add_argument("input", help="original QDIMACS")
    s.add_argument("--trace", required=True)
    s.add_argument("--cert", required=True)
    s.add_argument("--out")
    s.add_argument("--recheck-steps", action="store_true",
                   help="check every intermediate certificate (slow)")
    enum_flag(s)
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("check", help="check a certificate against a formula")
    s.add_argument("input")
    s.add_argument("cert")
    enum_flag(s)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("pipeline", help="preprocess, solve, reconstruct and check")
    s.add_argument("input")
    prep_flags(s)
    enum_flag(s)
    s.add_argument("--trace")
    s.add_argument("--cert")
    s.add_argument("--dot")
    s.add_argument("--recheck-steps", action="store_true")
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("dot", help="render a refutation as a Graphviz digraph")
    s.add_argument("cert")
    s.add_argument("--out")
    s.set_defaults(func=cmd_dot)

    s = sub.add_parser("report", help="write CSV tables and PNG figures")
    s.add_argument("--outdir", default="report")
    s.add_argument("--count", type=int, default=200, help="random instances")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--sizes", type=lambda x: [int(v) for v in x.split(",")],
                   default=[1, 10, 100, 1000], help="family sizes for the scaling table")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except (OSError, ValueError, UsageError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
