"""Command-line entry point: ``betti-scope <command> ...``."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .checks import run_invariants
from .errors import BettiScopeError, NoMatch
from .estimator import estimate_betti_spectral
from .generators import ALIASES, KINDS, FamilySpec, generate
from .io import digest, format_cplx, load_complex
from .laplacian import (
    exact_spectrum,
    laplacian,
    laplacian_pseudo_determinant,
    log_determinant_c,
    norm_bound,
)
from .sampling import (
    ReferenceCorpus,
    empirical_profiles,
    exact_profiles,
    sampling_distance,
    test_betti,
)
from .laplacian import betti_exact

SCHEMA_VERSION = 1
EXIT_INPUT = 2
EXIT_NOMATCH = 3


class RunReport:
    """Parameter echo, input digests, outputs and timings of one command."""

    def __init__(self, command: str, params: dict):
        self.data = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "command": command,
            "params": params,
            "inputs": {},
            "seeds": {},
            "outputs": {},
            "timings": {},
        }
        self._t0 = time.perf_counter()

    def add_input(self, path, K) -> None:
        self.data["inputs"][str(path)] = {"sha256": digest(K), "f_vector": list(K.f_vector)}

    def finish(self) -> dict:
        self.data["timings"]["wall_seconds"] = time.perf_counter() - self._t0
        return self.data

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.finish(), indent=2, sort_keys=True) + "\n")


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    return int(os.environ.get("BETTI_SCOPE_THREADS", "1"))


def cmd_gen(args, report):
    base = None
    if args.base_kind:
        base = FamilySpec(args.base_kind, args.base_n, seed=args.seed)
    spec = FamilySpec(args.kind, args.n, args.d, args.seed, base, args.max_dim)
    K = generate(spec)
    text = format_cplx(K)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    report.data["seeds"]["generator"] = args.seed
    report.data["outputs"] = {"f_vector": list(K.f_vector), "sha256": digest(K)}


def cmd_betti(args, report):
    K = load_complex(args.file)
    report.add_input(args.file, K)
    b = betti_exact(K)
    print(f"b = {b}")
    report.data["outputs"]["betti"] = b


def cmd_spectrum(args, report):
    K = load_complex(args.file)
    report.add_input(args.file, K)
    op = laplacian(K, args.dim)
    m = exact_spectrum(op, args.cap)
    pdet = laplacian_pseudo_determinant(K, args.dim, args.cap)
    out = {
        "dim": args.dim,
        "n": m.n,
        "norm_bound": norm_bound(op),
        "eigenvalues": [float(v) for v in m.values],
        "multiplicities": [int(x) for x in m.multiplicities],
        "kernel_multiplicity": m.kernel_multiplicity,
        "pseudo_determinant_bits": pdet.bit_length(),
        "log_determinant_c": log_determinant_c(m),
    }
    if args.triplets:
        Path(args.triplets).write_text(op.to_triplets())
    print(f"Delta^{args.dim}: n = {m.n}, K = {out['norm_bound']:g}, "
          f"kernel = {m.kernel_multiplicity}, c = {out['log_determinant_c']:.6g}")
    for v, k in zip(out["eigenvalues"], out["multiplicities"]):
        print(f"  {v:.10g} x {k}")
    report.data["outputs"] = out


def cmd_profile(args, report):
    K = load_complex(args.file)
    report.add_input(args.file, K)
    if args.samples:
        profiles = empirical_profiles(K, args.radius, args.samples, args.seed, args.dim)
        report.data["seeds"]["sampling"] = args.seed
    else:
        profiles = exact_profiles(K, args.radius, args.dim, _threads(args))
    out = {str(r): p.to_json() for r, p in profiles.items()}
    print(json.dumps(out, indent=2, sort_keys=True))
    report.data["outputs"]["profiles"] = out


def cmd_distance(args, report):
    K, L = load_complex(args.first), load_complex(args.second)
    report.add_input(args.first, K)
    report.add_input(args.second, L)
    threads = _threads(args)
    d = sampling_distance(exact_profiles(K, args.rmax, 0, threads),
                          exact_profiles(L, args.rmax, 0, threads), args.rmax)
    print(f"d_s = {d.value:.12g} (classes {d.n_classes}, truncation <= {d.truncation_bound:.3g})")
    report.data["outputs"] = d._asdict()


def cmd_estimate(args, report):
    K = load_complex(args.file)
    report.add_input(args.file, K)
    est = estimate_betti_spectral(K, args.dim, args.eps, args.seed, args.moments, args.samples, args.cut)
    print(f"b^{args.dim}/|V| ~ {est.per_vertex:.6g} (kernel fraction {est.kernel_fraction:.6g}, "
          f"cut {est.epsilon_star:.4g}, bound term {est.bound_term:.4g})")
    report.data["seeds"]["sampling"] = args.seed
    report.data["outputs"] = est.to_json()


def cmd_test(args, report):
    M = load_complex(args.file)
    report.add_input(args.file, M)
    paths = sorted(Path(args.corpus).glob("*.cplx"))
    if not paths:
        raise BettiScopeError(f"no .cplx files in corpus directory {args.corpus}")
    members = [load_complex(p) for p in paths]
    for p, L in zip(paths, members):
        report.add_input(p, L)
    corpus = ReferenceCorpus.build(members, args.radius, args.rho, [p.name for p in paths])
    report.data["seeds"]["sampling"] = args.seed
    res = test_betti(M, corpus, args.dim, args.eps, args.seed)
    name = corpus.entries[res.matched_index].name
    print(f"b^{args.dim}/|V| ~ {res.estimate:.6g} (matched {name}, N = {res.n_used})")
    report.data["outputs"] = {**res._asdict(), "matched_name": name}


def cmd_verify(args, report):
    K = load_complex(args.file)
    report.add_input(args.file, K)
    results = run_invariants(K, args.cap)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name}" + (f"  [{r.detail}]" if r.detail else ""))
    report.data["outputs"]["checks"] = [r.__dict__ for r in results]
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="betti-scope", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", help="write a JSON run report here")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes for profiling (default $BETTI_SCOPE_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a complex")
    g.add_argument("--kind", required=True, choices=sorted(set(KINDS) | set(ALIASES)))
    g.add_argument("--n", type=int, required=True, help="size parameter of the family")
    g.add_argument("--d", type=int, default=None, help="degree bound (required for random_flag)")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--max-dim", type=int, default=None)
    g.add_argument("--base-kind", default=None, help="base family for disjoint_union")
    g.add_argument("--base-n", type=int, default=3)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("betti", parents=[common], help="exact Betti numbers")
    b.add_argument("file")
    b.set_defaults(func=cmd_betti)

    s = sub.add_parser("spectrum", parents=[common], help="exact Laplacian spectrum")
    s.add_argument("file")
    s.add_argument("--dim", type=int, default=0)
    s.add_argument("--cap", type=int, default=2000)
    s.add_argument("--triplets", help="write Delta^dim as coordinate triplets")
    s.set_defaults(func=cmd_spectrum)

    pr = sub.add_parser("profile", parents=[common], help="rooted-ball profiles")
    pr.add_argument("file")
    pr.add_argument("--radius", type=int, required=True)
    pr.add_argument("--samples", type=int, default=None)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--dim", type=int, default=0, help="root dimension")
    pr.set_defaults(func=cmd_profile)

    d = sub.add_parser("distance", parents=[common], help="truncated sampling distance")
    d.add_argument("first")
    d.add_argument("second")
    d.add_argument("--rmax", type=int, required=True)
    d.set_defaults(func=cmd_distance)

    e = sub.add_parser("estimate", parents=[common], help="spectral Betti estimate")
    e.add_argument("file")
    e.add_argument("--dim", type=int, required=True)
    e.add_argument("--eps", type=float, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--moments", type=int, default=None)
    e.add_argument("--samples", type=int, default=None)
    e.add_argument("--cut", type=float, default=None)
    e.set_defaults(func=cmd_estimate)

    t = sub.add_parser("test", parents=[common], help="corpus-matching Betti tester")
    t.add_argument("file")
    t.add_argument("--corpus", required=True, help="directory of .cplx reference complexes")
    t.add_argument("--eps", type=float, required=True)
    t.add_argument("--dim", type=int, required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--radius", type=int, default=1)
    t.add_argument("--rho", type=float, default=0.5)
    t.set_defaults(func=cmd_test)

    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("file")
    v.add_argument("--cap", type=int, default=2000)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "report")}
    report = RunReport(args.command, params)
    try:
        code = args.func(args, report) or 0
    except NoMatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        report.data["outputs"]["no_match"] = str(exc)
        code = EXIT_NOMATCH
    except (BettiScopeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.report:
        report.write(args.report)
    return code


if __name__ == "__main__":
    sys.exit(main())
