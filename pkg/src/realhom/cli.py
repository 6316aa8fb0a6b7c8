"""Command-line front end: ``realhom <command> ...``.

Commands
--------
homology SYSTEM              covering, nerve and homology in one run
covering SYSTEM              write the covering JSON
nerve COVERING [SYSTEM]      nerve JSON of a covering (``q_max = n - m + 1``;
                             ``m = 1`` when no system is given)
homology-from-nerve NERVE    homology of a nerve JSON, e.g. a hand-written complex
condition SYSTEM [K]         grid estimate of ``kappa(f)`` at mesh ``2**-K``
tail-bench                   CSV of the empirical condition tail

Exit codes: 0 success (an empty zero set included), 2 budget exceeded,
3 invalid input, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time

import numpy as np

from . import grid
from .covering import Profile, covering_from_dict, resolve_workers, run_covering
from .errors import BudgetExceeded, InvalidInputError, InvalidSystemError, InvariantViolation
from .homology import homology_from_complex
from .nerve import (DEFAULT_SIMPLEX_BUDGET, MEB_SEED, NerveComplex, build_nerve,
                    build_projective_nerve, projective_reduce)
from .pointestimates import kappa_upper_estimate
from .polysys import load_system
from .randharness import empirical_tail

log = logging.getLogger("realhom")

EXIT_OK, EXIT_BUDGET, EXIT_INVALID, EXIT_INVARIANT = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _add_run_options(p, covering=True):
    p.add_argument("--mode", choices=("sphere", "projective"), default="sphere")
    if covering:
        p.add_argument("--profile", choices=("certified", "guarded", "practical"), default="certified")
        p.add_argument("--alpha0", type=float)
        p.add_argument("--gamma-factor", type=float)
        p.add_argument("--beta-factor", type=float)
        p.add_argument("--epsilon-factor", type=float)
        p.add_argument("--thin-theta", type=float)
        p.add_argument("--max-k", type=int)
        p.add_argument("--point-budget", type=int)
        p.add_argument("--no-certificate", action="store_true",
                       help="acknowledge that the practical profile is not certified")
    p.add_argument("--simplex-budget", type=int, default=DEFAULT_SIMPLEX_BUDGET)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="realhom", description="Homology of real zero sets on spheres "
                     "and projective spaces.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("homology", help="full pipeline")
    p.add_argument("system")
    _add_run_options(p)

    p = sub.add_parser("covering", help="covering stage")
    p.add_argument("system")
    _add_run_options(p)

    p = sub.add_parser("nerve", help="nerve stage")
    p.add_argument("covering")
    p.add_argument("system", nargs="?")
    _add_run_options(p, covering=False)

    p = sub.add_parser("homology-from-nerve", help="homology of a nerve JSON")
    p.add_argument("nerve")
    p.add_argument("--out")

    p = sub.add_parser("condition", help="grid estimate of the condition number")
    p.add_argument("system")
    p.add_argument("k", nargs="?", type=int)
    p.add_argument("--point-budget", type=int, default=grid.DEFAULT_POINT_BUDGET)
    p.add_argument("--out")

    p = sub.add_parser("tail-bench", help="empirical condition tail on Kostlan samples")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--degrees", default="2", help="comma-separated degrees")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--thresholds", default="500,1000,5000")
    p.add_argument("--k", type=int, help="mesh exponent of the grid estimate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    return parser


def _profile(args) -> Profile:
    if args.profile == "practical" and not args.no_certificate:
        raise InvalidInputError("the practical profile is uncertified; pass --no-certificate")
    overrides = dict(alpha0=args.alpha0, gamma_factor=args.gamma_factor,
                     beta_factor=args.beta_factor, epsilon_factor=args.epsilon_factor,
                     thin_theta=args.thin_theta, max_k=args.max_k,
                     point_budget=args.point_budget)
    return Profile.named(args.profile, **overrides)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc}") from exc


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _check_closed(points):
    present = {tuple(p + 0.0) for p in points}
    if any(tuple(-p + 0.0) not in present for p in points):
        raise InvariantViolation("covering is not closed under x -> -x")


def nerve_of(points, epsilon, mode, q_max, simplex_budget, seed=None):
    """Nerve in the requested mode; projective nerves live on representatives."""
    seed = MEB_SEED if seed is None else seed
    if mode == "projective":
        reps = np.asarray(points)[projective_reduce(points)] if len(points) else np.asarray(points)
        return build_projective_nerve(reps, epsilon, q_max, simplex_budget, seed)
    return build_nerve(points, epsilon, q_max, simplex_budget, seed)


def result_document(mode, complex_, q_top=None, diagnostics=None, started=None) -> dict:
    """Result JSON for a nerve; ``runtime_ms`` is the only nondeterministic field."""
    diag = {"eta": None, "epsilon": None, "points": 0, "simplices_per_dim": [], "passes": None}
    diag.update(diagnostics or {})
    if complex_.vertex_count == 0:
        doc = {"mode": mode, "empty": True, "betti": [], "torsion": []}
    else:
        h = homology_from_complex(complex_, q_top)
        if any(b < 0 for b in h.betti):
            raise InvariantViolation(f"negative Betti number in {h.betti}")
        doc = {"mode": mode, "empty": False, "betti": h.betti, "torsion": h.torsion}
        diag["points"] = complex_.vertex_count
        diag["simplices_per_dim"] = complex_.counts()
    if started is not None:
        diag["runtime_ms"] = round((time.perf_counter() - started) * 1000.0, 3)
    doc["diagnostics"] = diag
    return doc


def cmd_covering(args):
    system = load_system(args.system)
    cov = run_covering(system, _profile(args), workers=resolve_workers(args.workers))
    _check_closed(cov.points)
    _emit(dumps(cov.to_dict()), args.out)
    return EXIT_OK


def cmd_homology(args):
    started = time.perf_counter()
    system = load_system(args.system)
    profile = _profile(args)
    cov = run_covering(system, profile, workers=resolve_workers(args.workers))
    _check_closed(cov.points)
    q_max = system.n - system.m + 1
    complex_ = nerve_of(cov.points, cov.epsilon, args.mode, q_max, args.simplex_budget, args.seed)
    diag = {"eta": cov.eta, "epsilon": cov.epsilon, "passes": cov.passes}
    _emit(dumps(result_document(args.mode, complex_, q_max - 1, diag, started)), args.out)
    return EXIT_OK


def cmd_nerve(args):
    doc = _read_json(args.covering)
    cov = covering_from_dict(doc)
    if args.system:
        system = load_system(args.system)
        if system.n != cov.n and len(cov.points):
            raise InvalidInputError(f"covering lives on S^{cov.n}, system on S^{system.n}")
        q_max = system.n - system.m + 1
    else:
        q_max = max(cov.n, 1)
    _check_closed(cov.points)
    complex_ = nerve_of(cov.points, cov.epsilon, args.mode, q_max, args.simplex_budget, args.seed)
    out = complex_.to_dict()
    out["eta"] = cov.eta
    out["epsilon"] = cov.epsilon
    _emit(dumps(out), args.out)
    return EXIT_OK


def cmd_homology_from_nerve(args):
    started = time.perf_counter()
    doc = _read_json(args.nerve)
    if not isinstance(doc, dict):
        raise InvalidInputError("nerve document must be a JSON object")
    complex_ = NerveComplex.from_dict(doc)
    mode = doc.get("mode", "sphere")
    diag = {"eta": doc.get("eta"), "epsilon": doc.get("epsilon")}
    _emit(dumps(result_document(mode, complex_, None, diag, started)), args.out)
    return EXIT_OK


def cmd_condition(args):
    system = load_system(args.system)
    k = args.k if args.k is not None else grid.initial_mesh_exponent(system.n) + 4
    est = kappa_upper_estimate(system, k, budget=args.point_budget)
    doc = {"k": k, "eta": grid.GridSpec(system.n, k).eta,
           "points": grid.grid_size(system.n, k), "kappa_estimate": est}
    _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_tail_bench(args):
    try:
        degrees = [int(d) for d in args.degrees.split(",")]
        thresholds = [float(t) for t in args.thresholds.split(",")]
    except ValueError as exc:
        raise InvalidInputError(f"bad list argument: {exc}") from exc
    report = empirical_tail(args.n, args.m, degrees, args.samples, thresholds, args.k,
                            seed=args.seed, workers=resolve_workers(args.workers))
    _emit(report.to_csv(), args.out)
    return EXIT_OK


COMMANDS = {
    "homology": cmd_homology,
    "covering": cmd_covering,
    "nerve": cmd_nerve,
    "homology-from-nerve": cmd_homology_from_nerve,
    "condition": cmd_condition,
    "tail-bench": cmd_tail_bench,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"realhom: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"realhom: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InvalidInputError, InvalidSystemError, ValueError) as exc:
        print(f"realhom: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
