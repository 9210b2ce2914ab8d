"""
Command line front-end. Exit codes: 0 ok, 1 malformed input or config, 2 order precondition violated, 3 enumeration
budget exceeded.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from simplex_hoeffding import __version__
from simplex_hoeffding.bounds import TailDirection, theorem1_bound
from simplex_hoeffding.distributions import (
    DirichletSpec,
    MultinomialSpec,
    dirichlet_bound,
    multinomial_bound,
)
from simplex_hoeffding.exceptions import (
    BudgetExceeded,
    ConfigError,
    PreconditionOrderViolated,
    SimplexHoeffdingError,
)
from simplex_hoeffding.oracles.audit import full_counts
from simplex_hoeffding.oracles.exact import multinomial_exact_tail
from simplex_hoeffding.oracles.monte_carlo import (
    DEFAULT_CONFIDENCE,
    DirichletSampler,
    PointMassSampler,
    mc_mean_tail,
    sampler_for,
    vertex_sampler,
)
from simplex_hoeffding.utils.records import bound_record, dumps_record, estimate_fields, record_to_csv, stamp, \
    write_report
from simplex_hoeffding.utils.sweep import load_sweep_config, run_sweep
from simplex_hoeffding.utils.utils import parse_vector

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_BUDGET = 3


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors, which is reserved for precondition violations here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    # fmt: off
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default="json",
                        help="Output format of the result record.")
    common.add_argument("--quiet", action="store_true",
                        help="Only log warnings and errors, disable progress bars.")
    common.add_argument("--no-timestamp", action="store_true",
                        help="Omit the timestamp field so that identical commands print identical output.")
    # fmt: on
    return common


def _add_mc_arguments(parser: argparse.ArgumentParser) -> None:
    # fmt: off
    parser.add_argument("--family", choices=["dirichlet", "multinomial", "general"], required=True,
                        help="Distribution of a single vector. 'multinomial' draws single trials (vertices).")
    parser.add_argument("--alpha", type=str, help="Dirichlet concentration parameters alpha_0..alpha_k.")
    parser.add_argument("--p", type=str, help="Cell probabilities p_0..p_k of a single multinomial trial.")
    parser.add_argument("--mu", type=str, help="Mean mu_1..mu_k of the general family.")
    parser.add_argument("--model", choices=["vertex", "point_mass"], default="vertex",
                        help="Distribution with mean mu used for the general family.")
    parser.add_argument("--n", type=int, required=True, help="Number of vectors averaged per trial.")
    parser.add_argument("--z", type=str, required=True, help="Threshold z_1..z_k of the sample mean.")
    parser.add_argument("--dir", type=str, required=True, choices=["lower", "upper"], help="Tail direction.")
    parser.add_argument("--trials", type=int, default=100_000, help="Number of Monte Carlo trials.")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (unsigned 64 bit).")
    parser.add_argument("--workers", type=int, default=1, help="Worker threads, the result does not depend on it.")
    parser.add_argument("--confidence", type=float, default=DEFAULT_CONFIDENCE,
                        help="Confidence of the Clopper-Pearson interval.")
    # fmt: on
    parser.set_defaults(handler=cmd_mc)


def build_parser() -> argparse.ArgumentParser:
    # fmt: off
    common = _common_options()
    parser = _ArgumentParser(prog="simplex-hoeffding",
                             description="Concentration bounds for simplex-bounded random vectors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    bound = commands.add_parser("bound", help="Compute a bound.")
    families = bound.add_subparsers(dest="family", required=True, parser_class=_ArgumentParser)
    general = families.add_parser("general", parents=[common], help="Bound for an arbitrary mean vector.")
    general.add_argument("--mu", type=str, required=True, help="Mean mu_1..mu_k, comma separated.")
    general.add_argument("--z", type=str, required=True, help="Threshold z_1..z_k, comma separated.")
    general.add_argument("--n", type=int, required=True, help="Number of samples.")
    general.add_argument("--dir", type=str, required=True, choices=["lower", "upper"], help="Tail direction.")
    general.add_argument("--order-tol", type=float, default=0.0,
                         help="Slack granted to the order precondition for noisy inputs.")
    multinomial = families.add_parser("multinomial", parents=[common], help="Bound on multinomial counts.")
    multinomial.add_argument("--n", type=int, required=True, help="Number of trials.")
    multinomial.add_argument("--p", type=str, required=True, help="Cell probabilities p_0..p_k.")
    multinomial.add_argument("--z", type=str, required=True,
                             help="Counts z_0..z_k summing to n, or thresholds z_1..z_k.")
    multinomial.add_argument("--dir", type=str, required=True, choices=["lower", "upper"], help="Tail direction.")
    dirichlet = families.add_parser("dirichlet", parents=[common], help="Bound on the mean of Dirichlet vectors.")
    dirichlet.add_argument("--alpha", type=str, required=True, help="Concentration parameters alpha_0..alpha_k.")
    dirichlet.add_argument("--z", type=str, required=True, help="Threshold z_1..z_k.")
    dirichlet.add_argument("--n", type=int, required=True, help="Number of samples.")
    dirichlet.add_argument("--dir", type=str, required=True, choices=["lower", "upper"], help="Tail direction.")
    for sub in (general, multinomial, dirichlet):
        sub.set_defaults(handler=cmd_bound)

    oracle = commands.add_parser("oracle", help="Compute a ground-truth tail probability.")
    oracles = oracle.add_subparsers(dest="oracle", required=True, parser_class=_ArgumentParser)
    exact = oracles.add_parser("multinomial", parents=[common], help="Exact multinomial tail by enumeration.")
    exact.add_argument("--n", type=int, required=True, help="Number of trials.")
    exact.add_argument("--p", type=str, required=True, help="Cell probabilities p_0..p_k.")
    exact.add_argument("--z", type=str, required=True, help="Thresholds z_1..z_k or counts z_0..z_k.")
    exact.add_argument("--dir", type=str, required=True, choices=["lower", "upper"], help="Tail direction.")
    exact.add_argument("--budget", type=int, default=None,
                       help="Largest lattice size to enumerate (default from the environment or 2e7).")
    exact.set_defaults(handler=cmd_oracle)
    _add_mc_arguments(oracles.add_parser("mc", parents=[common], help="Monte Carlo tail estimate."))
    _add_mc_arguments(commands.add_parser("mc", parents=[common], help="Alias of 'oracle mc'."))

    sweep = commands.add_parser("sweep", help="Run an audit sweep from a config file.")
    sweep.add_argument("config", type=str, help="Path to the sweep config (JSON).")
    sweep.add_argument("--out-dir", type=str, default=None,
                       help="Directory for the reports, defaults to output.dir of the config or ./results.")
    sweep.add_argument("--format", choices=["json", "csv", "both"], default=None,
                       help="Report files to write, defaults to output.format of the config (both).")
    sweep.add_argument("--quiet", action="store_true", help="Only log warnings and errors, disable progress bars.")
    sweep.add_argument("--workers", type=int, default=None, help="Rows evaluated in parallel.")
    sweep.set_defaults(handler=cmd_sweep)
    # fmt: on
    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _emit(record: dict, args: argparse.Namespace) -> None:
    stamp(record, timestamp=not args.no_timestamp)
    if args.format == "csv":
        sys.stdout.write(record_to_csv(record))
    else:
        sys.stdout.write(dumps_record(record) + "\n")


def cmd_bound(args: argparse.Namespace) -> int:
    direction = TailDirection.parse(args.dir)
    if args.family == "general":
        inputs = {"mu": parse_vector(args.mu), "z": parse_vector(args.z), "n": args.n, "order_tol": args.order_tol}
        compute = lambda: theorem1_bound(inputs["mu"], inputs["z"], args.n, direction,  # noqa: E731
                                         order_tol=args.order_tol)
    elif args.family == "multinomial":
        spec = MultinomialSpec(args.n, parse_vector(args.p))
        inputs = {"p": spec.p.coords, "z": full_counts(spec, parse_vector(args.z, dtype=int)), "n": args.n}
        compute = lambda: multinomial_bound(spec, inputs["z"], direction)  # noqa: E731
    else:
        spec = DirichletSpec(parse_vector(args.alpha))
        inputs = {"alpha": spec.alpha, "z": parse_vector(args.z), "n": args.n}
        compute = lambda: dirichlet_bound(spec, inputs["z"], args.n, direction)  # noqa: E731

    try:
        result = compute()
    except PreconditionOrderViolated as e:
        logging.warning(str(e))
        _emit(bound_record(None, inputs, args.family, direction.value, violation=str(e)), args)
        return EXIT_PRECONDITION
    _emit(bound_record(result, inputs, args.family, direction.value), args)
    return EXIT_OK


def _domination_fields(bound_fn, reference: float) -> dict:
    """Bound next to an oracle value; the bound is null when its precondition does not hold."""
    try:
        result = bound_fn()
    except SimplexHoeffdingError as e:
        return {"bound": None, "precondition_ok": False, "margin": None, "note": str(e)}
    return {"bound": result.bound, "precondition_ok": True, "margin": result.bound - reference}


def cmd_oracle(args: argparse.Namespace) -> int:
    direction = TailDirection.parse(args.dir)
    spec = MultinomialSpec(args.n, parse_vector(args.p))
    z = parse_vector(args.z, dtype=int)
    exact = multinomial_exact_tail(spec, z, direction, budget=args.budget)
    record = {"command": "oracle", "oracle": "exact", "family": "multinomial", "direction": direction.value,
              "inputs": {"p": spec.p.coords, "z": z, "n": args.n}, "exact": exact}
    record.update(_domination_fields(lambda: multinomial_bound(spec, full_counts(spec, z), direction), exact))
    _emit(record, args)
    return EXIT_OK


def cmd_mc(args: argparse.Namespace) -> int:
    direction = TailDirection.parse(args.dir)
    z = parse_vector(args.z)
    if args.family == "dirichlet":
        if args.alpha is None:
            raise ValueError("--alpha is required for the dirichlet family")
        spec = DirichletSpec(parse_vector(args.alpha))
        model = DirichletSampler(spec)
        inputs = {"alpha": spec.alpha}
        bound_fn = lambda: dirichlet_bound(spec, z, args.n, direction)  # noqa: E731
    elif args.family == "multinomial":
        if args.p is None:
            raise ValueError("--p is required for the multinomial family")
        model = sampler_for("categorical", parse_vector(args.p))
        inputs = {"p": model.p.coords}
        bound_fn = lambda: theorem1_bound(model.mean(), z, args.n, direction)  # noqa: E731
    else:
        if args.mu is None:
            raise ValueError("--mu is required for the general family")
        mu = parse_vector(args.mu)
        model = PointMassSampler(mu) if args.model == "point_mass" else vertex_sampler(mu)
        inputs = {"mu": mu, "model": args.model}
        bound_fn = lambda: theorem1_bound(mu, z, args.n, direction)  # noqa: E731

    estimate = mc_mean_tail(model, args.n, z, direction, args.trials, seed=args.seed, workers=args.workers,
                            confidence=args.confidence, disable_pbar=args.quiet)
    inputs.update({"z": z, "n": args.n})
    record = {"command": "mc", "oracle": "mc", "family": args.family, "direction": direction.value,
              "inputs": inputs, **estimate_fields(estimate)}
    record.update(_domination_fields(bound_fn, estimate.ci_low))
    _emit(record, args)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_sweep_config(args.config)
    report = run_sweep(config, workers=args.workers, disable_pbar=args.quiet)
    out_dir = Path(args.out_dir or config.output.dir or "results")
    fmt = args.format or config.output.format
    paths = write_report(report, out_dir, config.name, fmt)
    summary = report.summary()
    print(f"sweep {config.name}: {summary['total']} rows, {summary['pass']} PASS, {summary['fail']} FAIL, "
          f"{summary['skip']} SKIP -> {', '.join(str(p) for p in paths)}")
    return EXIT_OK if report.passed else EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.handler(args)
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionOrderViolated as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (SimplexHoeffdingError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
