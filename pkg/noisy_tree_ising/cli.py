"""
Command-line entry point: ``noisy-tree-ising <command> [options]``.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .baseline import chow_liu
from .equivalence import build_class, canonical_form, is_member
from .estimator import empirical_moments
from .exceptions import InvalidParameterError, TreeIsingError, exit_code_for
from .experiment import (
    apply_overrides,
    draw_model,
    epsilon_fallback,
    format_csv,
    list_presets,
    load_config,
    load_preset,
    run_experiment,
)
from .formats.edges import format_edges, read_edges
from .formats.model import format_model, read_model
from .formats.samples import format_samples, read_samples
from .learner import find_tree
from .noise import sample_bound
from .oracle import brute_force_verdict, exact_joint, exact_moments, noisy_joint
from .sampler import apply_noise, sample_clean
from .topology import chain_tree, random_model, random_noise, random_tree, star_tree
from .types import AssumptionParams, MomentSource, NoiseSpec
from .utils import setup_logging

logger = logging.getLogger(__name__)


def _emit(text: str, output: Optional[str]) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {output}")


def _params(args: argparse.Namespace) -> AssumptionParams:
    if args.epsilon is not None:
        return epsilon_fallback(args.q_max, args.mu_max, args.epsilon)
    if args.rho_min is None or args.rho_max is None:
        raise InvalidParameterError("give --rho-min and --rho-max, or --epsilon")
    return AssumptionParams(
        mu_max=args.mu_max, rho_min=args.rho_min, rho_max=args.rho_max, q_max=args.q_max
    )


def _add_param_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mu-max", type=float, required=True)
    parser.add_argument("--q-max", type=float, required=True)
    parser.add_argument("--rho-min", type=float)
    parser.add_argument("--rho-max", type=float)
    parser.add_argument("--epsilon", type=float, help="use rho in [epsilon, 1 - epsilon]")


def cmd_generate(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    if args.config:
        config = load_config(args.config)
        model, noise = draw_model(config, rng)
        if noise is None:
            noise = random_noise(model.n, config.q_max, rng)
        _emit(format_model(model, noise), args.output)
        return 0
    flags = {"--n": args.n, "--w-min": args.w_min, "--w-max": args.w_max}
    missing = [flag for flag, value in flags.items() if value is None]
    if missing:
        raise InvalidParameterError(f"give --config or {', '.join(missing)}")

    if args.topology == "chain":
        tree = chain_tree(args.n)
    elif args.topology == "star":
        tree = star_tree(args.n)
    else:
        tree = random_tree(args.n, rng)
    model = random_model(
        tree, args.w_min, args.w_max, rng, bias=args.bias, negative_fraction=args.negative_fraction
    )
    noise = random_noise(args.n, args.q_max, rng) if args.q_max is not None else None
    _emit(format_model(model, noise), args.output)
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    model, noise = read_model(args.model)
    clean_seed, flip_seed = np.random.SeedSequence(args.seed).spawn(2)
    batch = sample_clean(model, args.m, clean_seed)
    if not args.clean:
        if noise is None:
            logger.warning("Model file bundles no flip probabilities; samples are clean")
        else:
            batch = apply_noise(batch, noise, flip_seed)
    _emit(format_samples(batch), args.output)
    return 0


def cmd_learn(args: argparse.Namespace) -> int:
    batch = read_samples(args.samples)
    learned = find_tree(empirical_moments(batch), _params(args))
    _emit(format_edges(learned.edges), args.output)
    return 0


def cmd_chowliu(args: argparse.Namespace) -> int:
    tree = chow_liu(read_samples(args.samples))
    _emit(format_edges(tree.edges), args.output)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    model, _ = read_model(args.model)
    candidate = read_edges(args.edges, model.n)
    member = is_member(candidate, model.tree)
    _emit(("true" if member else "false") + "\n", args.output)
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    model, noise = read_model(args.model)
    dist = exact_joint(model)
    source = MomentSource.EXACT_CLEAN
    if args.noisy:
        dist = noisy_joint(dist, noise or NoiseSpec.zeros(model.n))
        source = MomentSource.EXACT_NOISY

    report: dict = {"n": model.n, "source": source.value}
    if args.what == "joint":
        report["probs"] = dist.probs.tolist()
    elif args.what == "moments":
        moments = exact_moments(dist, source)
        report["mean"] = moments.mean.tolist()
        report["cov"] = moments.cov.tolist()
        report["corr"] = moments.corr.tolist()
    elif args.what == "class":
        eq_class = build_class(model.tree)
        report["clusters"] = [list(c) for c in eq_class.clusters]
        report["size"] = eq_class.size
        report["key"] = canonical_form(model.tree).to_text()
    else:
        if args.quad is None:
            raise InvalidParameterError("--what verdict needs --quad a b c d")
        verdict = brute_force_verdict(model.tree, tuple(args.quad))
        report["verdict"] = verdict.kind.value
        report["pairing"] = [list(p) for p in verdict.pairing] if verdict.pairing else None
    _emit(json.dumps(report, sort_keys=True) + "\n", args.output)
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.list_presets:
        _emit("".join(f"{name}\n" for name in list_presets()), None)
        return 0
    if (args.config is None) == (args.preset is None):
        raise InvalidParameterError("give exactly one of --config or --preset")

    config = load_config(args.config) if args.config else load_preset(args.preset)
    config = apply_overrides(config, trials=args.trials, seed=args.seed, budgets=args.budgets)
    if args.export_samples:
        Path(args.export_samples).mkdir(parents=True, exist_ok=True)
    rows = run_experiment(
        config,
        workers=args.workers,
        export_dir=args.export_samples,
        external_dir=args.external,
    )
    _emit(format_csv(rows, timing=args.timing), args.output)
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    bound = sample_bound(_params(args), args.n, args.tau)
    lines = [
        f"t1 {bound.t1!r}",
        f"t2 {bound.t2!r}",
        f"t3 {bound.t3!r}",
        f"delta {bound.delta!r}",
        f"m {bound.m_required}",
    ]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _budgets(value: str) -> List[int]:
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"budgets must be comma-separated integers, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisy-tree-ising",
        description="Learn tree Ising models from samples with unknown per-node sign flips.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a random model and write it as a model file")
    p.add_argument("--config", help="draw from an experiment config instead of the flags below")
    p.add_argument("--topology", choices=["chain", "star", "random"], default="chain")
    p.add_argument("--n", type=int)
    p.add_argument("--w-min", type=float)
    p.add_argument("--w-max", type=float)
    p.add_argument("--bias", type=float, default=0.0)
    p.add_argument("--q-max", type=float, help="bundle flip probabilities drawn from U[0, q_max]")
    p.add_argument("--negative-fraction", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("sample", help="draw (noisy) samples from a model file")
    p.add_argument("--model", required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clean", action="store_true", help="skip the bundled bit-flip noise")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("learn", help="learn an edge list from noisy samples")
    p.add_argument("--samples", required=True)
    _add_param_options(p)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_learn)

    p = sub.add_parser("chowliu", help="Chow-Liu edge list from samples")
    p.add_argument("--samples", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_chowliu)

    p = sub.add_parser("score", help="is an edge list in the model's equivalence class")
    p.add_argument("--edges", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_score)

    p = sub.add_parser("oracle", help="exact quantities by enumeration, as JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--what", choices=["joint", "moments", "class", "verdict"], default="moments")
    p.add_argument("--noisy", action="store_true", help="push through the bundled noise first")
    p.add_argument("--quad", type=int, nargs=4, metavar="NODE")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("experiment", help="success-fraction sweep as CSV")
    p.add_argument("--config")
    p.add_argument("--preset")
    p.add_argument("--list-presets", action="store_true")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--budgets", type=_budgets)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill mean_wall_ms")
    p.add_argument("--export-samples", metavar="DIR")
    p.add_argument("--external", metavar="DIR", help="score m<m>_t<trial>.edges files found here")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_experiment)

    p = sub.add_parser("bound", help="sufficient sample count for exact recovery")
    _add_param_options(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=float, default=0.05)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_bound)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        setup_logging(logging.DEBUG)
    elif args.quiet:
        setup_logging(logging.WARNING)
    else:
        setup_logging()

    try:
        return args.handler(args)
    except TreeIsingError as e:
        if args.verbose:
            logger.exception("Command failed")
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
