"""Command-line tool.

Subcommands: generate (random tensor to file), sample (observation file from
a tensor), complete (one-shot completion of an observation file), params
(spread diagnostics of a tensor or matrix file), experiment (replicated sweep
from a JSON config, emitting CSV and optional plot data).

Exit codes: 0 success, 2 configuration error, 3 infeasible input.
"""

from __future__ import annotations

import argparse
import sys

from . import io as tio
from .contraction import ContractionConfig, complete_contraction
from .errors import ConfigError, InfeasibleInputError
from .experiments import ExperimentSpec, emit_csv, emit_plotdata, run_experiment
from .matrix import UnfoldingParams, incoherence_params, unfolding_params
from .models import (
    RandomTensorSpec,
    generate,
    sample_mask_bernoulli,
    sample_mask_exact,
    stream_rng,
)
from .tensors import multilinear_rank, project_mask
from .unfolding import UnfoldConfig, complete_unfold


def _print_block(pairs) -> None:
    for key, value in pairs:
        print(f"{key} {value}")


def _cmd_generate(args) -> int:
    spec = RandomTensorSpec(
        dim=args.d,
        rank=args.r,
        order=args.k,
        distribution=args.distribution,
        seed=args.seed,
    )
    tensor, components = generate(spec)
    tio.save_tensor(tensor, args.output)
    if args.components:
        tio.save_components(components, args.components)
    return 0


def _cmd_sample(args) -> int:
    tensor = tio.load_tensor(args.tensor)
    if (args.n is None) == (args.delta is None):
        raise ConfigError("give exactly one of --n and --delta")
    rng = stream_rng(args.seed, 4)
    if args.n is not None:
        mask = sample_mask_exact(tensor.order, tensor.dim, args.n, rng)
    else:
        mask = sample_mask_bernoulli(tensor.order, tensor.dim, args.delta, rng)
    tio.save_observations(project_mask(tensor, mask), args.output)
    return 0


def _parse_lambda_star(text: str):
    if text in ("auto-theorem", "auto-simulation"):
        return text
    try:
        return float(text)
    except ValueError:
        raise ConfigError(
            "--lambda-star must be a number, 'auto-theorem' or 'auto-simulation'"
        ) from None


def _cmd_complete(args) -> int:
    observed = tio.load_observations(args.observations)
    lam = _parse_lambda_star(args.lambda_star)
    if args.algorithm == "unfold":
        params = None
        supplied = (args.rank, args.alpha, args.mu)
        if any(v is not None for v in supplied):
            if any(v is None for v in supplied):
                raise ConfigError("--rank, --alpha and --mu must be given together")
            params = UnfoldingParams(rank=args.rank, alpha=args.alpha, mu=args.mu)
        config = UnfoldConfig(
            lambda_star=lam,
            params=params,
            split_mode=args.split_mode or "exact",
            seed=args.seed,
        )
        result = complete_unfold(observed, config)
    else:
        if lam == "auto-theorem":
            if args.rank is None:
                raise ConfigError("--algorithm contract with auto threshold needs --rank")
            lam = "auto"
        elif lam == "auto-simulation":
            raise ConfigError("auto-simulation applies to --algorithm unfold only")
        config = ContractionConfig(
            lambda_star=lam,
            rank=args.rank,
            split_mode=args.split_mode or "bernoulli",
            singular_side=args.singular_side,
            seed=args.seed,
        )
        result = complete_contraction(observed, config)
    tio.save_tensor(result.estimate, args.output)
    _print_block(sorted(result.diagnostics.items()))
    return 0


def _cmd_params(args) -> int:
    if (args.tensor is None) == (args.matrix is None):
        raise ConfigError("give exactly one of --tensor and --matrix")
    if args.tensor is not None:
        tensor = tio.load_tensor(args.tensor)
        up = unfolding_params(tensor)
        ranks, max_rank = multilinear_rank(tensor)
        _print_block(
            [
                ("rank", up.rank),
                ("alpha", up.alpha),
                ("mu", up.mu),
                ("multilinear_rank", " ".join(map(str, ranks))),
                ("multilinear_rank_max", max_rank),
            ]
        )
    else:
        inc = incoherence_params(tio.load_matrix(args.matrix))
        _print_block([("lambda", inc.lam), ("gamma", inc.gamma), ("rho", inc.rho)])
    return 0


def _cmd_experiment(args) -> int:
    spec = ExperimentSpec.from_json(args.config)
    records = run_experiment(spec, workers=args.workers)
    if not records:
        raise InfeasibleInputError("every cell of the experiment was infeasible")
    emit_csv(records, args.csv)
    if args.plotdata:
        emit_plotdata(records, args.plotdata)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectc",
        description="Spectral completion of partially observed low-rank tensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random symmetric low-rank tensor")
    p.add_argument("--d", type=int, required=True, help="mode length")
    p.add_argument("--r", type=int, required=True, help="number of components")
    p.add_argument("--k", type=int, default=3, help="tensor order (default 3)")
    p.add_argument(
        "--distribution", choices=("gaussian", "rademacher"), default="gaussian"
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="dense tensor file")
    p.add_argument("--components", help="optional components file")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("sample", help="sample an observation file from a tensor")
    p.add_argument("--tensor", required=True, help="dense tensor file")
    p.add_argument("--n", type=int, help="reveal exactly n entries")
    p.add_argument("--delta", type=float, help="reveal each entry with this probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="observation file")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("complete", help="complete an observation file")
    p.add_argument("--observations", required=True, help="observation file")
    p.add_argument("--algorithm", choices=("unfold", "contract"), default="unfold")
    p.add_argument(
        "--lambda-star",
        default="auto-simulation",
        help="number, 'auto-theorem' or 'auto-simulation'",
    )
    p.add_argument("--rank", type=int, help="rank input for auto thresholds")
    p.add_argument("--alpha", type=float, help="entry-spread input for auto-theorem")
    p.add_argument("--mu", type=float, help="spectral-flatness input for auto-theorem")
    p.add_argument("--split-mode", choices=("exact", "bernoulli"))
    p.add_argument(
        "--singular-side", choices=("left", "symmetrize"), default="left"
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="dense tensor file for the estimate")
    p.set_defaults(func=_cmd_complete)

    p = sub.add_parser("params", help="report spread diagnostics of a file")
    p.add_argument("--tensor", help="dense tensor file")
    p.add_argument("--matrix", help="matrix file")
    p.set_defaults(func=_cmd_params)

    p = sub.add_parser("experiment", help="run a sweep from a JSON config")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--csv", required=True, help="CSV output path")
    p.add_argument("--plotdata", help="optional blank-line-separated plot data")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
