"""Command-line interface.

Subcommands: poisedness (certify a point set), fit (build a model from a
points+values file), bounds (evaluate the error-bound constants), verify
(run a trial campaign from a config file), oracle (brute-force grid max of
a polynomial on a ball).

Exit codes: 0 success, 1 usage or I/O error, 2 mathematical failure (not
poised, or a relaxation outside its envelope).  Stdout carries one JSON
document per invocation; verify streams progress lines to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from . import fileio
from .ball import grid_oracle
from .bounds import BoundInputs, BoundKind, error_bounds
from .geometry import NotPoisedError, PoisednessKind, lambda_poisedness
from .models import ModelKind, RelaxationError, RelaxationSpec, fit_model, fit_relaxed
from .verify import expand_config, run_campaign

__all__ = ["build_parser", "main", "entry"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MATH = 2

_POISED_KINDS = {
    "linear": PoisednessKind.LINEAR,
    "quadratic": PoisednessKind.QUADRATIC,
    "mfn": PoisednessKind.MFN,
}
_MODEL_KINDS = {
    "lin_det": ModelKind.LIN_DET,
    "quad_det": ModelKind.QUAD_DET,
    "mfn": ModelKind.MFN,
}
_BOUND_KINDS = {
    "lin_det": BoundKind.LIN_DET,
    "quad_det": BoundKind.QUAD_DET,
    "under": BoundKind.UNDER,
    "mfn": BoundKind.MFN,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors by default, which would
    # collide with the mathematical-failure code; usage problems are 1 here.
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dfobounds",
        description=(
            "Interpolation models for derivative-free optimization: "
            "poisedness certificates, model fitting, error-bound constants, "
            "and empirical verification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser(
        "poisedness", help="certify the poisedness constant of a point set"
    )
    p.add_argument(
        "points",
        help="CSV with header y1,...,yn[,f]; the first data row is the center",
    )
    p.add_argument(
        "--delta",
        type=float,
        default=None,
        help="ball radius (overrides the JSON sidecar)",
    )
    p.add_argument("--kind", choices=sorted(_POISED_KINDS), required=True)
    p.add_argument("--out", default=None, help="also write the JSON here")

    p = sub.add_parser("fit", help="fit an interpolation model to a points file")
    p.add_argument("points", help="CSV with header y1,...,yn,f")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--kind", choices=sorted(_MODEL_KINDS), required=True)
    p.add_argument(
        "--kappa",
        type=float,
        default=None,
        help="relaxation envelope multiplier; 0 or omitted fits exactly",
    )
    p.add_argument(
        "--gamma-file",
        default=None,
        help="JSON array of surrogate values to interpolate instead of f",
    )
    p.add_argument(
        "--noise-seed",
        type=int,
        default=0,
        help="seed for sampled surrogate values when --kappa > 0",
    )
    p.add_argument("--out", default=None)

    p = sub.add_parser("bounds", help="evaluate error-bound constants")
    p.add_argument("--kind", choices=sorted(_BOUND_KINDS), required=True)
    p.add_argument("--L", type=float, required=True, help="gradient Lipschitz constant")
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--lam", type=float, default=None, help="poisedness constant")
    p.add_argument("--kappa-L", type=float, default=None)
    p.add_argument("--kappa-Q", type=float, default=None)
    p.add_argument("--kappa-s", type=float, default=None)
    p.add_argument("--kappa-H", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--delta-max", type=float, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="run a verification campaign")
    p.add_argument("--config", required=True, help="flat JSON config; list values sweep")
    p.add_argument("--csv", default="campaign.csv", help="per-trial CSV output path")
    p.add_argument(
        "--json", default="campaign_summary.json", help="JSON summary output path"
    )
    p.add_argument("--quiet", action="store_true", help="suppress progress on stderr")

    p = sub.add_parser("oracle", help="brute-force grid max of |m| on a ball")
    p.add_argument("--poly", required=True, help="model JSON file (keys n, c, g, H)")
    p.add_argument(
        "--center", default=None, help="comma-separated coordinates; default origin"
    )
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--resolution", type=float, required=True)
    p.add_argument("--out", default=None)

    return parser


def _emit(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if out is not None:
        with open(out, "w") as handle:
            handle.write(text + "\n")


def _cmd_poisedness(args) -> int:
    sample_set, _ = fileio.read_points(args.points, delta=args.delta)
    certificate = lambda_poisedness(sample_set, _POISED_KINDS[args.kind])
    _emit(certificate.to_dict(), args.out)
    return EXIT_OK


def _cmd_fit(args) -> int:
    sample_set, values = fileio.read_points(args.points, delta=args.delta)
    if values is None:
        raise ValueError(f"{args.points}: fit requires an f column")
    kind = _MODEL_KINDS[args.kind]
    gamma = fileio.read_gamma(args.gamma_file) if args.gamma_file else None
    kappa = args.kappa
    if gamma is None and (kappa is None or kappa == 0.0):
        fit = fit_model(kind, sample_set, values)
    else:
        spec = RelaxationSpec(
            kappa=0.0 if kappa is None else kappa,
            gamma=gamma,
            noise_seed=args.noise_seed,
        )
        fit = fit_relaxed(kind, sample_set, values, spec)
    payload = fileio.write_model(
        args.out,
        fit.model,
        extra={"residual": fit.residual, "condition": fit.condition},
    )
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_bounds(args) -> int:
    inputs = BoundInputs(
        L=args.L,
        kappa=args.kappa,
        lam=args.lam,
        kappa_L=args.kappa_L,
        kappa_Q=args.kappa_Q,
        kappa_s=args.kappa_s,
        kappa_H=args.kappa_H,
        n=args.n,
        p=args.p,
        q=args.q,
        delta=args.delta,
        delta_max=args.delta_max,
    )
    report = error_bounds(_BOUND_KINDS[args.kind], inputs)
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    config = fileio.read_config(args.config)
    trials = expand_config(config)
    progress = None
    if not args.quiet:
        progress = lambda message: print(message, file=sys.stderr, flush=True)
    report = run_campaign(
        trials, csv_path=args.csv, json_path=args.json, progress=progress
    )
    print(json.dumps(report.summary, indent=2, sort_keys=True))
    if report.summary["n_failed"] > 0 or not report.summary["all_passed"]:
        return EXIT_MATH
    return EXIT_OK


def _cmd_oracle(args) -> int:
    model = fileio.read_model(args.poly)
    if args.center is None:
        center = np.zeros(model.dim)
    else:
        try:
            center = np.asarray(
                [float(part) for part in args.center.split(",")], dtype=float
            )
        except ValueError:
            raise ValueError(
                f"--center must be comma-separated numbers, got {args.center!r}"
            ) from None
    value, argmax = grid_oracle(model, center, args.radius, args.resolution)
    _emit(
        {
            "max_abs": value,
            "argmax": [float(x) for x in argmax],
            "resolution": args.resolution,
        },
        args.out,
    )
    return EXIT_OK


_DISPATCH = {
    "poisedness": _cmd_poisedness,
    "fit": _cmd_fit,
    "bounds": _cmd_bounds,
    "verify": _cmd_verify,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except NotPoisedError as exc:
        print(f"dfobounds: not poised: {exc}", file=sys.stderr)
        return EXIT_MATH
    except RelaxationError as exc:
        print(f"dfobounds: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (OSError, ValueError) as exc:
        print(f"dfobounds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"dfobounds: {exc}", file=sys.stderr)
        return EXIT_MATH


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
