#!/usr/bin/env python3
"""Run the standard bound-verification campaign and write CSV + JSON reports.

Sweeps test functions, model kinds, radii, and seeds, then prints the
per-kind margin summary.  Margins at or below 1 mean the theoretical bound
held on that trial.
"""

import argparse
import json
import sys
from pathlib import Path

from dfobounds import expand_config, run_campaign


DEFAULT_SWEEP = {
    "function": ["quartic", "rosenbrock"],
    "delta": [0.5, 0.1, 0.02],
}
KIND_CARDINALITY = {"lin_det": 2, "quad_det": 5, "mfn": 4}


def build_trials(seeds, kappa):
    trials = []
    for kind, p in KIND_CARDINALITY.items():
        config = dict(DEFAULT_SWEEP)
        config.update(
            {"kind": kind, "n": 2, "p": p, "kappa": kappa, "seed": list(range(seeds))}
        )
        trials.extend(expand_config(config))
    return trials


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="campaign_results", help="output directory")
    parser.add_argument("--seeds", type=int, default=20, help="seeds per configuration")
    parser.add_argument("--kappa", type=float, default=0.0, help="relaxation envelope")
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trials = build_trials(args.seeds, args.kappa)
    progress = None if args.quiet else lambda msg: print(msg, file=sys.stderr)
    report = run_campaign(
        trials,
        csv_path=out_dir / "campaign.csv",
        json_path=out_dir / "campaign_summary.json",
        progress=progress,
    )
    print(json.dumps(report.summary["per_kind"], indent=2, sort_keys=True))
    print(f"\n{report.summary['n_trials']} trials, {report.summary['n_failed']} failed;"
          f" reports in {out_dir}/")
    return 0 if report.summary["all_passed"] else 2


if __name__ == "__main__":
    sys.exit(main())
