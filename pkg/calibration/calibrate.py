"""Record the finite-n baselines that tests/test_acceptance.py compares against.

Runs on seeds starting at CALIBRATION_SEED, disjoint from the acceptance
seeds, and writes calibration/baselines.json. Re-run with

    python calibration/calibrate.py
"""

import json
import time
from dataclasses import asdict
from pathlib import Path

from hyperlab.experiments import (
    enumerate_well_constructed,
    estimate_coincidence,
    model_transfer_check,
    sample_degree_counts,
    threshold_sweep,
)
from hyperlab.model import GENERATOR, Params
from hyperlab.statistics import CnParameterization

CALIBRATION_SEED = 1_000_000
OUT = Path(__file__).with_name("baselines.json")

COINCIDENCE_LADDERS = {1: [16, 32, 64], 2: [12, 20, 32]}
COINCIDENCE_TRIALS = 400
# largest j-size whose enumeration fits a 10-vertex budget
WELL_CONSTRUCTED = [(3, 1, 6), (3, 2, 10), (4, 3, 10)]


def main() -> None:
    start = time.perf_counter()
    coincidence = {}
    for j, ladder in COINCIDENCE_LADDERS.items():
        for n in ladder:
            est = estimate_coincidence(Params(n, 3, j), COINCIDENCE_TRIALS, CALIBRATION_SEED)
            coincidence[f"k3_j{j}_n{n}"] = asdict(est)

    deg = sample_degree_counts(Params(40, 3, 1), CnParameterization(0, 0.0), 5000, CALIBRATION_SEED)
    sweep = threshold_sweep(Params(60, 3, 1), range(-4, 5), 500, CALIBRATION_SEED)
    transfer = model_transfer_check(Params(60, 3, 1), 0.0, 500, CALIBRATION_SEED)
    wc = {
        f"k{k}_j{j}": {str(c.jsize): c.count for c in enumerate_well_constructed(k, j, m)}
        for k, j, m in WELL_CONSTRUCTED
    }

    baselines = {
        "generator": GENERATOR,
        "calibration_seed": CALIBRATION_SEED,
        "coincidence": coincidence,
        "degree_tv": {
            "n": 40, "k": 3, "j": 1, "s": 0, "c": 0.0, "trials": 5000,
            "mean": deg.mean, "exact_expectation": deg.exact_expectation,
            "tv_to_poisson": deg.tv_to_poisson,
        },
        "sweep_n60_k3_j1": [asdict(r) for r in sweep],
        "transfer_n60_k3_j1_c0": {
            "binomial_connected": transfer.binomial_connected,
            "uniform_connected": transfer.uniform_connected,
            "diff_connected": transfer.diff_connected,
        },
        "well_constructed": {"vertex_budget": 10, "max_jsize": {f"k{k}_j{j}": m for k, j, m in WELL_CONSTRUCTED}, "counts": wc},
    }
    OUT.write_text(json.dumps(baselines, indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT} in {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
