"""Regenerate tests/data/pilot_pareto2.json.

The pilot fixes the reference medians of the Pareto(2) revenue error used
by the acceptance suite. It uses its own seed, distinct from the seed of the
run being judged, and sets the threshold at PILOT_FACTOR times the pilot
median at the largest n.
"""

import json
from pathlib import Path

from subgc.distributions import Pareto
from subgc.montecarlo import convergence_curve

PILOT_SEED = 20240
PILOT_FACTOR = 1.5
N_LIST = [100, 1000, 10000]
TRIALS = 200


def main():
    rows = convergence_curve(Pareto(2.0), N_LIST, TRIALS, PILOT_SEED, "revenue_error")
    out = {
        "dist": "pareto:a=2",
        "statistic": "revenue_error",
        "seed": PILOT_SEED,
        "trials": TRIALS,
        "rows": [r.to_dict() for r in rows],
        "factor": PILOT_FACTOR,
        "threshold_n": N_LIST[-1],
        "threshold": PILOT_FACTOR * rows[-1].q50,
    }
    path = Path(__file__).resolve().parent.parent / "tests" / "data" / "pilot_pareto2.json"
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
