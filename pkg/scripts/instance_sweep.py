"""Simulate a batch of seeded instances and print the pairwise bottleneck matrix."""
import argparse

import numpy as np

from hrnflow.builtin_scenarios import NOISY_DELIVERY
from hrnflow.packet_sim import load_scenario, load_scenario_file, run_batch
from hrnflow.persistence import bottleneck_distance


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("scenario", nargs="?", help="scenario file (default: built-in noisy-delivery)")
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--seed", type=int, default=None)
    args = p.parse_args()

    s = load_scenario_file(args.scenario) if args.scenario else load_scenario(NOISY_DELIVERY)
    reports = run_batch(s, args.count, seed_override=args.seed)
    for n, r in enumerate(reports):
        print(f"instance {n}: thetas {list(r.thetas)}  diagram {list(r.diagram.points)}")
    dist = np.array([[bottleneck_distance(a.diagram, b.diagram) for b in reports] for a in reports])
    print("\npairwise bottleneck distances:")
    print(np.array2string(dist, precision=1))


if __name__ == "__main__":
    main()
