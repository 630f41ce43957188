"""How often does annealing find the exhaustive HP minimum, by step budget?

    python3 scripts/hp_benchmark.py [--n 6] [--instances 20] [--steps 500 2000 10000]
"""

import argparse
import random
import time

from diamondfold.folding import Schedule, anneal_fold, exhaustive_fold, hp_model


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--steps", type=int, nargs="+", default=[500, 2000, 10000])
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    seqs = ["".join(rng.choice("HP") for _ in range(args.n)) for _ in range(args.instances)]
    model = hp_model()
    t = time.perf_counter()
    best = [exhaustive_fold(s, model).best_energy for s in seqs]
    print(f"exhaustive: {time.perf_counter() - t:.1f}s, minima {sorted(set(best))}")
    print("steps,matched,instances,seconds")
    for steps in args.steps:
        t = time.perf_counter()
        hit = sum(anneal_fold(s, model, Schedule(steps=steps), seed=k).best_energy == b
                  for k, (s, b) in enumerate(zip(seqs, best)))
        print(f"{steps},{hit},{len(seqs)},{time.perf_counter() - t:.1f}")


if __name__ == "__main__":
    main()
