"""Recompute the n=7 HP minima with the brute-force oracle and freeze them.

    python scripts/freeze_hp_oracle.py tests/data/hp7_oracle.json
"""

import json
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from oracles import brute_minima  # noqa: E402


def hp_pair(a, b):
    return -1.0 if a == b == "H" else 0.0


def main(out):
    rng = random.Random(20020207)
    seqs = ["".join(rng.choice("HP") for _ in range(7)) for _ in range(20)]
    t = time.time()
    best, count = brute_minima(seqs, hp_pair, 7)
    data = {"n": 7, "model": "hp", "seed": 20020207,
            "instances": [{"sequence": s, "min_energy": b, "n_optimal": c}
                          for s, b, c in zip(seqs, best, count)]}
    Path(out).write_text(json.dumps(data, indent=2) + "\n")
    print(f"wrote {out} in {time.time() - t:.0f}s")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/hp7_oracle.json")
