"""Corner-versus-grid check of minimal spherical triangle areas on random boxes.

    python3 scripts/lexell_scan.py --boxes 1000 --seed 3
"""

import argparse
import random

from kissing.estimate import EdgeBox, area_scan


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--boxes", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lo", type=float, default=2.0)
    ap.add_argument("--hi", type=float, default=3.4)
    ap.add_argument("--grid", type=int, default=21)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    worst = float("inf")
    bad = 0
    for _ in range(args.boxes):
        box = EdgeBox(tuple(tuple(sorted(rng.uniform(args.lo, args.hi) for _ in range(2)))
                            for _ in range(3)))
        scan = area_scan(box, args.grid)
        worst = min(worst, scan.grid_min - scan.corner_min)
        bad += not scan.consistent
    print(f"seed={args.seed} boxes={args.boxes} grid={args.grid}: "
          f"{bad} inconsistent, smallest grid-minus-corner gap {worst:.3e}")


if __name__ == "__main__":
    main()
