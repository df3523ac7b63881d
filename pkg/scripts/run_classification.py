"""Run the tame-contact classification and print one line per class.

    python3 scripts/run_classification.py --jobs 4 --out classes/
"""

import argparse
from pathlib import Path

from kissing.cli import run_enumeration
from kissing.enumerator import EnumConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--nodes", type=int, default=12)
    ap.add_argument("--face-max", type=int, default=8)
    ap.add_argument("--node-max", type=int, default=4)
    args = ap.parse_args()
    cfg = EnumConfig(node_count=args.nodes, face_max=args.face_max, node_max=args.node_max,
                     jobs=args.jobs)
    res, summary = run_enumeration(cfg, args.out)
    for cls, entry in zip(summary["classes"], res.classes):
        mirror = "self-mirror" if entry.self_mirror else "chiral"
        print(f"{cls['name']}  faces={entry.face_sizes}  {mirror}  {entry.code.hex()[:16]}")
    print(f"{res.folded_count} classes, {res.unfolded_count} without mirror folding, "
          f"{res.seconds:.1f}s")
    print(summary["metrics"])


if __name__ == "__main__":
    main()
