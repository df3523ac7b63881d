"""Compare the LP rule sets on the enumerated classes.

    python3 scripts/eliminate_classes.py classes/
"""

import argparse
from pathlib import Path

from kissing.cli import _load_classes
from kissing.hypermap import orbits
from kissing.lpfeas import RULE_SETS, eliminate, fate_counts


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dir", type=Path, help="directory with class_*.json files")
    args = ap.parse_args()
    cands = _load_classes(args.dir)
    sizes = {name: sorted(orbits(h, "face").sizes()) for name, h in cands}
    for rules in RULE_SETS:
        fates = eliminate(cands, rules=rules)
        print(f"[{rules}] {fate_counts(fates)}")
        for f in fates:
            extra = ""
            if f.fate == "survivor":
                extra = f" robust={f.detail['robust']}"
            elif f.fate == "lp-infeasible":
                extra = f" certificate rows={len(f.detail['certificate'])}"
            print(f"  {f.name}: {f.fate:<19} faces={sizes[f.name]}{extra}")


if __name__ == "__main__":
    main()
