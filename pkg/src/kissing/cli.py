"""Command-line entry point: ``kissing <subcommand>``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors (bad arguments, unreadable input files).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict
from importlib import resources
from pathlib import Path

import jsonschema

from . import __version__
from .enumerator import EnumConfig, enumerate_tame_contact, reference_hypermap
from .estimate import verify_d3_cases, verify_superadditivity
from .fan import build_hypermap, face_tau, fcc_points, hcp_points
from .hypermap import (HypermapError, canonical_code, check_structure, from_json, orbits,
                       to_dot, to_json)
from .lpfeas import RULE_SETS, eliminate, fate_counts
from .sphgeom import CONSTANTS, MARGIN, TOL
from .tame import admissible_node_types, is_tame_contact

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
EXPECTED_FATES = {"hexagon-eliminated": 1, "lp-infeasible": 5, "survivor": 2}


class UsageError(Exception):
    pass


def load_schema(name: str) -> dict:
    text = resources.files("kissing").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def validate(obj, schema: str):
    jsonschema.validate(obj, load_schema(schema))
    return obj


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(obj, out: Path | None = None) -> None:
    text = dumps(obj)
    if out is not None:
        out.write_text(text)
    sys.stdout.write(text)


def constants_report() -> dict:
    d = CONSTANTS.as_dict()
    d["tolerances"] = {"equality": TOL, "margin": MARGIN}
    return validate(d, "constants")


def realization_summary(which: str) -> dict:
    cfg = {"fcc": fcc_points, "hcp": hcp_points}[which]()
    fan = cfg.fan()
    real = build_hypermap(fan)
    h = real.hypermap
    s = check_structure(h)
    sizes: dict[str, int] = {}
    for k in orbits(h, "face").sizes():
        sizes[str(k)] = sizes.get(str(k), 0) + 1
    degrees = sorted(orbits(h, "node").sizes())
    total = sum(face_tau(fan, F) for F in real.faces())
    expected = CONSTANTS.total
    counts = (h.dart_count, orbits(h, "node").count, orbits(h, "edge").count, orbits(h, "face").count)
    tame = is_tame_contact(h).tame
    passed = (counts == (48, 12, 24, 14) and degrees == [4] * 12 and sizes == {"3": 8, "4": 6}
              and s.planar and tame and abs(total - expected) <= 1e-8)
    return validate({
        "config": which, "darts": counts[0], "nodes": counts[1], "edges": counts[2],
        "faces": counts[3], "face_sizes": sizes, "degrees": degrees, "euler": s.planar,
        "tame": tame, "total_weight": total, "expected_total": expected,
        "code": canonical_code(h, fold_mirror=True).hex(), "passed": passed,
    }, "realization")


def _read_hypermap(path: str):
    try:
        obj = json.loads(Path(path).read_text())
        if "hypermap" in obj:
            obj = obj["hypermap"]
        validate(obj, "hypermap")
        return from_json(obj)
    except (OSError, json.JSONDecodeError, jsonschema.ValidationError, HypermapError, ValueError) as exc:
        raise UsageError(f"cannot read hypermap from {path}: {exc}") from None


def estimate_reports() -> list[dict]:
    reps = [r.to_json() for r in verify_d3_cases() + verify_superadditivity()]
    return validate(reps, "estimates")


def run_enumeration(config: EnumConfig, out: Path | None = None):
    res = enumerate_tame_contact(config)
    summary = res.summary()
    for i, (entry, cls) in enumerate(zip(res.classes, summary["classes"]), 1):
        cls["name"] = f"class_{i:02d}"
    summary["config"] = {k: v for k, v in asdict(config).items() if k != "jobs"}
    validate(summary, "summary")
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        for entry, cls in zip(res.classes, summary["classes"]):
            (out / f"{cls['name']}.json").write_text(
                dumps({**cls, "hypermap": to_json(entry.hypermap)}))
        (out / "summary.json").write_text(dumps(summary))
    return res, summary


def fates_report(candidates, rules: str) -> dict:
    fates = eliminate(candidates, rules=rules)
    report = {"rules": rules, "counts": fate_counts(fates), "fates": [f.to_json() for f in fates]}
    return validate(report, "fates")


def _fates_ok(report: dict) -> bool:
    for f in report["fates"]:
        if f.get("certificate_valid") is False or f.get("witness_valid") is False:
            return False
        if f["fate"] == "survivor" and not f.get("robust", False):
            return False
    return True


def _load_classes(directory: Path):
    files = sorted(directory.glob("class_*.json"))
    if not files:
        raise UsageError(f"no class_*.json files in {directory}")
    out = []
    for p in files:
        out.append((p.stem, _read_hypermap(str(p))))
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_constants(args) -> int:
    rep = constants_report()
    _emit(rep)
    return EXIT_OK if rep["total_below_tgt"] else EXIT_FAIL


def cmd_realize(args) -> int:
    rep = realization_summary(args.config)
    _emit(rep)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_check_tame(args) -> int:
    h = _read_hypermap(args.file)
    rep = validate(is_tame_contact(h).to_json(), "tame_report")
    _emit(rep)
    return EXIT_OK if rep["tame"] else EXIT_FAIL


def cmd_enumerate(args) -> int:
    cfg = EnumConfig(jobs=args.jobs, geometric_prunes=not args.no_geometric_prunes)
    res, summary = run_enumeration(cfg, Path(args.out) if args.out else None)
    _emit(summary)
    return EXIT_OK if res.folded_count == 8 else EXIT_FAIL


def cmd_verify_estimates(args) -> int:
    reps = estimate_reports()
    _emit(reps)
    return EXIT_OK if all(r["passed"] for r in reps) else EXIT_FAIL


def cmd_lp_eliminate(args) -> int:
    directory = Path(args.dir)
    cands = _load_classes(directory)
    rep = fates_report(cands, args.rules)
    (directory / "fates.json").write_text(dumps(rep))
    _emit(rep)
    return EXIT_OK if _fates_ok(rep) else EXIT_FAIL


def cmd_export(args) -> int:
    if args.config:
        h = reference_hypermap(args.config)
        name = args.config
    elif args.file:
        h = _read_hypermap(args.file)
        name = Path(args.file).stem
    else:
        raise UsageError("export needs a hypermap file or --config")
    sys.stdout.write(to_dot(h, name.replace("-", "_")))
    return EXIT_OK


def prove(jobs: int = 1, rules: str = "listed") -> tuple[dict, dict]:
    """Run every stage; returns the report and per-stage wall-clock times."""
    stages: dict[str, dict] = {}
    timings: dict[str, float] = {}

    def timed(name, fn):
        t0 = time.perf_counter()
        stages[name] = fn()
        timings[name] = time.perf_counter() - t0

    def st_constants():
        c = constants_report()
        ok = (abs(c["sol0"] - 0.551285598) <= 1e-8 and abs(c["total"] - 1.5406586) <= 1e-6
              and c["total_below_tgt"])
        return {"passed": ok, "sol0": c["sol0"], "total": c["total"], "tgt": c["tgt"]}

    def st_estimates():
        reps = estimate_reports()
        failures = [r["case"] for r in reps if not r["passed"]]
        return {"passed": not failures, "cases": len(reps), "failures": failures,
                "min_nonsharp_slack": min(r["slack"] for r in reps
                                          if not r["sharp"] and r["inequality"] != "skipped")}

    def st_node_types():
        scan = admissible_node_types()
        r0 = sorted(scan.r0)
        return {"passed": r0 == [(0, 3), (1, 3), (2, 2)] and not scan.large,
                "r0": [list(x) for x in r0], "large": [list(x) for x in scan.large],
                "admissible": [list(x) for x in scan.admissible]}

    enum_state = {}

    def st_enumeration():
        res, summary = run_enumeration(EnumConfig(jobs=jobs))
        enum_state["res"] = res
        codes = {c.code.hex() for c in res.classes}
        refs = {w: canonical_code(reference_hypermap(w), fold_mirror=True).hex() for w in ("FCC", "HCP")}
        return {"passed": res.folded_count == 8 and all(v in codes for v in refs.values()),
                "folded_count": res.folded_count, "unfolded_count": res.unfolded_count,
                "classes": summary["classes"], "metrics": summary["metrics"],
                "contains_fcc": refs["FCC"] in codes, "contains_hcp": refs["HCP"] in codes}

    def st_elimination():
        res = enum_state["res"]
        cands = [(f"class_{i:02d}", c.hypermap) for i, c in enumerate(res.classes, 1)]
        rep = fates_report(cands, rules)
        names = {f"class_{i:02d}": c.code.hex() for i, c in enumerate(res.classes, 1)}
        surv = sorted(names[f["name"]] for f in rep["fates"] if f["fate"] == "survivor")
        enum_state["survivors"] = surv
        ok = rep["counts"] == EXPECTED_FATES and _fates_ok(rep)
        return {"passed": ok, "rules": rules, "counts": rep["counts"],
                "expected_counts": EXPECTED_FATES,
                "fates": [{k: v for k, v in f.items() if k in
                           ("name", "fate", "certificate_valid", "witness_valid", "robust")}
                          for f in rep["fates"]]}

    def st_realization():
        fcc, hcp = realization_summary("fcc"), realization_summary("hcp")
        refs = sorted([fcc["code"], hcp["code"]])
        match = enum_state.get("survivors") == refs
        return {"passed": fcc["passed"] and hcp["passed"] and match,
                "fcc": fcc, "hcp": hcp, "survivors_match_references": match}

    timed("constants", st_constants)
    timed("estimates", st_estimates)
    timed("node_types", st_node_types)
    timed("enumeration", st_enumeration)
    timed("elimination", st_elimination)
    timed("realization", st_realization)
    failed = [k for k, v in stages.items() if not v["passed"]]
    report = {
        "version": __version__, "rules": rules, "jobs": jobs,
        "constants": constants_report(),
        "tolerances": {"equality": TOL, "margin": MARGIN, "lp_widening": "1/1000000",
                       "weight_slack": "1/1000000000"},
        "stages": stages, "survivors": enum_state.get("survivors", []),
        "verdict": not failed, "failed_stages": failed,
    }
    # canonical JSON round-trip so tuples and floats serialize identically every run
    report = json.loads(json.dumps(report, sort_keys=True))
    return validate(report, "report"), timings


def cmd_prove(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report, timings = prove(args.jobs, args.rules)
    (out / "report.json").write_text(dumps(report))
    (out / "timings.json").write_text(dumps({k: round(v, 3) for k, v in timings.items()}))
    for name in report["failed_stages"]:
        sys.stderr.write(f"stage failed: {name}\n")
    sys.stdout.write(dumps({"verdict": report["verdict"], "failed_stages": report["failed_stages"],
                            "survivors": len(report["survivors"]), "report": str(out / "report.json")}))
    return EXIT_OK if report["verdict"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kissing", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("constants", help="print h0, tgt, sol0 and the total weight").set_defaults(fn=cmd_constants)

    r = sub.add_parser("realize", help="build the hypermap of a reference configuration")
    r.add_argument("--config", choices=("fcc", "hcp"), required=True)
    r.set_defaults(fn=cmd_realize)

    c = sub.add_parser("check-tame", help="evaluate the ten tame-contact conditions")
    c.add_argument("file")
    c.set_defaults(fn=cmd_check_tame)

    e = sub.add_parser("enumerate", help="classify hypermaps with tame contact")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--out")
    e.add_argument("--no-geometric-prunes", action="store_true")
    e.set_defaults(fn=cmd_enumerate)

    sub.add_parser("verify-estimates", help="check the triangle area cases").set_defaults(
        fn=cmd_verify_estimates)

    lp = sub.add_parser("lp-eliminate", help="eliminate enumerated classes")
    lp.add_argument("dir")
    lp.add_argument("--rules", choices=RULE_SETS, default="listed")
    lp.set_defaults(fn=cmd_lp_eliminate)

    pr = sub.add_parser("prove", help="run the whole pipeline and write report.json")
    pr.add_argument("--jobs", type=int, default=1)
    pr.add_argument("--out", default=".")
    pr.add_argument("--rules", choices=RULE_SETS, default="listed")
    pr.set_defaults(fn=cmd_prove)

    ex = sub.add_parser("export", help="graphviz export of a hypermap")
    ex.add_argument("file", nargs="?")
    ex.add_argument("--config", choices=("fcc", "hcp"))
    ex.add_argument("--dot", action="store_true", default=True)
    ex.set_defaults(fn=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"kissing: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
