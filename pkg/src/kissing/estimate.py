"""Numerical checks of the triangle area estimate behind the face bound.

A Delaunay triangle of a saturated twelve-point configuration has
Euclidean circumradius below √3.  Its edges fall in three classes:
contacts ``r`` (length 2), short gaps ``s`` in ``[2h0, 3.0)`` and long
edges ``t`` in ``[3.0, cap]``, where the cap comes from the circumradius
bound.  Minimal spherical areas over such edge boxes sit at box corners
(Lexell), and are cross-checked against a dense grid.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product

import numpy as np

from .sphgeom import CONSTANTS, MARGIN, TOL, NotRealizable, circumradius, triangle_area_from_chords
from .tame import tables

__all__ = [
    "EstimateError",
    "NoFeasibleTriangle",
    "NothingRealizable",
    "SQRT3",
    "CHORD_MAX",
    "EdgeBox",
    "CaseReport",
    "AreaScan",
    "min_circumradius",
    "circumradius_edge_bound",
    "area_scan",
    "min_area_over_box",
    "min_circumradius_over_box",
    "edge_box",
    "verify_d3_cases",
    "merge",
    "verify_superadditivity",
    "triangulations",
    "chain_check",
    "verify_face_bound",
]

SQRT3 = math.sqrt(3)
CHORD_MAX = 2 * SQRT3
GRID = 21
S_LO = 2 * CONSTANTS.h0
T_LO = 3.0
SHARP = {(3, 0, 0), (2, 0, 1)}


class EstimateError(ValueError):
    pass


class NoFeasibleTriangle(EstimateError):
    pass


class NothingRealizable(EstimateError):
    pass


@dataclass(frozen=True)
class EdgeBox:
    edges: tuple[tuple[float, float], ...]
    classes: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.edges) != 3:
            raise ValueError("an edge box has three intervals")
        for lo, hi in self.edges:
            if lo > hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")

    def widened(self, eps: float = TOL) -> "EdgeBox":
        return EdgeBox(tuple((lo - eps, hi + eps) for lo, hi in self.edges), self.classes)

    def corners(self):
        return product(*self.edges)

    def grid(self, n: int = GRID):
        axes = [np.linspace(lo, hi, n) if hi > lo else np.array([lo]) for lo, hi in self.edges]
        return product(*axes)

    def as_json(self) -> dict:
        return {"edges": [list(e) for e in self.edges], "classes": list(self.classes)}


@dataclass
class CaseReport:
    case: str
    inequality: str
    minimum: float
    required: float
    slack: float
    passed: bool
    sharp: bool = False
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# circumradius
# ---------------------------------------------------------------------------

def _cos_gamma(a: float, b: float, c: float) -> float:
    return (a * a + b * b - c * c) / (2 * a * b)


def min_circumradius(ia: tuple[float, float], ib: tuple[float, float], c: float) -> float:
    """Smallest circumradius of ``(a, b, c)`` with ``a, b`` in the intervals.

    ``c`` must be at least the upper ends of both intervals.  Then the angle
    γ opposite ``c`` has ``cos γ`` increasing in ``a`` and ``b``, and
    ``R = c / (2 sin γ)`` is smallest where ``|cos γ|`` is, which is a corner
    or a right angle.
    """
    if c < max(ia[1], ib[1]) - TOL:
        raise EstimateError("c must be the longest edge")
    g_hi = _cos_gamma(ia[1], ib[1], c)
    g_lo = _cos_gamma(ia[0], ib[0], c)
    if g_hi < 0:
        g = g_hi
    elif g_lo > 0:
        g = g_lo
    else:
        g = 0.0
    if abs(g) >= 1:
        return math.inf
    return c / (2 * math.sqrt(1 - g * g))


def circumradius_edge_bound(ia: tuple[float, float], ib: tuple[float, float],
                            long_lo: float = T_LO, iterations: int = 200) -> float:
    """Largest longest edge ``c`` allowing circumradius ``<= √3``.

    ``ia`` and ``ib`` hold the other two edges; a long edge in them is
    clipped at ``c`` since ``c`` is the longest.  The result is capped at
    ``2√3``.
    """
    def ok(c, tol=0.0):
        a = (ia[0], min(ia[1], c))
        b = (ib[0], min(ib[1], c))
        return min_circumradius(a, b, c) <= SQRT3 + tol

    lo = max(long_lo, ia[0], ib[0])
    # the start may sit exactly on the bound, e.g. the equilateral triangle of side 3
    if not ok(lo, TOL):
        raise NoFeasibleTriangle(f"no triangle with edges in {ia}, {ib} and circumradius <= √3")
    if ok(CHORD_MAX):
        return CHORD_MAX
    hi = CHORD_MAX
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


# ---------------------------------------------------------------------------
# areas over boxes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AreaScan:
    corner_min: float
    corner: tuple[float, float, float]
    grid_min: float
    realizable_corners: int

    @property
    def consistent(self) -> bool:
        return self.corner_min <= self.grid_min + TOL


def _area(c) -> float | None:
    try:
        return triangle_area_from_chords(*c)
    except NotRealizable:
        return None


def area_scan(box: EdgeBox, grid: int = GRID) -> AreaScan:
    """Corner minimum of the area together with a grid minimum."""
    corner_vals = [(a, c) for c in box.corners() if (a := _area(c)) is not None]
    if not corner_vals:
        raise NothingRealizable(f"no realizable corner in {box.edges}")
    cmin, corner = min(corner_vals)
    gmin = math.inf
    for c in box.grid(grid):
        a = _area(tuple(float(x) for x in c))
        if a is not None and a < gmin:
            gmin = a
    return AreaScan(cmin, tuple(float(x) for x in corner), gmin, len(corner_vals))


def min_area_over_box(box: EdgeBox) -> float:
    """Lexell minimum over the corners; raises if the grid ever beats it."""
    scan = area_scan(box)
    if not scan.consistent:
        raise EstimateError(f"grid minimum {scan.grid_min} below corner minimum {scan.corner_min}")
    return scan.corner_min


def min_circumradius_over_box(box: EdgeBox, grid: int = GRID) -> float:
    vals = [circumradius(*c) for c in box.corners()]
    vals += [circumradius(*(float(x) for x in c)) for c in box.grid(grid)]
    return min(vals)


# ---------------------------------------------------------------------------
# the d3 cases
# ---------------------------------------------------------------------------

def _class_interval(cls: str, cap: float) -> tuple[float, float]:
    return {"r": (2.0, 2.0), "s": (S_LO, T_LO), "t": (T_LO, cap)}[cls]


def edge_box(r: int, s: int, t: int, s_interval=(S_LO, T_LO), t_cap: float | None = None) -> EdgeBox:
    """Edge box for a triangle of type (r, s, t) with long edges capped.

    Without ``t_cap`` the cap is the circumradius bound on the longest edge
    given the other two classes.
    """
    classes = ("r",) * r + ("s",) * s + ("t",) * t
    if t and t_cap is None:
        others = [(2.0, 2.0)] * r + [s_interval] * s + [(T_LO, CHORD_MAX)] * (t - 1)
        t_cap = circumradius_edge_bound(others[0], others[1])
    edges = []
    for c in classes:
        if c == "s":
            edges.append(s_interval)
        else:
            edges.append(_class_interval(c, t_cap or T_LO))
    return EdgeBox(tuple(edges), classes)


def _area_case(label: str, box: EdgeBox, required: float, sharp: bool, extra: dict) -> CaseReport:
    if sharp:
        scan = area_scan(box)
        slack = scan.corner_min - required
        passed = scan.consistent and slack >= -TOL and abs(slack) <= TOL
    else:
        scan = area_scan(box.widened())
        slack = scan.corner_min - required
        passed = scan.consistent and slack >= MARGIN
    detail = {"box": box.as_json(), "corner": list(scan.corner), "grid_min": scan.grid_min,
              "lexell_consistent": scan.consistent, **extra}
    return CaseReport(label, "area >= sol0 + d3", scan.corner_min, required, slack, passed,
                      sharp, detail)


def _cases():
    for r in range(3, -1, -1):
        for s in range(3 - r, -1, -1):
            yield r, s, 3 - r - s


def verify_d3_cases() -> list[CaseReport]:
    """Check ``area >= sol0 + d3(r, s, t)`` for every edge-class triple."""
    t = tables()
    sol0 = CONSTANTS.sol0
    reports = []
    for case in _cases():
        req = sol0 + float(t.d3(*case))
        label = f"({case[0]},{case[1]},{case[2]})"
        if case == (1, 1, 1):
            reports.extend(_verify_111(req))
            continue
        box = edge_box(*case)
        extra = {"t_cap": box.edges[-1][1] if case[2] else None}
        rep = _area_case(label, box, req, case in SHARP, extra)
        if case == (0, 0, 3):
            # the looser box [3.0, 3.27]^3 and its π/2 bound
            loose = EdgeBox(((T_LO, 3.27),) * 3, ("t",) * 3)
            m = min_area_over_box(loose.widened())
            rep.detail.update({
                "cap_3_27_valid": circumradius(3.0, 3.0, 3.27) > SQRT3
                and box.edges[0][1] <= 3.27,
                "loose_box_min": m,
                "loose_box_above_half_pi": m > math.pi / 2 - TOL,
                "d3_formula": float(t.d3(0, 0, 3)),
                "above_sol0_plus_0_81": m > sol0 + 0.81,
            })
            rep.passed = rep.passed and rep.detail["loose_box_above_half_pi"] \
                and rep.detail["cap_3_27_valid"]
        reports.append(rep)
    return reports


def _verify_111(required: float) -> list[CaseReport]:
    out = []
    # long edge at most 3.45
    cap = circumradius_edge_bound((2.0, 2.0), (S_LO, T_LO))
    box = EdgeBox(((2.0, 2.0), (S_LO, T_LO), (T_LO, min(cap, 3.45))), ("r", "s", "t"))
    out.append(_area_case("(1,1,1) long<=3.45", box, required, False,
                          {"t_cap": cap, "cap_below_3_45": cap <= 3.45}))
    # middle edge at least 2.6
    cap_b = circumradius_edge_bound((2.0, 2.0), (2.6, T_LO))
    box = EdgeBox(((2.0, 2.0), (2.6, T_LO), (T_LO, cap_b)), ("r", "s", "t"))
    out.append(_area_case("(1,1,1) mid>=2.6", box, required, False, {"t_cap": cap_b}))
    # both fail: circumradius too large everywhere
    vac = EdgeBox(((2.0, 2.0), (S_LO, 2.6), (3.45, CHORD_MAX)), ("r", "s", "t"))
    rmin = min_circumradius_over_box(vac.widened())
    exact = min_circumradius((2.0 - TOL, 2.0 + TOL), (S_LO - TOL, 2.6 + TOL), 3.45 - TOL)
    slack = min(rmin, exact) - SQRT3
    out.append(CaseReport("(1,1,1) vacuous", "circumradius > sqrt3", min(rmin, exact), SQRT3,
                          slack, slack >= MARGIN, False,
                          {"box": vac.as_json(), "grid_min": rmin, "exact_min": exact}))
    return out


# ---------------------------------------------------------------------------
# superadditivity
# ---------------------------------------------------------------------------

def merge(a: tuple[int, int, int], b: tuple[int, int, int], shared: str) -> tuple[int, int, int]:
    """Parameters of the union of two regions glued along one edge."""
    if shared == "t":
        return a[0] + b[0], a[1] + b[1], a[2] + b[2] - 2
    if shared == "s":
        return a[0] + b[0], a[1] + b[1] - 2, a[2] + b[2]
    raise ValueError(f"cannot glue along a {shared!r} edge")


def verify_superadditivity() -> list[CaseReport]:
    """Pairwise merge check over triangle types, then the chain check."""
    t = tables()
    triples = [c for c in _cases()]
    reports = []
    checked = skipped = 0
    for a, b in combinations_with_replacement(triples, 2):
        for shared, pos in (("t", 2), ("s", 1)):
            label = f"{a}+{b} via {shared}"
            if (3, 0, 0) in (a, b):
                other = b if a == (3, 0, 0) else a
                if other[pos]:
                    skipped += 1
                    reports.append(CaseReport(
                        label, "skipped", 0, 0, 0, True,
                        detail={"reason": "(3,0,0) excluded: it has no edge to share"}))
                continue
            if a[pos] == 0 or b[pos] == 0:
                continue  # no such edge to share
            if a == b == (2, 0, 1):
                skipped += 1
                reports.append(CaseReport(label, "skipped", 0, 0, 0, True,
                                          detail={"reason": "diagonal <= sqrt8: a quadrilateral "
                                                            "with sides 2 has a short diagonal"}))
                continue
            m = merge(a, b, shared)
            lhs = t.d3(*a) + t.d3(*b)
            rhs = t.d3(*m)
            checked += 1
            reports.append(CaseReport(label, "d3(a)+d3(b) >= d3(merged)", float(lhs), float(rhs),
                                      float(lhs - rhs), lhs >= rhs,
                                      detail={"merged": list(m), "exact_slack": str(lhs - rhs)}))
    chain = chain_check()
    reports.append(CaseReport("chain k<=8", "sum d3 >= d2(r,s)", chain["min_slack"], 0.0,
                              chain["min_slack"], chain["min_slack"] >= 0,
                              detail={k: v for k, v in chain.items() if k != "by_rs"}))
    # coverage: every ordered-free pair with a shareable edge is accounted for
    expected = sum(1 for a, b in combinations_with_replacement(triples, 2)
                   for pos in (2, 1) if a[pos] and b[pos])
    expected += sum(1 for c in triples for pos in (2, 1) if c[pos])
    assert checked + skipped == expected, (checked, skipped, expected)
    return reports


def triangulations(k: int) -> list[tuple[tuple[int, int, int], ...]]:
    """Triangulations of the convex polygon 0..k-1 as vertex triples."""
    def rec(i, j):
        if j - i < 2:
            return [()]
        out = []
        for m in range(i + 1, j):
            for left in rec(i, m):
                for right in rec(m, j):
                    out.append(left + right + ((i, m, j),))
        return out
    return rec(0, k - 1)


_CLASS = {"r": 0, "s": 1, "t": 2}


def chain_check(max_k: int = 8) -> dict:
    """Aggregation check on every triangulated polygon with ``k <= max_k``.

    Boundary edges are contacts or short gaps; diagonals are short gaps or
    long edges.  Labelings where two (2,0,1) triangles share their long
    diagonal are excluded.  The minimum of ``Σ d3 - d2(r, s)`` is reported
    per boundary count, in thousandths.
    """
    t = tables()
    lut = np.full((4, 4, 4), 10**9, dtype=np.int64)
    for r, s, u in _cases():
        lut[r, s, u] = int(t.d3(r, s, u) * 1000)
    min_slack = math.inf
    by_rs: dict[str, int] = {}
    checked = excluded = 0
    for k in range(4, max_k + 1):
        bnd = np.array(list(product((0, 1), repeat=k)), dtype=np.int64)
        r_cnt = (bnd == 0).sum(axis=1)
        d2 = np.array([int(t.d2(int(r), k - int(r)) * 1000) for r in r_cnt], dtype=np.int64)
        diag_labels = np.array(list(product((1, 2), repeat=k - 3)), dtype=np.int64)
        for tri in triangulations(k):
            diags = sorted({(a, b) for x in tri for a, b in ((x[0], x[1]), (x[1], x[2]), (x[0], x[2]))
                            if (b - a) % k not in (1, k - 1)})
            dpos = {d: i for i, d in enumerate(diags)}
            # label of each triangle edge: ("b", index) or ("d", index)
            refs = []
            for x in tri:
                er = []
                for a, b in ((x[0], x[1]), (x[1], x[2]), (x[0], x[2])):
                    if (a, b) in dpos:
                        er.append(("d", dpos[(a, b)]))
                    else:
                        er.append(("b", a if (b - a) % k == 1 else b))
                refs.append(er)
            # all combinations: boundary (2^k) x diagonal (2^(k-3))
            nb, nd = len(bnd), len(diag_labels)
            total = np.zeros((nb, nd), dtype=np.int64)
            kinds = []
            for er in refs:
                cnt = np.zeros((nb, nd, 3), dtype=np.int64)
                for kind, i in er:
                    lab = bnd[:, i][:, None] if kind == "b" else diag_labels[:, i][None, :]
                    for c in range(3):
                        cnt[:, :, c] += (lab == c)
                total += lut[cnt[:, :, 0], cnt[:, :, 1], cnt[:, :, 2]]
                kinds.append(cnt)
            bad = np.zeros((nb, nd), dtype=bool)
            for i, j in combinations_with_replacement(range(len(tri)), 2):
                if i == j:
                    continue
                shared = [ref for ref in refs[i] if ref in refs[j] and ref[0] == "d"]
                if not shared:
                    continue
                di = shared[0][1]
                is201_i = (kinds[i][:, :, 0] == 2) & (kinds[i][:, :, 2] == 1)
                is201_j = (kinds[j][:, :, 0] == 2) & (kinds[j][:, :, 2] == 1)
                bad |= is201_i & is201_j & (diag_labels[:, di][None, :] == 2)
            slack = total - d2[:, None]
            ok = ~bad
            excluded += int(bad.sum())
            checked += int(ok.sum())
            if ok.any():
                min_slack = min(min_slack, float(slack[ok].min()) / 1000)
            for r in range(k + 1):
                rows = r_cnt == r
                sel = slack[rows][ok[rows]]
                if sel.size:
                    key = f"{r},{k - r}"
                    by_rs[key] = min(by_rs.get(key, 10**9), int(sel.min()))
    return {"min_slack": min_slack, "checked": checked, "excluded": excluded,
            "max_k": max_k, "by_rs": by_rs}


_chain_cache: dict | None = None


def verify_face_bound(r: int, s: int) -> CaseReport:
    """Bookkeeping for ``τ >= min(d2(r, s), tgt)`` from the checks above."""
    global _chain_cache
    if r + s < 3:
        raise ValueError("a face has at least three edges")
    t = tables()
    d2 = t.d2(r, s)
    bound = min(d2, t.tgt)
    chain = ["area >= sol0 + d3 per Delaunay triangle (verify_d3_cases)",
             "sum over triangles of (area - sol0) = tau"]
    if r + s == 3:
        ok = all(c.passed for c in verify_d3_cases())
        chain.append("single triangle: d3(r,s,0) = d2(r,s)")
        slack = 0.0
    else:
        if _chain_cache is None:
            _chain_cache = chain_check()
        key = f"{r},{s}"
        if key in _chain_cache["by_rs"]:
            slack = _chain_cache["by_rs"][key] / 1000
            ok = slack >= 0
            chain.append(f"exhaustive triangulation check for k={r + s}")
        else:
            sup = verify_superadditivity()
            ok = all(c.passed for c in sup)
            slack = 0.0
            chain.append("pairwise superadditivity of d3, applied along any triangulation")
    chain.append("d3(r,s,0) = d2(r,s)")
    if d2 >= t.tgt:
        chain.append("d2 >= tgt, so the bound is tgt")
    return CaseReport(f"({r},{s})", "tau >= min(d2, tgt)", float(bound), float(bound), slack, ok,
                      detail={"d2": str(d2), "bound": str(bound), "chain": chain})
