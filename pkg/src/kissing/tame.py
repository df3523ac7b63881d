"""Bound tables, node types and the tame-contact predicate."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .hypermap import Hypermap, check_structure, node_of_dart, orbits
from .lpfeas import LpSystem, Row, minimize
from .sphgeom import CONSTANTS, dih

__all__ = [
    "NotBiconnected",
    "BoundTables",
    "NodeType",
    "WeightAssignment",
    "TameParams",
    "TameReport",
    "tables",
    "node_types",
    "admissible_node_types",
    "AdmissibleScan",
    "weight_system",
    "weight_feasible",
    "is_tame_contact",
    "CONDITIONS",
]

TGT = Fraction("1.541")
_D0 = Fraction("0.206")
_D1 = Fraction("0.103")
_STEP = Fraction("0.27")
_WEIGHT_SLACK = Fraction(1, 10**9)


class NotBiconnected(ValueError):
    pass


def _enclose(x: float, eps: float = 1e-9) -> tuple[Fraction, Fraction]:
    # outward rounding onto a 1e-10 grid, then widened by eps
    lo = Fraction(math.floor(x * 1e10), 10**10) - Fraction(eps)
    hi = Fraction(math.ceil(x * 1e10), 10**10) + Fraction(eps)
    return lo, hi


@dataclass(frozen=True)
class BoundTables:
    tgt: Fraction
    sol0: float
    alpha: dict[int, float]
    beta: dict[int, float]
    alpha_enc: dict[int, tuple[Fraction, Fraction]]
    beta_enc: dict[int, tuple[Fraction, Fraction]]

    def d1(self, k: int) -> Fraction:
        if k <= 3:
            return Fraction(0)
        if k <= 8:
            return _D0 + _STEP * (k - 4)
        return self.tgt

    def d2(self, r: int, s: int) -> Fraction:
        if (r, s) == (3, 0):
            return Fraction(0)
        return _D1 * (2 - s) + _STEP * (r + 2 * s - 4)

    def d3(self, r: int, s: int, t: int) -> Fraction:
        if (r, s, t) in ((3, 0, 0), (2, 0, 1)):
            return Fraction(0)
        return _D1 * (2 - s) + _STEP * (r + 2 * s + 2 * t - 4)

    def b(self, p: int, q: int) -> Fraction:
        if (p, q) in ((0, 3), (1, 3)):
            return Fraction("0.618")
        if (p, q) == (2, 2):
            return Fraction("0.412")
        return self.tgt

    def alpha_k(self, k: int) -> float:
        return self.alpha[min(k, 5)]

    def beta_k(self, k: int) -> float:
        return self.beta[min(k, 5)]


_tables: BoundTables | None = None
_tables_lock = threading.Lock()


def tables() -> BoundTables:
    """The bound tables, built once on first use."""
    global _tables
    if _tables is None:
        with _tables_lock:
            if _tables is None:
                two_h0 = 2 * CONSTANTS.h0
                a3 = dih(2, 2, 2, 2, 2, 2)
                a4 = dih(2, 2, 2, two_h0, 2, 2)
                b4 = 2 * dih(2, 2, 2, 2, two_h0, 2)
                alpha = {3: a3, 4: a4, 5: a4}
                beta = {3: a3, 4: b4, 5: 2 * math.pi}
                _tables = BoundTables(
                    TGT, CONSTANTS.sol0, alpha, beta,
                    {k: _enclose(v) for k, v in alpha.items()},
                    {k: _enclose(v) for k, v in beta.items()},
                )
    return _tables


@dataclass(frozen=True, order=True)
class NodeType:
    p: int
    q: int
    r: int

    @property
    def size(self) -> int:
        return self.p + self.q + self.r


def node_types(h: Hypermap, require_biconnected: bool = True) -> dict[int, NodeType]:
    """Count triangles, quadrilaterals and larger faces at each node."""
    if require_biconnected and not check_structure(h).biconnected:
        raise NotBiconnected("node types need a biconnected hypermap")
    fsize = [0] * h.dart_count
    for cls in orbits(h, "face").classes:
        for x in cls:
            fsize[x] = len(cls)
    out = {}
    for v, cls in enumerate(orbits(h, "node").classes):
        p = sum(1 for x in cls if fsize[x] == 3)
        q = sum(1 for x in cls if fsize[x] == 4)
        out[v] = NodeType(p, q, len(cls) - p - q)
    return out


@dataclass(frozen=True)
class AdmissibleScan:
    admissible: tuple[tuple[int, int, int], ...]
    max_total: int

    @property
    def r0(self) -> set[tuple[int, int]]:
        return {(p, q) for p, q, r in self.admissible if r == 0}

    @property
    def large(self) -> list[tuple[int, int, int]]:
        return [t for t in self.admissible if sum(t) >= 5]


def _type_possible(p: int, q: int, r: int, t: BoundTables) -> bool:
    # conservative: admissible unless an enclosure proves a side fails
    two_pi_lo, two_pi_hi = _enclose(2 * math.pi)
    lo_sum = p * t.alpha_enc[3][0] + q * t.alpha_enc[4][0] + r * t.alpha_enc[5][0]
    hi_sum = p * t.beta_enc[3][1] + q * t.beta_enc[4][1] + r * t.beta_enc[5][1]
    return lo_sum <= two_pi_hi and two_pi_lo <= hi_sum


def admissible_node_types(max_total: int = 8) -> AdmissibleScan:
    """All (p, q, r) with ``p+q+r <= max_total`` passing the angle-sum test.

    ``6 * alpha3 > 2π`` and ``alpha3`` is the smallest lower bound, so no
    type with six or more faces can pass; a cap of 8 is ample.
    """
    t = tables()
    assert 6 * t.alpha[3] > 2 * math.pi
    found = []
    for p, q, r in product(range(max_total + 1), repeat=3):
        if 0 < p + q + r <= max_total and _type_possible(p, q, r, t):
            found.append((p, q, r))
    scan = AdmissibleScan(tuple(sorted(found)), max_total)
    assert scan.r0 == {(0, 3), (1, 3), (2, 2)}, scan.r0
    assert not scan.large, scan.large
    return scan


@dataclass(frozen=True)
class WeightAssignment:
    values: dict[int, Fraction]
    total: Fraction

    def to_json(self) -> dict:
        return {"values": {str(k): str(v) for k, v in self.values.items()},
                "total": str(self.total), "total_float": float(self.total)}


def weight_system(h: Hypermap, t: BoundTables) -> LpSystem:
    faces = orbits(h, "face").classes
    face_of = orbits(h, "face").index()
    names = [f"t{i}" for i in range(len(faces))]
    rows = [Row.make({names[i]: 1}, ">=", t.d1(len(cls)), "face-lower", note=f"face {i}")
            for i, cls in enumerate(faces)]
    for v, nt in node_types(h, require_biconnected=False).items():
        if nt.r:
            continue
        cls = orbits(h, "node").classes[v]
        incident = {names[face_of[x]]: 1 for x in cls}
        rows.append(Row.make(incident, ">=", t.b(nt.p, nt.q), "node-lower", note=f"node {v}"))
    return LpSystem(tuple(names), tuple(rows))


def weight_feasible(h: Hypermap, t: BoundTables | None = None) -> WeightAssignment | None:
    """Minimum-total contact weight assignment if its total is below tgt."""
    t = t or tables()
    system = weight_system(h, t)
    res = minimize(system, {v: 1 for v in system.variables})
    if res is None:
        return None
    total, x = res
    if total > t.tgt - _WEIGHT_SLACK:
        return None
    values = {int(k[1:]): v for k, v in x.items()}
    return WeightAssignment(values, sum(values.values(), Fraction(0)))


CONDITIONS = ("biconnected", "planar", "nondegenerate", "no_loops", "no_double_join",
              "face_count", "face_size", "node_count", "node_size", "weights")


@dataclass(frozen=True)
class TameParams:
    node_count: int = 12
    face_min: int = 3
    face_max: int = 8
    node_min: int = 2
    node_max: int = 4
    weights: bool = True


@dataclass
class TameReport:
    flags: dict[str, bool]
    witnesses: dict = field(default_factory=dict)
    node_types_admissible: bool | None = None

    @property
    def tame(self) -> bool:
        return all(self.flags[c] for c in CONDITIONS)

    def to_json(self) -> dict:
        return {"tame": self.tame, "conditions": dict(self.flags),
                "witnesses": self.witnesses,
                "node_types_admissible": self.node_types_admissible}


def is_tame_contact(h: Hypermap, params: TameParams = TameParams()) -> TameReport:
    s = check_structure(h)
    node_sizes = orbits(h, "node").sizes()
    face_sizes = orbits(h, "face").sizes()
    flags = {
        "biconnected": s.biconnected,
        "planar": s.plain and s.planar,
        "nondegenerate": s.nondegenerate,
        "no_loops": s.no_loops,
        "no_double_join": s.no_double_join,
        "face_count": len(face_sizes) >= 2,
        "face_size": all(params.face_min <= k <= params.face_max for k in face_sizes),
        "node_count": len(node_sizes) == params.node_count,
        "node_size": all(params.node_min <= k <= params.node_max for k in node_sizes),
    }
    wit: dict = {}
    for name, sizes, lo, hi in (("face_size", face_sizes, params.face_min, params.face_max),
                                ("node_size", node_sizes, params.node_min, params.node_max)):
        bad = [i for i, k in enumerate(sizes) if not lo <= k <= hi]
        if bad:
            wit[name] = {"violating": bad}
    admissible = None
    if not params.weights:
        flags["weights"] = True
    elif not s.biconnected:
        flags["weights"] = False
        wit["weights"] = "node types undefined without biconnectivity"
    else:
        wa = weight_feasible(h)
        flags["weights"] = wa is not None
        if wa is not None:
            wit["weights"] = wa.to_json()
        scan = admissible_node_types()
        types = node_types(h)
        admissible = all((nt.p, nt.q, nt.r) in scan.admissible for nt in types.values())
    return TameReport(flags, wit, admissible)
