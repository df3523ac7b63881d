"""Fans over explicit point sets and the hypermaps they induce.

Points are labelled by their position in ``Fan.points``; edges are sorted
label pairs.  ``build_hypermap`` orders the neighbours of each node by
azimuth and produces darts ``(v, w)`` with::

    n(v, w) = (v, sigma(v, w))
    e(v, w) = (w, v)
    f = n⁻¹∘e⁻¹, i.e. f(v, w) = (w, sigma(w)⁻¹ v)

so every face is traversed counterclockwise as seen from outside the sphere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .hypermap import Hypermap, is_dihedral, make_hypermap, orbits
from .sphgeom import (CONSTANTS, RADIUS, TOL, arcs_cross, azim,
                      solid_angle_polygon)

__all__ = [
    "FanError",
    "FanAxiomViolation",
    "NotAFace",
    "InvalidConfig",
    "Fan",
    "KissingConfig",
    "LocalFan",
    "FanVerdict",
    "RealizedHypermap",
    "contact_edges",
    "extended_edges",
    "check_fan",
    "build_hypermap",
    "localize",
    "face_tau",
    "node_azimuth_gaps",
    "fcc_points",
    "hcp_points",
    "random_rotation",
    "points_to_json",
    "points_from_json",
]

SQRT8 = math.sqrt(8.0)


class FanError(ValueError):
    pass


class FanAxiomViolation(FanError):
    pass


class NotAFace(FanError):
    pass


class InvalidConfig(FanError):
    pass


Edge = tuple[int, int]


def _edge(v: int, w: int) -> Edge:
    return (v, w) if v < w else (w, v)


@dataclass(frozen=True)
class Fan:
    points: tuple[tuple[float, float, float], ...]
    edges: frozenset[Edge]

    @classmethod
    def of(cls, points: Iterable[Sequence[float]], edges: Iterable[Sequence[int]]) -> "Fan":
        pts = tuple(tuple(float(c) for c in p) for p in points)
        return cls(pts, frozenset(_edge(int(a), int(b)) for a, b in edges))

    def neighbours(self, v: int) -> list[int]:
        return sorted(w for e in self.edges for w in e if v in e and w != v)

    def coords(self, v: int) -> np.ndarray:
        return np.asarray(self.points[v], dtype=float)


@dataclass(frozen=True)
class KissingConfig:
    points: tuple[tuple[float, float, float], ...]

    @classmethod
    def of(cls, points: Iterable[Sequence[float]], validate: bool = True) -> "KissingConfig":
        cfg = cls(tuple(tuple(float(c) for c in p) for p in points))
        if validate:
            cfg.validate()
        return cfg

    def distance(self, i: int, j: int) -> float:
        return float(np.linalg.norm(np.subtract(self.points[i], self.points[j])))

    def pair_classes(self) -> dict[Edge, str]:
        """Each pair classified as ``contact``, ``gap`` (< √8) or ``far``."""
        out = {}
        for i, j in combinations(range(len(self.points)), 2):
            d = self.distance(i, j)
            if abs(d - 2) <= TOL:
                out[(i, j)] = "contact"
            elif d < SQRT8 - TOL:
                out[(i, j)] = "gap"
            else:
                out[(i, j)] = "far"
        return out

    def validate(self) -> None:
        if len(self.points) != 12:
            raise InvalidConfig(f"expected 12 points, got {len(self.points)}")
        for p in self.points:
            if abs(float(np.linalg.norm(p)) - RADIUS) > TOL:
                raise InvalidConfig(f"point {p} is not on the radius-2 sphere")
        gap = 2 * CONSTANTS.h0
        for i, j in combinations(range(12), 2):
            d = self.distance(i, j)
            if abs(d - 2) > TOL and d < gap - TOL:
                raise InvalidConfig(f"points {i},{j} at distance {d} in (2, 2h0)")

    def fan(self, extended: bool = False) -> Fan:
        edges = extended_edges(self) if extended else contact_edges(self)
        return Fan(self.points, frozenset(edges))


def _points_of(cfg) -> tuple:
    return cfg.points if hasattr(cfg, "points") else tuple(cfg)


def contact_edges(cfg) -> set[Edge]:
    """Pairs at distance 2 within ``TOL``."""
    pts = _points_of(cfg)
    return {(i, j) for i, j in combinations(range(len(pts)), 2)
            if abs(float(np.linalg.norm(np.subtract(pts[i], pts[j]))) - 2) <= TOL}


def extended_edges(cfg) -> set[Edge]:
    """Pairs with ``2 <= d < √8``; distances within ``TOL`` of √8 are excluded."""
    pts = _points_of(cfg)
    out = set()
    for i, j in combinations(range(len(pts)), 2):
        d = float(np.linalg.norm(np.subtract(pts[i], pts[j])))
        if d >= 2 - TOL and d < SQRT8 - TOL:
            out.add((i, j))
    return out


@dataclass
class FanVerdict:
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first(self) -> tuple[str, str] | None:
        return self.failures[0] if self.failures else None

    def __bool__(self) -> bool:
        return self.ok


def _on_arc(u, v, w) -> bool:
    """Direction ``u`` lies strictly inside the minor arc from ``v`` to ``w``."""
    u, v, w = (x / np.linalg.norm(x) for x in (u, v, w))
    nrm = np.cross(v, w)
    nrm = nrm / np.linalg.norm(nrm)
    if abs(float(np.dot(nrm, u))) > TOL:
        return False
    if np.linalg.norm(u - v) < TOL or np.linalg.norm(u - w) < TOL:
        return False
    return float(np.dot(np.cross(v, u), nrm)) > TOL and float(np.dot(np.cross(u, w), nrm)) > TOL


def check_fan(points: Sequence[Sequence[float]], edges: Iterable[Sequence[int]]) -> FanVerdict:
    """Check the cardinality, origin, nonparallel and intersection axioms."""
    verdict = FanVerdict()
    pts = [np.asarray(p, dtype=float) for p in points]
    edges = sorted({_edge(int(a), int(b)) for a, b in edges})
    if not pts:
        verdict.failures.append(("cardinality", "empty point set"))
        return verdict
    for i, p in enumerate(pts):
        if np.linalg.norm(p) <= TOL:
            verdict.failures.append(("origin", f"point {i} is the origin"))
    if verdict.failures:
        return verdict
    for a, b in edges:
        if a == b or not (0 <= a < len(pts) and 0 <= b < len(pts)):
            verdict.failures.append(("cardinality", f"bad edge {(a, b)}"))
            continue
        cr = np.linalg.norm(np.cross(pts[a], pts[b]))
        if cr <= TOL * np.linalg.norm(pts[a]) * np.linalg.norm(pts[b]):
            verdict.failures.append(("nonparallel", f"edge {(a, b)} is collinear with 0"))
    if verdict.failures:
        return verdict
    unit = [p / np.linalg.norm(p) for p in pts]
    for i, j in combinations(range(len(pts)), 2):
        if np.linalg.norm(unit[i] - unit[j]) < TOL:
            verdict.failures.append(("intersection", f"points {i},{j} on one ray"))
    for a, b in edges:
        for u in range(len(pts)):
            if u not in (a, b) and _on_arc(unit[u], unit[a], unit[b]):
                verdict.failures.append(("intersection", f"ray {u} meets blade {(a, b)}"))
    for (a, b), (c, d) in combinations(edges, 2):
        if arcs_cross(unit[a], unit[b], unit[c], unit[d]):
            verdict.failures.append(("intersection", f"blades {(a, b)} and {(c, d)} cross"))
    return verdict


@dataclass(frozen=True)
class RealizedHypermap:
    hypermap: Hypermap
    darts: tuple[tuple[int, int], ...]

    def dart_index(self) -> dict[tuple[int, int], int]:
        return {d: i for i, d in enumerate(self.darts)}

    def faces(self) -> list[tuple[tuple[int, int], ...]]:
        return [tuple(self.darts[x] for x in cls)
                for cls in orbits(self.hypermap, "face").classes]


def _sigma(fan: Fan, v: int) -> dict[int, int]:
    """Counterclockwise successor of each neighbour of ``v``."""
    nb = fan.neighbours(v)
    if len(nb) == 1:
        return {nb[0]: nb[0]}
    p = fan.coords(v)
    ref = fan.coords(nb[0])
    keyed = sorted((azim(p, ref, fan.coords(w)), w) for w in nb)
    for (a1, w1), (a2, w2) in zip(keyed, keyed[1:]):
        if a2 - a1 <= TOL:
            raise FanAxiomViolation(f"neighbours {w1},{w2} of {v} have equal azimuth")
    order = [w for _, w in keyed]
    return {order[i]: order[(i + 1) % len(order)] for i in range(len(order))}


def build_hypermap(fan: Fan, check: bool = True) -> RealizedHypermap:
    if check:
        verdict = check_fan(fan.points, fan.edges)
        if not verdict.ok:
            raise FanAxiomViolation("; ".join(f"{a}: {d}" for a, d in verdict.failures))
    darts: list[tuple[int, int]] = []
    for a, b in sorted(fan.edges):
        darts.append((a, b))
        darts.append((b, a))
    for v in range(len(fan.points)):
        if not fan.neighbours(v):
            darts.append((v, v))
    darts.sort()
    index = {d: i for i, d in enumerate(darts)}
    sigma = {v: _sigma(fan, v) for v in range(len(fan.points)) if fan.neighbours(v)}
    e = [0] * len(darts)
    n = [0] * len(darts)
    for i, (v, w) in enumerate(darts):
        if v == w:
            e[i] = n[i] = i
            continue
        e[i] = index[(w, v)]
        n[i] = index[(v, sigma[v][w])]
    return RealizedHypermap(make_hypermap(len(darts), e, n), tuple(darts))


@dataclass(frozen=True)
class LocalFan:
    labels: tuple[int, ...]
    edges: frozenset[Edge]
    face: tuple[tuple[int, int], ...]
    k: int


def _find_face(real: RealizedHypermap, face) -> tuple[tuple[int, int], ...]:
    want = {tuple(d) for d in face}
    for F in real.faces():
        if set(F) == want:
            return F
    raise NotAFace(f"{sorted(want)} is not a face")


def localize(fan: Fan, face) -> LocalFan:
    """Restrict the fan to the nodes and edges of one face.

    The result is checked to be a local fan: its hypermap is dihedral with
    ``k`` equal to the face size.
    """
    real = build_hypermap(fan, check=False)
    F = _find_face(real, face)
    labels = tuple(sorted({v for v, _ in F}))
    edges = frozenset(_edge(v, w) for v, w in F if v != w)
    relabel = {v: i for i, v in enumerate(labels)}
    sub = Fan(tuple(fan.points[v] for v in labels),
              frozenset(_edge(relabel[a], relabel[b]) for a, b in edges))
    sub_real = build_hypermap(sub)
    k = len(F)
    if is_dihedral(sub_real.hypermap) != k:
        raise FanError(f"localization along a {k}-face is not dihedral")
    return LocalFan(labels, edges, F, k)


def face_tau(fan: Fan, face) -> float:
    """Weight ``sol(U_F) + (2 - k) sol0`` of a simple face."""
    real = build_hypermap(fan, check=False)
    F = _find_face(real, face)
    k = len(F)
    cycle = [fan.points[v] for v, _ in F]
    return solid_angle_polygon(cycle) + (2 - k) * CONSTANTS.sol0


def node_azimuth_gaps(fan: Fan, v: int) -> list[float]:
    """Azimuth from each neighbour of ``v`` to its counterclockwise successor."""
    sig = _sigma(fan, v)
    p = fan.coords(v)
    if len(sig) == 1:
        return [2 * math.pi]
    return [azim(p, fan.coords(w), fan.coords(sig[w])) for w in sorted(sig)]


def fcc_points() -> KissingConfig:
    """Cuboctahedron: permutations of ``(±√2, ±√2, 0)``."""
    r = math.sqrt(2.0)
    pts = []
    for zero in (2, 1, 0):
        for s1 in (1, -1):
            for s2 in (1, -1):
                vals = [s1 * r, s2 * r]
                vals.insert(zero, 0.0)
                pts.append(tuple(vals))
    return KissingConfig.of(pts)


def hcp_points() -> KissingConfig:
    """Triangular orthobicupola: hexagon at z=0 and two aligned triangles."""
    pts = [(2 * math.cos(k * math.pi / 3), 2 * math.sin(k * math.pi / 3), 0.0) for k in range(6)]
    rho = 2 / math.sqrt(3)
    h = 2 * math.sqrt(6) / 3
    for z in (h, -h):
        for k in range(3):
            t = math.pi / 6 + k * 2 * math.pi / 3
            pts.append((rho * math.cos(t), rho * math.sin(t), z))
    return KissingConfig.of(pts)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def points_to_json(points: Sequence[Sequence[float]]) -> str:
    return json.dumps([list(map(float, p)) for p in points])


def points_from_json(text: str) -> list[tuple[float, float, float]]:
    data = json.loads(text)
    out = []
    for p in data:
        if len(p) != 3:
            raise ValueError("points must be [x, y, z] triples")
        out.append(tuple(float(c) for c in p))
    return out
