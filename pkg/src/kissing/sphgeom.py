"""Euclidean and spherical trigonometry on the sphere of radius 2.

Edge lengths passed in and out are Euclidean chords between points of the
radius-2 sphere; arcs (angles at the centre) are used internally.  Boundary
and degenerate inputs raise typed errors instead of being clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "TOL",
    "MARGIN",
    "RADIUS",
    "UNBOUNDED",
    "Constants",
    "CONSTANTS",
    "GeometryError",
    "OutOfRange",
    "DegenerateTriangle",
    "NotEmbeddable",
    "NotRealizable",
    "NotATriangle",
    "SelfIntersecting",
    "Collinear",
    "lfun",
    "chord_to_arc",
    "arc_to_chord",
    "spherical_angle",
    "dih",
    "triangle_area_from_chords",
    "heron_area",
    "circumradius",
    "triangle_solid_angle",
    "solid_angle_polygon",
    "arcs_cross",
    "azim",
]

# equality tolerance for floating comparisons
TOL = 1e-9
# slack a verified inequality must keep after widening inputs by TOL
MARGIN = 1e-6
RADIUS = 2.0
UNBOUNDED = math.inf


@dataclass(frozen=True)
class Constants:
    h0: float = 1.26
    tgt: float = 1.541
    sol0: float = 3 * math.acos(1 / 3) - math.pi
    total: float = 4 * math.pi - 20 * (3 * math.acos(1 / 3) - math.pi)
    # exact forms of the decimal constants
    h0_exact: Fraction = Fraction("1.26")
    tgt_exact: Fraction = Fraction("1.541")

    def as_dict(self) -> dict:
        return {
            "h0": self.h0,
            "tgt": self.tgt,
            "sol0": self.sol0,
            "total": self.total,
            "total_below_tgt": self.total < self.tgt,
        }


CONSTANTS = Constants()


class GeometryError(ValueError):
    pass


class OutOfRange(GeometryError):
    pass


class DegenerateTriangle(GeometryError):
    pass


class NotEmbeddable(GeometryError):
    pass


class NotRealizable(GeometryError):
    pass


class NotATriangle(GeometryError):
    pass


class SelfIntersecting(GeometryError):
    pass


class Collinear(GeometryError):
    pass


def lfun(h: float) -> float:
    h0 = CONSTANTS.h0
    return (h0 - h) / (h0 - 1)


def chord_to_arc(c: float) -> float:
    if not 0 <= c <= 2 * RADIUS:
        raise OutOfRange(f"chord {c} outside [0, 4]")
    return 2 * math.asin(c / (2 * RADIUS))


def arc_to_chord(a: float) -> float:
    if not 0 <= a <= math.pi:
        raise OutOfRange(f"arc {a} outside [0, pi]")
    return 2 * RADIUS * math.sin(a / 2)


def spherical_angle(opp: float, adj1: float, adj2: float) -> float:
    """Vertex angle of a spherical triangle from the law of cosines."""
    den = math.sin(adj1) * math.sin(adj2)
    if abs(den) < TOL:
        raise DegenerateTriangle("adjacent arcs of length 0 or pi")
    c = (math.cos(opp) - math.cos(adj1) * math.cos(adj2)) / den
    if abs(c) > 1 + TOL:
        raise DegenerateTriangle(f"arcs ({opp}, {adj1}, {adj2}) violate the triangle inequality")
    return math.acos(max(-1.0, min(1.0, c)))


def dih(y1: float, y2: float, y3: float, y4: float, y5: float, y6: float) -> float:
    """Dihedral angle along edge 0-v1 of the simplex {0, v1, v2, v3}.

    ``y1, y2, y3`` are ``|v1|, |v2|, |v3|``; ``y4 = |v2 v3|``,
    ``y5 = |v1 v3|``, ``y6 = |v1 v2|``.
    """
    g11, g22, g33 = y1 * y1, y2 * y2, y3 * y3
    g12 = (g11 + g22 - y6 * y6) / 2
    g13 = (g11 + g33 - y5 * y5) / 2
    g23 = (g22 + g33 - y4 * y4) / 2
    gram = np.array([[g11, g12, g13], [g12, g22, g23], [g13, g23, g33]])
    if g11 <= 0 or np.linalg.det(gram) <= TOL:
        raise NotEmbeddable(f"lengths {(y1, y2, y3, y4, y5, y6)} do not span a simplex")
    # components of v2, v3 orthogonal to v1
    p22 = g22 - g12 * g12 / g11
    p33 = g33 - g13 * g13 / g11
    p23 = g23 - g12 * g13 / g11
    c = p23 / math.sqrt(p22 * p33)
    return math.acos(max(-1.0, min(1.0, c)))


def _arcs_of_triangle(c1: float, c2: float, c3: float) -> tuple[float, float, float]:
    try:
        a, b, c = (chord_to_arc(x) for x in (c1, c2, c3))
    except OutOfRange as exc:
        raise NotRealizable(str(exc)) from None
    if a + b < c or a + c < b or b + c < a or a + b + c > 2 * math.pi:
        raise NotRealizable(f"chords {(c1, c2, c3)} do not bound a spherical triangle")
    return a, b, c


def triangle_area_from_chords(c1: float, c2: float, c3: float) -> float:
    """Spherical excess (solid angle) of the triangle with the given chords.

    Uses l'Huilier's formula on the three arcs.
    """
    a, b, c = _arcs_of_triangle(c1, c2, c3)
    s = (a + b + c) / 2
    prod = (math.tan(s / 2) * math.tan((s - a) / 2)
            * math.tan((s - b) / 2) * math.tan((s - c) / 2))
    if prod < 0:
        # only reachable through rounding on a flat triangle
        if prod < -TOL:
            raise NotRealizable("negative l'Huilier product")
        prod = 0.0
    return 4 * math.atan(math.sqrt(prod))


def heron_area(a: float, b: float, c: float) -> float:
    s = (a + b + c) / 2
    return math.sqrt(max(0.0, s * (s - a) * (s - b) * (s - c)))


def circumradius(a: float, b: float, c: float) -> float:
    """Circumradius of a Euclidean triangle; ``UNBOUNDED`` when flat."""
    x, y, z = sorted((a, b, c))
    if x < 0 or x + y < z - TOL:
        raise NotATriangle(f"{(a, b, c)} violates the triangle inequality")
    # Kahan's stable Heron product
    prod = (z + (y + x)) * (x - (z - y)) * (x + (z - y)) * (z + (y - x))
    if prod <= 0:
        return UNBOUNDED
    area = math.sqrt(prod) / 4
    if area <= TOL * TOL:
        return UNBOUNDED
    return a * b * c / (4 * area)


def _unit(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    n = np.linalg.norm(p)
    if n == 0:
        raise Collinear("zero vector")
    return p / n


def triangle_solid_angle(a, b, c) -> float:
    """Signed solid angle of the cone over triangle ``abc`` (Van Oosterom–Strackee).

    Positive when ``a, b, c`` run counterclockwise seen from outside.
    """
    a, b, c = _unit(a), _unit(b), _unit(c)
    num = float(np.dot(a, np.cross(b, c)))
    den = 1 + float(np.dot(a, b) + np.dot(b, c) + np.dot(c, a))
    return 2 * math.atan2(num, den)


def arcs_cross(p1, p2, q1, q2, tol: float = TOL) -> bool:
    """True if the minor arcs p1p2 and q1q2 meet at a point interior to both."""
    p1, p2, q1, q2 = (_unit(x) for x in (p1, p2, q1, q2))
    n1 = np.cross(p1, p2)
    n2 = np.cross(q1, q2)
    t = np.cross(n1, n2)
    nt = np.linalg.norm(t)
    if nt < tol:
        # same great circle: overlap test along the circle
        if abs(float(np.dot(n1, q1))) > tol:
            return False
        return _cocircular_overlap(p1, p2, q1, q2, tol)
    t = t / nt
    for cand in (t, -t):
        if _strictly_on_arc(cand, p1, p2, n1, tol) and _strictly_on_arc(cand, q1, q2, n2, tol):
            return True
    return False


def _strictly_on_arc(x, a, b, n, tol) -> bool:
    if np.linalg.norm(x - a) < tol or np.linalg.norm(x - b) < tol:
        return False
    return float(np.dot(np.cross(a, x), n)) > tol and float(np.dot(np.cross(x, b), n)) > tol


def _cocircular_overlap(p1, p2, q1, q2, tol) -> bool:
    n = np.cross(p1, p2)
    n = n / np.linalg.norm(n)
    e1 = p1
    e2 = np.cross(n, e1)

    def ang(x):
        return math.atan2(float(np.dot(x, e2)), float(np.dot(x, e1))) % (2 * math.pi)

    a0, a1 = 0.0, ang(p2)
    b0, b1 = sorted((ang(q1), ang(q2)))
    if b1 - b0 > math.pi:
        # q arc wraps through angle 0 and covers [0, b0]
        return min(b0, a1) > tol
    return min(a1, b1) - max(a0, b0) > tol


def solid_angle_polygon(vertices: Sequence) -> float:
    """Solid angle of the spherical polygon with the given cyclic vertices.

    Vertices run counterclockwise around the region seen from outside the
    sphere.  The polygon is fanned from its first vertex and the signed
    triangle solid angles are summed modulo 4π.
    """
    pts = [_unit(v) for v in vertices]
    k = len(pts)
    if k < 3:
        raise GeometryError("polygon needs at least three vertices")
    for i in range(k):
        for j in range(i + 1, k):
            if (j - i) % k in (1, k - 1):
                continue
            if arcs_cross(pts[i], pts[(i + 1) % k], pts[j], pts[(j + 1) % k]):
                raise SelfIntersecting(f"edges {i} and {j} cross")
    total = sum(triangle_solid_angle(pts[0], pts[i], pts[i + 1]) for i in range(1, k - 1))
    return total % (4 * math.pi)


def azim(v, u, w) -> float:
    """Counterclockwise angle in [0, 2π) from u to w about the axis through v.

    The frame ``(e1, e2, v/|v|)`` is right-handed with ``e1`` along the
    projection of ``u`` orthogonal to ``v``.
    """
    e3 = _unit(v)
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    pu = u - np.dot(u, e3) * e3
    pw = w - np.dot(w, e3) * e3
    if np.linalg.norm(pu) < TOL or np.linalg.norm(pw) < TOL:
        raise Collinear("point on the axis through v")
    e1 = pu / np.linalg.norm(pu)
    e2 = np.cross(e3, e1)
    ang = math.atan2(float(np.dot(pw, e2)), float(np.dot(pw, e1)))
    if ang < 0:
        ang += 2 * math.pi
    if ang >= 2 * math.pi:
        ang = 0.0
    return ang
