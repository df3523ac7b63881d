"""Exact rational linear feasibility with certificates.

``solve`` runs a phase-1 simplex over :class:`fractions.Fraction` with
Bland's rule.  A feasible system returns a rational witness; an infeasible
one returns Farkas multipliers found by solving the alternative system with
the same engine.  Every verdict is re-checked by exact substitution before it
is returned.

Multiplier convention: each row gets ``y >= 0`` (``<=`` and ``>=`` rows,
where a ``>=`` row is read as ``-a.x <= -b``) or a free ``y`` (``==`` and
``range`` rows; for a range the sign selects the upper or lower side).  A
certificate combines the rows into ``0 <= c`` with ``c < 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath

from .hypermap import Hypermap, orbits

__all__ = [
    "LpError",
    "Malformed",
    "UnsupportedFaceSize",
    "Row",
    "LpSystem",
    "Feasible",
    "Infeasible",
    "solve",
    "minimize",
    "check_witness",
    "check_certificate",
    "Enclosure",
    "AngleBounds",
    "angle_bounds",
    "build_angle_system",
    "hexagon_rule",
    "CandidateFate",
    "eliminate",
    "fate_counts",
    "RULE_SETS",
]


class LpError(Exception):
    pass


class Malformed(LpError, ValueError):
    pass


class UnsupportedFaceSize(LpError, ValueError):
    pass


SENSES = ("<=", ">=", "==", "range")


@dataclass(frozen=True)
class Row:
    coeffs: tuple[tuple[str, Fraction], ...]
    sense: str
    rhs: Fraction
    tag: str
    lo: Fraction | None = None  # lower end for ``range`` rows; ``rhs`` is the upper end
    note: str = ""

    @classmethod
    def make(cls, coeffs: Mapping[str, object], sense: str, rhs, tag: str,
             lo=None, note: str = "") -> "Row":
        c = tuple(sorted((k, Fraction(v)) for k, v in coeffs.items() if Fraction(v) != 0))
        return cls(c, sense, Fraction(rhs), tag, None if lo is None else Fraction(lo), note)

    def value(self, x: Mapping[str, Fraction]) -> Fraction:
        return sum((a * x[k] for k, a in self.coeffs), Fraction(0))

    def holds(self, x: Mapping[str, Fraction]) -> bool:
        v = self.value(x)
        if self.sense == "<=":
            return v <= self.rhs
        if self.sense == ">=":
            return v >= self.rhs
        if self.sense == "==":
            return v == self.rhs
        return self.lo <= v <= self.rhs


@dataclass(frozen=True)
class LpSystem:
    variables: tuple[str, ...]
    rows: tuple[Row, ...]

    def validate(self) -> None:
        names = set(self.variables)
        if len(names) != len(self.variables):
            raise Malformed("duplicate variable labels")
        for r in self.rows:
            if r.sense not in SENSES:
                raise Malformed(f"unknown sense {r.sense!r}")
            if r.sense == "range" and (r.lo is None or r.lo > r.rhs):
                raise Malformed(f"bad range row {r.note or r.tag}")
            for k, _ in r.coeffs:
                if k not in names:
                    raise Malformed(f"row {r.note or r.tag} uses unknown variable {k!r}")

    def count(self, tag: str) -> int:
        return sum(1 for r in self.rows if r.tag == tag)

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "rows": [
                {"coeffs": {k: str(v) for k, v in r.coeffs}, "sense": r.sense,
                 "rhs": str(r.rhs), "lo": None if r.lo is None else str(r.lo),
                 "tag": r.tag, "note": r.note}
                for r in self.rows
            ],
        }


@dataclass(frozen=True)
class Feasible:
    witness: dict[str, Fraction]
    feasible = True


@dataclass(frozen=True)
class Infeasible:
    multipliers: tuple[Fraction, ...]
    feasible = False

    def to_json(self, system: LpSystem) -> list[dict]:
        return [{"row": i, "tag": system.rows[i].tag, "note": system.rows[i].note,
                 "multiplier": str(y)} for i, y in enumerate(self.multipliers) if y != 0]


# ---------------------------------------------------------------------------
# simplex core: A x = b, x >= 0, optional objective
# ---------------------------------------------------------------------------

def _simplex(A: list[list[Fraction]], b: list[Fraction], c: list[Fraction] | None = None):
    """Two-phase tableau simplex with Bland's rule on ``A x = b, x >= 0``.

    Returns ``("infeasible", None, None)``, ``("unbounded", x, None)`` or
    ``("optimal", x, value)``; ``x`` is a list of Fractions.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    for i in range(m):
        r = list(A[i]) + [Fraction(0)] * m + [b[i]]
        if b[i] < 0:
            r = [-v for v in r]
        r[n + i] = Fraction(1)
        rows.append(r)
    basis = [n + i for i in range(m)]
    width = n + m

    def pivot(pr: int, pc: int, obj: list[Fraction]):
        prow = rows[pr]
        pv = prow[pc]
        if pv != 1:
            inv = 1 / pv
            for j in range(width + 1):
                if prow[j]:
                    prow[j] *= inv
        nz = [j for j in range(width + 1) if prow[j]]
        for i in range(m):
            if i == pr:
                continue
            r = rows[i]
            fct = r[pc]
            if fct:
                for j in nz:
                    r[j] -= fct * prow[j]
        fct = obj[pc]
        if fct:
            for j in nz:
                obj[j] -= fct * prow[j]
        basis[pr] = pc

    def run(obj: list[Fraction], allowed: int) -> bool:
        # obj holds reduced costs and, at index ``width``, minus the objective
        while True:
            enter = next((j for j in range(allowed) if obj[j] < 0), None)
            if enter is None:
                return True
            best = None
            for i in range(m):
                a = rows[i][enter]
                if a > 0:
                    ratio = rows[i][width] / a
                    key = (ratio, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            pivot(best[1], enter, obj)

    # phase 1: minimise the sum of artificials
    obj = [Fraction(0)] * (width + 1)
    for r in rows:
        for j in range(n):
            obj[j] -= r[j]
        obj[width] -= r[width]
    run(obj, width)
    if -obj[width] > 0:
        return "infeasible", None, None

    # drive remaining artificials out of the basis
    keep = []
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if rows[i][j] != 0), None)
            if col is None:
                continue  # redundant row
            pivot(i, col, [Fraction(0)] * (width + 1))
        keep.append(i)
    rows = [rows[i] for i in keep]
    basis = [basis[i] for i in keep]
    m = len(rows)

    def solution() -> list[Fraction]:
        x = [Fraction(0)] * n
        for i, j in enumerate(basis):
            if j < n:
                x[j] = rows[i][width]
        return x

    if c is None:
        return "optimal", solution(), Fraction(0)

    obj = [Fraction(0)] * (width + 1)
    for j in range(n):
        obj[j] = Fraction(c[j])
    for i, j in enumerate(basis):
        fct = obj[j]
        if fct:
            r = rows[i]
            for k in range(width + 1):
                if r[k]:
                    obj[k] -= fct * r[k]
    if not run(obj, n):
        return "unbounded", solution(), None
    return "optimal", solution(), -obj[width]


def _standard_form(system: LpSystem):
    """Translate rows to ``A z = b`` over split variables and slacks.

    Column layout: ``x+`` for each variable, ``x-`` for each variable, then
    one slack per inequality side.  Returns the matrix, rhs and, per
    standard row, the originating (row index, side) with side +1 for an
    upper bound and -1 for a lower bound.
    """
    var_index = {v: i for i, v in enumerate(system.variables)}
    nv = len(system.variables)
    sides = []
    for i, r in enumerate(system.rows):
        if r.sense in ("<=", "=="):
            sides.append((i, +1, r.rhs, r.sense == "=="))
        elif r.sense == ">=":
            sides.append((i, -1, r.rhs, False))
        else:
            sides.append((i, +1, r.rhs, False))
            sides.append((i, -1, r.lo, False))
    nslack = sum(1 for s in sides if not s[3])
    ncol = 2 * nv + nslack
    A, b = [], []
    k = 0
    for i, side, rhs, is_eq in sides:
        row = [Fraction(0)] * ncol
        for name, a in system.rows[i].coeffs:
            j = var_index[name]
            row[j] = side * a
            row[nv + j] = -side * a
        if not is_eq:
            row[2 * nv + k] = Fraction(1)
            k += 1
        A.append(row)
        b.append(side * rhs)
    return A, b, [(i, side) for i, side, _, _ in sides], nv


def check_witness(system: LpSystem, witness: Mapping[str, Fraction]) -> bool:
    return all(r.holds(witness) for r in system.rows)


def check_certificate(system: LpSystem, multipliers: Sequence[Fraction]) -> bool:
    """Exact Farkas check, independent of the solver."""
    if len(multipliers) != len(system.rows):
        return False
    total = {v: Fraction(0) for v in system.variables}
    bound = Fraction(0)
    for r, y in zip(system.rows, multipliers):
        y = Fraction(y)
        if y == 0:
            continue
        if r.sense == "<=":
            if y < 0:
                return False
            sign, rhs = 1, r.rhs
        elif r.sense == ">=":
            if y < 0:
                return False
            sign, rhs = -1, r.rhs
        elif r.sense == "==":
            sign, rhs = 1, r.rhs
        else:
            sign, rhs = 1, (r.rhs if y > 0 else r.lo)
        for name, a in r.coeffs:
            total[name] += y * sign * a
        bound += y * sign * rhs
    return all(v == 0 for v in total.values()) and bound < 0


def _farkas(system: LpSystem) -> tuple[Fraction, ...]:
    A, b, origin, nv = _standard_form(system)
    ns = len(A)
    # unknowns: u_k >= 0 per standard row (free rows split into u+ - u-)
    # constraints: sum_k y_k A[k][j] = 0 over original columns j, sum y_k b_k = -1
    free = [system.rows[i].sense == "==" for i, _ in origin]
    cols = []
    for k in range(ns):
        cols.append((k, 1))
        if free[k]:
            cols.append((k, -1))
    M = []
    for j in range(nv):
        M.append([sgn * A[k][j] for k, sgn in cols])
    M.append([sgn * b[k] for k, sgn in cols])
    rhs = [Fraction(0)] * nv + [Fraction(-1)]
    status, u, _ = _simplex(M, rhs)
    if status != "optimal":
        raise LpError("alternative system infeasible; solver inconsistency")
    y_std = [Fraction(0)] * ns
    for (k, sgn), val in zip(cols, u):
        y_std[k] += sgn * val
    mult = [Fraction(0)] * len(system.rows)
    for (i, side), y in zip(origin, y_std):
        r = system.rows[i]
        if r.sense == ">=":
            mult[i] += y
        else:
            mult[i] += side * y
    # both sides of a range row collapse into one signed multiplier; this
    # never weakens the bound since lo <= hi
    if not check_certificate(system, mult):
        raise LpError("derived certificate failed validation")
    return tuple(mult)


def solve(system: LpSystem) -> Feasible | Infeasible:
    """Decide feasibility exactly; the verdict is self-validated."""
    system.validate()
    if not system.rows:
        return Feasible({v: Fraction(0) for v in system.variables})
    A, b, _, nv = _standard_form(system)
    status, z, _ = _simplex(A, b)
    if status == "optimal":
        x = {v: z[j] - z[nv + j] for j, v in enumerate(system.variables)}
        if not check_witness(system, x):
            raise LpError("witness failed validation")
        return Feasible(x)
    mult = _farkas(system)
    return Infeasible(mult)


def minimize(system: LpSystem, objective: Mapping[str, object]):
    """Minimum of a linear objective; returns ``(value, witness)`` or ``None``."""
    system.validate()
    A, b, _, nv = _standard_form(system)
    ncol = len(A[0]) if A else 2 * nv
    c = [Fraction(0)] * ncol
    for j, v in enumerate(system.variables):
        coef = Fraction(objective.get(v, 0))
        c[j] = coef
        c[nv + j] = -coef
    status, z, val = _simplex(A, b, c)
    if status == "infeasible":
        return None
    if status == "unbounded":
        raise LpError("objective unbounded below")
    x = {v: z[j] - z[nv + j] for j, v in enumerate(system.variables)}
    if not check_witness(system, x):
        raise LpError("optimal point failed validation")
    return val, x


# ---------------------------------------------------------------------------
# angle systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    @classmethod
    def around(cls, value, digits: int = 10) -> "Enclosure":
        scale = 10 ** digits
        v = mpmath.mpf(value) * scale
        return cls(Fraction(int(mpmath.floor(v)), scale), Fraction(int(mpmath.ceil(v)), scale))

    def widened(self, delta: Fraction) -> "Enclosure":
        return Enclosure(self.lo - delta, self.hi + delta)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


@dataclass(frozen=True)
class AngleBounds:
    alpha3: Enclosure
    alpha4: Enclosure
    beta4: Enclosure
    two_pi: Enclosure
    sol0: Enclosure
    # lower/upper limits used for quadrilateral angles
    quad_lo: Fraction
    quad_hi: Fraction
    label: str = "nominal"

    def widened(self, delta) -> "AngleBounds":
        delta = Fraction(delta)
        return AngleBounds(self.alpha3.widened(delta), self.alpha4.widened(delta),
                           self.beta4.widened(delta), self.two_pi.widened(delta),
                           self.sol0.widened(delta),
                           self.alpha4.lo - delta, self.beta4.hi + delta,
                           f"widened {float(delta):g}")

    def shrunk(self, delta) -> "AngleBounds":
        delta = Fraction(delta)
        return AngleBounds(self.alpha3, self.alpha4, self.beta4, self.two_pi, self.sol0,
                           self.alpha4.hi + delta, self.beta4.lo - delta,
                           f"shrunk {float(delta):g}")

    def as_json(self) -> dict:
        enc = {k: [str(getattr(self, k).lo), str(getattr(self, k).hi)]
               for k in ("alpha3", "alpha4", "beta4", "two_pi", "sol0")}
        enc["quad_range"] = [str(self.quad_lo), str(self.quad_hi)]
        enc["label"] = self.label
        return enc


def _dih_mp(y4, y5, y6):
    """High-precision dih(2,2,2,y4,y5,y6) through the spherical law of cosines."""
    def arc(c):
        return 2 * mpmath.asin(mpmath.mpf(c) / 4)
    opp, a1, a2 = arc(y4), arc(y6), arc(y5)
    return mpmath.acos((mpmath.cos(opp) - mpmath.cos(a1) * mpmath.cos(a2))
                       / (mpmath.sin(a1) * mpmath.sin(a2)))


def angle_bounds() -> AngleBounds:
    """Rational enclosures (width <= 1e-9) of alpha3, alpha4, beta4 and 2π."""
    with mpmath.workdps(50):
        two_h0 = mpmath.mpf(2) * mpmath.mpf("1.26")
        a3 = _dih_mp(2, 2, 2)
        a4 = _dih_mp(two_h0, 2, 2)
        b4 = 2 * _dih_mp(2, two_h0, 2)
        tp = 2 * mpmath.pi
        sol0 = 3 * mpmath.acos(mpmath.mpf(1) / 3) - mpmath.pi
        enc = [Enclosure.around(v) for v in (a3, a4, b4, tp, sol0)]
    alpha3, alpha4, beta4, two_pi, sol0 = enc
    return AngleBounds(alpha3, alpha4, beta4, two_pi, sol0, alpha4.lo, beta4.hi)


RULE_SETS = ("listed", "face-sum")


def build_angle_system(h: Hypermap, bounds: AngleBounds, rules: str = "listed") -> LpSystem:
    """Angle constraints for a hypermap with faces of size 3, 4 and 5.

    One variable per dart of a quadrilateral or pentagon (the face angle at
    the dart's node); triangle angles enter as the constant enclosure of
    alpha3.  Pentagon angles range over ``[alpha5, beta5] = [alpha4, 2π]``
    and carry no pairing constraint.

    With ``rules="face-sum"`` every face of size ``k >= 4`` also gets the
    row ``Σ angles >= (k-2)(π + sol0) + d1(k)``: the angle sum of a spherical
    polygon is ``(k-2)π`` plus its area, the area is ``τ + (k-2) sol0``, and
    ``τ >= d1(k)`` by the face estimate.
    """
    if rules not in RULE_SETS:
        raise ValueError(f"unknown rule set {rules!r}")
    faces = orbits(h, "face").classes
    fsize = [0] * h.dart_count
    for cls in faces:
        if len(cls) not in (3, 4, 5):
            raise UnsupportedFaceSize(f"face of size {len(cls)}")
        for x in cls:
            fsize[x] = len(cls)
    names = {x: f"x{x}" for x in range(h.dart_count) if fsize[x] in (4, 5)}
    rows: list[Row] = []
    for v, cls in enumerate(orbits(h, "node").classes):
        tri = sum(1 for x in cls if fsize[x] == 3)
        free = {names[x]: 1 for x in cls if x in names}
        lo = bounds.two_pi.lo - tri * bounds.alpha3.hi
        hi = bounds.two_pi.hi - tri * bounds.alpha3.lo
        rows.append(Row.make(free, "range", hi, "node-sum", lo=lo, note=f"node {v}"))
    for x in sorted(names):
        if fsize[x] == 4:
            rows.append(Row.make({names[x]: 1}, ">=", bounds.quad_lo, "quad-range",
                                 note=f"dart {x} >= alpha4"))
            rows.append(Row.make({names[x]: 1}, "<=", bounds.quad_hi, "quad-range",
                                 note=f"dart {x} <= beta4"))
        else:
            rows.append(Row.make({names[x]: 1}, ">=", bounds.quad_lo, "pent-range",
                                 note=f"dart {x} >= alpha5"))
            rows.append(Row.make({names[x]: 1}, "<=", bounds.two_pi.hi, "pent-range",
                                 note=f"dart {x} <= beta5"))
    for cls in faces:
        if len(cls) != 4:
            continue
        for x in cls:
            y = h.f[h.f[x]]
            if x < y:
                rows.append(Row.make({names[x]: 1, names[y]: -1}, "==", 0, "opposite-equality",
                                     note=f"darts {x},{y}"))
    if rules == "face-sum":
        from .tame import tables

        half_pi = bounds.two_pi.lo / 2
        for i, cls in enumerate(faces):
            k = len(cls)
            if k < 4:
                continue
            rhs = (k - 2) * (half_pi + bounds.sol0.lo) + tables().d1(k)
            rows.append(Row.make({names[x]: 1 for x in cls}, ">=", rhs, "face-sum",
                                 note=f"face {i}"))
    system = LpSystem(tuple(names[x] for x in sorted(names)), tuple(rows))
    system.validate()
    return system


def hexagon_rule(h: Hypermap) -> dict | None:
    """Elimination record if some face is a hexagon.

    All contact edges have arc length π/3, so a hexagonal face has perimeter
    exactly 2π, while a geodesically convex spherical polygon has perimeter
    strictly below 2π.
    """
    for i, cls in enumerate(orbits(h, "face").classes):
        if len(cls) == 6:
            return {"rule": "hexagon-perimeter", "face": i, "darts": list(cls),
                    "perimeter": 6 * math.pi / 3, "bound": 2 * math.pi}
    return None


@dataclass
class CandidateFate:
    name: str
    fate: str
    detail: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "fate": self.fate, **self.detail}


def eliminate(candidates: Iterable[tuple[str, Hypermap]], widen=Fraction(1, 10**6),
              bounds: AngleBounds | None = None, rules: str = "listed") -> list[CandidateFate]:
    """Apply the hexagon rule, then the angle LP with widened bounds.

    Survivors are re-solved with the angle ranges shrunk by ``widen`` and
    the outcome is stored under ``robust``.
    """
    base = bounds or angle_bounds()
    weak = base.widened(widen)
    strong = base.shrunk(widen)
    fates = []
    for name, h in candidates:
        rec = hexagon_rule(h)
        if rec is not None:
            fates.append(CandidateFate(name, "hexagon-eliminated", {"record": rec}))
            continue
        system = build_angle_system(h, weak, rules)
        verdict = solve(system)
        if isinstance(verdict, Infeasible):
            fates.append(CandidateFate(
                name, "lp-infeasible",
                {"rules": rules, "bounds": weak.as_json(),
                 "certificate": verdict.to_json(system),
                 "certificate_valid": check_certificate(system, verdict.multipliers)},
                {"widened": verdict}))
            continue
        tight = solve(build_angle_system(h, strong, rules))
        fates.append(CandidateFate(
            name, "survivor",
            {"rules": rules, "bounds": weak.as_json(),
             "witness": {k: str(v) for k, v in verdict.witness.items()},
             "witness_valid": check_witness(system, verdict.witness),
             "robust": isinstance(tight, Feasible)},
            {"widened": verdict, "shrunk": tight}))
    return fates


def fate_counts(fates: Sequence[CandidateFate]) -> dict[str, int]:
    out = {"hexagon-eliminated": 0, "lp-infeasible": 0, "survivor": 0}
    for f in fates:
        out[f.fate] += 1
    return out
