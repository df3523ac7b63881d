import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from kissing.hypermap import dihedral, from_face_cycles
from kissing.lpfeas import (
    Feasible, Infeasible, LpSystem, Malformed, Row, UnsupportedFaceSize, angle_bounds,
    build_angle_system, check_certificate, check_witness, eliminate, fate_counts,
    hexagon_rule, minimize, solve,
)
from kissing.tame import tables

F = Fraction

OCTAHEDRON = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1),
              (5, 2, 1), (5, 3, 2), (5, 4, 3), (5, 1, 4)]


def test_tiny_infeasible():
    s = LpSystem(("x",), (Row.make({"x": 1}, ">=", 1, "a"), Row.make({"x": 1}, "<=", 0, "b")))
    v = solve(s)
    assert isinstance(v, Infeasible)
    assert check_certificate(s, v.multipliers)
    assert not check_certificate(s, [F(1), F(-1)])
    assert not check_certificate(s, [F(0), F(0)])
    assert [c["tag"] for c in v.to_json(s)] == ["a", "b"]


def test_tiny_feasible_and_minimize():
    s = LpSystem(("x", "y"), (
        Row.make({"x": 1, "y": 1}, "==", 3, "sum"),
        Row.make({"x": 1}, "range", 2, "box", lo=F(1, 2)),
        Row.make({"y": 1}, ">=", 0, "pos"),
    ))
    v = solve(s)
    assert isinstance(v, Feasible) and check_witness(s, v.witness)
    val, x = minimize(s, {"y": 1})
    assert val == 1 and x == {"x": 2, "y": 1}


def test_empty_system():
    assert solve(LpSystem(("x",), ())).feasible


def test_malformed():
    with pytest.raises(Malformed):
        solve(LpSystem(("x",), (Row.make({"z": 1}, ">=", 0, "t"),)))
    with pytest.raises(Malformed):
        solve(LpSystem(("x",), (Row.make({"x": 1}, "~", 0, "t"),)))
    with pytest.raises(Malformed):
        solve(LpSystem(("x",), (Row.make({"x": 1}, "range", 0, "t", lo=1),)))
    with pytest.raises(Malformed):
        solve(LpSystem(("x", "x"), ()))


small = st.integers(-4, 4)


@st.composite
def systems(draw):
    rows = [Row.make({"x": 1}, "range", 10, "bx", lo=-10),
            Row.make({"y": 1}, "range", 10, "by", lo=-10)]
    for i in range(draw(st.integers(1, 5))):
        sense = draw(st.sampled_from(["<=", ">=", "=="]))
        rows.append(Row.make({"x": draw(small), "y": draw(small)}, sense, draw(st.integers(-12, 12)),
                             f"r{i}"))
    return LpSystem(("x", "y"), tuple(rows))


def _boundaries(system):
    out = []
    for r in system.rows:
        c = dict(r.coeffs)
        a, b = c.get("x", F(0)), c.get("y", F(0))
        if a == 0 and b == 0:
            continue
        out.append((a, b, r.rhs))
        if r.sense == "range":
            out.append((a, b, r.lo))
    return out


def _vertex_oracle(system):
    # the region lies in a box, so it is nonempty iff it has a vertex
    lines = _boundaries(system)
    for (a1, b1, c1), (a2, b2, c2) in combinations(lines, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        x = (c1 * b2 - c2 * b1) / det
        y = (a1 * c2 - a2 * c1) / det
        if check_witness(system, {"x": x, "y": y}):
            return True
    return False


@given(systems())
def test_solver_matches_vertex_oracle(system):
    v = solve(system)
    assert v.feasible == _vertex_oracle(system)
    if v.feasible:
        assert check_witness(system, v.witness)
    else:
        assert check_certificate(system, v.multipliers)


def test_angle_bounds():
    b = angle_bounds()
    t = tables()
    for enc, val in ((b.alpha3, t.alpha[3]), (b.alpha4, t.alpha[4]), (b.beta4, t.beta[4]),
                     (b.two_pi, 2 * math.pi), (b.sol0, t.sol0)):
        assert enc.lo <= F(val) <= enc.hi or abs(float(enc.lo) - val) < 1e-12
        assert enc.width <= F(1, 10**9)
    w = b.widened(F(1, 10**6))
    assert w.alpha3.lo < b.alpha3.lo and w.quad_lo < b.quad_lo and w.quad_hi > b.quad_hi
    s = b.shrunk(F(1, 10**6))
    assert s.quad_lo > b.quad_lo and s.quad_hi < b.quad_hi
    assert set(w.as_json()) >= {"alpha3", "alpha4", "beta4", "two_pi", "sol0", "quad_range"}


@pytest.mark.parametrize("which", ["fcc", "hcp"])
def test_reference_angle_systems_feasible(which, request):
    h = request.getfixturevalue(which).hypermap
    for rules in ("listed", "face-sum"):
        system = build_angle_system(h, angle_bounds(), rules)
        assert system.count("node-sum") == 12
        assert system.count("quad-range") == 48
        assert system.count("opposite-equality") == 12
        assert system.count("face-sum") == (6 if rules == "face-sum" else 0)
        v = solve(system)
        assert v.feasible and check_witness(system, v.witness)


def test_unsupported_face_size():
    with pytest.raises(UnsupportedFaceSize):
        build_angle_system(dihedral(6), angle_bounds())
    with pytest.raises(ValueError):
        build_angle_system(dihedral(3), angle_bounds(), rules="nope")


def test_hexagon_rule():
    rec = hexagon_rule(dihedral(6))
    assert rec["perimeter"] == pytest.approx(2 * math.pi) and len(rec["darts"]) == 6
    assert hexagon_rule(dihedral(4)) is None


def test_eliminate_mixed(fcc, hcp):
    octa, _ = from_face_cycles(OCTAHEDRON)
    fates = eliminate([("fcc", fcc.hypermap), ("hcp", hcp.hypermap),
                       ("hex", dihedral(6)), ("octa", octa)])
    assert [f.fate for f in fates] == ["survivor", "survivor", "hexagon-eliminated", "lp-infeasible"]
    assert fate_counts(fates) == {"hexagon-eliminated": 1, "lp-infeasible": 1, "survivor": 2}
    for f in fates[:2]:
        assert f.detail["witness_valid"] and f.detail["robust"]
    assert fates[3].detail["certificate_valid"]
    assert fates[3].detail["certificate"]
    assert all(r["tag"] == "node-sum" for r in fates[3].detail["certificate"])
