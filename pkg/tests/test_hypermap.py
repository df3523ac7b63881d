import random

import pytest
from hypothesis import given, strategies as st

from kissing.hypermap import (
    Disconnected, HypermapError, NonPermutation, NotPlain, articulation_nodes,
    canonical_code, check_structure, dihedral, disjoint_union, face_node_cycles,
    from_face_cycles, from_json, is_dihedral, is_isomorphic, make_hypermap,
    node_of_dart, opposite, orbits, relabel, to_dot, to_json,
)


def perms(size):
    return st.permutations(list(range(size)))


@st.composite
def hypermaps(draw, max_darts=12):
    D = draw(st.integers(1, max_darts))
    return make_hypermap(D, draw(perms(D)), draw(perms(D)))


@st.composite
def plain_hypermaps(draw, max_pairs=30):
    k = draw(st.integers(1, max_pairs))
    order = draw(perms(2 * k))
    e = [0] * (2 * k)
    for i in range(k):
        a, b = order[2 * i], order[2 * i + 1]
        e[a], e[b] = b, a
    return make_hypermap(2 * k, e, draw(perms(2 * k)))


def compose(p, q):
    return [p[q[x]] for x in range(len(q))]


@given(hypermaps())
def test_axiom_holds(h):
    for x in range(h.dart_count):
        assert h.e[h.n[h.f[x]]] == x


@given(hypermaps())
def test_orbits_partition_darts(h):
    for kind in ("edge", "node", "face"):
        part = orbits(h, kind)
        flat = sorted(x for c in part.classes for x in c)
        assert flat == list(range(h.dart_count))
        idx = part.index()
        assert all(idx[x] == i for i, c in enumerate(part.classes) for x in c)


def test_rejects_non_permutation():
    with pytest.raises(NonPermutation):
        make_hypermap(3, [0, 0, 1], [0, 1, 2])


def test_axiom_violation_detected():
    from kissing.hypermap import Hypermap
    with pytest.raises(HypermapError):
        Hypermap((1, 0), (0, 1), (0, 1))


def test_two_dart_example():
    h = make_hypermap(2, [1, 0], [1, 0])
    assert h.f == (0, 1)
    assert [orbits(h, k).count for k in ("edge", "node", "face")] == [1, 1, 2]


def test_dih2_is_dihedral_one():
    h = make_hypermap(2, [1, 0], [1, 0])
    assert is_dihedral(h) == 1
    assert is_dihedral(make_hypermap(2, [1, 0], [0, 1])) is None


@pytest.mark.parametrize("k", range(1, 9))
def test_dihedral_family(k):
    h = dihedral(k)
    assert h.dart_count == 2 * k
    assert orbits(h, "face").sizes() == [k, k]
    assert sorted(orbits(h, "node").sizes()) == [2] * k
    assert sorted(orbits(h, "edge").sizes()) == [2] * k
    assert is_dihedral(h) == k
    assert is_dihedral(relabel(h, random.Random(k).sample(range(2 * k), 2 * k))) == k


def test_triangle_from_cycles():
    h, darts = from_face_cycles([(0, 1, 2), (0, 2, 1)])
    s = check_structure(h)
    assert s.plain and s.planar and s.biconnected and s.no_loops and s.no_double_join
    assert is_dihedral(h) == 3
    assert sorted(map(sorted, face_node_cycles(h))) == [[0, 1, 2], [0, 1, 2]]


def test_cycles_must_pair_up():
    with pytest.raises(ValueError):
        from_face_cycles([(0, 1, 2)])


def test_fcc_and_hcp_codes_differ(fcc, hcp):
    a, b = fcc.hypermap, hcp.hypermap
    assert a.dart_count == b.dart_count == 48
    assert sorted(orbits(a, "face").sizes()) == sorted(orbits(b, "face").sizes())
    assert canonical_code(a) != canonical_code(b)
    assert canonical_code(a, True) != canonical_code(b, True)
    assert not is_isomorphic(a, b, fold_mirror=True)


@pytest.mark.parametrize("which", ["fcc", "hcp"])
def test_code_invariant_under_many_relabelings(which, request):
    h = request.getfixturevalue(which).hypermap
    ref = canonical_code(h)
    rng = random.Random(2024)
    D = h.dart_count
    for _ in range(1000):
        assert canonical_code(relabel(h, rng.sample(range(D), D))) == ref


@given(plain_hypermaps(max_pairs=8), st.randoms(use_true_random=False))
def test_code_relabel_invariant(h, rnd):
    if not check_structure(h).connected:
        return
    perm = list(range(h.dart_count))
    rnd.shuffle(perm)
    g = relabel(h, perm)
    assert canonical_code(g) == canonical_code(h)
    assert canonical_code(g, True) == canonical_code(h, True)


@given(plain_hypermaps(max_pairs=6), plain_hypermaps(max_pairs=6))
def test_code_equality_implies_isomorphism(a, b):
    # brute-force check of completeness: equal codes must come with a dart bijection
    if a.dart_count != b.dart_count:
        return
    if not (check_structure(a).connected and check_structure(b).connected):
        return
    iso = _find_iso(a, b)
    assert (canonical_code(a) == canonical_code(b)) == (iso is not None)


def _find_iso(a, b):
    # a connected hypermap isomorphism is fixed by the image of dart 0
    D = a.dart_count
    for t in range(D):
        m = {0: t}
        stack = [0]
        ok = True
        while stack and ok:
            x = stack.pop()
            for pa, pb in ((a.e, b.e), (a.n, b.n)):
                y, z = pa[x], pb[m[x]]
                if y in m:
                    ok = m[y] == z
                    if not ok:
                        break
                else:
                    m[y] = z
                    stack.append(y)
        if ok and len(set(m.values())) == D:
            return m
    return None


@given(plain_hypermaps())
def test_opposite_is_involution(h):
    assert opposite(opposite(h)) == h
    assert orbits(opposite(h), "face").sizes() != [] or h.dart_count == 0
    assert sorted(orbits(opposite(h), "node").sizes()) == sorted(orbits(h, "node").sizes())
    assert sorted(orbits(opposite(h), "face").sizes()) == sorted(orbits(h, "face").sizes())


def test_opposite_requires_plain():
    with pytest.raises(NotPlain):
        opposite(make_hypermap(3, [1, 2, 0], [0, 1, 2]))


def test_fold_mirror_identifies_mirror_images(fcc):
    h = fcc.hypermap
    assert canonical_code(opposite(h), True) == canonical_code(h, True)


def test_disconnected_code_raises():
    with pytest.raises(Disconnected):
        canonical_code(disjoint_union(dihedral(2), dihedral(3)))


def test_disjoint_union_not_connected():
    s = check_structure(disjoint_union(dihedral(3), dihedral(3)))
    assert not s.connected and not s.planar


def _brute_articulation(h):
    node = node_of_dart(h)
    m = max(node) + 1
    adj = [set() for _ in range(m)]
    for x in range(h.dart_count):
        a, b = node[x], node[h.e[x]]
        if a != b:
            adj[a].add(b)
            adj[b].add(a)

    def comps(skip):
        seen = {skip}
        count = 0
        for s in range(m):
            if s in seen:
                continue
            count += 1
            seen.add(s)
            stack = [s]
            while stack:
                v = stack.pop()
                for w in adj[v] - seen:
                    seen.add(w)
                    stack.append(w)
        return count

    base = comps(-1)
    return {v for v in range(m) if comps(v) > base}


@given(plain_hypermaps(max_pairs=30))
def test_articulation_matches_brute_force(h):
    assert articulation_nodes(h) == _brute_articulation(h)


def test_bowtie_not_biconnected():
    # two triangles sharing node 0; the outer face passes through 0 twice
    h, darts = from_face_cycles([(0, 1, 2), (0, 3, 4), (0, 2, 1, 0, 4, 3)])
    s = check_structure(h)
    assert s.connected and s.planar and not s.biconnected
    node = node_of_dart(h)
    assert orbits(h, "node").count == 5
    assert articulation_nodes(h) == {node[darts.index((0, 1))]}


def test_double_join_detected():
    h = dihedral(2)
    assert not check_structure(h).no_double_join


@given(plain_hypermaps(max_pairs=10))
def test_json_round_trip(h):
    assert from_json(to_json(h)) == h


def test_json_rejects_inconsistent_f():
    obj = to_json(dihedral(3))
    obj["f"] = list(range(6))
    with pytest.raises(HypermapError):
        from_json(obj)


def test_dot_mentions_every_node(fcc):
    text = to_dot(fcc.hypermap)
    assert text.startswith("graph")
    assert all(f"n{v};" in text for v in range(12))
