"""Dart-based hypermaps.

A hypermap is a finite dart set ``{0, ..., D-1}`` with three permutations
``e`` (edge map), ``n`` (node map) and ``f`` (face map) composing to the
identity, ``e(n(f(x))) == x``.  Edges, nodes and faces are the orbits of the
corresponding permutation.

Permutations are stored as tuples; ``p[x]`` is the image of dart ``x``.
Instances are only built through :func:`make_hypermap`, which derives ``f``
from ``e`` and ``n`` so the composition axiom holds by construction.
"""

from __future__ import annotations

import struct
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "HypermapError",
    "NonPermutation",
    "NotPlain",
    "Disconnected",
    "Hypermap",
    "OrbitPartition",
    "StructureReport",
    "CanonicalCode",
    "make_hypermap",
    "dihedral",
    "from_face_cycles",
    "orbits",
    "check_structure",
    "articulation_nodes",
    "opposite",
    "relabel",
    "disjoint_union",
    "canonical_code",
    "is_isomorphic",
    "is_dihedral",
    "node_of_dart",
    "face_node_cycles",
    "to_json",
    "from_json",
    "to_dot",
]


class HypermapError(Exception):
    pass


class NonPermutation(HypermapError, ValueError):
    pass


class NotPlain(HypermapError):
    pass


class Disconnected(HypermapError):
    pass


def _check_perm(p: Sequence[int], size: int, name: str) -> tuple[int, ...]:
    p = tuple(int(x) for x in p)
    if len(p) != size:
        raise NonPermutation(f"{name} has length {len(p)}, expected {size}")
    seen = [False] * size
    for x in p:
        if not 0 <= x < size or seen[x]:
            raise NonPermutation(f"{name} is not a bijection of range({size})")
        seen[x] = True
    return p


def _inverse(p: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


@dataclass(frozen=True)
class Hypermap:
    e: tuple[int, ...]
    n: tuple[int, ...]
    f: tuple[int, ...]

    @property
    def dart_count(self) -> int:
        return len(self.e)

    def __post_init__(self):
        for x in range(len(self.e)):
            if self.e[self.n[self.f[x]]] != x:
                raise HypermapError(f"e∘n∘f fails at dart {x}")


def make_hypermap(dart_count: int, e: Sequence[int], n: Sequence[int]) -> Hypermap:
    """Build a hypermap from its edge and node maps; ``f = n⁻¹∘e⁻¹``."""
    e = _check_perm(e, dart_count, "e")
    n = _check_perm(n, dart_count, "n")
    n_inv, e_inv = _inverse(n), _inverse(e)
    f = tuple(n_inv[e_inv[x]] for x in range(dart_count))
    return Hypermap(e, n, f)


def dihedral(k: int) -> Hypermap:
    """The hypermap Dih_{2k}: left action of the dihedral group on itself.

    Dart ``(i, b)`` (index ``i + k*b``) stands for ``rho^i s^b``; ``f`` is
    left multiplication by the rotation ``rho``, ``n`` by the reflection ``s``
    and ``e`` by ``rho^-1 s``.
    """
    if k < 1:
        raise ValueError("k must be positive")

    def idx(i, b):
        return (i % k) + k * b

    n = [0] * (2 * k)
    e = [0] * (2 * k)
    for b in (0, 1):
        for i in range(k):
            n[idx(i, b)] = idx(-i, 1 - b)
            e[idx(i, b)] = idx(-i - 1, 1 - b)
    return make_hypermap(2 * k, e, n)


def from_face_cycles(cycles: Iterable[Sequence]) -> tuple[Hypermap, list[tuple]]:
    """Plain hypermap whose faces are the given vertex cycles.

    Each directed pair ``(v, w)`` of consecutive vertices in a cycle is a dart;
    ``f`` moves to the next pair of the same cycle and ``e`` reverses the pair.
    Every directed pair must occur exactly once and its reverse must occur too.
    Returns the hypermap and the list of darts as vertex pairs.
    """
    darts: list[tuple] = []
    index: dict[tuple, int] = {}
    succ: list[int] = []
    for cyc in cycles:
        cyc = list(cyc)
        k = len(cyc)
        start = len(darts)
        for i in range(k):
            d = (cyc[i], cyc[(i + 1) % k])
            if d in index:
                raise ValueError(f"dart {d} occurs twice")
            index[d] = len(darts)
            darts.append(d)
            succ.append(start + (i + 1) % k)
    e = []
    for v, w in darts:
        if (w, v) not in index:
            raise ValueError(f"dart {(v, w)} has no reverse")
        e.append(index[(w, v)])
    # e n f = I  =>  n = e⁻¹ f⁻¹
    f_inv = _inverse(succ)
    n = [e[f_inv[x]] for x in range(len(darts))]
    return make_hypermap(len(darts), e, n), darts


@dataclass(frozen=True)
class OrbitPartition:
    kind: str
    classes: tuple[tuple[int, ...], ...]

    @property
    def count(self) -> int:
        return len(self.classes)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def index(self) -> list[int]:
        """Map dart -> class number."""
        out = [0] * sum(len(c) for c in self.classes)
        for i, c in enumerate(self.classes):
            for x in c:
                out[x] = i
        return out


def _cycles(p: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    seen = [False] * len(p)
    out = []
    for x in range(len(p)):
        if seen[x]:
            continue
        cyc = []
        y = x
        while not seen[y]:
            seen[y] = True
            cyc.append(y)
            y = p[y]
        out.append(tuple(cyc))
    return tuple(out)


def orbits(h: Hypermap, kind: str) -> OrbitPartition:
    """Orbits of the edge, node or face map; each class in cyclic order."""
    try:
        p = {"edge": h.e, "node": h.n, "face": h.f}[kind]
    except KeyError:
        raise ValueError(f"unknown orbit kind {kind!r}") from None
    return OrbitPartition(kind, _cycles(p))


def node_of_dart(h: Hypermap) -> list[int]:
    return orbits(h, "node").index()


def _components(h: Hypermap) -> int:
    seen = [False] * h.dart_count
    count = 0
    for s in range(h.dart_count):
        if seen[s]:
            continue
        count += 1
        seen[s] = True
        stack = [s]
        while stack:
            x = stack.pop()
            for y in (h.e[x], h.n[x], h.f[x]):
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
    return count


def _node_graph(h: Hypermap) -> tuple[int, list[set[int]]]:
    node = node_of_dart(h)
    m = max(node) + 1 if node else 0
    adj: list[set[int]] = [set() for _ in range(m)]
    for x in range(h.dart_count):
        a, b = node[x], node[h.e[x]]
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    return m, adj


def articulation_nodes(h: Hypermap) -> set[int]:
    """Nodes whose deletion disconnects the underlying node-edge graph."""
    m, adj = _node_graph(h)
    disc = [-1] * m
    low = [0] * m
    cut: set[int] = set()
    timer = 0
    for root in range(m):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        children = 0
        stack = [(root, -1, iter(sorted(adj[root])))]
        while stack:
            v, parent, it = stack[-1]
            for w in it:
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    if v == root:
                        children += 1
                    stack.append((w, v, iter(sorted(adj[w]))))
                    break
                if w != parent:
                    low[v] = min(low[v], disc[w])
            else:
                stack.pop()
                if parent != -1:
                    low[parent] = min(low[parent], low[v])
                    if parent != root and low[v] >= disc[parent]:
                        cut.add(parent)
        if children > 1:
            cut.add(root)
    return cut


@dataclass(frozen=True)
class StructureReport:
    plain: bool
    planar: bool
    connected: bool
    biconnected: bool
    nondegenerate: bool
    no_loops: bool
    no_double_join: bool


def check_structure(h: Hypermap) -> StructureReport:
    D = h.dart_count
    plain = all(h.e[h.e[x]] == x for x in range(D))
    connected = D > 0 and _components(h) == 1
    counts = sum(orbits(h, k).count for k in ("edge", "node", "face"))
    # Euler's relation is only meaningful for connected hypermaps
    planar = connected and counts == D + 2
    biconnected = connected and not articulation_nodes(h)
    nondegenerate = all(h.e[x] != x for x in range(D))
    node = node_of_dart(h)
    no_loops = all(node[x] != node[h.e[x]] for x in range(D))
    seen_pairs: set[frozenset] = set()
    no_double_join = True
    for cls in orbits(h, "edge").classes:
        nodes = frozenset(node[x] for x in cls)
        if len(nodes) != 2:
            continue
        if nodes in seen_pairs:
            no_double_join = False
            break
        seen_pairs.add(nodes)
    return StructureReport(plain, planar, connected, biconnected,
                           nondegenerate, no_loops, no_double_join)


def opposite(h: Hypermap) -> Hypermap:
    """Mirror image ``(D, e, n⁻¹, n∘e)``; reverses every node's cyclic order."""
    if any(h.e[h.e[x]] != x for x in range(h.dart_count)):
        raise NotPlain("opposite requires e to be an involution")
    return make_hypermap(h.dart_count, h.e, _inverse(h.n))


def relabel(h: Hypermap, perm: Sequence[int]) -> Hypermap:
    """Isomorphic copy in which dart ``x`` is renamed ``perm[x]``."""
    D = h.dart_count
    perm = _check_perm(perm, D, "perm")
    e = [0] * D
    n = [0] * D
    for x in range(D):
        e[perm[x]] = perm[h.e[x]]
        n[perm[x]] = perm[h.n[x]]
    return make_hypermap(D, e, n)


def disjoint_union(*maps: Hypermap) -> Hypermap:
    e: list[int] = []
    n: list[int] = []
    for h in maps:
        off = len(e)
        e.extend(off + y for y in h.e)
        n.extend(off + y for y in h.n)
    return make_hypermap(len(e), e, n)


@dataclass(frozen=True, order=True)
class CanonicalCode:
    data: bytes
    mirror_folded: bool = False

    def hex(self) -> str:
        return self.data.hex()


def _bfs_code(e: Sequence[int], n: Sequence[int], start: int, best: list[int] | None):
    """Code of the traversal rooted at ``start``; ``None`` once it exceeds ``best``."""
    D = len(e)
    label = [-1] * D
    label[start] = 0
    order = [start]
    code: list[int] = []
    nxt = 1
    pos = 0
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for p in (e, n):
            y = p[x]
            if label[y] < 0:
                label[y] = nxt
                nxt += 1
                order.append(y)
            c = label[y]
            if best is not None:
                b = best[pos]
                if c > b:
                    return None
                if c < b:
                    best = None
            code.append(c)
            pos += 1
    return code


def _start_darts(h: Hypermap) -> list[int]:
    # isomorphism-invariant preselection of roots: keep darts with the
    # lexicographically largest (face size, node size) signature
    fsize = [0] * h.dart_count
    for c in orbits(h, "face").classes:
        for x in c:
            fsize[x] = len(c)
    nsize = [0] * h.dart_count
    for c in orbits(h, "node").classes:
        for x in c:
            nsize[x] = len(c)
    sig = [(fsize[x], nsize[x]) for x in range(h.dart_count)]
    top = max(sig)
    return [x for x in range(h.dart_count) if sig[x] == top]


def _min_code(h: Hypermap) -> list[int]:
    best = None
    for s in _start_darts(h):
        c = _bfs_code(h.e, h.n, s, best)
        if c is not None:
            best = c
    return best


def canonical_code(h: Hypermap, fold_mirror: bool = False) -> CanonicalCode:
    """Relabeling-invariant code; equal codes iff isomorphic hypermaps.

    The code is the minimum over root darts of a breadth-first traversal
    that follows ``e`` then ``n`` and records the labels met.  With
    ``fold_mirror`` the minimum also ranges over the opposite hypermap.
    """
    if h.dart_count == 0 or _components(h) != 1:
        raise Disconnected("canonical_code needs a connected hypermap")
    code = _min_code(h)
    if fold_mirror:
        code = min(code, _min_code(opposite(h)))
    data = struct.pack(f">I{len(code)}H", h.dart_count, *code)
    return CanonicalCode(data, fold_mirror)


def is_isomorphic(a: Hypermap, b: Hypermap, fold_mirror: bool = False) -> bool:
    if a.dart_count != b.dart_count:
        return False
    return canonical_code(a, fold_mirror) == canonical_code(b, fold_mirror)


def is_dihedral(h: Hypermap) -> int | None:
    """Return ``k`` if ``h`` is isomorphic to Dih_{2k}, otherwise ``None``."""
    D = h.dart_count
    if D == 0 or D % 2 or _components(h) != 1:
        return None
    k = D // 2
    if canonical_code(h) == canonical_code(dihedral(k)):
        return k
    return None


def face_node_cycles(h: Hypermap) -> list[list[int]]:
    node = node_of_dart(h)
    return [[node[x] for x in cls] for cls in orbits(h, "face").classes]


def to_json(h: Hypermap) -> dict:
    return {"dart_count": h.dart_count, "e": list(h.e), "n": list(h.n)}


def from_json(obj: dict) -> Hypermap:
    h = make_hypermap(int(obj["dart_count"]), obj["e"], obj["n"])
    if "f" in obj and list(obj["f"]) != list(h.f):
        raise HypermapError("stored f disagrees with n⁻¹∘e⁻¹")
    return h


def to_dot(h: Hypermap, name: str = "hypermap") -> str:
    """Graphviz source for the node-edge graph, edges labelled by their faces."""
    node = node_of_dart(h)
    face = orbits(h, "face").index()
    fsize = [len(c) for c in orbits(h, "face").classes]
    lines = [f"graph {name} {{"]
    for i, cyc in enumerate(face_node_cycles(h)):
        lines.append(f"  // face {i} (size {fsize[i]}): {' '.join(map(str, cyc))}")
    for v in sorted(set(node)):
        lines.append(f"  n{v};")
    for cls in orbits(h, "edge").classes:
        x = cls[0]
        y = h.e[x]
        faces = sorted({face[x], face[y]})
        lines.append(f'  n{node[x]} -- n{node[y]} [label="F{"/F".join(map(str, faces))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
