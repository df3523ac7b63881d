"""Exhaustive, isomorph-free generation of hypermaps with tame contact.

The search grows a plane map one face at a time.  A state holds *final*
faces, which are faces of every completion, and *open* faces, which are
regions still to be subdivided.  Both are vertex cycles with the region on
the left.  The search is seeded with a final face of size ``k`` and the
reversed ``k``-cycle as the only open face; ``k`` is the largest face size
allowed below that seed, so every map is reached from the seed equal to its
largest face.

A step picks an open face ``f`` and a directed edge ``a -> b`` of ``f`` and
tries every final face ``G`` inside ``f`` that contains that edge.  Walking
``G`` from ``b`` back to ``a`` it touches vertices of ``f`` in ``f``'s order,
with zero or more new vertices between consecutive touches.  Each stretch
that is not an edge of ``f`` cuts off a new open face.  Every plane map
containing the current state contains one of the children, which gives
completeness for any deterministic choice of ``f`` and ``a -> b``.

Weights are tracked in integer thousandths, so all pruning is exact.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .hypermap import (CanonicalCode, Hypermap, canonical_code, from_face_cycles,
                       is_isomorphic, opposite, orbits)
from .tame import TameParams, admissible_node_types, is_tame_contact, node_types, tables

__all__ = [
    "EnumConfig",
    "PartialHypermap",
    "SearchBudgetExceeded",
    "SearchMetrics",
    "ClassEntry",
    "ClassificationResult",
    "seeds",
    "extend",
    "enumerate_tame_contact",
    "contains_reference",
    "reference_hypermap",
]


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumConfig:
    node_count: int = 12
    face_min: int = 3
    face_max: int = 8
    node_min: int = 2
    node_max: int = 4
    weights: bool = True
    geometric_prunes: bool = True
    max_expansions: int | None = None
    jobs: int = 1

    def tame_params(self) -> TameParams:
        return TameParams(self.node_count, self.face_min, self.face_max,
                          self.node_min, self.node_max, self.weights)


def _milli(x: Fraction) -> int:
    v = x * 1000
    if v.denominator != 1:
        raise ValueError(f"{x} is not a multiple of 1/1000")
    return int(v)


@dataclass(frozen=True)
class _Weights:
    tgt: int
    d1: tuple[int, ...]            # indexed by face size
    b: dict[tuple[int, int], int]  # only node types (p, q, 0) with b < tgt
    admissible: frozenset

    @classmethod
    def build(cls, face_max: int) -> "_Weights":
        t = tables()
        d1 = tuple(_milli(t.d1(k)) for k in range(face_max + 1))
        special = {pq: _milli(t.b(*pq)) for pq in ((0, 3), (1, 3), (2, 2))}
        adm = frozenset(admissible_node_types().admissible)
        return cls(_milli(t.tgt), d1, special, adm)


@dataclass(frozen=True)
class PartialHypermap:
    """A partially built plane map.

    ``weight_lb`` is the sum of d1 over final faces plus the largest deficit
    ``b(p, q) - Σ d1`` over finished nodes of type ``(p, q, 0)``.  Only the
    largest deficit is added because deficits of different nodes may be
    paid by the same face.
    """

    vertex_count: int
    final_faces: tuple[tuple[int, ...], ...]
    open_faces: tuple[tuple[int, ...], ...]
    adjacency: tuple[int, ...]  # bitmask of neighbours per vertex
    face_max: int
    d1_sum: int = 0
    max_deficit: int = 0

    @property
    def weight_lb(self) -> int:
        return self.d1_sum + self.max_deficit

    @property
    def complete(self) -> bool:
        return not self.open_faces

    def degree(self, v: int) -> int:
        return bin(self.adjacency[v]).count("1")


@dataclass
class SearchMetrics:
    expanded: int = 0
    children: int = 0
    pruned: dict[str, int] = field(default_factory=dict)
    completions: int = 0
    tame_checked: int = 0
    rejected_final: int = 0

    def prune(self, why: str) -> None:
        self.pruned[why] = self.pruned.get(why, 0) + 1

    def merge(self, other: "SearchMetrics") -> None:
        self.expanded += other.expanded
        self.children += other.children
        self.completions += other.completions
        self.tame_checked += other.tame_checked
        self.rejected_final += other.rejected_final
        for k, v in other.pruned.items():
            self.pruned[k] = self.pruned.get(k, 0) + v

    def to_json(self) -> dict:
        return {"expanded": self.expanded, "children": self.children,
                "pruned": dict(sorted(self.pruned.items())),
                "completions": self.completions, "tame_checked": self.tame_checked,
                "rejected_final": self.rejected_final}


def seeds(config: EnumConfig) -> list[PartialHypermap]:
    out = []
    for k in range(config.face_min, config.face_max + 1):
        if k > config.node_count:
            break
        face = tuple(range(k))
        adj = [0] * config.node_count
        for i in range(k):
            adj[i] = (1 << ((i + 1) % k)) | (1 << ((i - 1) % k))
        w = _Weights.build(config.face_max)
        out.append(PartialHypermap(k, (face,), (tuple(reversed(face)),), tuple(adj), k,
                                   d1_sum=w.d1[k] if config.weights else 0))
    return out


def _choose(p: PartialHypermap) -> tuple[int, int]:
    """Open face and position of ``b`` for the next step.

    Picks the most constrained vertex: largest degree, then the smallest
    open face through it, ties broken by lowest labels.
    """
    best = None
    for fi, f in enumerate(p.open_faces):
        for pos, v in enumerate(f):
            key = (-p.degree(v), len(f), v, fi)
            if best is None or key < best[0]:
                best = (key, fi, pos)
    return best[1], best[2]


def _touch_sequences(m: int, budget: int, g_max: int) -> Iterator[tuple[list[int], list[int]]]:
    """Increasing index lists ``0 = i0 < ... < ij = m-1`` with fresh counts.

    ``budget`` caps the number of new vertices, ``g_max`` the face size.
    """
    idx = [0]
    fresh: list[int] = []

    def rec(used: int):
        size = len(idx) + used
        last = idx[-1]
        for c in range(0, min(budget - used, g_max - size) + 1):
            # close the face at m-1
            if last < m - 1 and size + c + 1 <= g_max:
                idx.append(m - 1)
                fresh.append(c)
                yield list(idx), list(fresh)
                idx.pop()
                fresh.pop()
            for nxt in range(last + 1, m - 1):
                if size + c + 1 > g_max - 1:
                    break
                idx.append(nxt)
                fresh.append(c)
                yield from rec(used + c)
                idx.pop()
                fresh.pop()

    yield from rec(0)


def extend(p: PartialHypermap, config: EnumConfig, metrics: SearchMetrics | None = None,
           _w: _Weights | None = None) -> list[PartialHypermap]:
    """All children of ``p`` obtained by adding one final face."""
    metrics = metrics if metrics is not None else SearchMetrics()
    w = _w or _Weights.build(config.face_max)
    if p.complete:
        return []
    if config.weights and p.weight_lb >= w.tgt:
        metrics.prune("weight")
        return []
    fi, pos = _choose(p)
    f0 = p.open_faces[fi]
    m = len(f0)
    f = f0[pos:] + f0[:pos]  # f[0] = b, f[m-1] = a
    others = p.open_faces[:fi] + p.open_faces[fi + 1:]
    on_others = set()
    for g in others:
        on_others.update(g)
    budget = config.node_count - p.vertex_count
    out = []
    for idx, fresh in _touch_sequences(m, budget, p.face_max):
        size = len(idx) + sum(fresh)
        if size < config.face_min:
            continue
        child = _apply(p, f, idx, fresh, others, on_others, config, w, metrics)
        if child is not None:
            out.append(child)
    metrics.children += len(out)
    return out


def _apply(p, f, idx, fresh, others, on_others, config, w, metrics):
    m = len(f)
    adj = list(p.adjacency)
    nv = p.vertex_count
    g_face = []
    new_open = []
    max_deg = config.node_max
    for t in range(len(idx) - 1):
        u, v = f[idx[t]], f[idx[t + 1]]
        c = fresh[t]
        g_face.append(u)
        if c == 0 and idx[t + 1] == idx[t] + 1:
            continue  # existing edge of f
        if c == 0:
            if adj[u] >> v & 1:
                metrics.prune("double-join")
                return None
            adj[u] |= 1 << v
            adj[v] |= 1 << u
            path = []
        else:
            path = list(range(nv, nv + c))
            nv += c
            chain = [u] + path + [v]
            for x, y in zip(chain, chain[1:]):
                adj[x] |= 1 << y
                adj[y] |= 1 << x
            g_face.extend(path)
        new_open.append(tuple(f[idx[t]:idx[t + 1] + 1]) + tuple(reversed(path)))
    g_face.append(f[-1])
    for u in g_face:
        if bin(adj[u]).count("1") > max_deg:
            metrics.prune("degree")
            return None
    # G is listed from b; rotate so it reads a -> b -> ...
    g_face = tuple([g_face[-1]] + g_face[:-1])
    final = p.final_faces + (g_face,)
    open_faces = others + tuple(new_open)
    d1_sum = p.d1_sum + (w.d1[len(g_face)] if config.weights else 0)
    max_def = p.max_deficit
    still_open = set(on_others)
    for g in new_open:
        still_open.update(g)
    for v in f:
        if v in still_open:
            continue
        deg = bin(adj[v]).count("1")
        if deg < config.node_min:
            metrics.prune("degree")
            return None
        sizes = [len(F) for F in final if v in F]
        pq = (sizes.count(3), sizes.count(4))
        r = len(sizes) - pq[0] - pq[1]
        if config.geometric_prunes and (pq[0], pq[1], r) not in w.admissible:
            metrics.prune("node-type")
            return None
        if config.weights and r == 0:
            if pq not in w.b:
                metrics.prune("node-weight")
                return None
            deficit = w.b[pq] - sum(w.d1[k] for k in sizes)
            max_def = max(max_def, deficit)
    if config.weights and d1_sum + max_def >= w.tgt:
        metrics.prune("weight")
        return None
    if not open_faces and nv != config.node_count:
        metrics.prune("node-count")
        return None
    return PartialHypermap(nv, final, open_faces, tuple(adj), p.face_max, d1_sum, max_def)


@dataclass(frozen=True)
class ClassEntry:
    code: CanonicalCode
    hypermap: Hypermap
    face_sizes: dict[int, int]
    node_types: dict[str, int]
    self_mirror: bool

    def to_json(self) -> dict:
        return {"code": self.code.hex(), "face_sizes": {str(k): v for k, v in self.face_sizes.items()},
                "node_types": self.node_types, "self_mirror": self.self_mirror,
                "darts": self.hypermap.dart_count}


@dataclass
class ClassificationResult:
    classes: list[ClassEntry]
    unfolded_count: int
    metrics: SearchMetrics
    seconds: float
    config: EnumConfig

    @property
    def folded_count(self) -> int:
        return len(self.classes)

    def codes(self) -> list[CanonicalCode]:
        return [c.code for c in self.classes]

    def summary(self) -> dict:
        return {"folded_count": self.folded_count, "unfolded_count": self.unfolded_count,
                "classes": [c.to_json() for c in self.classes],
                "metrics": self.metrics.to_json()}


def _entry(h: Hypermap, code: CanonicalCode) -> ClassEntry:
    sizes: dict[int, int] = {}
    for k in orbits(h, "face").sizes():
        sizes[k] = sizes.get(k, 0) + 1
    types: dict[str, int] = {}
    for nt in node_types(h).values():
        key = f"({nt.p},{nt.q},{nt.r})"
        types[key] = types.get(key, 0) + 1
    return ClassEntry(code, h, dict(sorted(sizes.items())), dict(sorted(types.items())),
                      is_isomorphic(h, opposite(h)))


def _search(roots: list[PartialHypermap], config: EnumConfig):
    """Depth-first search below ``roots``.

    Returns a map from folded canonical code to a representative, or to
    ``None`` when that class failed the final tame-contact check.
    """
    metrics = SearchMetrics()
    w = _Weights.build(config.face_max)
    params = config.tame_params()
    found: dict[bytes, Hypermap | None] = {}
    stack = list(reversed(roots))
    while stack:
        p = stack.pop()
        if p.complete:
            metrics.completions += 1
            h, _ = from_face_cycles(p.final_faces)
            key = canonical_code(h, fold_mirror=True).data
            if key in found:
                continue
            metrics.tame_checked += 1
            if is_tame_contact(h, params).tame:
                found[key] = h
            else:
                metrics.rejected_final += 1
                found[key] = None
            continue
        metrics.expanded += 1
        if config.max_expansions is not None and metrics.expanded > config.max_expansions:
            raise SearchBudgetExceeded(f"more than {config.max_expansions} expansions")
        stack.extend(reversed(extend(p, config, metrics, w)))
    return found, metrics


def _search_task(args):
    roots, config = args
    return _search(roots, config)


def enumerate_tame_contact(config: EnumConfig = EnumConfig()) -> ClassificationResult:
    """Every hypermap with tame contact, up to isomorphism and mirror image."""
    start = time.perf_counter()
    w = _Weights.build(config.face_max)
    metrics = SearchMetrics()
    tasks = []
    for s in seeds(config):
        metrics.expanded += 1
        for child in extend(s, config, metrics, w):
            tasks.append(([child], config))
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            parts = list(pool.map(_search_task, tasks))
    else:
        parts = [_search_task(t) for t in tasks]
    folded: dict[bytes, Hypermap] = {}
    for found, m in parts:
        metrics.merge(m)
        for key, h in found.items():
            if h is not None:
                folded.setdefault(key, h)
    entries = [_entry(folded[key], CanonicalCode(key, True)) for key in sorted(folded)]
    unfolded = sum(1 if e.self_mirror else 2 for e in entries)
    return ClassificationResult(entries, unfolded, metrics, time.perf_counter() - start, config)


def reference_hypermap(which: str) -> Hypermap:
    from .fan import build_hypermap, fcc_points, hcp_points

    cfg = {"FCC": fcc_points, "HCP": hcp_points}[which.upper()]()
    return build_hypermap(cfg.fan()).hypermap


def contains_reference(result: ClassificationResult, which: str) -> bool:
    code = canonical_code(reference_hypermap(which), fold_mirror=True)
    return code in set(result.codes())
