"""DAGs standing for posets: closure, reduction, downsets, isomorphism, and
verification that a constructed instance realizes a poset.

Vertices are 1..p throughout, matching the file format.
"""
from __future__ import annotations

import re
from typing import Iterable, Mapping, Optional

from .errors import CapExceededError, ParseError, ValidationError


class Dag:
    """A directed acyclic graph on vertices 1..p with optional edge colors."""

    def __init__(
        self,
        p: int,
        edges: Iterable[tuple[int, int]],
        colors: Optional[Mapping[tuple[int, int], int]] = None,
    ):
        self.p = int(p)
        self.edges = frozenset((int(u), int(v)) for u, v in edges)
        self.colors = dict(colors) if colors else {}
        if self.p < 0:
            raise ValidationError("negative vertex count")
        for u, v in self.edges:
            if not (1 <= u <= self.p and 1 <= v <= self.p):
                raise ValidationError(f"edge ({u},{v}) out of range 1..{self.p}")
            if u == v:
                raise ValidationError(f"self-loop at {u}")
        for e in self.colors:
            if e not in self.edges:
                raise ValidationError(f"color assigned to missing edge {e}")
        self.out_adj: dict[int, tuple[int, ...]] = {v: () for v in self.vertices()}
        self.in_adj: dict[int, tuple[int, ...]] = {v: () for v in self.vertices()}
        outs: dict[int, list[int]] = {}
        ins: dict[int, list[int]] = {}
        for u, v in sorted(self.edges):
            outs.setdefault(u, []).append(v)
            ins.setdefault(v, []).append(u)
        for u, vs in outs.items():
            self.out_adj[u] = tuple(vs)
        for v, us in ins.items():
            self.in_adj[v] = tuple(us)
        self._check_acyclic()

    def vertices(self) -> range:
        return range(1, self.p + 1)

    def _check_acyclic(self) -> None:
        indeg = {v: len(self.in_adj[v]) for v in self.vertices()}
        stack = [v for v in self.vertices() if indeg[v] == 0]
        seen = 0
        while stack:
            u = stack.pop()
            seen += 1
            for v in self.out_adj[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    stack.append(v)
        if seen != self.p:
            raise ValidationError("graph contains a cycle")

    def topological_order(self) -> list[int]:
        """Deterministic topological order, smallest available vertex first."""
        import heapq

        indeg = {v: len(self.in_adj[v]) for v in self.vertices()}
        heap = [v for v in self.vertices() if indeg[v] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            u = heapq.heappop(heap)
            order.append(u)
            for v in self.out_adj[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    heapq.heappush(heap, v)
        return order

    def __eq__(self, other) -> bool:
        return isinstance(other, Dag) and self.p == other.p and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.p, self.edges))

    def __repr__(self) -> str:
        return f"Dag(p={self.p}, q={len(self.edges)})"


def reachable_from(g: Dag, v: int) -> set[int]:
    """Vertices reachable from v, including v itself."""
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for x in g.out_adj[u]:
            if x not in seen:
                seen.add(x)
                stack.append(x)
    return seen


def transitive_closure(g: Dag) -> Dag:
    edges = set()
    for v in g.vertices():
        for x in reachable_from(g, v):
            if x != v:
                edges.add((v, x))
    return Dag(g.p, edges)


def transitive_reduction(g: Dag) -> Dag:
    """The unique minimal edge set with the same closure (unique for DAGs)."""
    closure_sets = {v: reachable_from(g, v) - {v} for v in g.vertices()}
    edges = set()
    for u, v in g.edges:
        if not any(v in closure_sets[w] for w in closure_sets[u] if w != v):
            edges.add((u, v))
    return Dag(g.p, edges)


def is_downset(g: Dag, zs: Iterable[int]) -> bool:
    """True when zs is ancestor-closed in g."""
    z = set(zs)
    if not z <= set(g.vertices()):
        return False
    return all(u in z for u, v in g.edges if v in z)


def enumerate_downsets_bruteforce(g: Dag, max_p: int = 20) -> list[frozenset[int]]:
    """All downsets, by DFS over the downset lattice. Oracle-grade; the cap
    guards against runaway output since there can be 2^p downsets.
    """
    if g.p > max_p:
        raise CapExceededError(f"{g.p} vertices exceeds cap {max_p}")
    start: frozenset[int] = frozenset()
    seen = {start}
    stack = [start]
    while stack:
        z = stack.pop()
        for v in g.vertices():
            if v in z:
                continue
            if all(u in z for u in g.in_adj[v]):
                nz = z | {v}
                if nz not in seen:
                    seen.add(nz)
                    stack.append(nz)
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def poset_isomorphic_small(p_dag: Dag, q_dag: Dag, max_p: int = 10) -> bool:
    """Closure isomorphism test by backtracking with degree/level pruning."""
    if p_dag.p > max_p or q_dag.p > max_p:
        raise CapExceededError(f"isomorphism test capped at {max_p} vertices")
    if p_dag.p != q_dag.p:
        return False
    a = transitive_closure(p_dag)
    b = transitive_closure(q_dag)
    if len(a.edges) != len(b.edges):
        return False

    def signature(g: Dag) -> dict[int, tuple[int, int]]:
        return {v: (len(g.in_adj[v]), len(g.out_adj[v])) for v in g.vertices()}

    siga, sigb = signature(a), signature(b)
    if sorted(siga.values()) != sorted(sigb.values()):
        return False
    verts_a = sorted(a.vertices(), key=lambda v: siga[v])
    candidates = {v: [w for w in b.vertices() if sigb[w] == siga[v]] for v in verts_a}

    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i == len(verts_a):
            return True
        v = verts_a[i]
        for w in candidates[v]:
            if w in used:
                continue
            ok = True
            for v2, w2 in mapping.items():
                if ((v, v2) in a.edges) != ((w, w2) in b.edges):
                    ok = False
                    break
                if ((v2, v) in a.edges) != ((w2, w) in b.edges):
                    ok = False
                    break
            if ok:
                mapping[v] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    return extend(0)


_LABEL_RE = re.compile(r"^m\[(\d+),(\d+)\]$")


def check_realization(p_dag: Dag, inst) -> bool:
    """True when the instance's rotation poset is isomorphic to the closure of
    p_dag via the vertex embedded in the construction labels ``m[c,v]``.
    """
    from .rotations import rotation_digraph

    dg = rotation_digraph(inst)
    vertex_of_rotation: dict[int, int] = {}
    rotation_of_vertex: dict[int, int] = {}
    for rho in dg.rotations:
        vs = set()
        for m, _w in rho.pairs:
            match = _LABEL_RE.match(inst.men_labels[m])
            if match is None:
                raise ValidationError(
                    f"agent {inst.men_labels[m]!r} carries no construction label"
                )
            vs.add(int(match.group(2)))
        if len(vs) != 1:
            return False
        (v,) = vs
        if v in rotation_of_vertex or not 1 <= v <= p_dag.p:
            return False
        vertex_of_rotation[rho.id] = v
        rotation_of_vertex[v] = rho.id
    if len(dg.rotations) != p_dag.p:
        return False
    want = transitive_closure(p_dag).edges
    # dag() vertices are rotation ids shifted by +1
    got = {
        (vertex_of_rotation[a - 1], vertex_of_rotation[b - 1])
        for a, b in transitive_closure(dg.dag()).edges
    }
    return got == want


def parse_dag(text: str) -> Dag:
    """Parse the DAG file format: ``DAG <p> <q>`` then q lines ``u v [color]``."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ParseError("empty DAG file")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "DAG":
        raise ParseError(f"bad header: {lines[0]!r}")
    try:
        p, q = int(header[1]), int(header[2])
    except ValueError:
        raise ParseError(f"bad header counts: {lines[0]!r}") from None
    body = lines[1:]
    if len(body) != q:
        raise ParseError(f"expected {q} edge lines, found {len(body)}")
    edges = []
    colors = {}
    for line in body:
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"bad edge line: {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"bad edge line: {line!r}") from None
        edges.append((u, v))
        if len(parts) == 3:
            try:
                c = int(parts[2])
            except ValueError:
                raise ParseError(f"bad color in line: {line!r}") from None
            if c <= 0:
                raise ParseError(f"colors must be positive: {line!r}")
            colors[(u, v)] = c
    if len(set(edges)) != len(edges):
        raise ParseError("duplicate edge")
    try:
        return Dag(p, edges, colors)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def format_dag(g: Dag) -> str:
    out = [f"DAG {g.p} {len(g.edges)}"]
    for u, v in sorted(g.edges):
        if (u, v) in g.colors:
            out.append(f"{u} {v} {g.colors[(u, v)]}")
        else:
            out.append(f"{u} {v}")
    return "\n".join(out) + "\n"


def dag_to_dot(g: Dag) -> str:
    out = ["digraph dag {"]
    for v in g.vertices():
        out.append(f"  v{v};")
    for u, v in sorted(g.edges):
        if (u, v) in g.colors:
            out.append(f'  v{u} -> v{v} [label="color={g.colors[(u, v)]}"];')
        else:
            out.append(f"  v{u} -> v{v};")
    out.append("}")
    return "\n".join(out) + "\n"
