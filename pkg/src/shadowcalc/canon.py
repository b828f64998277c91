"""Isomorphism of shadows as cell complexes with gleams.

A shadow is translated to a colored flag graph (cells, edge-ends, wings,
passes and circuit-adjacency links); two shadows are isomorphic exactly
when the flag graphs admit a color-preserving graph isomorphism.  Vertex
numberings, wing indices, circuit base points and circuit directions are
deliberately not encoded, since they are presentation artifacts.

Used by tests only; color refinement plus backtracking is fine at corpus
sizes (well under a thousand cells).
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from .poly import Shadow, entry_end, exit_end


def _flag_graph(sh: Shadow, ignore_gleams: bool = False):
    """Returns (colors, adjacency) with integer node ids."""
    nodes: List[Tuple] = []
    index: Dict[Tuple, int] = {}

    def add(key, color):
        index[key] = len(nodes)
        nodes.append(color)

    for vid in sorted(sh.vertices):
        add(("V", vid), "V")
    for nid in sorted(sh.nodes):
        add(("N", nid), f"N{len(sh.nodes[nid].ends)}")
    for eid in sorted(sh.edges):
        e = sh.edges[eid]
        add(("E", eid), f"E:{e.kind}:{e.color or '.'}")
        if e.kind == "interval":
            add(("EE", eid, 0), "EE")
            add(("EE", eid, 1), "EE")
        for w in range(e.n_wings):
            add(("W", eid, w), "W")
    for rid in sorted(sh.regions):
        r = sh.regions[rid]
        gl = "x" if ignore_gleams else (
            "none" if r.gleam is None else str(r.gleam.twice))
        add(("R", rid), f"R:{'or' if r.orientable else 'nor'}:{r.genus}:"
                        f"{len(r.circuits)}:{gl}")
        for ci, circ in enumerate(r.circuits):
            for pi in range(len(circ)):
                add(("P", rid, ci, pi), "P")
                add(("D", rid, ci, pi, 0), "D")  # entry dart
                add(("D", rid, ci, pi, 1), "D")  # exit dart

    adj: List[set] = [set() for _ in nodes]

    def link(a, b):
        ia, ib = index[a], index[b]
        adj[ia].add(ib)
        adj[ib].add(ia)

    for vid in sorted(sh.vertices):
        for eid, end in sh.vertices[vid].ends:
            if ("EE", eid, end) in index:
                link(("V", vid), ("EE", eid, end))
    for nid in sorted(sh.nodes):
        for eid, end in sh.nodes[nid].ends:
            if ("EE", eid, end) in index:
                link(("N", nid), ("EE", eid, end))
    for eid in sorted(sh.edges):
        e = sh.edges[eid]
        if e.kind == "interval":
            link(("E", eid), ("EE", eid, 0))
            link(("E", eid), ("EE", eid, 1))
        for w in range(e.n_wings):
            link(("E", eid), ("W", eid, w))
    for rid in sorted(sh.regions):
        r = sh.regions[rid]
        for ci, circ in enumerate(r.circuits):
            n = len(circ)
            for pi, p in enumerate(circ):
                pkey = ("P", rid, ci, pi)
                link(pkey, ("R", rid))
                if ("W", p.edge, p.wing) in index:
                    link(pkey, ("W", p.edge, p.wing))
                d_in = ("D", rid, ci, pi, 0)
                d_out = ("D", rid, ci, pi, 1)
                link(pkey, d_in)
                link(pkey, d_out)
                if sh.edges[p.edge].kind == "interval":
                    link(d_in, ("EE", p.edge, entry_end(p)))
                    link(d_out, ("EE", p.edge, exit_end(p)))
                # circuit adjacency: exit dart meets the next entry dart
                link(d_out, ("D", rid, ci, (pi + 1) % n, 0))
    return nodes, [sorted(s) for s in adj]


def _refine_joint(colors_a: List, adj_a, colors_b: List, adj_b):
    """Color-refine two graphs with one shared palette."""
    na = len(colors_a)
    colors = [str(c) for c in colors_a] + [str(c) for c in colors_b]
    adj = [list(s) for s in adj_a] + [[na + j for j in s] for s in adj_b]
    palette = {c: i for i, c in enumerate(sorted(set(colors)))}
    cur = [palette[c] for c in colors]
    while True:
        sig = [(cur[i], tuple(sorted(cur[j] for j in adj[i])))
               for i in range(len(cur))]
        palette = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [palette[s] for s in sig]
        if new == cur:
            return cur[:na], cur[na:]
        cur = new


def _refine(colors: List, adj: List[List[int]]) -> List[int]:
    out, _ = _refine_joint(colors, adj, [], [])
    return out


def signature(sh: Shadow) -> Tuple:
    """A cheap isomorphism invariant: histogram of stable refined colors
    (comparable across shadows; digests keep the colors fixed-width)."""
    import hashlib

    def digest(s: str) -> str:
        return hashlib.md5(s.encode()).hexdigest()[:16]

    colors, adj = _flag_graph(sh)
    cur = [digest(str(c)) for c in colors]
    classes = len(set(cur))
    for _round in range(len(cur) + 1):
        cur = [digest("|".join([cur[i]] + sorted(cur[j] for j in adj[i])))
               for i in range(len(cur))]
        now = len(set(cur))
        if now == classes:
            break
        classes = now
    hist: Dict[str, int] = {}
    for c in cur:
        hist[c] = hist.get(c, 0) + 1
    return tuple(sorted(hist.items()))


def is_isomorphic(a: Shadow, b: Shadow, ignore_gleams: bool = False) -> bool:
    ca, adja = _flag_graph(a, ignore_gleams)
    cb, adjb = _flag_graph(b, ignore_gleams)
    if len(ca) != len(cb):
        return False
    ra, rb = _refine_joint(ca, adja, cb, adjb)
    if sorted(ra) != sorted(rb):
        return False
    n = len(ca)
    class_size: Dict[int, int] = {}
    for c in ra:
        class_size[c] = class_size.get(c, 0) + 1
    # connected search order: always extend next to an already-placed node
    order: List[int] = []
    placed = set()
    while len(order) < n:
        frontier = [i for i in range(n) if i not in placed and
                    any(k in placed for k in adja[i])]
        pool = frontier if frontier else [i for i in range(n)
                                          if i not in placed]
        nxt = min(pool, key=lambda i: (class_size[ra[i]], -len(adja[i]), i))
        order.append(nxt)
        placed.add(nxt)

    by_color: Dict[int, List[int]] = {}
    for j in range(n):
        by_color.setdefault(rb[j], []).append(j)
    adjb_sets = [set(s) for s in adjb]
    adja_sets = [set(s) for s in adja]
    mapping: Dict[int, int] = {}
    reverse: Dict[int, int] = {}

    def feasible(i, j):
        for k in adja[i]:
            if k in mapping and mapping[k] not in adjb_sets[j]:
                return False
        for k in adjb[j]:
            if k in reverse and reverse[k] not in adja_sets[i]:
                return False
        return True

    def search(pos):
        if pos == n:
            return True
        i = order[pos]
        for j in by_color.get(ra[i], ()):
            if j in reverse or not feasible(i, j):
                continue
            mapping[i] = j
            reverse[j] = i
            if search(pos + 1):
                return True
            del mapping[i]
            del reverse[j]
        return False

    return search(0)
