"""The local rewrite calculus on shadows.

All moves are pure: they deep-copy the input, rewrite cells and circuits,
re-derive gleam decorations, and re-validate.  Gleam transport follows one
convention throughout: the total gleam over the regions a move touches is
preserved, and a touched region's gleam moves by a half exactly when its
Z/2-gleam changed (anything else would leave an invalid decoration).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .halfint import HalfInt
from .poly import (
    BNode, Edge, Pass, Region, Shadow, ShadowError, Vertex,
    entry_end, exit_end, validate, z2_gleam_direct,
)

ZERO = HalfInt(0)


class MoveError(ShadowError):
    pass


def _rev(p: Pass) -> Pass:
    return Pass(p.edge, p.wing, -p.sign)


def _rev_chain(chain: List[Pass]) -> List[Pass]:
    return [_rev(p) for p in reversed(chain)]


def _assign_wings(sh: Shadow) -> None:
    """Fill wing=None placeholders with fresh slots per edge."""
    used: Dict[str, set] = {}
    for region in sh.regions.values():
        for circ in region.circuits:
            for p in circ:
                if p.wing is not None:
                    used.setdefault(p.edge, set()).add(p.wing)
    for region in sh.regions.values():
        for circ in region.circuits:
            for k, p in enumerate(circ):
                if p.wing is None:
                    w = 0
                    taken = used.setdefault(p.edge, set())
                    while w in taken:
                        w += 1
                    taken.add(w)
                    circ[k] = Pass(p.edge, w, p.sign)
    sh.invalidate()


def _touched_regions(sh: Shadow, edge_ids) -> List[str]:
    eids = set(edge_ids)
    out = []
    for rid in sorted(sh.regions):
        r = sh.regions[rid]
        if any(p.edge in eids for circ in r.circuits for p in circ):
            out.append(rid)
    return out


def _local_gleam_total(sh: Shadow, rids) -> HalfInt:
    total = ZERO
    for rid in rids:
        g = sh.regions[rid].gleam
        if g is not None:
            total = total + g
    return total


def _repair_gleams(sh: Shadow, candidates: List[str],
                   total_before: HalfInt) -> None:
    """Give every touched gleam-carrying region a parity-correct gleam
    while preserving the total over the patch."""
    _assign_wings(sh)
    seen = []
    for rid in dict.fromkeys(candidates):
        r = sh.regions.get(rid)
        if r is None:
            continue
        if not sh.gleam_expected(r):
            r.gleam = None
            continue
        if r.gleam is None:
            r.gleam = ZERO
        seen.append(rid)
    for rid in seen:
        r = sh.regions[rid]
        if not sh.is_internal(r):
            continue
        want = z2_gleam_direct(sh, rid)
        if r.gleam.parity != want:
            bump = HalfInt(-1) if r.gleam.twice > 0 else HalfInt(1)
            r.gleam = r.gleam + bump
    residue = total_before - _local_gleam_total(sh, seen)
    if residue.twice != 0:
        if not residue.is_integer or not seen:
            raise MoveError("gleam transport cannot preserve the patch "
                            "total with consistent parities")
        target = sh.regions[seen[0]]
        target.gleam = target.gleam + residue
    sh.invalidate()


# ---------------------------------------------------------------------------
# 0 -> 2 move
# ---------------------------------------------------------------------------

@dataclass
class Move02Site:
    """Slide the sheet in wing ``slide0`` of the edge under ``pass0``
    along a path in ``region`` from its pass ``pass0`` to its pass
    ``pass1``, across that second edge into the sheet in wing ``into1``.

    ``pass0``/``pass1`` are (circuit index, pass index) into the region's
    circuits.  When both passes lie on one circuit, ``disk_side`` picks
    which chain is cut off as a disk ("forward": the chain after pass0).
    """
    region: str
    pass0: Tuple[int, int]
    pass1: Tuple[int, int]
    slide0: int
    into1: int
    disk_side: str = "forward"


def move_0_2(sh: Shadow, site: Move02Site) -> Shadow:
    out = sh.copy()
    r = out.regions.get(site.region)
    if r is None:
        raise MoveError(f"no region {site.region}")
    c0, i0 = site.pass0
    c1, i1 = site.pass1
    try:
        p0 = r.circuits[c0][i0]
        p1 = r.circuits[c1][i1]
    except IndexError:
        raise MoveError("pass reference out of range") from None
    if (c0, i0) == (c1, i1):
        raise MoveError("path endpoints coincide")
    e0 = out.edges.get(p0.edge)
    e1 = out.edges.get(p1.edge)
    if e0 is None or e1 is None or e0.id == e1.id:
        raise MoveError("path must join two distinct edges")
    if not (e0.is_interior and e1.is_interior):
        raise MoveError("0->2 move needs interior edges")
    if e0.kind != "interval" or e1.kind != "interval":
        raise MoveError("0->2 move supports interval edges only")
    if site.slide0 == p0.wing or not (0 <= site.slide0 < 3):
        raise MoveError(f"slide wing must be a side wing of {e0.id}")
    if site.into1 == p1.wing or not (0 <= site.into1 < 3):
        raise MoveError(f"target wing must be a side wing of {e1.id}")
    wing_q0 = next(w for w in range(3) if w not in (p0.wing, site.slide0))
    wing_r1 = next(w for w in range(3) if w not in (p1.wing, site.into1))

    same_circuit = c0 == c1
    if same_circuit:
        aligned = p0.sign != p1.sign
    else:
        if p1.sign != p0.sign:
            r.circuits[c1] = _rev_chain(r.circuits[c1])
            i1 = len(r.circuits[c1]) - 1 - i1
            p1 = r.circuits[c1][i1]
        aligned = True

    touched = _touched_regions(out, [e0.id, e1.id])
    total_before = _local_gleam_total(out, touched)

    # pieces: e0 -> e0a | tip | e0b ; e1 -> e1a | mid | e1b
    names = {}
    for key in ("e0a", "tip", "e0b", "e1a", "mid", "e1b"):
        nid = out.fresh_id("e")
        out.edges[nid] = Edge(nid, "interval", None)
        names[key] = nid
    _repoint_end(out, e0.id, 0, names["e0a"], 0)
    _repoint_end(out, e0.id, 1, names["e0b"], 1)
    _repoint_end(out, e1.id, 0, names["e1a"], 0)
    _repoint_end(out, e1.id, 1, names["e1b"], 1)
    v0 = out.fresh_id("v")
    out.vertices[v0] = Vertex(v0, tuple())
    v1 = out.fresh_id("v")
    if aligned:
        out.vertices[v0] = Vertex(v0, ((names["e0a"], 1), (names["tip"], 0),
                                       (names["e1a"], 1), (names["mid"], 0)))
        out.vertices[v1] = Vertex(v1, ((names["tip"], 1), (names["e0b"], 0),
                                       (names["mid"], 1), (names["e1b"], 0)))
    else:
        out.vertices[v0] = Vertex(v0, ((names["e0a"], 1), (names["tip"], 0),
                                       (names["e1b"], 0), (names["mid"], 1)))
        out.vertices[v1] = Vertex(v1, ((names["tip"], 1), (names["e0b"], 0),
                                       (names["e1a"], 1), (names["mid"], 0)))

    new_regions = _cut_region(out, r, (c0, i0), (c1, i1), names,
                              site.disk_side, same_circuit)

    roles = {
        (e0.id, site.slide0): ("e0a", "tip", "e0b", 1),
        (e0.id, wing_q0): ("e0a", "mid", "e0b", 1 if aligned else -1),
        (e1.id, site.into1): ("e1a", "tip", "e1b", 1 if aligned else -1),
        (e1.id, wing_r1): ("e1a", "mid", "e1b", 1),
    }
    for region in out.regions.values():
        for ci, circ in enumerate(region.circuits):
            new = []
            for p in circ:
                if p.edge in (e0.id, e1.id):
                    role = roles.get((p.edge, p.wing))
                    if role is None:
                        raise MoveError(
                            f"unconsumed pass {p.format()} on a cut wing")
                    first, midk, last, midsign = role
                    seq = [Pass(names[first], None, 1),
                           Pass(names[midk], None, midsign),
                           Pass(names[last], None, 1)]
                    if p.sign < 0:
                        seq = _rev_chain(seq)
                    new.extend(seq)
                else:
                    new.append(p)
            region.circuits[ci] = new

    bigon_id = out.fresh_id("r")
    out.regions[bigon_id] = Region(
        bigon_id, True, 0, None,
        [[Pass(names["tip"], None, 1),
          Pass(names["mid"], None, -1 if aligned else 1)]])

    del out.edges[e0.id]
    del out.edges[e1.id]
    out.invalidate()
    _repair_gleams(out, [bigon_id] + new_regions + touched, total_before)
    report = validate(out)
    if not report.ok:
        raise MoveError("0->2 move produced an invalid shadow: "
                        + "; ".join(report.violations[:3]))
    return out


def _repoint_end(out: Shadow, old_edge: str, old_end: int,
                 new_edge: str, new_end: int) -> None:
    for holder in list(out.vertices.values()) + list(out.nodes.values()):
        ends = list(holder.ends)
        changed = False
        for k, (eid, end) in enumerate(ends):
            if eid == old_edge and end == old_end:
                ends[k] = (new_edge, new_end)
                changed = True
        if changed:
            holder.ends = tuple(ends)


def _cut_region(out: Shadow, r: Region, ref0, ref1, names,
                disk_side: str, same_circuit: bool) -> List[str]:
    c0, i0 = ref0
    c1, i1 = ref1
    p0 = r.circuits[c0][i0]
    p1 = r.circuits[c1][i1]

    def halves(p: Pass, a_key: str, b_key: str) -> Tuple[Pass, Pass]:
        a = Pass(names[a_key], None, 1)
        b = Pass(names[b_key], None, 1)
        if p.sign > 0:
            return a, b  # front, back
        return _rev(b), _rev(a)

    front0, back0 = halves(p0, "e0a", "e0b")
    front1, back1 = halves(p1, "e1a", "e1b")

    def chain(ci: int, start: int, stop: int) -> List[Pass]:
        circ = r.circuits[ci]
        n = len(circ)
        acc = []
        k = (start + 1) % n
        while k != stop:
            acc.append(circ[k])
            k = (k + 1) % n
        return acc

    if not same_circuit:
        lin0 = [back0] + chain(c0, i0, i0) + [front0]
        lin1 = [back1] + chain(c1, i1, i1) + [front1]
        merged = lin0 + _rev_chain(lin1)
        keep = [circ for k, circ in enumerate(r.circuits)
                if k not in (c0, c1)]
        r.circuits = [merged] + keep
        # joining two boundary circuits along an arc preserves genus
        return []
    fwd = [back0] + chain(c0, i0, i1) + [front1]
    bwd = [back1] + chain(c0, i1, i0) + [front0]
    keep = [circ for k, circ in enumerate(r.circuits) if k != c0]
    disk_chain, rest_chain = (fwd, bwd) if disk_side == "forward" else \
        (bwd, fwd)
    new_id = out.fresh_id("r")
    out.regions[new_id] = Region(new_id, True, 0, None, [disk_chain])
    r.circuits = [rest_chain] + keep
    return [new_id]


# ---------------------------------------------------------------------------
# 3 -> 2 move
# ---------------------------------------------------------------------------

def find_3_2_sites(sh: Shadow) -> List[str]:
    """Regions matching the move's left-hand pattern: a triangle disk over
    three distinct interval edges joining three distinct vertices."""
    out = []
    st = sh.structure()
    if st.problems:
        return []
    for rid in sorted(sh.regions):
        if _match_3_2(sh, st, rid) is not None:
            out.append(rid)
    return out


def _match_3_2(sh: Shadow, st, rid: str):
    r = sh.regions[rid]
    if not r.is_disk() or len(r.circuits) != 1 or len(r.circuits[0]) != 3:
        return None
    circ = r.circuits[0]
    eids = [p.edge for p in circ]
    if len(set(eids)) != 3:
        return None
    if any(not sh.edges[e].is_interior or sh.edges[e].kind != "interval"
           for e in eids):
        return None
    ts = st.circuit_transitions(rid, 0)
    if len(ts) != 3 or any(t.kind != "vertex" for t in ts):
        return None
    verts = {t.site for t in ts}
    if len(verts) != 3:
        return None
    return circ, sorted(verts)


def move_3_2(sh: Shadow, rid: str) -> Shadow:
    """Contract the triangle region ``rid``: three vertices become two
    joined by one new edge; the vertex count drops by exactly one."""
    st = sh.structure()
    if st.problems:
        raise MoveError(f"shadow invalid: {st.problems[0]}")
    matched = _match_3_2(sh, st, rid)
    if matched is None:
        raise MoveError(f"region {rid}: does not match the 3->2 pattern")
    out = sh.copy()
    st = out.structure()
    circ, tri_vertices = _match_3_2(out, st, rid)
    tri_edges = [p.edge for p in circ]

    outers: Dict[str, List[Tuple[str, int]]] = {}
    for vid in tri_vertices:
        v = out.vertices[vid]
        outs = [(eid, end) for (eid, end) in v.ends if eid not in tri_edges]
        if len(outs) != 2:
            raise MoveError(f"vertex {vid}: does not leave two outer ends")
        outers[vid] = outs

    split = _split_outers(out, st, rid, tri_edges, tri_vertices, outers)
    if split is None:
        raise MoveError(
            f"region {rid}: the corner sheets around edge {tri_edges[0]} do "
            f"not close up into the move's right-hand pattern")
    side_a, side_b = split

    touched = _touched_regions(out, tri_edges)
    total_before = _local_gleam_total(out, touched)

    va = out.fresh_id("v")
    out.vertices[va] = Vertex(va, tuple())
    vb = out.fresh_id("v")
    out.vertices[vb] = Vertex(vb, tuple())
    enew = out.fresh_id("e")
    out.edges[enew] = Edge(enew, "interval", None)
    side_of = {ref: va for ref in side_a}
    side_of.update({ref: vb for ref in side_b})
    end_site = dict(st.end_site)

    del out.regions[rid]
    for region in sorted(out.regions.values(), key=lambda x: x.id):
        for ci in range(len(region.circuits)):
            region.circuits[ci] = _rewrite_3_2(
                region.circuits[ci], tri_edges, enew, va,
                side_of, end_site, set(tri_vertices))
    out.vertices[va] = Vertex(va, ((enew, 0),) + tuple(side_a))
    out.vertices[vb] = Vertex(vb, ((enew, 1),) + tuple(side_b))
    for vid in tri_vertices:
        del out.vertices[vid]
    for eid in tri_edges:
        del out.edges[eid]
    out.invalidate()
    _repair_gleams(out, [rid2 for rid2 in touched if rid2 != rid],
                   total_before)
    report = validate(out)
    if not report.ok:
        raise MoveError("3->2 move produced an invalid shadow: "
                        + "; ".join(report.violations[:3]))
    return out


def _split_outers(sh: Shadow, st, rid, tri_edges, tri_vertices, outers):
    """2-color the six outer ends: ends linked by a corner sheet running
    along a triangle edge share a side; the two ends of an outer-to-outer
    corner take opposite sides."""
    links = []
    direct = []
    for t in st.transitions:
        if t.kind != "vertex" or t.site not in tri_vertices:
            continue
        if t.region == rid:
            continue
        from_tri = t.p_from.edge in tri_edges
        to_tri = t.p_to.edge in tri_edges
        if from_tri and to_tri:
            return None
        if not from_tri and not to_tri:
            direct.append(((t.p_from.edge, exit_end(t.p_from)),
                           (t.p_to.edge, entry_end(t.p_to))))
            continue
        circ = sh.regions[t.region].circuits[t.circuit]
        n = len(circ)
        if from_tri:
            outer_ref = (t.p_to.edge, entry_end(t.p_to))
            prev = circ[(t.index - 1) % n]
            other = (prev.edge, exit_end(prev))
        else:
            outer_ref = (t.p_from.edge, exit_end(t.p_from))
            nxt = circ[(t.index + 2) % n]
            other = (nxt.edge, entry_end(nxt))
        links.append((outer_ref, other))

    all_refs = [ref for vid in tri_vertices for ref in outers[vid]]
    if len(set(all_refs)) != 6:
        return None
    color: Dict[Tuple[str, int], int] = {}
    adj: Dict[Tuple[str, int], List[Tuple[Tuple[str, int], int]]] = {}
    for a, b in links:
        adj.setdefault(a, []).append((b, 0))
        adj.setdefault(b, []).append((a, 0))
    for a, b in direct:
        adj.setdefault(a, []).append((b, 1))
        adj.setdefault(b, []).append((a, 1))
    for ref in all_refs:
        if ref in color:
            continue
        color[ref] = 0
        stack = [ref]
        while stack:
            cur = stack.pop()
            for nbr, flip in adj.get(cur, ()):
                want = color[cur] ^ flip
                if nbr not in color:
                    color[nbr] = want
                    stack.append(nbr)
                elif color[nbr] != want:
                    return None
    side_a = [ref for ref in all_refs if color.get(ref) == 0]
    side_b = [ref for ref in all_refs if color.get(ref) == 1]
    if len(side_a) != 3 or len(side_b) != 3:
        return None
    for vid in tri_vertices:
        if {color.get(ref) for ref in outers[vid]} != {0, 1}:
            return None
    return side_a, side_b


def _rewrite_3_2(circ: List[Pass], tri_edges, enew, va, side_of, end_site,
                 tri_vertices) -> List[Pass]:
    out: List[Pass] = []
    n = len(circ)
    for k, p in enumerate(circ):
        if p.edge in tri_edges:
            continue
        out.append(p)
        q = circ[(k + 1) % n]
        if q.edge in tri_edges:
            continue
        s1 = end_site.get((p.edge, exit_end(p)))
        s2 = end_site.get((q.edge, entry_end(q)))
        if not s1 or not s2 or s1[0] != "vertex" or s1[1] not in tri_vertices:
            continue
        if s2[0] != "vertex" or s2[1] != s1[1]:
            continue
        a = side_of.get((p.edge, exit_end(p)))
        b = side_of.get((q.edge, entry_end(q)))
        if a is None or b is None:
            raise MoveError("outer end not tracked; pattern mismatch")
        if a == b:
            continue  # corner stays on one side of the new edge
        out.append(Pass(enew, None, 1 if a == va else -1))
    return out


# ---------------------------------------------------------------------------
# boundary capping
# ---------------------------------------------------------------------------

def cap_boundary(sh: Shadow, boundary_circle: str, gleam: HalfInt) -> Shadow:
    """Glue a disk with the given gleam onto an i- or e-colored circle
    component of the boundary; the capped region absorbs the disk and
    adds its gleam."""
    out = sh.copy()
    e = out.edges.get(boundary_circle)
    if e is None or e.kind != "circle" or e.color not in ("i", "e"):
        raise MoveError(
            f"cap target {boundary_circle} is not an i/e-colored circle")
    owner = None
    for r in sorted(out.regions.values(), key=lambda x: x.id):
        for ci, circ in enumerate(r.circuits):
            if any(p.edge == boundary_circle for p in circ):
                owner = (r, ci, circ)
                break
    if owner is None:
        raise MoveError(f"boundary circle {boundary_circle} carries no region")
    r, ci, circ = owner
    if len(circ) != 1:
        raise MoveError(
            f"boundary circle {boundary_circle} is not a free circuit")
    r.circuits.pop(ci)
    del out.edges[boundary_circle]
    out.invalidate()
    if out.gleam_expected(r):
        base = r.gleam if r.gleam is not None else ZERO
        r.gleam = base + gleam
    else:
        r.gleam = None
    out.invalidate()
    return out


# ---------------------------------------------------------------------------
# false boundary collapse
# ---------------------------------------------------------------------------

@dataclass
class CollapseResult:
    shadow: Optional[Shadow]
    ok: bool
    remnants: List[str]

    def require(self) -> Shadow:
        if not self.ok:
            raise MoveError("collapse needs special-case handling: "
                            + "; ".join(self.remnants))
        return self.shadow


def collapse_false(sh: Shadow, order_seed: int = 0) -> CollapseResult:
    """Iteratively delete regions carrying a false boundary edge, then
    normalize the complex back to a simple polyhedron.  Degenerate
    leftovers are reported, not silently special-cased."""
    out = sh.copy()
    guard = 0
    while True:
        guard += 1
        if guard > 100000:
            return CollapseResult(None, False, ["collapse did not terminate"])
        targets = [rid for rid in out.regions
                   if any(out.edges[p.edge].color == "f"
                          for circ in out.regions[rid].circuits
                          for p in circ)]
        if not targets:
            break
        targets.sort()
        rid = targets[order_seed % len(targets)]
        del out.regions[rid]
        ok, notes = _normalize(out)
        if not ok:
            return CollapseResult(None, False, notes)
    if not out.regions and not out.edges and not out.vertices:
        return CollapseResult(None, False,
                              ["everything collapsed: contractible complex"])
    _assign_wings(out)
    _parity_fix(out)
    report = validate(out)
    if not report.ok:
        return CollapseResult(None, False, report.violations)
    return CollapseResult(out, True, [])


def _parity_fix(sh: Shadow) -> None:
    for r in sorted(sh.regions.values(), key=lambda x: x.id):
        if not sh.gleam_expected(r):
            r.gleam = None
            continue
        if r.gleam is None:
            r.gleam = ZERO
        if not sh.is_internal(r):
            continue
        try:
            z2 = z2_gleam_direct(sh, r.id)
        except ShadowError:
            continue
        if r.gleam.parity != z2:
            step = HalfInt(-1) if r.gleam.twice > 0 else HalfInt(1)
            r.gleam = r.gleam + step
    sh.invalidate()


def _normalize(out: Shadow) -> Tuple[bool, List[str]]:
    for _round in range(100000):
        out.invalidate()
        usage: Dict[str, List[Tuple[str, int, int]]] = {}
        for rid in sorted(out.regions):
            r = out.regions[rid]
            for ci, circ in enumerate(r.circuits):
                for pi, p in enumerate(circ):
                    usage.setdefault(p.edge, []).append((rid, ci, pi))
        acted = False
        for eid in sorted(out.edges):
            e = out.edges[eid]
            used = usage.get(eid, [])
            if not used:
                if e.color in (None, "f"):
                    _detach_edge(out, eid)
                    del out.edges[eid]
                    acted = True
                    break
                return False, [f"stranded boundary edge {eid} "
                               f"(color {e.color})"]
            if e.is_interior and len(used) == 1:
                e.color = "f"
                acted = True
                break
            if e.is_interior and len(used) == 2:
                okd, msg = _dissolve_edge(out, eid, used)
                if not okd:
                    return False, [msg]
                acted = True
                break
        if acted:
            continue
        for vid in sorted(out.vertices):
            v = out.vertices[vid]
            live = [(eid, end) for (eid, end) in v.ends if eid in out.edges]
            singular = [ref for ref in live if out.edges[ref[0]].is_interior]
            if len(live) == 4 and len(singular) == 4:
                continue
            if not live:
                del out.vertices[vid]
                acted = True
                break
            if len(live) == 2 and len(singular) == 2:
                okv, msg = _merge_through_vertex(out, vid, singular)
                if not okv:
                    return False, [msg]
                acted = True
                break
            if len(singular) < len(live):
                colored = [ref for ref in live
                           if not out.edges[ref[0]].is_interior]
                if all(out.edges[ref[0]].color == "f" for ref in colored):
                    continue  # next region deletion resolves it
            return False, [f"vertex {vid}: unresolved local structure "
                           f"({len(live)} ends, {len(singular)} singular)"]
        if acted:
            continue
        for nid in sorted(out.nodes):
            n = out.nodes[nid]
            live = tuple((eid, end) for (eid, end) in n.ends
                         if eid in out.edges)
            if live != n.ends:
                n.ends = live
                acted = True
                break
            if not live:
                del out.nodes[nid]
                acted = True
                break
        if acted:
            continue
        return True, []
    return False, ["normalization did not terminate"]


def _detach_edge(out: Shadow, eid: str) -> None:
    for holder in list(out.vertices.values()) + list(out.nodes.values()):
        if any(e == eid for e, _ in holder.ends):
            holder.ends = tuple((e, k) for (e, k) in holder.ends if e != eid)


def _dissolve_edge(out: Shadow, eid: str, used) -> Tuple[bool, str]:
    """Merge the two sheets across an interior edge left with 2 wings."""
    e = out.edges[eid]
    chi_edge = 0 if e.kind == "circle" else -1
    (r1id, c1, i1), (r2id, c2, i2) = sorted(used)
    r1 = out.regions[r1id]
    p1 = r1.circuits[c1][i1]

    def chain(r, ci, start):
        circ = r.circuits[ci]
        n = len(circ)
        return [circ[(start + 1 + k) % n] for k in range(n - 1)]

    if r1id != r2id:
        r2 = out.regions[r2id]
        p2 = r2.circuits[c2][i2]
        la = chain(r1, c1, i1)
        lb = chain(r2, c2, i2)
        if p1.sign == p2.sign:
            lb = _rev_chain(lb)
        merged = la + lb
        chi = r1.euler() + r2.euler() + chi_edge
        b = (r1.n_boundary - 1) + (r2.n_boundary - 1) + (1 if merged else 0)
        orientable = r1.orientable and r2.orientable
        genus = _genus_from(chi, b, orientable)
        if genus < 0 and orientable:
            orientable, genus = False, _genus_from(chi, b, False)
        if genus < 0:
            return False, f"edge {eid}: dissolve yields impossible topology"
        circuits = [c for k, c in enumerate(r1.circuits) if k != c1]
        circuits += [c for k, c in enumerate(r2.circuits) if k != c2]
        if merged:
            circuits.insert(0, merged)
        gleam = None
        if r1.gleam is not None and r2.gleam is not None:
            gleam = r1.gleam + r2.gleam
        r1.orientable, r1.genus, r1.gleam = orientable, genus, gleam
        r1.circuits = circuits
        del out.regions[r2id]
    elif c1 != c2:
        p2 = r1.circuits[c2][i2]
        la = chain(r1, c1, i1)
        lb = chain(r1, c2, i2)
        orientable = r1.orientable
        if p1.sign == p2.sign:
            lb = _rev_chain(lb)
            if e.kind == "circle":
                orientable = False
        merged = la + lb
        chi = r1.euler() + chi_edge
        b = r1.n_boundary - 2 + (1 if merged else 0)
        genus = _genus_from(chi, b, orientable)
        if genus < 0 and orientable:
            orientable, genus = False, _genus_from(chi, b, False)
        if genus < 0:
            return False, f"edge {eid}: dissolve yields impossible topology"
        circuits = [c for k, c in enumerate(r1.circuits) if k not in (c1, c2)]
        if merged:
            circuits.insert(0, merged)
        r1.orientable, r1.genus = orientable, genus
        r1.circuits = circuits
    else:
        circ = r1.circuits[c1]
        first, second = min(i1, i2), max(i1, i2)
        pa, pb = circ[first], circ[second]
        mid = circ[first + 1:second]
        rest = circ[second + 1:] + circ[:first]
        chi = r1.euler() + chi_edge
        if pa.sign == pb.sign:
            merged = mid + _rev_chain(rest)
            circuits = [c for k, c in enumerate(r1.circuits) if k != c1]
            if merged:
                circuits.insert(0, merged)
            b = r1.n_boundary - 1 + (1 if merged else 0)
            orientable = False
            genus = _genus_from(chi, b, orientable)
        else:
            circuits = [c for k, c in enumerate(r1.circuits) if k != c1]
            if rest:
                circuits.insert(0, rest)
            if mid:
                circuits.insert(0, mid)
            b = r1.n_boundary - 1 + (1 if mid else 0) + (1 if rest else 0)
            orientable = r1.orientable
            genus = _genus_from(chi, b, orientable)
            if genus < 0 and orientable:
                orientable, genus = False, _genus_from(chi, b, False)
        if genus < 0:
            return False, f"edge {eid}: dissolve yields impossible topology"
        r1.orientable, r1.genus = orientable, genus
        r1.circuits = circuits
    del out.edges[eid]
    _detach_edge(out, eid)
    return True, ""


def _genus_from(chi: int, b: int, orientable: bool) -> int:
    if orientable:
        if (2 - chi - b) % 2 != 0:
            return -1
        return (2 - chi - b) // 2
    g = 2 - chi - b
    return g if g >= 1 else -1


def _merge_through_vertex(out: Shadow, vid: str, singular) -> Tuple[bool, str]:
    (ea, enda), (eb, endb) = singular
    if ea == eb:
        e = out.edges[ea]
        out.edges[ea] = Edge(ea, "circle", e.color)
        del out.vertices[vid]
        return True, ""
    A, B = out.edges[ea], out.edges[eb]
    if A.kind != "interval" or B.kind != "interval":
        return False, f"vertex {vid}: cannot merge circle edges"
    merged = out.fresh_id("e")
    out.edges[merged] = Edge(merged, "interval", A.color)
    far_a, far_b = 1 - enda, 1 - endb
    _repoint_end(out, ea, far_a, merged, 0)
    _repoint_end(out, eb, far_b, merged, 1)
    for r in sorted(out.regions.values(), key=lambda x: x.id):
        for ci in range(len(r.circuits)):
            okc, circ = _merge_passes(r.circuits[ci], ea, enda, eb, endb,
                                      merged)
            if not okc:
                return False, (f"vertex {vid}: passes through it do not "
                               f"pair across the smoothing")
            r.circuits[ci] = circ
    del out.vertices[vid]
    del out.edges[ea]
    del out.edges[eb]
    return True, ""


def _merge_passes(circ: List[Pass], ea, enda, eb, endb, merged):
    n = len(circ)

    def mergeable(p, q):
        if p.edge == ea and q.edge == eb and exit_end(p) == enda \
                and entry_end(q) == endb:
            return 1
        if p.edge == eb and q.edge == ea and exit_end(p) == endb \
                and entry_end(q) == enda:
            return -1
        return None

    if not any(p.edge in (ea, eb) for p in circ):
        return True, circ
    rot = None
    for k in range(n):
        if mergeable(circ[k - 1], circ[k]) is None:
            rot = k
            break
    if rot is None:
        return False, circ
    circ = circ[rot:] + circ[:rot]
    out: List[Pass] = []
    k = 0
    while k < n:
        p = circ[k]
        if k + 1 < n:
            sign = mergeable(p, circ[k + 1])
            if sign is not None:
                out.append(Pass(merged, None, sign))
                k += 2
                continue
        if p.edge in (ea, eb):
            return False, circ
        out.append(p)
        k += 1
    return True, out


# ---------------------------------------------------------------------------
# connected sum
# ---------------------------------------------------------------------------

def connected_sum(p1: Shadow, region1: str, p2: Shadow, region2: str) -> Shadow:
    """Identify closed disk neighborhoods of interior points of the two
    regions; the identified disk becomes a new region with gleam 0."""
    if region1 not in p1.regions:
        raise MoveError(f"no region {region1} in first summand")
    if region2 not in p2.regions:
        raise MoveError(f"no region {region2} in second summand")
    out = Shadow()
    for src, prefix in ((p1, "L."), (p2, "R.")):
        for v in src.vertices.values():
            out.vertices[prefix + v.id] = Vertex(
                prefix + v.id, tuple((prefix + e, k) for e, k in v.ends))
        for n in src.nodes.values():
            out.nodes[prefix + n.id] = BNode(
                prefix + n.id, tuple((prefix + e, k) for e, k in n.ends))
        for e in src.edges.values():
            out.edges[prefix + e.id] = Edge(prefix + e.id, e.kind, e.color)
        for r in src.regions.values():
            out.regions[prefix + r.id] = Region(
                prefix + r.id, r.orientable, r.genus, r.gleam,
                [[Pass(prefix + p.edge, p.wing, p.sign) for p in c]
                 for c in r.circuits])
    c = out.fresh_id("e")
    out.edges[c] = Edge(c, "circle", None)
    out.regions["L." + region1].circuits.append([Pass(c, 1, 1)])
    out.regions["R." + region2].circuits.append([Pass(c, 2, 1)])
    disk = out.fresh_id("r")
    out.regions[disk] = Region(disk, True, 0, HalfInt(0), [[Pass(c, 0, 1)]])
    out.invalidate()
    return out


# ---------------------------------------------------------------------------
# region surgery
# ---------------------------------------------------------------------------

def region_surgery(sh: Shadow, region: str, enclosed: List[int],
                   gleam_split: Optional[HalfInt] = None) -> Shadow:
    """Surgery along an embedded separating curve inside one region.

    The curve is specified combinatorially as the boundary of a regular
    neighborhood of the listed boundary circuits (an empty list is a
    trivial curve bounding a disk).  The curve's annular neighborhood
    keeps gleam 0 and the two parallel copies are capped by new disks of
    gleams +1 and -1, so the gleam weight grows by exactly 2 when the
    split respects signs.  ``gleam_split`` is the gleam kept on the
    enclosed side (default 0)."""
    out = sh.copy()
    r = out.regions.get(region)
    if r is None:
        raise MoveError(f"no region {region}")
    if sorted(set(enclosed)) != sorted(enclosed) or \
            any(not (0 <= k < len(r.circuits)) for k in enclosed):
        raise MoveError("enclosed circuit list invalid")
    g_total = r.gleam
    if g_total is None and gleam_split is not None:
        raise MoveError(f"region {region} carries no gleam to split")
    c1 = out.fresh_id("e")
    out.edges[c1] = Edge(c1, "circle", None)
    c2 = out.fresh_id("e")
    out.edges[c2] = Edge(c2, "circle", None)
    inner_id = out.fresh_id("r")
    out.regions[inner_id] = Region(
        inner_id, True, 0, None,
        [r.circuits[k] for k in enclosed] + [[Pass(c1, 0, 1)]])
    annulus_id = out.fresh_id("r")
    out.regions[annulus_id] = Region(
        annulus_id, True, 0, ZERO,
        [[Pass(c1, 1, 1)], [Pass(c2, 1, 1)]])
    r.circuits = [c for k, c in enumerate(r.circuits) if k not in enclosed] \
        + [[Pass(c2, 0, 1)]]
    capp = out.fresh_id("r")
    out.regions[capp] = Region(capp, True, 0, HalfInt.from_int(1),
                               [[Pass(c1, 2, 1)]])
    capm = out.fresh_id("r")
    out.regions[capm] = Region(capm, True, 0, HalfInt.from_int(-1),
                               [[Pass(c2, 2, 1)]])
    out.invalidate()
    inner = out.regions[inner_id]
    g_inner = gleam_split if gleam_split is not None else ZERO
    if out.gleam_expected(inner):
        inner.gleam = g_inner if g_total is not None else ZERO
    if g_total is not None:
        r.gleam = g_total - g_inner
    elif out.gleam_expected(r):
        raise MoveError(
            f"region {region}: surgery would strand an undetermined gleam")
    out.invalidate()
    report = validate(out)
    if not report.ok:
        raise MoveError("surgery produced an invalid shadow: "
                        + "; ".join(report.violations[:3]))
    return out
