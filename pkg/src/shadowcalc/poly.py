"""Boundary-decorated simple polyhedra with gleams.

A shadow is stored as an abstract cell complex:

* ``Vertex`` -- a 4-valent point of the singular graph.  Its four incident
  edge-ends are kept in a fixed order; the position 0..3 of an end in that
  tuple is the vertex's *numbering* and the six corner sheets at the vertex
  are indexed by the unordered pairs {i, j} of positions.

* ``Edge`` -- an interval (two ends) or circle (no ends) 1-cell.  Interior
  edges carry three wings (slots 0..2 where region sheets attach), colored
  boundary edges exactly one (slot 0).  Colors: ``i`` internal, ``e``
  external, ``f`` false.

* ``BNode`` -- a point of the boundary graph: either the end of a singular
  edge on the boundary (one interior end plus three colored ends) or a
  corner where two colored boundary edges meet.

* ``Region`` -- an abstract surface (orientability, genus, optional gleam)
  together with its attaching circuits: cyclic words of passes
  ``(edge, wing, direction)``.  The circuits determine the whole gluing:
  consecutive passes prescribe which corner of which vertex (or node) the
  region sheet turns through, and on circle edges they determine the
  monodromy permutation of the three wings.

Everything derived -- wing usage, corner usage, circle monodromies,
Z/2-gleams -- is recomputed from the circuits, so the circuits are the
single source of truth for the gluing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .halfint import HalfInt

INTERIOR_WINGS = 3
Colors = (None, "i", "e", "f")


@dataclass
class Vertex:
    id: str
    ends: Tuple[Tuple[str, int], ...]  # four (edge id, end index) refs


@dataclass
class Edge:
    id: str
    kind: str  # "interval" | "circle"
    color: Optional[str] = None  # None | "i" | "e" | "f"

    @property
    def n_wings(self) -> int:
        return INTERIOR_WINGS if self.color is None else 1

    @property
    def is_interior(self) -> bool:
        return self.color is None


@dataclass
class BNode:
    id: str
    ends: Tuple[Tuple[str, int], ...]  # (edge id, end index) refs, any arity


@dataclass(frozen=True)
class Pass:
    edge: str
    wing: int
    sign: int  # +1: end 0 -> end 1 (or circle forward); -1: reverse

    def format(self) -> str:
        return f"({self.edge},{self.wing},{'+' if self.sign > 0 else '-'})"


@dataclass
class Region:
    id: str
    orientable: bool
    genus: int  # crosscap number when non-orientable
    gleam: Optional[HalfInt]
    circuits: List[List[Pass]] = field(default_factory=list)

    @property
    def n_boundary(self) -> int:
        return len(self.circuits)

    def euler(self) -> int:
        """Euler characteristic of the compact surface with boundary."""
        if self.orientable:
            return 2 - 2 * self.genus - self.n_boundary
        return 2 - self.genus - self.n_boundary

    def is_disk(self) -> bool:
        return self.orientable and self.genus == 0 and self.n_boundary == 1

    def topology(self) -> Tuple[str, int, int]:
        return ("or" if self.orientable else "nor", self.genus, self.n_boundary)


class ShadowError(Exception):
    """Domain error raised by shadow operations."""


class Shadow:
    def __init__(self, vertices=None, edges=None, regions=None, nodes=None,
                 projection=None):
        self.vertices: Dict[str, Vertex] = dict(vertices or {})
        self.edges: Dict[str, Edge] = dict(edges or {})
        self.regions: Dict[str, Region] = dict(regions or {})
        self.nodes: Dict[str, BNode] = dict(nodes or {})
        # Optional planar immersion of the singular set (filled in by the
        # triangulation pipeline); see analysis.universal_link.
        self.projection = projection
        self._structure = None

    # -- construction helpers -------------------------------------------

    def copy(self) -> "Shadow":
        other = Shadow(projection=self.projection)
        for v in self.vertices.values():
            other.vertices[v.id] = Vertex(v.id, tuple(v.ends))
        for e in self.edges.values():
            other.edges[e.id] = Edge(e.id, e.kind, e.color)
        for n in self.nodes.values():
            other.nodes[n.id] = BNode(n.id, tuple(n.ends))
        for r in self.regions.values():
            other.regions[r.id] = Region(
                r.id, r.orientable, r.genus, r.gleam,
                [list(c) for c in r.circuits])
        return other

    def fresh_id(self, prefix: str) -> str:
        taken = set(self.vertices) | set(self.edges) | set(self.regions) \
            | set(self.nodes)
        k = 0
        while f"{prefix}{k}" in taken:
            k += 1
        return f"{prefix}{k}"

    def invalidate(self) -> None:
        self._structure = None

    # -- derived structure -----------------------------------------------

    def structure(self) -> "Structure":
        if self._structure is None:
            self._structure = Structure(self)
        return self._structure

    def boundary_edges(self, color=None):
        if color is None:
            return [e for e in self.edges.values() if e.color is not None]
        return [e for e in self.edges.values() if e.color == color]

    def interior_edges(self):
        return [e for e in self.edges.values() if e.color is None]

    def is_closed(self) -> bool:
        return not self.boundary_edges()

    def region_touches_boundary(self, region: Region, colors=("i", "e", "f")) -> bool:
        for circ in region.circuits:
            for p in circ:
                color = self.edges[p.edge].color
                if color is not None and color in colors:
                    return True
        return False

    def is_internal(self, region: Region) -> bool:
        """Internal = the closure avoids the boundary entirely."""
        return not self.region_touches_boundary(region)

    def gleam_expected(self, region: Region) -> bool:
        """Gleam is defined unless the region meets false or external boundary."""
        return not self.region_touches_boundary(region, colors=("e", "f"))


def entry_end(p: Pass) -> int:
    return 0 if p.sign > 0 else 1


def exit_end(p: Pass) -> int:
    return 1 if p.sign > 0 else 0


@dataclass
class Transition:
    """One corner turn of a region circuit between consecutive passes."""
    region: str
    circuit: int
    index: int          # index of the incoming pass within the circuit
    p_from: Pass
    p_to: Pass
    kind: str           # "vertex" | "node" | "circle"
    site: Optional[str]  # vertex or node id (None for circle basepoints)
    slot_from: Optional[int] = None  # vertex slot / node end position
    slot_to: Optional[int] = None


class Structure:
    """Derived incidence data; raises ShadowError on structural nonsense
    that makes derivation impossible (validation proper reports gently)."""

    def __init__(self, sh: Shadow):
        self.shadow = sh
        self.problems: List[str] = []
        self.end_site: Dict[Tuple[str, int], Tuple[str, str, int]] = {}
        self.wing_pass: Dict[Tuple[str, int], Tuple[str, int, int]] = {}
        self.transitions: List[Transition] = []
        self.vertex_corners: Dict[str, Dict[Tuple[int, int], Transition]] = {}
        self.node_corners: Dict[str, List[Transition]] = {}
        self.monodromy: Dict[str, Dict[int, int]] = {}
        # wing -> opposite-slot label, per interval edge end at a vertex
        self.corner_label: Dict[Tuple[str, int], Dict[int, int]] = {}
        # wing -> node end position, per interval edge end at a node
        self.node_label: Dict[Tuple[str, int], Dict[int, int]] = {}
        self._build()

    def _note(self, msg: str) -> None:
        self.problems.append(msg)

    def _build(self) -> None:
        sh = self.shadow
        # 1. locate edge ends
        for v in sh.vertices.values():
            if len(v.ends) != 4:
                self._note(f"vertex {v.id}: has {len(v.ends)} edge-ends, needs 4")
            for slot, (eid, end) in enumerate(v.ends):
                self._place_end(eid, end, ("vertex", v.id, slot))
        for n in sh.nodes.values():
            for pos, (eid, end) in enumerate(n.ends):
                self._place_end(eid, end, ("node", n.id, pos))
        for e in sh.edges.values():
            if e.kind == "interval":
                for end in (0, 1):
                    if (e.id, end) not in self.end_site:
                        self._note(f"edge {e.id}: end {end} unattached")

        # 2. wing usage from circuits
        for r in sorted(sh.regions.values(), key=lambda r: r.id):
            for ci, circ in enumerate(r.circuits):
                if not circ:
                    self._note(f"region {r.id}: empty circuit {ci}")
                    continue
                for pi, p in enumerate(circ):
                    e = sh.edges.get(p.edge)
                    if e is None:
                        self._note(f"region {r.id}: pass on unknown edge {p.edge}")
                        continue
                    if not (0 <= p.wing < e.n_wings):
                        self._note(
                            f"region {r.id}: pass {p.format()} uses wing "
                            f"{p.wing} of edge {e.id} with {e.n_wings} wings")
                        continue
                    key = (p.edge, p.wing)
                    if key in self.wing_pass:
                        o = self.wing_pass[key]
                        self._note(
                            f"edge {p.edge}: wing {p.wing} used twice "
                            f"(region {o[0]} and region {r.id})")
                    else:
                        self.wing_pass[key] = (r.id, ci, pi)

        for e in sh.edges.values():
            for w in range(e.n_wings):
                if (e.id, w) not in self.wing_pass:
                    kind = "interior" if e.is_interior else "boundary"
                    self._note(f"edge {e.id}: {kind} wing {w} carried by no region"
                               + (" (edge not 3-winged)" if e.is_interior else ""))

        # 3. transitions between consecutive passes
        for r in sorted(sh.regions.values(), key=lambda r: r.id):
            for ci, circ in enumerate(r.circuits):
                if not circ:
                    continue
                for pi, p in enumerate(circ):
                    q = circ[(pi + 1) % len(circ)]
                    self._transition(r, ci, pi, p, q)

        # 4. corner usage per vertex
        for v in sh.vertices.values():
            seen = self.vertex_corners.setdefault(v.id, {})
            missing = [c for c in _corner_pairs() if c not in seen]
            for c in missing:
                self._note(f"vertex {v.id}: corner {set(c)} used by no region")

        # 5. circle monodromy: permutation check
        for eid, part in self.monodromy.items():
            e = sh.edges[eid]
            wings = set(range(e.n_wings))
            if set(part.keys()) != wings or set(part.values()) != wings:
                self._note(f"edge {eid}: circle passes do not define a "
                           f"monodromy permutation of its wings")

        # 6. derive end labels (wing -> opposite corner slot)
        for (eid, end), site in self.end_site.items():
            e = sh.edges[eid]
            if site[0] == "vertex":
                labels = self.corner_label.setdefault((eid, end), {})
                if len(labels) == e.n_wings and \
                        len(set(labels.values())) != e.n_wings:
                    self._note(f"edge {eid}: end {end} wing/corner map "
                               f"not a bijection at vertex {site[1]}")

    def _place_end(self, eid: str, end: int, site) -> None:
        sh = self.shadow
        e = sh.edges.get(eid)
        if e is None:
            self._note(f"{site[0]} {site[1]}: references unknown edge {eid}")
            return
        if e.kind != "interval":
            self._note(f"{site[0]} {site[1]}: circle edge {eid} has no ends")
            return
        if end not in (0, 1):
            self._note(f"{site[0]} {site[1]}: bad end index {end} for edge {eid}")
            return
        if (eid, end) in self.end_site:
            self._note(f"edge {eid}: end {end} attached twice")
            return
        self.end_site[(eid, end)] = site

    def _transition(self, r: Region, ci: int, pi: int, p: Pass, q: Pass) -> None:
        sh = self.shadow
        e1 = sh.edges.get(p.edge)
        e2 = sh.edges.get(q.edge)
        if e1 is None or e2 is None:
            return
        if e1.kind == "circle" or e2.kind == "circle":
            if e1.id != e2.id:
                self._note(f"region {r.id}: circuit {ci} leaves circle edge "
                           f"{e1.id if e1.kind == 'circle' else e2.id}")
                return
            if p.sign != q.sign:
                self._note(f"region {r.id}: circuit {ci} reverses direction "
                           f"on circle edge {e1.id}")
                return
            part = self.monodromy.setdefault(e1.id, {})
            if p.sign > 0:
                src, dst = p.wing, q.wing
            else:
                src, dst = q.wing, p.wing
            if src in part and part[src] != dst:
                self._note(f"edge {e1.id}: inconsistent circle monodromy at "
                           f"wing {src}")
            part[src] = dst
            self.transitions.append(Transition(
                r.id, ci, pi, p, q, "circle", None))
            return

        site1 = self.end_site.get((p.edge, exit_end(p)))
        site2 = self.end_site.get((q.edge, entry_end(q)))
        if site1 is None or site2 is None:
            return  # already reported as unattached
        if site1[0] != site2[0] or site1[1] != site2[1]:
            self._note(
                f"region {r.id}: circuit {ci} pass {p.format()} exits at "
                f"{site1[0]} {site1[1]} but {q.format()} enters at "
                f"{site2[0]} {site2[1]}")
            return
        kind, sid = site1[0], site1[1]
        t = Transition(r.id, ci, pi, p, q, kind, sid, site1[2], site2[2])
        self.transitions.append(t)
        if kind == "vertex":
            i, j = site1[2], site2[2]
            if i == j:
                self._note(f"region {r.id}: circuit {ci} re-enters vertex "
                           f"{sid} through the same edge-end")
                return
            corner = (min(i, j), max(i, j))
            seen = self.vertex_corners.setdefault(sid, {})
            if corner in seen:
                o = seen[corner]
                self._note(f"vertex {sid}: corner {set(corner)} used twice "
                           f"(region {o.region} and region {r.id})")
            else:
                seen[corner] = t
            self.corner_label.setdefault((p.edge, exit_end(p)), {})[p.wing] = j
            self.corner_label.setdefault((q.edge, entry_end(q)), {})[q.wing] = i
        else:
            self.node_corners.setdefault(sid, []).append(t)
            self.node_label.setdefault((p.edge, exit_end(p)), {})[p.wing] = site2[2]
            self.node_label.setdefault((q.edge, entry_end(q)), {})[q.wing] = site1[2]

    # -- side-transport machinery (Z/2-gleam bands) -----------------------

    def side_map(self, t: Transition) -> Dict[int, int]:
        """Across a transition, map each side wing of the incoming edge
        to the corresponding side wing of the outgoing edge."""
        sh = self.shadow
        if t.kind == "circle":
            phi = self.monodromy[t.p_from.edge]
            if t.p_from.sign > 0:
                move = phi
            else:
                move = {v: k for k, v in phi.items()}
            return {w: move[w] for w in range(INTERIOR_WINGS)
                    if w != t.p_from.wing}
        if t.kind == "node":
            # Y-end of a singular edge: wings pair with colored edges 1:1,
            # or a colored corner: single wing to single wing.  Side wings of
            # a colored edge do not exist (1 wing), so this only matters for
            # interior-to-interior turns, which do not happen at nodes.
            return {}
        e_in, e_out = t.p_from.edge, t.p_to.edge
        labels_in = self.corner_label[(e_in, exit_end(t.p_from))]
        labels_out = self.corner_label[(e_out, entry_end(t.p_to))]
        inverse_out = {j: w for w, j in labels_out.items()}
        out = {}
        for w in range(self.shadow.edges[e_in].n_wings):
            if w == t.p_from.wing:
                continue
            j = labels_in.get(w)
            if j is None or j not in inverse_out:
                raise ShadowError(
                    f"edge {e_in}: side wing {w} has no corner partner at "
                    f"vertex {t.site}; shadow is not locally simple")
            out[w] = inverse_out[j]
        return out

    def circuit_transitions(self, rid: str, ci: int) -> List[Transition]:
        return [t for t in self.transitions
                if t.region == rid and t.circuit == ci]


def _corner_pairs():
    return [(i, j) for i in range(4) for j in range(i + 1, 4)]


# -- validation ------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    violations: List[str]

    def __bool__(self):
        return self.ok


def validate(sh: Shadow) -> ValidationReport:
    """Check all local models and decoration invariants.

    Reports one line per violation, each naming the offending cell.
    """
    problems: List[str] = []
    try:
        st = Structure(sh)
    except ShadowError as exc:
        return ValidationReport(False, [str(exc)])
    problems.extend(st.problems)

    # node local models: Y-end (1 interior + 3 colored) or colored corner
    for n in sh.nodes.values():
        interior = [ref for ref in n.ends if sh.edges.get(ref[0]) is not None
                    and sh.edges[ref[0]].is_interior]
        colored = [ref for ref in n.ends if sh.edges.get(ref[0]) is not None
                   and not sh.edges[ref[0]].is_interior]
        if not ((len(interior), len(colored)) in ((1, 3), (0, 2))):
            problems.append(
                f"node {n.id}: has {len(interior)} singular and "
                f"{len(colored)} boundary edge-ends; legal local models are "
                f"1+3 (singular edge ending on the boundary) or 0+2 (corner)")

    # vertices must only carry interior edge ends
    for v in sh.vertices.values():
        for eid, _end in v.ends:
            e = sh.edges.get(eid)
            if e is not None and not e.is_interior:
                problems.append(f"vertex {v.id}: boundary edge {eid} attached")

    # region sanity
    for r in sh.regions.values():
        if r.genus < 0:
            problems.append(f"region {r.id}: negative genus")
        if not r.orientable and r.genus == 0:
            problems.append(f"region {r.id}: non-orientable with 0 crosscaps")

    # gleam presence rules
    for r in sorted(sh.regions.values(), key=lambda r: r.id):
        if sh.gleam_expected(r):
            if r.gleam is None:
                problems.append(f"region {r.id}: missing gleam")
        else:
            if r.gleam is not None:
                problems.append(
                    f"region {r.id}: carries a gleam but meets e/f boundary")

    # gleam parity against the Z/2-gleam, for internal regions only
    if not problems:
        for r in sorted(sh.regions.values(), key=lambda r: r.id):
            if r.gleam is None or not sh.is_internal(r):
                continue
            z2 = z2_gleam_direct(sh, r.id)
            if r.gleam.parity != z2:
                problems.append(
                    f"region {r.id}: parity: gleam {r.gleam.format()} vs "
                    f"Z/2-gleam {z2}")

    return ValidationReport(not problems, problems)


# -- Z/2-gleam, computed directly (Mobius band count) ------------------------

def z2_gleam_direct(sh: Shadow, rid: str) -> int:
    """Parity of the Mobius bands among the bands of the abstract regular
    neighborhood of the region: one band per boundary circuit, built by
    transporting the pair of side sheets around the circuit."""
    r = sh.regions.get(rid)
    if r is None:
        raise ShadowError(f"no region {rid}")
    if not sh.is_internal(r):
        raise ShadowError(f"region {rid}: no gleam defined (not internal)")
    st = sh.structure()
    if st.problems:
        raise ShadowError(f"shadow invalid: {st.problems[0]}")
    total = 0
    for ci in range(len(r.circuits)):
        total += _band_is_mobius(sh, st, rid, ci)
    return total % 2


def _band_is_mobius(sh: Shadow, st: Structure, rid: str, ci: int) -> int:
    r = sh.regions[rid]
    circ = r.circuits[ci]
    transitions = st.circuit_transitions(rid, ci)
    if not transitions:
        return 0
    first = circ[0]
    sides = [w for w in range(sh.edges[first.edge].n_wings)
             if w != first.wing]
    if len(sides) != 2:
        return 0
    marked = sides[0]
    current = marked
    for t in transitions:
        current = st.side_map(t)[current]
    return 0 if current == marked else 1


def transition_flip(sh: Shadow, st: Structure, t: Transition) -> int:
    """Localized side flip: 1 when the corner bijection reverses the
    wing-index order of the side pair.  Summing over a circuit gives the
    same parity as the band holonomy."""
    if t.kind == "node":
        return 0
    e_in = sh.edges[t.p_from.edge]
    if e_in.n_wings != INTERIOR_WINGS:
        return 0
    sides = sorted(w for w in range(e_in.n_wings) if w != t.p_from.wing)
    m = st.side_map(t)
    return 1 if m[sides[0]] > m[sides[1]] else 0


# -- Z/2-gleam as a coboundary (the 1-cochain c) ----------------------------

def z2_gleam_cochain(sh: Shadow) -> Dict[str, Optional[int]]:
    """The 1-cochain c on singular edges: c(e) = 1 when the cyclic orderings
    of the three wings induced by the two endpoint numberings agree (rule:
    at the end in slot k, order wings by their opposite-slot label j,
    reversed when k is even).  Circle edges: 0 when the monodromy preserves
    a cyclic orientation of the wings.  Edges ending on boundary nodes get
    None; internal regions never traverse them."""
    st = sh.structure()
    if st.problems:
        raise ShadowError(f"shadow invalid: {st.problems[0]}")
    out: Dict[str, Optional[int]] = {}
    for e in sh.edges.values():
        if not e.is_interior:
            continue
        if e.kind == "circle":
            phi = st.monodromy.get(e.id, {w: w for w in range(3)})
            out[e.id] = 1 if _is_transposition(phi) else 0
            continue
        orders = []
        ok = True
        for end in (0, 1):
            site = st.end_site.get((e.id, end))
            if site is None or site[0] != "vertex":
                ok = False
                break
            k = site[2]
            labels = st.corner_label.get((e.id, end), {})
            if len(labels) != 3:
                ok = False
                break
            order = [w for w, _j in sorted(labels.items(), key=lambda kv: kv[1])]
            if k % 2 == 0:
                order = list(reversed(order))
            orders.append(tuple(order))
        if not ok:
            out[e.id] = None
            continue
        out[e.id] = 1 if _same_cyclic(orders[0], orders[1]) else 0
    return out


def _is_transposition(phi: Dict[int, int]) -> bool:
    fixed = sum(1 for k, v in phi.items() if k == v)
    return len(phi) == 3 and fixed == 1


def _same_cyclic(a: Tuple[int, ...], b: Tuple[int, ...]) -> bool:
    rotations = {tuple(a[i:] + a[:i]) for i in range(len(a))}
    return tuple(b) in rotations


def coboundary_on_region(sh: Shadow, cochain: Dict[str, Optional[int]],
                         rid: str, signed: bool = False) -> int:
    """delta(c) evaluated on a region: the sum of c over the passes of its
    circuits (with traversal signs when ``signed``)."""
    r = sh.regions[rid]
    total = 0
    for circ in r.circuits:
        for p in circ:
            c = cochain.get(p.edge)
            if c is None:
                raise ShadowError(
                    f"region {rid}: cochain undefined on edge {p.edge}")
            total += (p.sign * c) if signed else c
    return total if signed else total % 2


# -- gleam weight and stats ---------------------------------------------------

def gleam_weight(sh: Shadow) -> HalfInt:
    """Sum of |gleam| over all gleam-carrying regions."""
    total = HalfInt(0)
    for r in sorted(sh.regions.values(), key=lambda r: r.id):
        if sh.gleam_expected(r):
            if r.gleam is None:
                raise ShadowError(f"region {r.id}: missing gleam")
            total = total + abs(r.gleam)
    return total


@dataclass
class Stats:
    n_vertices: int
    n_edges: int
    n_interval_edges: int
    n_circle_edges: int
    n_nodes: int
    n_regions: int
    region_census: Dict[Tuple[str, int, int], int]
    euler: int
    boundary_census: Dict[str, int]
    standard: bool


def stats(sh: Shadow) -> Stats:
    census: Dict[Tuple[str, int, int], int] = {}
    euler = len(sh.vertices) + len(sh.nodes)
    n_interval = 0
    n_circle = 0
    for e in sh.edges.values():
        if e.kind == "interval":
            n_interval += 1
            euler -= 1
        else:
            n_circle += 1
    for r in sh.regions.values():
        census[r.topology()] = census.get(r.topology(), 0) + 1
        euler += r.euler()
    boundary = {"i": 0, "e": 0, "f": 0}
    for e in sh.boundary_edges():
        boundary[e.color] += 1
    standard = all(r.is_disk() for r in sh.regions.values()) and not any(
        e.kind == "circle" for e in sh.interior_edges())
    return Stats(
        n_vertices=len(sh.vertices),
        n_edges=len(sh.edges),
        n_interval_edges=n_interval,
        n_circle_edges=n_circle,
        n_nodes=len(sh.nodes),
        n_regions=len(sh.regions),
        region_census=census,
        euler=euler,
        boundary_census=boundary,
        standard=standard,
    )


# -- small builders used across the package and the tests --------------------

def sphere_shadow(gleam: HalfInt) -> Shadow:
    """Closed surface S^2 as a one-region shadow."""
    sh = Shadow()
    sh.regions["r0"] = Region("r0", True, 0, gleam, [])
    return sh


def disk_with_boundary(color: str) -> Shadow:
    """A disk whose boundary circle carries the given color."""
    sh = Shadow()
    sh.edges["b0"] = Edge("b0", "circle", color)
    gleam = HalfInt(0) if color == "i" else None
    sh.regions["r0"] = Region("r0", True, 0, gleam, [[Pass("b0", 0, 1)]])
    return sh


def hopf_polyhedron() -> Shadow:
    """Disk glued to the core of an annulus; the Hopf-link shadow block."""
    sh = Shadow()
    sh.edges["c0"] = Edge("c0", "circle", None)
    sh.edges["b0"] = Edge("b0", "circle", "i")
    sh.edges["b1"] = Edge("b1", "circle", "i")
    sh.regions["rD"] = Region("rD", True, 0, HalfInt(0), [[Pass("c0", 0, 1)]])
    sh.regions["rA"] = Region("rA", True, 0, HalfInt(0),
                              [[Pass("c0", 1, 1)], [Pass("b0", 0, 1)]])
    sh.regions["rB"] = Region("rB", True, 0, HalfInt(0),
                              [[Pass("c0", 2, 1)], [Pass("b1", 0, 1)]])
    return sh
