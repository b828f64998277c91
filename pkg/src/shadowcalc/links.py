"""Shadows from link diagrams, and the surgery machinery around them.

PD-code text format (strict; one directive per line)::

    X <a> <b> <c> <d> [+|-]     one crossing
    frame <component> <p>[/<q>] framing of a component (0-indexed)
    outer <arc> <l|r>           optional: which face is the disk boundary

Arc labels are positive integers numbered consecutively along each
component (components numbered by their smallest arc).  A crossing lists
its four arcs counterclockwise starting from the incoming under-arc, so
the outgoing under-arc sits opposite.  The over-strand direction is
inferred from consecutive numbering; the optional sign token is checked
against it (positive: the over-strand runs from the 2nd to the 4th slot).
A diagram with no crossings (just one ``frame`` line) is the crossingless
unknot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .halfint import HalfInt
from .moves import MoveError, cap_boundary, collapse_false
from .poly import Edge, Pass, Region, Shadow, ShadowError, Vertex, validate

ZERO = HalfInt(0)


class LinkError(ShadowError):
    pass


@dataclass
class Crossing:
    arcs: Tuple[int, int, int, int]  # (a, b, c, d) counterclockwise, a = under-in
    sign: int
    over_from_b: bool  # True: over-strand runs b -> d


@dataclass
class LinkDiagram:
    crossings: List[Crossing]
    components: List[List[int]]  # arc cycles
    framings: Dict[int, Fraction]
    outer: Optional[Tuple[int, str]] = None  # (arc, side l|r)

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    def component_of(self, arc: int) -> int:
        for k, comp in enumerate(self.components):
            if arc in comp:
                return k
        raise LinkError(f"arc {arc} belongs to no component")

    def writhe(self) -> int:
        return sum(x.sign for x in self.crossings)

    def self_writhe(self, comp: int) -> int:
        total = 0
        for x in self.crossings:
            a, b, c, d = x.arcs
            under = self.component_of(a)
            over = self.component_of(b)
            if under == comp and over == comp:
                total += x.sign
        return total


def parse_pd(text: str) -> LinkDiagram:
    crossings_raw: List[Tuple[int, int, int, int, Optional[int]]] = []
    framings: Dict[int, Fraction] = {}
    outer = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "X":
            if len(tok) not in (5, 6):
                raise LinkError(f"bad crossing line: {line}")
            try:
                arcs = tuple(int(t) for t in tok[1:5])
            except ValueError:
                raise LinkError(f"bad arc label in: {line}") from None
            sign = None
            if len(tok) == 6:
                if tok[5] not in ("+", "-"):
                    raise LinkError(f"bad sign token in: {line}")
                sign = 1 if tok[5] == "+" else -1
            crossings_raw.append((*arcs, sign))
        elif tok[0] == "frame":
            if len(tok) != 3:
                raise LinkError(f"bad frame line: {line}")
            comp = int(tok[1])
            if "/" in tok[2]:
                p, q = tok[2].split("/")
                framings[comp] = Fraction(int(p), int(q))
            else:
                framings[comp] = Fraction(int(tok[2]))
        elif tok[0] == "outer":
            if len(tok) != 3 or tok[2] not in ("l", "r"):
                raise LinkError(f"bad outer line: {line}")
            outer = (int(tok[1]), tok[2])
        else:
            raise LinkError(f"unknown directive {tok[0]!r}")
    if not crossings_raw:
        if len(framings) != 1:
            raise LinkError("a crossingless diagram must be a single framed "
                            "unknot")
        return LinkDiagram([], [[1]], framings, outer)
    return _assemble(crossings_raw, framings, outer)


def _assemble(raw, framings, outer) -> LinkDiagram:
    arcs = sorted({a for row in raw for a in row[:4]})
    counts: Dict[int, int] = {}
    slots: Dict[int, List[Tuple[int, int]]] = {}
    for k, row in enumerate(raw):
        for s, a in enumerate(row[:4]):
            counts[a] = counts.get(a, 0) + 1
            slots.setdefault(a, []).append((k, s))
    bad = [a for a, k in counts.items() if k != 2]
    if bad:
        raise LinkError(f"arcs {bad} do not appear exactly twice")
    # head = the occurrence where the arc arrives.  Under-slots are known
    # (slot 0 arrives, slot 2 leaves); propagate through each arc.
    head: Dict[int, Tuple[int, int]] = {}
    tail: Dict[int, Tuple[int, int]] = {}

    def set_head(a, occ):
        if a in head and head[a] != occ:
            raise LinkError(f"arc {a} arrives twice; bad code")
        head[a] = occ
        other = next(o for o in slots[a] if o != occ) if slots[a][0] == occ \
            else slots[a][0]
        if a in tail and tail[a] == occ:
            raise LinkError(f"arc {a} both arrives and leaves at one end")
        tail.setdefault(a, other)

    def set_tail(a, occ):
        if a in tail and tail[a] != occ:
            raise LinkError(f"arc {a} leaves twice; bad code")
        tail[a] = occ
        other = next(o for o in slots[a] if o != occ) if slots[a][0] == occ \
            else slots[a][0]
        head.setdefault(a, other)

    for k, row in enumerate(raw):
        a, b, c, d, _sign = row
        set_head(a, (k, 0))
        set_tail(c, (k, 2))
    # arcs whose both ends are over-slots: orient by consecutive numbering
    for a in arcs:
        if a in head:
            continue
        nxt = a + 1 if (a + 1) in counts else min(arcs)
        # a -> nxt at the crossing where both meet as over-slots
        common = [k for (k, _s) in slots[a] if any(
            k2 == k for (k2, _s2) in slots.get(nxt, []))]
        if not common:
            raise LinkError(f"cannot orient arc {a}; renumber the code")
        k = common[0]
        occ_a = next(o for o in slots[a] if o[0] == k)
        set_head(a, occ_a)
    crossings: List[Crossing] = []
    for k, row in enumerate(raw):
        a, b, c, d, sign_tok = row
        over_from_b = head[b] == (k, 1)
        if not over_from_b and head[d] != (k, 3):
            raise LinkError(f"crossing {row[:4]}: no over-strand direction "
                            f"is consistent")
        geometric = 1 if over_from_b else -1
        if sign_tok is not None and sign_tok != geometric:
            raise LinkError(
                f"crossing {row[:4]}: sign token {sign_tok:+d} contradicts "
                f"the arc orientations")
        crossings.append(Crossing((a, b, c, d), geometric, over_from_b))
    succ: Dict[int, int] = {}
    for x in crossings:
        a, b, c, d = x.arcs
        succ[a] = c
        if x.over_from_b:
            succ[b] = d
        else:
            succ[d] = b
    if sorted(succ) != arcs or sorted(succ.values()) != arcs:
        raise LinkError("arc successors do not form a permutation")
    components: List[List[int]] = []
    seen = set()
    for a in arcs:
        if a in seen:
            continue
        cyc = [a]
        seen.add(a)
        nxt = succ[a]
        while nxt != a:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = succ[nxt]
        components.append(cyc)
    components.sort(key=min)
    for comp in range(len(components)):
        framings.setdefault(comp, Fraction(0))
    return LinkDiagram(crossings, components, framings, outer)


def serialize_pd(d: LinkDiagram) -> str:
    out = []
    for x in d.crossings:
        a, b, c, dd = x.arcs
        out.append(f"X {a} {b} {c} {dd} {'+' if x.sign > 0 else '-'}")
    for comp in sorted(d.framings):
        fr = d.framings[comp]
        txt = str(fr.numerator) if fr.denominator == 1 else \
            f"{fr.numerator}/{fr.denominator}"
        out.append(f"frame {comp} {txt}")
    if d.outer:
        out.append(f"outer {d.outer[0]} {d.outer[1]}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# faces of the diagram
# ---------------------------------------------------------------------------

def _half_edges(d: LinkDiagram):
    """Half-edge h = (crossing index, slot).  alpha: other end of the same
    arc; sigma: next slot counterclockwise."""
    location: Dict[int, List[Tuple[int, int]]] = {}
    for k, x in enumerate(d.crossings):
        for s, arc in enumerate(x.arcs):
            location.setdefault(arc, []).append((k, s))
    alpha = {}
    for arc, ends in location.items():
        (k1, s1), (k2, s2) = ends
        alpha[(k1, s1)] = (k2, s2)
        alpha[(k2, s2)] = (k1, s1)
    return location, alpha


def diagram_faces(d: LinkDiagram) -> List[List[Tuple[int, int]]]:
    """Faces as cycles of half-edges (crossing, slot); each face lists the
    half-edges it leaves along, with the face on the left of the arc
    traversed from that slot to the opposite end."""
    if not d.crossings:
        return []
    _loc, alpha = _half_edges(d)
    faces = []
    visited = set()
    for start in sorted(alpha):
        if start in visited:
            continue
        cyc = []
        h = start
        while True:
            cyc.append(h)
            visited.add(h)
            k, s = alpha[h]
            h = (k, (s + 1) % 4)
            if h == start:
                break
        faces.append(cyc)
    total = sum(len(f) for f in faces)
    if total != 4 * len(d.crossings):
        raise LinkError("face tracing failed")
    if len(faces) != 2 - 2 * 0 + len(d.crossings):  # V - E + F = 2 on S^2
        raise LinkError("diagram is not planar/connected as coded")
    return faces


def _arc_direction(d: LinkDiagram, k: int, s: int) -> bool:
    """True when the arc at slot s of crossing k leaves the crossing
    (is traversed away from it)."""
    x = d.crossings[k]
    if s == 0:
        return False  # under-in arrives
    if s == 2:
        return True  # under-out leaves
    if s == 1:
        return not x.over_from_b  # over-in arrives at slot 1 when b -> d
    return x.over_from_b


# ---------------------------------------------------------------------------
# the projection construction
# ---------------------------------------------------------------------------

def mapping_cylinder_shadow(d: LinkDiagram) -> Shadow:
    """The decorated polyhedron D_L: disk + one annulus per component,
    glued along the diagram; outer boundary colored f, free annulus
    boundaries colored i.  Gleams are parity placeholders; the caller
    assigns final gleams after collapsing."""
    sh = Shadow()
    if not d.crossings:
        sh.edges["g0"] = Edge("g0", "circle", None)
        sh.edges["fD"] = Edge("fD", "circle", "f")
        sh.edges["L0"] = Edge("L0", "circle", "i")
        sh.regions["inner"] = Region("inner", True, 0, ZERO,
                                     [[Pass("g0", 0, 1)]])
        sh.regions["outer"] = Region("outer", True, 0, None,
                                     [[Pass("g0", 1, 1)], [Pass("fD", 0, 1)]])
        sh.regions["flap0"] = Region("flap0", True, 0, ZERO,
                                     [[Pass("g0", 2, 1)], [Pass("L0", 0, 1)]])
        return sh

    # one interval edge per arc: end 0 = tail (arc leaves a crossing),
    # end 1 = head
    for arc in sorted({a for x in d.crossings for a in x.arcs}):
        sh.edges[f"a{arc}"] = Edge(f"a{arc}", "interval", None)
    for k, x in enumerate(d.crossings):
        ends = []
        for s, arc in enumerate(x.arcs):
            end = 0 if _arc_direction(d, k, s) else 1
            ends.append((f"a{arc}", end))
        sh.vertices[f"x{k}"] = Vertex(f"x{k}", tuple(ends))
    sh.edges["fD"] = Edge("fD", "circle", "f")
    for comp in range(len(d.components)):
        sh.edges[f"L{comp}"] = Edge(f"L{comp}", "circle", "i")

    # wing convention per arc edge: 0 = left of the arc, 1 = right, 2 = flap
    faces = diagram_faces(d)
    outer_face = _pick_outer(d, faces)
    for fi, face in enumerate(faces):
        passes = []
        for (k, s) in face:
            x = d.crossings[k]
            arc = x.arcs[s]
            leaving = _arc_direction(d, k, s)
            # the face lies left of the traversal from this half-edge to the
            # opposite end; left of the arc's own direction iff it leaves
            wing = 0 if leaving else 1
            sign = 1 if leaving else -1
            passes.append(Pass(f"a{arc}", wing, sign))
        circuits = [passes]
        gleam: Optional[HalfInt] = ZERO
        if fi == outer_face:
            circuits.append([Pass("fD", 0, 1)])
            gleam = None
        rid = f"face{fi}"
        sh.regions[rid] = Region(rid, True, 0, gleam, circuits)
    for comp, cyc in enumerate(d.components):
        passes = [Pass(f"a{arc}", 2, 1) for arc in cyc]
        rid = f"flap{comp}"
        sh.regions[rid] = Region(
            rid, True, 0, ZERO,
            [passes, [Pass(f"L{comp}", 0, 1)]])
    _assign_corner_gleams(sh, d)
    return sh


def _pick_outer(d: LinkDiagram, faces) -> int:
    arc, side = d.outer if d.outer else (1, "l")
    loc, _alpha = _half_edges(d)
    ends = loc[arc]
    for fi, face in enumerate(faces):
        for (k, s) in face:
            if (k, s) not in ends:
                continue
            leaving = _arc_direction(d, k, s)
            if (side == "l") == leaving:
                return fi
    raise LinkError(f"outer face (arc {arc}, side {side}) not found")


def shadow_from_link_diagram(d: LinkDiagram) -> Shadow:
    """Build D_L, collapse the false boundary, and decorate the resulting
    P_L with the crossing-corner gleams.  The boundary is the link,
    colored i."""
    dl = mapping_cylinder_shadow(d)
    report = validate(dl)
    if not report.ok:
        raise LinkError("mapping cylinder invalid: "
                        + "; ".join(report.violations[:3]))
    res = collapse_false(dl)
    pl = res.require()
    repair_gleam_parities(pl)
    report = validate(pl)
    if not report.ok:
        raise LinkError("collapsed shadow invalid: "
                        + "; ".join(report.violations[:3]))
    return pl


def _assign_corner_gleams(sh: Shadow, d: LinkDiagram) -> None:
    """Gleam of a region: half the signed count of its quadrant corner
    passages over the surviving crossings (quadrants between consecutive
    slots contribute the crossing sign, the wrap-around quadrant its
    negative; diagonal flap corners contribute nothing).  The per-crossing
    sum is then the crossing sign, so the totals track the surviving
    writhe; parities are repaired afterwards without touching the total."""
    sign_of = {f"x{k}": x.sign for k, x in enumerate(d.crossings)}
    st = sh.structure()
    totals: Dict[str, int] = {rid: 0 for rid in sh.regions}
    for t in st.transitions:
        if t.kind != "vertex" or t.site not in sign_of:
            continue
        i, j = sorted((t.slot_from, t.slot_to))
        if (i, j) in ((0, 1), (1, 2), (2, 3)):
            totals[t.region] += sign_of[t.site]
        elif (i, j) == (0, 3):
            totals[t.region] -= sign_of[t.site]
    for rid, r in sh.regions.items():
        if sh.gleam_expected(r):
            r.gleam = HalfInt(totals[rid])
        else:
            r.gleam = None
    sh.invalidate()


def repair_gleam_parities(sh: Shadow) -> None:
    """Fix half-integer parities against the intrinsic Z/2-gleams by moving
    half units between regions in pairs, so the total gleam is unchanged.
    Regions meeting only internal boundary have no parity constraint and
    may absorb an odd leftover."""
    from .poly import z2_gleam_direct
    wrong = []
    spare = None
    for rid in sorted(sh.regions):
        r = sh.regions[rid]
        if r.gleam is None:
            continue
        if not sh.is_internal(r):
            if spare is None:
                spare = rid
            continue
        if r.gleam.parity != z2_gleam_direct(sh, rid):
            wrong.append(rid)
    if len(wrong) % 2 == 1:
        if spare is None:
            raise LinkError(
                "gleam parities cannot be repaired while preserving the "
                "total; decoration bookkeeping bug")
        wrong.append(spare)
    for a, b in zip(wrong[0::2], wrong[1::2]):
        ra, rb = sh.regions[a], sh.regions[b]
        delta = HalfInt(-1) if ra.gleam.twice > 0 else HalfInt(1)
        ra.gleam = ra.gleam + delta
        rb.gleam = rb.gleam - delta
    sh.invalidate()


def surgery_to_closed_shadow(d: LinkDiagram) -> Shadow:
    """Cap the projection shadow along every component so that the class of
    each capped sphere self-intersects in the component's framing.

    For a knot the cycle space of the capped shadow has rank one and the
    cap gleam is solved exactly from the framing; with several components
    the caps take the framing minus the self-writhe surviving the collapse
    (the cross-linking data lives in the polyhedron, not the gleams)."""
    for comp, fr in d.framings.items():
        if fr.denominator != 1:
            raise LinkError(
                f"component {comp} has rational framing {fr}; expand with "
                f"continued_fraction and a chain of spheres first")
    pl = shadow_from_link_diagram(d)
    survivors = {vid for vid in pl.vertices}
    out = pl
    if len(d.components) == 1:
        cap = _solve_knot_cap(pl, "L0", int(d.framings[0]))
        out = cap_boundary(out, "L0", cap)
    else:
        for comp in sorted(d.framings):
            defect = _surviving_self_writhe(d, survivors, comp)
            gleam = HalfInt.from_int(int(d.framings[comp]) - defect)
            out = cap_boundary(out, f"L{comp}", gleam)
    repair_gleam_parities(out)
    report = validate(out)
    if not report.ok:
        raise LinkError("capped shadow invalid: "
                        + "; ".join(report.violations[:3]))
    if not out.is_closed():
        raise LinkError("capped shadow is not closed")
    return out


def integer_cycle_basis(sh: Shadow):
    """Primitive integer kernel of the signed edge/region incidence (rows:
    interior edges, columns: gleam-carrying regions)."""
    rids = [rid for rid in sorted(sh.regions)
            if sh.regions[rid].gleam is not None]
    eids = [e.id for e in sh.interior_edges()]
    if not rids:
        return rids, []
    rows = []
    for eid in eids:
        row = []
        for rid in rids:
            total = 0
            for circ in sh.regions[rid].circuits:
                for p in circ:
                    if p.edge == eid:
                        total += p.sign
            row.append(Fraction(total))
        rows.append(row)
    basis = _rational_kernel(rows, len(rids))
    out = []
    for vec in basis:
        denom = 1
        for x in vec:
            denom = denom * x.denominator // _gcd(denom, x.denominator)
        ints = [int(x * denom) for x in vec]
        g = 0
        for x in ints:
            g = _gcd(g, abs(x))
        if g > 1:
            ints = [x // g for x in ints]
        out.append(ints)
    return rids, out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _rational_kernel(rows, n_cols):
    from fractions import Fraction as F
    m = [row[:] for row in rows]
    pivots = {}
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        m[r] = [x / m[r][c] for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots[c] = r
        r += 1
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [F(0)] * n_cols
        vec[fc] = F(1)
        for pc, pr in pivots.items():
            vec[pc] = -m[pr][fc]
        basis.append(vec)
    return basis


def _solve_knot_cap(pl: Shadow, circle: str, framing: int) -> HalfInt:
    """Cap gleam making the generator cycle self-intersect in the framing."""
    collar = _circle_owner(pl, circle).id
    rids, basis = integer_cycle_basis(pl)
    if len(basis) != 1:
        raise LinkError(
            f"knot shadow has cycle rank {len(basis)}, expected 1")
    vec = basis[0]
    idx = rids.index(collar)
    a_collar = vec[idx]
    if a_collar == 0:
        raise LinkError("collar region missing from the generator cycle")
    rest = Fraction(0)
    for rid, a in zip(rids, vec):
        if rid == collar:
            continue
        g = pl.regions[rid].gleam
        rest += a * a * g.as_fraction()
    # collar and cap merge: (framing - rest) = a^2 * (g_collar + cap)
    target = (Fraction(framing) - rest) / (a_collar * a_collar)
    g_collar = pl.regions[collar].gleam.as_fraction()
    cap = target - g_collar
    if cap.denominator not in (1, 2):
        raise LinkError(
            f"no half-integer cap realizes framing {framing} on this "
            f"presentation")
    return HalfInt(int(cap * 2))


def _surviving_self_writhe(d: LinkDiagram, survivors, comp: int) -> int:
    total = 0
    for k, x in enumerate(d.crossings):
        if f"x{k}" not in survivors:
            continue
        a, b, c, dd = x.arcs
        if d.component_of(a) == comp and d.component_of(b) == comp:
            total += x.sign
    return total


# ---------------------------------------------------------------------------
# continued fractions and chains of spheres
# ---------------------------------------------------------------------------

def continued_fraction(r: Fraction) -> List[int]:
    """The minus expansion r = a0 - 1/(a1 - 1/(... - 1/an)) in canonical
    form, a_i >= 2 for i >= 1."""
    r = Fraction(r)
    out: List[int] = []
    while True:
        a = -((-r.numerator) // r.denominator)  # ceil
        out.append(int(a))
        rem = a - r
        if rem == 0:
            return out
        r = 1 / rem


def evaluate_chain(coefficients: List[int]) -> Fraction:
    """Evaluate the minus expansion exactly."""
    if not coefficients:
        raise LinkError("empty chain")
    value = Fraction(coefficients[-1])
    for a in reversed(coefficients[:-1]):
        if value == 0:
            raise LinkError("chain evaluation hits a zero tail")
        value = a - 1 / value
    return value


@dataclass
class ChainSpec:
    coefficients: List[int]
    target: Fraction

    @classmethod
    def of(cls, r: Fraction) -> "ChainSpec":
        coeffs = continued_fraction(r)
        if evaluate_chain(coeffs) != Fraction(r):
            raise LinkError("continued fraction expansion failed to "
                            "round-trip")
        return cls(coeffs, Fraction(r))


def hopf_chain(n: int, gleams: List[HalfInt], cap_start: bool = True,
               cap_end: bool = True) -> Shadow:
    """A chain of n Hopf blocks: spheres meeting consecutively in single
    points, carrying the given gleams; the two chain ends are capped or
    left as external circle boundary."""
    if n < 1 or len(gleams) != n:
        raise LinkError("need n >= 1 gleams for the chain")
    sh = Shadow()
    for j in range(1, n + 1):
        sh.edges[f"c{j}"] = Edge(f"c{j}", "circle", None)
    # Y_j regions connect circle j to circle j+1; D_j is the disk on c_j
    for j in range(1, n + 1):
        sh.regions[f"D{j}"] = Region(f"D{j}", True, 0, gleams[j - 1],
                                     [[Pass(f"c{j}", 0, 1)]])
    for j in range(0, n + 1):
        circuits = []
        if j >= 1:
            circuits.append([Pass(f"c{j}", 2, 1)])
        if j + 1 <= n:
            circuits.append([Pass(f"c{j + 1}", 1, 1)])
        gleam: Optional[HalfInt] = ZERO
        if j == 0 and not cap_start:
            sh.edges["l_start"] = Edge("l_start", "circle", "e")
            circuits.append([Pass("l_start", 0, 1)])
            gleam = None
        if j == n and not cap_end:
            sh.edges["l_end"] = Edge("l_end", "circle", "e")
            circuits.append([Pass("l_end", 0, 1)])
            gleam = None
        rid = f"Y{j}"
        sh.regions[rid] = Region(rid, True, 0, gleam, circuits)
    report = validate(sh)
    if not report.ok:
        raise LinkError("chain shadow invalid: "
                        + "; ".join(report.violations[:3]))
    return sh


# ---------------------------------------------------------------------------
# torus gluing
# ---------------------------------------------------------------------------

def torus_glue(p1: Shadow, l1: str, p2: Shadow, l2: str,
               gluing: Tuple[Tuple[int, int], Tuple[int, int]]) -> Shadow:
    """Glue two shadows along e-colored circle boundary components of torus
    type.  ``gluing`` sends (meridian, longitude) of the second torus into
    the first torus's basis: its first column (a, b) is the image of the
    meridian, so the inserted chain realizes the slope a/b.  Determinant
    must be -1 (orientation conventions as in surgery presentations)."""
    (a, c), (b, dd) = gluing
    if a * dd - b * c != -1:
        raise LinkError("gluing matrix must have determinant -1")
    _check_torus_boundary(p1, l1)
    _check_torus_boundary(p2, l2)
    if b == 0:
        # meridian to meridian: direct gluing, no spheres inserted
        return _glue_circles(p1, l1, p2, l2)
    slope = Fraction(a, b)
    spec = ChainSpec.of(slope)
    chain = hopf_chain(len(spec.coefficients),
                       [HalfInt.from_int(k) for k in spec.coefficients],
                       cap_start=False, cap_end=False)
    step = _glue_circles(p1, l1, chain, "l_start", prefix2="C.")
    return _glue_circles(step, "C.l_end", p2, l2)


def _check_torus_boundary(sh: Shadow, eid: str) -> None:
    e = sh.edges.get(eid)
    if e is None or e.kind != "circle" or e.color != "e":
        raise ShadowError(
            f"gluing target {eid} is not an e-colored circle boundary")


def _glue_circles(p1: Shadow, l1: str, p2: Shadow, l2: str,
                  prefix2: str = "G.") -> Shadow:
    """Identify two e-colored boundary circles; the circle dissolves and
    the two attached regions merge."""
    _check_torus_boundary(p1, l1)
    _check_torus_boundary(p2, l2)
    out = p1.copy()
    ren = {}
    for v in p2.vertices.values():
        nid = prefix2 + v.id
        out.vertices[nid] = Vertex(nid, tuple((prefix2 + e, k)
                                              for e, k in v.ends))
    for n in p2.nodes.values():
        nid = prefix2 + n.id
        from .poly import BNode
        out.nodes[nid] = BNode(nid, tuple((prefix2 + e, k)
                                          for e, k in n.ends))
    for e in p2.edges.values():
        out.edges[prefix2 + e.id] = Edge(prefix2 + e.id, e.kind, e.color)
    for r in p2.regions.values():
        out.regions[prefix2 + r.id] = Region(
            prefix2 + r.id, r.orientable, r.genus, r.gleam,
            [[Pass(prefix2 + p.edge, p.wing, p.sign) for p in circ]
             for circ in r.circuits])
    l2 = prefix2 + l2
    r1 = _circle_owner(out, l1)
    r2 = _circle_owner(out, l2)
    if r1.id == r2.id:
        raise ShadowError("gluing a boundary circle to its own region is "
                          "not supported")
    # drop the two boundary circuits and merge the regions
    r1.circuits = [circ for circ in r1.circuits
                   if not any(p.edge == l1 for p in circ)]
    moved = [circ for circ in r2.circuits
             if not any(p.edge == l2 for p in circ)]
    r1.circuits.extend(moved)
    chi = r1.euler() + r2.euler()  # circle gluing: chi adds
    b = r1.n_boundary + len(moved) - 1
    orientable = r1.orientable and r2.orientable
    genus = (2 - chi - b) // 2 if orientable else 2 - chi - b
    if orientable and (2 - chi - b) % 2:
        raise ShadowError("torus gluing produced inconsistent topology")
    r1.orientable = orientable
    r1.genus = max(genus, 0)
    if r1.gleam is not None and r2.gleam is not None:
        r1.gleam = r1.gleam + r2.gleam
    elif r2.gleam is not None:
        r1.gleam = r2.gleam
    del out.regions[r2.id]
    del out.edges[l1]
    del out.edges[l2]
    out.invalidate()
    if out.gleam_expected(r1) and r1.gleam is None:
        r1.gleam = ZERO
    out.invalidate()
    report = validate(out)
    if not report.ok:
        raise ShadowError("torus gluing produced an invalid shadow: "
                          + "; ".join(report.violations[:3]))
    return out


def _circle_owner(sh: Shadow, eid: str) -> Region:
    for r in sorted(sh.regions.values(), key=lambda x: x.id):
        for circ in r.circuits:
            if any(p.edge == eid for p in circ):
                if len(circ) != 1:
                    raise ShadowError(f"boundary circle {eid} is not free")
                return r
    raise ShadowError(f"boundary circle {eid} carries no region")


# ---------------------------------------------------------------------------
# standard diagrams and a random supply of them
# ---------------------------------------------------------------------------

HOPF_PD = "X 1 4 2 3 +\nX 3 2 4 1 +\nframe 0 0\nframe 1 0\n"

FIGURE_EIGHT_PD = ("X 4 2 5 1 -\nX 8 6 1 5 -\nX 6 3 7 4 +\nX 2 7 3 8 +\n"
                   "frame 0 0\n")


def kink_unknot(p: int) -> LinkDiagram:
    """An unknot diagram made of |p| consecutive kinks of sign(p)."""
    if p == 0:
        return parse_pd("frame 0 0\n")
    n = abs(p)
    lines = []
    for k in range(1, n + 1):
        under_in = 2 * k - 1
        loop = 2 * k
        out = 1 if k == n else 2 * k + 1
        if p > 0:
            lines.append(f"X {under_in} {loop} {loop} {out} +")
        else:
            lines.append(f"X {under_in} {out} {loop} {loop} -")
    lines.append("frame 0 0")
    lines.append("outer 1 l" if p > 0 else "outer 1 r")
    return parse_pd("\n".join(lines) + "\n")


def braid_closure_pd(word: List[int], strands: int) -> str:
    """PD code of the closure of a braid word (generator g crosses columns
    g-1 and g; positive: the left strand passes over).  Strands run
    downward; the closure joins each bottom column to its top."""
    if not word or strands < 2:
        raise LinkError("need a nonempty word on at least 2 strands")
    if any(not (1 <= abs(g) <= strands - 1) for g in word):
        raise LinkError("braid word uses generators outside the strand count")
    rows = len(word)

    def step(r: int, col: int) -> int:
        g = abs(word[r])
        if col == g - 1:
            return g
        if col == g:
            return g - 1
        return col

    perm = {}
    for col in range(strands):
        cur = col
        for r in range(rows):
            cur = step(r, cur)
        perm[col] = cur
    comps = []
    seen = set()
    for col in range(strands):
        if col in seen:
            continue
        cyc = [col]
        seen.add(col)
        nxt = perm[col]
        while nxt != col:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        comps.append(cyc)
    seg: Dict[Tuple[int, int], int] = {}
    arc = 1
    for cyc in comps:
        start_arc = arc
        col = cyc[0]
        r = 0
        involvements = 0
        for _ in range(rows * len(cyc)):
            seg[(r, col)] = arc
            g = abs(word[r])
            if col in (g - 1, g):
                arc += 1
                involvements += 1
            col = step(r, col)
            r = (r + 1) % rows
        if involvements == 0:
            raise LinkError("a closed strand avoids every crossing; "
                            "crossingless components are not expressible")
        # the wrap segment was labeled start_arc on first visit; the counter
        # overshoots by one
        arc -= 1
        for key, v in list(seg.items()):
            if v == arc + 1:
                seg[key] = start_arc
        arc += 1 if False else 0
        arc = start_arc + involvements
    lines = []
    for r, gs in enumerate(word):
        g = abs(gs)
        nr = (r + 1) % rows
        in_l = seg[(r, g - 1)]
        in_r = seg[(r, g)]
        out_l = seg[(nr, g - 1)]
        out_r = seg[(nr, g)]
        if gs > 0:
            lines.append(f"X {in_r} {in_l} {out_l} {out_r} +")
        else:
            lines.append(f"X {in_l} {out_l} {out_r} {in_r} -")
    for ci in range(len(comps)):
        lines.append(f"frame {ci} 0")
    return "\n".join(lines) + "\n"


def random_knot_diagram(rng, max_crossings: int = 8) -> LinkDiagram:
    """A random one-component diagram as a braid closure."""
    for _attempt in range(200):
        strands = rng.randint(2, 4)
        length = rng.randint(max(2, strands), max_crossings)
        word = []
        for _ in range(length):
            g = rng.randint(1, strands - 1)
            word.append(g if rng.below(2) == 0 else -g)
        cols = {abs(g) - 1 for g in word} | {abs(g) for g in word}
        if cols != set(range(strands)):
            continue
        try:
            d = parse_pd(braid_closure_pd(word, strands))
        except LinkError:
            continue
        if len(d.components) == 1:
            return d
    raise LinkError("random diagram generation failed")
