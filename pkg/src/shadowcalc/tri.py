"""Delta-triangulations of 3-manifolds.

A triangulation is a set of abstract tetrahedra with faces glued in pairs.
Face ``f`` of a tetrahedron is the one opposite local vertex ``f``; a
gluing stores the full 4-label correspondence (face vertices onto face
vertices, opposite vertex onto opposite vertex).  Vertex classes may be
flagged ideal, in which case the triangulated object is M/dM and the flag
marks a collapsed boundary component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from .prng import SplitMix64

FACES = (0, 1, 2, 3)


class TriError(Exception):
    pass


def face_vertices(f: int) -> Tuple[int, int, int]:
    return tuple(v for v in range(4) if v != f)


def perm_sign(p: Tuple[int, int, int, int]) -> int:
    sign = 1
    q = list(p)
    for i in range(4):
        while q[i] != i:
            j = q[i]
            q[i], q[j] = q[j], q[i]
            sign = -sign
    return sign


def invert(p: Tuple[int, int, int, int]) -> Tuple[int, int, int, int]:
    out = [0] * 4
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


@dataclass
class Gluing:
    tet: str
    face: int
    perm: Tuple[int, int, int, int]  # full label map, perm[face_of_self] = face_of_other


class Triangulation3:
    def __init__(self):
        self.tets: List[str] = []
        self.glue: Dict[Tuple[str, int], Gluing] = {}
        self.ideal_reps: Set[Tuple[str, int]] = set()

    # -- construction ------------------------------------------------------

    def add_tet(self, tid: Optional[str] = None) -> str:
        if tid is None:
            k = len(self.tets)
            while f"t{k}" in self.tets:
                k += 1
            tid = f"t{k}"
        if tid in self.tets:
            raise TriError(f"duplicate tet {tid}")
        self.tets.append(tid)
        return tid

    def add_gluing(self, t1: str, f1: int, t2: str, f2: int,
                   perm: Tuple[int, int, int, int]) -> None:
        if perm[f1] != f2 or sorted(perm) != [0, 1, 2, 3]:
            raise TriError(f"bad gluing permutation {perm} for faces {f1},{f2}")
        if (t1, f1) == (t2, f2):
            raise TriError(f"face ({t1},{f1}) glued to itself")
        for key in ((t1, f1), (t2, f2)):
            if key in self.glue:
                raise TriError(f"face {key} glued twice")
        self.glue[(t1, f1)] = Gluing(t2, f2, perm)
        self.glue[(t2, f2)] = Gluing(t1, f1, invert(perm))

    def remove_tet(self, tid: str) -> None:
        self.tets.remove(tid)
        for key in [k for k in self.glue if k[0] == tid]:
            g = self.glue.pop(key)
            self.glue.pop((g.tet, g.face), None)

    def copy(self) -> "Triangulation3":
        out = Triangulation3()
        out.tets = list(self.tets)
        out.glue = {k: Gluing(g.tet, g.face, g.perm)
                    for k, g in self.glue.items()}
        out.ideal_reps = set(self.ideal_reps)
        return out

    # -- basic census --------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.tets)

    def is_closed_complex(self) -> bool:
        return len(self.glue) == 4 * len(self.tets)

    def vertex_classes(self) -> Dict[Tuple[str, int], int]:
        """Union-find over tetrahedron corners; returns corner -> class id."""
        uf = _UF([(t, v) for t in self.tets for v in range(4)])
        for (t1, f1), g in self.glue.items():
            for v in face_vertices(f1):
                uf.union((t1, v), (g.tet, g.perm[v]))
        return uf.classes()

    def ideal_classes(self) -> Set[int]:
        classes = self.vertex_classes()
        return {classes[rep] for rep in self.ideal_reps}

    def edge_classes(self) -> Dict[Tuple[str, Tuple[int, int]], int]:
        germs = [(t, (a, b)) for t in self.tets
                 for a in range(4) for b in range(a + 1, 4)]
        uf = _UF(germs)
        for (t1, f1), g in self.glue.items():
            vs = face_vertices(f1)
            for i in range(3):
                for j in range(i + 1, 3):
                    a, b = vs[i], vs[j]
                    x, y = g.perm[a], g.perm[b]
                    uf.union((t1, (a, b)), (g.tet, (min(x, y), max(x, y))))
        return uf.classes()

    def edge_endpoints(self, germ) -> Tuple[int, int]:
        classes = self.vertex_classes()
        t, (a, b) = germ
        return classes[(t, a)], classes[(t, b)]

    def edge_valences(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for cls in self.edge_classes().values():
            counts[cls] = counts.get(cls, 0) + 1
        return counts

    def orientation_signs(self) -> Optional[Dict[str, int]]:
        """Consistent tetrahedron signs, or None if non-orientable."""
        signs: Dict[str, int] = {}
        for root in self.tets:
            if root in signs:
                continue
            signs[root] = 1
            queue = [root]
            while queue:
                t = queue.pop()
                for f in FACES:
                    g = self.glue.get((t, f))
                    if g is None:
                        continue
                    want = -signs[t] * perm_sign(g.perm)
                    if g.tet not in signs:
                        signs[g.tet] = want
                        queue.append(g.tet)
                    elif signs[g.tet] != want:
                        return None
        return signs

    def is_orientable(self) -> bool:
        return self.orientation_signs() is not None

    def vertex_link_eulers(self) -> Dict[int, int]:
        """Euler characteristic of the link surface of each vertex class."""
        classes = self.vertex_classes()
        tri_count: Dict[int, int] = {}
        for t in self.tets:
            for v in range(4):
                c = classes[(t, v)]
                tri_count[c] = tri_count.get(c, 0) + 1
        # link edges: sides (t, v, f) with v on face f
        side_uf = _UF([(t, v, f) for t in self.tets for v in range(4)
                       for f in FACES if f != v])
        # link vertices: corners (t, v, w) with w != v (edge germ directions)
        corner_uf = _UF([(t, v, w) for t in self.tets for v in range(4)
                         for w in range(4) if w != v])
        for (t1, f1), g in self.glue.items():
            for v in face_vertices(f1):
                side_uf.union((t1, v, f1), (g.tet, g.perm[v], g.face))
                for w in face_vertices(f1):
                    if w != v:
                        corner_uf.union((t1, v, w), (g.tet, g.perm[v], g.perm[w]))
        side_classes = side_uf.classes()
        corner_classes = corner_uf.classes()
        e_count: Dict[int, Set[int]] = {}
        v_count: Dict[int, Set[int]] = {}
        for (t, v, f), cls in side_classes.items():
            e_count.setdefault(classes[(t, v)], set()).add(cls)
        for (t, v, w), cls in corner_classes.items():
            v_count.setdefault(classes[(t, v)], set()).add(cls)
        out = {}
        for c, faces in tri_count.items():
            out[c] = len(v_count.get(c, set())) - len(e_count.get(c, set())) \
                + faces
        return out

    def is_manifold_closed(self) -> bool:
        if not self.is_closed_complex():
            return False
        return all(chi == 2 for chi in self.vertex_link_eulers().values())

    def homology_h1(self) -> Tuple[int, List[int]]:
        """(betti number, torsion invariant factors > 1) of H_1."""
        edge_cls = self.edge_classes()
        vert_cls = self.vertex_classes()
        edge_sign = _signed_edge_classes(self)
        face_ids: Dict[Tuple[str, int], int] = {}
        seen = set()
        for (t, f) in sorted(self.glue):
            g = self.glue[(t, f)]
            if (g.tet, g.face, t, f) in seen:
                continue
            seen.add((t, f, g.tet, g.face))
            face_ids[(t, f)] = len(face_ids)
        n_e = max(edge_cls.values()) + 1 if edge_cls else 0
        n_v = max(vert_cls.values()) + 1 if vert_cls else 0
        d2 = [[0] * len(face_ids) for _ in range(n_e)]
        for (t, f), col in face_ids.items():
            vs = face_vertices(f)
            x, y, z = vs
            for (u, v), coef in (((y, z), 1), ((x, z), -1), ((x, y), 1)):
                cls, sgn = edge_sign[(t, (u, v))]
                d2[cls][col] += coef * sgn
        d1 = [[0] * n_e for _ in range(n_v)]
        for germ, (cls, sgn) in edge_sign.items():
            pass
        reps: Dict[int, Tuple[str, Tuple[int, int]]] = {}
        for germ, (cls, sgn) in edge_sign.items():
            if sgn == 1 and cls not in reps:
                reps[cls] = germ
        for cls, (t, (a, b)) in reps.items():
            d1[vert_cls[(t, b)]][cls] += 1
            d1[vert_cls[(t, a)]][cls] -= 1
        r1 = _int_rank([row[:] for row in d1])
        diag = _smith_diagonal([row[:] for row in d2])
        r2 = len(diag)
        betti = n_e - r1 - r2
        torsion = [d for d in diag if abs(d) > 1]
        return betti, sorted(abs(d) for d in torsion)

    # -- text format ---------------------------------------------------------

    def serialize(self) -> str:
        out = ["tri/1"]
        for t in self.tets:
            out.append(f"tet {t}")
        done = set()
        for (t, f) in sorted(self.glue):
            if (t, f) in done:
                continue
            g = self.glue[(t, f)]
            done.add((t, f))
            done.add((g.tet, g.face))
            token = "".join(str(g.perm[v]) for v in face_vertices(f))
            out.append(f"glue {t} {f} {g.tet} {g.face} {token}")
        classes = self.vertex_classes()
        flagged = set()
        for rep in sorted(self.ideal_reps):
            cls = classes[rep]
            if cls in flagged:
                continue
            flagged.add(cls)
            canonical = min(k for k, c in classes.items() if c == cls)
            out.append(f"ideal {canonical[0]}.{canonical[1]}")
        return "\n".join(out) + "\n"


def parse_triangulation(text: str) -> Triangulation3:
    tri = Triangulation3()
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "tri/1":
        raise TriError("missing tri/1 header")
    pending_ideal = []
    for line in lines[1:]:
        tok = line.split()
        if tok[0] == "tet":
            if len(tok) != 2:
                raise TriError(f"bad tet line: {line}")
            tri.add_tet(tok[1])
        elif tok[0] == "glue":
            if len(tok) != 6:
                raise TriError(f"bad glue line: {line}")
            t1, f1, t2, f2, images = tok[1], int(tok[2]), tok[3], int(tok[4]), tok[5]
            if t1 not in tri.tets or t2 not in tri.tets:
                raise TriError(f"glue references unknown tet: {line}")
            if f1 not in FACES or f2 not in FACES:
                raise TriError(f"bad face index: {line}")
            if len(images) != 3 or not images.isdigit():
                raise TriError(f"bad permutation token {images!r}")
            perm = [None] * 4
            for v, ch in zip(face_vertices(f1), images):
                perm[v] = int(ch)
            perm[f1] = f2
            if sorted(perm) != [0, 1, 2, 3]:
                raise TriError(f"permutation not a bijection: {line}")
            tri.add_gluing(t1, f1, t2, f2, tuple(perm))
        elif tok[0] == "ideal":
            if len(tok) != 2 or "." not in tok[1]:
                raise TriError(f"bad ideal line: {line}")
            t, v = tok[1].rsplit(".", 1)
            pending_ideal.append((t, int(v)))
        else:
            raise TriError(f"unknown directive {tok[0]!r}")
    for (t, v) in pending_ideal:
        if t not in tri.tets or v not in range(4):
            raise TriError(f"ideal flag references unknown corner {t}.{v}")
        tri.ideal_reps.add((t, v))
    return tri


# -- operations ---------------------------------------------------------------


def check_edge_distinct(tri: Triangulation3) -> bool:
    """True when the two endpoint vertex classes of every edge differ."""
    classes = tri.vertex_classes()
    for t in tri.tets:
        for a in range(4):
            for b in range(a + 1, 4):
                if classes[(t, a)] == classes[(t, b)]:
                    return False
    return True


def barycentric_subdivision(tri: Triangulation3) -> Triangulation3:
    """The 24-fold subdivision; always edge-distinct.

    Small tetrahedra are indexed by flags (v, e, f): local vertex v in
    edge e in face f of a tetrahedron; local labels 0,1,2,3 of a small tet
    are the barycenters of v, e, f and the tetrahedron itself.
    """
    out = Triangulation3()
    names: Dict[Tuple[str, int, Tuple[int, int], int], str] = {}
    flags = []
    for t in tri.tets:
        for f in FACES:
            for e in _edges_of_face(f):
                for v in e:
                    flags.append((t, v, e, f))
    for flag in flags:
        names[flag] = out.add_tet(f"{flag[0]}.{flag[1]}{flag[2][0]}{flag[2][1]}{flag[3]}")

    def glue_flags(fl1, fl2, corr):
        # corr: map of small-tet labels, by barycenter role (0=v,1=e,2=f,3=t)
        t1, t2 = names[fl1], names[fl2]
        face1 = next(k for k in FACES if k not in [corr_pos for corr_pos, _ in corr])
        perm = [None] * 4
        for a, b in corr:
            perm[a] = b
        face2 = next(k for k in FACES if k not in [b for _, b in corr])
        perm[face1] = face2
        key = (min((t1, face1), (t2, face2)), max((t1, face1), (t2, face2)))
        if (key[0][0], key[0][1]) in out.glue:
            return
        out.add_gluing(t1, face1, t2, face2, tuple(perm))

    for t in tri.tets:
        for f in FACES:
            for e in _edges_of_face(f):
                for v in e:
                    fl = (t, v, e, f)
                    # across the v-barycenter: other vertex of e
                    v2 = e[0] if e[1] == v else e[1]
                    glue_flags(fl, (t, v2, e, f), [(1, 1), (2, 2), (3, 3)])
                    # across the e-barycenter: other edge of f through v
                    e2 = next(x for x in _edges_of_face(f) if v in x and x != e)
                    glue_flags(fl, (t, v, e2, f), [(0, 0), (2, 2), (3, 3)])
                    # across the f-barycenter: other face of t containing e
                    f2 = next(x for x in FACES
                              if x != f and e in _edges_of_face(x))
                    glue_flags(fl, (t, v, e, f2), [(0, 0), (1, 1), (3, 3)])
    # external gluings across original faces
    for (t1, f1), g in tri.glue.items():
        for e in _edges_of_face(f1):
            for v in e:
                fl1 = (t1, v, e, f1)
                img_e = tuple(sorted((g.perm[e[0]], g.perm[e[1]])))
                fl2 = (g.tet, g.perm[v], img_e, g.face)
                t1n, t2n = names[fl1], names[fl2]
                if (t1n, 3) in out.glue:
                    continue
                out.add_gluing(t1n, 3, t2n, 3, (0, 1, 2, 3))
    # ideal flags carry over to the vertex barycenters
    for (t, v) in tri.ideal_reps:
        f = next(x for x in FACES if x != v)
        e = next(x for x in _edges_of_face(f) if v in x)
        out.ideal_reps.add((names[(t, v, e, f)], 0))
    return out


def _edges_of_face(f: int):
    vs = face_vertices(f)
    return [tuple(sorted((vs[i], vs[j]))) for i in range(3)
            for j in range(i + 1, 3)]


def boundary_of_4_simplex() -> Triangulation3:
    """The 5-tetrahedron 2-vertex-distinct triangulation of S^3."""
    tri = Triangulation3()
    for i in range(5):
        tri.add_tet(f"t{i}")
    # tet i has global vertices {0..4} minus i, in sorted order
    globals_of = {i: [v for v in range(5) if v != i] for i in range(5)}
    for i in range(5):
        for j in range(i + 1, 5):
            # shared face: complement of {i, j}
            li = globals_of[i]
            lj = globals_of[j]
            perm = [None] * 4
            for pos, gv in enumerate(li):
                target = i if gv == j else gv
                perm[pos] = lj.index(target)
            f1 = li.index(j)
            f2 = lj.index(i)
            tri.add_gluing(f"t{i}", f1, f"t{j}", f2, tuple(perm))
    return tri


# -- Pachner moves (used by generators and the size-bound search) ------------


def pachner_1_4(tri: Triangulation3, tet: str) -> Triangulation3:
    out = tri.copy()
    outer = {f: out.glue.get((tet, f)) for f in FACES}
    out.remove_tet(tet)
    names = {k: out.add_tet() for k in FACES}
    for k in FACES:
        for j in FACES:
            if j <= k:
                continue
            # n_k and n_j share the face opposite j in n_k / opposite k in n_j
            perm = [None] * 4
            for x in range(4):
                if x == j:
                    perm[x] = k
                elif x == k:
                    perm[x] = j
                else:
                    perm[x] = x
            out.add_gluing(names[k], j, names[j], k, tuple(perm))
    for f in FACES:
        g = outer[f]
        if g is None:
            continue
        if g.tet == tet:
            # tet was glued to itself: reconnect the two new outer faces
            if (names[f], f) in out.glue:
                continue
            out.add_gluing(names[f], f, names[g.face], g.face, g.perm)
        else:
            out.add_gluing(names[f], f, g.tet, g.face, g.perm)
    return out


def pachner_2_3(tri: Triangulation3, tet: str, face: int) -> Optional[Triangulation3]:
    g = tri.glue.get((tet, face))
    if g is None or g.tet == tet:
        return None
    out = tri.copy()
    t1, f1, t2, f2, p = tet, face, g.tet, g.face, g.perm
    abc = face_vertices(f1)
    outer: Dict[Tuple[str, int], Optional[Gluing]] = {}
    for z in abc:
        outer[(t1, z)] = out.glue.get((t1, z))
        outer[(t2, p[z])] = out.glue.get((t2, p[z]))
    out.remove_tet(t1)
    if t2 in out.tets:
        out.remove_tet(t2)
    pairs = [(abc[0], abc[1]), (abc[0], abc[2]), (abc[1], abc[2])]
    name: Dict[Tuple[int, int], str] = {pr: out.add_tet() for pr in pairs}
    third = {pr: next(z for z in abc if z not in pr) for pr in pairs}
    # local labels of m_P: 0 = min(P), 1 = max(P), 2 = apex of t1, 3 = apex of t2

    def local_of(pr, v):
        return 0 if v == pr[0] else 1

    # internal gluings between the three new tets
    for ia in range(3):
        for ib in range(ia + 1, 3):
            pr1, pr2 = pairs[ia], pairs[ib]
            shared = next(z for z in pr1 if z in pr2)
            u1 = next(z for z in pr1 if z != shared)  # u1 = third[pr2]
            u2 = next(z for z in pr2 if z != shared)
            perm = [None] * 4
            perm[local_of(pr1, shared)] = local_of(pr2, shared)
            perm[2] = 2
            perm[3] = 3
            perm[local_of(pr1, u1)] = local_of(pr2, u2)
            out.add_gluing(name[pr1], local_of(pr1, u1),
                           name[pr2], local_of(pr2, u2), tuple(perm))
    # external faces: opposite label 3 lies on t1, opposite label 2 on t2
    pending: Dict[Tuple[str, int], Tuple[str, int, Tuple[int, ...]]] = {}
    for pr in pairs:
        z = third[pr]
        # to t1: m_pr labels (x, y, D1) -> t1 labels (x, y, f1); opposite: D2 -> z
        m_to_t1 = [None] * 4
        m_to_t1[local_of(pr, pr[0])] = pr[0]
        m_to_t1[local_of(pr, pr[1])] = pr[1]
        m_to_t1[2] = f1
        m_to_t1[3] = z
        pending[(t1, z)] = (name[pr], 3, tuple(m_to_t1))
        m_to_t2 = [None] * 4
        m_to_t2[local_of(pr, pr[0])] = p[pr[0]]
        m_to_t2[local_of(pr, pr[1])] = p[pr[1]]
        m_to_t2[3] = f2
        m_to_t2[2] = p[z]
        pending[(t2, p[z])] = (name[pr], 2, tuple(m_to_t2))
    done = set()
    for old_key, (nt, nf, to_old) in pending.items():
        if old_key in done:
            continue
        og = outer[old_key]
        if og is None:
            continue
        old_to_new = invert(to_old)
        if (og.tet, og.face) in pending:
            # partner face was also on the doomed pair
            nt2, nf2, to_old2 = pending[(og.tet, og.face)]
            comp = tuple(old_to_new[x] for x in range(4))
            perm = [None] * 4
            old2_to_new2 = invert(to_old2)
            for x in range(4):
                perm[x] = old2_to_new2[og.perm[to_old[x]]]
            if (nt, nf) not in out.glue:
                out.add_gluing(nt, nf, nt2, nf2, tuple(perm))
            done.add(old_key)
            done.add((og.tet, og.face))
        else:
            perm = [None] * 4
            for x in range(4):
                perm[x] = og.perm[to_old[x]]
            out.add_gluing(nt, nf, og.tet, og.face, tuple(perm))
            done.add(old_key)
    return out


# -- generators for tests and acceptance --------------------------------------


def random_edge_distinct(rng: SplitMix64, t_max: int) -> Triangulation3:
    """Grow an edge-distinct closed orientable manifold triangulation from
    the boundary of the 4-simplex with random Pachner moves; every move is
    accepted only if the full certificate still holds."""
    tri = boundary_of_4_simplex()
    target = rng.randint(5, max(5, t_max))
    attempts = 0
    while tri.size < target and attempts < 60:
        attempts += 1
        if rng.below(3) == 0 and tri.size + 3 <= t_max:
            t = rng.choice(sorted(tri.tets))
            cand = pachner_1_4(tri, t)
        else:
            t = rng.choice(sorted(tri.tets))
            f = rng.below(4)
            cand = pachner_2_3(tri, t, f)
            if cand is None or cand.size > t_max:
                continue
        if cand.is_manifold_closed() and cand.is_orientable() \
                and check_edge_distinct(cand):
            tri = cand
    return tri


def closed_two_tet_census() -> List[Triangulation3]:
    """All closed orientable manifold gluings of two tetrahedra."""
    out = []
    seen = set()
    perms = _all_perms()
    # face pairing patterns of 2 tets (faces 0..3 of t0 and t1)
    for pairing, perm_choice in _two_tet_pairings(perms):
        tri = Triangulation3()
        tri.add_tet("t0")
        tri.add_tet("t1")
        try:
            for (a, b), perm in zip(pairing, perm_choice):
                if (a[0], a[1]) in tri.glue:
                    raise TriError("dup")
                tri.add_gluing(a[0], a[1], b[0], b[1], perm)
        except TriError:
            continue
        if not tri.is_closed_complex() or not tri.is_manifold_closed() \
                or not tri.is_orientable():
            continue
        key = (tuple(sorted((k, g.tet, g.face, g.perm)
                            for k, g in tri.glue.items())))
        if key in seen:
            continue
        seen.add(key)
        out.append(tri)
    return out


def _two_tet_pairings(perms):
    faces = [("t0", f) for f in FACES] + [("t1", f) for f in FACES]
    pairings = []

    def rec(avail, acc):
        if not avail:
            pairings.append(list(acc))
            return
        a = avail[0]
        for b in avail[1:]:
            if a == b:
                continue
            acc.append((a, b))
            rec([x for x in avail if x not in (a, b)], acc)
            acc.pop()

    rec(faces, [])
    for pairing in pairings:
        yield from _assign_perms(pairing, perms, 0, [])


def _assign_perms(pairing, perms, idx, acc):
    if idx == len(pairing):
        yield pairing, list(acc)
        return
    (t1, f1), (t2, f2) = pairing[idx]
    for p in perms:
        if p[f1] != f2:
            continue
        acc.append(p)
        yield from _assign_perms(pairing, perms, idx + 1, acc)
        acc.pop()


def _all_perms():
    import itertools
    return [p for p in itertools.permutations(range(4))]


def lens_space_triangulations(rng: SplitMix64, max_count: int = 3,
                              t_max: int = 16) -> List[Tuple[str, Triangulation3]]:
    """Edge-distinct triangulations of lens spaces.

    Start from the closed orientable two-tetrahedron census, keep the
    gluings with nontrivial finite cyclic H_1 (at this size those are lens
    spaces), then apply random Pachner moves until the triangulation is
    edge-distinct.  H_1 is recomputed afterwards as a move certificate.
    """
    out = []
    for tri in closed_two_tet_census():
        betti, torsion = tri.homology_h1()
        if betti != 0 or len(torsion) != 1:
            continue
        p = torsion[0]
        fixed = _make_edge_distinct(tri, rng, t_max)
        if fixed is None:
            continue
        b2, t2 = fixed.homology_h1()
        if (b2, t2) != (betti, torsion):
            raise TriError("Pachner moves changed H_1; move engine bug")
        out.append((f"lens-H1-Z{p}", fixed))
        if len(out) >= max_count:
            break
    return out


def _make_edge_distinct(tri: Triangulation3, rng: SplitMix64,
                        t_max: int) -> Optional[Triangulation3]:
    for _attempt in range(40):
        cur = tri
        for _step in range(40):
            if check_edge_distinct(cur):
                return cur
            grown = None
            if cur.size < t_max:
                if rng.below(2) == 0:
                    grown = pachner_1_4(cur, rng.choice(sorted(cur.tets)))
                else:
                    grown = pachner_2_3(cur, rng.choice(sorted(cur.tets)),
                                        rng.below(4))
            if grown is None or grown.size > t_max \
                    or not grown.is_manifold_closed() \
                    or not grown.is_orientable():
                continue
            cur = grown
    return None


def edge_links(tri: Triangulation3):
    """For each edge class: the cyclic walk around the edge.

    Returns a dict class-id -> list of steps, one per tetrahedron germ, in
    cyclic order.  A step is (tet, (a, b), face_in, face_out, w_in, w_out)
    where a < b are the local labels of the edge in this tet, face_in/out
    are the flanking faces crossed entering/leaving, and w_in/w_out are the
    link vertices (the third vertex of each flanking face, as (tet, label)
    corners identifying the placement point via vertex classes)."""
    if not tri.is_closed_complex():
        raise TriError("edge walk needs a closed triangulation")
    classes = tri.edge_classes()
    out: Dict[int, List] = {}
    done: Set[int] = set()
    for t in sorted(tri.tets):
        for a in range(4):
            for b in range(a + 1, 4):
                cls = classes[(t, (a, b))]
                if cls in done:
                    continue
                done.add(cls)
                steps = []
                flank = [x for x in range(4) if x not in (a, b)]
                start = (t, a, b, flank[0])
                cur = start
                while True:
                    t_c, x, y, f_in = cur
                    f_out = next(z for z in range(4)
                                 if z not in (x, y, f_in))
                    # the third vertex of a flanking face is the label not
                    # on the edge and not opposite the face
                    third_in = f_out
                    third_out = f_in
                    steps.append((t_c, (x, y), f_in, f_out,
                                  (t_c, third_in), (t_c, third_out)))
                    g = tri.glue[(t_c, f_out)]
                    nx, ny = g.perm[x], g.perm[y]
                    cur = (g.tet, min(nx, ny), max(nx, ny), g.face)
                    if cur == start:
                        break
                    if len(steps) > 100000:
                        raise TriError("edge walk failed to close")
                out[cls] = steps
    return out


# -- the dual spine, used as a vertex-rich corpus shadow ----------------------


def dual_spine_shadow(tri: Triangulation3):
    """The dual special spine of a closed triangulation, as a shadow with
    all gleams zero (the shadow of spine-thickening x [-1,1])."""
    from .halfint import HalfInt
    from .poly import Edge, Pass, Region, Shadow, Vertex

    if not tri.is_closed_complex():
        raise TriError("dual spine needs a closed triangulation")
    sh = Shadow()
    # one shadow edge per face class; canonical side = lexicographic minimum
    face_rep: Dict[Tuple[str, int], Tuple[str, int]] = {}
    for (t, f), g in tri.glue.items():
        rep = min((t, f), (g.tet, g.face))
        face_rep[(t, f)] = rep
        face_rep[(g.tet, g.face)] = rep
    reps = sorted(set(face_rep.values()))
    edge_name = {rep: f"E{k}" for k, rep in enumerate(reps)}
    for rep in reps:
        sh.edges[edge_name[rep]] = Edge(edge_name[rep], "interval", None)
    # vertex per tet; end k of the spine edge of face class: 0 on rep side
    for t in sorted(tri.tets):
        ends = []
        for f in FACES:
            rep = face_rep[(t, f)]
            ends.append((edge_name[rep], 0 if (t, f) == rep else 1))
        sh.vertices[f"V{t}"] = Vertex(f"V{t}", tuple(ends))

    def wing_of(side: Tuple[str, int], pair: Tuple[int, int]) -> int:
        """Wing slot of an edge germ inside the face seen from `side`,
        expressed in the representative side's labels."""
        t, f = side
        rep = face_rep[(t, f)]
        if (t, f) != rep:
            g = tri.glue[(t, f)]
            pair = tuple(sorted((g.perm[pair[0]], g.perm[pair[1]])))
        vs = face_vertices(rep[1])
        pairs = sorted(
            (vs[i], vs[j]) for i in range(3) for j in range(i + 1, 3))
        return pairs.index(tuple(sorted(pair)))

    # one region per edge class: walk around the edge
    edge_cls = tri.edge_classes()
    done: Set[int] = set()
    ridx = 0
    for t in sorted(tri.tets):
        for a in range(4):
            for b in range(a + 1, 4):
                cls = edge_cls[(t, (a, b))]
                if cls in done:
                    continue
                done.add(cls)
                circ = _walk_edge(tri, (t, (a, b)), face_rep, edge_name, wing_of)
                rid = f"R{ridx}"
                ridx += 1
                sh.regions[rid] = Region(rid, True, 0, HalfInt(0), [circ])
    return sh


def _walk_edge(tri: Triangulation3, germ, face_rep, edge_name, wing_of):
    from .poly import Pass

    t, (a, b) = germ
    passes = []
    flank = [x for x in range(4) if x not in (a, b)]
    enter_face = flank[0]
    cur = (t, a, b, enter_face)
    while True:
        t_cur, x, y, f_in = cur
        f_out = next(z for z in range(4) if z not in (x, y, f_in))
        side = (t_cur, f_out)
        rep = face_rep[side]
        sign = 1 if side == rep else -1
        passes.append(Pass(edge_name[rep], wing_of(side, (x, y)), sign))
        g = tri.glue[side]
        nxt = (g.tet, g.perm[x], g.perm[y], g.face)
        nx, ny = min(nxt[1], nxt[2]), max(nxt[1], nxt[2])
        cur = (nxt[0], nx, ny, nxt[3])
        if cur == (t, a, b, enter_face):
            break
        if len(passes) > 10000:
            raise TriError("edge walk failed to close")
    return passes


# -- small utilities -----------------------------------------------------------


class _UF:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        p = self.parent[x]
        while p != self.parent[p]:
            p = self.parent[p]
        while x != p:
            self.parent[x], x = p, self.parent[x]
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self):
        ids: Dict = {}
        out = {}
        for x in self.parent:
            r = self.find(x)
            if r not in ids:
                ids[r] = len(ids)
            out[x] = ids[r]
        return out


def _signed_edge_classes(tri: Triangulation3):
    """Edge germ -> (class id, +-1 relative to the class orientation)."""
    germs = [(t, (a, b)) for t in tri.tets
             for a in range(4) for b in range(a + 1, 4)]
    parent = {g: (g, 1) for g in germs}

    def find(x):
        p, s = parent[x]
        if p == x:
            return p, s
        root, s2 = find(p)
        parent[x] = (root, s * s2)
        return parent[x]

    for (t1, f1), g in tri.glue.items():
        vs = face_vertices(f1)
        for i in range(3):
            for j in range(i + 1, 3):
                a, b = vs[i], vs[j]
                x, y = g.perm[a], g.perm[b]
                flip = 1 if x < y else -1
                g1 = (t1, (a, b))
                g2 = (g.tet, (min(x, y), max(x, y)))
                r1, s1 = find(g1)
                r2, s2 = find(g2)
                if r1 != r2:
                    # orient: germ1 ~ flip * germ2
                    parent[r1] = (r2, s1 * s2 * flip)
    ids = {}
    out = {}
    for germ in germs:
        root, sign = find(germ)
        if root not in ids:
            ids[root] = len(ids)
        out[germ] = (ids[root], sign)
    return out


def _int_rank(mat: List[List[int]]) -> int:
    from fractions import Fraction
    m = [[Fraction(x) for x in row] for row in mat]
    rank = 0
    rows = len(m)
    cols = len(m[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                factor = m[i][c] / m[r][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        r += 1
        rank += 1
    return rank


def _smith_diagonal(mat: List[List[int]]) -> List[int]:
    """Nonzero diagonal of the Smith normal form of an integer matrix."""
    m = [row[:] for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    diag = []
    r = c = 0
    while r < rows and c < cols:
        piv = None
        best = None
        for i in range(r, rows):
            for j in range(c, cols):
                if m[i][j] != 0 and (best is None or abs(m[i][j]) < best):
                    best = abs(m[i][j])
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        m[r], m[i] = m[i], m[r]
        for row in m:
            row[c], row[j] = row[j], row[c]
        while True:
            reduced = False
            for i in range(r + 1, rows):
                if m[i][c] != 0:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    if m[i][c] != 0:
                        m[r], m[i] = m[i], m[r]
                        reduced = True
            for j in range(c + 1, cols):
                if m[r][j] != 0:
                    q = m[r][j] // m[r][c]
                    for row in m:
                        row[j] -= q * row[c]
                    if m[r][j] != 0:
                        for row in m:
                            row[c], row[j] = row[j], row[c]
                        reduced = True
            if not reduced:
                break
        diag.append(abs(m[r][c]))
        r += 1
        c += 1
    # enforce divisibility chain
    changed = True
    while changed:
        changed = False
        for i in range(len(diag) - 1):
            a, b = diag[i], diag[i + 1]
            if b % a != 0:
                from math import gcd
                g = gcd(a, b)
                diag[i], diag[i + 1] = g, a * b // g
                changed = True
    return [d for d in diag if d != 0]
