"""shadow/1 parsing, serialization, and isomorphism round-trips."""

import pytest

from shadowcalc.canon import is_isomorphic, signature
from shadowcalc.halfint import HalfInt
from shadowcalc.poly import hopf_polyhedron, sphere_shadow, validate
from shadowcalc.polyio import FormatError, parse_shadow, serialize_shadow
from shadowcalc.prng import SplitMix64
from shadowcalc.tri import boundary_of_4_simplex, dual_spine_shadow


def corpus():
    return [
        sphere_shadow(HalfInt.from_int(2)),
        hopf_polyhedron(),
        dual_spine_shadow(boundary_of_4_simplex()),
    ]


def test_round_trip_bytes():
    for sh in corpus():
        text = serialize_shadow(sh)
        again = serialize_shadow(parse_shadow(text))
        assert text == again


def test_round_trip_isomorphic():
    for sh in corpus():
        back = parse_shadow(serialize_shadow(sh))
        assert validate(back).ok == validate(sh).ok
        assert is_isomorphic(sh, back)


def relabel(sh, rng):
    """Rename all cells, permute vertex numberings and rotate circuits."""
    text = serialize_shadow(sh)
    out = parse_shadow(text)
    mapping = {}
    for kind, table in (("v", out.vertices), ("e", out.edges),
                        ("r", out.regions), ("n", out.nodes)):
        ids = sorted(table)
        shuffled = list(ids)
        rng.shuffle(shuffled)
        for old, new in zip(ids, shuffled):
            mapping[old] = f"{kind}_{new}"
    sh2 = parse_shadow(text)
    renamed = type(sh2)()
    for vid, v in sh2.vertices.items():
        ends = tuple((mapping[e], k) for e, k in v.ends)
        renamed.vertices[mapping[vid]] = type(v)(mapping[vid], ends)
    for nid, n in sh2.nodes.items():
        ends = tuple((mapping[e], k) for e, k in n.ends)
        renamed.nodes[mapping[nid]] = type(n)(mapping[nid], ends)
    for eid, e in sh2.edges.items():
        renamed.edges[mapping[eid]] = type(e)(mapping[eid], e.kind, e.color)
    for rid, r in sh2.regions.items():
        circuits = []
        for circ in r.circuits:
            k = rng.below(len(circ))
            rotated = circ[k:] + circ[:k]
            circuits.append([type(p)(mapping[p.edge], p.wing, p.sign)
                             for p in rotated])
        renamed.regions[mapping[rid]] = type(r)(
            mapping[rid], r.orientable, r.genus, r.gleam, circuits)
    return renamed


def test_isomorphism_invariant_under_relabeling():
    rng = SplitMix64(7)
    for sh in corpus():
        other = relabel(sh, rng)
        assert signature(sh) == signature(other)
        assert is_isomorphic(sh, other)


def test_non_isomorphic_detected():
    a = sphere_shadow(HalfInt.from_int(2))
    b = sphere_shadow(HalfInt.from_int(3))
    assert not is_isomorphic(a, b)


def test_parser_rejects_unknown_directive():
    with pytest.raises(FormatError):
        parse_shadow("shadow/1\nwidget w0\n")


def test_parser_rejects_missing_header():
    with pytest.raises(FormatError):
        parse_shadow("region r0 or 0 gleam 0 circuits\n")


def test_parser_rejects_bad_circuit():
    with pytest.raises(FormatError):
        parse_shadow("shadow/1\nedge c circle\n"
                     "region r or 0 gleam 0 circuits (c;0;+)\n")
