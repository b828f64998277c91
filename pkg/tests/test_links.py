"""PD parsing, the projection construction, chains and torus gluing."""

from fractions import Fraction

import pytest

from shadowcalc.canon import is_isomorphic
from shadowcalc.halfint import HalfInt
from shadowcalc.links import (
    FIGURE_EIGHT_PD, HOPF_PD, ChainSpec, LinkError, braid_closure_pd,
    continued_fraction, evaluate_chain, hopf_chain, integer_cycle_basis,
    kink_unknot, parse_pd, random_knot_diagram, serialize_pd,
    shadow_from_link_diagram, surgery_to_closed_shadow, torus_glue,
)
from shadowcalc.poly import (
    disk_with_boundary, gleam_weight, hopf_polyhedron, stats, validate,
)
from shadowcalc.prng import SplitMix64


def test_parse_hopf():
    d = parse_pd(HOPF_PD)
    assert d.n_crossings == 2
    assert len(d.components) == 2
    assert d.writhe() == 2


def test_parse_rejects_bad_sign():
    with pytest.raises(LinkError):
        parse_pd("X 1 4 2 3 -\nX 3 2 4 1 +\nframe 0 0\nframe 1 0\n")


def test_parse_rejects_triple_arc():
    with pytest.raises(LinkError):
        parse_pd("X 1 1 1 2\nframe 0 0\n")


def test_pd_round_trip():
    for text in (HOPF_PD, FIGURE_EIGHT_PD):
        d = parse_pd(text)
        again = parse_pd(serialize_pd(d))
        assert [x.arcs for x in again.crossings] == \
            [x.arcs for x in d.crossings]
        assert [x.sign for x in again.crossings] == \
            [x.sign for x in d.crossings]


def test_hopf_shadow_no_vertices():
    pl = shadow_from_link_diagram(parse_pd(HOPF_PD))
    assert stats(pl).n_vertices == 0
    assert validate(pl).ok
    assert stats(pl).boundary_census["i"] == 2
    assert is_isomorphic(pl, hopf_polyhedron(), ignore_gleams=True)


def test_figure_eight_shadow_one_vertex():
    pl = shadow_from_link_diagram(parse_pd(FIGURE_EIGHT_PD))
    assert stats(pl).n_vertices == 1
    assert validate(pl).ok
    assert stats(pl).boundary_census["i"] == 1


def test_vertex_count_at_most_crossings():
    rng = SplitMix64(31)
    for _ in range(30):
        d = random_knot_diagram(rng)
        pl = shadow_from_link_diagram(d)
        assert stats(pl).n_vertices <= d.n_crossings
        assert validate(pl).ok


def test_continued_fraction_examples():
    assert continued_fraction(Fraction(3)) == [3]
    assert continued_fraction(Fraction(7, 2)) == [4, 2]
    cf = continued_fraction(Fraction(-5, 3))
    assert evaluate_chain(cf) == Fraction(-5, 3)
    assert all(a >= 2 for a in cf[1:])


def test_continued_fraction_round_trip_random():
    rng = SplitMix64(77)
    for _ in range(1000):
        p = rng.randint(-10**6, 10**6)
        q = rng.randint(1, 10**6)
        r = Fraction(p, q)
        spec = ChainSpec.of(r)
        assert evaluate_chain(spec.coefficients) == r
        assert all(a >= 2 for a in spec.coefficients[1:])


def test_hopf_chain_shapes():
    ch = hopf_chain(1, [HalfInt.from_int(5)])
    assert validate(ch).ok
    assert stats(ch).n_vertices == 0
    ch2 = hopf_chain(2, [HalfInt.from_int(4), HalfInt.from_int(2)])
    assert stats(ch2).n_vertices == 0
    gleams = sorted(r.gleam.twice // 2 for r in ch2.regions.values())
    assert gleams == [0, 0, 0, 2, 4]


def test_torus_glue_direct_and_chain():
    d1 = disk_with_boundary("e")
    d2 = disk_with_boundary("e")
    direct = torus_glue(d1, "b0", d2, "b0", ((1, 0), (0, -1)))
    assert stats(direct).n_vertices == 0
    assert direct.is_closed()
    c, dd = _complete(7, 2)
    sloped = torus_glue(d1, "b0", d2, "b0", ((7, c), (2, dd)))
    assert validate(sloped).ok


def test_torus_glue_chain_length_matches_cf():
    d1 = disk_with_boundary("e")
    d2 = disk_with_boundary("e")
    for (a, b) in ((2, 1), (7, 2), (5, 3), (-4, 3)):
        # complete (a, b) to a determinant -1 matrix
        from math import gcd
        assert gcd(abs(a), abs(b)) == 1
        c, dd = _complete(a, b)
        glued = torus_glue(d1, "b0", d2, "b0", ((a, c), (b, dd)))
        n = len(continued_fraction(Fraction(a, b)))
        # n chain disks, n-1 middles, 2 merged end regions
        assert stats(glued).n_vertices == 0
        assert validate(glued).ok
        assert stats(glued).n_regions == 2 * n + 1


def _complete(a, b):
    # find c, d with a*d - b*c = -1
    for c in range(-50, 51):
        if b == 0:
            continue
        num = a * 0  # placeholder
    for c in range(-50, 51):
        for dd in range(-50, 51):
            if a * dd - b * c == -1:
                return c, dd
    raise AssertionError("no completion found")


def test_torus_glue_vertex_additivity():
    from shadowcalc.tri import boundary_of_4_simplex, dual_spine_shadow
    from shadowcalc.poly import Edge, Pass, Region
    rng = SplitMix64(3)
    for k in range(10):
        sh = dual_spine_shadow(boundary_of_4_simplex())
        # drill a region: replace its gleam by an e-circle boundary circuit
        rid = rng.choice(sorted(sh.regions))
        sh.edges["drill"] = Edge("drill", "circle", "e")
        sh.regions[rid].circuits.append([Pass("drill", 0, 1)])
        sh.regions[rid].gleam = None
        sh.invalidate()
        assert validate(sh).ok
        other = disk_with_boundary("e")
        a, b = (3, 1) if k % 2 else (5, 2)
        c, dd = _complete(a, b)
        glued = torus_glue(sh, "drill", other, "b0", ((a, c), (b, dd)))
        assert stats(glued).n_vertices == 5 + 0
        assert validate(glued).ok


def test_surgery_to_closed_shadow_lens_family():
    for p in range(-10, 11):
        d = parse_pd("frame 0 %d\n" % p)
        closed = surgery_to_closed_shadow(d)
        assert validate(closed).ok
        assert stats(closed).n_vertices == 0
        assert len(closed.regions) == 1
        region = next(iter(closed.regions.values()))
        assert region.gleam == HalfInt.from_int(p)


def test_surgery_rejects_rational_framing():
    d = parse_pd("frame 0 7/2\n")
    with pytest.raises(LinkError):
        surgery_to_closed_shadow(d)


def test_kink_family_total_gleam():
    rng = SplitMix64(11)
    for p in range(-6, 7):
        d = kink_unknot(p)
        fr = rng.randint(-8, 8)
        d.framings[0] = Fraction(fr)
        closed = surgery_to_closed_shadow(d)
        total = HalfInt(sum(r.gleam.twice for r in closed.regions.values()))
        assert total == HalfInt.from_int(fr)
        assert validate(closed).ok


def test_random_knot_framing_oracle():
    """The capped generator cycle self-intersects in the framing."""
    rng = SplitMix64(2024)
    for _ in range(200):
        d = random_knot_diagram(rng)
        p = rng.randint(-9, 9)
        d.framings[0] = Fraction(p)
        closed = surgery_to_closed_shadow(d)
        rids, basis = integer_cycle_basis(closed)
        assert len(basis) == 1
        s2 = sum(a * a * closed.regions[r].gleam.as_fraction()
                 for r, a in zip(rids, basis[0]))
        assert s2 == p
        assert validate(closed).ok


def test_hopf_framed_surgery():
    d = parse_pd(HOPF_PD)
    d.framings[0] = Fraction(3)
    d.framings[1] = Fraction(-2)
    closed = surgery_to_closed_shadow(d)
    assert validate(closed).ok
    assert stats(closed).n_vertices == 0
