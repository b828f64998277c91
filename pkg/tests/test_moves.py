"""The move calculus: vertex deltas, validity closure, gleam transport."""

import pytest

from shadowcalc.canon import is_isomorphic
from shadowcalc.halfint import HalfInt
from shadowcalc.moves import (
    CollapseResult, Move02Site, MoveError, cap_boundary, collapse_false,
    connected_sum, find_3_2_sites, move_0_2, move_3_2, region_surgery,
)
from shadowcalc.poly import (
    disk_with_boundary, gleam_weight, hopf_polyhedron, sphere_shadow,
    stats, validate,
)
from shadowcalc.prng import SplitMix64
from shadowcalc.tri import boundary_of_4_simplex, dual_spine_shadow


def spine():
    return dual_spine_shadow(boundary_of_4_simplex())


def all_0_2_sites(sh, limit=None):
    sites = []
    for rid in sorted(sh.regions):
        r = sh.regions[rid]
        for ci, circ in enumerate(r.circuits):
            for i0 in range(len(circ)):
                for i1 in range(len(circ)):
                    if i0 == i1:
                        continue
                    p0, p1 = circ[i0], circ[i1]
                    if p0.edge == p1.edge:
                        continue
                    e0 = sh.edges[p0.edge]
                    e1 = sh.edges[p1.edge]
                    if not (e0.is_interior and e1.is_interior
                            and e0.kind == "interval"
                            and e1.kind == "interval"):
                        continue
                    for s0 in range(3):
                        if s0 == p0.wing:
                            continue
                        for s1 in range(3):
                            if s1 == p1.wing:
                                continue
                            sites.append(Move02Site(rid, (ci, i0), (ci, i1),
                                                    s0, s1))
    return sites[:limit] if limit else sites


def test_0_2_adds_two_vertices_everywhere():
    sh = spine()
    before = stats(sh)
    rng = SplitMix64(5)
    sites = all_0_2_sites(sh)
    rng.shuffle(sites)
    for site in sites[:25]:
        out = move_0_2(sh, site)
        s = stats(out)
        assert s.n_vertices == before.n_vertices + 2
        assert s.euler == before.euler
        assert validate(out).ok


def test_0_2_gleam_weight_local():
    sh = spine()
    site = all_0_2_sites(sh)[0]
    out = move_0_2(sh, site)
    # total gleam is preserved over the move (all zero here)
    assert gleam_weight(out) == gleam_weight(sh)


def test_3_2_decreases_vertex_count_by_one():
    sh = spine()
    sites = find_3_2_sites(sh)
    assert len(sites) == 10
    for rid in sites:
        out = move_3_2(sh, rid)
        s = stats(out)
        assert s.n_vertices == 4
        assert s.euler == stats(sh).euler
        assert validate(out).ok


def test_3_2_no_site_on_vertex_free_shadow():
    assert find_3_2_sites(hopf_polyhedron()) == []
    with pytest.raises(MoveError):
        move_3_2(hopf_polyhedron(), "rD")


def test_0_2_then_two_3_2_restores_vertex_count():
    sh = spine()
    out = move_0_2(sh, all_0_2_sites(sh)[0])
    assert stats(out).n_vertices == 7
    for _ in range(2):
        sites = find_3_2_sites(out)
        assert sites, "expected a 3->2 site after the 0->2 move"
        out = move_3_2(out, sites[0])
    assert stats(out).n_vertices == 5
    assert validate(out).ok


def test_cap_disk_gives_lens_sphere():
    for p in range(-4, 5):
        capped = cap_boundary(disk_with_boundary("i"), "b0",
                              HalfInt.from_int(p))
        assert validate(capped).ok
        assert is_isomorphic(capped, sphere_shadow(HalfInt.from_int(p)))


def test_cap_hopf_both_circles():
    h = hopf_polyhedron()
    out = cap_boundary(h, "b0", HalfInt.from_int(3))
    out = cap_boundary(out, "b1", HalfInt.from_int(-2))
    assert out.is_closed()
    assert stats(out).n_vertices == 0
    assert validate(out).ok


def test_cap_rejects_interior_edge():
    h = hopf_polyhedron()
    with pytest.raises(MoveError):
        cap_boundary(h, "c0", HalfInt.from_int(0))


def test_collapse_noop_without_false_edges():
    sh = spine()
    res = collapse_false(sh)
    assert res.ok
    assert is_isomorphic(res.shadow, sh)


def test_collapse_disk_reports_contractible():
    res = collapse_false(disk_with_boundary("f"))
    assert not res.ok
    assert any("collapsed" in r for r in res.remnants)


def test_collapse_confluence_small():
    from shadowcalc.links import FIGURE_EIGHT_PD, mapping_cylinder_shadow, \
        parse_pd
    dl = mapping_cylinder_shadow(parse_pd(FIGURE_EIGHT_PD))
    results = []
    for seed in range(4):
        res = collapse_false(dl, order_seed=seed)
        assert res.ok
        results.append(res.shadow)
    for other in results[1:]:
        assert is_isomorphic(results[0], other)


def test_connected_sum_of_spheres():
    s = connected_sum(sphere_shadow(HalfInt.from_int(2)), "r0",
                      sphere_shadow(HalfInt.from_int(-5)), "r0")
    assert validate(s).ok
    st = stats(s)
    assert st.n_vertices == 0
    assert sorted(r.gleam.format() for r in s.regions.values()) == \
        ["-5", "0", "2"]


def test_connected_sum_vertex_additivity():
    rng = SplitMix64(17)
    pool = [spine(), sphere_shadow(HalfInt.from_int(1)), hopf_polyhedron()]
    for _ in range(10):
        a = rng.choice(pool)
        b = rng.choice(pool)
        ra = rng.choice(sorted(a.regions))
        rb = rng.choice(sorted(b.regions))
        s = connected_sum(a, ra, b, rb)
        assert stats(s).n_vertices == \
            stats(a).n_vertices + stats(b).n_vertices
        assert validate(s).ok


def test_connected_sum_with_zero_sphere_keeps_vertices():
    sh = spine()
    s = connected_sum(sh, "R0", sphere_shadow(HalfInt.from_int(0)), "r0")
    assert stats(s).n_vertices == stats(sh).n_vertices


def test_region_surgery_equator():
    surg = region_surgery(sphere_shadow(HalfInt.from_int(0)), "r0", [])
    assert validate(surg).ok
    st = stats(surg)
    assert st.n_vertices == 0
    assert st.n_regions == 5
    gleams = sorted(r.gleam.twice for r in surg.regions.values())
    assert gleams == [-2, 0, 0, 0, 2]
    assert gleam_weight(surg) == HalfInt.from_int(2)


def test_region_surgery_weight_delta_plus_two():
    cases = [
        (sphere_shadow(HalfInt.from_int(4)), "r0", [], HalfInt.from_int(4)),
        (sphere_shadow(HalfInt.from_int(-3)), "r0", [], HalfInt.from_int(-3)),
        (spine(), "R0", [], None),
    ]
    for sh, rid, enclosed, split in cases:
        before = gleam_weight(sh)
        out = region_surgery(sh, rid, enclosed, gleam_split=split)
        assert gleam_weight(out) == before + HalfInt.from_int(2)
        assert stats(out).n_vertices == stats(sh).n_vertices
        assert validate(out).ok


def test_region_surgery_boundary_parallel():
    h = hopf_polyhedron()
    out = region_surgery(h, "rA", [1])  # enclose the i-circle circuit
    assert validate(out).ok
    assert gleam_weight(out) == gleam_weight(h) + HalfInt.from_int(2)
