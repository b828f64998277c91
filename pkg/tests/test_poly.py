"""Core polyhedron invariants: validation, Z/2-gleams both ways, stats."""

import pytest

from shadowcalc.halfint import HalfInt
from shadowcalc.poly import (
    Edge, Pass, Region, Shadow, ShadowError, Vertex,
    gleam_weight, stats, validate, z2_gleam_cochain, z2_gleam_direct,
    coboundary_on_region, sphere_shadow, disk_with_boundary, hopf_polyhedron,
)
from shadowcalc.prng import SplitMix64
from shadowcalc.tri import boundary_of_4_simplex, dual_spine_shadow


def test_sphere_with_integer_gleam_validates():
    sh = sphere_shadow(HalfInt.from_int(3))
    assert validate(sh).ok


def test_sphere_with_half_gleam_fails_parity():
    sh = sphere_shadow(HalfInt(1))
    report = validate(sh)
    assert not report.ok
    assert any("parity" in v for v in report.violations)


def test_sphere_stats():
    sh = sphere_shadow(HalfInt.from_int(5))
    s = stats(sh)
    assert s.n_vertices == 0
    assert s.euler == 2
    assert s.boundary_census == {"i": 0, "e": 0, "f": 0}


def test_gleam_weight_of_sphere():
    sh = sphere_shadow(HalfInt.from_int(-4))
    assert gleam_weight(sh) == HalfInt.from_int(4)


def test_disk_with_false_boundary():
    sh = disk_with_boundary("f")
    assert validate(sh).ok
    s = stats(sh)
    assert s.euler == 1
    assert s.boundary_census["f"] == 1


def test_hopf_polyhedron_validates_no_vertices():
    sh = hopf_polyhedron()
    assert validate(sh).ok
    s = stats(sh)
    assert s.n_vertices == 0
    assert s.euler == 1


def test_two_winged_interior_edge_is_rejected():
    sh = Shadow()
    sh.edges["c"] = Edge("c", "circle", None)
    sh.regions["r0"] = Region("r0", True, 0, HalfInt(0), [[Pass("c", 0, 1)]])
    sh.regions["r1"] = Region("r1", True, 0, HalfInt(0), [[Pass("c", 1, 1)]])
    report = validate(sh)
    assert not report.ok
    assert any("not 3-winged" in v or "no region" in v for v in report.violations)


def test_closed_surface_region_z2_zero():
    sh = sphere_shadow(HalfInt.from_int(2))
    assert z2_gleam_direct(sh, "r0") == 0


def test_z2_gleam_requires_internal():
    sh = hopf_polyhedron()
    with pytest.raises(ShadowError):
        z2_gleam_direct(sh, "rA")  # touches i-boundary: no gleam defined


def test_hopf_disk_region_z2_zero():
    sh = hopf_polyhedron()
    assert z2_gleam_direct(sh, "rD") == 0


def mobius_core_block():
    """Annulus glued to the core of a Mobius strip: circle edge whose
    monodromy is a transposition.  Both free boundaries colored i."""
    sh = Shadow()
    sh.edges["c"] = Edge("c", "circle", None)
    sh.edges["b"] = Edge("b", "circle", "i")
    sh.edges["bm"] = Edge("bm", "circle", "i")
    # Mobius strip minus its core: an annulus winding twice around the core
    sh.regions["rM"] = Region("rM", True, 0, HalfInt(0),
                              [[Pass("c", 0, 1), Pass("c", 1, 1)],
                               [Pass("bm", 0, 1)]])
    sh.regions["rA"] = Region("rA", True, 0, HalfInt(0),
                              [[Pass("c", 2, 1)], [Pass("b", 0, 1)]])
    return sh


def test_mobius_core_block_validates():
    sh = mobius_core_block()
    report = validate(sh)
    assert report.ok, report.violations


def test_mobius_monodromy_z2():
    # cap both free boundaries: two disk regions on one circle edge whose
    # monodromy is the transposition (0 1)
    sh = Shadow()
    sh.edges["c"] = Edge("c", "circle", None)
    sh.regions["rX"] = Region("rX", True, 0, HalfInt.from_int(0),
                              [[Pass("c", 0, 1), Pass("c", 1, 1)]])
    sh.regions["rY"] = Region("rY", True, 0, HalfInt(1),
                              [[Pass("c", 2, 1)]])
    report = validate(sh)
    assert report.ok, report.violations
    # winding twice through the swapped pair gives an orientable band
    assert z2_gleam_direct(sh, "rX") == 0
    # passing once beside the swapped pair gives a Mobius band
    assert z2_gleam_direct(sh, "rY") == 1
    c = z2_gleam_cochain(sh)
    assert c["c"] == 1  # no consistent cyclic orientation of the wings
    for rid in ("rX", "rY"):
        assert coboundary_on_region(sh, c, rid) == z2_gleam_direct(sh, rid)


def test_dual_spine_of_4_simplex_boundary():
    tri = boundary_of_4_simplex()
    sh = dual_spine_shadow(tri)
    report = validate(sh)
    assert report.ok, report.violations
    s = stats(sh)
    assert s.n_vertices == 5
    assert s.n_edges == 10
    assert s.n_regions == 10
    # spine of S^3 minus 5 balls
    assert s.euler == 5
    assert s.standard
    for rid in sh.regions:
        assert z2_gleam_direct(sh, rid) == 0


def test_cochain_theorem_dual_spine():
    sh = dual_spine_shadow(boundary_of_4_simplex())
    c = z2_gleam_cochain(sh)
    for rid in sh.regions:
        assert coboundary_on_region(sh, c, rid) == z2_gleam_direct(sh, rid)


def renumber_vertices(sh, rng):
    """Randomly permute every vertex's end numbering (a presentation
    change; all published quantities must be invariant)."""
    out = sh.copy()
    for v in out.vertices.values():
        ends = list(v.ends)
        rng.shuffle(ends)
        v.ends = tuple(ends)
    out.invalidate()
    return out


def test_cochain_theorem_invariant_under_renumbering():
    base = dual_spine_shadow(boundary_of_4_simplex())
    rng = SplitMix64(12345)
    for _ in range(25):
        sh = renumber_vertices(base, rng)
        assert validate(sh).ok
        c = z2_gleam_cochain(sh)
        for rid in sh.regions:
            assert coboundary_on_region(sh, c, rid) == \
                z2_gleam_direct(sh, rid)


def test_vertex_free_cochain_zero():
    sh = hopf_polyhedron()
    c = z2_gleam_cochain(sh)
    assert c == {"c0": 0}
