"""Lattice geometry: seam rule, loops, homology, the center cut."""

import pytest

from mobiusflux.lattice import (
    ANNULUS,
    DIRECTIONS,
    MOEBIUS,
    LatticeError,
    LinkStep,
    LoopError,
    LoopPath,
    Site,
    build_lattice,
    center_loop,
    cut_complement_of_center,
    homology_class,
    neighbor,
    offset_loop,
    opposite,
    walk_loop,
)


def test_build_lattice_counts():
    assert build_lattice(3, 1, ANNULUS).n_sites == 3
    assert build_lattice(48, 9, MOEBIUS).n_sites == 432


@pytest.mark.parametrize("nx,ny", [(2, 1), (1, 5), (3, 0), (0, 0)])
def test_build_lattice_rejects_small(nx, ny):
    with pytest.raises(LatticeError):
        build_lattice(nx, ny, ANNULUS)


def test_build_lattice_rejects_bad_topology():
    with pytest.raises(LatticeError):
        build_lattice(4, 3, "klein")


def test_seam_flip_rule():
    moe = build_lattice(8, 5, MOEBIUS)
    ann = build_lattice(8, 5, ANNULUS)
    assert neighbor(moe, Site(7, 0), "+x") == Site(0, 4)
    assert neighbor(moe, Site(7, 2), "+x") == Site(0, 2)  # center row is fixed
    assert neighbor(ann, Site(7, 0), "+x") == Site(0, 0)
    assert neighbor(moe, Site(0, 0), "-x") == Site(7, 4)
    assert neighbor(ann, Site(0, 0), "-x") == Site(7, 0)


def test_dirichlet_walls():
    for topo in (ANNULUS, MOEBIUS):
        lat = build_lattice(6, 4, topo)
        assert neighbor(lat, Site(3, 3), "+y") is None
        assert neighbor(lat, Site(3, 0), "-y") is None
        assert neighbor(lat, Site(3, 1), "+y") == Site(3, 2)


@pytest.mark.parametrize("topo,nx,ny", [(ANNULUS, 5, 4), (MOEBIUS, 5, 4), (MOEBIUS, 4, 3)])
def test_neighbor_involutive(topo, nx, ny):
    lat = build_lattice(nx, ny, topo)
    for site in lat.sites():
        for d in DIRECTIONS:
            there = neighbor(lat, site, d)
            if there is not None:
                assert neighbor(lat, there, opposite(d)) == site


def test_fundamental_group_doubling_at_lattice_level():
    lat = build_lattice(7, 5, MOEBIUS)
    for j in range(5):
        pos = Site(0, j)
        for _ in range(lat.nx):
            pos = neighbor(lat, pos, "+x")
        assert pos == Site(0, lat.ny - 1 - j)
        for _ in range(lat.nx):
            pos = neighbor(lat, pos, "+x")
        assert pos == Site(0, j)


def test_center_loop():
    loop = center_loop(build_lattice(8, 5, MOEBIUS))
    assert len(loop) == 8
    assert all(site.j == 2 for site in loop.sites())
    assert len(center_loop(build_lattice(3, 1, ANNULUS))) == 3
    with pytest.raises(LatticeError):
        center_loop(build_lattice(8, 4, MOEBIUS))


def test_offset_loop():
    moe = build_lattice(8, 5, MOEBIUS)
    loop = offset_loop(moe, 0)
    assert len(loop) == 16
    rows = {site.j for site in loop.sites()}
    assert rows == {0, 4}  # one circuit each on the row and its mirror
    assert len(offset_loop(build_lattice(8, 5, ANNULUS), 0)) == 8
    with pytest.raises(LatticeError):
        offset_loop(moe, 2)  # center row
    with pytest.raises(LatticeError):
        offset_loop(moe, 7)


def test_offset_loop_even_width_ladder():
    # no center row exists, so every row is allowed and the loop doubles
    lat = build_lattice(6, 2, MOEBIUS)
    assert len(offset_loop(lat, 0)) == 12


def test_homology_classes():
    lat = build_lattice(8, 5, MOEBIUS)
    assert homology_class(lat, center_loop(lat)) == 1
    assert homology_class(lat, offset_loop(lat, 0)) == 2
    assert homology_class(lat, offset_loop(lat, 0)) == 2 * homology_class(lat, center_loop(lat))
    plaquette = walk_loop(lat, Site(2, 1), ["+x", "+y", "-x", "-y"])
    assert homology_class(lat, plaquette) == 0
    ann = build_lattice(8, 5, ANNULUS)
    assert homology_class(ann, offset_loop(ann, 0)) == 1


def test_homology_rejects_foreign_loop():
    lat = build_lattice(8, 5, MOEBIUS)
    other = build_lattice(8, 5, ANNULUS)
    with pytest.raises(LoopError):
        homology_class(lat, center_loop(other))


def test_loop_validation():
    lat = build_lattice(6, 3, ANNULUS)
    with pytest.raises(LoopError):
        LoopPath(lat, ())  # empty
    with pytest.raises(LoopError):  # does not chain
        LoopPath(lat, (LinkStep(Site(0, 0), "+x"), LinkStep(Site(3, 0), "+x")))
    with pytest.raises(LoopError):  # does not close
        LoopPath(lat, (LinkStep(Site(0, 0), "+x"),))
    with pytest.raises(LoopError):  # through the wall
        walk_loop(lat, Site(0, 0), ["-y", "+y"])


def test_cut_complement_shape_and_bijection():
    lat = build_lattice(8, 5, MOEBIUS)
    corr = cut_complement_of_center(lat)
    assert corr.cut.topology == ANNULUS
    assert (corr.cut.nx, corr.cut.ny) == (16, 2)
    assert len(corr.to_band) == 32
    off_center = [s for s in lat.sites() if s.j != lat.center_row]
    assert sorted(corr.to_band.values()) == sorted(off_center)
    for cut_site, band_site in corr.to_band.items():
        assert corr.from_band[band_site] == cut_site


def _undirected_links(lat):
    links = set()
    for site in lat.sites():
        for d in ("+x", "+y"):
            there = neighbor(lat, site, d)
            if there is not None:
                links.add(frozenset((site, there)))
    return links


def test_cut_complement_preserves_adjacency_exhaustively():
    # every moebius link not touching the center row has exactly one image link
    lat = build_lattice(4, 3, MOEBIUS)
    corr = cut_complement_of_center(lat)
    c = lat.center_row
    band_links = {
        link for link in _undirected_links(lat) if all(s.j != c for s in link)
    }
    mapped = {frozenset(corr.from_band[s] for s in link) for link in band_links}
    assert mapped == _undirected_links(corr.cut)
    assert len(mapped) == len(band_links)


@pytest.mark.parametrize("nx,ny,topo", [(8, 1, MOEBIUS), (8, 4, MOEBIUS), (8, 5, ANNULUS)])
def test_cut_complement_preconditions(nx, ny, topo):
    with pytest.raises(LatticeError):
        cut_complement_of_center(build_lattice(nx, ny, topo))


def test_lift_loop_round_trip():
    lat = build_lattice(6, 5, MOEBIUS)
    corr = cut_complement_of_center(lat)
    lifted = corr.lift_loop(offset_loop(lat, 1))
    assert lifted.lattice == corr.cut
    assert len(lifted) == len(offset_loop(lat, 1))
    assert homology_class(corr.cut, lifted) == 1  # class 2 upstairs generates downstairs
    with pytest.raises(LoopError):
        corr.lift_loop(center_loop(lat))


def test_site_id_round_trip():
    lat = build_lattice(5, 4, ANNULUS)
    ids = [lat.site_id(s) for s in lat.sites()]
    assert sorted(ids) == list(range(lat.n_sites))
    for s in lat.sites():
        assert lat.site_at(lat.site_id(s)) == s
