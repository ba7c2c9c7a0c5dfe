import random
from itertools import combinations

import networkx as nx
import numpy as np
import pytest

from treeflip.convex_opt import convex_reconfigure
from treeflip.geometry import edge
from treeflip.instances import double_broom, general_random, random_tree, regular_polygon
from treeflip.oracle.cache import CacheError, cached_graph, load_graph, save_graph
from treeflip.oracle.conjectures import (
    find_greedy_dead_end,
    greedy_perfect,
    happy_edge_check,
    happy_sweep,
    hull_parking_check,
    is_slide,
    min_sequence_has_crossing_readd,
    parking_sweep,
    perfect_moves,
    perfect_sequence_exists,
    restricted_path,
    slide_adjacent,
    slide_happy_gap,
)
from treeflip.oracle.enumeration import TooLarge, enumerate_trees
from treeflip.oracle.graph import (
    _bfs,
    bfs_distance,
    build_graph,
    diameter_radius,
    eccentricity_report,
    path_stats,
    path_to_sequence,
    restricted_distance,
    set_threads,
    shortest_path,
)
from treeflip.oracle.symmetry import SymmetryGroup
from treeflip.trees import Flip, FlipSequence, Tree, apply_flip, diff, flip_is_valid, is_noncrossing_tree
from treeflip.trees import validate_sequence
from treeflip.two_phase import orientation_profile, phase2, to_downward, to_upward, two_phase_reconfigure

from conftest import star1, star_at, tree


def _brute_trees(ps):
    return sorted(
        sum(1 << ps.edge_id[e] for e in es)
        for es in combinations(ps.edge_list, ps.n - 1)
        if is_noncrossing_tree(es, ps)
    )


def _nx_graph(ps, codes, rule="exchange"):
    """Flip graph built edge by edge from apply_flip / slide_adjacent."""
    g = nx.Graph()
    for c in codes:
        t = Tree.from_code(ps, int(c))
        g.add_node(t.code)
        if rule == "slide":
            moves = slide_adjacent(t)
        else:
            moves = [Flip(r, a) for r in t.sorted_edges() for a in ps.edge_list
                     if a not in t.edges and flip_is_valid(t, Flip(r, a))]
        for f in moves:
            g.add_edge(t.code, apply_flip(t, f).code)
    return g


# -- enumeration -----------------------------------------------------------


@pytest.mark.parametrize("n,count", [(3, 3), (4, 12), (5, 55), (6, 273), (7, 1428), (8, 7752), (9, 43263)])
def test_convex_counts(n, count):
    assert len(enumerate_trees(regular_polygon(n))) == count


@pytest.mark.parametrize("n", [4, 5, 6])
def test_enumeration_matches_brute_force(n):
    ps = regular_polygon(n)
    assert list(enumerate_trees(ps)) == _brute_trees(ps)
    gp = general_random(n, 17)
    assert list(enumerate_trees(gp)) == _brute_trees(gp)


def test_general_enumeration_on_convex_input():
    # the general-position routine must agree with the convex one
    from treeflip.oracle.enumeration import _general_codes

    for n in range(3, 9):
        ps = regular_polygon(n)
        assert np.array_equal(np.sort(_general_codes(ps)), enumerate_trees(ps))


def test_enumeration_guards():
    with pytest.raises(TooLarge):
        enumerate_trees(general_random(10, 1))
    with pytest.raises(TooLarge):
        enumerate_trees(regular_polygon(12), force=True)


def test_codes_decode_to_trees():
    ps = general_random(7, 2)
    for c in enumerate_trees(ps)[::50]:
        Tree.from_code(ps, int(c), check=True)


# -- graph -----------------------------------------------------------------


@pytest.mark.parametrize("n,edges", [(3, 3), (4, 32), (5, 260), (6, 1920)])
def test_flip_edge_counts(n, edges):
    g = build_graph(regular_polygon(n))
    assert g.num_edges == edges


@pytest.mark.parametrize("ps", [regular_polygon(5), regular_polygon(6), general_random(6, 4)],
                         ids=["convex5", "convex6", "general6"])
@pytest.mark.parametrize("rule", ["exchange", "slide"])
def test_graph_matches_networkx(ps, rule):
    g = build_graph(ps, rule)
    ref = _nx_graph(ps, g.codes, rule)
    ours = {(int(g.codes[i]), int(g.codes[j])) for i in range(g.num_nodes) for j in g.neighbours(i)}
    theirs = {(a, b) for a, b in ref.edges} | {(b, a) for a, b in ref.edges}
    assert ours == theirs
    src = int(g.codes[0])
    want = nx.single_source_shortest_path_length(ref, src)
    got = _bfs(g, 0)
    for k, c in enumerate(g.codes):
        assert got[k] == want[int(c)]


def test_bfs_distance_examples(quad):
    g = build_graph(quad)
    path = tree(quad, (1, 2), (2, 3), (3, 4))
    assert bfs_distance(g, path, path) == 0
    assert bfs_distance(g, star_at(quad, 2), path) == 1


@pytest.mark.parametrize("n,dist", [(4, 3), (6, 5), (8, 7)])
def test_double_broom_distance(n, dist):
    # oracle values; 1.5n - 5 at n = 8 and n = 4, not at n = 6 (d = 5 there)
    ps, ti, tf = double_broom(n)
    g = build_graph(ps)
    assert bfs_distance(g, ti, tf) == dist
    assert diff(ti, tf).d == n - 1


@pytest.mark.parametrize("n,diam,rad", [(3, 1, 1), (4, 3, 2), (5, 4, 3), (6, 5, 4), (7, 6, 5), (8, 8, 6)])
def test_diameter_radius(n, diam, rad):
    ps = regular_polygon(n)
    g = build_graph(ps)
    assert diameter_radius(g, SymmetryGroup.dihedral(ps)) == (diam, rad)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_symmetry_reduction_matches_full(n):
    ps = regular_polygon(n)
    g = build_graph(ps)
    assert eccentricity_report(g) == eccentricity_report(g, SymmetryGroup.dihedral(ps))


@pytest.mark.parametrize("n,paths,pdiam", [(5, 20, 4), (6, 48, 5), (8, 256, 7)])
def test_path_stats(n, paths, pdiam):
    ps = regular_polygon(n)
    count, diam, rad = path_stats(build_graph(ps), SymmetryGroup.dihedral(ps))
    assert (count, diam, rad) == (paths, pdiam, n - 2)


def test_path_radius_variants_agree():
    ps = regular_polygon(7)
    r = eccentricity_report(build_graph(ps), SymmetryGroup.dihedral(ps))
    assert r.path_radius_all_centres == r.path_radius_path_centres == 5


def test_diameter_guard(monkeypatch):
    import treeflip.oracle.graph as graph

    g = build_graph(regular_polygon(6))
    monkeypatch.setattr(graph, "DIAMETER_LIMIT", 5)
    with pytest.raises(TooLarge):
        eccentricity_report(g)
    assert eccentricity_report(g, force=True).diameter == 5


def test_shortest_path_is_valid_sequence():
    ps = regular_polygon(7)
    g = build_graph(ps)
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b = (int(x) for x in rng.integers(g.num_nodes, size=2))
        seq = path_to_sequence(g, shortest_path(g, a, b, rng))
        rep = validate_sequence(seq, g.tree(b))
        assert rep.ok and rep.length == bfs_distance(g, a, b)


def test_distance_sandwich():
    ps = regular_polygon(6)
    g = build_graph(ps)
    rng = random.Random(1)
    for a in rng.sample(range(g.num_nodes), 25):
        dist = _bfs(g, a)
        ta = g.tree(a)
        for b in range(g.num_nodes):
            tb = g.tree(b)
            d = diff(ta, tb).d
            assert d <= dist[b] <= len(convex_reconfigure(ta, tb))
            assert dist[b] <= len(two_phase_reconfigure(ta, tb))


def test_set_threads(monkeypatch):
    monkeypatch.setenv("TREEFLIP_THREADS", "1")
    assert set_threads() == 1
    monkeypatch.setenv("TREEFLIP_THREADS", "10000")
    assert set_threads() >= 1


# -- symmetry --------------------------------------------------------------


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_symmetries_are_automorphisms(n):
    ps = regular_polygon(n)
    g = build_graph(ps)
    sym = SymmetryGroup.dihedral(ps)
    assert sym.order == 2 * n
    rows = np.repeat(np.arange(g.num_nodes), np.diff(g.indptr))
    arcs = set(zip(rows.tolist(), g.indices.tolist()))
    for k in range(sym.order):
        img = np.searchsorted(g.codes, sym.apply(k, g.codes))
        assert np.array_equal(g.codes[img], sym.apply(k, g.codes))
        mapped = set(zip(img[rows].tolist(), img[g.indices].tolist()))
        assert mapped == arcs


def test_eccentricity_constant_on_orbits():
    ps = regular_polygon(6)
    g = build_graph(ps)
    sym = SymmetryGroup.dihedral(ps)
    reps, where = sym.orbit_representatives(g.codes)
    ecc = np.array([_bfs(g, k).max() for k in range(g.num_nodes)])
    assert np.array_equal(ecc, ecc[reps][where])


def test_symmetry_needs_convex():
    from treeflip.geometry import NotConvexError

    with pytest.raises(NotConvexError):
        SymmetryGroup.dihedral(general_random(6, 0))


# -- conjecture checkers ---------------------------------------------------


def test_happy_check_examples(quad):
    g = build_graph(quad)
    path = tree(quad, (1, 2), (2, 3), (3, 4))
    assert happy_edge_check(g, star_at(quad, 2), path)
    assert restricted_distance(g, g.index(star_at(quad, 2)), g.index(path),
                               must_have=star_at(quad, 2).code & path.code) == 1
    a, b = star1(quad), star_at(quad, 3)
    assert hull_parking_check(g, a, a)


def test_parking_double_broom_n6():
    ps, ti, tf = double_broom(6)
    g = build_graph(ps)
    assert hull_parking_check(g, ti, tf)
    allowed = ti.code | tf.code | ps.hull_mask
    p = restricted_path(g, g.index(ti), g.index(tf), must_avoid=~allowed)
    seq = path_to_sequence(g, p)
    rep = validate_sequence(seq, tf)
    assert rep.ok and rep.length == 5 and rep.parking_edges <= ps.hull_edges


@pytest.mark.parametrize("n", [4, 5, 6])
def test_sweeps_match_pairwise_checks(n):
    ps = regular_polygon(n)
    g = build_graph(ps)
    sym = SymmetryGroup.dihedral(ps)
    assert happy_sweep(g, sym).passed
    assert parking_sweep(g, sym).passed
    assert happy_sweep(g).passed
    rng = random.Random(n)
    for _ in range(40):
        a, b = rng.randrange(g.num_nodes), rng.randrange(g.num_nodes)
        assert happy_edge_check(g, a, b) and hull_parking_check(g, a, b)


def test_sampled_sweep_counts():
    ps = regular_polygon(5)
    g = build_graph(ps)
    res = happy_sweep(g, sample_sources=10, seed=1)
    assert res.checked == 10 * g.num_nodes
    assert res.searched <= res.checked


def test_perfect_quad_example(quad):
    ti = tree(quad, (1, 2), (1, 4), (1, 3))
    tf = tree(quad, (1, 2), (3, 4), (2, 4))
    ok, seq = perfect_sequence_exists(ti, tf)
    assert ok and len(seq) == 2 and validate_sequence(seq, tf).is_perfect


def test_perfect_opposite_trees():
    rng = random.Random(7)
    for seed in range(20):
        ps = general_random(7, seed)
        a = to_downward(random_tree(ps, rng)).end
        b = to_upward(random_tree(ps, rng)).end
        ok, seq = perfect_sequence_exists(a, b)
        assert ok and validate_sequence(seq, b).is_perfect
        assert len(phase2(a, b)) == len(seq)
        out = greedy_perfect(a, b)
        # the lexicographic policy terminates; it may or may not finish
        if out.completed:
            assert validate_sequence(out.sequence, b).is_perfect
        else:
            assert perfect_moves(ps, out.dead_end.code, a.code & ~b.code, b.code & ~a.code) == []


def test_perfect_double_broom_n8():
    ps, ti, tf = double_broom(8)
    ok, seq = perfect_sequence_exists(ti, tf)
    assert ok and len(seq) == 7


def test_perfect_guard():
    # star vs hull path on 23 points share only v1v2, so d = 21
    ps = regular_polygon(23)
    a = star_at(ps, 0)
    b = Tree(ps, [edge(0, 1)] + [edge(k, k + 1) for k in range(1, 22)])
    assert diff(a, b).d == 21
    with pytest.raises(TooLarge):
        perfect_sequence_exists(a, b)


def test_greedy_identity(quad):
    out = greedy_perfect(star1(quad), star1(quad))
    assert out.completed and len(out.sequence) == 0


def test_dead_end_found_at_n6():
    ps = regular_polygon(6)
    g = build_graph(ps)
    w = find_greedy_dead_end(g, SymmetryGroup.dihedral(ps))
    assert w is not None
    d = diff(w.initial, w.final).d
    assert validate_sequence(w.perfect, w.final).is_perfect and len(w.perfect) == d
    end = w.stuck.end
    a, b = w.initial, w.final
    for f in w.stuck.steps:
        assert f.remove in a.edges - b.edges and f.add in b.edges - a.edges
    assert end != b
    assert perfect_moves(ps, end.code, a.code & ~b.code, b.code & ~a.code) == []
    # frozen oracle values
    assert (d, len(w.stuck)) == (4, 2)


def test_no_dead_end_below_n6():
    for n in (4, 5):
        ps = regular_polygon(n)
        assert find_greedy_dead_end(build_graph(ps), SymmetryGroup.dihedral(ps)) is None


# -- slides ----------------------------------------------------------------


def _slide_by_definition(t, f):
    ps = t.ps
    r, a = f
    shared = set(r) & set(a)
    if len(shared) != 1 or a in t.edges or r not in t.edges:
        return False
    (u,) = shared
    v, w = r.other(u), a.other(u)
    if edge(v, w) not in t.edges or not flip_is_valid(t, f):
        return False
    return not any(ps.point_in_triangle(p, u, v, w) for p in range(ps.n))


@pytest.mark.parametrize("ps", [regular_polygon(6), general_random(7, 3)], ids=["convex", "general"])
def test_slide_adjacent_matches_definition(ps):
    rng = random.Random(0)
    for _ in range(30):
        t = random_tree(ps, rng)
        want = {Flip(r, a) for r in t.edges for a in ps.edge_list if _slide_by_definition(t, Flip(r, a))}
        assert set(slide_adjacent(t)) == want
        assert all(is_slide(t, f) for f in want)


def test_slides_on_quad_star(quad):
    t = star1(quad)
    got = set(slide_adjacent(t))
    for f in got:
        assert _slide_by_definition(t, f)
    assert Flip(edge(0, 2), edge(1, 2)) in got


def test_slide_adjacent_rejects_non_tree(quad):
    bad = Tree(quad, [], check=False)
    with pytest.raises(ValueError):
        slide_adjacent(bad)


def test_slide_gap_small_polygons():
    # exploratory: gaps already exist on the hexagon (frozen oracle values)
    ps = regular_polygon(6)
    gap = slide_happy_gap(ps, sym=SymmetryGroup.dihedral(ps))
    assert (gap.distance, gap.happy_distance) == (5, 6)
    assert slide_happy_gap(regular_polygon(5)) is None


def test_slide_restricted_dominates():
    ps = regular_polygon(6)
    g = build_graph(ps, "slide")
    rng = random.Random(2)
    for _ in range(50):
        a, b = rng.randrange(g.num_nodes), rng.randrange(g.num_nodes)
        keep = int(g.codes[a]) & int(g.codes[b])
        assert restricted_distance(g, a, b, must_have=keep) >= bfs_distance(g, a, b)


def test_crossing_readd_on_minimum_sequences():
    ps = regular_polygon(6)
    g = build_graph(ps)
    rng = np.random.default_rng(3)
    for _ in range(300):
        a, b = (int(x) for x in rng.integers(g.num_nodes, size=2))
        assert min_sequence_has_crossing_readd(g, a, b, rng)


# -- cache -----------------------------------------------------------------


def test_cache_round_trip(tmp_path):
    ps = regular_polygon(7)
    g = build_graph(ps)
    path = save_graph(g, tmp_path / "g.tfg")
    h = load_graph(path, ps)
    assert np.array_equal(g.codes, h.codes)
    assert np.array_equal(g.indptr, h.indptr)
    for k in range(0, g.num_nodes, 97):
        assert sorted(g.neighbours(k)) == sorted(h.neighbours(k))
    again = cached_graph(ps, "exchange", tmp_path)
    assert (tmp_path / next(p.name for p in tmp_path.iterdir() if p.name.startswith("n7"))).exists()
    assert np.array_equal(cached_graph(ps, "exchange", tmp_path).codes, again.codes)


def test_cache_rejects_bad_files(tmp_path):
    ps = regular_polygon(5)
    path = save_graph(build_graph(ps), tmp_path / "g.tfg")
    with pytest.raises(CacheError):
        load_graph(path, regular_polygon(6))
    (tmp_path / "junk.tfg").write_bytes(b"nope")
    with pytest.raises(CacheError):
        load_graph(tmp_path / "junk.tfg", ps)
    data = bytearray(path.read_bytes())
    data[0:4] = b"XXXX"
    (tmp_path / "bad.tfg").write_bytes(bytes(data))
    with pytest.raises(CacheError):
        load_graph(tmp_path / "bad.tfg", ps)
