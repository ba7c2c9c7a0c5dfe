import random

import pytest
from hypothesis import given, settings, strategies as st

from treeflip.geometry import PointSet, edge, segments_cross
from treeflip.instances import (
    convex_random,
    double_broom,
    general_random,
    monotone_path,
    random_convex_path,
    random_monotone_path,
    random_tree,
    regular_polygon,
)
from treeflip.oracle.enumeration import enumerate_trees
from treeflip.trees import Flip, Tree, apply_flip, diff, validate_sequence
from treeflip.two_phase import (
    NotAPath,
    NotMonotonePath,
    PreconditionError,
    choose_opposite,
    convex_path_relabel,
    monotone_direction,
    orientation_profile,
    phase2,
    reconfigure_convex_path,
    reconfigure_to_monotone_path,
    reduce_sink,
    to_downward,
    to_upward,
    two_phase_reconfigure,
    visible_above,
)

from conftest import star1, star_at, tree

# 8 points sorted by height: sink v5 is blocked from v6 and v8 and sees v7
SINK_POINTS = [(56, 6), (44, 44), (44, 46), (98, 61), (90, 83), (19, 85), (93, 95), (9, 96)]
SINK_TREE = [(0, 2), (0, 3), (0, 5), (1, 2), (2, 6), (3, 4), (5, 7)]

# 9 points, downward and upward tree whose phase-2 trace mixes happy and unhappy connectors
CONNECTOR_POINTS = [(24, 6), (77, 14), (64, 26), (91, 38), (29, 49), (37, 60), (9, 66), (38, 71), (59, 86)]
CONNECTOR_DOWN = [(0, 4), (1, 4), (2, 4), (3, 8), (4, 6), (5, 6), (6, 7), (7, 8)]
CONNECTOR_UP = [(0, 1), (0, 2), (0, 3), (2, 4), (3, 8), (4, 5), (4, 6), (6, 7)]


def _edges(t):
    return sorted(tuple(e) for e in t.edges)


# -- orientation profile ---------------------------------------------------


def test_profile_quad(quad):
    p = orientation_profile(star1(quad))
    assert p.sources == {0} and p.sinks == {1, 2, 3} and (p.s, p.t) == (1, 3)
    p = orientation_profile(tree(quad, (1, 2), (2, 3), (3, 4)))
    assert p.sources == {0} and p.sinks == {3}
    assert p.upward and p.downward
    p = orientation_profile(star_at(quad, 3))
    assert p.sources == {0, 1, 2} and p.sinks == {3}


# -- phase 1 ---------------------------------------------------------------


def test_visible_above_quad(quad):
    t = star1(quad)
    assert visible_above(t, 1) == 2
    assert not segments_cross(edge(1, 2), edge(0, 3), quad)


def test_visible_above_preconditions(quad):
    path = tree(quad, (1, 2), (2, 3), (3, 4))
    with pytest.raises(PreconditionError):
        visible_above(path, 3)
    with pytest.raises(PreconditionError):
        visible_above(star1(quad), 0)


def test_sink_sees_higher_vertex_fixture():
    ps = PointSet.from_coords(SINK_POINTS)
    assert ps.height_order == tuple(range(8))
    t = Tree(ps, SINK_TREE)
    assert 4 in orientation_profile(t).sinks
    assert any(segments_cross(edge(4, 5), e, ps) for e in t.edges)
    assert any(segments_cross(edge(4, 7), e, ps) for e in t.edges)
    assert visible_above(t, 4) == 6
    f = reduce_sink(t, 4)
    assert f == Flip(edge(0, 3), edge(4, 6))
    after = orientation_profile(apply_flip(t, f))
    assert after.t == orientation_profile(t).t - 1
    assert 0 not in after.sinks


def test_reduce_sink_quad(quad):
    t = star1(quad)
    f = reduce_sink(t, 1)
    assert f == Flip(edge(0, 2), edge(1, 2))
    t = apply_flip(t, f)
    assert orientation_profile(t).t == 2
    f = reduce_sink(t, 2)
    assert f == Flip(edge(0, 3), edge(2, 3))
    t = apply_flip(t, f)
    assert t == tree(quad, (1, 2), (2, 3), (3, 4))
    with pytest.raises(PreconditionError):
        reduce_sink(t, 2)


def test_to_downward_upward_quad(quad):
    assert len(to_downward(star1(quad))) == 2
    assert len(to_downward(star_at(quad, 3))) == 0
    assert len(to_upward(star1(quad))) == 0


def _consecutive(ps):
    order = ps.height_order
    return {edge(u, v) for u, v in zip(order, order[1:])}


@pytest.mark.parametrize("n", [5, 6])
def test_canonicalize_exhaustive(n):
    ps = regular_polygon(n)
    keep = _consecutive(ps)
    for c in enumerate_trees(ps):
        t = Tree.from_code(ps, int(c))
        p = orientation_profile(t)
        down, up = to_downward(t), to_upward(t)
        assert len(down) == p.t - 1 and orientation_profile(down.end).downward
        assert len(up) == p.s - 1 and orientation_profile(up.end).upward
        for f in down.steps + up.steps:
            assert f.remove not in keep


@pytest.mark.parametrize("n", [5, 6, 7])
def test_choose_opposite_exhaustive_budget(n):
    ps = regular_polygon(n)
    trees = [Tree.from_code(ps, int(c)) for c in enumerate_trees(ps)]
    rng = random.Random(n)
    pairs = [(a, b) for a in trees[:40] for b in rng.sample(trees, 40)]
    for a, b in pairs:
        shape, s1, s2 = choose_opposite(a, b)
        assert len(s1) + len(s2) <= n - 2
        p1, p2 = orientation_profile(s1.end), orientation_profile(s2.end)
        if shape == ("upward", "downward"):
            assert p1.upward and p2.downward
        else:
            assert p1.downward and p2.upward


def test_choose_opposite_trivial(quad):
    shape, s1, s2 = choose_opposite(star1(quad), star_at(quad, 3))
    assert shape == ("upward", "downward") and len(s1) == len(s2) == 0
    path = tree(quad, (1, 2), (2, 3), (3, 4))
    _, s1, s2 = choose_opposite(path, path)
    assert len(s1) == len(s2) == 0


# -- phase 2 ---------------------------------------------------------------


def test_phase2_quad_trace(quad):
    seq = phase2(star_at(quad, 3), star1(quad))
    assert list(seq.steps) == [Flip(edge(1, 3), edge(0, 1)), Flip(edge(2, 3), edge(0, 2))]
    rep = validate_sequence(seq, star1(quad))
    assert rep.is_perfect


def test_phase2_same_path(quad):
    path = tree(quad, (1, 2), (2, 3), (3, 4))
    assert len(phase2(path, path)) == 0


def test_phase2_preconditions(quad):
    with pytest.raises(PreconditionError):
        phase2(star1(quad), star1(quad))
    with pytest.raises(PreconditionError):
        phase2(star_at(quad, 3), star_at(quad, 3))


def test_phase2_connector_fixture():
    ps = PointSet.from_coords(CONNECTOR_POINTS)
    assert ps.height_order == tuple(range(9))
    down, up = Tree(ps, CONNECTOR_DOWN), Tree(ps, CONNECTOR_UP)
    trace = []
    seq = phase2(down, up, trace=trace)
    assert len(trace) == 8
    rep = validate_sequence(seq, up)
    assert rep.is_perfect and rep.length == diff(down, up).d == 4
    removed = {}
    k = 0
    for st_ in trace:
        b = [e for e in up.edges if st_.frontier in e and ps.rank[e.other(st_.frontier)] < ps.rank[st_.frontier]][0]
        if b not in st_.current.edges:
            removed[st_.frontier] = (seq.steps[k].remove, b)
            k += 1
    # T_1: the only unhappy connector is r_2
    r2, _ = removed[1]
    assert [e for e in trace[0].connectors if e not in up.edges] == [r2]
    # T_2: the unhappy connector r_3 crosses b_3
    r3, b3 = removed[2]
    assert r3 in trace[1].connectors and segments_cross(r3, b3, ps)
    # T_4, T_6, T_7: two happy connectors each
    for i in (4, 6, 7):
        con = trace[i - 1].connectors
        assert len(con) == 2 and all(e in up.edges for e in con)


def _opposite_pairs(ps):
    trees = [Tree.from_code(ps, int(c)) for c in enumerate_trees(ps)]
    downs = [t for t in trees if orientation_profile(t).downward]
    ups = [t for t in trees if orientation_profile(t).upward]
    return downs, ups


@pytest.mark.parametrize("n", [4, 5])
def test_phase2_exhaustive_small(n):
    ps = regular_polygon(n)
    downs, ups = _opposite_pairs(ps)
    for a in downs:
        for b in ups:
            seq = phase2(a, b)
            rep = validate_sequence(seq, b)
            assert rep.is_perfect and rep.length == diff(a, b).d


@settings(max_examples=60, deadline=None)
@given(st.integers(5, 10), st.integers(0, 10**6))
def test_phase2_random_general(n, seed):
    rng = random.Random(seed)
    ps = general_random(n, seed)
    a = to_downward(random_tree(ps, rng)).end
    b = to_upward(random_tree(ps, rng)).end
    seq = phase2(a, b)
    rep = validate_sequence(seq, b)
    assert rep.is_perfect and rep.length == diff(a, b).d


# -- full algorithm ------------------------------------------------------


def test_two_phase_identity(quad):
    t = star1(quad)
    assert len(two_phase_reconfigure(t, t)) == 0


def test_two_phase_stars(quad):
    seq = two_phase_reconfigure(star1(quad), star_at(quad, 3))
    rep = validate_sequence(seq, star_at(quad, 3))
    assert rep.ok and rep.length <= 5


def test_two_phase_exhaustive_n5():
    ps = regular_polygon(5)
    trees = [Tree.from_code(ps, int(c)) for c in enumerate_trees(ps)]
    for a in trees:
        for b in trees:
            seq = two_phase_reconfigure(a, b)
            rep = validate_sequence(seq, b)
            assert rep.ok and rep.length <= 2 * 5 - 3


@settings(max_examples=80, deadline=None)
@given(st.integers(3, 11), st.integers(0, 10**6), st.booleans())
def test_two_phase_random(n, seed, convex):
    rng = random.Random(seed)
    ps = convex_random(n, seed) if convex else general_random(n, seed)
    a, b = random_tree(ps, rng), random_tree(ps, rng)
    seq = two_phase_reconfigure(a, b, check=True)
    rep = validate_sequence(seq, b)
    assert rep.ok and rep.length <= 2 * n - 3


# -- path targets ----------------------------------------------------------


def test_monotone_direction_quad(quad):
    d = monotone_direction(tree(quad, (1, 2), (2, 3), (3, 4)))
    pts = quad.points
    for u, v in [(0, 1), (1, 2), (2, 3)]:
        assert d[0] * (pts[v].x - pts[u].x) + d[1] * (pts[v].y - pts[u].y) > 0


def test_monotone_direction_spiral():
    ps = PointSet.from_coords([(0, 0), (10, 1), (11, 10), (1, 9)])
    assert monotone_direction(tree(ps, (1, 2), (2, 3), (3, 4))) is None


def test_monotone_direction_errors(quad):
    with pytest.raises(NotAPath):
        monotone_direction(star1(quad))
    tiny = PointSet.from_coords([(0, 0), (1, 3)])
    with pytest.raises(PreconditionError):
        monotone_direction(Tree(tiny, [(0, 1)]))


def test_monotone_path_identity(quad):
    path = tree(quad, (1, 2), (2, 3), (3, 4))
    assert len(reconfigure_to_monotone_path(path, path)) == 0


def test_non_monotone_target_rejected():
    ps = PointSet.from_coords([(0, 0), (10, 1), (11, 10), (1, 9)])
    path = tree(ps, (1, 2), (2, 3), (3, 4))
    with pytest.raises(NotMonotonePath):
        reconfigure_to_monotone_path(star1(ps), path)


def test_double_broom_path_bound():
    ps, ti, tf = double_broom(8)
    seq = reconfigure_to_monotone_path(ti, tf)
    rep = validate_sequence(seq, tf)
    assert rep.ok and rep.length <= 1.5 * 8 - 2 - diff(ti, tf).h


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 12), st.integers(0, 10**6))
def test_monotone_path_random(n, seed):
    rng = random.Random(seed)
    ps = general_random(n, seed)
    ti, tf = random_tree(ps, rng), random_monotone_path(ps, rng)
    seq = reconfigure_to_monotone_path(ti, tf, check=True)
    rep = validate_sequence(seq, tf)
    assert rep.ok and rep.length <= 1.5 * n - 2 - diff(ti, tf).h


def test_relabel_monotone_hull_path():
    ps = regular_polygon(6)
    order = list(ps.hull_cycle)
    path = Tree(ps, [edge(u, v) for u, v in zip(order, order[1:])])
    new = convex_path_relabel(ps, path)
    assert list(new.height_order) == order
    assert new.hull_cycle == ps.hull_cycle


def test_relabel_zigzag():
    ps = regular_polygon(6)
    cyc = ps.hull_cycle
    order = [cyc[0], cyc[1], cyc[5], cyc[2], cyc[4], cyc[3]]
    path = Tree(ps, [edge(u, v) for u, v in zip(order, order[1:])])
    new = convex_path_relabel(ps, path)
    assert list(new.height_order) == order
    for e1 in ps.edge_list:
        for e2 in ps.edge_list:
            assert segments_cross(e1, e2, ps) == segments_cross(e1, e2, new)


def test_relabel_errors():
    ps = regular_polygon(5)
    with pytest.raises(NotAPath):
        convex_path_relabel(ps, star1(ps))


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 10), st.integers(0, 10**6))
def test_convex_path_random(n, seed):
    rng = random.Random(seed)
    ps = convex_random(n, seed)
    ti, tf = random_tree(ps, rng), random_convex_path(ps, rng)
    seq = reconfigure_convex_path(ti, tf, check=True)
    rep = validate_sequence(seq, tf)
    assert rep.ok and rep.length <= 1.5 * n - 2 - diff(ti, tf).h
