"""Loop-space towers: levels, connectors, endpoints, stabilization."""

import pytest

from boxloop.graphs import (
    GraphHom,
    OddInvolution,
    SizeCapError,
    complete_graph,
    cycle_graph,
    exponential_bigraph,
    interval_bigraph,
    k2_bigraph,
    kronecker_cover,
)
from boxloop.loop_spaces import (
    Tower,
    _single_move_components,
    connector_tuple,
    cycle_hom_level,
    endpoint_maps,
    free_loop_level,
    free_scheme,
    level_action,
    level_connector,
    omega_level,
    omega_scheme,
    path_level,
    path_scheme,
    stabilize,
    stabilized_components,
    twisted_loop_level,
    twisted_scheme,
)

from oracles import (
    closed_walk_count,
    components_by_pairwise_adjacency,
    enumerate_graph_homs,
    walk_count,
)


def k2xk3():
    return kronecker_cover(complete_graph(3))


def test_path_level_zero_is_end_exponential():
    x, _ = k2xk3()
    lvl = path_level(x, 0)
    exp = exponential_bigraph(k2_bigraph(), x)
    assert set(lvl.graph.vertices) == set(exp.vertices)
    assert {frozenset(e) for e in lvl.graph.edges()} == {frozenset(e) for e in exp.edges()}
    assert len(lvl.graph.vertices) == 9
    assert len(lvl.graph.looped_vertices()) == 6


def test_path_level_matches_exponential_level_one():
    x = interval_bigraph(0, 3)
    lvl = path_level(x, 1)
    big = exponential_bigraph(interval_bigraph(-2, 3), x)
    assert set(lvl.graph.vertices) == set(big.vertices)
    assert {frozenset(e) for e in lvl.graph.edges()} == {frozenset(e) for e in big.edges()}


def test_path_level_k2_single_vertex():
    x = k2_bigraph()
    for n in range(3):
        lvl = path_level(x, n)
        assert len(lvl.graph.vertices) == 1
        assert lvl.graph.looped_vertices()


def test_omega_level_zero_single_loop():
    x, _ = k2xk3()
    g = omega_level(x, ((0, 0), (1, 1)), 0)
    assert len(g.vertices) == 1
    assert g.looped_vertices()


def test_omega_level_one_vertex_count():
    x, _ = k2xk3()
    g = omega_level(x, ((0, 0), (1, 1)), 1)
    # two free positions with three choices each
    assert len(g.vertices) == 9
    # looped vertices are walks of length 3 from (1,1) to (0,0) on the base
    expected = walk_count(complete_graph(3), 3, 1, 0)
    assert len(g.looped_vertices()) == expected


def test_omega_level_rejects_bad_basepoint():
    x, _ = k2xk3()
    with pytest.raises(ValueError):
        omega_level(x, ((0, 0), (1, 0)), 1)


def test_omega_k4_level2_one_component():
    x, _ = kronecker_cover(complete_graph(4))
    sch = omega_scheme(x, (0, 0), (1, 1), 2)
    vs = sch.hom_vertices()
    assert len(vs) == walk_count(complete_graph(4), 7, 1, 0)
    _, k = _single_move_components(sch, vs)
    assert k == 1


def test_single_move_components_match_pairwise():
    x, deck = k2xk3()
    for build in [
        lambda: omega_scheme(x, (0, 0), (1, 1), 2),
        lambda: free_scheme(x, 1),
        lambda: twisted_scheme(x, deck, 1),
        lambda: path_scheme(x, 1),
    ]:
        sch = build()
        vs = sch.hom_vertices()
        _, k = _single_move_components(sch, vs)
        groups = components_by_pairwise_adjacency(vs, sch.cross_adjacent)
        assert k == len(groups)


def test_free_loop_level_k2():
    x = k2_bigraph()
    for n in range(3):
        g = free_loop_level(x, n)
        assert len(g.vertices) == 1


def test_free_loop_level_loops_are_even_cycle_homs():
    x, _ = k2xk3()
    g = free_loop_level(x, 1)
    # looped vertices correspond to homs of the 4-cycle into the base graph
    expected = closed_walk_count(complete_graph(3), 4)
    assert len(g.looped_vertices()) == expected
    homs = enumerate_graph_homs(cycle_graph(4), complete_graph(3))
    assert len(homs) == expected
    # explicit bijection: second components around the identified cycle
    seen = {tuple(val[1] for val in t[:4]) for t in g.looped_vertices()}
    assert seen == {h for h in homs}


def test_free_loop_equivariance():
    x, deck = k2xk3()
    sch1 = free_scheme(x, 1)
    sch2 = free_scheme(x, 2)
    act1 = level_action(sch1, deck)
    act2 = level_action(sch2, deck)
    for t in sch1.hom_vertices():
        assert act1(act1(t)) == t
        assert connector_tuple(act1(t)) == act2(connector_tuple(t))


def test_twisted_loop_level_k2_flip():
    x = k2_bigraph()
    flip = OddInvolution(x, {0: 1, 1: 0})
    for n in range(3):
        g = twisted_loop_level(x, flip, n)
        assert len(g.vertices) == 1
        assert g.looped_vertices()


def test_twisted_loop_level_k3_counts():
    x, deck = k2xk3()
    g = twisted_loop_level(x, deck, 1)
    # four free positions with three choices each
    assert len(g.vertices) == 81
    # looped vertices: homs of the 3-cycle with a pendant vertex into K3
    k3 = complete_graph(3)
    count = 0
    for h in enumerate_graph_homs(cycle_graph(3), k3):
        count += len(k3.neighbors(h[0]))
    assert count == 12
    assert len(g.looped_vertices()) == count


def test_twisted_vertices_match_quotient_homs():
    # vertices of the twisted level correspond to maps into the quotient
    x, deck = k2xk3()
    g = twisted_loop_level(x, deck, 1)
    projected = {tuple(val[1] for val in t) for t in g.vertices}
    assert len(projected) == len(g.vertices)


def test_cycle_hom_level_counts():
    k3 = complete_graph(3)
    g = cycle_hom_level(k3, 3)
    assert len(g.vertices) == 6
    assert [v for v in g.vertices if not g.has_loop(v)] == []
    # the six triangle homs are pairwise non-adjacent
    assert len(g.edges()) == 6

    assert len(cycle_hom_level(complete_graph(2), 4).vertices) == 2
    assert len(cycle_hom_level(complete_graph(2), 5).vertices) == 0
    with pytest.raises(ValueError):
        cycle_hom_level(k3, 2)


def test_cycle_hom_level_matches_bruteforce():
    k3 = complete_graph(3)
    for m in (3, 4, 5, 6):
        g = cycle_hom_level(k3, m)
        homs = enumerate_graph_homs(cycle_graph(m), k3)
        assert set(g.vertices) == {h for h in homs}
        # independent pairwise adjacency oracle
        cm = cycle_graph(m)

        def adjacent(f, h):
            return all(
                k3.has_edge(f[a], h[b]) and k3.has_edge(h[a], f[b])
                for a, b in cm.edges()
            )

        groups = components_by_pairwise_adjacency(list(g.vertices), adjacent)
        sch_groups = len(components_by_pairwise_adjacency(
            list(g.vertices), lambda a, b: g.has_edge(a, b)))
        assert len(groups) == sch_groups


def test_endpoint_maps():
    x, _ = k2xk3()
    lvl = path_level(x, 1)
    e_minus, e_plus = endpoint_maps(lvl)
    for t in lvl.graph.vertices:
        assert e_minus(t) == (t[0], t[1])
        assert e_plus(t) == (t[-2], t[-1])
    zero = path_level(x, 0)
    em0, ep0 = endpoint_maps(zero)
    for t in zero.graph.vertices:
        assert em0(t) == t and ep0(t) == t


def test_connector_commutes_with_endpoints():
    x, _ = k2xk3()
    l0 = path_level(x, 0)
    l1 = path_level(x, 1)
    conn = level_connector(l0.scheme, l1.scheme, l0.graph, l1.graph)
    _, ep1 = endpoint_maps(l1)
    em1, _ = endpoint_maps(l1)
    for t in l0.graph.vertices:
        assert em1(conn(t)) == t
        assert ep1(conn(t)) == t


def test_path_tower_homology_constant():
    # the level-0 inclusion preserves clique homology along the path tower
    from boxloop.complexes import clique_complex
    from boxloop.graphs import fold_reduce
    from boxloop.topology import homology

    x, _ = k2xk3()
    values = []
    for n in range(3):
        sch = path_scheme(x, n)
        core, _ = fold_reduce(sch.hom_graph())
        values.append(homology(clique_complex(core), max_dim=2))
    assert values[0] == values[1] == values[2]


def test_stabilize_omega_k4_components():
    x, _ = kronecker_cover(complete_graph(4))
    tower = Tower("omega", x, basepoint=((0, 0), (1, 1)))
    rep = stabilize(tower, max_level=6, window=2, homology_dim=0)
    assert rep.verdict == "stable"
    assert rep.stable_at == 0
    assert all(lev.component_count == 1 for lev in rep.levels)


def test_stabilize_omega_k4_full_homology_grows():
    # with the homology window at dimension 2 the loop-space homology of the
    # sphere appears at level 2, so no stabilization is observed
    x, _ = kronecker_cover(complete_graph(4))
    tower = Tower("omega", x, basepoint=((0, 0), (1, 1)))
    rep = stabilize(tower, max_level=2, window=2, homology_dim=2)
    assert rep.verdict == "not-stable"
    assert rep.levels[2].homologies[0].betti == (0, 1, 1)


def test_stabilize_omega_k3_never_stabilizes():
    x, _ = k2xk3()
    tower = Tower("omega", x, basepoint=((0, 0), (1, 1)))
    rep = stabilize(tower, max_level=4, window=2, homology_dim=0)
    assert rep.verdict == "not-stable"
    counts = [lev.component_count for lev in rep.levels]
    assert counts == [1, 1, 3, 4, 5]
    # induced component maps are injective even as counts grow
    for m in rep.pi0_maps:
        assert len(set(m.values())) == len(m)


def test_stabilize_cycle_even_k3():
    tower = Tower("cycle_hom_even", complete_graph(3))
    rep = stabilize(tower, max_level=3, window=2, homology_dim=2)
    counts = [lev.component_count for lev in rep.levels]
    assert counts == [1, 7, 3, 3]
    stab = stabilized_components(rep)
    assert stab, "some component should stabilize"
    for (n, c) in stab:
        h = rep.levels[n].homologies[c]
        assert h.betti[:2] == (0, 1)  # a circle


def test_stabilize_cycle_even_k2():
    tower = Tower("cycle_hom_even", complete_graph(2))
    rep = stabilize(tower, max_level=3, window=2, homology_dim=2)
    assert rep.verdict == "stable"
    assert rep.stable_at == 0
    for lev in rep.levels:
        assert lev.component_count == 2
        for h in lev.homologies:
            assert h.betti == (0, 0, 0)


def test_stabilize_budget_never_silent():
    x, _ = k2xk3()
    tower = Tower("omega", x, basepoint=((0, 0), (1, 1)))
    rep = stabilize(tower, max_level=0, window=2, homology_dim=0)
    assert rep.verdict == "not-stable"
    assert len(rep.levels) >= 1
    assert "not-stable" in rep.format()


def test_report_format_lines():
    tower = Tower("cycle_hom_even", complete_graph(2))
    rep = stabilize(tower, max_level=2, window=2, homology_dim=1)
    lines = rep.lines()
    assert lines[0].startswith("level 0: components=2")
    assert lines[-1].startswith("verdict: stable@0")
