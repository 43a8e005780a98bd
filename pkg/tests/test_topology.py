"""Algebra kernel: SNF, homology, presentations, cores, fiber checks."""

import random

import pytest

import boxloop.topology as topology
from boxloop.complexes import (
    Poset,
    PosetMap,
    SimplicialComplex,
    box_complex,
    face_poset,
    hom_complex,
    neighborhood_complex,
    order_complex,
    product_poset,
)
from boxloop.graphs import complete_graph, cycle_graph
from boxloop.topology import (
    GroupPresentation,
    abelianization,
    bareiss_determinant,
    cor_down_set_isomorphism_check,
    edge_path_presentation,
    homology,
    homotopy_equivalent_certificate,
    mat_mul,
    poset_isomorphic,
    quillen_b_check,
    smith_normal_form,
    snf_diagonal,
    sparse_invariant_factors,
    stong_core,
    trivial_homology,
)


@pytest.fixture(autouse=True)
def _postconditions():
    topology.CHECK_POSTCONDITIONS = True
    yield
    topology.CHECK_POSTCONDITIONS = False


def check_snf(m):
    u, s, v = smith_normal_form(m)
    assert mat_mul(mat_mul(u, m), v) == s
    d = snf_diagonal(s)
    for x, y in zip(d, d[1:]):
        assert y % x == 0
    for i in range(len(s)):
        for j in range(len(s[0]) if s else 0):
            if i != j:
                assert s[i][j] == 0
    assert abs(bareiss_determinant(u)) == 1
    assert abs(bareiss_determinant(v)) == 1
    return d


def test_snf_examples():
    d = check_snf([[2, 4], [6, 8]])
    assert d == [2, 4]
    check_snf([[0, 0], [0, 0]])
    u, s, v = smith_normal_form([[0, 0], [0, 0]])
    assert s == [[0, 0], [0, 0]]
    d = check_snf([[1, 0], [0, 1]])
    assert d == [1, 1]


def test_snf_random_small():
    rng = random.Random(0)
    for _ in range(200):
        r = rng.randrange(1, 5)
        c = rng.randrange(1, 5)
        m = [[rng.randrange(-9, 10) for _ in range(c)] for _ in range(r)]
        check_snf(m)


def test_sparse_invariant_factors_matches_dense():
    rng = random.Random(1)
    for _ in range(100):
        r = rng.randrange(1, 6)
        c = rng.randrange(1, 6)
        m = [[rng.randrange(-4, 5) for _ in range(c)] for _ in range(r)]
        rows = [{j: v for j, v in enumerate(row) if v} for row in m]
        rank, tor = sparse_invariant_factors(rows, c)
        _, s, _ = smith_normal_form(m)
        d = snf_diagonal(s)
        assert rank == len(d)
        assert tor == [abs(x) for x in d if abs(x) != 1]


def triangle_boundary():
    return SimplicialComplex([0, 1, 2], [(0, 1), (1, 2), (0, 2)])


def full_triangle():
    return SimplicialComplex([0, 1, 2], [(0, 1, 2)])


def test_homology_circle():
    h = homology(triangle_boundary(), max_dim=2)
    assert h.components == 1
    assert h.betti == (0, 1, 0)
    assert h.torsion == ((), (), ())
    assert h.lines()[0] == "H_0: Z"
    assert h.lines()[1] == "H_1: Z"


def test_homology_disc():
    h = homology(full_triangle(), max_dim=2)
    assert h.components == 1
    assert h.betti == (0, 0, 0)


def test_homology_empty():
    h = homology(SimplicialComplex([], []), max_dim=2)
    assert h.components == 0
    assert h.betti == (0, 0, 0)


def test_homology_two_points():
    k = SimplicialComplex([0, 1], [(0,), (1,)])
    h = homology(k, max_dim=1)
    assert h.components == 2
    assert h.betti == (1, 0)


def test_homology_sphere_tetra_boundary():
    k = SimplicialComplex(range(4), [f for f in
                                     [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]])
    h = homology(k, max_dim=3)
    assert h.betti == (0, 0, 1, 0)
    assert h.components == 1


def test_homology_projective_plane_torsion():
    # minimal 6-vertex triangulation of the projective plane
    # (antipodal quotient of the icosahedron; every edge lies in 2 triangles)
    facets = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
              (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4)]
    k = SimplicialComplex(range(1, 7), facets)
    for reduce_first in (False, True):
        h = homology(k, max_dim=2, reduce_first=reduce_first)
        assert h.components == 1
        assert h.betti == (0, 0, 0)
        assert h.torsion[1] == (2,)


def test_homology_of_box_k4_is_sphere():
    p, _ = box_complex(complete_graph(4))
    h = homology(order_complex(p), max_dim=3)
    assert h.betti == (0, 0, 1, 0)
    n = homology(neighborhood_complex(complete_graph(4)), max_dim=3)
    assert h == n


def test_homology_with_and_without_collapse_agree():
    rng = random.Random(3)
    for _ in range(20):
        n = 6
        facets = []
        for _ in range(rng.randrange(2, 7)):
            size = rng.randrange(1, 4)
            facets.append(tuple(rng.sample(range(n), size)))
        k = SimplicialComplex(range(n), facets)
        assert homology(k, 2, reduce_first=True) == homology(k, 2, reduce_first=False)


def test_edge_path_presentation_circle():
    p = edge_path_presentation(triangle_boundary(), 0)
    assert len(p.generators) == 1
    assert p.relators == ()
    rank, tor = abelianization(p)
    assert (rank, tor) == (1, ())


def test_edge_path_presentation_disc():
    p = edge_path_presentation(full_triangle(), 0)
    assert p.is_trivial_presentation()
    assert p.format() == "trivial"

    two = SimplicialComplex(range(4), [(0, 1, 2), (1, 2, 3)])
    p = edge_path_presentation(two, 0)
    assert p.is_trivial_presentation()


def test_edge_path_presentation_sphere_is_trivial():
    n = neighborhood_complex(complete_graph(4))
    p = edge_path_presentation(n, 0)
    assert p.is_trivial_presentation()


def test_edge_path_presentation_errors():
    with pytest.raises(ValueError):
        edge_path_presentation(triangle_boundary(), 99)


def test_abelianization_examples():
    assert abelianization(GroupPresentation(("a",), ())) == (1, ())
    assert abelianization(GroupPresentation(("a",), ((1, 1),))) == (0, (2,))


def test_abelianization_matches_h1():
    corpus = [
        triangle_boundary(),
        full_triangle(),
        neighborhood_complex(complete_graph(3)),
        neighborhood_complex(cycle_graph(5)),
        neighborhood_complex(cycle_graph(6)),
        order_complex(box_complex(complete_graph(3))[0]),
    ]
    for k in corpus:
        comp = k.components()
        if not comp:
            continue
        base = comp[0][0]
        pres = edge_path_presentation(k, base)
        rank, tor = abelianization(pres)
        sub = SimplicialComplex(k.vertices,
                                [f for f in k.facets if f & set(comp[0])])
        h = homology(sub, max_dim=1)
        assert (rank, tor) == (h.betti[1], h.torsion[1])


def chain_poset(n):
    els = list(range(n))
    return Poset(els, {i: set(range(i, n)) for i in els})


def test_stong_core_cone_to_point():
    els = ["a", "b", "c", "top"]
    above = {"a": {"a", "top"}, "b": {"b", "top"}, "c": {"c", "top"}, "top": {"top"}}
    p = Poset(els, above)
    core, log = stong_core(p)
    assert len(core) == 1
    assert len(log) == 3


def test_stong_core_preserves_homology():
    p, _ = box_complex(complete_graph(3))
    core, _ = stong_core(p)
    assert homology(order_complex(p), 2) == homology(order_complex(core), 2)


def test_stong_core_idempotent():
    p, _ = box_complex(complete_graph(3))
    core, _ = stong_core(p)
    again, log = stong_core(core)
    assert log == []
    assert len(again) == len(core)


def test_poset_isomorphic():
    assert poset_isomorphic(chain_poset(3), chain_poset(3)) is not None
    assert poset_isomorphic(chain_poset(3), chain_poset(2)) is None
    p, _ = box_complex(complete_graph(3))
    q, _ = box_complex(complete_graph(3))
    assert poset_isomorphic(p, q) is not None


def test_certificate_statuses():
    p, _ = box_complex(complete_graph(3))
    fp = face_poset(neighborhood_complex(complete_graph(3)))
    v = homotopy_equivalent_certificate(p, fp)
    assert v.status in ("certified", "unknown")

    point = chain_poset(1)
    b2, _ = box_complex(complete_graph(2))
    v = homotopy_equivalent_certificate(point, b2)
    assert v.status == "refuted"

    v = homotopy_equivalent_certificate(p, p)
    assert v.status == "certified"


def test_quillen_b_identity_certified():
    p, _ = box_complex(complete_graph(3))
    ident = PosetMap(p, p, {e: e for e in p.elements})
    v = quillen_b_check(ident)
    assert v.status == "certified"


def test_quillen_b_constant_map():
    p = chain_poset(3)
    point = chain_poset(1)
    const = PosetMap(p, point, {e: 0 for e in p.elements})
    v = quillen_b_check(const)
    assert v.status == "certified"


def test_quillen_b_refutes_projection():
    # projecting a 2-point fiber over a chain onto the chain fails the
    # hypothesis when one fiber gains a component
    els = ["a", "b", "top"]
    p = Poset(els, {"a": {"a"}, "b": {"b"}, "top": {"top"}})
    q = chain_poset(2)
    m = PosetMap(p, q, {"a": 0, "b": 1, "top": 1})
    v = quillen_b_check(m)
    assert v.status == "refuted"
    assert any("fiber homology differs" in line for line in v.evidence)


def test_quillen_b_fixed_point_mode_requires_actions():
    p, act = box_complex(complete_graph(3))
    ident = PosetMap(p, p, {e: e for e in p.elements})
    with pytest.raises(ValueError):
        quillen_b_check(ident, fixed_point_mode=True)
    v = quillen_b_check(ident, fixed_point_mode=True,
                        source_action=act, target_action=act)
    assert v.status == "certified"


def test_cor_down_set_isomorphism_check():
    chain = chain_poset(3)
    ident = PosetMap(chain, chain, {i: i for i in range(3)})
    assert cor_down_set_isomorphism_check(ident)

    # inclusion of a down-closed subposet
    sub = chain.subposet([0, 1])
    incl = PosetMap(sub, chain, {0: 0, 1: 1})
    assert cor_down_set_isomorphism_check(incl)

    # collapsing a 2-chain to a point
    point = chain_poset(1)
    col = PosetMap(chain_poset(2), point, {0: 0, 1: 0})
    assert not cor_down_set_isomorphism_check(col)


def test_trivial_homology_helper():
    t = trivial_homology(2)
    assert t.components == 1
    assert t.betti == (0, 0, 0)
