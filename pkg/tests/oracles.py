"""Independent brute-force oracles used to pin expected values in the tests.

Everything here deliberately avoids the library's own algorithms: plain
permutation search, exhaustive subset/map enumeration, transfer-matrix walk
counts, and the E - V + C formula for 1-complexes.
"""

import itertools


def perm_isomorphic(g, h):
    """Exhaustive permutation search for a graph isomorphism (<= 9 vertices)."""
    va, vb = list(g.vertices), list(h.vertices)
    if len(va) != len(vb):
        return None
    ea = {frozenset((g.index(u), g.index(w))) for u, w in g.edges()}
    for perm in itertools.permutations(range(len(vb))):
        eb = {frozenset((perm[h.index(u)], perm[h.index(w)])) for u, w in h.edges()}
        if ea == eb:
            return {va[i]: vb[j] for j, i in enumerate(perm)}
    return None


def count_box_elements(g):
    """Count pairs of nonempty vertex sets with all cross pairs adjacent."""
    vs = list(g.vertices)
    total = 0
    for r in range(1, len(vs) + 1):
        for sigma in itertools.combinations(vs, r):
            for s in range(1, len(vs) + 1):
                for tau in itertools.combinations(vs, s):
                    if all(g.has_edge(a, b) for a in sigma for b in tau):
                        total += 1
    return total


def enumerate_graph_homs(g, h):
    """All graph homomorphisms G -> H by filtering every vertex map."""
    out = []
    for values in itertools.product(h.vertices, repeat=len(g.vertices)):
        f = dict(zip(g.vertices, values))
        if all(h.has_edge(f[u], f[w]) for u, w in g.edges()):
            out.append(values)
    return out


def walk_matrix(g):
    """Adjacency matrix as a list of lists of ints, in vertex order."""
    n = len(g.vertices)
    a = [[0] * n for _ in range(n)]
    for u, w in g.edges():
        a[g.index(u)][g.index(w)] = 1
        if u != w:
            a[g.index(w)][g.index(u)] = 1
    return a


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        for t in range(k):
            if a[i][t]:
                ait = a[i][t]
                for j in range(m):
                    out[i][j] += ait * b[t][j]
    return out


def mat_pow(a, e):
    n = len(a)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    base = a
    while e:
        if e & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        e >>= 1
    return out


def walk_count(g, length, u, w):
    """Number of walks of the given length from u to w."""
    p = mat_pow(walk_matrix(g), length)
    return p[g.index(u)][g.index(w)]


def closed_walk_count(g, length):
    p = mat_pow(walk_matrix(g), length)
    return sum(p[i][i] for i in range(len(p)))


def components_by_pairwise_adjacency(vertices, adjacent):
    """Union-find over an explicit pairwise adjacency predicate."""
    parent = list(range(len(vertices)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(vertices)):
        for j in range(i + 1, len(vertices)):
            if adjacent(vertices[i], vertices[j]):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups = {}
    for i in range(len(vertices)):
        groups.setdefault(find(i), []).append(vertices[i])
    return list(groups.values())


def betti1_of_1_complex(n_vertices, edges, n_components):
    """First Betti number of a 1-dimensional complex: E - V + C."""
    return len(edges) - n_vertices + n_components


def cycle_winding(cycle_len, values):
    """Signed number of net turns of a closed walk on the n-cycle 0..n-1."""
    total = 0
    for a, b in zip(values, values[1:]):
        d = (b - a) % cycle_len
        if d == 1:
            total += 1
        elif d == cycle_len - 1:
            total -= 1
        else:
            raise ValueError("not a cycle walk")
    if total % cycle_len:
        raise ValueError("walk not closed")
    return total // cycle_len
