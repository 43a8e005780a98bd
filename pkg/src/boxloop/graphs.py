"""Finite graphs with loops, 2-colored graphs, and their homomorphisms.

A graph is a finite vertex list together with a symmetric edge relation;
loops are allowed, multi-edges are not.  A bigraph is a graph equipped with
a proper 2-coloring (so it is bipartite and loopless).  All values are
immutable after construction and all operations are pure functions.

Vertex ids are opaque hashable tokens; the declared vertex order is the
canonical total order used for deterministic output everywhere (fold
tie-breaks, serialization, isomorphism search).
"""

from __future__ import annotations

import itertools


DEFAULT_VERTEX_CAP = 2_000_000    # vertex cap for exponential-graph constructions
DEFAULT_ISO_CAP = 200             # hard cap for isomorphism search


class SizeCapError(RuntimeError):
    """A construction would exceed its configured size cap."""

    def __init__(self, what, size, cap):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class Graph:
    """Undirected graph with optional loops.

    ``vertices`` is an ordered tuple of distinct hashable ids; ``edges`` is
    any iterable of pairs (u, v) with u == v allowed (a loop).  The edge set
    is deduplicated and symmetrized.
    """

    __slots__ = ("vertices", "name", "_index", "_adj")

    def __init__(self, vertices, edges=(), name=""):
        self.vertices = tuple(vertices)
        self.name = name
        self._index = {v: i for i, v in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        adj = {v: set() for v in self.vertices}
        for u, w in edges:
            if u not in adj or w not in adj:
                raise ValueError(f"edge ({u!r}, {w!r}) has undeclared endpoint")
            adj[u].add(w)
            adj[w].add(u)
        self._adj = {v: frozenset(s) for v, s in adj.items()}

    # -- basic queries ----------------------------------------------------

    def index(self, v):
        return self._index[v]

    def __contains__(self, v):
        return v in self._index

    def __len__(self):
        return len(self.vertices)

    def neighbors(self, v):
        return self._adj[v]

    def degree(self, v):
        return len(self._adj[v])

    def has_edge(self, u, w):
        return w in self._adj[u]

    def has_loop(self, v):
        return v in self._adj[v]

    def edges(self):
        """Sorted list of unordered edges as (u, w) with index(u) <= index(w)."""
        out = []
        for u in self.vertices:
            iu = self._index[u]
            for w in self._adj[u]:
                if self._index[w] >= iu:
                    out.append((u, w))
        out.sort(key=lambda e: (self._index[e[0]], self._index[e[1]]))
        return out

    def looped_vertices(self):
        return tuple(v for v in self.vertices if v in self._adj[v])

    def is_reflexive(self):
        return all(v in self._adj[v] for v in self.vertices)

    def sort_key(self, v):
        return self._index[v]

    # -- derived graphs ----------------------------------------------------

    def induced(self, keep, name=""):
        keep = set(keep)
        vs = [v for v in self.vertices if v in keep]
        es = [(u, w) for u, w in self.edges() if u in keep and w in keep]
        return Graph(vs, es, name=name)

    def delete_vertex(self, v):
        return self.induced([u for u in self.vertices if u != v], name=self.name)

    def with_name(self, name):
        return Graph(self.vertices, self.edges(), name=name)

    def __repr__(self):
        return f"Graph({self.name or len(self.vertices)!r}, n={len(self.vertices)}, m={len(self.edges())})"

    def equals(self, other):
        """Structural equality: same vertex tuple and same edge set."""
        return self.vertices == other.vertices and self._adj == other._adj


class Bigraph:
    """Graph with a proper 2-coloring: every edge joins colors 0 and 1."""

    __slots__ = ("graph", "coloring")

    def __init__(self, graph, coloring):
        self.graph = graph
        self.coloring = dict(coloring)
        for v in graph.vertices:
            if self.coloring.get(v) not in (0, 1):
                raise ValueError(f"vertex {v!r} lacks a 0/1 color")
        for u, w in graph.edges():
            if self.coloring[u] == self.coloring[w]:
                raise ValueError(f"edge ({u!r}, {w!r}) joins equal colors")

    @property
    def vertices(self):
        return self.graph.vertices

    @property
    def name(self):
        return self.graph.name

    def color(self, v):
        return self.coloring[v]

    def side(self, i):
        """The color class V_i, in vertex order."""
        return tuple(v for v in self.graph.vertices if self.coloring[v] == i)

    def neighbors(self, v):
        return self.graph.neighbors(v)

    def induced(self, keep, name=""):
        g = self.graph.induced(keep, name=name)
        return Bigraph(g, {v: self.coloring[v] for v in g.vertices})

    def delete_vertex(self, v):
        return self.induced([u for u in self.vertices if u != v], name=self.name)

    def __len__(self):
        return len(self.graph)

    def __repr__(self):
        return f"Bigraph({self.name or len(self.vertices)!r}, n={len(self.vertices)})"


def underlying(x):
    """The Graph beneath a Graph or Bigraph."""
    return x.graph if isinstance(x, Bigraph) else x


class GraphHom:
    """Vertex map preserving edges; color-preserving when both ends are bigraphs."""

    __slots__ = ("source", "target", "mapping", "is_bigraph_hom")

    def __init__(self, source, target, mapping):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        gs, gt = underlying(source), underlying(target)
        for v in gs.vertices:
            if v not in self.mapping:
                raise ValueError(f"vertex {v!r} unmapped")
            if self.mapping[v] not in gt:
                raise ValueError(f"image {self.mapping[v]!r} not a target vertex")
        for u, w in gs.edges():
            if not gt.has_edge(self.mapping[u], self.mapping[w]):
                raise ValueError(f"edge ({u!r}, {w!r}) not preserved")
        self.is_bigraph_hom = isinstance(source, Bigraph) and isinstance(target, Bigraph)
        if self.is_bigraph_hom:
            for v in gs.vertices:
                if target.color(self.mapping[v]) != source.color(v):
                    raise ValueError(f"coloring not preserved at {v!r}")

    def __call__(self, v):
        return self.mapping[v]

    def compose(self, other):
        """self after other."""
        return GraphHom(other.source, self.target,
                        {v: self.mapping[w] for v, w in other.mapping.items()})

    def __repr__(self):
        return f"GraphHom({underlying(self.source).name!r}->{underlying(self.target).name!r})"


class OddInvolution:
    """Color-flipping self-map of a bigraph squaring to the identity."""

    __slots__ = ("bigraph", "mapping")

    def __init__(self, bigraph, mapping):
        self.bigraph = bigraph
        self.mapping = dict(mapping)
        g = bigraph.graph
        for v in g.vertices:
            w = self.mapping.get(v)
            if w not in g:
                raise ValueError(f"involution undefined or off-graph at {v!r}")
            if bigraph.color(w) == bigraph.color(v):
                raise ValueError(f"involution preserves the color of {v!r}")
            if self.mapping[w] != v:
                raise ValueError(f"not an involution at {v!r}")
        for u, w in g.edges():
            if not g.has_edge(self.mapping[u], self.mapping[w]):
                raise ValueError(f"involution breaks edge ({u!r}, {w!r})")

    def __call__(self, v):
        return self.mapping[v]

    @property
    def hom(self):
        return GraphHom(self.bigraph.graph, self.bigraph.graph, self.mapping)


# -- standard graphs -------------------------------------------------------


def complete_graph(n):
    """K_n: vertices 0..n-1, all unequal pairs adjacent, no loops."""
    vs = range(n)
    return Graph(vs, [(i, j) for i in vs for j in vs if i < j], name=f"k{n}")


def cycle_graph(n):
    """C_n for n >= 3."""
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)], name=f"c{n}")


def reflexive_interval(n):
    """The reflexive path on 0..n: all loops plus consecutive edges."""
    es = [(i, i) for i in range(n + 1)] + [(i, i + 1) for i in range(n)]
    return Graph(range(n + 1), es, name=f"i{n}")


def looped_point():
    """The one-vertex reflexive graph."""
    return Graph([0], [(0, 0)], name="pt")


def standard_graph(kind, n=0):
    if kind == "complete":
        return complete_graph(n)
    if kind == "cycle":
        return cycle_graph(n)
    if kind == "interval":
        return reflexive_interval(n)
    if kind == "one_looped_vertex":
        return looped_point()
    raise ValueError(f"unknown standard graph kind {kind!r}")


def interval_bigraph(a, b):
    """The colored path L on integers a..b, edges |x-y| = 1, color x mod 2.

    The printed relation |x-y| <= 1 would add loops, which no 2-coloring
    admits, so loops are dropped.
    """
    if a > b:
        raise ValueError("interval requires a <= b")
    vs = range(a, b + 1)
    g = Graph(vs, [(x, x + 1) for x in range(a, b)], name=f"l_{a}_{b}")
    return Bigraph(g, {x: x % 2 for x in vs})


def k2_bigraph():
    """K_2 as a bigraph with the identity coloring."""
    return interval_bigraph(0, 1)


# -- products and covers ----------------------------------------------------


def product(g, h, name=""):
    """Categorical product: (x,y) ~ (x',y') iff x ~ x' and y ~ y'."""
    vs = [(x, y) for x in g.vertices for y in h.vertices]
    es = []
    for x, x2 in g.edges():
        for y, y2 in h.edges():
            es.append(((x, y), (x2, y2)))
            es.append(((x, y2), (x2, y)))
    return Graph(vs, es, name=name or f"{g.name}x{h.name}")


def product_bigraph(x, g, name=""):
    """Product of a bigraph with a graph, colored through the first projection."""
    p = product(x.graph, g, name=name)
    return Bigraph(p, {(u, w): x.color(u) for (u, w) in p.vertices})


def kronecker_cover(g):
    """The double cover K_2 x G as a bigraph, with its deck involution."""
    big = product_bigraph(k2_bigraph(), g, name=f"k2x{g.name}")
    deck = OddInvolution(big, {(i, v): (1 - i, v) for (i, v) in big.vertices})
    return big, deck


def quotient_by_involution(x, alpha):
    """Quotient of a bigraph by an odd involution; orbits become vertices.

    Orbit ids are the smaller member in vertex order.  Round trip:
    kronecker_cover(X/alpha) is isomorphic to X as a bigraph.
    """
    g = x.graph
    rep = {}
    for v in g.vertices:
        w = alpha(v)
        assert w != v, "odd involutions are fixed-point-free"
        r = v if g.index(v) <= g.index(w) else w
        rep[v] = r
    vs = sorted({r for r in rep.values()}, key=g.index)
    es = {(rep[u], rep[w]) for u, w in g.edges()}
    return Graph(vs, es, name=f"{x.name}_quo")


# -- exponential graphs ------------------------------------------------------


def _map_count(base, expo):
    n = 1
    for _ in range(expo):
        n *= base
    return n


def exponential_graph(g, h, cap=DEFAULT_VERTEX_CAP):
    """exp(G, H): all maps V(G) -> V(H); f ~ g iff (f x g)(E(G)) in E(H).

    Looped vertices are exactly the graph homomorphisms G -> H.  Vertex ids
    are the value tuples in G's vertex order.
    """
    n = _map_count(len(h.vertices), len(g.vertices))
    if n > cap:
        raise SizeCapError("exponential graph", n, cap)
    vs = list(itertools.product(h.vertices, repeat=len(g.vertices)))
    ge = g.edges()
    gi = g.index
    es = []
    for f in vs:
        for f2 in vs:
            if f2 < f:
                continue
            ok = True
            for u, w in ge:
                a, b = f[gi(u)], f2[gi(w)]
                if not h.has_edge(a, b) or not h.has_edge(f2[gi(u)], f[gi(w)]):
                    ok = False
                    break
            if ok:
                es.append((f, f2))
    return Graph(vs, es, name=f"exp({g.name},{h.name})")


def exponential_bigraph(x, y, cap=DEFAULT_VERTEX_CAP):
    """Y^X: the induced subgraph of exp(X, Y) on color-preserving maps."""
    gx, gy = x.graph, y.graph
    side = {0: y.side(0), 1: y.side(1)}
    n = 1
    for v in gx.vertices:
        n *= len(side[x.color(v)])
    if n > cap:
        raise SizeCapError("exponential bigraph", n, cap)
    pools = [side[x.color(v)] for v in gx.vertices]
    vs = list(itertools.product(*pools))
    ge = gx.edges()
    gi = gx.index
    es = []
    for f in vs:
        for f2 in vs:
            if f2 < f:
                continue
            ok = True
            for u, w in ge:
                if not gy.has_edge(f[gi(u)], f2[gi(w)]) or not gy.has_edge(f2[gi(u)], f[gi(w)]):
                    ok = False
                    break
            if ok:
                es.append((f, f2))
    return Graph(vs, es, name=f"{y.name}^{x.name}")


def exponential_involution(x, y, alpha_x, alpha_y):
    """The involution f -> alpha_Y o f o alpha_X on the vertex tuples of Y^X."""
    gx = x.graph

    def act(f):
        return tuple(alpha_y(f[gx.index(alpha_x(v))]) for v in gx.vertices)

    return act


# -- folds -------------------------------------------------------------------


def _adjacency_masks(g):
    masks = {}
    for v in g.vertices:
        m = 0
        for w in g.neighbors(v):
            m |= 1 << g.index(w)
        masks[v] = m
    return masks


def find_dismantlable(x):
    """All pairs (v, w), v != w, with N(v) a subset of N(w), sorted.

    For nonempty N(v) the witnesses are exactly the common neighbors of
    N(v); for isolated v every other vertex is a witness.
    """
    g = underlying(x)
    masks = _adjacency_masks(g)
    full = (1 << len(g.vertices)) - 1
    out = []
    for v in g.vertices:
        nv = g.neighbors(v)
        if nv:
            cand = full
            for u in nv:
                cand &= masks[u]
        else:
            cand = full
        cand &= ~(1 << g.index(v))
        i = 0
        while cand:
            if cand & 1:
                out.append((v, g.vertices[i]))
            cand >>= 1
            i += 1
    return out


def fold_reduce(x):
    """Repeatedly delete the smallest dismantlable vertex until none remain.

    Returns (core, log) where log lists the removed (vertex, witness) pairs
    in order.  Works on graphs and bigraphs alike; a bigraph core keeps the
    restriction of the coloring.
    """
    g = underlying(x)
    verts = list(g.vertices)
    masks = _adjacency_masks(g)
    bit = {v: 1 << g.index(v) for v in verts}
    alive_mask = (1 << len(verts)) - 1
    alive = set(verts)
    log = []
    while True:
        found = None
        for v in verts:
            if v not in alive:
                continue
            nm = masks[v] & alive_mask
            if nm:
                cand = alive_mask
                u = nm
                i = 0
                while u:
                    if u & 1:
                        cand &= masks[verts[i]]
                    u >>= 1
                    i += 1
            else:
                cand = alive_mask
            cand &= alive_mask & ~bit[v]
            if cand:
                w = verts[(cand & -cand).bit_length() - 1]
                found = (v, w)
                break
        if found is None:
            break
        v, w = found
        log.append((v, w))
        alive.discard(v)
        alive_mask &= ~bit[v]
    core = x.induced([v for v in verts if v in alive], name=underlying(x).name)
    return core, log


# -- isomorphism -------------------------------------------------------------


def _refine_classes(g, colors):
    """1-dimensional Weisfeiler-Leman refinement starting from given labels."""
    lab = dict(colors)
    while True:
        sig = {}
        for v in g.vertices:
            nb = sorted(lab[w] for w in g.neighbors(v))
            sig[v] = (lab[v], tuple(nb))
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {v: ranks[sig[v]] for v in g.vertices}
        if new == lab:
            return lab
        lab = new


def is_isomorphic(a, b, cap=DEFAULT_ISO_CAP):
    """Isomorphism witness between two graphs or two bigraphs, or None.

    Backtracking over WL-refined vertex classes; exact.  Bigraph mode also
    requires the colorings to correspond.
    """
    if isinstance(a, Bigraph) != isinstance(b, Bigraph):
        raise TypeError("cannot compare a graph with a bigraph")
    ga, gb = underlying(a), underlying(b)
    if len(ga.vertices) > cap or len(gb.vertices) > cap:
        raise SizeCapError("isomorphism search", max(len(ga.vertices), len(gb.vertices)), cap)
    if len(ga.vertices) != len(gb.vertices) or len(ga.edges()) != len(gb.edges()):
        return None

    def start(g, x):
        out = {}
        for v in g.vertices:
            c = x.color(v) if isinstance(x, Bigraph) else 0
            out[v] = (c, g.degree(v), g.has_loop(v))
        ranks = {s: i for i, s in enumerate(sorted(set(out.values())))}
        return {v: ranks[out[v]] for v in g.vertices}

    la = _refine_classes(ga, start(ga, a))
    lb = _refine_classes(gb, start(gb, b))
    if sorted(la.values()) != sorted(lb.values()):
        return None
    byclass = {}
    for v in gb.vertices:
        byclass.setdefault(lb[v], []).append(v)

    order = sorted(ga.vertices, key=lambda v: (la[v], ga.index(v)))
    mapping = {}
    used = set()

    def extend(i):
        if i == len(order):
            return True
        v = order[i]
        for w in byclass.get(la[v], ()):
            if w in used:
                continue
            ok = True
            for u in mapping:
                if ga.has_edge(v, u) != gb.has_edge(w, mapping[u]):
                    ok = False
                    break
            if ok and ga.has_loop(v) == gb.has_loop(w):
                mapping[v] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    if extend(0):
        return dict(mapping)
    return None


# -- homotopy of homomorphisms ----------------------------------------------


def enumerate_bigraph_homs(x, y, cap=DEFAULT_VERTEX_CAP):
    """All bigraph homomorphisms X -> Y as value tuples in X's vertex order."""
    gx, gy = x.graph, y.graph
    verts = gx.vertices
    side = {0: y.side(0), 1: y.side(1)}
    out = []
    partial = {}

    def place(i):
        if len(out) > cap:
            raise SizeCapError("homomorphism enumeration", len(out), cap)
        if i == len(verts):
            out.append(tuple(partial[v] for v in verts))
            return
        v = verts[i]
        cands = side[x.color(v)]
        for c in cands:
            ok = True
            for u in gx.neighbors(v):
                if u in partial and not gy.has_edge(c, partial[u]):
                    ok = False
                    break
            if ok:
                partial[v] = c
                place(i + 1)
                del partial[v]

    place(0)
    return out


def times_homotopic(f, g):
    """Whether two bigraph homomorphisms X -> Y can be deformed into each other.

    Tests connectivity inside the maximal reflexive subgraph of Y^X, whose
    looped vertices are exactly the homomorphisms; only that subgraph is
    materialized.
    """
    if f.source is not g.source or f.target is not g.target:
        if underlying(f.source).vertices != underlying(g.source).vertices:
            raise ValueError("homomorphisms must share source and target")
    x, y = f.source, g.target
    gx, gy = x.graph, y.graph
    verts = gx.vertices
    homs = enumerate_bigraph_homs(x, y)
    hi = {h: i for i, h in enumerate(homs)}
    ft = tuple(f(v) for v in verts)
    gt = tuple(g(v) for v in verts)
    ge = gx.edges()
    gi = gx.index

    def adjacent(p, q):
        for u, w in ge:
            if not gy.has_edge(p[gi(u)], q[gi(w)]) or not gy.has_edge(q[gi(u)], p[gi(w)]):
                return False
        return True

    if ft == gt:
        return True
    seen = {hi[ft]}
    frontier = [ft]
    while frontier:
        cur = frontier.pop()
        for h in homs:
            j = hi[h]
            if j not in seen and adjacent(cur, h):
                if h == gt:
                    return True
                seen.add(j)
                frontier.append(h)
    return False
