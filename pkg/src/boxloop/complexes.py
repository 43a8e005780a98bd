"""Posets and simplicial complexes attached to graphs and bigraphs.

Box complexes, Hom complexes of multi-homomorphisms, neighborhood and
clique complexes, order complexes and face posets.  Poset elements are
canonical hashable objects (tuples of sorted tuples for set data) so that
serialization and isomorphism search are deterministic.
"""

from __future__ import annotations

import itertools

from .graphs import Bigraph, SizeCapError, underlying

DEFAULT_POSET_CAP = 500_000


def _canon_set(vs, key):
    return tuple(sorted(vs, key=key))


class Poset:
    """Finite poset with containment queries and cover relations.

    ``relation`` maps each element to the set of elements >= it (itself
    included).  The poset axioms are machine-checked on construction.
    """

    __slots__ = ("elements", "_index", "_above", "_below", "labels")

    def __init__(self, elements, above, labels=None, validate=True):
        self.elements = tuple(elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise ValueError("duplicate poset elements")
        self._above = {e: frozenset(above[e]) for e in self.elements}
        below = {e: set() for e in self.elements}
        for e in self.elements:
            for f in self._above[e]:
                below[f].add(e)
        self._below = {e: frozenset(s) for e, s in below.items()}
        self.labels = labels or {}
        if validate:
            self._check_axioms()

    def _check_axioms(self):
        for e in self.elements:
            up = self._above[e]
            if e not in up:
                raise ValueError(f"not reflexive at {e!r}")
            for f in up:
                if f != e and e in self._above[f]:
                    raise ValueError(f"not antisymmetric at {e!r}, {f!r}")
                if not self._above[f] <= up:
                    raise ValueError(f"not transitive at {e!r} <= {f!r}")

    @classmethod
    def from_leq(cls, elements, leq, labels=None, validate=True):
        elements = list(elements)
        above = {e: {f for f in elements if leq(e, f)} for e in elements}
        return cls(elements, above, labels=labels, validate=validate)

    @classmethod
    def from_cover_pairs(cls, elements, covers, labels=None):
        """Build from cover relations (a, b) meaning a < b; closure is computed."""
        elements = list(elements)
        up = {e: {e} for e in elements}
        succ = {e: set() for e in elements}
        for a, b in covers:
            succ[a].add(b)
        # transitive closure by repeated propagation (posets here are small)
        changed = True
        while changed:
            changed = False
            for a in elements:
                add = set()
                for b in succ[a]:
                    add |= up[b]
                if not add <= up[a]:
                    up[a] |= add
                    changed = True
        return cls(elements, up, labels=labels)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, e):
        return e in self._index

    def index(self, e):
        return self._index[e]

    def leq(self, a, b):
        return b in self._above[a]

    def above(self, e, strict=False):
        s = self._above[e]
        return s - {e} if strict else s

    def below(self, e, strict=False):
        s = self._below[e]
        return s - {e} if strict else s

    def down_set(self, e):
        return self._below[e]

    def comparable_pairs(self, strict=True):
        """Pairs (a, b) with a <= b, in element order; strict drops a == b."""
        out = []
        for a in self.elements:
            for b in self.elements:
                if self.leq(a, b) and (not strict or a != b):
                    out.append((a, b))
        return out

    def covers(self):
        """Sorted cover pairs (a, b): a < b with nothing strictly between."""
        out = []
        for a in self.elements:
            ups = self.above(a, strict=True)
            for b in ups:
                if not any(c != b and self.leq(c, b) for c in ups):
                    out.append((a, b))
        out.sort(key=lambda p: (self._index[p[0]], self._index[p[1]]))
        return out

    def maximal_elements(self):
        return tuple(e for e in self.elements if not self.above(e, strict=True))

    def minimal_elements(self):
        return tuple(e for e in self.elements if not self.below(e, strict=True))

    def subposet(self, keep):
        keep = set(keep)
        els = [e for e in self.elements if e in keep]
        above = {e: self._above[e] & keep for e in els}
        labels = {e: self.labels[e] for e in els if e in self.labels}
        return Poset(els, above, labels=labels, validate=False)

    def label(self, e):
        return self.labels.get(e) or element_label(e)

    def relabeled(self, fn):
        return Poset(self.elements, self._above,
                     labels={e: fn(e) for e in self.elements}, validate=False)


def element_label(e):
    """Canonical string form of a poset element built from nested tuples."""
    if isinstance(e, tuple):
        return "(" + ",".join(element_label(x) for x in e) + ")"
    if isinstance(e, frozenset):
        return "{" + ",".join(sorted(element_label(x) for x in e)) + "}"
    return str(e)


class PosetMap:
    """Order-preserving map between posets."""

    __slots__ = ("source", "target", "mapping")

    def __init__(self, source, target, mapping):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        for e in source.elements:
            if self.mapping.get(e) not in target._index:
                raise ValueError(f"element {e!r} unmapped or off-target")
        for a, b in source.comparable_pairs():
            if not target.leq(self.mapping[a], self.mapping[b]):
                raise ValueError(f"order not preserved on {a!r} <= {b!r}")

    def __call__(self, e):
        return self.mapping[e]


class InvolutionAction:
    """Structure automorphism of order two on a poset, complex, or graph."""

    __slots__ = ("carrier", "mapping")

    def __init__(self, carrier, mapping):
        self.carrier = carrier
        self.mapping = dict(mapping)
        for e in self._domain():
            f = self.mapping.get(e)
            if f is None:
                raise ValueError(f"action undefined at {e!r}")
            if self.mapping.get(f) != e:
                raise ValueError(f"not an involution at {e!r}")
        self._check_automorphism()

    def _domain(self):
        c = self.carrier
        if isinstance(c, Poset):
            return c.elements
        if isinstance(c, SimplicialComplex):
            return c.vertices
        return underlying(c).vertices

    def _check_automorphism(self):
        c = self.carrier
        a = self.mapping
        if isinstance(c, Poset):
            for x, y in c.comparable_pairs():
                if not c.leq(a[x], a[y]):
                    raise ValueError("action does not preserve order")
        elif isinstance(c, SimplicialComplex):
            facets = {frozenset(a[v] for v in f) for f in c.facets}
            if facets != set(c.facets):
                raise ValueError("action does not preserve facets")
        else:
            g = underlying(c)
            for u, w in g.edges():
                if not g.has_edge(a[u], a[w]):
                    raise ValueError("action does not preserve adjacency")

    def __call__(self, e):
        return self.mapping[e]

    def fixed_elements(self):
        return tuple(e for e in self._domain() if self.mapping[e] == e)


class SimplicialComplex:
    """Abstract simplicial complex stored by maximal faces.

    ``vertices`` fixes the canonical vertex order; faces are generated from
    the facets on demand.  The empty complex (no facets) is legal.
    """

    __slots__ = ("vertices", "_vkey", "facets")

    def __init__(self, vertices, facets):
        self.vertices = tuple(vertices)
        self._vkey = {v: i for i, v in enumerate(self.vertices)}
        fs = []
        for f in facets:
            f = frozenset(f)
            if not f:
                continue
            for v in f:
                if v not in self._vkey:
                    raise ValueError(f"facet vertex {v!r} undeclared")
            fs.append(f)
        # drop non-maximal duplicates
        fs = [f for f in fs if not any(f < g for g in fs)]
        fs = sorted(set(fs), key=lambda f: (len(f), sorted(self._vkey[v] for v in f)))
        self.facets = tuple(fs)

    def dim(self):
        return max((len(f) - 1 for f in self.facets), default=-1)

    def faces(self, max_dim=None, cap=None):
        """All nonempty faces up to max_dim, grouped by dimension.

        Returns a list indexed by dimension; each entry is the sorted list
        of faces as vertex tuples in canonical order.
        """
        top = self.dim() if max_dim is None else min(max_dim, self.dim())
        by_dim = [set() for _ in range(top + 1)]
        for f in self.facets:
            fv = sorted(f, key=self._vkey.get)
            for k in range(min(len(fv), top + 1)):
                for c in itertools.combinations(fv, k + 1):
                    by_dim[k].add(c)
            if cap is not None and sum(len(s) for s in by_dim) > cap:
                raise SizeCapError("face enumeration", sum(len(s) for s in by_dim), cap)
        return [sorted(s, key=lambda t: tuple(self._vkey[v] for v in t)) for s in by_dim]

    def has_face(self, face):
        face = frozenset(face)
        return any(face <= f for f in self.facets)

    def face_count(self, max_dim=None):
        return sum(len(fs) for fs in self.faces(max_dim))

    def components(self):
        """Vertex sets of connected components of the 1-skeleton."""
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        present = set()
        for f in self.facets:
            fv = list(f)
            present.update(fv)
            for w in fv[1:]:
                ra, rb = find(fv[0]), find(w)
                if ra != rb:
                    parent[ra] = rb
        groups = {}
        for v in sorted(present, key=self._vkey.get):
            groups.setdefault(find(v), []).append(v)
        return [tuple(g) for g in groups.values()]

    def __repr__(self):
        return f"SimplicialComplex(n={len(self.vertices)}, facets={len(self.facets)})"


# -- multi-homomorphisms ------------------------------------------------------


class MultiHom:
    """Set-valued vertex map with all cross products landing in edges."""

    __slots__ = ("source", "target", "assignment")

    def __init__(self, source, target, assignment):
        self.source = source
        self.target = target
        gs, gt = underlying(source), underlying(target)
        self.assignment = {v: frozenset(assignment[v]) for v in gs.vertices}
        for v in gs.vertices:
            if not self.assignment[v]:
                raise ValueError(f"empty value set at {v!r}")
            for w in self.assignment[v]:
                if w not in gt:
                    raise ValueError(f"value {w!r} off target")
        for u, w in gs.edges():
            for a in self.assignment[u]:
                for b in self.assignment[w]:
                    if not gt.has_edge(a, b):
                        raise ValueError(f"cross pair ({a!r},{b!r}) not an edge")
        if isinstance(source, Bigraph) and isinstance(target, Bigraph):
            for v in gs.vertices:
                for w in self.assignment[v]:
                    if target.color(w) != source.color(v):
                        raise ValueError(f"value {w!r} breaks the coloring at {v!r}")

    def leq(self, other):
        return all(self.assignment[v] <= other.assignment[v]
                   for v in underlying(self.source).vertices)


def compose_multihoms(tau, eta):
    """(tau * eta)(v) = union of tau over eta(v); eta: X -> Y, tau: Y -> Z."""
    gs = underlying(eta.source)
    assignment = {}
    for v in gs.vertices:
        acc = set()
        for w in eta.assignment[v]:
            acc |= tau.assignment[w]
        assignment[v] = acc
    return MultiHom(eta.source, tau.target, assignment)


# -- complexes from graphs -----------------------------------------------------


def box_complex(g, cap=DEFAULT_POSET_CAP):
    """Pairs (sigma, tau) of nonempty vertex sets with sigma x tau inside E(G).

    Ordered by componentwise inclusion; returned with its entry-swap action.
    """
    key = g.sort_key
    elements = []
    vs = list(g.vertices)
    for r in range(1, len(vs) + 1):
        for sigma in itertools.combinations(vs, r):
            common = None
            for v in sigma:
                nb = g.neighbors(v)
                common = nb if common is None else common & nb
                if not common:
                    break
            if not common:
                continue
            cn = _canon_set(common, key)
            for s in range(1, len(cn) + 1):
                for tau in itertools.combinations(cn, s):
                    elements.append((sigma, tau))
                    if len(elements) > cap:
                        raise SizeCapError("box complex", len(elements), cap)
    elements.sort(key=lambda st: (len(st[0]) + len(st[1]),
                                  tuple(key(v) for v in st[0]),
                                  tuple(key(v) for v in st[1])))
    above = {
        (s1, t1): {(s2, t2) for (s2, t2) in elements
                   if set(s1) <= set(s2) and set(t1) <= set(t2)}
        for (s1, t1) in elements
    }
    poset = Poset(elements, above, validate=False)
    action = InvolutionAction(poset, {(s, t): (t, s) for (s, t) in elements})
    return poset, action


def box_complex_bigraph(x, cap=DEFAULT_POSET_CAP):
    """Box complex of a bigraph: sigma from V_0, tau from V_1, all cross edges."""
    g = x.graph
    key = g.sort_key
    v0, v1 = x.side(0), x.side(1)
    elements = []
    for r in range(1, len(v0) + 1):
        for sigma in itertools.combinations(v0, r):
            common = None
            for v in sigma:
                nb = g.neighbors(v)
                common = nb if common is None else common & nb
                if not common:
                    break
            if not common:
                continue
            cn = _canon_set(common, key)
            for s in range(1, len(cn) + 1):
                for tau in itertools.combinations(cn, s):
                    elements.append((sigma, tau))
                    if len(elements) > cap:
                        raise SizeCapError("bigraph box complex", len(elements), cap)
    elements.sort(key=lambda st: (len(st[0]) + len(st[1]),
                                  tuple(key(v) for v in st[0]),
                                  tuple(key(v) for v in st[1])))
    above = {
        (s1, t1): {(s2, t2) for (s2, t2) in elements
                   if set(s1) <= set(s2) and set(t1) <= set(t2)}
        for (s1, t1) in elements
    }
    return Poset(elements, above, validate=False)


def bigraph_box_action(poset, alpha):
    """The action (sigma, tau) -> (alpha(tau), alpha(sigma)) on a bigraph box poset."""
    g = alpha.bigraph.graph
    key = g.sort_key
    mapping = {}
    for (sigma, tau) in poset.elements:
        mapping[(sigma, tau)] = (_canon_set([alpha(v) for v in tau], key),
                                 _canon_set([alpha(v) for v in sigma], key))
    return InvolutionAction(poset, mapping)


def _subset_candidates(pool, reflexive_clique_in=None):
    """Nonempty subsets of pool in canonical order, optionally reflexive cliques."""
    pool = list(pool)
    for r in range(1, len(pool) + 1):
        for sub in itertools.combinations(pool, r):
            if reflexive_clique_in is not None:
                g = reflexive_clique_in
                if not all(g.has_edge(a, b) for a in sub for b in sub):
                    continue
            yield sub


def hom_complex(t, g, cap=DEFAULT_POSET_CAP):
    """Poset of multi-homomorphisms T -> G ordered by pointwise inclusion.

    Elements are tuples of value tuples in T's vertex order.  Depth-first
    enumeration over T's vertices with candidate propagation through
    already-assigned neighbors.
    """
    return _hom_complex(t, g, colored=False, cap=cap)


def hom_complex_bigraph(x, y, cap=DEFAULT_POSET_CAP):
    """Poset of 2-colored multi-homomorphisms between bigraphs."""
    return _hom_complex(x, y, colored=True, cap=cap)


def _hom_complex(t, g, colored, cap):
    gt, gg = underlying(t), underlying(g)
    verts = gt.vertices
    key = gg.sort_key
    elements = []
    partial = {}

    def pool_for(v):
        if colored:
            base = set(g.side(t.color(v)))
        else:
            base = set(gg.vertices)
        for u in gt.neighbors(v):
            if u == v:
                continue
            if u in partial:
                for w in partial[u]:
                    base &= gg.neighbors(w)
                    if not base:
                        return ()
        return _canon_set(base, key)

    def place(i):
        if i == len(verts):
            elements.append(tuple(partial[v] for v in verts))
            if len(elements) > cap:
                raise SizeCapError(f"hom complex (partial count {len(elements)})",
                                   len(elements), cap)
            return
        v = verts[i]
        pool = pool_for(v)
        clique_in = gg if gt.has_edge(v, v) else None
        for sub in _subset_candidates(pool, reflexive_clique_in=clique_in):
            partial[v] = sub
            place(i + 1)
            del partial[v]

    place(0)
    above = {}
    for e in elements:
        ups = set()
        for f in elements:
            if all(set(a) <= set(b) for a, b in zip(e, f)):
                ups.add(f)
        above[e] = ups
    return Poset(elements, above, validate=False)


def neighborhood_complex(g):
    """Faces are the vertex sets admitting a common neighbor."""
    facets = [g.neighbors(v) for v in g.vertices if g.neighbors(v)]
    return SimplicialComplex(g.vertices, facets)


def _max_cliques(g, pool):
    """Maximal reflexive cliques among the given looped vertices (Bron-Kerbosch).

    Works on open neighborhoods: within the looped subgraph a reflexive
    clique is an ordinary clique of the loopless simplification.
    """
    pool = [v for v in pool if g.has_loop(v)]
    keep = set(pool)
    nb = {v: (g.neighbors(v) & keep) - {v} for v in pool}
    out = []

    def bk(r, p, x):
        if not p and not x:
            if r:
                out.append(frozenset(r))
            return
        pivot_pool = p | x
        pivot = max(pivot_pool, key=lambda u: len(nb[u] & p))
        for v in sorted(p - nb[pivot], key=g.sort_key):
            bk(r | {v}, p & nb[v], x & nb[v])
            p = p - {v}
            x = x | {v}

    bk(set(), set(pool), set())
    return out


def clique_complex(x):
    """Flag complex of the maximal reflexive subgraph (looped vertices only)."""
    g = underlying(x)
    looped = [v for v in g.vertices if g.has_loop(v)]
    keep = set(looped)
    facets = []
    if looped:
        sub = {v: g.neighbors(v) & keep for v in looped}

        class _View:
            vertices = tuple(looped)

            @staticmethod
            def neighbors(v):
                return sub[v]

            @staticmethod
            def has_loop(v):
                return v in sub[v]

            @staticmethod
            def sort_key(v):
                return g.sort_key(v)

        facets = _max_cliques(_View, looped)
    return SimplicialComplex(looped, facets)


def order_complex(p, cap=DEFAULT_POSET_CAP):
    """Simplicial complex of chains of a poset; facets are maximal chains."""
    if len(p) > cap:
        raise SizeCapError("order complex", len(p), cap)
    covers = {}
    for a, b in p.covers():
        covers.setdefault(a, []).append(b)
    facets = []

    def grow(chain):
        e = chain[-1]
        nxt = covers.get(e, [])
        if not nxt:
            facets.append(tuple(chain))
            return
        for b in nxt:
            chain.append(b)
            grow(chain)
            chain.pop()

    for e in p.minimal_elements():
        grow([e])
    if not p.elements:
        return SimplicialComplex([], [])
    return SimplicialComplex(p.elements, facets)


def face_poset(k):
    """Nonempty faces ordered by inclusion."""
    faces = [frozenset(f) for fs in k.faces() for f in fs]
    above = {f: {h for h in faces if f <= h} for f in faces}
    labels = {f: "{" + ",".join(sorted(str(v) for v in f)) + "}" for f in faces}
    return Poset(faces, above, labels=labels, validate=False)


def product_poset(p, q, cap=DEFAULT_POSET_CAP):
    """Componentwise order on pairs of elements."""
    n = len(p) * len(q)
    if n > cap:
        raise SizeCapError("product poset", n, cap)
    elements = [(a, b) for a in p.elements for b in q.elements]
    above = {
        (a, b): {(c, d) for c in p.above(a) for d in q.above(b)}
        for (a, b) in elements
    }
    return Poset(elements, above, validate=False)
