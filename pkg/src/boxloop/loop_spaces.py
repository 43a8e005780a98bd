"""Truncated loop-space towers over bigraphs and cycle-homomorphism towers.

Level n of a path tower is the exponential graph of the colored interval
on positions -2n..2n+1 into the base bigraph.  Based, free, and twisted
loop levels pin or link the two end pairs of positions.  Infinite colimits
are replaced by towers of levels with connector maps and explicit
stabilization verdicts.

Vertices are value tuples in position order.  The reflexive part of a
level (the homomorphisms) is what the clique complex sees; its components
are computed by single-position rewrites, which generate exactly the
adjacency connectivity on homomorphisms: if gamma ~ delta, the hybrids
(gamma up to k, delta afterwards) are homomorphisms forming a rewrite path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .graphs import Bigraph, Graph, GraphHom, SizeCapError, fold_reduce
from .complexes import clique_complex
from .topology import homology

DEFAULT_LEVEL_CAP = 2_000_000      # hom-vertex count cap per level
DEFAULT_EDGE_CAP = 5_000_000       # edge cap when materializing level graphs
DEFAULT_HOMOLOGY_VERTEX_CAP = 2000


class _Scheme:
    """Positions of a level, allowed values per position, linked end pairs.

    ``links`` maps a derived position to (source position, value function);
    derived values are stored in the full tuple but never chosen freely.
    """

    def __init__(self, bigraph, positions, pools, links=None, name=""):
        self.bigraph = bigraph
        self.g = bigraph.graph
        self.positions = tuple(positions)
        self.pos_index = {p: i for i, p in enumerate(self.positions)}
        self.pools = {p: tuple(pools[p]) for p in self.positions}
        self.links = dict(links or {})
        self.free = [p for p in self.positions if p not in self.links]
        self.name = name
        self.edges = [(self.positions[i], self.positions[i + 1])
                      for i in range(len(self.positions) - 1)]

    # -- vertex enumeration -------------------------------------------------

    def _full(self, values):
        """Assemble the full tuple from values at free positions."""
        out = {}
        for p, v in zip(self.free, values):
            out[p] = v
        for p, (src, fn) in self.links.items():
            out[p] = fn(out[src])
        return tuple(out[p] for p in self.positions)

    def _consistent(self, full):
        for p in self.positions:
            if full[self.pos_index[p]] not in self.pools[p]:
                return False
        return True

    def all_maps(self, cap=DEFAULT_LEVEL_CAP):
        """Every color-respecting map compatible with pools and links."""
        count = 1
        for p in self.free:
            count *= len(self.pools[p])
        if count > cap:
            raise SizeCapError(f"level vertex enumeration ({self.name})", count, cap)
        out = []
        for values in itertools.product(*(self.pools[p] for p in self.free)):
            full = self._full(values)
            if self._consistent(full):
                out.append(full)
        return out

    def is_hom(self, full):
        g = self.g
        ix = self.pos_index
        for a, b in self.edges:
            if not g.has_edge(full[ix[a]], full[ix[b]]):
                return False
        return True

    def hom_vertices(self, cap=DEFAULT_LEVEL_CAP):
        """Depth-first enumeration of the homomorphism vertices, sorted."""
        g = self.g
        out = []
        values = []

        def place(i):
            if i == len(self.free):
                full = self._full(values)
                if self._consistent(full) and self.is_hom(full):
                    out.append(full)
                    if len(out) > cap:
                        raise SizeCapError(f"level homomorphisms ({self.name})",
                                           len(out), cap)
                return
            p = self.free[i]
            prev = self.free[i - 1] if i else None
            for v in self.pools[p]:
                if prev is not None and p - prev == 1 and not g.has_edge(values[-1], v):
                    continue
                values.append(v)
                place(i + 1)
                values.pop()

        place(0)
        out.sort()
        return out

    # -- adjacency ------------------------------------------------------------

    def cross_adjacent(self, a, b):
        g = self.g
        ix = self.pos_index
        for p, q in self.edges:
            if not g.has_edge(a[ix[p]], b[ix[q]]) or not g.has_edge(b[ix[p]], a[ix[q]]):
                return False
        return True

    def _position_candidates(self, full, p):
        """Values allowed at position p in any neighbor of ``full``."""
        g = self.g
        ix = self.pos_index
        cands = set(self.pools[p])
        i = ix[p]
        if i > 0:
            cands &= g.neighbors(full[i - 1])
        if i + 1 < len(full):
            cands &= g.neighbors(full[i + 1])
        return cands

    def neighbor_maps(self, full):
        """All maps adjacent to ``full`` (cross condition only)."""
        cand = {}
        for p in self.free:
            cand[p] = sorted(self._position_candidates(full, p), key=self.g.sort_key)
            if not cand[p]:
                return
        link_checks = []
        for p, (src, fn) in self.links.items():
            allowed = self._position_candidates(full, p)
            link_checks.append((src, fn, allowed))
        for values in itertools.product(*(cand[p] for p in self.free)):
            byfree = dict(zip(self.free, values))
            ok = True
            for src, fn, allowed in link_checks:
                if fn(byfree[src]) not in allowed:
                    ok = False
                    break
            if ok:
                yield self._full(values)

    def hom_neighbors(self, full):
        """Homomorphism vertices adjacent to ``full`` (depth-first)."""
        g = self.g
        out = []
        cand = {}
        for p in self.free:
            cand[p] = sorted(self._position_candidates(full, p), key=g.sort_key)
            if not cand[p]:
                return out
        values = []

        def place(i):
            if i == len(self.free):
                cand_full = self._full(values)
                if self._consistent(cand_full) and self.is_hom(cand_full):
                    out.append(cand_full)
                return
            p = self.free[i]
            prev = self.free[i - 1] if i else None
            for v in cand[p]:
                if prev is not None and p - prev == 1 and not g.has_edge(values[-1], v):
                    continue
                values.append(v)
                place(i + 1)
                values.pop()

        place(0)
        return out

    def single_move_neighbors(self, full):
        """Hom vertices reachable by rewriting one free position."""
        g = self.g
        ix = self.pos_index
        out = []
        for p in self.free:
            cands = self._position_candidates(full, p)
            cur = full[ix[p]]
            linked = [(q, fn) for q, (src, fn) in self.links.items() if src == p]
            for v in sorted(cands, key=g.sort_key):
                if v == cur:
                    continue
                lst = list(full)
                lst[ix[p]] = v
                ok = True
                for q, fn in linked:
                    w = fn(v)
                    if w not in self._position_candidates(full, q):
                        ok = False
                        break
                    lst[ix[q]] = w
                if not ok:
                    continue
                cand = tuple(lst)
                if self.is_hom(cand):
                    out.append(cand)
        return out

    # -- materialization --------------------------------------------------------

    def to_graph(self, vertices=None, cap=DEFAULT_LEVEL_CAP, edge_cap=DEFAULT_EDGE_CAP):
        """Graph on the given vertices (default: all maps) with cross adjacency."""
        if vertices is None:
            vertices = self.all_maps(cap=cap)
        vs = sorted(vertices)
        vset = set(vs)
        edges = []
        for f in vs:
            if self.cross_adjacent(f, f):
                edges.append((f, f))
            for h in self.neighbor_maps(f):
                if h in vset and h > f:
                    edges.append((f, h))
            if len(edges) > edge_cap:
                raise SizeCapError(f"level edges ({self.name})", len(edges), edge_cap)
        return Graph(vs, edges, name=self.name)

    def hom_graph(self, cap=DEFAULT_LEVEL_CAP, edge_cap=DEFAULT_EDGE_CAP):
        """Graph on homomorphism vertices only (the maximal reflexive part)."""
        vs = self.hom_vertices(cap=cap)
        vset = set(vs)
        edges = [(f, f) for f in vs]
        for f in vs:
            for h in self.hom_neighbors(f):
                if h > f and h in vset:
                    edges.append((f, h))
            if len(edges) > edge_cap:
                raise SizeCapError(f"level edges ({self.name})", len(edges), edge_cap)
        return Graph(vs, edges, name=self.name)


def _interval_positions(n):
    return list(range(-2 * n, 2 * n + 2))


def _interval_scheme(x, n, name):
    side = {0: x.side(0), 1: x.side(1)}
    positions = _interval_positions(n)
    pools = {p: side[p % 2] for p in positions}
    return positions, pools, side


def path_scheme(x, n):
    positions, pools, _ = _interval_scheme(x, n, "path")
    return _Scheme(x, positions, pools, name=f"path({x.name},{n})")


def omega_scheme(x, x0, x1, n):
    positions, pools, _ = _interval_scheme(x, n, "omega")
    pools[-2 * n] = [x0]
    pools[2 * n] = [x0]
    if n == 0:
        pools[1] = [x1]
    else:
        pools[-2 * n + 1] = [x1]
        pools[2 * n + 1] = [x1]
    return _Scheme(x, positions, pools, name=f"omega({x.name},{n})")


def free_scheme(x, n):
    positions, pools, _ = _interval_scheme(x, n, "free")
    links = {}
    if n > 0:
        links[2 * n] = (-2 * n, lambda v: v)
        links[2 * n + 1] = (-2 * n + 1, lambda v: v)
    return _Scheme(x, positions, pools, links=links, name=f"free({x.name},{n})")


def twisted_scheme(x, alpha, n):
    positions, pools, _ = _interval_scheme(x, n, "twisted")
    if n == 0:
        links = {1: (0, lambda v: alpha(v))}
    else:
        links = {2 * n: (-2 * n + 1, lambda v: alpha(v)),
                 2 * n + 1: (-2 * n, lambda v: alpha(v))}
    return _Scheme(x, positions, pools, links=links, name=f"twisted({x.name},{n})")


# -- public level constructors ---------------------------------------------------


@dataclass
class PathGraphLevel:
    """One level of the path tower: all color-respecting interval maps."""

    base: Bigraph
    n: int
    graph: Graph
    scheme: _Scheme = field(repr=False, default=None)


def path_level(x, n, cap=DEFAULT_LEVEL_CAP):
    sch = path_scheme(x, n)
    return PathGraphLevel(base=x, n=n, graph=sch.to_graph(cap=cap), scheme=sch)


def _check_basepoint(x, x0, x1):
    if x.color(x0) != 0 or x.color(x1) != 1 or not x.graph.has_edge(x0, x1):
        raise ValueError("basepoint must be a color-respecting edge map")


def omega_level(x, basepoint, n, cap=DEFAULT_LEVEL_CAP):
    """Based loop level: interval maps pinned to the basepoint at both ends."""
    x0, x1 = basepoint
    _check_basepoint(x, x0, x1)
    sch = omega_scheme(x, x0, x1, n)
    return sch.to_graph(cap=cap)


def free_loop_level(x, n, cap=DEFAULT_LEVEL_CAP):
    """Free loop level: interval maps whose two end pairs coincide."""
    return free_scheme(x, n).to_graph(cap=cap)


def twisted_loop_level(x, alpha, n, cap=DEFAULT_LEVEL_CAP):
    """Twisted loop level: right end pair equals the involution-twisted left pair.

    The twist on an end map f is alpha o f o (edge flip), the type-correct
    composition of the involution with the flip of the two-point interval.
    """
    return twisted_scheme(x, alpha, n).to_graph(cap=cap)


def connector_tuple(t):
    """Extend a level-n vertex to level n+1 by repeating both end pairs."""
    return (t[0], t[1]) + t + (t[-2], t[-1])


def level_connector(scheme_n, scheme_n1, graph_n, graph_n1):
    """The inclusion of level n into level n+1 as a graph homomorphism."""
    return GraphHom(graph_n, graph_n1,
                    {t: connector_tuple(t) for t in graph_n.vertices})


def endpoint_maps(level):
    """Restriction of each interval map to its two end pairs.

    Both maps land in the level-0 graph and are retractions of the iterated
    level-0 inclusion.
    """
    zero = path_level(level.base, 0)
    e_minus = GraphHom(level.graph, zero.graph,
                       {t: (t[0], t[1]) for t in level.graph.vertices})
    e_plus = GraphHom(level.graph, zero.graph,
                      {t: (t[-2], t[-1]) for t in level.graph.vertices})
    return e_minus, e_plus


def level_action(scheme, alpha):
    """The induced involution t(k) -> alpha(t(1-k)) on level vertices."""
    ix = scheme.pos_index

    def act(t):
        return tuple(alpha(t[ix[1 - p]]) for p in scheme.positions)

    return act


# -- cycle homomorphism levels -----------------------------------------------------


class _CycleScheme:
    """Homomorphisms of the m-cycle into a graph, with cross adjacency."""

    def __init__(self, g, m, name=""):
        self.g = g
        self.m = m
        self.name = name or f"cyc({g.name},{m})"

    def hom_vertices(self, cap=DEFAULT_LEVEL_CAP):
        g, m = self.g, self.m
        out = []
        values = []

        def place(i):
            if i == m:
                if g.has_edge(values[-1], values[0]):
                    out.append(tuple(values))
                    if len(out) > cap:
                        raise SizeCapError(f"cycle homs ({self.name})", len(out), cap)
                return
            for v in (g.vertices if i == 0 else sorted(g.neighbors(values[-1]), key=g.sort_key)):
                values.append(v)
                place(i + 1)
                values.pop()

        place(0)
        out.sort()
        return out

    def cross_adjacent(self, a, b):
        g, m = self.g, self.m
        for k in range(m):
            k1 = (k + 1) % m
            if not g.has_edge(a[k], b[k1]) or not g.has_edge(b[k], a[k1]):
                return False
        return True

    def is_hom(self, t):
        return True

    def hom_neighbors(self, f):
        g, m = self.g, self.m
        cand = []
        for k in range(m):
            c = g.neighbors(f[k - 1]) & g.neighbors(f[(k + 1) % m])
            if not c:
                return []
            cand.append(sorted(c, key=g.sort_key))
        out = []
        values = []

        def place(i):
            if i == m:
                if g.has_edge(values[-1], values[0]):
                    out.append(tuple(values))
                return
            for v in cand[i]:
                if i and not g.has_edge(values[-1], v):
                    continue
                values.append(v)
                place(i + 1)
                values.pop()

        place(0)
        return out

    def single_move_neighbors(self, f):
        g, m = self.g, self.m
        out = []
        for k in range(m):
            cands = g.neighbors(f[k - 1]) & g.neighbors(f[(k + 1) % m])
            for v in sorted(cands, key=g.sort_key):
                if v != f[k]:
                    out.append(f[:k] + (v,) + f[k + 1:])
        return out

    def hom_graph(self, cap=DEFAULT_LEVEL_CAP, edge_cap=DEFAULT_EDGE_CAP):
        vs = self.hom_vertices(cap=cap)
        vset = set(vs)
        edges = [(f, f) for f in vs]
        for f in vs:
            for h in self.hom_neighbors(f):
                if h > f and h in vset:
                    edges.append((f, h))
            if len(edges) > edge_cap:
                raise SizeCapError(f"cycle level edges ({self.name})", len(edges), edge_cap)
        return Graph(vs, edges, name=self.name)


def cycle_hom_level(g, m, cap=DEFAULT_LEVEL_CAP):
    """Graph of homomorphisms of the m-cycle into g, m >= 3."""
    if m < 3:
        raise ValueError("cycle length must be at least 3")
    return _CycleScheme(g, m).hom_graph(cap=cap)


def cycle_connector_tuple(t):
    """Compose with the retraction of the (m+2)-cycle onto the m-cycle."""
    return t + (t[0], t[-1])


# -- towers and stabilization --------------------------------------------------------


class Tower:
    """Lazy tower of levels with connector maps.

    Kinds: path, omega, free_loop, twisted_loop, cycle_hom_even,
    cycle_hom_odd.  Cycle towers index level i as cycle length m0 + 2i with
    m0 = 4 (even) or 3 (odd).
    """

    def __init__(self, kind, base, basepoint=None, involution=None,
                 cap=DEFAULT_LEVEL_CAP):
        self.kind = kind
        self.base = base
        self.basepoint = basepoint
        self.involution = involution
        self.cap = cap
        self._schemes = {}
        if kind not in ("path", "omega", "free_loop", "twisted_loop",
                        "cycle_hom_even", "cycle_hom_odd"):
            raise ValueError(f"unknown tower kind {kind!r}")
        if kind == "omega" and basepoint is None:
            raise ValueError("omega tower needs a basepoint")
        if kind == "twisted_loop" and involution is None:
            raise ValueError("twisted tower needs an odd involution")

    def scheme(self, n):
        if n not in self._schemes:
            if self.kind == "path":
                s = path_scheme(self.base, n)
            elif self.kind == "omega":
                s = omega_scheme(self.base, self.basepoint[0], self.basepoint[1], n)
            elif self.kind == "free_loop":
                s = free_scheme(self.base, n)
            elif self.kind == "twisted_loop":
                s = twisted_scheme(self.base, self.involution, n)
            else:
                m0 = 4 if self.kind == "cycle_hom_even" else 3
                s = _CycleScheme(self.base, m0 + 2 * n)
            self._schemes[n] = s
        return self._schemes[n]

    def connect(self, t):
        if self.kind in ("cycle_hom_even", "cycle_hom_odd"):
            return cycle_connector_tuple(t)
        return connector_tuple(t)


def _single_move_components(scheme, vertices):
    """Components of the reflexive part under single-position rewrites."""
    comp = {}
    vset = set(vertices)
    cid = 0
    for v in sorted(vertices):
        if v in comp:
            continue
        comp[v] = cid
        frontier = [v]
        while frontier:
            cur = frontier.pop()
            for nb in scheme.single_move_neighbors(cur):
                if nb in vset and nb not in comp:
                    comp[nb] = cid
                    frontier.append(nb)
        cid += 1
    return comp, cid


def _component_homology(scheme, members, dim):
    """Homology of the clique complex of one reflexive component."""
    vs = sorted(members)
    vset = set(vs)
    edges = [(f, f) for f in vs]
    for f in vs:
        for h in scheme.hom_neighbors(f):
            if h > f and h in vset:
                edges.append((f, h))
    g = Graph(vs, edges)
    core, _ = fold_reduce(g)
    return homology(clique_complex(core), max_dim=dim)


@dataclass
class LevelSummary:
    n: int
    vertex_count: int
    component_count: int
    homologies: list          # per component id, HomologySummary or None
    note: str = ""


@dataclass
class StabilizationReport:
    kind: str
    levels: list                       # LevelSummary
    pi0_maps: list                     # per step: dict comp_id -> comp_id
    verdict: str                       # "stable" | "not-stable"
    stable_at: int = -1
    window: int = 2
    budget: int = 0

    def lines(self):
        out = []
        for lev in self.levels:
            hs = []
            for i, h in enumerate(lev.homologies):
                if h is None:
                    hs.append(f"H({i})=skipped")
                else:
                    parts = []
                    for k in range(h.max_dim + 1):
                        b = h.betti[k] + (1 if k == 0 else 0)
                        token = "0" if b == 0 and not h.torsion[k] else (
                            ("Z" if b == 1 else f"Z^{b}") if b else "")
                        tor = "+".join(f"Z/{d}" for d in h.torsion[k])
                        parts.append(token + ("+" + tor if tor and token else tor))
                    hs.append(f"H({i})=" + "|".join(parts))
            line = f"level {lev.n}: components={lev.component_count}"
            if hs:
                line += "; " + " ".join(hs)
            if lev.note:
                line += f"  [{lev.note}]"
            out.append(line)
        if self.verdict == "stable":
            out.append(f"verdict: stable@{self.stable_at}")
        else:
            out.append(f"verdict: not-stable(budget={self.budget})")
        return out

    def format(self):
        return "\n".join(self.lines())


def stabilize(tower, max_level=6, window=2, homology_dim=2,
              homology_vertex_cap=DEFAULT_HOMOLOGY_VERTEX_CAP,
              cap=DEFAULT_LEVEL_CAP):
    """Compute tower levels until the observation window stabilizes.

    Stable at level k means: for the next ``window`` connectors the induced
    component maps are bijections and matched components have equal clique
    homology up to ``homology_dim``.  Levels are extended lazily; running
    out of budget or exceeding caps yields a not-stable verdict, never a
    silent success.
    """
    levels = {}
    comps = {}

    def build(n):
        if n in levels:
            return levels[n]
        sch = tower.scheme(n)
        vs = sch.hom_vertices(cap=cap)
        comp, k = _single_move_components(sch, vs)
        members = {}
        for v, c in comp.items():
            members.setdefault(c, []).append(v)
        homs = []
        note = ""
        if len(vs) <= homology_vertex_cap:
            for c in range(k):
                homs.append(_component_homology(sch, members[c], homology_dim))
        else:
            homs = [None] * k
            note = f"homology skipped (vertices {len(vs)} > cap {homology_vertex_cap})"
        levels[n] = LevelSummary(n=n, vertex_count=len(vs), component_count=k,
                                 homologies=homs, note=note)
        comps[n] = comp
        return levels[n]

    pi0_maps = []

    def pi0_map(n):
        while len(pi0_maps) <= n:
            j = len(pi0_maps)
            build(j)
            build(j + 1)
            mapping = {}
            seen = {}
            for v, c in comps[j].items():
                if c not in seen:
                    seen[c] = comps[j + 1][tower.connect(v)]
            pi0_maps.append(seen)
        return pi0_maps[n]

    budget_note = ""
    stable_at = -1
    try:
        build(0)
        for k in range(0, max_level - window + 1):
            for j in range(k, k + window):
                pi0_map(j)
            ok = True
            for j in range(k, k + window):
                m = pi0_map(j)
                a, b = levels[j], levels[j + 1]
                if a.component_count != b.component_count:
                    ok = False
                    break
                if len(set(m.values())) != a.component_count:
                    ok = False
                    break
                if any(h is None for h in a.homologies + b.homologies):
                    ok = False
                    break
                for c, c2 in m.items():
                    if a.homologies[c] != b.homologies[c2]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                stable_at = k
                break
    except SizeCapError as e:
        budget_note = str(e)

    built = [levels[n] for n in sorted(levels)]
    report = StabilizationReport(
        kind=tower.kind,
        levels=built,
        pi0_maps=pi0_maps[:],
        verdict="stable" if stable_at >= 0 else "not-stable",
        stable_at=stable_at,
        window=window,
        budget=max_level,
    )
    if budget_note and built:
        built[-1].note = (built[-1].note + "; " if built[-1].note else "") + budget_note
    return report


def stabilized_components(report):
    """Component ids (level, comp) that persist without merging and with
    equal homology through the report's window.

    Levels in the report are consecutive from 0, so list index equals the
    level number.
    """
    out = []
    w = report.window
    levels = report.levels
    for n in range(len(levels)):
        for c in range(levels[n].component_count):
            ok = True
            cur = c
            for j in range(n, n + w):
                if j >= len(report.pi0_maps) or j + 1 >= len(levels):
                    ok = False
                    break
                m = report.pi0_maps[j]
                nxt = m.get(cur)
                if nxt is None or sum(1 for v in m.values() if v == nxt) != 1:
                    ok = False
                    break
                a = levels[j].homologies[cur]
                b = levels[j + 1].homologies[nxt]
                if a is None or b is None or a != b:
                    ok = False
                    break
                cur = nxt
            if ok:
                out.append((n, c))
    return out
