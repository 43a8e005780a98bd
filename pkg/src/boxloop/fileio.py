"""Line-based text formats: graphs, complexes, posets, loops, reports.

All writers emit sorted, canonical output so files are byte-reproducible;
all readers accept their writers' output and re-serialize it identically.
Vertex ids in files are opaque whitespace-free tokens; numeric tokens sort
numerically, everything else lexicographically after them.
"""

from __future__ import annotations

from .complexes import Poset, SimplicialComplex
from .graphs import Bigraph, Graph


class FormatError(ValueError):
    """Malformed input file."""


def token_key(tok):
    """Sort key for id tokens: integers first in numeric order, then text."""
    try:
        return (0, int(tok), "")
    except ValueError:
        return (1, 0, tok)


def vertex_token(v):
    """Canonical whitespace-free token for a vertex id."""
    if isinstance(v, tuple):
        return "(" + ",".join(vertex_token(x) for x in v) + ")"
    if isinstance(v, frozenset):
        return "{" + ",".join(sorted(vertex_token(x) for x in v)) + "}"
    return str(v)


def _strip_comments(text):
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


# -- graph format ---------------------------------------------------------------
#
#   graph <name>
#   v <id> [c=0|1]
#   e <id> <id>


def format_graph(g, name=None):
    if isinstance(g, Bigraph):
        colors = g.coloring
        graph = g.graph
    else:
        colors = None
        graph = g
    lines = [f"graph {name or graph.name or 'g'}"]
    tokens = {v: vertex_token(v) for v in graph.vertices}
    order = sorted(graph.vertices, key=lambda v: token_key(tokens[v]))
    for v in order:
        if colors is not None:
            lines.append(f"v {tokens[v]} c={colors[v]}")
        else:
            lines.append(f"v {tokens[v]}")
    edges = sorted(
        (sorted((tokens[u], tokens[w]), key=token_key) for u, w in graph.edges()),
        key=lambda e: (token_key(e[0]), token_key(e[1])),
    )
    for u, w in edges:
        lines.append(f"e {u} {w}")
    return "\n".join(lines) + "\n"


def parse_graph(text):
    """Graph or Bigraph from the text format; ids stay string tokens."""
    lines = _strip_comments(text)
    if not lines or not lines[0].startswith("graph "):
        raise FormatError("missing graph header")
    name = lines[0].split(None, 1)[1].strip()
    verts = []
    colors = {}
    edges = []
    for line in lines[1:]:
        parts = line.split()
        if parts[0] == "v":
            if len(parts) < 2:
                raise FormatError(f"bad vertex line: {line!r}")
            vid = parts[1]
            if vid in colors or vid in set(verts):
                raise FormatError(f"duplicate vertex {vid!r}")
            verts.append(vid)
            if len(parts) == 3:
                if not parts[2].startswith("c=") or parts[2][2:] not in ("0", "1"):
                    raise FormatError(f"bad color annotation: {line!r}")
                colors[vid] = int(parts[2][2:])
            elif len(parts) > 3:
                raise FormatError(f"bad vertex line: {line!r}")
        elif parts[0] == "e":
            if len(parts) != 3:
                raise FormatError(f"bad edge line: {line!r}")
            edges.append((parts[1], parts[2]))
        else:
            raise FormatError(f"unknown line type: {line!r}")
    for u, w in edges:
        if u not in set(verts) or w not in set(verts):
            raise FormatError(f"edge ({u!r},{w!r}) has undeclared endpoint")
    g = Graph(verts, edges, name=name)
    if colors:
        if len(colors) != len(verts):
            raise FormatError("bigraph files need a color on every vertex")
        try:
            return Bigraph(g, colors)
        except ValueError as e:
            raise FormatError(f"improper coloring: {e}") from e
    return g


def write_graph(g, path, name=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g, name=name))


def read_graph(path):
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# -- complex format ----------------------------------------------------------------
#
#   facet <v1> <v2> ...


def format_complex(k):
    rows = []
    for f in k.facets:
        toks = sorted((vertex_token(v) for v in f), key=token_key)
        rows.append(toks)
    rows.sort(key=lambda r: (len(r), [token_key(t) for t in r]))
    return "".join("facet " + " ".join(r) + "\n" for r in rows)


def parse_complex(text):
    facets = []
    verts = []
    seen = set()
    for line in _strip_comments(text):
        parts = line.split()
        if parts[0] != "facet" or len(parts) < 2:
            raise FormatError(f"bad facet line: {line!r}")
        facets.append(tuple(parts[1:]))
        for t in parts[1:]:
            if t not in seen:
                seen.add(t)
                verts.append(t)
    verts.sort(key=token_key)
    return SimplicialComplex(verts, facets)


# -- poset format -------------------------------------------------------------------
#
#   el <id>
#   cov <a> <b>


def format_poset(p):
    labels = {e: p.label(e) for e in p.elements}
    if len(set(labels.values())) != len(p.elements):
        raise FormatError("poset labels are not unique")
    lines = [f"el {labels[e]}" for e in
             sorted(p.elements, key=lambda e: token_key(labels[e]))]
    covs = sorted(
        ((labels[a], labels[b]) for a, b in p.covers()),
        key=lambda ab: (token_key(ab[0]), token_key(ab[1])),
    )
    lines.extend(f"cov {a} {b}" for a, b in covs)
    return "\n".join(lines) + "\n" if lines else ""


def parse_poset(text):
    els = []
    covers = []
    for line in _strip_comments(text):
        parts = line.split()
        if parts[0] == "el" and len(parts) == 2:
            els.append(parts[1])
        elif parts[0] == "cov" and len(parts) == 3:
            covers.append((parts[1], parts[2]))
        else:
            raise FormatError(f"bad poset line: {line!r}")
    known = set(els)
    for a, b in covers:
        if a not in known or b not in known:
            raise FormatError(f"cover ({a!r},{b!r}) uses unknown element")
    p = Poset.from_cover_pairs(els, covers)
    return p.relabeled(str)


# -- loop literals --------------------------------------------------------------------
#
#   loop <graph-name> <v0> <v1> ... <vn>


def format_loop(loop, graph_name=None):
    from .graphs import underlying
    name = graph_name or underlying(loop.graph).name or "g"
    return "loop " + name + " " + " ".join(vertex_token(v) for v in loop.values) + "\n"


def format_witness(witness):
    lines = []
    for i, step in enumerate(witness):
        if step[0] == "m1+":
            lines.append(f"{i} m1+ {step[1]} {vertex_token(step[2])}")
        elif step[0] == "m1-":
            lines.append(f"{i} m1- {step[1]}")
        else:
            lines.append(f"{i} m2 " + " ".join(vertex_token(v) for v in step[1]))
    return "\n".join(lines) + ("\n" if lines else "")
