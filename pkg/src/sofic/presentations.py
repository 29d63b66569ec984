"""Finite labelled directed graphs used as presentations of shift spaces.

A :class:`Presentation` is a finite directed graph together with a labelling
of its edges by symbols from a finite alphabet.  The bi-infinite label
sequences of its bi-infinite paths form a shift space; one-sided shifts are
covered by the same data with a ``sidedness`` flag.  Everything downstream
(subset calculus, covers, decision procedures) consumes this type.

Vertex and symbol *names* are kept purely for display and I/O.  All
algorithms work with dense integer indices into the ``vertices`` and
``alphabet`` tuples, which keeps outputs reproducible byte for byte.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import cached_property

from .errors import EmptyShiftError, ValidationError

TWO_SIDED = "two-sided"
ONE_SIDED = "one-sided"

#: Largest graph accepted by the backtracking isomorphism search.
ISO_VERTEX_CAP = 64


@dataclass(frozen=True)
class Presentation:
    """A finite labelled directed graph.

    Parameters
    ----------
    alphabet : tuple of str
        Symbol names, nonempty and duplicate free.
    vertices : tuple of str
        Vertex names, duplicate free.
    edges : tuple of (int, int, int)
        Triples ``(src, dst, label)`` of indices into ``vertices`` /
        ``alphabet``.  Parallel edges carrying identical triples are
        collapsed on construction: predecessor sets are insensitive to
        edge multiplicity, so nothing downstream can observe the copies.
    sidedness : str
        ``"two-sided"`` (default) or ``"one-sided"``; metadata only.
    """

    alphabet: tuple[str, ...]
    vertices: tuple[str, ...]
    edges: tuple[tuple[int, int, int], ...]
    sidedness: str = TWO_SIDED

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if not self.alphabet:
            raise ValidationError("empty alphabet")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError("duplicate symbols in alphabet")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("duplicate vertex names")
        if self.sidedness not in (TWO_SIDED, ONE_SIDED):
            raise ValidationError(f"unknown sidedness {self.sidedness!r}")
        n, k = len(self.vertices), len(self.alphabet)
        seen: set[tuple[int, int, int]] = set()
        deduped = []
        for e in self.edges:
            src, dst, lab = e
            if not (0 <= src < n and 0 <= dst < n):
                raise ValidationError(f"edge {e} references unknown vertex")
            if not (0 <= lab < k):
                raise ValidationError(f"edge {e} references unknown symbol")
            if (src, dst, lab) not in seen:
                seen.add((src, dst, lab))
                deduped.append((src, dst, lab))
        object.__setattr__(self, "edges", tuple(deduped))
        used = {lab for _, _, lab in self.edges}
        if self.edges and used != set(range(k)):
            unused = [self.alphabet[i] for i in range(k) if i not in used]
            warnings.warn(
                f"labelling is not surjective; unused symbols: {unused}",
                stacklevel=2,
            )

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_symbols(self) -> int:
        return len(self.alphabet)

    @cached_property
    def symbol_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.alphabet)}

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def out_edges(self) -> tuple[tuple[tuple[int, int, int], ...], ...]:
        """Edges grouped by source vertex, in edge order."""
        buckets: list[list[tuple[int, int, int]]] = [[] for _ in self.vertices]
        for e in self.edges:
            buckets[e[0]].append(e)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def in_edges(self) -> tuple[tuple[tuple[int, int, int], ...], ...]:
        """Edges grouped by destination vertex, in edge order."""
        buckets: list[list[tuple[int, int, int]]] = [[] for _ in self.vertices]
        for e in self.edges:
            buckets[e[1]].append(e)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def full_vertex_set(self) -> int:
        """Bitmask with one bit per vertex, all set."""
        return (1 << len(self.vertices)) - 1

    def edge_names(self) -> list[tuple[str, str, str]]:
        """Edges as ``(src, dst, label)`` name triples."""
        return [
            (self.vertices[s], self.vertices[d], self.alphabet[a])
            for s, d, a in self.edges
        ]


def make_presentation(
    alphabet,
    vertices,
    edges,
    sidedness: str = TWO_SIDED,
) -> Presentation:
    """Build a :class:`Presentation` from symbol and vertex *names*.

    ``edges`` is an iterable of ``(src_name, dst_name, label_name)``.
    """
    alphabet = tuple(alphabet)
    vertices = tuple(vertices)
    sym = {s: i for i, s in enumerate(alphabet)}
    vtx = {v: i for i, v in enumerate(vertices)}
    indexed = []
    for src, dst, lab in edges:
        if src not in vtx or dst not in vtx:
            raise ValidationError(f"unknown vertex in edge ({src}, {dst}, {lab})")
        if lab not in sym:
            raise ValidationError(f"unknown symbol {lab!r} in edge")
        indexed.append((vtx[src], vtx[dst], sym[lab]))
    return Presentation(alphabet, vertices, tuple(indexed), sidedness)


def parse_presentation(text: str) -> Presentation:
    """Parse the canonical JSON document for a presentation.

    The document shape is::

        {"alphabet": ["0", "1"],
         "sidedness": "two-sided",
         "vertices": ["v1", "v2"],
         "edges": [{"src": "v1", "dst": "v2", "label": "0"}, ...]}

    ``sidedness`` defaults to two-sided when absent.  Vertex and edge order
    in the document is preserved, so parsing is deterministic.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("malformed document: expected a JSON object")
    for key in ("alphabet", "vertices", "edges"):
        if key not in doc:
            raise ValidationError(f"malformed document: missing {key!r}")
    alphabet = doc["alphabet"]
    vertices = doc["vertices"]
    edges_doc = doc["edges"]
    if not isinstance(alphabet, list) or not all(isinstance(s, str) for s in alphabet):
        raise ValidationError("malformed document: alphabet must be a list of strings")
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise ValidationError("malformed document: vertices must be a list of strings")
    if not isinstance(edges_doc, list):
        raise ValidationError("malformed document: edges must be a list")
    edges = []
    for item in edges_doc:
        if not isinstance(item, dict) or not {"src", "dst", "label"} <= set(item):
            raise ValidationError(f"malformed edge entry: {item!r}")
        edges.append((item["src"], item["dst"], item["label"]))
    sidedness = doc.get("sidedness", TWO_SIDED)
    return make_presentation(alphabet, vertices, edges, sidedness)


def presentation_to_json(p: Presentation, indent: int | None = 2) -> str:
    """Serialize ``p`` to the canonical JSON document."""
    doc = {
        "alphabet": list(p.alphabet),
        "sidedness": p.sidedness,
        "vertices": list(p.vertices),
        "edges": [
            {"src": p.vertices[s], "dst": p.vertices[d], "label": p.alphabet[a]}
            for s, d, a in p.edges
        ],
    }
    return json.dumps(doc, indent=indent)


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def presentation_to_dot(p: Presentation, name: str = "shift") -> str:
    """Render ``p`` in Graphviz DOT: one node per vertex, edge label = symbol."""
    lines = [f"digraph {json.dumps(name)} {{", "  rankdir=LR;"]
    for v in p.vertices:
        lines.append(f"  {_dot_quote(v)};")
    for s, d, a in p.edges:
        lines.append(
            f"  {_dot_quote(p.vertices[s])} -> {_dot_quote(p.vertices[d])}"
            f" [label={_dot_quote(p.alphabet[a])}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def is_essential(p: Presentation) -> bool:
    """True iff every vertex both emits and receives an edge."""
    return all(p.out_edges[v] and p.in_edges[v] for v in range(p.n_vertices))


def trim_essential(p: Presentation) -> Presentation:
    """Delete vertices lacking in- or out-edges until none remain.

    Removal cascades: dropping a vertex drops its incident edges, which may
    strand further vertices.  The result is essential, so every remaining
    vertex lies on a bi-infinite path.  Raises :class:`EmptyShiftError` when
    nothing survives, since the graph then presents the empty shift.

    The operation is idempotent and returns ``p`` itself when it is already
    essential.
    """
    alive = [True] * p.n_vertices
    edges = list(p.edges)
    while True:
        out_deg = [0] * p.n_vertices
        in_deg = [0] * p.n_vertices
        for s, d, _ in edges:
            out_deg[s] += 1
            in_deg[d] += 1
        doomed = [
            v for v in range(p.n_vertices)
            if alive[v] and (out_deg[v] == 0 or in_deg[v] == 0)
        ]
        if not doomed:
            break
        for v in doomed:
            alive[v] = False
        dead = set(doomed)
        edges = [e for e in edges if e[0] not in dead and e[1] not in dead]
    if all(alive):
        return p
    if not any(alive):
        raise EmptyShiftError("presents empty shift")
    keep = [v for v in range(p.n_vertices) if alive[v]]
    remap = {old: new for new, old in enumerate(keep)}
    return Presentation(
        p.alphabet,
        tuple(p.vertices[v] for v in keep),
        tuple((remap[s], remap[d], a) for s, d, a in edges),
        p.sidedness,
    )


def transpose(p: Presentation) -> Presentation:
    """Reverse every edge, keeping labels; an involution on presentations."""
    return Presentation(
        p.alphabet,
        p.vertices,
        tuple((d, s, a) for s, d, a in p.edges),
        p.sidedness,
    )


def resolving_check(p: Presentation, side: str) -> bool:
    """Check the resolving property on one side.

    A presentation is *left-resolving* when the edges entering any vertex
    carry pairwise distinct labels, and *right-resolving* when the edges
    leaving any vertex do.  Left-resolving presentations let label words be
    read off backwards deterministically, which is what every cover built
    here guarantees.

    Parameters
    ----------
    p : Presentation
    side : str
        ``"left"`` or ``"right"``.
    """
    if side == "left":
        groups = p.in_edges
    elif side == "right":
        groups = p.out_edges
    else:
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    for group in groups:
        labels = [a for _, _, a in group]
        if len(labels) != len(set(labels)):
            return False
    return True


def _label_signature(p: Presentation, v: int) -> tuple:
    out = sorted((a for _, _, a in p.out_edges[v]))
    inn = sorted((a for _, _, a in p.in_edges[v]))
    return (tuple(out), tuple(inn))


def labelled_isomorphic(
    p1: Presentation, p2: Presentation
) -> dict[str, str] | None:
    """Search for a labelled-graph isomorphism between two presentations.

    Returns a vertex-name bijection ``phi`` such that ``(u, v, a)`` is an
    edge of ``p1`` exactly when ``(phi(u), phi(v), a)`` is an edge of
    ``p2``, or None when no such map exists.  Backtracking with per-vertex
    label-degree signatures; intended for the small graphs produced by the
    cover constructions (hard cap of 64 vertices).

    Both presentations must use the same symbol names.
    """
    if set(p1.alphabet) != set(p2.alphabet):
        raise ValidationError("labelled_isomorphic requires a common alphabet")
    if p1.n_vertices > ISO_VERTEX_CAP or p2.n_vertices > ISO_VERTEX_CAP:
        raise ValidationError(f"size cap exceeded ({ISO_VERTEX_CAP} vertices)")
    if p1.n_vertices != p2.n_vertices or len(p1.edges) != len(p2.edges):
        return None

    # Align symbol indices of p2 with those of p1.
    relabel = [p1.symbol_index[s] for s in p2.alphabet]
    edges2 = {(s, d, relabel[a]) for s, d, a in p2.edges}
    sig2: dict[tuple, list[int]] = {}
    for w in range(p2.n_vertices):
        out = sorted(relabel[a] for _, _, a in p2.out_edges[w])
        inn = sorted(relabel[a] for _, _, a in p2.in_edges[w])
        sig2.setdefault((tuple(out), tuple(inn)), []).append(w)
    sig1 = [_label_signature(p1, v) for v in range(p1.n_vertices)]
    if sorted(sig1) != sorted(k for k, ws in sig2.items() for _ in ws):
        return None

    # Most-constrained vertices first: rare signatures, then high degree.
    order = sorted(
        range(p1.n_vertices),
        key=lambda v: (len(sig2.get(sig1[v], ())), -len(p1.out_edges[v])),
    )
    assignment: dict[int, int] = {}
    used: set[int] = set()

    def feasible(v: int, w: int) -> bool:
        for s, d, a in p1.out_edges[v]:
            if d in assignment and (w, assignment[d], a) not in edges2:
                return False
        for s, d, a in p1.in_edges[v]:
            if s in assignment and (assignment[s], w, a) not in edges2:
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in sig2.get(sig1[v], ()):
            if w in used or not feasible(v, w):
                continue
            assignment[v] = w
            used.add(w)
            if search(i + 1):
                return True
            del assignment[v]
            used.remove(w)
        return False

    if not search(0):
        return None
    mapped = {(assignment[s], assignment[d], a) for s, d, a in p1.edges}
    if mapped != edges2:  # full edge check; signatures alone are heuristic
        return None
    return {p1.vertices[v]: p2.vertices[w] for v, w in assignment.items()}


def vertex_reachability(p: Presentation) -> tuple[int, ...]:
    """Per-vertex bitmask of vertices reachable by a path of length >= 0."""
    n = p.n_vertices
    reach = [1 << v for v in range(n)]
    step = [0] * n
    for s, d, _ in p.edges:
        step[s] |= 1 << d
    changed = True
    while changed:
        changed = False
        for v in range(n):
            acc = reach[v]
            frontier = acc
            u = 0
            mask = frontier
            while mask:
                low = mask & -mask
                u = low.bit_length() - 1
                acc |= step[u] | reach[u]
                mask ^= low
            if acc != reach[v]:
                reach[v] = acc
                changed = True
    return tuple(reach)
