"""Predecessor-subset calculus over a presentation.

Vertex sets are plain Python ints used as bitmasks over vertex indices.
For a symbol ``a`` the predecessor step sends a set ``S`` to

    Pre_a(S) = { v : some edge v --a--> u has u in S },

so ``Pre_w`` for a word ``w`` composes letter steps right to left, and
``Pre_w(full set)`` is exactly the set of vertices where a representative
of ``w`` may begin.  Iterating every letter step from the full vertex set
closes off into a finite family of subsets; that family, its coarsest
congruence identifying equal past-word languages, and the monoid generated
by the letter actions are the raw material for every cover construction
and decision procedure in this package.

Rays never need to be materialized: on an essential graph a left-infinite
ray may precede a set of vertices exactly when all of its finite suffixes
do, so comparisons of infinite pasts reduce to comparisons of past-word
languages, which the partition below decides.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import ResourceCapError, ValidationError
from .presentations import Presentation

#: Default limit on the number of distinct subsets in a family.
SUBSET_CAP = 4096

#: Default limit on the number of distinct transition-monoid elements.
MONOID_CAP = 65536


@lru_cache(maxsize=256)
def _tables(p: Presentation) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    """Per-symbol bitmask tables: pre[a][u] = sources of a-edges into u,
    post[a][v] = targets of a-edges out of v."""
    n, k = p.n_vertices, p.n_symbols
    pre = [[0] * n for _ in range(k)]
    post = [[0] * n for _ in range(k)]
    for s, d, a in p.edges:
        pre[a][d] |= 1 << s
        post[a][s] |= 1 << d
    return tuple(map(tuple, pre)), tuple(map(tuple, post))


def _symbol_id(p: Presentation, a: int | str) -> int:
    if isinstance(a, str):
        try:
            return p.symbol_index[a]
        except KeyError:
            raise ValidationError(f"unknown symbol {a!r}") from None
    if not 0 <= a < p.n_symbols:
        raise ValidationError(f"unknown symbol index {a}")
    return a


def _apply(table_row: tuple[int, ...], s: int) -> int:
    out = 0
    while s:
        low = s & -s
        out |= table_row[low.bit_length() - 1]
        s ^= low
    return out


def pre_step(p: Presentation, s: int, a: int | str) -> int:
    """One predecessor step: vertices with an ``a``-edge into ``s``."""
    return _apply(_tables(p)[0][_symbol_id(p, a)], s)


def post_step(p: Presentation, s: int, a: int | str) -> int:
    """One successor step: vertices reached from ``s`` by an ``a``-edge."""
    return _apply(_tables(p)[1][_symbol_id(p, a)], s)


def pre_word(p: Presentation, s: int, word) -> int:
    """Apply ``Pre_word`` to the set ``s`` (letters applied right to left)."""
    for a in reversed(tuple(word)):
        s = pre_step(p, s, a)
    return s


def post_word(p: Presentation, s: int, word) -> int:
    """Follow edges forward from ``s`` along ``word``."""
    for a in tuple(word):
        s = post_step(p, s, a)
    return s


@dataclass(frozen=True)
class SubsetFamily:
    """A family of vertex subsets closed under every letter step.

    ``subsets[0]`` is the full vertex set; the remaining members appear in
    breadth-first order (shortest witness first, letters in alphabet
    order), so the layout is reproducible.  ``step[i][a]`` indexes the
    image of member ``i`` under the step for symbol ``a``; the empty set is
    a member exactly when some step reaches it.  ``witnesses[i]`` is a
    shortest word (as symbol indices) whose representative start set is
    member ``i``.
    """

    presentation: Presentation
    subsets: tuple[int, ...]
    step: tuple[tuple[int, ...], ...]
    witnesses: tuple[tuple[int, ...], ...]

    @cached_property
    def index(self) -> dict[int, int]:
        return {s: i for i, s in enumerate(self.subsets)}

    @property
    def full(self) -> int:
        return self.subsets[0]

    @cached_property
    def empty_index(self) -> int | None:
        return self.index.get(0)

    def nonempty_indices(self) -> list[int]:
        return [i for i, s in enumerate(self.subsets) if s]

    def __len__(self) -> int:
        return len(self.subsets)


def _family(p: Presentation, tables, cap: int) -> SubsetFamily:
    k = p.n_symbols
    full = p.full_vertex_set
    subsets = [full]
    witnesses: list[tuple[int, ...]] = [()]
    index = {full: 0}
    step: list[list[int]] = []
    i = 0
    while i < len(subsets):
        row = []
        for a in range(k):
            t = _apply(tables[a], subsets[i])
            j = index.get(t)
            if j is None:
                if len(subsets) >= cap:
                    raise ResourceCapError(
                        f"resource cap: subset family exceeds {cap} members"
                    )
                j = len(subsets)
                index[t] = j
                subsets.append(t)
                witnesses.append((a,) + witnesses[i])
            row.append(j)
        step.append(row)
        i += 1
    return SubsetFamily(
        p, tuple(subsets), tuple(map(tuple, step)), tuple(witnesses)
    )


def pre_family(p: Presentation, cap: int = SUBSET_CAP) -> SubsetFamily:
    """Close the full vertex set under all predecessor steps.

    The members are exactly the sets of start vertices of representatives
    of words in the language (finitely many for any finite presentation).
    Witness words satisfy ``pre_word(p, full, w) == subsets[i]``.
    """
    return _family(p, _tables(p)[0], cap)


def post_family(p: Presentation, cap: int = SUBSET_CAP) -> SubsetFamily:
    """Forward analogue of :func:`pre_family` under successor steps.

    Member ``i`` collects the end vertices of representatives of its
    witness word; used by the shift-irreducibility test.
    """
    return _family(p, _tables(p)[1], cap)


@dataclass(frozen=True)
class PastPartition:
    """Coarsest congruence on a subset family separating past languages.

    Two members fall in the same class exactly when the same words lead
    into them, i.e. when ``{w : Pre_w(S) != empty}`` coincides.  The empty
    member, when present, always sits in a class of its own.  Classes are
    numbered by first appearance in family order, so class 0 contains the
    full vertex set.
    """

    family: SubsetFamily
    class_of: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def representative(self, class_id: int) -> int:
        """Bitmask of the first family member in the class."""
        return self.family.subsets[self.classes[class_id][0]]

    def witness(self, class_id: int) -> tuple[int, ...]:
        """Shortest witness word among the class members."""
        return self.family.witnesses[self.classes[class_id][0]]

    def nonempty_class_ids(self) -> list[int]:
        return [
            c for c, members in enumerate(self.classes)
            if self.family.subsets[members[0]]
        ]


def past_partition(family: SubsetFamily) -> PastPartition:
    """Refine the family into past-language classes (Moore fixpoint).

    Starts from the two-block split empty / nonempty and repeatedly
    separates members whose letter-step images fall in different blocks.
    The result is stable under every step, which is what makes the edge
    construction of the covers well defined on classes.
    """
    n = len(family.subsets)
    k = family.presentation.n_symbols
    label = [0 if s else 1 for s in family.subsets]
    while True:
        keys = [
            (label[i], tuple(label[family.step[i][a]] for a in range(k)))
            for i in range(n)
        ]
        renumber: dict[tuple, int] = {}
        new_label = []
        for key in keys:
            if key not in renumber:
                renumber[key] = len(renumber)
            new_label.append(renumber[key])
        if new_label == label:
            break
        label = new_label
    classes: list[list[int]] = [[] for _ in range(max(label) + 1)]
    for i, c in enumerate(label):
        classes[c].append(i)
    return PastPartition(family, tuple(label), tuple(map(tuple, classes)))


def ray_subsets(family: SubsetFamily) -> frozenset[int]:
    """Family indices of subsets realizable as stabilized sets of rays.

    For a right-infinite ray the start sets of its prefixes decrease and
    stabilize; the stabilized sets are the nodes that can reach a cycle in
    the digraph with an arc from ``Pre_a(S)`` to ``S`` whenever the image
    is nonempty.  Equivalently: the nodes admitting an infinite forward
    path.  The returned set is closed under nonempty predecessor steps.
    """
    n = len(family.subsets)
    k = family.presentation.n_symbols
    arcs: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        if not family.subsets[i]:
            continue
        for a in range(k):
            j = family.step[i][a]
            if family.subsets[j]:
                arcs[j].add(i)
    # Peel nodes with no outgoing arc until the fixpoint; survivors have an
    # infinite forward path.
    out_deg = [len(arcs[i]) for i in range(n)]
    rev: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for j in arcs[i]:
            rev[j].add(i)
    stack = [i for i in range(n) if out_deg[i] == 0]
    dead = set()
    while stack:
        j = stack.pop()
        if j in dead:
            continue
        dead.add(j)
        for i in rev[j]:
            out_deg[i] -= 1
            if out_deg[i] == 0:
                stack.append(i)
    return frozenset(
        i for i in range(n) if i not in dead and family.subsets[i]
    )


@dataclass(frozen=True)
class MonoidElement:
    """One element of the transition monoid acting on a subset family.

    ``action[i]`` is the family index of the image of member ``i``;
    ``witness`` is a shortest word realizing the element, with the action
    of ``wa`` obtained by applying the letter ``a`` first and then ``w``.
    """

    action: tuple[int, ...]
    witness: tuple[int, ...]


def monoid_closure(
    family: SubsetFamily, cap: int = MONOID_CAP
) -> tuple[MonoidElement, ...]:
    """Generate the finite monoid of all word actions on the family.

    Breadth-first from the identity, composing with one letter generator
    at a time, so witnesses come out shortest-first and the element order
    is reproducible.  Element 0 is the identity.
    """
    k = family.presentation.n_symbols
    n = len(family.subsets)
    gens = [tuple(family.step[i][a] for i in range(n)) for a in range(k)]
    ident = tuple(range(n))
    elems = [MonoidElement(ident, ())]
    seen = {ident: 0}
    qi = 0
    while qi < len(elems):
        base = elems[qi]
        for a in range(k):
            g = gens[a]
            action = tuple(base.action[g[i]] for i in range(n))
            if action not in seen:
                if len(elems) >= cap:
                    raise ResourceCapError(
                        f"resource cap: transition monoid exceeds {cap} elements"
                    )
                seen[action] = len(elems)
                elems.append(MonoidElement(action, base.witness + (a,)))
        qi += 1
    return tuple(elems)


def word_action(family: SubsetFamily, word) -> tuple[int, ...]:
    """Action of a single word on the family, without closing the monoid."""
    p = family.presentation
    n = len(family.subsets)
    action = list(range(n))
    for a in tuple(word):
        g = [family.step[i][_symbol_id(p, a)] for i in range(n)]
        action = [action[g[i]] for i in range(n)]
    return tuple(action)
