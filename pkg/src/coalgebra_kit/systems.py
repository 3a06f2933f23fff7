"""Finite pointed graphs and labelled transition systems.

A :class:`PointedGraph` is a finite generator of a (possibly infinite)
finitely branching tree: its unfolding at the root. Bisimilarity is decided
by naive partition refinement on the disjoint union of the state spaces.
After ``k`` refinement rounds two states share a block exactly when their
depth-``k`` approximants agree, which is what :func:`separation_depth` reads
off.
"""

from collections import deque
from dataclasses import dataclass, field

from .errors import AlphabetMismatch, DomainMismatch, LabelledInputError, NodeNotFound
from .trees import LEAF, RawTree, label_key, make_canonical, nodes as tree_nodes

DEFAULT_ORACLE_DEPTH = 12


@dataclass(frozen=True)
class LabelAlphabet:
    symbols: tuple
    metric: object = None  # FinMetricSpace over the symbols, optional

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise AlphabetMismatch("duplicate alphabet symbols")
        if self.metric is not None and set(self.metric.points) != set(self.symbols):
            raise AlphabetMismatch("label metric is not over the alphabet symbols")


@dataclass(frozen=True)
class PointedGraph:
    nodes: tuple
    edges: tuple  # (source, label or None, target)
    root: object
    alphabet: LabelAlphabet = None
    _succ: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        edges = tuple(tuple(e) if len(e) == 3 else (e[0], None, e[1]) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise DomainMismatch("duplicate graph nodes")
        if self.root not in known:
            raise NodeNotFound(f"root {self.root!r} is not a node")
        succ = {v: [] for v in self.nodes}
        for src, label, dst in edges:
            if src not in known or dst not in known:
                raise NodeNotFound(f"edge {src!r} -> {dst!r} has an unknown endpoint")
            if self.alphabet is not None and label is not None and label not in self.alphabet.symbols:
                raise AlphabetMismatch(f"label {label!r} is not in the declared alphabet")
            succ[src].append((label, dst))
        object.__setattr__(self, "_succ", succ)

    @classmethod
    def single(cls):
        return cls((0,), (), 0)

    def successors(self, v):
        try:
            return self._succ[v]
        except KeyError:
            raise NodeNotFound(f"{v!r} is not a node") from None

    def labels(self):
        return {a for _, a, _ in self.edges}

    @property
    def is_labelled(self):
        return self.alphabet is not None or any(a is not None for _, a, _ in self.edges)

    def forget_labels(self):
        return PointedGraph(self.nodes, _dedupe_edges(self.edges), self.root)

    def rooted_at(self, v):
        self.successors(v)
        return PointedGraph(self.nodes, self.edges, v, self.alphabet)

    def reachable(self):
        seen = {self.root}
        order = [self.root]
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for _, w in self._succ[v]:
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    queue.append(w)
        return order


def _dedupe_edges(edges):
    seen = set()
    out = []
    for s, _, t in edges:
        if (s, t) not in seen:
            seen.add((s, t))
            out.append((s, None, t))
    return tuple(out)


def check_alphabets(g1, g2):
    if g1.alphabet is not None and g2.alphabet is not None:
        if set(g1.alphabet.symbols) != set(g2.alphabet.symbols):
            raise AlphabetMismatch("graphs declare different label alphabets")
    l1, l2 = g1.labels(), g2.labels()
    if (None in l1 and (l2 - {None})) or (None in l2 and (l1 - {None})):
        raise AlphabetMismatch("cannot compare a labelled with an unlabelled graph")


@dataclass(frozen=True)
class Partition:
    blocks: tuple  # tuple of tuples of states
    round: int

    def block_of(self):
        return {s: i for i, b in enumerate(self.blocks) for s in b}


def _refinement(graphs):
    """Yield the state list and per-round block maps until the partition is stable."""
    states = [(i, v) for i, g in enumerate(graphs) for v in g.nodes]
    succ = {(i, v): [(a, (i, w)) for a, w in g.successors(v)] for i, g in enumerate(graphs) for v in g.nodes}
    block = {s: 0 for s in states}
    history = [block]
    count = 1 if states else 0
    while True:
        numbering = {}
        new = {}
        for s in states:
            sig = (block[s], frozenset((a, block[w]) for a, w in succ[s]))
            new[s] = numbering.setdefault(sig, len(numbering))
        if len(numbering) == count:
            return states, history
        count = len(numbering)
        block = new
        history.append(block)


def refine(*graphs):
    """Partition history of naive refinement over the disjoint union of ``graphs``.

    States are pairs ``(graph index, node)``. Entry ``k`` is the partition
    after ``k`` rounds; the last entry is stable.
    """
    states, history = _refinement(graphs)
    out = []
    for k, block in enumerate(history):
        groups = {}
        for s in states:
            groups.setdefault(block[s], []).append(s)
        out.append(Partition(tuple(tuple(groups[b]) for b in sorted(groups)), k))
    return out


@dataclass(frozen=True)
class Bisimulation:
    """Largest bisimulation between two graphs, with the partition inducing it."""

    partition: Partition
    pairs: frozenset

    def relates(self, x, y):
        return (x, y) in self.pairs


def bisimilar(g1, g2):
    check_alphabets(g1, g2)
    states, history = _refinement((g1, g2))
    block = history[-1]
    if block[(0, g1.root)] != block[(1, g2.root)]:
        return None
    groups = {}
    for s in states:
        groups.setdefault(block[s], []).append(s)
    pairs = frozenset(
        (x, y)
        for members in groups.values()
        for i, x in members
        if i == 0
        for j, y in members
        if j == 1
    )
    partition = Partition(tuple(tuple(groups[b]) for b in sorted(groups)), len(history) - 1)
    return Bisimulation(partition, pairs)


def separation_depth(g1, g2):
    """Least ``n`` whose depth-``n`` approximants differ; None when bisimilar."""
    check_alphabets(g1, g2)
    _, history = _refinement((g1, g2))
    for k, block in enumerate(history):
        if block[(0, g1.root)] != block[(1, g2.root)]:
            return k
    return None


def unfold(g, n, state=None):
    """Tree of root-originating paths of length <= ``n``.

    Each node's ``name`` is the state sequence it stands for.
    """
    start = g.root if state is None else state

    def go(path, depth):
        if depth == 0:
            return RawTree((), name=path)
        return RawTree(
            tuple((a, go(path + (w,), depth - 1)) for a, w in g.successors(path[-1])),
            name=path,
        )

    if n < 0:
        raise ValueError("depth must be nonnegative")
    return go((start,), n)


def graph_partials(g, n):
    """``{state: ∂_n(unfolding at state)}`` computed level by level."""
    level = {v: LEAF for v in g.nodes}
    for _ in range(n):
        level = {
            v: make_canonical((a, level[w]) for a, w in g.successors(v)) for v in g.nodes
        }
    return level


def graph_partial(g, n, state=None):
    return graph_partials(g, n)[g.root if state is None else state]


def leadsto(g1, g2):
    """Does some child of ``g1``'s root generate a tree bisimilar to ``g2``?"""
    if g1.is_labelled or g2.is_labelled:
        raise LabelledInputError("leadsto is defined for unlabelled graphs")
    return any(bisimilar(g1.rooted_at(w), g2) is not None for _, w in g1.successors(g1.root))


def leadsto_oracle(g1, g2, depth=DEFAULT_ORACLE_DEPTH):
    """Depth-bounded definitional reading: ``∂_n g2 ∈ ∂_{n+1} g1`` for all ``n <= depth``."""
    if g1.is_labelled or g2.is_labelled:
        raise LabelledInputError("leadsto is defined for unlabelled graphs")
    p1 = [graph_partial(g1, n) for n in range(depth + 2)]
    for n in range(depth + 1):
        target = graph_partial(g2, n)
        if all(c is not target for c in p1[n + 1].children):
            return False
    return True


def minimize(g):
    """Quotient of the reachable part of ``g`` by its largest bisimulation.

    Nodes of the result are ``0 .. k-1`` in breadth-first order from the root.
    """
    reach = g.reachable()
    sub = PointedGraph(
        tuple(reach),
        tuple(e for e in g.edges if e[0] in set(reach)),
        g.root,
        g.alphabet,
    )
    _, history = _refinement((sub,))
    block = history[-1]
    number = {}
    for v in reach:
        number.setdefault(block[(0, v)], len(number))
    rep = {}
    for v in reach:
        rep.setdefault(number[block[(0, v)]], v)
    edges = []
    for b in range(len(number)):
        seen = set()
        for a, w in sub.successors(rep[b]):
            e = (b, a, number[block[(0, w)]])
            if e not in seen:
                seen.add(e)
                edges.append(e)
    edges.sort(key=lambda e: (e[0], label_key(e[1]), e[2]))
    return PointedGraph(tuple(range(len(number))), tuple(edges), 0, g.alphabet)


def tree_to_graph(t, alphabet=None):
    """Finite tree (raw or canonical) as a pointed graph on breadth-first indices."""
    paths = tree_nodes(t)
    index = {p: i for i, p in enumerate(paths)}
    edges = []
    stack = [((), t)]
    while stack:
        path, node = stack.pop()
        for i, (a, c) in enumerate(node.edges):
            edges.append((index[path], a, index[path + (i,)]))
            stack.append((path + (i,), c))
    edges.sort(key=lambda e: (e[0], e[2]))
    return PointedGraph(tuple(range(len(paths))), tuple(edges), 0, alphabet)


def graph_from_json(doc):
    from .metrics import FinMetricSpace

    try:
        nodes = [_hashable(v) for v in doc["nodes"]]
        root = _hashable(doc["root"])
        edges = [
            (_hashable(e["from"]), e.get("label"), _hashable(e["to"])) for e in doc.get("edges", [])
        ]
    except (KeyError, TypeError) as exc:
        raise DomainMismatch(f"malformed graph document: missing {exc}") from None
    alphabet = None
    if "alphabet" in doc and doc["alphabet"] is not None:
        block = doc["alphabet"]
        symbols = tuple(block["symbols"] if isinstance(block, dict) else block)
        metric = None
        if isinstance(block, dict) and block.get("dist") is not None:
            metric = FinMetricSpace(symbols, block["dist"])
        alphabet = LabelAlphabet(symbols, metric)
    return PointedGraph(tuple(nodes), tuple(edges), root, alphabet)


def graph_to_json(g):
    from .metrics import format_ext

    doc = {
        "nodes": list(g.nodes),
        "root": g.root,
        "edges": [
            {"from": s, "to": t} if a is None else {"from": s, "to": t, "label": a}
            for s, a, t in g.edges
        ],
    }
    if g.alphabet is not None:
        block = {"symbols": list(g.alphabet.symbols)}
        if g.alphabet.metric is not None:
            m = g.alphabet.metric
            block["dist"] = [[format_ext(m.d(p, q)) for q in g.alphabet.symbols] for p in g.alphabet.symbols]
        doc["alphabet"] = block
    return doc


def _hashable(v):
    if isinstance(v, list):
        return tuple(_hashable(x) for x in v)
    return v
