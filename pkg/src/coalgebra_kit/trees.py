"""Finite unordered trees, strongly extensional canonical forms and tree bisimulation.

Two tree types share one shape: ``.edges`` is a tuple of ``(label, subtree)``
pairs, with label ``None`` for unlabelled edges.

* :class:`RawTree` keeps duplicate children, so collapsing is observable.
* :class:`CanonicalTree` is hash-consed: children are deduplicated and sorted,
  and structurally equal canonical trees are the same object.

Nodes of either kind of tree are addressed by paths: the tuple of child
positions leading from the root, so the root is ``()``.
"""

import json
import threading
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NodeNotFound, TreeSyntaxError


@dataclass(frozen=True)
class RawTree:
    edges: tuple = ()
    name: object = field(default=None, compare=False, repr=False)

    @classmethod
    def of(cls, *children):
        """Unlabelled tree with the given children."""
        return cls(tuple((None, c) for c in children))

    @classmethod
    def labelled(cls, *pairs):
        return cls(tuple((a, c) for a, c in pairs))

    @property
    def children(self):
        return tuple(c for _, c in self.edges)

    def __repr__(self):
        return f"RawTree({format_tree(self)})"


class CanonicalTree:
    """Interned strongly extensional finite tree; use :func:`make_canonical`."""

    __slots__ = ("id", "edges", "height", "size")

    def __init__(self, id_, edges):
        self.id = id_
        self.edges = edges
        self.height = 1 + max((c.height for _, c in edges), default=-1)
        self.size = 1 + sum(c.size for _, c in edges)

    @property
    def children(self):
        return tuple(c for _, c in self.edges)

    def __reduce__(self):
        return (_rebuild, (tuple((a, c) for a, c in self.edges),))

    def __repr__(self):
        return f"CanonicalTree({format_tree(self)})"


def _rebuild(edges):
    return make_canonical(edges)


def label_key(label):
    if label is None:
        return (0, 0, "")
    if isinstance(label, int):
        return (1, label, "")
    return (2, 0, str(label))


_TABLE = {}
_LOCK = threading.Lock()


def make_canonical(edges=()):
    """Intern the node whose children are ``edges`` (pairs of label, CanonicalTree)."""
    unique = {(a, c.id): (a, c) for a, c in edges}
    key = tuple(sorted(unique, key=lambda k: (label_key(k[0]), k[1])))
    node = _TABLE.get(key)
    if node is not None:
        return node
    with _LOCK:
        node = _TABLE.get(key)
        if node is None:
            node = CanonicalTree(len(_TABLE), tuple(unique[k] for k in key))
            _TABLE[key] = node
    return node


LEAF = make_canonical(())


def leaf():
    return LEAF


def canonize(t):
    if isinstance(t, CanonicalTree):
        return t
    return make_canonical((a, canonize(c)) for a, c in t.edges)


def to_raw(t):
    return RawTree(tuple((a, to_raw(c)) for a, c in t.edges))


def height(t):
    if isinstance(t, CanonicalTree):
        return t.height
    return 1 + max((height(c) for _, c in t.edges), default=-1)


def size(t):
    if isinstance(t, CanonicalTree):
        return t.size
    return 1 + sum(size(c) for _, c in t.edges)


def is_labelled(t):
    return any(a is not None or is_labelled(c) for a, c in t.edges)


def nodes(t):
    """All node paths in breadth-first order."""
    out = [()]
    frontier = [((), t)]
    while frontier:
        nxt = []
        for path, node in frontier:
            for i, (_, c) in enumerate(node.edges):
                p = path + (i,)
                out.append(p)
                nxt.append((p, c))
        frontier = nxt
    return out


def node_at(t, path):
    node = t
    for step in path:
        if not isinstance(step, int) or not 0 <= step < len(node.edges):
            raise NodeNotFound(f"no node at path {list(path)}")
        node = node.edges[step][1]
    return node


def subtree(t, x):
    """Subtree rooted at node ``x`` (a path); a RawTree for RawTree input."""
    node = node_at(t, tuple(x))
    if isinstance(t, RawTree) and not isinstance(node, RawTree):
        return to_raw(node)
    return node


def _index(t):
    """path -> list of (label, child path)."""
    kids = {}
    stack = [((), t)]
    while stack:
        path, node = stack.pop()
        kids[path] = [(a, path + (i,)) for i, (a, _) in enumerate(node.edges)]
        stack.extend((path + (i,), c) for i, (_, c) in enumerate(node.edges))
    return kids


def _matches(R, xs, ys):
    """Every labelled child in ``xs`` has an equally labelled partner in ``ys``."""
    return all(any(a == b and (x, y) in R for b, y in ys) for a, x in xs)


def is_tree_bisimulation(t, u, R):
    """Check the tree-bisimulation conditions for the node relation ``R``."""
    tk, uk = _index(t), _index(u)
    R = {(tuple(x), tuple(y)) for x, y in R}
    for x, y in R:
        if x not in tk:
            raise NodeNotFound(f"no node at path {list(x)} in the first tree")
        if y not in uk:
            raise NodeNotFound(f"no node at path {list(y)} in the second tree")
    if ((), ()) not in R:
        return False
    for x, y in R:
        if (x == ()) != (y == ()):
            return False
        if x and (x[:-1], y[:-1]) not in R:
            return False
        if not _matches(R, tk[x], uk[y]):
            return False
        if not _matches({(b, a) for a, b in R}, uk[y], tk[x]):
            return False
    return True


def largest_tree_bisimulation(t, u):
    """Greatest tree bisimulation between ``t`` and ``u``, or None if there is none."""
    tk, uk = _index(t), _index(u)
    R = {(x, y) for x in tk for y in uk if len(x) == len(y)}
    changed = True
    while changed:
        changed = False
        Rop = {(y, x) for x, y in R}
        bad = [
            (x, y)
            for x, y in R
            if (x and (x[:-1], y[:-1]) not in R)
            or not _matches(R, tk[x], uk[y])
            or not _matches(Rop, uk[y], tk[x])
        ]
        if bad:
            R.difference_update(bad)
            changed = True
    if ((), ()) not in R:
        return None
    return R


def tree_bisimilar(t, u):
    """A witness tree bisimulation (the largest one) or None."""
    return largest_tree_bisimulation(t, u)


def diagonal(t):
    return {(x, x) for x in nodes(t)}


def is_strongly_extensional(t):
    R = largest_tree_bisimulation(t, t)
    return all(x == y for x, y in R)


@lru_cache(maxsize=None)
def _partial_canonical(t, n):
    if n == 0:
        return LEAF
    return make_canonical((a, _partial_canonical(c, n - 1)) for a, c in t.edges)


def partial_n(t, n):
    """Depth-``n`` approximant: truncate below depth ``n``, then canonize."""
    if n < 0:
        raise ValueError("depth must be nonnegative")
    if isinstance(t, CanonicalTree):
        return _partial_canonical(t, n)
    if n == 0:
        return LEAF
    return make_canonical((a, partial_n(c, n - 1)) for a, c in t.edges)


def truncate(t, n):
    """Connecting map ``P_f^n !`` on canonical trees of height <= n + 1."""
    return partial_n(canonize(t), n)


def rho_n(t, x, n):
    return partial_n(subtree(t, x), n)


# --- text formats -----------------------------------------------------------


@lru_cache(maxsize=None)
def _format_canonical(t):
    parts = [_format_edge(a, _format_canonical(c)) for a, c in t.edges]
    parts.sort(key=lambda s: (len(s), s))
    return "[" + ",".join(parts) + "]"


def _format_edge(label, body):
    return body if label is None else f"{label}:{body}"


def format_tree(t):
    """Bracket text; canonical trees get a session-independent child order."""
    if isinstance(t, CanonicalTree):
        return _format_canonical(t)
    return "[" + ",".join(_format_edge(a, format_tree(c)) for a, c in t.edges) + "]"


def tree_to_json(t):
    out = []
    for a, c in t.edges:
        body = tree_to_json(c)
        out.append(body if a is None else {"label": a, "node": body})
    if isinstance(t, CanonicalTree):
        out.sort(key=lambda v: (len(json.dumps(v)), json.dumps(v)))
    return out


def tree_from_json(value):
    if not isinstance(value, list):
        raise TreeSyntaxError("a tree node must be a JSON array", json.dumps(value), 0)
    edges = []
    for item in value:
        if isinstance(item, dict):
            if "node" not in item:
                raise TreeSyntaxError("labelled child needs a 'node' entry", json.dumps(value), 0)
            edges.append((item.get("label"), tree_from_json(item["node"])))
        else:
            edges.append((None, tree_from_json(item)))
    return RawTree(tuple(edges))


def parse_tree(text):
    """Parse ``[]``, ``[[],[[]]]``, labelled ``[a:[],1:[[]]]`` or the JSON form."""
    stripped = text.strip()
    if "{" in stripped:
        try:
            return tree_from_json(json.loads(stripped))
        except json.JSONDecodeError as exc:
            raise TreeSyntaxError(exc.msg, text, exc.pos) from None
    return _TreeParser(text).parse()


class _TreeParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise TreeSyntaxError(msg, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self):
        t = self.node()
        if self.peek():
            self.error("trailing characters")
        return t

    def node(self):
        self.expect("[")
        edges = []
        if self.peek() == "]":
            self.pos += 1
            return RawTree(())
        while True:
            edges.append(self.edge())
            if self.peek() == ",":
                self.pos += 1
                continue
            self.expect("]")
            return RawTree(tuple(edges))

    def edge(self):
        if self.peek() == "[":
            return (None, self.node())
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_-"):
            self.pos += 1
        word = self.text[start:self.pos]
        if not word:
            self.error("expected '[' or a label")
        self.expect(":")
        label = int(word) if word.lstrip("-").isdigit() else word
        return (label, self.node())
