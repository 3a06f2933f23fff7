"""Finite prefixes ``1 <- F1 <- FF1 <- ...`` of terminal-coalgebra chains."""

from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded, IncompatibleSequence
from .functors import act, cardinality, eval_map, eval_metric, eval_set, format_functor
from .metrics import DEFAULT_BUDGET, FinMetricSpace, format_ext
from .trees import LEAF, CanonicalTree, make_canonical, partial_n
from .values import FiniteSet, SetFunction, Tag, canonical_key, subsets

TERMINAL_POINT = ()
TREE_LEVEL_LIMIT = 4


@dataclass(frozen=True)
class ChainLevel:
    index: int
    carrier: FiniteSet
    connect: SetFunction = None  # to level index - 1; None at level 0
    metric: FinMetricSpace = None

    def __len__(self):
        return len(self.carrier)


def _level_size(F, k, n, budget, metric):
    size = cardinality(F, k, budget)
    if size > budget:
        raise BudgetExceeded(n, None, budget)
    if metric and size * size > budget:
        raise BudgetExceeded(n, size * size, budget)
    return size


def kripke_chain(F, N, budget=DEFAULT_BUDGET):
    """Levels ``0..N`` of the chain for a set-valued functor expression."""
    levels = [ChainLevel(0, FiniteSet([TERMINAL_POINT]))]
    for n in range(1, N + 1):
        prev = levels[-1]
        _level_size(F, len(prev.carrier), n, budget, metric=False)
        try:
            if n == 1:
                carrier = eval_set(F, prev.carrier, budget)
                connect = SetFunction.to_terminal(carrier, TERMINAL_POINT)
            else:
                connect = eval_map(F, prev.connect, budget)
                carrier = connect.domain
        except BudgetExceeded:
            raise BudgetExceeded(n, None, budget) from None
        levels.append(ChainLevel(n, carrier, connect))
    return levels


def hausdorff_chain(F, N, budget=DEFAULT_BUDGET):
    """Levels ``0..N`` of the chain for a metric-valued functor expression.

    The budget bounds the number of distance-table entries per level.
    """
    one = FinMetricSpace([TERMINAL_POINT], [[Fraction(0)]], check=False)
    levels = [ChainLevel(0, one.underlying, None, one)]
    for n in range(1, N + 1):
        prev = levels[-1]
        _level_size(F, len(prev.carrier), n, budget, metric=True)
        try:
            space = eval_metric(F, prev.metric, budget)
        except BudgetExceeded:
            raise BudgetExceeded(n, None, budget) from None
        carrier = space.underlying
        if n == 1:
            connect = SetFunction.to_terminal(carrier, TERMINAL_POINT)
        else:
            connect = SetFunction(
                carrier, prev.carrier, {v: act(F, prev.connect, v) for v in carrier}, check=False
            )
        levels.append(ChainLevel(n, carrier, connect, space))
    return levels


def forget_metrics(levels):
    return [ChainLevel(l.index, l.carrier, l.connect) for l in levels]


# --- trees as chain elements ---------------------------------------------------


def element_to_tree(x):
    """Read a ``Pf``-chain (or ``Pf(Σ×-)``-chain) element as a canonical tree."""
    if x == TERMINAL_POINT:
        return LEAF
    if not isinstance(x, frozenset):
        raise TypeError(f"not a powerset-chain element: {x!r}")
    edges = []
    for y in x:
        if isinstance(y, tuple) and len(y) == 2:
            edges.append((y[0], element_to_tree(y[1])))
        else:
            edges.append((None, element_to_tree(y)))
    return make_canonical(edges)


def tree_to_element(t, n):
    """Canonical tree of height <= ``n`` as an element of level ``n``."""
    if t.height > n:
        raise ValueError(f"tree of height {t.height} is not in level {n}")
    if n == 0:
        return TERMINAL_POINT
    return frozenset(
        tree_to_element(c, n - 1) if a is None else (a, tree_to_element(c, n - 1)) for a, c in t.edges
    )


def trees_as_level(n, limit=TREE_LEVEL_LIMIT):
    """All strongly extensional trees of height <= ``n``."""
    if n > limit:
        raise BudgetExceeded(n, None, limit)
    level = [LEAF]
    for _ in range(n):
        level = [make_canonical((None, c) for c in S) for S in subsets(level)]
    return FiniteSet(level)


def sequence_of(t, N):
    """``(∂_0 t, ..., ∂_N t)`` as chain elements."""
    return [tree_to_element(partial_n(t, n), n) for n in range(N + 1)]


def check_compatible(seq, levels):
    """True iff ``connect(x_{n+1}) == x_n`` throughout; raises on level mismatch."""
    if len(seq) > len(levels):
        raise IncompatibleSequence(f"sequence of length {len(seq)} exceeds the chain's {len(levels)} levels")
    for n, x in enumerate(seq):
        if x not in levels[n].carrier:
            raise IncompatibleSequence(f"level mismatch: entry {n} is not in level {n}")
    return all(levels[n + 1].connect(seq[n + 1]) == seq[n] for n in range(len(seq) - 1))


def _in_pf_level(x, n):
    if n == 0:
        return x == TERMINAL_POINT
    return isinstance(x, frozenset) and all(_in_pf_level(y, n - 1) for y in x)


def _pf_connect(x, n):
    """``P_f^n !`` from level ``n + 1`` to level ``n``, without building the levels."""
    if n == 0:
        return TERMINAL_POINT
    return frozenset(_pf_connect(y, n - 1) for y in x)


def _pf_compatible(seq):
    for n, x in enumerate(seq):
        if not _in_pf_level(x, n):
            raise IncompatibleSequence(f"level mismatch: entry {n} is not in level {n}")
    return all(_pf_connect(seq[n + 1], n) == seq[n] for n in range(len(seq) - 1))


def sequence_to_tree(seq, levels=None):
    """Tree ``t`` with ``∂_n t = x_n`` for a compatible ``Pf``-chain sequence.

    Without ``levels`` compatibility is checked structurally, so sequences
    reaching past the materializable levels are accepted.
    """
    if not seq:
        raise IncompatibleSequence("empty sequence")
    ok = _pf_compatible(seq) if levels is None else check_compatible(seq, levels)
    if not ok:
        raise IncompatibleSequence("sequence is not compatible with the connecting maps")
    # Children of the root are the elements of the last entry; the earlier
    # entries are their truncations by compatibility.
    return element_to_tree(seq[-1])


# --- serialization -------------------------------------------------------------


def encode_value(v):
    if isinstance(v, CanonicalTree):
        from .trees import format_tree

        return {"tree": format_tree(v)}
    if isinstance(v, (int, str)) or v is None:
        return v
    if isinstance(v, tuple):
        return {"tuple": [encode_value(x) for x in v]}
    if isinstance(v, Tag):
        return {"tag": v.index, "value": encode_value(v.value)}
    if isinstance(v, frozenset):
        return {"set": [encode_value(x) for x in sorted(v, key=canonical_key)]}
    raise TypeError(f"cannot encode {v!r}")


def decode_value(doc):
    if isinstance(doc, dict):
        if "tuple" in doc:
            return tuple(decode_value(x) for x in doc["tuple"])
        if "tag" in doc:
            return Tag(doc["tag"], decode_value(doc["value"]))
        if "set" in doc:
            return frozenset(decode_value(x) for x in doc["set"])
        if "tree" in doc:
            from .trees import canonize, parse_tree

            return canonize(parse_tree(doc["tree"]))
        raise ValueError(f"cannot decode {doc!r}")
    return doc


def chain_to_json(F, levels, sizes_only=False):
    out = {"functor": format_functor(F), "sizes": [len(l) for l in levels]}
    if sizes_only:
        return out
    docs = []
    for i, level in enumerate(levels):
        doc = {"index": level.index, "size": len(level)}
        doc["elements"] = [encode_value(x) for x in level.carrier]
        if level.connect is not None:
            prev = levels[i - 1].carrier
            doc["connect"] = [prev.index(level.connect(x)) for x in level.carrier]
        if level.metric is not None:
            m = level.metric
            doc["dist"] = [[format_ext(m.d(p, q)) for q in level.carrier] for p in level.carrier]
        docs.append(doc)
    out["levels"] = docs
    return out
