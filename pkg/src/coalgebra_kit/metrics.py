"""Finite extended metric spaces, the Hausdorff lifting and behavioural distances.

Distances are exact: a nonnegative :class:`fractions.Fraction` or ``INF``.
Hausdorff distances and ultrametric checks only ever take minima and maxima
of existing distances, so they are computed on order-preserving integer
ranks with numpy and mapped back; nothing is rounded.
"""

import math
from fractions import Fraction

import numpy as np

from .errors import AlphabetMismatch, BudgetExceeded, DomainMismatch, InvalidMetric, LabelledInputError
from .values import FiniteSet, subsets

INF = math.inf
DEFAULT_BUDGET = 100_000


def ext(value):
    """Coerce ``value`` into an extended nonnegative rational."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "∞"):
            return INF
        try:
            value = Fraction(text)
        except ValueError:
            raise InvalidMetric(f"not a distance: {value!r}") from None
    elif isinstance(value, float):
        if math.isinf(value) and value > 0:
            return INF
        if math.isnan(value):
            raise InvalidMetric("NaN is not a distance")
        value = Fraction(value)
    elif isinstance(value, (int, Fraction)):
        value = Fraction(value)
    else:
        raise InvalidMetric(f"not a distance: {value!r}")
    if value < 0:
        raise InvalidMetric(f"negative distance {value}")
    return value


def format_ext(value):
    if value == INF:
        return "inf"
    return str(Fraction(value))


def _rank_table(values):
    ordered = sorted(set(values) | {Fraction(0), INF})
    return ordered, {v: i for i, v in enumerate(ordered)}


class FinMetricSpace:
    """Finite point set with a full table of extended distances."""

    __slots__ = ("points", "dist", "_index")

    def __init__(self, points, dist, check=True):
        self.points = tuple(points)
        self._index = {p: i for i, p in enumerate(self.points)}
        if len(self._index) != len(self.points):
            raise InvalidMetric("duplicate points")
        n = len(self.points)
        if len(dist) != n or any(len(row) != n for row in dist):
            raise InvalidMetric(f"distance table must be {n}x{n}")
        self.dist = tuple(tuple(ext(v) for v in row) for row in dist) if check else tuple(
            tuple(row) for row in dist
        )
        if check:
            self.validate()

    @classmethod
    def discrete(cls, points, value=1):
        points = tuple(points)
        v = ext(value)
        dist = [[Fraction(0) if i == j else v for j in range(len(points))] for i in range(len(points))]
        return cls(points, dist, check=False)

    @classmethod
    def from_function(cls, points, fn, check=True):
        points = tuple(points)
        return cls(points, [[fn(p, q) for q in points] for p in points], check=check)

    def __len__(self):
        return len(self.points)

    def __contains__(self, p):
        return p in self._index

    def index(self, p):
        try:
            return self._index[p]
        except KeyError:
            raise DomainMismatch(f"{p!r} is not a point of the space") from None

    def d(self, p, q):
        return self.dist[self.index(p)][self.index(q)]

    @property
    def underlying(self):
        return FiniteSet(self.points)

    def validate(self):
        n = len(self.points)
        D = self.dist
        for i in range(n):
            if D[i][i] != 0:
                raise InvalidMetric(f"d(x,x) != 0 at {self.points[i]!r}")
            for j in range(i + 1, n):
                if D[i][j] != D[j][i]:
                    raise InvalidMetric(f"asymmetric at {self.points[i]!r}, {self.points[j]!r}")
                if D[i][j] == 0:
                    raise InvalidMetric(
                        f"distinct points {self.points[i]!r}, {self.points[j]!r} at distance 0"
                    )
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if D[i][k] > D[i][j] + D[j][k]:
                        raise InvalidMetric("triangle inequality fails")

    def rank_matrix(self):
        """(ranks, values): integer matrix whose order matches the distances."""
        flat = [v for row in self.dist for v in row]
        values, rank = _rank_table(flat)
        n = len(self.points)
        R = np.array([rank[v] for v in flat], dtype=np.int64).reshape(n, n)
        return R, values

    def __eq__(self, other):
        if not isinstance(other, FinMetricSpace):
            return NotImplemented
        if set(self.points) != set(other.points):
            return False
        return all(self.d(p, q) == other.d(p, q) for p in self.points for q in self.points)

    __hash__ = None

    def __repr__(self):
        return f"FinMetricSpace({len(self.points)} points)"


def point_to_set(x, S, X):
    """``d(x, S) = inf_{y in S} d(x, y)``; infinite for empty ``S``."""
    return min((X.d(x, y) for y in S), default=INF)


def hausdorff_distance(S, T, X):
    for p in list(S) + list(T):
        if p not in X:
            raise DomainMismatch(f"{p!r} is not a point of the space")
    forward = max((point_to_set(x, T, X) for x in S), default=Fraction(0))
    backward = max((point_to_set(y, S, X) for y in T), default=Fraction(0))
    return max(forward, backward)


def _hausdorff_ranks(R, inf_rank, zero_rank):
    """Hausdorff rank matrix over all subsets (bitmask order) of a rank matrix."""
    n = R.shape[0]
    masks = np.arange(1 << n)
    member = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)  # (2^n, n)
    # dpt[x, T] = min over y in T of R[x, y]
    dpt = np.where(member[None, :, :], R[:, None, :], inf_rank).min(axis=2)  # (n, 2^n)
    # directed[S, T] = max over x in S of dpt[x, T]
    directed = np.where(member[:, :, None], dpt[None, :, :], zero_rank).max(axis=1)
    return np.maximum(directed, directed.T)


def hausdorff_lift(X, budget=DEFAULT_BUDGET):
    """All subsets of ``X`` (bitmask order) with the Hausdorff distance."""
    n = len(X)
    size = 1 << n if n < 63 else None
    if size is None or size * size > budget:
        raise BudgetExceeded("hausdorff", None if size is None else size * size, budget)
    points = subsets(X.points)
    if n == 0:
        return FinMetricSpace(points, [[Fraction(0)]], check=False)
    R, values = X.rank_matrix()
    H = _hausdorff_ranks(R, len(values) - 1, 0)
    dist = [[values[r] for r in row] for row in H.tolist()]
    return FinMetricSpace(points, dist, check=False)


def is_ultrametric(X):
    n = len(X)
    if n < 3:
        return True
    R, _ = X.rank_matrix()
    bound = np.maximum(R[:, :, None], R[None, :, :])  # [x, y, z] = max(d(x,y), d(y,z))
    return bool((R[:, None, :] <= bound).all())


def is_nonexpanding(f, X, Y):
    """``d(f x, f x') <= d(x, x')`` for all pairs; ``f`` is a mapping or SetFunction."""
    table = getattr(f, "table", f)
    images = {}
    for p in X.points:
        if p not in table:
            raise DomainMismatch(f"map undefined on {p!r}")
        if table[p] not in Y:
            raise DomainMismatch(f"image of {p!r} is not a point of the target")
        images[p] = table[p]
    pts = X.points
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            if Y.d(images[p], images[q]) > X.d(p, q):
                return False
    return True


def direct_image(f, X, Y):
    """The Hausdorff functor on a map: ``S -> f[S]`` between the lifts."""
    table = getattr(f, "table", f)
    return {S: frozenset(table[x] for x in S) for S in subsets(X.points)}


def behavioral_distance(g1, g2):
    """Depth-approximant pseudo-metric ``inf {2^-n : ∂_n agree}`` on unlabelled graphs."""
    from .systems import separation_depth

    if g1.is_labelled or g2.is_labelled:
        raise LabelledInputError("behavioral_distance expects unlabelled graphs")
    k = separation_depth(g1, g2)
    if k is None:
        return Fraction(0)
    return Fraction(1, 2 ** (k - 1))


def labelled_behavioral_distance(g1, g2, delta=None):
    """Distance between ``{0,1}``-labelled generators with ``d(0,1) = delta``.

    ``0`` if labelled-bisimilar, ``delta`` if only the unlabelled shapes are
    bisimilar, ``INF`` otherwise.
    """
    from .systems import bisimilar

    labels = g1.labels() | g2.labels()
    if None in labels:
        raise AlphabetMismatch("labelled distance needs every edge labelled")
    declared = [g.alphabet for g in (g1, g2) if g.alphabet is not None]
    symbols = set(labels)
    for a in declared:
        symbols |= set(a.symbols)
    if len(symbols) > 2:
        raise AlphabetMismatch(f"expected a two-symbol alphabet, got {sorted(map(str, symbols))}")
    if delta is None:
        metrics = [a.metric for a in declared if a.metric is not None]
        if not metrics or len(metrics[0]) != 2:
            raise AlphabetMismatch("no label distance given")
        a, b = metrics[0].points
        delta = metrics[0].d(a, b)
    delta = ext(delta)
    if not 0 < delta < 1:
        raise AlphabetMismatch("label distance must lie strictly between 0 and 1")
    if bisimilar(g1, g2) is not None:
        return Fraction(0)
    if bisimilar(g1.forget_labels(), g2.forget_labels()) is not None:
        return delta
    return INF


def metric_from_json(doc):
    try:
        points = [tuple(p) if isinstance(p, list) else p for p in doc["points"]]
        dist = doc["dist"]
    except (KeyError, TypeError) as exc:
        raise InvalidMetric(f"malformed metric space document: missing {exc}") from None
    return FinMetricSpace(points, dist)


def metric_to_json(X):
    return {
        "points": [list(p) if isinstance(p, tuple) else p for p in X.points],
        "dist": [[format_ext(v) for v in row] for row in X.dist],
    }
