"""Structured values, finite carriers and explicit set functions.

Elements of carriers are plain hashable Python values:

* atoms: ``int`` or ``str``
* tuples for product elements (``()`` is the unique element of ``1``)
* :class:`Tag` for coproduct elements
* ``frozenset`` for finite subsets

Python's structural equality on these already is canonical-form equality;
:func:`canonical_key` supplies the matching total order.
"""

from dataclasses import dataclass

from .errors import DomainMismatch


@dataclass(frozen=True)
class Tag:
    """Injection ``index`` of a coproduct applied to ``value``."""

    index: int
    value: object

    def __repr__(self):
        return f"Tag({self.index}, {self.value!r})"


def canonical_key(value):
    """Total order on structured values, independent of hashing/session."""
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, int):
        return (0, value)
    if isinstance(value, str):
        return (1, value)
    if isinstance(value, tuple):
        return (2, len(value), tuple(canonical_key(v) for v in value))
    if isinstance(value, Tag):
        return (3, value.index, canonical_key(value.value))
    if isinstance(value, frozenset):
        return (4, len(value), tuple(sorted(canonical_key(v) for v in value)))
    if value is None:
        return (-1,)
    raise TypeError(f"not a structured value: {value!r}")


class FiniteSet:
    """A finite carrier: duplicate-free, order of first occurrence kept.

    Equality is set equality; iteration order is deterministic given the
    construction order, which the functor evaluator keeps deterministic.
    """

    __slots__ = ("_elements", "_index")

    def __init__(self, elements=()):
        index = {}
        ordered = []
        for e in elements:
            if e not in index:
                index[e] = len(ordered)
                ordered.append(e)
        self._elements = tuple(ordered)
        self._index = index

    @classmethod
    def range(cls, n):
        return cls(range(n))

    @property
    def elements(self):
        return self._elements

    def index(self, element):
        return self._index[element]

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    def __contains__(self, element):
        return element in self._index

    def __eq__(self, other):
        if not isinstance(other, FiniteSet):
            return NotImplemented
        return len(self) == len(other) and all(e in other for e in self._elements)

    def __hash__(self):
        return hash(frozenset(self._elements))

    def __repr__(self):
        return f"FiniteSet({list(self._elements)!r})"

    def canonical(self):
        """Same set, elements sorted by :func:`canonical_key`."""
        return FiniteSet(sorted(self._elements, key=canonical_key))


def subsets(elements):
    """All subsets of ``elements`` as frozensets, in bitmask order."""
    elements = tuple(elements)
    n = len(elements)
    out = []
    for mask in range(1 << n):
        out.append(frozenset(elements[i] for i in range(n) if mask >> i & 1))
    return out


class SetFunction:
    """A total function between finite sets, stored as an explicit table."""

    __slots__ = ("domain", "codomain", "table")

    def __init__(self, domain, codomain, table, check=True):
        self.domain = domain
        self.codomain = codomain
        self.table = dict(table)
        if check:
            for x in domain:
                if x not in self.table:
                    raise DomainMismatch(f"function undefined on {x!r}")
                if self.table[x] not in codomain:
                    raise DomainMismatch(
                        f"image {self.table[x]!r} of {x!r} not in codomain"
                    )

    @classmethod
    def from_callable(cls, domain, codomain, fn, check=True):
        return cls(domain, codomain, {x: fn(x) for x in domain}, check=check)

    @classmethod
    def identity(cls, domain):
        return cls(domain, domain, {x: x for x in domain}, check=False)

    @classmethod
    def to_terminal(cls, domain, point=()):
        return cls(domain, FiniteSet([point]), {x: point for x in domain}, check=False)

    def __call__(self, x):
        try:
            return self.table[x]
        except KeyError:
            raise DomainMismatch(f"{x!r} is not in the domain") from None

    def compose(self, inner):
        """``self ∘ inner``."""
        if inner.codomain != self.domain:
            raise DomainMismatch("codomain of inner map differs from domain of outer map")
        return SetFunction(
            inner.domain,
            self.codomain,
            {x: self.table[y] for x, y in inner.table.items()},
            check=False,
        )

    def __eq__(self, other):
        if not isinstance(other, SetFunction):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and all(self.table[x] == other.table[x] for x in self.domain)
        )

    __hash__ = None

    def __repr__(self):
        return f"SetFunction({len(self.domain)} -> {len(self.codomain)})"
