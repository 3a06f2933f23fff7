"""Kripke and Hausdorff polynomial functor expressions.

Grammar of the concrete syntax (whitespace-insensitive, ``*`` binds tighter
than ``+``)::

    expr    := term ('+' term)*
    term    := factor ('*' factor)*
    factor  := primary ('(' expr ')')*          # F(G) is composition
    primary := 'Pf' | 'Hd' | 'Id' | 'C' digits
             | 'Prod' '(' [expr (',' expr)*] ')'
             | 'Coprod' '(' [expr (',' expr)*] ')'
             | 'Prod_inf' '(' expr (',' expr)* ')'  # block repeated infinitely often
             | 'Coprod_inf' '(' expr (',' expr)* ')'
             | '(' expr ')'

Set-valued evaluation represents product elements as tuples, coproduct
elements as :class:`~coalgebra_kit.values.Tag` and subsets as frozensets.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded, ClassificationGap, FunctorSyntaxError, KindMismatch, NotEvaluable
from .metrics import INF, FinMetricSpace, hausdorff_lift
from .values import FiniteSet, SetFunction, Tag, subsets


class FunctorExpr:
    __slots__ = ()

    def __str__(self):
        return format_functor(self)


@dataclass(frozen=True)
class Pf(FunctorExpr):
    pass


@dataclass(frozen=True)
class Hd(FunctorExpr):
    pass


@dataclass(frozen=True)
class Id(FunctorExpr):
    pass


@dataclass(frozen=True)
class Const(FunctorExpr):
    carrier: object  # FiniteSet or FinMetricSpace

    @classmethod
    def of_size(cls, n):
        return cls(FiniteSet.range(n))

    def __hash__(self):
        return hash(frozenset(_points(self.carrier)))


@dataclass(frozen=True)
class Prod(FunctorExpr):
    factors: tuple = ()
    infinite: bool = False

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.infinite and not self.factors:
            raise ValueError("an infinite product needs a factor block to repeat")


@dataclass(frozen=True)
class Coprod(FunctorExpr):
    summands: tuple = ()
    infinite: bool = False

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        if self.infinite and not self.summands:
            raise ValueError("an infinite coproduct needs a summand block to repeat")


@dataclass(frozen=True)
class Comp(FunctorExpr):
    outer: FunctorExpr
    inner: FunctorExpr


def _points(carrier):
    return carrier.points if isinstance(carrier, FinMetricSpace) else carrier.elements


# --- parsing and printing ----------------------------------------------------


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise FunctorSyntaxError(msg, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}" + (f", found {self.peek()!r}" if self.peek() else ", found end of input"))
        self.pos += 1

    def word(self):
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos], start

    def parse(self):
        if not self.text.strip():
            self.error("empty functor expression")
        e = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return e

    def expr(self):
        terms = [self.term()]
        while self.peek() == "+":
            self.pos += 1
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Coprod(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while self.peek() == "*":
            self.pos += 1
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Prod(tuple(factors))

    def factor(self):
        e = self.primary()
        while self.peek() == "(":
            self.pos += 1
            inner = self.expr()
            self.expect(")")
            e = Comp(e, inner)
        return e

    def args(self):
        self.expect("(")
        out = []
        if self.peek() == ")":
            self.pos += 1
            return out
        out.append(self.expr())
        while self.peek() == ",":
            self.pos += 1
            out.append(self.expr())
        self.expect(")")
        return out

    def primary(self):
        if self.peek() == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        name, start = self.word()
        if not name:
            self.error("expected a functor" + (f", found {self.peek()!r}" if self.peek() else ", found end of input"))
        if name == "Pf":
            return Pf()
        if name == "Hd":
            return Hd()
        if name == "Id":
            return Id()
        if name[0] == "C" and name[1:].isdigit():
            return Const.of_size(int(name[1:]))
        if name in ("Prod", "Coprod"):
            items = tuple(self.args())
            return Prod(items) if name == "Prod" else Coprod(items)
        if name in ("Prod_inf", "Coprod_inf"):
            at = self.pos
            items = self.args()
            if not items:
                self.pos = at
                self.error(f"{name} needs at least one argument")
            return Prod(tuple(items), True) if name == "Prod_inf" else Coprod(tuple(items), True)
        self.pos = start
        self.error(f"unknown functor {name!r}")


def parse_functor(text):
    return _Parser(text).parse()


def _infix(e):
    return isinstance(e, (Prod, Coprod)) and not e.infinite and len(_parts(e)) >= 2


def _parts(e):
    return e.factors if isinstance(e, Prod) else e.summands


def format_functor(e):
    if isinstance(e, Pf):
        return "Pf"
    if isinstance(e, Hd):
        return "Hd"
    if isinstance(e, Id):
        return "Id"
    if isinstance(e, Const):
        pts = _points(e.carrier)
        n = len(pts)
        if set(pts) == set(range(n)) and (
            not isinstance(e.carrier, FinMetricSpace) or e.carrier == FinMetricSpace.discrete(range(n))
        ):
            return f"C{n}"
        return f"Const<{n} points>"
    if isinstance(e, (Prod, Coprod)):
        name = "Prod" if isinstance(e, Prod) else "Coprod"
        parts = _parts(e)
        if e.infinite:
            return f"{name}_inf(" + ", ".join(format_functor(p) for p in parts) + ")"
        if len(parts) < 2:
            return f"{name}(" + ", ".join(format_functor(p) for p in parts) + ")"
        sep = " * " if isinstance(e, Prod) else " + "
        out = []
        for p in parts:
            s = format_functor(p)
            wrap = isinstance(p, Coprod) if isinstance(e, Prod) else False
            wrap = (wrap or type(p) is type(e)) and _infix(p)
            out.append(f"({s})" if wrap else s)
        return sep.join(out)
    if isinstance(e, Comp):
        outer = format_functor(e.outer)
        if _infix(e.outer):
            outer = f"({outer})"
        return f"{outer}({format_functor(e.inner)})"
    raise TypeError(f"not a functor expression: {e!r}")


# --- structure helpers ---------------------------------------------------------


def walk(e):
    yield e
    if isinstance(e, (Prod, Coprod)):
        for p in _parts(e):
            yield from walk(p)
    elif isinstance(e, Comp):
        yield from walk(e.outer)
        yield from walk(e.inner)


def is_evaluable(e):
    return not any(isinstance(x, (Prod, Coprod)) and x.infinite for x in walk(e))


def swap_kind(e, to_metric):
    """Exchange Pf and Hd throughout (Pf -> Hd if ``to_metric``, else Hd -> Pf)."""
    if isinstance(e, (Pf, Hd)):
        return Hd() if to_metric else Pf()
    if isinstance(e, Prod):
        return Prod(tuple(swap_kind(p, to_metric) for p in e.factors), e.infinite)
    if isinstance(e, Coprod):
        return Coprod(tuple(swap_kind(p, to_metric) for p in e.summands), e.infinite)
    if isinstance(e, Comp):
        return Comp(swap_kind(e.outer, to_metric), swap_kind(e.inner, to_metric))
    return e


# --- classification -------------------------------------------------------------


def classify(e):
    """Cardinality class ``n(F)`` in {0, 1, 2, 3}.

    0: FX empty for all X.  1: FX a singleton for all X.
    2: FX finite for finite X and |FX| > 1 once |X| >= 2.
    3: FX infinite for all X.
    Raises :class:`ClassificationGap` on inputs the case table leaves open.
    """
    if isinstance(e, (Pf, Hd, Id)):
        return 2
    if isinstance(e, Const):
        n = len(_points(e.carrier))
        return min(n, 2)
    if isinstance(e, Prod):
        classes = [classify(p) for p in e.factors]
        if 0 in classes:
            return 0
        if all(c == 1 for c in classes):
            return 1
        if 3 in classes or e.infinite:
            return 3
        return 2
    if isinstance(e, Coprod):
        classes = [classify(p) for p in e.summands]
        if all(c == 0 for c in classes):
            return 0
        if 3 in classes or e.infinite:
            return 3
        if len(classes) == 1 and classes[0] == 1:
            return 1
        if 2 in classes or classes.count(1) >= 2:
            return 2
        raise ClassificationGap(
            f"classification-gap: coproduct {format_functor(e)} has one constant-singleton "
            "summand among empty ones"
        )
    if isinstance(e, Comp):
        outer = classify(e.outer)
        if outer in (0, 1):
            return outer
        inner = classify(e.inner)
        if inner == 0:
            raise ClassificationGap(
                f"classification-gap: {format_functor(e)} composes a class-{outer} functor "
                "with an empty functor"
            )
        if outer == 3 or inner == 3:
            return 3
        if inner == 2:
            return 2
        # inner is constant-singleton, so the composite is constantly outer(1)
        one = len(eval_set(swap_kind(e.outer, False), FiniteSet([0])))
        return 1 if one == 1 else 2
    raise TypeError(f"not a functor expression: {e!r}")


# --- set-valued evaluation ------------------------------------------------------


def _clamp(n, cap):
    return n if cap is None or n <= cap else cap + 1


def cardinality(e, k, cap=None):
    """``|F X|`` for ``|X| = k`` without enumerating; saturates at ``cap + 1``."""
    if isinstance(e, (Pf, Hd)):
        if cap is not None and k > cap.bit_length():
            return cap + 1
        return _clamp(2 ** k, cap)
    if isinstance(e, Id):
        return _clamp(k, cap)
    if isinstance(e, Const):
        return _clamp(len(_points(e.carrier)), cap)
    if isinstance(e, (Prod, Coprod)) and e.infinite:
        raise NotEvaluable(f"not-evaluable: {format_functor(e)} has an infinite index set")
    if isinstance(e, Prod):
        if any(_is_empty(p) for p in e.factors):
            return 0
        sizes = [cardinality(p, k, cap) for p in e.factors]
        if 0 in sizes:
            return 0
        total = 1
        for s in sizes:
            total = _clamp(total * s, cap)
        return total
    if isinstance(e, Coprod):
        total = 0
        for p in e.summands:
            total = _clamp(total + cardinality(p, k, cap), cap)
        return total
    if isinstance(e, Comp):
        if _is_constant(e.outer):
            return cardinality(e.outer, 0, cap)
        return cardinality(e.outer, cardinality(e.inner, k, cap), cap)
    raise TypeError(f"not a functor expression: {e!r}")


def _check_budget(e, k, budget):
    if budget is not None:
        n = cardinality(e, k, budget)
        if n > budget:
            raise BudgetExceeded(format_functor(e), None, budget)


def _is_constant(e):
    """True when ``F X`` does not depend on ``X`` (no live occurrence of the argument)."""
    if isinstance(e, (Pf, Hd, Id)):
        return False
    if isinstance(e, Const):
        return True
    if isinstance(e, Prod):
        return all(_is_constant(p) for p in e.factors) or any(_is_empty(p) for p in e.factors)
    if isinstance(e, Coprod):
        return all(_is_constant(p) for p in e.summands)
    if isinstance(e, Comp):
        return _is_constant(e.outer) or _is_constant(e.inner)
    raise TypeError(f"not a functor expression: {e!r}")


def _is_empty(e):
    # F X is empty for every X; cardinality is monotone, so size 1 decides it
    return _is_constant(e) and cardinality(e, 1, 1) == 0


_NOTHING = FiniteSet(())


def eval_set(e, X, budget=None):
    """``F X`` for a finite set ``X`` (a FiniteSet or any iterable)."""
    if not isinstance(X, FiniteSet):
        X = FiniteSet(X)
    if isinstance(e, Hd):
        raise KindMismatch("kind-mismatch: Hd needs a metric space; use eval_metric")
    if isinstance(e, (Prod, Coprod)) and e.infinite:
        raise NotEvaluable(f"not-evaluable: {format_functor(e)} has an infinite index set")
    _check_budget(e, len(X), budget)
    if isinstance(e, Pf):
        return FiniteSet(subsets(X))
    if isinstance(e, Id):
        return X
    if isinstance(e, Const):
        return FiniteSet(_points(e.carrier))
    if isinstance(e, Prod):
        if any(_is_empty(p) for p in e.factors):
            return _NOTHING
        parts = [eval_set(p, X, budget) for p in e.factors]
        return FiniteSet(itertools.product(*parts))
    if isinstance(e, Coprod):
        return FiniteSet(
            Tag(i, v) for i, p in enumerate(e.summands) for v in eval_set(p, X, budget)
        )
    if isinstance(e, Comp):
        # a constant outer functor never looks at the (possibly huge) inner carrier
        inner = _NOTHING if _is_constant(e.outer) else eval_set(e.inner, X, budget)
        return eval_set(e.outer, inner, budget)
    raise TypeError(f"not a functor expression: {e!r}")


def act(e, fn, value):
    """Apply the functor's action on the map ``fn`` to one element of ``F X``."""
    if isinstance(e, (Pf, Hd)):
        return frozenset(fn(x) for x in value)
    if isinstance(e, Id):
        return fn(value)
    if isinstance(e, Const):
        return value
    if isinstance(e, Prod):
        return tuple(act(p, fn, v) for p, v in zip(e.factors, value))
    if isinstance(e, Coprod):
        return Tag(value.index, act(e.summands[value.index], fn, value.value))
    if isinstance(e, Comp):
        return act(e.outer, lambda w: act(e.inner, fn, w), value)
    raise TypeError(f"not a functor expression: {e!r}")


def eval_map(e, f, budget=None):
    """``F f : F X -> F Y`` as an explicit table."""
    domain = eval_set(e, f.domain, budget)
    codomain = eval_set(e, f.codomain, budget)
    return SetFunction(domain, codomain, {v: act(e, f, v) for v in domain}, check=False)


# --- metric-valued evaluation -------------------------------------------------


def _as_metric(carrier):
    if isinstance(carrier, FinMetricSpace):
        return carrier
    return FinMetricSpace.discrete(carrier.elements)


def _check_table(n_points, budget, what):
    if budget is not None and n_points * n_points > budget:
        raise BudgetExceeded(what, n_points * n_points, budget)


def eval_metric(e, X, budget=None):
    """``F X`` for a finite extended metric space ``X``."""
    if isinstance(e, Pf):
        raise KindMismatch("kind-mismatch: Pf needs a bare set; use eval_set or Hd")
    if isinstance(e, (Prod, Coprod)) and e.infinite:
        raise NotEvaluable(f"not-evaluable: {format_functor(e)} has an infinite index set")
    if budget is not None:
        n = cardinality(e, len(X), budget)
        if n > budget:
            raise BudgetExceeded(format_functor(e), None, budget)
        _check_table(n, budget, format_functor(e))
    if isinstance(e, Hd):
        return hausdorff_lift(X, budget if budget is not None else float("inf"))
    if isinstance(e, Id):
        return X
    if isinstance(e, Const):
        return _as_metric(e.carrier)
    if isinstance(e, Prod):
        if any(_is_empty(p) for p in e.factors):
            return FinMetricSpace((), [], check=False)
        spaces = [eval_metric(p, X, budget) for p in e.factors]
        combos = list(itertools.product(*[range(len(s)) for s in spaces]))
        points = [tuple(s.points[i] for s, i in zip(spaces, c)) for c in combos]
        dist = [
            [max((s.dist[i][j] for s, i, j in zip(spaces, a, b)), default=Fraction(0)) for b in combos]
            for a in combos
        ]
        return FinMetricSpace(points, dist, check=False)
    if isinstance(e, Coprod):
        spaces = [eval_metric(p, X, budget) for p in e.summands]
        tagged = [(k, i) for k, s in enumerate(spaces) for i in range(len(s))]
        points = [Tag(k, spaces[k].points[i]) for k, i in tagged]
        dist = [
            [spaces[k].dist[i][j] if k == l else INF for l, j in tagged]
            for k, i in tagged
        ]
        return FinMetricSpace(points, dist, check=False)
    if isinstance(e, Comp):
        if _is_constant(e.outer):
            return eval_metric(e.outer, FinMetricSpace((), [], check=False), budget)
        return eval_metric(e.outer, eval_metric(e.inner, X, budget), budget)
    raise TypeError(f"not a functor expression: {e!r}")


def eval_metric_map(e, f, X, Y, budget=None):
    """Action of a Hausdorff polynomial functor on a map ``f: X -> Y`` of metric spaces."""
    FX = eval_metric(e, X, budget)
    FY = eval_metric(e, Y, budget)
    return SetFunction(FX.underlying, FY.underlying, {v: act(e, f, v) for v in FX.points}, check=False)
