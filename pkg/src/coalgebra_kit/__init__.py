"""Executable coalgebraic constructions on finite data.

Canonical strongly extensional trees, bisimilarity and behavioural distances
on finite pointed graphs, the Hausdorff lifting of finite extended metric
spaces, and finite prefixes of terminal-coalgebra chains for Kripke and
Hausdorff polynomial functor expressions.
"""

from .chain import (
    ChainLevel,
    check_compatible,
    hausdorff_chain,
    kripke_chain,
    sequence_of,
    sequence_to_tree,
    trees_as_level,
)
from .errors import (
    BudgetExceeded,
    ClassificationGap,
    CoalgebraKitError,
    KindMismatch,
    NotEvaluable,
)
from .functors import (
    Comp,
    Const,
    Coprod,
    Hd,
    Id,
    Pf,
    Prod,
    classify,
    eval_map,
    eval_metric,
    eval_set,
    format_functor,
    parse_functor,
)
from .metrics import (
    INF,
    FinMetricSpace,
    behavioral_distance,
    hausdorff_distance,
    hausdorff_lift,
    is_nonexpanding,
    is_ultrametric,
    labelled_behavioral_distance,
)
from .systems import (
    LabelAlphabet,
    PointedGraph,
    bisimilar,
    leadsto,
    minimize,
    separation_depth,
    unfold,
)
from .trees import (
    CanonicalTree,
    RawTree,
    canonize,
    format_tree,
    is_strongly_extensional,
    is_tree_bisimulation,
    parse_tree,
    partial_n,
    rho_n,
    subtree,
    tree_bisimilar,
)
from .values import FiniteSet, SetFunction, Tag

__version__ = "0.1.0"
