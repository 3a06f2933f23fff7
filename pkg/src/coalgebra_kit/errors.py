"""Exception hierarchy shared by every module of the kit."""


class CoalgebraKitError(Exception):
    """Base class for all errors raised by coalgebra_kit."""


class FunctorSyntaxError(CoalgebraKitError, ValueError):
    def __init__(self, message, text, pos):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


class TreeSyntaxError(CoalgebraKitError, ValueError):
    def __init__(self, message, text, pos):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


class NotEvaluable(CoalgebraKitError):
    """Raised when a functor expression carries an infinite index set."""


class KindMismatch(CoalgebraKitError):
    """Raised when Pf is used over a metric space or Hd over a bare set."""


class ClassificationGap(CoalgebraKitError):
    """Raised for the cases the cardinality table does not cover."""


class BudgetExceeded(CoalgebraKitError):
    def __init__(self, level, size, budget):
        self.level = level
        self.size = size
        self.budget = budget
        shown = "more than " + str(budget) if size is None else str(size)
        super().__init__(
            f"budget-exceeded: level {level} needs {shown} entries (budget {budget})"
        )


class DomainMismatch(CoalgebraKitError, ValueError):
    pass


class InvalidMetric(CoalgebraKitError, ValueError):
    pass


class NodeNotFound(CoalgebraKitError, KeyError):
    pass


class AlphabetMismatch(CoalgebraKitError, ValueError):
    pass


class LabelledInputError(CoalgebraKitError, ValueError):
    """Raised by operations that only make sense for unlabelled graphs."""


class IncompatibleSequence(CoalgebraKitError, ValueError):
    pass
