"""Exception hierarchy shared by all modules."""


class KregError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""


# linear algebra
class NotContained(KregError):
    pass


class IncompleteSum(KregError):
    pass


class NotBijective(KregError):
    pass


class NotInRange(KregError):
    pass


# polynomial maps
class ParseError(KregError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


class NonzeroConstant(KregError):
    pass


class ShapeMismatch(KregError):
    pass


class ZeroMap(KregError):
    pass


# iteration
class Infeasible(KregError):
    pass


class NotRegular(KregError):
    pass


class AlreadyRegular(KregError):
    pass


class IdenticallyZeroThroughOrder(KregError):
    def __init__(self, order: int):
        super().__init__(f"series vanishes through order {order}")
        self.order = order


class FieldClash(KregError):
    """Two different square-root extensions met in one computation."""


# newton
class NotConvenient(KregError):
    pass


class CapExceeded(KregError):
    pass


class NotSimple(KregError):
    pass


class DegenerateStrictTransform(KregError):
    pass


class Unsupported(KregError):
    pass
