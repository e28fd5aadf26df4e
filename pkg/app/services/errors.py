"""
Exception hierarchy for NormScope services
"""


class NormScopeError(ValueError):
    """Base class for all NormScope failures"""


class DomainError(NormScopeError):
    """Argument outside the domain of an operation"""


class ParseError(NormScopeError):
    """Malformed vector, tree or interval literal"""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.message = message
        self.column = column


class MalformedCertificateError(NormScopeError):
    """Norming certificate that is not a finite formation tree"""


class TreeStructureError(NormScopeError):
    """Tree that violates downward closure, sibling ranges or equal leaf length"""


class TowerRangeError(NormScopeError):
    """Tower enclosure that cannot be represented or decided"""


class ParameterError(NormScopeError):
    """Parameter system is missing a value an operation needs"""


class SigmaExhaustedError(NormScopeError):
    """No member of the materialized L prefix satisfies the sigma constraint"""

    def __init__(self, support_size: int, prefix_length: int):
        super().__init__(
            f"no unused L member satisfies the support constraint for support size "
            f"{support_size}; extend L beyond {prefix_length} materialized members"
        )
        self.support_size = support_size


class BlockDecompositionError(NormScopeError):
    """Vector admits no block decomposition against the functional sequence"""

    def __init__(self, slots):
        super().__init__(f"slots {list(slots)} carry mass but pair to zero with their functional")
        self.slots = list(slots)


class PreconditionError(NormScopeError):
    """Harness precondition violated"""


class ConfigError(NormScopeError):
    """System or run configuration missing or invalid"""
