"""Exception hierarchy shared by every stage of the pipeline."""


class ProvQBEError(Exception):
    """Base class for all library errors."""


class SchemaError(ProvQBEError):
    """Schema or instance violates a structural invariant."""


class InvalidQueryError(ProvQBEError):
    """Query references unknown relations, has wrong arity, or dangling variables."""


class QueryParseError(ProvQBEError):
    pass


class FormatError(ProvQBEError):
    """A schema, instance or prov-example document could not be read."""


class NotAnOutputError(ProvQBEError):
    pass


class MissingTupleError(ProvQBEError):
    """An explanation names an annotation absent from the instance."""


class IncompleteProjectionError(ProvQBEError):
    pass


class NoProjectionError(ProvQBEError):
    """Some output position has no attribute that could project it in every row."""

    def __init__(self, position):
        super().__init__(f"no attribute projects output position {position} in every row")
        self.position = position


class IncompletableExplanationError(ProvQBEError):
    pass


class UnsupportedFragmentError(ProvQBEError):
    """The explanation is missing more than a single join tuple between two parts."""


class NoConsistentQueryError(ProvQBEError):
    pass


class UnmatchedValueError(ProvQBEError):
    def __init__(self, value, best=None):
        msg = f"no tuple matches value {value!r}"
        if best is not None:
            msg += f" (best candidate {best.annotation} scored {best.score:.4f})"
        super().__init__(msg)
        self.value = value
        self.best = best
