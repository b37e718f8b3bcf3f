"""Exception hierarchy.

Every error carries a short machine-readable ``category`` used by the CLI
when reporting failures.
"""


class ReliaMisError(Exception):
    category = "error"


class UndeclaredComponent(ReliaMisError):
    category = "undeclared-component"


class NotARelaxation(ReliaMisError):
    category = "not-a-relaxation"


class NotARefinement(ReliaMisError):
    category = "not-a-refinement"


class OutOfRange(ReliaMisError):
    category = "out-of-range"


class EmptyEffects(ReliaMisError):
    category = "empty-effects"


class SameComponent(ReliaMisError):
    category = "same-component"


class NameCollision(ReliaMisError):
    category = "name-collision"


class EmptyCauses(ReliaMisError):
    category = "empty-causes"


class EffectInCauses(ReliaMisError):
    category = "effect-in-causes"


class BreaksTermination(ReliaMisError):
    category = "breaks-termination"


class BreaksMonotonicity(ReliaMisError):
    category = "breaks-monotonicity"


class ScriptError(ReliaMisError):
    """An operator failed while replaying a script."""

    category = "script-error"

    def __init__(self, index, op, cause):
        self.index = index
        self.op = op
        self.cause = cause
        super().__init__(f"op #{index} ({op}) failed: [{cause.category}] {cause}")


class DepthZero(ReliaMisError):
    category = "depth-zero"


class UniverseTooLarge(ReliaMisError):
    category = "universe-too-large"


class UnsupportedOperation(ReliaMisError):
    category = "unsupported-operation"


class BottomNotConcrete(ReliaMisError):
    category = "bottom-not-concrete"


class NotWellFormed(ReliaMisError):
    category = "not-well-formed"


class InvalidModel(ReliaMisError):
    category = "invalid-model"


class PartialAssignment(ReliaMisError):
    category = "partial-assignment"


class TooLarge(ReliaMisError):
    category = "too-large"


class ParseError(ReliaMisError):
    category = "parse-error"

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class DuplicateComponent(ParseError):
    category = "duplicate-component"


class UnknownKey(ParseError):
    category = "unknown-key"
