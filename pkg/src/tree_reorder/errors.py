class ReorderError(ValueError):
    """Base class for every error raised by tree_reorder."""

    lineno: int | None = None

    def at_line(self, lineno: int) -> "ReorderError":
        self.lineno = lineno
        self.args = (f"line {lineno}: {self.args[0]}" if self.args else f"line {lineno}",)
        return self


# ========= treebank =========
class TreebankError(ReorderError):
    pass


class UnbalancedBrackets(TreebankError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class EmptyTree(TreebankError):
    pass


class LabelMissing(TreebankError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


# ========= tags =========
class TagError(ReorderError):
    pass


class UnknownClass(TagError):
    pass


class DuplicateClass(TagError):
    pass


# ========= rules =========
class RuleError(ReorderError):
    pass


class RuleSyntaxError(RuleError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (at column {position + 1})")
        self.position = position


class DuplicateLhsElement(RuleSyntaxError):
    pass


class UnresolvedRhsReference(RuleError):
    pass


class DroppedLhsElement(RuleError):
    pass


class DuplicateRhsReference(RuleError):
    pass


class DuplicateRuleId(RuleError):
    pass


class UnknownRuleId(RuleError):
    pass


# ========= matching / engine =========
class MatchError(ReorderError):
    pass


class CategoryMismatch(MatchError):
    pass


class EngineError(ReorderError):
    pass


class IterationLimitExceeded(EngineError):
    def __init__(self, path: tuple[int, ...], limit: int):
        super().__init__(f"no fixpoint after {limit} rule firings at node path {list(path)}")
        self.path = path
        self.limit = limit


class ConfigError(ReorderError):
    """A bad environment setting."""


class CorpusIOError(ReorderError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


# ========= evaluation =========
class EvalError(ReorderError):
    pass


class EmptyCorpus(EvalError):
    pass


class ZeroReferenceLength(EvalError):
    pass


class LineCountMismatch(EvalError):
    def __init__(self, what: str, expected: int, got: int):
        super().__init__(f"{what}: expected {expected} lines, got {got}")
        self.expected = expected
        self.got = got


# ========= phrase statistics =========
class PhraseError(ReorderError):
    pass


class MalformedPair(PhraseError):
    pass


class NegativeIndex(PhraseError):
    pass


class AlignmentOutOfRange(PhraseError):
    pass


class BucketMismatch(PhraseError):
    pass
