"""Exception hierarchy shared by every module.

Each error carries the name of the module that raised it and a short
``code`` used by the command line front end when reporting failures.
"""


class QltError(Exception):
    module = "qlt"

    @property
    def code(self) -> str:
        return type(self).__name__

    def describe(self) -> str:
        return f"{self.module}.{self.code}: {self}"


# expr

class ExprError(QltError):
    module = "expr"


class ExprSyntaxError(ExprError):
    def __init__(self, position: int, expected: str, found: str = ""):
        self.position = position
        self.expected = expected
        self.found = found
        where = f"found {found!r}" if found else "found end of input"
        super().__init__(f"at offset {position}: expected {expected}, {where}")

    @property
    def code(self) -> str:
        return "SyntaxError"


class UnknownIdentifier(ExprError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        self.position = position
        at = "" if position is None else f" at offset {position}"
        super().__init__(f"unknown identifier {name!r}{at}")


class NonIntegerExponent(ExprError):
    pass


class DomainError(ExprError):
    pass


class DimensionError(ExprError, ValueError):
    pass


# autodiff

class OrderTooLarge(QltError):
    module = "autodiff"


# zerofind

class ZeroFindError(QltError):
    module = "zerofind"


class NoConvergence(ZeroFindError):
    pass


class NotSimpleZero(ZeroFindError):
    pass


class NotCommonZero(ZeroFindError):
    pass


# ratio

class RatioError(QltError):
    module = "ratio"


class RankDeficient(RatioError):
    pass


class InconsistentKernels(RatioError):
    pass


# limits

class LimitError(QltError):
    module = "limits"


class NotTransversal(LimitError):
    pass


class SampleOnZeroSet(LimitError):
    pass


class NotOnZeroSet(LimitError):
    pass


class DegeneratePath(LimitError):
    pass


# extension

class ExtensionError(QltError):
    module = "extension"


class ReconstructionFailure(ExtensionError):
    pass


class NotComplexLinearError(ExtensionError):
    @property
    def code(self) -> str:
        return "NotComplexLinear"


# whitney

class ZeroDerivativeOnPath(QltError):
    module = "whitney"
