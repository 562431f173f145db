from typing import Any, Dict, Optional


class SyndeticError(Exception):
    """Base class for all errors raised by the syndetic package"""

    exit_code = 3

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class InvalidGroup(SyndeticError):
    """A group description or Cayley table is malformed"""


class InvalidElement(SyndeticError):
    """An element encoding does not belong to the group it is used with"""


class InvalidExpr(SyndeticError):
    """A set expression is malformed or used with an incompatible group"""


class ScaleExceeded(SyndeticError):
    """A resource guard tripped: a ball, grid or search grew past its configured cap"""

    exit_code = 65


class ConstructionFailed(SyndeticError):
    """A certificate builder could not find a translate for some cell"""


class NoCoveringTranslate(SyndeticError):
    """An n-subset escapes every translate of a claimed syndetic witness"""


class NotAvoiding(SyndeticError):
    """A set fails the F-avoidance precondition FA ∩ A = ∅"""


class CriteriaMismatch(SyndeticError):
    """Two independent decision paths disagreed on the same instance"""


class UsageError(SyndeticError):
    """Bad command-line flags"""

    exit_code = 64
