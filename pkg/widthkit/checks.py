"""Outcome of checking one instance of an implication."""

from enum import Enum


class Verdict(str, Enum):
    HELD = "held"
    # hypotheses hold only partly; the conclusion is not at stake
    VACUOUS = "vacuous"
    # the instance does not meet the standing assumptions
    INAPPLICABLE = "inapplicable"
    VIOLATED = "violated"

    def __bool__(self):
        return self is not Verdict.VIOLATED

    @classmethod
    def of(cls, conclusion: bool) -> "Verdict":
        return cls.HELD if conclusion else cls.VIOLATED
