"""Exception types shared by every stablab module.

Each error carries a short machine-readable ``code`` that the CLI turns
into its reason field and exit status.
"""

from __future__ import annotations


class StablabError(Exception):
    code = "error"


class MalformedInputError(StablabError, ValueError):
    code = "malformed-input"


class NotAFaceError(StablabError, KeyError):
    code = "not-a-face"

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else self.code


class NotFoundError(StablabError, KeyError):
    code = "not-found"

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else self.code


class UnsupportedInputError(StablabError, ValueError):
    code = "unsupported-input"


class PreconditionError(StablabError, ValueError):
    code = "precondition"


class BudgetError(StablabError, RuntimeError):
    code = "budget"
