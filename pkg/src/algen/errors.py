"""Exception types shared across the package."""


class AlgenError(Exception):
    """Base class for domain errors; `kind` is the machine-readable tag."""

    kind = "error"

    def to_json(self):
        return {"error": self.kind, "message": str(self)}


class ParseError(AlgenError, ValueError):
    kind = "parse"


class ArityError(AlgenError, ValueError):
    kind = "arity"


class PreconditionError(AlgenError, ValueError):
    kind = "precondition"


class CapExceeded(AlgenError):
    """A degree, term-count or enumeration cap was hit.

    `which` is one of ``"degree"``, ``"terms"``, ``"enumeration"``.
    """

    kind = "cap-exceeded"

    def __init__(self, which, limit, value=None):
        self.which = which
        self.limit = limit
        self.value = value
        msg = f"{which} cap {limit} exceeded"
        if value is not None:
            msg += f" (reached {value})"
        super().__init__(msg)

    def to_json(self):
        out = super().to_json()
        out["cap"] = self.which
        out["limit"] = self.limit
        if self.value is not None:
            out["value"] = self.value
        return out


class ReconstructionError(AlgenError):
    kind = "reconstruction"
