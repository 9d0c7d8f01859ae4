"""Exception hierarchy shared by every module of the package."""


class OCPMError(Exception):
    """Base class for domain errors (mapped to exit code 1 by the CLI)."""


class MalformedInput(OCPMError):
    """Input cannot be parsed into the expected layout."""


class IntegrityError(OCPMError):
    """A log violates a referential or uniqueness invariant.

    ``identifier`` names the offending event or object id.
    """

    def __init__(self, message, identifier=None):
        super().__init__(message)
        self.identifier = identifier


class UnknownType(OCPMError):
    """An object type is not declared by the log."""


class UnknownActivity(OCPMError):
    """An activity label cannot be resolved against the log."""


class MissingAttribute(OCPMError):
    """Objects lack a required attribute; ``oids`` lists them."""

    def __init__(self, message, oids=()):
        super().__init__(message)
        self.oids = tuple(oids)


class InvalidConfig(OCPMError):
    """A configuration document is out of range or inconsistent."""
