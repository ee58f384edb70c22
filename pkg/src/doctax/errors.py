"""Exception hierarchy.

``InputError`` subclasses map to CLI exit code 2, ``DataError`` subclasses
to exit code 3.
"""


class DoctaxError(Exception):
    exit_code = 3

    @property
    def code(self):
        return type(self).__name__


class InputError(DoctaxError):
    exit_code = 2


class DataError(DoctaxError):
    exit_code = 3


class IOFailure(InputError):
    """A file or directory could not be read or written."""


class EmptyInput(InputError):
    pass


class CorruptFile(InputError):
    pass


class VersionMismatch(InputError):
    pass


class SchemaMismatch(InputError):
    pass


class WindowTooSmall(InputError):
    pass


class EmptyGazetteer(InputError):
    pass


class RootPageMissing(InputError):
    pass


class UnknownTerm(DataError):
    def __init__(self, term):
        super().__init__(f"term never observed: {term!r}")
        self.term = term


class EmptyUnit(DataError):
    pass


class DegenerateClass(DataError):
    def __init__(self, klass, message=None):
        super().__init__(message or f"class {klass} has no positive or no negative examples")
        self.klass = klass


class ClassTooSmall(DataError):
    pass


class InvalidCounts(DataError):
    pass
