"""Exception hierarchy shared by all modules."""


class GedIndexError(Exception):
    """Base class for every error raised by this package."""


class ParseError(GedIndexError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


class CostModelError(GedIndexError):
    """The edit costs cannot be represented by the requested tree metric."""


class RelabelTooExpensive(CostModelError):
    pass


class DeletionTooCheap(CostModelError):
    pass


class UnanchoredVertex(GedIndexError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class TreeMismatch(GedIndexError):
    pass


class InstanceTooLarge(GedIndexError):
    pass


class SizeCapExceeded(GedIndexError):
    pass


class CorruptIndex(GedIndexError):
    pass


class IndexVersionError(GedIndexError):
    pass
