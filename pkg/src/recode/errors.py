"""Exception hierarchy shared by all pipeline stages."""


class RecodeError(Exception):
    """Base class for all errors raised by this package."""


# report bundles
class MissingFile(RecodeError):
    pass


class MalformedImage(RecodeError):
    pass


class MalformedAnnotation(RecodeError):
    pass


class EmptyDescription(RecodeError):
    pass


class RootNotFound(RecodeError):
    pass


# lexicons
class MissingCategory(RecodeError):
    pass


class EmptyCategory(RecodeError):
    pass


class DuplicateTerm(RecodeError):
    pass


class InvalidPattern(RecodeError):
    pass


class UnknownCategory(RecodeError):
    pass


# augmentor
class NoReplaceableKeyword(RecodeError):
    pass


class EmptyCorpus(RecodeError):
    pass


# classifier
class DegenerateCorpus(RecodeError):
    pass


class EmptySet(RecodeError):
    pass


class PluginUnavailable(RecodeError):
    pass


# screenshot decomposition
class OcrFailure(RecodeError):
    pass


class DegenerateBox(RecodeError):
    pass


# detector / harness
class MissingScore(RecodeError):
    pass


class UnlabeledReport(RecodeError):
    pass
