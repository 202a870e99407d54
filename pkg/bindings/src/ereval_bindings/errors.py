"""Exception taxonomy mirroring the core library, so downstream code can
catch binding-level errors without importing the core package. Class
names match the core names one for one; each instance keeps the original
exception as its __cause__."""

import ereval.errors as _core


class EvalError(Exception):
    exit_code = 5


class InputError(EvalError):
    exit_code = 2


class DuplicateMention(InputError):
    pass


class UniverseMismatch(InputError):
    pass


class UnknownMention(InputError):
    pass


class SchemaError(InputError):
    pass


class InvalidInput(InputError):
    pass


class CsvParseError(InputError):
    pass


class InvalidDesign(EvalError):
    exit_code = 3


class DegenerateError(EvalError):
    exit_code = 4


class NoPredictedLinks(DegenerateError):
    pass


class NoTrueLinks(DegenerateError):
    pass


class InsufficientSample(DegenerateError):
    pass


class DegenerateRatio(DegenerateError):
    pass


class OverflowGuard(EvalError):
    pass


_BY_NAME = {
    cls.__name__: cls
    for cls in (
        EvalError, InputError, DuplicateMention, UniverseMismatch,
        UnknownMention, SchemaError, InvalidInput, CsvParseError,
        InvalidDesign, DegenerateError, NoPredictedLinks, NoTrueLinks,
        InsufficientSample, DegenerateRatio, OverflowGuard,
    )
}


def wrap(exc: _core.EvalError) -> EvalError:
    """Translate a core exception into the binding class of the same name
    (nearest ancestor with a known name otherwise)."""
    for klass in type(exc).__mro__:
        if klass.__name__ in _BY_NAME:
            return _BY_NAME[klass.__name__](*exc.args)
    return EvalError(*exc.args)
