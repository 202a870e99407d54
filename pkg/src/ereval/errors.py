"""Error taxonomy shared by the library and the CLI.

Exit codes are a stable scripting contract: 2 input/parse, 3 design,
4 degenerate estimator, 5 internal.
"""


class EvalError(Exception):
    """Base class for all ereval errors."""

    exit_code = 5


class InputError(EvalError):
    """Invalid or malformed input data."""

    exit_code = 2


class DuplicateMention(InputError):
    """A mention id is assigned to more than one cluster."""


class UniverseMismatch(InputError):
    """Two clusterings do not cover the same mention-id set."""


class UnknownMention(InputError):
    """A mention id does not exist in the clustering's universe."""


class SchemaError(InputError):
    """A table or config file does not match its documented schema."""


class InvalidInput(InputError):
    """Input violates a documented precondition."""


class CsvParseError(InputError):
    """A CSV file failed to parse; message carries the line number."""


class InvalidDesign(EvalError):
    """The sampling design is inconsistent or unsupported."""

    exit_code = 3


class DegenerateError(EvalError):
    """The requested quantity is undefined for this input."""

    exit_code = 4


class NoPredictedLinks(DegenerateError):
    """The prediction (or its restriction) contains no co-clustered pairs."""


class NoTrueLinks(DegenerateError):
    """The ground truth contains no co-clustered pairs."""


class InsufficientSample(DegenerateError):
    """Fewer samples than the estimator requires."""


class DegenerateRatio(DegenerateError):
    """A ratio estimator denominator or numerator mean is zero."""


class OverflowGuard(EvalError):
    """A pair count would exceed the exact-integer range of the kernels."""

    exit_code = 5
